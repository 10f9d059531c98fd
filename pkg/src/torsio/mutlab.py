"""Mutation experiments: Mayer-Vietoris splittings, sign part and the end-to-end check.

A decomposition glued by a move ``m`` is modelled by the 2-complex ``W``
with generators ``piece1, piece2, A, B, C`` and relators

    rels1, rels2, A_k w1_k^-1 (k = 0..2), A_k w2_k^-1 (k = 0..2)

where ``(w1_k, w2_k)`` are the gluing words of :func:`amalgam_gluing_words`.
``W`` is the union of the subcomplexes ``W1`` (piece1, A, B, C and the first
three gluing cells) and ``W2``, which meet in the wedge ``V`` of the three
circles A, B, C.  Collapsing A, B, C recovers the amalgam presentation, so
``W`` carries the same torsion data while the splitting is cellular.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np
import sympy

from . import chainlib, resolve_path
from .chainlib import BasedComplex, HomologyBasisSet
from .fgroup import (SPHERE_LABELS, GroupPresentation, MutationMove, TangleDecomposition, Word,
                     amalgam_gluing_words, classify_mutation, load_knot, mutant_presentation)
from .repspace import (NotAPath, NoSolution, ReducibleOnly, Representation, TangentVector,
                       amalgam_representation, continue_solution, is_F_irreducible,
                       is_irreducible, is_regular, mutant_rep, solve_representations,
                       tangent_to_cocycle, tau_sharp)
from .su2 import adjoint
from .torsionform import PeripheralCertificate, distinguished_generator, torsion_form
from .twisted import CoefficientSystem, Derivation, abelianization, twisted_complex

MV_TOL = 1e-8
PASS_TOL = 1e-6


class DimensionMismatch(ArithmeticError):
    """Cohomology dimensions differ from the regular, F-irreducible pattern."""


class InsufficientSamples(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# the split complex


@dataclass
class Splitting:
    """``W = W1 u W2`` with ``W1 n W2 = V`` and the cell inclusions."""

    whole: GroupPresentation
    part1: GroupPresentation
    part2: GroupPresentation
    inter: GroupPresentation
    words: list          # A_k -> amalgam word, used for the representation on W
    cells1: tuple        # (generator map, relator map) of W1 into W
    cells2: tuple
    certificate: PeripheralCertificate
    meridian: Word
    longitude: Word

    @property
    def n_amalgam(self):
        return self.whole.num_generators - 3


def split(d: TangleDecomposition, m: MutationMove, certificate, longitude: Word) -> Splitting:
    """Build ``W`` for the move ``m``; ``certificate`` is that of the amalgam presentation."""
    n1, n2 = d.piece1.num_generators, d.piece2.num_generators
    m1, m2 = len(d.piece1.relators), len(d.piece2.relators)
    n, off = n1 + n2, d.offset
    glue = amalgam_gluing_words(d, m)
    A = [Word.gen(n + k) for k in range(3)]
    rels = list(d.piece1.relators) + [r.shift(off) for r in d.piece2.relators]
    rels += [A[k] * w1.inverse() for k, (w1, _) in enumerate(glue)]
    rels += [A[k] * w2.inverse() for k, (_, w2) in enumerate(glue)]
    names = [f"p1.{s}" for s in d.piece1.generator_names] + \
            [f"p2.{s}" for s in d.piece2.generator_names] + ["A", "B", "C"]
    whole = GroupPresentation(n + 3, rels, names, f"W[{m.name}]")

    # W1: piece1 generators, then A, B, C at n1..n1+2
    to1 = list(range(n1)) + [n + k for k in range(3)]
    back1 = {g: i for i, g in enumerate(to1)}
    rels1 = list(d.piece1.relators) + [
        Word([(back1[g], e) for g, e in r.letters]) for r in rels[m1 + m2:m1 + m2 + 3]]
    part1 = GroupPresentation(n1 + 3, rels1, name="W1")
    to2 = [off + g for g in range(n2)] + [n + k for k in range(3)]
    back2 = {g: i for i, g in enumerate(to2)}
    rels2 = list(d.piece2.relators) + [
        Word([(back2[g], e) for g, e in r.letters]) for r in rels[m1 + m2 + 3:]]
    part2 = GroupPresentation(n2 + 3, rels2, name="W2")
    inter = GroupPresentation(3, [], ["A", "B", "C"], "V")

    cells1 = (to1, list(range(m1)) + [m1 + m2 + k for k in range(3)])
    cells2 = (to2, [m1 + j for j in range(m2)] + [m1 + m2 + 3 + k for k in range(3)])
    cert = _transport_certificate(PeripheralCertificate.from_json(certificate), m1 + m2)
    mer = d.meridian.shift(off)
    cert.validate(whole, mer, longitude)
    return Splitting(whole, part1, part2, inter, [w2 for _, w2 in glue], cells1, cells2,
                     cert, mer, longitude)


def _transport_certificate(cert: PeripheralCertificate, m12: int) -> PeripheralCertificate:
    """Rewrite gluing factors ``w1 w2^-1`` as ``R1^-1 R2`` with ``R_i = A w_i^-1``."""
    out = []
    for j, u, s in cert.factors:
        if j < m12:
            out.append((j, u, s))
            continue
        k = j - m12
        r1, r2 = m12 + k, m12 + 3 + k
        if s == 1:
            out += [(r1, u, -1), (r2, u, 1)]
        else:
            out += [(r2, u, -1), (r1, u, 1)]
    return PeripheralCertificate(out)


def extend_representation(rep: Representation, sp: Splitting) -> Representation:
    """Representation of ``W``: ``A_k`` goes to the image of its piece2 gluing word."""
    ims = list(rep.images) + [rep(w) for w in sp.words]
    return Representation(ims, sp.whole, theta=rep.theta)


def _restriction(gens, rels, n_whole, m_whole):
    """Cochain restriction matrices ``C^i(W) -> C^i(part)`` for i = 0, 1, 2."""
    def select(idx, total):
        S = np.zeros((3 * len(idx), 3 * total))
        for a, b in enumerate(idx):
            S[3 * a:3 * a + 3, 3 * b:3 * b + 3] = np.eye(3)
        return S
    return [np.eye(3), select(gens, n_whole), select(rels, m_whole)]


def _pad(C: BasedComplex) -> BasedComplex:
    """Append an empty degree 2 to a complex that stops in degree 1."""
    if C.top >= 2:
        return C
    return BasedComplex(C.dims + [0], list(C.maps) + [np.zeros((0, C.dims[1]))], cochain=True,
                        check=False, name=C.name)


# ---------------------------------------------------------------------------
# Mayer-Vietoris


@dataclass
class MvSequence:
    """Cochain splitting of ``W`` with homology bases and the multiplicativity check."""

    splitting: Splitting
    rep: Representation
    sub: BasedComplex
    mid: BasedComplex
    quot: BasedComplex
    inc: list
    proj: list
    bases: tuple
    result: chainlib.MvResult

    @property
    def dims(self):
        """``(H^1(W), H^1(W1)+H^1(W2), H^1(V), H^2(W))``."""
        Hs, Hm, Hq = self.bases
        return (len(Hs[1]), len(Hm[1]), len(Hq[1]), len(Hs[2]))

    @property
    def residual(self):
        return self.result.residual

    def exactness_residual(self):
        """Largest entry of a composition of consecutive maps of the long exact sequence."""
        les = self.result.les
        worst = 0.0
        for k in range(len(les.maps) - 1):
            A, B = les.maps[k], les.maps[k + 1]
            if A.size and B.size:
                worst = max(worst, float(np.abs(A @ B).max()))
        return worst


def piece_cohomology(rep, part: GroupPresentation, tol=None):
    """Basis of ``H^1`` of a piece, as derivations on its own generators."""
    C = twisted_complex(part, CoefficientSystem.adjoint(rep))
    H, dims = chainlib.homology_basis(C, tol)
    return [Derivation.from_cochain(np.real(h), rep) for h in H[1]], dims


def mv_sequence(d: TangleDecomposition, m: MutationMove, rep: Representation, v: TangentVector,
                certificate, longitude: Word, piece1_basis=None, piece2_basis=None,
                inter_basis=None, tol=None) -> MvSequence:
    """Mayer-Vietoris data for ``rep``, a representation of the amalgam glued by ``m``.

    ``piece1_basis`` and ``piece2_basis`` are derivations on the piece
    generators (default: computed); they are extended over A, B, C through
    the gluing words.  ``inter_basis`` is a list of cochains of ``V``.
    """
    sp = split(d, m, certificate, longitude)
    R = extend_representation(rep, sp)
    n1, n2 = d.piece1.num_generators, d.piece2.num_generators
    nW, mW = sp.whole.num_generators, len(sp.whole.relators)
    glue = amalgam_gluing_words(d, m)

    C = twisted_complex(sp.whole, CoefficientSystem.adjoint(R))
    C1 = twisted_complex(sp.part1, CoefficientSystem.adjoint([R.images[g] for g in sp.cells1[0]]))
    C2 = twisted_complex(sp.part2, CoefficientSystem.adjoint([R.images[g] for g in sp.cells2[0]]))
    CV = _pad(twisted_complex(sp.inter, CoefficientSystem.adjoint(R.images[-3:])))
    mid = C1.direct_sum(C2)

    S1 = _restriction(*sp.cells1, nW, mW)
    S2 = _restriction(*sp.cells2, nW, mW)
    T1 = _restriction(list(range(n1, n1 + 3)), [], n1 + 3, len(sp.part1.relators))
    T2 = _restriction(list(range(n2, n2 + 3)), [], n2 + 3, len(sp.part2.relators))
    inc = [np.vstack([a, b]) for a, b in zip(S1, S2)]
    proj = [np.hstack([a, -b]) for a, b in zip(T1, T2)]

    ims1 = rep.images[:n1]
    ims2 = rep.images[n1:]
    if piece1_basis is None:
        piece1_basis, dims1 = piece_cohomology(ims1, d.piece1, tol)
    if piece2_basis is None:
        piece2_basis, dims2 = piece_cohomology(ims2, d.piece2, tol)
    if len(piece1_basis) != 3 or len(piece2_basis) != 3:
        raise DimensionMismatch(
            f"piece H^1 dimensions {len(piece1_basis)}, {len(piece2_basis)}; expected 3, 3")
    off = d.offset
    ext1 = []
    for z in piece1_basis:
        z = Derivation(z.values, ims1)
        ext1.append(np.concatenate([z.cochain()] + [z(w1) for w1, _ in glue]))
    ext2 = []
    for z in piece2_basis:
        z = Derivation(z.values, ims2)
        ext2.append(np.concatenate([z.cochain()] + [z(w2.shift(-off)) for _, w2 in glue]))
    z1, z2 = C1.dims[1], C2.dims[1]
    Hm = [np.concatenate([h, np.zeros(z2)]) for h in ext1] + \
         [np.concatenate([np.zeros(z1), h]) for h in ext2]

    if inter_basis is None:
        HV, dimsV = chainlib.homology_basis(CV, tol)
        inter_basis = [np.real(h) for h in HV[1]]
    if len(inter_basis) != 6:
        raise DimensionMismatch(f"H^1(V) has dimension {len(inter_basis)}, expected 6")

    dimsW = chainlib.betti_numbers(C, tol)
    if dimsW != [0, 1, 1]:
        raise DimensionMismatch(f"twisted Betti numbers of W are {dimsW}, expected (0, 1, 1)")
    z = Derivation(v.derivation.values, rep.images)
    vW = np.concatenate([z.cochain()] + [z(w) for w in sp.words])
    h2 = distinguished_generator(R, sp.whole, sp.meridian, sp.longitude, sp.certificate, tol)

    Hs = HomologyBasisSet({1: [vW], 2: [h2]})
    Hmid = HomologyBasisSet({1: Hm})
    Hq = HomologyBasisSet({1: inter_basis})
    res = chainlib.mv_multiplicativity(C, mid, CV, inc, proj, Hs, Hmid, Hq)
    return MvSequence(sp, R, C, mid, CV, inc, proj, (Hs, Hmid, Hq), res)


@dataclass
class TwistedComparison:
    """Both Mayer-Vietoris sequences and the twisted-part ratio."""

    original: MvSequence
    mutant: MvSequence
    ratio: float          # from the multiplicativity right-hand sides
    direct_ratio: float   # torsions of W computed directly

    @property
    def residual(self):
        return max(self.original.residual, self.mutant.residual)


def twisted_ratio(d: TangleDecomposition, m: MutationMove, rep_amalgam: Representation,
                  v: TangentVector, certificate, longitude, mutant_certificate,
                  mutant_longitude, x=None, tol=None) -> TwistedComparison:
    """``T(W^m; tau# v, h) / T(W; v, h)`` with coordinated bases on both sides.

    piece1 classes on the mutant side are ``Ad_{x^-1}`` of those on the
    original side; piece2 and the sphere share their bases.
    """
    ident = MutationMove("identity")
    mv = mv_sequence(d, ident, rep_amalgam, v, certificate, longitude, tol=tol)
    rep_tau, x = mutant_rep(rep_amalgam, d, m, x)
    v_tau = tau_sharp(v, rep_tau, x, d, m) if not m.is_identity else v
    n1 = d.offset
    ims1 = rep_amalgam.images[:n1]
    b1, _ = piece_cohomology(ims1, d.piece1, tol)
    b2, _ = piece_cohomology(rep_amalgam.images[n1:], d.piece2, tol)
    Xi = adjoint(x.x.inverse())
    b1_tau = [Derivation([Xi @ val for val in z.values], rep_tau.images[:n1]) for z in b1]
    Hq = mv.bases[2][1]
    mv = mv_sequence(d, ident, rep_amalgam, v, certificate, longitude, b1, b2, Hq, tol)
    mv_tau = mv_sequence(d, m, rep_tau, v_tau, mutant_certificate, mutant_longitude,
                         b1_tau, b2, Hq, tol)
    ratio = float(mv_tau.result.rhs / mv.result.rhs)
    direct = float(mv_tau.result.lhs / mv.result.lhs)
    return TwistedComparison(mv, mv_tau, ratio, direct)


# ---------------------------------------------------------------------------
# sign part


@dataclass
class SignPart:
    """Determinants of the untwisted comparison maps on ``H_0``, on ``[mu]`` and on ``H_1(F)``."""

    tau0: int
    mu: int
    tau1: int
    tau1_quotient: int

    def as_tuple(self):
        return (self.tau0, self.mu, self.tau1)


def _sympy_det(rows):
    return int(sympy.Matrix(rows).det())


def rotation_det_h1(m: MutationMove) -> int:
    """Determinant of the induced map on ``H_1(F) = Z<a, b, c>``."""
    cols = [[img.exponent_sum(g) for g in range(3)] for img in m.induced()]
    return _sympy_det([list(r) for r in zip(*cols)])


def rotation_det_quotient(m: MutationMove) -> int:
    """Determinant of the puncture permutation on ``R^4 / (1, 1, 1, 1)``."""
    idx = {g: i for i, g in enumerate(SPHERE_LABELS)}
    P = [[Fraction(int(idx[m(g)] == i)) for g in SPHERE_LABELS] for i in range(4)]
    # basis e_a, e_b, e_c of the quotient; e_d = -(e_a + e_b + e_c)
    cols = []
    for j in range(3):
        img = [P[i][j] for i in range(4)]
        cols.append([img[i] - img[3] for i in range(3)])
    return _sympy_det([list(r) for r in zip(*cols)])


def meridian_sign(d: TangleDecomposition, m: MutationMove) -> int:
    """Sign of a piece1 arc meridian in ``H_1`` of the glued amalgam, relative to ``mu``.

    The shared meridian lies in piece2.  The sign is +1 exactly when the
    regluing is compatible with the orientation of the knot.
    """
    P = mutant_presentation(d, m)
    alpha = abelianization(P, d.meridian.shift(d.offset))
    signs = {sum(alpha[g] * e for g, e in w.letters) for w in d.arc_meridians["piece1"]}
    if len(signs) != 1 or abs(next(iter(signs))) != 1:
        raise ArithmeticError(f"piece1 arc meridians map to {sorted(signs)}")
    return signs.pop()


def sign_part(d: TangleDecomposition, m: MutationMove) -> SignPart:
    """Exact sign data for comparing the untwisted sequences of ``m`` and the identity.

    On ``H_0`` both sequences use the class of a point, so the map is the
    identity.
    """
    t1 = rotation_det_h1(m)
    tq = rotation_det_quotient(m)
    if t1 != tq:
        raise ArithmeticError("the two descriptions of H_1(F) disagree")
    return SignPart(1, meridian_sign(d, m), t1, tq)


# ---------------------------------------------------------------------------
# end-to-end


@dataclass
class MutationPair:
    """Source knot, target knot and the recorded move between them."""

    name: str
    source: object
    target: object
    move: MutationMove
    mutant_longitude: Word
    mutant_certificate: list
    target_map: list

    @classmethod
    def load(cls, name_or_path):
        path = resolve_path(name_or_path)
        data = json.loads(path.read_text())
        base = path.parent
        src = load_knot((base / data["source"]).read_text())
        tgt = load_knot((base / data["target"]).read_text())
        if src.decomposition is None:
            raise ValueError("source knot carries no tangle decomposition")
        return cls(data["name"], src, tgt, MutationMove(data["move"]),
                   Word.from_json(data["mutant_longitude"]), data["mutant_certificate"],
                   [int(j) for j in data["target_map"]])


@dataclass
class Sample:
    theta: float
    ratio_twisted: float
    ratio_twisted_direct: float
    mv_residual: float
    sign0: int
    sign_mu: int
    sign1: int
    tau_source: float
    tau_target: float
    ratio_total: float
    deviation: float
    intertwiner: list
    dims: list

    CSV_COLUMNS = ("theta", "ratio_twisted", "sign0", "sign_mu", "sign1", "ratio_total")


@dataclass
class MutationReport:
    pair: str
    source: str
    target: str
    move: str
    classification: str
    seed: int
    tolerances: dict
    samples: list = dc_field(default_factory=list)

    @property
    def passed(self):
        """True or False for a positive move, None for a negative one."""
        if self.classification != "Positive":
            return None
        return bool(self.samples) and all(
            s.deviation < self.tolerances["pass"]
            and abs(s.ratio_twisted - 1) < self.tolerances["pass"]
            and s.mv_residual < self.tolerances["mv"]
            and (s.sign0, s.sign_mu, s.sign1) == (1, 1, 1) for s in self.samples)

    def to_json(self):
        return {
            "pair": self.pair, "source": self.source, "target": self.target,
            "move": self.move, "classification": self.classification, "seed": self.seed,
            "tolerances": self.tolerances, "passed": self.passed,
            "samples": [{k: getattr(s, k) for k in s.__dataclass_fields__} for s in self.samples],
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(Sample.CSV_COLUMNS)
        for s in self.samples:
            w.writerow(["%.17g" % v if isinstance(v, float) else v
                        for v in (getattr(s, c) for c in Sample.CSV_COLUMNS)])
        return buf.getvalue()


def default_thetas(count):
    """Evenly spread meridian angles on an arc where the bundled knots have regular reps."""
    return [float(t) for t in np.linspace(1.2, 1.9, count)] if count > 1 else [float(np.pi / 2)]


def sample_representations(p, meridian, thetas, seed=0, accept=None, num_starts=20):
    """One accepted representation per angle, continued from the previous one when possible."""
    out = []
    prev = None
    for theta in thetas:
        rep = None
        if prev is not None:
            try:
                cand = continue_solution(prev, meridian, theta)
                if is_irreducible(cand) and (accept is None or accept(cand)):
                    rep = cand
            except (NotAPath, ValueError, np.linalg.LinAlgError):
                rep = None
        if rep is None:
            try:
                cands = solve_representations(p, meridian, theta, num_starts, seed)
            except (NoSolution, ReducibleOnly):
                cands = []
            rep = next((c for c in cands if accept is None or accept(c)), None)
        if rep is not None:
            out.append(rep)
            prev = rep
    return out


def _lift_tangent(v: TangentVector, d: TangleDecomposition, rep_amalgam):
    words = list(d.inclusions["piece1"]) + list(d.inclusions["piece2"])
    return TangentVector(Derivation([v.derivation(w) for w in words], rep_amalgam.images),
                         rep_amalgam.presentation)


def verify_sample(pair: MutationPair, rep: Representation, sign: SignPart, tol=None) -> Sample:
    """Twisted ratio and end-to-end torsion-form comparison at one representation."""
    src, tgt, d, m = pair.source, pair.target, pair.source.decomposition, pair.move
    A = amalgam_representation(rep, d)
    if not is_F_irreducible(A, d):
        raise DimensionMismatch("representation is not F-irreducible")
    v = tangent_to_cocycle(rep, src.meridian)
    va = _lift_tangent(v, d, A)
    cmp = twisted_ratio(d, m, A, va, d.certificate, d.longitude, pair.mutant_certificate,
                        pair.mutant_longitude, tol=tol)
    At, x = mutant_rep(A, d, m)
    vt = tau_sharp(va, At, x, d, m)
    C = Representation([At.images[j] for j in pair.target_map], tgt.presentation,
                       theta=rep.theta)
    vc = np.concatenate([vt.derivation.values[j] for j in pair.target_map])
    cs = PeripheralCertificate.from_json(src.certificate)
    ct = PeripheralCertificate.from_json(tgt.certificate)
    a = torsion_form(rep, v, src.presentation, src.meridian, src.longitude, cs, tol)
    b = torsion_form(C, vc, tgt.presentation, tgt.meridian, tgt.longitude, ct, tol)
    return Sample(float(rep.theta), cmp.ratio, cmp.direct_ratio, cmp.residual,
                  sign.tau0, sign.mu, sign.tau1, a, b, b / a, abs(b - a) / abs(a),
                  [float(c) + 0.0 for c in x.x.q], list(cmp.original.dims))


def verify_main_theorem(pair, samples=5, seed=0, thetas=None, tol=None) -> MutationReport:
    """Compare the torsion forms of a mutant pair at ``samples`` representations.

    ``pair`` is a :class:`MutationPair` or a bundled pair name.  Raises
    :class:`InsufficientSamples` when too few regular F-irreducible
    representations turn up.
    """
    if not isinstance(pair, MutationPair):
        pair = MutationPair.load(pair)
    d, m = pair.source.decomposition, pair.move
    kind = classify_mutation(d, m)
    sign = sign_part(d, m)
    report = MutationReport(pair.name, pair.source.name, pair.target.name, m.name, kind, seed,
                            {"pass": PASS_TOL, "mv": MV_TOL})
    thetas = default_thetas(samples) if thetas is None else list(thetas)

    def accept(r):
        try:
            return is_regular(r)[0] and is_F_irreducible(amalgam_representation(r, d), d)
        except (ValueError, ArithmeticError):
            return False

    reps = sample_representations(pair.source.presentation, pair.source.meridian, thetas,
                                  seed, accept)
    if len(reps) < samples:
        raise InsufficientSamples(f"found {len(reps)} usable representations, wanted {samples}")
    for rep in reps[:samples]:
        report.samples.append(verify_sample(pair, rep, sign, tol))
    return report

"""Acceptance criteria 1-10, each timed against its runtime budget.

Every criterion prints one line ``criterion k: PASS|FAIL|WARN (seconds) detail``;
the lines are collected again in the terminal summary.  Criterion 10 is an
observation: when it does not hold it is reported as WARN and does not fail.
"""

import time
from fractions import Fraction

import numpy as np

from tests.conftest import knot
from torsio.alexander import abelian_torsion, seifert_alexander, twisted_alexander
from torsio.chainlib import (BasedComplex, HomologyBasisSet, betti_numbers, homology_basis,
                             mv_multiplicativity, torsion)
from torsio.exact import QQ
from torsio.fgroup import (GroupPresentation, MutationMove, Word, mutant_presentation,
                           mutate_decomposition, sphere_group)
from torsio.mutlab import (MutationPair, default_thetas, mv_sequence, piece_cohomology,
                           rotation_det_h1, rotation_det_quotient, sample_representations,
                           sign_part, twisted_ratio, verify_main_theorem)
from torsio.randomcx import random_complex, random_sequence
from torsio.repspace import (Representation, TangentVector, amalgam_representation,
                             intertwiner, is_F_irreducible, is_irreducible, is_regular,
                             mutant_rep, sphere_images, tangent_to_cocycle, probe_words)
from torsio.su2 import Su2Element, adjoint
from torsio.torsionform import PeripheralCertificate, torsion_form
from torsio.twisted import CoefficientSystem, Derivation, twisted_complex, untwisted_real_complex

RESULTS = {}
SEED = 20240611


def record(k, budget, warn_only=False):
    """Run a criterion body returning ``(ok, detail)``; time it and report."""

    def wrap(body):
        def test(*args, **kwargs):
            t0 = time.perf_counter()
            ok, detail = body(*args, **kwargs)
            dt = time.perf_counter() - t0
            in_time = budget is None or dt < budget
            if ok and in_time:
                verdict = "PASS"
            elif warn_only:
                verdict = "WARN"
            else:
                verdict = "FAIL"
            if not in_time:
                detail += f"; over the {budget} s budget"
            line = f"criterion {k}: {verdict} ({dt:.2f} s) {detail}"
            RESULTS[k] = line
            print(line)
            assert verdict != "FAIL", line

        test.__name__ = body.__name__
        return test

    return wrap


def kt_samples(pair, count, seed=0):
    d = pair.source.decomposition

    def accept(r):
        try:
            return is_regular(r)[0] and is_F_irreducible(amalgam_representation(r, d), d)
        except (ValueError, ArithmeticError):
            return False

    return sample_representations(pair.source.presentation, pair.source.meridian,
                                  default_thetas(count), seed, accept)


def lift(v, d, A):
    words = list(d.inclusions["piece1"]) + list(d.inclusions["piece2"])
    return TangentVector(Derivation([v.derivation(w) for w in words], A.images), A.presentation)


def on_target(pair, B):
    return Representation([B.images[j] for j in pair.target_map], pair.target.presentation)


# ---------------------------------------------------------------------------


@record(1, 5.0)
def test_criterion_01_torsion_engine():
    rng = np.random.default_rng(SEED)
    mismatches = 0
    for k in range(100):
        C = random_complex(rng)
        H, _ = homology_basis(C)
        a = torsion(C, H, strategy="pivot").value
        b = torsion(C, H, strategy="random", rng=np.random.default_rng(k)).value
        mismatches += a != b
    one = torsion(BasedComplex([1, 1], [[[Fraction(1)]]], field=QQ)).value
    half = torsion(BasedComplex([1, 1], [[[Fraction(2)]]], field=QQ)).value
    minus = torsion(BasedComplex([1], [], field=QQ),
                    HomologyBasisSet({0: [[Fraction(1)]]})).value
    fixtures = (one, half, minus) == (1, Fraction(1, 2), -1)
    return mismatches == 0 and fixtures, \
        f"100 complexes, {mismatches} strategy mismatches; fixtures {one}, {half}, {minus}"


@record(2, 1.0)
def test_criterion_02_milnor_formula():
    seifert = {"trefoil": [[-1, 1], [0, -1]], "figure_eight": [[-1, 1], [0, 1]]}
    ok, parts = True, []
    for name, V in seifert.items():
        k = knot(name)
        r = abelian_torsion(k.presentation, k.meridian)
        delta = seifert_alexander(V)
        ok &= r.numerator == delta and r.denominator == [-1, 1]
        parts.append(f"{name} {[str(c) for c in r.numerator]}/(t-1)")
    return ok, "; ".join(parts)


@record(3, 30.0)
def test_criterion_03_dimensions():
    rng = np.random.default_rng(SEED)
    F = sphere_group()
    fdims = set()
    count = 0
    while count < 20:
        ims = [Su2Element.random(rng) for _ in range(3)]
        if not is_irreducible(ims):
            continue
        fdims.add(tuple(betti_numbers(twisted_complex(F, CoefficientSystem.adjoint(ims)))))
        count += 1
    ok = fdims == {(0, 6)}
    pair = MutationPair.load("kt_conway")
    d = pair.source.decomposition
    reps = kt_samples(pair, 5)
    piece = set()
    for r in reps:
        A = amalgam_representation(r, d)
        n1 = d.offset
        for part, ims in ((d.piece1, A.images[:n1]), (d.piece2, A.images[n1:])):
            _, dims = piece_cohomology(ims, part)
            piece.add(tuple((dims + [0, 0])[1:3]))
    ok &= len(reps) >= 5 and piece == {(3, 0)}
    untw = (betti_numbers(untwisted_real_complex(F)),
            betti_numbers(untwisted_real_complex(d.piece1))[:2],
            betti_numbers(untwisted_real_complex(d.piece2))[:2])
    ok &= untw == ([1, 3], [1, 2], [1, 2])
    return ok, (f"H^1(F) dims {sorted(fdims)} at 20 reps; (H^1, H^2) of pieces {sorted(piece)} "
                f"at {len(reps)} KT reps; untwisted {untw}")


@record(4, 60.0)
def test_criterion_04_multiplicativity():
    rng = np.random.default_rng(SEED)
    worst = max(mv_multiplicativity(*random_sequence(rng)).residual for _ in range(100))
    pair = MutationPair.load("kt_conway")
    d = pair.source.decomposition
    r = kt_samples(pair, 1)[0]
    A = amalgam_representation(r, d)
    va = lift(tangent_to_cocycle(r, pair.source.meridian), d, A)
    mv = mv_sequence(d, MutationMove("identity"), A, va, d.certificate, d.longitude)
    return worst == 0 and mv.residual < 1e-8, \
        f"exact residual {worst} on 100 splittings; KT residual {mv.residual:.2e}"


@record(5, 60.0)
def test_criterion_05_mutation_algebra():
    pair = MutationPair.load("kt_conway")
    d, m = pair.source.decomposition, pair.move
    reps = kt_samples(pair, 5)
    twice = mutate_decomposition(mutate_decomposition(d, m), m)
    once = mutate_decomposition(d, m)
    x_res = rel_res = trace_dev = 0.0
    regular_agree = same_group = True
    for r in reps:
        A = amalgam_representation(r, d)
        x = intertwiner(sphere_images(A, d), m)
        B, _ = mutant_rep(A, d, m, x)
        C = on_target(pair, B)
        x_res = max(x_res, x.residual)
        rel_res = max(rel_res, B.residual, C.residual)
        regular_agree &= is_regular(r)[0] == is_regular(C)[0]
        B2, _ = mutant_rep(B, once, m)
        same_group &= B2.presentation.relators == \
            mutant_presentation(twice, MutationMove("identity")).relators
        w = probe_words(len(A.images))
        trace_dev = max(trace_dev, float(np.abs(A.character(w) - B2.character(w)).max()))
    ok = len(reps) >= 5 and x_res < 1e-8 and rel_res < 1e-8 and regular_agree \
        and trace_dev < 1e-6 and same_group
    return ok, (f"{len(reps)} reps; intertwiner {x_res:.1e}, relators {rel_res:.1e}, "
                f"regularity agrees {regular_agree}, double mutation trace {trace_dev:.1e}")


@record(6, None)
def test_criterion_06_sign_part():
    dets = {m.name: (rotation_det_h1(m), rotation_det_quotient(m))
            for m in MutationMove.rotations()}
    d = MutationPair.load("kt_conway").source.decomposition
    tau0 = {m.name: sign_part(d, m).tau0 for m in MutationMove.rotations()}
    ok = all(v == (1, 1) for v in dets.values()) and set(tau0.values()) == {1}
    return ok, f"det tau_1 (H_1, quotient) {dets}; det tau_0 {tau0}"


@record(7, None)
def test_criterion_07_twisted_ratio():
    pair = MutationPair.load("kt_conway")
    d = pair.source.decomposition
    reps = kt_samples(pair, 5)
    ratios = []
    for r in reps:
        A = amalgam_representation(r, d)
        va = lift(tangent_to_cocycle(r, pair.source.meridian), d, A)
        cmp = twisted_ratio(d, pair.move, A, va, d.certificate, d.longitude,
                            pair.mutant_certificate, pair.mutant_longitude)
        ratios.append(cmp.ratio)
    dev = max(abs(x - 1) for x in ratios) if ratios else float("inf")
    return len(ratios) >= 5 and dev < 1e-6, \
        f"{len(ratios)} KT reps, max |ratio - 1| = {dev:.2e}"


@record(8, 600.0)
def test_criterion_08_torsion_forms_agree():
    kt = verify_main_theorem("kt_conway", samples=3, seed=0)
    pz = verify_main_theorem("pretzel_self", samples=3, seed=0)
    dev = max(s.deviation for s in kt.samples)
    ok = kt.passed is True and pz.passed is True and len(kt.samples) >= 3 and dev < 1e-6
    return ok, (f"KT/Conway {len(kt.samples)} samples, max deviation {dev:.2e}; "
                f"pretzel self-mutation {'PASS' if pz.passed else 'FAIL'}")


def _relabel(w, perm):
    return Word([(perm[g], e) for g, e in w.letters])


@record(9, None)
def test_criterion_09_invariance():
    pair = MutationPair.load("kt_conway")
    k = pair.source
    p, mu, lam = k.presentation, k.meridian, k.longitude
    cert = PeripheralCertificate.from_json(k.certificate)
    r = kt_samples(pair, 1)[0]
    v = tangent_to_cocycle(r, mu)
    base = torsion_form(r, v, p, mu, lam, cert)
    rng = np.random.default_rng(SEED)
    n, m = p.num_generators, len(p.relators)
    # reorder generators and relators
    gp = rng.permutation(n)          # old generator g becomes gp[g]
    rp = rng.permutation(m)          # old relator j becomes rp[j]
    rels = [None] * m
    for j, rel in enumerate(p.relators):
        rels[rp[j]] = _relabel(rel, gp)
    q = GroupPresentation(n, rels)
    c2 = PeripheralCertificate([(int(rp[j]), _relabel(u, gp), s) for j, u, s in cert.factors])
    inv = np.argsort(gp)
    r2 = Representation([r.images[inv[i]] for i in range(n)], q, theta=r.theta)
    v2 = np.concatenate([v.derivation.values[inv[i]] for i in range(n)])
    reordered = torsion_form(r2, v2, q, _relabel(mu, gp), _relabel(lam, gp), c2)
    # conjugate the representation
    g = Su2Element.random(rng)
    Ad = adjoint(g)
    v3 = np.concatenate([Ad @ x for x in v.derivation.values])
    conjugated = torsion_form(r.conjugate(g), v3, p, mu, lam, cert)
    e1 = abs(reordered - base) / abs(base)
    e2 = abs(conjugated - base) / abs(base)
    return e1 < 1e-8 and e2 < 1e-8, \
        f"KT torsion form {base:.6g}; reordering {e1:.1e}, conjugation {e2:.1e}"


@record(10, None, warn_only=True)
def test_criterion_10_twisted_alexander_probe():
    pair = MutationPair.load("kt_conway")
    d = pair.source.decomposition
    reps = kt_samples(pair, 2)
    diffs = []
    for r in reps:
        A = amalgam_representation(r, d)
        B, _ = mutant_rep(A, d, pair.move)
        C = on_target(pair, B)
        a = twisted_alexander(pair.source.presentation, r, pair.source.meridian)
        b = twisted_alexander(pair.target.presentation, C, pair.target.meridian)
        diffs.append(a.max_difference(b))
    best = max(diffs) if diffs else 0.0
    return best > 1e-3, f"largest coefficient difference {best:.3g} over {len(diffs)} reps"

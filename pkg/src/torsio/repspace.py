"""SU(2) representations of finitely presented groups.

Representations are lists of unit quaternions, one per generator.  The
solver runs Levenberg-Marquardt on the relator equations with the meridian
pinned to ``cos(theta) + sin(theta) i``, then fixes the remaining gauge by
rotating about the i-axis until the first generator that does not commute
with the meridian has its axis in the i-j plane.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import least_squares

from . import chainlib
from .fgroup import (GroupPresentation, MutationMove, TangleDecomposition, Word,
                     mutant_presentation, SPHERE_LABELS)
from .su2 import CentralElement, Su2Element, adjoint, axis_angle, qconj, qmul
from .twisted import (CoefficientSystem, Derivation, evaluate_word, relator_residual,
                      twisted_complex)

SOLVE_TOL = 1e-10
AXIS_TOL = 1e-8


class NoSolution(RuntimeError):
    pass


class ReducibleOnly(RuntimeError):
    pass


class NotIrreducible(ValueError):
    pass


class NoIntertwiner(ValueError):
    pass


class Reducible(ValueError):
    pass


class GluingMismatch(ValueError):
    pass


class NotAPath(ValueError):
    pass


class NotRegular(ValueError):
    pass


# ---------------------------------------------------------------------------
# representations


@dataclass
class Representation:
    """Generator images of a representation of ``presentation``."""

    images: list
    presentation: GroupPresentation
    residual: float = float("nan")
    gauge_fixed: bool = False
    theta: float | None = None
    extras: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.images = [g if isinstance(g, Su2Element) else Su2Element(g) for g in self.images]
        if np.isnan(self.residual):
            self.residual = relator_residual(self.presentation, self.images)

    def __call__(self, w: Word) -> Su2Element:
        return evaluate_word(w, self.images)

    def conjugate(self, g: Su2Element) -> "Representation":
        """``h -> g rho(h) g^-1``."""
        ginv = g.inverse()
        return Representation([g * x * ginv for x in self.images], self.presentation,
                              theta=self.theta)

    def pull_back(self, words, presentation) -> "Representation":
        """Representation of ``presentation`` whose generator ``i`` maps to ``rho(words[i])``."""
        return Representation([self(w) for w in words], presentation, theta=self.theta)

    def character(self, words=None):
        return np.array([self(w).trace() for w in (words or probe_words(len(self.images)))])

    def to_json(self):
        return {"presentation": self.presentation.name,
                "images": [g.to_list() for g in self.images],
                "residual": float(self.residual),
                "theta": self.theta,
                "gauge": {"meridian_axis": "i", "second_axis_plane": "ij",
                          "fixed": bool(self.gauge_fixed)}}

    @classmethod
    def from_json(cls, data, presentation: GroupPresentation):
        ims = data["images"] if isinstance(data, dict) else data
        if len(ims) != presentation.num_generators:
            raise ValueError("representation has the wrong number of images")
        for q in ims:
            if len(q) != 4:
                raise ValueError("images must be [w, x, y, z] quadruples")
        theta = data.get("theta") if isinstance(data, dict) else None
        gauge = data.get("gauge", {}).get("fixed", False) if isinstance(data, dict) else False
        return cls([Su2Element(q) for q in ims], presentation, theta=theta, gauge_fixed=gauge)


def dump_representations(reps):
    return json.dumps([r.to_json() for r in reps], indent=2)


def probe_words(n, count=20, seed=12345):
    """Fixed words used to compare characters."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        length = 1 + k % 5
        letters = [(int(rng.integers(n)), int(rng.choice([-1, 1]))) for _ in range(length)]
        out.append(Word(letters))
    return out


# ---------------------------------------------------------------------------
# solving


def _qm(p, q):
    """Hamilton product on plain tuples (much faster than numpy for single quaternions)."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


def _lmat(p):
    a, b, c, d = p
    return np.array([[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]])


def _rmat(q):
    a, b, c, d = q
    return np.array([[a, -b, -c, -d], [b, a, d, -c], [c, -d, a, b], [d, c, -b, a]])


_CONJ = np.diag([1.0, -1.0, -1.0, -1.0])
_ONE = (1.0, 0.0, 0.0, 0.0)


def _relator_system(p: GroupPresentation, meridian: Word, theta: float):
    n = p.num_generators
    target = np.array([np.cos(theta), np.sin(theta), 0.0, 0.0])
    words = [list(w.letters) for w in p.relators] + [list(meridian.letters)]

    def letters(Q, w):
        return [Q[g] if e > 0 else (Q[g][0], -Q[g][1], -Q[g][2], -Q[g][3]) for g, e in w]

    def value(Q, w):
        out = _ONE
        for q in letters(Q, w):
            out = _qm(out, q)
        return np.array(out)

    def jacobian(Q, w):
        mats = letters(Q, w)
        m = len(mats)
        suffix = [_ONE] * (m + 1)
        for k in range(m - 1, -1, -1):
            suffix[k] = _qm(mats[k], suffix[k + 1])
        J = np.zeros((4, 4 * n))
        pre = _ONE
        for k, (g, e) in enumerate(w):
            block = _lmat(pre) @ _rmat(suffix[k + 1])
            J[:, 4 * g:4 * g + 4] += block if e > 0 else block @ _CONJ
            pre = _qm(pre, mats[k])
        return J

    def unpack(x):
        return [tuple(x[4 * g:4 * g + 4]) for g in range(n)]

    def fun(x):
        Q = unpack(x)
        res = [value(Q, w) - np.array(_ONE) for w in words[:-1]]
        res.append(value(Q, words[-1]) - target)
        X = x.reshape(n, 4)
        res.append(np.sum(X * X, axis=1) - 1.0)
        return np.concatenate(res)

    def jac(x):
        Q = unpack(x)
        rows = [jacobian(Q, w) for w in words]
        N = np.zeros((n, 4 * n))
        for g in range(n):
            N[g, 4 * g:4 * g + 4] = 2 * x[4 * g:4 * g + 4]
        rows.append(N)
        return np.vstack(rows)

    return fun, jac


def refine(p: GroupPresentation, meridian: Word, theta: float, images, tol=SOLVE_TOL):
    """Newton-type refinement of a nearby solution; returns (images, residual)."""
    fun, jac = _relator_system(p, meridian, theta)
    x0 = np.concatenate([g.q for g in images])
    sol = least_squares(fun, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=2000)
    x = sol.x.reshape(-1, 4)
    ims = [Su2Element(q) for q in x]
    return ims, relator_residual(p, ims)


def gauge_fix(images, meridian: Word):
    """Conjugate so the meridian axis is +i and the next non-commuting axis lies in the i-j plane."""
    m = evaluate_word(meridian, images)
    try:
        _, P = axis_angle(m)
    except CentralElement:
        return list(images), False
    # rotate P onto i
    i = np.array([1.0, 0, 0])
    g = _rotation_taking(P, i)
    ims = [g * x * g.inverse() for x in images]
    for x in ims:
        try:
            _, A = axis_angle(x)
        except CentralElement:
            continue
        perp = A - A[0] * i
        r = np.linalg.norm(perp)
        if r > AXIS_TOL:
            phi = np.arctan2(perp[2], perp[1])
            h = Su2Element.from_axis_angle(-phi / 2, i)
            ims = [h * y * h.inverse() for y in ims]
            return ims, True
    return ims, True


def _rotation_taking(u, v):
    """Unit quaternion whose adjoint action sends unit vector ``u`` to ``v``."""
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    c = float(np.dot(u, v))
    if c < -1 + 1e-12:
        ax = np.cross(u, [0.0, 1.0, 0.0])
        if np.linalg.norm(ax) < 1e-6:
            ax = np.cross(u, [0.0, 0.0, 1.0])
        return Su2Element.from_axis_angle(np.pi / 2, ax)
    q = np.concatenate([[1.0 + c], np.cross(u, v)])
    return Su2Element(q)


def abelian_representation(p: GroupPresentation, theta: float, alpha=None):
    """Every generator to ``cos(theta alpha_g) + sin(theta alpha_g) i``."""
    alpha = alpha or [1] * p.num_generators
    i = np.array([1.0, 0.0, 0.0])
    return Representation([Su2Element.from_axis_angle(theta * a, i) for a in alpha], p,
                           theta=theta)


def solve_representations(p: GroupPresentation, meridian: Word, theta: float,
                          num_starts: int = 20, seed: int = 0, irreducible_only=True):
    """Gauge-fixed solutions with ``rho(meridian) = cos(theta) + sin(theta) i``.

    Starts place every generator at angle ``theta`` about a random axis, which
    is where the solutions of a Wirtinger presentation live.  Duplicates (equal
    characters on the test words within 1e-6) are merged.
    """
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi)")
    rng = np.random.default_rng(seed)
    n = p.num_generators
    words = probe_words(n)
    found = []
    any_solution = False
    for _ in range(num_starts):
        axes = rng.normal(size=(n, 3))
        ims = [Su2Element.from_axis_angle(theta, a) for a in axes]
        try:
            ims, res = refine(p, meridian, theta, ims)
        except (ValueError, np.linalg.LinAlgError):
            continue
        m = evaluate_word(meridian, ims)
        if res > SOLVE_TOL or abs(m.q[0] - np.cos(theta)) > 1e-9:
            continue
        any_solution = True
        ims, _ = gauge_fix(ims, meridian)
        rep = Representation(ims, p, theta=theta, gauge_fixed=True)
        if irreducible_only and not is_irreducible(rep):
            continue
        ch = rep.character(words)
        if any(np.max(np.abs(ch - other.character(words))) < 1e-6 for other in found):
            continue
        found.append(rep)
    if not found:
        if any_solution:
            raise ReducibleOnly(f"only abelian solutions at theta = {theta}")
        raise NoSolution(f"no start converged at theta = {theta}")
    found.sort(key=lambda r: tuple(np.round(r.character(words), 6)))
    return found


def continue_solution(rep: Representation, meridian: Word, theta: float):
    """Re-solve at a nearby angle warm-started from ``rep``, then gauge fix."""
    ims, res = refine(rep.presentation, meridian, theta, rep.images)
    if res > SOLVE_TOL:
        raise NotAPath(f"continuation to theta = {theta} failed (residual {res:.2g})")
    ims, _ = gauge_fix(ims, meridian)
    return Representation(ims, rep.presentation, theta=theta, gauge_fixed=True)


# ---------------------------------------------------------------------------
# irreducibility and regularity


def _common_axis(images, tol=AXIS_TOL):
    axes = []
    for g in images:
        try:
            axes.append(axis_angle(g, tol)[1])
        except CentralElement:
            continue
    if len(axes) < 2:
        return True
    a0 = axes[0]
    return all(np.linalg.norm(np.cross(a0, a)) < tol for a in axes[1:])


def is_irreducible(rep) -> bool:
    """No common axis among the non-central images."""
    return not _common_axis(getattr(rep, "images", rep))


def sphere_images(rep: Representation, d: TangleDecomposition, piece=2):
    """Images of ``a, b, c, d`` from one side of the sphere."""
    words = d.sphere_words[f"piece{piece}"]
    if piece == 2:
        words = [w.shift(d.offset) for w in words]
    return [rep(w) for w in words]


def is_F_irreducible(rep: Representation, d: TangleDecomposition) -> bool:
    """Irreducibility of the restriction to the sphere group, for a rep of the amalgam."""
    return is_irreducible(sphere_images(rep, d))


def h1_dimension(rep, p: GroupPresentation = None, tol=None):
    p = p or rep.presentation
    C = twisted_complex(p, CoefficientSystem.adjoint(rep))
    return chainlib.betti_numbers(C, tol)


def is_regular(rep: Representation, tol=None):
    """``(regular, dims)`` with ``dims`` the twisted Betti numbers; regular means H^1 has dimension 1."""
    if not is_irreducible(rep):
        raise NotIrreducible("regularity is only defined for irreducible representations")
    dims = h1_dimension(rep, tol=tol)
    regular = dims[1] == 1
    if regular and len(dims) > 2 and dims[2] != 1:
        raise ArithmeticError(f"H^1 has dimension 1 but H^2 has dimension {dims[2]}")
    return regular, dims


# ---------------------------------------------------------------------------
# tangent vectors


@dataclass
class TangentVector:
    """A cocycle representing a class in ``H^1``."""

    derivation: Derivation
    presentation: GroupPresentation

    @property
    def cochain(self):
        return self.derivation.cochain()

    def scale(self, lam):
        return TangentVector(self.derivation.scale(lam), self.presentation)


def cocycle_from_path(images_of_t, h):
    """Richardson-extrapolated ``d/dt rho_t(g) rho(g)^-1`` from samples at ``-2h, -h, 0, h, 2h``.

    ``images_of_t`` maps an offset to a list of unit quaternions.
    """
    P = {s: np.array([g.q for g in images_of_t(s)]) for s in (-2, -1, 0, 1, 2)}
    D1 = (P[1] - P[-1]) / (2 * h)
    D2 = (P[2] - P[-2]) / (4 * h)
    D = (4 * D1 - D2) / 3
    vals = []
    for k in range(len(P[0])):
        z = qmul(D[k], qconj(P[0][k]))
        vals.append(z[1:])
    return vals


def tangent_to_cocycle(rep: Representation, meridian: Word, path=None, h=1e-4,
                       tol=1e-6) -> TangentVector:
    """Tangent vector of a one-parameter family through ``rep``.

    ``path(s)`` returns images at parameter offset ``s``; by default the family
    varies the meridian angle and re-solves with a warm start.
    """
    p = rep.presentation
    if path is None:
        theta = rep.theta
        if theta is None:
            raise NotAPath("representation has no meridian angle")

        def path(s):
            return continue_solution(rep, meridian, theta + s).images

    cache = {0: rep.images}

    def sample(k):
        if k not in cache:
            cache[k] = path(k * h)
            res = relator_residual(p, cache[k])
            if res > max(1e-8, 100 * h * h):
                raise NotAPath(f"path leaves the representation variety (residual {res:.2g})")
        return cache[k]

    vals = cocycle_from_path(sample, h)
    d = Derivation(vals, rep.images)
    scale = max(1.0, max(np.linalg.norm(v) for v in vals))
    res = max(d.relator_residuals(p), default=0.0)
    if res > tol * scale:
        raise NotAPath(f"tangent is not a cocycle (residual {res:.2g})")
    return TangentVector(d, p)


# ---------------------------------------------------------------------------
# mutation


@dataclass
class Intertwiner:
    """``x`` with ``psi(tau(g)) = x psi(g) x^-1``; the other solution is ``-x``."""

    x: Su2Element
    residual: float
    sign_ambiguous: bool = True


def intertwiner(psi_images, m: MutationMove, tol=1e-8) -> Intertwiner:
    """Solve ``psi(m(gamma)) x = x psi(gamma)`` for ``gamma`` in a, b, c, d.

    ``psi_images`` are the images of ``a, b, c, d``.  The sign is fixed by
    making the first nonzero component of ``x`` nonnegative.
    """
    psi = dict(zip(SPHERE_LABELS, psi_images))
    if not is_irreducible(psi_images):
        raise Reducible("restriction to the sphere is reducible")
    traces = [g.trace() for g in psi_images]
    if max(traces) - min(traces) > 1e-6:
        raise NoIntertwiner("sphere generators have different traces")
    rows = []
    for g in SPHERE_LABELS:
        A = _left_matrix(psi[m(g)].q)
        B = _right_matrix(psi[g].q)
        rows.append(A - B)
    M = np.vstack(rows)
    _, s, Vt = np.linalg.svd(M)
    x = Vt[-1]
    x = x / np.linalg.norm(x)
    nz = np.nonzero(np.abs(x) > 1e-12)[0]
    if x[nz[0]] < 0:
        x = -x
    X = Su2Element(x)
    res = 0.0
    for g in SPHERE_LABELS:
        lhs = psi[m(g)]
        rhs = X * psi[g] * X.inverse()
        res = max(res, lhs.distance(rhs))
    if res > tol or (len(s) > 1 and s[-2] < 1e-6):
        raise NoIntertwiner(f"no unit solution (residual {res:.2g})")
    return Intertwiner(X, res)


def _left_matrix(p):
    """Matrix of ``x -> p x``."""
    return np.array([qmul(p, e) for e in np.eye(4)]).T


def _right_matrix(q):
    """Matrix of ``x -> x q``."""
    return np.array([qmul(e, q) for e in np.eye(4)]).T


def amalgam_representation(rep: Representation, d: TangleDecomposition, presentation=None):
    """Pull a representation of the knot table back to the amalgam through the inclusions."""
    if d.inclusions is None:
        raise ValueError("decomposition carries no inclusion words")
    pres = presentation or mutant_presentation(d, MutationMove("identity"))
    words = list(d.inclusions["piece1"]) + list(d.inclusions["piece2"])
    return rep.pull_back(words, pres)


def mutant_rep(rep: Representation, d: TangleDecomposition, m: MutationMove,
               x: Intertwiner = None, tol=1e-8):
    """``Ad_{x^-1}`` on piece1 and identity on piece2, as a representation of the mutant amalgam.

    ``rep`` is a representation of the identity amalgam.  Returns ``(rep_tau, x)``.
    """
    pres = mutant_presentation(d, m)
    if x is None:
        x = intertwiner(sphere_images(rep, d), m) if not m.is_identity else \
            Intertwiner(Su2Element.identity(), 0.0)
    n1 = d.offset
    xi = x.x.inverse()
    ims = [xi * g * x.x for g in rep.images[:n1]] + list(rep.images[n1:])
    out = Representation(ims, pres, theta=rep.theta)
    if out.residual > tol:
        raise GluingMismatch(f"mutant relator residual {out.residual:.2g}")
    return out, x


def tau_sharp(v: TangentVector, rep_tau: Representation, x: Intertwiner,
              d: TangleDecomposition, m: MutationMove, tol=1e-8) -> TangentVector:
    """Transport a cocycle of the amalgam to the mutant amalgam.

    On piece1 the cocycle becomes ``Ad_{x^-1} z + delta(a)``, with ``a`` solved so
    that the gluing relators hold; piece2 is unchanged.
    """
    z = v.derivation
    n1 = d.offset
    Xi = adjoint(x.x.inverse())
    vals1 = [Xi @ val for val in z.values[:n1]]
    vals2 = [val.copy() for val in z.values[n1:]]
    ims = rep_tau.images
    trial = Derivation(vals1 + vals2, ims)
    # mismatch on the gluing relators: w1(m gamma) w2(gamma)^-1
    pres = rep_tau.presentation
    glue = pres.relators[-3:]
    A = []
    b = []
    for r in glue:
        # relator value is linear in a: the inner part only touches piece1 letters
        base = trial(r)
        cols = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1.0
            inner = Derivation([e - adjoint(g) @ e for g in ims[:n1]] + [np.zeros(3)] * (len(ims) - n1), ims)
            cols.append(inner(r))
        A.append(np.array(cols).T)
        b.append(-base)
    A = np.vstack(A)
    b = np.concatenate(b)
    a, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = np.linalg.norm(A @ a - b)
    scale = max(1.0, np.linalg.norm(b))
    if res > tol * scale * 1e2:
        raise GluingMismatch(f"transported cocycle does not glue (residual {res:.2g})")
    vals1 = [val + (a - adjoint(g) @ a) for val, g in zip(vals1, ims[:n1])]
    out = Derivation(vals1 + vals2, ims)
    rres = max(out.relator_residuals(pres))
    if rres > 1e-6 * max(1.0, max(np.linalg.norm(u) for u in out.values)):
        raise GluingMismatch(f"transported cocycle fails relators ({rres:.2g})")
    return TangentVector(out, pres)

"""Twisted (co)chain complexes of presentation 2-complexes.

The presentation complex of ``<x_1..x_n | r_1..r_m>`` has one 0-cell, one
1-cell per generator and one 2-cell per relator.  With coefficients in a
representation ``Phi`` of the group, cochains are tuples of vectors indexed
by cells, and the differentials are

    delta^0(a)(x_g)   = a - Phi(x_g) a
    delta^1(z)(r)     = sum_g Phi(dr/dx_g) z(x_g)

where ``dr/dx_g`` is the left Fox derivative.  Bases are ordered cell by
cell, and within a cell by the basis of the coefficient space (i, j, k for
su(2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import exact
from .chainlib import BasedComplex
from .fgroup import GroupPresentation, Word, fox_jacobian_blocks
from .su2 import Su2Element, adjoint

RELATOR_TOL = 1e-6


class RelatorViolation(ValueError):
    """The representation does not satisfy a relator."""


class NotACocycle(ValueError):
    def __init__(self, index, residual):
        super().__init__(f"derivation does not vanish on relator {index} (residual {residual:.3g})")
        self.index = index
        self.residual = residual


class NotAKnotGroup(ValueError):
    """Abelianization is not infinite cyclic with the given meridian as generator."""


# ---------------------------------------------------------------------------
# coefficient systems


def images_of(rep):
    """Generator images of a representation object or a plain sequence."""
    return list(getattr(rep, "images", rep))


def relator_residual(p: GroupPresentation, images) -> float:
    """Largest distance of a relator image from 1."""
    worst = 0.0
    one = np.array([1.0, 0.0, 0.0, 0.0])
    for r in p.relators:
        q = evaluate_word(r, images).q
        worst = max(worst, float(np.linalg.norm(q - one)))
    return worst


def evaluate_word(w: Word, images) -> Su2Element:
    out = Su2Element.identity()
    for g, e in w.letters:
        out = out * (images[g] if e > 0 else images[g].inverse())
    return out


def abelianization(p: GroupPresentation, meridian: Word):
    """Integer exponents ``alpha(x_g)`` of the map onto Z sending ``meridian`` to 1."""
    n = p.num_generators
    rows = [p.abelianization_exponents(r) for r in p.relators]
    null = exact.nullspace(rows, exact.QQ, n) if rows else [
        [Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    if len(null) != 1:
        raise NotAKnotGroup(f"first Betti number is {len(null)}, expected 1")
    v = [Fraction(x) for x in null[0]]
    m = sum(v[g] * e for g, e in meridian.letters)
    if m == 0:
        raise NotAKnotGroup("meridian is trivial in homology")
    v = [x / m for x in v]
    if any(x.denominator != 1 for x in v):
        raise NotAKnotGroup("meridian does not generate H_1")
    return [int(x) for x in v]


@dataclass
class CoefficientSystem:
    """``AdjointReal`` (Ad rho), ``AdjointAlexander`` (Ad rho tensor alpha) or ``Abelian`` (alpha)."""

    kind: str
    images: list = dc_field(default_factory=list)
    alpha: list | None = None

    KINDS = ("AdjointReal", "AdjointAlexander", "Abelian")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind != "AdjointReal" and self.alpha is None:
            raise ValueError("Alexander coefficients need the abelianization alpha")
        self.images = images_of(self.images)

    @classmethod
    def adjoint(cls, rep):
        return cls("AdjointReal", images_of(rep))

    @classmethod
    def abelian(cls, p: GroupPresentation, meridian: Word):
        return cls("Abelian", [], abelianization(p, meridian))

    @classmethod
    def adjoint_alexander(cls, rep, p: GroupPresentation, meridian: Word):
        return cls("AdjointAlexander", images_of(rep), abelianization(p, meridian))

    @property
    def rank(self):
        return 1 if self.kind == "Abelian" else 3

    def check(self, p: GroupPresentation):
        if self.kind == "Abelian":
            return
        if len(self.images) != p.num_generators:
            raise ValueError("representation and presentation disagree on the generator count")
        res = relator_residual(p, self.images)
        if res > RELATOR_TOL:
            raise RelatorViolation(f"relator residual {res:.3g}")

    def matrices(self, n, t=None):
        """Images and inverse images of the generators as matrices (or field scalars)."""
        if self.kind == "Abelian" and t is None:
            F = _qqt()
            ims = [[[F.monomial(a)]] for a in self.alpha]
            inv = [[[F.monomial(-a)]] for a in self.alpha]
            return ims, inv
        if self.kind == "Abelian":
            ims = [np.array([[t ** a]], dtype=complex) for a in self.alpha]
            inv = [np.array([[t ** (-a)]], dtype=complex) for a in self.alpha]
            return ims, inv
        ims = [adjoint(g) for g in self.images[:n]]
        inv = [m.T.copy() for m in ims]
        if self.kind == "AdjointAlexander":
            if t is None:
                raise ValueError("twisted Alexander coefficients need a numeric t")
            ims = [m * t ** a for m, a in zip(ims, self.alpha)]
            inv = [m * t ** (-a) for m, a in zip(inv, self.alpha)]
        return ims, inv


_QQT = None


def _qqt():
    global _QQT
    if _QQT is None:
        _QQT = exact.RationalFunctionField()
    return _QQT


# ---------------------------------------------------------------------------
# complexes


def _fox_blocks_numeric(p, ims, inv, k):
    n = p.num_generators
    dtype = np.result_type(*[m.dtype for m in ims]) if ims else float
    one = np.eye(k, dtype=dtype)
    rows = []
    for r in p.relators:
        blocks = fox_jacobian_blocks(r, ims, inv, n, lambda A, B: A @ B, lambda A, B: A + B,
                                     lambda: np.zeros((k, k), dtype=dtype), one)
        rows.append(blocks)
    return rows


def _fox_blocks_exact(p, ims, inv, F):
    n = p.num_generators
    rows = []
    for r in p.relators:
        vals = [F.zero] * n
        P = F.one
        for h, e in r.letters:
            if e > 0:
                vals[h] = vals[h] + P
                P = P * ims[h][0][0]
            else:
                P = P * inv[h][0][0]
                vals[h] = vals[h] - P
        rows.append(vals)
    return rows


def twisted_complex(p: GroupPresentation, coeffs: CoefficientSystem, t=None, check=True):
    """Cochain complex ``C^*(W; coeffs)`` with ranks ``(k, k n, k m)``.

    ``AdjointReal`` gives a real complex.  ``Abelian`` without ``t`` is exact
    over Q(t); with a numeric ``t`` (and for ``AdjointAlexander``) it is the
    complex complex evaluated at that point.
    """
    if check:
        coeffs.check(p)
    n, m, k = p.num_generators, len(p.relators), coeffs.rank
    ims, inv = coeffs.matrices(n, t)
    if coeffs.kind == "Abelian" and t is None:
        F = _qqt()
        d0 = [[F.one - ims[g][0][0]] for g in range(n)]
        d1 = _fox_blocks_exact(p, ims, inv, F)
        return BasedComplex([1, n, m] if m else [1, n], [d0, d1] if m else [d0], cochain=True,
                            field=F, name=f"C^*({p.name}; alpha)")
    dtype = complex if (t is not None and coeffs.kind != "AdjointReal") else float
    d0 = np.zeros((k * n, k), dtype=dtype)
    for g in range(n):
        d0[k * g:k * g + k] = np.eye(k) - ims[g]
    maps = [d0]
    dims = [k, k * n]
    if m:
        d1 = np.zeros((k * m, k * n), dtype=dtype)
        for i, blocks in enumerate(_fox_blocks_numeric(p, ims, inv, k)):
            for g, B in enumerate(blocks):
                d1[k * i:k * i + k, k * g:k * g + k] = B
        maps.append(d1)
        dims.append(k * m)
    return BasedComplex(dims, maps, cochain=True, name=f"C^*({p.name}; {coeffs.kind})",
                        check=check)


def twisted_chain_complex(p: GroupPresentation, coeffs: CoefficientSystem, t=None, check=True):
    """Chain complex ``C_*(W; coeffs)``: the transposed differentials of :func:`twisted_complex`.

    With ``d_1 = Phi(x_g) - 1`` and ``d_2`` the transposed Fox matrix, the
    torsion of the acyclic Alexander complex is Milnor's ``Delta(t)/(t-1)``.
    """
    C = twisted_complex(p, coeffs, t, check)
    if C.field is not None:
        F = C.field
        maps = [[[F.zero - x for x in col] for col in zip(*C.maps[0])]]
        if len(C.maps) > 1:
            maps.append([list(col) for col in zip(*C.maps[1])])
    else:
        maps = [-C.maps[0].T]
        if len(C.maps) > 1:
            maps.append(C.maps[1].T.copy())
    return BasedComplex(C.dims, maps, cochain=False, field=C.field, check=check,
                        name=C.name.replace("C^*", "C_*"))


def untwisted_real_complex(p: GroupPresentation):
    """Exact rational chain complex ``C_*(W; R)`` with ranks ``(1, n, m)``."""
    n, m = p.num_generators, len(p.relators)
    F = exact.QQ
    d1 = [[F.zero] * n]
    maps = [d1]
    dims = [1, n]
    if m:
        d2 = [[F.convert(r.exponent_sum(g)) for r in p.relators] for g in range(n)]
        maps.append(d2)
        dims.append(m)
    return BasedComplex(dims, maps, cochain=False, field=F, name=f"C_*({p.name}; R)")


# ---------------------------------------------------------------------------
# derivations


class Derivation:
    """Crossed homomorphism ``G -> su(2)`` given by its values on the generators."""

    def __init__(self, values, images):
        self.values = [np.asarray(v, dtype=float).reshape(3) for v in values]
        self.images = images_of(images)
        self._ad = [adjoint(g) for g in self.images]

    @classmethod
    def inner(cls, a, images):
        """``g -> a - Ad_g a``."""
        a = np.asarray(a, dtype=float)
        ims = images_of(images)
        return cls([a - adjoint(g) @ a for g in ims], ims)

    @classmethod
    def from_cochain(cls, vec, images):
        vec = np.asarray(vec, dtype=float)
        return cls([vec[3 * g:3 * g + 3] for g in range(len(vec) // 3)], images)

    def __call__(self, w: Word):
        """Value on a word, by the rule ``d(gh) = d(g) + Ad_g d(h)``."""
        total = np.zeros(3)
        A = np.eye(3)
        for g, e in w.letters:
            if e > 0:
                total = total + A @ self.values[g]
                A = A @ self._ad[g]
            else:
                A = A @ self._ad[g].T
                total = total - A @ self.values[g]
        return total

    def cochain(self):
        return np.concatenate(self.values) if self.values else np.zeros(0)

    def __add__(self, other):
        return Derivation([a + b for a, b in zip(self.values, other.values)], self.images)

    def scale(self, lam):
        return Derivation([lam * a for a in self.values], self.images)

    def relator_residuals(self, p: GroupPresentation):
        return [float(np.linalg.norm(self(r))) for r in p.relators]


def derivation_to_cocycle(d: Derivation, p: GroupPresentation, rep=None, tol=1e-8):
    """Degree-1 cochain of a derivation; raises :class:`NotACocycle` if a relator fails."""
    if rep is not None:
        d = Derivation(d.values, rep)
    scale = max(1.0, max((np.linalg.norm(v) for v in d.values), default=0.0))
    for k, res in enumerate(d.relator_residuals(p)):
        if res > tol * scale:
            raise NotACocycle(k, res)
    return d.cochain()


def restrict_derivation(d: Derivation, words, images):
    """Pull a derivation back along generator words ``words`` (new generator -> word)."""
    return Derivation([d(w) for w in words], images)

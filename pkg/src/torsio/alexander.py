"""Abelian torsion (Milnor's Delta/(t-1)) and the adjoint twisted Alexander invariant.

Both are torsions of acyclic chain complexes built by :mod:`torsio.twisted`.
The abelian one is exact over Q(t).  The twisted one is evaluated at points
of the unit circle with the floating point engine; multiplying by the
known denominator ``det(t Ad(rho(mu)) - 1)`` leaves a Laurent polynomial
whose coefficients are recovered by a discrete Fourier transform.

Results are :class:`RationalFunction` values normalised up to ``+-t^m``:
no common power of ``t``, lowest numerator coefficient positive, monic
denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import chainlib
from .fgroup import GroupPresentation, Word
from .su2 import adjoint
from .twisted import CoefficientSystem, evaluate_word, images_of, twisted_chain_complex

CLEANUP = 1e-10


class NotAcyclic(ArithmeticError):
    """The Alexander complex has homology at this representation."""


@dataclass
class RationalFunction:
    """``numerator / denominator``, coefficient lists from degree 0 upwards."""

    numerator: list
    denominator: list

    def __call__(self, t):
        return _poly(self.numerator, t) / _poly(self.denominator, t)

    def to_json(self):
        conv = lambda c: str(c) if isinstance(c, Fraction) else float(c)
        return {"numerator": [conv(c) for c in self.numerator],
                "denominator": [conv(c) for c in self.denominator],
                "normalization": "up to +-t^m: no common t power, lowest numerator "
                                 "coefficient positive, monic denominator"}

    def max_difference(self, other):
        """Largest coefficient difference (denominators must agree)."""
        a, b = self.numerator, other.numerator
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        da, db = self.denominator, other.denominator
        m = max(len(da), len(db))
        da = list(da) + [0] * (m - len(da))
        db = list(db) + [0] * (m - len(db))
        return max(max(abs(float(x) - float(y)) for x, y in zip(a, b)),
                   max(abs(float(x) - float(y)) for x, y in zip(da, db)))


def _poly(coeffs, t):
    return sum(c * t ** k for k, c in enumerate(coeffs))


def normalize(num, den):
    """Canonical form of a Laurent fraction given as degree-0-based coefficient lists."""
    num, _, _ = chainlib.canonicalize_laurent(num, 0)
    den, _, _ = chainlib.canonicalize_laurent(den, 0)
    if not den:
        raise ZeroDivisionError("zero denominator")
    lead = den[-1]
    den = [c / lead for c in den]
    num = [c / lead for c in num]
    if num and num[0] < 0:
        num = [-c for c in num]
    return RationalFunction(num, den)


# ---------------------------------------------------------------------------
# abelian


def abelian_torsion(p: GroupPresentation, meridian: Word) -> RationalFunction:
    """Torsion of ``C_*(W; alpha)`` over Q(t); equals ``Delta_K(t)/(t-1)``."""
    C = twisted_chain_complex(p, CoefficientSystem.abelian(p, meridian))
    _, dims = chainlib.homology_basis(C)
    if any(dims):
        raise NotAcyclic(f"homology dimensions {dims}")
    value = chainlib.torsion(C).value
    num, den = value.numer, value.denom
    return normalize(_sympy_coeffs(num), _sympy_coeffs(den))


def _sympy_coeffs(poly):
    """Coefficients of a sympy sparse polynomial in one variable, from degree 0."""
    terms = poly.terms()
    deg = max(m[0] for m, _ in terms)
    out = [Fraction(0)] * (deg + 1)
    for (k,), c in terms:
        out[k] = Fraction(int(c.numerator), int(c.denominator))
    return out


def alexander_polynomial(p: GroupPresentation, meridian: Word):
    """``Delta_K(t)`` from the abelian torsion, normalised like the torsion numerator."""
    r = abelian_torsion(p, meridian)
    # r = Delta / (t - 1) after cancellation; multiply back
    num = _mul(r.numerator, [Fraction(-1), Fraction(1)])
    q, rem = _divmod(num, r.denominator)
    if any(rem):
        raise ArithmeticError("denominator does not divide (t - 1) Delta")
    return normalize(q, [Fraction(1)]).numerator


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / b[-1]
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] -= c * y
    return q, a[:len(b) - 1]


def seifert_alexander(V):
    """``det(V - t V^T)`` for an integer Seifert matrix, coefficients from degree 0."""
    import sympy
    t = sympy.Symbol("t")
    M = sympy.Matrix(V)
    poly = sympy.Poly((M - t * M.T).det(), t)
    coeffs = [Fraction(int(c)) for c in reversed(poly.all_coeffs())]
    return normalize(coeffs, [Fraction(1)]).numerator


# ---------------------------------------------------------------------------
# twisted


def twisted_alexander(p: GroupPresentation, rep, meridian: Word, points=None) -> RationalFunction:
    """Torsion of ``C_*(W; Ad rho tensor alpha)`` as a rational function of ``t``."""
    ims = images_of(rep)
    coeffs = CoefficientSystem.adjoint_alexander(ims, p, meridian)
    M = points or _sample_count(p, coeffs.alpha)
    R = adjoint(evaluate_word(meridian, ims))
    den = np.real(np.poly(R)[::-1])  # det(t - R), coefficients from degree 0
    den = np.array([c if abs(c) > CLEANUP else 0.0 for c in den])
    for offset in (0.5, 0.25, 0.125):
        ts = np.exp(2j * np.pi * (np.arange(M) + offset) / M)
        try:
            vals = np.array([_torsion_at(p, coeffs, t) * _poly(den, t) for t in ts])
        except (chainlib.IllConditioned, chainlib.DegenerateBasis, NotAcyclic):
            continue
        break
    else:
        raise NotAcyclic("twisted Alexander complex is not acyclic on the sample circle")
    half = M // 2
    js = np.arange(-half, half)
    c = np.array([np.mean(vals * ts ** (-j)) for j in js])
    scale = np.abs(c).max()
    if np.abs(c.imag).max() > 1e-6 * scale:
        raise ArithmeticError("twisted Alexander coefficients are not real")
    c = c.real
    c[np.abs(c) < CLEANUP * max(scale, 1.0)] = 0.0
    nz = np.nonzero(c)[0]
    if len(nz) and (nz[0] == 0 or nz[-1] == M - 1):
        raise ArithmeticError("sample count too small for the Laurent span")
    # self-check at a point off the circle
    t0 = 1.3 + 0.4j
    approx = sum(ci * t0 ** j for j, ci in zip(js, c))
    exact_val = _torsion_at(p, coeffs, t0) * _poly(den, t0)
    if abs(approx - exact_val) > 1e-6 * max(1.0, abs(exact_val)):
        raise ArithmeticError("Fourier reconstruction does not match the torsion")
    num = list(c[nz[0]:nz[-1] + 1]) if len(nz) else []
    return normalize(num, list(den))


def _sample_count(p, alpha):
    """Power of two comfortably above the Laurent span of numerator times denominator."""
    width = 1
    for r in p.relators:
        k, lo, hi = 0, 0, 0
        for g, e in r.letters:
            k += alpha[g] * e
            lo, hi = min(lo, k), max(hi, k)
        width = max(width, hi - lo + 1)
    span = 3 * p.num_generators * width + 4
    return int(2 ** np.ceil(np.log2(2 * span)))


def _torsion_at(p, coeffs, t):
    C = twisted_chain_complex(p, coeffs, t=t, check=False)
    _, dims = chainlib.homology_basis(C)
    if any(dims):
        raise NotAcyclic(f"homology dimensions {dims} at t = {t}")
    return complex(chainlib.torsion(C).value)

"""The torsion form of a knot exterior at a regular representation.

The boundary torus is the 2-complex ``<m, l | m l m^-1 l^-1>``.  A
peripheral certificate writes ``mu lambda mu^-1 lambda^-1`` as a product of
conjugated relators ``u_k r_k^{s_k} u_k^-1``; in the universal cover this
sends the torus 2-cell to ``sum_k s_k u_k e_{r_k}``, so a 2-cochain ``z`` of
the knot complex pulls back to ``sum_k s_k Ad(rho(u_k)) z(r_k)`` on the
torus.  Cup product with the meridian axis ``P`` is then just the pairing
with ``P``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import chainlib
from .chainlib import HomologyBasisSet
from .fgroup import GroupPresentation, Word, fox_jacobian_blocks
from .su2 import CentralElement, Su2Element, adjoint, axis_angle, pairing
from .twisted import CoefficientSystem, evaluate_word, images_of, twisted_complex, \
    untwisted_real_complex

COMMUTE_TOL = 1e-8


class NonCommutingPeripheral(ValueError):
    pass


class CentralMeridian(ValueError):
    pass


class BadCertificate(ValueError):
    pass


class NotRegular(ValueError):
    pass


class WrongHomology(ValueError):
    pass


TORUS = GroupPresentation(2, [Word([(0, 1), (1, 1), (0, -1), (1, -1)])], ["m", "l"], "torus")


# ---------------------------------------------------------------------------
# certificates


@dataclass
class PeripheralCertificate:
    """Factors ``(relator_index, conjugator, sign)`` of the torus relation."""

    factors: list

    @classmethod
    def from_json(cls, data):
        try:
            return cls([(int(f["relator_index"]), Word.from_json(f["conjugator_word"]),
                         int(f["sign"])) for f in data])
        except (KeyError, TypeError, ValueError) as exc:
            raise BadCertificate(f"malformed certificate: {exc}") from exc

    def to_json(self):
        return [{"relator_index": j, "conjugator_word": u.to_json(), "sign": s}
                for j, u, s in self.factors]

    def product(self, p: GroupPresentation) -> Word:
        out = Word()
        for j, u, s in self.factors:
            out = out * u * (p.relators[j] ** s) * u.inverse()
        return out

    def validate(self, p: GroupPresentation, meridian: Word, longitude: Word):
        """Check the free-group identity; raises :class:`BadCertificate`."""
        for j, _, s in self.factors:
            if not 0 <= j < len(p.relators) or s not in (1, -1):
                raise BadCertificate(f"bad factor ({j}, {s})")
        target = meridian * longitude * meridian.inverse() * longitude.inverse()
        got = self.product(p)
        if got != target:
            raise BadCertificate(f"product reduces to {got.pretty()} instead of {target.pretty()}")

    def pullback_matrix(self, p: GroupPresentation, images):
        """3 x 3m matrix of ``z -> (i^* z)(torus 2-cell)`` on 2-cochains."""
        m = len(p.relators)
        M = np.zeros((3, 3 * m))
        for j, u, s in self.factors:
            M[:, 3 * j:3 * j + 3] += s * adjoint(evaluate_word(u, images))
        return M

    def check_chain_map(self, p: GroupPresentation, meridian: Word, longitude: Word, images,
                        tol=1e-8):
        """``i^* delta = delta_T i^*`` on 1-cochains, evaluated at ``images``."""
        n = p.num_generators
        ad = [adjoint(g) for g in images]
        adi = [a.T for a in ad]
        fox = lambda w: np.hstack(fox_jacobian_blocks(
            w, ad, adi, n, lambda A, B: A @ B, lambda A, B: A + B,
            lambda: np.zeros((3, 3)), np.eye(3)))
        d1 = np.vstack([fox(r) for r in p.relators])
        lhs = self.pullback_matrix(p, images) @ d1
        rhs = fox(meridian * longitude * meridian.inverse() * longitude.inverse())
        res = float(np.abs(lhs - rhs).max())
        if res > tol * max(1.0, np.abs(rhs).max()):
            raise BadCertificate(f"chain map does not commute (residual {res:.2g})")
        return res


# ---------------------------------------------------------------------------
# torus


def meridian_axis(images, meridian: Word):
    """``(theta, P)`` with ``rho(mu) = cos(theta) + sin(theta) P``."""
    try:
        return axis_angle(evaluate_word(meridian, images_of(images)))
    except CentralElement as exc:
        raise CentralMeridian("meridian image is central") from exc


def torus_complex(rho_mu: Su2Element, rho_lambda: Su2Element, check=True):
    """Twisted cochain complex of the boundary torus, ranks (3, 6, 3)."""
    c = rho_mu * rho_lambda * rho_mu.inverse() * rho_lambda.inverse()
    if check and c.distance(Su2Element.identity()) > COMMUTE_TOL:
        raise NonCommutingPeripheral("meridian and longitude images do not commute")
    return twisted_complex(TORUS, CoefficientSystem.adjoint([rho_mu, rho_lambda]), check=False)


def cup_with_P(z, P) -> float:
    """``P`` cup a degree-2 torus cochain, as a multiple of the fundamental class."""
    return pairing(P, np.asarray(z, dtype=float).reshape(3))


def distinguished_generator(rep, p: GroupPresentation, meridian: Word, longitude: Word,
                            cert: PeripheralCertificate, tol=None):
    """Degree-2 cocycle ``h`` with ``P cup i^*(h) = c``."""
    images = images_of(rep)
    C = twisted_complex(p, CoefficientSystem.adjoint(images))
    H, dims = chainlib.homology_basis(C, tol)
    if dims[2] != 1:
        raise NotRegular(f"H^2 has dimension {dims[2]}")
    _, P = meridian_axis(images, meridian)
    z = np.real(H[2][0])
    s = cup_with_P(cert.pullback_matrix(p, images) @ z, P)
    if abs(s) < 1e-10:
        raise BadCertificate("boundary restriction kills H^2")
    h = z / s
    return h


def orientation_sign(p: GroupPresentation, meridian: Word) -> int:
    """Sign of the untwisted torsion with homology basis ``{[pt], [mu]}``."""
    C = untwisted_real_complex(p)
    dims = chainlib.betti_numbers(C)
    if dims[:2] != [1, 1] or any(dims[2:]):
        raise WrongHomology(f"Betti numbers {dims}, expected (1, 1, 0)")
    mu = [Fraction(meridian.exponent_sum(g)) for g in range(p.num_generators)]
    H = HomologyBasisSet({0: [[Fraction(1)]], 1: [mu]})
    value = chainlib.torsion(C, H).value
    return 1 if value > 0 else -1


def torsion_form(rep, v, p: GroupPresentation, meridian: Word, longitude: Word,
                 cert: PeripheralCertificate, tol=None, h2=None, sign=None) -> float:
    """``tau(v)``: signed torsion with homology basis ``{v, h^(2)}``; zero for ``v = 0``."""
    images = images_of(rep)
    z = np.asarray(getattr(v, "cochain", v), dtype=float)
    if not np.any(z):
        return 0.0
    C = twisted_complex(p, CoefficientSystem.adjoint(images))
    if h2 is None:
        h2 = distinguished_generator(images, p, meridian, longitude, cert, tol)
    H = HomologyBasisSet({1: [z], 2: [h2]})
    _, dims = chainlib.homology_basis(C, tol)
    if dims[1:] != [1, 1] or dims[0]:
        raise NotRegular(f"twisted Betti numbers {dims}")
    eps = orientation_sign(p, meridian) if sign is None else sign
    return eps * float(chainlib.torsion(C, H, tol=tol).value)

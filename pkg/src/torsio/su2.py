"""Unit quaternion model of SU(2) and its Lie algebra.

Elements of SU(2) are unit quaternions ``w + x i + y j + z k``.  The Lie
algebra su(2) is identified with pure quaternions, written as coefficient
vectors in the ordered basis (i, j, k).  The invariant pairing is normalised
so that this basis is orthonormal; it is a fixed positive multiple of the
Killing form, and every torsion-form value in this package carries that
convention.
"""

from __future__ import annotations

import numpy as np

NORM_TOL = 1e-12


class CentralElement(ValueError):
    """Raised when an axis is requested for +1 or -1."""


def qmul(p, q):
    """Hamilton product of quaternion arrays of shape (..., 4)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


class Su2Element:
    """A unit quaternion.

    Products are renormalised so long relator words do not drift off the
    sphere.
    """

    __slots__ = ("q",)

    def __init__(self, q, normalize=True):
        q = np.array(q, dtype=float).reshape(4)
        if normalize:
            n = np.linalg.norm(q)
            if n == 0:
                raise ValueError("zero quaternion")
            q = q / n
        self.q = q

    @classmethod
    def identity(cls):
        return cls([1.0, 0.0, 0.0, 0.0])

    @classmethod
    def from_axis_angle(cls, theta, axis):
        """Return cos(theta) + sin(theta) P for a unit vector P."""
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        return cls(np.concatenate([[np.cos(theta)], np.sin(theta) * axis]))

    @classmethod
    def random(cls, rng):
        return cls(rng.normal(size=4))

    def __mul__(self, other):
        return Su2Element(qmul(self.q, other.q))

    def inverse(self):
        return Su2Element(qconj(self.q), normalize=False)

    def __neg__(self):
        return Su2Element(-self.q, normalize=False)

    def trace(self):
        """Trace of the corresponding 2x2 matrix."""
        return 2.0 * self.q[0]

    def adjoint(self):
        return adjoint(self)

    def axis_angle(self):
        return axis_angle(self)

    def to_list(self):
        return [float(v) for v in self.q]

    def distance(self, other):
        return float(np.linalg.norm(self.q - other.q))

    def __repr__(self):
        w, x, y, z = self.q
        return f"Su2Element({w:.6g}, {x:.6g}, {y:.6g}, {z:.6g})"


def adjoint_matrix(q):
    """Rotation matrix of v -> q v q^{-1} for a unit quaternion array."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array([
        [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
    ])


def adjoint(g: Su2Element) -> np.ndarray:
    """The SO(3) matrix of Ad_g in the basis (i, j, k)."""
    return adjoint_matrix(g.q)


def axis_angle(g: Su2Element, tol: float = NORM_TOL):
    """Return (theta, P) with theta in (0, pi) and g = cos(theta) + sin(theta) P."""
    w = float(np.clip(g.q[0], -1.0, 1.0))
    v = g.q[1:]
    s = np.linalg.norm(v)
    if s <= tol:
        raise CentralElement("element is central, it has no rotation axis")
    return float(np.arctan2(s, w)), v / s


def pairing(u, v) -> float:
    """Ad-invariant pairing, normalised so (i, j, k) is orthonormal."""
    return float(np.dot(np.asarray(u, dtype=float), np.asarray(v, dtype=float)))


def exp_algebra(a) -> Su2Element:
    """Exponential of a pure quaternion a (coefficients in i, j, k)."""
    a = np.asarray(a, dtype=float)
    n = np.linalg.norm(a)
    if n < 1e-300:
        return Su2Element.identity()
    return Su2Element(np.concatenate([[np.cos(n)], np.sin(n) * a / n]))

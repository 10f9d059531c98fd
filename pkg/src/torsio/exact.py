"""Small exact linear algebra over a field.

Matrices are lists of rows.  Entries only need ``+ - * /`` and an exact zero
test, so the same routines serve ``fractions.Fraction`` and sympy's rational
function field.
"""

from __future__ import annotations

from fractions import Fraction


class Field:
    """Scalar domain for exact computations."""

    name = "field"

    def __init__(self, zero, one):
        self.zero = zero
        self.one = one

    def convert(self, x):
        return x

    def is_zero(self, x):
        return x == self.zero

    def __repr__(self):
        return f"<{self.name}>"


class RationalField(Field):
    name = "QQ"

    def __init__(self):
        super().__init__(Fraction(0), Fraction(1))

    def convert(self, x):
        return Fraction(x)


class RationalFunctionField(Field):
    """Q(t) backed by sympy's sparse rational function field."""

    name = "QQ(t)"

    def __init__(self):
        import sympy
        from sympy.polys.fields import field as sym_field

        K, t = sym_field("t", sympy.QQ)
        self.K = K
        self.t = t
        super().__init__(K.zero, K.one)

    def convert(self, x):
        return self.K(x)

    def monomial(self, k: int):
        return self.t ** k if k >= 0 else self.one / self.t ** (-k)


QQ = RationalField()


def copy_matrix(M):
    return [list(row) for row in M]


def shape(M):
    return len(M), (len(M[0]) if M else 0)


def rref(M, field, ncols=None):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    A = copy_matrix(M)
    rows = len(A)
    cols = ncols if ncols is not None else (len(A[0]) if A else 0)
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not field.is_zero(A[i][c]):
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.one / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(rows):
            if i != r and not field.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M, field, ncols=None):
    return len(rref(M, field, ncols)[1])


def nullspace(M, field, ncols):
    """Basis of {x : M x = 0} as a list of column vectors (lists)."""
    if not M:
        return [[field.one if j == i else field.zero for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(M, field, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, p in enumerate(piv):
            v[p] = -R[row][f]
        basis.append(v)
    return basis


def det(M, field):
    n = len(M)
    if n == 0:
        return field.one
    A = copy_matrix(M)
    d = field.one
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not field.is_zero(A[i][c]):
                piv = i
                break
        if piv is None:
            return field.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d = d * A[c][c]
        inv = field.one / A[c][c]
        for i in range(c + 1, n):
            if not field.is_zero(A[i][c]):
                f = A[i][c] * inv
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


def matmul(A, B, field):
    if not A or not B:
        return [[field.zero] * (len(B[0]) if B else 0) for _ in range(len(A))]
    inner = len(B)
    cols = len(B[0])
    out = []
    for row in A:
        out.append([sum((row[k] * B[k][j] for k in range(inner)), field.zero) for j in range(cols)])
    return out


def matvec(A, v, field):
    return [sum((a * b for a, b in zip(row, v)), field.zero) for row in A]


def columns(M, idx):
    return [[row[j] for row in M] for j in idx]


def from_columns(cols, nrows, field):
    return [[c[i] for c in cols] for i in range(nrows)] if cols else [[] for _ in range(nrows)]


def solve(A, b, field, ncols):
    """One solution x of A x = b, or None if inconsistent."""
    rows = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    R, piv = rref(aug, field, ncols + 1)
    if ncols in piv:
        return None
    x = [field.zero] * ncols
    for row, p in enumerate(piv):
        x[p] = R[row][ncols]
    return x


def is_zero_matrix(M, field):
    return all(field.is_zero(v) for row in M for v in row)

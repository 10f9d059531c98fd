"""Based chain complexes and sign-determined Reidemeister torsion.

A :class:`BasedComplex` stores one matrix per differential, written in the
standard (distinguished) bases.  Exact complexes use nested lists over a
:class:`torsio.exact.Field`; floating complexes use numpy arrays, real or
complex.

Cochain complexes are handled by reindexing: with ``N`` even and at least the
top degree, ``D_j = C^{N-j}`` is a chain complex whose brackets coincide with
the cohomological ones, so the two torsions differ only by the parity of the
respective ``|C|`` sign exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import exact

RANK_TOL = 1e-9


class IllConditioned(ArithmeticError):
    """Singular values too close to the rank threshold to decide a rank."""


class DegenerateBasis(ArithmeticError):
    """The assembled bracket columns do not form a basis."""


class NotExact(ValueError):
    """A sequence of complexes fails to be short exact."""


class NotAComplex(ValueError):
    """Consecutive differentials do not compose to zero."""


# ---------------------------------------------------------------------------
# scalar backends


class _FloatOps:
    exact = False

    def __init__(self, tol=RANK_TOL):
        self.tol = tol

    def zeros(self, r, c):
        return np.zeros((r, c))

    def rank_threshold(self, M):
        s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
        if s.size == 0 or s[0] == 0:
            return s, 0.0
        thr = self.tol * s[0]
        ambiguous = (s > thr / 10) & (s < thr * 10)
        if ambiguous.any():
            raise IllConditioned(
                f"singular value {s[ambiguous][0]:.3e} within a factor 10 of threshold {thr:.3e}")
        return s, thr

    def rank(self, M):
        s, thr = self.rank_threshold(M)
        return int((s > thr).sum()) if s.size and s[0] > 0 else 0

    def pivot_columns(self, M):
        r = self.rank(M)
        if r == 0:
            return []
        _, _, piv = scipy.linalg.qr(M, mode="economic", pivoting=True)
        return sorted(int(p) for p in piv[:r])

    def nullspace(self, M, ncols):
        if M.shape[0] == 0 or ncols == 0:
            return np.eye(ncols)
        r = self.rank(M)
        _, _, vh = np.linalg.svd(M)
        return vh[r:].conj().T

    def orth(self, M):
        if M.size == 0:
            return np.zeros((M.shape[0], 0))
        r = self.rank(M)
        u, _, _ = np.linalg.svd(M, full_matrices=False)
        return u[:, :r]

    def det(self, M):
        return np.linalg.det(M) if M.shape[0] else 1.0

    def stack(self, cols, nrows):
        if not cols:
            return np.zeros((nrows, 0))
        return np.column_stack([np.asarray(c) for c in cols])

    def cols(self, M):
        return [M[:, j] for j in range(M.shape[1])]

    def matmul(self, A, B):
        return A @ B

    def solve(self, A, b):
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        return x

    def check_basis(self, M):
        if M.shape[0] == 0:
            return
        norms = np.linalg.norm(M, axis=0)
        if (norms == 0).any():
            raise DegenerateBasis("zero column in bracket")
        s = np.linalg.svd(M / norms, compute_uv=False)
        if s[-1] < self.tol * s[0]:
            raise DegenerateBasis(f"bracket matrix singular (sigma_min/sigma_max={s[-1] / s[0]:.2e})")

    def random_combination(self, M, k, rng):
        return M @ rng.normal(size=(M.shape[1], k))

    def is_zero(self, M, scale=1.0):
        return M.size == 0 or np.abs(M).max() <= self.tol * max(scale, 1.0)


class _ExactOps:
    exact = True

    def __init__(self, field):
        self.f = field

    def zeros(self, r, c):
        return [[self.f.zero] * c for _ in range(r)]

    def rank(self, M):
        return exact.rank(M, self.f) if M and M[0] else 0

    def pivot_columns(self, M):
        if not M or not M[0]:
            return []
        return exact.rref(M, self.f)[1]

    def nullspace(self, M, ncols):
        vecs = exact.nullspace(M, self.f, ncols) if M and ncols else (
            exact.nullspace([], self.f, ncols))
        return exact.from_columns(vecs, ncols, self.f)

    def orth(self, M):
        piv = self.pivot_columns(M)
        return exact.from_columns(exact.columns(M, piv), len(M), self.f)

    def det(self, M):
        return exact.det(M, self.f)

    def stack(self, cols, nrows):
        return exact.from_columns([list(c) for c in cols], nrows, self.f)

    def cols(self, M):
        ncols = len(M[0]) if M else 0
        return exact.columns(M, range(ncols))

    def matmul(self, A, B):
        return exact.matmul(A, B, self.f)

    def solve(self, A, b):
        x = exact.solve(A, b, self.f, len(A[0]) if A else 0)
        if x is None:
            raise NotExact("linear system inconsistent")
        return x

    def check_basis(self, M):
        if M and self.f.is_zero(exact.det(M, self.f)):
            raise DegenerateBasis("bracket matrix singular")

    def random_combination(self, M, k, rng):
        ncols = len(M[0]) if M else 0
        G = [[self.f.convert(int(rng.integers(-3, 4))) for _ in range(k)] for _ in range(ncols)]
        return exact.matmul(M, G, self.f) if ncols else self.zeros(len(M), k)

    def is_zero(self, M, scale=1.0):
        return exact.is_zero_matrix(M, self.f)


def _ops(field, tol):
    return _FloatOps(tol) if field is None else _ExactOps(field)


def _shape(M):
    if isinstance(M, np.ndarray):
        return M.shape
    return exact.shape(M)


# ---------------------------------------------------------------------------
# complexes


class BasedComplex:
    """Finite complex with distinguished bases.

    ``maps[k]`` is the differential between degrees ``k`` and ``k+1``: for a
    chain complex it is ``d_{k+1}: C_{k+1} -> C_k`` (shape ``dims[k] x
    dims[k+1]``), for a cochain complex ``delta^k: C^k -> C^{k+1}`` (shape
    ``dims[k+1] x dims[k]``).  ``field`` is ``None`` for floating point.
    """

    def __init__(self, dims, maps, cochain=False, field=None, tol=RANK_TOL, check=True,
                 name=None):
        self.dims = [int(d) for d in dims]
        self.cochain = bool(cochain)
        self.field = field
        self.tol = tol
        self.name = name
        if len(maps) != max(len(self.dims) - 1, 0):
            raise ValueError("need one map between each pair of consecutive degrees")
        ops = _ops(field, tol)
        self.maps = []
        for k, M in enumerate(maps):
            shape = (self.dims[k + 1], self.dims[k]) if cochain else (self.dims[k], self.dims[k + 1])
            if field is None:
                M = np.asarray(M)
                if M.dtype.kind not in "fc":
                    M = M.astype(float)
                M = M.reshape(shape)
            else:
                M = [[field.convert(v) for v in row] for row in M]
                if shape[0] == 0:
                    M = []
                if _shape(M) != shape and not (shape[0] == 0 or shape[1] == 0):
                    raise ValueError(f"map {k} has shape {_shape(M)}, expected {shape}")
                if shape[1] == 0:
                    M = [[] for _ in range(shape[0])]
            self.maps.append(M)
        if check:
            for k in range(len(self.maps) - 1):
                A, B = self.maps[k], self.maps[k + 1]
                comp = ops.matmul(B, A) if cochain else ops.matmul(A, B)
                scale = 1.0
                if field is None and A.size and B.size:
                    scale = np.abs(A).max() * np.abs(B).max()
                if not ops.is_zero(comp, scale):
                    raise NotAComplex(f"differentials at degree {k + 1} do not compose to zero")

    @property
    def top(self):
        return len(self.dims) - 1

    @property
    def ops(self):
        return _ops(self.field, self.tol)

    def out_map(self, i):
        """Differential leaving degree ``i`` (or None)."""
        if self.cochain:
            return self.maps[i] if i < self.top else None
        return self.maps[i - 1] if i > 0 else None

    def in_map(self, i):
        """Differential arriving in degree ``i`` (or None)."""
        if self.cochain:
            return self.maps[i - 1] if i > 0 else None
        return self.maps[i] if i < self.top else None

    def in_source(self, i):
        return i - 1 if self.cochain else i + 1

    def euler_characteristic(self):
        return sum((-1) ** i * d for i, d in enumerate(self.dims))

    def as_chain(self):
        """Return ``(D, N)`` with ``D_j = C^{N-j}`` and ``N`` even."""
        if not self.cochain:
            return self, None
        N = self.top + (self.top % 2)
        dims = [self.dims[N - j] if N - j <= self.top else 0 for j in range(N + 1)]
        maps = []
        for k in range(N):
            # d_{k+1}: D_{k+1} = C^{N-k-1} -> D_k = C^{N-k}
            src = N - k - 1
            if src < self.top:
                maps.append(self.maps[src])
            else:
                maps.append(self.ops.zeros(dims[k], dims[k + 1]))
        return BasedComplex(dims, maps, cochain=False, field=self.field, tol=self.tol,
                            check=False), N

    def direct_sum(self, other):
        """Block direct sum; bases are ours followed by theirs in each degree."""
        if self.cochain != other.cochain or (self.field is None) != (other.field is None):
            raise ValueError("incompatible complexes")
        top = max(self.top, other.top)
        da = self.dims + [0] * (top - self.top)
        db = other.dims + [0] * (top - other.top)
        maps = []
        ops = self.ops
        for k in range(top):
            A = self.maps[k] if k < self.top else ops.zeros(*((da[k + 1], da[k]) if self.cochain else (da[k], da[k + 1])))
            B = other.maps[k] if k < other.top else ops.zeros(*((db[k + 1], db[k]) if self.cochain else (db[k], db[k + 1])))
            maps.append(_block_diag(A, B, ops))
        return BasedComplex([a + b for a, b in zip(da, db)], maps, cochain=self.cochain,
                            field=self.field, tol=self.tol, check=False)

    def permuted(self, degree, perm):
        """Reorder the basis of one degree: new basis vector ``j`` is old ``perm[j]``."""
        maps = [_copy(M) for M in self.maps]
        perm = list(perm)
        for k, M in enumerate(maps):
            src, dst = (k, k + 1) if self.cochain else (k + 1, k)
            if src == degree:
                maps[k] = _take_cols(M, perm)
            if dst == degree:
                maps[k] = _take_rows(maps[k], perm)
        return BasedComplex(self.dims, maps, cochain=self.cochain, field=self.field,
                            tol=self.tol, check=False, name=self.name)

    def dump(self):
        """Plain-text listing of every differential, row-major."""
        kind = "cochain" if self.cochain else "chain"
        lines = [f"# {kind} complex {self.name or ''}".rstrip(),
                 "dims " + " ".join(str(d) for d in self.dims)]
        for k, M in enumerate(self.maps):
            src, dst = (k, k + 1) if self.cochain else (k + 1, k)
            r, c = _shape(M) if _shape(M) else (0, 0)
            lines.append(f"map {src} -> {dst} {r}x{c}")
            rows = M.tolist() if isinstance(M, np.ndarray) else M
            for row in rows:
                lines.append(" ".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return "%.17g%+.17gj" % (v.real, v.imag)
    if isinstance(v, (float, np.floating, int, np.integer)):
        return "%.17g" % v
    return str(v)


def _copy(M):
    return M.copy() if isinstance(M, np.ndarray) else exact.copy_matrix(M)


def _take_cols(M, idx):
    if isinstance(M, np.ndarray):
        return M[:, idx]
    return [[row[j] for j in idx] for row in M]


def _take_rows(M, idx):
    if isinstance(M, np.ndarray):
        return M[idx, :]
    return [list(M[i]) for i in idx]


def _block_diag(A, B, ops):
    if isinstance(A, np.ndarray):
        return scipy.linalg.block_diag(A, B) if (A.size or B.size) else np.zeros(
            (A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]))
    ra, ca = exact.shape(A) if A else (0, 0)
    rb, cb = exact.shape(B) if B else (0, 0)
    ca = len(A[0]) if A else _cols_hint(A)
    cb = len(B[0]) if B else _cols_hint(B)
    z = ops.f.zero
    rows = [list(r) + [z] * cb for r in A] + [[z] * ca + list(r) for r in B]
    return rows


def _cols_hint(M):
    return 0


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyBasisSet:
    """Per-degree lists of cycle representatives (coordinate vectors)."""

    vectors: dict

    def dims(self, top):
        return [len(self.vectors.get(i, [])) for i in range(top + 1)]

    def __getitem__(self, i):
        return self.vectors.get(i, [])

    def scaled(self, degree, j, lam):
        vecs = {k: [list(v) if not isinstance(v, np.ndarray) else v.copy() for v in vs]
                for k, vs in self.vectors.items()}
        v = vecs[degree][j]
        vecs[degree][j] = v * lam if isinstance(v, np.ndarray) else [lam * x for x in v]
        return HomologyBasisSet(vecs)

    @classmethod
    def empty(cls):
        return cls({})


def homology_basis(C: BasedComplex, tol=None):
    """Cycle representatives for a basis of homology in every degree.

    Returns ``(HomologyBasisSet, dims)``.  Float ranks use singular values
    below ``tol`` times the largest as zero and raise :class:`IllConditioned`
    when one sits within a factor of ten of that threshold.
    """
    ops = _ops(C.field, C.tol if tol is None else tol)
    vectors = {}
    dims = []
    for i, n in enumerate(C.dims):
        out = C.out_map(i)
        inn = C.in_map(i)
        if n == 0:
            dims.append(0)
            continue
        Z = ops.nullspace(out, n) if out is not None and _shape(out)[0] else (
            np.eye(n) if C.field is None else exact.from_columns(
                exact.nullspace([], C.field, n), n, C.field))
        if inn is not None and _shape(inn)[1]:
            B = ops.orth(inn)
        else:
            B = ops.zeros(n, 0)
        if C.field is None:
            nb = B.shape[1]
            if nb:
                # complement of the boundaries inside the cycles; its size is
                # rank Z - rank B, so noise in the projection is never counted
                h = Z.shape[1] - nb
                if h < 0:
                    raise IllConditioned(f"degree {i}: more boundaries than cycles")
                proj = Z - B @ (B.conj().T @ Z)
                u, _, _ = np.linalg.svd(proj, full_matrices=False)
                reps = u[:, :h]
            else:
                reps = Z
            reps_list = [reps[:, j] for j in range(reps.shape[1])]
        else:
            reps_list = _exact_complement(B, Z, C.field, n)
        vectors[i] = reps_list
        dims.append(len(reps_list))
    return HomologyBasisSet(vectors), dims


def _exact_complement(B, Z, field, n):
    bcols = exact.columns(B, range(len(B[0]))) if B and B[0] else []
    zcols = exact.columns(Z, range(len(Z[0]))) if Z and Z[0] else []
    chosen = list(bcols)
    reps = []
    r = len(bcols)
    for z in zcols:
        trial = chosen + [z]
        if exact.rank(exact.from_columns(trial, n, field), field) > r:
            chosen = trial
            reps.append(z)
            r += 1
    return reps


def betti_numbers(C: BasedComplex, tol=None):
    return homology_basis(C, tol)[1]


# ---------------------------------------------------------------------------
# torsion


@dataclass
class TorsionResult:
    """Signed torsion with the choices used to compute it."""

    value: object
    sign_exponent: int
    audit: dict = dc_field(default_factory=dict)


def sign_exponent(dims, hdims):
    """``|C| = sum_k alpha_k beta_k`` reduced mod 2."""
    a = b = total = 0
    for d, h in zip(dims, hdims):
        a += d
        b += h
        total += a * b
    return total % 2


def torsion(C: BasedComplex, H: HomologyBasisSet = None, strategy="pivot", rng=None,
            tol=None) -> TorsionResult:
    """Sign-determined torsion of ``C`` with homology basis ``H``.

    ``strategy="pivot"`` takes the pivot columns of each outgoing differential
    as the complement ``b``; ``"random"`` uses random combinations and adds
    random boundaries to the homology lifts.  The value does not depend on
    the strategy.
    """
    H = H or HomologyBasisSet.empty()
    if tol is not None:
        C = BasedComplex(C.dims, C.maps, C.cochain, C.field, tol, check=False, name=C.name)
    hdims = H.dims(C.top)
    _, actual = homology_basis(C)
    if actual != hdims:
        raise DegenerateBasis(f"homology basis sizes {hdims} do not match homology {actual}")
    eps = sign_exponent(C.dims, hdims)
    if C.cochain:
        D, N = C.as_chain()
        HD = HomologyBasisSet({N - i: v for i, v in H.vectors.items()})
        inner = _chain_torsion(D, HD, strategy, rng)
        eps_d = sign_exponent(D.dims, HD.dims(D.top))
        val = inner.value if (eps + eps_d) % 2 == 0 else -inner.value
        audit = {N - j: a for j, a in inner.audit.items()}
        return TorsionResult(val, eps, audit)
    return _chain_torsion(C, H, strategy, rng)


def _chain_torsion(C, H, strategy, rng):
    ops = C.ops
    if strategy == "random" and rng is None:
        rng = np.random.default_rng(0)
    one = 1.0 if C.field is None else C.field.one
    # b^i for each degree: vectors in C_i mapping onto im(d_i)
    bvecs = {}
    for i in range(C.top + 1):
        out = C.out_map(i)
        n = C.dims[i]
        if out is None or n == 0 or _shape(out)[0] == 0:
            bvecs[i] = []
            continue
        piv = ops.pivot_columns(out)
        if strategy == "random" and piv:
            Bm = ops.stack(_unit_columns(piv, n, C.field), n)
            Z = ops.nullspace(out, n)
            for _ in range(50):
                comb = ops.random_combination(Bm, len(piv), rng)
                if _shape(Z)[1]:
                    comb = _add(comb, ops.random_combination(Z, len(piv), rng), C.field)
                if ops.rank(ops.matmul(out, comb)) == len(piv):
                    break
            else:
                raise DegenerateBasis("could not draw a random complement")
            bvecs[i] = ops.cols(comb)
        else:
            bvecs[i] = _unit_columns(piv, n, C.field)
    value = one
    audit = {}
    for i in range(C.top + 1):
        n = C.dims[i]
        if n == 0:
            continue
        inn = C.in_map(i)
        src = C.in_source(i)
        cols = []
        if inn is not None and bvecs.get(src):
            Bsrc = ops.stack(bvecs[src], C.dims[src])
            cols.extend(ops.cols(ops.matmul(inn, Bsrc)))
        lifts = [_as_vec(h, C.field) for h in H[i]]
        if C.field is None and lifts:
            out = C.out_map(i)
            if out is not None and _shape(out)[0]:
                Z = ops.nullspace(out, n)
                lifts = [Z @ (Z.conj().T @ h) for h in lifts]
        if strategy == "random" and lifts and inn is not None and _shape(inn)[1]:
            k = len(lifts)
            extra = ops.cols(ops.random_combination(inn, k, rng))
            lifts = [_vadd(h, e, C.field) for h, e in zip(lifts, extra)]
        cols.extend(lifts)
        cols.extend(bvecs[i])
        if len(cols) != n:
            raise DegenerateBasis(f"degree {i}: assembled {len(cols)} vectors for dimension {n}")
        M = ops.stack(cols, n)
        ops.check_basis(M)
        br = ops.det(M)
        audit[i] = {"b": bvecs[i], "lifts": lifts, "bracket": br}
        value = value / br if i % 2 == 0 else value * br
    eps = sign_exponent(C.dims, H.dims(C.top))
    if eps:
        value = -value
    return TorsionResult(value, eps, audit)


def _unit_columns(idx, n, field):
    out = []
    for j in idx:
        if field is None:
            v = np.zeros(n)
            v[j] = 1.0
        else:
            v = [field.zero] * n
            v[j] = field.one
        out.append(v)
    return out


def _as_vec(h, field):
    if field is None:
        return np.asarray(h)
    return [field.convert(x) for x in h]


def _vadd(a, b, field):
    if field is None:
        return a + b
    return [x + y for x, y in zip(a, b)]


def _add(A, B, field):
    if field is None:
        return A + B
    return [[x + y for x, y in zip(r, s)] for r, s in zip(A, B)]


# ---------------------------------------------------------------------------
# multiplicativity


@dataclass
class MvResult:
    residual: float
    lhs: object
    rhs: object
    sign: int
    les: BasedComplex
    tor_sub: object
    tor_quot: object
    tor_les: object
    compat: object


def long_exact_sequence(sub, mid, quot, inc, proj, Hs, Hm, Hq):
    """Long exact homology sequence of ``0 -> sub -> mid -> quot -> 0``.

    All complexes are chain complexes.  ``inc[i]`` and ``proj[i]`` are the
    degree-``i`` chain maps.  The result is an acyclic chain complex with
    ``H_{3i+2} = H_i(sub)``, ``H_{3i+1} = H_i(mid)``, ``H_{3i} = H_i(quot)``,
    in the supplied homology bases.
    """
    ops = mid.ops
    field = mid.field
    top = mid.top
    dims = []
    for i in range(top + 1):
        dims += [len(Hq[i]), len(Hm[i]), len(Hs[i])]

    def coords(C, Hb, i, v):
        # coordinates of a cycle v in the homology basis, modulo boundaries
        n = C.dims[i]
        inn = C.in_map(i)
        cols = []
        if inn is not None and _shape(inn)[1]:
            cols.extend(ops.cols(ops.orth(inn)))
        nb = len(cols)
        cols.extend(_as_vec(h, field) for h in Hb[i])
        if not cols:
            return []
        A = ops.stack(cols, n)
        x = ops.solve(A, _as_vec(v, field))
        return list(x[nb:])

    maps = []
    for j in range(len(dims) - 1):
        # d_{j+1}: L_{j+1} -> L_j
        src, dst = j + 1, j
        ncol, nrow = dims[src], dims[dst]
        i_src, r_src = divmod(src, 3)
        cols = []
        if r_src == 2:
            # H_i(sub) -> H_i(mid)
            for h in Hs[i_src]:
                cols.append(coords(mid, Hm, i_src, ops.matmul(inc[i_src], _colmat(h, field))[:, 0]
                                   if field is None else [r[0] for r in ops.matmul(inc[i_src], _colmat(h, field))]))
        elif r_src == 1:
            for h in Hm[i_src]:
                cols.append(coords(quot, Hq, i_src, ops.matmul(proj[i_src], _colmat(h, field))[:, 0]
                                   if field is None else [r[0] for r in ops.matmul(proj[i_src], _colmat(h, field))]))
        else:
            # connecting map H_i(quot) -> H_{i-1}(sub)
            for h in Hq[i_src]:
                lift = ops.solve(proj[i_src], _as_vec(h, field))
                d = mid.out_map(i_src)
                dx = ops.matmul(d, _colmat(lift, field))
                dx = dx[:, 0] if field is None else [r[0] for r in dx]
                y = ops.solve(inc[i_src - 1], dx)
                cols.append(coords(sub, Hs, i_src - 1, y))
        M = ops.stack(cols, nrow) if ncol else ops.zeros(nrow, 0)
        maps.append(M)
    return BasedComplex(dims, maps, cochain=False, field=field, tol=mid.tol, check=False,
                        name="les")


def _colmat(v, field):
    if field is None:
        return np.asarray(v).reshape(-1, 1)
    return [[x] for x in v]


def _check_exact(sub, mid, quot, inc, proj):
    ops = mid.ops
    for i in range(mid.top + 1):
        a, b, c = sub.dims[i], mid.dims[i], quot.dims[i]
        if a + c != b:
            raise NotExact(f"degree {i}: dimensions {a} + {c} != {b}")
        if b == 0:
            continue
        I, P = inc[i], proj[i]
        if a and ops.rank(I) != a:
            raise NotExact(f"degree {i}: inclusion not injective")
        if c and ops.rank(P) != c:
            raise NotExact(f"degree {i}: projection not surjective")
        if a and c and not ops.is_zero(ops.matmul(P, I)):
            raise NotExact(f"degree {i}: projection does not kill the image of the inclusion")
    for i in range(1, mid.top + 1):
        # chain maps
        for S, T, F, name in ((sub, mid, inc, "inclusion"), (mid, quot, proj, "projection")):
            if S.dims[i] and T.dims[i - 1]:
                lhs = ops.matmul(T.out_map(i), F[i])
                rhs = ops.matmul(F[i - 1], S.out_map(i))
                diff = lhs - rhs if T.field is None else [[x - y for x, y in zip(r, s)] for r, s in zip(lhs, rhs)]
                if not ops.is_zero(diff):
                    raise NotExact(f"{name} is not a chain map in degree {i}")


def multiplicativity_sign(sub, mid, quot, hs, hm, hq):
    """Parity ``nu + mu`` of the multiplicativity sign from dimension data."""
    top = mid.top
    def alpha(C, i):
        return sum(C.dims[: i + 1]) if i >= 0 else 0
    def beta(h, i):
        return sum(h[: i + 1]) if i >= 0 else 0
    nu = sum(alpha(sub, i - 1) * alpha(quot, i) for i in range(top + 1))
    mu = sum((beta(hm, i) + 1) * (beta(hs, i) + beta(hq, i)) + beta(hs, i - 1) * beta(hq, i)
             for i in range(top + 1))
    return (nu + mu) % 2


def mv_multiplicativity(sub, mid, quot, inc, proj, Hs, Hm, Hq):
    """Check torsion multiplicativity on a short exact sequence.

    For chain complexes ``0 -> sub -> mid -> quot -> 0`` compares
    ``Tor(mid)`` with ``(-1)^{nu+mu} Tor(sub) Tor(quot) Tor(H)`` corrected by
    the change from the standard basis of ``mid`` to the basis assembled from
    the image of ``sub`` and lifts of ``quot``.  Cochain inputs are
    reindexed first.  Returns an :class:`MvResult`; the residual is relative
    to ``|Tor(mid)|`` and exactly zero for exact fields when the identity
    holds.
    """
    if not (sub.cochain == mid.cochain == quot.cochain):
        raise ValueError("mixed chain and cochain inputs")
    if mid.cochain:
        subD, N = sub.as_chain()
        midD, _ = mid.as_chain()
        quotD, _ = quot.as_chain()
        top = mid.top
        def reidx(maps, S, T):
            out = []
            for j in range(N + 1):
                i = N - j
                if i <= top:
                    out.append(maps[i])
                else:
                    out.append(midD.ops.zeros(T.dims[j] if j < len(T.dims) else 0, S.dims[j]))
            return out
        incD = reidx(inc, subD, midD)
        projD = reidx(proj, midD, quotD)
        def rh(Hb):
            return HomologyBasisSet({N - i: v for i, v in Hb.vectors.items()})
        res = _mv_chain(subD, midD, quotD, incD, projD, rh(Hs), rh(Hm), rh(Hq))
        # convert each chain torsion back to the cochain convention
        def flip(C, Hb):
            D, _ = C.as_chain()
            e1 = sign_exponent(C.dims, Hb.dims(C.top))
            e2 = sign_exponent(D.dims, rh(Hb).dims(D.top))
            return -1 if (e1 + e2) % 2 else 1
        fm, fs, fq = flip(mid, Hm), flip(sub, Hs), flip(quot, Hq)
        res.lhs = res.lhs * fm
        res.tor_sub = res.tor_sub * fs
        res.tor_quot = res.tor_quot * fq
        res.rhs = res.rhs * fs * fq * fm * fm
        res.sign = res.sign * fm * fs * fq
        return res
    return _mv_chain(sub, mid, quot, inc, proj, Hs, Hm, Hq)


def _mv_chain(sub, mid, quot, inc, proj, Hs, Hm, Hq):
    _check_exact(sub, mid, quot, inc, proj)
    ops = mid.ops
    field = mid.field
    les = long_exact_sequence(sub, mid, quot, inc, proj, Hs, Hm, Hq)
    t_mid = torsion(mid, Hm).value
    t_sub = torsion(sub, Hs).value
    t_quot = torsion(quot, Hq).value
    t_les = torsion(les).value
    one = 1.0 if field is None else field.one
    compat = one
    for i in range(mid.top + 1):
        n = mid.dims[i]
        if n == 0:
            continue
        cols = []
        if sub.dims[i]:
            cols.extend(ops.cols(inc[i]))
        for e in _unit_columns(range(quot.dims[i]), quot.dims[i], field):
            cols.append(ops.solve(proj[i], e))
        br = ops.det(ops.stack(cols, n))
        compat = compat * br if i % 2 else compat / br
    s = multiplicativity_sign(sub, mid, quot, Hs.dims(mid.top), Hm.dims(mid.top), Hq.dims(mid.top))
    sign = -1 if s else 1
    rhs = t_sub * t_quot * t_les * compat
    rhs = -rhs if s else rhs
    diff = t_mid - rhs
    if field is None:
        residual = float(abs(diff) / abs(t_mid))
    else:
        residual = 0.0 if field.is_zero(diff) else float(abs(_to_float(diff / t_mid)))
    return MvResult(residual, t_mid, rhs, sign, les, t_sub, t_quot, t_les, compat)


def _to_float(x):
    try:
        return float(x)
    except TypeError:
        return float("inf")


def canonicalize_laurent(coeffs, low):
    """Normalise a Laurent polynomial given as coefficients from degree ``low``.

    Strips zero ends, shifts to start at degree zero and makes the lowest
    coefficient positive.  Returns ``(coeffs, shift, sign)``.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    coeffs = coeffs[k:]
    if not coeffs:
        return [], 0, 1
    sign = -1 if coeffs[0] < 0 else 1
    return [sign * c for c in coeffs], low + k, sign

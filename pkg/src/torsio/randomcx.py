"""Random exact-rational complexes and short exact sequences for testing."""

from __future__ import annotations

from . import exact
from .chainlib import BasedComplex, homology_basis
from .exact import QQ


def _rand_matrix(rng, r, c, lo=-3, hi=3):
    return [[QQ.convert(int(rng.integers(lo, hi + 1))) for _ in range(c)] for _ in range(r)]


def random_complex(rng, max_dim=4, max_top=3):
    """Random chain complex over QQ with ``dims <= max_dim``, top degree ``<= max_top``."""
    top = int(rng.integers(1, max_top + 1))
    dims = [int(rng.integers(0, max_dim + 1)) for _ in range(top + 1)]
    maps = []
    prev = None  # d_k, whose kernel bounds d_{k+1}
    for k in range(top):
        r, c = dims[k], dims[k + 1]
        if prev is None:
            M = _rand_matrix(rng, r, c)
            if rng.random() < 0.3:
                M = _low_rank(rng, r, c)
        else:
            K = exact.nullspace(prev, QQ, r) if prev and prev[0] else [
                [QQ.one if a == b else QQ.zero for a in range(r)] for b in range(r)]
            if not K or c == 0:
                M = [[QQ.zero] * c for _ in range(r)]
            else:
                Kmat = exact.from_columns(K, r, QQ)
                R = _rand_matrix(rng, len(K), c)
                if rng.random() < 0.3:
                    R = _low_rank(rng, len(K), c)
                M = exact.matmul(Kmat, R, QQ)
        maps.append(M)
        prev = M
    return BasedComplex(dims, maps, field=QQ)


def _low_rank(rng, r, c):
    if r == 0 or c == 0:
        return [[QQ.zero] * c for _ in range(r)]
    k = int(rng.integers(0, min(r, c) + 1))
    A = _rand_matrix(rng, r, k)
    B = _rand_matrix(rng, k, c)
    return exact.matmul(A, B, QQ) if k else [[QQ.zero] * c for _ in range(r)]


def random_split(rng, C):
    """Pick a random subcomplex of ``C``.

    Returns ``(sub, quot, inc, proj)`` with ``inc[i]`` and ``proj[i]`` the
    degree-``i`` maps.  The sub basis is a random rational basis and the
    quotient basis is the image of a coordinate complement.
    """
    top = C.top
    S = {i: [] for i in range(top + 1)}
    for i in range(top, -1, -1):
        n = C.dims[i]
        k = int(rng.integers(0, n + 1)) if n else 0
        vecs = [[QQ.convert(int(x)) for x in rng.integers(-2, 3, size=n)] for _ in range(k)]
        S[i].extend(vecs)
        if i > 0:
            d = C.out_map(i)
            for v in S[i]:
                if C.dims[i - 1]:
                    S[i - 1].append(exact.matvec(d, v, QQ))
    subb, comp, g, ginv = {}, {}, {}, {}
    for i in range(top + 1):
        n = C.dims[i]
        basis = []
        for v in S[i]:
            trial = basis + [v]
            if exact.rank(exact.from_columns(trial, n, QQ), QQ) == len(trial):
                basis = trial
        cmp_ = []
        for j in range(n):
            e = [QQ.one if a == j else QQ.zero for a in range(n)]
            trial = basis + cmp_ + [e]
            if exact.rank(exact.from_columns(trial, n, QQ), QQ) == len(trial):
                cmp_.append(e)
        subb[i], comp[i] = basis, cmp_
        G = exact.from_columns(basis + cmp_, n, QQ) if n else []
        g[i] = G
        ginv[i] = _inverse(G, n) if n else []
    sdims = [len(subb[i]) for i in range(top + 1)]
    qdims = [len(comp[i]) for i in range(top + 1)]
    smaps, qmaps = [], []
    for k in range(top):
        # d_{k+1} in adapted bases
        n0, n1 = C.dims[k], C.dims[k + 1]
        if n0 and n1:
            Dn = exact.matmul(exact.matmul(ginv[k], C.maps[k], QQ), g[k + 1], QQ)
        else:
            Dn = [[QQ.zero] * n1 for _ in range(n0)]
        a0, a1 = sdims[k], sdims[k + 1]
        smaps.append([row[:a1] for row in Dn[:a0]])
        qmaps.append([row[a1:] for row in Dn[a0:]])
        lower_left = [row[:a1] for row in Dn[a0:]]
        assert exact.is_zero_matrix(lower_left, QQ)
    sub = BasedComplex(sdims, smaps, field=QQ)
    quot = BasedComplex(qdims, qmaps, field=QQ)
    inc = {i: (exact.from_columns(subb[i], C.dims[i], QQ) if subb[i] else [[] for _ in range(C.dims[i])])
           for i in range(top + 1)}
    proj = {i: [list(r) for r in ginv[i][sdims[i]:]] if C.dims[i] else [] for i in range(top + 1)}
    for i in range(top + 1):
        if qdims[i] and not C.dims[i]:
            proj[i] = [[] for _ in range(qdims[i])]
    return sub, quot, inc, proj


def _inverse(G, n):
    aug = [list(G[r]) + [QQ.one if c == r else QQ.zero for c in range(n)] for r in range(n)]
    R, piv = exact.rref(aug, QQ, n)
    return [row[n:] for row in R]


def random_sequence(rng):
    """Random exact-rational short exact sequence with homology bases."""
    C = random_complex(rng)
    sub, quot, inc, proj = random_split(rng, C)
    return sub, C, quot, inc, proj, homology_basis(sub)[0], homology_basis(C)[0], homology_basis(quot)[0]

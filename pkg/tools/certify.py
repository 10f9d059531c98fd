"""Constructive peripheral certificates for diagram presentations.

The torus relator ``mu lambda mu^-1 lambda^-1`` is written as a product of
conjugated vertex relators by walking once around the knot.  If the
presentation omits one vertex relator, that relator is first expressed
through the others by peeling the dual cells of the diagram one at a time
(the dual cells tile the sphere, so all of them but one form a disk whose
boundary is the missing cell).
"""

from __future__ import annotations

from torsio.fgroup import Word


def match_relator(letters, rel: Word):
    """Find ``(u, e)`` with ``Word(letters) == u rel^e u^-1``."""
    target = Word(letters)
    for e in (1, -1):
        R = list((rel if e == 1 else rel.inverse()).letters)
        for k in range(max(len(R), 1)):
            if Word(R[k:] + R[:k]) == target:
                return Word(R[:k]).inverse(), e
    raise ValueError(f"{target} is not a conjugate of {rel}")


def expand(cert):
    out = Word()
    for _, u, rel, e in cert:
        out = out * u * (rel ** e) * u.inverse()
    return out


class CellCertifier:
    def __init__(self, D, gen, relators, cell_index):
        """``cell_index[v]`` is the relator index of vertex ``v`` or ``None`` if dropped."""
        self.D = D
        self.gen = gen
        self.relators = relators
        self.cell_index = cell_index
        faces = D.faces()
        self.face_of = {c: f for f, cs in enumerate(faces) for c in cs}

    def _ends(self, de):
        e, d = de
        v, s = self.D.tail[e]
        right = self.face_of[(v, (s - 1) % self.D.deg(v))]
        left = self.face_of[(v, s)]
        return (right, left) if d > 0 else (left, right)

    def _word(self, des):
        return Word((self.gen(self.D.arc_of[e]), d) for e, d in des)

    def boundary(self, v):
        out = []
        for s, e in enumerate(self.D.V[v]):
            out.append((e, 1 if self.D.outgoing(e, v, s) else -1))
        return out

    def vertex_relator(self, v):
        return Word(self.D.vertex_relator(v, self.gen))

    def relator_for(self, v):
        j = self.cell_index[v]
        return self.relators[j] if j is not None else self.vertex_relator(v)

    def dropped_identity(self, v0):
        """Return factors ``(j, u, rel, e)`` whose product is the relator of ``v0``."""
        cells = [v for v in range(len(self.D.V)) if v != v0]
        bd0 = self.boundary(v0)
        W = [(e, -d) for e, d in reversed(bd0)]
        p0_u, e0 = match_relator([(self.gen(self.D.arc_of[e]), d) for e, d in bd0],
                                 self.vertex_relator(v0))
        # word(bd0) = p0_u rel0^e0 p0_u^-1, and word(W) is its inverse
        factors = []
        gamma = Word()
        remaining = set(cells)
        guard = 0
        while remaining:
            guard += 1
            if guard > 10000:
                raise RuntimeError("peeling did not terminate")
            best = None
            Wset = {e for e, _ in W}
            for v in sorted(remaining):
                bd = self.boundary(v)
                n = len(bd)
                for m in range(n, 0, -1):
                    if best is not None and m <= best[0]:
                        break
                    for k in range(n):
                        S = [bd[(k + i) % n] for i in range(m)]
                        T = [bd[(k + m + i) % n] for i in range(n - m)]
                        if m < len(W) and any(e in Wset for e, _ in T):
                            continue
                        p = _find(W, S)
                        if p is not None:
                            best = (m, v, k, p, S, T)
                            break
                    if best is not None and best[1] == v:
                        break
            if best is None:
                # rotate the base point one step along the walk
                gamma = gamma * self._word(W[:1])
                W = W[1:] + W[:1]
                continue
            m, v, k, p, S, T = best
            alpha = self._word(W[:p])
            L = S + T
            rel = self.relator_for(v)
            u, e = match_relator([(self.gen(self.D.arc_of[x]), d) for x, d in L], rel)
            factors.append((self.cell_index[v], gamma * alpha * u, rel, e))
            W = W[:p] + [(x, -d) for x, d in reversed(T)] + W[p + m:]
            remaining.discard(v)
        if self._word(W) != Word():
            raise RuntimeError("peeling left a nontrivial boundary")
        lhs = p0_u * (self.vertex_relator(v0) ** (-e0)) * p0_u.inverse()
        assert expand(factors) == lhs, "peeling identity failed"
        # rel0^-e0 = p0_u^-1 (prod) p0_u
        conj = [(j, p0_u.inverse() * u, rel, e) for j, u, rel, e in factors]
        if e0 == -1:
            out = conj
        else:
            out = [(j, u, rel, -e) for j, u, rel, e in reversed(conj)]
        assert expand(out) == self.vertex_relator(v0)
        return out

    def peripheral(self, base_arc, meridian: Word, longitude: Word, dropped=None):
        """Certificate for ``meridian longitude meridian^-1 longitude^-1``."""
        lam_bb, steps = self.D.traverse(base_arc, self.gen)
        factors = []
        drop = self.dropped_identity(dropped) if dropped is not None else None
        for v, P in steps:
            if self.cell_index[v] is None:
                factors.extend((j, P * u, rel, e) for j, u, rel, e in drop)
            else:
                u, e = match_relator(list(self.vertex_relator(v).letters), self.relators[self.cell_index[v]])
                factors.append((self.cell_index[v], P * u, self.relators[self.cell_index[v]], e))
        target = meridian * longitude * meridian.inverse() * longitude.inverse()
        got = expand(factors)
        if got != target:
            raise RuntimeError(f"certificate mismatch: {got} vs {target}")
        return [{"relator_index": j, "conjugator_word": u.to_json(), "sign": e}
                for j, u, rel, e in factors]


def _find(W, S):
    m = len(S)
    for p in range(len(W) - m + 1):
        if W[p:p + m] == S:
            return p
    return None

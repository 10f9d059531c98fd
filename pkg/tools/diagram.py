"""Planar knot diagrams with marked points, for generating knot-table data.

A diagram is a list of vertices.  A crossing is a 4-tuple of edge labels in
counter-clockwise order starting at the incoming under-edge (the usual PD
convention).  A marked point is a 2-tuple ``(in, out)`` sitting on the knot.
Every label occurs exactly twice.

Wirtinger generators are the arcs between consecutive under-crossings and
marked points.  The loop of an arc goes down on the strand's right, under
it, and up on its left, so it links the knot positively.  At a crossing with
sign ``e`` the relator is ``x_B^-e x_A x_B^e x_C^-1`` (A incoming under, B
over, C outgoing under); at a marked point it is ``x_A x_C^-1``.
"""

from __future__ import annotations

from collections import defaultdict

from torsio.fgroup import Word


class Diagram:
    def __init__(self, vertices, start=None, base_edge=None):
        self.base_edge = base_edge
        self.V = [tuple(v) for v in vertices]
        occ = defaultdict(list)
        for v, labels in enumerate(self.V):
            if len(labels) not in (2, 4):
                raise ValueError("vertices have 2 or 4 slots")
            for s, e in enumerate(labels):
                occ[e].append((v, s))
        for e, o in occ.items():
            if len(o) != 2:
                raise ValueError(f"edge {e} occurs {len(o)} times")
        self.occ = dict(occ)
        self._orient(start)
        self._arcs()

    def other(self, e, vs):
        a, b = self.occ[e]
        return b if a == vs else a

    def deg(self, v):
        return len(self.V[v])

    # -- orientation -------------------------------------------------------

    def _orient(self, start):
        if start is None:
            v0 = next(v for v in range(len(self.V)) if self.deg(v) == 4)
            start = (v0, 2)
        self.tail = {}
        self.head = {}
        self.order = []  # edges in traversal order
        cur = start
        while True:
            v, s = cur
            e = self.V[v][s]
            if e in self.tail:
                break
            self.tail[e] = cur
            h = self.other(e, cur)
            self.head[e] = h
            self.order.append(e)
            hv, hs = h
            cur = (hv, (hs + 2) % 4 if self.deg(hv) == 4 else (hs + 1) % 2)
        if len(self.tail) != len(self.occ):
            raise ValueError("diagram has more than one component")
        self.sign = {}
        for v, labels in enumerate(self.V):
            if len(labels) == 4:
                if self.head[labels[0]] != (v, 0) or self.tail[labels[2]] != (v, 2):
                    raise ValueError(f"crossing {v} is not in incoming-under form")
                self.sign[v] = 1 if self.head[labels[3]] == (v, 3) else -1

    def writhe(self):
        return sum(self.sign.values())

    def outgoing(self, e, v, s):
        return self.tail[e] == (v, s)

    # -- arcs --------------------------------------------------------------

    def _breaks_after(self, e):
        """True if the strand is cut where edge ``e`` ends."""
        v, s = self.head[e]
        return self.deg(v) == 2 or s == 0

    def _arcs(self):
        # rotate traversal so it starts right after a break
        order = self.order
        k = next(i for i, e in enumerate(order) if self._breaks_after(order[i - 1]))
        order = order[k:] + order[:k]
        self.arc_of = {}
        self.arc_edges = []
        cur = []
        for e in order:
            cur.append(e)
            self.arc_of[e] = len(self.arc_edges)
            if self._breaks_after(e):
                self.arc_edges.append(cur)
                cur = []
        assert not cur
        if self.base_edge is not None:
            k = self.arc_of[self.base_edge]
            self.arc_edges = self.arc_edges[k:] + self.arc_edges[:k]
            self.arc_of = {e: i for i, es in enumerate(self.arc_edges) for e in es}

    @property
    def num_arcs(self):
        return len(self.arc_edges)

    def vertex_relator(self, v, gen=None):
        """Relator at vertex ``v`` as raw letters (not reduced)."""
        gen = gen or (lambda a: a)
        labels = self.V[v]
        if len(labels) == 2:
            a, c = (labels if self.head[labels[0]] == (v, 0) else labels[::-1])
            return [(gen(self.arc_of[a]), 1), (gen(self.arc_of[c]), -1)]
        A = gen(self.arc_of[labels[0]])
        B = gen(self.arc_of[labels[1]])
        C = gen(self.arc_of[labels[2]])
        e = self.sign[v]
        return [(B, -e), (A, 1), (B, e), (C, -1)]

    def cell_word(self, v, gen=None):
        """Counter-clockwise boundary of the dual cell of ``v``, starting before slot 0."""
        gen = gen or (lambda a: a)
        out = []
        for s, e in enumerate(self.V[v]):
            out.append((gen(self.arc_of[e]), 1 if self.outgoing(e, v, s) else -1))
        return out

    # -- faces -------------------------------------------------------------

    def faces(self):
        """Faces as lists of corners ``(v, i)``; corner i sits between slots i and i+1."""
        seen = set()
        out = []
        for v in range(len(self.V)):
            for i in range(self.deg(v)):
                if (v, i) in seen:
                    continue
                face = []
                cur = (v, i)
                while cur not in seen:
                    seen.add(cur)
                    face.append(cur)
                    X, I = cur
                    j = (I + 1) % self.deg(X)
                    cur = self.other(self.V[X][j], (X, j))
                out.append(face)
        return out

    def is_planar(self):
        F = len(self.faces())
        E = len(self.occ)
        return len(self.V) - E + F == 2

    # -- peripheral words -------------------------------------------------

    def longitude(self, base_arc, gen=None):
        """Zero-framed longitude starting at the first edge of ``base_arc``."""
        gen = gen or (lambda a: a)
        w, P = self.traverse(base_arc, gen)
        crossings_writhe = self.writhe()
        return w * Word.gen(gen(base_arc), -crossings_writhe) if crossings_writhe else w

    def traverse(self, base_arc, gen=None):
        """Walk once around the knot from ``base_arc``.

        Returns ``(lambda_bb, steps)`` where ``steps`` lists, for each break
        vertex passed, ``(vertex, P_k)`` with ``P_k`` the product of over-arc
        letters so far (including this vertex).
        """
        gen = gen or (lambda a: a)
        first = self.arc_edges[base_arc][0]
        i0 = self.order.index(first)
        order = self.order[i0:] + self.order[:i0]
        P = Word()
        steps = []
        for e in order:
            if not self._breaks_after(e):
                continue
            v, s = self.head[e]
            if self.deg(v) == 4:
                B = gen(self.arc_of[self.V[v][1]])
                P = P * Word.gen(B, self.sign[v])
            steps.append((v, P))
        return P, steps


def standard_pd(D: Diagram):
    """Crossings only, edges renumbered 0..2n-1 along the orientation.

    Marked points are erased by merging their two edges.
    """
    rename = {}
    k = 0
    for e in D.order:
        rename[e] = k
        v, s = D.head[e]
        if D.deg(v) == 4:
            k += 1
    n = k
    return [tuple(rename[e] % n for e in labels) for labels in D.V if len(labels) == 4]

"""Generate the bundled knot table from PD codes.

Run from the repository root::

    PYTHONPATH=src:tools python tools/gen_knots.py

Needs spherogram (PD codes) and optionally knot_floer_homology (genus check);
neither is a runtime dependency of the package.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from certify import CellCertifier, match_relator
from diagram import Diagram, standard_pd
from torsio import fgroup
from torsio.fgroup import (GroupPresentation, KnotEntry, MutationMove, TangleDecomposition, Word,
                           dumps, mutant_presentation)

DATA = Path(__file__).resolve().parents[1] / "src" / "torsio" / "data"
LABELS = "abcd"


def genus(D):
    try:
        from knot_floer_homology import pd_to_hfk
    except ImportError:
        return None
    return pd_to_hfk(standard_pd(D))["seifert_genus"]


# ---------------------------------------------------------------------------
# plain table entries


def diagram_entry(name, D, description):
    """Knot entry for a plain diagram, dropping its last crossing relator."""
    nv = len(D.V)
    rels = [Word(D.vertex_relator(v)) for v in range(nv - 1)]
    cell = {v: v for v in range(nv - 1)}
    cell[nv - 1] = None
    lon = D.longitude(0)
    cert = CellCertifier(D, lambda a: a, rels, cell).peripheral(0, Word.gen(0), lon, dropped=nv - 1)
    pres = GroupPresentation(D.num_arcs, rels, [f"x{i}" for i in range(D.num_arcs)], name)
    return KnotEntry(name, pres, Word.gen(0), lon, None, cert, {"description": description})


def table_entry(name, pd, base_edge):
    D = Diagram(pd, base_edge=base_edge)
    n = D.num_arcs
    nv = len(D.V)
    rels = [Word(D.vertex_relator(v)) for v in range(nv - 1)]
    cell = {v: v for v in range(nv - 1)}
    cell[nv - 1] = None
    mer = Word.gen(0)
    lon = D.longitude(0)
    cert = CellCertifier(D, lambda a: a, rels, cell).peripheral(0, mer, lon, dropped=nv - 1)
    pres = GroupPresentation(n, rels, [f"x{i}" for i in range(n)], name)
    return KnotEntry(name, pres, mer, lon, None, cert), D


# ---------------------------------------------------------------------------
# cutting along a Conway circle


def cut_data(D, B):
    """Cut edges around the vertex set ``B`` in counter-clockwise order, with signs."""
    B = set(B)
    cut = [e for e, o in D.occ.items() if len({v in B for v, _ in o}) == 2]
    if len(cut) != 4:
        raise ValueError(f"expected four cut edges, got {cut}")
    succ = {}
    for face in D.faces():
        steps = []
        for X, I in face:
            j = (I + 1) % D.deg(X)
            e = D.V[X][j]
            Y, _ = D.other(e, (X, j))
            steps.append((e, X in B, Y in B))
        ins = [e for e, fb, tb in steps if not fb and tb]
        outs = [e for e, fb, tb in steps if fb and not tb]
        if len(ins) > 1 or len(outs) > 1:
            raise ValueError("Conway circle meets a face twice")
        if ins:
            succ[ins[0]] = outs[0]
    order = [cut[0]]
    while len(order) < 4:
        order.append(succ[order[-1]])
    assert succ[order[-1]] == order[0]
    sign = {e: (1 if D.tail[e][0] in B else -1) for e in cut}
    return order, sign


def marked_vertices(D, B, labels, sign, sigma):
    """Insert marked points on the cut edges; B-ends are glued through ``sigma``.

    ``labels`` maps a letter to a cut edge.  The B-side half of edge ``e`` is
    ``(e, 1)``, the other side ``(e, 2)``; the marked point at position P joins
    ``(labels[P], 2)`` with ``(labels[sigma[P]], 1)``.
    """
    B = set(B)
    inv = {e: P for P, e in labels.items()}
    V = []
    for v, tup in enumerate(D.V):
        side = 1 if v in B else 2
        V.append(tuple((e, side) if e in inv else e for e in tup))
    for P in LABELS:
        h2 = (labels[P], 2)
        h1 = (labels[sigma[P]], 1)
        if sign[labels[P]] != sign[labels[sigma[P]]]:
            raise ValueError("gluing reverses orientation")
        V.append((h1, h2) if sign[labels[P]] > 0 else (h2, h1))
    return V


class Split:
    """Pieces, amalgam numbering and certificates for one cut diagram."""

    def __init__(self, pd, B, base_edge, labels_start=None, name=""):
        self.name = name
        self.D0 = Diagram(pd, base_edge=base_edge)
        self.B = set(B)
        order, sign = cut_data(self.D0, self.B)
        if labels_start is not None:
            k = order.index(labels_start)
            order = order[k:] + order[:k]
        self.labels = dict(zip(LABELS, order))
        self.sign = sign
        self.signs = {P: sign[e] for P, e in self.labels.items()}
        self.base_edge = base_edge
        ident = {P: P for P in LABELS}
        self.M = Diagram(marked_vertices(self.D0, self.B, self.labels, sign, ident),
                         base_edge=base_edge)
        self._pieces()

    def region(self, e):
        if isinstance(e, tuple) and e[1] in (1, 2) and e[0] in self.labels.values():
            return e[1]
        v, _ = self.M.occ[e][0]
        return 1 if v in self.B else 2

    def _pieces(self):
        M = self.M
        arcs1 = [a for a in range(M.num_arcs) if self.region(M.arc_edges[a][0]) == 1]
        arcs2 = [a for a in range(M.num_arcs) if self.region(M.arc_edges[a][0]) == 2]
        self.local = {}
        for i, a in enumerate(arcs1):
            self.local[a] = (1, i)
        for i, a in enumerate(arcs2):
            self.local[a] = (2, i)
        self.arcs = {1: arcs1, 2: arcs2}
        self.n1 = len(arcs1)
        self.glob = {a: (i if p == 1 else self.n1 + i) for a, (p, i) in self.local.items()}
        self.crossings = {1: sorted(v for v in self.B if M.deg(v) == 4),
                          2: sorted(v for v in range(len(self.D0.V)) if v not in self.B)}

    def piece_presentation(self, p):
        M = self.M
        loc = lambda a: self.local[a][1]
        rels = [Word(M.vertex_relator(v, loc)) for v in self.crossings[p]]
        names = [f"arc{a}" for a in self.arcs[p]]
        return GroupPresentation(len(self.arcs[p]), rels, names, f"{self.name}.piece{p}")

    def sphere_word(self, p, P):
        e = self.labels[P]
        arc = self.M.arc_of[(e, p)]
        return Word.gen(self.local[arc][1], self.signs[P])

    def arc_meridians(self, p):
        """One arc per strand: the arc entering the piece along that strand."""
        out = []
        for P in LABELS:
            entering = (self.signs[P] < 0) if p == 1 else (self.signs[P] > 0)
            if entering:
                out.append(Word.gen(self.local[self.M.arc_of[(self.labels[P], p)]][1]))
        return out

    def decomposition(self, inclusions=None):
        base_arc = self.M.arc_of[self.base_edge]
        p, i = self.local[base_arc]
        assert p == 2, "base edge must lie outside tangle B"
        gl = lambda a: self.glob[a]
        lon = self.M.longitude(base_arc, gl)
        dec = TangleDecomposition(
            self.piece_presentation(1), self.piece_presentation(2),
            {f"piece{q}": [self.sphere_word(q, P) for P in LABELS] for q in (1, 2)},
            dict(self.signs),
            {f"piece{q}": self.arc_meridians(q) for q in (1, 2)},
            Word.gen(i), lon, inclusions, None, {})
        dec.certificate = self.amalgam_certificate(dec, MutationMove("identity"))
        return dec

    def mutant_marked(self, move):
        sigma = {P: move(P) for P in LABELS}
        return Diagram(marked_vertices(self.D0, self.B, self.labels, self.sign, sigma),
                       base_edge=self.base_edge)

    def amalgam_certificate(self, dec, move, Mm=None):
        """Certificate for the amalgam presentation of ``move`` (identity or Rz)."""
        Mm = Mm or (self.M if move.is_identity else self.mutant_marked(move))
        pres = mutant_presentation(dec, move)
        # arcs of Mm: every arc of the marked diagram lies in one piece and
        # has the same edges as in the unmutated marked diagram
        arcmap = {}
        for a, es in enumerate(Mm.arc_edges):
            arcmap[a] = self.glob[self.M.arc_of[es[0]]]
        gen = lambda a: arcmap[a]
        cell = {}
        r1 = len(self.crossings[1])
        for v in range(len(Mm.V)):
            if Mm.deg(v) == 4:
                if v in self.B:
                    cell[v] = self.crossings[1].index(v)
                else:
                    cell[v] = r1 + self.crossings[2].index(v)
        nr = len(pres.relators)
        nmarked = len(Mm.V) - 4
        dropped = None
        for k, P in enumerate(LABELS):
            v = nmarked + k  # marked point at position P
            if P == "d":
                cell[v] = None
                dropped = v
            else:
                cell[v] = nr - 3 + k
                # sanity: relator matches the marked-point relator up to conjugacy
                match_relator(Mm.vertex_relator(v, gen), pres.relators[cell[v]])
        base_arc = Mm.arc_of[self.base_edge]
        lon = Mm.longitude(base_arc, gen)
        mer = Word.gen(gen(base_arc))
        certifier = CellCertifier(Mm, gen, pres.relators, cell)
        self._last_longitude = lon
        return certifier.peripheral(base_arc, mer, lon, dropped=dropped)

    def erased(self, Mm):
        """Plain diagram of ``Mm`` with marked points removed, plus arc map to the amalgam."""
        merge = {}
        for v in range(len(Mm.V)):
            if Mm.deg(v) == 2:
                a, c = Mm.V[v] if Mm.head[Mm.V[v][0]] == (v, 0) else Mm.V[v][::-1]
                merge[c] = a
        def root(e):
            while e in merge:
                e = merge[e]
            return e
        V = [tuple(root(e) for e in tup) for tup in Mm.V if len(tup) == 4]
        E = Diagram(V, base_edge=root(self.base_edge))
        arcmap = {}
        for a, es in enumerate(Mm.arc_edges):
            arcmap[a] = self.glob[self.M.arc_of[es[0]]]
        target = []
        for a, es in enumerate(E.arc_edges):
            target.append(arcmap[Mm.arc_of[es[0]]])
        return E, target


def inclusion_words(split, table_D, origin):
    """Words in the table generators for every piece generator.

    ``origin(label)`` gives the table edge a marked-diagram edge came from, or
    ``None`` for edges created by diagram moves; those arcs are solved from
    crossing relators.
    """
    M = split.M
    known = {}
    for a, es in enumerate(M.arc_edges):
        for e in es:
            base = e[0] if isinstance(e, tuple) and e[1] in (1, 2) and e[0] in split.labels.values() else e
            o = origin(base)
            if o is not None:
                w = Word.gen(table_D.arc_of[o])
                if a in known and known[a] != w:
                    raise AssertionError("inconsistent origin")
                known[a] = w
    changed = True
    while changed and len(known) < M.num_arcs:
        changed = False
        for v in range(len(M.V)):
            tup = M.V[v]
            if len(tup) == 2:
                a, c = (M.arc_of[x] for x in (tup if M.head[tup[0]] == (v, 0) else tup[::-1]))
                if a in known and c not in known:
                    known[c] = known[a]; changed = True
                elif c in known and a not in known:
                    known[a] = known[c]; changed = True
                continue
            A, Bo, C = (M.arc_of[tup[i]] for i in (0, 1, 2))
            e = M.sign[v]
            if Bo not in known:
                continue
            xb = known[Bo]
            if A in known and C not in known:
                known[C] = (xb ** -e) * known[A] * (xb ** e); changed = True
            elif C in known and A not in known:
                known[A] = (xb ** e) * known[C] * (xb ** -e); changed = True
    if len(known) < M.num_arcs:
        raise AssertionError("could not express every arc")
    return {f"piece{p}": [known[a] for a in split.arcs[p]] for p in (1, 2)}


def write(name, obj):
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / name).write_text(dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# concrete knots

KT_PD = [(2, 0, 3, 21), (0, 6, 1, 5), (6, 2, 7, 1), (10, 3, 11, 4), (4, 11, 5, 12), (7, 16, 8, 17),
         (13, 8, 14, 9), (9, 19, 10, 18), (17, 13, 18, 12), (19, 14, 20, 15), (15, 20, 16, 21)]
TREFOIL_PD = [(2, 0, 3, 5), (0, 4, 1, 3), (4, 2, 5, 1)]
FIGURE8_PD = [(2, 0, 3, 7), (0, 5, 1, 6), (4, 1, 5, 2), (6, 4, 7, 3)]


def kt_modified():
    """KT with strand 12 pushed over strand 10 across the Conway circle.

    In the standard diagram the like-signed punctures of the tangle are
    adjacent, so the sign-preserving half-turn is a flip.  After this
    Reidemeister II move the new cut edges alternate in sign and the
    sign-preserving move is the in-plane half-turn.
    """
    V = [list(c) for c in KT_PD]
    V[7][2] = "10a"
    V[3][0] = "10c"
    V[4][3] = "12a"
    V[8][3] = "12c"
    V.append(("10a", "12b", "10b", "12c"))  # joins tangle B
    V.append(("10b", "12b", "10c", "12a"))  # joins the outside
    B = [5, 6, 7, 8, 9, 10, 11]
    return [tuple(v) for v in V], B


def kt_origin(label):
    if isinstance(label, int):
        return label
    if label in ("10a", "10c"):
        return 10
    if label in ("12a", "12b", "12c"):
        return 12
    return None


def pair_document(name, source, target, split, dec, move, target_entry, target_map):
    Mm = split.mutant_marked(move)
    cert = split.amalgam_certificate(dec, move, Mm)
    return {
        "name": name,
        "source": source,
        "target": target,
        "move": move.name,
        "mutant_longitude": split._last_longitude.to_json(),
        "mutant_certificate": cert,
        "target_map": target_map,
    }


def build_kt():
    kt, ktD = table_entry("K11n42", KT_PD, base_edge=0)
    kt.extras = {"description": "Kinoshita-Terasaka knot 11n42, 11-crossing Wirtinger presentation"}
    V, B = kt_modified()
    split = Split(V, B, base_edge=0, labels_start=21, name="KT")
    assert genus(split.D0) in (None, 2)
    inc = inclusion_words(split, ktD, kt_origin)
    dec = split.decomposition(inc)
    assert fgroup.positive_move(dec).name == "Rz"
    kt.decomposition = dec
    # Conway knot: the mutant diagram with marked points erased
    move = MutationMove("Rz")
    Mm = split.mutant_marked(move)
    E, target_map = split.erased(Mm)
    g = genus(E)
    if g is not None and g != 3:
        raise AssertionError(f"mutant genus {g}, expected 3")
    conway = diagram_entry("K11n34", E,
                           "Conway knot 11n34, 13-crossing diagram obtained from the KT tangle decomposition")
    pair = pair_document("kt_conway", "kinoshita_terasaka.json", "conway.json", split, dec, move, conway, target_map)
    return kt, conway, pair


def main():
    trefoil, _ = table_entry("3_1", TREFOIL_PD, base_edge=0)
    trefoil.extras = {"description": "trefoil"}
    fig8, _ = table_entry("4_1", FIGURE8_PD, base_edge=0)
    fig8.extras = {"description": "figure-eight knot"}
    kt, conway, pair = build_kt()
    write("trefoil.json", trefoil.to_json())
    write("figure_eight.json", fig8.to_json())
    write("kinoshita_terasaka.json", kt.to_json())
    write("conway.json", conway.to_json())
    write("kt_conway_pair.json", pair)
    import pretzel
    pz, pz_mutant, pz_pair = pretzel.build()
    write("pretzel.json", pz.to_json())
    write("pretzel_mutant.json", pz_mutant.to_json())
    write("pretzel_self_pair.json", pz_pair)
    print("wrote", sorted(p.name for p in DATA.glob("*.json")))


if __name__ == "__main__":
    sys.exit(main())

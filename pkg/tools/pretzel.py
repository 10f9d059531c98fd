"""Pretzel knot P(-2,3,7) cut around its two-crossing twist column.

The column is a rational tangle, so the half-turn mutant is the same knot.
The PD code is spherogram's numerator closure of the tangle sum
``RationalTangle(1,-2) + RationalTangle(1,3) + RationalTangle(1,7)``;
crossings 0 and 1 form the first column.
"""

from __future__ import annotations

from gen_knots import Split, diagram_entry, genus, inclusion_words, pair_document, table_entry
from torsio import fgroup
from torsio.fgroup import MutationMove

PRETZEL_PD = [(22, 11, 23, 12), (10, 23, 11, 0), (7, 12, 8, 13), (13, 8, 14, 9), (9, 14, 10, 15),
              (21, 6, 22, 7), (5, 20, 6, 21), (19, 4, 20, 5), (3, 18, 4, 19), (17, 2, 18, 3),
              (1, 16, 2, 17), (15, 0, 16, 1)]
COLUMN = [0, 1]
BASE_EDGE = 3


def build():
    """Return ``(entry, mutant_entry, pair)`` for the self-mutation fixture."""
    entry, D = table_entry("P(-2,3,7)", PRETZEL_PD, base_edge=BASE_EDGE)
    entry.extras = {"description": "pretzel knot P(-2,3,7), 12-crossing diagram"}
    assert genus(D) in (None, 5)
    split = Split(PRETZEL_PD, COLUMN, base_edge=BASE_EDGE, name="P")
    inc = inclusion_words(split, D, lambda label: label if isinstance(label, int) else None)
    dec = split.decomposition(inc)
    assert fgroup.positive_move(dec).name == "Rz"
    entry.decomposition = dec
    move = MutationMove("Rz")
    E, target_map = split.erased(split.mutant_marked(move))
    assert genus(E) in (None, 5)
    mutant = diagram_entry("P(-2,3,7)^tau", E,
                           "half-turn mutant of P(-2,3,7) along its twist column; the same knot")
    pair = pair_document("pretzel_self", "pretzel.json", "pretzel_mutant.json",
                         split, dec, move, mutant, target_map)
    return entry, mutant, pair

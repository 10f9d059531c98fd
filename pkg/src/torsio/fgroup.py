"""Free-group words, presentations, Fox calculus and mutation data.

Words are tuples of ``(generator, exponent)`` letters with exponent ``+1`` or
``-1`` and are kept freely reduced.  Products read left to right, so the
word ``xy`` means "first x, then y" as a loop.

Mutation spheres carry four boundary loops ``a, b, c, d`` (in counter-clockwise
order, ``abcd = 1``).  The three half-turns permute them:

    Rz: a<->c, b<->d    Rx: a<->d, b<->c    Ry: a<->b, c<->d

and induce automorphisms of the free group ``<a, b, c>`` (with
``d = (abc)^-1``) listed in :data:`SPHERE_AUTOMORPHISMS`.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence


class MalformedInput(ValueError):
    """Input data violates the documented format."""


class MalformedDecomposition(MalformedInput):
    """Tangle decomposition data is inconsistent."""


class NotAMutation(ValueError):
    """The identity move was supplied where a genuine rotation is required."""


# ---------------------------------------------------------------------------
# words


class Word:
    """A freely reduced word in a free group."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable = ()):
        out = []
        for g, e in letters:
            g, e = int(g), int(e)
            if g < 0 or e not in (1, -1):
                raise MalformedInput(f"bad letter ({g}, {e})")
            if out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((g, e))
        self.letters = tuple(out)

    @classmethod
    def gen(cls, g: int, e: int = 1) -> "Word":
        return cls(((g, 1 if e > 0 else -1),) * abs(e))

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    @classmethod
    def from_json(cls, data) -> "Word":
        try:
            return cls((g, e) for g, e in data)
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"bad word {data!r}") from exc

    def to_json(self):
        return [[g, e] for g, e in self.letters]

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.letters))

    def conjugate(self, u: "Word") -> "Word":
        """Return ``u w u^-1``."""
        return u * self * u.inverse()

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({self.to_json()})"

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def exponent_sum(self, g: int) -> int:
        return sum(e for h, e in self.letters if h == g)

    def substitute(self, images: Sequence["Word"]) -> "Word":
        """Apply the homomorphism sending generator ``g`` to ``images[g]``."""
        out = []
        for g, e in self.letters:
            w = images[g] if e > 0 else images[g].inverse()
            out.extend(w.letters)
        return Word(out)

    def shift(self, offset: int) -> "Word":
        return Word((g + offset, e) for g, e in self.letters)

    def evaluate(self, images, mul: Callable, inv: Callable, one):
        """Evaluate in any group given generator images."""
        acc = one
        for g, e in self.letters:
            acc = mul(acc, images[g] if e > 0 else inv(images[g]))
        return acc

    def pretty(self, names: Sequence[str] | None = None) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            n = names[g] if names else f"x{g}"
            parts.append(n if e > 0 else n + "^-1")
        return " ".join(parts)


class GroupRingElement:
    """Finite integer combination of words."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for w, c in (terms or {}).items():
            if c:
                self.terms[w] = c

    def __add__(self, other):
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, 0) + c
        return GroupRingElement(t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k):
        return GroupRingElement({w: k * c for w, c in self.terms.items()})

    def left_multiply(self, u: Word):
        t = defaultdict(int)
        for w, c in self.terms.items():
            t[u * w] += c
        return GroupRingElement(t)

    def __eq__(self, other):
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __repr__(self):
        return "GroupRingElement(" + ", ".join(f"{c}*{w.to_json()}" for w, c in self.terms.items()) + ")"

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def evaluate(self, fn: Callable[[Word], object], zero):
        acc = zero
        for w, c in self.terms.items():
            acc = acc + c * fn(w)
        return acc


def fox_derivative(w: Word, g: int) -> GroupRingElement:
    """Left Fox derivative of ``w`` with respect to generator ``g``."""
    terms = defaultdict(int)
    prefix = []
    for h, e in w.letters:
        if e > 0:
            if h == g:
                terms[Word(prefix)] += 1
            prefix.append((h, e))
        else:
            prefix.append((h, e))
            if h == g:
                terms[Word(prefix)] -= 1
    return GroupRingElement(terms)


def fox_jacobian_blocks(w: Word, images, inv_images, n: int, mul, add, zero_block, one):
    """Evaluate all Fox derivatives of ``w`` through a representation.

    ``images[g]`` and ``inv_images[g]`` are the matrices of ``g`` and
    ``g^-1``.  Returns a list of ``n`` blocks ``sum sign * M(prefix)`` computed
    in a single pass along the word.
    """
    blocks = [zero_block() for _ in range(n)]
    P = one
    for h, e in w.letters:
        if e > 0:
            blocks[h] = add(blocks[h], P)
            P = mul(P, images[h])
        else:
            P = mul(P, inv_images[h])
            blocks[h] = add(blocks[h], -P)
    return blocks


# ---------------------------------------------------------------------------
# presentations


@dataclass
class PresentationComplex:
    """Cell data of the 2-complex of a presentation."""

    ranks: tuple
    attaching_words: list


class GroupPresentation:
    """Finite presentation ``<x_0..x_{n-1} | r_1..r_m>``."""

    def __init__(self, num_generators: int, relators: Sequence[Word] = (),
                 generator_names: Sequence[str] | None = None, name: str = ""):
        if num_generators < 1:
            raise MalformedInput("need at least one generator")
        self.num_generators = int(num_generators)
        self.relators = [r if isinstance(r, Word) else Word.from_json(r) for r in relators]
        for k, r in enumerate(self.relators):
            if r.max_generator() >= self.num_generators:
                raise MalformedInput(f"relator {k} uses an unknown generator")
        if generator_names is None:
            generator_names = [f"x{i}" for i in range(self.num_generators)]
        if len(generator_names) != self.num_generators:
            raise MalformedInput("generator_names has the wrong length")
        self.generator_names = list(generator_names)
        self.name = name

    def __repr__(self):
        return f"GroupPresentation({self.name or '?'}: {self.num_generators} generators, {len(self.relators)} relators)"

    @property
    def deficiency(self) -> int:
        return self.num_generators - len(self.relators)

    def generator(self, i: int) -> Word:
        return Word.gen(i)

    def abelianization_exponents(self, w: Word):
        return [w.exponent_sum(g) for g in range(self.num_generators)]

    def tietze_add(self, w: Word) -> "GroupPresentation":
        """Add a generator ``g`` together with the relator ``g w^-1``."""
        g = self.num_generators
        rels = list(self.relators) + [Word.gen(g) * w.inverse()]
        return GroupPresentation(g + 1, rels, self.generator_names + [f"x{g}"],
                                 self.name + "+tietze")

    def to_json(self):
        return {"generators": list(self.generator_names),
                "relators": [r.to_json() for r in self.relators]}

    @classmethod
    def from_json(cls, data, name=""):
        try:
            gens = data["generators"]
            rels = [Word.from_json(r) for r in data["relators"]]
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad presentation: {exc}") from exc
        return cls(len(gens), rels, gens, name)


def null_homologous(p: GroupPresentation, w: Word) -> bool:
    """Whether ``w`` dies in the rational abelianization of ``p``."""
    from . import exact
    rows = [p.abelianization_exponents(r) for r in p.relators]
    v = p.abelianization_exponents(w)
    if not any(v):
        return True
    if not rows:
        return False
    F = exact.QQ
    return exact.rank(rows, F) == exact.rank(rows + [v], F)


def presentation_complex(p: GroupPresentation) -> PresentationComplex:
    """One 0-cell, a 1-cell per generator, a 2-cell per relator."""
    return PresentationComplex((1, p.num_generators, len(p.relators)), list(p.relators))


def free_group(n: int, names=None, name="free") -> GroupPresentation:
    return GroupPresentation(n, [], names, name)


def sphere_group() -> GroupPresentation:
    """Free group on ``a, b, c``; ``d`` is ``(abc)^-1``."""
    return free_group(3, ["a", "b", "c"], "F")


# ---------------------------------------------------------------------------
# mutations

SPHERE_LABELS = ("a", "b", "c", "d")

_a, _b, _c = Word.gen(0), Word.gen(1), Word.gen(2)
_d = (_a * _b * _c).inverse()
SPHERE_WORDS = {"a": _a, "b": _b, "c": _c, "d": _d}

ROTATIONS = {
    "identity": {"a": "a", "b": "b", "c": "c", "d": "d"},
    "Rz": {"a": "c", "b": "d", "c": "a", "d": "b"},
    "Rx": {"a": "d", "b": "c", "c": "b", "d": "a"},
    "Ry": {"a": "b", "b": "a", "c": "d", "d": "c"},
}


def _w(s):
    out = Word()
    for ch in s.split():
        inv = ch.endswith("'")
        out = out * (SPHERE_WORDS[ch.rstrip("'")] ** (-1 if inv else 1))
    return out


# Images of a, b, c (as words in a, b, c) under the induced automorphisms.
# The half-turn in the diagram plane permutes the loops; the two flips move
# the base point through the sphere and conjugate some loops.
SPHERE_AUTOMORPHISMS = {
    "identity": (_w("a"), _w("b"), _w("c")),
    "Rz": (_w("c"), _w("d"), _w("a")),
    "Ry": (_w("b"), _w("a"), _w("b c d c' b'")),
    "Rx": (_w("d"), _w("c"), _w("d a b a' d'")),
}


@dataclass(frozen=True)
class MutationMove:
    """One of the three half-turns of the mutation sphere, or the identity."""

    name: str

    def __post_init__(self):
        if self.name not in ROTATIONS:
            raise MalformedInput(f"unknown move {self.name!r}")

    @classmethod
    def rotations(cls):
        return [cls("Rx"), cls("Ry"), cls("Rz")]

    @property
    def permutation(self):
        return dict(ROTATIONS[self.name])

    @property
    def is_identity(self):
        return self.name == "identity"

    def __call__(self, label: str) -> str:
        return ROTATIONS[self.name][label]

    def induced(self):
        """Images of a, b, c in the free group ``<a, b, c>``."""
        return SPHERE_AUTOMORPHISMS[self.name]

    def apply(self, w: Word) -> Word:
        return w.substitute(self.induced())

    def compose(self, other: "MutationMove") -> "MutationMove":
        perm = {k: self(other(k)) for k in SPHERE_LABELS}
        for name, p in ROTATIONS.items():
            if p == perm:
                return MutationMove(name)
        raise AssertionError("rotation group not closed")


@dataclass
class TangleDecomposition:
    """Splitting of a knot group along a mutation sphere."""

    piece1: GroupPresentation
    piece2: GroupPresentation
    sphere_words: dict          # {"piece1": [a, b, c, d], "piece2": [...]}
    signs: dict                 # {"a": +1, ...}
    arc_meridians: dict         # {"piece1": [...], "piece2": [...]}
    meridian: Word              # in piece2 generators
    longitude: Word             # in amalgam generators
    inclusions: dict | None = None
    certificate: list | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in ("piece1", "piece2"):
            ws = self.sphere_words.get(key)
            if ws is None or len(ws) != 4:
                raise MalformedDecomposition(f"{key} needs four sphere words")
            p = getattr(self, key)
            for w in ws:
                if w.max_generator() >= p.num_generators:
                    raise MalformedDecomposition(f"{key} sphere word uses an unknown generator")
            prod = ws[0] * ws[1] * ws[2] * ws[3]
            if not null_homologous(p, prod):
                raise MalformedDecomposition(f"abcd is not null-homologous in {key}")
        vals = [self.signs.get(k) for k in SPHERE_LABELS]
        if sorted(vals) != [-1, -1, 1, 1]:
            raise MalformedDecomposition("signs must be two +1 and two -1")

    @property
    def offset(self) -> int:
        """Index of the first piece2 generator in amalgam numbering."""
        return self.piece1.num_generators

    def piece_sphere_word(self, piece: int, label: str) -> Word:
        w = self.sphere_words[f"piece{piece}"][SPHERE_LABELS.index(label)]
        return w if piece == 1 else w.shift(self.offset)

    def restriction_words(self, piece: int):
        """Words for the free generators a, b, c inside ``piece`` (own numbering)."""
        return list(self.sphere_words[f"piece{piece}"][:3])

    def to_json(self):
        d = {
            "piece1": self.piece1.to_json(),
            "piece2": self.piece2.to_json(),
            "sphere_words": {k: [w.to_json() for w in v] for k, v in self.sphere_words.items()},
            "signs": dict(self.signs),
            "arc_meridians": {k: [w.to_json() for w in v] for k, v in self.arc_meridians.items()},
            "meridian": self.meridian.to_json(),
            "longitude": self.longitude.to_json(),
        }
        if self.inclusions is not None:
            d["inclusions"] = {k: [w.to_json() for w in v] for k, v in self.inclusions.items()}
        if self.certificate is not None:
            d["certificate"] = self.certificate
        d.update(self.extras)
        return d

    @classmethod
    def from_json(cls, data):
        known = {"piece1", "piece2", "sphere_words", "signs", "arc_meridians", "meridian",
                 "longitude", "inclusions", "certificate"}
        try:
            words = lambda m: {k: [Word.from_json(w) for w in v] for k, v in m.items()}
            return cls(
                piece1=GroupPresentation.from_json(data["piece1"], "piece1"),
                piece2=GroupPresentation.from_json(data["piece2"], "piece2"),
                sphere_words=words(data["sphere_words"]),
                signs={k: int(v) for k, v in data["signs"].items()},
                arc_meridians=words(data["arc_meridians"]),
                meridian=Word.from_json(data["meridian"]),
                longitude=Word.from_json(data["longitude"]),
                inclusions=words(data["inclusions"]) if "inclusions" in data else None,
                certificate=data.get("certificate"),
                extras={k: v for k, v in data.items() if k not in known},
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedDecomposition(f"bad tangle decomposition: {exc}") from exc


def classify_mutation(d: TangleDecomposition, m: MutationMove) -> str:
    """``"Positive"`` if the move preserves the puncture signs, else ``"Negative"``."""
    if m.is_identity:
        raise NotAMutation("the identity move is not a mutation")
    return "Positive" if all(d.signs[g] == d.signs[m(g)] for g in SPHERE_LABELS) else "Negative"


def positive_move(d: TangleDecomposition) -> MutationMove:
    pos = [m for m in MutationMove.rotations() if classify_mutation(d, m) == "Positive"]
    if len(pos) != 1:
        raise MalformedDecomposition(f"expected exactly one positive rotation, found {len(pos)}")
    return pos[0]


def amalgam_gluing_words(d: TangleDecomposition, m: MutationMove):
    """For gamma = a, b, c: (piece1 word of tau(gamma), piece2 word of gamma), amalgam numbering."""
    p1 = [d.piece_sphere_word(1, g) for g in SPHERE_LABELS]
    p2 = [d.piece_sphere_word(2, g) for g in SPHERE_LABELS]
    if m.name in ("identity", "Rz"):
        # a relabelling of the punctures: use the piece1 word of the image directly
        return [(p1[SPHERE_LABELS.index(m(g))], p2[k]) for k, g in enumerate(SPHERE_LABELS[:3])]
    sub1 = p1[:3]
    out = []
    for k, img in enumerate(m.induced()):
        out.append((img.substitute(sub1), p2[k]))
    return out


def mutant_presentation(d: TangleDecomposition, m: MutationMove) -> GroupPresentation:
    """Amalgamated presentation of the group of the mutant along ``m``.

    Generators are those of piece1 followed by those of piece2.  Relators are
    piece1's, piece2's, then ``w1(tau(gamma)) w2(gamma)^-1`` for gamma = a, b, c.
    """
    off = d.offset
    rels = list(d.piece1.relators) + [r.shift(off) for r in d.piece2.relators]
    for w1, w2 in amalgam_gluing_words(d, m):
        rels.append(w1 * w2.inverse())
    names = [f"p1.{n}" for n in d.piece1.generator_names] + [f"p2.{n}" for n in d.piece2.generator_names]
    return GroupPresentation(off + d.piece2.num_generators, rels, names,
                             f"amalgam[{m.name}]")


def mutate_decomposition(d: TangleDecomposition, m: MutationMove) -> TangleDecomposition:
    """Decomposition of the mutant: piece1 sphere words are precomposed with the move.

    Only defined for the in-plane half-turn, whose induced map is a relabelling;
    applying it twice returns the original data exactly.
    """
    if m.name not in ("identity", "Rz"):
        raise MalformedDecomposition("only the in-plane half-turn acts by relabelling")
    ws = d.sphere_words["piece1"]
    new1 = [ws[SPHERE_LABELS.index(m(g))] for g in SPHERE_LABELS]
    return TangleDecomposition(
        d.piece1, d.piece2, {"piece1": new1, "piece2": list(d.sphere_words["piece2"])},
        {g: d.signs[g] for g in SPHERE_LABELS}, d.arc_meridians, d.meridian, d.longitude,
        None, None, {})


def abelianized_fox_matrix(p: GroupPresentation, t=1):
    """Fox matrix with every generator sent to ``t`` (rows: relators)."""
    rows = []
    for r in p.relators:
        row = []
        for g in range(p.num_generators):
            D = fox_derivative(r, g)
            row.append(sum(c * t ** sum(e for _, e in w.letters) for w, c in D.terms.items()))
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# knot table


@dataclass
class KnotEntry:
    """One knot-table document."""

    name: str
    presentation: GroupPresentation
    meridian: Word
    longitude: Word
    decomposition: TangleDecomposition | None = None
    certificate: list | None = None
    extras: dict = field(default_factory=dict)
    key_order: list = field(default_factory=list)

    @property
    def peripheral(self):
        return PeripheralPair(self.meridian, self.longitude)

    def to_json(self):
        d = {"name": self.name}
        d.update(self.presentation.to_json())
        d["meridian"] = self.meridian.to_json()
        d["longitude"] = self.longitude.to_json()
        if self.certificate is not None:
            d["certificate"] = self.certificate
        if self.decomposition is not None:
            d["tangle_decomposition"] = self.decomposition.to_json()
        d.update(self.extras)
        if self.key_order:
            d = {k: d[k] for k in self.key_order if k in d} | {k: v for k, v in d.items() if k not in self.key_order}
        return d


@dataclass(frozen=True)
class PeripheralPair:
    meridian_word: Word
    longitude_word: Word
    linking_meridian: int = 1
    intersection_meridian_longitude: int = 1


def load_knot(text: str) -> KnotEntry:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInput("knot document must be an object")
    known = {"name", "generators", "relators", "meridian", "longitude", "certificate",
             "tangle_decomposition"}
    try:
        name = data["name"]
        pres = GroupPresentation.from_json(data, name)
        mer = Word.from_json(data["meridian"])
        lon = Word.from_json(data["longitude"])
    except KeyError as exc:
        raise MalformedInput(f"missing field {exc}") from exc
    for w in (mer, lon):
        if w.max_generator() >= pres.num_generators:
            raise MalformedInput("peripheral word uses an unknown generator")
    dec = data.get("tangle_decomposition")
    return KnotEntry(
        name, pres, mer, lon,
        TangleDecomposition.from_json(dec) if dec is not None else None,
        data.get("certificate"),
        {k: v for k, v in data.items() if k not in known},
        list(data.keys()),
    )


def dump_knot(entry: KnotEntry) -> str:
    """Canonical file text; bundled table files are exactly this."""
    return dumps(entry.to_json()) + "\n"


def dumps(obj, indent=0) -> str:
    """Deterministic JSON: words and other short integer lists stay on one line."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if _is_flat(obj):
            return json.dumps(obj, separators=(", ", ": "))
        if not obj:
            return "[]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def _is_flat(obj):
    """Lists of scalars or of short scalar pairs print on one line."""
    if all(not isinstance(v, (list, dict)) for v in obj):
        return True
    return all(isinstance(v, list) and len(v) == 2 and all(not isinstance(x, (list, dict)) for x in v)
               for v in obj)

import json

import pytest

from torsio import data_path, exact, resolve_path
from torsio.fgroup import (GroupPresentation, MalformedDecomposition, MalformedInput,
                           MutationMove, NotAMutation, TangleDecomposition, Word,
                           abelianized_fox_matrix, classify_mutation, dump_knot, fox_derivative,
                           free_group, load_knot, mutant_presentation, mutate_decomposition,
                           positive_move, presentation_complex)
from torsio.twisted import abelianization

from conftest import knot

TABLE = ["trefoil", "figure_eight", "kinoshita_terasaka", "conway", "pretzel", "pretzel_mutant"]
DECOMPOSED = ["kinoshita_terasaka", "pretzel"]

x, y = Word.gen(0), Word.gen(1)


def ring(*pairs):
    from torsio.fgroup import GroupRingElement
    return GroupRingElement({w: c for w, c in pairs})


def random_word(rng, n, length):
    return Word([(int(rng.integers(n)), int(rng.choice([-1, 1]))) for _ in range(length)])


# --- words and Fox calculus -------------------------------------------------


def test_words_are_freely_reduced():
    w = Word([(0, 1), (1, 1), (1, -1), (0, -1), (2, 1)])
    assert w.letters == ((2, 1),)
    assert (x * y * y.inverse()) == x


def test_bad_letters_are_rejected():
    with pytest.raises(MalformedInput):
        Word([(0, 2)])


def test_fox_base_cases():
    assert fox_derivative(x, 0) == ring((Word(), 1))
    assert fox_derivative(x * y, 1) == ring((x, 1))
    assert fox_derivative(x.inverse(), 0) == ring((x.inverse(), -1))


def test_fox_product_rule(rng):
    for _ in range(1000):
        u, v = random_word(rng, 3, 6), random_word(rng, 3, 6)
        g = int(rng.integers(3))
        lhs = fox_derivative(u * v, g)
        rhs = fox_derivative(u, g) + fox_derivative(v, g).left_multiply(u)
        assert lhs == rhs


def test_fox_fundamental_formula(rng):
    # w - 1 = sum_g (dw/dg)(g - 1) in the group ring
    from torsio.fgroup import GroupRingElement
    for _ in range(100):
        w = random_word(rng, 3, 8)
        total = ring((w, 1)) - ring((Word(), 1))
        acc = ring()
        for g in range(3):
            D = fox_derivative(w, g)
            acc = acc + GroupRingElement({u * Word.gen(g): c for u, c in D.terms.items()}) - D
        assert acc == total


# --- presentations ----------------------------------------------------------


def test_presentation_complex_ranks(trefoil):
    assert presentation_complex(trefoil.presentation).ranks == (1, 3, 2)
    assert presentation_complex(free_group(3)).ranks == (1, 3, 0)
    assert presentation_complex(knot("kinoshita_terasaka").presentation).ranks == (1, 11, 10)


def test_two_generator_trefoil():
    p = GroupPresentation(2, [x * y * x * y.inverse() * x.inverse() * y.inverse()])
    C = presentation_complex(p)
    assert C.ranks == (1, 2, 1)
    assert C.attaching_words[0] == p.relators[0]


def test_unknown_generator_rejected():
    with pytest.raises(MalformedInput):
        GroupPresentation(1, [y])


@pytest.mark.parametrize("name", TABLE)
def test_abelianized_fox_matrix_rank(name):
    p = knot(name).presentation
    M = abelianized_fox_matrix(p, 1)
    assert exact.rank([[exact.QQ.convert(v) for v in row] for row in M], exact.QQ) == \
        p.num_generators - 1
    assert all(sum(row) == 0 for row in M)


@pytest.mark.parametrize("name", TABLE)
def test_table_round_trip_is_bit_exact(name):
    text = resolve_path(name).read_text()
    assert dump_knot(load_knot(text)) == text


@pytest.mark.parametrize("name", ["kt_conway_pair", "pretzel_self_pair"])
def test_pair_documents_parse(name):
    data = json.loads(data_path(f"{name}.json").read_text())
    assert set(data) >= {"source", "target", "move", "target_map"}


def test_malformed_knot_documents():
    with pytest.raises(MalformedInput):
        load_knot("{not json")
    with pytest.raises(MalformedInput):
        load_knot(json.dumps({"name": "x", "generators": ["a"], "relators": []}))
    with pytest.raises(MalformedInput):
        load_knot(json.dumps({"name": "x", "generators": ["a"], "relators": [],
                              "meridian": [[3, 1]], "longitude": []}))


# --- mutation ---------------------------------------------------------------


def test_moves_are_involutions():
    for m in MutationMove.rotations():
        assert m.compose(m).is_identity
        assert all(m(m(g)) == g for g in "abcd")
    with pytest.raises(MalformedInput):
        MutationMove("Rw")


@pytest.mark.parametrize("name", DECOMPOSED)
def test_exactly_one_positive_rotation(name):
    d = knot(name).decomposition
    kinds = [classify_mutation(d, m) for m in MutationMove.rotations()]
    assert kinds.count("Positive") == 1
    with pytest.raises(NotAMutation):
        classify_mutation(d, MutationMove("identity"))


@pytest.mark.parametrize("name", DECOMPOSED)
def test_classification_ignores_knot_orientation(name):
    d = knot(name).decomposition
    flipped = TangleDecomposition.from_json(d.to_json())
    flipped.signs = {g: -s for g, s in d.signs.items()}
    for m in MutationMove.rotations():
        assert classify_mutation(d, m) == classify_mutation(flipped, m)


def test_kt_positive_move_is_recorded_move(kt_pair):
    assert positive_move(kt_pair.source.decomposition) == kt_pair.move
    assert classify_mutation(kt_pair.source.decomposition, kt_pair.move) == "Positive"


@pytest.mark.parametrize("name", DECOMPOSED)
def test_identity_gluing_is_the_knot_group(name):
    # the knot presentation pulls back onto the identity amalgam and vice versa
    d = knot(name).decomposition
    P = mutant_presentation(d, MutationMove("identity"))
    assert P.num_generators == d.piece1.num_generators + d.piece2.num_generators
    assert len(P.relators) == len(d.piece1.relators) + len(d.piece2.relators) + 3
    alpha = abelianization(P, d.meridian.shift(d.offset))
    assert all(abs(a) == 1 for a in alpha)


@pytest.mark.parametrize("name", DECOMPOSED)
def test_double_mutation_is_generatorwise_identity(name):
    d = knot(name).decomposition
    m = positive_move(d)
    once = mutate_decomposition(d, m)
    twice = mutate_decomposition(once, m)
    assert twice.sphere_words == d.sphere_words
    assert mutant_presentation(twice, MutationMove("identity")).relators == \
        mutant_presentation(d, MutationMove("identity")).relators
    assert mutant_presentation(once, MutationMove("identity")).relators == \
        mutant_presentation(d, m).relators


def test_kt_mutant_has_infinite_cyclic_abelianization(kt_pair):
    d = kt_pair.source.decomposition
    for m in MutationMove.rotations():
        P = mutant_presentation(d, m)
        alpha = abelianization(P, d.meridian.shift(d.offset))
        assert len(alpha) == P.num_generators


def test_decomposition_validation():
    d = knot("kinoshita_terasaka").decomposition
    data = d.to_json()
    data["signs"] = {"a": 1, "b": 1, "c": 1, "d": -1}
    with pytest.raises(MalformedDecomposition):
        TangleDecomposition.from_json(data)
    data = d.to_json()
    data["sphere_words"]["piece1"] = data["sphere_words"]["piece1"][:3]
    with pytest.raises(MalformedDecomposition):
        TangleDecomposition.from_json(data)
    data = d.to_json()
    del data["piece2"]
    with pytest.raises(MalformedDecomposition):
        TangleDecomposition.from_json(data)


def test_decomposition_round_trip():
    d = knot("kinoshita_terasaka").decomposition
    assert TangleDecomposition.from_json(d.to_json()).to_json() == d.to_json()


def test_peripheral_metadata(trefoil):
    per = trefoil.peripheral
    assert per.linking_meridian == 1 and per.intersection_meridian_longitude == 1

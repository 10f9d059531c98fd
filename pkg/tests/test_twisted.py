import numpy as np
import pytest

from torsio import chainlib
from torsio.fgroup import GroupPresentation, Word, free_group, sphere_group
from torsio.mutlab import piece_cohomology
from torsio.su2 import Su2Element, adjoint
from torsio.twisted import (CoefficientSystem, Derivation, NotACocycle, NotAKnotGroup,
                            RelatorViolation, abelianization, derivation_to_cocycle,
                            restrict_derivation, twisted_complex, untwisted_real_complex)


def random_images(rng, n):
    return [Su2Element.random(rng) for _ in range(n)]


def adj_betti(p, images):
    return chainlib.betti_numbers(twisted_complex(p, CoefficientSystem.adjoint(images)))


# --- dimensions -------------------------------------------------------------


def test_free_group_irreducible_twisted_dims(rng):
    F = sphere_group()
    for _ in range(20):
        assert adj_betti(F, random_images(rng, 3)) == [0, 6]


def test_free_group_trivial_rep_gives_three_copies():
    F = sphere_group()
    assert adj_betti(F, [Su2Element.identity()] * 3) == [3, 9]


def test_euler_characteristic(trefoil, trefoil_rep):
    p = trefoil.presentation
    C = twisted_complex(p, CoefficientSystem.adjoint(trefoil_rep))
    chi = sum((-1) ** i * n for i, n in enumerate(C.dims))
    assert chi == 3 * (1 - p.num_generators + len(p.relators))
    betti = chainlib.betti_numbers(C)
    assert sum((-1) ** i * n for i, n in enumerate(betti)) == chi


def test_sphere_group_euler_characteristic():
    C = twisted_complex(sphere_group(), CoefficientSystem.adjoint([Su2Element.identity()] * 3))
    assert sum((-1) ** i * n for i, n in enumerate(C.dims)) == -6


def test_trefoil_regular(trefoil, trefoil_rep):
    assert adj_betti(trefoil.presentation, trefoil_rep) == [0, 1, 1]


def test_pieces_at_kt(kt_pair, kt_sample):
    d = kt_pair.source.decomposition
    _, A, _, _ = kt_sample
    n1 = d.offset
    for part, ims in ((d.piece1, A.images[:n1]), (d.piece2, A.images[n1:])):
        ders, dims = piece_cohomology(ims, part)
        assert dims[:2] == [0, 3] and not any(dims[2:])
        assert len(ders) == 3


def test_conjugation_invariance(trefoil, trefoil_rep, rng):
    g = Su2Element.random(rng)
    conj = trefoil_rep.conjugate(g)
    assert adj_betti(trefoil.presentation, conj) == adj_betti(trefoil.presentation, trefoil_rep)


# --- untwisted --------------------------------------------------------------


def test_untwisted_betti(trefoil, figure_eight, kt_pair):
    assert chainlib.betti_numbers(untwisted_real_complex(trefoil.presentation))[:2] == [1, 1]
    assert chainlib.betti_numbers(untwisted_real_complex(figure_eight.presentation))[:2] == [1, 1]
    d = kt_pair.source.decomposition
    assert chainlib.betti_numbers(untwisted_real_complex(d.piece1))[:2] == [1, 2]
    assert chainlib.betti_numbers(untwisted_real_complex(sphere_group())) == [1, 3]


def test_abelianization(trefoil):
    alpha = abelianization(trefoil.presentation, trefoil.meridian)
    assert all(a == 1 for a in alpha)
    with pytest.raises(NotAKnotGroup):
        abelianization(free_group(2), Word.gen(0))


# --- cocycles ---------------------------------------------------------------


def test_inner_derivation_is_coboundary(rng):
    p = GroupPresentation(2, [Word([(0, 1), (1, 1), (0, -1), (1, -1)])])
    g = Su2Element.random(rng)
    ims = [g, g * g]  # commuting images
    a = rng.normal(size=3)
    d = Derivation.inner(a, ims)
    C = twisted_complex(p, CoefficientSystem.adjoint(ims))
    delta0 = np.asarray(C.maps[0], dtype=float)
    assert np.allclose(d.cochain(), delta0 @ a)
    assert np.allclose(derivation_to_cocycle(d, p), d.cochain())


def test_inner_derivations_span_three_dimensions(trefoil, trefoil_rep):
    ims = trefoil_rep.images
    vecs = [Derivation.inner(e, ims).cochain() for e in np.eye(3)]
    assert np.linalg.matrix_rank(np.array(vecs)) == 3


def test_derivation_rule_on_words(rng):
    ims = random_images(rng, 3)
    d = Derivation([rng.normal(size=3) for _ in range(3)], ims)
    g, h = Word([(0, 1), (2, -1)]), Word([(1, 1), (0, 1)])
    from torsio.twisted import evaluate_word
    lhs = d(g * h)
    rhs = d(g) + adjoint(evaluate_word(g, ims)) @ d(h)
    assert np.allclose(lhs, rhs)
    assert np.allclose(d(g * g.inverse()), 0)


def test_non_cocycle_is_rejected(trefoil, trefoil_rep, rng):
    d = Derivation([rng.normal(size=3) for _ in trefoil_rep.images], trefoil_rep.images)
    with pytest.raises(NotACocycle):
        derivation_to_cocycle(d, trefoil.presentation)


def test_relator_violation(trefoil, rng):
    coeffs = CoefficientSystem.adjoint(random_images(rng, trefoil.presentation.num_generators))
    with pytest.raises(RelatorViolation):
        twisted_complex(trefoil.presentation, coeffs)


def test_restriction_to_words(rng):
    ims = random_images(rng, 2)
    d = Derivation([rng.normal(size=3) for _ in range(2)], ims)
    words = [Word([(0, 1), (1, 1)]), Word([(1, -1)])]
    from torsio.twisted import evaluate_word
    r = restrict_derivation(d, words, [evaluate_word(w, ims) for w in words])
    assert np.allclose(r.values[0], d(words[0]))
    assert np.allclose(r(Word([(0, 1), (1, 1)])), d(words[0] * words[1]))


def test_unknown_coefficient_kind():
    with pytest.raises(ValueError):
        CoefficientSystem("Nope")

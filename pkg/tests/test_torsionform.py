import numpy as np
import pytest

from torsio import chainlib
from torsio.fgroup import GroupPresentation, Word
from torsio.su2 import Su2Element, adjoint
from torsio.torsionform import (TORUS, BadCertificate, NonCommutingPeripheral,
                                PeripheralCertificate, cup_with_P, distinguished_generator,
                                meridian_axis, orientation_sign, torsion_form, torus_complex)
from torsio.twisted import Derivation, untwisted_real_complex
from torsio.repspace import tangent_to_cocycle

I, J = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])


@pytest.fixture(scope="module")
def tref(trefoil, trefoil_rep):
    cert = PeripheralCertificate.from_json(trefoil.certificate)
    v = tangent_to_cocycle(trefoil_rep, trefoil.meridian)
    return trefoil, trefoil_rep, cert, v


def form(k, rep, cert, v, **kw):
    p = kw.pop("presentation", k.presentation)
    mer = kw.pop("meridian", k.meridian)
    lon = kw.pop("longitude", k.longitude)
    return torsion_form(rep, v, p, mer, lon, cert, **kw)


# --- torus ------------------------------------------------------------------


def test_untwisted_torus():
    assert chainlib.betti_numbers(untwisted_real_complex(TORUS)) == [1, 2, 1]


def test_torus_complex_dims_and_h0():
    mu = Su2Element.from_axis_angle(0.8, I)
    lam = Su2Element.from_axis_angle(2.1, I)
    C = torus_complex(mu, lam)
    assert C.dims == [3, 6, 3]
    H, dims = chainlib.homology_basis(C)
    assert dims == [1, 2, 1]
    h0 = np.real(H[0][0])
    assert abs(abs(h0 @ I) - np.linalg.norm(h0)) < 1e-12


def test_torus_requires_commuting():
    with pytest.raises(NonCommutingPeripheral):
        torus_complex(Su2Element.from_axis_angle(0.8, I), Su2Element.from_axis_angle(0.5, J))


def test_cup_with_P_examples():
    assert cup_with_P([1, 0, 0], I) == 1.0
    assert cup_with_P([0, 3, 0], I) == 0.0
    assert cup_with_P([2, 5, -1], -I) == -2.0


def test_cochains_orthogonal_to_P_are_coboundaries(rng):
    mu = Su2Element.from_axis_angle(0.8, I)
    lam = Su2Element.from_axis_angle(-1.3, I)
    C = torus_complex(mu, lam)
    delta1 = np.asarray(C.maps[1], dtype=float)
    for _ in range(5):
        z = rng.normal(size=3)
        z -= (z @ I) * I
        x, *_ = np.linalg.lstsq(delta1, z, rcond=None)
        assert np.linalg.norm(delta1 @ x - z) < 1e-12
    x, *_ = np.linalg.lstsq(delta1, I, rcond=None)
    assert np.linalg.norm(delta1 @ x - I) > 0.5


def test_meridian_axis(trefoil, trefoil_rep):
    theta, P = meridian_axis(trefoil_rep.images, trefoil.meridian)
    assert theta == pytest.approx(1.2)
    assert np.allclose(P, I)


# --- distinguished generator and certificates -------------------------------


def test_distinguished_generator_normalisation(tref):
    k, rep, cert, _ = tref
    h = distinguished_generator(rep, k.presentation, k.meridian, k.longitude, cert)
    _, P = meridian_axis(rep.images, k.meridian)
    assert cup_with_P(cert.pullback_matrix(k.presentation, rep.images) @ h, P) == \
        pytest.approx(1.0)


def _padded(cert, p, u):
    """Insert u r u^-1 . u r^-1 u^-1 in front of the factors."""
    return PeripheralCertificate([(0, u, 1), (0, u, -1)] + list(cert.factors))


def test_certificate_independence(tref):
    k, rep, cert, v = tref
    u = Word([(1, 1), (2, -1), (0, 1)])
    other = _padded(cert, k.presentation, u)
    other.validate(k.presentation, k.meridian, k.longitude)
    a = form(k, rep, cert, v)
    b = form(k, rep, other, v)
    assert b == pytest.approx(a, rel=1e-10)


def test_certificate_chain_map_at_solution(tref):
    k, rep, cert, _ = tref
    assert cert.check_chain_map(k.presentation, k.meridian, k.longitude, rep.images) < 1e-10


def test_certificate_round_trip(trefoil):
    cert = PeripheralCertificate.from_json(trefoil.certificate)
    assert cert.to_json() == trefoil.certificate


@pytest.mark.parametrize("mutate", [
    lambda f: f[:-1],
    lambda f: [(j, u, -s) if k == 0 else (j, u, s) for k, (j, u, s) in enumerate(f)],
    lambda f: [(9, u, s) for j, u, s in f],
    lambda f: [(j, u, 2) for j, u, s in f],
])
def test_bad_certificates(trefoil, mutate):
    cert = PeripheralCertificate.from_json(trefoil.certificate)
    bad = PeripheralCertificate(mutate(list(cert.factors)))
    with pytest.raises(BadCertificate):
        bad.validate(trefoil.presentation, trefoil.meridian, trefoil.longitude)


def test_malformed_certificate_json():
    with pytest.raises(BadCertificate):
        PeripheralCertificate.from_json([{"relator_index": 0, "sign": 1}])


# --- orientation sign -------------------------------------------------------


def test_orientation_sign_flips_with_meridian(trefoil, figure_eight):
    for k in (trefoil, figure_eight):
        s = orientation_sign(k.presentation, k.meridian)
        assert s in (1, -1)
        assert orientation_sign(k.presentation, k.meridian.inverse()) == -s


def test_orientation_sign_flips_with_relator_swap(trefoil):
    p = trefoil.presentation
    q = GroupPresentation(p.num_generators, p.relators[::-1], p.generator_names)
    assert orientation_sign(q, trefoil.meridian) == -orientation_sign(p, trefoil.meridian)


# --- torsion form -----------------------------------------------------------


def test_zero_vector(tref):
    k, rep, cert, v = tref
    assert form(k, rep, cert, np.zeros_like(v.cochain)) == 0.0


def test_nonzero(tref):
    k, rep, cert, v = tref
    assert abs(form(k, rep, cert, v)) > 1e-3


def test_homogeneous_of_degree_one(tref):
    k, rep, cert, v = tref
    a = form(k, rep, cert, v)
    for lam in (2.0, -0.5, 7.25):
        assert form(k, rep, cert, v.scale(lam)) == pytest.approx(lam * a, rel=1e-10)


def test_coboundary_shift(tref, rng):
    k, rep, cert, v = tref
    inner = Derivation.inner(rng.normal(size=3), rep.images).cochain()
    assert form(k, rep, cert, v.cochain + inner) == pytest.approx(form(k, rep, cert, v),
                                                                 rel=1e-9)


def test_conjugation_invariance(tref, rng):
    k, rep, cert, v = tref
    g = Su2Element.random(rng)
    A = adjoint(g)
    w = np.concatenate([A @ x for x in v.derivation.values])
    assert form(k, rep.conjugate(g), cert, w) == pytest.approx(form(k, rep, cert, v), rel=1e-9)


def test_relator_reordering(tref):
    k, rep, cert, v = tref
    p = k.presentation
    q = GroupPresentation(p.num_generators, p.relators[::-1], p.generator_names)
    last = len(p.relators) - 1
    c2 = PeripheralCertificate([(last - j, u, s) for j, u, s in cert.factors])
    c2.validate(q, k.meridian, k.longitude)
    assert form(k, rep, c2, v, presentation=q) == pytest.approx(form(k, rep, cert, v), rel=1e-9)


def test_orientation_reversal(tref):
    k, rep, cert, v = tref
    mu, lam = k.meridian, k.longitude
    u = mu.inverse() * lam.inverse()
    c2 = PeripheralCertificate([(j, u * w, s) for j, w, s in cert.factors])
    c2.validate(k.presentation, mu.inverse(), lam.inverse())
    b = form(k, rep, c2, v, meridian=mu.inverse(), longitude=lam.inverse())
    assert b == pytest.approx(form(k, rep, cert, v), rel=1e-9)

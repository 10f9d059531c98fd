import json

import numpy as np
import pytest

from torsio.fgroup import MutationMove, classify_mutation
from torsio.mutlab import (DimensionMismatch, InsufficientSamples,
                           MutationReport, Sample, mv_sequence, rotation_det_h1,
                           rotation_det_quotient, sign_part, twisted_ratio, verify_main_theorem)

IDENT = MutationMove("identity")


@pytest.fixture(scope="module")
def kt_mv(kt_pair, kt_sample):
    d = kt_pair.source.decomposition
    _, A, _, va = kt_sample
    return mv_sequence(d, IDENT, A, va, d.certificate, d.longitude)


@pytest.fixture(scope="module")
def kt_cmp(kt_pair, kt_sample):
    d = kt_pair.source.decomposition
    _, A, _, va = kt_sample
    return twisted_ratio(d, kt_pair.move, A, va, d.certificate, d.longitude,
                         kt_pair.mutant_certificate, kt_pair.mutant_longitude)


# --- Mayer-Vietoris ---------------------------------------------------------


def test_mv_dimensions(kt_mv):
    assert kt_mv.dims == (1, 6, 6, 1)


def test_mv_exact_and_multiplicative(kt_mv):
    assert kt_mv.exactness_residual() < 1e-8
    assert kt_mv.residual < 1e-8


def test_mv_wrong_basis_size(kt_pair, kt_sample):
    d = kt_pair.source.decomposition
    _, A, _, va = kt_sample
    with pytest.raises(DimensionMismatch):
        mv_sequence(d, IDENT, A, va, d.certificate, d.longitude, inter_basis=[np.zeros(9)])


# --- twisted ratio ----------------------------------------------------------


def test_identity_move_ratio(kt_pair, kt_sample):
    d = kt_pair.source.decomposition
    _, A, _, va = kt_sample
    cmp = twisted_ratio(d, IDENT, A, va, d.certificate, d.longitude, d.certificate, d.longitude)
    assert cmp.ratio == pytest.approx(1.0, abs=1e-10)
    assert cmp.direct_ratio == pytest.approx(1.0, abs=1e-10)


def test_positive_move_ratio(kt_cmp):
    assert kt_cmp.ratio == pytest.approx(1.0, abs=1e-6)
    assert kt_cmp.direct_ratio == pytest.approx(kt_cmp.ratio, abs=1e-8)
    assert kt_cmp.residual < 1e-8
    assert kt_cmp.mutant.dims == (1, 6, 6, 1)


def test_ratio_independent_of_tangent_scale(kt_pair, kt_sample, kt_cmp):
    d = kt_pair.source.decomposition
    _, A, _, va = kt_sample
    cmp = twisted_ratio(d, kt_pair.move, A, va.scale(2.0), d.certificate, d.longitude,
                        kt_pair.mutant_certificate, kt_pair.mutant_longitude)
    assert cmp.ratio == pytest.approx(kt_cmp.ratio, abs=1e-10)


def test_sphere_complexes_coincide(kt_cmp):
    a, b = kt_cmp.original, kt_cmp.mutant
    assert a.quot.dims == b.quot.dims
    for x, y in zip(a.quot.maps, b.quot.maps):
        assert np.allclose(np.asarray(x, dtype=float), np.asarray(y, dtype=float), atol=1e-12)
    for x, y in zip(a.bases[2][1], b.bases[2][1]):
        assert np.array_equal(x, y)


# --- sign part --------------------------------------------------------------


@pytest.mark.parametrize("move", ["identity", "Rx", "Ry", "Rz"])
def test_h1_determinant_descriptions_agree(move):
    m = MutationMove(move)
    assert rotation_det_h1(m) == rotation_det_quotient(m) == 1


def test_sign_part_matches_classification(kt_pair):
    d = kt_pair.source.decomposition
    for m in MutationMove.rotations():
        s = sign_part(d, m)
        assert s.tau0 == 1 and s.tau1 == 1
        assert (s.mu == 1) == (classify_mutation(d, m) == "Positive")
    assert sign_part(d, kt_pair.move).as_tuple() == (1, 1, 1)
    assert sign_part(d, IDENT).as_tuple() == (1, 1, 1)


# --- reports ----------------------------------------------------------------


@pytest.fixture(scope="module")
def pretzel_report():
    return verify_main_theorem("pretzel_self", samples=2, seed=0)


def test_pretzel_pair_passes(pretzel_report):
    assert pretzel_report.passed is True
    for s in pretzel_report.samples:
        assert s.ratio_total == pytest.approx(1.0, abs=1e-6)
        assert s.dims == [1, 6, 6, 1]


def test_report_is_deterministic(pretzel_report):
    again = verify_main_theorem("pretzel_self", samples=2, seed=0)
    assert again.dumps() == pretzel_report.dumps()


def test_report_formats(pretzel_report):
    data = json.loads(pretzel_report.dumps())
    assert data["passed"] is True and len(data["samples"]) == 2
    lines = pretzel_report.to_csv().splitlines()
    assert lines[0] == ",".join(Sample.CSV_COLUMNS)
    assert len(lines) == 3
    theta = float(lines[1].split(",")[0])
    assert theta == pretzel_report.samples[0].theta


def test_negative_moves_are_report_only():
    r = MutationReport("p", "a", "b", "Rx", "Negative", 0, {"pass": 1e-6, "mv": 1e-8})
    assert r.passed is None


def test_empty_positive_report_fails():
    r = MutationReport("p", "a", "b", "Rz", "Positive", 0, {"pass": 1e-6, "mv": 1e-8})
    assert r.passed is False


def test_insufficient_samples():
    with pytest.raises(InsufficientSamples):
        verify_main_theorem("pretzel_self", samples=2, seed=0, thetas=[1.2])


def test_pair_loading(kt_pair):
    assert kt_pair.move.name == "Rz"
    assert kt_pair.source.decomposition is not None
    d = kt_pair.source.decomposition
    n = d.piece1.num_generators + d.piece2.num_generators
    tm = kt_pair.target_map
    assert len(tm) == kt_pair.target.presentation.num_generators
    assert len(set(tm)) == len(tm) and all(0 <= j < n for j in tm)

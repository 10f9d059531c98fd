import numpy as np
import pytest

from torsio import resolve_path
from torsio.fgroup import load_knot
from torsio.mutlab import MutationPair
from torsio.repspace import (TangentVector, amalgam_representation, is_F_irreducible,
                             is_regular, solve_representations, tangent_to_cocycle)
from torsio.twisted import Derivation

KT_THETA = 1.2


def knot(name):
    return load_knot(resolve_path(name).read_text())


@pytest.fixture(scope="session")
def trefoil():
    return knot("trefoil")


@pytest.fixture(scope="session")
def figure_eight():
    return knot("figure_eight")


@pytest.fixture(scope="session")
def kt_pair():
    return MutationPair.load("kt_conway")


@pytest.fixture(scope="session")
def trefoil_rep(trefoil):
    return solve_representations(trefoil.presentation, trefoil.meridian, 1.2)[0]


@pytest.fixture(scope="session")
def kt_reps(kt_pair):
    """Regular, F-irreducible KT representations at one meridian angle."""
    src, d = kt_pair.source, kt_pair.source.decomposition
    reps = solve_representations(src.presentation, src.meridian, KT_THETA, 20, 0)
    return [r for r in reps if is_regular(r)[0]
            and is_F_irreducible(amalgam_representation(r, d), d)]


@pytest.fixture(scope="session")
def kt_sample(kt_pair, kt_reps):
    """(knot rep, amalgam rep, knot tangent, amalgam tangent) at the first KT sample."""
    d = kt_pair.source.decomposition
    r = kt_reps[0]
    A = amalgam_representation(r, d)
    v = tangent_to_cocycle(r, kt_pair.source.meridian)
    words = list(d.inclusions["piece1"]) + list(d.inclusions["piece2"])
    va = TangentVector(Derivation([v.derivation(w) for w in words], A.images), A.presentation)
    return r, A, v, va


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])

import numpy as np
import pytest

from minlift.operators import UsageError
from minlift.verify import ALL_SUITES, grid_minimize, prox_oracle, run_suites


def test_grid_minimize_quadratic_1d():
    got = grid_minimize(lambda u: (u[0] - 3.0) ** 2, np.array([0.0]))
    assert abs(got[0] - 3.0) <= 1e-8


def test_grid_minimize_2d():
    got = grid_minimize(lambda u: (u[0] - 1.0) ** 2 + (u[1] + 2.0) ** 2, np.zeros(2))
    assert np.allclose(got, [1.0, -2.0], atol=1e-8)


def test_prox_oracle_known_closed_form():
    # prox of |.| at 3 is 2 (soft threshold)
    got = prox_oracle(lambda u: abs(u[0]), np.array([3.0]))
    assert abs(got[0] - 2.0) <= 1e-6


def test_run_suites_rejects_unknown():
    with pytest.raises(UsageError):
        run_suites(["no-such-suite"])


@pytest.mark.parametrize("name", sorted(ALL_SUITES))
def test_property_suite(name):
    result = ALL_SUITES[name]()
    assert result.passed, f"{result.name}: {result.detail}"

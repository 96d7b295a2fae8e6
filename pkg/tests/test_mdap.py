import itertools
import math

import numpy as np
import pytest

from precoder.exceptions import BudgetExceeded, ConfigError
from precoder.solvers.mdap import lp_relaxation, solve_assignment, solve_branch_and_bound, solve_exhaustive


def parity_cost() -> np.ndarray:
    """M=2, Q=3 costs whose LP relaxation (value 0) is strictly below every integral solution (0.5)."""
    cost = np.zeros((2, 2, 2))
    for idx in itertools.product(range(2), repeat=3):
        cost[idx] = sum(idx) % 2
    return cost


def brute_force(cost: np.ndarray) -> float:
    M, Q = cost.shape[0], cost.ndim
    best = math.inf
    for perms in itertools.product(itertools.permutations(range(M)), repeat=Q - 1):
        best = min(best, float(np.mean([cost[(m, *(p[m] for p in perms))] for m in range(M)])))
    return best


def test_zero_diagonal():
    cost = np.ones((3, 3, 3))
    for i in range(3):
        cost[i, i, i] = 0.0
    result = solve_assignment(cost)
    assert result.tuples == ((0, 0, 0), (1, 1, 1), (2, 2, 2))
    assert result.objective == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_exhaustive_matches_brute_force(seed):
    cost = np.random.default_rng(seed).uniform(0, 1, size=(3, 3, 3))
    result = solve_exhaustive(cost)
    assert result.objective == pytest.approx(brute_force(cost), abs=1e-12)
    for j in range(3):
        assert sorted(t[j] for t in result.tuples) == [0, 1, 2]


@pytest.mark.parametrize("seed", range(5))
def test_branch_and_bound_matches_exhaustive(seed):
    cost = np.random.default_rng(100 + seed).uniform(0, 1, size=(4, 4, 4))
    exhaustive = solve_exhaustive(cost)
    bnb = solve_branch_and_bound(cost)
    assert bnb.objective == pytest.approx(exhaustive.objective, abs=1e-12)
    assert bnb.lower_bound <= bnb.objective + 1e-12


def test_fractional_relaxation():
    cost = parity_cost()
    lp_value, _ = lp_relaxation(cost)
    assert lp_value == pytest.approx(0.0, abs=1e-12)
    result = solve_branch_and_bound(cost)
    assert result.objective == pytest.approx(0.5)
    assert result.gap == pytest.approx(0.5)
    assert solve_exhaustive(cost).objective == pytest.approx(0.5)


def test_budget_exceeded_carries_incumbent():
    with pytest.raises(BudgetExceeded) as excinfo:
        solve_branch_and_bound(parity_cost(), budget=0)
    assert excinfo.value.incumbent is not None
    assert excinfo.value.gap == pytest.approx(0.5)


def test_mode_selection():
    cost = np.random.default_rng(3).uniform(size=(3, 3, 3))
    assert solve_assignment(cost).exhaustive
    assert not solve_assignment(cost, exhaustive=False).exhaustive


def test_rejects_bad_shape():
    with pytest.raises(ConfigError):
        solve_assignment(np.zeros((2, 3)))

"""
Multi-dimensional assignment: choose M tuples (i_1, ..., i_Q) that use every alphabet index
exactly once per coordinate and minimize the summed cost.

Purpose: Integral uniform-transmission optimum for Q >= 2 interference levels
Key Decisions: Coordinate 1 is pinned to the identity (tuple m starts with index m), which
               loses no generality. Exhaustive mode enumerates the permutations of the middle
               coordinates and solves the last coordinate as a bipartite matching. Branch-and-bound
               fixes one tuple per depth, prunes with per-row minima over the free indices and
               stops as soon as the incumbent meets the LP relaxation bound.
Limitations: Dense cost arrays of M^Q entries
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.optimize import linear_sum_assignment

from precoder.constants import EXHAUSTIVE_MAX_M, EXHAUSTIVE_MAX_Q, INTEGRAL_TOL, MDAP_NODE_BUDGET
from precoder.exceptions import BudgetExceeded, ConfigError
from precoder.solvers.constraints import marginal_constraint_matrix, marginal_rhs
from precoder.solvers.simplex import solve_standard_form

Tuples = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MdapResult:
    tuples: Tuples
    objective: float
    """Mean cost over the M tuples, i.e. sum h p with p = 1/M on each tuple"""
    lower_bound: float
    nodes: int
    exhaustive: bool

    @property
    def gap(self) -> float:
        return self.objective - self.lower_bound


def _objective(cost: np.ndarray, tuples: Tuples) -> float:
    return math.fsum(float(cost[t]) for t in tuples) / len(tuples)


def lp_relaxation(cost: np.ndarray) -> tuple[float, np.ndarray]:
    """Optimal value and basic solution of the uniform-marginal LP over `cost`."""
    M, Q = cost.shape[0], cost.ndim
    A = marginal_constraint_matrix(M, Q)
    b = marginal_rhs(np.full((Q, M), 1.0 / M))
    result = solve_standard_form(cost.reshape(-1), A, b)
    return result.objective, result.x.reshape(cost.shape)


def _integral_tuples(p: np.ndarray) -> Tuples | None:
    M = p.shape[0]
    support = np.argwhere(p > INTEGRAL_TOL)
    if len(support) != M or not np.allclose(p[tuple(support.T)], 1.0 / M, atol=INTEGRAL_TOL):
        return None
    return tuple(sorted(tuple(int(i) for i in t) for t in support))


def solve_exhaustive(cost: np.ndarray) -> MdapResult:
    """Enumerate permutations of coordinates 2..Q-1; coordinate Q is a linear assignment per candidate."""
    M, Q = cost.shape[0], cost.ndim
    rows = np.arange(M)
    best_value, best = math.inf, None
    nodes = 0
    for middle in itertools.product(itertools.permutations(range(M)), repeat=Q - 2):
        # cost of tuple (m, middle..., k) as an M x M matrix over (m, k)
        matrix = cost[(rows, *(np.asarray(perm) for perm in middle))]
        row_ind, col_ind = linear_sum_assignment(matrix)
        nodes += 1
        value = float(matrix[row_ind, col_ind].sum())
        if value < best_value:
            best_value = value
            best = tuple((int(m), *(int(perm[m]) for perm in middle), int(k)) for m, k in zip(row_ind, col_ind))
    assert best is not None
    objective = _objective(cost, best)
    logger.debug(f"Exhaustive assignment M={M} Q={Q}: {nodes} matchings, objective {objective:.12g}")
    return MdapResult(tuples=best, objective=objective, lower_bound=objective, nodes=nodes, exhaustive=True)


class _BudgetHit(Exception):
    pass


def solve_branch_and_bound(cost: np.ndarray, budget: int = MDAP_NODE_BUDGET) -> MdapResult:
    """Depth-first branch-and-bound seeded with the LP relaxation.

    Raises:
        BudgetExceeded: With the incumbent tuples and their gap to the LP bound.
    """
    M, Q = cost.shape[0], cost.ndim
    lp_value, lp_p = lp_relaxation(cost)
    integral = _integral_tuples(lp_p)
    if integral is not None:
        logger.debug("LP relaxation is integral; no branching needed")
        return MdapResult(
            tuples=integral, objective=_objective(cost, integral), lower_bound=lp_value, nodes=0, exhaustive=False
        )

    best = tuple((m,) * Q for m in range(M))
    best_cost = _objective(cost, best) * M
    # rest_floor[d] = sum over rows m >= d of the unrestricted row minimum
    row_min = cost.reshape(M, -1).min(axis=1)
    rest_floor = np.append(np.cumsum(row_min[::-1])[::-1], 0.0)
    free = np.ones((Q - 1, M), dtype=bool)
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    def rest_bound(depth: int) -> float:
        if depth == M:
            return 0.0
        grid = np.ix_(*[np.flatnonzero(f) for f in free])
        return float(sum(cost[m][grid].min() for m in range(depth, M)))

    def visit(depth: int, partial: float) -> None:
        nonlocal nodes, best, best_cost
        nodes += 1
        if nodes > budget:
            raise _BudgetHit
        if depth == M:
            if partial < best_cost:
                best_cost, best = partial, tuple(chosen)
            return
        free_idx = [np.flatnonzero(f) for f in free]
        block = cost[depth][np.ix_(*free_idx)]
        for flat in np.argsort(block, axis=None, kind="stable"):
            local = np.unravel_index(int(flat), block.shape)
            value = partial + float(block[local])
            if value + rest_floor[depth + 1] >= best_cost:
                break
            picked = tuple(int(free_idx[j][local[j]]) for j in range(Q - 1))
            for j, i in enumerate(picked):
                free[j, i] = False
            if value + rest_bound(depth + 1) < best_cost:
                chosen.append((depth, *picked))
                visit(depth + 1, value)
                chosen.pop()
            for j, i in enumerate(picked):
                free[j, i] = True
            if best_cost <= lp_value * M + 1e-12:
                return

    try:
        visit(0, 0.0)
    except _BudgetHit:
        incumbent = tuple(sorted(best))
        gap = _objective(cost, incumbent) - lp_value
        logger.warning(f"Branch-and-bound stopped at {budget} nodes with gap {gap:.3e} bits")
        raise BudgetExceeded(
            f"assignment search exceeded {budget} nodes", budget, incumbent=incumbent, gap=gap
        ) from None

    objective = _objective(cost, best)
    logger.debug(f"Branch-and-bound M={M} Q={Q}: {nodes} nodes, objective {objective:.12g}, LP bound {lp_value:.12g}")
    return MdapResult(
        tuples=tuple(sorted(best)), objective=objective, lower_bound=lp_value, nodes=nodes, exhaustive=False
    )


def solve_assignment(
    cost: np.ndarray, exhaustive: bool | None = None, budget: int = MDAP_NODE_BUDGET
) -> MdapResult:
    """Minimum-cost multi-dimensional assignment over an (M,)*Q cost array.

    Args:
        cost: Cost of every tuple, shape (M,)*Q with Q >= 2.
        exhaustive: Force (True) or forbid (False) exhaustive mode; None picks exhaustive
            for M <= EXHAUSTIVE_MAX_M and Q <= EXHAUSTIVE_MAX_Q.
        budget: Node budget of the branch-and-bound search.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim < 2 or len(set(cost.shape)) != 1:
        raise ConfigError(f"assignment costs must have shape (M,)*Q with Q >= 2, got {cost.shape}")
    M, Q = cost.shape[0], cost.ndim
    if exhaustive is None:
        exhaustive = M <= EXHAUSTIVE_MAX_M and Q <= EXHAUSTIVE_MAX_Q
    return solve_exhaustive(cost) if exhaustive else solve_branch_and_bound(cost, budget)

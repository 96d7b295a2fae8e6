"""
Uniform-transmission rate maximization.

Purpose: Minimize the conditional output entropy sum h p over joint pmfs whose Q marginals are all
         uniform. The LP relaxation, the Q=2 assignment problem, the Q>=3 multi-dimensional
         assignment and the convex / concave closed forms all return a `Solution`
Key Decisions: Every candidate for one channel shares the same h(Y) (the marginals are fixed), so
               rate = h(Y)_uniform - objective and only the objective is optimized.
               The LP keeps MQ - Q + 1 independent marginal rows.
               Closed forms are checked against the exact optimizer before they are returned.
Limitations: Dense M^Q columns; intended for M^Q up to a few thousand
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.optimize import linear_sum_assignment

from precoder.channel_model import AssociatedSymbol, JointPmf, ValidatedChannel
from precoder.constants import CLOSED_FORM_TOL, INTEGRAL_TOL, MDAP_NODE_BUDGET
from precoder.entropy_engine import (
    DEFAULT_QUADRATURE,
    CoeffTensor,
    Convexity,
    QuadratureSettings,
    coeff_tensor,
    convexity_test,
    hessian_psd_on_cube,
    reduce_support,
    uniform_output_entropy,
)
from precoder.exceptions import ComputationError, ConfigError
from precoder.outcomes import NotApplicable
from precoder.solvers.constraints import marginal_constraint_matrix, marginal_rhs
from precoder.solvers.mdap import solve_assignment
from precoder.solvers.simplex import solve_standard_form

__all__ = [
    "UniformLP",
    "Solution",
    "build_lp",
    "solve_lp",
    "solve_assignment_q2",
    "solve_mdap",
    "closed_form_diagonal",
    "closed_form_antidiagonal",
    "pattern_solution",
    "pattern_rates",
    "reduce_support",
    "solve_uniform",
]


@dataclass(frozen=True, eq=False)
class UniformLP:
    """min h.p  s.t.  A p = b, p >= 0 with b = 1/M (equivalently A (M p) = 1).

    A keeps block 1 whole and drops the last row of every later block.
    """

    h: CoeffTensor
    A: np.ndarray
    b: np.ndarray
    output_entropy_bits: float = math.nan

    @property
    def M(self) -> int:
        return self.h.M

    @property
    def Q(self) -> int:
        return self.h.Q

    @property
    def rank(self) -> int:
        return self.M * self.Q - self.Q + 1


@dataclass(frozen=True, eq=False)
class Solution:
    solver: str
    p: JointPmf
    objective_bits: float
    rate_bits: float
    support_size: int
    is_integral: bool

    @property
    def tuples(self) -> list[AssociatedSymbol] | None:
        """The M associated symbols of an integral solution, in lexicographic order."""
        return self.p.support() if self.is_integral else None


def _is_integral(p: np.ndarray) -> bool:
    M = p.shape[0]
    nonzero = p[p > 0]
    return nonzero.size == M and bool(np.all(np.abs(nonzero - 1.0 / M) <= INTEGRAL_TOL))


def _solution(solver: str, p: np.ndarray, h: CoeffTensor, output_entropy_bits: float) -> Solution:
    pmf = JointPmf(p)
    objective = float(pmf.flat @ h.flat)
    return Solution(
        solver=solver,
        p=pmf,
        objective_bits=objective,
        rate_bits=output_entropy_bits - objective,
        support_size=pmf.support_size,
        is_integral=_is_integral(pmf.p),
    )


def _from_tuples(solver: str, tuples, h: CoeffTensor, output_entropy_bits: float) -> Solution:
    p = np.zeros((h.M,) * h.Q)
    for t in tuples:
        p[tuple(t)] += 1.0 / h.M
    return _solution(solver, p, h, output_entropy_bits)


def build_lp(h: CoeffTensor, M: int, Q: int, output_entropy_bits: float = math.nan) -> UniformLP:
    if h.h.shape != (M,) * Q:
        raise ConfigError(f"coefficient tensor has shape {h.h.shape}, expected {(M,) * Q}")
    A = marginal_constraint_matrix(M, Q)
    b = marginal_rhs(np.full((Q, M), 1.0 / M))
    return UniformLP(h=h, A=A, b=b, output_entropy_bits=output_entropy_bits)


def solve_lp(lp: UniformLP) -> Solution:
    """Optimal basic solution of the uniform-transmission LP (support <= MQ - Q + 1)."""
    result = solve_standard_form(lp.h.flat, lp.A, lp.b)
    p = result.x / result.x.sum()
    solution = _solution("lp", p.reshape((lp.M,) * lp.Q), lp.h, lp.output_entropy_bits)
    if solution.support_size > lp.rank:
        raise ComputationError(f"basic solution has support {solution.support_size} > {lp.rank}")
    logger.debug(
        f"LP optimum {solution.objective_bits:.12g} bits after {result.pivots} pivots, "
        f"support {solution.support_size}, integral={solution.is_integral}"
    )
    return solution


def solve_assignment_q2(h: CoeffTensor, output_entropy_bits: float = math.nan) -> Solution:
    """Minimum-cost perfect matching on K_{M,M} with costs h_ij."""
    if h.Q != 2:
        raise ConfigError(f"the bipartite assignment needs Q=2, got Q={h.Q}")
    rows, cols = linear_sum_assignment(h.h)
    return _from_tuples("hungarian", zip(rows.tolist(), cols.tolist()), h, output_entropy_bits)


def solve_mdap(
    h: CoeffTensor,
    M: int,
    Q: int,
    budget: int = MDAP_NODE_BUDGET,
    exhaustive: bool | None = None,
    output_entropy_bits: float = math.nan,
) -> Solution:
    """Integral optimum for Q >= 3: M tuples using every index once per coordinate.

    Raises:
        BudgetExceeded: Branch-and-bound ran out of nodes; carries the incumbent and its gap.
    """
    if Q < 3:
        raise ConfigError(f"multi-dimensional assignment needs Q >= 3, got Q={Q} (use the bipartite solver)")
    if h.h.shape != (M,) * Q:
        raise ConfigError(f"coefficient tensor has shape {h.h.shape}, expected {(M,) * Q}")
    result = solve_assignment(h.h, exhaustive=exhaustive, budget=budget)
    mode = "exhaustive" if result.exhaustive else "branch-and-bound"
    logger.info(f"Assignment M={M} Q={Q} solved by {mode} ({result.nodes} nodes)")
    return _from_tuples("mdap", result.tuples, h, output_entropy_bits)


def _exact_optimum(h: CoeffTensor, output_entropy_bits: float) -> Solution:
    if h.Q == 2:
        return solve_assignment_q2(h, output_entropy_bits)
    return solve_lp(build_lp(h, h.M, h.Q, output_entropy_bits))


def _check_closed_form(solution: Solution, h: CoeffTensor) -> Solution:
    optimum = _exact_optimum(h, solution.rate_bits + solution.objective_bits)
    if abs(solution.objective_bits - optimum.objective_bits) > CLOSED_FORM_TOL:
        raise ComputationError(
            f"{solution.solver} objective {solution.objective_bits:.12g} differs from the optimum "
            f"{optimum.objective_bits:.12g} by more than {CLOSED_FORM_TOL}"
        )
    return solution


def pattern_solution(ch: ValidatedChannel, pattern: str, q: QuadratureSettings = DEFAULT_QUADRATURE) -> Solution:
    """Diagonal (i, ..., i) or, for Q=2, anti-diagonal (i, M-1-i) assignment, without optimality checks."""
    h = coeff_tensor(ch, q)
    h_y = uniform_output_entropy(ch, q)
    if pattern == "diag":
        return _from_tuples("diag", [(i,) * ch.Q for i in range(ch.M)], h, h_y)
    if pattern == "antidiag":
        if ch.Q != 2:
            raise ConfigError(f"the anti-diagonal pattern needs Q=2, got Q={ch.Q}")
        return _from_tuples("antidiag", [(i, ch.M - 1 - i) for i in range(ch.M)], h, h_y)
    raise ConfigError(f"unknown pattern {pattern!r}")


def pattern_rates(ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> dict[str, float]:
    """Diagonal and anti-diagonal rates side by side (Q=2); their maximum is the M=2 optimum."""
    return {pattern: pattern_solution(ch, pattern, q).rate_bits for pattern in ("diag", "antidiag")}


def closed_form_diagonal(ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> Solution | NotApplicable:
    """Diagonal solution p_{i..i} = 1/M, optimal when g is convex on the difference cube."""
    ch.require_noise()
    if ch.Q == 2:
        shape = convexity_test(ch)
        if shape is not Convexity.CONVEX_ON_RANGE:
            return NotApplicable(f"g is {shape.value} on the input range, not convex")
    elif not hessian_psd_on_cube(ch, q):
        return NotApplicable("sampled Hessian of g is not positive semidefinite on the cube")
    solution = pattern_solution(ch, "diag", q)
    return _check_closed_form(solution, coeff_tensor(ch, q))


def closed_form_antidiagonal(
    ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> Solution | NotApplicable:
    """Anti-diagonal solution p_{i, M-1-i} = 1/M for origin-symmetric alphabets when g is concave on the range."""
    ch.require_noise()
    if ch.Q != 2:
        return NotApplicable(f"anti-diagonal closed form is defined for Q=2, channel has Q={ch.Q}")
    if any(a != -b for a, b in zip(ch.x_exact, reversed(ch.x_exact))):
        return NotApplicable("input alphabet is not symmetric about the origin")
    shape = convexity_test(ch)
    if shape is not Convexity.CONCAVE_ON_RANGE:
        return NotApplicable(f"g is {shape.value} on the input range, not concave")
    solution = pattern_solution(ch, "antidiag", q)
    return _check_closed_form(solution, coeff_tensor(ch, q))


def solve_uniform(
    ch: ValidatedChannel,
    solver: str,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    budget: int = MDAP_NODE_BUDGET,
    exhaustive: bool | None = None,
) -> Solution | NotApplicable:
    """Run one named uniform-transmission solver on a channel."""
    ch.require_noise()
    if solver == "diag":
        return closed_form_diagonal(ch, q)
    if solver == "antidiag":
        return closed_form_antidiagonal(ch, q)
    h = coeff_tensor(ch, q)
    h_y = uniform_output_entropy(ch, q)
    if solver == "lp":
        return solve_lp(build_lp(h, ch.M, ch.Q, h_y))
    if solver == "hungarian":
        return solve_assignment_q2(h, h_y)
    if solver == "mdap":
        return solve_mdap(h, ch.M, ch.Q, budget=budget, exhaustive=exhaustive, output_entropy_bits=h_y)
    raise ConfigError(f"unknown uniform-transmission solver {solver!r}")

"""
Two-phase tableau simplex for equality-form linear programs.

Purpose: Solve  min c.x  s.t.  A x = b, x >= 0  and return an optimal basic feasible solution
Key Decisions: Dense numpy tableau; Bland's smallest-index rule for both the entering and the
               leaving variable so degenerate assignment polytopes cannot cycle; artificial
               variables left in the basis at zero after phase one are pivoted out (or their
               row dropped when it is redundant)
Limitations: Floating point with fixed tolerances; meant for the small dense systems of this
             project (hundreds of columns), not as a general LP library
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from precoder.constants import MAX_SIMPLEX_PIVOTS, PHASE_ONE_TOL, PIVOT_TOL
from precoder.exceptions import Infeasible, NoConvergence, Unbounded


@dataclass(frozen=True, eq=False)
class SimplexResult:
    x: np.ndarray
    objective: float
    basis: tuple[int, ...]
    pivots: int


class _Tableau:
    """Constraint rows T[:m] and reduced-cost row T[m]; last column is the right-hand side."""

    def __init__(self, table: np.ndarray, basis: list[int]):
        self.table = table
        self.basis = basis
        self.pivots = 0

    @property
    def m(self) -> int:
        return self.table.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        T = self.table
        T[row] /= T[row, col]
        column = T[:, col].copy()
        column[row] = 0.0
        T -= np.outer(column, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.pivots += 1

    def run(self, allowed: int) -> None:
        """Bland's-rule iterations over the first `allowed` columns until optimal."""
        T = self.table
        while True:
            if self.pivots > MAX_SIMPLEX_PIVOTS:
                raise NoConvergence(f"simplex exceeded {MAX_SIMPLEX_PIVOTS} pivots", self.pivots)
            candidates = np.flatnonzero(T[-1, :allowed] < -PIVOT_TOL)
            if candidates.size == 0:
                return
            col = int(candidates[0])
            entries = T[:-1, col]
            rows = np.flatnonzero(entries > PIVOT_TOL)
            if rows.size == 0:
                raise Unbounded(f"column {col} has no positive entry")
            ratios = T[rows, -1] / entries[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL]
            row = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(row, col)


def solve_standard_form(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> SimplexResult:
    """Minimize c.x subject to A x = b, x >= 0.

    Raises:
        Infeasible: If phase one cannot drive the artificial variables to zero.
        Unbounded: If phase two finds an improving ray.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    negative = b < 0
    A[negative] *= -1.0
    b[negative] *= -1.0

    # Phase one: minimize the sum of artificials n .. n+m-1
    table = np.zeros((m + 1, n + m + 1))
    table[:m, :n] = A
    table[:m, n : n + m] = np.eye(m)
    table[:m, -1] = b
    table[m, :n] = -A.sum(axis=0)
    table[m, -1] = -b.sum()
    tab = _Tableau(table, list(range(n, n + m)))
    tab.run(allowed=n + m)

    residue = -tab.table[m, -1]
    if residue > PHASE_ONE_TOL:
        raise Infeasible(f"phase one ended with artificial mass {residue:.3e}")

    # Pivot zero-level artificials out of the basis; rows without a structural entry are redundant
    redundant = []
    for row in range(m):
        if tab.basis[row] < n:
            continue
        structural = np.flatnonzero(np.abs(tab.table[row, :n]) > PIVOT_TOL)
        if structural.size:
            tab.pivot(row, int(structural[0]))
        else:
            redundant.append(row)
    if redundant:
        logger.warning(f"Simplex dropped {len(redundant)} redundant constraint rows")
    keep = [i for i in range(m) if i not in redundant]

    # Phase two on the structural columns
    body = tab.table[keep][:, list(range(n)) + [n + m]]
    basis = [tab.basis[i] for i in keep]
    cost_row = np.append(c, 0.0) - c[basis] @ body
    table = np.vstack([body, cost_row])
    phase2 = _Tableau(table, basis)
    phase2.pivots = tab.pivots
    phase2.run(allowed=n)

    x = np.zeros(n)
    x[phase2.basis] = phase2.table[:-1, -1]
    x = np.clip(x, 0.0, None)
    objective = float(c @ x)
    logger.debug(f"Simplex optimal after {phase2.pivots} pivots, objective {objective:.12g}")
    return SimplexResult(x=x, objective=objective, basis=tuple(phase2.basis), pivots=phase2.pivots)

"""Marginal constraint systems over the M^Q associated symbols.

Column order is lexicographic in (i_1, ..., i_Q) with i_1 slowest, matching
the C-order flattening of joint pmf and coefficient arrays. Row block j holds
the M marginal constraints of state j.
"""

import numpy as np


def marginal_constraint_matrix(M: int, Q: int, full_rank: bool = True) -> np.ndarray:
    """Zero-one matrix A with A[j*M + i, t] = 1 iff symbol t has i_j = i.

    With `full_rank`, the last row of every block except the first is dropped,
    leaving MQ - Q + 1 linearly independent rows.
    """
    columns = np.indices((M,) * Q).reshape(Q, -1)  # (Q, M^Q) per-state index of each column
    A = np.zeros((M * Q, M**Q))
    for j in range(Q):
        A[j * M + columns[j], np.arange(M**Q)] = 1.0
    if full_rank:
        A = A[kept_rows(M, Q)]
    return A


def kept_rows(M: int, Q: int) -> np.ndarray:
    rows = list(range(M))
    for j in range(1, Q):
        rows.extend(range(j * M, (j + 1) * M - 1))
    return np.asarray(rows, dtype=int)


def marginal_rhs(per_state: np.ndarray, full_rank: bool = True) -> np.ndarray:
    """Stack the (Q, M) marginal table into the right-hand side matching `marginal_constraint_matrix`."""
    Q, M = per_state.shape
    b = np.asarray(per_state, dtype=float).reshape(-1)
    return b[kept_rows(M, Q)] if full_rank else b

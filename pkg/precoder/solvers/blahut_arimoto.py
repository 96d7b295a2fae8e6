"""Blahut-Arimoto capacity iteration for a discrete memoryless channel.

Stops when the capacity bracket  sum_t p_t D_t <= C <= max_t D_t  is narrower
than the tolerance, so the returned rate is within `tol` of the capacity of
the given transition matrix.
"""

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from precoder.exceptions import NoConvergence


@dataclass(frozen=True, eq=False)
class BlahutArimotoResult:
    p: np.ndarray
    rate_bits: float
    upper_bits: float
    iterations: int


def blahut_arimoto(W: np.ndarray, tol: float = 1e-7, max_iters: int = 200_000) -> BlahutArimotoResult:
    """Capacity of the channel with transition matrix W (outputs x inputs, columns sum to 1).

    Args:
        W: Column-stochastic transition matrix.
        tol: Width of the capacity bracket (bits) at which iteration stops.
        max_iters: Iteration cap.

    Raises:
        NoConvergence: If the bracket is still wider than `tol` after `max_iters` iterations.
    """
    W = np.asarray(W, dtype=float)
    n_inputs = W.shape[1]
    # sum_k W log W per input, with 0 log 0 = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        self_info = np.where(W > 0, W * np.log(W), 0.0).sum(axis=0)
    tol_nats = tol * math.log(2.0)

    p = np.full(n_inputs, 1.0 / n_inputs)
    for iteration in range(1, max_iters + 1):
        q = W @ p
        with np.errstate(divide="ignore"):
            log_q = np.log(np.where(q > 0, q, 1.0))
        divergence = self_info - W.T @ log_q
        lower = float(p @ divergence)
        upper = float(divergence.max())
        if upper - lower < tol_nats:
            bracket = (upper - lower) / math.log(2.0)
            logger.debug(f"Blahut-Arimoto converged in {iteration} iterations, bracket {bracket:.2e} bits")
            return BlahutArimotoResult(
                p=p, rate_bits=lower / math.log(2.0), upper_bits=upper / math.log(2.0), iterations=iteration
            )
        p = p * np.exp(divergence - upper)
        p /= p.sum()

    raise NoConvergence(f"Blahut-Arimoto did not reach a {tol:g}-bit bracket in {max_iters} iterations", max_iters)

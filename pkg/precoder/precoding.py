"""
Precoders: (message, current interference level) -> channel input.

Purpose: Execute the M associated symbols chosen by an optimizer or by the noise-free
         construction, and evaluate the modulo (Tomlinson-Harashima) baseline against identity
         maps on a discretized input interval
Key Decisions: Messages and states are 0-based internally.
               The modulo interval is A = [-delta/2, delta/2) and its power delta^2/12.
               On the equiprobable grid every circular shift alpha (s_1 - s_q) is rounded to a whole
               number of grid steps so the induced maps stay bijections of the grid.
Limitations: No optimization over general bijective maps; only the modulo and identity families
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from loguru import logger

from precoder.channel_model import AssociatedSymbol, ChannelSpec, JointPmf, ValidatedChannel, validate_channel
from precoder.constants import DEFAULT_MODULO_DELTA, DEFAULT_MODULO_GRID
from precoder.entropy_engine import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    g_function,
    mutual_information,
    uniform_output_entropy,
)
from precoder.exceptions import ConfigError, IndexOutOfRange


@dataclass(frozen=True, eq=False)
class TuplePrecoder:
    """Message m sends component q of tuples[m] while the interference is s_q."""

    tuples: tuple[AssociatedSymbol, ...]
    channel: ValidatedChannel
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        tuples = tuple(t if isinstance(t, AssociatedSymbol) else AssociatedSymbol(tuple(t)) for t in self.tuples)
        if len(tuples) != self.channel.M:
            raise ConfigError(f"a precoder needs exactly M={self.channel.M} tuples, got {len(tuples)}")
        if len(set(tuples)) != len(tuples):
            raise ConfigError("precoder tuples must be distinct")
        for t in tuples:
            t.check(self.channel)
        table = np.array([t.indices for t in tuples], dtype=np.intp)  # (M, Q) input indices
        table.setflags(write=False)
        object.__setattr__(self, "tuples", tuples)
        object.__setattr__(self, "table", table)

    @property
    def M(self) -> int:
        return self.channel.M

    @property
    def Q(self) -> int:
        return self.channel.Q

    @property
    def pmf(self) -> JointPmf:
        return JointPmf.uniform_over(self.tuples, self.M, self.Q)

    def inputs(self, messages: np.ndarray, states: np.ndarray) -> np.ndarray:
        """Vectorized precode over message / state index arrays."""
        return self.channel.x_array[self.table[messages, states]]


def precode(tp: TuplePrecoder, m: int, q: int) -> float:
    if not 0 <= m < tp.M:
        raise IndexOutOfRange(f"message {m} outside 0..{tp.M - 1}")
    if not 0 <= q < tp.Q:
        raise IndexOutOfRange(f"state {q} outside 0..{tp.Q - 1}")
    return tp.channel.x[tp.tuples[m].indices[q]]


def rate(tp: TuplePrecoder, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Mutual information of the associated channel with mass 1/M on each tuple."""
    return mutual_information(tp.pmf, tp.channel, q)


# ===== MODULO PRECODING =====


@dataclass(frozen=True)
class ModuloPrecoder:
    """X = [V - alpha S] mod delta on A = [-delta/2, delta/2)."""

    delta: float = DEFAULT_MODULO_DELTA
    alpha: float = 0.0
    grid_size: int = DEFAULT_MODULO_GRID

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ConfigError(f"modulo interval length must be positive, got {self.delta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.grid_size < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.grid_size}")

    @property
    def signal_power(self) -> float:
        return self.delta**2 / 12.0

    @classmethod
    def mmse(cls, delta: float, noise_power: float, grid_size: int = DEFAULT_MODULO_GRID) -> "ModuloPrecoder":
        """alpha = P_X / (P_X + P_N) with P_X the power of the uniform interval."""
        p_x = delta**2 / 12.0
        return cls(delta=delta, alpha=p_x / (p_x + noise_power), grid_size=grid_size)

    def grid(self) -> np.ndarray:
        """Equiprobable grid: midpoints of grid_size equal cells of A."""
        step = self.delta / self.grid_size
        return -self.delta / 2.0 + step * (np.arange(self.grid_size) + 0.5)


def wrap(z, delta: float):
    """Reduce into [-delta/2, delta/2)."""
    wrapped = np.mod(np.asarray(z, dtype=float) + delta / 2.0, delta) - delta / 2.0
    return float(wrapped) if np.ndim(z) == 0 else wrapped


def modulo_map(v, s_q: float, mp: ModuloPrecoder):
    return wrap(np.asarray(v, dtype=float) - mp.alpha * s_q, mp.delta)


@dataclass(frozen=True)
class CircularShift:
    """x -> [x + shift] mod delta, a bijection of A."""

    shift: float
    delta: float

    def __call__(self, x):
        return wrap(np.asarray(x, dtype=float) + self.shift, self.delta)

    def inverse(self) -> "CircularShift":
        return CircularShift(-self.shift, self.delta)


def modulo_induced_maps(mp: ModuloPrecoder, ch: ValidatedChannel) -> list[CircularShift]:
    """X_q = [X_1 + alpha (s_1 - s_q)] mod delta for q = 1..Q (the first map is the identity)."""
    if ch.Q < 2:
        raise ConfigError(f"induced maps need Q >= 2, channel has Q={ch.Q}")
    return [CircularShift(mp.alpha * (ch.s[0] - s_q), mp.delta) for s_q in ch.s]


def grid_channel(mp: ModuloPrecoder, ch: ValidatedChannel, grid_size: int | None = None) -> ValidatedChannel:
    """Discrete channel whose input alphabet is the equiprobable grid of A."""
    n = grid_size or mp.grid_size
    points = ModuloPrecoder(mp.delta, mp.alpha, n).grid()
    return validate_channel(ChannelSpec(x=points.tolist(), s=list(ch.s), r=list(ch.r), noise_power=ch.noise_power))


def grid_shifts(mp: ModuloPrecoder, ch: ValidatedChannel, grid_size: int | None = None) -> list[int]:
    """Induced circular shifts in whole grid steps."""
    n = grid_size or mp.grid_size
    step = mp.delta / n
    return [int(round(shift.shift / step)) for shift in modulo_induced_maps(mp, ch)]


def shift_tuples(shifts: Sequence[int], grid_size: int) -> list[AssociatedSymbol]:
    """Tuple k sends grid point (k + shift_q) mod grid_size in state q."""
    return [AssociatedSymbol(tuple((k + n) % grid_size for n in shifts)) for k in range(grid_size)]


def _shift_rate(shifts: Sequence[int], gch: ValidatedChannel, h_y: float, q: QuadratureSettings) -> float:
    # mean over the grid of g(x_k - x_{k+n_2}, ..., x_k - x_{k+n_Q})
    values = []
    for t in shift_tuples(shifts, gch.M):
        first = gch.x_exact[t.indices[0]]
        values.append(g_function([float(first - gch.x_exact[i]) for i in t.indices[1:]], gch, q))
    return h_y - math.fsum(values) / len(values)


def compare_modulo_vs_identity(
    mp: ModuloPrecoder,
    ch: ValidatedChannel,
    grid_size: int | None = None,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Uniform-transmission rates (bits) of the modulo shifts and of identity maps on the grid.

    Returns:
        Tuple of (rate_modulo, rate_identity).
    """
    ch.require_noise()
    n = grid_size or mp.grid_size
    gch = grid_channel(mp, ch, n)
    h_y = uniform_output_entropy(gch, q)
    shifts = grid_shifts(mp, ch, n)
    rate_modulo = _shift_rate(shifts, gch, h_y, q)
    rate_identity = _shift_rate([0] * ch.Q, gch, h_y, q)
    logger.info(
        f"Modulo alpha={mp.alpha:.4f} shifts {shifts} on a {n}-point grid: "
        f"modulo {rate_modulo:.6f} bits, identity {rate_identity:.6f} bits"
    )
    return rate_modulo, rate_identity

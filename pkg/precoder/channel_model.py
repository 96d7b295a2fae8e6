"""
Channel model: Y = X + S + N with Q-level interference known causally at the transmitter.

Purpose: Channel, interference and associated-channel types plus the likelihood and
         output-density formulas the rest of the library consumes
Key Decisions: Associated symbols are Q-tuples of 0-based alphabet indices; joint pmfs are
               dense (M,)*Q arrays in C order, i.e. lexicographic with i_1 slowest, shared
               with the coefficient tensor and the LP columns.
               P_X is the uniform-input power (1/M) sum x_i^2 and SNR(dB) = 10 log10(P_X/P_N).
Limitations: Discrete real alphabets only; no fading, no vector channels
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from loguru import logger

from precoder.constants import JOINT_PMF_SUM_TOL, PMF_SUM_TOL, SUPPORT_DUST
from precoder.exceptions import (
    BadPmf,
    ConfigError,
    IndexOutOfRange,
    NegativeNoise,
    NonIncreasingAlphabet,
    ZeroNoise,
)

Number = float | int | Decimal | Fraction


def exact_value(value: Number) -> Fraction:
    """Exact rational for a config number; floats go through their shortest repr."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class ChannelSpec:
    """Raw channel description: input alphabet x, interference alphabet s with pmf r, noise power."""

    x: Sequence[Number]
    s: Sequence[Number]
    r: Sequence[Number]
    noise_power: Number


@dataclass(frozen=True)
class ValidatedChannel:
    """Immutable, checked channel. Built only through `validate_channel`."""

    x: tuple[float, ...]
    s: tuple[float, ...]
    r: tuple[float, ...]
    noise_power: float
    x_exact: tuple[Fraction, ...] = field(compare=False, repr=False)
    s_exact: tuple[Fraction, ...] = field(compare=False, repr=False)

    @property
    def M(self) -> int:
        return len(self.x)

    @property
    def Q(self) -> int:
        return len(self.s)

    @property
    def signal_power(self) -> float:
        """P_X = (1/M) sum x_i^2 under uniform input."""
        return float(np.mean(np.square(self.x)))

    @property
    def snr_db(self) -> float:
        if self.noise_power == 0:
            return math.inf
        return 10.0 * math.log10(self.signal_power / self.noise_power)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.noise_power)

    @cached_property
    def x_array(self) -> np.ndarray:
        arr = np.asarray(self.x, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def s_array(self) -> np.ndarray:
        arr = np.asarray(self.s, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def r_array(self) -> np.ndarray:
        arr = np.asarray(self.r, dtype=float)
        arr.setflags(write=False)
        return arr

    @property
    def interference_entropy(self) -> float:
        """H(S) in bits."""
        r = self.r_array
        return float(-np.sum(r * np.log2(r)))

    def with_noise_power(self, noise_power: float) -> "ValidatedChannel":
        """Same alphabets, different noise power (used by sweeps)."""
        if noise_power < 0:
            raise NegativeNoise(f"noise power must be nonnegative, got {noise_power}")
        return replace(self, noise_power=float(noise_power))

    def with_snr_db(self, snr_db: float) -> "ValidatedChannel":
        return self.with_noise_power(noise_power_for_snr(self.signal_power, snr_db))

    def require_noise(self) -> None:
        if self.noise_power <= 0:
            raise ZeroNoise("operation needs noise_power > 0; use the noise_free module")


def noise_power_for_snr(signal_power: float, snr_db: float) -> float:
    return signal_power / 10.0 ** (snr_db / 10.0)


def _check_increasing(name: str, values: Sequence[Fraction]) -> None:
    for a, b in itertools.pairwise(values):
        if not a < b:
            raise NonIncreasingAlphabet(f"{name} must be strictly increasing, got {[str(v) for v in values]}")


def validate_channel(spec: ChannelSpec) -> ValidatedChannel:
    """Check ChannelSpec invariants and freeze the result."""
    x_exact = tuple(exact_value(v) for v in spec.x)
    s_exact = tuple(exact_value(v) for v in spec.s)
    if len(x_exact) < 2:
        raise ConfigError(f"input alphabet needs at least 2 symbols, got {len(x_exact)}")
    if len(s_exact) < 1:
        raise ConfigError("interference alphabet is empty")
    _check_increasing("x", x_exact)
    _check_increasing("s", s_exact)

    r = tuple(float(v) for v in spec.r)
    if len(r) != len(s_exact):
        raise BadPmf(f"r has {len(r)} entries for {len(s_exact)} interference levels")
    if any(not v > 0 for v in r):
        raise BadPmf(f"interference probabilities must be positive, got {r}")
    if abs(math.fsum(r) - 1.0) > PMF_SUM_TOL:
        raise BadPmf(f"interference probabilities sum to {math.fsum(r)!r}, not 1")

    noise_power = float(spec.noise_power)
    if not noise_power >= 0:
        raise NegativeNoise(f"noise power must be nonnegative, got {spec.noise_power}")

    channel = ValidatedChannel(
        x=tuple(float(v) for v in x_exact),
        s=tuple(float(v) for v in s_exact),
        r=r,
        noise_power=noise_power,
        x_exact=x_exact,
        s_exact=s_exact,
    )
    logger.debug(f"Validated channel M={channel.M} Q={channel.Q} P_X={channel.signal_power:.4g} P_N={noise_power:.4g}")
    return channel


def channel_from_document(doc: dict[str, Any]) -> ValidatedChannel:
    """Build a channel from a parsed JSON document.

    Exactly one of `noise_power` / `snr_db` must be present. `r` defaults to
    uniform when omitted.
    """
    try:
        x, s = doc["x"], doc["s"]
    except KeyError as e:
        raise ConfigError(f"channel document is missing {e}") from e
    r = doc["r"] if "r" in doc else [Fraction(1, len(s))] * len(s)
    if not isinstance(r, (list, tuple)):
        raise BadPmf(f"r must be a list of probabilities, got {r!r}")
    has_noise, has_snr = "noise_power" in doc, "snr_db" in doc
    if has_noise == has_snr:
        raise ConfigError("channel document needs exactly one of noise_power / snr_db")
    if has_noise:
        return validate_channel(ChannelSpec(x=x, s=s, r=r, noise_power=doc["noise_power"]))
    base = validate_channel(ChannelSpec(x=x, s=s, r=r, noise_power=1.0))
    return base.with_snr_db(float(doc["snr_db"]))


def load_channel(path: str | Path) -> ValidatedChannel:
    """Read a channel JSON file; numbers are parsed as exact decimals."""
    try:
        with open(path) as f:
            doc = json.load(f, parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read channel config {path}: {e}") from e
    return channel_from_document(doc)


@dataclass(frozen=True)
class AssociatedSymbol:
    """One input of the associated channel: per-state 0-based alphabet indices (i_1, ..., i_Q)."""

    indices: tuple[int, ...]

    def check(self, channel: ValidatedChannel) -> "AssociatedSymbol":
        if len(self.indices) != channel.Q:
            raise IndexOutOfRange(f"symbol {self.indices} has length {len(self.indices)}, channel has Q={channel.Q}")
        if any(not 0 <= i < channel.M for i in self.indices):
            raise IndexOutOfRange(f"symbol {self.indices} has an index outside 0..{channel.M - 1}")
        return self

    def values(self, channel: ValidatedChannel) -> tuple[float, ...]:
        return tuple(channel.x[i] for i in self.indices)

    def one_based(self) -> list[int]:
        return [i + 1 for i in self.indices]


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Probability assignment over all M^Q associated symbols, stored as an (M,)*Q array."""

    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.p, dtype=float)
        if p.ndim < 1 or len(set(p.shape)) != 1:
            raise BadPmf(f"joint pmf must have shape (M,)*Q, got {p.shape}")
        if np.any(p < -SUPPORT_DUST):
            raise BadPmf("joint pmf has negative entries")
        p = np.where(p < SUPPORT_DUST, 0.0, p)
        if abs(p.sum() - 1.0) > JOINT_PMF_SUM_TOL:
            raise BadPmf(f"joint pmf sums to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def M(self) -> int:
        return self.p.shape[0]

    @property
    def Q(self) -> int:
        return self.p.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.p.reshape(-1)

    def support(self) -> list[AssociatedSymbol]:
        """Symbols with nonzero mass, in lexicographic order."""
        return [AssociatedSymbol(tuple(int(i) for i in idx)) for idx in np.argwhere(self.p > 0)]

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.p))

    def mass(self, symbol: AssociatedSymbol) -> float:
        return float(self.p[symbol.indices])

    @classmethod
    def uniform_over(cls, symbols: Iterable[AssociatedSymbol], M: int, Q: int) -> "JointPmf":
        """Mass 1/len(symbols) on each listed symbol (repeats accumulate)."""
        symbols = list(symbols)
        if not symbols:
            raise BadPmf("cannot build a pmf over zero symbols")
        p = np.zeros((M,) * Q)
        for t in symbols:
            p[t.indices] += 1.0 / len(symbols)
        return cls(p)

    @classmethod
    def point_mass(cls, symbol: AssociatedSymbol, M: int) -> "JointPmf":
        return cls.uniform_over([symbol], M, len(symbol.indices))

    @classmethod
    def uniform(cls, M: int, Q: int) -> "JointPmf":
        return cls(np.full((M,) * Q, 1.0 / M**Q))


@dataclass(frozen=True, eq=False)
class MarginalSet:
    """per_state[j, i] = Pr{X_j = x_i}."""

    per_state: np.ndarray

    def is_uniform(self, tol: float = 1e-9) -> bool:
        M = self.per_state.shape[1]
        return bool(np.all(np.abs(self.per_state - 1.0 / M) <= tol))


def marginals(p: JointPmf) -> MarginalSet:
    Q = p.Q
    rows = [p.p.sum(axis=tuple(k for k in range(Q) if k != j)) if Q > 1 else p.p for j in range(Q)]
    per_state = np.vstack(rows)
    per_state.setflags(write=False)
    return MarginalSet(per_state)


def gaussian_pdf(z: np.ndarray | float, noise_power: float) -> np.ndarray:
    return np.exp(-np.square(z) / (2.0 * noise_power)) / math.sqrt(2.0 * math.pi * noise_power)


def likelihood(y: np.ndarray | float, t: AssociatedSymbol, ch: ValidatedChannel) -> np.ndarray | float:
    """f_{Y|T}(y|t) = sum_j r_j f_N(y - x_{i_j} - s_j)."""
    ch.require_noise()
    t.check(ch)
    y_arr = np.asarray(y, dtype=float)
    means = ch.x_array[list(t.indices)] + ch.s_array
    dens = gaussian_pdf(y_arr[..., None] - means, ch.noise_power) @ ch.r_array
    return float(dens) if np.ndim(y) == 0 else dens


def output_pdf(y: np.ndarray | float, p: JointPmf, ch: ValidatedChannel) -> np.ndarray | float:
    """f_Y(y) = sum_j r_j sum_i p_i^(j) f_N(y - x_i - s_j); depends on p only through its marginals."""
    ch.require_noise()
    weights = marginals(p).per_state * ch.r_array[:, None]  # (Q, M)
    means = ch.s_array[:, None] + ch.x_array[None, :]  # (Q, M)
    y_arr = np.asarray(y, dtype=float)
    dens = gaussian_pdf(y_arr[..., None] - means.reshape(-1), ch.noise_power) @ weights.reshape(-1)
    return float(dens) if np.ndim(y) == 0 else dens


def all_symbols(M: int, Q: int) -> list[AssociatedSymbol]:
    """Every associated symbol in lexicographic order (the shared column order)."""
    return [AssociatedSymbol(idx) for idx in itertools.product(range(M), repeat=Q)]

"""
Monte Carlo link simulation of a tuple precoder.

Purpose: Draw messages and interference, send precode(m, q) + s_q + noise, decode, count symbol errors
Key Decisions: numpy PCG64 generators; the seed feeds a SeedSequence that spawns one substream per
               block of `block_size` trials, so results do not depend on how blocks are scheduled.
               Gaussian samples come from numpy's standard_normal (ziggurat).
               ML decoding works in the log domain with logsumexp; argmax ties go to the smallest message.
               Noise-free runs carry the exact rational outputs and decode them through the output -> message
               map of the output multi-sets, so zero-error claims are checked without float comparisons.
Limitations: One-shot symbols only; no sequence coding
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from precoder.constants import DEFAULT_BLOCK_SIZE, DEFAULT_SEED, DEFAULT_TRIALS, WALD_Z
from precoder.exceptions import ConfigError, IndexOutOfRange, UnknownOutput
from precoder.precoding import TuplePrecoder


@dataclass(frozen=True)
class SimConfig:
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    interference: str | tuple[int, ...] = "iid"
    """"iid" draws states from r; a tuple of 0-based state indices is replayed cyclically"""
    noise: str = "gaussian"
    block_size: int = DEFAULT_BLOCK_SIZE

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.block_size < 1:
            raise ConfigError(f"block_size must be at least 1, got {self.block_size}")
        if self.noise not in ("gaussian", "none"):
            raise ConfigError(f"noise mode must be 'gaussian' or 'none', got {self.noise!r}")
        if isinstance(self.interference, str):
            if self.interference != "iid":
                raise ConfigError(f"interference must be 'iid' or a state sequence, got {self.interference!r}")
        else:
            sequence = tuple(int(q) for q in self.interference)
            if not sequence:
                raise ConfigError("explicit interference sequence is empty")
            object.__setattr__(self, "interference", sequence)


@dataclass(frozen=True, eq=False)
class Transmission:
    messages: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    """Floats under Gaussian noise; an object array of exact Fractions in noise-free runs"""


@dataclass(frozen=True)
class SerEstimate:
    ser: float
    ci95: float
    errors: int
    trials: int
    state_frequencies: tuple[float, ...] = ()
    """Empirical frequency of each interference state over all trials"""

    @property
    def zero_error(self) -> bool:
        return self.errors == 0


def _blocks(cfg: SimConfig):
    """Yield (start, size, generator) per block; one spawned substream per block."""
    n_blocks = math.ceil(cfg.trials / cfg.block_size)
    children = np.random.SeedSequence(cfg.seed).spawn(n_blocks)
    for b, child in enumerate(children):
        start = b * cfg.block_size
        yield start, min(cfg.block_size, cfg.trials - start), np.random.Generator(np.random.PCG64(child))


def _draw_block(tp: TuplePrecoder, cfg: SimConfig, start: int, size: int, rng: np.random.Generator) -> Transmission:
    ch = tp.channel
    messages = rng.integers(0, tp.M, size=size)
    if cfg.interference == "iid":
        states = rng.choice(tp.Q, size=size, p=ch.r_array)
    else:
        sequence = np.asarray(cfg.interference, dtype=np.intp)
        if np.any((sequence < 0) | (sequence >= tp.Q)):
            raise IndexOutOfRange(f"interference sequence has states outside 0..{tp.Q - 1}")
        states = sequence[np.arange(start, start + size) % sequence.size]
    if cfg.noise == "none":
        return Transmission(messages=messages, states=states, outputs=_exact_outputs(tp)[messages, states])
    ch.require_noise()
    outputs = tp.inputs(messages, states) + ch.s_array[states] + ch.sigma * rng.standard_normal(size)
    return Transmission(messages=messages, states=states, outputs=outputs)


def transmit(tp: TuplePrecoder, cfg: SimConfig) -> Transmission:
    """All trials of a run, reproducible from cfg.seed."""
    parts = [_draw_block(tp, cfg, start, size, rng) for start, size, rng in _blocks(cfg)]
    return Transmission(
        messages=np.concatenate([p.messages for p in parts]),
        states=np.concatenate([p.states for p in parts]),
        outputs=np.concatenate([p.outputs for p in parts]),
    )


def ml_decode(y, tp: TuplePrecoder):
    """argmax_m f(y | tuple_m); scalar y gives an int, arrays give an index array."""
    ch = tp.channel
    ch.require_noise()
    y_arr = np.asarray(y, dtype=float)
    means = ch.x_array[tp.table] + ch.s_array  # (M, Q)
    log_r = np.log(ch.r_array)
    # log f(y | m) up to a common constant, shape (..., M)
    scores = logsumexp(log_r - np.square(y_arr[..., None, None] - means) / (2.0 * ch.noise_power), axis=-1)
    decoded = np.argmax(scores, axis=-1)
    return int(decoded) if y_arr.ndim == 0 else decoded


def _exact_outputs(tp: TuplePrecoder) -> np.ndarray:
    """E[m, q] = x_{i_q} + s_q as a Fraction, the noise-free output of message m in state q."""
    ch = tp.channel
    table = np.empty((tp.M, tp.Q), dtype=object)
    for m, t in enumerate(tp.tuples):
        for q, i in enumerate(t.indices):
            table[m, q] = ch.x_exact[i] + ch.s_exact[q]
    return table


def multiset_decode(y: Fraction, tp: TuplePrecoder) -> int:
    """The message whose output multi-set contains the exact output y."""
    try:
        return decode_table(tp)[Fraction(y)]
    except KeyError:
        raise UnknownOutput(f"output {y} is not produced by any message") from None


def decode_table(tp: TuplePrecoder) -> dict[Fraction, int]:
    """Exact output value -> message, the union of the output multi-sets.

    Raises:
        UnknownOutput: If two messages share an output value.
    """
    owner: dict[Fraction, int] = {}
    for m, row in enumerate(_exact_outputs(tp)):
        for value in row:
            if owner.setdefault(value, m) != m:
                raise UnknownOutput(f"output {value} belongs to messages {owner[value]} and {m}")
    return owner


def _wald(errors: int, trials: int) -> SerEstimate:
    ser = errors / trials
    return SerEstimate(ser=ser, ci95=WALD_Z * math.sqrt(ser * (1.0 - ser) / trials), errors=errors, trials=trials)


def estimate_ser(tp: TuplePrecoder, cfg: SimConfig) -> SerEstimate:
    """Symbol error rate and Wald 95% half-width.

    Noise-free runs decode each exact output through `decode_table`; an output no message
    produces counts as an error.
    """
    table = decode_table(tp) if cfg.noise == "none" else None
    errors = 0
    state_counts = np.zeros(tp.Q)
    for start, size, rng in _blocks(cfg):
        block = _draw_block(tp, cfg, start, size, rng)
        if table is not None:
            decoded = np.fromiter((table.get(y, -1) for y in block.outputs), dtype=np.intp, count=size)
        else:
            decoded = ml_decode(block.outputs, tp)
        errors += int(np.count_nonzero(decoded != block.messages))
        state_counts += interference_frequencies(block.states, tp.Q) * size
    estimate = replace(_wald(errors, cfg.trials), state_frequencies=tuple(float(c) for c in state_counts / cfg.trials))
    logger.info(f"SER {estimate.ser:.6g} +/- {estimate.ci95:.2g} over {cfg.trials} trials (seed {cfg.seed})")
    return estimate


def interference_frequencies(states: Sequence[int] | np.ndarray, Q: int) -> np.ndarray:
    """Empirical state frequencies of a transmission."""
    return np.bincount(np.asarray(states, dtype=np.intp), minlength=Q) / len(states)

"""
Differential-entropy engine for the associated channel.

Purpose: Every entropy quantity the optimizers need - the g-function, the conditional-entropy
         coefficient tensor h_{i1..iQ}, h(Y), mutual information, the capacity estimate, and the
         inflection-point / convexity tests that decide the closed-form precoders
Key Decisions: Adaptive Simpson quadrature, absolute tolerance 1e-10, range truncated 10 sigma past
               the extreme mixture means, starting panels one sigma wide.
               t*log2(t) -> 0 for t below 1e-300.
               All entropies in bits.
               Coefficients are memoized on exact (rational) difference vectors, so entries with
               equal differences are bit-identical.
               The inflection point u_0 comes from d2g/du2 evaluated under the integral sign and
               bisected on [1, 2.5]; it depends on the interference pmf and is cached per pmf.
Limitations: One-dimensional outputs only; Hessian convexity checks for Q >= 3 are sampled,
             not proven
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from loguru import logger

from precoder.channel_model import (
    ChannelSpec,
    JointPmf,
    ValidatedChannel,
    gaussian_pdf,
    marginals,
    validate_channel,
)
from precoder.constants import (
    CAPACITY_SUPPORT_DUST,
    DEFAULT_ABS_TOL,
    DEFAULT_CAPACITY_MAX_ITERS,
    DEFAULT_CAPACITY_TOL,
    DEFAULT_GRID_POINTS,
    DEFAULT_MAX_SUBDIVISIONS,
    DEFAULT_TRUNCATION_SIGMAS,
    HESSIAN_SAMPLES,
    HESSIAN_STEP,
    INFLECTION_BRACKET,
    INFLECTION_XTOL,
    MIN_GRID_POINTS,
    MIN_TRUNCATION_SIGMAS,
    TINY_DENSITY,
)
from precoder.exceptions import ConfigError, RootNotBracketed, ZeroNoise
from precoder.solvers.blahut_arimoto import blahut_arimoto
from precoder.solvers.constraints import marginal_constraint_matrix, marginal_rhs
from precoder.solvers.simplex import solve_standard_form
from precoder.utilities.quadrature import integrate_adaptive_simpson

LN2 = math.log(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = DEFAULT_ABS_TOL
    truncation_sigmas: float = DEFAULT_TRUNCATION_SIGMAS
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ConfigError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.truncation_sigmas >= MIN_TRUNCATION_SIGMAS:
            raise ConfigError(f"truncation_sigmas must be >= {MIN_TRUNCATION_SIGMAS}, got {self.truncation_sigmas}")
        if self.max_subdivisions < 1:
            raise ConfigError(f"max_subdivisions must be positive, got {self.max_subdivisions}")


DEFAULT_QUADRATURE = QuadratureSettings()


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    """h[i_1, ..., i_Q] = h(Y | X_1 = x_{i_1}, ..., X_Q = x_{i_Q}) in bits, shape (M,)*Q."""

    h: np.ndarray
    evaluations: int

    @property
    def flat(self) -> np.ndarray:
        return self.h.reshape(-1)

    @property
    def M(self) -> int:
        return self.h.shape[0]

    @property
    def Q(self) -> int:
        return self.h.ndim


class Convexity(Enum):
    CONVEX_ON_RANGE = "ConvexOnRange"
    CONCAVE_ON_RANGE = "ConcaveOnRange"
    NEITHER = "Neither"


@dataclass(frozen=True)
class InflectionPoints:
    alpha_1: float
    alpha_2: float
    u_0: float


@dataclass(frozen=True, eq=False)
class CapacityResult:
    rate_bits: float
    p: JointPmf
    ba_rate_bits: float
    upper_bits: float
    iterations: int


def gaussian_entropy(p_n: float) -> float:
    """h(N) = (1/2) log2(2 pi e P_N) bits."""
    if not p_n > 0:
        raise ZeroNoise(f"Gaussian entropy needs positive power, got {p_n}")
    return 0.5 * math.log2(2.0 * math.pi * math.e * p_n)


@lru_cache(maxsize=1 << 16)
def _mixture_entropy(
    means: tuple[float, ...], weights: tuple[float, ...], noise_power: float, q: QuadratureSettings
) -> float:
    sigma = math.sqrt(noise_power)
    norm = 1.0 / math.sqrt(2.0 * math.pi * noise_power)
    inv = 1.0 / (2.0 * noise_power)
    components = [(mu, w * norm) for mu, w in zip(means, weights)]

    def integrand(z: float) -> float:
        m = 0.0
        for mu, w in components:
            d = z - mu
            m += w * math.exp(-d * d * inv)
        if m < TINY_DENSITY:
            return 0.0
        return -m * math.log2(m)

    lo = min(means) - q.truncation_sigmas * sigma
    hi = max(means) + q.truncation_sigmas * sigma
    panels = max(1, math.ceil((hi - lo) / sigma))
    value, _ = integrate_adaptive_simpson(integrand, lo, hi, q.abs_tol, q.max_subdivisions, panels)
    return value


def mixture_entropy(
    means: np.ndarray | list[float],
    weights: np.ndarray | list[float],
    noise_power: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> float:
    """Differential entropy (bits) of sum_k w_k N(mu_k, P_N); coincident means are merged."""
    if not noise_power > 0:
        raise ZeroNoise("mixture entropy needs noise_power > 0")
    merged: dict[float, float] = {}
    for mu, w in zip(np.asarray(means, dtype=float).tolist(), np.asarray(weights, dtype=float).tolist()):
        if w > 0:
            merged[mu] = merged.get(mu, 0.0) + w
    keys = tuple(sorted(merged))
    return _mixture_entropy(keys, tuple(merged[k] for k in keys), float(noise_power), q)


def g_function(u, ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """g(u_1..u_{Q-1}) = -int m log2 m, m(z) = r_1 f_N(z) + sum_q r_q f_N(z + u_{q-1} + s_1 - s_q)."""
    ch.require_noise()
    u = [float(v) for v in np.atleast_1d(np.asarray(u, dtype=float))] if ch.Q > 1 else []
    if len(u) != ch.Q - 1:
        raise ConfigError(f"g needs {ch.Q - 1} arguments for Q={ch.Q}, got {len(u)}")
    means = [0.0] + [ch.s[k] - ch.s[0] - u[k - 1] for k in range(1, ch.Q)]
    return mixture_entropy(means, ch.r, ch.noise_power, q)


@lru_cache(maxsize=128)
def coeff_tensor(ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> CoeffTensor:
    """h_{i1..iQ} = g(x_{i1} - x_{i2}, ..., x_{i1} - x_{iQ}), one g evaluation per distinct difference vector."""
    ch.require_noise()
    M, Q = ch.M, ch.Q
    by_difference: dict[tuple[Fraction, ...], float] = {}
    h = np.empty((M,) * Q)
    for idx in itertools.product(range(M), repeat=Q):
        key = tuple(ch.x_exact[idx[0]] - ch.x_exact[i] for i in idx[1:])
        if key not in by_difference:
            by_difference[key] = g_function([float(k) for k in key], ch, q)
        h[idx] = by_difference[key]
    h.setflags(write=False)
    logger.debug(f"Coefficient tensor M={M} Q={Q}: {len(by_difference)} g evaluations for {M**Q} entries")
    return CoeffTensor(h=h, evaluations=len(by_difference))


def _output_components(p: JointPmf, ch: ValidatedChannel) -> tuple[np.ndarray, np.ndarray]:
    weights = marginals(p).per_state * ch.r_array[:, None]
    means = ch.s_array[:, None] + ch.x_array[None, :]
    return means.reshape(-1), weights.reshape(-1)


def output_entropy(p: JointPmf, ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """h(Y) in bits; a function of the marginals of p only."""
    ch.require_noise()
    means, weights = _output_components(p, ch)
    return mixture_entropy(means, weights, ch.noise_power, q)


def uniform_output_entropy(ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """h(Y) for any uniform-transmission scheme (all marginals 1/M)."""
    return output_entropy(JointPmf.uniform(ch.M, ch.Q), ch, q)


def mutual_information(p: JointPmf, ch: ValidatedChannel, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """I(X_1..X_Q; Y) = h(Y) - sum_t p(t) h(t), bits."""
    if p.M != ch.M or p.Q != ch.Q:
        raise ConfigError(f"pmf shape {p.p.shape} does not match channel M={ch.M} Q={ch.Q}")
    return output_entropy(p, ch, q) - float(p.flat @ coeff_tensor(ch, q).flat)


def interference_free_rate(x, noise_power: float, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """I(X; X + N) for equiprobable X over x (the interference-free reference curve)."""
    x = np.asarray(x, dtype=float)
    return mixture_entropy(x, np.full(x.size, 1.0 / x.size), noise_power, q) - gaussian_entropy(noise_power)


# ===== CAPACITY ESTIMATE =====


def discretized_transition_matrix(ch: ValidatedChannel, truncation_sigmas: float, grid_points: int) -> np.ndarray:
    """W[k, t] proportional to f(y_k | t) times trapezoid weights on a uniform output grid; columns sum to 1."""
    lo = min(ch.x) + min(ch.s) - truncation_sigmas * ch.sigma
    hi = max(ch.x) + max(ch.s) + truncation_sigmas * ch.sigma
    y = np.linspace(lo, hi, grid_points)
    step = y[1] - y[0]
    trapezoid = np.full(grid_points, step)
    trapezoid[[0, -1]] = step / 2.0

    comp = gaussian_pdf(y[:, None, None] - ch.s_array[None, :, None] - ch.x_array[None, None, :], ch.noise_power)
    columns = np.indices((ch.M,) * ch.Q).reshape(ch.Q, -1)
    W = sum(ch.r[j] * comp[:, j, columns[j]] for j in range(ch.Q))
    W = W * trapezoid[:, None]
    return W / W.sum(axis=0)


def reduce_support(h: CoeffTensor, target: np.ndarray) -> JointPmf:
    """Basic solution of  min sum h p  s.t. marginals(p) = target, p >= 0.

    The result keeps the marginals (hence h(Y)) of `target`, has no larger
    conditional entropy, and has at most MQ - Q + 1 nonzero entries.
    """
    M, Q = h.M, h.Q
    A = marginal_constraint_matrix(M, Q)
    result = solve_standard_form(h.flat, A, marginal_rhs(target))
    p = result.x / result.x.sum()
    return JointPmf(p.reshape((M,) * Q))


def capacity_estimate(
    ch: ValidatedChannel,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    grid_points: int = DEFAULT_GRID_POINTS,
    tol: float = DEFAULT_CAPACITY_TOL,
    max_iters: int = DEFAULT_CAPACITY_MAX_ITERS,
) -> CapacityResult:
    """Capacity of the associated channel via Blahut-Arimoto on the output-discretized channel.

    The Blahut-Arimoto pmf is then reduced to a basic solution with the same
    marginals, and its rate is re-evaluated by quadrature.
    """
    ch.require_noise()
    if grid_points < MIN_GRID_POINTS:
        raise ConfigError(f"capacity grid needs at least {MIN_GRID_POINTS} points, got {grid_points}")

    W = discretized_transition_matrix(ch, q.truncation_sigmas, grid_points)
    ba = blahut_arimoto(W, tol=tol, max_iters=max_iters)
    p_ba = np.where(ba.p < CAPACITY_SUPPORT_DUST, 0.0, ba.p)
    p_ba = JointPmf((p_ba / p_ba.sum()).reshape((ch.M,) * ch.Q))

    p = reduce_support(coeff_tensor(ch, q), marginals(p_ba).per_state)
    rate = mutual_information(p, ch, q)
    logger.info(
        f"Capacity estimate {rate:.6f} bits (BA {ba.rate_bits:.6f}, upper {ba.upper_bits:.6f}) "
        f"after {ba.iterations} iterations; support {p_ba.support_size} -> {p.support_size}"
    )
    return CapacityResult(
        rate_bits=rate, p=p, ba_rate_bits=ba.rate_bits, upper_bits=ba.upper_bits, iterations=ba.iterations
    )


def constellation_capacity(
    x,
    noise_power: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    grid_points: int = DEFAULT_GRID_POINTS,
    tol: float = DEFAULT_CAPACITY_TOL,
) -> float:
    """Capacity of the interference-free AWGN channel with input alphabet x, same discretizer."""
    ch = validate_channel(ChannelSpec(x=list(x), s=[0], r=[1], noise_power=noise_power))
    return capacity_estimate(ch, q, grid_points, tol).rate_bits


# ===== INFLECTION POINTS AND CONVEXITY =====


def g_second_derivative(v: float, r_1: float, q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """d2/dv2 of the normalized g(v, 0, 0, 1) = h(r_1 N(0,1) + r_2 N(-v,1)), by differentiating under the integral."""
    r_2 = 1.0 - r_1

    def integrand(z: float) -> float:
        w = z + v
        a = INV_SQRT_2PI * math.exp(-0.5 * w * w)
        m = r_1 * INV_SQRT_2PI * math.exp(-0.5 * z * z) + r_2 * a
        if m < TINY_DENSITY:
            return 0.0
        m_v = -r_2 * w * a
        m_vv = r_2 * (w * w - 1.0) * a
        return -(m_vv * math.log2(m) + m_v * m_v / (m * LN2))

    lo = min(0.0, -v) - q.truncation_sigmas
    hi = max(0.0, -v) + q.truncation_sigmas
    value, _ = integrate_adaptive_simpson(integrand, lo, hi, q.abs_tol, q.max_subdivisions, math.ceil(hi - lo))
    return value


@lru_cache(maxsize=32)
def normalized_inflection(r_1: float) -> float:
    """Positive inflection point u_0 of g(u, 0, 0, 1) for interference pmf (r_1, 1 - r_1)."""
    lo, hi = INFLECTION_BRACKET
    f_lo, f_hi = g_second_derivative(lo, r_1), g_second_derivative(hi, r_1)
    if f_lo * f_hi > 0:
        raise RootNotBracketed(f"g'' has the same sign at {lo} and {hi} for r_1={r_1}")
    while hi - lo > INFLECTION_XTOL:
        mid = 0.5 * (lo + hi)
        f_mid = g_second_derivative(mid, r_1)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    u_0 = 0.5 * (lo + hi)
    logger.debug(f"Inflection point u_0={u_0:.9f} for r_1={r_1}")
    return u_0


def _require_two_levels(ch: ValidatedChannel) -> None:
    if ch.Q != 2:
        raise ConfigError(f"operation is defined for Q=2 only, channel has Q={ch.Q}")


def inflection_points(ch: ValidatedChannel) -> InflectionPoints:
    """alpha_{1,2} = s_2 - s_1 -/+ u_0 sqrt(P_N): g is convex between them and concave outside."""
    _require_two_levels(ch)
    ch.require_noise()
    u_0 = normalized_inflection(ch.r[0])
    centre = ch.s[1] - ch.s[0]
    return InflectionPoints(alpha_1=centre - u_0 * ch.sigma, alpha_2=centre + u_0 * ch.sigma, u_0=u_0)


def convexity_test(ch: ValidatedChannel) -> Convexity:
    """Shape of g on [x_1 - x_M, x_M - x_1] for Q=2."""
    _require_two_levels(ch)
    ch.require_noise()
    span = ch.x[-1] - ch.x[0]
    points = inflection_points(ch)
    if span <= ch.s[0] - ch.s[1] + points.u_0 * ch.sigma:
        return Convexity.CONVEX_ON_RANGE
    if span <= ch.s[1] - ch.s[0] - points.u_0 * ch.sigma:
        return Convexity.CONCAVE_ON_RANGE
    return Convexity.NEITHER


def hessian_psd_on_cube(
    ch: ValidatedChannel,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    samples: int = HESSIAN_SAMPLES,
    step: float = HESSIAN_STEP,
    tol: float = 1e-5,
) -> bool:
    """Sampled convexity check of g on the cube [x_1 - x_M, x_M - x_1]^(Q-1) via finite-difference Hessians."""
    ch.require_noise()
    dim = ch.Q - 1
    if dim == 0:
        return True
    span = ch.x[-1] - ch.x[0]
    per_axis = max(2, round(samples ** (1.0 / dim)))
    axis = np.linspace(-span, span, per_axis)
    eye = np.eye(dim) * step

    def g(u: np.ndarray) -> float:
        return g_function(np.round(u, 12), ch, q)

    for point in itertools.product(axis, repeat=dim):
        u = np.asarray(point)
        centre = g(u)
        H = np.empty((dim, dim))
        for i in range(dim):
            H[i, i] = (g(u + eye[i]) - 2.0 * centre + g(u - eye[i])) / step**2
            for j in range(i + 1, dim):
                H[i, j] = H[j, i] = (
                    g(u + eye[i] + eye[j]) - g(u + eye[i] - eye[j]) - g(u - eye[i] + eye[j]) + g(u - eye[i] - eye[j])
                ) / (4.0 * step**2)
        if np.linalg.eigvalsh(H).min() < -tol:
            logger.debug(f"g is not convex near u={point}")
            return False
    return True

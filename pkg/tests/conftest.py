import itertools
import math

import numpy as np
import pytest
from scipy.special import logsumexp

from precoder.channel_model import ChannelSpec, validate_channel
from precoder.entropy_engine import gaussian_entropy


@pytest.fixture
def make_channel():
    """Factory: make_channel(x, s, r=None, noise_power=1.0) -> ValidatedChannel (r uniform by default)."""

    def _make(x, s, r=None, noise_power=1.0):
        r = r if r is not None else [1.0 / len(s)] * len(s)
        return validate_channel(ChannelSpec(x=x, s=s, r=r, noise_power=noise_power))

    return _make


@pytest.fixture
def binary_channel(make_channel):
    """x = s = {-1, 1}, r = (1/2, 1/2); the two-regime binary example."""

    def _make(noise_power):
        return make_channel([-1, 1], [-1, 1], [0.5, 0.5], noise_power)

    return _make


@pytest.fixture
def pam4_channel(make_channel):
    """4-PAM inputs over two interference levels at unit noise."""
    return make_channel([-3, -1, 1, 3], [-2, 2], [0.5, 0.5], 1.0)


def random_channel(rng: np.random.Generator, M: int, Q: int, noise_range=(0.1, 10.0)):
    x = np.sort(rng.choice(np.arange(-40, 41), size=M, replace=False)) / 10.0
    s = np.sort(rng.choice(np.arange(-40, 41), size=Q, replace=False)) / 10.0
    r = rng.dirichlet(np.ones(Q) * 2.0)
    r = r / r.sum()
    noise_power = float(rng.uniform(*noise_range))
    return validate_channel(ChannelSpec(x=x.tolist(), s=s.tolist(), r=r.tolist(), noise_power=noise_power))


def permutation_objectives(h: np.ndarray) -> dict[tuple[int, ...], float]:
    """Mean cost of every permutation assignment of an M x M cost array."""
    M = h.shape[0]
    return {perm: float(np.mean(h[np.arange(M), list(perm)])) for perm in itertools.permutations(range(M))}


def random_feasible_pmf(rng: np.random.Generator, M: int, n_perms: int = 5) -> np.ndarray:
    """Random doubly stochastic / M: convex combination of permutation matrices."""
    weights = rng.dirichlet(np.ones(n_perms))
    p = np.zeros((M, M))
    for w in weights:
        p[np.arange(M), rng.permutation(M)] += w / M
    return p / p.sum()


def mc_mixture_entropy(means, weights, noise_power, samples=10**7, seed=7, chunk=10**6) -> float:
    """Monte Carlo differential entropy (bits) of sum_k w_k N(mu_k, P_N).

    Stratified by component with h(N) as control variate:
    h = h(N) + sum_k w_k E[log2 f_N(N) - log2 m(mu_k + N)].
    """
    rng = np.random.default_rng(seed)
    means = np.asarray(means, dtype=float)
    weights = np.asarray(weights, dtype=float)
    sigma = math.sqrt(noise_power)
    log_w = np.log(weights)
    correction = 0.0
    for k, (mu, w) in enumerate(zip(means, weights)):
        per_component = max(samples // len(means), chunk)
        total, done = 0.0, 0
        while done < per_component:
            n = rng.standard_normal(min(chunk, per_component - done)) * sigma
            # log m(mu + n) - log f_N(n) = logsumexp_l(log w_l - ((n + mu - mu_l)^2 - n^2) / 2P)
            d = mu - means
            exponent = log_w - ((n[:, None] + d) ** 2 - n[:, None] ** 2) / (2.0 * noise_power)
            total += float(np.sum(-logsumexp(exponent, axis=1)))
            done += n.size
        correction += w * total / per_component
    return gaussian_entropy(noise_power) + correction / math.log(2.0)

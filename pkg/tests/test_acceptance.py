"""End-to-end scenarios on the reference channels: regime switches, integrality, zero-error codes."""

import numpy as np
import pytest

from precoder.channel_model import ChannelSpec, validate_channel
from precoder.entropy_engine import (
    capacity_estimate,
    coeff_tensor,
    gaussian_entropy,
    inflection_points,
)
from precoder.noise_free import (
    NoneExists,
    construct_disjoint,
    exists_disjoint_exhaustive,
    output_multisets,
    verify_disjoint,
)
from precoder.precoding import ModuloPrecoder, TuplePrecoder, compare_modulo_vs_identity
from precoder.simulator import SimConfig, estimate_ser
from precoder.uniform_optimizer import (
    Solution,
    closed_form_antidiagonal,
    closed_form_diagonal,
    solve_uniform,
)
from tests.conftest import random_channel
from tests.test_noise_free import random_progression_instance


def test_inflection_constant(binary_channel):
    assert 1.634 <= inflection_points(binary_channel(1.0)).u_0 <= 1.638


class TestBinaryRegimes:
    @pytest.mark.parametrize("noise_power", [1.3, 2.0, 5.98, 6.5, 10.0, 50.0])
    def test_diagonal_at_low_snr(self, binary_channel, noise_power):
        tuples = [t.indices for t in solve_uniform(binary_channel(noise_power), "hungarian").tuples]
        assert tuples == [(0, 0), (1, 1)]

    @pytest.mark.parametrize("noise_power", [0.01, 0.1, 0.5, 1.0])
    def test_antidiagonal_at_high_snr(self, binary_channel, noise_power):
        tuples = [t.indices for t in solve_uniform(binary_channel(noise_power), "hungarian").tuples]
        assert tuples == [(0, 1), (1, 0)]

    def test_rate_at_twenty_db(self, binary_channel):
        assert solve_uniform(binary_channel(1.0).with_snr_db(20.0), "hungarian").rate_bits >= 0.99


@pytest.mark.parametrize("seed", range(50))
def test_two_level_lp_is_integral(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, M=int(rng.integers(2, 7)), Q=2)
    lp = solve_uniform(ch, "lp")
    hungarian = solve_uniform(ch, "hungarian")
    assert lp.is_integral
    assert abs(lp.objective_bits - hungarian.objective_bits) <= 1e-9


@pytest.mark.parametrize("seed", range(50))
def test_lp_support_bound(seed):
    rng = np.random.default_rng(200 + seed)
    M, Q = int(rng.integers(2, 5)), int(rng.integers(2, 4))
    solution = solve_uniform(random_channel(rng, M, Q), "lp")
    assert int(np.count_nonzero(solution.p.p > 1e-12)) <= M * Q - Q + 1


@pytest.mark.slow
@pytest.mark.parametrize("noise_power", [0.1, 1.0, 10.0])
def test_four_level_lp_matches_assignment(noise_power):
    levels = [-3, -1, 1, 3]
    ch = validate_channel(ChannelSpec(x=levels, s=levels, r=[0.25] * 4, noise_power=noise_power))
    lp = solve_uniform(ch, "lp")
    mdap = solve_uniform(ch, "mdap")
    assert abs(lp.rate_bits - mdap.rate_bits) <= 1e-6


@pytest.mark.parametrize("seed", range(50))
def test_progressions_are_zero_error(seed):
    rng = np.random.default_rng(3000 + seed)
    x, s = random_progression_instance(rng)
    tuples = construct_disjoint(x, s)
    assert verify_disjoint(output_multisets(tuples, x, s))
    ch = validate_channel(ChannelSpec(x=sorted(x), s=sorted(s), r=[1 / len(s)] * len(s), noise_power=0))
    # tuples index x and s in the order they were given
    x_rank = {v: k for k, v in enumerate(sorted(x))}
    s_order = sorted(range(len(s)), key=lambda q: s[q])
    sorted_tuples = [tuple(x_rank[x[t.indices[q]]] for q in s_order) for t in tuples]
    tp = TuplePrecoder(tuple(sorted_tuples), ch)
    adversarial = tuple(int(q) for q in rng.integers(0, len(s), size=17))
    for interference in ("iid", adversarial, (len(s) - 1,)):
        estimate = estimate_ser(tp, SimConfig(trials=100_000, noise="none", interference=interference, seed=seed))
        assert estimate.errors == 0


def test_counterexample_has_no_disjoint_system():
    assert isinstance(exists_disjoint_exhaustive([0, 1, 2, 4], [0, 1, 3]), NoneExists)


@pytest.mark.parametrize("seed", range(20))
def test_coefficient_bounds(seed):
    rng = np.random.default_rng(400 + seed)
    ch = random_channel(rng, M=int(rng.integers(2, 5)), Q=int(rng.integers(1, 4)))
    h = coeff_tensor(ch).h
    low = gaussian_entropy(ch.noise_power)
    assert np.all(h >= low - 1e-8)
    assert np.all(h <= low + ch.interference_entropy + 1e-8)


class TestClosedForms:
    def test_convex(self):
        ch = validate_channel(ChannelSpec(x=[-1, 1], s=[-0.5, 0.5], r=[0.5, 0.5], noise_power=3.5))
        solution = closed_form_diagonal(ch)
        assert isinstance(solution, Solution)
        assert abs(solution.objective_bits - solve_uniform(ch, "hungarian").objective_bits) <= 1e-8

    def test_concave_symmetric(self):
        ch = validate_channel(ChannelSpec(x=[-3, -1, 1, 3], s=[-20, 20], r=[0.5, 0.5], noise_power=1.0))
        solution = closed_form_antidiagonal(ch)
        assert isinstance(solution, Solution)
        assert abs(solution.objective_bits - solve_uniform(ch, "hungarian").objective_bits) <= 1e-8


def test_modulo_loses_to_identity():
    ch = validate_channel(ChannelSpec(x=[-1, 1], s=[-0.5, 0.5], r=[0.5, 0.5], noise_power=3.363))
    rate_modulo, rate_identity = compare_modulo_vs_identity(ModuloPrecoder.mmse(2.0, ch.noise_power, 64), ch)
    assert rate_identity >= rate_modulo


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_capacity_dominates_uniform_lp(seed):
    rng = np.random.default_rng(600 + seed)
    ch = random_channel(rng, M=int(rng.integers(2, 4)), Q=int(rng.integers(2, 4)), noise_range=(0.5, 5.0))
    capacity = capacity_estimate(ch, tol=1e-5)
    assert capacity.rate_bits >= solve_uniform(ch, "lp").rate_bits - 1e-4

import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from precoder.channel_model import (
    AssociatedSymbol,
    ChannelSpec,
    JointPmf,
    all_symbols,
    channel_from_document,
    likelihood,
    load_channel,
    marginals,
    output_pdf,
    validate_channel,
)
from precoder.exceptions import (
    BadPmf,
    ConfigError,
    IndexOutOfRange,
    NegativeNoise,
    NonIncreasingAlphabet,
    ZeroNoise,
)


class TestValidation:
    def test_valid_channel(self, binary_channel):
        ch = binary_channel(1.0)
        assert (ch.M, ch.Q) == (2, 2)
        assert ch.signal_power == pytest.approx(1.0)
        assert ch.snr_db == pytest.approx(0.0)
        assert ch.interference_entropy == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "spec, error",
        [
            (ChannelSpec(x=[-1, 1], s=[-1, 1], r=[0.6, 0.6], noise_power=1), BadPmf),
            (ChannelSpec(x=[-1, 1], s=[-1, 1], r=[0.5], noise_power=1), BadPmf),
            (ChannelSpec(x=[-1, 1], s=[-1, 1], r=[1.0, 0.0], noise_power=1), BadPmf),
            (ChannelSpec(x=[1, 1], s=[-1, 1], r=[0.5, 0.5], noise_power=1), NonIncreasingAlphabet),
            (ChannelSpec(x=[-1, 1], s=[1, -1], r=[0.5, 0.5], noise_power=1), NonIncreasingAlphabet),
            (ChannelSpec(x=[-1, 1], s=[-1, 1], r=[0.5, 0.5], noise_power=-1), NegativeNoise),
            (ChannelSpec(x=[1], s=[0], r=[1], noise_power=1), ConfigError),
        ],
    )
    def test_invalid_channels(self, spec, error):
        with pytest.raises(error):
            validate_channel(spec)

    def test_exact_values_keep_decimal_inputs(self, make_channel):
        ch = make_channel([0.1, 0.2], [0.0])
        assert ch.x_exact[1] - ch.x_exact[0] == ch.x_exact[0]

    def test_zero_noise_is_valid_but_not_for_likelihoods(self, make_channel):
        ch = make_channel([-1, 1], [-1, 1], noise_power=0)
        assert ch.snr_db == math.inf
        with pytest.raises(ZeroNoise):
            likelihood(0.0, AssociatedSymbol((0, 1)), ch)

    def test_with_snr_db(self, binary_channel):
        ch = binary_channel(1.0).with_snr_db(20.0)
        assert ch.noise_power == pytest.approx(0.01)
        assert ch.snr_db == pytest.approx(20.0)


class TestDocuments:
    def test_snr_document(self):
        ch = channel_from_document({"x": [-1, 1], "s": [-1, 1], "snr_db": 0})
        assert ch.noise_power == pytest.approx(1.0)
        assert ch.r == (0.5, 0.5)

    def test_both_noise_and_snr_rejected(self):
        with pytest.raises(ConfigError):
            channel_from_document({"x": [-1, 1], "s": [0], "snr_db": 0, "noise_power": 1})

    def test_missing_alphabet(self):
        with pytest.raises(ConfigError):
            channel_from_document({"x": [-1, 1], "noise_power": 1})

    @pytest.mark.parametrize("r", [[], None, 0.5])
    def test_explicit_r_is_not_defaulted(self, r):
        with pytest.raises(BadPmf):
            channel_from_document({"x": [-1, 1], "s": [-1, 1], "r": r, "noise_power": 1})

    def test_load_channel(self, tmp_path):
        path = tmp_path / "channel.json"
        path.write_text(json.dumps({"x": [-3, -1, 1, 3], "s": [-0.5, 0.5], "r": [0.25, 0.75], "noise_power": 0.1}))
        ch = load_channel(path)
        assert ch.x == (-3.0, -1.0, 1.0, 3.0)
        assert ch.r == (0.25, 0.75)
        assert ch.noise_power == pytest.approx(0.1)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_channel(tmp_path / "missing.json")


class TestLikelihood:
    def test_worked_value(self, binary_channel):
        # t = (x_1, x_2): means x_1 + s_1 = -2 and x_2 + s_2 = 2, both 2 away from y = 0
        value = likelihood(0.0, AssociatedSymbol((0, 1)), binary_channel(1.0))
        assert value == pytest.approx(math.exp(-2.0) / math.sqrt(2.0 * math.pi), abs=1e-12)

    def test_single_level_is_gaussian(self, make_channel):
        ch = make_channel([-1, 1], [0.5], [1.0], 2.0)
        y = np.linspace(-5, 5, 11)
        expected = np.exp(-np.square(y - 1.5) / 4.0) / math.sqrt(4.0 * math.pi)
        np.testing.assert_allclose(likelihood(y, AssociatedSymbol((1,)), ch), expected, atol=1e-15)

    @pytest.mark.parametrize("t", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_integrates_to_one(self, binary_channel, t):
        ch = binary_channel(0.5)
        value, _ = quad(lambda y: likelihood(y, AssociatedSymbol(t), ch), -30, 30, points=[-2, 0, 2], limit=200)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_index_out_of_range(self, binary_channel):
        with pytest.raises(IndexOutOfRange):
            likelihood(0.0, AssociatedSymbol((0, 2)), binary_channel(1.0))
        with pytest.raises(IndexOutOfRange):
            likelihood(0.0, AssociatedSymbol((0,)), binary_channel(1.0))


class TestJointPmf:
    def test_marginals_of_diagonal(self):
        p = JointPmf(np.array([[0.5, 0.0], [0.0, 0.5]]))
        np.testing.assert_allclose(marginals(p).per_state, [[0.5, 0.5], [0.5, 0.5]])
        assert marginals(p).is_uniform()

    def test_dust_becomes_zero(self):
        p = JointPmf(np.array([[0.5, 1e-14], [0.0, 0.5]]))
        assert p.support_size == 2
        assert [t.indices for t in p.support()] == [(0, 0), (1, 1)]

    def test_rejects_bad_sum(self):
        with pytest.raises(BadPmf):
            JointPmf(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_negative(self):
        with pytest.raises(BadPmf):
            JointPmf(np.array([[0.6, -0.1], [0.0, 0.5]]))

    def test_uniform_over_and_point_mass(self):
        p = JointPmf.uniform_over([AssociatedSymbol((0, 1)), AssociatedSymbol((1, 0))], 2, 2)
        assert p.mass(AssociatedSymbol((0, 1))) == pytest.approx(0.5)
        assert JointPmf.point_mass(AssociatedSymbol((1, 0, 1)), 2).p.shape == (2, 2, 2)

    @pytest.mark.parametrize("weight", [0.0, 0.3, 1.0])
    def test_marginals_are_linear(self, weight):
        rng = np.random.default_rng(5)
        first = rng.dirichlet(np.ones(27)).reshape(3, 3, 3)
        second = rng.dirichlet(np.ones(27)).reshape(3, 3, 3)
        mixed = marginals(JointPmf(weight * first + (1.0 - weight) * second)).per_state
        first_m, second_m = marginals(JointPmf(first)).per_state, marginals(JointPmf(second)).per_state
        np.testing.assert_allclose(mixed, weight * first_m + (1.0 - weight) * second_m, atol=1e-14)

    def test_all_symbols_order(self):
        assert [t.indices for t in all_symbols(2, 2)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert AssociatedSymbol((0, 2)).one_based() == [1, 3]


class TestOutputPdf:
    def test_depends_only_on_marginals(self, make_channel):
        ch = make_channel([-1, 0, 1], [-0.5, 0.5], [0.3, 0.7], 0.4)
        uniform = JointPmf.uniform(3, 2)
        permutation = JointPmf.uniform_over([AssociatedSymbol((i, (i + 1) % 3)) for i in range(3)], 3, 2)
        y = np.random.default_rng(1).uniform(-4, 4, 100)
        np.testing.assert_allclose(output_pdf(y, uniform, ch), output_pdf(y, permutation, ch), atol=1e-12)

    def test_point_mass_matches_likelihood(self, binary_channel):
        ch = binary_channel(0.7)
        t = AssociatedSymbol((1, 0))
        y = np.linspace(-4, 4, 17)
        np.testing.assert_allclose(output_pdf(y, JointPmf.point_mass(t, 2), ch), likelihood(y, t, ch), atol=1e-14)

    @pytest.mark.parametrize("seed", range(3))
    def test_integrates_to_one(self, make_channel, seed):
        ch = make_channel([-1, 0, 1], [-0.5, 0.5], [0.3, 0.7], 0.4)
        p = JointPmf(np.random.default_rng(seed).dirichlet(np.ones(9)).reshape(3, 3))
        means = sorted({xi + si for xi in ch.x for si in ch.s})
        value, _ = quad(lambda y: output_pdf(y, p, ch), -30, 30, points=means, limit=400, epsabs=1e-12, epsrel=1e-12)
        assert value == pytest.approx(1.0, abs=1e-9)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from sigtab.moments import (
    moment_feature_matrix,
    moment_feature_names,
    moment_feature_row,
    moments,
)
from sigtab.series import LookbackWindow

from conftest import make_history
from oracles import moments_oracle


class TestMoments:
    def test_constant_window(self):
        m = moments(np.full(10, 3.25), LookbackWindow(10))
        assert m.as_tuple() == (3.25, 0.0, 0.0, 0.0)

    def test_two_point_window(self):
        m = moments(np.array([-1.0, 1.0]), LookbackWindow(2))
        assert m.mean == 0.0
        assert m.variance == 1.0
        assert m.skewness == 0.0
        assert m.kurtosis == -2.0

    def test_symmetric_window_zero_skew(self, rng):
        half = rng.normal(size=20)
        x = np.concatenate([half, -half])
        assert moments(x, LookbackWindow(40)).skewness == pytest.approx(0.0, abs=1e-12)

    def test_insufficient_data(self):
        assert moments(np.ones(5), LookbackWindow(6)) is None

    def test_against_power_sum_oracle(self, rng):
        for _ in range(50):
            x = rng.normal(loc=rng.uniform(-1, 1), scale=rng.uniform(0.5, 2), size=63)
            got = moments(x, LookbackWindow(63)).as_tuple()
            want = moments_oracle(x)
            np.testing.assert_allclose(got, want, rtol=1e-12)

    @given(
        shift=hst.floats(-5, 5),
        scale=hst.floats(0.1, 10),
        seed=hst.integers(0, 2**32 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_affine_invariance_of_shape_moments(self, shift, scale, seed):
        x = np.random.default_rng(seed).normal(size=30)
        base = moments(x, LookbackWindow(30))
        mapped = moments(scale * x + shift, LookbackWindow(30))
        assert mapped.skewness == pytest.approx(base.skewness, rel=1e-9, abs=1e-9)
        assert mapped.kurtosis == pytest.approx(base.kurtosis, rel=1e-9, abs=1e-9)

    def test_sign_flip(self, rng):
        x = rng.normal(size=40) ** 3  # skewed
        base = moments(x, LookbackWindow(40))
        flipped = moments(-x, LookbackWindow(40))
        assert flipped.skewness == pytest.approx(-base.skewness, rel=1e-12)
        assert flipped.kurtosis == pytest.approx(base.kurtosis, rel=1e-12)


class TestMomentFeatureRow:
    def test_width_is_12(self, rng):
        prices = 100 * np.exp(rng.normal(0, 0.02, 300).cumsum())
        row = moment_feature_row(make_history(prices), 299)
        assert row is not None and len(row) == 12
        assert list(row) == moment_feature_names()

    def test_insufficient_history_absent(self, rng):
        prices = 100 * np.exp(rng.normal(0, 0.02, 300).cumsum())
        assert moment_feature_row(make_history(prices), 251) is None  # needs 253 prices
        assert moment_feature_row(make_history(prices), 252) is not None

    def test_constant_price_all_zero(self):
        row = moment_feature_row(make_history(np.full(300, 42.0)), 299)
        assert set(row.values()) == {0.0}

    def test_window_means_agree_on_iid_returns(self, rng):
        # per-day mean over 21 and 252 days estimates the same drift
        mu = 0.001
        prices = 100 * np.exp(rng.normal(mu, 0.002, 2000).cumsum())
        history = make_history(prices)
        mat = moment_feature_matrix(history, list(range(253, 2000, 50)))
        names = moment_feature_names()
        m21 = mat[:, names.index("stats.mean.w21")]
        m252 = mat[:, names.index("stats.mean.w252")]
        # both unbiased for mu; agreement within a few sampling sigmas
        assert abs(m21.mean() - mu) < 4 * 0.002 / np.sqrt(21 * len(mat))
        assert abs(m21.mean() - m252.mean()) < 5 * 0.002 / np.sqrt(21)

    def test_matches_single_window_moments(self, gbm_history):
        row = moment_feature_row(gbm_history, 260)
        logp = gbm_history.channel("log_price")
        r = np.diff(logp)
        for k in (21, 63, 252):
            w = r[260 - k: 260]
            m = moments(w, LookbackWindow(k))
            assert row[f"stats.mean.w{k}"] == pytest.approx(m.mean, rel=1e-12)
            assert row[f"stats.variance.w{k}"] == pytest.approx(m.variance, rel=1e-12)
            assert row[f"stats.skewness.w{k}"] == pytest.approx(m.skewness, rel=1e-12)
            assert row[f"stats.kurtosis.w{k}"] == pytest.approx(m.kurtosis, rel=1e-12)

import datetime as dt
import math

import numpy as np
import pytest

from sigtab.errors import InvalidInputError
from sigtab.series import (
    LookbackWindow,
    OhlcBar,
    average_price,
    build_price_path,
    log_return_series,
    moving_average,
)

from conftest import make_bars, make_history


class TestAveragePrice:
    def test_identity_case(self):
        bar = OhlcBar(dt.date(2020, 1, 1), 10, 10, 10, 10)
        assert average_price(bar) == 10

    def test_direct_arithmetic(self):
        assert average_price(OhlcBar(dt.date(2020, 1, 1), 8, 12, 6, 10)) == 9
        assert average_price(OhlcBar(dt.date(2020, 1, 1), 100, 101, 99, 100)) == 100

    def test_nonpositive_price_rejected(self):
        with pytest.raises(InvalidInputError):
            OhlcBar(dt.date(2020, 1, 1), -1, 12, -2, 10)

    def test_unbracketed_prices_rejected(self):
        with pytest.raises(InvalidInputError):
            OhlcBar(dt.date(2020, 1, 1), 8, 9, 6, 10)  # high < close


class TestLogReturns:
    def test_exact_logs(self):
        out = log_return_series(np.array([1.0, math.e, math.e ** 2]))
        np.testing.assert_allclose(out, [1.0, 1.0], rtol=1e-14)

    def test_constant_series(self):
        np.testing.assert_array_equal(log_return_series(np.array([5.0, 5.0, 5.0])), [0.0, 0.0])

    def test_direct_arithmetic(self):
        out = log_return_series(np.array([100.0, 110.0]))
        np.testing.assert_allclose(out, [math.log(1.1)], rtol=1e-14)
        assert out[0] == pytest.approx(0.09531, abs=1e-5)

    def test_scale_invariance(self, rng):
        p = np.exp(rng.normal(size=50).cumsum()) * 10
        np.testing.assert_allclose(
            log_return_series(p), log_return_series(3.7 * p), rtol=0, atol=1e-12
        )

    def test_nonpositive_rejected(self):
        with pytest.raises(InvalidInputError):
            log_return_series(np.array([1.0, 0.0]))
        with pytest.raises(InvalidInputError):
            log_return_series(np.array([1.0]))


class TestMovingAverage:
    def test_arithmetic_mean(self):
        out = moving_average(np.array([1.0, 2, 3, 4]), LookbackWindow(2))
        assert np.isnan(out[0])
        np.testing.assert_allclose(out[1:], [1.5, 2.5, 3.5])

    def test_constant_tail(self):
        out = moving_average(np.full(10, 4.2), LookbackWindow(4))
        np.testing.assert_allclose(out[3:], 4.2)

    def test_direct_arithmetic(self):
        out = moving_average(np.array([1.0, 1.0, 4.0]), LookbackWindow(3))
        assert np.isnan(out[:2]).all()
        assert out[2] == 2.0

    def test_window_larger_than_series(self):
        out = moving_average(np.array([1.0, 2.0]), LookbackWindow(5))
        assert np.isnan(out).all() and out.shape == (2,)

    def test_window_size_validated(self):
        with pytest.raises(InvalidInputError):
            LookbackWindow(1)


class TestBuildPricePath:
    def test_constant_price_passthrough(self):
        history = make_history(np.full(40, 7.0))
        present = history.fully_present_rows()
        assert present[20:].all() and not present[:20].any()
        np.testing.assert_allclose(history.values[20:], math.log(7.0), rtol=1e-14)

    def test_exact_warmup(self):
        history = make_history(np.linspace(10, 20, 21))
        assert history.fully_present_rows().sum() == 1

    def test_linear_log_price_ma_lag(self):
        # geometric ramp: log price linear in t, MAs lag by (k-1)/2 steps
        t = np.arange(120)
        history = make_history(np.exp(0.01 * t))
        logp = history.channel("log_price")
        np.testing.assert_allclose(np.diff(logp), 0.01, rtol=1e-10)
        ma5 = history.channel("ma5")[20:]
        ma21 = history.channel("ma21")[20:]
        np.testing.assert_allclose(logp[20:] - ma5, 0.01 * (5 - 1) / 2, rtol=1e-10)
        np.testing.assert_allclose(logp[20:] - ma21, 0.01 * (21 - 1) / 2, rtol=1e-10)

    def test_unsorted_dates_rejected(self):
        bars = make_bars(np.full(30, 5.0))
        bars[3], bars[4] = bars[4], bars[3]
        with pytest.raises(InvalidInputError):
            build_price_path("a", bars)

    def test_too_few_bars_rejected(self):
        with pytest.raises(InvalidInputError):
            build_price_path("a", make_bars(np.full(19, 5.0)))

    def test_shift_equivariance(self, rng):
        # prepending data strictly before a window leaves later rows unchanged
        prices = np.exp(rng.normal(0, 0.01, 80).cumsum()) * 50
        early = make_history(prices[20:])
        full = make_history(prices)
        np.testing.assert_allclose(full.values[40:], early.values[20:], rtol=0, atol=1e-12)

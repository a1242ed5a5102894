import datetime as dt

import numpy as np
import pytest

from sigtab.calendar import TradingCalendar
from sigtab.series import OhlcBar, build_price_path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_calendar():
    return TradingCalendar.business_days(dt.date(2020, 1, 1), dt.date(2021, 12, 31))


def make_bars(prices, start=dt.date(2020, 1, 1)):
    """Flat OHLC bars (o=h=l=c) on consecutive business days."""
    cal = TradingCalendar.business_days(start, start + dt.timedelta(days=int(len(prices) * 1.6) + 10))
    return [OhlcBar(d, p, p, p, p) for d, p in zip(cal.dates, prices)]


def make_history(prices, start=dt.date(2020, 1, 1), asset="assetX"):
    return build_price_path(asset, make_bars(prices, start))


@pytest.fixture
def gbm_history(rng):
    """300 days of geometric-random-walk prices as a 3-channel path."""
    rets = rng.normal(0.0003, 0.02, 300)
    prices = 100.0 * np.exp(np.cumsum(rets))
    return make_history(prices)

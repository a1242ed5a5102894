"""Trading calendar with weekly anchors.

A calendar is an ordered set of daily trading dates plus one "weekly anchor"
per ISO week: the last trading day of that week (a Friday unless the Friday
is missing from the daily calendar, in which case the latest earlier day of
the same ISO week is used).  Weekly anchors are the keys of every weekly
cross-section downstream.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from .errors import InvalidInputError


def _iso_week_key(d: dt.date) -> tuple[int, int]:
    iso = d.isocalendar()
    return (iso[0], iso[1])


def weekly_anchors(dates: list[dt.date]) -> list[dt.date]:
    """Last trading day of each ISO week, in chronological order."""
    last: dict[tuple[int, int], dt.date] = {}
    for d in dates:
        last[_iso_week_key(d)] = d  # dates are sorted, later wins
    return sorted(last.values())


@dataclass(frozen=True)
class TradingCalendar:
    """Ordered daily trading dates and their weekly anchors."""

    dates: tuple[dt.date, ...]
    anchors: tuple[dt.date, ...] = field(default=())

    def __post_init__(self):
        if not self.dates:
            raise InvalidInputError("calendar must contain at least one date")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise InvalidInputError(f"calendar dates not strictly increasing at {a} -> {b}")
        if not self.anchors:
            object.__setattr__(self, "anchors", tuple(weekly_anchors(list(self.dates))))
        date_set = set(self.dates)
        for a in self.anchors:
            if a not in date_set:
                raise InvalidInputError(f"weekly anchor {a} is not a trading date")

    @classmethod
    def from_dates(cls, dates) -> "TradingCalendar":
        return cls(dates=tuple(dates))

    @classmethod
    def business_days(cls, start: dt.date, end: dt.date) -> "TradingCalendar":
        """Monday-to-Friday calendar between start and end inclusive."""
        if start > end:
            raise InvalidInputError(f"calendar start {start} after end {end}")
        out = []
        d = start
        while d <= end:
            if d.weekday() < 5:
                out.append(d)
            d += dt.timedelta(days=1)
        return cls(dates=tuple(out))

    def index_of(self, d: dt.date) -> int:
        """Position of a trading date; raises if absent."""
        i = self._index().get(d)
        if i is None:
            raise InvalidInputError(f"{d} is not a trading date")
        return i

    def __contains__(self, d: dt.date) -> bool:
        return d in self._index()

    def __len__(self) -> int:
        return len(self.dates)

    def _index(self) -> dict[dt.date, int]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {d: i for i, d in enumerate(self.dates)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def anchors_between(self, start: dt.date, end: dt.date) -> list[dt.date]:
        """Weekly anchors within [start, end] inclusive."""
        return [a for a in self.anchors if start <= a <= end]

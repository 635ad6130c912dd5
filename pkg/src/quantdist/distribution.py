"""Mergeable value distributions with exact sums and geometric histograms.

A Distribution accumulates observed standard-unit values. It always
maintains the bucketed histogram; alongside it, raw samples are kept
until ``exact_cap`` is exceeded, after which they are dropped and stats
fall back to histogram estimates. Merging is commutative and associative,
and every derived artifact (sum partials, histogram, sorted samples) is
a pure function of the observed multiset, so shards can be combined in
any order and still serialize byte-identically.

Sums use Shewchuk-style error-free accumulation: ``_partials`` represents
the exact sum of all observed values, independent of insertion order.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from . import kernels

DEFAULT_EXACT_CAP = 4096


def add_partial(partials: list[float], x: float) -> None:
    """Fold one float into an error-free partial-sum list, in place."""
    if x == 0.0:
        return
    i = 0
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo:
            partials[i] = lo
            i += 1
        x = hi
    if not math.isfinite(x):
        raise OverflowError("running sum overflowed float range")
    partials[i:] = [x] if x else []


def canonical_partials(partials: list[float]) -> list[float]:
    """Reduce partials to the greedy round-to-nearest expansion of the sum.

    The result depends only on the exact value represented, not on the
    order values were folded in, which makes serialized sums reproducible
    across merge orders.
    """
    parts = list(partials)
    out: list[float] = []
    while parts:
        hi = math.fsum(parts)
        if hi == 0.0:
            break
        out.append(hi)
        add_partial(parts, -hi)
        parts = [p for p in parts if p != 0.0]
    return out


class Distribution:
    """Streaming multiset summary: count, extrema, exact sum, histogram."""

    __slots__ = ("count", "minimum", "maximum", "_partials", "buckets", "exact", "exact_cap")

    def __init__(self, exact_cap: int = DEFAULT_EXACT_CAP):
        if exact_cap < 0:
            raise ValueError("exact_cap must be >= 0")
        self.count = 0
        self.minimum: float | None = None
        self.maximum: float | None = None
        self._partials: list[float] = []
        self.buckets: Counter[int] = Counter()
        self.exact: list[float] | None = []
        self.exact_cap = exact_cap

    # ------------------------------------------------------------------
    # ingestion

    def observe(self, value: float) -> None:
        if not math.isfinite(value):
            raise ValueError(f"cannot observe non-finite value {value!r}")
        value = value + 0.0  # fold -0.0
        self.count += 1
        if self.minimum is None or value < self.minimum:
            self.minimum = value
        if self.maximum is None or value > self.maximum:
            self.maximum = value
        add_partial(self._partials, value)
        self.buckets[kernels.bucket_index(value)] += 1
        if self.exact is not None:
            self.exact.append(value)
            if len(self.exact) > self.exact_cap:
                self.exact = None  # spill: histogram already has everything

    def observe_many(self, values) -> None:
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.size == 0:
            return
        if not np.all(np.isfinite(values)):
            raise ValueError("cannot observe non-finite values")
        values = values + 0.0
        self.count += int(values.size)
        lo = float(values.min())
        hi = float(values.max())
        if self.minimum is None or lo < self.minimum:
            self.minimum = lo
        if self.maximum is None or hi > self.maximum:
            self.maximum = hi
        for v in values:
            add_partial(self._partials, float(v))
        ids, counts = kernels.accumulate(values)
        for bid, c in zip(ids, counts):
            self.buckets[int(bid)] += int(c)
        if self.exact is not None:
            if len(self.exact) + values.size > self.exact_cap:
                self.exact = None
            else:
                self.exact.extend(float(v) for v in values)

    # ------------------------------------------------------------------
    # monoid structure

    def copy(self) -> "Distribution":
        out = Distribution(self.exact_cap)
        out.count = self.count
        out.minimum = self.minimum
        out.maximum = self.maximum
        out._partials = list(self._partials)
        out.buckets = Counter(self.buckets)
        out.exact = None if self.exact is None else list(self.exact)
        return out

    def merge(self, other: "Distribution") -> "Distribution":
        """Combine two summaries; neither input is mutated."""
        if self.exact_cap != other.exact_cap:
            raise ValueError(
                f"exact_cap mismatch: {self.exact_cap} vs {other.exact_cap}"
            )
        out = self.copy()
        out.count += other.count
        for bound in (other.minimum, other.maximum):
            if bound is not None:
                if out.minimum is None or bound < out.minimum:
                    out.minimum = bound
                if out.maximum is None or bound > out.maximum:
                    out.maximum = bound
        for p in other._partials:
            add_partial(out._partials, p)
        out.buckets.update(other.buckets)
        if out.exact is None or other.exact is None:
            out.exact = None
        else:
            out.exact = out.exact + other.exact
            if len(out.exact) > self.exact_cap:
                out.exact = None
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        mine = None if self.exact is None else sorted(self.exact)
        theirs = None if other.exact is None else sorted(other.exact)
        return (
            self.count == other.count
            and self.minimum == other.minimum
            and self.maximum == other.maximum
            and canonical_partials(self._partials) == canonical_partials(other._partials)
            and +self.buckets == +other.buckets
            and mine == theirs
            and self.exact_cap == other.exact_cap
        )

    def __repr__(self) -> str:
        mode = "exact" if self.exact is not None else "histogram"
        return f"Distribution(count={self.count}, mode={mode})"

    # ------------------------------------------------------------------
    # derived statistics

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def sum_partials(self) -> list[float]:
        return canonical_partials(self._partials)

    def sum(self) -> float:
        return math.fsum(self._partials)

    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("mean of empty distribution")
        return self.sum() / self.count

    def sorted_exact(self) -> list[float]:
        if self.exact is None:
            raise ValueError("exact samples were spilled")
        return sorted(self.exact)

    def order_statistic(self, rank: int) -> float:
        """Value of the rank-th smallest sample (1-indexed).

        Exact when raw samples are retained; otherwise estimated from the
        histogram by geometric interpolation inside the covering bucket,
        which keeps the result within one bucket width of the true sample
        for values inside the covered magnitude range.
        """
        if not 1 <= rank <= self.count:
            raise ValueError(f"rank {rank} outside 1..{self.count}")
        if self.exact is not None:
            return self.sorted_exact()[rank - 1]
        seen = 0
        for bid in sorted(self.buckets):
            n = self.buckets[bid]
            if rank <= seen + n:
                return _bucket_value(bid, rank - seen, n)
            seen += n
        raise AssertionError("bucket mass does not cover count")

    def median(self) -> float:
        """Median with a geometric midpoint for even same-sign middles."""
        if self.count == 0:
            raise ValueError("median of empty distribution")
        n = self.count
        if n % 2 == 1:
            return self.order_statistic(n // 2 + 1)
        a = self.order_statistic(n // 2)
        b = self.order_statistic(n // 2 + 1)
        return _middle(a, b)

    def quantile(self, q: float) -> float:
        """Order statistic at fraction q, interpolating between ranks."""
        if not 0.0 <= q <= 1.0:
            raise ValueError("quantile fraction must be in [0, 1]")
        if self.count == 0:
            raise ValueError("quantile of empty distribution")
        pos = 1 + q * (self.count - 1)
        lo_rank = math.floor(pos)
        hi_rank = math.ceil(pos)
        lo = self.order_statistic(lo_rank)
        if hi_rank == lo_rank:
            return lo
        hi = self.order_statistic(hi_rank)
        frac = pos - lo_rank
        if lo > 0 and hi > 0:
            return lo * (hi / lo) ** frac
        if lo < 0 and hi < 0:
            return -(-lo) * ((-hi) / (-lo)) ** frac
        return lo + (hi - lo) * frac

    def stats(self) -> dict:
        """Summary fields used by query answers and exports."""
        if self.count == 0:
            raise ValueError("stats of empty distribution")
        return {
            "median": self.median(),
            "mean": self.mean(),
            "p5": self.quantile(0.05),
            "p95": self.quantile(0.95),
            "min": self.minimum,
            "max": self.maximum,
            "count": self.count,
        }


def _middle(a: float, b: float) -> float:
    """Midpoint of the two central samples: geometric when signs agree."""
    if a > 0 and b > 0:
        return math.sqrt(a) * math.sqrt(b)
    if a < 0 and b < 0:
        return -(math.sqrt(-a) * math.sqrt(-b))
    return (a + b) / 2.0


def _bucket_value(signed_id: int, j: int, n: int) -> float:
    """Estimated value of the j-th of n samples (in value order) in a bucket."""
    if signed_id == 0:
        return 0.0
    f = (j - 0.5) / n
    p = abs(signed_id) - 1
    if signed_id < 0:
        # value order inside a negative bucket descends in magnitude
        f = 1.0 - f
    mag = 10.0 ** ((p + f) / kernels.BUCKETS_PER_DECADE - kernels.DECADES_BELOW)
    return mag if signed_id > 0 else -mag

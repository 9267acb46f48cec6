"""Relative-error quantile sketch with uniform pairwise bucket collapse.

The sketch is an exponential histogram: value x > 0 lands in bucket
``i = ceil(log_gamma(x))``, i.e. bucket i covers ``(gamma^(i-1), gamma^i]``
with ``gamma = (1 + alpha) / (1 - alpha)``.  Reporting the bucket midpoint
``2 * gamma^i / (gamma + 1)`` guarantees relative error at most alpha for
any quantile, as long as the number of buckets stays within the space
bound.  When it does not, buckets are merged pair by pair (``i -> ceil(i/2)``),
squaring gamma and degrading alpha to ``2*alpha / (1 + alpha^2)``.

Counters are real-valued because distributed averaging halves them; for
plain insert/remove streams they stay integer-valued.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Sketch",
    "AccuracyBound",
    "IncompatibleSketches",
    "EmptySketch",
    "Underflow",
    "bucket_index",
    "theoretical_bound",
]

# Collapse cap: gamma0^(2^64) overflows any float, so two sketches that
# cannot be aligned within 64 collapses were never compatible.
MAX_COLLAPSES = 64

_SNAP_ULPS = 4.0


class IncompatibleSketches(ValueError):
    """Raised when two sketches were not built from the same initial alpha."""


class EmptySketch(ValueError):
    """Raised when querying a sketch that holds no items."""


class Underflow(ValueError):
    """Raised when removing an item whose bucket has no remaining count."""


def _snapped_ratio(x, ln_gamma):
    """log_gamma(x) with near-integer results snapped onto the integer.

    The bucket boundary gamma^i is right-inclusive.  Computing
    ``log(x)/log(gamma)`` for x == gamma^i lands within a few ulp of i on
    either side; snapping anything within 4 ulp of an integer makes the
    boundary reproducible and keeps ``ceil`` from overshooting by one.
    """
    r = np.log(x) / ln_gamma
    n = np.rint(r)
    snap = np.abs(r - n) <= _SNAP_ULPS * np.spacing(np.maximum(np.abs(r), 1.0))
    return np.where(snap, n, r)


def bucket_index(x, gamma):
    """Index of the bucket holding value x: ``ceil(log_gamma(x))``.

    Accepts a scalar or an array; x must be strictly positive and
    gamma > 1.
    """
    if gamma <= 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite and strictly positive")
    idx = np.ceil(_snapped_ratio(arr, np.log(gamma))).astype(np.int64)
    if np.ndim(x) == 0:
        return int(idx)
    return idx


def _ceil_div(i: int, n: int) -> int:
    return -((-i) // n)


class AccuracyBound:
    """Worst-case accuracy reachable in m buckets over a known value range."""

    def __init__(self, gamma_tilde: float, alpha_hat: float):
        self.gamma_tilde = gamma_tilde
        self.alpha_hat = alpha_hat

    def __repr__(self):
        return f"AccuracyBound(gamma_tilde={self.gamma_tilde!r}, alpha_hat={self.alpha_hat!r})"


def theoretical_bound(x_min: float, x_max: float, m: int) -> AccuracyBound:
    """Accuracy floor for inputs in [x_min, x_max] under a bound of m buckets.

    gamma_tilde is the resolution at which m - 1 buckets exactly tile the
    range; collapsing can at worst land one doubling past it, so the error
    bound is the alpha corresponding to gamma_tilde squared:
    ``alpha_hat = (gamma_tilde^2 - 1) / (gamma_tilde^2 + 1)``.
    """
    if not (0.0 < x_min <= x_max) or not math.isfinite(x_max):
        raise ValueError("need 0 < x_min <= x_max and finite values")
    if m < 2:
        raise ValueError(f"bucket bound must be >= 2, got {m}")
    gamma_tilde = (x_max / x_min) ** (1.0 / (m - 1))
    alpha_hat = (gamma_tilde**2 - 1.0) / (gamma_tilde**2 + 1.0)
    return AccuracyBound(gamma_tilde, alpha_hat)


class Sketch:
    """Sparse exponential-histogram quantile summary.

    Buckets are kept in a dict keyed by signed index at the *current*
    collapse level; indices at level k are derived from the base-gamma
    index by exact integer ceil-halving, so collapsing existing buckets
    and re-indexing fresh values agree bit for bit.
    """

    __slots__ = ("alpha", "gamma", "base_alpha", "collapse_count", "max_buckets",
                 "buckets", "_ln_gamma0")

    def __init__(self, alpha: float, max_buckets: int):
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if max_buckets < 2:
            raise ValueError(f"max_buckets must be >= 2, got {max_buckets}")
        self.base_alpha = float(alpha)
        self.alpha = float(alpha)
        self.gamma = (1.0 + alpha) / (1.0 - alpha)
        self.collapse_count = 0
        self.max_buckets = int(max_buckets)
        self.buckets: dict[int, float] = {}
        self._ln_gamma0 = math.log(self.gamma)

    # -- indexing ----------------------------------------------------------

    def _base_indices(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.float64)
        if arr.size and (np.any(arr <= 0.0) or not np.all(np.isfinite(arr))):
            raise ValueError("values must be finite and strictly positive")
        return np.ceil(_snapped_ratio(arr, self._ln_gamma0)).astype(np.int64)

    def index_of(self, x: float) -> int:
        """Bucket index of x at the sketch's current collapse level."""
        raw = int(self._base_indices(np.float64(x)))
        return _ceil_div(raw, 1 << self.collapse_count)

    def value_of(self, index: int) -> float:
        """Midpoint value reported for a bucket: ``2*gamma^i / (gamma + 1)``."""
        return 2.0 * math.exp(index * math.log(self.gamma)) / (self.gamma + 1.0)

    # -- mutation ----------------------------------------------------------

    def insert(self, x: float) -> None:
        """Add one occurrence of x, collapsing if the space bound is hit."""
        i = self.index_of(x)
        self.buckets[i] = self.buckets.get(i, 0.0) + 1.0
        while len(self.buckets) > self.max_buckets:
            self.uniform_collapse()

    def extend(self, values) -> None:
        """Bulk insert.  Equivalent to inserting each value in turn.

        Values are binned at the base resolution in one vectorized pass,
        then collapsed to the current level; deferring collapses this way
        yields the same sketch because the final collapse depth depends
        only on the multiset of values.
        """
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            return
        raw = self._base_indices(arr)
        shift = 1 << self.collapse_count
        idx, counts = np.unique(-(-raw // shift), return_counts=True)
        for i, c in zip(idx.tolist(), counts.tolist()):
            self.buckets[i] = self.buckets.get(i, 0.0) + c
        while len(self.buckets) > self.max_buckets:
            self.uniform_collapse()

    def remove(self, x: float) -> None:
        """Drop one occurrence of x (the bucket it maps to under current gamma)."""
        i = self.index_of(x)
        count = self.buckets.get(i)
        if count is None or count < 1.0:
            raise Underflow(f"no count available in bucket {i} for value {x}")
        if count == 1.0:
            del self.buckets[i]
        else:
            self.buckets[i] = count - 1.0

    def uniform_collapse(self) -> None:
        """Merge buckets pair by pair: ``i -> ceil(i/2)``, summing counters.

        Squares gamma, so alpha degrades to ``2*alpha / (1 + alpha^2)``.
        Applies to an empty sketch too (the accuracy state still moves).
        """
        merged: dict[int, float] = {}
        for i, c in self.buckets.items():
            j = _ceil_div(i, 2)
            merged[j] = merged.get(j, 0.0) + c
        self.buckets = merged
        self.alpha = 2.0 * self.alpha / (1.0 + self.alpha * self.alpha)
        self.gamma = (1.0 + self.alpha) / (1.0 - self.alpha)
        self.collapse_count += 1

    def collapse_lowest(self) -> None:
        """Fold the lowest nonzero bucket into the next one up.

        Baseline collapse strategy: keeps gamma fixed but abandons the
        accuracy guarantee near the low quantiles.  Requires at least two
        buckets.
        """
        if len(self.buckets) < 2:
            raise ValueError("need at least two nonzero buckets to collapse")
        low, second = sorted(self.buckets)[:2]
        self.buckets[second] += self.buckets.pop(low)

    # -- composition -------------------------------------------------------

    def copy(self) -> "Sketch":
        dup = Sketch.__new__(Sketch)
        dup.base_alpha = self.base_alpha
        dup.alpha = self.alpha
        dup.gamma = self.gamma
        dup.collapse_count = self.collapse_count
        dup.max_buckets = self.max_buckets
        dup.buckets = dict(self.buckets)
        dup._ln_gamma0 = self._ln_gamma0
        return dup

    def compatible_with(self, other: "Sketch") -> bool:
        rel = abs(self.base_alpha - other.base_alpha) / self.base_alpha
        return rel <= 1e-12 and self.max_buckets == other.max_buckets

    def equalize_alpha(self, other: "Sketch") -> None:
        """Collapse the finer of the two sketches until their alphas match.

        Mutates whichever sketch has the smaller collapse count.  Raises
        IncompatibleSketches if the two were built from different initial
        alphas (their gamma ladders never intersect).
        """
        if not self.compatible_with(other):
            raise IncompatibleSketches(
                f"base alphas differ: {self.base_alpha} vs {other.base_alpha}")
        behind, ahead = (self, other) if self.collapse_count < other.collapse_count else (other, self)
        steps = 0
        while behind.collapse_count < ahead.collapse_count:
            if steps >= MAX_COLLAPSES:
                raise IncompatibleSketches("sketches cannot be aligned within 64 collapses")
            behind.uniform_collapse()
            steps += 1

    def merge_avg(self, other: "Sketch") -> "Sketch":
        """Averaging merge: counter-wise ``(b1 + b2) / 2``, inputs untouched.

        Internally aligns the collapse levels on copies, then collapses
        the result while it exceeds the space bound.
        """
        a, b = self, other
        if a.collapse_count != b.collapse_count:
            a, b = a.copy(), b.copy()
        a.equalize_alpha(b)  # no-op unless levels differ, then on copies
        merged = a.copy()
        for i, c in b.buckets.items():
            merged.buckets[i] = merged.buckets.get(i, 0.0) + c
        for i in merged.buckets:
            merged.buckets[i] *= 0.5
        while len(merged.buckets) > merged.max_buckets:
            merged.uniform_collapse()
        return merged

    # -- queries -----------------------------------------------------------

    @property
    def total(self) -> float:
        return math.fsum(self.buckets.values())

    def __len__(self) -> int:
        return len(self.buckets)

    def sorted_items(self) -> tuple[np.ndarray, np.ndarray]:
        """(indices, counters) as arrays in ascending index order."""
        idx = np.fromiter(self.buckets.keys(), dtype=np.int64, count=len(self.buckets))
        cnt = np.fromiter(self.buckets.values(), dtype=np.float64, count=len(self.buckets))
        order = np.argsort(idx)
        return idx[order], cnt[order]

    def quantile(self, q: float, n: float) -> float:
        """Estimate of the inferior q-quantile of a stream of n items.

        Walks buckets in ascending order until the running count reaches
        rank ``floor(1 + q*(n - 1))`` and reports that bucket's midpoint.
        n is the caller-tracked item count (equals ``total`` for pure
        insert streams).
        """
        if not self.buckets:
            raise EmptySketch("cannot query an empty sketch")
        if not (0.0 <= q <= 1.0):
            raise ValueError(f"quantile must lie in [0, 1], got {q}")
        if n <= 0:
            raise ValueError(f"item count must be positive, got {n}")
        rank = math.floor(1.0 + q * (n - 1.0))
        idx, cnt = self.sorted_items()
        stop = int(np.searchsorted(np.cumsum(cnt), rank, side="left"))
        stop = min(stop, len(idx) - 1)
        return self.value_of(int(idx[stop]))

    # -- serialization / comparison ----------------------------------------

    def to_record(self) -> dict:
        """JSON-friendly record: accuracy state plus sorted (index, counter) pairs."""
        return {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "base_alpha": self.base_alpha,
            "collapse_count": self.collapse_count,
            "max_buckets": self.max_buckets,
            "buckets": [[int(i), self.buckets[i]] for i in sorted(self.buckets)],
        }

    @classmethod
    def from_record(cls, record: dict) -> "Sketch":
        sk = cls(record["base_alpha"], record["max_buckets"])
        for _ in range(record["collapse_count"]):
            sk.uniform_collapse()
        sk.buckets = {int(i): float(c) for i, c in record["buckets"]}
        return sk

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sketch):
            return NotImplemented
        return (self.base_alpha == other.base_alpha
                and self.collapse_count == other.collapse_count
                and self.max_buckets == other.max_buckets
                and self.buckets == other.buckets)

    def __repr__(self):
        return (f"Sketch(alpha={self.alpha:.6g}, buckets={len(self.buckets)}, "
                f"collapses={self.collapse_count}, total={self.total:.6g})")

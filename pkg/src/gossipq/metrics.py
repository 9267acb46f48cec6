"""Exact oracles, error aggregation and averaging-convergence bounds."""

from __future__ import annotations

import math

import numpy as np

from .sketch import Sketch

__all__ = ["exact_quantile", "sequential_reference", "are", "gossip_bound",
           "empirical_variance", "error_report", "GOSSIP_CONVERGENCE_FACTOR"]

# Expected one-round variance reduction of permutation-based pair
# averaging: 1 / (2 * sqrt(e)).
GOSSIP_CONVERGENCE_FACTOR = 0.5 * math.exp(-0.5)


def exact_quantile(data, q: float):
    """Inferior q-quantile: the element of rank ``floor(1 + q*(n - 1))``."""
    arr = np.sort(np.asarray(data))
    if arr.size == 0:
        raise ValueError("cannot take a quantile of empty data")
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"quantile must lie in [0, 1], got {q}")
    rank = math.floor(1.0 + q * (arr.size - 1.0))
    return arr[rank - 1]


def sequential_reference(union_stream, alpha: float, max_buckets: int) -> tuple[Sketch, int]:
    """Sketch of the whole dataset processed in one place, plus its true size."""
    arr = np.asarray(union_stream, dtype=np.float64)
    sk = Sketch(alpha, max_buckets)
    sk.extend(arr)
    return sk, int(arr.size)


def are(estimates, reference: float) -> float:
    """Average relative error of per-peer estimates against one reference value."""
    est = np.asarray(estimates, dtype=np.float64)
    if est.size == 0:
        raise ValueError("need at least one estimate")
    if reference <= 0.0:
        raise ZeroDivisionError("reference quantile must be positive")
    return float(np.mean(np.abs(est - reference)) / reference)


def gossip_bound(sigma0_sq: float, p: int, r: int, delta: float) -> float:
    """High-probability deviation bound after r rounds of pair averaging.

    With probability 1 - delta each peer's value sits within
    ``sqrt((p - 1) * sigma0_sq) * sqrt(C^r / delta)`` of the initial mean,
    where C is the per-round variance reduction factor.
    """
    if p < 2:
        raise ValueError(f"need at least two peers, got {p}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if r < 0:
        raise ValueError(f"round index must be >= 0, got {r}")
    if sigma0_sq < 0.0:
        raise ValueError(f"variance must be >= 0, got {sigma0_sq}")
    return math.sqrt((p - 1) * sigma0_sq) * math.sqrt(GOSSIP_CONVERGENCE_FACTOR**r / delta)


def empirical_variance(values, mean: float) -> float:
    """Dispersion of per-peer values around the *initial* true mean.

    ``sum((v - mean)^2) / (p - 1)``: the running sample mean is not
    substituted, so this tracks exactly the quantity the per-round
    reduction factor applies to.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least two peers")
    return float(np.sum((arr - mean) ** 2) / (arr.size - 1))


def error_report(per_peer_estimates: np.ndarray, reference: float) -> dict:
    """Distribution statistics of per-peer relative errors for one quantile.

    Quartiles use linear interpolation (Tukey style); these feed the
    box-and-whisker rendering and are not used by any accuracy check.
    """
    rel = np.abs(np.asarray(per_peer_estimates, dtype=np.float64) - reference) / reference
    q1, med, q3 = np.percentile(rel, [25.0, 50.0, 75.0])
    return {
        "are": float(np.mean(rel)),
        "re_min": float(rel.min()),
        "re_q1": float(q1),
        "re_median": float(med),
        "re_q3": float(q3),
        "re_max": float(rel.max()),
    }

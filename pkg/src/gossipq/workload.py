"""Per-peer stream generators and the household power-consumption loader.

All generators emit strictly positive values.  Synthetic workloads draw
their distribution parameters independently per peer, so local streams
differ in range and shape; the grouped workload goes further and assigns
disjoint value intervals (hence disjoint sketch buckets) to different
peer groups, the worst case for averaging-based aggregation.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["gen_adversarial", "gen_uniform", "gen_exponential", "gen_normal",
           "load_power", "partition", "peer_rngs"]

GROUP_SIZE = 100

# 10^(2*(g+1)) must stay finite in float64, which caps the group id and
# therefore the supported peer count.
MAX_GROUP = 152


def peer_rngs(seed, peer_count: int) -> list[np.random.Generator]:
    """One independent, reproducible generator per peer."""
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(entropy=seed)
    return [np.random.default_rng(child) for child in root.spawn(peer_count)]


def gen_adversarial(peer_id: int, n: int, rng, group_size: int = GROUP_SIZE) -> np.ndarray:
    """Uniform values from the peer group's private two-decade interval.

    Peers 1..group_size draw from (1, 10^2), the next group from
    (10^2, 10^4), and so on: intervals of different groups are disjoint,
    so their sketches share no buckets.
    """
    if n <= 0:
        raise ValueError(f"need a positive item count, got {n}")
    group = (peer_id - 1) // group_size
    if group > MAX_GROUP:
        raise OverflowError(
            f"group {group} exceeds the float64-representable interval ladder "
            f"(peer {peer_id}, group size {group_size})")
    lo = 10.0 ** (2 * group)
    hi = 10.0 ** (2 * (group + 1))
    u = rng.random(n)
    while True:  # open interval: u == 0 would land exactly on the group boundary
        zero = u == 0.0
        if not zero.any():
            break
        u[zero] = rng.random(int(zero.sum()))
    return lo + (hi - lo) * u


def gen_uniform(n: int, rng) -> np.ndarray:
    """Uniform(a, b) with a ~ U[1, 1e5] and b ~ U[1e6, 1e7] drawn per peer."""
    a = rng.uniform(1.0, 1e5)
    b = rng.uniform(1e6, 1e7)
    return rng.uniform(a, b, n)


def gen_exponential(n: int, rng) -> np.ndarray:
    """Exponential with rate drawn per peer from U[0.1, 3.5]; zeros resampled."""
    rate = rng.uniform(0.1, 3.5)
    out = rng.exponential(1.0 / rate, n)
    while True:
        zero = out == 0.0
        if not zero.any():
            break
        out[zero] = rng.exponential(1.0 / rate, int(zero.sum()))
    return out


def gen_normal(n: int, rng) -> np.ndarray:
    """Normal(mu, sigma) with mu ~ U[1e6, 1e7], sigma ~ U[1e5, 1e6], truncated to > 0.

    Nonpositive draws are resampled rather than clamped, so no probability
    mass piles up at a clamp point.
    """
    mu = rng.uniform(1e6, 1e7)
    sigma = rng.uniform(1e5, 1e6)
    out = rng.normal(mu, sigma, n)
    while True:
        bad = out <= 0.0
        if not bad.any():
            break
        out[bad] = rng.normal(mu, sigma, int(bad.sum()))
    return out


GENERATORS = {
    "adversarial": lambda peer_id, n, rng: gen_adversarial(peer_id, n, rng),
    "uniform": lambda peer_id, n, rng: gen_uniform(n, rng),
    "exponential": lambda peer_id, n, rng: gen_exponential(n, rng),
    "normal": lambda peer_id, n, rng: gen_normal(n, rng),
}


def load_power(path, field: str = "Global_active_power") -> tuple[np.ndarray, int]:
    """Positive readings of one column of a semicolon-separated power file.

    Returns ``(values, skipped)`` where skipped counts the data rows
    dropped for carrying the ``?`` missing marker, a nonpositive reading,
    or an unparsable field.  Values keep file order.
    """
    values: list[float] = []
    skipped = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=";")
        header = next(reader, None)
        if header is None or field not in header:
            raise ValueError(f"missing '{field}' column in header of {path}")
        col = header.index(field)
        for row in reader:
            if not row:
                continue
            raw = row[col] if col < len(row) else "?"
            if raw == "?":
                skipped += 1
                continue
            try:
                v = float(raw)
            except ValueError:
                skipped += 1
                continue
            if v <= 0.0:
                skipped += 1
                continue
            values.append(v)
    return np.asarray(values, dtype=np.float64), skipped


def partition(stream, p: int, policy: str = "contiguous") -> list[np.ndarray]:
    """Split a stream into p sub-streams whose sizes differ by at most one.

    ``contiguous`` keeps runs of consecutive items together (peers see
    different regions of the stream); ``round-robin`` deals items out one
    by one (peers see near-identical distributions).
    """
    if p < 1:
        raise ValueError(f"need at least one part, got {p}")
    arr = np.asarray(stream)
    if policy == "contiguous":
        base, rem = divmod(len(arr), p)
        sizes = [base + 1] * rem + [base] * (p - rem)
        bounds = np.cumsum([0] + sizes)
        return [arr[bounds[i]:bounds[i + 1]] for i in range(p)]
    if policy == "round-robin":
        return [arr[i::p] for i in range(p)]
    raise ValueError(f"unknown partition policy {policy!r}")

"""Peer state machine for gossip-based distributed averaging of sketches.

Each peer holds a sketch of its local stream plus two scalars that ride
along in every exchange: ``n_est`` (estimate of the average per-peer item
count, seeded with the local count) and ``q_est`` (estimate of 1/p, seeded
with 1 on the anchor peer and 0 everywhere else).  A push-pull exchange
replaces both peers' states with the counter-wise average, so per-bucket
sums, the q_est sum and the n_est sum are all conserved and every peer's
state converges to the network-wide mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .sketch import EmptySketch, Sketch

__all__ = ["PeerState", "InvalidEstimate", "init_peer", "update", "exchange",
           "distributed_query", "distributed_quantiles"]


class InvalidEstimate(ValueError):
    """Raised when a peer cannot size the network (q_est is still zero)."""


@dataclass(frozen=True)
class PeerState:
    """Immutable gossip state of one peer.

    States are replaced, never mutated, on every exchange; the sketch
    object inside may therefore be shared between the two peers that just
    exchanged.
    """

    sketch: Sketch
    n_est: float
    q_est: float
    peer_id: int


def init_peer(peer_id: int, local_stream, alpha: float, max_buckets: int) -> PeerState:
    """Build a peer's round-0 state from its local stream.

    Peer 1 is the anchor that seeds the network-size estimate with 1; all
    other peers start at 0 and converge to 1/p by averaging.
    """
    if peer_id < 1:
        raise ValueError(f"peer ids are 1-based, got {peer_id}")
    sk = Sketch(alpha, max_buckets)
    arr = np.asarray(local_stream, dtype=np.float64)
    sk.extend(arr)
    return PeerState(sketch=sk, n_est=float(arr.size),
                     q_est=1.0 if peer_id == 1 else 0.0, peer_id=peer_id)


def update(state_a: PeerState, state_b: PeerState) -> PeerState:
    """Averaged state of two peers; inputs are left untouched.

    Merging aligns collapse levels on copies when needed, so neither
    input sketch is modified.  The returned state carries state_b's id
    (the responder applying the update); adopt with a different id via
    dataclasses.replace.
    """
    merged = state_a.sketch.merge_avg(state_b.sketch)
    return PeerState(sketch=merged,
                     n_est=0.5 * (state_a.n_est + state_b.n_est),
                     q_est=0.5 * (state_a.q_est + state_b.q_est),
                     peer_id=state_b.peer_id)


def exchange(initiator: PeerState, responder: PeerState) -> tuple[PeerState, PeerState]:
    """Atomic push-pull: both peers end up holding the averaged state.

    The responder merges the pushed state and answers the pull with the
    already-merged result, so the two returned states are identical up to
    the peer id.
    """
    merged = update(initiator, responder)
    return replace(merged, peer_id=initiator.peer_id), merged


def network_size(state: PeerState) -> int:
    """Integer network size recovered from the 1/p estimate.

    The true size is an integer, so 1/q_est is snapped to the nearest one:
    averaging leaves q_est a hair above or below 1/p, and a bare ceiling
    would overshoot to p + 1 for every peer sitting epsilon under.
    """
    if state.q_est <= 0.0:
        raise InvalidEstimate(f"peer {state.peer_id} has no network-size estimate yet")
    return max(1, math.floor(1.0 / state.q_est + 0.5))


def _scaled_cumulative(counts: np.ndarray, p_est: int) -> np.ndarray:
    # Reconstructs global per-bucket counts from per-peer averages.  The
    # products hover a hair above or below integers near convergence, so
    # round to nearest; a ceiling would inflate every bucket that lands
    # epsilon high and bias the rank scan low.
    return np.cumsum(np.rint(counts * p_est))


def distributed_quantiles(state: PeerState, qs) -> np.ndarray:
    """Estimates of the global q-quantiles from one peer's converged state.

    The peer sizes the network as ``p = ceil(1 / q_est)``, scales its
    averaged counters back up to global counts, and runs the rank scan
    against the inferred global item count ``ceil(p * n_est)``.
    """
    sk = state.sketch
    if not sk.buckets:
        raise EmptySketch("peer sketch is empty")
    if state.q_est <= 0.0:
        raise InvalidEstimate(f"peer {state.peer_id} has no network-size estimate yet")
    qs = np.atleast_1d(np.asarray(qs, dtype=np.float64))
    if np.any((qs < 0.0) | (qs > 1.0)):
        raise ValueError("quantiles must lie in [0, 1]")
    p_est = network_size(state)
    n_global = math.ceil(p_est * state.n_est)
    idx, cnt = sk.sorted_items()
    cumulative = _scaled_cumulative(cnt, p_est)
    ranks = np.floor(1.0 + qs * (n_global - 1.0))
    stops = np.minimum(np.searchsorted(cumulative, ranks, side="left"), len(idx) - 1)
    return np.array([sk.value_of(int(i)) for i in idx[stops]])


def distributed_query(state: PeerState, q: float) -> float:
    """Single-quantile form of :func:`distributed_quantiles`."""
    return float(distributed_quantiles(state, [q])[0])

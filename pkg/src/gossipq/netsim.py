"""Synchronous round scheduler over generated overlays with churn.

One simulated round applies churn transitions, then walks a fresh random
permutation of the online peers; each initiates an atomic push-pull
exchange with ``fan_out`` distinct online neighbours.  Exchanges are
serialized, so a peer may be averaged several times within a round but
never holds a half-merged state.

Failure handling mirrors a push-pull that dies midway: if the responder
fails before answering the pull the initiator cancels (its state is
unchanged); if the initiator fails after pushing, the responder restores
its pre-exchange state.  Natural churn only flips status at round
boundaries, so these two cases are reachable via the ``failure_hook``
used by targeted tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .protocol import PeerState, exchange

__all__ = ["Topology", "gen_ba", "gen_er", "NoChurn", "FailStop", "YaoChurn",
           "shifted_pareto", "RoundTrace", "run_round", "Simulation"]


# ---------------------------------------------------------------------------
# Topologies


@dataclass
class Topology:
    """Undirected overlay graph over peer ids 1..peer_count."""

    peer_count: int
    adjacency: list[np.ndarray]  # adjacency[i - 1]: sorted neighbour ids of peer i
    model: str
    connected: bool
    attempts: int = 1
    truncated: bool = False  # True when a disconnected graph was cut to its largest component

    def neighbors(self, peer_id: int) -> np.ndarray:
        return self.adjacency[peer_id - 1]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        for i in range(1, self.peer_count + 1):
            for j in self.adjacency[i - 1]:
                if i < j:
                    yield i, int(j)

    def dump_edge_list(self, path) -> None:
        with open(path, "w") as fh:
            for i, j in self.edges():
                fh.write(f"{i} {j}\n")

    @classmethod
    def from_edges(cls, peer_count: int, edges, model: str = "custom",
                   attempts: int = 1, truncated: bool = False) -> "Topology":
        neigh: list[set[int]] = [set() for _ in range(peer_count)]
        for i, j in edges:
            if i == j:
                continue
            neigh[i - 1].add(j)
            neigh[j - 1].add(i)
        adjacency = [np.array(sorted(s), dtype=np.int64) for s in neigh]
        topo = cls(peer_count, adjacency, model, connected=False,
                   attempts=attempts, truncated=truncated)
        topo.connected = topo._is_connected()
        return topo

    @classmethod
    def complete(cls, peer_count: int) -> "Topology":
        ids = np.arange(1, peer_count + 1, dtype=np.int64)
        adjacency = [ids[ids != i] for i in ids]
        return cls(peer_count, adjacency, "complete", connected=True)

    def _is_connected(self) -> bool:
        if self.peer_count == 0:
            return False
        seen = np.zeros(self.peer_count + 1, dtype=bool)
        stack = [1]
        seen[1] = True
        while stack:
            u = stack.pop()
            for v in self.adjacency[u - 1]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen[1:].all())


def gen_ba(p: int, edges_per_vertex: int = 5, seed=None) -> Topology:
    """Preferential-attachment overlay, connected by construction.

    Starts from a clique on ``edges_per_vertex`` vertices; every further
    vertex attaches that many edges to distinct existing vertices drawn
    with probability proportional to degree + 1 (linear preference,
    constant attractiveness 1).
    """
    m = edges_per_vertex
    if m < 1 or p <= m:
        raise ValueError(f"need peer count > edges_per_vertex >= 1, got p={p}, m={m}")
    rng = np.random.default_rng(seed)
    degree = np.zeros(p, dtype=np.int64)  # 0-based while building
    edges: list[tuple[int, int]] = []
    for i in range(m):
        for j in range(i + 1, m):
            edges.append((i + 1, j + 1))
            degree[i] += 1
            degree[j] += 1
    for v in range(m, p):
        weights = degree[:v] + 1.0
        targets = rng.choice(v, size=m, replace=False, p=weights / weights.sum())
        for t in np.sort(targets):
            edges.append((int(t) + 1, v + 1))
            degree[t] += 1
            degree[v] += 1
    return Topology.from_edges(p, edges, model="ba")


def _er_edges(p: int, prob: float, rng) -> list[tuple[int, int]]:
    # Geometric skipping over the ordered pair list: O(edges) instead of
    # touching all p*(p-1)/2 pairs.
    edges = []
    log_q = np.log1p(-prob)
    v, w = 1, -1
    while v < p:
        r = rng.random()
        w += 1 + int(np.floor(np.log1p(-r) / log_q))
        while w >= v and v < p:
            w -= v
            v += 1
        if v < p:
            edges.append((w + 1, v + 1))
    return edges


def gen_er(p: int, seed=None) -> Topology:
    """Erdos-Renyi overlay with edge probability 10/p.

    A disconnected draw is regenerated with the next seed stream, up to
    100 attempts; if all fail, the largest connected component is kept
    and flagged via ``truncated``.
    """
    if p <= 10:
        raise ValueError(f"need more than 10 peers, got {p}")
    prob = 10.0 / p
    last = None
    for attempt in range(100):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(attempt,)))
        topo = Topology.from_edges(p, _er_edges(p, prob, rng), model="er",
                                   attempts=attempt + 1)
        if topo.connected:
            return topo
        last = topo
    return _largest_component(last)


def _largest_component(topo: Topology) -> Topology:
    seen = np.zeros(topo.peer_count + 1, dtype=bool)
    best: list[int] = []
    for start in range(1, topo.peer_count + 1):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v in topo.adjacency[u - 1]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(int(v))
                    stack.append(int(v))
        if len(comp) > len(best):
            best = comp
    relabel = {old: new for new, old in enumerate(sorted(best), start=1)}
    edges = [(relabel[i], relabel[j]) for i, j in topo.edges()
             if i in relabel and j in relabel]
    return Topology.from_edges(len(best), edges, model=topo.model,
                               attempts=topo.attempts, truncated=True)


# ---------------------------------------------------------------------------
# Churn models

ONLINE, OFFLINE, DEAD = 0, 1, 2


def shifted_pareto(rng, alpha: float, beta: float, mu: float, size=None):
    """Samples with CDF ``F(x) = 1 - (1 + (x - mu)/beta)^(-alpha)`` for x >= mu.

    Mean is ``mu + beta / (alpha - 1)`` for alpha > 1.
    """
    u = rng.random(size)
    return mu + beta * ((1.0 - u) ** (-1.0 / alpha) - 1.0)


class NoChurn:
    """Every peer stays online forever."""

    def reset(self, peer_count: int, rng) -> None:
        self.status = np.zeros(peer_count + 1, dtype=np.int8)

    def step(self, rng) -> None:
        pass

    def is_online(self, peer_id: int) -> bool:
        return self.status[peer_id] == ONLINE

    def online_ids(self) -> np.ndarray:
        return np.flatnonzero(self.status[1:] == ONLINE) + 1

    def mark_failed(self, peer_id: int) -> None:
        # Scripted mid-exchange failure; natural transitions happen in step().
        self.status[peer_id] = DEAD


class FailStop(NoChurn):
    """Each online peer dies with a fixed per-round probability, for good."""

    def __init__(self, fail_prob: float = 0.01):
        if not (0.0 <= fail_prob <= 1.0):
            raise ValueError(f"failure probability must lie in [0, 1], got {fail_prob}")
        self.fail_prob = fail_prob

    def step(self, rng) -> None:
        online = self.status[1:] == ONLINE
        dies = online & (rng.random(online.size) < self.fail_prob)
        self.status[1:][dies] = DEAD


class YaoChurn(NoChurn):
    """Heterogeneous on/off churn.

    Each peer draws a mean lifetime ``l_i ~ shifted_pareto(3, 1, 1.01)``
    and a mean offline duration ``d_i ~ shifted_pareto(3, 2, 1.01)`` once
    at setup.  Status durations then come from per-peer shifted Pareto
    distributions with those means; with ``rejoin="exp"`` the offline
    duration is exponential with mean l_i instead.  Durations count down
    one round at a time and the status flips when they hit zero, so every
    offline peer eventually returns.
    """

    MU = 1.01
    SHAPE = 3.0

    def __init__(self, rejoin: str = "pareto"):
        if rejoin not in ("pareto", "exp"):
            raise ValueError(f"rejoin must be 'pareto' or 'exp', got {rejoin!r}")
        self.rejoin = rejoin

    def reset(self, peer_count: int, rng) -> None:
        super().reset(peer_count, rng)
        pad = np.zeros(1)
        self.mean_lifetime = np.concatenate(
            [pad, shifted_pareto(rng, self.SHAPE, 1.0, self.MU, peer_count)])
        self.mean_offline = np.concatenate(
            [pad, shifted_pareto(rng, self.SHAPE, 2.0, self.MU, peer_count)])
        self.remaining = self._draw_online(rng, np.arange(1, peer_count + 1))
        self.remaining = np.concatenate([pad, self.remaining])

    def _draw_online(self, rng, ids) -> np.ndarray:
        # Per-event distribution keeps shape 3 and support >= MU, scaled to
        # the peer's mean: beta = (alpha - 1) * (l_i - MU).
        beta = (self.SHAPE - 1.0) * (self.mean_lifetime[ids] - self.MU)
        return shifted_pareto(rng, self.SHAPE, beta, self.MU, len(ids))

    def _draw_offline(self, rng, ids) -> np.ndarray:
        if self.rejoin == "exp":
            return rng.exponential(self.mean_lifetime[ids])
        beta = (self.SHAPE - 1.0) * (self.mean_offline[ids] - self.MU)
        return shifted_pareto(rng, self.SHAPE, beta, self.MU, len(ids))

    def step(self, rng) -> None:
        self.remaining[1:] -= 1.0
        expired = np.flatnonzero(self.remaining[1:] <= 0.0) + 1
        for peer in expired:  # draw order fixed by ascending id
            if self.status[peer] == ONLINE:
                self.status[peer] = OFFLINE
                self.remaining[peer] = self._draw_offline(rng, np.array([peer]))[0]
            else:
                self.status[peer] = ONLINE
                self.remaining[peer] = self._draw_online(rng, np.array([peer]))[0]


# ---------------------------------------------------------------------------
# Round scheduler


@dataclass
class RoundTrace:
    """Snapshot taken after one round: who was online, and every state."""

    round_index: int
    online: np.ndarray            # bool, position i-1 for peer i
    states: list[PeerState]
    exchanges: int = 0
    cancelled: int = 0
    transitions: dict = field(default_factory=dict)


def run_round(topology: Topology, churn, peers: list[PeerState], fan_out: int,
              rng, round_index: int = 0, failure_hook=None) -> RoundTrace:
    """Advance the network by one synchronous round, mutating ``peers``.

    ``peers[i - 1]`` holds peer i's current state.  ``failure_hook``, when
    given, is called per exchange as ``hook(round_index, initiator,
    responder)`` and may return ``"responder_before_pull"`` or
    ``"initiator_after_push"`` to inject a mid-exchange failure.
    """
    if fan_out < 1:
        raise ValueError(f"fan-out must be >= 1, got {fan_out}")
    before = churn.status[1:].copy()
    churn.step(rng)
    transitions = {
        "went_offline": int(np.sum((before == ONLINE) & (churn.status[1:] != ONLINE))),
        "came_online": int(np.sum((before != ONLINE) & (churn.status[1:] == ONLINE))),
    }
    online_ids = churn.online_ids()
    exchanges = cancelled = 0
    for initiator_id in rng.permutation(online_ids):
        initiator_id = int(initiator_id)
        if not churn.is_online(initiator_id):  # failed mid-round via hook
            continue
        neigh = topology.neighbors(initiator_id)
        neigh = neigh[churn.status[neigh] == ONLINE]
        if neigh.size == 0:
            continue
        k = min(fan_out, neigh.size)
        targets = rng.choice(neigh, size=k, replace=False)
        for responder_id in np.sort(targets):
            responder_id = int(responder_id)
            if not churn.is_online(responder_id) or not churn.is_online(initiator_id):
                cancelled += 1
                continue
            failure = failure_hook(round_index, initiator_id, responder_id) if failure_hook else None
            if failure == "responder_before_pull":
                # Initiator detects the dead responder and cancels outright.
                churn.mark_failed(responder_id)
                cancelled += 1
                continue
            new_init, new_resp = exchange(peers[initiator_id - 1], peers[responder_id - 1])
            if failure == "initiator_after_push":
                # Responder already merged but the pull bounces: roll back.
                churn.mark_failed(initiator_id)
                cancelled += 1
                continue
            peers[initiator_id - 1] = new_init
            peers[responder_id - 1] = new_resp
            exchanges += 1
    online = np.zeros(topology.peer_count, dtype=bool)
    online[online_ids - 1] = True
    online &= churn.status[1:] == ONLINE  # minus any scripted mid-round failures
    return RoundTrace(round_index=round_index, online=online, states=list(peers),
                      exchanges=exchanges, cancelled=cancelled, transitions=transitions)


class Simulation:
    """Owns one network's world state and advances it round by round."""

    def __init__(self, topology: Topology, peers: list[PeerState], churn=None,
                 fan_out: int = 1, rng=None):
        if len(peers) != topology.peer_count:
            raise ValueError("one state per topology vertex required")
        self.topology = topology
        self.peers = peers
        self.fan_out = fan_out
        self.rng = rng if rng is not None else np.random.default_rng()
        self.churn = churn if churn is not None else NoChurn()
        self.churn.reset(topology.peer_count, self.rng)
        self.round_index = 0

    def run_round(self, failure_hook=None) -> RoundTrace:
        self.round_index += 1
        return run_round(self.topology, self.churn, self.peers, self.fan_out,
                         self.rng, self.round_index, failure_hook)

    def run(self, rounds: int) -> list[RoundTrace]:
        return [self.run_round() for _ in range(rounds)]

"""End-to-end experiment runner: config, seed sweep, CSV traces, metadata.

A run builds per-peer streams, computes the sequential reference sketch on
their union, gossips for R rounds over a generated overlay (optionally
with churn), queries every online peer after every round, and appends one
CSV row per (round, quantile) with the distribution of per-peer relative
errors against the sequential estimates.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .metrics import error_report, sequential_reference
from .netsim import FailStop, NoChurn, Simulation, YaoChurn, gen_ba, gen_er
from .protocol import distributed_quantiles, init_peer, network_size
from .workload import GENERATORS, load_power, partition, peer_rngs

__all__ = ["ExperimentConfig", "ConfigError", "validate_config", "run_experiment",
           "CSV_HEADER"]

CSV_HEADER = "round,quantile,are,re_min,re_q1,re_median,re_q3,re_max,online_peers,p_est_mode"

DEFAULT_QUANTILES = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)

WORKLOADS = ("adversarial", "uniform", "exponential", "normal", "power")
TOPOLOGIES = ("ba", "er")
CHURNS = ("none", "failstop", "yao-pareto", "yao-exp")
PARTITIONS = ("contiguous", "round-robin")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    """Experiment parameters; defaults are the reference full-scale settings."""

    alpha: float = 0.001
    buckets: int = 1024
    peers: int = 10000
    rounds: int = 25
    fanout: int = 1
    items: int = 100000
    quantiles: tuple = DEFAULT_QUANTILES
    topology: str = "ba"
    churn: str = "none"
    workload: str = "uniform"
    seed: int = 1
    out: str = "experiment.csv"
    scale: int = 1
    query_sample: int = 500
    power_path: str = ""
    partition_policy: str = "contiguous"
    fail_prob: float = 0.01
    dump_topology: bool = False
    dump_states: bool = False

    @property
    def scaled_peers(self) -> int:
        return self.peers // self.scale

    @property
    def scaled_items(self) -> int:
        return self.items // self.scale


def validate_config(config) -> ExperimentConfig:
    """Normalize a dict or ExperimentConfig, filling defaults and checking ranges."""
    if isinstance(config, ExperimentConfig):
        raw = asdict(config)
    elif isinstance(config, dict):
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(config) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        raw = {**{f.name: getattr(ExperimentConfig(), f.name) for f in fields(ExperimentConfig)},
               **config}
    else:
        raise ConfigError(f"config must be a dict or ExperimentConfig, got {type(config)!r}")

    cfg = ExperimentConfig(**raw)
    cfg.quantiles = tuple(float(q) for q in cfg.quantiles)
    if not (0.0 < cfg.alpha < 1.0):
        raise ConfigError(f"alpha: must lie in (0, 1), got {cfg.alpha}")
    if cfg.buckets < 2:
        raise ConfigError(f"buckets: must be >= 2, got {cfg.buckets}")
    if cfg.fanout < 1:
        raise ConfigError(f"fanout: must be >= 1, got {cfg.fanout}")
    if cfg.rounds < 1:
        raise ConfigError(f"rounds: must be >= 1, got {cfg.rounds}")
    if not cfg.quantiles:
        raise ConfigError("quantiles: need at least one")
    for q in cfg.quantiles:
        if not (0.0 <= q <= 1.0):
            raise ConfigError(f"quantiles: {q} outside [0, 1]")
    if cfg.topology not in TOPOLOGIES:
        raise ConfigError(f"topology: must be one of {TOPOLOGIES}, got {cfg.topology!r}")
    if cfg.churn not in CHURNS:
        raise ConfigError(f"churn: must be one of {CHURNS}, got {cfg.churn!r}")
    if cfg.workload not in WORKLOADS:
        raise ConfigError(f"workload: must be one of {WORKLOADS}, got {cfg.workload!r}")
    if cfg.partition_policy not in PARTITIONS:
        raise ConfigError(f"partition_policy: must be one of {PARTITIONS}, got {cfg.partition_policy!r}")
    if cfg.scale < 1:
        raise ConfigError(f"scale: must be >= 1, got {cfg.scale}")
    if cfg.scaled_peers < 2:
        raise ConfigError(f"scale: {cfg.scale} leaves fewer than two peers of {cfg.peers}")
    if cfg.workload == "power" and not cfg.power_path:
        raise ConfigError("power_path: required for the power workload")
    if cfg.workload != "power" and cfg.scaled_items < 1:
        raise ConfigError(f"scale: {cfg.scale} leaves no items of {cfg.items} per peer")
    if not (0.0 <= cfg.fail_prob <= 1.0):
        raise ConfigError(f"fail_prob: must lie in [0, 1], got {cfg.fail_prob}")
    if cfg.query_sample < 1:
        raise ConfigError(f"query_sample: must be >= 1, got {cfg.query_sample}")
    return cfg


def _build_streams(cfg: ExperimentConfig, work_ss, p: int) -> tuple[list[np.ndarray], dict]:
    if cfg.workload == "power":
        values, skipped = load_power(cfg.power_path)
        if values.size < p:
            raise ConfigError(f"power_path: {cfg.power_path} holds {values.size} readings "
                              f"for {p} peers")
        return partition(values, p, cfg.partition_policy), {
            "power_rows_loaded": int(values.size),
            "power_rows_skipped": int(skipped),
        }
    gen = GENERATORS[cfg.workload]
    rngs = peer_rngs(work_ss, p)
    streams = [gen(l, cfg.scaled_items, rngs[l - 1]) for l in range(1, p + 1)]
    return streams, {}


def _make_churn(cfg: ExperimentConfig):
    if cfg.churn == "none":
        return NoChurn()
    if cfg.churn == "failstop":
        return FailStop(cfg.fail_prob)
    return YaoChurn("exp" if cfg.churn == "yao-exp" else "pareto")


@dataclass
class ExperimentResult:
    csv_path: str
    meta_path: str
    rows: list = field(default_factory=list)  # dict per (round, quantile)


def run_experiment(config) -> ExperimentResult:
    """Run one seeded experiment and write its CSV trace plus metadata.

    Identical (config, seed) pairs produce byte-identical output files.
    """
    cfg = validate_config(config)
    master = np.random.SeedSequence(entropy=cfg.seed)
    work_ss, topo_ss, gossip_ss, query_ss = master.spawn(4)

    if cfg.topology == "ba":
        topo = gen_ba(cfg.scaled_peers, 5, topo_ss)
    else:
        topo = gen_er(cfg.scaled_peers, topo_ss)
    p = topo.peer_count  # smaller than scaled_peers only if cut to the largest component

    streams, workload_meta = _build_streams(cfg, work_ss, p)
    union = np.concatenate(streams)
    ref_sketch, n_total = sequential_reference(union, cfg.alpha, cfg.buckets)
    refs = np.array([ref_sketch.quantile(q, n_total) for q in cfg.quantiles])

    peers = [init_peer(l, streams[l - 1], cfg.alpha, cfg.buckets) for l in range(1, p + 1)]
    sim = Simulation(topo, peers, _make_churn(cfg), cfg.fanout,
                     np.random.default_rng(gossip_ss))
    query_rng = np.random.default_rng(query_ss)
    sampled_queries = p > 2000

    states_fh = open(cfg.out + ".states.jsonl", "w") if cfg.dump_states else None
    rows: list[dict] = []
    try:
        for r in range(1, cfg.rounds + 1):
            trace = sim.run_round()
            eligible = [st for st, on in zip(sim.peers, trace.online) if on and st.q_est > 0.0]
            if sampled_queries and len(eligible) > cfg.query_sample:
                pick = query_rng.choice(len(eligible), size=cfg.query_sample, replace=False)
                eligible = [eligible[i] for i in np.sort(pick)]
            online_count = int(trace.online.sum())
            try:
                rows.extend(_round_rows(cfg, r, eligible, refs, online_count))
            except Exception as exc:
                raise RuntimeError(f"query evaluation failed at round {r}: {exc}") from exc
            if states_fh is not None:
                _dump_states(states_fh, r, sim.peers, trace.online)
    finally:
        if states_fh is not None:
            states_fh.close()

    _write_csv(cfg.out, rows)
    meta_path = cfg.out + ".meta.json"
    _write_metadata(meta_path, cfg, topo, n_total, ref_sketch, refs,
                    workload_meta, sampled_queries)
    if cfg.dump_topology:
        topo.dump_edge_list(cfg.out + ".topology.txt")
    return ExperimentResult(csv_path=cfg.out, meta_path=meta_path, rows=rows)


def _round_rows(cfg, round_index, eligible, refs, online_count) -> list[dict]:
    if eligible:
        estimates = np.array([distributed_quantiles(st, cfg.quantiles) for st in eligible])
        p_ests = np.array([network_size(st) for st in eligible])
        vals, counts = np.unique(p_ests, return_counts=True)
        p_mode = int(vals[np.argmax(counts)])
    rows = []
    for k, q in enumerate(cfg.quantiles):
        if eligible:
            stats = error_report(estimates[:, k], float(refs[k]))
        else:
            stats = {key: float("nan") for key in
                     ("are", "re_min", "re_q1", "re_median", "re_q3", "re_max")}
            p_mode = 0
        rows.append({"round": round_index, "quantile": q, **stats,
                     "online_peers": online_count, "p_est_mode": p_mode})
    return rows


def _write_csv(path, rows) -> None:
    cols = CSV_HEADER.split(",")
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c])
                              for c in cols) + "\n")


def _dump_states(fh, round_index, peers, online) -> None:
    for st, on in zip(peers, online):
        record = {"round": round_index, "peer_id": st.peer_id, "online": bool(on),
                  "n_est": st.n_est, "q_est": st.q_est,
                  "sketch": st.sketch.to_record()}
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _write_metadata(path, cfg, topo, n_total, ref_sketch, refs, workload_meta,
                    sampled_queries) -> None:
    meta = {
        "version": __version__,
        "config": asdict(cfg),
        "resolved": {
            "peers": topo.peer_count,
            "items_per_peer": cfg.scaled_items if cfg.workload != "power" else None,
            "union_size": n_total,
        },
        "topology": {
            "model": topo.model,
            "peer_count": topo.peer_count,
            "edges": topo.edge_count(),
            "connected": topo.connected,
            "attempts": topo.attempts,
            "truncated": topo.truncated,
        },
        "reference": {
            "alpha": ref_sketch.alpha,
            "collapse_count": ref_sketch.collapse_count,
            "nonzero_buckets": len(ref_sketch),
            "quantile_estimates": {repr(q): float(v)
                                   for q, v in zip(cfg.quantiles, refs)},
        },
        "query_mode": (f"sampled({cfg.query_sample})" if sampled_queries else "all-online"),
        **workload_meta,
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

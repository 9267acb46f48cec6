"""Mergeable relative-error quantile sketches and a gossip averaging simulator."""

from .metrics import (are, empirical_variance, exact_quantile, gossip_bound,
                      sequential_reference)
from .netsim import (FailStop, NoChurn, RoundTrace, Simulation, Topology,
                     YaoChurn, gen_ba, gen_er, run_round)
from .protocol import (InvalidEstimate, PeerState, distributed_quantiles,
                       distributed_query, exchange, init_peer, update)
from .sketch import (AccuracyBound, EmptySketch, IncompatibleSketches, Sketch,
                     Underflow, bucket_index, theoretical_bound)
from .workload import (gen_adversarial, gen_exponential, gen_normal,
                       gen_uniform, load_power, partition)

__version__ = "0.1.0"

__all__ = [
    "Sketch", "AccuracyBound", "bucket_index", "theoretical_bound",
    "IncompatibleSketches", "EmptySketch", "Underflow",
    "PeerState", "InvalidEstimate", "init_peer", "update", "exchange",
    "distributed_query", "distributed_quantiles",
    "Topology", "gen_ba", "gen_er", "NoChurn", "FailStop", "YaoChurn",
    "RoundTrace", "run_round", "Simulation",
    "gen_adversarial", "gen_uniform", "gen_exponential", "gen_normal",
    "load_power", "partition",
    "exact_quantile", "sequential_reference", "are", "gossip_bound",
    "empirical_variance",
]

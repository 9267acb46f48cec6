"""Command-line experiment runner.

Every flag mirrors a config-file key (plain ``key = value`` lines, ``#``
comments allowed); flags given on the command line take precedence over
the file.  Exit codes: 0 success, 1 i/o failure, 2 configuration error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (CHURNS, PARTITIONS, TOPOLOGIES, WORKLOADS, ConfigError,
                         ExperimentConfig, run_experiment, validate_config)

_BOOL_KEYS = ("dump_topology", "dump_states")
_INT_KEYS = ("buckets", "peers", "rounds", "fanout", "items", "seed", "scale",
             "query_sample")
_FLOAT_KEYS = ("alpha", "fail_prob")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossipq",
        description="Run a gossip quantile-tracking experiment and write CSV traces.")
    add = parser.add_argument
    add("--config", metavar="FILE", help="config file with key = value lines")
    add("--alpha", type=float, help="sketch accuracy target (default 0.001)")
    add("--buckets", type=int, help="sketch space bound m (default 1024)")
    add("--peers", type=int, help="network size before scaling (default 10000)")
    add("--rounds", type=int, help="gossip rounds to run (default 25)")
    add("--fanout", type=int, help="exchanges each peer initiates per round (default 1)")
    add("--items", type=int, help="items per peer before scaling (default 100000)")
    add("--quantiles", help="comma-separated quantile list")
    add("--topology", choices=TOPOLOGIES, help="overlay model (default ba)")
    add("--churn", choices=CHURNS, help="churn model (default none)")
    add("--workload", choices=WORKLOADS, help="input dataset kind (default uniform)")
    add("--seed", type=int, help="master seed (default 1)")
    add("--out", help="output CSV path (default experiment.csv)")
    add("--scale", type=int, help="desk-scale divisor applied to peers and items")
    add("--query-sample", type=int, dest="query_sample",
        help="peers queried per round when the network exceeds 2000 (default 500)")
    add("--power-file", dest="power_path", help="semicolon-separated power readings file")
    add("--partition", dest="partition_policy", choices=PARTITIONS,
        help="how the power stream is split across peers (default contiguous)")
    add("--fail-prob", type=float, dest="fail_prob",
        help="per-round failure probability for failstop churn (default 0.01)")
    add("--dump-topology", action="store_const", const=True, dest="dump_topology",
        help="also write the overlay as an edge list")
    add("--dump-states", action="store_const", const=True, dest="dump_states",
        help="also write per-round peer states as JSON lines")
    return parser


def parse_config_file(path: str) -> dict:
    """Read ``key = value`` lines into a raw config dict."""
    raw: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key in _BOOL_KEYS:
                raw[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in _INT_KEYS:
                raw[key] = int(value)
            elif key in _FLOAT_KEYS:
                raw[key] = float(value)
            elif key == "quantiles":
                raw[key] = tuple(float(tok) for tok in value.split(","))
            else:
                raw[key] = value
    return raw


def merge_config(args: argparse.Namespace) -> ExperimentConfig:
    raw = parse_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key == "config" or value is None:
            continue
        if key == "quantiles":
            value = tuple(float(tok) for tok in value.split(","))
        raw[key] = value
    return validate_config(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge_config(args)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 1
    try:
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime-error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {result.csv_path} and {result.meta_path} "
          f"({len(result.rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

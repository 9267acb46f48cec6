"""Exact-quantile oracle, error aggregation, and convergence bounds."""

import math

import numpy as np
import pytest

from gossipq import (Sketch, are, empirical_variance, exact_quantile,
                     gossip_bound, init_peer, sequential_reference)
from gossipq.metrics import GOSSIP_CONVERGENCE_FACTOR, error_report


def test_exact_quantile_median_of_five():
    assert exact_quantile([1, 2, 3, 4, 5], 0.5) == 3  # rank floor(1 + 0.5*4) = 3


def test_exact_quantile_extremes():
    data = [7.5, 1.25, 9.0, 3.5]
    assert exact_quantile(data, 0.0) == 1.25
    assert exact_quantile(data, 1.0) == 9.0


def test_exact_quantile_duplicates():
    for q in (0.0, 0.4, 1.0):
        assert exact_quantile([2, 2, 2], q) == 2


def test_exact_quantile_rejects_empty_and_bad_q():
    with pytest.raises(ValueError):
        exact_quantile([], 0.5)
    with pytest.raises(ValueError):
        exact_quantile([1], 1.5)


def test_sequential_reference_equals_single_peer():
    stream = np.random.default_rng(0).uniform(1, 50, 3000)
    ref, n = sequential_reference(stream, 0.01, 256)
    assert n == 3000
    assert ref == init_peer(1, stream, 0.01, 256).sketch


def test_sequential_reference_is_sum_of_local_sketches():
    # with an unbounded-size sketch no collapses fire, and the union's counter
    # at every index equals the sum of the per-peer counters exactly
    rng = np.random.default_rng(1)
    streams = [rng.lognormal(0, 2, 500) for _ in range(4)]
    locals_ = [init_peer(l, s, 0.001, 1 << 20).sketch for l, s in enumerate(streams, 1)]
    ref, _ = sequential_reference(np.concatenate(streams), 0.001, 1 << 20)
    summed = {}
    for sk in locals_:
        for i, c in sk.buckets.items():
            summed[i] = summed.get(i, 0.0) + c
    assert summed == ref.buckets


def test_sequential_reference_is_permutation_invariant():
    rng = np.random.default_rng(2)
    stream = rng.uniform(1, 1e6, 20000)
    a, _ = sequential_reference(stream, 0.001, 128)
    b, _ = sequential_reference(rng.permutation(stream), 0.001, 128)
    assert a == b


def test_are_zero_when_everyone_matches():
    assert are([3.0, 3.0, 3.0], 3.0) == 0.0


def test_are_single_peer_offset():
    assert are([1.1], 1.0) == pytest.approx(0.1, rel=1e-12)


def test_are_three_peer_hand_case():
    assert are([1.0, 1.1, 0.9], 1.0) == pytest.approx(0.2 / 3, abs=1e-9)


def test_are_guards_zero_reference():
    with pytest.raises(ZeroDivisionError):
        are([1.0], 0.0)


def test_convergence_factor_constant():
    assert GOSSIP_CONVERGENCE_FACTOR == pytest.approx(0.30326533, abs=5e-9)
    assert GOSSIP_CONVERGENCE_FACTOR == pytest.approx(1.0 / (2.0 * math.sqrt(math.e)), rel=1e-15)


def test_gossip_bound_at_round_zero():
    sigma0_sq, p = 0.25, 16
    almost_one = 1.0 - 1e-12
    assert gossip_bound(sigma0_sq, p, 0, almost_one) == pytest.approx(
        math.sqrt((p - 1) * sigma0_sq), rel=1e-9)


def test_gossip_bound_halves_every_1_16_rounds():
    ratio = gossip_bound(1.0, 8, 1, 0.1) / gossip_bound(1.0, 8, 0, 0.1)
    assert ratio == pytest.approx(math.sqrt(GOSSIP_CONVERGENCE_FACTOR), rel=1e-12)
    assert ratio == pytest.approx(0.5507, abs=5e-5)
    half_life = math.log(2) / -math.log(ratio)
    assert half_life == pytest.approx(1.1619, abs=5e-5)


def test_gossip_bound_validates_parameters():
    for bad in [dict(p=1), dict(delta=0.0), dict(delta=1.0), dict(r=-1),
                dict(sigma0_sq=-0.5)]:
        kwargs = dict(sigma0_sq=1.0, p=4, r=1, delta=0.05)
        kwargs.update(bad)
        with pytest.raises(ValueError):
            gossip_bound(kwargs["sigma0_sq"], kwargs["p"], kwargs["r"], kwargs["delta"])


def test_empirical_variance_zero_at_consensus():
    assert empirical_variance([0.5, 0.5, 0.5], 0.5) == 0.0


def test_empirical_variance_two_peer_case():
    assert empirical_variance([0.0, 1.0], 0.5) == pytest.approx(0.5, rel=1e-12)


def test_empirical_variance_matches_textbook_when_centered():
    vals = np.array([1.0, 2.0, 3.0, 4.0])  # sample mean 2.5
    assert empirical_variance(vals, 2.5) == pytest.approx(np.var(vals, ddof=1), rel=1e-12)


def test_empirical_variance_needs_two_peers():
    with pytest.raises(ValueError):
        empirical_variance([1.0], 1.0)


def test_error_report_statistics():
    report = error_report(np.array([1.0, 1.1, 0.9, 1.0]), 1.0)
    assert report["are"] == pytest.approx(0.05, rel=1e-12)
    assert report["re_min"] == 0.0
    assert report["re_max"] == pytest.approx(0.1, rel=1e-12)
    assert report["re_q1"] <= report["re_median"] <= report["re_q3"]

"""Stream generators, the power-file loader, and partitioning."""

import numpy as np
import pytest

from gossipq import (bucket_index, gen_adversarial, gen_exponential,
                     gen_normal, gen_uniform, load_power, partition)
from gossipq.workload import peer_rngs


def rng(seed=0):
    return np.random.default_rng(seed)


# -- grouped adversarial workload ---------------------------------------------

def test_first_group_draws_from_unit_interval():
    for peer_id in (1, 50, 100):
        vals = gen_adversarial(peer_id, 5000, rng(peer_id))
        assert vals.min() > 1.0 and vals.max() < 100.0


def test_second_group_is_disjoint():
    vals = gen_adversarial(101, 1_000_000, rng(1))
    assert vals.min() > 100.0 and vals.max() < 10000.0


def test_group_bucket_ranges_are_disjoint():
    # value intervals are disjoint, so bucket ranges can only meet in the
    # single bucket straddling the 10^(2g) seam
    gamma = 1.002002002002002  # alpha = 0.001
    seam = bucket_index(100.0, gamma)
    a = gen_adversarial(1, 10000, rng(2))
    b = gen_adversarial(101, 10000, rng(3))
    assert a.max() < 100.0 < b.min()
    assert bucket_index(a, gamma).max() <= seam
    assert bucket_index(b, gamma).min() >= seam
    overlap = set(bucket_index(a, gamma)) & set(bucket_index(b, gamma))
    assert len(overlap) <= 1


def test_adversarial_overflow_guard():
    with pytest.raises(OverflowError):
        gen_adversarial(15301, 10, rng(4))
    gen_adversarial(15300, 10, rng(4))  # last supported group still fine


def test_adversarial_rejects_empty_request():
    with pytest.raises(ValueError):
        gen_adversarial(1, 0, rng(5))


# -- parameterized distributions -----------------------------------------------

def test_uniform_values_span_the_stated_range():
    vals = np.concatenate([gen_uniform(1000, r) for r in peer_rngs(6, 50)])
    assert vals.min() >= 1.0 and vals.max() <= 1e7


def test_exponential_parameter_is_a_rate():
    # with rates in [0.1, 3.5], per-peer means range over [1/3.5, 10]; if the
    # parameter were the mean instead, no peer mean could exceed 3.5
    means = [gen_exponential(10000, r).mean() for r in peer_rngs(7, 200)]
    assert max(means) > 5.0
    assert min(means) < 0.32
    lam = 0.1  # law of large numbers at the slowest rate
    draws = rng(8).exponential(1.0 / lam, 1_000_000)
    assert draws.mean() == pytest.approx(10.0, rel=0.01)


def test_normal_truncation_emits_positives_only():
    vals = np.concatenate([gen_normal(2000, r) for r in peer_rngs(9, 50)])
    assert (vals > 0.0).all()


def test_generators_are_reproducible():
    a = gen_uniform(100, rng(10))
    b = gen_uniform(100, rng(10))
    assert np.array_equal(a, b)
    c = gen_adversarial(3, 100, rng(11))
    d = gen_adversarial(3, 100, rng(11))
    assert np.array_equal(c, d)


def test_all_generators_positive():
    for gen in (lambda r: gen_adversarial(250, 5000, r),
                lambda r: gen_uniform(5000, r),
                lambda r: gen_exponential(5000, r),
                lambda r: gen_normal(5000, r)):
        assert (gen(rng(12)) > 0.0).all()


# -- power loader ----------------------------------------------------------------

HEADER = ("Date;Time;Global_active_power;Global_reactive_power;Voltage;"
          "Global_intensity;Sub_metering_1;Sub_metering_2;Sub_metering_3")


def write_power(tmp_path, rows):
    path = tmp_path / "power.csv"
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
    return path


def test_loader_parses_positive_readings(tmp_path):
    path = write_power(tmp_path, [
        "16/12/2006;17:24:00;4.216;0.418;234.840;18.400;0.000;1.000;17.000",
        "16/12/2006;17:25:00;5.360;0.436;233.630;23.000;0.000;1.000;16.000",
    ])
    values, skipped = load_power(path)
    assert values.tolist() == [4.216, 5.36]
    assert skipped == 0


def test_loader_skips_and_counts_missing_rows(tmp_path):
    path = write_power(tmp_path, [
        "16/12/2006;17:24:00;4.216;0.418;234.840;18.400;0.000;1.000;17.000",
        "16/12/2006;17:25:00;?;?;?;?;?;?;?",
        "16/12/2006;17:26:00;0.000;0.0;230.0;0.0;0.000;0.000;0.000",
        "16/12/2006;17:27:00;not-a-number;0;0;0;0;0;0",
        "16/12/2006;17:28:00;2.020;0.1;231.0;9.0;0.000;0.000;0.000",
    ])
    values, skipped = load_power(path)
    assert values.tolist() == [4.216, 2.02]
    assert skipped == 3
    assert len(values) + skipped == 5  # conservation over data rows


def test_loader_rejects_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("Date;Time;Voltage\n1;2;3\n")
    with pytest.raises(ValueError, match="Global_active_power"):
        load_power(path)


def test_loader_propagates_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_power(tmp_path / "nope.csv")


# -- partitioning -----------------------------------------------------------------

def test_partition_sizes_differ_by_at_most_one():
    parts = partition(np.arange(10), 3)
    assert sorted(len(p) for p in parts) == [3, 3, 4]


def test_partition_identity_for_single_peer():
    data = np.arange(17)
    parts = partition(data, 1)
    assert len(parts) == 1 and np.array_equal(parts[0], data)


@pytest.mark.parametrize("policy", ["contiguous", "round-robin"])
def test_partition_preserves_the_multiset(policy):
    data = np.random.default_rng(13).uniform(0, 1, 1003)
    parts = partition(data, 7, policy)
    assert sorted(len(p) for p in parts) == [143] * 5 + [144] * 2
    rejoined = np.sort(np.concatenate(parts))
    assert np.array_equal(rejoined, np.sort(data))


def test_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        partition([1, 2], 0)
    with pytest.raises(ValueError):
        partition([1, 2], 2, "striped")

"""Shared fixtures: a deterministic household-power file in the UCI byte format."""

import datetime

import numpy as np
import pytest

POWER_HEADER = ("Date;Time;Global_active_power;Global_reactive_power;Voltage;"
                "Global_intensity;Sub_metering_1;Sub_metering_2;Sub_metering_3")


def write_power_file(path, n_rows=60000, missing_rate=0.0125, seed=20060):
    """Synthesize a power-consumption file matching the UCI distribution format.

    Readings are right-skewed positive kilowatt values rendered with three
    decimals; a seeded fraction of rows carries the '?' missing marker in
    every numeric field.  Returns the number of '?' rows planted.
    """
    rng = np.random.default_rng(seed)
    power = np.clip(np.round(rng.lognormal(mean=0.1, sigma=0.75, size=n_rows), 3),
                    0.076, 11.122)
    missing = rng.random(n_rows) < missing_rate
    voltage = 240.0 + rng.normal(0.0, 2.0, n_rows)
    start = datetime.datetime(2006, 12, 16, 17, 24)
    lines = [POWER_HEADER]
    for i in range(n_rows):
        ts = start + datetime.timedelta(minutes=i)
        stamp = f"{ts.day}/{ts.month}/{ts.year};{ts:%H:%M:%S}"
        if missing[i]:
            lines.append(f"{stamp};?;?;?;?;?;?;?")
        else:
            gap = power[i]
            lines.append(f"{stamp};{gap:.3f};{gap * 0.05:.3f};{voltage[i]:.2f};"
                         f"{gap * 4.3:.1f};0.000;1.000;17.000")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return int(missing.sum())


@pytest.fixture(scope="session")
def power_file(tmp_path_factory):
    """(path, total_rows, planted '?' rows) for a 60k-row power fixture."""
    path = tmp_path_factory.mktemp("power") / "household_power.csv"
    n_rows = 60000
    n_missing = write_power_file(path, n_rows=n_rows)
    return str(path), n_rows, n_missing

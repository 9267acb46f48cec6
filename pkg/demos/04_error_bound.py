"""The high-probability deviation bound for pair averaging, checked empirically.

Sixty-four peers average a network-size indicator (one peer starts at 1,
the rest at 0; the common limit is 1/64).  With probability 1 - delta,
every peer's value after r rounds should sit within

    sqrt((p - 1) * sigma0^2) * sqrt(C^r / delta),    C = 1/(2*sqrt(e))

of the mean.  The table compares the bound with the largest deviation
actually observed across 50 seeded runs, and the last column shows the
per-round variance ratio, which should hover near C ~ 0.303.
"""

import numpy as np

from gossipq import (NoChurn, Simulation, Topology, empirical_variance,
                     gossip_bound, init_peer)
from gossipq.metrics import GOSSIP_CONVERGENCE_FACTOR

P, ROUNDS, DELTA, SEEDS = 64, 15, 0.05, 50
MEAN = 1.0 / P

deviation = np.zeros((SEEDS, ROUNDS + 1))
variance = np.zeros((SEEDS, ROUNDS + 1))
for seed in range(SEEDS):
    peers = [init_peer(l, [], 0.001, 64) for l in range(1, P + 1)]
    sim = Simulation(Topology.complete(P), peers, NoChurn(), 1,
                     np.random.default_rng(np.random.SeedSequence(entropy=seed)))
    for r in range(ROUNDS + 1):
        values = np.array([st.q_est for st in sim.peers])
        deviation[seed, r] = np.abs(values - MEAN).max()
        variance[seed, r] = empirical_variance(values, MEAN)
        if r < ROUNDS:
            sim.run_round()

sigma0 = variance[:, 0].mean()  # = 1/p exactly for this start vector
print(f"p={P}, delta={DELTA}, sigma0^2={sigma0:.6f}, C={GOSSIP_CONVERGENCE_FACTOR:.6f}\n")
print(f"{'round':>5} {'bound':>12} {'max |dev|':>12} {'var ratio':>10}")
for r in range(ROUNDS + 1):
    bound = gossip_bound(sigma0, P, r, DELTA)
    ratio = variance[:, r].mean() / variance[:, r - 1].mean() if r else float("nan")
    print(f"{r:>5} {bound:>12.3e} {deviation[:, r].max():>12.3e} {ratio:>10.3f}")

print("\nno observation ever exceeded the bound:",
      bool((deviation < [[gossip_bound(sigma0, P, r, DELTA) for r in range(ROUNDS + 1)]]).all()))

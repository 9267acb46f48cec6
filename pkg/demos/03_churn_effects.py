"""How peer churn degrades gossip convergence.

Same experiment, four availability regimes:

* none        — every peer stays online;
* failstop    — each online peer dies for good with probability 1% per
                round, taking its share of the data with it;
* yao-pareto  — peers alternate online/offline spells with heavy-tailed
                durations (mean lifetime ~1.5 rounds, mean offline ~2);
* yao-exp     — same, but offline spells are exponential.

Fail-stop permanently loses counter mass, so the surviving consensus is
biased away from the true union no matter how long it runs.  The Yao
models lose nothing permanently but keep roughly half the network
unavailable, which mostly stalls mixing at this scale.
"""

import numpy as np

from gossipq import (FailStop, NoChurn, Simulation, YaoChurn, are,
                     distributed_quantiles, gen_ba, init_peer,
                     sequential_reference)
from gossipq.workload import gen_adversarial, peer_rngs

P, ITEMS, ROUNDS, SEED = 200, 1000, 25, 3
QS = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)

master = np.random.SeedSequence(entropy=SEED)
work_ss, topo_ss = master.spawn(2)
streams = [gen_adversarial(l, ITEMS, rng)
           for l, rng in enumerate(peer_rngs(work_ss, P), start=1)]
reference, n = sequential_reference(np.concatenate(streams), 0.001, 1024)
refs = np.array([reference.quantile(q, n) for q in QS])
topology = gen_ba(P, 5, topo_ss)

print(f"{P} peers in two disjoint-range groups, {ROUNDS} rounds\n")
print(f"{'model':<12} {'online at end':>13} {'worst ARE':>12} {'median ARE':>12}")
for name, churn in [("none", NoChurn()), ("failstop", FailStop(0.01)),
                    ("yao-pareto", YaoChurn("pareto")), ("yao-exp", YaoChurn("exp"))]:
    peers = [init_peer(l, streams[l - 1], 0.001, 1024) for l in range(1, P + 1)]
    sim = Simulation(topology, peers, churn, fan_out=1,
                     rng=np.random.default_rng(master.entropy + 100))
    online = sim.run(ROUNDS)[-1].online
    ready = [st for st, on in zip(sim.peers, online) if on and st.q_est > 0]
    estimates = np.array([distributed_quantiles(st, QS) for st in ready])
    ares = [are(estimates[:, k], refs[k]) for k in range(len(QS))]
    print(f"{name:<12} {int(online.sum()):>13} {max(ares):>12.2e} "
          f"{float(np.median(ares)):>12.2e}")

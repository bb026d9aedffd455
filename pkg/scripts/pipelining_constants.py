"""Estimate the per-message cost of PULL gossip on a clique.

With a single source holding all k messages and shared per-sender packet
draws, the stopping time is c*k + O(log n) with c ~ 1.58 for q=2; with one
message per node it drops near 1. Prints t/k as k grows so the constant is
visible past the additive term.
"""

import argparse

from rlnc_gossip.analysis import worst_case_pull_constants
from rlnc_gossip.harness import ScenarioConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--ks", default="128,256,512,1024")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    lower, upper = worst_case_pull_constants(1, q=2)
    print("# predicted window for single source: [%.5f, %.5f]"
          % (lower, upper))
    print("init,k,mean,t_over_k")
    for init in ("single_source", "one_per_node"):
        for k in (int(s) for s in args.ks.split(",")):
            if init == "one_per_node" and k != args.n:
                continue
            cfg = ScenarioConfig(
                n=args.n, k=k, comm_model="sync_pull",
                pull_sampling="shared", init=init, trials=args.trials,
                seed=args.seed, max_rounds=8 * k + 500,
                workers=args.workers, scenario_id="pull_%s_%d" % (init, k))
            stats, _ = run_experiment(cfg)
            print("%s,%d,%.1f,%.4f" % (init, k, stats.mean, stats.mean / k))


if __name__ == "__main__":
    main()

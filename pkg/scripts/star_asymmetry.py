"""PUSH vs PULL on star graphs with one message per node.

The hub bottleneck hits PUSH much harder than PULL: a PULL round always
feeds the hub, while PUSH wastes most leaf transmissions. The mean ratio
grows with n.
"""

import argparse

from rlnc_gossip.harness import ScenarioConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="8,16,32,64")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    print("n,push_mean,pull_mean,ratio")
    for n in (int(s) for s in args.sizes.split(",")):
        means = {}
        for model in ("sync_push", "sync_pull"):
            cfg = ScenarioConfig(
                n=n, k=n, comm_model=model, family="star",
                init="one_per_node", trials=args.trials, seed=args.seed,
                max_rounds=200_000, workers=args.workers,
                scenario_id="star_%s_%d" % (model, n))
            stats, _ = run_experiment(cfg)
            means[model] = stats.mean
        print("%d,%.2f,%.2f,%.3f" % (n, means["sync_push"],
                                     means["sync_pull"],
                                     means["sync_push"] / means["sync_pull"]))


if __name__ == "__main__":
    main()

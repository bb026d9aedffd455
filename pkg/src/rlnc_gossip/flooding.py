"""Single-message faulty flooding: the reduction target for the RLNC
stopping-time analysis.

The flood reuses the exact round planner from `comm`, so schedules match
the full simulation draw for draw. Forwarding coins come from a separate
stream and are drawn for every scheduled sample slot — informed or not —
which makes runs at different forwarding probabilities couple monotonely
under common random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversary import AdversaryView
from .comm import CommModel, plan_round


class InsufficientTrials(ValueError):
    pass


@dataclass
class FloodState:
    informed: set
    round: int


def forward_probability(q=None, forward_prob=None):
    if forward_prob is not None:
        if not 0.0 <= forward_prob <= 1.0:
            raise ValueError("forward_prob outside [0, 1]")
        return float(forward_prob)
    if q is None:
        raise ValueError("need q or forward_prob")
    return 1.0 - 1.0 / q


def faulty_flood(model, adversary, n, source_set, rng, coin_rng,
                 max_rounds, q=None, forward_prob=None,
                 pull_sampling="independent", async_variant="bernoulli",
                 per_receiver_coins=False, record_rounds=None):
    """Round when every node is informed, or None (DidNotConverge).

    One coin per sampled packet: a silent sender stays silent toward all
    receivers of that packet (broadcast included). per_receiver_coins
    flips an independent coin per delivery instead.
    """
    model = CommModel.from_name(model)
    fp = forward_probability(q, forward_prob)
    informed = set(source_set)
    if not informed:
        raise ValueError("source_set must be nonempty")
    if informed >= set(range(n)):
        return 0
    for rnd in range(1, max_rounds + 1):
        view = AdversaryView(round=rnd, informed=frozenset(informed))
        g = adversary.next_topology(view)
        plan = plan_round(model, g, rng, pull_sampling, async_variant)
        n_coins = len(plan.deliveries) if per_receiver_coins else len(plan.samples)
        coins = coin_rng.random(n_coins) < fp
        newly = set()
        for di, (si, recv) in enumerate(plan.deliveries):
            ok = coins[di] if per_receiver_coins else coins[si]
            if ok and plan.samples[si][0] in informed:
                newly.add(recv)
        informed |= newly
        if record_rounds is not None:
            record_rounds.append(frozenset(informed))
        if len(informed) == n:
            return rnd
    return None


@dataclass
class CoverTimeCDF:
    """Empirical cover-time distribution; np.inf marks DidNotConverge."""

    times: np.ndarray

    @property
    def trials(self):
        return len(self.times)

    def survival(self, t):
        return float(np.mean(self.times > t))

    def mean(self):
        finite = self.times[np.isfinite(self.times)]
        return float(finite.mean()) if len(finite) else float("inf")

    def quantile(self, p):
        # nearest-rank on the sorted sample
        if not 0 < p <= 1:
            raise ValueError("quantile level outside (0, 1]")
        s = np.sort(self.times)
        return float(s[min(len(s) - 1, int(np.ceil(p * len(s))) - 1)])

    def tail_fit(self):
        """Least-squares line on log-survival over the observed upper
        decile: returns (slope, intercept, t_lo, t_hi)."""
        finite = np.sort(self.times[np.isfinite(self.times)])
        if len(finite) < 10:
            raise InsufficientTrials("need >= 10 finite trials for a fit")
        t_lo = finite[int(np.floor(0.9 * len(finite)))]
        ts = np.arange(int(t_lo), int(finite[-1]))
        sv = np.array([self.survival(t) for t in ts])
        keep = sv > 0
        ts, sv = ts[keep], sv[keep]
        if len(ts) < 2:
            raise InsufficientTrials("upper decile too flat for a fit")
        slope, intercept = np.polyfit(ts, np.log(sv), 1)
        return float(slope), float(intercept), int(ts[0]), int(ts[-1])

    def round_for_failure(self, delta):
        """Smallest t with P[cover > t] <= delta; (t, extrapolated).

        Levels below 1/trials use the log-linear tail fit and are
        flagged extrapolated=True.
        """
        if delta <= 0:
            raise ValueError("delta must be positive")
        if delta >= 1.0 / self.trials and np.all(np.isfinite(self.times)):
            return self.quantile(1 - delta), False
        slope, intercept, _, _ = self.tail_fit()
        if slope >= 0:
            raise InsufficientTrials("tail fit is not decaying")
        return float(np.ceil((np.log(delta) - intercept) / slope)), True

    def to_csv(self, path):
        finite_max = int(np.max(self.times[np.isfinite(self.times)]))
        with open(path, "w") as fh:
            fh.write("t,survival_probability\n")
            for t in range(0, finite_max + 1):
                fh.write("%d,%.10g\n" % (t, self.survival(t)))


def estimate_tail(model, adversary_factory, n, source_set, trials,
                  seed=0, q=None, forward_prob=None, max_rounds=10**6,
                  pull_sampling="independent", async_variant="bernoulli",
                  per_receiver_coins=False):
    """Monte Carlo cover-time distribution over independent trials.

    adversary_factory() builds a fresh controller per trial so adaptive
    adversaries cannot leak state across trials.
    """
    from .rng import trial_streams

    if trials < 1:
        raise InsufficientTrials("trials must be >= 1")
    times = np.empty(trials)
    for trial in range(trials):
        rng, coin_rng, adv_rng = trial_streams(seed, trial)
        adv = adversary_factory()
        adv.bind_rng(adv_rng)
        t = faulty_flood(model, adv, n, source_set, rng, coin_rng,
                         max_rounds, q=q, forward_prob=forward_prob,
                         pull_sampling=pull_sampling,
                         async_variant=async_variant,
                         per_receiver_coins=per_receiver_coins)
        times[trial] = np.inf if t is None else t
    return CoverTimeCDF(times)

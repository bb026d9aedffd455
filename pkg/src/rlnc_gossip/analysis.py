"""Tail machinery as numeric procedures: the exact negative-binomial
tail, the k + O(T) round-budget form, the weighted-Bernoulli
second-moment bound, and the worst-case PULL leading constants.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np


class DomainError(ValueError):
    pass


class EmptyWeights(ValueError):
    pass


def negbin_tail_exact(t, T, p, dps=50):
    """P[>= t - T failures in t trials], failure prob p per trial.

    Exact binomial upper-tail sum at `dps` decimal digits, returned as
    a float (the summands are positive, so float conversion loses at
    most one ulp).
    """
    if not (0 <= T <= t):
        raise DomainError("need 0 <= T <= t")
    if not (0 < p < 1):
        raise DomainError("need 0 < p < 1")
    with mpmath.workdps(dps):
        pm = mpmath.mpf(p)
        total = mpmath.mpf(0)
        for i in range(t - T, t + 1):
            total += mpmath.binomial(t, i) * pm**i * (1 - pm)**(t - i)
        return float(total)


PIPELINING_C = 8


def pipelining_rounds(k, T, p, q, d=0, C=PIPELINING_C):
    """Round budget t = (ln q / -ln p)·k + C·T + d.

    The leading coefficient is 1 when the per-round failure probability
    p equals 1/q, giving the perfect-pipelining budget k + C·T + d.
    """
    if not (0 < p < 1):
        raise DomainError("need 0 < p < 1")
    if q < 2:
        raise DomainError("need q >= 2")
    coeff = math.log(q) / (-math.log(p))
    return int(math.ceil(coeff * k + C * T + d))


def tail_round_budget(k, T, p, iters=100):
    """The proof's explicit choice t = k - (T+1)·log t / log p + T,
    solved as a fixed point (log p < 0 makes the middle term positive)."""
    if not (0 < p < 1):
        raise DomainError("need 0 < p < 1")
    t = float(k + T + 1)
    for _ in range(iters):
        t_new = k - (T + 1) * math.log(t) / math.log(p) + T
        if abs(t_new - t) < 1e-12:
            break
        t = t_new
    return t


def tail_budget_check(k, T, p):
    """(t, exact_tail, p**k, tail <= p**k) at the proof's round budget."""
    t = int(math.ceil(tail_round_budget(k, T, p)))
    tail = negbin_tail_exact(t, T, p)
    bound = p**k
    return t, tail, bound, tail <= bound


def weighted_bernoulli_bound_check(weights, p, trials, rng, chunk=100_000):
    """Monte Carlo check of P[sum w_j X_j <= (1-p)/4 · sum w_j] <= p
    with X_j i.i.d. Bernoulli(1 - p). Returns (estimate, p, passed);
    passed means estimate <= p + 3 standard errors."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise EmptyWeights("weights must be nonempty")
    if np.any(w <= 0):
        raise DomainError("weights must be positive")
    if not (0 < p <= 0.5):
        raise DomainError("need 0 < p <= 1/2")
    threshold = 0.25 * (1 - p) * w.sum()
    hits = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        x = rng.random((m, w.size)) >= p          # X_j = 1 w.p. 1 - p
        hits += int(np.count_nonzero(x @ w <= threshold))
        done += m
    est = hits / trials
    sigma = math.sqrt(max(est * (1 - est), 1e-12) / trials)
    return est, p, est <= p + 3 * sigma


def worst_case_pull_constants(i, q=2):
    """(lower, upper) leading constants of PULL stopping time / k when
    each message starts at i nodes: 1/(1 - e^-i) and
    ln q / -ln(e^-i + (1 - e^-i)/q). At i=1, q=2 these are
    1.58197671 and 1.82462135; both tend to 1 as i grows."""
    if i < 1:
        raise DomainError("need i >= 1")
    if q < 2:
        raise DomainError("need q >= 2")
    miss = math.exp(-i)
    lower = 1.0 / (1.0 - miss)
    upper = math.log(q) / (-math.log(miss + (1.0 - miss) / q))
    return lower, upper

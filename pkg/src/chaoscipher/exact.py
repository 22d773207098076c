"""Finite-sample null distributions for small-n NIST runs.

The standard's p-values are asymptotic.  At desk-scale lengths (a few
thousand bits) several of them break down: chi-square cells with expected
counts well under 5, random walks with a few dozen cycles, and Maurer's
test with L < 6.  The functions here give the exact (or exact-asymptotic)
counterparts used in those regimes.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc
from scipy.stats import binom, nbinom

# expected count below which the chi-square approximation is not trusted
MIN_EXPECTED = 5.0
_TAIL_EPS = 1e-15


def chi2_statistic(observed, probs):
    observed = np.asarray(observed, dtype=np.float64)
    expected = observed.sum() * np.asarray(probs, dtype=np.float64)
    return float(((observed - expected) ** 2 / expected).sum())


def multinomial_chi2_sf(observed, probs):
    """P(X2 >= observed X2) when the counts are Multinomial(N, probs).

    Exact.  Compositions are enumerated category by category with
    branch-and-bound: a subtree is accepted or discarded whole as soon as
    the bounds on its remaining contribution decide it.
    """
    obs = np.asarray(observed, dtype=np.int64)
    p = np.asarray(probs, dtype=np.float64)
    p = p / p.sum()
    N = int(obs.sum())
    if N == 0:
        return 1.0
    # X2 = sum(v^2 / p) / N - N, so compare W = sum(v^2 / p)
    target = float((obs.astype(np.float64) ** 2 / p).sum())
    target -= 1e-9 * max(1.0, target)
    order = np.argsort(p)[::-1]
    p = p[order]
    K = p.size
    tail_mass = np.cumsum(p[::-1])[::-1]  # sum of p[i:]
    tail_min = np.minimum.accumulate(p[::-1])[::-1]  # min of p[i:]

    pmf_cache = {}

    def pmf(i, r):
        key = (i, r)
        if key not in pmf_cache:
            pm = binom.pmf(np.arange(r + 1), r, p[i] / tail_mass[i])
            pmf_cache[key] = [(v, w, v * v / p[i]) for v, w in enumerate(pm.tolist()) if w >= _TAIL_EPS]
        return pmf_cache[key]

    def rec(i, r, partial):
        if i == K - 1:
            return 1.0 if partial + r * r / p[i] >= target else 0.0
        if partial + r * r / tail_mass[i] >= target:
            return 1.0
        if partial + r * r / tail_min[i] < target:
            return 0.0
        total = 0.0
        for v, w, cost in pmf(i, r):
            total += w * rec(i + 1, r - v, partial + cost)
        return total

    return min(1.0, max(0.0, rec(0, N, 0.0)))


def chi2_p_value(observed, probs, df=None):
    """Chi-square goodness-of-fit p-value; exact when any expected count
    is below :data:`MIN_EXPECTED`.  Returns (p, method)."""
    observed = np.asarray(observed)
    probs = np.asarray(probs, dtype=np.float64)
    N = observed.sum()
    df = df if df is not None else probs.size - 1
    if N * probs.min() < MIN_EXPECTED:
        return multinomial_chi2_sf(observed, probs), "exact"
    return float(gammaincc(df / 2, chi2_statistic(observed, probs) / 2)), "asymptotic"


@lru_cache(maxsize=None)
def maurer_moments(L):
    """Mean and asymptotic variance (times K) of Maurer's statistic for
    i.i.d. uniform L-bit blocks, covariance between gaps included."""
    p = 2.0 ** -L
    q = 1 - p
    q2 = 1 - 2 * p
    amax = int(math.ceil(45 / p)) + 50
    a = np.arange(1, amax + 1, dtype=np.float64)
    g = np.log2(a)
    pa = p * q ** (a - 1)
    mean = float((pa * g).sum())
    var = float((pa * g * g).sum()) - mean ** 2
    # h[d] = sum_a T(a, d) g(a), where T is the joint weight of "current
    # symbol s at distance a" and "other symbol t last seen d before n"
    h = np.zeros(amax)
    for di in range(amax):
        d = di + 1
        lo = np.arange(1, d)  # a < d
        hi = np.arange(d + 1, amax + 1)  # a > d
        t_lo = p * q2 ** (lo - 1) * p * q ** (d - lo - 1)
        t_hi = p * q2 ** (d - 1) * p * q ** (hi - d - 1)
        h[di] = (t_lo * np.log2(lo)).sum() + (t_hi * np.log2(hi)).sum()
    cov_sum = 0.0
    pc_g = np.cumsum(pa * g)  # sum_{c <= j} P(c) g(c)
    for k in range(1, 4 * amax):
        e_lt = mean * (pc_g[k - 2] if k >= 2 else 0.0)
        e_eq = p * q ** (k - 1) * math.log2(k) * mean
        d = np.arange(1, amax + 1)
        e_gt = q ** k * (h * np.log2(k + d)).sum()
        cov = e_lt + e_eq + e_gt - mean ** 2
        cov_sum += cov
        if k > 20 and abs(cov) < 1e-13:
            break
    return mean, var + 2 * cov_sum


def excursion_visits_sf(J, x, observed):
    """Two-sided P(|xi - J| >= |observed - J|) for total visits ``xi`` to
    state ``x`` over ``J`` independent cycles.

    Each cycle reaches x with probability 1/(2|x|) and, once there, makes a
    geometric number of visits; so xi is a binomial mixture of negative
    binomials.
    """
    q = 1.0 / (2 * abs(x))
    B = np.arange(J + 1)
    wB = binom.pmf(B, J, q)
    dev = abs(observed - J)

    def cdf(s):
        if s < 0:
            return 0.0
        # xi = B + (failures of a NegBin(B, q)); B = 0 means xi = 0
        vals = np.where(B == 0, 1.0, nbinom.cdf(s - B, np.maximum(B, 1), q))
        vals = np.where(B > s, 0.0, vals)
        return float((wB * vals).sum())

    lower = cdf(J - dev)
    upper = 1.0 - cdf(J + dev - 1)
    return min(1.0, max(0.0, lower + upper))


@lru_cache(maxsize=64)
def template_count_pmf(template, M):
    """Distribution of the non-overlapping match count of ``template`` (a
    0/1 string) in ``M`` uniform bits, scanning left to right and
    restarting after each match."""
    m = len(template)
    # KMP automaton: state = length of the matched prefix
    fail = [0] * m
    k = 0
    for i in range(1, m):
        while k and template[i] != template[k]:
            k = fail[k - 1]
        if template[i] == template[k]:
            k += 1
        fail[i] = k
    delta = [[0, 0] for _ in range(m)]
    for s in range(m):
        for b in (0, 1):
            ch = str(b)
            t = s
            while t and template[t] != ch:
                t = fail[t - 1]
            delta[s][b] = t + 1 if template[t] == ch else 0
    cmax = M // m
    P = np.zeros((m, cmax + 2))
    P[0, 0] = 1.0
    for _ in range(M):
        new = np.zeros_like(P)
        for s in range(m):
            for b in (0, 1):
                t = delta[s][b]
                if t == m:
                    new[0, 1:] += 0.5 * P[s, :-1]
                else:
                    new[t] += 0.5 * P[s]
        P = new
    return P.sum(axis=0)[:cmax + 1]


def sum_sq_deviation_sf(pmf, mu, var, N, observed):
    """P(sum_j (W_j - mu)^2 / var >= observed) for N i.i.d. W_j ~ ``pmf``."""
    keep = np.flatnonzero(pmf > 1e-18)
    wmax = int(keep.max())
    # joint distribution of (sum W, sum W^2)
    A = np.zeros((1, 1))
    A[0, 0] = 1.0
    for _ in range(N):
        new = np.zeros((A.shape[0] + wmax, A.shape[1] + wmax * wmax))
        for w in keep:
            new[w:w + A.shape[0], w * w:w * w + A.shape[1]] += pmf[w] * A
        A = new
    s1 = np.arange(A.shape[0])[:, None]
    s2 = np.arange(A.shape[1])[None, :]
    stat = (s2 - 2 * mu * s1 + N * mu * mu) / var
    tail = A[stat >= observed - 1e-9 * max(1.0, observed)].sum()
    return float(min(1.0, max(0.0, tail)))

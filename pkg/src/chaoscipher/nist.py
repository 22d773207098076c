"""The fifteen NIST SP 800-22 (rev 1a) statistical tests.

Every test takes a bit sequence (see :func:`as_bits`) and returns a
:class:`TestResult`.  Inputs below a test's recommended size are still
evaluated when the statistic is computable; such results carry
``params["reduced_power"] = True`` instead of being refused.  A result is
marked ``applicable=False`` only when the statistic cannot be formed at all.

Bit order for byte input is MSB first.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.special import erfc, gammaincc, ndtr

from chaoscipher import exact, kernels

ALPHA = 0.01

# row labels, in report order
LABELS = {
    "monobit": "Frequency (Monobit)",
    "block_frequency": "Block Frequency",
    "cumulative_sums_forward": "Cumulative Sums (fwd)",
    "cumulative_sums_backward": "Cumulative Sums (bwd)",
    "dft": "FFT",
    "approximate_entropy": "Approximate Entropy",
    "linear_complexity": "Linear Complexity",
    "longest_run": "Longest Run of Ones",
    "non_overlapping_template": "Non-overlapping Templates",
    "overlapping_template": "Overlapping Templates",
    "random_excursions": "Random Excursions",
    "random_excursions_variant": "Random Excursions Variant",
    "rank": "Rank (32x32)",
    "runs": "Runs",
    "serial": "Serial (m=3)",
    "universal": "Universal (Maurer)",
}


@dataclass
class BitSequence:
    bits: np.ndarray

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitSequence":
        return cls(np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)))

    @classmethod
    def from_string(cls, text: str) -> "BitSequence":
        return cls(as_bits(text))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self):
        return self.n


def as_bits(seq) -> np.ndarray:
    """Coerce a '0101' string, 0/1 iterable, bytes or BitSequence to uint8 bits."""
    if isinstance(seq, BitSequence):
        return seq.bits
    if isinstance(seq, str):
        arr = np.frombuffer(seq.strip().encode("ascii"), dtype=np.uint8) - ord("0")
    elif isinstance(seq, (bytes, bytearray, memoryview)):
        arr = np.unpackbits(np.frombuffer(bytes(seq), dtype=np.uint8))
    else:
        arr = np.asarray(seq, dtype=np.uint8)
    if arr.ndim != 1 or (arr.size and arr.max() > 1):
        raise ValueError("bit sequence must be a flat sequence of 0/1")
    return arr


@dataclass
class TestResult:
    __test__ = False  # not a pytest class

    name: str
    p_values: list
    statistic: float
    passed: bool
    applicable: bool = True
    params: dict = field(default_factory=dict)

    @property
    def p_value(self):
        return min(self.p_values) if self.p_values else None

    @property
    def label(self) -> str:
        return LABELS.get(self.name, self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "p_values": [float(p) for p in self.p_values],
            "statistic": float(self.statistic) if self.statistic is not None else None,
            "pass": bool(self.passed),
            "applicable": bool(self.applicable),
            "params": _jsonable(self.params),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _result(name, p_values, statistic, alpha, **params):
    ps = [min(1.0, max(0.0, float(p))) for p in p_values]
    return TestResult(name, ps, float(statistic), bool(ps) and min(ps) >= alpha, True, params)


def _not_applicable(name, reason, **params):
    params["reason"] = reason
    return TestResult(name, [], 0.0, False, False, params)


def igamc(a, x):
    return float(gammaincc(a, x))


def _windows(bits, m, wrap):
    """Integer value of every m-bit window (MSB first), optionally cyclic."""
    if wrap:
        bits = np.concatenate([bits, bits[:m - 1]])
    n = bits.size - m + 1
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    vals = np.zeros(n, dtype=np.int64)
    for j in range(m):
        vals = (vals << 1) | bits[j:j + n]
    return vals


def monobit(seq, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    if n == 0:
        return _not_applicable("monobit", "empty sequence")
    s = 2 * int(bits.sum()) - n
    s_obs = abs(s) / math.sqrt(n)
    return _result("monobit", [erfc(s_obs / math.sqrt(2))], s_obs, alpha, n=n, sum=s,
                   reduced_power=n < 100)


def block_frequency(seq, M=128, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    if M < 2 or M > n:
        return _not_applicable("block_frequency", f"block length M={M} does not fit n={n}", M=M)
    N = n // M
    pi = bits[:N * M].reshape(N, M).mean(axis=1)
    chi2 = 4.0 * M * float(((pi - 0.5) ** 2).sum())
    return _result("block_frequency", [igamc(N / 2, chi2 / 2)], chi2, alpha, M=M, N=N,
                   reduced_power=n < 100)


def runs(seq, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    if n < 2:
        return _not_applicable("runs", "need at least 2 bits")
    pi = bits.mean()
    tau = 2 / math.sqrt(n)
    if abs(pi - 0.5) >= tau or pi in (0.0, 1.0):
        return _not_applicable("runs", "frequency prerequisite failed", pi=pi, tau=tau)
    v = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    p = erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))
    return _result("runs", [p], v, alpha, pi=pi, runs=v, reduced_power=n < 100)


_LONGEST_RUN_TIERS = [
    # min n, block M, category bounds (low, high), probabilities
    (750000, 10000, (10, 16), [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727]),
    (6272, 128, (4, 9), [0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124]),
    (128, 8, (1, 4), [0.2148, 0.3672, 0.2305, 0.1875]),
]


def _longest_ones(blocks):
    # longest run of ones in each row
    best = np.zeros(blocks.shape[0], dtype=np.int64)
    cur = np.zeros_like(best)
    for col in blocks.T:
        cur = np.where(col == 1, cur + 1, 0)
        np.maximum(best, cur, out=best)
    return best


def longest_run(seq, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    for min_n, M, (lo, hi), probs in _LONGEST_RUN_TIERS:
        if n >= min_n:
            break
    else:
        return _not_applicable("longest_run", "need at least 128 bits")
    N = n // M
    longest = _longest_ones(bits[:N * M].reshape(N, M))
    v = np.bincount(np.clip(longest, lo, hi) - lo, minlength=len(probs))
    expected = N * np.asarray(probs)
    chi2 = float(((v - expected) ** 2 / expected).sum())
    K = len(probs) - 1
    p, method = exact.chi2_p_value(v, probs, df=K)
    return _result("longest_run", [p], chi2, alpha, M=M, N=N, K=K,
                   observed=v.tolist(), expected=expected.tolist(), p_method=method,
                   asymptotic_p=igamc(K / 2, chi2 / 2))


def rank_probability(r, M, Q):
    """Probability that a random M x Q binary matrix has rank r."""
    if r == 0:
        return 2.0 ** (-M * Q)
    logp = (r * (Q + M - r) - M * Q) * math.log(2)
    for i in range(r):
        logp += math.log1p(-2.0 ** (i - Q)) + math.log1p(-2.0 ** (i - M)) - math.log1p(-2.0 ** (i - r))
    return math.exp(logp)


def rank(seq, M=32, Q=32, min_matrices=38, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    N = n // (M * Q)
    full = min(M, Q)
    if N < 1:
        return _not_applicable("rank", f"need at least one {M}x{Q} matrix", M=M, Q=Q)
    mats = bits[:N * M * Q].reshape(N, M, Q)
    ranks = np.array([kernels.gf2_rank(mat) for mat in mats])
    p_full = rank_probability(full, M, Q)
    p_minus = rank_probability(full - 1, M, Q)
    probs = np.array([p_full, p_minus, 1.0 - p_full - p_minus])
    v = np.array([np.sum(ranks == full), np.sum(ranks == full - 1), np.sum(ranks < full - 1)])
    expected = N * probs
    chi2 = float(((v - expected) ** 2 / expected).sum())
    p, method = exact.chi2_p_value(v, probs, df=2)
    return _result("rank", [p], chi2, alpha, M=M, Q=Q, N=N,
                   observed=v.tolist(), expected=expected.tolist(), p_method=method,
                   asymptotic_p=math.exp(-chi2 / 2),
                   probabilities=probs.tolist(), reduced_power=N < min_matrices)


def dft(seq, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size - (bits.size % 2)
    if n < 2:
        return _not_applicable("dft", "need at least 2 bits")
    x = 2.0 * bits[:n] - 1.0
    mod = np.abs(np.fft.fft(x)[: n // 2])
    T = math.sqrt(math.log(1 / 0.05) * n)
    n0 = 0.95 * n / 2
    n1 = int(np.count_nonzero(mod < T))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4)
    return _result("dft", [erfc(abs(d) / math.sqrt(2))], d, alpha, n=n, threshold=T, N0=n0, N1=n1,
                   reduced_power=n < 1000)


def aperiodic_templates(m=9):
    """Aperiodic (unbordered) templates of length m, lexicographic order."""
    if m == 9:
        text = resources.files("chaoscipher").joinpath("data/templates9.txt").read_text()
        return [t for t in text.split() if t]
    out = []
    for v in range(1 << m):
        w = format(v, f"0{m}b")
        if all(w[:k] != w[-k:] for k in range(1, m)):
            out.append(w)
    return out


def count_non_overlapping(bits, template) -> int:
    """Occurrences of ``template`` scanning left to right, skipping past each match."""
    bits = as_bits(bits)
    t = as_bits(template)
    m = t.size
    if bits.size < m:
        return 0
    value = int("".join(map(str, t.tolist())), 2)
    hits = np.flatnonzero(_windows(bits, m, wrap=False) == value)
    count = 0
    nxt = 0
    for h in hits:
        if h >= nxt:
            count += 1
            nxt = h + m
    return count


# blocks up to this length get an exact null for the headline template
TEMPLATE_EXACT_MAX_BLOCK = 20000


def non_overlapping_template(seq, m=9, N=8, templates=None, primary=None, alpha=ALPHA):
    """Non-overlapping template matching over ``N`` blocks.

    All templates are evaluated (``params["template_p_values"]``).  The
    reported p-value is that of ``primary`` (default: the first template,
    ``0...01``); the minimum over templates is in ``params["min_p"]``.
    """
    bits = as_bits(seq)
    n = bits.size
    M = n // N
    if M < m:
        return _not_applicable("non_overlapping_template", f"block length {M} shorter than m={m}", m=m, N=N)
    templates = list(templates) if templates is not None else aperiodic_templates(m)
    primary = primary if primary is not None else templates[0]
    if primary not in templates:
        templates.insert(0, primary)
    mu = (M - m + 1) / 2 ** m
    var = M * (1 / 2 ** m - (2 * m - 1) / 2 ** (2 * m))
    blocks = bits[:N * M].reshape(N, M)
    win = [_windows(b, m, wrap=False) for b in blocks]
    pvals = {}
    counts = {}
    chis = {}
    for t in templates:
        value = int(t, 2)
        w = []
        for wb in win:
            c = 0
            nxt = 0
            for h in np.flatnonzero(wb == value):
                if h >= nxt:
                    c += 1
                    nxt = h + m
            w.append(c)
        chi2 = float(((np.array(w) - mu) ** 2).sum() / var)
        counts[t] = w
        chis[t] = chi2
        pvals[t] = igamc(N / 2, chi2 / 2)
    headline = pvals[primary]
    method = "asymptotic"
    if M <= TEMPLATE_EXACT_MAX_BLOCK:
        pmf = exact.template_count_pmf(primary, M)
        headline = exact.sum_sq_deviation_sf(pmf, mu, var, N, chis[primary])
        method = "exact"
    return _result("non_overlapping_template", [headline], chis[primary], alpha,
                   p_method=method, asymptotic_p=pvals[primary],
                   m=m, N=N, M=M, mu=mu, variance=var, template=primary,
                   counts=counts[primary], min_p=min(pvals.values()),
                   template_p_values=pvals, reduced_power=n < 10 ** 6)


def count_overlapping(bits, template) -> int:
    bits = as_bits(bits)
    t = as_bits(template)
    value = int("".join(map(str, t.tolist())), 2)
    return int(np.count_nonzero(_windows(bits, t.size, wrap=False) == value))


# rev 1a category probabilities for m=9, M=1032, K=5
OVERLAPPING_PI = [0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865]


def overlapping_template(seq, m=9, M=1032, K=5, template=None, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    N = n // M
    if N < 1:
        return _not_applicable("overlapping_template", f"need at least one block of {M} bits", m=m, M=M)
    template = template if template is not None else "1" * m
    value = int(template, 2)
    blocks = bits[:N * M].reshape(N, M)
    counts = np.array([np.count_nonzero(_windows(b, m, wrap=False) == value) for b in blocks])
    v = np.bincount(np.minimum(counts, K), minlength=K + 1)
    if m == 9 and M == 1032 and K == 5:
        probs = np.array(OVERLAPPING_PI)
    else:
        probs = _overlapping_probs(m, M, K)
    expected = N * probs
    chi2 = float(((v - expected) ** 2 / expected).sum())
    p, method = exact.chi2_p_value(v, probs, df=K)
    return _result("overlapping_template", [p], chi2, alpha,
                   m=m, M=M, N=N, K=K, template=template, observed=v.tolist(),
                   p_method=method, asymptotic_p=igamc(K / 2, chi2 / 2),
                   expected=expected.tolist(), reduced_power=n < 10 ** 6)


def _overlapping_probs(m, M, K):
    # compound Poisson approximation used by the standard
    lam = (M - m + 1) / 2 ** m
    eta = lam / 2
    probs = []
    for u in range(K):
        if u == 0:
            probs.append(math.exp(-eta))
        else:
            s = sum(math.comb(u - 1, l - 1) * eta ** l / math.factorial(l) for l in range(1, u + 1))
            probs.append(math.exp(-eta) / 2 ** u * s)
    probs.append(1 - sum(probs))
    return np.array(probs)


# expected value and variance of Maurer's statistic, indexed by L
UNIVERSAL_EXPECTED = [0, 0.7326495, 1.5374383, 2.4016068, 3.3112247, 4.2534266, 5.2177052,
                      6.1962507, 7.1836656, 8.1764248, 9.1723243, 10.170032, 11.168765,
                      12.168070, 13.167693, 14.167488, 15.167379]
UNIVERSAL_VARIANCE = [0, 0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238, 3.311,
                      3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421]
# standard tier table: smallest n for each L
UNIVERSAL_TIERS = [(1059061760, 16), (496435200, 15), (231669760, 14), (107560960, 13),
                   (49643520, 12), (22753280, 11), (10342400, 10), (4654080, 9),
                   (2068480, 8), (904960, 7), (387840, 6)]


def universal_block_length(n):
    """Pick L for Maurer's test; returns (L, extended) where ``extended``
    marks a choice below the standard's table."""
    for min_n, L in UNIVERSAL_TIERS:
        if n >= min_n:
            return L, False
    # below the table: largest L in 5..2 with at least 500 * 2**L test blocks
    for L in range(5, 1, -1):
        if n >= (10 * 2 ** L + 500 * 2 ** L) * L:
            return L, True
    return 2, True


def universal(seq, L=None, Q=None, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    extended = False
    if L is None:
        L, extended = universal_block_length(n)
    Q = Q if Q is not None else 10 * 2 ** L
    K = n // L - Q
    if K < 1:
        return _not_applicable("universal", f"n={n} too small for L={L}, Q={Q}", L=L, Q=Q)
    weights = 1 << np.arange(L - 1, -1, -1)
    vals = bits[:(Q + K) * L].reshape(Q + K, L) @ weights
    # 1-based index of the previous occurrence of each block value (0 if none)
    idx = np.arange(1, Q + K + 1)
    order = np.lexsort((idx, vals))
    prev = np.zeros(Q + K, dtype=np.int64)
    same = vals[order][1:] == vals[order][:-1]
    prev[order[1:][same]] = idx[order[:-1][same]]
    gaps = idx[Q:] - prev[Q:]
    fn = float(np.log2(gaps).sum() / K)
    if L >= 6:
        c = 0.7 - 0.8 / L + (4 + 32 / L) * K ** (-3 / L) / 15
        sigma = c * math.sqrt(UNIVERSAL_VARIANCE[L] / K)
        method = "table"
    else:
        # short blocks: the table's correction factor underestimates the
        # spread, so use the variance with inter-gap covariance included
        sigma = math.sqrt(exact.maurer_moments(L)[1] / K)
        method = "exact_variance"
    p = erfc(abs(fn - UNIVERSAL_EXPECTED[L]) / (math.sqrt(2) * sigma))
    return _result("universal", [p], fn, alpha, L=L, Q=Q, K=K, extended_table=extended,
                   sigma=sigma, variance_method=method,
                   reduced_power=extended or K < 1000 * 2 ** L)


def berlekamp_massey(bits) -> int:
    """Linear complexity of a 0/1 sequence."""
    return int(kernels.linear_complexity(as_bits(bits)))


LINEAR_COMPLEXITY_PI = [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833]


def linear_complexity(seq, M=500, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    N = n // M
    if N < 1:
        return _not_applicable("linear_complexity", f"need at least M={M} bits", M=M)
    L = np.array([kernels.linear_complexity(b) for b in bits[:N * M].reshape(N, M)])
    sign = -1.0 if M % 2 else 1.0
    mu = M / 2 + (9 + (-1) ** (M + 1)) / 36 - (M / 3 + 2 / 9) / 2 ** M
    T = sign * (L - mu) + 2 / 9
    cat = np.digitize(T, [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5], right=True)
    v = np.bincount(cat, minlength=7)
    expected = N * np.asarray(LINEAR_COMPLEXITY_PI)
    chi2 = float(((v - expected) ** 2 / expected).sum())
    p, method = exact.chi2_p_value(v, LINEAR_COMPLEXITY_PI, df=6)
    return _result("linear_complexity", [p], chi2, alpha, M=M, N=N,
                   observed=v.tolist(), expected=expected.tolist(), p_method=method,
                   asymptotic_p=igamc(3, chi2 / 2), reduced_power=N < 200)


def _psi2(bits, m):
    if m <= 0:
        return 0.0
    n = bits.size
    counts = np.bincount(_windows(bits, m, wrap=True), minlength=2 ** m)
    return 2 ** m / n * float((counts.astype(np.float64) ** 2).sum()) - n


def serial(seq, m=3, alpha=ALPHA):
    """Serial test; two p-values (first and second differences)."""
    bits = as_bits(seq)
    n = bits.size
    if m < 2 or m > n:
        return _not_applicable("serial", f"m={m} unusable for n={n}", m=m)
    psi = [_psi2(bits, m), _psi2(bits, m - 1), _psi2(bits, m - 2)]
    d1 = psi[0] - psi[1]
    d2 = psi[0] - 2 * psi[1] + psi[2]
    p1 = igamc(2 ** (m - 2), d1 / 2)
    p2 = igamc(2 ** (m - 3), d2 / 2)
    return _result("serial", [p1, p2], d1, alpha, m=m, psi2=psi, del1=d1, del2=d2,
                   reduced_power=m >= int(math.log2(n)) - 2)


def _phi(bits, m):
    n = bits.size
    if m == 0:
        return 0.0
    counts = np.bincount(_windows(bits, m, wrap=True), minlength=2 ** m)
    c = counts[counts > 0] / n
    return float((c * np.log(c)).sum())


def approximate_entropy(seq, m=2, alpha=ALPHA):
    bits = as_bits(seq)
    n = bits.size
    if m < 1 or m + 1 > n:
        return _not_applicable("approximate_entropy", f"m={m} unusable for n={n}", m=m)
    apen = _phi(bits, m) - _phi(bits, m + 1)
    chi2 = 2 * n * (math.log(2) - apen)
    return _result("approximate_entropy", [igamc(2 ** (m - 1), chi2 / 2)], chi2, alpha,
                   m=m, apen=apen, reduced_power=m >= int(math.log2(n)) - 5)


def _tdiv(a, b):
    # C integer division (truncation toward zero), as in the reference code
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def cusum_p_value(n, z):
    if z == 0:
        return 1.0
    rn = math.sqrt(n)
    nz = _tdiv(n, z)
    k = np.arange(_tdiv(-nz + 1, 4), _tdiv(nz - 1, 4) + 1)
    s1 = (ndtr((4 * k + 1) * z / rn) - ndtr((4 * k - 1) * z / rn)).sum()
    k = np.arange(_tdiv(-nz - 3, 4), _tdiv(nz - 1, 4) + 1)
    s2 = (ndtr((4 * k + 3) * z / rn) - ndtr((4 * k + 1) * z / rn)).sum()
    return float(1.0 - s1 + s2)


def cumulative_sums(seq, alpha=ALPHA):
    """Forward and backward cumulative-sums results."""
    bits = as_bits(seq)
    n = bits.size
    if n == 0:
        na = _not_applicable("cumulative_sums_forward", "empty sequence")
        return na, _not_applicable("cumulative_sums_backward", "empty sequence")
    x = 2 * bits.astype(np.int64) - 1
    out = []
    for name, walk in (("cumulative_sums_forward", x), ("cumulative_sums_backward", x[::-1])):
        z = int(np.abs(np.cumsum(walk)).max())
        out.append(_result(name, [cusum_p_value(n, z)], z, alpha, z=z, reduced_power=n < 100))
    return tuple(out)


def walk_cycles(bits):
    """Partial-sum walk split into zero-to-zero cycles.

    Returns (S, cycle_id, J): the walk S_1..S_n, the cycle index of each
    position and the number of cycles (a trailing non-zero tail counts).
    """
    x = 2 * as_bits(bits).astype(np.int64) - 1
    S = np.cumsum(x)
    zeros = S == 0
    cycle = np.concatenate([[0], np.cumsum(zeros)[:-1]]) if S.size else np.zeros(0, np.int64)
    J = int(zeros.sum()) + int(S.size > 0 and S[-1] != 0)
    return S, cycle, J


def excursion_probabilities(x):
    """P(state x visited exactly k times in a cycle), k = 0..4 and >= 5."""
    a = abs(x)
    q = 1 - 1 / (2 * a)
    probs = [q] + [1 / (4 * a * a) * q ** (k - 1) for k in range(1, 5)]
    probs.append(1 / (2 * a) * q ** 4)
    return np.array(probs)


def random_excursions(seq, alpha=ALPHA):
    """Eight p-values (states -4..-1, 1..4); headline is their Sidak-adjusted
    minimum.  Fewer than 500 cycles is flagged as reduced power."""
    S, cycle, J = walk_cycles(seq)
    if J < 1:
        return _not_applicable("random_excursions", "no cycles in walk")
    states = [-4, -3, -2, -1, 1, 2, 3, 4]
    pvals = {}
    stats = {}
    observed = {}
    methods = {}
    for x in states:
        visits = np.bincount(cycle[S == x], minlength=J)
        v = np.bincount(np.minimum(visits, 5), minlength=6)
        probs = excursion_probabilities(x)
        expected = J * probs
        stats[x] = float(((v - expected) ** 2 / expected).sum())
        observed[x] = v.tolist()
        pvals[x], methods[x] = exact.chi2_p_value(v, probs, df=5)
    pmin = min(pvals.values())
    headline = 1 - (1 - pmin) ** len(states)
    return _result("random_excursions", [headline], max(stats.values()), alpha, J=J,
                   state_p_values=pvals, state_chi2=stats, observed=observed, min_p=pmin,
                   p_method=methods,
                   low_cycle_warning=J < 500, reduced_power=J < 500)


# below this many cycles the visit counts use their exact distribution
VARIANT_EXACT_BELOW = 500


def random_excursions_variant(seq, alpha=ALPHA):
    """Eighteen p-values (states -9..-1, 1..9); headline as in
    :func:`random_excursions`."""
    S, _, J = walk_cycles(seq)
    if J < 1:
        return _not_applicable("random_excursions_variant", "no cycles in walk")
    states = [x for x in range(-9, 10) if x]
    pvals = {}
    visits = {}
    for x in states:
        xi = int(np.count_nonzero(S == x))
        visits[x] = xi
        if J < VARIANT_EXACT_BELOW:
            pvals[x] = exact.excursion_visits_sf(J, x, xi)
        else:
            pvals[x] = erfc(abs(xi - J) / math.sqrt(2 * J * (4 * abs(x) - 2)))
    pmin = min(pvals.values())
    headline = 1 - (1 - pmin) ** len(states)
    return _result("random_excursions_variant", [headline], float(J), alpha, J=J,
                   p_method="exact" if J < VARIANT_EXACT_BELOW else "asymptotic",
                   state_p_values=pvals, visits=visits, min_p=pmin,
                   low_cycle_warning=J < 500, reduced_power=J < 500)


def run_battery(seq, alpha=ALPHA, threads=1):
    """All fifteen tests at their default parameters, in report row order."""
    bits = as_bits(seq)
    jobs = [
        ("monobit", lambda: monobit(bits, alpha)),
        ("block_frequency", lambda: block_frequency(bits, alpha=alpha)),
        ("cumulative_sums", lambda: cumulative_sums(bits, alpha)),
        ("dft", lambda: dft(bits, alpha)),
        ("approximate_entropy", lambda: approximate_entropy(bits, alpha=alpha)),
        ("linear_complexity", lambda: linear_complexity(bits, alpha=alpha)),
        ("longest_run", lambda: longest_run(bits, alpha)),
        ("non_overlapping_template", lambda: non_overlapping_template(bits, alpha=alpha)),
        ("overlapping_template", lambda: overlapping_template(bits, alpha=alpha)),
        ("random_excursions", lambda: random_excursions(bits, alpha)),
        ("random_excursions_variant", lambda: random_excursions_variant(bits, alpha)),
        ("rank", lambda: rank(bits, alpha=alpha)),
        ("runs", lambda: runs(bits, alpha)),
        ("serial", lambda: serial(bits, 3, alpha)),
        ("universal", lambda: universal(bits, alpha=alpha)),
    ]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            done = list(pool.map(lambda job: job[1](), jobs))
    else:
        done = [job() for _, job in jobs]
    results = []
    for r in done:
        results.extend(r if isinstance(r, tuple) else [r])
    return results


def histograms(results):
    """Observed vs expected category counts for the category-based tests."""
    return {r.name: {"observed": r.params["observed"], "expected": r.params["expected"]}
            for r in results if r.applicable and "expected" in r.params}


def format_table(results, n=None, alpha=ALPHA) -> str:
    width = max(len(r.label) for r in results)
    lines = [f"{'Test':<{width}}  {'p-value':<15}  Pass"]
    lines.append("-" * len(lines[0]))
    for r in results:
        if not r.applicable:
            lines.append(f"{r.label:<{width}}  {'n/a':<15}  n/a")
            continue
        ps = "/".join(f"{p:.4f}" for p in r.p_values)
        verdict = "/".join("Yes" if p >= alpha else "No" for p in r.p_values)
        lines.append(f"{r.label:<{width}}  {ps:<15}  {verdict}")
    if n is not None:
        lines.append(f"(sequence with n={n} bits)")
    return "\n".join(lines)

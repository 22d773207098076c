"""ENT-style byte statistics.

Byte mode only.  Each metric is a plain function of the data; :func:`analyze`
bundles them into an :class:`EntReport`.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import chi2 as chi2_dist


def _bytes(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        arr = data.astype(np.uint8, copy=False)
    else:
        arr = np.frombuffer(bytes(data), dtype=np.uint8)
    if arr.size == 0:
        raise ValueError("empty input")
    return arr


def byte_counts(data) -> np.ndarray:
    return np.bincount(_bytes(data), minlength=256)


def ent_entropy(data) -> float:
    """Shannon entropy in bits per byte."""
    counts = byte_counts(data)
    p = counts[counts > 0] / counts.sum()
    h = float(-(p * np.log2(p)).sum())
    return min(8.0, max(0.0, h))


def ent_optimum_compression(entropy: float) -> float:
    """Compressed size as a fraction of the original (entropy / 8)."""
    if not 0.0 <= entropy <= 8.0:
        raise ValueError("entropy must be in [0, 8]")
    return entropy / 8.0


def ent_chi_square(data):
    """Chi-square over the 256 byte bins.

    Returns ``(statistic, percentile)`` where percentile is the chance, in
    percent, that a truly random stream of the same length scores higher.
    """
    counts = byte_counts(data)
    expected = counts.sum() / 256.0
    stat = float(((counts - expected) ** 2).sum() / expected)
    return stat, float(100.0 * chi2_dist.sf(stat, 255))


def ent_mean(data) -> float:
    return float(_bytes(data).mean())


def ent_monte_carlo_pi(data):
    """Estimate pi from 6-byte groups read as (x, y) in the unit square.

    Returns ``(estimate, error_percent)``.
    """
    arr = _bytes(data)
    if arr.size < 6:
        raise ValueError("need at least 6 bytes")
    groups = arr[:arr.size // 6 * 6].reshape(-1, 6).astype(np.int64)
    x = (groups[:, 0] << 16) | (groups[:, 1] << 8) | groups[:, 2]
    y = (groups[:, 3] << 16) | (groups[:, 4] << 8) | groups[:, 5]
    # exact integer test of (x/2^24)^2 + (y/2^24)^2 < 1
    inside = x * x + y * y < (1 << 48)
    est = 4.0 * float(inside.sum()) / groups.shape[0]
    return est, 100.0 * abs(est - math.pi) / math.pi


def ent_serial_correlation(data, return_flag=False):
    """Lag-1 correlation between adjacent bytes (no wraparound).

    A constant input has no defined correlation; 0.0 is returned and, with
    ``return_flag``, the second element of the result is True.
    """
    arr = _bytes(data).astype(np.float64)
    if arr.size < 2:
        raise ValueError("need at least 2 bytes")
    a, b = arr[:-1], arr[1:]
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    if denom == 0.0:
        return (0.0, True) if return_flag else 0.0
    r = max(-1.0, min(1.0, float((da * db).sum()) / denom))
    return (r, False) if return_flag else r


@dataclass
class EntReport:
    length: int
    entropy_bits_per_byte: float
    optimum_compression: float
    chi_square_stat: float
    chi_square_percentile: float
    arithmetic_mean: float
    monte_carlo_pi: float | None
    pi_error_percent: float | None
    serial_correlation: float
    serial_correlation_undefined: bool = False

    def rows(self):
        """(test, expected condition, result) triples in report order."""
        return [
            ("Entropy", "≈ 8 bits per byte", f"{self.entropy_bits_per_byte:.4f}"),
            ("Optimum Compression", "≈ 1", f"{self.optimum_compression:.4f}"),
            ("Chi-Square", "percentile not extreme", f"{self.chi_square_percentile:.2f}%"),
            ("Arithmetic Mean", "≈ 127.5", f"{self.arithmetic_mean:.4f}"),
            ("Monte Carlo π", "≈ 3.14159", "n/a" if self.monte_carlo_pi is None else
             f"{self.monte_carlo_pi:.9f} (error {self.pi_error_percent:.2f}%)"),
            ("Serial Correlation", "≈ 0", f"{self.serial_correlation:.6f}"),
        ]

    def chi_square_ok(self, band=(1.0, 99.0)) -> bool:
        lo, hi = band
        return lo <= self.chi_square_percentile <= hi

    def to_dict(self) -> dict:
        d = asdict(self)
        d["table"] = [{"test": t, "expected": e, "result": r} for t, e, r in self.rows()]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def format_table(self) -> str:
        width = max(len(t) for t, _, _ in self.rows())
        ewidth = max(len(e) for _, e, _ in self.rows())
        lines = [f"{'Test':<{width}}  {'Expected':<{ewidth}}  Result"]
        for t, e, r in self.rows():
            lines.append(f"{t:<{width}}  {e:<{ewidth}}  {r}")
        return "\n".join(lines)


def analyze(data) -> EntReport:
    arr = _bytes(data)
    h = ent_entropy(arr)
    stat, pct = ent_chi_square(arr)
    if arr.size >= 6:
        pi_est, pi_err = ent_monte_carlo_pi(arr)
    else:
        pi_est, pi_err = None, None
    if arr.size >= 2:
        r, undefined = ent_serial_correlation(arr, return_flag=True)
    else:
        r, undefined = 0.0, True
    return EntReport(
        length=int(arr.size),
        entropy_bits_per_byte=h,
        optimum_compression=ent_optimum_compression(h),
        chi_square_stat=stat,
        chi_square_percentile=pct,
        arithmetic_mean=ent_mean(arr),
        monte_carlo_pi=pi_est,
        pi_error_percent=pi_err,
        serial_correlation=r,
        serial_correlation_undefined=undefined,
    )

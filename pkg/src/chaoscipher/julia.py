"""Escape-time pictures of random (non-autonomous) Julia sets.

One parameter sequence omega = (c_1, c_2, ...) is realized per image and
shared by every pixel; pixel z0 is a member of the filled Julia set
approximation when its orbit under f_{c_m} o ... o f_{c_1} stays inside the
escape radius for ``max_iter`` steps.
"""

import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from chaoscipher import kernels
from chaoscipher.keystream import DrbgReader, ParameterDisc, sample_c
from chaoscipher.primitives import drbg_instantiate

FAMILIES = ("cubic", "quadratic")
DEFAULT_WINDOW = (-1.6, -1.6, 1.6, 1.6)
DEFAULT_MAX_ITER = 256
DEFAULT_RESOLUTION = (128, 128)
JULIA_PERSONALIZATION = b"julia"


@dataclass(frozen=True)
class OmegaSpec:
    seed: bytes
    delta: float
    length: int


def realize_omega(spec: OmegaSpec) -> list:
    """The deterministic sequence (c_n) for ``spec``; |c_n| <= delta."""
    if spec.length < 1:
        raise ValueError("length must be at least 1")
    disc = ParameterDisc.custom(spec.delta)
    reader = DrbgReader(drbg_instantiate(spec.seed, b"", JULIA_PERSONALIZATION))
    return [sample_c(reader, disc) for _ in range(spec.length)]


def escape_radius(family: str, delta: float) -> float:
    """Radius past which every orbit diverges for |c| <= delta.

    Cubic: |z|^2 >= 2 + delta gives |z^3 + cz| >= 2|z|.  Quadratic:
    |z| > max(2, delta) gives |z^2 + c| > |z|.
    """
    if family == "cubic":
        return math.sqrt(2.0 + delta)
    if family == "quadratic":
        return max(2.0, delta)
    raise ValueError(f"unknown family {family!r}")


def _step(zr, zi, cr, ci, cubic):
    # same operation order as the render kernels
    sr = zr * zr - zi * zi
    si = 2.0 * zr * zi
    if cubic:
        return (sr * zr - si * zi) + (cr * zr - ci * zi), (sr * zi + si * zr) + (cr * zi + ci * zr)
    return sr + cr, si + ci


def escape_time(z0, omega, family="cubic", max_iter=DEFAULT_MAX_ITER, radius=None, delta=None) -> int:
    """Smallest m with |f^m(z0)| > radius, or ``max_iter`` if none."""
    if len(omega) < max_iter:
        raise ValueError("omega shorter than max_iter")
    if radius is None:
        d = delta if delta is not None else max((abs(c) for c in omega), default=0.0)
        radius = escape_radius(family, d)
    r2 = radius * radius
    zr, zi = float(z0.real), float(z0.imag)
    if not zr * zr + zi * zi <= r2:
        return 0
    cubic = family == "cubic"
    for m in range(max_iter):
        c = omega[m]
        zr, zi = _step(zr, zi, c.real, c.imag, cubic)
        if not zr * zr + zi * zi <= r2:
            return m + 1
    return max_iter


def pixel_axes(window, resolution):
    """Pixel-centre coordinates; row 0 is the top of the window.

    Centres are placed symmetrically about the window centre so that a
    window centred on 0 gives exactly negated coordinates for mirrored
    pixels.
    """
    x0, y0, x1, y1 = map(float, window)
    W, H = resolution
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    i = np.arange(W, dtype=np.float64)
    j = np.arange(H, dtype=np.float64)
    xs = cx + (2 * i + 1 - W) * ((x1 - x0) / (2 * W))
    ys = cy - (2 * j + 1 - H) * ((y1 - y0) / (2 * H))
    return np.ascontiguousarray(xs), np.ascontiguousarray(ys)


@dataclass
class JuliaApprox:
    window: tuple
    resolution: tuple
    max_iter: int
    family: str
    delta: float
    escape_iter: np.ndarray  # shape (H, W)

    @property
    def members(self) -> np.ndarray:
        return self.escape_iter == self.max_iter

    def boundary(self) -> np.ndarray:
        """Member pixels with at least one non-member 4-neighbour (the
        image edge counts as non-member)."""
        m = np.pad(self.members, 1, constant_values=False)
        inner = m[1:-1, 1:-1]
        all_nb = m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
        return inner & ~all_nb

    def to_pgm(self) -> bytes:
        W, H = self.resolution
        scaled = (self.escape_iter.astype(np.int64) * 255) // self.max_iter
        return f"P5 {W} {H} 255\n".encode() + scaled.astype(np.uint8).tobytes()

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "resolution": list(self.resolution),
            "max_iter": self.max_iter,
            "family": self.family,
            "delta": self.delta,
            "escape_iter": self.escape_iter.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def render(spec: OmegaSpec, window=DEFAULT_WINDOW, resolution=DEFAULT_RESOLUTION,
           max_iter=DEFAULT_MAX_ITER, family="cubic", threads=1, radius=None) -> JuliaApprox:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    W, H = resolution
    if W < 2 or H < 2:
        raise ValueError("resolution must be at least 2x2")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    x0, y0, x1, y1 = window
    if not (x1 > x0 and y1 > y0):
        raise ValueError("window must have x1 > x0 and y1 > y0")
    omega = realize_omega(OmegaSpec(spec.seed, spec.delta, max_iter))
    om_re = np.array([c.real for c in omega], dtype=np.float64)
    om_im = np.array([c.imag for c in omega], dtype=np.float64)
    r = radius if radius is not None else escape_radius(family, spec.delta)
    xs, ys = pixel_axes(window, resolution)
    out = np.zeros((H, W), dtype=np.int32)
    cubic = family == "cubic"

    def band(rows):
        kernels.escape_rows(xs, ys, om_re, om_im, cubic, max_iter, r * r, out, rows[0], rows[1])

    threads = max(1, int(threads))
    if threads == 1:
        band((0, H))
    else:
        edges = np.linspace(0, H, min(threads, H) + 1).astype(int)
        bands = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(band, bands))
    return JuliaApprox(tuple(window), (W, H), max_iter, family, spec.delta, out)


def member_distance(a: JuliaApprox, b: JuliaApprox) -> float:
    """|A xor B| / max(|A or B|, 1) over member pixels."""
    ma, mb = a.members, b.members
    union = int((ma | mb).sum())
    return int((ma ^ mb).sum()) / max(union, 1)


def escape_time_distance(a: JuliaApprox, b: JuliaApprox) -> float:
    """Fraction of pixels whose escape iteration differs."""
    return float((a.escape_iter != b.escape_iter).mean())


def stability_distance(delta, seed_a, seed_b, window=DEFAULT_WINDOW,
                       resolution=DEFAULT_RESOLUTION, max_iter=DEFAULT_MAX_ITER,
                       family="cubic", threads=1) -> float:
    """Member-set distance between renders from two independent omegas."""
    a = render(OmegaSpec(seed_a, delta, max_iter), window, resolution, max_iter, family, threads)
    b = render(OmegaSpec(seed_b, delta, max_iter), window, resolution, max_iter, family, threads)
    return member_distance(a, b)


def stability_probe(delta, trials, seed=b"stability", window=DEFAULT_WINDOW,
                    resolution=DEFAULT_RESOLUTION, max_iter=DEFAULT_MAX_ITER,
                    family="cubic", threads=1) -> dict:
    """Run ``trials`` seed pairs at one delta and summarise the distances.

    Seed pair t is (seed || 2t, seed || 2t+1) as 4-byte big-endian
    suffixes, so runs at different deltas are paired.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    dists = []
    esc = []
    members = []
    for t in range(trials):
        sa = seed + (2 * t).to_bytes(4, "big")
        sb = seed + (2 * t + 1).to_bytes(4, "big")
        a = render(OmegaSpec(sa, delta, max_iter), window, resolution, max_iter, family, threads)
        b = render(OmegaSpec(sb, delta, max_iter), window, resolution, max_iter, family, threads)
        dists.append(member_distance(a, b))
        esc.append(escape_time_distance(a, b))
        members.append((int(a.members.sum()) + int(b.members.sum())) / (2 * a.escape_iter.size))
    return {
        "delta": delta,
        "trials": trials,
        "mean_distance": statistics.fmean(dists),
        "stdev": statistics.stdev(dists),
        "distances": dists,
        "mean_escape_time_distance": statistics.fmean(esc),
        "mean_member_fraction": statistics.fmean(members),
        "family": family,
        "resolution": list(resolution),
        "window": list(window),
        "max_iter": max_iter,
    }

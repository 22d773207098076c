"""Keystream generation from random iteration of f_c(z) = z**3 + c*z.

Each step draws a fresh parameter c uniformly from the closed disc of
radius ``delta`` (HMAC_DRBG bytes, rejection from the bounding square),
then maps the orbit point.  Orbit states are never emitted directly; they
are packed and run through HMAC-SHA-256 keyed with the stream key.

Sampling byte layout: every attempt reads 16 DRBG bytes as two big-endian
uint64 words; the top 53 bits of each give a coordinate in [-1, 1).
DRBG output is pulled in fixed chunks of :data:`DRBG_CHUNK` bytes.
"""

import hashlib
import hmac
import math
import struct
from dataclasses import dataclass

import numpy as np

from chaoscipher import kernels
from chaoscipher.primitives import DrbgState, drbg_generate, drbg_instantiate

DELTA_STABLE_MAX = 0.89
DELTA_CHAOTIC_MIN = 3.0
STABLE_DELTA = 0.5
CHAOTIC_DELTA = 3.5
WARM_UP = 100
BLOCK_SIZE = 32
DRBG_CHUNK = 4096
PROFILES = ("stable", "chaotic", "custom")

# must match the kernels
SAMPLE_BYTES = 16
MAX_REJECTIONS = 256
Z0_RMIN = 0.1
Z0_RMAX = 0.9

_QQ = struct.Struct(">QQ")
_STATE = struct.Struct(">ddQ")
_RECORD = np.dtype([("re", ">f8"), ("im", ">f8"), ("ctr", ">u8")])


class SamplingError(RuntimeError):
    """Rejection sampling exceeded its attempt cap."""


@dataclass(frozen=True)
class ParameterDisc:
    """Closed disc |c| <= delta that the map parameters are drawn from."""

    delta: float = CHAOTIC_DELTA
    profile: str = "chaotic"

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        d = float(self.delta)
        if not math.isfinite(d) or d < 0:
            raise ValueError(f"delta must be finite and non-negative, got {self.delta}")
        if self.profile == "stable" and not 0 < d < DELTA_STABLE_MAX:
            raise ValueError(f"stable profile needs 0 < delta < {DELTA_STABLE_MAX}")
        if self.profile == "chaotic" and not d > DELTA_CHAOTIC_MIN:
            raise ValueError(f"chaotic profile needs delta > {DELTA_CHAOTIC_MIN}")
        object.__setattr__(self, "delta", d)

    @classmethod
    def stable(cls):
        return cls(STABLE_DELTA, "stable")

    @classmethod
    def chaotic(cls):
        return cls(CHAOTIC_DELTA, "chaotic")

    @classmethod
    def custom(cls, delta):
        return cls(delta, "custom")

    @classmethod
    def from_profile(cls, profile, delta=None):
        if profile == "custom":
            if delta is None:
                raise ValueError("custom profile requires an explicit delta")
            return cls.custom(delta)
        if delta is not None:
            raise ValueError("delta can only be overridden with the custom profile")
        return cls.stable() if profile == "stable" else cls.chaotic() if profile == "chaotic" else cls(profile=profile)


@dataclass(frozen=True)
class ExtractionMode:
    """How orbit states become keystream blocks.

    ``per3``: HMAC of the state after every third step.
    ``accumulate``: HMAC over the packed states of ``k`` consecutive steps.
    ``running_hash``: a never-reset SHA-256 absorbs every packed state; each
    block (three steps) is the HMAC of its current digest.
    """

    kind: str = "per3"
    k: int = 3

    def __post_init__(self):
        if self.kind not in ("per3", "accumulate", "running_hash"):
            raise ValueError(f"unknown extraction mode {self.kind!r}")
        if self.kind == "accumulate" and not 1 <= self.k <= 64:
            raise ValueError("accumulate k must be in [1, 64]")
        if self.kind != "accumulate" and self.k != 3:
            raise ValueError(f"{self.kind} always uses 3 steps per block")

    @classmethod
    def parse(cls, text: str) -> "ExtractionMode":
        text = text.strip().lower()
        if text == "per3":
            return cls("per3")
        if text in ("running", "running_hash"):
            return cls("running_hash")
        if text.startswith("accumulate:"):
            return cls("accumulate", int(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse extraction mode {text!r}")

    @property
    def steps_per_block(self) -> int:
        return self.k

    def __str__(self):
        if self.kind == "accumulate":
            return f"accumulate:{self.k}"
        return "running" if self.kind == "running_hash" else "per3"


class DrbgReader:
    """Sequential byte reader over an HMAC_DRBG, refilled in fixed chunks."""

    def __init__(self, drbg: DrbgState, chunk: int = DRBG_CHUNK):
        self.drbg = drbg
        self.chunk = chunk
        self.buf = b""
        self.pos = 0

    def extend(self):
        self.buf = self.buf[self.pos:] + drbg_generate(self.drbg, self.chunk)
        self.pos = 0

    def read(self, n: int) -> bytes:
        while self.pos + n > len(self.buf):
            self.extend()
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out


def _unit(word: int) -> float:
    return 2.0 * ((word >> 11) * 2.0 ** -53) - 1.0


def _square_point(reader: DrbgReader, half_width: float):
    a, b = _QQ.unpack(reader.read(SAMPLE_BYTES))
    return _unit(a) * half_width, _unit(b) * half_width


def sample_c(reader: DrbgReader, disc: ParameterDisc) -> complex:
    """Uniform draw from the disc |c| <= delta."""
    d = disc.delta
    for _ in range(MAX_REJECTIONS):
        x, y = _square_point(reader, 1.0)
        if x * x + y * y <= 1.0:
            return complex(x * d, y * d)
    raise SamplingError("parameter sampling exceeded rejection cap")


def sample_z0(reader: DrbgReader) -> complex:
    """Uniform draw from the annulus 0.1 <= |z| <= 0.9."""
    for _ in range(MAX_REJECTIONS):
        x, y = _square_point(reader, Z0_RMAX)
        r2 = x * x + y * y
        if Z0_RMIN * Z0_RMIN <= r2 <= Z0_RMAX * Z0_RMAX:
            return complex(x, y)
    raise SamplingError("initial point sampling exceeded rejection cap")


@dataclass
class ChaoticState:
    z: complex
    reader: DrbgReader
    iter_count: int = 0
    reseed_count: int = 0

    @property
    def drbg(self) -> DrbgState:
        return self.reader.drbg


def new_state(drbg: DrbgState) -> ChaoticState:
    reader = DrbgReader(drbg)
    return ChaoticState(z=sample_z0(reader), reader=reader)


def advance(state: ChaoticState, disc: ParameterDisc, n: int, trace=None) -> ChaoticState:
    """Apply ``n`` map steps; if ``trace`` is an (n, 2) float array the
    point after every step is written into it."""
    if n < 0:
        raise ValueError("step count must be non-negative")
    reader = state.reader
    done = 0
    zr, zi = state.z.real, state.z.imag
    while done < n:
        sub = trace[done:] if trace is not None else None
        status, pos, zr, zi, k, reseeds = kernels.run_orbit(
            reader.buf, reader.pos, zr, zi, disc.delta, n - done, sub)
        reader.pos = pos
        done += k
        state.iter_count += k
        state.reseed_count += reseeds
        state.z = complex(zr, zi)
        if status == kernels.NEED_BYTES:
            reader.extend()
        elif status == kernels.CAP_EXCEEDED:
            raise SamplingError("orbit sampling exceeded rejection cap")
    return state


def step_map(state: ChaoticState, disc: ParameterDisc) -> ChaoticState:
    """One step z <- z**3 + c*z with a fresh c; reseeds degenerate orbits.

    A new point is drawn with :func:`sample_z0` when the image is not
    finite or |z| leaves [1e-6, 1e6].
    """
    return advance(state, disc, 1)


def warm_up(state: ChaoticState, disc: ParameterDisc, n: int) -> ChaoticState:
    return advance(state, disc, n)


def pack_state(z: complex, counter: int) -> bytes:
    if not 0 <= counter < 1 << 64:
        raise ValueError("counter must fit in 64 bits")
    return _STATE.pack(z.real, z.imag, counter)


def unpack_state(data: bytes):
    re, im, counter = _STATE.unpack(data)
    return complex(re, im), counter


def _records(trace, counters):
    rec = np.empty(len(counters), dtype=_RECORD)
    rec["re"] = trace[:, 0]
    rec["im"] = trace[:, 1]
    rec["ctr"] = counters
    return rec.tobytes()


class KeystreamGenerator:
    """Incremental keystream; ``read(n)`` continues where the last call stopped."""

    BATCH = 1024  # blocks per kernel call

    def __init__(self, stream_key: bytes, iv: bytes, ad: bytes = b"",
                 disc: ParameterDisc = None, mode: ExtractionMode = None, warm: int = WARM_UP):
        if warm < 0:
            raise ValueError("warm-up count must be non-negative")
        self.key = bytes(stream_key)
        self.disc = disc if disc is not None else ParameterDisc.chaotic()
        self.mode = mode if mode is not None else ExtractionMode()
        self.state = new_state(drbg_instantiate(self.key, bytes(iv), bytes(ad)))
        warm_up(self.state, self.disc, warm)
        self.block_index = 0
        self._running = hashlib.sha256() if self.mode.kind == "running_hash" else None
        self._pending = b""

    def _blocks(self, count: int) -> bytes:
        spb = self.mode.steps_per_block
        trace = np.empty((count * spb, 2), dtype=np.float64)
        advance(self.state, self.disc, count * spb, trace)
        b0 = self.block_index
        self.block_index += count
        counters = np.repeat(np.arange(b0, b0 + count, dtype=np.uint64), spb)
        key = self.key
        kind = self.mode.kind
        if kind == "per3":
            data = _records(trace[spb - 1::spb], counters[spb - 1::spb])
            return b"".join(hmac.digest(key, data[i:i + 24], "sha256")
                            for i in range(0, len(data), 24))
        data = _records(trace, counters)
        width = 24 * spb
        out = []
        if kind == "accumulate":
            for j in range(count):
                ctr = (b0 + j).to_bytes(8, "big")
                out.append(hmac.digest(key, data[j * width:(j + 1) * width] + ctr, "sha256"))
        else:
            h = self._running
            for j in range(count):
                for s in range(spb):
                    off = j * width + 24 * s
                    h.update(data[off:off + 24])
                ctr = (b0 + j).to_bytes(8, "big")
                out.append(hmac.digest(key, h.digest() + ctr, "sha256"))
        return b"".join(out)

    def read(self, n: int) -> bytes:
        if n < 0:
            raise ValueError("length must be non-negative")
        out = bytearray(self._pending)
        while len(out) < n:
            need = -(-(n - len(out)) // BLOCK_SIZE)
            out += self._blocks(min(need, self.BATCH))
        self._pending = bytes(out[n:])
        return bytes(out[:n])


def keystream(stream_key: bytes, iv: bytes, ad: bytes, n: int,
              disc: ParameterDisc = None, mode: ExtractionMode = None, warm: int = WARM_UP) -> bytes:
    """First ``n`` keystream bytes for (stream_key, iv, ad); deterministic."""
    if n < 0:
        raise ValueError("length must be non-negative")
    if n == 0:
        return b""
    return KeystreamGenerator(stream_key, iv, ad, disc, mode, warm).read(n)

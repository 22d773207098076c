"""Low-level primitives: SHA-256, HMAC, HKDF, HMAC_DRBG and friends.

Hashing is delegated to :mod:`hashlib`/:mod:`hmac`; HKDF (RFC 5869) and
HMAC_DRBG (SP 800-90A, SHA-256) are built on top of them.
"""

import hashlib
import hmac
import os
from dataclasses import dataclass

HASH_LEN = 32
MAX_GENERATE = 1 << 16


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def hmac_sha256(key: bytes, message: bytes) -> bytes:
    return hmac.digest(key, message, "sha256")


def hkdf_extract(salt: bytes, ikm: bytes) -> bytes:
    if not salt:
        salt = b"\x00" * HASH_LEN
    return hmac.digest(salt, ikm, "sha256")


def hkdf_expand(prk: bytes, info: bytes, length: int) -> bytes:
    if not 1 <= length <= 255 * HASH_LEN:
        raise ValueError(f"HKDF length must be in [1, {255 * HASH_LEN}], got {length}")
    out = bytearray()
    block = b""
    counter = 1
    while len(out) < length:
        block = hmac.digest(prk, block + info + bytes([counter]), "sha256")
        out += block
        counter += 1
    return bytes(out[:length])


def hkdf_sha256(ikm: bytes, salt: bytes, info: bytes, length: int) -> bytes:
    """RFC 5869 extract-then-expand with HMAC-SHA-256."""
    if not 1 <= length <= 255 * HASH_LEN:
        raise ValueError(f"HKDF length must be in [1, {255 * HASH_LEN}], got {length}")
    return hkdf_expand(hkdf_extract(salt, ikm), info, length)


@dataclass
class DrbgState:
    """HMAC_DRBG working state (SP 800-90A section 10.1.2).

    Single owner: a state must not be stepped from two threads at once.
    """

    K: bytes
    V: bytes
    reseed_counter: int = 1

    def _update(self, provided: bytes = b"") -> None:
        self.K = hmac.digest(self.K, self.V + b"\x00" + provided, "sha256")
        self.V = hmac.digest(self.K, self.V, "sha256")
        if provided:
            self.K = hmac.digest(self.K, self.V + b"\x01" + provided, "sha256")
            self.V = hmac.digest(self.K, self.V, "sha256")


def drbg_instantiate(entropy: bytes, nonce: bytes = b"", personalization: bytes = b"") -> DrbgState:
    if not entropy:
        raise ValueError("DRBG entropy input must be non-empty")
    state = DrbgState(K=b"\x00" * HASH_LEN, V=b"\x01" * HASH_LEN)
    state._update(bytes(entropy) + bytes(nonce) + bytes(personalization))
    state.reseed_counter = 1
    return state


def drbg_reseed(state: DrbgState, entropy: bytes, additional: bytes = b"") -> None:
    if not entropy:
        raise ValueError("DRBG entropy input must be non-empty")
    state._update(bytes(entropy) + bytes(additional))
    state.reseed_counter = 1


def drbg_generate(state: DrbgState, n: int, additional: bytes = b"") -> bytes:
    """Return ``n`` bytes and advance ``state``.

    No reseed interval is enforced; streams in this package are short.
    """
    if not 1 <= n <= MAX_GENERATE:
        raise ValueError(f"DRBG request must be in [1, {MAX_GENERATE}] bytes, got {n}")
    if additional:
        state._update(additional)
    K, V = state.K, state.V
    out = bytearray()
    while len(out) < n:
        V = hmac.digest(K, V, "sha256")
        out += V
    state.V = V
    state._update(additional)
    state.reseed_counter += 1
    return bytes(out[:n])


def ct_equal(a: bytes, b: bytes) -> bool:
    """Constant-time equality.

    Running time does not depend on where the inputs first differ
    (delegates to :func:`hmac.compare_digest`); a length mismatch
    returns early, which leaks only the length.
    """
    return hmac.compare_digest(bytes(a), bytes(b))


def secure_bytes(n: int) -> bytes:
    if n < 0:
        raise ValueError("byte count must be non-negative")
    return os.urandom(n)

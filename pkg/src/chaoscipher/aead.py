"""Encrypt-then-MAC over the chaotic keystream.

Wire format: ``iv (16) || ciphertext (L) || tag (32)``, no header.  The
parameter disc, extraction mode and warm-up count are not carried in the
message and do not enter the tag; both sides must agree on them out of
band.  A mismatch is NOT detected here: the tag still verifies and the
output is garbage.  Callers that need detection can bind the parameters
into ``ad`` (the command-line tool does).
"""

from dataclasses import dataclass

from chaoscipher.keystream import WARM_UP, ExtractionMode, ParameterDisc, keystream
from chaoscipher.primitives import ct_equal, hkdf_sha256, hmac_sha256, secure_bytes

IV_SIZE = 16
TAG_SIZE = 32
OVERHEAD = IV_SIZE + TAG_SIZE


class MalformedMessage(ValueError):
    pass


class AuthenticationFailed(ValueError):
    pass


@dataclass(frozen=True)
class KeyMaterial:
    master_key: bytes
    stream_key: bytes
    mac_key: bytes

    @classmethod
    def derive(cls, master_key: bytes, iv: bytes, ad: bytes = b"") -> "KeyMaterial":
        okm = hkdf_sha256(ikm=master_key, salt=iv, info=b"split" + ad, length=64)
        return cls(bytes(master_key), okm[:32], okm[32:])


@dataclass(frozen=True)
class SealedMessage:
    iv: bytes
    ciphertext: bytes
    tag: bytes

    @classmethod
    def parse(cls, data: bytes) -> "SealedMessage":
        if len(data) < OVERHEAD:
            raise MalformedMessage("malformed message")
        data = bytes(data)
        return cls(data[:IV_SIZE], data[IV_SIZE:-TAG_SIZE], data[-TAG_SIZE:])

    def __bytes__(self):
        return self.iv + self.ciphertext + self.tag


def _xor(data: bytes, stream: bytes) -> bytes:
    n = len(data)
    return (int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")).to_bytes(n, "big")


def encrypt(plaintext: bytes, key: bytes, ad: bytes = b"", iv: bytes = None,
            disc: ParameterDisc = None, mode: ExtractionMode = None, warm: int = WARM_UP) -> bytes:
    if not key:
        raise ValueError("key must be non-empty")
    if iv is None:
        iv = secure_bytes(IV_SIZE)
    elif len(iv) != IV_SIZE:
        raise ValueError(f"iv must be exactly {IV_SIZE} bytes")
    iv, ad = bytes(iv), bytes(ad)
    km = KeyMaterial.derive(key, iv, ad)
    ct = _xor(plaintext, keystream(km.stream_key, iv, ad, len(plaintext), disc, mode, warm))
    tag = hmac_sha256(km.mac_key, ad + iv + ct)
    return iv + ct + tag


def decrypt(sealed: bytes, key: bytes, ad: bytes = b"",
            disc: ParameterDisc = None, mode: ExtractionMode = None, warm: int = WARM_UP) -> bytes:
    """Verify the tag, then decrypt.  No plaintext is produced on failure."""
    msg = SealedMessage.parse(sealed)
    ad = bytes(ad)
    km = KeyMaterial.derive(key, msg.iv, ad)
    if not ct_equal(msg.tag, hmac_sha256(km.mac_key, ad + msg.iv + msg.ciphertext)):
        raise AuthenticationFailed("authentication failed")
    return _xor(msg.ciphertext, keystream(km.stream_key, msg.iv, ad, len(msg.ciphertext), disc, mode, warm))

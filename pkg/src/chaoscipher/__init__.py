"""Authenticated stream cipher driven by a random cubic map, with NIST and
ENT randomness batteries and a random Julia set renderer."""

from chaoscipher.aead import AuthenticationFailed, MalformedMessage, decrypt, encrypt
from chaoscipher.kernels import BACKEND
from chaoscipher.keystream import ExtractionMode, ParameterDisc, keystream

__version__ = "0.1.0"

__all__ = [
    "AuthenticationFailed",
    "BACKEND",
    "ExtractionMode",
    "MalformedMessage",
    "ParameterDisc",
    "decrypt",
    "encrypt",
    "keystream",
]

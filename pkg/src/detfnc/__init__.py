"""Detect-and-forward relaying with GF(q) network coding over Nakagami-m fading."""

from .codec import NetworkCode, encode, make_code, preset_code
from .galois import GaloisField, GfElement, field_new
from .receivers import DestinationSideInfo, ReceiverKind, decide

__all__ = [
    "DestinationSideInfo",
    "GaloisField",
    "GfElement",
    "NetworkCode",
    "ReceiverKind",
    "decide",
    "encode",
    "field_new",
    "make_code",
    "preset_code",
]

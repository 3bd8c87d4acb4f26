"""Bilinear group abstraction (scalars, tagged group elements, pairing)."""

from .api import (
    CURVE_ID,
    ENCODED_SIZE,
    G1,
    G2,
    GT,
    ORDER,
    SCALAR_SIZE,
    GroupElement,
    PairingContext,
    Scalar,
    get_context,
)

__all__ = [
    "CURVE_ID",
    "ENCODED_SIZE",
    "G1",
    "G2",
    "GT",
    "ORDER",
    "SCALAR_SIZE",
    "GroupElement",
    "PairingContext",
    "Scalar",
    "get_context",
]

"""Ordinary signatures and asymmetric encryption for non-anonymous traffic.

Signatures are ECDSA over secp256k1 with RFC 6979 deterministic nonces
(whole-run replayability requires every signature to be a pure function of
key and message).  Encoded signatures are 65 bytes: r || s || recovery bit,
with the low-s normalization so encodings are canonical.

Encryption is an integrated hybrid scheme on the same curve: an ephemeral
ECDH key wraps a one-time ChaCha20-Poly1305 key.  Decryption under any key
other than the recipient's fails cleanly (AEAD tag mismatch), which the
paper-distribution flow leans on: recipients identify their assignment by
trial decryption, and a ciphertext carries no recipient identifier.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from .errors import DecodingError, DecryptionError
from .rng import SeededRng

# secp256k1
_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
_GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

SIGNATURE_SIZE = 65
PUBKEY_SIZE = 33
_ECIES_INFO = b"openpub-ecies-v1"


# -- curve arithmetic (Jacobian, a = 0) --------------------------------------

def _dbl(pt):
    if pt is None:
        return None
    X, Y, Z = pt
    if Y == 0:
        return None
    A = X * X % _P
    B = Y * Y % _P
    C = B * B % _P
    D = 2 * ((X + B) * (X + B) - A - C) % _P
    E = 3 * A % _P
    F = E * E % _P
    X3 = (F - 2 * D) % _P
    Y3 = (E * (D - X3) - 8 * C) % _P
    return (X3, Y3, 2 * Y * Z % _P)


def _add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    Z1Z1 = Z1 * Z1 % _P
    Z2Z2 = Z2 * Z2 % _P
    U1 = X1 * Z2Z2 % _P
    U2 = X2 * Z1Z1 % _P
    S1 = Y1 * Z2 * Z2Z2 % _P
    S2 = Y2 * Z1 * Z1Z1 % _P
    if U1 == U2:
        if S1 != S2:
            return None
        return _dbl(p1)
    H = (U2 - U1) % _P
    I = 4 * H * H % _P
    J = H * I % _P
    r = 2 * (S2 - S1) % _P
    V = U1 * I % _P
    X3 = (r * r - J - 2 * V) % _P
    Y3 = (r * (V - X3) - 2 * S1 * J) % _P
    Z3 = ((Z1 + Z2) * (Z1 + Z2) - Z1Z1 - Z2Z2) * H % _P
    return (X3, Y3, Z3)


def _mul(pt, k: int):
    k %= _N
    acc = None
    add_pt = pt
    while k:
        if k & 1:
            acc = _add(acc, add_pt)
        add_pt = _dbl(add_pt)
        k >>= 1
    return acc


_G = (_GX, _GY, 1)


def _affine(pt):
    X, Y, Z = pt
    zinv = pow(Z, _P - 2, _P)
    zinv2 = zinv * zinv % _P
    return (X * zinv2 % _P, Y * zinv2 * zinv % _P)


def _compress(pt) -> bytes:
    x, y = _affine(pt)
    return bytes([0x02 | (y & 1)]) + x.to_bytes(32, "big")


def _decompress(data: bytes):
    if len(data) != PUBKEY_SIZE or data[0] not in (0x02, 0x03):
        raise DecodingError("malformed compressed point")
    x = int.from_bytes(data[1:], "big")
    if x >= _P:
        raise DecodingError("point coordinate out of range")
    rhs = (x * x * x + 7) % _P
    y = pow(rhs, (_P + 1) // 4, _P)
    if y * y % _P != rhs:
        raise DecodingError("x not on curve")
    if (y & 1) != (data[0] & 1):
        y = _P - y
    return (x, y, 1)


# -- key pairs ----------------------------------------------------------------

@dataclass(frozen=True)
class KeyPair:
    """Account key pair; the compressed public key is the account id."""

    sk: int
    pk: bytes

    @classmethod
    def generate(cls, rng: SeededRng) -> "KeyPair":
        sk = 1 + rng.randbelow(_N - 1)
        return cls(sk=sk, pk=_compress(_mul(_G, sk)))


def sig_keygen(rng: SeededRng) -> KeyPair:
    return KeyPair.generate(rng)


def enc_keygen(rng: SeededRng) -> KeyPair:
    return KeyPair.generate(rng)


def account_hex(pk: bytes, type_prefix: int = 0) -> str:
    """Human-readable account form: 1-byte type prefix + key bytes, hex."""
    return bytes([type_prefix]).hex() + pk.hex()


# -- ECDSA ---------------------------------------------------------------------

def _rfc6979_nonce(sk: int, z: int) -> int:
    """Deterministic nonce (RFC 6979, HMAC-SHA256)."""
    holen = 32
    x = sk.to_bytes(32, "big")
    h1 = (z % _N).to_bytes(32, "big")
    v = b"\x01" * holen
    k = b"\x00" * holen
    k = hmac.new(k, v + b"\x00" + x + h1, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    k = hmac.new(k, v + b"\x01" + x + h1, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    while True:
        v = hmac.new(k, v, hashlib.sha256).digest()
        t = int.from_bytes(v, "big")
        if 1 <= t < _N:
            return t
        k = hmac.new(k, v + b"\x00", hashlib.sha256).digest()
        v = hmac.new(k, v, hashlib.sha256).digest()


def _msg_scalar(message: bytes) -> int:
    return int.from_bytes(hashlib.sha256(message).digest(), "big") % _N


def sig_sign(message: bytes, sk: int) -> bytes:
    """65-byte signature r || s || v with canonical low s."""
    z = _msg_scalar(message)
    k = _rfc6979_nonce(sk, z)
    while True:
        R = _mul(_G, k)
        rx, ry = _affine(R)
        r = rx % _N
        if r == 0 or rx >= _N:
            k = (k + 1) % _N or 1
            continue
        s = pow(k, _N - 2, _N) * (z + r * sk) % _N
        if s == 0:
            k = (k + 1) % _N or 1
            continue
        v = ry & 1
        if s > _N // 2:
            s = _N - s
            v ^= 1
        return r.to_bytes(32, "big") + s.to_bytes(32, "big") + bytes([v])


def sig_verify(pk: bytes, message: bytes, sig: bytes) -> bool:
    if len(sig) != SIGNATURE_SIZE:
        return False
    r = int.from_bytes(sig[:32], "big")
    s = int.from_bytes(sig[32:64], "big")
    if not (1 <= r < _N and 1 <= s <= _N // 2):
        return False
    try:
        pub = _decompress(pk)
    except DecodingError:
        return False
    z = _msg_scalar(message)
    sinv = pow(s, _N - 2, _N)
    point = _add(_mul(_G, z * sinv % _N), _mul(pub, r * sinv % _N))
    if point is None:
        return False
    x, _ = _affine(point)
    return x % _N == r


# -- hybrid encryption ----------------------------------------------------------

def enc(message: bytes, pk: bytes, rng: SeededRng) -> bytes:
    """Encrypt to pk: ephemeral-point || AEAD ciphertext.

    The ephemeral point is fresh per call, so equal plaintexts produce
    unequal ciphertexts, and nothing in the output names the recipient.
    """
    recipient = _decompress(pk)
    eph = 1 + rng.randbelow(_N - 1)
    eph_pub = _compress(_mul(_G, eph))
    shared = _compress(_mul(recipient, eph))
    key = hashlib.sha256(_ECIES_INFO + shared).digest()
    ct = ChaCha20Poly1305(key).encrypt(b"\x00" * 12, message, eph_pub)
    return eph_pub + ct


def dec(ciphertext: bytes, sk: int) -> bytes:
    """Decrypt or raise DecryptionError (wrong key or tampering)."""
    if len(ciphertext) < PUBKEY_SIZE + 16:
        raise DecryptionError("ciphertext too short")
    eph_pub = ciphertext[:PUBKEY_SIZE]
    try:
        eph_point = _decompress(eph_pub)
    except DecodingError as exc:
        raise DecryptionError("malformed ephemeral point") from exc
    shared = _compress(_mul(eph_point, sk))
    key = hashlib.sha256(_ECIES_INFO + shared).digest()
    try:
        return ChaCha20Poly1305(key).decrypt(b"\x00" * 12, ciphertext[PUBKEY_SIZE:], eph_pub)
    except InvalidTag as exc:
        raise DecryptionError("ciphertext does not decrypt under this key") from exc

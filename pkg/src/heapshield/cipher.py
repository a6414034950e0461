"""One-time-key stream cipher keyed from the curve hash.

Each encryption derives a fresh keystream from (secret, nonce): block 0
hashes secret || nonce, and block j >= 1 chains the previous block through
hash(K_{j-1} || nonce || j) so the stream extends indefinitely while staying
a pure function of its inputs.  Octets combine by addition modulo the
profile modulus (256 for octet streams), so decryption is subtraction.

Envelope wire format (bit-exact):

    "LWC1" | params_id length (1 octet) | params_id (ASCII) |
    nonce (16 octets) | body length (8 octets, big-endian) | body
"""

import random
from dataclasses import dataclass

import numpy as np

from .errors import EnvelopeFormatError, InvalidArgumentError, UnknownParamsError
from .hashing import NONCE_LEN, PARAMS, HashParams, hash_digest

MAGIC = b"LWC1"
MIN_SECRET_LEN = 16

_module_rng = random.SystemRandom()


@dataclass(frozen=True)
class KeyMaterial:
    """Long-lived secret plus the digest profile used for key derivation."""

    secret: bytes
    params: HashParams

    def __post_init__(self):
        if len(self.secret) < MIN_SECRET_LEN:
            raise InvalidArgumentError(
                f"key secret must be at least {MIN_SECRET_LEN} octets"
            )


@dataclass(frozen=True)
class CipherEnvelope:
    nonce: bytes
    params_id: str
    length: int
    body: bytes

    def to_bytes(self) -> bytes:
        pid = self.params_id.encode("ascii")
        return b"".join(
            (
                MAGIC,
                bytes([len(pid)]),
                pid,
                self.nonce,
                self.length.to_bytes(8, "big"),
                self.body,
            )
        )

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CipherEnvelope":
        if len(blob) < len(MAGIC) + 1:
            raise EnvelopeFormatError("envelope truncated before the header")
        if blob[: len(MAGIC)] != MAGIC:
            raise EnvelopeFormatError("bad envelope magic")
        pid_len = blob[len(MAGIC)]
        if pid_len == 0:
            raise EnvelopeFormatError("empty params_id")
        ofs = len(MAGIC) + 1
        header_len = ofs + pid_len + NONCE_LEN + 8
        if len(blob) < header_len:
            raise EnvelopeFormatError("envelope truncated inside the header")
        try:
            params_id = blob[ofs : ofs + pid_len].decode("ascii")
        except UnicodeDecodeError as exc:
            raise EnvelopeFormatError("params_id is not ASCII") from exc
        ofs += pid_len
        nonce = blob[ofs : ofs + NONCE_LEN]
        ofs += NONCE_LEN
        length = int.from_bytes(blob[ofs : ofs + 8], "big")
        ofs += 8
        body = blob[ofs:]
        if len(body) != length:
            raise EnvelopeFormatError(
                f"body length {len(body)} does not match header field {length}"
            )
        return cls(nonce, params_id, length, body)


def random_nonce(rng: random.Random | None = None) -> bytes:
    """Fresh 16-octet nonce from a seedable generator (system RNG default)."""
    return (rng or _module_rng).randbytes(NONCE_LEN)


def keystream(key: KeyMaterial, nonce: bytes, n: int) -> bytes:
    """First n octets of the hash-chained keystream for (key, nonce)."""
    if n < 0:
        raise InvalidArgumentError("keystream length must be nonnegative")
    if n == 0:
        return b""
    blocks = []
    produced = 0
    block = hash_digest(key.secret + nonce, nonce, key.params).data
    blocks.append(block)
    produced += len(block)
    counter = 1
    while produced < n:
        block = hash_digest(
            block + nonce + counter.to_bytes(8, "big"), nonce, key.params
        ).data
        blocks.append(block)
        produced += len(block)
        counter += 1
    return b"".join(blocks)[:n]


def _check_modulus(params: HashParams) -> None:
    # octet-wise add/subtract is only invertible on all byte values at m=256
    if params.m != 256:
        raise InvalidArgumentError(
            f"octet cipher requires keystream modulus 256, profile has {params.m}"
        )


def encrypt(
    message: bytes,
    key: KeyMaterial,
    nonce: bytes | None = None,
    rng: random.Random | None = None,
) -> CipherEnvelope:
    """Encrypt per-octet as (M_i + H_i mod m) mod m with a fresh keystream.

    The caller guarantees nonce freshness per key; omit the nonce to draw
    one from the (seedable) generator.
    """
    _check_modulus(key.params)
    if nonce is None:
        nonce = random_nonce(rng)
    message = bytes(message)
    ks = keystream(key, nonce, len(message))
    m_arr = np.frombuffer(message, dtype=np.uint8).astype(np.int16)
    k_arr = np.frombuffer(ks, dtype=np.uint8).astype(np.int16)
    body = ((m_arr + k_arr) & 0xFF).astype(np.uint8).tobytes()
    return CipherEnvelope(bytes(nonce), key.params.params_id, len(body), body)


def decrypt(envelope: CipherEnvelope, key: KeyMaterial) -> bytes:
    """Invert encrypt: M_i = (C_i - H_i mod m) mod m."""
    params = _resolve_params(envelope.params_id, key)
    _check_modulus(params)
    working_key = key if params is key.params else KeyMaterial(key.secret, params)
    ks = keystream(working_key, envelope.nonce, len(envelope.body))
    c_arr = np.frombuffer(envelope.body, dtype=np.uint8).astype(np.int16)
    k_arr = np.frombuffer(ks, dtype=np.uint8).astype(np.int16)
    return ((c_arr - k_arr) & 0xFF).astype(np.uint8).tobytes()


def _resolve_params(params_id: str, key: KeyMaterial) -> HashParams:
    if params_id == key.params.params_id:
        return key.params
    if params_id in PARAMS:
        return PARAMS[params_id]
    raise UnknownParamsError(f"unknown parameter profile {params_id!r}")

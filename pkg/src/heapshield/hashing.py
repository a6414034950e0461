"""Message hashing through curve derivation and coefficient digests.

Pipeline, pinned byte-for-byte:

1. Pad the message to a 16-octet multiple: append 0x80, then zeros, with
   the final 8 octets holding the original bit length (big-endian).
2. Fold the padded 64-bit words (big-endian) into two accumulators with
   rotate-left-7-then-XOR: even-indexed words into A, odd into B.  A and B
   start from the two nonce halves and each finishes by folding in the
   opposite half.
3. Reduce a0 = A mod R, b0 = B mod R with R = ceil((2T/4)^(1/3)), then scan
   rows a = a0, a0+1, ... with b running through (b0 + j) mod R until the
   absolute discriminant 4a^3 + 27b^2 lands in [T, 2T] (and is nonzero).
   Rows that cannot reach the window count as one examination step; the
   scan aborts past 10^6 steps.
4. Digest bytes: low octets of the first k+1 Dirichlet coefficients of the
   derived curve, XOR-folded with (a) the encoding of the smallest-x affine
   point modulo the smallest usable good prime above k+1 and (b) the
   finalized accumulators, then two add-rotate diffusion passes.

Stage 4's accumulator fold is what gives the digest its full input
sensitivity: the window scan reaches only on the order of T^(2/3) distinct
curves, far too few for digests keyed by the curve alone.
"""

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from . import kernels
from .curves import Curve, ProjectivePoint
from .errors import DerivationFailureError, InvalidArgumentError, ParamsError
from .lseries import _coefficients_tuple
from .primes import is_prime, next_prime

NONCE_LEN = 16
MAX_SCAN_STEPS = 10 ** 6
MIN_WINDOW_BASE = 100

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class HashParams:
    """Digest profile.

    T is the discriminant window base (derived curves satisfy
    T <= |delta| <= 2T), alpha/beta bound the coefficient count k via
    (log T)^alpha <= k <= (log T)^beta, digests span k+1 octets, and m is
    the keystream modulus.
    """

    params_id: str
    T: int
    alpha: float
    beta: float
    k: int
    m: int = 256

    def __post_init__(self):
        if not self.params_id or len(self.params_id) > 255 or not self.params_id.isascii():
            raise ParamsError("params_id must be 1..255 ASCII characters")
        if self.T < MIN_WINDOW_BASE:
            raise ParamsError(f"window base must be at least {MIN_WINDOW_BASE}")
        if not 0 < self.alpha <= self.beta:
            raise ParamsError("need 0 < alpha <= beta")
        if self.m < 2:
            raise ParamsError("keystream modulus must be at least 2")
        lo, hi = _k_window(self.T, self.alpha, self.beta)
        if not lo <= self.k <= hi:
            raise ParamsError(f"k={self.k} outside the admissible window [{lo}, {hi}]")

    @property
    def digest_len(self) -> int:
        return self.k + 1


@dataclass(frozen=True)
class Digest:
    data: bytes
    params_id: str

    def hex(self) -> str:
        return self.data.hex()

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class DerivedCurve:
    curve: Curve
    nonce: bytes
    scan_steps: int


PARAMS = MappingProxyType(
    {
        "default": HashParams("default", 10 ** 9, 1.0, 2.0, 94),
        "digest32": HashParams("digest32", 10 ** 9, 1.0, 2.0, 31),
    }
)


def _k_window(T, alpha: float, beta: float) -> tuple:
    log_t = math.log(T)
    lo = math.ceil(log_t ** alpha)
    hi = math.floor(log_t ** beta)
    return lo, hi


def select_k(T, alpha: float, beta: float) -> int:
    """Midpoint-exponent choice of the coefficient count k, clamped into
    [ceil((log T)^alpha), floor((log T)^beta)]."""
    if T < 3:
        raise ParamsError("window base must be at least 3")
    if not 0 < alpha <= beta:
        raise ParamsError("need 0 < alpha <= beta")
    lo, hi = _k_window(T, alpha, beta)
    if lo > hi:
        raise ParamsError(f"empty selection window [{lo}, {hi}]")
    mid = math.ceil(math.log(T) ** ((alpha + beta) / 2))
    return min(max(mid, lo), hi)


def _check_nonce(nonce: bytes) -> bytes:
    if not isinstance(nonce, (bytes, bytearray, memoryview)):
        raise InvalidArgumentError("nonce must be a bytes-like object")
    nonce = bytes(nonce)
    if len(nonce) != NONCE_LEN:
        raise InvalidArgumentError(f"nonce must be exactly {NONCE_LEN} octets")
    return nonce


def _pad_message(message: bytes) -> bytes:
    bitlen = (8 * len(message)) & _MASK64
    out = bytearray(message)
    out.append(0x80)
    out.extend(b"\x00" * ((16 - (len(out) + 8) % 16) % 16))
    out += bitlen.to_bytes(8, "big")
    return bytes(out)


def _rotl64(x: int, r: int) -> int:
    return ((x << r) | (x >> (64 - r))) & _MASK64


def _fold_accumulators(message: bytes, nonce: bytes) -> tuple:
    padded = _pad_message(message)
    n0 = int.from_bytes(nonce[:8], "big")
    n1 = int.from_bytes(nonce[8:], "big")
    acc_a, acc_b = n0, n1
    words = struct.unpack(f">{len(padded) // 8}Q", padded)
    for i, w in enumerate(words):
        if i & 1:
            acc_b = _rotl64(acc_b, 7) ^ w
        else:
            acc_a = _rotl64(acc_a, 7) ^ w
    acc_a = _rotl64(acc_a, 7) ^ n1
    acc_b = _rotl64(acc_b, 7) ^ n0
    return acc_a, acc_b


def _window_span(T) -> int:
    # smallest R with 2*R^3 >= T, i.e. ceil((T/2)^(1/3)) exactly
    m = (T + 1) // 2
    return kernels._icbrt(m - 1) + 1


def _scan_curve(acc_a: int, acc_b: int, T) -> tuple:
    span = _window_span(T)
    a0, b0 = acc_a % span, acc_b % span
    if T <= kernels.INT64_SCAN_LIMIT:
        a, b, steps = kernels.window_scan(a0, b0, span, T, MAX_SCAN_STEPS)
    else:
        a, b, steps = kernels.window_scan_bigint(a0, b0, span, T, MAX_SCAN_STEPS)
    if steps < 0:
        raise DerivationFailureError(
            f"window scan exceeded {MAX_SCAN_STEPS} steps for base {T}"
        )
    return int(a), int(b), int(steps)


def derive_curve(message: bytes, nonce: bytes, T) -> DerivedCurve:
    """Deterministically map (message, nonce) to a curve whose absolute
    discriminant lies in [T, 2T]."""
    nonce = _check_nonce(nonce)
    if not isinstance(T, int) or T < MIN_WINDOW_BASE:
        raise InvalidArgumentError(
            f"window base must be an integer of at least {MIN_WINDOW_BASE}"
        )
    acc_a, acc_b = _fold_accumulators(bytes(message), nonce)
    a, b, steps = _scan_curve(acc_a, acc_b, T)
    return DerivedCurve(Curve(a, b), nonce, steps)


def point_encode(pt: ProjectivePoint, p: int) -> int:
    """Affine (x, y) -> x*p + y; the point at infinity -> p^2."""
    if pt.at_infinity:
        return p * p
    return pt.x * p + pt.y


@lru_cache(maxsize=1 << 16)
def _curve_digest_parts(a: int, b: int, n: int) -> tuple:
    """(raw coefficient octets, distinguished-point octets) for a curve."""
    coeffs = _coefficients_tuple(a, b, n)
    raw = np.frombuffer(bytes(c & 0xFF for c in coeffs), dtype=np.uint8)
    q, x, y = _distinguished_point(a, b, n)
    z = point_encode(ProjectivePoint(x, y), q)
    zb = z.to_bytes(max(1, (z.bit_length() + 7) // 8), "big")
    return raw, np.frombuffer(zb, dtype=np.uint8)


def _distinguished_point(a: int, b: int, n: int) -> tuple:
    """Smallest-x affine point (smallest y on ties) modulo the smallest good
    prime above n; skips to the next good prime in the rare case the curve
    has no affine point there (possible only for tiny primes)."""
    delta = -4 * a ** 3 - 27 * b ** 2
    q = n
    while True:
        q = next_prime(q)
        while delta % q == 0:
            q = next_prime(q)
        pt = _smallest_affine_point(a, b, q)
        if pt is not None:
            return q, pt[0], pt[1]


def _smallest_affine_point(a: int, b: int, q: int):
    for x in range(q):
        rhs = (x * x * x + a * x + b) % q
        if rhs == 0:
            return x, 0
        if q == 2:
            return x, 1  # rhs is 1 here and 1*1 = 1
        if pow(rhs, (q - 1) // 2, q) == 1:
            for y in range(1, q // 2 + 1):
                if y * y % q == rhs:
                    return x, y
    return None


def _acc_fold_bytes(acc_a: int, acc_b: int) -> np.ndarray:
    fa = _mix64(acc_a)
    fb = _mix64(acc_b ^ _GOLDEN64)
    return np.frombuffer(fa.to_bytes(8, "big") + fb.to_bytes(8, "big"), dtype=np.uint8)


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def hash_digest(message: bytes, nonce: bytes, params: HashParams) -> Digest:
    """Hash a message to a (k+1)-octet digest under the given profile."""
    nonce = _check_nonce(nonce)
    message = bytes(message)
    acc_a, acc_b = _fold_accumulators(message, nonce)
    a, b, _steps = _scan_curve(acc_a, acc_b, params.T)
    raw, point_fold = _curve_digest_parts(a, b, params.digest_len)
    mixed = kernels.digest_mix(raw, point_fold, _acc_fold_bytes(acc_a, acc_b))
    return Digest(mixed.tobytes(), params.params_id)

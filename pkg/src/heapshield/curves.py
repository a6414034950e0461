"""Elliptic-curve arithmetic over prime fields.

Short Weierstrass curves y^2 = x^3 + ax + b with the discriminant taken as
-4a^3 - 27b^2.  Point counts over F_p use the quadratic-character sum; the
trace is a_p = p + 1 - #E(F_p) at primes of good reduction, and the
nonsingular-point count rule at primes dividing the discriminant.

Field primes are capped at 2**31 - 1 so every kernel stays inside safe
int64 arithmetic; discriminants themselves are exact big integers.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BadReductionError, InvalidArgumentError
from .primes import is_prime, primes_upto

PRIME_CAP = 2 ** 31 - 1


def discriminant(a: int, b: int) -> int:
    """Exact discriminant -4a^3 - 27b^2 (arbitrary precision)."""
    return -4 * a ** 3 - 27 * b ** 2


@dataclass(frozen=True)
class Curve:
    """Nonsingular curve y^2 = x^3 + ax + b with its cached discriminant."""

    a: int
    b: int
    delta: int = field(init=False)

    def __post_init__(self):
        d = discriminant(self.a, self.b)
        if d == 0:
            raise InvalidArgumentError(
                f"curve ({self.a}, {self.b}) is singular (zero discriminant)"
            )
        object.__setattr__(self, "delta", d)


@dataclass(frozen=True)
class ProjectivePoint:
    """Affine point (x, y) mod p, or the point at infinity (x = y = None)."""

    x: int | None
    y: int | None

    @classmethod
    def infinity(cls) -> "ProjectivePoint":
        return cls(None, None)

    @property
    def at_infinity(self) -> bool:
        return self.x is None

    def on_curve(self, curve: Curve, p: int) -> bool:
        if self.at_infinity:
            return True
        return (self.y * self.y - (self.x ** 3 + curve.a * self.x + curve.b)) % p == 0


class ReductionKind(Enum):
    GOOD = "good"
    SPLIT = "split-multiplicative"
    NONSPLIT = "nonsplit-multiplicative"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class ReductionInfo:
    prime: int
    kind: ReductionKind
    a_p: int


@dataclass(frozen=True)
class TraceTable:
    """Traces a_p for every prime up to a bound, with reduction kinds."""

    curve: Curve
    entries: dict  # prime -> ReductionInfo, ascending insertion order

    def a_p(self, p: int) -> int:
        return self.entries[p].a_p


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidArgumentError(f"{p} is not prime")
    if p > PRIME_CAP:
        raise InvalidArgumentError(f"field prime {p} exceeds the 2**31 - 1 cap")


def legendre_symbol(n: int, p: int) -> int:
    """Quadratic character of n mod an odd prime p: one of -1, 0, 1.

    Computed as n^((p-1)/2) mod p (Euler's criterion).
    """
    if not isinstance(p, int) or p == 2 or not is_prime(p):
        raise InvalidArgumentError(f"{p} is not an odd prime")
    n %= p
    if n == 0:
        return 0
    r = pow(n, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def count_points(curve: Curve, p: int) -> int:
    """#E(F_p) at a prime of good reduction: affine solutions plus infinity.

    Odd p sums 1 + legendre(x^3 + ax + b) over x; p = 2 checks the four
    affine candidates exhaustively (the character is undefined there).
    """
    _check_prime(p)
    if curve.delta % p == 0:
        raise BadReductionError(p, curve.delta)
    if p == 2:
        return 1 + _affine_count_two(curve.a, curve.b)
    return 1 + int(kernels.count_affine(curve.a % p, curve.b % p, p))


def _affine_count_two(a: int, b: int) -> int:
    n = 0
    for x in (0, 1):
        for y in (0, 1):
            if (y * y - (x ** 3 + a * x + b)) % 2 == 0:
                n += 1
    return n


def trace_ap(curve: Curve, p: int) -> int:
    """Trace a_p = p + 1 - #E(F_p); good reduction only."""
    return p + 1 - count_points(curve, p)


def reduction_type(curve: Curve, p: int) -> ReductionInfo:
    """Classify the curve mod p.

    Good primes report their trace.  At primes dividing the discriminant the
    full (x, y) grid is scanned: the unique singular point (both partials
    vanish) is excluded, the nonsingular count N includes infinity, and
    a_p = p - N lands in {-1, 0, +1}, classifying split / nonsplit
    multiplicative or additive reduction.
    """
    _check_prime(p)
    if curve.delta % p != 0:
        return ReductionInfo(p, ReductionKind.GOOD, trace_ap(curve, p))
    ns, _sx, _sy, n_sing = kernels.nonsingular_affine(curve.a % p, curve.b % p, p)
    if n_sing != 1:
        raise AssertionError(
            f"expected one singular point mod {p}, found {n_sing}"
        )
    a_p = p - (int(ns) + 1)
    kind = {
        1: ReductionKind.SPLIT,
        -1: ReductionKind.NONSPLIT,
        0: ReductionKind.ADDITIVE,
    }.get(a_p)
    if kind is None:
        raise AssertionError(f"bad-prime trace {a_p} outside {{-1, 0, 1}} at p={p}")
    return ReductionInfo(p, kind, a_p)


def _good_odd_traces(a: int, b: int, ps: list) -> list:
    """Batch a_p over good odd primes; per-prime reduction for coefficients
    too large for the int64 kernel boundary."""
    if not ps:
        return []
    if abs(a) < 2 ** 62 and abs(b) < 2 ** 62:
        arr = np.array(ps, dtype=np.int64)
        return [int(t) for t in kernels.trace_batch(a, b, arr)]
    return [p - int(kernels.count_affine(a % p, b % p, p)) for p in ps]


def trace_table(curve: Curve, bound: int) -> TraceTable:
    """Reduction info for every prime <= bound."""
    if bound < 2:
        raise InvalidArgumentError("trace table bound must be at least 2")
    entries = {}
    good_odd = []
    for p in primes_upto(bound):
        if curve.delta % p == 0:
            entries[p] = reduction_type(curve, p)
        elif p == 2:
            entries[2] = ReductionInfo(2, ReductionKind.GOOD, trace_ap(curve, 2))
        else:
            good_odd.append(p)
    for p, t in zip(good_odd, _good_odd_traces(curve.a, curve.b, good_odd)):
        entries[p] = ReductionInfo(p, ReductionKind.GOOD, t)
    return TraceTable(curve, dict(sorted(entries.items())))


@lru_cache(maxsize=1 << 16)
def _prime_traces_cached(a: int, b: int, bound: int) -> tuple:
    """(p, a_p) pairs for all primes <= bound of the curve (a, b)."""
    delta = discriminant(a, b)
    out = []
    good_odd = []
    for p in primes_upto(bound):
        if delta % p == 0:
            out.append((p, reduction_type(Curve(a, b), p).a_p))
        elif p == 2:
            out.append((2, 3 - _affine_count_two(a, b)))
        else:
            good_odd.append(p)
    out.extend(zip(good_odd, _good_odd_traces(a, b, good_odd)))
    out.sort()
    return tuple(out)

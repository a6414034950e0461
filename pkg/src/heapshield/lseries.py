"""Dirichlet coefficients and truncated L-series evaluation.

Coefficients a_n are exact integers built from the prime traces: a_1 = 1,
prime powers follow a_{p^{k+1}} = a_p * a_{p^k} - p * a_{p^{k-1}} at good
primes (plain powers a_p^k at bad ones), and multiplicativity fills in the
rest.  `euler_expand` rebuilds the same sequence independently by formally
multiplying truncated Euler factors, which the tests cross-check.

The printed form of the good-prime Euler factor in the source material
carries a stray a_p in its p^(1-2s) term; the standard factor
1 - a_p p^-s + p^(1-2s) is implemented (the stray factor would break the
prime-power recursion that multiplicativity relies on).
"""

from dataclasses import dataclass

from .curves import Curve, _prime_traces_cached
from .errors import InvalidArgumentError, OutOfDomainError
from .primes import primes_upto, smallest_factor_table

# absolute convergence of sum a_n n^-s given |a_n| <= d(n) sqrt(n)
MIN_EXPONENT = 1.5


@dataclass(frozen=True)
class CoefficientVector:
    """a_1 .. a_N for a curve; coeffs[i] is a_{i+1}."""

    curve: Curve
    bound: int
    coeffs: tuple

    def a(self, n: int) -> int:
        if not 1 <= n <= self.bound:
            raise InvalidArgumentError(f"index {n} outside 1..{self.bound}")
        return self.coeffs[n - 1]


@dataclass(frozen=True)
class PartialSum:
    s: float
    bound: int
    value: float


def _prime_traces(curve: Curve, bound: int) -> dict:
    return dict(_prime_traces_cached(curve.a, curve.b, bound))


def dirichlet_coefficients(curve: Curve, n_max: int) -> CoefficientVector:
    """a_1..a_N via prime traces, the prime-power recursion, and
    multiplicativity over coprime factors."""
    if n_max < 1:
        raise InvalidArgumentError("coefficient bound must be at least 1")
    coeffs = _coefficients_tuple(curve.a, curve.b, n_max)
    return CoefficientVector(curve, n_max, coeffs)


def _coefficients_tuple(a: int, b: int, n_max: int) -> tuple:
    delta = -4 * a ** 3 - 27 * b ** 2
    coeff = [0] * (n_max + 1)
    coeff[1] = 1
    if n_max >= 2:
        traces = dict(_prime_traces_cached(a, b, n_max))
        for p, a_p in traces.items():
            good = delta % p != 0
            pk = p
            prev2, prev1 = 1, a_p
            k = 1
            while pk <= n_max:
                coeff[pk] = prev1
                pk *= p
                k += 1
                if good:
                    prev2, prev1 = prev1, a_p * prev1 - p * prev2
                else:
                    prev1 = a_p ** k
        spf = smallest_factor_table(n_max)
        for n in range(2, n_max + 1):
            if coeff[n] != 0:
                continue  # prime powers already set (and nonzero entries stand)
            p = spf[n]
            pk, m = p, n
            while m % p == 0:
                m //= p
            pk = n // m
            if m == 1:
                continue  # pure prime power, set above (possibly zero)
            coeff[n] = coeff[pk] * coeff[m]
    return tuple(coeff[1:])


def euler_expand(curve: Curve, n_max: int) -> CoefficientVector:
    """a_1..a_N by formally multiplying truncated Euler factors.

    Bad primes contribute the geometric series of a_p p^-s; good primes the
    power-series inverse of 1 - a_p p^-s + p^(1-2s).  Must agree exactly
    with `dirichlet_coefficients`.
    """
    if n_max < 1:
        raise InvalidArgumentError("coefficient bound must be at least 1")
    delta = curve.delta
    result = [0] * (n_max + 1)
    result[1] = 1
    if n_max >= 2:
        traces = _prime_traces(curve, n_max)
        for p in primes_upto(n_max):
            a_p = traces[p]
            if delta % p == 0:
                factor_poly = (1, -a_p)
            else:
                factor_poly = (1, -a_p, p)
            terms = 0
            pk = 1
            while pk <= n_max:
                pk *= p
                terms += 1
            series = _invert_series(factor_poly, terms)
            merged = [0] * (n_max + 1)
            for n in range(1, n_max + 1):
                if result[n] == 0:
                    continue
                pk = 1
                for j in range(terms):
                    idx = n * pk
                    if idx > n_max:
                        break
                    merged[idx] += result[n] * series[j]
                    pk *= p
            result = merged
    return CoefficientVector(curve, n_max, tuple(result[1:]))


def _invert_series(poly: tuple, terms: int) -> list:
    """First `terms` coefficients of 1 / poly(x) for poly with constant 1."""
    out = [0] * terms
    out[0] = 1
    for j in range(1, terms):
        acc = 0
        for i in range(1, min(j, len(poly) - 1) + 1):
            acc += poly[i] * out[j - i]
        out[j] = -acc
    return out


def l_series_partial(curve: Curve, s: float, n_max: int) -> PartialSum:
    """Truncated sum of a_n n^-s for s inside the convergence region."""
    if s <= MIN_EXPONENT:
        raise OutOfDomainError(
            f"exponent {s} outside the absolute-convergence region (> {MIN_EXPONENT})"
        )
    if n_max < 1:
        raise InvalidArgumentError("series bound must be at least 1")
    coeffs = dirichlet_coefficients(curve, n_max).coeffs
    total = 0.0
    for n, a_n in enumerate(coeffs, start=1):
        if a_n:
            total += a_n * n ** (-s)
    return PartialSum(s, n_max, total)

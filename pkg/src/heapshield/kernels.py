"""Hot numeric kernels, in two interchangeable flavors.

Each kernel exists as a numba @njit scalar-loop version (``*_nb``) and a
vectorized pure-numpy version (``*_np``).  The module-level names dispatch
to whichever backend `_backend` selected; both flavors are exported so the
test suite can assert bit-identical results and ``benchmarks/`` can compare
throughput.

All kernels assume operands fit in int64; callers enforce the documented
caps (field primes below 2**31, discriminant windows below INT64_SCAN_LIMIT)
and fall back to exact big-integer code paths beyond them.
"""

import numpy as np

from . import _backend

# Largest window base the int64 scan kernels accept: 4*a^3 stays below 2**62
# for every row the scan can visit.
INT64_SCAN_LIMIT = 10 ** 15

_SCAN_FAIL = -1


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def count_affine_np(a: int, b: int, p: int) -> int:
    """Affine points on y^2 = x^3 + ax + b over F_p (odd p), via the
    quadratic-character sum: per x the solution count is 1 + chi(rhs)."""
    a %= p
    b %= p
    x = np.arange(p, dtype=np.int64)
    rhs = ((x * x % p) * x + a * x + b) % p
    e = (p - 1) // 2
    acc = np.ones(p, dtype=np.int64)
    base = rhs.copy()
    while e:
        if e & 1:
            acc = acc * base % p
        base = base * base % p
        e >>= 1
    chi = np.where(rhs == 0, 0, np.where(acc == 1, 1, -1))
    return int(p + chi.sum())


def trace_batch_np(a: int, b: int, ps: np.ndarray) -> np.ndarray:
    """a_p = p - (affine count) for each good odd prime in ps."""
    out = np.empty(len(ps), dtype=np.int64)
    for i, p in enumerate(ps):
        out[i] = int(p) - count_affine_np(a, b, int(p))
    return out


def nonsingular_affine_np(a: int, b: int, p: int):
    """Scan all (x, y) pairs mod p; split them into nonsingular points and
    singular points (both curve partials vanish).

    Returns (nonsingular_count, sing_x, sing_y, singular_count); the
    coordinates are -1 when no singular point exists.
    """
    a %= p
    b %= p
    y = np.arange(p, dtype=np.int64)
    ysq = y * y % p
    two_y_zero = (2 * y) % p == 0
    ns = 0
    n_sing = 0
    sx = sy = -1
    for x in range(p):
        fx = ((x * x % p) * x + a * x + b) % p
        on = ysq == fx
        if not on.any():
            continue
        dfx = (3 * (x * x % p) + a) % p
        if dfx == 0:
            sing = on & two_y_zero
            k = int(sing.sum())
            if k:
                n_sing += k
                sx = x
                sy = int(y[sing][0])
            ns += int(on.sum()) - k
        else:
            ns += int(on.sum())
    return ns, sx, sy, n_sing


def window_scan_np(a0: int, b0: int, span: int, base: int, max_steps: int):
    """Vectorized row scan; see _scan_algorithm for the normative procedure.

    Returns (a, b, steps) with steps = _SCAN_FAIL on budget exhaustion.
    """
    bs = (b0 + np.arange(span, dtype=np.int64)) % span
    bterm = 27 * bs * bs
    row_reach = int(27 * (span - 1) ** 2)
    hi = 2 * base
    a = a0
    steps = 0
    while True:
        lo = 4 * a * a * a
        if lo > hi:
            return 0, 0, _SCAN_FAIL
        if lo + row_reach < base:
            first = _first_reachable_row(base, row_reach)
            skipped = max(first - a, 1)
            steps += skipped
            if steps > max_steps:
                return 0, 0, _SCAN_FAIL
            a += skipped
            continue
        vals = lo + bterm
        ok = (vals >= base) & (vals <= hi) & (vals != 0)
        hit = np.flatnonzero(ok)
        if hit.size:
            j = int(hit[0])
            steps += j + 1
            if steps > max_steps:
                return 0, 0, _SCAN_FAIL
            return a, int(bs[j]), steps
        steps += span
        if steps > max_steps:
            return 0, 0, _SCAN_FAIL
        a += 1


def digest_mix_np(raw: np.ndarray, point_fold: np.ndarray, acc_fold: np.ndarray) -> np.ndarray:
    """XOR-fold the point and accumulator bytes into raw, then run two
    add-rotate diffusion passes over the byte ring."""
    n = raw.size
    w = raw.astype(np.int64)
    w ^= np.resize(point_fold.astype(np.int64), n)
    w ^= np.resize(acc_fold.astype(np.int64), n)
    v = w.tolist()
    for _ in range(2):
        for i in range(n):
            prev = v[i - 1]  # python negative index wraps the ring
            rot = ((prev << 1) | (prev >> 7)) & 0xFF
            v[i] = (v[i] + rot + i) & 0xFF
    return np.array(v, dtype=np.uint8)


def _first_reachable_row(base: int, row_reach: int) -> int:
    """Smallest a with 4*a^3 + row_reach >= base."""
    need = base - row_reach
    if need <= 0:
        return 0
    m = (need + 3) // 4  # smallest cube bound: a^3 >= m
    return _icbrt(m - 1) + 1


def _icbrt(x: int) -> int:
    """Floor cube root for x >= 0, exact for arbitrary ints (Newton)."""
    if x <= 0:
        return 0
    r = 1 << ((x.bit_length() + 2) // 3)
    while True:
        nr = (2 * r + x // (r * r)) // 3
        if nr >= r:
            break
        r = nr
    while r * r * r > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def window_scan_bigint(a0: int, b0: int, span: int, base: int, max_steps: int):
    """Exact big-integer scan for window bases beyond INT64_SCAN_LIMIT.
    Same procedure and step accounting as the int64 kernels."""
    row_reach = 27 * (span - 1) ** 2
    hi = 2 * base
    a = a0
    steps = 0
    while True:
        lo = 4 * a * a * a
        if lo > hi:
            return 0, 0, _SCAN_FAIL
        if lo + row_reach < base:
            first = _first_reachable_row(base, row_reach)
            skipped = max(first - a, 1)
            steps += skipped
            if steps > max_steps:
                return 0, 0, _SCAN_FAIL
            a += skipped
            continue
        for j in range(span):
            b = (b0 + j) % span
            steps += 1
            if steps > max_steps:
                return 0, 0, _SCAN_FAIL
            val = lo + 27 * b * b
            if val != 0 and base <= val <= hi:
                return a, b, steps
        a += 1


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if _backend.NUMBA_ENABLED:
    from numba import njit

    @njit(cache=True)
    def count_affine_nb(a, b, p):  # pragma: no cover - exercised via dispatch
        a %= p
        b %= p
        e = (p - 1) // 2
        s = 0
        for x in range(p):
            rhs = ((x * x % p) * x + a * x + b) % p
            if rhs == 0:
                continue
            r = 1
            bs = rhs
            ee = e
            while ee:
                if ee & 1:
                    r = r * bs % p
                bs = bs * bs % p
                ee >>= 1
            s += 1 if r == 1 else -1
        return p + s

    @njit(cache=True)
    def trace_batch_nb(a, b, ps):  # pragma: no cover
        out = np.empty(len(ps), dtype=np.int64)
        for i in range(len(ps)):
            p = ps[i]
            out[i] = p - count_affine_nb(a, b, p)
        return out

    @njit(cache=True)
    def nonsingular_affine_nb(a, b, p):  # pragma: no cover
        a %= p
        b %= p
        ns = 0
        n_sing = 0
        sx = np.int64(-1)
        sy = np.int64(-1)
        for x in range(p):
            fx = ((x * x % p) * x + a * x + b) % p
            dfx = (3 * (x * x % p) + a) % p
            for y in range(p):
                if y * y % p != fx:
                    continue
                if dfx == 0 and (2 * y) % p == 0:
                    n_sing += 1
                    sx = x
                    sy = y
                else:
                    ns += 1
        return ns, sx, sy, n_sing

    @njit(cache=True)
    def _icbrt_nb(x):  # pragma: no cover
        if x <= 0:
            return np.int64(0)
        r = np.int64(round(x ** (1.0 / 3.0)))
        while r * r * r > x:
            r -= 1
        while (r + 1) ** 3 <= x:
            r += 1
        return r

    @njit(cache=True)
    def window_scan_nb(a0, b0, span, base, max_steps):  # pragma: no cover
        row_reach = 27 * (span - 1) ** 2
        hi = 2 * base
        a = a0
        steps = np.int64(0)
        while True:
            lo = 4 * a * a * a
            if lo > hi:
                return np.int64(0), np.int64(0), np.int64(_SCAN_FAIL)
            if lo + row_reach < base:
                need = base - row_reach
                m = (need + 3) // 4
                first = _icbrt_nb(m - 1) + 1
                skipped = first - a
                if skipped < 1:
                    skipped = np.int64(1)
                steps += skipped
                if steps > max_steps:
                    return np.int64(0), np.int64(0), np.int64(_SCAN_FAIL)
                a += skipped
                continue
            for j in range(span):
                b = (b0 + j) % span
                steps += 1
                if steps > max_steps:
                    return np.int64(0), np.int64(0), np.int64(_SCAN_FAIL)
                val = lo + 27 * b * b
                if val != 0 and base <= val <= hi:
                    return a, b, steps
            a += 1

    @njit(cache=True)
    def digest_mix_nb(raw, point_fold, acc_fold):  # pragma: no cover
        n = raw.size
        w = raw.astype(np.int64)
        np_ = point_fold.size
        na = acc_fold.size
        for i in range(n):
            w[i] ^= point_fold[i % np_]
        for i in range(n):
            w[i] ^= acc_fold[i % na]
        for _ in range(2):
            for i in range(n):
                prev = w[(i + n - 1) % n]
                rot = ((prev << 1) | (prev >> 7)) & 0xFF
                w[i] = (w[i] + rot + i) & 0xFF
        return w.astype(np.uint8)

    count_affine = count_affine_nb
    trace_batch = trace_batch_nb
    nonsingular_affine = nonsingular_affine_nb
    window_scan = window_scan_nb
    digest_mix = digest_mix_nb
else:
    count_affine = count_affine_np
    trace_batch = trace_batch_np
    nonsingular_affine = nonsingular_affine_np
    window_scan = window_scan_np
    digest_mix = digest_mix_np

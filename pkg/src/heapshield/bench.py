"""Cipher timing harness.

Per sample the encryption (or decryption) time is a single monotonic-clock
delta around the call, end minus start; a record keeps the median over its
repeats after two discarded warmup runs.  Three cipher paths are compared:

* ecc-hash-otk — curve-hash keystream cipher from this package,
* aes-sha1    — SHA-1 of the payload as key schedule input, AES-128-CTR,
* rsa-sha1    — SHA-1, RSA-2048 wrap of a 32-octet session key, AES-CTR
                body (hybrid; raw RSA over megabyte payloads is not
                meaningful).

Absolute timings are machine-specific; the harness reports, it does not
assert any cross-algorithm ordering.
"""

import hashlib
import json
import platform
import statistics
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .cipher import KeyMaterial, decrypt, encrypt
from .errors import InvalidArgumentError
from .hashing import PARAMS
from .heap import _stream

ALGORITHMS = ("ecc-hash-otk", "aes-sha1", "rsa-sha1")
DEFAULT_SIZES_KB = (128, 512, 1024, 2048, 4096, 8192, 16384)
WARMUP_RUNS = 2

_rsa_keypair = None


@dataclass(frozen=True)
class TimingRecord:
    algorithm: str
    heap_kb: int
    e_t: float  # microseconds, median over repeats
    d_t: float
    repeats: int
    samples_e: tuple = field(default=(), compare=False, repr=False)
    samples_d: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class BenchReport:
    environment: str
    sizes: tuple
    repeats: int
    rows: tuple  # TimingRecord, algorithm-major then size-ascending
    averages: dict  # algorithm -> {"e_t": mean, "d_t": mean}


def _rsa_keys():
    global _rsa_keypair
    if _rsa_keypair is None:
        from cryptography.hazmat.primitives.asymmetric import rsa

        private = rsa.generate_private_key(public_exponent=65537, key_size=2048)
        _rsa_keypair = (private, private.public_key())
    return _rsa_keypair


def _aes_ctr(key: bytes, nonce: bytes, data: bytes) -> bytes:
    from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

    enc = Cipher(algorithms.AES(key), modes.CTR(nonce)).encryptor()
    return enc.update(data) + enc.finalize()


def _make_paths(algorithm: str, rng):
    """(encrypt_fn, decrypt_fn) closures; encrypt returns opaque state the
    decrypt closure consumes."""
    if algorithm == "ecc-hash-otk":
        key = KeyMaterial(rng.randbytes(32), PARAMS["default"])

        def enc(payload):
            return encrypt(payload, key, nonce=rng.randbytes(16))

        def dec(envelope):
            return decrypt(envelope, key)

        return enc, dec

    if algorithm == "aes-sha1":

        def enc(payload):
            key = hashlib.sha1(payload).digest()[:16]
            nonce = rng.randbytes(16)
            return key, nonce, _aes_ctr(key, nonce, payload)

        def dec(state):
            key, nonce, body = state
            return _aes_ctr(key, nonce, body)

        return enc, dec

    if algorithm == "rsa-sha1":
        from cryptography.hazmat.primitives import hashes
        from cryptography.hazmat.primitives.asymmetric import padding

        private, public = _rsa_keys()
        oaep = padding.OAEP(
            mgf=padding.MGF1(algorithm=hashes.SHA1()),
            algorithm=hashes.SHA1(),
            label=None,
        )

        def enc(payload):
            hashlib.sha1(payload).digest()
            session = rng.randbytes(32)
            wrapped = public.encrypt(session, oaep)
            nonce = rng.randbytes(16)
            return wrapped, nonce, _aes_ctr(session[:16], nonce, payload)

        def dec(state):
            wrapped, nonce, body = state
            session = private.decrypt(wrapped, oaep)
            return _aes_ctr(session[:16], nonce, body)

        return enc, dec

    raise InvalidArgumentError(f"unknown algorithm {algorithm!r}")


def time_cipher(algorithm: str, payload_kb: int, repeats: int, seed: int = 0) -> TimingRecord:
    """Median encrypt/decrypt times (microseconds) for one payload size."""
    if algorithm not in ALGORITHMS:
        raise InvalidArgumentError(f"unknown algorithm {algorithm!r}")
    if payload_kb < 1:
        raise InvalidArgumentError("payload size must be at least 1 KiB")
    if repeats < 3:
        raise InvalidArgumentError("need at least 3 repeats")
    rng = _stream(b"heapshield.bench:", seed)
    payload = rng.randbytes(payload_kb * 1024)
    enc, dec = _make_paths(algorithm, rng)
    for _ in range(WARMUP_RUNS):
        state = enc(payload)
        if dec(state) != payload:
            raise AssertionError(f"{algorithm} round trip failed")
    samples_e = []
    samples_d = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        state = enc(payload)
        t1 = time.perf_counter()
        samples_e.append((t1 - t0) * 1e6)
        t0 = time.perf_counter()
        out = dec(state)
        t1 = time.perf_counter()
        samples_d.append((t1 - t0) * 1e6)
        if out != payload:
            raise AssertionError(f"{algorithm} round trip failed")
    return TimingRecord(
        algorithm=algorithm,
        heap_kb=payload_kb,
        e_t=statistics.median(samples_e),
        d_t=statistics.median(samples_d),
        repeats=repeats,
        samples_e=tuple(samples_e),
        samples_d=tuple(samples_d),
    )


def describe_environment() -> str:
    return (
        f"{platform.platform()} / Python {sys.version.split()[0]} / "
        f"kernel backend {_backend.BACKEND}"
    )


def run_suite(sizes=DEFAULT_SIZES_KB, repeats: int = 3,
              algorithms=ALGORITHMS, seed: int = 0) -> BenchReport:
    """Full cartesian sweep of algorithms x sizes plus per-algorithm means."""
    sizes = tuple(sizes)
    if not sizes:
        raise InvalidArgumentError("need at least one payload size")
    algorithms = tuple(algorithms)
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise InvalidArgumentError(f"unknown algorithm {algorithm!r}")
    rows = tuple(
        time_cipher(algorithm, size, repeats, seed=seed)
        for algorithm in algorithms
        for size in sizes
    )
    return BenchReport(
        environment=describe_environment(),
        sizes=sizes,
        repeats=repeats,
        rows=rows,
        averages=_averages(rows, algorithms),
    )


def _averages(rows, algorithms) -> dict:
    out = {}
    for algorithm in algorithms:
        from_rows = [r for r in rows if r.algorithm == algorithm]
        out[algorithm] = {
            "e_t": statistics.fmean(r.e_t for r in from_rows),
            "d_t": statistics.fmean(r.d_t for r in from_rows),
        }
    return out


def render_report(report: BenchReport, fmt: str) -> str:
    """Render as schema-stable JSON or a markdown table (sizes as rows,
    per-algorithm E_t/D_t columns, trailing average row)."""
    if not report.rows:
        raise InvalidArgumentError("report has no rows")
    if fmt == "json":
        return json.dumps(_report_dict(report), sort_keys=True, indent=2)
    if fmt == "markdown-table":
        return _render_markdown(report)
    raise InvalidArgumentError(f"unknown format {fmt!r}")


def _report_dict(report: BenchReport) -> dict:
    return {
        "environment": report.environment,
        "sizes_kb": list(report.sizes),
        "repeats": report.repeats,
        "rows": [
            {
                "algorithm": r.algorithm,
                "heap_kb": r.heap_kb,
                "e_t_us": r.e_t,
                "d_t_us": r.d_t,
            }
            for r in report.rows
        ],
        "averages": {
            algorithm: {"e_t_us": avg["e_t"], "d_t_us": avg["d_t"]}
            for algorithm, avg in report.averages.items()
        },
    }


def report_from_json(text: str) -> BenchReport:
    doc = json.loads(text)
    rows = tuple(
        TimingRecord(
            algorithm=r["algorithm"],
            heap_kb=r["heap_kb"],
            e_t=r["e_t_us"],
            d_t=r["d_t_us"],
            repeats=doc["repeats"],
        )
        for r in doc["rows"]
    )
    averages = {
        algorithm: {"e_t": avg["e_t_us"], "d_t": avg["d_t_us"]}
        for algorithm, avg in doc["averages"].items()
    }
    return BenchReport(
        environment=doc["environment"],
        sizes=tuple(doc["sizes_kb"]),
        repeats=doc["repeats"],
        rows=rows,
        averages=averages,
    )


def _render_markdown(report: BenchReport) -> str:
    algorithms = list(dict.fromkeys(r.algorithm for r in report.rows))
    by_key = {(r.algorithm, r.heap_kb): r for r in report.rows}
    header = ["Heap Memory Size (KB)"]
    for algorithm in algorithms:
        header += [f"{algorithm} E_t (us)", f"{algorithm} D_t (us)"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "---|" * len(header),
    ]
    for size in report.sizes:
        cells = [str(size)]
        for algorithm in algorithms:
            row = by_key[(algorithm, size)]
            cells += [f"{row.e_t:.3f}", f"{row.d_t:.3f}"]
        lines.append("| " + " | ".join(cells) + " |")
    cells = ["Average Time"]
    for algorithm in algorithms:
        avg = report.averages[algorithm]
        cells += [f"{avg['e_t']:.3f}", f"{avg['d_t']:.3f}"]
    lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


# -- raw-sample log and replay ----------------------------------------------

def raw_sample_log(report: BenchReport) -> str:
    """Serialize raw per-repeat samples so medians can be replayed exactly."""
    return json.dumps(
        {
            "environment": report.environment,
            "sizes_kb": list(report.sizes),
            "repeats": report.repeats,
            "samples": [
                {
                    "algorithm": r.algorithm,
                    "heap_kb": r.heap_kb,
                    "samples_e": list(r.samples_e),
                    "samples_d": list(r.samples_d),
                }
                for r in report.rows
            ],
        },
        sort_keys=True,
    )


def replay_report(log_text: str) -> BenchReport:
    """Rebuild a report (medians, averages) from a raw-sample log."""
    doc = json.loads(log_text)
    rows = tuple(
        TimingRecord(
            algorithm=entry["algorithm"],
            heap_kb=entry["heap_kb"],
            e_t=statistics.median(entry["samples_e"]),
            d_t=statistics.median(entry["samples_d"]),
            repeats=doc["repeats"],
            samples_e=tuple(entry["samples_e"]),
            samples_d=tuple(entry["samples_d"]),
        )
        for entry in doc["samples"]
    )
    algorithms = tuple(dict.fromkeys(r.algorithm for r in rows))
    return BenchReport(
        environment=doc["environment"],
        sizes=tuple(doc["sizes_kb"]),
        repeats=doc["repeats"],
        rows=rows,
        averages=_averages(rows, algorithms),
    )


# -- rank statistics ---------------------------------------------------------

def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks on ties."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise InvalidArgumentError("need two equal-length samples of size >= 2")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = float(np.sqrt((rx * rx).sum() * (ry * ry).sum()))
    if denom == 0.0:
        return 0.0
    return float((rx * ry).sum() / denom)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    sorted_v = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks

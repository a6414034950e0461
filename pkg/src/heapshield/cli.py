"""Command-line front end.

Subcommands: hash, encrypt, decrypt, simulate, attack, bench.  Every
command accepts --seed (environment variable LWC_SEED supplies a default),
and all seeded commands are deterministic apart from bench's wall-clock
fields.  Exit status: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bench as bench_mod
from .attacks import ATTACK_KINDS, AttackConfig, run_scenario
from .cipher import CipherEnvelope, KeyMaterial, decrypt, encrypt, random_nonce
from .errors import HeapshieldError, InvalidArgumentError
from .hashing import NONCE_LEN, PARAMS, hash_digest
from .heap import _stream, load_scenario, replay_scenario

SEED_ENV_VAR = "LWC_SEED"


@dataclass
class CommandPlan:
    command: str
    options: dict = field(default_factory=dict)
    input: str | None = None
    output: str | None = None


def _hex_nonce(text: str) -> bytes:
    try:
        nonce = bytes.fromhex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"nonce is not hex: {text!r}") from exc
    if len(nonce) != NONCE_LEN:
        raise argparse.ArgumentTypeError(f"nonce must be {NONCE_LEN} octets")
    return nonce


def _sizes_csv(text: str) -> tuple:
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from exc
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    seed_parent = argparse.ArgumentParser(add_help=False)
    seed_parent.add_argument(
        "--seed", type=int, default=None,
        help=f"deterministic seed (default: ${SEED_ENV_VAR})",
    )
    parser = argparse.ArgumentParser(
        prog="heapshield",
        description="Curve-hash toolkit: hashing, one-time-key encryption, "
                    "heap simulation, attack games, and timing benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("hash", parents=[seed_parent],
                       help="print the hex digest of a file (or - for stdin)")
    p.add_argument("--params", choices=sorted(PARAMS), default="default")
    p.add_argument("--nonce", type=_hex_nonce, default=None,
                   help="16-octet hex nonce (default: zeros)")
    p.add_argument("input")

    p = sub.add_parser("encrypt", parents=[seed_parent],
                       help="encrypt a file into envelope wire format")
    p.add_argument("--key-file", required=True)
    p.add_argument("--params", choices=sorted(PARAMS), default="default")
    p.add_argument("--nonce", type=_hex_nonce, default=None,
                   help="16-octet hex nonce (default: fresh random)")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("decrypt", parents=[seed_parent],
                       help="decrypt an envelope back to plaintext")
    p.add_argument("--key-file", required=True)
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("simulate", parents=[seed_parent],
                       help="replay a heap scenario; print a summary")
    p.add_argument("--scenario", required=True,
                   help="scenario path or bundled name")
    p.add_argument("--trace", default=None,
                   help="write the event trace (JSON lines) to this path")

    p = sub.add_parser("attack", parents=[seed_parent],
                       help="run an adversary game on a scenario")
    p.add_argument("--kind", choices=ATTACK_KINDS, required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--guesses", type=int, default=1)

    p = sub.add_parser("bench", parents=[seed_parent],
                       help="time the cipher paths across payload sizes")
    p.add_argument("--sizes", type=_sizes_csv,
                   default=bench_mod.DEFAULT_SIZES_KB, metavar="KB,KB,...")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", choices=("json", "markdown-table"),
                   default="markdown-table")
    p.add_argument("--algorithms", default=",".join(bench_mod.ALGORITHMS),
                   help="comma-separated algorithm subset")
    p.add_argument("--raw-log", default=None,
                   help="write raw per-repeat samples (JSON) to this path")
    return parser


def parse_args(argv) -> CommandPlan:
    """Strict argv parsing into a validated CommandPlan (SystemExit(2) on
    usage errors, matching argparse convention)."""
    ns = _build_parser().parse_args(argv)
    options = dict(vars(ns))
    command = options.pop("command")
    plan = CommandPlan(command=command, options=options)
    plan.input = options.pop("input", None)
    plan.output = options.pop("output", None)
    if options.get("seed") is None:
        import os

        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                options["seed"] = int(env)
            except ValueError:
                raise InvalidArgumentError(f"${SEED_ENV_VAR} is not an integer: {env!r}")
    return plan


def _read_input(source: str) -> bytes:
    if source == "-":
        return sys.stdin.buffer.read()
    return Path(source).read_bytes()


def _write_output(target: str, data: bytes) -> None:
    if target == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(target).write_bytes(data)


def execute(plan: CommandPlan) -> int:
    """Run a parsed command; returns the process exit status."""
    handler = {
        "hash": _cmd_hash,
        "encrypt": _cmd_encrypt,
        "decrypt": _cmd_decrypt,
        "simulate": _cmd_simulate,
        "attack": _cmd_attack,
        "bench": _cmd_bench,
    }[plan.command]
    return handler(plan)


def _cmd_hash(plan: CommandPlan) -> int:
    opts = plan.options
    message = _read_input(plan.input)
    nonce = opts["nonce"] if opts["nonce"] is not None else bytes(NONCE_LEN)
    digest = hash_digest(message, nonce, PARAMS[opts["params"]])
    print(digest.hex())
    return 0


def _load_key(path: str, params_id: str) -> KeyMaterial:
    return KeyMaterial(Path(path).read_bytes(), PARAMS[params_id])


def _cmd_encrypt(plan: CommandPlan) -> int:
    opts = plan.options
    key = _load_key(opts["key_file"], opts["params"])
    nonce = opts["nonce"]
    if nonce is None:
        if opts["seed"] is not None:
            nonce = _stream(b"heapshield.cli.nonce:", opts["seed"]).randbytes(NONCE_LEN)
        else:
            nonce = random_nonce()
    envelope = encrypt(_read_input(plan.input), key, nonce)
    _write_output(plan.output, envelope.to_bytes())
    return 0


def _cmd_decrypt(plan: CommandPlan) -> int:
    opts = plan.options
    envelope = CipherEnvelope.from_bytes(_read_input(plan.input))
    key = KeyMaterial(Path(opts["key_file"]).read_bytes(), PARAMS["default"])
    if envelope.params_id in PARAMS:
        key = KeyMaterial(key.secret, PARAMS[envelope.params_id])
    _write_output(plan.output, decrypt(envelope, key))
    return 0


def _cmd_simulate(plan: CommandPlan) -> int:
    opts = plan.options
    scn = load_scenario(opts["scenario"])
    heap = replay_scenario(scn, seed=opts["seed"])
    if opts["trace"]:
        Path(opts["trace"]).write_text(heap.trace.to_jsonl() + "\n", "utf-8")
    kinds = {}
    for event in heap.trace.events:
        kinds[event.kind] = kinds.get(event.kind, 0) + 1
    summary = {
        "capacity": heap.capacity,
        "policy": heap.policy,
        "strategy": heap.alloc_strategy,
        "seed": heap.seed,
        "events": kinds,
        "live": len(heap.live),
        "pending": len(heap.pending),
        "free_regions": len(heap.free_list),
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


def _cmd_attack(plan: CommandPlan) -> int:
    opts = plan.options
    cfg = AttackConfig(
        kind=opts["kind"],
        trials=opts["trials"],
        seed=opts["seed"] if opts["seed"] is not None else 0,
        guesses_per_trial=opts["guesses"],
    )
    protected, unprotected = run_scenario(opts["scenario"], cfg)
    print(json.dumps(
        {"protected": protected.to_dict(), "unprotected": unprotected.to_dict()},
        sort_keys=True, indent=2,
    ))
    return 0


def _cmd_bench(plan: CommandPlan) -> int:
    opts = plan.options
    algorithms = tuple(a for a in opts["algorithms"].split(",") if a)
    report = bench_mod.run_suite(
        sizes=opts["sizes"],
        repeats=opts["repeats"],
        algorithms=algorithms,
        seed=opts["seed"] if opts["seed"] is not None else 0,
    )
    if opts["raw_log"]:
        Path(opts["raw_log"]).write_text(bench_mod.raw_sample_log(report), "utf-8")
    print(bench_mod.render_report(report, opts["format"]))
    return 0


def main(argv=None) -> int:
    try:
        plan = parse_args(sys.argv[1:] if argv is None else list(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except HeapshieldError as exc:
        print(f"heapshield: {exc}", file=sys.stderr)
        return 1
    try:
        return execute(plan)
    except HeapshieldError as exc:
        print(f"heapshield: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"heapshield: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())

"""Simulated memory heap with an encrypting garbage collector.

The heap is a flat cell array plus a free list.  Released regions sit in a
pending-garbage set with their contents untouched (the attack window) until
`gc_collect` runs; under the encrypt policy the collector overwrites each
reclaimed region in place with ciphertext (fresh nonce per region) before
the region rejoins the free list.

Scenario files are JSON:

    {"capacity": int, "policy": "plain"|"encrypt",
     "strategy": "sequential"|"randomized", "seed": int,
     "ops": [{"op": "alloc", "handle": str, "label": str, "payload_len": int},
             {"op": "release", "handle": str},
             {"op": "gc"}]}

Optional fields: "key_hex" (key secret override) and "params_id".
"""

import bisect
import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .cipher import KeyMaterial, encrypt
from .errors import (
    InvalidArgumentError,
    InvalidHandleError,
    OutOfMemoryError,
    ScenarioFormatError,
)
from .hashing import NONCE_LEN, PARAMS

POLICIES = ("plain", "encrypt")
STRATEGIES = ("sequential", "randomized")
MIN_CAPACITY = 1024
MAX_LABEL_LEN = 64


@dataclass(frozen=True)
class TaskObject:
    """A task allocation request: label plus opaque payload."""

    handle: str
    task_label: str
    payload: bytes

    def __post_init__(self):
        if not self.handle:
            raise InvalidArgumentError("task handle must be nonempty")
        if not self.task_label or len(self.task_label) > MAX_LABEL_LEN:
            raise InvalidArgumentError(
                f"task label must be 1..{MAX_LABEL_LEN} octets"
            )
        if not self.task_label.isascii():
            raise InvalidArgumentError("task label must be ASCII")

    @property
    def size(self) -> int:
        return len(self.task_label) + len(self.payload)


@dataclass(frozen=True)
class TraceEvent:
    t: int
    kind: str  # alloc | free | gc | scan
    address: int
    length: int
    label: str | None = None


class HeapTrace:
    """Ordered observation channel: what a memory-watching adversary sees."""

    def __init__(self):
        self.events: list[TraceEvent] = []

    def append(self, event: TraceEvent) -> None:
        self.events.append(event)

    def __len__(self) -> int:
        return len(self.events)

    def to_jsonl(self) -> str:
        lines = []
        for e in self.events:
            rec = {"t": e.t, "kind": e.kind, "addr": e.address, "len": e.length}
            if e.label is not None:
                rec["label"] = e.label
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines)


def _stream(tag: bytes, seed: int) -> random.Random:
    # bytes-seeded Random is stable across processes (no hash randomization)
    return random.Random(tag + seed.to_bytes(16, "big", signed=True))


class HeapModel:
    """Flat simulated heap; confine each instance to one execution context."""

    def __init__(self, capacity: int, policy: str, alloc_strategy: str,
                 key: KeyMaterial, seed: int, audit: bool = False):
        if capacity < MIN_CAPACITY:
            raise InvalidArgumentError(
                f"heap capacity must be at least {MIN_CAPACITY} octets"
            )
        if policy not in POLICIES:
            raise InvalidArgumentError(f"policy must be one of {POLICIES}")
        if alloc_strategy not in STRATEGIES:
            raise InvalidArgumentError(f"strategy must be one of {STRATEGIES}")
        if not isinstance(key, KeyMaterial):
            raise InvalidArgumentError("heap requires KeyMaterial")
        self.capacity = capacity
        self.policy = policy
        self.alloc_strategy = alloc_strategy
        self.key = key
        self.seed = seed
        self.cells = bytearray(capacity)
        self.live: dict[str, tuple[int, int, str]] = {}
        self.pending: dict[str, tuple[int, int]] = {}
        self.free_list: list[tuple[int, int]] = [(0, capacity)]
        self.trace = HeapTrace()
        self._alloc_rng = _stream(b"heapshield.alloc:", seed)
        self._nonce_rng = _stream(b"heapshield.nonce:", seed)
        self._clock = 0
        self._audit_enabled = audit

    # -- observation ------------------------------------------------------

    def raw_scan(self) -> bytes:
        """Exact copy of the cell array (the adversary's read primitive)."""
        self._emit("scan", 0, self.capacity)
        return bytes(self.cells)

    def free_regions(self) -> tuple:
        return tuple(self.free_list)

    # -- mutation ---------------------------------------------------------

    def allocate(self, task: TaskObject) -> int:
        """Place label || payload into a fitting free region, return address."""
        if task.handle in self.live or task.handle in self.pending:
            raise InvalidArgumentError(f"handle {task.handle!r} already in use")
        size = task.size
        fits = [i for i, (_, ln) in enumerate(self.free_list) if ln >= size]
        if not fits:
            raise OutOfMemoryError(
                f"no free region holds {size} octets "
                f"(largest free: {max((ln for _, ln in self.free_list), default=0)})"
            )
        if self.alloc_strategy == "sequential":
            idx = fits[0]  # free list is address-sorted: lowest-address fit
        else:
            idx = fits[self._alloc_rng.randrange(len(fits))]
        addr, ln = self.free_list.pop(idx)
        if ln > size:
            bisect.insort(self.free_list, (addr + size, ln - size))
        data = task.task_label.encode("ascii") + task.payload
        self.cells[addr : addr + size] = data
        self.live[task.handle] = (addr, size, task.task_label)
        self._emit("alloc", addr, size, task.task_label)
        self._audit()
        return addr

    def release(self, handle: str) -> None:
        """Move a live region to pending garbage; contents stay in place."""
        if handle not in self.live:
            raise InvalidHandleError(f"handle {handle!r} is not live")
        addr, size, _label = self.live.pop(handle)
        self.pending[handle] = (addr, size)
        self._emit("free", addr, size)
        self._audit()

    def gc_collect(self) -> int:
        """Reclaim all pending regions; encrypt them in place first under the
        encrypt policy.  Returns the number of regions processed."""
        regions = sorted(self.pending.values())
        self.pending.clear()
        for addr, size in regions:
            if self.policy == "encrypt":
                nonce = self._nonce_rng.randbytes(NONCE_LEN)
                body = encrypt(bytes(self.cells[addr : addr + size]),
                               self.key, nonce).body
                self.cells[addr : addr + size] = body
            bisect.insort(self.free_list, (addr, size))
            self._emit("gc", addr, size)
        self._coalesce()
        self._audit()
        return len(regions)

    def spawn(self, seed: int, policy: str | None = None,
              strategy: str | None = None) -> "HeapModel":
        """Fresh empty heap with this heap's configuration and a new seed."""
        return HeapModel(
            self.capacity,
            policy or self.policy,
            strategy or self.alloc_strategy,
            self.key,
            seed,
            audit=self._audit_enabled,
        )

    # -- internals --------------------------------------------------------

    def _emit(self, kind: str, addr: int, length: int, label: str | None = None):
        self.trace.append(TraceEvent(self._clock, kind, addr, length, label))
        self._clock += 1

    def _coalesce(self) -> None:
        merged: list[tuple[int, int]] = []
        for addr, ln in self.free_list:
            if merged and merged[-1][0] + merged[-1][1] == addr:
                prev_addr, prev_ln = merged[-1]
                merged[-1] = (prev_addr, prev_ln + ln)
            else:
                merged.append((addr, ln))
        self.free_list = merged

    def _audit(self) -> None:
        if not self._audit_enabled:
            return
        regions = [(a, ln, "live") for a, ln, _ in self.live.values()]
        regions += [(a, ln, "pending") for a, ln in self.pending.values()]
        regions += [(a, ln, "free") for a, ln in self.free_list]
        regions.sort()
        end = 0
        total = 0
        for addr, ln, tag in regions:
            if addr < 0 or addr + ln > self.capacity:
                raise AssertionError(f"{tag} region ({addr}, {ln}) out of bounds")
            if addr < end:
                raise AssertionError(f"{tag} region ({addr}, {ln}) overlaps")
            end = addr + ln
            total += ln
        if total > self.capacity:
            raise AssertionError("region total exceeds capacity")


def heap_new(capacity: int, policy: str, alloc_strategy: str,
             key: KeyMaterial, seed: int, audit: bool = False) -> HeapModel:
    """Construct an empty heap; cells zeroed, deterministic under seed."""
    return HeapModel(capacity, policy, alloc_strategy, key, seed, audit=audit)


# ---------------------------------------------------------------------------
# scenario files
# ---------------------------------------------------------------------------

def bundled_scenarios() -> tuple:
    """Names of scenario files shipped with the package."""
    root = resources.files("heapshield").joinpath("scenarios")
    return tuple(sorted(
        p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json")
    ))


def _scenario_text(source: str) -> str:
    name = str(source)
    if "/" not in name and not name.endswith(".json"):
        res = resources.files("heapshield").joinpath("scenarios", name + ".json")
        if res.is_file():
            return res.read_text("utf-8")
        raise ScenarioFormatError(
            f"no bundled scenario {name!r} (have: {', '.join(bundled_scenarios())})"
        )
    path = Path(name)
    if not path.is_file():
        raise ScenarioFormatError(f"scenario file not found: {name}")
    return path.read_text("utf-8")


def load_scenario(source) -> dict:
    """Load and validate a scenario (path, or a bundled scenario name)."""
    if isinstance(source, dict):
        scn = source
    else:
        text = _scenario_text(source)
        try:
            scn = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(
                f"scenario is not valid JSON: {exc.msg}", line=exc.lineno
            ) from exc
    _validate_scenario(scn)
    return scn


def _validate_scenario(scn: dict) -> None:
    if not isinstance(scn, dict):
        raise ScenarioFormatError("scenario root must be a JSON object")
    for field_name, typ in (
        ("capacity", int), ("policy", str), ("strategy", str), ("seed", int),
    ):
        if not isinstance(scn.get(field_name), typ):
            raise ScenarioFormatError(f"scenario field {field_name!r} missing or mistyped")
    if scn["policy"] not in POLICIES or scn["strategy"] not in STRATEGIES:
        raise ScenarioFormatError("scenario policy/strategy out of range")
    ops = scn.get("ops")
    if not isinstance(ops, list):
        raise ScenarioFormatError("scenario field 'ops' missing or mistyped")
    if not ops:
        raise InvalidArgumentError("scenario has no operations")
    for i, op in enumerate(ops):
        if not isinstance(op, dict) or op.get("op") not in ("alloc", "release", "gc"):
            raise ScenarioFormatError(f"ops[{i}]: unknown operation")
        if op["op"] == "alloc":
            if not isinstance(op.get("handle"), str) or not isinstance(op.get("label"), str):
                raise ScenarioFormatError(f"ops[{i}]: alloc needs handle and label")
            if not isinstance(op.get("payload_len"), int) or op["payload_len"] < 0:
                raise ScenarioFormatError(f"ops[{i}]: bad payload_len")
        elif op["op"] == "release":
            if not isinstance(op.get("handle"), str):
                raise ScenarioFormatError(f"ops[{i}]: release needs a handle")


def scenario_key(scn: dict) -> KeyMaterial:
    """Key material for a scenario: explicit key_hex or seed-derived."""
    params = PARAMS[scn.get("params_id", "digest32")]
    if "key_hex" in scn:
        return KeyMaterial(bytes.fromhex(scn["key_hex"]), params)
    secret = b"scn-key:" + scn["seed"].to_bytes(16, "big", signed=True)
    return KeyMaterial(secret, params)


def scenario_executions(scn: dict) -> list:
    """The scenario's task roster: (label, payload_len) per alloc op."""
    return [
        (op["label"], op["payload_len"])
        for op in scn["ops"]
        if op["op"] == "alloc"
    ]


def replay_scenario(scn: dict, policy: str | None = None,
                    strategy: str | None = None, seed: int | None = None,
                    audit: bool = False) -> HeapModel:
    """Run a scenario's operation sequence on a fresh heap.

    Payload bytes come from a dedicated stream of the scenario seed, so two
    replays differing only in policy/strategy see identical task data.
    """
    scn = load_scenario(scn)
    heap = heap_new(
        scn["capacity"],
        policy or scn["policy"],
        strategy or scn["strategy"],
        scenario_key(scn),
        scn["seed"] if seed is None else seed,
        audit=audit,
    )
    payload_rng = _stream(b"heapshield.payload:", scn["seed"])
    for op in scn["ops"]:
        if op["op"] == "alloc":
            heap.allocate(TaskObject(
                op["handle"], op["label"], payload_rng.randbytes(op["payload_len"])
            ))
        elif op["op"] == "release":
            heap.release(op["handle"])
        else:
            heap.gc_collect()
    return heap

"""Adversary games quantifying heap protection.

Two attacker models, both driven purely by the observation channels a real
memory-watching adversary gets (the event trace and raw cell snapshots):

* nmao — next-address occupation: the attacker reconstructs the free-region
  geometry from the trace and submits guesses for where the next allocation
  will land.  Sequential placement is fully predictable; randomized
  placement reduces it to the chance baseline guesses / fitting-regions.

* ltb — task-behavior learning: the attacker watches snapshots after each
  task execution (alloc, release, collect), learns per-label content
  fingerprints from a training split, and predicts labels of held-out
  executions.  Plain collection leaves labels readable; encrypting
  collection reduces the attacker to 1 / #labels.

* brute-force-session — the blind variant of ltb: no training, the
  attacker checks its guesses by substring-scanning the reclaimed window.

Trials restore heap state (alloc, release, collect of the probe), so
per-trial baselines are exact and reports are deterministic under seeds.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import InvalidArgumentError, OutOfMemoryError
from .heap import (
    HeapModel,
    HeapTrace,
    TaskObject,
    _stream,
    heap_new,
    load_scenario,
    replay_scenario,
    scenario_executions,
    scenario_key,
)

ATTACK_KINDS = ("nmao", "ltb", "brute-force-session")

_PROBE_LABEL = "NMAO_PROBE"


@dataclass(frozen=True)
class AttackConfig:
    kind: str
    trials: int
    seed: int
    guesses_per_trial: int = 1

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise InvalidArgumentError(f"attack kind must be one of {ATTACK_KINDS}")
        if self.trials < 1:
            raise InvalidArgumentError("trials must be at least 1")
        if self.guesses_per_trial < 1:
            raise InvalidArgumentError("guesses_per_trial must be at least 1")


@dataclass(frozen=True)
class AttackReport:
    kind: str
    trials: int
    successes: int
    success_rate: float
    chance_baseline: float
    protected: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "trials": self.trials,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "chance_baseline": self.chance_baseline,
            "protected": self.protected,
        }


class _TraceWatcher:
    """Attacker-side free-region reconstruction from the event trace.

    A region is occupied from its alloc event until its gc event returns it
    (released-but-uncollected regions are not reusable, so they still count
    as occupied for placement prediction).
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.occupied: dict[int, int] = {}
        self._cursor = 0

    def advance(self, trace: HeapTrace) -> None:
        for event in trace.events[self._cursor :]:
            if event.kind == "alloc":
                self.occupied[event.address] = event.length
            elif event.kind == "gc":
                self.occupied.pop(event.address, None)
        self._cursor = len(trace.events)

    def free_intervals(self) -> list:
        out = []
        pos = 0
        for addr, length in sorted(self.occupied.items()):
            if addr > pos:
                out.append((pos, addr - pos))
            pos = addr + length
        if pos < self.capacity:
            out.append((pos, self.capacity - pos))
        return out


def nmao_attack(heap: HeapModel, trace: HeapTrace, cfg: AttackConfig) -> AttackReport:
    """Next-address prediction game on a prepared heap.

    Each trial predicts the placement of a probe allocation sized like the
    modal allocation seen in the trace, then allocates, scores, and restores
    the heap (release + collect).  The chance baseline is the exact mean of
    guesses / fitting-regions across trials.
    """
    if trace is None or len(trace.events) == 0:
        raise InvalidArgumentError("nmao needs a nonempty observation trace")
    sizes = [e.length for e in trace.events if e.kind == "alloc"]
    if not sizes:
        raise InvalidArgumentError("trace contains no allocations to model")
    counts = Counter(sizes)
    probe_size = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    payload_len = max(0, probe_size - len(_PROBE_LABEL))

    attacker_rng = _stream(b"heapshield.attacker:", cfg.seed)
    watcher = _TraceWatcher(heap.capacity)
    successes = 0
    chance_sum = 0.0
    for trial in range(cfg.trials):
        watcher.advance(trace)
        free_ivs = watcher.free_intervals()
        task = TaskObject(f"nmao-probe-{trial}", _PROBE_LABEL, bytes(payload_len))
        fitting = [addr for addr, ln in free_ivs if ln >= task.size]
        if not fitting:
            raise OutOfMemoryError("attack arena has no fitting free region")
        g = min(cfg.guesses_per_trial, len(fitting))
        if heap.alloc_strategy == "sequential":
            guesses = fitting[:g]  # lowest-address fit leads the guess list
        else:
            guesses = attacker_rng.sample(fitting, g)
        chance_sum += g / len(fitting)
        actual = heap.allocate(task)
        if actual in guesses:
            successes += 1
        heap.release(task.handle)
        heap.gc_collect()
    return AttackReport(
        kind="nmao",
        trials=cfg.trials,
        successes=successes,
        success_rate=successes / cfg.trials,
        chance_baseline=chance_sum / cfg.trials,
        protected=heap.policy == "encrypt",
    )


def _lcp_len(a: bytes, b: bytes) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def ltb_attack(heap: HeapModel, scenario, cfg: AttackConfig) -> AttackReport:
    """Label-inference game over repeated task executions.

    Rounds execute the scenario roster in shuffled order on fresh heaps.
    Per label, the first half of its occurrences train the attacker (it
    learns the common prefix of the reclaimed windows); the rest are scored
    predictions.  kind == "brute-force-session" skips training and instead
    checks guesses by substring scan.
    """
    executions = list(scenario)
    labels = sorted({label for label, _ in executions})
    if len(labels) < 2:
        raise InvalidArgumentError("ltb needs at least 2 distinct task labels")
    blind = cfg.kind == "brute-force-session"
    roster_counts = Counter(label for label, _ in executions)
    test_slots = sum(c - (c + 1) // 2 for c in roster_counts.values())
    if not blind and test_slots == 0:
        raise InvalidArgumentError(
            "ltb needs repeated executions of at least one label"
        )

    attacker_rng = _stream(b"heapshield.attacker:", cfg.seed)
    schedule_rng = _stream(b"heapshield.schedule:", cfg.seed)
    predictions = 0
    correct = 0
    round_no = 0
    while predictions < cfg.trials:
        round_seed = heap.seed + (round_no + 1) * 0x9E3779B9
        round_heap = heap.spawn(seed=round_seed)
        payload_rng = _stream(b"heapshield.payload:", round_seed)
        roster = executions[:]
        schedule_rng.shuffle(roster)
        seen = Counter()
        prefixes: dict[str, bytes] = {}
        for idx, (label, payload_len) in enumerate(roster):
            if predictions >= cfg.trials:
                break
            task = TaskObject(f"t{idx}", label, payload_rng.randbytes(payload_len))
            addr = round_heap.allocate(task)
            size = task.size
            round_heap.release(task.handle)
            round_heap.gc_collect()
            window = round_heap.raw_scan()[addr : addr + size]
            seen[label] += 1
            if blind:
                predicted_set = _blind_guesses(window, labels, cfg, attacker_rng)
                correct += label in predicted_set
                predictions += 1
            elif seen[label] <= (roster_counts[label] + 1) // 2:
                known = prefixes.get(label)
                prefixes[label] = window if known is None else known[: _lcp_len(known, window)]
            else:
                scores = {lab: _lcp_len(pref, window) for lab, pref in prefixes.items()}
                best = max(scores.values())
                tied = sorted(lab for lab, s in scores.items() if s == best)
                pick = tied[0] if len(tied) == 1 else attacker_rng.choice(tied)
                correct += pick == label
                predictions += 1
        round_no += 1

    if blind:
        g = min(cfg.guesses_per_trial, len(labels))
        chance = g / len(labels)
    else:
        chance = 1.0 / len(labels)
    return AttackReport(
        kind=cfg.kind,
        trials=predictions,
        successes=correct,
        success_rate=correct / predictions,
        chance_baseline=chance,
        protected=heap.policy == "encrypt",
    )


def _blind_guesses(window: bytes, labels, cfg: AttackConfig, rng) -> list:
    """Substring-checked guesses first, then random fill up to the budget."""
    g = min(cfg.guesses_per_trial, len(labels))
    found = [lab for lab in labels if lab.encode("ascii") in window]
    guesses = found[:g]
    remaining = [lab for lab in labels if lab not in guesses]
    while len(guesses) < g:
        pick = rng.choice(remaining)
        remaining.remove(pick)
        guesses.append(pick)
    return guesses


def run_scenario(source, cfg: AttackConfig):
    """Attack a scenario in both configurations.

    Returns (protected_report, unprotected_report): the protected run uses
    encrypting collection with randomized placement, the unprotected run
    plain collection with sequential placement; both replay the same
    operation sequence and seed.
    """
    scn = load_scenario(source)
    reports = []
    for policy, strategy in (("encrypt", "randomized"), ("plain", "sequential")):
        if cfg.kind == "nmao":
            heap = replay_scenario(scn, policy=policy, strategy=strategy)
            reports.append(nmao_attack(heap, heap.trace, cfg))
        else:
            heap = heap_new(
                scn["capacity"], policy, strategy, scenario_key(scn), scn["seed"]
            )
            reports.append(ltb_attack(heap, scenario_executions(scn), cfg))
    return reports[0], reports[1]

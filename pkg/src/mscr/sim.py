"""A synchronous n-device storage cluster driving the repair engine.

The cluster stores one stripe of ``M`` symbols.  Every state change appends
an event to ``state.events``; :func:`format_events` writes them as one JSON
object per line.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .code import Code, CodeParams, DeviceBlock, build_code, decode, encode
from .errors import ClusterError
from .field import FieldSpec
from .repair import RepairTranscript, naive_transfers, repair


@dataclass
class BandwidthReport:
    failed: tuple[int, ...]
    repair_transfers: int
    naive_transfers: int

    @property
    def savings_ratio(self) -> float:
        """Repair cost as a fraction of the naive baseline (below 1 is a saving)."""
        return self.repair_transfers / self.naive_transfers if self.naive_transfers else 1.0

    def to_dict(self) -> dict:
        return {
            "failed": list(self.failed),
            "repair_transfers": self.repair_transfers,
            "naive_transfers": self.naive_transfers,
            "savings_ratio": round(self.savings_ratio, 6),
        }


@dataclass
class ClusterState:
    code: Code
    blocks: dict[int, Optional[DeviceBlock]]
    data: tuple[int, ...]
    events: list[dict] = dc_field(default_factory=list)
    transcripts: list[RepairTranscript] = dc_field(default_factory=list, repr=False)

    @property
    def failed(self) -> list[int]:
        return sorted(i for i, b in self.blocks.items() if b is None)

    @property
    def alive(self) -> list[int]:
        return sorted(i for i, b in self.blocks.items() if b is not None)

    def log(self, kind: str, **fields) -> None:
        self.events.append({"seq": len(self.events), "event": kind, **fields})

    def expected(self) -> dict[int, tuple[int, ...]]:
        return {b.device: b.symbols for b in encode(self.code, self.data)}

    def violations(self) -> list[int]:
        """Alive devices whose block differs from a fresh encoding of the data."""
        ref = self.expected()
        return [i for i in self.alive if self.blocks[i].symbols != ref[i]]


def cluster_create(params: CodeParams, field: Optional[FieldSpec], data: Sequence[int], code: Optional[Code] = None) -> ClusterState:
    """Encode ``data`` (at most ``M`` symbols, zero padded) onto ``n`` devices."""
    code = code or build_code(params, field)
    M = code.params.M
    if len(data) == 0:
        raise ClusterError("cannot create a cluster from empty data")
    if len(data) > M:
        raise ClusterError(f"cluster holds one stripe of {M} symbols, got {len(data)}")
    data = tuple(int(x) for x in data) + (0,) * (M - len(data))
    blocks = {b.device: b for b in encode(code, data)}
    state = ClusterState(code, blocks, data)
    state.log("encode", devices=list(range(code.n)), symbols=M)
    return state


def max_failures(code: Code) -> int:
    return min(code.params.t, code.n - code.params.d)


def fail_devices(state: ClusterState, indices: Sequence[int]) -> ClusterState:
    indices = sorted(set(int(i) for i in indices))
    for i in indices:
        if not 0 <= i < state.code.n:
            raise ClusterError(f"no device {i} in an n={state.code.n} cluster")
        if state.blocks[i] is None:
            raise ClusterError(f"device {i} has already failed")
    total = len(state.failed) + len(indices)
    if total > max_failures(state.code):
        raise ClusterError(
            f"{total} failed devices exceed the repairable limit {max_failures(state.code)} "
            f"(n={state.code.n}, d={state.code.params.d}, t={state.code.params.t})"
        )
    for i in indices:
        state.blocks[i] = None
    state.log("fail", devices=indices)
    return state


def run_repair(state: ClusterState, **kw) -> tuple[ClusterState, Optional[BandwidthReport]]:
    """Repair every failed device; returns ``None`` as the report when nothing failed."""
    failed = state.failed
    if not failed:
        return state, None
    live = {i: state.blocks[i].symbols for i in state.alive}
    tr = repair(state.code, live, failed, **kw)
    for dev, syms in tr.recovered.items():
        state.blocks[dev] = DeviceBlock(dev, syms)
    report = BandwidthReport(tuple(failed), tr.transfer_count, naive_transfers(state.code, len(failed)))
    state.transcripts.append(tr)
    state.log("repair", devices=list(failed), helpers=list(tr.helpers), transfers=report.repair_transfers, naive=report.naive_transfers)
    return state, report


def decode_state(state: ClusterState, pair: Optional[Sequence[int]] = None) -> list[int]:
    pair = tuple(pair) if pair is not None else tuple(state.alive[:2])
    if len(pair) != 2 or any(state.blocks.get(i) is None for i in pair):
        raise ClusterError(f"decode needs two alive devices, got {pair}")
    out = decode(state.code, [state.blocks[i] for i in pair])
    state.log("decode", devices=list(pair))
    return out


def expected_transfers(code: Code, failures: int) -> int:
    """Closed-form repair cost: ``2(d+1)`` for a pair, ``alpha+1`` for one device."""
    return 2 * (code.params.d + 1) if failures == 2 else code.alpha + 1


@dataclass
class ChurnSummary:
    rounds: int
    seed: int
    pair_repairs: int = 0
    single_repairs: int = 0
    total_transfers: int = 0
    total_naive: int = 0
    formula_transfers: int = 0
    violations: int = 0
    decode_failures: int = 0
    per_round: list[tuple[int, tuple[int, ...], int, int]] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.decode_failures == 0 and self.total_transfers == self.formula_transfers

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "seed": self.seed,
            "pair_repairs": self.pair_repairs,
            "single_repairs": self.single_repairs,
            "total_transfers": self.total_transfers,
            "total_naive": self.total_naive,
            "formula_transfers": self.formula_transfers,
            "violations": self.violations,
            "decode_failures": self.decode_failures,
        }

    def to_text(self) -> str:
        lines = [f"{k}: {v}" for k, v in self.to_dict().items()]
        lines.append(f"status: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["round,failed,transfers,naive"]
        rows += [f"{r},{' '.join(map(str, f))},{t},{n}" for r, f, t, n in self.per_round]
        return "\n".join(rows) + "\n"


def churn_test(state: ClusterState, rounds: int, seed: int = 0) -> ChurnSummary:
    """Fail 1 or 2 random devices per round, repair, and check exactness and decodability."""
    rng = random.Random(seed)
    summary = ChurnSummary(rounds, seed)
    limit = max_failures(state.code)
    for r in range(rounds):
        count = rng.randint(1, limit)
        victims = sorted(rng.sample(state.alive, count))
        fail_devices(state, victims)
        _, rep = run_repair(state)
        summary.total_transfers += rep.repair_transfers
        summary.total_naive += rep.naive_transfers
        summary.formula_transfers += expected_transfers(state.code, count)
        if count == 2:
            summary.pair_repairs += 1
        else:
            summary.single_repairs += 1
        summary.per_round.append((r, tuple(victims), rep.repair_transfers, rep.naive_transfers))
        summary.violations += len(state.violations())
        pair = sorted(rng.sample(state.alive, 2))
        if list(decode_state(state, pair)) != list(state.data):
            summary.decode_failures += 1
    return summary


def format_events(state: ClusterState) -> str:
    return "".join(json.dumps(e, sort_keys=True) + "\n" for e in state.events)


def parse_events(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]

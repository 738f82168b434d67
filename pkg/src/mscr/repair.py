"""Exact repair of one or two failed devices by interference alignment.

A pair repair works in the equivalent code where the failed devices hold
``a'`` and ``b'``:

1. every helper ``m`` sends ``(z B_m^-1) r_m`` to the ``a'`` repairer and
   ``(z A_m^-1) r_m`` to the ``b'`` repairer, so all ``b'`` (resp. ``a'``)
   interference arrives as the single aggregate ``z.b'`` (resp. ``z.a'``);
2. each repairer forwards one combination of what it collected, chosen so its
   interference at the other repairer is again exactly ``z`` times the
   other's unknown block;
3. each repairer solves ``d + 1`` equations in the ``alpha`` lost symbols plus
   the aggregate.

A single repair skips coordination: the partner device of the equivalent
code sends ``z.b'`` directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Optional, Sequence

from .code import Code, EquivalentCode, change_of_variables, helper_subsets
from .errors import (
    FieldUnsuitable,
    InconsistentSystem,
    MSCRError,
    NoAlignedCoordination,
    SingularInterference,
    SingularMatrix,
    SingularRecovery,
)
from .field import FieldSpec
from .linalg import Matrix, mat_inverse, mat_solve, rank_of_rows, solve_any, solve_left

TARGET_A = "a"
TARGET_B = "b"

MAX_RANDOM_TWISTS = 256


def alignment_vector(field: FieldSpec, alpha: int, z: Optional[Sequence[int]] = None) -> tuple[int, ...]:
    """Validate ``z`` (default all-ones).

    Every entry must be nonzero: a zero in position ``j`` would drop
    ``a'_j`` from every collected equation.
    """
    if z is None:
        return (1,) * alpha
    z = tuple(field.check(int(x)) for x in z)
    if len(z) != alpha:
        raise ValueError(f"alignment vector must have length {alpha}")
    if not any(z):
        raise ValueError("alignment vector must be nonzero")
    if not all(z):
        raise ValueError("alignment vector needs every entry nonzero for exact repair")
    return z


@dataclass(frozen=True)
class Contribution:
    helper: int
    row: tuple[int, ...]
    symbol: int
    desired: tuple[int, ...]
    interference: tuple[int, ...]


@dataclass(frozen=True)
class CollectRound:
    target: int
    target_role: str
    contributions: tuple[Contribution, ...]

    @property
    def symbols(self) -> list[int]:
        return [c.symbol for c in self.contributions]


@dataclass(frozen=True)
class CoordinationRound:
    sender: int
    receiver: int
    row: tuple[int, ...]
    symbol: int
    desired: tuple[int, ...]
    interference: tuple[int, ...]


@dataclass(frozen=True)
class Transfer:
    """One symbol on the wire, as written to a transcript line."""

    round: str
    sender: int
    receiver: int
    row: tuple[int, ...]
    symbol: int


@dataclass
class RepairTranscript:
    failed: tuple[int, ...]
    helpers: tuple[int, ...]
    equivalent: EquivalentCode = dc_field(repr=False)
    collect: tuple[CollectRound, ...]
    coordination: tuple[CoordinationRound, ...]
    recovered: dict[int, tuple[int, ...]]
    aggregates: dict[int, int]
    z: tuple[int, ...]
    z_b: Optional[tuple[int, ...]] = None

    @property
    def transfer_count(self) -> int:
        return sum(len(r.contributions) for r in self.collect) + len(self.coordination)

    def transfers(self) -> list[Transfer]:
        out = []
        for r in self.collect:
            for c in r.contributions:
                out.append(Transfer("collect", c.helper, r.target, c.row, c.symbol))
        for c in self.coordination:
            out.append(Transfer("coordinate", c.sender, c.receiver, c.row, c.symbol))
        return out

    def to_text(self) -> str:
        return format_transcript(self)


# -- coefficient-level building blocks ---------------------------------------------


def repair_rows_for(eq: EquivalentCode, helper: int, target: str, z: Sequence[int]) -> tuple[int, ...]:
    """``z B_m^-1`` for the ``a'`` repairer, ``z A_m^-1`` for the ``b'`` repairer."""
    a_m, b_m = eq.view(helper)
    interf = b_m if target == TARGET_A else a_m
    try:
        inv = mat_inverse(interf)
    except SingularMatrix as exc:
        raise SingularInterference(f"helper {helper} cannot align interference for target {target}") from exc
    return tuple((Matrix.row(eq.field, z) @ inv).rows[0])


def _split(eq: EquivalentCode, helper: int, row: Sequence[int], target: str):
    """(desired, interference) coefficient rows of ``row . r_helper``."""
    f = eq.field
    a_part = tuple(f.mul(v, c[0]) for v, c in zip(row, eq.coeffs[helper]))
    b_part = tuple(f.mul(v, c[1]) for v, c in zip(row, eq.coeffs[helper]))
    return (a_part, b_part) if target == TARGET_A else (b_part, a_part)


def coordination_row(eq: EquivalentCode, sender_round: CollectRound, z_target: Sequence[int]) -> tuple[int, ...]:
    """Row ``v0`` with ``v0 . (sender's desired rows) = z_target``.

    The sender's own desired block is interference for the receiver, so
    this makes the forwarded symbol's interference exactly ``z_target``.
    """
    desired = Matrix(eq.field, [c.desired for c in sender_round.contributions])
    try:
        return tuple(solve_left(desired, z_target))
    except InconsistentSystem as exc:
        raise NoAlignedCoordination(
            f"no coordination row from device {sender_round.target} aligns interference"
        ) from exc


def recover(
    field: FieldSpec,
    desired_rows: Sequence[Sequence[int]],
    symbols: Sequence[int],
) -> tuple[list[int], int]:
    """Solve ``symbols[i] = desired_rows[i] . x + s`` for the block ``x`` and aggregate ``s``."""
    alpha = len(desired_rows[0])
    system = [list(r) + [1] for r in desired_rows]
    if rank_of_rows(field, system) < alpha + 1:
        raise SingularRecovery(f"recovery system has rank below {alpha + 1}")
    if len(system) == alpha + 1:
        sol = mat_solve(Matrix(field, system), symbols)
    else:
        sol = solve_any(field, system, symbols)
    return sol[:alpha], sol[alpha]


def _recovery_rows(round_: CollectRound, extra: Optional[CoordinationRound]) -> list[tuple[int, ...]]:
    rows = [c.desired for c in round_.contributions]
    if extra is not None:
        rows.append(extra.desired)
    return rows


# -- plans (coefficients only) and execution ---------------------------------------------


def _collect(eq: EquivalentCode, target_dev: int, target: str, helpers, z, blocks=None) -> CollectRound:
    f = eq.field
    contribs = []
    for h in helpers:
        row = repair_rows_for(eq, h, target, z)
        desired, interf = _split(eq, h, row, target)
        sym = f.dot(row, blocks[h]) if blocks is not None else 0
        contribs.append(Contribution(h, row, sym, desired, interf))
    return CollectRound(target_dev, target, tuple(contribs))


def _coordinate(eq: EquivalentCode, sender: CollectRound, receiver: CollectRound, z) -> CoordinationRound:
    f = eq.field
    v0 = coordination_row(eq, sender, z)
    symbol = f.dot(v0, sender.symbols)
    # what the receiver wants is the sender's interference part
    desired = [0] * len(z)
    interf = [0] * len(z)
    for coef, c in zip(v0, sender.contributions):
        if coef:
            desired = [f.add(x, f.mul(coef, y)) for x, y in zip(desired, c.interference)]
            interf = [f.add(x, f.mul(coef, y)) for x, y in zip(interf, c.desired)]
    return CoordinationRound(sender.target, receiver.target, v0, symbol, tuple(desired), tuple(interf))


def default_pair_helpers(code: Code, failed: Sequence[int]) -> tuple[int, ...]:
    live = [i for i in range(code.n) if i not in failed]
    return tuple(live[: code.params.d])


def default_single_helpers(code: Code, failed: int) -> tuple[int, ...]:
    """Partner (lowest live index) first, then the next alpha live devices."""
    live = [i for i in range(code.n) if i != failed]
    return tuple(live[: code.alpha + 1])


def _check_helpers(code: Code, failed: Sequence[int], helpers: Sequence[int], count: int):
    if len(set(helpers)) != len(helpers):
        raise ValueError("duplicate helper index")
    if set(helpers) & set(failed):
        raise ValueError("helpers must be live devices")
    if len(helpers) != count:
        raise ValueError(f"expected {count} helpers, got {len(helpers)}")
    for h in helpers:
        code.device(h)


def _pair_rounds(eq: EquivalentCode, helpers, z_a, z_b, blocks=None):
    fa, fb = eq.failed
    round_a = _collect(eq, fa, TARGET_A, helpers, z_a, blocks)
    round_b = _collect(eq, fb, TARGET_B, helpers, z_b, blocks)
    to_a = _coordinate(eq, round_b, round_a, z_a)
    to_b = _coordinate(eq, round_a, round_b, z_b)
    return round_a, round_b, to_a, to_b


def _twists(field: FieldSpec, alpha: int):
    """Deterministic candidates ``y`` for ``z_b = z * y``; the first is all-ones."""
    for k in range(field.order - 1):
        yield tuple(field.omega_pow(k * j) for j in range(alpha))
    rng = random.Random(0x5EED)
    for _ in range(MAX_RANDOM_TWISTS):
        yield tuple(rng.randrange(1, field.order) for _ in range(alpha))


def choose_alignment(eq: EquivalentCode, helpers: Sequence[int], z: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Alignment vectors ``(z_a, z_b)`` for the two repairers.

    ``z_a = z`` and ``z_b = z * y`` for the first twist ``y`` that makes
    both recovery systems full rank.  For the original systematic pair
    ``y`` is all-ones; other pairs can need ``y != 1`` because a helper may
    otherwise send the same equation to both repairers, leaving the
    coordination symbol redundant.  Whether a twist works does not depend
    on ``z`` (rescaling the unknowns by ``z`` removes it).
    """
    f = eq.field
    last = None
    for y in _twists(f, len(z)):
        z_b = tuple(f.mul(a, b) for a, b in zip(z, y))
        try:
            round_a, round_b, to_a, to_b = _pair_rounds(eq, helpers, z, z_b)
            _check_recovery(f, _recovery_rows(round_a, to_a))
            _check_recovery(f, _recovery_rows(round_b, to_b))
        except (NoAlignedCoordination, SingularRecovery) as exc:
            last = exc
            continue
        return tuple(z), z_b
    raise last


def _check_recovery(field: FieldSpec, rows) -> None:
    alpha = len(rows[0])
    if rank_of_rows(field, [list(r) + [1] for r in rows]) < alpha + 1:
        raise SingularRecovery(f"recovery system has rank below {alpha + 1}")


def repair_pair(
    code: Code,
    blocks: Mapping[int, Sequence[int]],
    failed: Sequence[int],
    helpers: Optional[Sequence[int]] = None,
    z: Optional[Sequence[int]] = None,
    z_b: Optional[Sequence[int]] = None,
) -> RepairTranscript:
    """Regenerate the blocks of two failed devices from ``d`` helpers.

    ``z`` aligns interference at the first failed device; the second uses
    ``z_b`` if given, else the one picked by :func:`choose_alignment`.
    """
    failed = tuple(failed)
    if len(failed) != 2 or failed[0] == failed[1]:
        raise ValueError("pair repair needs two distinct failed devices")
    helpers = tuple(helpers) if helpers is not None else default_pair_helpers(code, failed)
    _check_helpers(code, failed, helpers, code.params.d)
    z = alignment_vector(code.field, code.alpha, z)
    eq = change_of_variables(code, failed)
    fa, fb = failed
    if z_b is None:
        z, z_b = choose_alignment(eq, helpers, z)
    else:
        z_b = alignment_vector(code.field, code.alpha, z_b)

    round_a, round_b, to_a, to_b = _pair_rounds(eq, helpers, z, z_b, blocks)
    a_new, s_a = recover(code.field, _recovery_rows(round_a, to_a), round_a.symbols + [to_a.symbol])
    b_new, s_b = recover(code.field, _recovery_rows(round_b, to_b), round_b.symbols + [to_b.symbol])
    return RepairTranscript(
        failed=failed,
        helpers=helpers,
        equivalent=eq,
        collect=(round_a, round_b),
        coordination=(to_a, to_b),
        recovered={fa: tuple(a_new), fb: tuple(b_new)},
        aggregates={fa: s_a, fb: s_b},
        z=z,
        z_b=z_b,
    )


def repair_single(
    code: Code,
    blocks: Mapping[int, Sequence[int]],
    failed: int,
    helpers: Optional[Sequence[int]] = None,
    z: Optional[Sequence[int]] = None,
) -> RepairTranscript:
    """Regenerate one device from ``alpha + 1`` helpers without coordination.

    ``helpers[0]`` is the partner: in the equivalent code it stores ``b'``
    and sends ``z.b'`` directly.
    """
    helpers = tuple(helpers) if helpers is not None else default_single_helpers(code, failed)
    _check_helpers(code, (failed,), helpers, code.alpha + 1)
    z = alignment_vector(code.field, code.alpha, z)
    partner, others = helpers[0], helpers[1:]
    eq = change_of_variables(code, (failed, partner))
    f = code.field

    round_a = _collect(eq, failed, TARGET_A, others, z, blocks)
    direct = Contribution(partner, z, f.dot(z, blocks[partner]), (0,) * code.alpha, z)
    round_a = CollectRound(failed, TARGET_A, round_a.contributions + (direct,))
    a_new, s = recover(f, _recovery_rows(round_a, None), round_a.symbols)
    return RepairTranscript(
        failed=(failed,),
        helpers=helpers,
        equivalent=eq,
        collect=(round_a,),
        coordination=(),
        recovered={failed: tuple(a_new)},
        aggregates={failed: s},
        z=z,
    )


def repair(code: Code, blocks: Mapping[int, Sequence[int]], failed: Sequence[int], **kw) -> RepairTranscript:
    """Dispatch on the number of failures (one: single repair, two: pair repair)."""
    failed = tuple(sorted(set(failed)))
    if len(failed) == 1:
        return repair_single(code, blocks, failed[0], **kw)
    if len(failed) == 2:
        return repair_pair(code, blocks, failed, **kw)
    raise ValueError(f"can repair one or two failures, got {len(failed)}")


def naive_transfers(code: Code, failures: int) -> int:
    """Download k blocks to one newcomer, then ship alpha symbols to each other newcomer."""
    return code.params.k * code.alpha + (failures - 1) * code.alpha


# -- validation ---------------------------------------------------------------------


def validate_repairs(code: Code, exhaustive: bool = True) -> None:
    """Check every pair and single repair is solvable (coefficients only)."""
    zeros = {i: (0,) * code.alpha for i in range(code.n)}
    z = alignment_vector(code.field, code.alpha)
    for f1 in range(code.n):
        for f2 in range(code.n):
            if f1 == f2:
                continue
            pair = (f1, f2)
            subsets = helper_subsets(code, pair, code.params.d) if exhaustive else [default_pair_helpers(code, pair)]
            for helpers in subsets:
                try:
                    repair_pair(code, zeros, pair, helpers, z)
                except (SingularRecovery, NoAlignedCoordination, SingularInterference) as exc:
                    raise FieldUnsuitable(
                        f"{code.field} with omega={code.field.omega} cannot repair devices {pair} "
                        f"from helpers {helpers}: {exc}",
                        pair,
                        tuple(helpers),
                    ) from exc
    for f in range(code.n):
        live = [i for i in range(code.n) if i != f]
        if exhaustive:
            subsets = [(p,) + rest for p in live for rest in helper_subsets(code, (f, p), code.alpha)]
        else:
            subsets = [default_single_helpers(code, f)]
        for helpers in subsets:
            try:
                repair_single(code, zeros, f, helpers, z)
            except (SingularRecovery, SingularInterference) as exc:
                raise FieldUnsuitable(
                    f"{code.field} with omega={code.field.omega} cannot repair device {f} "
                    f"from helpers {helpers}: {exc}",
                    (f,),
                    tuple(helpers),
                ) from exc


# -- transcript text format ---------------------------------------------------------


def format_transcript(tr: RepairTranscript) -> str:
    """One transfer per line: ``round sender receiver row symbol``."""
    lines = [
        "# mscr repair transcript v1",
        f"# failed {','.join(map(str, tr.failed))}",
        f"# helpers {','.join(map(str, tr.helpers))}",
        f"# z {','.join(map(str, tr.z))}",
    ]
    if tr.z_b is not None:
        lines.append(f"# z_b {','.join(map(str, tr.z_b))}")
    for t in tr.transfers():
        lines.append(f"{t.round} {t.sender} {t.receiver} {','.join(map(str, t.row))} {t.symbol}")
    lines.append(f"# transfers {tr.transfer_count}")
    return "\n".join(lines) + "\n"


def parse_transcript(text: str) -> list[Transfer]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind, sender, receiver, row, symbol = line.split()
        out.append(Transfer(kind, int(sender), int(receiver), tuple(int(x) for x in row.split(",")), int(symbol)))
    return out


def replay(code: Code, blocks: Mapping[int, Sequence[int]], transfers: Sequence[Transfer]) -> list[int]:
    """Recompute every collect symbol from the helpers' blocks; returns mismatching line numbers."""
    bad = []
    for i, t in enumerate(transfers):
        if t.round == "collect" and code.field.dot(t.row, blocks[t.sender]) != t.symbol:
            bad.append(i)
    return bad

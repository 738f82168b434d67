"""Finite-instance certificates for independent interference alignment.

Setting: systematic devices ``0..k-1`` store blocks ``x_0..x_{k-1}`` of
``alpha`` symbols, redundancy device ``i`` stores ``sum_l M_i[l] x_l``.
Devices 0 ("a") and 1 ("b") fail together and are repaired from the ``d``
remaining devices with one coordination symbol each way.

Independent alignment asks that at each repairer every interfering block
spans one dimension.  For ``k >= 3`` the third block's device sends ``g``
(a projective point) and alignment forces every redundancy helper's rows to
be ``g C_i^-1`` up to a nonzero scalar, for both repairers.  The search
enumerates ``g``, applies that forcing, and then checks the resulting
received matrices exactly, over every choice of coordination combination.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional, Sequence

from .errors import InconsistentSystem, MSCRError, SearchSpaceTooLarge, SingularMatrix
from .field import FieldSpec
from .linalg import Matrix, mat_inverse, rank_of_rows, row_reduce, solve_any

DEFAULT_MAX_CANDIDATES = 10**6


@dataclass(frozen=True)
class IAInstance:
    """``blocks[i][l]`` is the ``alpha x alpha`` coefficient of block ``l`` at redundancy device ``i``."""

    k: int
    d: int
    t: int
    field: FieldSpec
    blocks: tuple[tuple[Matrix, ...], ...]
    label: str = ""

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("need k >= 2")
        if self.d <= self.k:
            raise ValueError("need d > k")
        if len(self.blocks) != self.n - self.k:
            raise ValueError(f"expected {self.n - self.k} redundancy devices, got {len(self.blocks)}")
        for dev in self.blocks:
            if len(dev) != self.k:
                raise ValueError("each redundancy device needs k coefficient matrices")
            for m in dev:
                if m.shape != (self.alpha, self.alpha):
                    raise ValueError(f"coefficient matrices must be {self.alpha}x{self.alpha}")

    @property
    def alpha(self) -> int:
        return self.d - self.k + self.t

    @property
    def n(self) -> int:
        return self.d + self.t

    @property
    def helpers(self) -> list[int]:
        """Device indices helping the repair of devices 0 and 1 (systematic first)."""
        return list(range(2, self.n))

    def generator(self, device: int) -> list[list[int]]:
        """``alpha x (k alpha)`` generator rows of one device."""
        a, k = self.alpha, self.k
        if device < k:
            return [[1 if c == device * a + r else 0 for c in range(k * a)] for r in range(a)]
        mats = self.blocks[device - k]
        return [sum((list(mats[l].rows[r]) for l in range(k)), []) for r in range(a)]

    def is_mds(self) -> bool:
        for subset in itertools.combinations(range(self.n), self.k):
            rows = [r for dev in subset for r in self.generator(dev)]
            if rank_of_rows(self.field, rows) < self.k * self.alpha:
                return False
        return True

    def describe(self) -> dict:
        return {
            "label": self.label,
            "k": self.k,
            "d": self.d,
            "t": self.t,
            "alpha": self.alpha,
            "n": self.n,
            "field": str(self.field),
            "field_spec": self.field.to_dict(),
            "blocks": [[[list(r) for r in m.rows] for m in dev] for dev in self.blocks],
        }


def _random_invertible(field: FieldSpec, size: int, rng: random.Random, kind: str) -> Matrix:
    if kind == "monomial":
        perm = list(range(size))
        rng.shuffle(perm)
        return Matrix(field, [[rng.randrange(1, field.order) if perm[i] == j else 0 for j in range(size)] for i in range(size)])
    while True:
        rows = [[rng.randrange(field.order) for _ in range(size)] for _ in range(size)]
        if rank_of_rows(field, rows) == size:
            return Matrix(field, rows)


def random_instance(
    k: int,
    d: int,
    t: int,
    field: FieldSpec,
    seed: int = 0,
    kind: str = "dense",
    max_tries: int = 100_000,
) -> IAInstance:
    """Seeded random MDS instance by rejection sampling.

    ``kind="dense"`` draws uniform invertible blocks; ``kind="monomial"``
    draws scaled permutation matrices (rarely MDS over tiny fields);
    ``kind="tensor"`` uses ``s_il * C_i`` for a random invertible ``C_i`` and
    scalars ``s_il``, so every interfering block is aligned for free and only
    the recovery rank can fail.
    """
    if kind not in ("dense", "monomial", "tensor"):
        raise ValueError(f"unknown instance kind {kind!r}")
    rng = random.Random(seed)
    alpha = d - k + t
    for _ in range(max_tries):
        if kind == "tensor":
            blocks = []
            for _ in range(d + t - k):
                c = _random_invertible(field, alpha, rng, "dense")
                blocks.append(tuple(c.scale(rng.randrange(1, field.order)) for _ in range(k)))
            blocks = tuple(blocks)
        else:
            blocks = tuple(
                tuple(_random_invertible(field, alpha, rng, kind) for _ in range(k)) for _ in range(d + t - k)
            )
        inst = IAInstance(k, d, t, field, blocks, label=f"random(seed={seed},kind={kind})")
        if inst.is_mds():
            return inst
    raise MSCRError(f"no MDS instance found in {max_tries} draws over {field}")


def instance_from_code(code, failed: Sequence[int] = (0, 1)) -> IAInstance:
    """The ``k=2`` instance seen by a pair repair of an MSCR code.

    Helpers are ordered like the repair engine's default helper list.
    """
    from .code import change_of_variables
    from .repair import default_pair_helpers

    eq = change_of_variables(code, failed)
    helpers = default_pair_helpers(code, failed)
    blocks = tuple(eq.view(h) for h in helpers)
    params = code.params
    return IAInstance(2, params.d, 2, code.field, blocks, label=f"mscr(n={params.n},d={params.d},failed={tuple(failed)})")


# -- projective points --------------------------------------------------------------


def projective_points(field: FieldSpec, dim: int) -> Iterator[tuple[int, ...]]:
    """Canonical representatives (first nonzero entry 1) in lexicographic order."""
    q = field.order
    for lead in range(dim):
        for tail in itertools.product(range(q), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + tail


def projective_count(q: int, dim: int) -> int:
    return (q**dim - 1) // (q - 1)


def canonical_point(field: FieldSpec, row: Sequence[int]) -> tuple[int, ...]:
    lead = next((x for x in row if x), None)
    if lead is None:
        raise ValueError("zero vector has no projective point")
    inv = field.inv(lead)
    return tuple(field.mul(inv, x) for x in row)


# -- assignments and the feasibility check --------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """Rows each helper projects onto, per repairer, plus coordination coefficients.

    ``coord_to_a`` combines the symbols the ``b`` repairer collected (helper
    order) into the symbol it forwards to the ``a`` repairer; ``coord_to_b``
    is the reverse.
    """

    to_a: tuple[tuple[int, ...], ...]
    to_b: tuple[tuple[int, ...], ...]
    coord_to_a: tuple[int, ...]
    coord_to_b: tuple[int, ...]


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reason: str = ""
    details: dict = dc_field(default_factory=dict, compare=False)

    def __bool__(self):
        return self.feasible


def _combine(field: FieldSpec, coeffs: Sequence[int], rows: Sequence[Sequence[int]], width: int) -> list[int]:
    out = [0] * width
    for c, r in zip(coeffs, rows):
        if c:
            out = [field.add(x, field.mul(c, y)) for x, y in zip(out, r)]
    return out


def _sent_rows(inst: IAInstance, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    f = inst.field
    out = []
    for dev, x in zip(inst.helpers, rows):
        gen = inst.generator(dev)
        out.append(_combine(f, x, gen, inst.k * inst.alpha))
    return out


def _block_cols(rows, block: int, alpha: int):
    return [r[block * alpha : (block + 1) * alpha] for r in rows]


def evaluate_side(inst: IAInstance, received: Sequence[Sequence[int]], desired: int) -> Feasibility:
    """Alignment (each interfering block rank <= 1) then decodability of ``desired``."""
    f, a = inst.field, inst.alpha
    ranks = {}
    for block in range(inst.k):
        if block == desired:
            continue
        r = rank_of_rows(f, _block_cols(received, block, a))
        ranks[block] = r
        if r > 1:
            return Feasibility(False, f"alignment: block {block} interference has rank {r}", {"interference_ranks": ranks})
    other = [r[: desired * a] + r[(desired + 1) * a :] for r in received]
    total = rank_of_rows(f, received)
    gain = total - rank_of_rows(f, other)
    details = {"interference_ranks": ranks, "total_rank": total, "desired_rank": gain}
    if gain < a:
        return Feasibility(False, f"recovery: block {desired} recoverable rank {gain} < {a}", details)
    return Feasibility(True, "", details)


def _check_dims(inst: IAInstance, asg: Assignment):
    d, a = inst.d, inst.alpha
    if len(asg.to_a) != d or len(asg.to_b) != d:
        raise ValueError(f"assignment needs {d} helper rows per repairer")
    for r in itertools.chain(asg.to_a, asg.to_b):
        if len(r) != a:
            raise ValueError(f"helper rows must have length {a}")
    if len(asg.coord_to_a) != d or len(asg.coord_to_b) != d:
        raise ValueError(f"coordination coefficients must have length {d}")


def check_feasibility(inst: IAInstance, asg: Assignment) -> Feasibility:
    """Exact check of one assignment for the repair of devices 0 and 1 (t = 2)."""
    if inst.t != 2:
        raise ValueError("feasibility is defined here for coordinated pair repair (t=2)")
    _check_dims(inst, asg)
    width = inst.k * inst.alpha
    got_a = _sent_rows(inst, asg.to_a)
    got_b = _sent_rows(inst, asg.to_b)
    recv_a = got_a + [_combine(inst.field, asg.coord_to_a, got_b, width)]
    recv_b = got_b + [_combine(inst.field, asg.coord_to_b, got_a, width)]
    side_a = evaluate_side(inst, recv_a, 0)
    if not side_a:
        return Feasibility(False, "a-repairer " + side_a.reason, {"a": side_a.details})
    side_b = evaluate_side(inst, recv_b, 1)
    if not side_b:
        return Feasibility(False, "b-repairer " + side_b.reason, {"a": side_a.details, "b": side_b.details})
    return Feasibility(True, "", {"a": side_a.details, "b": side_b.details})


# -- forcing chain ------------------------------------------------------------------------


@dataclass(frozen=True)
class ForcedRows:
    """Rows implied by aligning the third block along ``g`` (unit scalars)."""

    g: tuple[int, ...]
    to_a: tuple[tuple[int, ...], ...]
    to_b: tuple[tuple[int, ...], ...]
    chain: dict


def enumerate_constraints(inst: IAInstance, g: Sequence[int]) -> Optional[ForcedRows]:
    """Forced helper rows for third-block direction ``g``; ``None`` when ``k = 2``.

    Redundancy helper ``i`` must send ``nu_i g C_i^-1`` to the ``a`` repairer
    and ``mu_i g C_i^-1`` to the ``b`` repairer.  Row spaces do not depend on
    the nonzero scalars, so they are fixed to one.  Extra systematic blocks
    (``k > 3``) are sent along the first redundancy helper's projection of
    that block, the only direction compatible with their alignment.
    """
    if inst.k < 3:
        return None
    f, a, k = inst.field, inst.alpha, inst.k
    g = tuple(g)
    if len(g) != a or not any(g):
        raise ValueError("g must be a nonzero row of length alpha")
    red = []
    for mats in inst.blocks:
        c_inv = mat_inverse(mats[2])
        red.append(tuple((Matrix.row(f, g) @ c_inv).rows[0]))
    sys_rows = []
    for block in range(2, k):
        if block == 2:
            sys_rows.append(g)
        else:
            proj = (Matrix.row(f, red[0]) @ inst.blocks[0][block]).rows[0]
            sys_rows.append(tuple(proj))
    rows = tuple(sys_rows) + tuple(red)

    projected_c = [(Matrix.row(f, v) @ m[2]).rows[0] for v, m in zip(red, inst.blocks)]
    chain = {
        # third-block interference at either repairer, g included
        "rank_vC_at_a": rank_of_rows(f, projected_c + [g]),
        "rank_vC_at_b": rank_of_rows(f, projected_c + [g]),
        "rank_vB_stack": rank_of_rows(f, [(Matrix.row(f, v) @ m[1]).rows[0] for v, m in zip(red, inst.blocks)]),
        "rank_vA_stack": rank_of_rows(f, [(Matrix.row(f, v) @ m[0]).rows[0] for v, m in zip(red, inst.blocks)]),
    }
    return ForcedRows(g, rows, rows, chain)


def _coordination_choices(field: FieldSpec, d: int) -> Iterator[tuple[int, ...]]:
    yield (0,) * d
    yield from projective_points(field, d)


def _search_side(inst: IAInstance, own: list[list[int]], other: list[list[int]], desired: int):
    """Try every coordination combination; returns (Feasibility, examined, coeffs)."""
    width = inst.k * inst.alpha
    collected = evaluate_side(inst, own, desired)
    if not collected and collected.reason.startswith("alignment"):
        # extra rows can only raise interference rank
        return collected, 0, None
    examined = 0
    last = collected
    for lam in _coordination_choices(inst.field, inst.d):
        examined += 1
        res = evaluate_side(inst, own + [_combine(inst.field, lam, other, width)], desired)
        if res:
            return res, examined, lam
        last = res
    return last, examined, None


@dataclass
class CandidateResult:
    index: int
    g: tuple[int, ...]
    feasible: bool
    a_reason: str
    b_reason: str
    examined: int
    chain: dict

    def record(self) -> dict:
        return {
            "index": self.index,
            "g": " ".join(map(str, self.g)),
            "feasible": self.feasible,
            "a_reason": self.a_reason,
            "b_reason": self.b_reason,
            "assignments_examined": self.examined,
            "rank_vC_at_a": self.chain.get("rank_vC_at_a", ""),
            "rank_vC_at_b": self.chain.get("rank_vC_at_b", ""),
            "rank_vB_stack": self.chain.get("rank_vB_stack", ""),
            "rank_vA_stack": self.chain.get("rank_vA_stack", ""),
        }


@dataclass
class SearchCertificate:
    instance: dict
    verdict: str  # "infeasible", "feasible", "out-of-scope", "undetermined"
    search_space: int
    examined: int
    feasible_count: int
    candidates: list[CandidateResult] = dc_field(default_factory=list)
    witness: Optional[Assignment] = None
    assumptions: tuple[str, ...] = ()

    def summary(self) -> str:
        inst = self.instance
        head = f"k={inst['k']} d={inst['d']} t={inst['t']} alpha={inst['alpha']} over {inst['field']}"
        if self.verdict == "out-of-scope":
            return f"{head}: OUT OF SCOPE (no coordinated pair repair; no impossibility claimed)"
        if self.verdict == "feasible":
            return f"{head}: FEASIBLE (witness assignment found)"
        return (
            f"{head}: {self.verdict.upper()} - {self.feasible_count} feasible / "
            f"{self.search_space} candidates, {self.examined} assignments examined"
        )

    def to_text(self) -> str:
        lines = ["# independent interference alignment certificate", self.summary()]
        if self.instance.get("label"):
            lines.append(f"instance: {self.instance['label']}")
        for a in self.assumptions:
            lines.append(f"assumes: {a}")
        for c in self.candidates:
            status = "feasible" if c.feasible else "infeasible"
            lines.append(f"candidate {c.index:>4} g=({', '.join(map(str, c.g))}) {status}; a: {c.a_reason or 'ok'}; b: {c.b_reason or 'ok'}")
        if self.witness is not None:
            lines.append("witness rows to a: " + json.dumps([list(r) for r in self.witness.to_a]))
            lines.append("witness rows to b: " + json.dumps([list(r) for r in self.witness.to_b]))
            lines.append("witness coordination to a: " + json.dumps(list(self.witness.coord_to_a)))
            lines.append("witness coordination to b: " + json.dumps(list(self.witness.coord_to_b)))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = list(CandidateResult(0, (), False, "", "", 0, {}).record())
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for c in self.candidates:
            w.writerow(c.record())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "verdict": self.verdict,
            "search_space": self.search_space,
            "examined": self.examined,
            "feasible_count": self.feasible_count,
            "assumptions": list(self.assumptions),
            "candidates": [c.record() for c in self.candidates],
            "witness": None
            if self.witness is None
            else {
                "to_a": [list(r) for r in self.witness.to_a],
                "to_b": [list(r) for r in self.witness.to_b],
                "coord_to_a": list(self.witness.coord_to_a),
                "coord_to_b": list(self.witness.coord_to_b),
            },
        }


FORCING_ASSUMPTIONS = (
    "every helper sends a nonzero projection (nu_i, mu_i != 0)",
    "the third block's device sends the same direction g to both repairers",
    "coordination symbols are arbitrary combinations of collected symbols (all enumerated)",
)


def _k2_witness(inst: IAInstance) -> Optional[Assignment]:
    """Alignment-based assignment for k=2: rows z B_i^-1 / y A_i^-1, solved coordination."""
    f, a = inst.field, inst.alpha
    z = (1,) * a
    from .repair import _twists

    for y in _twists(f, a):
        try:
            to_a = tuple(tuple((Matrix.row(f, z) @ mat_inverse(m[1])).rows[0]) for m in inst.blocks)
            to_b = tuple(tuple((Matrix.row(f, y) @ mat_inverse(m[0])).rows[0]) for m in inst.blocks)
            # b's desired parts must combine to z (a's interference direction), and vice versa
            b_desired = [(Matrix.row(f, r) @ m[1]).rows[0] for r, m in zip(to_b, inst.blocks)]
            a_desired = [(Matrix.row(f, r) @ m[0]).rows[0] for r, m in zip(to_a, inst.blocks)]
            lam = solve_any(f, Matrix(f, b_desired).transpose().rows, z)
            kap = solve_any(f, Matrix(f, a_desired).transpose().rows, y)
        except (SingularMatrix, InconsistentSystem):
            continue
        asg = Assignment(to_a, to_b, tuple(lam), tuple(kap))
        if check_feasibility(inst, asg):
            return asg
    return None


def exhaustive_search(inst: IAInstance, max_candidates: int = DEFAULT_MAX_CANDIDATES) -> SearchCertificate:
    """Enumerate every third-block direction and certify (in)feasibility."""
    desc = inst.describe()
    if inst.t < 2:
        return SearchCertificate(desc, "out-of-scope", 0, 0, 0, assumptions=("t < 2: no coordination step",))
    if inst.k == 2:
        witness = _k2_witness(inst)
        verdict = "feasible" if witness is not None else "undetermined"
        return SearchCertificate(desc, verdict, 0, 0, int(witness is not None), witness=witness)
    f, a = inst.field, inst.alpha
    space = projective_count(f.order, a)
    if space > max_candidates:
        raise SearchSpaceTooLarge(f"{space} candidate directions exceed the budget of {max_candidates}")
    results = []
    examined = 0
    witness = None
    for idx, g in enumerate(projective_points(f, a)):
        forced = enumerate_constraints(inst, g)
        got_a = _sent_rows(inst, forced.to_a)
        got_b = _sent_rows(inst, forced.to_b)
        res_a, n_a, lam = _search_side(inst, got_a, got_b, 0)
        res_b, n_b, kap = _search_side(inst, got_b, got_a, 1)
        examined += 1 + n_a + n_b
        ok = bool(res_a) and bool(res_b)
        results.append(CandidateResult(idx, tuple(g), ok, res_a.reason, res_b.reason, 1 + n_a + n_b, forced.chain))
        if ok and witness is None:
            witness = Assignment(forced.to_a, forced.to_b, lam, kap)
    feasible = sum(r.feasible for r in results)
    verdict = "infeasible" if feasible == 0 else "feasible"
    return SearchCertificate(desc, verdict, space, examined, feasible, results, witness, FORCING_ASSUMPTIONS)


def assignment_from_transcript(tr) -> Assignment:
    """The rows and coordination coefficients a pair-repair transcript actually used."""
    round_a, round_b = tr.collect
    to_a_coord, to_b_coord = tr.coordination
    return Assignment(
        tuple(c.row for c in round_a.contributions),
        tuple(c.row for c in round_b.contributions),
        tuple(to_a_coord.row),
        tuple(to_b_coord.row),
    )

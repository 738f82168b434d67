import itertools
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from mscr.code import CodeParams, build_code, change_of_variables
from mscr.field import FieldSpec
from mscr.linalg import rank_of_rows
from mscr.repair import (
    TARGET_A,
    TARGET_B,
    alignment_vector,
    format_transcript,
    naive_transfers,
    parse_transcript,
    recover,
    repair,
    repair_pair,
    repair_rows_for,
    repair_single,
    replay,
)

from conftest import blocks_of
from oracle import RefField, span_rank

GOLDEN = Path(__file__).parent / "golden"


def interference_rows(tr, which):
    """Interference coefficient rows seen by the ``which``-th repaired device."""
    rows = [c.interference for c in tr.collect[which].contributions]
    if tr.coordination:
        rows.append(tr.coordination[which].interference)
    return rows


def recovery_rows(tr, which):
    rows = [c.desired for c in tr.collect[which].contributions]
    if tr.coordination:
        rows.append(tr.coordination[which].desired)
    return [list(r) + [1] for r in rows]


# -- closed forms for the systematic pair -----------------------------------------------


@pytest.mark.parametrize("fixture", ["code7", "code256"])
def test_collect_rows_closed_form(fixture, request):
    code = request.getfixturevalue(fixture)
    f, alpha = code.field, code.alpha
    eq = change_of_variables(code, (0, 1))
    sigma = (1,) * alpha
    for i in range(code.n - 2):
        expect = tuple(f.pow(f.omega, -((i + j) % alpha)) for j in range(alpha))
        assert repair_rows_for(eq, 2 + i, TARGET_A, sigma) == expect
        assert repair_rows_for(eq, 2 + i, TARGET_B, sigma) == sigma


def test_collect_rows_gf7_values(code7):
    eq = change_of_variables(code7, (0, 1))
    # omega = 3, omega^-1 = 5, omega^-2 = 4
    assert repair_rows_for(eq, 2, TARGET_A, (1, 1, 1)) == (1, 5, 4)
    assert repair_rows_for(eq, 3, TARGET_A, (1, 1, 1)) == (5, 4, 1)


def test_collect_rows_scale_with_z(code7):
    eq = change_of_variables(code7, (0, 1))
    base = repair_rows_for(eq, 3, TARGET_A, (1, 1, 1))
    scaled = repair_rows_for(eq, 3, TARGET_A, (4, 4, 4))
    assert scaled == tuple(code7.field.mul(4, x) for x in base)


@pytest.mark.parametrize("fixture", ["code7", "code256"])
def test_coordination_rows_closed_form(fixture, request):
    code = request.getfixturevalue(fixture)
    f, alpha = code.field, code.alpha
    tr = repair_pair(code, blocks_of(code, [0] * code.params.M), (0, 1))
    to_a, to_b = tr.coordination
    neg = 0
    pos = 0
    for j in range(alpha):
        neg = f.add(neg, f.pow(f.omega, -j))
        pos = f.add(pos, f.pow(f.omega, j))
    # repairer of a sends (sum w^-j)^-1 sigma c_a; repairer of b sends (sum w^j)^-1 sigma c_b
    assert (to_b.sender, to_b.receiver) == (0, 1)
    assert to_b.row == (f.inv(neg),) * alpha
    assert to_a.row == (f.inv(pos),) * alpha


def test_coordination_rows_gf7_values(code7, data7):
    tr = repair_pair(code7, blocks_of(code7, data7), (0, 1))
    to_a, to_b = tr.coordination
    assert to_a.row == (6, 6, 6)  # (1 + 3 + 2)^-1 = 6^-1 = 6
    assert to_b.row == (5, 5, 5)  # (1 + 5 + 4)^-1 = 3^-1 = 5


def test_gf7_pair_recovery_and_aggregates(code7, data7):
    tr = repair_pair(code7, blocks_of(code7, data7), (0, 1))
    assert tr.recovered == {0: (1, 2, 3), 1: (4, 5, 6)}
    assert tr.aggregates[0] == 1  # sigma . b = 4 + 5 + 6 = 15 = 1 mod 7
    assert tr.aggregates[1] == 6  # sigma . a = 1 + 2 + 3
    assert tr.transfer_count == 8


def test_golden_pair_transcript(code7, data7):
    tr = repair_pair(code7, blocks_of(code7, data7), (0, 1))
    assert format_transcript(tr) == (GOLDEN / "gf7_pair_0_1.txt").read_text()


def test_golden_single_transcript(code7, data7):
    tr = repair_single(code7, blocks_of(code7, data7), 3)
    assert format_transcript(tr) == (GOLDEN / "gf7_single_3.txt").read_text()


# -- exhaustive exactness -----------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["code7", "code256"])
def test_every_pair_repairs_exactly(fixture, request):
    code = request.getfixturevalue(fixture)
    rng = random.Random(11)
    for _ in range(5):
        data = [rng.randrange(code.field.order) for _ in range(code.params.M)]
        blocks = blocks_of(code, data)
        for pair in itertools.permutations(range(code.n), 2):
            live = {i: s for i, s in blocks.items() if i not in pair}
            tr = repair_pair(code, live, pair)
            assert tr.recovered == {pair[0]: blocks[pair[0]], pair[1]: blocks[pair[1]]}
            assert tr.transfer_count == 2 * (code.params.d + 1)


def test_mixed_pair_devices_1_2(code7, data7):
    # one systematic and one redundancy device
    blocks = blocks_of(code7, data7)
    live = {i: s for i, s in blocks.items() if i not in (1, 2)}
    tr = repair_pair(code7, live, (1, 2))
    assert tr.recovered == {1: blocks[1], 2: blocks[2]}


@pytest.mark.parametrize("fixture", ["code7", "code256"])
def test_every_single_repairs_exactly_with_any_partner(fixture, request):
    code = request.getfixturevalue(fixture)
    rng = random.Random(12)
    data = [rng.randrange(code.field.order) for _ in range(code.params.M)]
    blocks = blocks_of(code, data)
    for f in range(code.n):
        live = [i for i in range(code.n) if i != f]
        tr = repair_single(code, {i: blocks[i] for i in live}, f)
        assert tr.recovered == {f: blocks[f]}
        assert tr.transfer_count == code.alpha + 1
        assert tr.coordination == ()
        for partner in live:
            helpers = (partner,) + tuple(i for i in live if i != partner)
            assert repair_single(code, blocks, f, helpers).recovered[f] == blocks[f]


def test_single_partner_sends_sigma_b(code7, data7):
    blocks = blocks_of(code7, data7)
    tr = repair_single(code7, blocks, 0)
    direct = tr.collect[0].contributions[-1]
    assert direct.helper == 1
    assert direct.row == (1, 1, 1)
    assert direct.symbol == 1  # 4 + 5 + 6 mod 7


def test_zero_data_zero_traffic(code7):
    blocks = blocks_of(code7, [0] * 6)
    for tr in (repair_single(code7, blocks, 2), repair_pair(code7, blocks, (0, 3))):
        assert all(t.symbol == 0 for t in tr.transfers())
        assert all(v == 0 for block in tr.recovered.values() for v in block)


def test_larger_codes_repair_exactly():
    for field, n, d in [(FieldSpec.default(), 7, 5), (FieldSpec.prime(7, 3), 7, 5), (FieldSpec.prime(13), 10, 8)]:
        code = build_code(CodeParams(n, d), field)
        rng = random.Random(n)
        data = [rng.randrange(field.order) for _ in range(code.params.M)]
        blocks = blocks_of(code, data)
        for pair in itertools.combinations(range(n), 2):
            assert repair_pair(code, blocks, pair).recovered == {p: blocks[p] for p in pair}


# -- alignment invariants ------------------------------------------------------------------


def test_alignment_ranks_against_span_oracle(code7, data7):
    ref = RefField(7)
    blocks = blocks_of(code7, data7)
    for pair in itertools.permutations(range(5), 2):
        tr = repair_pair(code7, blocks, pair)
        for which in (0, 1):
            assert span_rank(ref, interference_rows(tr, which)) == 1
            assert span_rank(ref, recovery_rows(tr, which)) == code7.alpha + 1


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 255), min_size=3, max_size=3),
    st.lists(st.integers(0, 255), min_size=6, max_size=6),
    st.sampled_from(list(itertools.permutations(range(5), 2))),
)
def test_alignment_invariant_random_z(z, data, pair):
    code = build_code(CodeParams(5, 3), FieldSpec.default(), validate="none")
    blocks = blocks_of(code, data)
    tr = repair_pair(code, blocks, pair, z=z)
    assert tr.recovered == {p: blocks[p] for p in pair}
    for which in (0, 1):
        assert rank_of_rows(code.field, interference_rows(tr, which)) == 1
        assert rank_of_rows(code.field, recovery_rows(tr, which)) == code.alpha + 1
    # the aggregate is the aligned interference z_a . b'
    f = code.field
    a_dev, b_dev = pair
    assert tr.aggregates[a_dev] == f.dot(tr.z, blocks[b_dev])
    assert tr.aggregates[b_dev] == f.dot(tr.z_b, blocks[a_dev])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=3, max_size=3), st.lists(st.integers(0, 6), min_size=6, max_size=6), st.integers(0, 4))
def test_single_repair_random_z(z, data, failed):
    code = build_code(CodeParams(5, 3), FieldSpec.prime(7, 3), validate="none")
    blocks = blocks_of(code, data)
    tr = repair_single(code, blocks, failed, z=z)
    assert tr.recovered[failed] == blocks[failed]


def test_recover_zero_system():
    f = FieldSpec.prime(7)
    rows = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    block, s = recover(f, rows, [0, 0, 0, 0])
    assert block == [0, 0, 0] and s == 0


# -- errors and bookkeeping ---------------------------------------------------------------


def test_alignment_vector_rules():
    f = FieldSpec.prime(7)
    assert alignment_vector(f, 3) == (1, 1, 1)
    with pytest.raises(ValueError):
        alignment_vector(f, 3, (1, 0, 1))
    with pytest.raises(ValueError):
        alignment_vector(f, 3, (1, 1))


def test_bad_requests(code7, data7):
    blocks = blocks_of(code7, data7)
    with pytest.raises(ValueError):
        repair(code7, blocks, [0, 1, 2])
    with pytest.raises(ValueError):
        repair_pair(code7, blocks, (0, 1), helpers=(1, 2, 3))
    with pytest.raises(ValueError):
        repair_pair(code7, blocks, (0, 1), helpers=(2, 3))
    with pytest.raises(ValueError):
        repair_pair(code7, blocks, (0, 0))


def test_naive_baseline(code7):
    assert naive_transfers(code7, 2) == 9  # k*alpha + alpha
    assert naive_transfers(code7, 1) == 6


def test_transcript_round_trip_and_replay(code256):
    rng = random.Random(4)
    blocks = blocks_of(code256, [rng.randrange(256) for _ in range(6)])
    tr = repair(code256, blocks, (2, 4))
    transfers = parse_transcript(format_transcript(tr))
    assert transfers == tr.transfers()
    assert replay(code256, blocks, transfers) == []
    forged = list(transfers)
    t0 = forged[0]
    forged[0] = type(t0)(t0.round, t0.sender, t0.receiver, t0.row, t0.symbol ^ 1)
    assert replay(code256, blocks, forged) == [0]

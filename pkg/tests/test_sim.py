import pytest

from mscr.code import CodeParams
from mscr.errors import ClusterError
from mscr.sim import (
    churn_test,
    cluster_create,
    decode_state,
    expected_transfers,
    fail_devices,
    format_events,
    parse_events,
    run_repair,
)


@pytest.fixture
def state(code7):
    return cluster_create(code7.params, code7.field, [1, 2, 3, 4, 5, 6], code=code7)


def test_create(state):
    assert len(state.blocks) == 5
    assert all(len(b.symbols) == 3 for b in state.blocks.values())
    assert [e["event"] for e in state.events] == ["encode"]


def test_create_rejects_empty(code7):
    with pytest.raises(ClusterError):
        cluster_create(code7.params, code7.field, [], code=code7)
    with pytest.raises(ClusterError):
        cluster_create(code7.params, code7.field, [1] * 7, code=code7)


def test_create_pads_short_data(code7):
    s = cluster_create(code7.params, code7.field, [1, 2], code=code7)
    assert s.data == (1, 2, 0, 0, 0, 0)


def test_fail_limits(state):
    fail_devices(state, [0, 1])
    assert state.failed == [0, 1]
    with pytest.raises(ClusterError):
        fail_devices(state, [2])
    with pytest.raises(ClusterError):
        fail_devices(state, [0])


def test_fail_three_at_once_rejected(state):
    with pytest.raises(ClusterError):
        fail_devices(state, [0, 1, 2])
    assert state.failed == []


def test_fail_unknown_device(state):
    with pytest.raises(ClusterError):
        fail_devices(state, [9])


def test_pair_repair_report(state):
    fail_devices(state, [0, 1])
    _, rep = run_repair(state)
    assert (rep.repair_transfers, rep.naive_transfers) == (8, 9)
    assert rep.savings_ratio == pytest.approx(8 / 9)
    assert state.violations() == []
    assert decode_state(state, (2, 4)) == [1, 2, 3, 4, 5, 6]


def test_single_repair_report(state):
    fail_devices(state, [3])
    _, rep = run_repair(state)
    assert rep.repair_transfers == 4
    assert state.violations() == []


def test_repair_nothing_is_noop(state):
    before = list(state.events)
    _, rep = run_repair(state)
    assert rep is None
    assert state.events == before


def test_churn_100_rounds(state):
    summary = churn_test(state, 100, seed=5)
    assert summary.ok
    assert summary.violations == 0 and summary.decode_failures == 0
    assert summary.pair_repairs + summary.single_repairs == 100
    assert summary.total_transfers == 8 * summary.pair_repairs + 4 * summary.single_repairs
    assert decode_state(state) == [1, 2, 3, 4, 5, 6]


def test_churn_is_deterministic(code7):
    def run():
        s = cluster_create(code7.params, code7.field, [6, 5, 4, 3, 2, 1], code=code7)
        return churn_test(s, 40, seed=8).to_dict(), format_events(s)

    assert run() == run()


def test_churn_zero_rounds(state):
    summary = churn_test(state, 0, seed=1)
    assert summary.total_transfers == 0 and summary.per_round == []


def test_event_log_accounting(state):
    churn_test(state, 30, seed=2)
    events = parse_events(format_events(state))
    assert events == state.events
    repairs = [e for e in events if e["event"] == "repair"]
    assert sum(e["transfers"] for e in repairs) == sum(tr.transfer_count for tr in state.transcripts)
    for e in repairs:
        assert e["transfers"] == expected_transfers(state.code, len(e["devices"]))


def test_gf256_cluster(code256):
    s = cluster_create(code256.params, code256.field, list(range(200, 206)), code=code256)
    assert churn_test(s, 50, seed=3).ok


def test_params_fixture_values():
    assert CodeParams(5, 3).M == 6

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import FLAGS, random_logic_tree, reference_eval, status_letter
from ktbt.bt import (
    FAILURE,
    RUNNING,
    SUCCESS,
    TT1,
    TT2,
    Action,
    ActionRegistry,
    Condition,
    Inverter,
    NodeStatus,
    Parallel,
    Selector,
    Sequence,
    StateManager,
    TreeStructureError,
    UnregisteredActionError,
    Wait,
    depth,
    reset,
    tick,
    walk,
)
from ktbt.stringbt import serialize


class Recorder:
    """Registry whose handlers log their calls and return scripted statuses."""

    def __init__(self, **statuses):
        self.calls = []
        self.reg = ActionRegistry()
        for tag, status in statuses.items():
            self.reg.register(tag, self._handler(tag, status))

    def _handler(self, tag, status):
        def run(sm, ctx):
            self.calls.append((tag, sm.tick_now))
            return status(sm.tick_now) if callable(status) else status
        return run


def run_ticks(node, n, reg=None, sm=None):
    sm = sm or StateManager()
    reg = reg or ActionRegistry()
    out = []
    for t in range(n):
        sm.tick_now = t
        out.append(tick(node, sm, reg))
    return out


def test_status_enum_has_three_variants():
    assert {s.name for s in NodeStatus} == {"SUCCESS", "FAILURE", "RUNNING"}


def test_selector_falls_back_to_action():
    rec = Recorder(X=SUCCESS)
    sm = StateManager(flags={"a": False})
    node = Selector([Condition("a"), Action("X")])
    assert tick(node, sm, rec.reg) is SUCCESS
    assert rec.calls == [("X", 0)]


def test_sequence_short_circuits():
    rec = Recorder(Y=SUCCESS)
    sm = StateManager(flags={"a": True, "b": False})
    node = Sequence([Condition("a"), Condition("b"), Action("Y")])
    assert tick(node, sm, rec.reg) is FAILURE
    assert rec.calls == []


def test_absent_flag_reads_false():
    sm = StateManager()
    assert tick(Condition("never_set"), sm, ActionRegistry()) is FAILURE
    assert tick(Condition("never_set", negated=True), sm, ActionRegistry()) is SUCCESS


def test_running_stops_sequence_and_selector():
    rec = Recorder(R=RUNNING, Z=SUCCESS)
    sm = StateManager()
    assert tick(Sequence([Action("R"), Action("Z")]), sm, rec.reg) is RUNNING
    assert tick(Selector([Action("R"), Action("Z")]), sm, rec.reg) is RUNNING
    assert [c[0] for c in rec.calls] == ["R", "R"]


def test_composites_are_memoryless():
    # a Running child is not resumed: the sequence restarts from the left
    rec = Recorder(A=SUCCESS, B=RUNNING)
    node = Sequence([Action("A"), Action("B")])
    run_ticks(node, 3, rec.reg)
    assert [c[0] for c in rec.calls] == ["A", "B"] * 3


@pytest.mark.parametrize(
    "statuses, expected",
    [
        ((SUCCESS, SUCCESS), SUCCESS),
        ((SUCCESS, FAILURE), FAILURE),
        ((RUNNING, FAILURE), RUNNING),
        ((FAILURE, RUNNING), RUNNING),
        ((SUCCESS, RUNNING), RUNNING),
    ],
)
def test_parallel_policy(statuses, expected):
    rec = Recorder(P=statuses[0], Q=statuses[1])
    node = Parallel([Action("P"), Action("Q")])
    assert tick(node, StateManager(), rec.reg) is expected
    assert [c[0] for c in rec.calls] == ["P", "Q"]


@pytest.mark.parametrize("child, expected", [(SUCCESS, FAILURE), (FAILURE, SUCCESS), (RUNNING, RUNNING)])
def test_inverter(child, expected):
    rec = Recorder(C=child)
    assert tick(Inverter(Action("C")), StateManager(), rec.reg) is expected


def test_action_returns_handler_status_verbatim():
    for status in NodeStatus:
        rec = Recorder(H=status)
        assert tick(Action("H"), StateManager(), rec.reg) is status


def test_unregistered_action_is_an_error():
    with pytest.raises(UnregisteredActionError) as err:
        tick(Selector([Condition("a"), Action("Missing")]), StateManager(), ActionRegistry())
    assert err.value.tag == "Missing"


def test_structure_validation():
    with pytest.raises(TreeStructureError):
        Sequence([])
    with pytest.raises(TreeStructureError):
        Condition("9bad")
    with pytest.raises(TreeStructureError):
        Action("")
    with pytest.raises(TreeStructureError):
        TT1(Action("A"), -1)
    with pytest.raises(TreeStructureError):
        ActionRegistry().register("has space", lambda sm, ctx: SUCCESS)


def test_wait_runs_then_succeeds_once():
    assert [status_letter(s) for s in run_ticks(Wait(3), 8)] == list("RRRSRRRS")


def test_wait_zero_succeeds_every_tick():
    assert run_ticks(Wait(0), 3) == [SUCCESS] * 3


def test_tt1_zero_delay_runs_child_first_tick():
    rec = Recorder(C=SUCCESS)
    assert run_ticks(TT1(Action("C"), 0), 1, rec.reg) == [SUCCESS]
    assert rec.calls == [("C", 0)]


def test_tt1_limit_three_trace():
    rec = Recorder(C=SUCCESS)
    statuses = run_ticks(TT1(Action("C"), 3), 4, rec.reg)
    assert [status_letter(s) for s in statuses] == list("FFFS")
    assert rec.calls == [("C", 3)]


def test_tt1_succeeds_even_when_child_fails():
    rec = Recorder(C=FAILURE)
    assert run_ticks(TT1(Action("C"), 1), 2, rec.reg)[-1] is SUCCESS
    assert len(rec.calls) == 1


@pytest.mark.parametrize("limit", [1, 2, 3, 7])
def test_tt1_period(limit):
    rec = Recorder(C=SUCCESS)
    k = 6
    run_ticks(TT1(Action("C"), limit), k * (limit + 1), rec.reg)
    assert len(rec.calls) == k
    assert [t for _, t in rec.calls] == [limit + i * (limit + 1) for i in range(k)]


def test_tt2_limit_zero_boundary():
    rec = Recorder(C=RUNNING)
    statuses = run_ticks(TT2(Action("C"), 0), 2, rec.reg)
    assert [status_letter(s) for s in statuses] == list("SF")
    assert rec.calls == [("C", 0)]


def test_tt2_limit_two_trace_and_rearm():
    rec = Recorder(C=RUNNING)
    statuses = run_ticks(TT2(Action("C"), 2), 8, rec.reg)
    assert [status_letter(s) for s in statuses] == list("SSSFSSSF")
    assert [t for _, t in rec.calls] == [0, 1, 2, 4, 5, 6]


def test_tt2_as_await_wrapper_keeps_ticking_child():
    # await sub-tree keeps being ticked for the whole wait window
    rec = Recorder(AwaitResponse=RUNNING)
    wrapper = Sequence([Condition("pending"), TT2(Action("AwaitResponse"), 100)])
    sm = StateManager(flags={"pending": True})
    statuses = run_ticks(wrapper, 102, rec.reg, sm)
    assert len(rec.calls) == 101
    assert statuses[:101] == [SUCCESS] * 101 and statuses[101] is FAILURE


def test_timers_measure_from_first_tick_not_from_zero():
    rec = Recorder(C=SUCCESS)
    node = TT1(Action("C"), 2)
    sm = StateManager()
    out = []
    for t in range(100, 104):
        sm.tick_now = t
        out.append(tick(node, sm, rec.reg))
    assert [status_letter(s) for s in out] == list("FFSF")


def test_reset_clears_timers_and_preserves_structure():
    tree = Sequence([TT1(Action("A"), 3), Selector([TT2(Wait(2), 1), Condition("c")])])
    before = serialize(tree)
    run_ticks(tree, 2, Recorder(A=SUCCESS).reg)
    assert any(getattr(n, "started", False) for n in walk(tree))
    assert reset(tree) is tree
    assert not any(getattr(n, "started", False) for n in walk(tree))
    assert serialize(tree) == before
    leaf = Condition("x", negated=True)
    assert reset(leaf) == Condition("x", negated=True)


def test_walk_and_depth():
    tree = Sequence([Condition("a"), Inverter(Selector([Action("B")]))])
    assert [type(n).__name__ for n in walk(tree)] == ["Sequence", "Condition", "Inverter", "Selector", "Action"]
    assert depth(tree) == 4


def test_determinism_of_handler_sequence():
    tree = Selector([Sequence([Condition("a"), Action("A")]), Parallel([Action("B"), Action("C")])])
    logs = []
    for _ in range(2):
        rec = Recorder(A=FAILURE, B=SUCCESS, C=RUNNING)
        sm = StateManager(flags={"a": True})
        statuses = run_ticks(tree, 3, rec.reg, sm)
        logs.append((statuses, rec.calls))
    assert logs[0] == logs[1]


def test_matches_reference_evaluator_exhaustively():
    rng = random.Random(1234)
    for _ in range(200):
        tree = random_logic_tree(rng, 4)
        for bits in itertools.product((False, True), repeat=len(FLAGS)):
            flags = dict(zip(FLAGS, bits))
            got = tick(tree, StateManager(flags=dict(flags)), ActionRegistry())
            assert status_letter(got) == reference_eval(tree, flags)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.lists(st.booleans(), min_size=5, max_size=5))
def test_priority_property(seed, bits):
    # no child right of the first non-Failure (Selector) / non-Success (Sequence) child is ticked
    rng = random.Random(seed)
    tags = [f"A{i}" for i in range(4)]
    results = {t: rng.choice([SUCCESS, FAILURE, RUNNING]) for t in tags}
    rec = Recorder(**results)
    kind = rng.choice([Selector, Sequence])
    node = kind([Action(t) for t in tags])
    tick(node, StateManager(), rec.reg)
    called = [c[0] for c in rec.calls]
    stop = SUCCESS if kind is Sequence else FAILURE
    expected = []
    for t in tags:
        expected.append(t)
        if results[t] is not stop:
            break
    assert called == expected

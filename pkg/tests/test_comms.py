import pytest

from ktbt.bt import StateManager
from ktbt.comms import Endpoint, Message, Medium
from ktbt.knowledge import KnowledgeBase
from ktbt.bt import Action
from ktbt.stringbt import StringBtError

RED = (("_targetRDetectedF", False),)


def ep(agent_id, x, y=0.0, kb=None):
    return Endpoint(agent_id, (x, y), StateManager(), kb)


def knows_red():
    return KnowledgeBase([(RED, Action("RetrieveRed"))])


def test_broadcast_counts_and_pending():
    m = Medium(200)
    m.broadcast(0, (0, 0), Message.query(0, RED, 0))
    assert m.stats.queries_sent == 1
    m.broadcast(1, (0, 0), Message.response(1, RED, "<Root><a>(X)", 0))
    assert m.stats.responses_sent == 1
    m.broadcast(2, (0, 0), Message.query(2, RED, 0))
    assert len(m.pending) == 3
    report = m.deliver([ep(0, 0), ep(1, 1), ep(2, 2)])
    assert len(report.recipients) == 3 and not m.pending


def test_response_payload_validated_at_send():
    with pytest.raises(StringBtError):
        Medium(1).broadcast(0, (0, 0), Message.response(0, RED, "<Root><sq>", 0))


@pytest.mark.parametrize("distance, delivered", [(150.0, True), (200.0, True), (250.0, False)])
def test_range_limit(distance, delivered):
    m = Medium(200)
    a, b = ep(0, 0.0), ep(1, distance, kb=knows_red())
    m.broadcast(0, a.position, Message.query(0, RED, 0))
    m.deliver([a, b])
    assert (len(b.sm.query_inbox) == 1) is delivered
    assert m.stats.queries_lost == (0 if delivered else 1)


def test_no_self_delivery():
    m = Medium(1000)
    a = ep(0, 0.0, kb=knows_red())
    m.broadcast(0, a.position, Message.query(0, RED, 0))
    report = m.deliver([a])
    assert not a.sm.query_inbox
    assert report.counts() == [0]
    assert m.stats.queries_lost == 1 and m.stats.queries_unheard == 1


def test_heard_only_by_ignorant_neighbour_is_lost():
    m = Medium(100)
    learner, ignorant, teacher = ep(0, 0.0), ep(1, 50.0, kb=KnowledgeBase()), ep(2, 500.0, kb=knows_red())
    m.broadcast(0, learner.position, Message.query(0, RED, 0))
    report = m.deliver([learner, ignorant, teacher])
    assert report.recipients[0][1] == (1,)
    assert len(ignorant.sm.query_inbox) == 1
    assert m.stats.queries_lost == 1 and m.stats.queries_unheard == 0


def test_sender_position_snapshot():
    m = Medium(100)
    a, b = ep(0, 0.0), ep(1, 90.0)
    m.broadcast(0, (0.0, 0.0), Message.query(0, RED, 0))
    a.position = (500.0, 0.0)  # sender moved after sending
    m.deliver([a, b])
    assert len(b.sm.query_inbox) == 1


def test_responses_go_to_response_inbox_in_fifo_order():
    m = Medium(100)
    a, b = ep(0, 0.0), ep(1, 10.0)
    first = Message.response(0, RED, "<Root><a>(X)", 0)
    second = Message.response(0, RED, "<Root><a>(Y)", 0)
    m.broadcast(0, a.position, first)
    m.broadcast(0, a.position, second)
    m.deliver([a, b])
    assert list(b.sm.response_inbox) == [first, second]
    assert not b.sm.query_inbox


def test_tuple_agents_accepted_and_counters_monotone():
    m = Medium(50)
    sm = StateManager()
    seen = []
    for t in range(5):
        m.broadcast(0, (0, 0), Message.query(0, RED, t))
        m.deliver([(0, (0, 0), StateManager()), (1, (10, 0), sm)])
        s = m.stats
        seen.append((s.queries_sent, s.queries_lost))
    assert seen == sorted(seen)
    assert len(sm.query_inbox) == 5


def test_negative_range_rejected():
    with pytest.raises(ValueError):
        Medium(-1)

"""Range-limited broadcast medium with one-tick delivery latency."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .stringbt import ConditionSequence, parse, serialize_sequence

QUERY = "query"
RESPONSE = "response"


@dataclass(frozen=True)
class Message:
    """A broadcast query or response.

    ``seq`` is the condition sequence a query asks about, or the one a
    response answers. Responses are broadcast too, so a learner uses ``seq``
    to ignore answers meant for someone else.
    """

    kind: str
    sender: Any
    sent_tick: int
    seq: ConditionSequence
    payload: str

    @classmethod
    def query(cls, sender, seq: ConditionSequence, tick: int) -> Message:
        return cls(QUERY, sender, tick, tuple(seq), serialize_sequence(seq))

    @classmethod
    def response(cls, sender, seq: ConditionSequence, payload: str, tick: int) -> Message:
        return cls(RESPONSE, sender, tick, tuple(seq), payload)


@dataclass
class CommStats:
    queries_sent: int = 0
    responses_sent: int = 0
    # query reached no agent holding the answer
    queries_lost: int = 0
    # query reached no agent at all
    queries_unheard: int = 0


@dataclass
class Endpoint:
    """What the medium needs to know about one agent at delivery time."""

    id: Any
    position: tuple[float, float]
    sm: Any
    kb: Any = None


@dataclass
class DeliveryReport:
    recipients: list[tuple[Message, tuple]] = field(default_factory=list)

    def counts(self) -> list[int]:
        return [len(r) for _, r in self.recipients]


class Medium:
    def __init__(self, d_coms: float):
        if d_coms < 0:
            raise ValueError("d_coms must be non-negative")
        self.d_coms = float(d_coms)
        self.pending: list[tuple[Message, tuple[float, float]]] = []
        self.stats = CommStats()

    def broadcast(self, sender_id, sender_pos, msg: Message) -> None:
        if msg.kind == QUERY:
            self.stats.queries_sent += 1
        elif msg.kind == RESPONSE:
            parse(msg.payload)
            self.stats.responses_sent += 1
        else:
            raise ValueError(f"unknown message kind {msg.kind!r}")
        self.pending.append((msg, (float(sender_pos[0]), float(sender_pos[1]))))

    def deliver(self, agents: Iterable) -> DeliveryReport:
        """Drain ``pending`` into the inboxes of in-range agents (sender excluded).

        ``agents`` holds :class:`Endpoint` objects or ``(id, position, sm[, kb])``
        tuples; ``kb`` (anything supporting ``seq in kb``) is only consulted for
        the lost-query count.
        """
        report = DeliveryReport()
        if not self.pending:
            return report
        endpoints = [a if isinstance(a, Endpoint) else Endpoint(*a) for a in agents]
        r2 = self.d_coms * self.d_coms
        pending, self.pending = self.pending, []
        for msg, (sx, sy) in pending:
            heard = []
            for ep in endpoints:
                if ep.id == msg.sender:
                    continue
                dx = ep.position[0] - sx
                dy = ep.position[1] - sy
                if dx * dx + dy * dy <= r2:
                    heard.append(ep)
            if msg.kind == QUERY:
                for ep in heard:
                    ep.sm.query_inbox.append(msg)
                if not heard:
                    self.stats.queries_unheard += 1
                if not any(ep.kb is not None and msg.seq in ep.kb for ep in heard):
                    self.stats.queries_lost += 1
            else:
                for ep in heard:
                    ep.sm.response_inbox.append(msg)
            report.recipients.append((msg, tuple(ep.id for ep in heard)))
        return report

"""Knowledge-transfer agents: control-tree layout, Teach and Learn.

An agent's full tree is ``Parallel(control, teach, learn)``. The teach and
learn sub-trees are small fixed trees whose actions call :func:`teach`,
:func:`learn_begin` and :func:`learn_complete`; the shared cool-down flag is
cleared by a TT1 pulse timer inside the teach tree.
"""
from __future__ import annotations

from enum import Enum
from typing import Any, Iterable

from .bt import (
    COOLDOWN_FLAG,
    FAILURE,
    RUNNING,
    SUCCESS,
    TT1,
    Action,
    ActionRegistry,
    Condition,
    Node,
    Parallel,
    Selector,
    Sequence,
    StateManager,
)
from .comms import QUERY, Message
from .stringbt import (
    ConditionSequence,
    StringBtError,
    as_sequence,
    find_knowledge,
    merge_knowledge,
    parse,
    serialize,
)

PENDING_FLAG = "_queryPendingF"
WAIT_FLAG = "_waitF"

DEFAULT_T1_LIMIT = 50
DEFAULT_T2_LIMIT = 100


def condition_sequence(items: Iterable) -> ConditionSequence:
    """Validated condition sequence: non-empty, no repeated (tag, negated) pair."""
    seq = as_sequence(items)
    if not seq:
        raise ValueError("a condition sequence must not be empty")
    if len(set(seq)) != len(seq):
        raise ValueError(f"duplicate condition in sequence {seq!r}")
    return seq


def knowledge_subtree(seq: Iterable, action: Node) -> Sequence:
    return Sequence([Condition(tag, neg) for tag, neg in condition_sequence(seq)] + [action])


class KnowledgeBase:
    """Ordered (sequence, action sub-tree) pairs; the L_ks / L_ka lists."""

    def __init__(self, entries: Iterable = ()):
        self.entries: list[tuple[ConditionSequence, Node]] = []
        self._index: dict[ConditionSequence, int] = {}
        for seq, action in entries:
            self.add(seq, action)

    def add(self, seq: Iterable, action: Node) -> bool:
        seq = condition_sequence(seq)
        if seq in self._index:
            return False
        self._index[seq] = len(self.entries)
        self.entries.append((seq, action))
        return True

    def index(self, seq: Iterable) -> int | None:
        return self._index.get(as_sequence(seq))

    def __contains__(self, seq) -> bool:
        return as_sequence(seq) in self._index

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def known_states(self) -> list[ConditionSequence]:
        return [s for s, _ in self.entries]

    @property
    def known_actions(self) -> list[Node]:
        return [a for _, a in self.entries]


def build_control(critical: list[Node], common: list[Node], prior: list[Node], fallback: Node) -> Selector:
    """Selector ordered critical, common, prior, (new knowledge slot), fallback."""
    if fallback is None:
        raise ValueError("a control tree needs a fallback sub-tree")
    return Selector(list(critical) + list(common) + list(prior) + [fallback])


class LearnOutcome(Enum):
    LEARNED = "learned"
    TIMED_OUT = "timed_out"
    STILL_WAITING = "still_waiting"
    IDLE = "idle"


def _teach_tree(t1_limit: int) -> Node:
    return Selector([
        Sequence([Condition(COOLDOWN_FLAG), TT1(Action("ClearCooldown"), t1_limit)]),
        Action("Teach"),
    ])


def _learn_tree() -> Node:
    return Selector([
        Sequence([Condition(PENDING_FLAG), Action("AwaitResponse")]),
        Sequence([Condition(COOLDOWN_FLAG, negated=True), Action("Query")]),
    ])


class KtAgent:
    """One agent: control tree, knowledge base, blackboard and protocol state.

    ``prior`` entries are placed both in the knowledge base and, as knowledge
    sub-trees, in the control tree. ``query_candidates`` lists the condition
    sequences the agent asks about when all their conditions hold and it does
    not know them. With ``transfer=False`` the agent runs its control tree only.
    """

    def __init__(
        self,
        agent_id,
        critical: list[Node],
        common: list[Node],
        fallback: Node,
        prior: Iterable = (),
        handlers: ActionRegistry | dict | None = None,
        query_candidates: Iterable = (),
        t1_limit: int = DEFAULT_T1_LIMIT,
        t2_limit: int = DEFAULT_T2_LIMIT,
        transfer: bool = True,
        sm: StateManager | None = None,
    ):
        self.id = agent_id
        self.kb = KnowledgeBase(prior)
        self.control = build_control(
            critical, common, [knowledge_subtree(s, a) for s, a in self.kb.entries], fallback
        )
        self.sm = sm if sm is not None else StateManager()
        self.t1_limit = t1_limit
        self.t2_limit = t2_limit
        self.transfer = transfer
        self.query_candidates = [condition_sequence(q) for q in query_candidates]
        self.pending_query: tuple[ConditionSequence, int] | None = None
        self.protocol_errors = 0
        self.learn_events: list[tuple[int, ConditionSequence, Any]] = []

        base = handlers.handlers if isinstance(handlers, ActionRegistry) else (handlers or {})
        self.registry = ActionRegistry(base)
        if transfer:
            self.registry.register("Teach", self._teach_action)
            self.registry.register("ClearCooldown", self._clear_cooldown_action)
            self.registry.register("AwaitResponse", self._await_action)
            self.registry.register("Query", self._query_action)
            self.tree: Node = Parallel([self.control, _teach_tree(t1_limit), _learn_tree()])
        else:
            self.tree = self.control

    # -- tree plumbing ------------------------------------------------------

    def tick(self, ctx: Any = None):
        return self.tree.tick(self.sm, self.registry, ctx)

    def _set_control(self, control: Node) -> None:
        self.control = control
        if self.transfer:
            self.tree.children[0] = control
        else:
            self.tree = control

    def _teach_action(self, sm, ctx):
        msg = teach(self)
        if msg is None:
            return FAILURE
        sm.outbox.append(msg)
        return SUCCESS

    def _clear_cooldown_action(self, sm, ctx):
        sm.cooldown_flag = False
        return SUCCESS

    def _await_action(self, sm, ctx):
        outcome = learn_complete(self)
        if outcome is LearnOutcome.LEARNED:
            return SUCCESS
        if outcome is LearnOutcome.STILL_WAITING:
            return RUNNING
        return FAILURE

    def _query_action(self, sm, ctx):
        flags = sm.flags
        for seq in self.query_candidates:
            if seq in self.kb._index:
                continue
            if all(bool(flags.get(tag, False)) is not neg for tag, neg in seq):
                msg = learn_begin(self, seq)
                if msg is not None:
                    sm.outbox.append(msg)
                    return SUCCESS
        return FAILURE

    def knows(self, seq) -> bool:
        return seq in self.kb


def teach(agent: KtAgent) -> Message | None:
    """Answer the oldest pending query if it is known.

    While the cool-down flag is up nothing is popped. Queries older than the
    agent's ``t2_limit`` are discarded unanswered since their sender has
    already given up.
    """
    sm = agent.sm
    if sm.cooldown_flag:
        return None
    inbox = sm.query_inbox
    now = sm.tick_now
    while inbox:
        msg = inbox.popleft()
        if not isinstance(msg, Message) or msg.kind != QUERY or not msg.seq:
            agent.protocol_errors += 1
            continue
        if now - msg.sent_tick > agent.t2_limit:
            continue
        i = agent.kb.index(msg.seq)
        if i is None:
            return None
        seq, action = agent.kb.entries[i]
        sm.cooldown_flag = True
        return Message.response(agent.id, seq, serialize(action), now)
    return None


def learn_begin(agent: KtAgent, s_q: Iterable) -> Message | None:
    seq = condition_sequence(s_q)
    sm = agent.sm
    if agent.pending_query is not None or sm.cooldown_flag or seq in agent.kb:
        return None
    agent.pending_query = (seq, sm.tick_now)
    sm.flags[PENDING_FLAG] = True
    sm.flags[WAIT_FLAG] = True
    return Message.query(agent.id, seq, sm.tick_now)


def _end_wait(agent: KtAgent) -> None:
    agent.pending_query = None
    agent.sm.flags[PENDING_FLAG] = False
    agent.sm.flags[WAIT_FLAG] = False


def learn_complete(agent: KtAgent) -> LearnOutcome:
    """Consume responses for the pending query; merge the first parseable one."""
    sm = agent.sm
    inbox = sm.response_inbox
    if agent.pending_query is None:
        inbox.clear()
        return LearnOutcome.IDLE
    seq, issued = agent.pending_query
    while inbox:
        msg = inbox.popleft()
        if msg.seq != seq:
            continue
        try:
            subtree = parse(msg.payload)
        except StringBtError:
            agent.protocol_errors += 1
            continue
        inbox.clear()
        agent.kb.add(seq, subtree)
        agent._set_control(merge_knowledge(agent.control, seq, subtree))
        if find_knowledge(agent.control, seq) is None:
            raise AssertionError(f"merged knowledge {seq!r} not reachable in control tree")
        agent.learn_events.append((sm.tick_now, seq, msg.sender))
        _end_wait(agent)
        return LearnOutcome.LEARNED
    if sm.tick_now - issued > agent.t2_limit:
        _end_wait(agent)
        sm.cooldown_flag = True
        return LearnOutcome.TIMED_OUT
    return LearnOutcome.STILL_WAITING

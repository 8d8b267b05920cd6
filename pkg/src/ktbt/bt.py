"""Behavior-tree nodes and the tick interpreter.

Composites are memoryless: every tick re-enters from the leftmost child.
Time is the integer ``StateManager.tick_now`` rather than wall-clock, so a
tree ticked against the same state always produces the same statuses.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterator

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

COOLDOWN_FLAG = "_coolDownF"


class NodeStatus(Enum):
    SUCCESS = "S"
    FAILURE = "F"
    RUNNING = "R"


SUCCESS = NodeStatus.SUCCESS
FAILURE = NodeStatus.FAILURE
RUNNING = NodeStatus.RUNNING


class TreeStructureError(ValueError):
    """A node violates the arity or tag rules of the tree grammar."""


class UnregisteredActionError(LookupError):
    """An Action was ticked whose tag has no handler."""

    def __init__(self, tag: str):
        super().__init__(f"no handler registered for action tag {tag!r}")
        self.tag = tag


@dataclass
class StateManager:
    """Per-agent blackboard.

    Absent flags read as false. The inboxes are FIFO deques; ``outbox`` is
    drained by the communication medium at the end of every world tick.
    """

    flags: dict[str, bool] = field(default_factory=dict)
    vectors: dict[str, tuple[float, float]] = field(default_factory=dict)
    query_inbox: deque = field(default_factory=deque)
    response_inbox: deque = field(default_factory=deque)
    outbox: list = field(default_factory=list)
    tick_now: int = 0
    cooldown_set_tick: int = 0

    def flag(self, name: str) -> bool:
        return self.flags.get(name, False)

    @property
    def cooldown_flag(self) -> bool:
        return self.flags.get(COOLDOWN_FLAG, False)

    @cooldown_flag.setter
    def cooldown_flag(self, value: bool) -> None:
        self.flags[COOLDOWN_FLAG] = value
        if value:
            self.cooldown_set_tick = self.tick_now


Handler = Callable[[StateManager, Any], NodeStatus]


class ActionRegistry:
    """Maps action tags to handlers ``handler(sm, ctx) -> NodeStatus``."""

    def __init__(self, handlers: dict[str, Handler] | None = None):
        self.handlers: dict[str, Handler] = dict(handlers or {})

    def register(self, tag: str, handler: Handler) -> None:
        if not IDENTIFIER.match(tag):
            raise TreeStructureError(f"malformed action tag {tag!r}")
        self.handlers[tag] = handler

    def __contains__(self, tag: str) -> bool:
        return tag in self.handlers

    def __getitem__(self, tag: str) -> Handler:
        try:
            return self.handlers[tag]
        except KeyError:
            raise UnregisteredActionError(tag) from None


class Node:
    """Base class of every tree node."""

    __slots__ = ()

    def tick(self, sm: StateManager, reg: ActionRegistry, ctx: Any = None) -> NodeStatus:
        raise NotImplementedError


def _check_children(node: Node, children: list) -> None:
    if not children:
        raise TreeStructureError(f"{type(node).__name__} requires at least one child")
    for child in children:
        if not isinstance(child, Node):
            raise TreeStructureError(f"child {child!r} is not a Node")


def _check_tag(tag: str) -> None:
    if not isinstance(tag, str) or not IDENTIFIER.match(tag):
        raise TreeStructureError(f"malformed identifier {tag!r}")


def _check_ticks(value: int, what: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise TreeStructureError(f"{what} must be a non-negative integer, got {value!r}")


@dataclass(eq=True)
class Sequence(Node):
    children: list[Node]

    def __post_init__(self):
        self.children = list(self.children)
        _check_children(self, self.children)

    def tick(self, sm, reg, ctx=None):
        for child in self.children:
            status = child.tick(sm, reg, ctx)
            if status is not SUCCESS:
                return status
        return SUCCESS


@dataclass(eq=True)
class Selector(Node):
    children: list[Node]

    def __post_init__(self):
        self.children = list(self.children)
        _check_children(self, self.children)

    def tick(self, sm, reg, ctx=None):
        for child in self.children:
            status = child.tick(sm, reg, ctx)
            if status is not FAILURE:
                return status
        return FAILURE


@dataclass(eq=True)
class Parallel(Node):
    children: list[Node]

    def __post_init__(self):
        self.children = list(self.children)
        _check_children(self, self.children)

    def tick(self, sm, reg, ctx=None):
        running = failed = False
        for child in self.children:
            status = child.tick(sm, reg, ctx)
            if status is RUNNING:
                running = True
            elif status is FAILURE:
                failed = True
        if running:
            return RUNNING
        return FAILURE if failed else SUCCESS


@dataclass(eq=True)
class Inverter(Node):
    child: Node

    def __post_init__(self):
        _check_children(self, [self.child])

    @property
    def children(self):
        return [self.child]

    def tick(self, sm, reg, ctx=None):
        status = self.child.tick(sm, reg, ctx)
        if status is SUCCESS:
            return FAILURE
        if status is FAILURE:
            return SUCCESS
        return status


@dataclass(eq=True)
class TT1(Node):
    """Pulse timer: runs the child once ``limit_ticks`` after first being ticked.

    Returns FAILURE while waiting and SUCCESS on the firing tick whatever the
    child returned, then re-arms.
    """

    child: Node
    limit_ticks: int
    started: bool = field(default=False, compare=False)
    start_tick: int = field(default=0, compare=False)

    def __post_init__(self):
        _check_children(self, [self.child])
        _check_ticks(self.limit_ticks, "TT1 limit")

    @property
    def children(self):
        return [self.child]

    def tick(self, sm, reg, ctx=None):
        now = sm.tick_now
        if not self.started:
            self.started = True
            self.start_tick = now
        if now - self.start_tick >= self.limit_ticks:
            self.child.tick(sm, reg, ctx)
            self.started = False
            return SUCCESS
        return FAILURE


@dataclass(eq=True)
class TT2(Node):
    """Run timer: ticks the child while at most ``limit_ticks`` have elapsed.

    Returns SUCCESS on every tick the child ran, then FAILURE once and re-arms.
    """

    child: Node
    limit_ticks: int
    started: bool = field(default=False, compare=False)
    start_tick: int = field(default=0, compare=False)

    def __post_init__(self):
        _check_children(self, [self.child])
        _check_ticks(self.limit_ticks, "TT2 limit")

    @property
    def children(self):
        return [self.child]

    def tick(self, sm, reg, ctx=None):
        now = sm.tick_now
        if not self.started:
            self.started = True
            self.start_tick = now
        if now - self.start_tick <= self.limit_ticks:
            self.child.tick(sm, reg, ctx)
            return SUCCESS
        self.started = False
        return FAILURE


@dataclass(eq=True)
class Condition(Node):
    tag: str
    negated: bool = False

    def __post_init__(self):
        _check_tag(self.tag)

    children = ()

    def tick(self, sm, reg, ctx=None):
        if sm.flags.get(self.tag, False):
            return FAILURE if self.negated else SUCCESS
        return SUCCESS if self.negated else FAILURE


@dataclass(eq=True)
class Action(Node):
    tag: str

    def __post_init__(self):
        _check_tag(self.tag)

    children = ()

    def tick(self, sm, reg, ctx=None):
        handler = reg.handlers.get(self.tag)
        if handler is None:
            raise UnregisteredActionError(self.tag)
        return handler(sm, ctx)


@dataclass(eq=True)
class Wait(Node):
    duration_ticks: int
    started: bool = field(default=False, compare=False)
    start_tick: int = field(default=0, compare=False)

    def __post_init__(self):
        _check_ticks(self.duration_ticks, "Wait duration")

    children = ()

    def tick(self, sm, reg, ctx=None):
        now = sm.tick_now
        if not self.started:
            self.started = True
            self.start_tick = now
        if now - self.start_tick >= self.duration_ticks:
            self.started = False
            return SUCCESS
        return RUNNING


TIMED = (TT1, TT2, Wait)


def tick(node: Node, sm: StateManager, reg: ActionRegistry, ctx: Any = None) -> NodeStatus:
    return node.tick(sm, reg, ctx)


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal, iterative so deep parsed trees are safe."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


def reset(node: Node) -> Node:
    """Clear every timer in ``node`` in place and return it."""
    for n in walk(node):
        if isinstance(n, TIMED):
            n.started = False
            n.start_tick = 0
    return node


def depth(node: Node) -> int:
    best = 0
    stack = [(node, 1)]
    while stack:
        current, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in current.children)
    return best


def action_tags(node: Node) -> set[str]:
    return {n.tag for n in walk(node) if isinstance(n, Action)}


def contains_subtree(tree: Node, sub: Node) -> bool:
    """True if some node of ``tree`` structurally equals ``sub``."""
    return any(n == sub for n in walk(tree))


def outline(node: Node) -> str:
    """Indented one-node-per-line rendering for humans."""
    lines = []
    stack = [(node, 0)]
    while stack:
        current, level = stack.pop()
        pad = "  " * level
        if isinstance(current, Condition):
            lines.append(f"{pad}Condition({'!' if current.negated else ''}{current.tag})")
        elif isinstance(current, Action):
            lines.append(f"{pad}Action({current.tag})")
        elif isinstance(current, Wait):
            lines.append(f"{pad}Wait({current.duration_ticks})")
        elif isinstance(current, (TT1, TT2)):
            lines.append(f"{pad}{type(current).__name__}({current.limit_ticks})")
        else:
            lines.append(f"{pad}{type(current).__name__}")
        stack.extend((c, level + 1) for c in reversed(current.children))
    return "\n".join(lines)

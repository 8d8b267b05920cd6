"""stringBT: the tagged-string wire format for behavior trees.

Grammar (whitespace between tokens is ignored)::

    document  := "<Root>" node
    node      := composite | decorator | leaf
    composite := ("<sq>" | "<sl>" | "<pl>") node+ "<e>"
    decorator := ("<inv>" | "<tt1>(" int ")" | "<tt2>(" int ")") node "<e>"
    leaf      := "<c>(" ["!"] ident ")" | "<a>(" ident ")" | "<w>(" int ")"

``<inv>``, ``<tt1>`` and ``<tt2>`` are local additions; everything else is
the original tag set. Canonical form has no whitespace at all, so two
canonical documents are equal iff their trees are.
"""
from __future__ import annotations

import copy
from typing import Iterable, Union

from .bt import (
    Action,
    Condition,
    Inverter,
    Node,
    Parallel,
    Selector,
    Sequence,
    TT1,
    TT2,
    TreeStructureError,
    Wait,
)

Cond = tuple[str, bool]
ConditionSequence = tuple[Cond, ...]

_OPENERS = {b"sq": Sequence, b"sl": Selector, b"pl": Parallel}
_DECORATORS = {b"inv", b"tt1", b"tt2"}
_LEAVES = {b"c", b"a", b"w"}
_WS = b" \t\r\n"
_IDENT_START = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_")
_IDENT_REST = _IDENT_START | frozenset(b"0123456789")
_DIGITS = frozenset(b"0123456789")
_MAX_TAG = 8
_MAX_DIGITS = 18


class StringBtError(ValueError):
    """Parse failure located at a byte offset of the input."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset
        self.message = message


class _Frame:
    __slots__ = ("kind", "arg", "children", "offset")

    def __init__(self, kind, arg, offset):
        self.kind = kind
        self.arg = arg
        self.children = []
        self.offset = offset


def _as_bytes(doc: Union[str, bytes, bytearray]) -> bytes:
    if isinstance(doc, str):
        return doc.encode("utf-8")
    return bytes(doc)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.n = len(data)

    def skip_ws(self) -> None:
        data, pos, n = self.data, self.pos, self.n
        while pos < n and data[pos] in _WS:
            pos += 1
        self.pos = pos

    def tag(self) -> tuple[bytes, int]:
        start = self.pos
        data = self.data
        if data[start] != 0x3C:  # '<'
            raise StringBtError(start, f"unexpected character {data[start:start + 1]!r}, expected a tag")
        end = data.find(b">", start + 1, start + 2 + _MAX_TAG)
        if end < 0:
            raise StringBtError(start, "malformed tag")
        self.pos = end + 1
        return data[start + 1:end], start

    def argument(self, what: str) -> tuple[bytes, int]:
        self.skip_ws()
        start = self.pos
        data = self.data
        if start >= self.n or data[start] != 0x28:  # '('
            raise StringBtError(start, f"expected '(' after {what}")
        end = data.find(b")", start + 1)
        if end < 0:
            raise StringBtError(start, f"unterminated argument of {what}")
        self.pos = end + 1
        return data[start + 1:end], start + 1


def _identifier(raw: bytes, offset: int) -> str:
    if not raw or raw[0] not in _IDENT_START or any(b not in _IDENT_REST for b in raw[1:]):
        raise StringBtError(offset, f"malformed identifier {raw[:40]!r}")
    return raw.decode("ascii")


def _integer(raw: bytes, offset: int) -> int:
    if not raw or any(b not in _DIGITS for b in raw):
        raise StringBtError(offset, f"malformed non-negative integer {raw[:40]!r}")
    if len(raw) > _MAX_DIGITS:
        raise StringBtError(offset, "integer argument too large")
    return int(raw)


def _leaf(kind: bytes, cur: _Cursor) -> Node:
    raw, off = cur.argument(f"<{kind.decode()}>")
    if kind == b"c":
        negated = raw.startswith(b"!")
        if negated:
            raw, off = raw[1:], off + 1
        return Condition(_identifier(raw, off), negated)
    if kind == b"a":
        return Action(_identifier(raw, off))
    return Wait(_integer(raw, off))


def _close(frame: _Frame, offset: int) -> Node:
    kind = frame.kind
    if not frame.children:
        raise StringBtError(frame.offset, f"empty <{kind.decode()}>")
    if kind in _OPENERS:
        return _OPENERS[kind](frame.children)
    if len(frame.children) != 1:
        raise StringBtError(offset, f"<{kind.decode()}> takes exactly one child, got {len(frame.children)}")
    child = frame.children[0]
    if kind == b"inv":
        return Inverter(child)
    if kind == b"tt1":
        return TT1(child, frame.arg)
    return TT2(child, frame.arg)


def parse(doc: Union[str, bytes, bytearray]) -> Node:
    """Parse a stringBT document into a tree.

    Raises :class:`StringBtError` (with a byte offset) on any malformed input;
    never raises anything else for ``str``/``bytes`` input.
    """
    cur = _Cursor(_as_bytes(doc))
    cur.skip_ws()
    if cur.pos >= cur.n:
        raise StringBtError(cur.pos, "empty document, expected <Root>")
    name, off = cur.tag()
    if name != b"Root":
        raise StringBtError(off, "document must start with <Root>")

    stack: list[_Frame] = []
    root: Node | None = None
    while True:
        cur.skip_ws()
        if cur.pos >= cur.n:
            break
        if root is not None:
            raise StringBtError(cur.pos, "trailing tokens after root closes")
        name, off = cur.tag()
        node: Node | None = None
        if name in _OPENERS:
            stack.append(_Frame(name, None, off))
        elif name in _DECORATORS:
            arg = None
            if name != b"inv":
                raw, aoff = cur.argument(f"<{name.decode()}>")
                arg = _integer(raw, aoff)
            stack.append(_Frame(name, arg, off))
        elif name in _LEAVES:
            node = _leaf(name, cur)
        elif name == b"e":
            if not stack:
                raise StringBtError(off, "unbalanced <e> with no open composite")
            node = _close(stack.pop(), off)
        elif name == b"Root":
            raise StringBtError(off, "nested <Root>")
        else:
            raise StringBtError(off, f"unknown tag <{name.decode('ascii', 'replace')}>")
        if node is not None:
            if stack:
                stack[-1].children.append(node)
            else:
                root = node
    if stack:
        raise StringBtError(cur.n, "unclosed composite at end of input")
    if root is None:
        raise StringBtError(cur.n, "empty document after <Root>")
    return root


def _leaf_token(node: Node) -> str:
    if isinstance(node, Condition):
        return f"<c>({'!' if node.negated else ''}{node.tag})"
    if isinstance(node, Action):
        return f"<a>({node.tag})"
    if isinstance(node, Wait):
        return f"<w>({node.duration_ticks})"
    raise TreeStructureError(f"cannot serialize {type(node).__name__}")


_OPEN_TOKEN = {Sequence: "<sq>", Selector: "<sl>", Parallel: "<pl>", Inverter: "<inv>"}


def serialize(tree: Node) -> str:
    """Canonical (whitespace-free) stringBT for ``tree``; timer state is not encoded."""
    out = ["<Root>"]
    stack: list = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        kind = type(item)
        if kind in _OPEN_TOKEN:
            out.append(_OPEN_TOKEN[kind])
        elif kind is TT1 or kind is TT2:
            out.append(f"<{kind.__name__.lower()}>({item.limit_ticks})")
        else:
            out.append(_leaf_token(item))
            continue
        stack.append("<e>")
        stack.extend(reversed(item.children))
    return "".join(out)


def canonical(doc: Union[str, bytes]) -> str:
    return serialize(parse(doc))


# -- condition sequences ----------------------------------------------------

def as_sequence(items: Iterable) -> ConditionSequence:
    """Normalise ``["a", "!b", ("c", True), Condition(...)]`` into a tuple of (tag, negated)."""
    seq = []
    for item in items:
        if isinstance(item, Condition):
            seq.append((item.tag, item.negated))
        elif isinstance(item, str):
            neg = item.startswith("!")
            seq.append((item[1:] if neg else item, neg))
        else:
            tag, neg = item
            seq.append((tag, bool(neg)))
    return tuple(seq)


def serialize_sequence(seq: Iterable) -> str:
    return "".join(f"<c>({'!' if neg else ''}{tag})" for tag, neg in as_sequence(seq))


def parse_sequence(text: Union[str, bytes]) -> ConditionSequence:
    """Parse a query payload: one or more ``<c>(..)`` tokens."""
    cur = _Cursor(_as_bytes(text))
    seq = []
    while True:
        cur.skip_ws()
        if cur.pos >= cur.n:
            break
        name, off = cur.tag()
        if name != b"c":
            raise StringBtError(off, "query payloads contain only <c> tokens")
        cond = _leaf(name, cur)
        seq.append((cond.tag, cond.negated))
    if not seq:
        raise StringBtError(0, "empty condition sequence")
    return tuple(seq)


# -- knowledge search and merge --------------------------------------------

def knowledge_key(child: Node) -> ConditionSequence | None:
    """Condition prefix of a knowledge sub-tree ``Sequence[c1..cM, action]``."""
    if type(child) is not Sequence or len(child.children) < 2:
        return None
    conds = child.children[:-1]
    if not all(type(c) is Condition for c in conds):
        return None
    return tuple((c.tag, c.negated) for c in conds)


def find_knowledge(control: Node, s_q: Iterable) -> Node | None:
    """Deep copy of the action sub-tree stored under exactly ``s_q``, or None."""
    key = as_sequence(s_q)
    if not isinstance(control, Selector):
        return None
    for child in control.children:
        if knowledge_key(child) == key:
            return copy.deepcopy(child.children[-1])
    return None


def merge_knowledge(control: Node, s_q: Iterable, t_ka: Node) -> Node:
    """Insert ``Sequence[s_q..., t_ka]`` just before the fallback (last) child.

    Returns ``control`` itself when ``s_q`` is already present, otherwise a new
    Selector sharing the existing child objects (their timers keep running).
    """
    if not isinstance(control, Selector):
        raise TreeStructureError("control tree must be a Selector ending in a fallback child")
    key = as_sequence(s_q)
    if not key:
        raise TreeStructureError("cannot merge knowledge under an empty condition sequence")
    if any(knowledge_key(c) == key for c in control.children):
        return control
    knowledge = Sequence([Condition(tag, neg) for tag, neg in key] + [copy.deepcopy(t_ka)])
    children = control.children
    return Selector(children[:-1] + [knowledge] + children[-1:])

"""Consecutive-ones ordering of a set family.

Maintains a PQ-tree: P-nodes permute their children freely, Q-nodes fix
the child sequence up to reversal, leaves are ground elements.  Each
constraint set is folded in by rebuilding the smallest subtree covering
it so the set's leaves stay consecutive in every order the tree still
represents.  The frontier of the final tree is a witnessing order.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

_LEAF, _P, _Q = 0, 1, 2

_EMPTY, _FULL, _PARTIAL = 0, 1, 2


class _Node:
    __slots__ = ("kind", "element", "children")

    def __init__(self, kind: int, element: int = -1, children: Optional[list] = None):
        self.kind = kind
        self.element = element
        self.children = children if children is not None else []


def _make_p(children: list[_Node]) -> _Node:
    if len(children) == 1:
        return children[0]
    return _Node(_P, children=children)


def _make_q(children: list[_Node]) -> _Node:
    if len(children) == 1:
        return children[0]
    if len(children) == 2:
        # a two-child sequence reversible in place is just an unordered pair
        return _Node(_P, children=children)
    return _Node(_Q, children=children)


def _leaves(node: _Node, out: list[int]) -> None:
    if node.kind == _LEAF:
        out.append(node.element)
        return
    for child in node.children:
        _leaves(child, out)


def _leafset(node: _Node) -> set[int]:
    out: list[int] = []
    _leaves(node, out)
    return set(out)


def _classify(node: _Node, wanted: frozenset) -> Optional[tuple[int, _Node]]:
    """Reduce `node` against the set, away from the pertinent root.

    Returns (EMPTY|FULL, node) when the subtree is untouched or wholly
    inside the set, or (PARTIAL, q) where q's children run from the
    empty side to the full side; None when no arrangement works.
    """
    if node.kind == _LEAF:
        return (_FULL if node.element in wanted else _EMPTY), node
    parts = []
    for child in node.children:
        result = _classify(child, wanted)
        if result is None:
            return None
        parts.append(result)
    if all(state == _EMPTY for state, _ in parts):
        return _EMPTY, node
    if all(state == _FULL for state, _ in parts):
        return _FULL, node
    if node.kind == _P:
        empties = [n for state, n in parts if state == _EMPTY]
        fulls = [n for state, n in parts if state == _FULL]
        partials = [n for state, n in parts if state == _PARTIAL]
        if len(partials) > 1:
            return None
        seq: list[_Node] = []
        if empties:
            seq.append(_make_p(empties))
        if partials:
            seq.extend(partials[0].children)
        if fulls:
            seq.append(_make_p(fulls))
        return _PARTIAL, _make_q(seq)
    for attempt in (parts, list(reversed(parts))):
        built = _splice_partial_sequence(attempt)
        if built is not None:
            return _PARTIAL, _make_q(built)
    return None


def _splice_partial_sequence(parts: list[tuple[int, _Node]]) -> Optional[list[_Node]]:
    """Children of a part-way-covered Q-node, empty side first, if the
    states read empties, at most one partial, then fulls."""
    seq: list[_Node] = []
    phase = _EMPTY
    for state, repl in parts:
        if state == _PARTIAL:
            if phase != _EMPTY:
                return None
            seq.extend(repl.children)
            phase = _FULL
        elif state == _FULL:
            phase = _FULL
            seq.append(repl)
        else:
            if phase != _EMPTY:
                return None
            seq.append(repl)
    return seq


def _reduce_at_root(node: _Node, wanted: frozenset) -> Optional[_Node]:
    """Rebuild the smallest subtree whose leaves cover the set."""
    if node.kind == _LEAF:
        return node
    hits = [
        i
        for i, child in enumerate(node.children)
        if _leafset(child) & wanted
    ]
    if len(hits) == 1:
        child = node.children[hits[0]]
        if wanted <= _leafset(child):
            reduced = _reduce_at_root(child, wanted)
            if reduced is None:
                return None
            node.children[hits[0]] = reduced
            return node

    parts = []
    for child in node.children:
        result = _classify(child, wanted)
        if result is None:
            return None
        parts.append(result)

    if node.kind == _P:
        empties = [n for state, n in parts if state == _EMPTY]
        fulls = [n for state, n in parts if state == _FULL]
        partials = [n for state, n in parts if state == _PARTIAL]
        if len(partials) > 2:
            return None
        if not partials:
            if not empties or len(fulls) <= 1:
                return node
            return _make_p(empties + [_make_p(fulls)])
        middle: list[_Node] = list(partials[0].children)
        if fulls:
            middle.append(_make_p(fulls))
        if len(partials) == 2:
            middle.extend(reversed(partials[1].children))
        pinned = _make_q(middle)
        if empties:
            return _make_p(empties + [pinned])
        return pinned

    seq: list[_Node] = []
    phase = 0  # leading empties, then fulls, then trailing empties
    for state, repl in parts:
        if state == _EMPTY:
            if phase == 1:
                phase = 2
            seq.append(repl)
        elif state == _FULL:
            if phase == 0:
                phase = 1
            if phase == 2:
                return None
            seq.append(repl)
        else:
            if phase == 0:
                seq.extend(repl.children)
                phase = 1
            elif phase == 1:
                seq.extend(reversed(repl.children))
                phase = 2
            else:
                return None
    return _make_q(seq)


def consecutive_ones_order(
    num_elements: int, sets: Iterable[Iterable[int]]
) -> Optional[list[int]]:
    """An ordering of range(num_elements) under which every given set is
    consecutive, or None when the family admits none."""
    if num_elements == 0:
        return []
    root = _Node(_P, children=[_Node(_LEAF, element=e) for e in range(num_elements)])
    seen: set[frozenset] = set()
    for raw in sets:
        wanted = frozenset(raw)
        if len(wanted) <= 1 or len(wanted) >= num_elements or wanted in seen:
            continue
        seen.add(wanted)
        reduced = _reduce_at_root(root, wanted)
        if reduced is None:
            return None
        root = reduced
    out: list[int] = []
    _leaves(root, out)
    return out


def is_consecutive(order: Sequence[int], members: Iterable[int]) -> bool:
    """Whether the members occupy adjacent positions under the order."""
    position = {e: i for i, e in enumerate(order)}
    spots = sorted(position[e] for e in members)
    if not spots:
        return True
    return spots[-1] - spots[0] + 1 == len(spots)

"""Petri nets: construction from process trees and token replay.

Every tree converts to a workflow net: one source place, one sink place,
every node on a path between them. Each subtree is built between an entry
and an exit place; parallel blocks fork and join through silent
transitions, loops are isolated behind silent enter/exit transitions so a
circulating token can never escape into the surrounding structure.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .discovery import Operator, ProcessTree

Marking = frozenset[tuple[str, int]]


@dataclass(frozen=True)
class Transition:
    tid: str
    label: str | None = None  # None = silent

    @property
    def is_silent(self) -> bool:
        return self.label is None


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[tuple[str, str], ...]
    initial_place: str
    final_place: str

    def transition_by_id(self) -> dict[str, Transition]:
        return {t.tid: t for t in self.transitions}


class _NetBuilder:
    def __init__(self) -> None:
        self.places: list[str] = []
        self.transitions: list[Transition] = []
        self.arcs: list[tuple[str, str]] = []

    def place(self) -> str:
        pid = f"p{len(self.places)}"
        self.places.append(pid)
        return pid

    def transition(self, label: str | None) -> str:
        tid = f"t{len(self.transitions)}"
        self.transitions.append(Transition(tid, label))
        return tid

    def connect(self, source: str, target: str) -> None:
        self.arcs.append((source, target))

    def subtree(self, node: ProcessTree, entry: str, exit_: str) -> None:
        if node.operator is None:
            tid = self.transition(node.label)
            self.connect(entry, tid)
            self.connect(tid, exit_)
        elif node.operator is Operator.SEQUENCE:
            current = entry
            for child in node.children[:-1]:
                nxt = self.place()
                self.subtree(child, current, nxt)
                current = nxt
            self.subtree(node.children[-1], current, exit_)
        elif node.operator is Operator.XOR:
            for child in node.children:
                self.subtree(child, entry, exit_)
        elif node.operator is Operator.PARALLEL:
            fork = self.transition(None)
            join = self.transition(None)
            self.connect(entry, fork)
            self.connect(join, exit_)
            for child in node.children:
                branch_in = self.place()
                branch_out = self.place()
                self.connect(fork, branch_in)
                self.connect(branch_out, join)
                self.subtree(child, branch_in, branch_out)
        elif node.operator is Operator.LOOP:
            do_place = self.place()
            done_place = self.place()
            enter = self.transition(None)
            leave = self.transition(None)
            self.connect(entry, enter)
            self.connect(enter, do_place)
            self.connect(done_place, leave)
            self.connect(leave, exit_)
            self.subtree(node.children[0], do_place, done_place)
            for redo in node.children[1:]:
                self.subtree(redo, done_place, do_place)
        else:  # pragma: no cover
            raise AssertionError(f"unhandled operator {node.operator!r}")


def tree_to_petri(tree: ProcessTree) -> PetriNet:
    """Convert a process tree to a workflow net; deterministic node ids."""
    builder = _NetBuilder()
    source = builder.place()
    sink = builder.place()
    builder.subtree(tree, source, sink)
    return PetriNet(
        places=tuple(builder.places),
        transitions=tuple(builder.transitions),
        arcs=tuple(builder.arcs),
        initial_place=source,
        final_place=sink,
    )


def is_workflow_net(net: PetriNet) -> bool:
    """One source place, one sink place, every node between them."""
    nodes = set(net.places) | {t.tid for t in net.transitions}
    if len(nodes) != len(net.places) + len(net.transitions):
        return False
    has_in = {target for _, target in net.arcs}
    has_out = {source for source, _ in net.arcs}
    if any(a not in nodes or b not in nodes for a, b in net.arcs):
        return False
    source_places = [p for p in net.places if p not in has_in]
    sink_places = [p for p in net.places if p not in has_out]
    if source_places != [net.initial_place] or sink_places != [net.final_place]:
        return False

    forward: dict[str, set[str]] = {n: set() for n in nodes}
    backward: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in net.arcs:
        forward[a].add(b)
        backward[b].add(a)

    def closure(start: str, adjacency: dict[str, set[str]]) -> set[str]:
        seen = {start}
        queue = [start]
        while queue:
            for nxt in adjacency[queue.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    reachable = closure(net.initial_place, forward)
    coreachable = closure(net.final_place, backward)
    return nodes <= reachable and nodes <= coreachable


def _marking(counter: Counter) -> Marking:
    return frozenset((place, count) for place, count in counter.items() if count > 0)


def can_replay(net: PetriNet, word: Sequence[str], *, state_cap: int = 1_000_000) -> bool:
    """Token game: can the net fire exactly ``word`` (plus silent moves)

    from the initial to the final marking? Breadth-first search over
    (marking, position) states; ``state_cap`` guards against unbounded
    nets.
    """
    inputs: dict[str, list[str]] = {t.tid: [] for t in net.transitions}
    outputs: dict[str, list[str]] = {t.tid: [] for t in net.transitions}
    transition_ids = set(inputs)
    for a, b in net.arcs:
        if a in transition_ids:
            outputs[a].append(b)
        else:
            inputs[b].append(a)

    def fire(marking: Marking, tid: str) -> Marking | None:
        counts = Counter(dict(marking))
        for place in inputs[tid]:
            if counts[place] <= 0:
                return None
            counts[place] -= 1
        for place in outputs[tid]:
            counts[place] += 1
        return _marking(counts)

    word = tuple(word)
    initial = _marking(Counter({net.initial_place: 1}))
    final = _marking(Counter({net.final_place: 1}))
    seen = {(initial, 0)}
    queue = [(initial, 0)]
    while queue:
        if len(seen) > state_cap:
            raise RuntimeError(f"replay state space exceeds {state_cap} states")
        marking, pos = queue.pop()
        if pos == len(word) and marking == final:
            return True
        for transition in net.transitions:
            if transition.is_silent:
                next_pos = pos
            elif pos < len(word) and transition.label == word[pos]:
                next_pos = pos + 1
            else:
                continue
            next_marking = fire(marking, transition.tid)
            if next_marking is None:
                continue
            state = (next_marking, next_pos)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return False

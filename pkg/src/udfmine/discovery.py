"""Process tree discovery over a directly-follows view.

Recursive cut detection: try exclusive choice, sequence, parallel and loop
cuts in that fixed order, project the view onto each part and recurse; if
no cut applies, fall back to the flower model (a loop admitting any
ordering of the remaining activities). Identical views always yield
structurally identical trees: parts are ordered by their smallest
activity, sequence parts by their topological position.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cmp_to_key
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .udfg import DFGView

Part = frozenset[str]
CutObserver = Callable[[str, "list[Part]", DFGView], None]


class Operator(Enum):
    SEQUENCE = "seq"
    XOR = "xor"
    PARALLEL = "and"
    LOOP = "loop"


@dataclass(frozen=True)
class ProcessTree:
    """Block-structured model: operator node, activity leaf, or silent leaf.

    A leaf has a label and no operator; a silent leaf has neither. Operator
    nodes carry at least two children; a loop executes its first child
    (the body), then repeats (redo child, body) any number of times.
    """

    operator: Operator | None = None
    label: str | None = None
    children: tuple[ProcessTree, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if self.operator is not None:
            if self.label is not None:
                raise ValueError("operator nodes cannot carry a label")
            if len(self.children) < 2:
                raise ValueError(
                    f"{self.operator.value} node needs at least two children"
                )
        elif self.children:
            raise ValueError("leaves cannot have children")

    @property
    def is_leaf(self) -> bool:
        return self.operator is None and self.label is not None

    @property
    def is_silent(self) -> bool:
        return self.operator is None and self.label is None

    def activity_set(self) -> frozenset[str]:
        if self.is_leaf:
            return frozenset((self.label,))
        labels: set[str] = set()
        for child in self.children:
            labels.update(child.activity_set())
        return frozenset(labels)


def leaf(activity: str) -> ProcessTree:
    return ProcessTree(label=activity)


def tau() -> ProcessTree:
    return ProcessTree()


def seq(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(operator=Operator.SEQUENCE, children=children)


def xor(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(operator=Operator.XOR, children=children)


def parallel(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(operator=Operator.PARALLEL, children=children)


def loop(body: ProcessTree, *redo: ProcessTree) -> ProcessTree:
    return ProcessTree(operator=Operator.LOOP, children=(body, *redo))


def _components(vertices: Iterable[str], undirected_pairs: Iterable[tuple[str, str]]) -> list[Part]:
    """Connected components, each returned sorted by smallest member."""
    parent = {v: v for v in vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in undirected_pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def _xor_cut(acts: frozenset[str], edges: frozenset[tuple[str, str]]) -> list[Part] | None:
    parts = _components(acts, edges)
    return parts if len(parts) >= 2 else None


def _strongly_connected_components(
    acts: frozenset[str], edges: frozenset[tuple[str, str]]
) -> list[frozenset[str]]:
    """Kosaraju's algorithm, iterative."""
    succ: dict[str, list[str]] = {a: [] for a in acts}
    pred: dict[str, list[str]] = {a: [] for a in acts}
    for a, b in sorted(edges):
        succ[a].append(b)
        pred[b].append(a)

    finished: list[str] = []
    seen: set[str] = set()
    for root in sorted(acts):
        if root in seen:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        seen.add(root)
        while stack:
            node, idx = stack[-1]
            if idx < len(succ[node]):
                stack[-1] = (node, idx + 1)
                child = succ[node][idx]
                if child not in seen:
                    seen.add(child)
                    stack.append((child, 0))
            else:
                stack.pop()
                finished.append(node)

    assigned: set[str] = set()
    components: list[frozenset[str]] = []
    for root in reversed(finished):
        if root in assigned:
            continue
        members = {root}
        assigned.add(root)
        queue = [root]
        while queue:
            node = queue.pop()
            for prev in pred[node]:
                if prev not in assigned:
                    assigned.add(prev)
                    members.add(prev)
                    queue.append(prev)
        components.append(frozenset(members))
    return components


def _sequence_cut(acts: frozenset[str], edges: frozenset[tuple[str, str]]) -> list[Part] | None:
    """Chain of parts: all edges point forward, unordered activities share a part."""
    sccs = _strongly_connected_components(acts, edges)
    comp_of = {a: i for i, scc in enumerate(sccs) for a in scc}
    n = len(sccs)
    succ: dict[int, set[int]] = {i: set() for i in range(n)}
    for a, b in edges:
        if comp_of[a] != comp_of[b]:
            succ[comp_of[a]].add(comp_of[b])

    reach = [0] * n
    remaining = set(range(n))
    while remaining:
        # Condensation is acyclic, so a node whose successors are all done exists.
        progressed = False
        for i in sorted(remaining):
            if all(j not in remaining for j in succ[i]):
                mask = 0
                for j in succ[i]:
                    mask |= (1 << j) | reach[j]
                reach[i] = mask
                remaining.remove(i)
                progressed = True
                break
        if not progressed:  # pragma: no cover - condensation cannot be cyclic
            raise AssertionError("cyclic condensation")

    def reaches(i: int, j: int) -> bool:
        return bool((reach[i] >> j) & 1)

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(n), 2):
        if not reaches(i, j) and not reaches(j, i):
            parent[find(i)] = find(j)

    groups: dict[int, set[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    if len(groups) < 2:
        return None

    parts: list[set[int]] = list(groups.values())

    def part_reaches(p: set[int], q: set[int]) -> bool:
        return any(reaches(i, j) for i in p for j in q)

    for p, q in combinations(parts, 2):
        forward, backward = part_reaches(p, q), part_reaches(q, p)
        if forward and backward:
            return None

    def compare(p: set[int], q: set[int]) -> int:
        return -1 if part_reaches(p, q) else 1

    parts.sort(key=cmp_to_key(compare))
    return [frozenset(a for i in part for a in sccs[i]) for part in parts]


def _parallel_cut(
    acts: frozenset[str],
    edges: frozenset[tuple[str, str]],
    starts: frozenset[str],
    ends: frozenset[str],
) -> list[Part] | None:
    """Finest partition whose cross pairs are connected in both directions."""
    negated = [
        (a, b)
        for a, b in combinations(sorted(acts), 2)
        if (a, b) not in edges or (b, a) not in edges
    ]
    parts = _components(acts, negated)
    if len(parts) < 2:
        return None
    if any(not (part & starts) or not (part & ends) for part in parts):
        return None
    return parts


def _loop_cut(
    acts: frozenset[str],
    edges: frozenset[tuple[str, str]],
    starts: frozenset[str],
    ends: frozenset[str],
) -> list[Part] | None:
    """Body holding all start/end activities, plus redo parts that re-enter it.

    A redo part may only be entered from end activities and may only leave
    into start activities; parts breaking that are folded into the body
    until the partition stabilizes.
    """
    body = set(starts) | set(ends)
    if not body or body >= acts:
        return None
    while True:
        outside = acts - body
        candidates = _components(
            outside, [(a, b) for a, b in edges if a in outside and b in outside]
        )
        redo_parts: list[Part] = []
        merged = False
        for part in candidates:
            incoming = [(x, c) for x, c in edges if c in part and x not in part]
            outgoing = [(c, y) for c, y in edges if c in part and y not in part]
            returns = (
                incoming
                and outgoing
                and all(x in ends for x, _ in incoming)
                and all(y in starts for _, y in outgoing)
            )
            if returns:
                redo_parts.append(part)
            else:
                body |= part
                merged = True
        if not merged:
            break
        if body >= acts:
            return None
    if not redo_parts:
        return None
    return [frozenset(body)] + sorted(redo_parts, key=min)


def _restrict_edges(
    edges: frozenset[tuple[str, str]], part: Part
) -> frozenset[tuple[str, str]]:
    return frozenset((a, b) for a, b in edges if a in part and b in part)


def _project_intersect(view: DFGView, part: Part) -> DFGView:
    return DFGView(
        activities=part,
        edges=_restrict_edges(view.edges, part),
        start_acts=view.start_acts & part,
        end_acts=view.end_acts & part,
    )


def _project_sequence(view: DFGView, parts: Sequence[Part], index: int) -> DFGView:
    part = parts[index]
    entering = {b for a, b in view.edges if b in part and a not in part}
    leaving = {a for a, b in view.edges if a in part and b not in part}
    return DFGView(
        activities=part,
        edges=_restrict_edges(view.edges, part),
        start_acts=(view.start_acts & part) | entering,
        end_acts=(view.end_acts & part) | leaving,
    )


def _sequence_part_skippable(view: DFGView, parts: Sequence[Part], index: int) -> bool:
    """A sequence part is optional when observed behavior can bypass it.

    That happens when an edge jumps from an earlier to a later part, when a
    trace may start in a later part, or when a trace may end in an earlier
    part.
    """
    position = {a: i for i, part in enumerate(parts) for a in part}
    for a, b in view.edges:
        if position[a] < index < position[b]:
            return True
    if any(position[a] > index for a in view.start_acts):
        return True
    if any(position[a] < index for a in view.end_acts):
        return True
    return False


def _project_loop_body(view: DFGView, body: Part) -> DFGView:
    # The loop body keeps the original start/end activities (all inside it).
    return DFGView(
        activities=body,
        edges=_restrict_edges(view.edges, body),
        start_acts=view.start_acts & body,
        end_acts=view.end_acts & body,
    )


def _project_loop_redo(view: DFGView, part: Part) -> DFGView:
    entering = {c for x, c in view.edges if c in part and x not in part}
    leaving = {c for c, y in view.edges if c in part and y not in part}
    return DFGView(
        activities=part,
        edges=_restrict_edges(view.edges, part),
        start_acts=frozenset(entering),
        end_acts=frozenset(leaving),
    )


def discover_tree(view: DFGView, on_cut: CutObserver | None = None) -> ProcessTree:
    """Mine a process tree from a directly-follows view.

    ``on_cut`` (when given) is invoked as ``on_cut(kind, parts, view)`` for
    every cut applied during recursion, which lets tests verify the cut
    post-conditions step by step.
    """
    acts = view.activities
    if not acts:
        return tau()
    if len(acts) == 1:
        activity = next(iter(acts))
        if (activity, activity) in view.edges:
            return loop(leaf(activity), tau())
        return leaf(activity)

    # Self-loops stay out of cut detection; they resurface in the
    # single-activity base case of the projected sub-views.
    plain = frozenset((a, b) for a, b in view.edges if a != b)

    parts = _xor_cut(acts, plain)
    if parts:
        if on_cut:
            on_cut("xor", parts, view)
        return xor(*(discover_tree(_project_intersect(view, p), on_cut) for p in parts))

    parts = _sequence_cut(acts, plain)
    if parts:
        if on_cut:
            on_cut("sequence", parts, view)
        children = []
        for i in range(len(parts)):
            child = discover_tree(_project_sequence(view, parts, i), on_cut)
            if _sequence_part_skippable(view, parts, i):
                child = xor(tau(), child)
            children.append(child)
        return seq(*children)

    parts = _parallel_cut(acts, plain, view.start_acts, view.end_acts)
    if parts:
        if on_cut:
            on_cut("parallel", parts, view)
        return parallel(
            *(discover_tree(_project_intersect(view, p), on_cut) for p in parts)
        )

    parts = _loop_cut(acts, plain, view.start_acts, view.end_acts)
    if parts:
        if on_cut:
            on_cut("loop", parts, view)
        body, *redos = parts
        children = [discover_tree(_project_loop_body(view, body), on_cut)]
        children.extend(discover_tree(_project_loop_redo(view, r), on_cut) for r in redos)
        return loop(*children)

    if on_cut:
        on_cut("flower", [frozenset(acts)], view)
    return loop(tau(), *(leaf(a) for a in sorted(acts)))


def tree_accepts(tree: ProcessTree, word: Sequence[str]) -> bool:
    """Language membership: can ``tree`` produce exactly this label sequence?"""
    target = tuple(word)
    memo: dict[tuple[ProcessTree, tuple[str, ...]], bool] = {}

    def accepts(node: ProcessTree, w: tuple[str, ...]) -> bool:
        key = (node, w)
        cached = memo.get(key)
        if cached is not None:
            return cached
        memo[key] = False  # break accidental cycles; overwritten below
        result = _accepts(node, w)
        memo[key] = result
        return result

    def _accepts(node: ProcessTree, w: tuple[str, ...]) -> bool:
        if node.is_silent:
            return w == ()
        if node.is_leaf:
            return w == (node.label,)
        if node.operator is Operator.XOR:
            return any(accepts(child, w) for child in node.children)
        if node.operator is Operator.SEQUENCE:
            positions = {0}
            for child in node.children:
                positions = {
                    j
                    for i in positions
                    for j in range(i, len(w) + 1)
                    if accepts(child, w[i:j])
                }
                if not positions:
                    return False
            return len(w) in positions
        if node.operator is Operator.PARALLEL:
            return _interleaves(list(node.children), w)
        if node.operator is Operator.LOOP:
            body, redos = node.children[0], node.children[1:]
            after_body = {
                j for j in range(len(w) + 1) if accepts(body, w[:j])
            }
            frontier = set(after_body)
            while frontier:
                fresh: set[int] = set()
                for i in frontier:
                    for redo in redos:
                        for j in range(i, len(w) + 1):
                            if not accepts(redo, w[i:j]):
                                continue
                            for k in range(j, len(w) + 1):
                                if k not in after_body and accepts(body, w[j:k]):
                                    fresh.add(k)
                after_body |= fresh
                frontier = fresh
            return len(w) in after_body
        raise AssertionError(f"unhandled node {node!r}")  # pragma: no cover

    def _interleaves(children: list[ProcessTree], w: tuple[str, ...]) -> bool:
        if len(children) == 1:
            return accepts(children[0], w)
        head, rest = children[0], children[1:]
        indices = range(len(w))
        for take in range(len(w) + 1):
            for chosen in combinations(indices, take):
                chosen_set = set(chosen)
                sub = tuple(w[i] for i in chosen)
                if not accepts(head, sub):
                    continue
                remainder = tuple(w[i] for i in indices if i not in chosen_set)
                if _interleaves(rest, remainder):
                    return True
        return False

    return accepts(tree, target)

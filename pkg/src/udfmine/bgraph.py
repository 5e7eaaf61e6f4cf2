"""Behavior graphs: the per-trace DAG of certain orderings.

Two events are connected when the first certainly ended before the second
started (``t_max(v) < t_min(w)``, strict). The graph is stored transitively
reduced, so an edge means the events may have happened one immediately
after the other. Reachability, bridges and the strong/weak sequential
relationship predicates are computed eagerly at build time; the resulting
object is immutable and safe for concurrent reads.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .model import UncertainEvent, UncertainTrace

Edge = tuple[Hashable, Hashable]


class GraphCycleError(ValueError):
    """Raised when an operation that needs a DAG receives a cyclic graph."""

    def __init__(self, cycle: Sequence[Hashable]):
        self.cycle = tuple(cycle)
        super().__init__("graph contains a cycle: " + " -> ".join(map(str, self.cycle)))


def _topological_order(vertices: list, successors: dict) -> list:
    indegree = {v: 0 for v in vertices}
    for v in vertices:
        for w in successors[v]:
            indegree[w] += 1
    queue = [v for v in vertices if indegree[v] == 0]
    order = []
    while queue:
        v = queue.pop()
        order.append(v)
        for w in successors[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                queue.append(w)
    if len(order) != len(vertices):
        ordered = set(order)
        remaining = {v for v in vertices if v not in ordered}
        raise GraphCycleError(_find_cycle(remaining, successors))
    return order


def _find_cycle(vertices: set, successors: dict) -> list:
    # Walk forward inside the cyclic core until a vertex repeats.
    start = next(iter(vertices))
    seen: dict = {}
    path = [start]
    seen[start] = 0
    while True:
        current = path[-1]
        nxt = next(w for w in successors[current] if w in vertices)
        if nxt in seen:
            return path[seen[nxt]:] + [nxt]
        seen[nxt] = len(path)
        path.append(nxt)


def transitive_reduction(
    vertices: Iterable[Hashable], edges: Iterable[Edge]
) -> set[Edge]:
    """Remove every edge implied by a longer path.

    The input must be acyclic (a GraphCycleError names a cycle otherwise).
    On a DAG the reduction is unique, preserves the reachability relation
    and is idempotent.
    """
    verts = list(dict.fromkeys(vertices))
    successors = {v: [] for v in verts}
    edge_set = set(edges)
    for v, w in edge_set:
        if v not in successors or w not in successors:
            raise ValueError(f"edge ({v!r}, {w!r}) has an endpoint outside the vertex set")
        successors[v].append(w)
    order = _topological_order(verts, successors)

    index = {v: i for i, v in enumerate(order)}
    # reach[v] = bitmask of vertices reachable from v (excluding v itself),
    # filled in reverse topological order.
    reach = [0] * len(order)
    for v in reversed(order):
        mask = 0
        for w in successors[v]:
            mask |= 1 << index[w]
            mask |= reach[index[w]]
        reach[index[v]] = mask

    reduced = set()
    for v, w in edge_set:
        # (v, w) is redundant iff w is reachable through some other successor.
        redundant = any(
            u != w and (reach[index[u]] >> index[w]) & 1 for u in successors[v]
        )
        if not redundant:
            reduced.add((v, w))
    return reduced


def undirected_bridges(
    vertices: Iterable[Hashable], edges: Iterable[Edge]
) -> set[Edge]:
    """Bridges of the undirected view of ``edges``, per connected component.

    An edge is a bridge when its removal disconnects the component that
    contains it. Directed edge pairs are returned as given. Iterative
    lowlink depth-first search, one pass per component.
    """
    verts = list(dict.fromkeys(vertices))
    edge_list = list(dict.fromkeys(edges))
    adjacency: dict = {v: [] for v in verts}
    for k, (v, w) in enumerate(edge_list):
        adjacency[v].append((w, k))
        adjacency[w].append((v, k))

    disc: dict = {}
    low: dict = {}
    bridges: set[Edge] = set()
    counter = 0
    for root in verts:
        if root in disc:
            continue
        # Stack entries: (vertex, incoming edge index, iterator over adjacency).
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, -1, iter(adjacency[root]))]
        while stack:
            v, in_edge, neighbors = stack[-1]
            advanced = False
            for w, k in neighbors:
                if k == in_edge:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, k, iter(adjacency[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        bridges.add(edge_list[in_edge])
    return bridges


class BehaviorGraph:
    """Transitively reduced DAG over the events of one uncertain trace.

    Build with :func:`build_behavior_graph`. Vertices are event ids; edges
    are ordered id pairs.
    """

    def __init__(self, trace: UncertainTrace):
        events = trace.events_by_id()
        if len(events) != len(trace.events):
            raise ValueError(f"trace {trace.case_id!r} has duplicate event ids")
        self.trace = trace
        self._events = events

        full_edges = {
            (v.event_id, w.event_id)
            for v in trace.events
            for w in trace.events
            if v.event_id != w.event_id and v.t_max < w.t_min
        }
        self.edges: frozenset[tuple[str, str]] = frozenset(
            transitive_reduction(events, full_edges)
        )

        # Descendant sets over the reduction (reachability is unchanged by
        # the reduction, so these answer queries about the full relation).
        successors: dict[str, list[str]] = {v: [] for v in events}
        for v, w in self.edges:
            successors[v].append(w)
        order = _topological_order(list(events), successors)
        descendants: dict[str, frozenset[str]] = {}
        for v in reversed(order):
            reached: set[str] = set()
            for w in successors[v]:
                reached.add(w)
                reached.update(descendants[w])
            descendants[v] = frozenset(reached)
        self._descendants = descendants

        self.bridge_edges: frozenset[tuple[str, str]] = frozenset(
            undirected_bridges(events, self.edges)
        )

    @property
    def event_ids(self) -> frozenset[str]:
        return frozenset(self._events)

    def event(self, event_id: str) -> UncertainEvent:
        try:
            return self._events[event_id]
        except KeyError:
            raise KeyError(f"unknown event id {event_id!r}") from None

    def reachable(self, v: str, w: str) -> bool:
        """True when some path leads from ``v`` to ``w``.

        Every vertex reaches itself via the trivial single-vertex path.
        """
        self.event(v), self.event(w)
        return v == w or w in self._descendants[v]

    def strong_seq(self, v: str, w: str) -> bool:
        """Both events determinate and joined by a bridge edge (v, w)."""
        if v == w:
            raise ValueError("sequential relationships are irreflexive")
        return (
            self.event(v).determinate
            and self.event(w).determinate
            and (v, w) in self.bridge_edges
        )

    def weak_seq(self, v: str, w: str) -> bool:
        """``w`` cannot precede ``v`` and nothing determinate sits between.

        The vertices strictly between v and w (on any v-to-w path) must all
        be indeterminate; mutually unreachable vertices qualify in both
        directions.
        """
        if v == w:
            raise ValueError("sequential relationships are irreflexive")
        self.event(v), self.event(w)
        if v in self._descendants[w]:
            return False
        if w not in self._descendants[v]:
            return True
        # On a DAG, a vertex lies on some v-to-w path iff it is both a
        # descendant of v and an ancestor of w.
        for u in self._descendants[v]:
            if u != w and w in self._descendants[u] and self.event(u).determinate:
                return False
        return True

    def sources(self) -> frozenset[str]:
        targets = {w for _, w in self.edges}
        return frozenset(v for v in self._events if v not in targets)

    def sinks(self) -> frozenset[str]:
        origins = {v for v, _ in self.edges}
        return frozenset(v for v in self._events if v not in origins)


def build_behavior_graph(trace: UncertainTrace) -> BehaviorGraph:
    """Build the behavior graph of ``trace``; unique per trace."""
    return BehaviorGraph(trace)

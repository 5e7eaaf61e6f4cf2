"""Uncertainty-aware directly-follows measures and the UDFG.

Activity frequencies and directly-follows frequencies each come as a
(min, max) pair: the min counts only what certainly happened, the max
everything that possibly happened. Directly-follows frequencies select a
largest repetition-free subset of candidate vertex pairs drawn from the
behavior graph; selection is a maximum matching.

Node and arc filters compare exact rationals, so threshold boundaries are
never subject to floating-point rounding.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Union

from .bgraph import BehaviorGraph, build_behavior_graph
from .model import ActivityLabel, UncertainLog, UncertainTrace

Pair = tuple[str, str]
ArcKey = tuple[ActivityLabel, ActivityLabel]
Ratio = Union[int, str, Fraction]


def act_freq_min(trace: UncertainTrace, a: ActivityLabel) -> int:
    """Events that certainly happened and can only be labeled ``a``."""
    return sum(
        1 for e in trace.events if e.determinate and e.has_singleton_label(a)
    )


def act_freq_max(trace: UncertainTrace, a: ActivityLabel) -> int:
    """Events that may be labeled ``a``."""
    return sum(1 for e in trace.events if a in e.activities)


def cand_min(graph: BehaviorGraph, a: ActivityLabel, b: ActivityLabel) -> frozenset[Pair]:
    """Vertex pairs that certainly realize "a directly followed by b".

    Both events must be determinate with singleton labels and joined by a
    bridge edge.
    """
    result = set()
    for v, w in graph.bridge_edges:
        if (
            graph.event(v).has_singleton_label(a)
            and graph.event(w).has_singleton_label(b)
            and graph.strong_seq(v, w)
        ):
            result.add((v, w))
    return frozenset(result)


def cand_max(graph: BehaviorGraph, a: ActivityLabel, b: ActivityLabel) -> frozenset[Pair]:
    """Vertex pairs that may realize "a directly followed by b"."""
    result = set()
    for v in graph.event_ids:
        if a not in graph.event(v).activities:
            continue
        for w in graph.event_ids:
            if w == v or b not in graph.event(w).activities:
                continue
            if graph.weak_seq(v, w):
                result.add((v, w))
    return frozenset(result)


def _bipartite_matching_size(pairs: Iterable[Pair]) -> int:
    """Maximum matching between first and second members, one use per side.

    Augmenting-path search (Kuhn's algorithm); the pair lists are small
    per-trace sets, so no Hopcroft-Karp machinery is needed.
    """
    adjacency: dict[str, list[str]] = {}
    for v, w in sorted(pairs):
        adjacency.setdefault(v, []).append(w)
    matched_right: dict[str, str] = {}

    def try_augment(left: str, banned: set[str]) -> bool:
        for right in adjacency[left]:
            if right in banned:
                continue
            banned.add(right)
            if right not in matched_right or try_augment(matched_right[right], banned):
                matched_right[right] = left
                return True
        return False

    size = 0
    for left in adjacency:
        if try_augment(left, set()):
            size += 1
    return size


def _disjoint_pairs_exact(pairs: list[Pair]) -> int:
    """Largest vertex-disjoint subset by branch and bound.

    Needed only when some vertex occurs both as a first and as a second
    member, which breaks the bipartite structure.
    """
    pairs = sorted(pairs)
    best = 0

    def recurse(i: int, used: set[str], chosen: int) -> None:
        nonlocal best
        if chosen + len(pairs) - i <= best:
            return
        if i == len(pairs):
            best = max(best, chosen)
            return
        v, w = pairs[i]
        if v not in used and w not in used:
            used.add(v)
            used.add(w)
            recurse(i + 1, used, chosen + 1)
            used.discard(v)
            used.discard(w)
        recurse(i + 1, used, chosen)

    recurse(0, set(), 0)
    return best


def max_disjoint_pairs(pairs: Iterable[Pair], same_activity: bool) -> int:
    """Size of a largest repetition-free subset of candidate pairs.

    ``same_activity`` switches the constraint: pairs for a repeated
    activity may reuse a vertex once per side, pairs for distinct
    activities may not share vertices at all.
    """
    pair_set = set(pairs)
    if not pair_set:
        return 0
    if same_activity:
        return _bipartite_matching_size(pair_set)
    firsts = {v for v, _ in pair_set}
    seconds = {w for _, w in pair_set}
    if firsts & seconds:
        return _disjoint_pairs_exact(list(pair_set))
    return _bipartite_matching_size(pair_set)


def df_freq_min(graph: BehaviorGraph, a: ActivityLabel, b: ActivityLabel) -> int:
    """Minimum directly-follows frequency of (a, b) in one trace."""
    return max_disjoint_pairs(cand_min(graph, a, b), same_activity=a == b)


def df_freq_max(graph: BehaviorGraph, a: ActivityLabel, b: ActivityLabel) -> int:
    """Maximum directly-follows frequency of (a, b) in one trace."""
    return max_disjoint_pairs(cand_max(graph, a, b), same_activity=a == b)


@dataclass(frozen=True)
class UDFG:
    """Log-level directly-follows graph annotated with (min, max) counts.

    ``nodes`` maps each activity to its summed activity frequencies,
    ``arcs`` each retained directly-follows pair to its summed frequencies.
    ``start_acts``/``end_acts`` count, per activity, the traces in which it
    can (max) or certainly does (min) label a source/sink vertex of the
    behavior graph.
    """

    nodes: Mapping[ActivityLabel, tuple[int, int]]
    arcs: Mapping[ArcKey, tuple[int, int]]
    start_acts: Mapping[ActivityLabel, tuple[int, int]]
    end_acts: Mapping[ActivityLabel, tuple[int, int]]


def _boundary_labels(
    graph: BehaviorGraph, boundary: frozenset[str]
) -> tuple[set[str], set[str]]:
    """Labels certainly/possibly carried by the given boundary vertices."""
    possible: set[str] = set()
    certain: set[str] = set()
    for event_id in boundary:
        event = graph.event(event_id)
        possible.update(event.activities)
        if event.determinate and len(event.activities) == 1:
            certain.add(next(iter(event.activities)))
    return certain, possible


def build_udfg(log: UncertainLog) -> UDFG:
    """Aggregate per-trace measures into the log-level UDFG.

    Per-trace work is pure, and the per-activity/per-arc sums form a
    commutative fold, so trace order never changes the result.
    """
    node_min: Counter = Counter()
    node_max: Counter = Counter()
    arc_min: Counter = Counter()
    arc_max: Counter = Counter()
    start_min: Counter = Counter()
    start_max: Counter = Counter()
    end_min: Counter = Counter()
    end_max: Counter = Counter()

    for trace in log.traces:
        graph = build_behavior_graph(trace)
        for event in trace.events:
            for a in event.activities:
                node_max[a] += 1
            if event.determinate and len(event.activities) == 1:
                node_min[next(iter(event.activities))] += 1

        min_cands: dict[ArcKey, set[Pair]] = {}
        for v, w in graph.bridge_edges:
            ev, ew = graph.event(v), graph.event(w)
            if (
                ev.determinate
                and ew.determinate
                and len(ev.activities) == 1
                and len(ew.activities) == 1
            ):
                key = (next(iter(ev.activities)), next(iter(ew.activities)))
                min_cands.setdefault(key, set()).add((v, w))
        max_cands: dict[ArcKey, set[Pair]] = {}
        for v in graph.event_ids:
            for w in graph.event_ids:
                if v == w or not graph.weak_seq(v, w):
                    continue
                for a, b in product(graph.event(v).activities, graph.event(w).activities):
                    max_cands.setdefault((a, b), set()).add((v, w))

        for key, cands in min_cands.items():
            arc_min[key] += max_disjoint_pairs(cands, same_activity=key[0] == key[1])
        for key, cands in max_cands.items():
            arc_max[key] += max_disjoint_pairs(cands, same_activity=key[0] == key[1])

        certain_start, possible_start = _boundary_labels(graph, graph.sources())
        certain_end, possible_end = _boundary_labels(graph, graph.sinks())
        start_min.update(certain_start)
        start_max.update(possible_start)
        end_min.update(certain_end)
        end_max.update(possible_end)

    nodes = {a: (node_min[a], node_max[a]) for a in node_max if node_max[a] > 0}
    arcs = {
        key: (arc_min[key], arc_max[key]) for key in arc_max if arc_max[key] > 0
    }
    start_acts = {a: (start_min[a], start_max[a]) for a in start_max}
    end_acts = {a: (end_min[a], end_max[a]) for a in end_max}
    return UDFG(nodes=nodes, arcs=arcs, start_acts=start_acts, end_acts=end_acts)


def _as_unit_fraction(value: Ratio, name: str) -> Fraction:
    if isinstance(value, float):
        raise TypeError(
            f"{name} must be an exact rational (int, Fraction or string like '0.6' "
            f"or '3/5'); floats would make threshold boundaries inexact"
        )
    try:
        fraction = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{name}: {exc}") from None
    if not 0 <= fraction <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {fraction}")
    return fraction


@dataclass(frozen=True)
class SliceParams:
    """The four filtering thresholds, all exact rationals in [0, 1]."""

    act_min: Fraction = Fraction(0)
    act_max: Fraction = Fraction(1)
    rel_min: Fraction = Fraction(0)
    rel_max: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        for name in ("act_min", "act_max", "rel_min", "rel_max"):
            object.__setattr__(self, name, _as_unit_fraction(getattr(self, name), name))
        if self.act_min > self.act_max:
            raise ValueError(
                f"inverted activity range: act_min {self.act_min} > act_max {self.act_max}"
            )
        if self.rel_min > self.rel_max:
            raise ValueError(
                f"inverted relationship range: rel_min {self.rel_min} > rel_max {self.rel_max}"
            )


@dataclass(frozen=True)
class DFGView:
    """Unweighted directly-follows graph handed to discovery."""

    activities: frozenset[ActivityLabel]
    edges: frozenset[ArcKey]
    start_acts: frozenset[ActivityLabel]
    end_acts: frozenset[ActivityLabel]

    def __post_init__(self) -> None:
        for field in ("activities", "edges", "start_acts", "end_acts"):
            object.__setattr__(self, field, frozenset(getattr(self, field)))
        dangling = {
            (a, b) for a, b in self.edges if a not in self.activities or b not in self.activities
        }
        if dangling:
            raise ValueError(f"edges with endpoints outside the activity set: {sorted(dangling)}")
        stray = (self.start_acts | self.end_acts) - self.activities
        if stray:
            raise ValueError(f"start/end activities outside the activity set: {sorted(stray)}")


def slice_udfg(udfg: UDFG, params: SliceParams) -> DFGView:
    """Filter the UDFG by the four thresholds.

    A node survives when min/max of its activity frequency lies in
    [act_min, act_max]; an arc when min/max of its directly-follows
    frequency lies in [rel_min, rel_max] and both endpoints survived.
    Boundaries are inclusive. Start/end activities are restricted to the
    surviving nodes.
    """
    kept_nodes = {
        a
        for a, (lo, hi) in udfg.nodes.items()
        if params.act_min <= Fraction(lo, hi) <= params.act_max
    }
    kept_arcs = {
        (a, b)
        for (a, b), (lo, hi) in udfg.arcs.items()
        if a in kept_nodes
        and b in kept_nodes
        and params.rel_min <= Fraction(lo, hi) <= params.rel_max
    }
    return DFGView(
        activities=frozenset(kept_nodes),
        edges=frozenset(kept_arcs),
        start_acts=frozenset(a for a in udfg.start_acts if a in kept_nodes),
        end_acts=frozenset(a for a in udfg.end_acts if a in kept_nodes),
    )


def mining_view(udfg: UDFG, params: SliceParams) -> DFGView:
    """Slice the UDFG and normalize the result for discovery.

    Two adjustments on top of :func:`slice_udfg`. First, an activity that
    had directly-follows arcs in the UDFG but lost all of them to the
    relationship filter is dropped: its remaining presence says nothing
    about ordering, and keeping it would re-insert filtered behavior as a
    free-floating alternative. Activities that never had arcs (e.g. from
    one-event traces) stay. Second, if filtering removed every recorded
    start (or end) activity, the sources (or sinks) of the sliced graph
    step in, and as a last resort every activity qualifies, so discovery
    always receives a usable view.
    """
    sliced = slice_udfg(udfg, params)
    had_arcs = {a for arc in udfg.arcs for a in arc}
    incident = {a for arc in sliced.edges for a in arc}
    activities = frozenset(
        a for a in sliced.activities if a in incident or a not in had_arcs
    )
    edges = frozenset(
        (a, b) for a, b in sliced.edges if a in activities and b in activities
    )

    def boundary(kept: frozenset[str], fallback: frozenset[str]) -> frozenset[str]:
        restricted = kept & activities
        if restricted:
            return restricted
        if fallback:
            return fallback
        return activities

    has_in = {b for a, b in edges if a != b}
    has_out = {a for a, b in edges if a != b}
    sources = frozenset(a for a in activities if a not in has_in)
    sinks = frozenset(a for a in activities if a not in has_out)
    return DFGView(
        activities=activities,
        edges=edges,
        start_acts=boundary(sliced.start_acts, sources),
        end_acts=boundary(sliced.end_acts, sinks),
    )

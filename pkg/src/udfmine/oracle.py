"""Brute-force ground truth for the uncertainty measures.

A realization of an uncertain trace fixes every free choice: it keeps all
determinate events and any subset of the indeterminate ones, picks one
label per kept event, and linearizes the certain-precedence partial order
(v before w whenever ``t_max(v) < t_min(w)``). Enumerating realizations is
exponential, so everything here is capped and meant for desk-scale
verification of the closed-form measures, never for production logs.

Realizations are identified at the (event id, label) level: two distinct
choices that happen to spell the same label sequence stay distinct.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .model import UncertainTrace

Realization = tuple[tuple[str, str], ...]

DEFAULT_REALIZATION_CAP = 10
DEFAULT_SELECTION_CAP = 20


class CapExceeded(ValueError):
    """Input too large for exhaustive enumeration; ``required`` says how large."""

    def __init__(self, what: str, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} needs cap >= {required}, enumeration capped at {cap}"
        )


def _linear_extensions(
    order: Sequence[str], precedes: dict[str, set[str]]
) -> list[tuple[str, ...]]:
    """All linearizations of the partial order, by repeated minimal choice."""
    if not order:
        return [()]
    remaining = set(order)
    extensions: list[tuple[str, ...]] = []
    prefix: list[str] = []

    def recurse() -> None:
        if not remaining:
            extensions.append(tuple(prefix))
            return
        for candidate in sorted(remaining):
            if any(candidate in precedes[other] for other in remaining if other != candidate):
                continue
            remaining.remove(candidate)
            prefix.append(candidate)
            recurse()
            prefix.pop()
            remaining.add(candidate)

    recurse()
    return extensions


def enumerate_realizations(
    trace: UncertainTrace, cap: int = DEFAULT_REALIZATION_CAP
) -> list[Realization]:
    """Every realization of ``trace``, as (event id, label) sequences.

    Refuses traces with more than ``cap`` events.
    """
    if len(trace.events) > cap:
        raise CapExceeded(
            f"trace {trace.case_id!r} with {len(trace.events)} events",
            len(trace.events),
            cap,
        )
    events = {e.event_id: e for e in trace.events}
    precedes = {
        v: {
            w
            for w in events
            if w != v and events[v].t_max < events[w].t_min
        }
        for v in events
    }
    indeterminate = sorted(e.event_id for e in trace.events if not e.determinate)
    determinate = [e.event_id for e in trace.events if e.determinate]

    realizations: list[Realization] = []
    for keep_mask in product((False, True), repeat=len(indeterminate)):
        kept = determinate + [
            eid for eid, keep in zip(indeterminate, keep_mask) if keep
        ]
        for extension in _linear_extensions(sorted(kept), precedes):
            label_choices = [sorted(events[eid].activities) for eid in extension]
            for labels in product(*label_choices):
                realizations.append(tuple(zip(extension, labels)))
    return realizations


def label_sequence(realization: Realization) -> tuple[str, ...]:
    return tuple(label for _, label in realization)


def classic_df_count(labels: Sequence[str], a: str, b: str) -> int:
    """How often ``a`` is immediately followed by ``b`` in a plain trace."""
    return sum(
        1 for i in range(len(labels) - 1) if labels[i] == a and labels[i + 1] == b
    )


def activity_bounds(
    trace: UncertainTrace, a: str, cap: int = DEFAULT_REALIZATION_CAP
) -> tuple[int, int]:
    """Extrema of the count of ``a`` over all realizations of ``trace``."""
    counts = [
        label_sequence(r).count(a) for r in enumerate_realizations(trace, cap)
    ]
    return min(counts), max(counts)


def df_bounds(
    trace: UncertainTrace, a: str, b: str, cap: int = DEFAULT_REALIZATION_CAP
) -> tuple[int, int]:
    """Extrema of the directly-follows count of (a, b) over all realizations."""
    counts = [
        classic_df_count(label_sequence(r), a, b)
        for r in enumerate_realizations(trace, cap)
    ]
    return min(counts), max(counts)


def exhaustive_selection(
    candidates: Iterable[tuple[str, str]],
    same_activity: bool,
    cap: int = DEFAULT_SELECTION_CAP,
) -> int:
    """Largest number of candidate pairs selectable without repetition.

    For distinct activities no vertex may appear twice at all; for a
    repeated activity a vertex may appear once as a first member and once
    as a second member. Plain include/exclude search over every subset.
    """
    pairs = sorted(set(candidates))
    if len(pairs) > cap:
        raise CapExceeded(f"candidate set of {len(pairs)} pairs", len(pairs), cap)

    best = 0

    def recurse(i: int, firsts: set[str], seconds: set[str], chosen: int) -> None:
        nonlocal best
        if i == len(pairs):
            best = max(best, chosen)
            return
        v, w = pairs[i]
        if same_activity:
            compatible = v not in firsts and w not in seconds
        else:
            used = firsts | seconds
            compatible = v not in used and w not in used
        if compatible:
            firsts.add(v)
            seconds.add(w)
            recurse(i + 1, firsts, seconds, chosen + 1)
            firsts.discard(v)
            seconds.discard(w)
        recurse(i + 1, firsts, seconds, chosen)

    recurse(0, set(), set(), 0)
    return best

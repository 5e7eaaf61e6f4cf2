"""Domain model for uncertain event logs.

An uncertain event carries a set of possible activity labels, an inclusive
timestamp interval and a determinacy flag (an indeterminate event was
recorded but may not have actually happened). Traces are unordered
collections of such events; any ordering is derived downstream from the
timestamp intervals.

All values are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Union

ActivityLabel = str

# A timestamp is any totally ordered scalar; externally either an integer
# tick or an ISO-8601 datetime. Comparison is exact, never epsilon-based.
Timestamp = Union[int, datetime]


@dataclass(frozen=True)
class UncertainEvent:
    """One recorded event.

    ``activities`` is the set of possible activity labels (exactly one of
    them actually occurred). ``t_min``/``t_max`` bound the moment the event
    happened; ``t_min == t_max`` encodes a precise timestamp. ``determinate``
    is True when the event certainly happened and False when it may not
    have happened at all.
    """

    event_id: str
    activities: frozenset[ActivityLabel]
    t_min: Timestamp
    t_max: Timestamp
    determinate: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "activities", frozenset(self.activities))

    def has_singleton_label(self, activity: ActivityLabel) -> bool:
        """True when this event can only be labeled ``activity``."""
        return self.activities == frozenset((activity,))


@dataclass(frozen=True)
class UncertainTrace:
    """All events recorded for one case.

    Events form a set; the tuple only fixes iteration order so that
    derived output is reproducible.
    """

    case_id: str
    events: tuple[UncertainEvent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.events)

    def events_by_id(self) -> dict[str, UncertainEvent]:
        return {e.event_id: e for e in self.events}


@dataclass(frozen=True)
class UncertainLog:
    """A collection of uncertain traces with globally unique event ids."""

    traces: tuple[UncertainTrace, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self) -> int:
        return len(self.traces)


@dataclass(frozen=True)
class Violation:
    """One broken invariant, pointing at the trace/event that breaks it."""

    rule: str
    case_id: str | None
    event_id: str | None
    detail: str

    def __str__(self) -> str:
        where = []
        if self.case_id is not None:
            where.append(f"case {self.case_id!r}")
        if self.event_id is not None:
            where.append(f"event {self.event_id!r}")
        prefix = ", ".join(where) or "log"
        return f"{prefix}: {self.rule}: {self.detail}"


def _check_interval(event: UncertainEvent) -> str | None:
    try:
        inverted = event.t_max < event.t_min
    except TypeError:
        return (
            f"timestamps {event.t_min!r} and {event.t_max!r} are not comparable"
        )
    if inverted:
        return f"t_min {event.t_min!r} is after t_max {event.t_max!r}"
    return None


def validate(log: UncertainLog) -> list[Violation]:
    """Report every invariant violation in ``log``.

    An empty report means the log is valid. Violations are data, not
    failures: the function never raises for bad event data, and it is pure,
    so repeated calls return identical reports.
    """
    violations: list[Violation] = []
    ids_seen_in: dict[str, str] = {}

    for trace in log.traces:
        if not trace.events:
            violations.append(
                Violation("empty-trace", trace.case_id, None, "trace has no events")
            )
        ids_in_trace: set[str] = set()
        duplicates_reported: set[str] = set()
        for event in trace.events:
            if not event.activities:
                violations.append(
                    Violation(
                        "empty-activities",
                        trace.case_id,
                        event.event_id,
                        "event has an empty activity label set",
                    )
                )
            interval_problem = _check_interval(event)
            if interval_problem is not None:
                violations.append(
                    Violation(
                        "interval-order",
                        trace.case_id,
                        event.event_id,
                        interval_problem,
                    )
                )
            if event.event_id in ids_in_trace:
                if event.event_id not in duplicates_reported:
                    violations.append(
                        Violation(
                            "duplicate-event-id",
                            trace.case_id,
                            event.event_id,
                            "event id occurs more than once in this trace",
                        )
                    )
                    duplicates_reported.add(event.event_id)
            else:
                ids_in_trace.add(event.event_id)
        for event_id in sorted(ids_in_trace):
            if event_id in ids_seen_in and ids_seen_in[event_id] != trace.case_id:
                violations.append(
                    Violation(
                        "duplicate-event-id",
                        trace.case_id,
                        event_id,
                        f"event id already used in case {ids_seen_in[event_id]!r}",
                    )
                )
            else:
                ids_seen_in.setdefault(event_id, trace.case_id)
    return violations


def activity_universe(log: UncertainLog) -> set[ActivityLabel]:
    """Union of all possible activity labels over all events of ``log``."""
    labels: set[ActivityLabel] = set()
    for trace in log.traces:
        for event in trace.events:
            labels.update(event.activities)
    return labels


def make_event(
    event_id: str,
    activities: Iterable[ActivityLabel],
    t_min: Timestamp,
    t_max: Timestamp | None = None,
    *,
    determinate: bool = True,
) -> UncertainEvent:
    """Convenience constructor; ``t_max`` defaults to ``t_min`` (precise)."""
    return UncertainEvent(
        event_id=event_id,
        activities=frozenset(activities),
        t_min=t_min,
        t_max=t_min if t_max is None else t_max,
        determinate=determinate,
    )

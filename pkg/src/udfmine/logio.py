"""Reading and writing uncertain event logs.

Two interchange formats:

* JSON (``.ulog.json``) — the canonical format. A document is an object
  ``{"traces": [...]}``; each trace is ``{"case_id": ..., "events": [...]}``
  and each event is ``{"id", "activities", "t_min", "t_max",
  "indeterminate"}``. Timestamps are ISO-8601 strings or non-negative
  integer ticks.

* Compact text (``.ulog.txt``) — one trace per line in the bracket
  notation, e.g. ``<[{a,c},{a,d}],?{a,b},[{a,b},{b,c}],b>``. A leading
  ``?`` marks an indeterminate event; square brackets group events whose
  timestamp intervals overlap. A line may end in ``^n`` to repeat the
  trace n times; ``#`` starts a comment.

Compact traces carry no explicit timestamps, so the parser synthesizes
them: the top-level entry at zero-based index i gets the precise tick 2i,
and every member of a bracket group at index i gets the interval
[2i, 2i+1]. Members of one group therefore pairwise overlap while events
of distinct entries stay strictly ordered.
"""

from __future__ import annotations

import json
import re
from datetime import datetime
from typing import Any

from .model import (
    Timestamp,
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    Violation,
    validate,
)

LABEL_RE = re.compile(r"[A-Za-z0-9_]+")


class LogFormatError(ValueError):
    """Base class for all ingestion failures."""


class LogSyntaxError(LogFormatError):
    """Malformed input text; ``position`` is a character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (offset {position})"
        super().__init__(message)


class LogSchemaError(LogFormatError):
    """Well-formed JSON that does not match the document schema."""

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class LogValidationError(LogFormatError):
    """Parsed log breaks a model invariant."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid log: {lines}")


def _parse_timestamp(value: Any, path: str) -> Timestamp:
    if isinstance(value, bool):
        raise LogSchemaError("timestamp must be an ISO-8601 string or integer tick", path)
    if isinstance(value, int):
        if value < 0:
            raise LogSchemaError("integer tick must be non-negative", path)
        return value
    if isinstance(value, str):
        try:
            return datetime.fromisoformat(value)
        except ValueError:
            raise LogSchemaError(f"not an ISO-8601 datetime: {value!r}", path) from None
    raise LogSchemaError("timestamp must be an ISO-8601 string or integer tick", path)


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise LogSchemaError(f"missing required field {key!r}", path)
    return obj[key]


def _parse_event(obj: Any, trace_index: int, event_index: int) -> UncertainEvent:
    path = f"traces[{trace_index}].events[{event_index}]"
    if not isinstance(obj, dict):
        raise LogSchemaError("event must be an object", path)

    event_id = obj.get("id", f"t{trace_index}_e{event_index}")
    if not isinstance(event_id, str) or not event_id:
        raise LogSchemaError("id must be a non-empty string", f"{path}.id")

    activities = _require(obj, "activities", path)
    if not isinstance(activities, list) or not activities:
        raise LogSchemaError("activities must be a non-empty list", f"{path}.activities")
    seen: set[str] = set()
    for k, label in enumerate(activities):
        if not isinstance(label, str) or not label:
            raise LogSchemaError(
                "activity labels must be non-empty strings", f"{path}.activities[{k}]"
            )
        if label in seen:
            raise LogSchemaError(
                f"duplicate activity label {label!r}", f"{path}.activities[{k}]"
            )
        seen.add(label)

    t_min = _parse_timestamp(_require(obj, "t_min", path), f"{path}.t_min")
    t_max = _parse_timestamp(_require(obj, "t_max", path), f"{path}.t_max")

    indeterminate = obj.get("indeterminate", False)
    if not isinstance(indeterminate, bool):
        raise LogSchemaError("indeterminate must be a boolean", f"{path}.indeterminate")

    return UncertainEvent(
        event_id=event_id,
        activities=frozenset(seen),
        t_min=t_min,
        t_max=t_max,
        determinate=not indeterminate,
    )


def parse_json(text: str, *, check: bool = True) -> UncertainLog:
    """Parse a JSON log document.

    Raises LogSyntaxError for malformed JSON, LogSchemaError for a
    well-formed document that violates the schema, and (when ``check`` is
    on) LogValidationError if the resulting log breaks a model invariant.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LogSyntaxError(
            f"line {exc.lineno} column {exc.colno}: {exc.msg}", exc.pos
        ) from None

    if not isinstance(doc, dict):
        raise LogSchemaError("document root must be an object", "$")
    traces_obj = _require(doc, "traces", "$")
    if not isinstance(traces_obj, list):
        raise LogSchemaError("traces must be a list", "$.traces")

    traces = []
    for i, trace_obj in enumerate(traces_obj):
        path = f"traces[{i}]"
        if not isinstance(trace_obj, dict):
            raise LogSchemaError("trace must be an object", path)
        case_id = _require(trace_obj, "case_id", path)
        if not isinstance(case_id, str) or not case_id:
            raise LogSchemaError("case_id must be a non-empty string", f"{path}.case_id")
        events_obj = _require(trace_obj, "events", path)
        if not isinstance(events_obj, list):
            raise LogSchemaError("events must be a list", f"{path}.events")
        events = tuple(
            _parse_event(event_obj, i, j) for j, event_obj in enumerate(events_obj)
        )
        traces.append(UncertainTrace(case_id=case_id, events=events))

    log = UncertainLog(traces=tuple(traces))
    if check:
        violations = validate(log)
        if violations:
            raise LogValidationError(violations)
    return log


class _CompactScanner:
    """Single-pass scanner for the bracket trace notation."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = self.peek() or "end of input"
            raise LogSyntaxError(f"expected {char!r}, found {found!r}", self.pos)
        self.pos += 1

    def label(self) -> str:
        self.skip_ws()
        match = LABEL_RE.match(self.text, self.pos)
        if match is None:
            found = self.peek() or "end of input"
            raise LogSyntaxError(f"expected an activity label, found {found!r}", self.pos)
        self.pos = match.end()
        return match.group()

    def label_set(self) -> frozenset[str]:
        if self.peek() == "{":
            self.pos += 1
            labels = {self.label()}
            while self.peek() == ",":
                self.pos += 1
                labels.add(self.label())
            self.expect("}")
            return frozenset(labels)
        return frozenset((self.label(),))

    def uevent(self) -> tuple[frozenset[str], bool]:
        indeterminate = False
        if self.peek() == "?":
            self.pos += 1
            indeterminate = True
        return self.label_set(), indeterminate

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def parse_compact(text: str, case_id: str, *, id_prefix: str = "") -> UncertainTrace:
    """Parse one trace in compact notation.

    Event ids are ``e1``, ``e2``, ... in textual order, prefixed with
    ``id_prefix`` (used by :func:`parse_compact_log` to keep ids globally
    unique).
    """
    scanner = _CompactScanner(text)
    scanner.expect("<")
    events: list[UncertainEvent] = []

    def add_event(labels: frozenset[str], indeterminate: bool, t_min: int, t_max: int) -> None:
        events.append(
            UncertainEvent(
                event_id=f"{id_prefix}e{len(events) + 1}",
                activities=labels,
                t_min=t_min,
                t_max=t_max,
                determinate=not indeterminate,
            )
        )

    index = 0
    while True:
        if scanner.peek() == "[":
            scanner.pos += 1
            labels, indet = scanner.uevent()
            add_event(labels, indet, 2 * index, 2 * index + 1)
            while scanner.peek() == ",":
                scanner.pos += 1
                labels, indet = scanner.uevent()
                add_event(labels, indet, 2 * index, 2 * index + 1)
            scanner.expect("]")
        else:
            labels, indet = scanner.uevent()
            add_event(labels, indet, 2 * index, 2 * index)
        index += 1
        if scanner.peek() != ",":
            break
        scanner.pos += 1
    scanner.expect(">")
    if not scanner.at_end():
        raise LogSyntaxError(
            f"unexpected trailing input {scanner.peek()!r}", scanner.pos
        )
    return UncertainTrace(case_id=case_id, events=tuple(events))


def parse_compact_log(text: str, *, check: bool = True) -> UncertainLog:
    """Parse a compact log: one trace per line, ``#`` comments, ``^n`` counts.

    ``<...>^80`` replicates the trace 80 times with fresh case and event
    ids. Case ids are ``c1``, ``c2``, ... in emission order.
    """
    traces: list[UncertainTrace] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        count = 1
        if "^" in line:
            body, _, suffix = line.rpartition("^")
            suffix = suffix.strip()
            if not suffix.isdigit() or int(suffix) < 1:
                raise LogSyntaxError(
                    f"line {lineno}: multiplicity must be a positive integer, got {suffix!r}"
                )
            count = int(suffix)
            line = body.strip()
        for _ in range(count):
            case_id = f"c{len(traces) + 1}"
            try:
                traces.append(parse_compact(line, case_id, id_prefix=f"{case_id}_"))
            except LogSyntaxError as exc:
                raise LogSyntaxError(f"line {lineno}: {exc}") from None
    log = UncertainLog(traces=tuple(traces))
    if check:
        violations = validate(log)
        if violations:
            raise LogValidationError(violations)
    return log


def _timestamp_to_json(value: Timestamp) -> Any:
    if isinstance(value, datetime):
        return value.isoformat()
    return value


def emit_json(log: UncertainLog) -> str:
    """Serialize a log to the JSON document format.

    Output is byte-deterministic: fixed key order, activities sorted
    lexicographically, two-space indentation. ``parse_json(emit_json(L))``
    reconstructs a log with the same ids, labels, instants and flags.
    """
    doc = {
        "traces": [
            {
                "case_id": trace.case_id,
                "events": [
                    {
                        "id": event.event_id,
                        "activities": sorted(event.activities),
                        "t_min": _timestamp_to_json(event.t_min),
                        "t_max": _timestamp_to_json(event.t_max),
                        "indeterminate": not event.determinate,
                    }
                    for event in trace.events
                ],
            }
            for trace in log.traces
        ]
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_log(path: str, fmt: str | None = None, *, check: bool = True) -> UncertainLog:
    """Read a log file; format inferred from the extension unless given.

    ``fmt`` is ``"json"`` or ``"compact"``; files named ``*.json`` parse as
    JSON and everything else as compact text when no format is given.
    """
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "compact"
    if fmt == "json":
        return parse_json(text, check=check)
    if fmt == "compact":
        return parse_compact_log(text, check=check)
    raise ValueError(f"unknown log format {fmt!r}")

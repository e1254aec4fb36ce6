"""Event wire format helpers.

Events travel as newline-delimited JSON, one object per line, keys
exactly ``t``, ``action``, and optionally ``params``. Emission is
deterministic: fixed key order, and every float rounded to 12
significant digits before serialization so that identical inputs
produce byte-identical output on any platform. The same float policy
is applied to report documents.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from .catalog import BehaviorCatalog
from .errors import ForeignReference
from .traces import ObservationEvent, Trace

__all__ = ["round12", "event_to_line", "events_from_trace", "trace_to_lines"]


def round12(value: float) -> float:
    """Round to 12 significant digits, the wire precision for floats."""
    return float(format(value, ".12g"))


def event_to_line(event: ObservationEvent) -> str:
    """Render one event as its wire line (no trailing newline)."""
    doc: dict[str, object] = {"t": _wire_number(event.t), "action": event.action}
    if event.params:
        doc["params"] = {key: _wire_number(val) for key, val in event.params.items()}
    return json.dumps(doc, separators=(",", ":"))


def _wire_number(value: float) -> float | int:
    if isinstance(value, int):
        return value
    return round12(value)


def events_from_trace(trace: Trace, catalog: BehaviorCatalog) -> list[ObservationEvent]:
    """Convert an encoded trace back to observable events.

    Traces carry symbols; the wire carries action names, so each symbol
    is mapped back through the catalog. A symbol the catalog does not
    know cannot be rendered and raises ForeignReference.
    """
    events: list[ObservationEvent] = []
    for step in trace.steps:
        action = catalog.action_by_symbol(step.symbol)
        if action is None:
            raise ForeignReference(
                f"symbol {step.symbol!r} is not in the catalog alphabet"
            )
        events.append(ObservationEvent(t=step.t, action=action.name, params=step.params))
    return events


def trace_to_lines(trace: Trace, catalog: BehaviorCatalog) -> Iterator[str]:
    for event in events_from_trace(trace, catalog):
        yield event_to_line(event)


def write_events(events: Iterable[ObservationEvent], fp) -> int:
    """Write events as NDJSON to an open text file. Returns line count."""
    count = 0
    for event in events:
        fp.write(event_to_line(event))
        fp.write("\n")
        count += 1
    return count

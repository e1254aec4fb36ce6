"""Core data model: observed events, trace steps, and match outcomes.

A trace is the ordered symbol sequence accumulated from an observation
stream (or recorded from a human), with the original timestamps and
per-step parameter values kept alongside each symbol. Everything here is
immutable once constructed; sessions build traces incrementally from
plain lists and freeze them on completion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping


@dataclass(frozen=True, slots=True)
class ObservationEvent:
    """One observed action before catalog encoding.

    ``t`` is in seconds since the start of observation and must be
    non-negative and finite. ``params`` maps subaction names to values;
    unknown or missing parameter names never invalidate an event.
    """

    t: float
    action: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.t, (int, float)) or isinstance(self.t, bool):
            raise ValueError(f"event timestamp must be a number, got {self.t!r}")
        if not math.isfinite(self.t) or self.t < 0:
            raise ValueError(f"event timestamp must be finite and >= 0, got {self.t!r}")


@dataclass(frozen=True, slots=True)
class TraceStep:
    """A single encoded step: timestamp, catalog symbol, parameter values."""

    t: float
    symbol: str
    params: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    """Ordered symbol sequence with timestamps and parameters.

    Timestamps must be non-decreasing and start at or after zero. Symbol
    membership in a catalog alphabet is not checked here; that is the
    job of the equivalency gate.
    """

    steps: tuple[TraceStep, ...] = ()
    scenario: str = ""

    def __post_init__(self) -> None:
        last = 0.0
        for step in self.steps:
            if step.t < last:
                raise ValueError(
                    f"trace timestamps must be non-decreasing and >= 0; "
                    f"step at t={step.t} follows t={last}"
                )
            last = step.t

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(step.symbol for step in self.steps)

    @property
    def duration(self) -> float:
        """Seconds between the first and last step (0.0 when < 2 steps)."""
        if len(self.steps) < 2:
            return 0.0
        return self.steps[-1].t - self.steps[0].t


class MatchStatus(enum.Enum):
    """How an event fared against the catalog and the stream policy.

    ``MATCHED`` and ``UNKNOWN`` come from the alphabet lookup itself;
    ``OUT_OF_ORDER`` only arises inside a session whose timestamp policy
    rejects regressions. The three statuses mirror the session counters
    exactly, so matched + unknown + out_of_order always equals the total
    number of events seen.
    """

    MATCHED = "matched"
    UNKNOWN = "unknown"
    OUT_OF_ORDER = "out_of_order"


@dataclass(frozen=True, slots=True)
class MatchOutcome:
    """Result of encoding one event.

    ``out_of_range`` flags parameter values outside their schema bounds;
    the match itself is decided by action identity alone, so an
    out-of-range event still matches. ``clamped`` marks events whose
    timestamp was pulled forward by the clamping policy.
    """

    status: MatchStatus
    symbol: str | None = None
    out_of_range: bool = False
    clamped: bool = False

    @property
    def matched(self) -> bool:
        return self.status is MatchStatus.MATCHED

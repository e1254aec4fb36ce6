"""Streaming observation sessions.

A session is the streaming loop made explicit: open it for one scenario,
feed it events as they arrive, and end it to obtain the accumulated
trace plus an equivalency verdict. Events whose action the catalog does
not know are counted and dropped, never appended, so the accumulated
trace only ever contains alphabet symbols. Because silently dropping
most of a stream must not yield a confident score, the verdict enforces
a coverage floor over matched/total events.

One session owns one logical event stream; distinct sessions may run
concurrently against the same immutable catalog.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

from .catalog import BehaviorCatalog
from .errors import MalformedEventLine, SessionEnded, UnknownScenario
from .traces import MatchOutcome, MatchStatus, ObservationEvent, Trace, TraceStep

__all__ = [
    "TimestampPolicy",
    "SessionConfig",
    "SessionCounters",
    "Verdict",
    "SessionResult",
    "Session",
    "begin_session",
    "equivalency_check",
    "parse_event_line",
]


class TimestampPolicy(enum.Enum):
    """What to do with an event whose timestamp moves backwards."""

    REJECT_OUT_OF_ORDER = "reject_out_of_order"
    CLAMP_OUT_OF_ORDER = "clamp_out_of_order"


@dataclass(frozen=True)
class SessionConfig:
    """Gate thresholds and stream policies for one session."""

    min_coverage: float = 0.8
    min_observed_length: int = 1
    timestamp_policy: TimestampPolicy = TimestampPolicy.REJECT_OUT_OF_ORDER

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_coverage <= 1.0:
            raise ValueError(f"min_coverage must be in [0, 1], got {self.min_coverage}")
        if self.min_observed_length < 1:
            raise ValueError(
                f"min_observed_length must be >= 1, got {self.min_observed_length}"
            )


@dataclass
class SessionCounters:
    """Event accounting. matched + unknown + out_of_order == total_events.

    ``out_of_range`` counts matched events carrying a parameter outside
    its schema range (they are still appended). ``parse_errors`` counts
    the subset of unknown events that came from unparseable stream lines.
    """

    total_events: int = 0
    matched: int = 0
    unknown: int = 0
    out_of_range: int = 0
    out_of_order: int = 0
    parse_errors: int = 0

    @property
    def coverage(self) -> float:
        return self.matched / self.total_events if self.total_events else 0.0

    def as_dict(self) -> dict[str, int]:
        return {
            "total_events": self.total_events,
            "matched": self.matched,
            "unknown": self.unknown,
            "out_of_range": self.out_of_range,
            "out_of_order": self.out_of_order,
            "parse_errors": self.parse_errors,
        }


class Verdict(enum.Enum):
    """Outcome of the equivalency gate. Values match CLI report wording."""

    PASS = "Pass"
    EMPTY_OBSERVATION = "EmptyObservation"
    INSUFFICIENT_COVERAGE = "InsufficientCoverage"
    ALPHABET_MISMATCH = "AlphabetMismatch"


@dataclass(frozen=True)
class SessionResult:
    """Everything a finished session produced.

    The trace is returned even on a failing verdict so callers can
    diagnose what was observed; scoring a failed result is refused by
    the scoring layer.
    """

    scenario: str
    trace: Trace
    counters: SessionCounters
    verdict: Verdict
    coverage: float


def equivalency_check(
    trace: Trace,
    catalog: BehaviorCatalog,
    config: SessionConfig | None = None,
    counters: SessionCounters | None = None,
) -> Verdict:
    """Gate a trace before edit-distance scoring.

    The comparison operands must share an alphabet, or the distance is
    meaningless, so equivalency here means: every trace symbol is in the
    catalog alphabet (true by construction for session-built traces,
    checked defensively for hand-built ones), the trace meets the length
    floor, and matched/total coverage meets the floor when counters are
    available. Without counters a trace counts as fully covered.
    """
    if config is None:
        config = SessionConfig()
    alphabet = catalog.alphabet
    for step in trace.steps:
        if step.symbol not in alphabet:
            return Verdict.ALPHABET_MISMATCH
    if len(trace) < config.min_observed_length:
        return Verdict.EMPTY_OBSERVATION
    if counters is not None and counters.coverage < config.min_coverage:
        return Verdict.INSUFFICIENT_COVERAGE
    return Verdict.PASS


def parse_event_line(line: str) -> ObservationEvent:
    """Parse one wire-format event line.

    The format is newline-delimited JSON objects with keys exactly ``t``
    (seconds, number >= 0), ``action`` (string), and optionally
    ``params`` (object of finite numbers). Anything else raises
    MalformedEventLine.
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedEventLine(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedEventLine("event line must be a JSON object")
    unknown = set(data) - {"t", "action", "params"}
    if unknown:
        raise MalformedEventLine(f"unknown key(s) {sorted(unknown)}")
    if "t" not in data or "action" not in data:
        raise MalformedEventLine("event line requires keys 't' and 'action'")
    action = data["action"]
    if not isinstance(action, str) or not action:
        raise MalformedEventLine("'action' must be a non-empty string")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise MalformedEventLine("'params' must be an object")
    for key, value in params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedEventLine(f"param {key!r} must be a number")
    try:
        return ObservationEvent(t=data["t"], action=action, params=params)
    except ValueError as exc:
        raise MalformedEventLine(str(exc)) from exc


class Session:
    """One open observation stream. Create via ``begin_session``."""

    def __init__(self, catalog: BehaviorCatalog, scenario: str, config: SessionConfig) -> None:
        self._catalog = catalog
        self._scenario = scenario
        self._config = config
        self._open = True
        self._steps: list[TraceStep] = []
        self._counters = SessionCounters()
        self._last_t = 0.0

    @property
    def scenario(self) -> str:
        return self._scenario

    @property
    def config(self) -> SessionConfig:
        return self._config

    @property
    def is_open(self) -> bool:
        return self._open

    @property
    def counters(self) -> SessionCounters:
        return self._counters

    @property
    def accumulated_symbols(self) -> tuple[str, ...]:
        return tuple(step.symbol for step in self._steps)

    def _require_open(self) -> None:
        if not self._open:
            raise SessionEnded(f"session for scenario {self._scenario!r} already ended")

    def observe(self, event: ObservationEvent) -> MatchOutcome:
        """Ingest one event: look it up, then append on success.

        Unknown actions are counted but never appended. A timestamp
        behind the last accepted step is rejected (counted out_of_order)
        or clamped forward, per the configured policy; unknown actions
        are decided before timestamps so they count as unknown either
        way.
        """
        self._require_open()
        self._counters.total_events += 1
        outcome = self._catalog.encode_event(event)
        if outcome.status is MatchStatus.UNKNOWN:
            self._counters.unknown += 1
            return outcome
        t = event.t
        if self._steps and t < self._last_t:
            if self._config.timestamp_policy is TimestampPolicy.REJECT_OUT_OF_ORDER:
                self._counters.out_of_order += 1
                return MatchOutcome(
                    status=MatchStatus.OUT_OF_ORDER,
                    symbol=outcome.symbol,
                    out_of_range=outcome.out_of_range,
                )
            t = self._last_t
            outcome = replace(outcome, clamped=True)
        self._counters.matched += 1
        if outcome.out_of_range:
            self._counters.out_of_range += 1
        assert outcome.symbol is not None
        self._steps.append(TraceStep(t=t, symbol=outcome.symbol, params=dict(event.params)))
        self._last_t = t
        return outcome

    def ingest_line(self, line: str) -> MatchOutcome:
        """Parse and observe one wire-format line.

        A line that fails to parse counts as one unknown event with the
        parse_errors counter bumped, mirroring how an unrecognizable
        action is dropped.
        """
        self._require_open()
        try:
            event = parse_event_line(line)
        except MalformedEventLine:
            self._counters.total_events += 1
            self._counters.unknown += 1
            self._counters.parse_errors += 1
            return MatchOutcome(status=MatchStatus.UNKNOWN)
        return self.observe(event)

    def end(self) -> SessionResult:
        """Close the session and run the equivalency gate."""
        self._require_open()
        self._open = False
        trace = Trace(steps=tuple(self._steps), scenario=self._scenario)
        counters = replace(self._counters)
        verdict = equivalency_check(trace, self._catalog, self._config, counters)
        return SessionResult(
            scenario=self._scenario,
            trace=trace,
            counters=counters,
            verdict=verdict,
            coverage=counters.coverage,
        )


def begin_session(
    catalog: BehaviorCatalog, scenario: str, config: SessionConfig | None = None
) -> Session:
    """Open a session for one scenario.

    The scenario must have at least one reference trace in the catalog,
    otherwise there is nothing to score against and UnknownScenario is
    raised.
    """
    if not catalog.references_for(scenario):
        raise UnknownScenario(f"no reference traces for scenario {scenario!r}")
    return Session(catalog, scenario, config if config is not None else SessionConfig())

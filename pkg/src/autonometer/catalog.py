"""Human behavior lookup table: action alphabet plus reference traces.

A catalog document is a single UTF-8 JSON object::

    {
      "version": "1",
      "actions": [
        {"name": "turn_left", "symbol": "L", "subactions": [
          {"name": "velocity", "unit": "m/s", "min": 0.0, "max": 30.0},
          {"name": "duration", "unit": "s",   "min": 0.0, "max": 20.0},
          {"name": "angle",    "unit": "deg", "min": 0.0, "max": 180.0}
        ]}
      ],
      "references": [
        {"id": "ref-1", "scenario": "intersection_A", "steps": [
          {"t": 0.0, "action": "turn_left", "params": {"velocity": 3.0}}
        ]}
      ]
    }

Keys are exact; unknown keys are rejected. Reference steps name actions
by their ``name`` and are resolved to symbols at load time. ``params``
is optional per step. A loaded catalog is immutable and safe to share
between any number of concurrent sessions.

``load_catalog`` raises the first violation it finds; ``collect_violations``
returns every violation in document order, which is what the CLI's
``catalog validate`` report is built from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, BinaryIO, Mapping, TextIO

from .errors import (
    CatalogError,
    DuplicateActionName,
    DuplicateSymbol,
    InvalidSchema,
    MalformedDocument,
    UnresolvedSymbol,
)
from .traces import MatchOutcome, MatchStatus, ObservationEvent, Trace, TraceStep

__all__ = [
    "SubactionSchema",
    "ActionDef",
    "ReferenceTrace",
    "BehaviorCatalog",
    "load_catalog",
    "catalog_from_dict",
    "collect_violations",
    "serialize_catalog",
    "dumps_catalog",
]


@dataclass(frozen=True, slots=True)
class SubactionSchema:
    """One named parameter of an action, with its plausible value range."""

    name: str
    unit: str
    min: float
    max: float

    def __post_init__(self) -> None:
        if self.min > self.max:
            raise InvalidSchema(
                f"subaction {self.name!r}: min {self.min} exceeds max {self.max}"
            )

    def in_range(self, value: float) -> bool:
        return self.min <= value <= self.max


@dataclass(frozen=True)
class ActionDef:
    """A catalog action: human-readable name plus its encoding symbol."""

    name: str
    symbol: str
    subactions: tuple[SubactionSchema, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidSchema("action name must be non-empty")
        if not self.symbol:
            raise InvalidSchema(f"action {self.name!r}: symbol must be non-empty")
        seen: set[str] = set()
        for sub in self.subactions:
            if sub.name in seen:
                raise InvalidSchema(
                    f"action {self.name!r}: duplicate subaction {sub.name!r}"
                )
            seen.add(sub.name)

    def subaction(self, name: str) -> SubactionSchema | None:
        for sub in self.subactions:
            if sub.name == name:
                return sub
        return None


@dataclass(frozen=True)
class ReferenceTrace:
    """A recorded human execution of one scenario, already symbol-encoded."""

    id: str
    scenario: str
    steps: tuple[TraceStep, ...] = ()

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(step.symbol for step in self.steps)

    def to_trace(self) -> Trace:
        return Trace(steps=self.steps, scenario=self.scenario)


@dataclass(frozen=True)
class BehaviorCatalog:
    """Immutable action alphabet plus per-scenario human reference traces."""

    version: str
    actions: tuple[ActionDef, ...]
    references: tuple[ReferenceTrace, ...] = ()

    def __post_init__(self) -> None:
        if not self.actions:
            raise InvalidSchema("catalog must define at least one action")
        names: set[str] = set()
        symbols: set[str] = set()
        for action in self.actions:
            if action.name in names:
                raise DuplicateActionName(f"duplicate action name {action.name!r}")
            if action.symbol in symbols:
                raise DuplicateSymbol(f"duplicate symbol {action.symbol!r}")
            names.add(action.name)
            symbols.add(action.symbol)
        for ref in self.references:
            for step in ref.steps:
                if step.symbol not in symbols:
                    raise UnresolvedSymbol(
                        f"reference {ref.id!r} uses symbol {step.symbol!r} "
                        "absent from the alphabet"
                    )

    @cached_property
    def _by_name(self) -> dict[str, ActionDef]:
        return {action.name: action for action in self.actions}

    @cached_property
    def _by_symbol(self) -> dict[str, ActionDef]:
        return {action.symbol: action for action in self.actions}

    @cached_property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self._by_symbol)

    @cached_property
    def scenarios(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for ref in self.references:
            seen.setdefault(ref.scenario, None)
        return tuple(seen)

    def lookup_action(self, name: str) -> ActionDef | None:
        """Return the action for ``name``, or None when absent. Never raises."""
        return self._by_name.get(name)

    def action_by_symbol(self, symbol: str) -> ActionDef | None:
        return self._by_symbol.get(symbol)

    def references_for(self, scenario: str) -> tuple[ReferenceTrace, ...]:
        return tuple(ref for ref in self.references if ref.scenario == scenario)

    def reference_by_id(self, reference_id: str) -> ReferenceTrace | None:
        for ref in self.references:
            if ref.id == reference_id:
                return ref
        return None

    def encode_event(self, event: ObservationEvent) -> MatchOutcome:
        """Encode one observed event against the alphabet.

        Matching is by action identity only. Parameter values outside
        their schema range set ``out_of_range`` but never reject the
        match; parameter names the schema does not know are ignored.
        Total over arbitrary events: the result is always MATCHED or
        UNKNOWN.
        """
        action = self._by_name.get(event.action)
        if action is None:
            return MatchOutcome(status=MatchStatus.UNKNOWN)
        out_of_range = False
        for sub in action.subactions:
            value = event.params.get(sub.name)
            if value is not None and not sub.in_range(value):
                out_of_range = True
                break
        return MatchOutcome(
            status=MatchStatus.MATCHED, symbol=action.symbol, out_of_range=out_of_range
        )


# --- document validation -----------------------------------------------------

_TOP_KEYS = {"version", "actions", "references"}
_ACTION_KEYS = {"name", "symbol", "subactions"}
_SUBACTION_KEYS = {"name", "unit", "min", "max"}
_REFERENCE_KEYS = {"id", "scenario", "steps"}
_STEP_KEYS = {"t", "action", "params"}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _check_keys(obj: Mapping[str, Any], allowed: set[str], required: set[str], where: str, out: list[CatalogError]) -> None:
    unknown = set(obj) - allowed
    missing = required - set(obj)
    if unknown:
        out.append(InvalidSchema(f"{where}: unknown key(s) {sorted(unknown)}"))
    if missing:
        out.append(InvalidSchema(f"{where}: missing key(s) {sorted(missing)}"))


def collect_violations(data: Any) -> list[CatalogError]:
    """Validate a parsed catalog document, returning every violation.

    The list is empty exactly when ``catalog_from_dict(data)`` succeeds.
    Violations come back in document order so a validation report reads
    top to bottom.
    """
    if not isinstance(data, dict):
        return [MalformedDocument("catalog document must be a JSON object")]

    out: list[CatalogError] = []
    _check_keys(data, _TOP_KEYS, _TOP_KEYS, "catalog", out)

    if "version" in data and not isinstance(data["version"], str):
        out.append(InvalidSchema("catalog: 'version' must be a string"))

    # action_params maps validated action names to their subaction names,
    # for resolving reference steps below.
    action_params: dict[str, set[str]] = {}
    actions_valid = False
    actions = data.get("actions")
    if "actions" in data:
        if not isinstance(actions, list):
            out.append(InvalidSchema("catalog: 'actions' must be an array"))
        elif not actions:
            out.append(InvalidSchema("catalog: at least one action is required"))
        else:
            actions_valid = True
            seen_names: dict[str, int] = {}
            seen_symbols: dict[str, str] = {}
            for i, action in enumerate(actions):
                where = f"actions[{i}]"
                if not isinstance(action, dict):
                    out.append(InvalidSchema(f"{where}: must be an object"))
                    actions_valid = False
                    continue
                _check_keys(action, _ACTION_KEYS, _ACTION_KEYS, where, out)
                name = action.get("name")
                symbol = action.get("symbol")
                if not isinstance(name, str) or not name:
                    out.append(InvalidSchema(f"{where}: 'name' must be a non-empty string"))
                    actions_valid = False
                    name = None
                if not isinstance(symbol, str) or not symbol:
                    out.append(InvalidSchema(f"{where}: 'symbol' must be a non-empty string"))
                    symbol = None
                if name is not None:
                    if name in seen_names:
                        out.append(DuplicateActionName(
                            f"{where}: action name {name!r} already used by actions[{seen_names[name]}]"
                        ))
                    else:
                        seen_names[name] = i
                if symbol is not None:
                    if symbol in seen_symbols:
                        out.append(DuplicateSymbol(
                            f"{where}: symbol {symbol!r} already used by action {seen_symbols[symbol]!r}"
                        ))
                    else:
                        seen_symbols[symbol] = name if name is not None else f"actions[{i}]"
                sub_names: set[str] = set()
                subactions = action.get("subactions")
                if not isinstance(subactions, list):
                    out.append(InvalidSchema(f"{where}: 'subactions' must be an array"))
                else:
                    for j, sub in enumerate(subactions):
                        sub_where = f"{where}.subactions[{j}]"
                        if not isinstance(sub, dict):
                            out.append(InvalidSchema(f"{sub_where}: must be an object"))
                            continue
                        _check_keys(sub, _SUBACTION_KEYS, _SUBACTION_KEYS, sub_where, out)
                        sub_name = sub.get("name")
                        if not isinstance(sub_name, str) or not sub_name:
                            out.append(InvalidSchema(f"{sub_where}: 'name' must be a non-empty string"))
                        elif sub_name in sub_names:
                            out.append(InvalidSchema(f"{sub_where}: duplicate subaction {sub_name!r}"))
                        else:
                            sub_names.add(sub_name)
                        if "unit" in sub and not isinstance(sub["unit"], str):
                            out.append(InvalidSchema(f"{sub_where}: 'unit' must be a string"))
                        lo, hi = sub.get("min"), sub.get("max")
                        bounds_ok = True
                        for key, value in (("min", lo), ("max", hi)):
                            if key in sub and not _is_number(value):
                                out.append(InvalidSchema(f"{sub_where}: '{key}' must be a finite number"))
                                bounds_ok = False
                        if bounds_ok and _is_number(lo) and _is_number(hi) and lo > hi:
                            out.append(InvalidSchema(f"{sub_where}: min {lo} exceeds max {hi}"))
                if name is not None:
                    action_params[name] = sub_names

    references = data.get("references")
    if "references" in data:
        if not isinstance(references, list):
            out.append(InvalidSchema("catalog: 'references' must be an array"))
        else:
            seen_ids: set[str] = set()
            for i, ref in enumerate(references):
                where = f"references[{i}]"
                if not isinstance(ref, dict):
                    out.append(InvalidSchema(f"{where}: must be an object"))
                    continue
                _check_keys(ref, _REFERENCE_KEYS, _REFERENCE_KEYS, where, out)
                ref_id = ref.get("id")
                if not isinstance(ref_id, str) or not ref_id:
                    out.append(InvalidSchema(f"{where}: 'id' must be a non-empty string"))
                elif ref_id in seen_ids:
                    out.append(InvalidSchema(f"{where}: duplicate reference id {ref_id!r}"))
                else:
                    seen_ids.add(ref_id)
                scenario = ref.get("scenario")
                if not isinstance(scenario, str) or not scenario:
                    out.append(InvalidSchema(f"{where}: 'scenario' must be a non-empty string"))
                steps = ref.get("steps")
                if not isinstance(steps, list):
                    out.append(InvalidSchema(f"{where}: 'steps' must be an array"))
                    continue
                last_t = 0.0
                for j, step in enumerate(steps):
                    step_where = f"{where}.steps[{j}]"
                    if not isinstance(step, dict):
                        out.append(InvalidSchema(f"{step_where}: must be an object"))
                        continue
                    _check_keys(step, _STEP_KEYS, {"t", "action"}, step_where, out)
                    t = step.get("t")
                    if "t" in step:
                        if not _is_number(t) or t < 0:
                            out.append(InvalidSchema(f"{step_where}: 't' must be a finite number >= 0"))
                        elif t < last_t:
                            out.append(InvalidSchema(
                                f"{step_where}: timestamp {t} precedes previous step at {last_t}"
                            ))
                        else:
                            last_t = t
                    action_name = step.get("action")
                    known_params: set[str] | None = None
                    if "action" in step:
                        if not isinstance(action_name, str) or not action_name:
                            out.append(InvalidSchema(f"{step_where}: 'action' must be a non-empty string"))
                        elif actions_valid and action_name not in action_params:
                            out.append(UnresolvedSymbol(
                                f"{step_where}: action {action_name!r} is not in the alphabet"
                            ))
                        else:
                            known_params = action_params.get(action_name)
                    params = step.get("params", {})
                    if not isinstance(params, dict):
                        out.append(InvalidSchema(f"{step_where}: 'params' must be an object"))
                        continue
                    for key, value in params.items():
                        if not _is_number(value):
                            out.append(InvalidSchema(f"{step_where}: param {key!r} must be a finite number"))
                        if known_params is not None and key not in known_params:
                            out.append(InvalidSchema(
                                f"{step_where}: unknown subaction {key!r} for action {action_name!r}"
                            ))
    return out


def catalog_from_dict(data: Any) -> BehaviorCatalog:
    """Build a catalog from a parsed document, raising the first violation."""
    violations = collect_violations(data)
    if violations:
        raise violations[0]
    actions = tuple(
        ActionDef(
            name=action["name"],
            symbol=action["symbol"],
            subactions=tuple(
                SubactionSchema(name=sub["name"], unit=sub["unit"], min=sub["min"], max=sub["max"])
                for sub in action["subactions"]
            ),
        )
        for action in data["actions"]
    )
    symbol_of = {action.name: action.symbol for action in actions}
    references = tuple(
        ReferenceTrace(
            id=ref["id"],
            scenario=ref["scenario"],
            steps=tuple(
                TraceStep(
                    t=step["t"],
                    symbol=symbol_of[step["action"]],
                    params=dict(step.get("params", {})),
                )
                for step in ref["steps"]
            ),
        )
        for ref in data["references"]
    )
    return BehaviorCatalog(version=data["version"], actions=actions, references=references)


def load_catalog(source: str | Path | bytes | TextIO | BinaryIO) -> BehaviorCatalog:
    """Load and validate a catalog from a path, raw bytes, or open file.

    Raises MalformedDocument when the source is not parseable JSON, and
    the first specific violation otherwise (DuplicateSymbol,
    DuplicateActionName, InvalidSchema, UnresolvedSymbol).
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            raw: str | bytes = fh.read()
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = source.read()
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"catalog is not valid JSON: {exc}") from exc
    return catalog_from_dict(data)


def serialize_catalog(catalog: BehaviorCatalog) -> dict[str, Any]:
    """Render a catalog back to its document form (inverse of loading)."""
    name_of = {action.symbol: action.name for action in catalog.actions}
    return {
        "version": catalog.version,
        "actions": [
            {
                "name": action.name,
                "symbol": action.symbol,
                "subactions": [
                    {"name": sub.name, "unit": sub.unit, "min": sub.min, "max": sub.max}
                    for sub in action.subactions
                ],
            }
            for action in catalog.actions
        ],
        "references": [
            {
                "id": ref.id,
                "scenario": ref.scenario,
                "steps": [
                    {"t": step.t, "action": name_of[step.symbol], "params": dict(step.params)}
                    for step in ref.steps
                ],
            }
            for ref in catalog.references
        ],
    }


def dumps_catalog(catalog: BehaviorCatalog) -> str:
    return json.dumps(serialize_catalog(catalog), indent=2) + "\n"

"""Exception types raised across the package."""

from __future__ import annotations


class AutonometerError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(AutonometerError):
    """Base class for behavior-catalog validation failures."""


class MalformedDocument(CatalogError):
    """Catalog source is not parseable as a JSON object."""


class DuplicateSymbol(CatalogError):
    """Two actions in a catalog share the same symbol."""


class DuplicateActionName(CatalogError):
    """Two actions in a catalog share the same name."""


class InvalidSchema(CatalogError):
    """Catalog content violates a structural invariant."""


class UnresolvedSymbol(CatalogError):
    """A reference trace names an action absent from the catalog."""


class MalformedEventLine(AutonometerError):
    """A streamed event line does not satisfy the wire format."""


class InvalidCostModel(AutonometerError):
    """A cost model carries a negative cost."""


class InputTooLarge(AutonometerError):
    """Input exceeds the size bound of the exhaustive oracle."""


class UnknownScenario(AutonometerError):
    """No reference trace exists for the requested scenario."""


class SessionEnded(AutonometerError):
    """Operation attempted on a session that has already ended."""


class EquivalencyNotEstablished(AutonometerError):
    """Scoring was requested without a passing equivalency verdict."""


class ScoreOutOfRange(AutonometerError):
    """Score value lies outside the representable band range."""


class ScenarioMismatch(AutonometerError):
    """Two results being compared belong to different scenarios."""


class ForeignReference(AutonometerError):
    """Reference trace does not belong to the supplied catalog."""

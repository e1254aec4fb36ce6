"""Observational score and autonomy-level mapping.

The score is the normalized edit distance between the observed trace
and the closest human reference for the scenario, stretched onto
[0.0, 5.9]: the further an observed system strays from any plausible
human execution of the same scenario, the higher its score, and the
higher the level of autonomy it is credited with. Levels are reported
as minimums: observation can show that a system behaves at least this
autonomously, never that it could not do more.

Two scales are supported. The five-level scale uses bands
[0,2) [2,3) [3,4) [4,5) [5,5.9]; the printed band edges 0.0/1.9,
2.0/2.9, ... 5.0/5.9 all land inside their own band, and the gaps
between printed edges are closed half-open so every score in
[0.0, 5.9] maps to exactly one level. The first band is double-width
on purpose. The ten-level scale transposes the normalized distance to
[0, 10] with uniform one-point bands [k-1, k); it is an extrapolated
mapping, flagged as such in human-readable output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .catalog import BehaviorCatalog, ReferenceTrace
from .distance import (
    CostModel,
    NormalizationVariant,
    damerau_levenshtein_osa,
    normalize_raw,
    weighted_distance,
)
from .errors import (
    EquivalencyNotEstablished,
    ScenarioMismatch,
    ScoreOutOfRange,
    UnknownScenario,
)
from .observer import SessionConfig, SessionResult, Verdict, equivalency_check
from .stream import round12
from .traces import Trace

__all__ = [
    "SCORE_SPAN",
    "Scale",
    "AutonomyLevel",
    "ObservationalScore",
    "ComparisonReport",
    "compute_score",
    "score_session",
    "map_to_sae",
    "map_to_alfus",
    "compare_systems",
    "score_report",
    "comparison_report",
    "SCALE_NOTE",
]

SCORE_SPAN = 5.9

SCALE_NOTE = "minimum level; observation cannot infer a maximum"

_SAE_BANDS: tuple[tuple[float, float, int], ...] = (
    (0.0, 2.0, 1),
    (2.0, 3.0, 2),
    (3.0, 4.0, 3),
    (4.0, 5.0, 4),
    (5.0, SCORE_SPAN, 5),
)


class Scale(enum.Enum):
    SAE5 = "sae5"
    ALFUS10 = "alfus10"


@dataclass(frozen=True)
class AutonomyLevel:
    """A level on one scale plus the band that produced it.

    ``band`` is half-open [low, high) except the topmost band, which
    includes its upper edge. For the ten-point scale the band is in
    transposed units (normalized distance times 10).
    """

    scale: Scale
    level: int
    band: tuple[float, float]


@dataclass(frozen=True)
class ObservationalScore:
    """Score in [0.0, 5.9] plus full provenance.

    ``value`` is exactly ``SCORE_SPAN * normalized_distance``, where the
    normalized distance is the minimum over the scenario's references
    (the closest human execution wins). ``per_reference`` keeps every
    candidate distance for inspection.
    """

    value: float
    raw_distance: float
    normalized_distance: float
    matched_reference: str
    per_reference: tuple[tuple[str, float], ...]
    coverage: float


def compute_score(
    observed: Trace,
    catalog: BehaviorCatalog,
    scenario: str,
    *,
    model: CostModel | None = None,
    variant: NormalizationVariant = NormalizationVariant.MAX_LENGTH,
    coverage: float = 1.0,
) -> ObservationalScore:
    """Score an observed trace against a scenario's human references.

    The caller is expected to have passed the equivalency gate already;
    what can be re-checked from the trace alone (alphabet membership,
    non-emptiness) is re-checked here and failures raise
    EquivalencyNotEstablished. ``coverage`` is carried into the result
    as provenance.

    Deterministic: ties between references resolve to the earliest one
    in catalog order.
    """
    references = catalog.references_for(scenario)
    if not references:
        raise UnknownScenario(f"no reference traces for scenario {scenario!r}")
    verdict = equivalency_check(observed, catalog, SessionConfig(min_coverage=0.0))
    if verdict is not Verdict.PASS:
        raise EquivalencyNotEstablished(
            f"observed trace fails the equivalency gate: {verdict.value}"
        )

    per_reference: list[tuple[str, float]] = []
    best: tuple[float, float, str] | None = None
    for ref in references:
        raw, norm = _distances(observed, ref, model, variant)
        per_reference.append((ref.id, norm))
        if best is None or norm < best[1]:
            best = (raw, norm, ref.id)
    assert best is not None
    raw, norm, ref_id = best
    return ObservationalScore(
        value=SCORE_SPAN * norm,
        raw_distance=raw,
        normalized_distance=norm,
        matched_reference=ref_id,
        per_reference=tuple(per_reference),
        coverage=coverage,
    )


def _distances(
    observed: Trace,
    reference: ReferenceTrace,
    model: CostModel | None,
    variant: NormalizationVariant,
) -> tuple[float, float]:
    n, m = len(observed.steps), len(reference.steps)
    if model is None:
        raw = float(damerau_levenshtein_osa(observed.symbols, reference.symbols))
    else:
        raw = weighted_distance(observed, reference.to_trace(), model)
    if n == 0 and m == 0:
        return raw, 0.0
    if variant is NormalizationVariant.MAX_LENGTH:
        ratio = raw / max(n, m)
    elif variant is NormalizationVariant.SUM_LENGTH:
        ratio = raw / (n + m)
    else:
        ratio = 2.0 * raw / (n + m + raw) if raw else 0.0
    return raw, min(1.0, max(0.0, ratio))


def score_session(
    result: SessionResult,
    catalog: BehaviorCatalog,
    *,
    model: CostModel | None = None,
    variant: NormalizationVariant = NormalizationVariant.MAX_LENGTH,
) -> ObservationalScore:
    """Score a finished session, enforcing its verdict.

    Raises EquivalencyNotEstablished when the session's gate did not
    pass; this is the path that makes skipping the gate impossible for
    stream-driven scoring.
    """
    if result.verdict is not Verdict.PASS:
        raise EquivalencyNotEstablished(
            f"session verdict is {result.verdict.value}, not Pass"
        )
    return compute_score(
        result.trace,
        catalog,
        result.scenario,
        model=model,
        variant=variant,
        coverage=result.coverage,
    )


def _score_value(score: ObservationalScore | float) -> float:
    value = score.value if isinstance(score, ObservationalScore) else float(score)
    if not 0.0 <= value <= SCORE_SPAN:
        raise ScoreOutOfRange(f"score {value} outside [0.0, {SCORE_SPAN}]")
    return value


def map_to_sae(score: ObservationalScore | float) -> AutonomyLevel:
    """Map a score to the five-level scale (a minimum level)."""
    value = _score_value(score)
    for low, high, level in _SAE_BANDS:
        if value < high or (level == 5 and value <= high):
            return AutonomyLevel(scale=Scale.SAE5, level=level, band=(low, high))
    raise ScoreOutOfRange(f"score {value} outside [0.0, {SCORE_SPAN}]")


def map_to_alfus(score: ObservationalScore | float) -> AutonomyLevel:
    """Map a score to the ten-level scale via transposition to [0, 10].

    The transposed value is normalized distance times 10; bands are
    uniform [k-1, k) for k in 1..10 with 10 itself landing in the top
    band. This mapping is an extrapolation: only the five-level bands
    are given by the measure's definition.
    """
    if isinstance(score, ObservationalScore):
        _score_value(score)
        transposed = score.normalized_distance * 10.0
    else:
        transposed = _score_value(score) / SCORE_SPAN * 10.0
    if not 0.0 <= transposed <= 10.0:
        raise ScoreOutOfRange(f"transposed score {transposed} outside [0, 10]")
    level = min(int(transposed) + 1, 10)
    return AutonomyLevel(scale=Scale.ALFUS10, level=level, band=(level - 1.0, float(level)))


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side scoring of two systems observed on one scenario."""

    scenario: str
    label_a: str
    label_b: str
    score_a: ObservationalScore
    score_b: ObservationalScore
    level_a: AutonomyLevel
    level_b: AutonomyLevel
    delta: float
    higher_autonomy: str | None  # label of the higher-scoring system, None on tie


def compare_systems(
    a: SessionResult,
    b: SessionResult,
    catalog: BehaviorCatalog,
    *,
    labels: tuple[str, str] = ("A", "B"),
    model: CostModel | None = None,
    variant: NormalizationVariant = NormalizationVariant.MAX_LENGTH,
) -> ComparisonReport:
    """Blind-compare two finished sessions on the same scenario.

    Both sessions must have passed equivalency; equal scores are
    reported as a tie rather than picking an arbitrary winner.
    """
    if a.scenario != b.scenario:
        raise ScenarioMismatch(
            f"cannot compare scenarios {a.scenario!r} and {b.scenario!r}"
        )
    for label, result in zip(labels, (a, b)):
        if result.verdict is not Verdict.PASS:
            raise EquivalencyNotEstablished(
                f"{label}: session verdict is {result.verdict.value}, not Pass"
            )
    score_a = score_session(a, catalog, model=model, variant=variant)
    score_b = score_session(b, catalog, model=model, variant=variant)
    if score_a.value == score_b.value:
        higher = None
    else:
        higher = labels[1] if score_b.value > score_a.value else labels[0]
    return ComparisonReport(
        scenario=a.scenario,
        label_a=labels[0],
        label_b=labels[1],
        score_a=score_a,
        score_b=score_b,
        level_a=map_to_sae(score_a),
        level_b=map_to_sae(score_b),
        delta=abs(score_a.value - score_b.value),
        higher_autonomy=higher,
    )


def score_report(
    score: ObservationalScore, counters: dict[str, int] | None = None
) -> dict[str, object]:
    """Build the stable report document for one score.

    Key order is fixed and floats are rounded to wire precision so that
    identical inputs serialize byte-identically.
    """
    return {
        "score": round12(score.value),
        "normalized_distance": round12(score.normalized_distance),
        "raw_distance": round12(score.raw_distance),
        "matched_reference": score.matched_reference,
        "sae_level": map_to_sae(score).level,
        "alfus_level": map_to_alfus(score).level,
        "coverage": round12(score.coverage),
        "counters": dict(counters) if counters is not None else {},
        "scale_note": SCALE_NOTE,
    }


def comparison_report(report: ComparisonReport) -> dict[str, object]:
    """Stable report document for a comparison."""
    def one(label: str, score: ObservationalScore, level: AutonomyLevel) -> dict[str, object]:
        return {
            "label": label,
            "score": round12(score.value),
            "normalized_distance": round12(score.normalized_distance),
            "matched_reference": score.matched_reference,
            "sae_level": level.level,
            "coverage": round12(score.coverage),
        }

    return {
        "scenario": report.scenario,
        "systems": [
            one(report.label_a, report.score_a, report.level_a),
            one(report.label_b, report.score_b, report.level_b),
        ],
        "delta": round12(report.delta),
        "higher_autonomy": report.higher_autonomy,
        "tie": report.higher_autonomy is None,
        "scale_note": SCALE_NOTE,
    }

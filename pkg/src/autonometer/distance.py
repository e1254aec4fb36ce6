"""Edit-distance family over symbol sequences.

Four distances share one dynamic-programming core:

* ``levenshtein``: insertions, deletions, substitutions, unit costs.
* ``damerau_levenshtein_osa``: adds adjacent transpositions in the
  optimal-string-alignment variant (no substring is edited twice).
* ``weighted_distance``: generalized costs per operation, optionally a
  parameter-aware substitution cost over trace steps. With the default
  cost model it reduces exactly to ``damerau_levenshtein_osa``.
* ``normalized_distance``: any of the above scaled into [0, 1].

``brute_force_distance`` is a deliberately naive exponential recursion
kept as an independent test oracle; it never shares code with the DP
kernels.

Inputs may be plain strings (each character one symbol), sequences of
symbol tokens, or ``Trace`` objects. All functions are pure and
thread-safe. The DP kernels hold only two (three with transpositions)
rows of min(len(a), len(b)) + 1 cells; large inputs dispatch to
vectorized kernels, small ones to tight scalar loops.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .catalog import BehaviorCatalog
from .errors import InputTooLarge, InvalidCostModel
from .traces import Trace, TraceStep

__all__ = [
    "CostModel",
    "NormalizationVariant",
    "SymbolsLike",
    "levenshtein",
    "damerau_levenshtein_osa",
    "weighted_distance",
    "normalized_distance",
    "normalize_raw",
    "brute_force_distance",
    "parameter_substitution_cost",
]

SymbolsLike = Union[str, Sequence[str], Trace]

SubstituteCost = Callable[[TraceStep, TraceStep], float]

# Below this cell count the scalar kernels beat numpy's per-row overhead.
_VECTOR_CUTOVER_CELLS = 4096


@dataclass(frozen=True)
class CostModel:
    """Operation costs for the generalized distance.

    ``substitute_cost`` is either a constant (applied whenever symbols
    differ; same-symbol substitution is free) or a callable taking the
    two candidate steps and returning a cost in [0, inf). A callable
    must return 0.0 for identical steps or the distance loses its
    identity property. Transpositions match on symbols only.
    """

    insert_cost: float = 1.0
    delete_cost: float = 1.0
    substitute_cost: float | SubstituteCost = 1.0
    transpose_cost: float = 1.0
    transpositions_enabled: bool = True

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for label, cost in (
            ("insert_cost", self.insert_cost),
            ("delete_cost", self.delete_cost),
            ("transpose_cost", self.transpose_cost),
        ):
            if cost < 0:
                raise InvalidCostModel(f"{label} must be >= 0, got {cost}")
        if not callable(self.substitute_cost) and self.substitute_cost < 0:
            raise InvalidCostModel(
                f"substitute_cost must be >= 0, got {self.substitute_cost}"
            )


class NormalizationVariant(enum.Enum):
    """How a raw distance is scaled into [0, 1].

    MAX_LENGTH divides by max(|a|, |b|), the canonical form used for the
    default measure. SUM_LENGTH divides by |a| + |b|. ALIGNMENT_PATH uses
    2d / (|a| + |b| + d), a normalization derived from the length of an
    optimal edit path that stays a metric under unit costs. New variants
    can be added here without touching any caller.
    """

    MAX_LENGTH = "max_length"
    SUM_LENGTH = "sum_length"
    ALIGNMENT_PATH = "alignment_path"


def _as_symbols(value: SymbolsLike) -> Sequence[str]:
    if isinstance(value, Trace):
        return value.symbols
    if isinstance(value, str):
        return value
    return tuple(value)


def _as_steps(value: SymbolsLike) -> Sequence[TraceStep]:
    if isinstance(value, Trace):
        return value.steps
    return tuple(TraceStep(t=0.0, symbol=s) for s in _as_symbols(value))


def _codes(a: Sequence[str], b: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    table: dict[str, int] = {}
    for sym in a:
        table.setdefault(sym, len(table))
    for sym in b:
        table.setdefault(sym, len(table))
    ca = np.fromiter((table[s] for s in a), dtype=np.int32, count=len(a))
    cb = np.fromiter((table[s] for s in b), dtype=np.int32, count=len(b))
    return ca, cb


# --- unit-cost kernels --------------------------------------------------------


def _lev_small(a: Sequence[str], b: Sequence[str]) -> int:
    # Two rows; caller guarantees len(a) >= len(b) >= 1.
    m = len(b)
    prev = list(range(m + 1))
    for i in range(1, len(a) + 1):
        ai = a[i - 1]
        cur = [i] * (m + 1)
        left = i
        for j in range(1, m + 1):
            c = prev[j - 1]
            if ai != b[j - 1]:
                c += 1
                d = prev[j] + 1
                if d < c:
                    c = d
                d = left + 1
                if d < c:
                    c = d
            left = c
            cur[j] = c
        prev = cur
    return prev[m]


def _osa_small(a: Sequence[str], b: Sequence[str]) -> int:
    m = len(b)
    prev2: list[int] = []
    prev = list(range(m + 1))
    for i in range(1, len(a) + 1):
        ai = a[i - 1]
        cur = [i] * (m + 1)
        left = i
        for j in range(1, m + 1):
            bj = b[j - 1]
            c = prev[j - 1]
            if ai != bj:
                c += 1
                d = prev[j] + 1
                if d < c:
                    c = d
                d = left + 1
                if d < c:
                    c = d
                if i > 1 and j > 1 and ai == b[j - 2] and a[i - 2] == bj:
                    d = prev2[j - 2] + 1
                    if d < c:
                        c = d
            left = c
            cur[j] = c
        prev2 = prev
        prev = cur
    return prev[m]


def _lev_vector(ca: np.ndarray, cb: np.ndarray) -> int:
    # Row candidates from the previous row are combined first; the
    # insertion chain within the current row is then resolved in one
    # prefix-min pass: D[i][j] = min_{k<=j} cand[k] + (j - k).
    m = len(cb)
    ar = np.arange(m + 1, dtype=np.int32)
    prev = ar.copy()
    cand = np.empty(m + 1, dtype=np.int32)
    for i in range(1, len(ca) + 1):
        cand[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (cb != ca[i - 1]), out=cand[1:])
        cand -= ar
        np.minimum.accumulate(cand, out=cand)
        cand += ar
        prev, cand = cand, prev
    return int(prev[m])


def _osa_vector(ca: np.ndarray, cb: np.ndarray) -> int:
    m = len(cb)
    big = np.iinfo(np.int32).max
    ar = np.arange(m + 1, dtype=np.int32)
    prev2 = np.empty(m + 1, dtype=np.int32)
    prev = ar.copy()
    cand = np.empty(m + 1, dtype=np.int32)
    for i in range(1, len(ca) + 1):
        ai = ca[i - 1]
        cand[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (cb != ai), out=cand[1:])
        if i > 1 and m > 1:
            swap = (cb[: m - 1] == ai) & (cb[1:m] == ca[i - 2])
            np.minimum(
                cand[2:], np.where(swap, prev2[: m - 1] + 1, big), out=cand[2:]
            )
        cand -= ar
        np.minimum.accumulate(cand, out=cand)
        cand += ar
        prev2, prev, cand = prev, cand, prev2
    return int(prev[m])


def levenshtein(a: SymbolsLike, b: SymbolsLike) -> int:
    """Minimal number of insertions, deletions, and substitutions.

    Usage::

        >>> levenshtein("kitten", "sitting")
        3
        >>> levenshtein(["turn_left", "straight"], ["turn_left"])
        1
    """
    sa, sb = _as_symbols(a), _as_symbols(b)
    if len(sa) < len(sb):
        sa, sb = sb, sa
    if not sb:
        return len(sa)
    if len(sa) * len(sb) < _VECTOR_CUTOVER_CELLS:
        return _lev_small(sa, sb)
    return _lev_vector(*_codes(sa, sb))


def damerau_levenshtein_osa(a: SymbolsLike, b: SymbolsLike) -> int:
    """Optimal-string-alignment distance: edits plus adjacent transpositions.

    No substring is edited twice, so this is not the unrestricted
    Damerau-Levenshtein distance: ("ca", "abc") costs 3 here but 2
    unrestricted, and the triangle inequality can fail (see the test
    suite for a concrete witness). Never exceeds ``levenshtein``.

    Usage::

        >>> damerau_levenshtein_osa("ab", "ba")
        1
        >>> damerau_levenshtein_osa("ca", "abc")
        3
    """
    sa, sb = _as_symbols(a), _as_symbols(b)
    if len(sa) < len(sb):
        sa, sb = sb, sa
    if not sb:
        return len(sa)
    if len(sa) * len(sb) < _VECTOR_CUTOVER_CELLS:
        return _osa_small(sa, sb)
    return _osa_vector(*_codes(sa, sb))


# --- generalized kernels ------------------------------------------------------


def _weighted_scalar(
    a: Sequence[TraceStep],
    b: Sequence[TraceStep],
    model: CostModel,
    sub: SubstituteCost | None,
) -> float:
    # sub is None for constant substitution; then cost depends on symbols only.
    n, m = len(a), len(b)
    ins, dele = model.insert_cost, model.delete_cost
    const_sub = model.substitute_cost if sub is None else 0.0
    trans = model.transpositions_enabled
    tr = model.transpose_cost
    prev2: list[float] = []
    prev = [j * ins for j in range(m + 1)]
    for i in range(1, n + 1):
        sa = a[i - 1]
        cur = [i * dele] * (m + 1)
        left = cur[0]
        for j in range(1, m + 1):
            sb = b[j - 1]
            if sub is not None:
                c = prev[j - 1] + sub(sa, sb)
            elif sa.symbol == sb.symbol:
                c = prev[j - 1]
            else:
                c = prev[j - 1] + const_sub
            d = prev[j] + dele
            if d < c:
                c = d
            d = left + ins
            if d < c:
                c = d
            if (
                trans
                and i > 1
                and j > 1
                and sa.symbol == b[j - 2].symbol
                and a[i - 2].symbol == sb.symbol
            ):
                d = prev2[j - 2] + tr
                if d < c:
                    c = d
            left = c
            cur[j] = c
        prev2 = prev
        prev = cur
    return prev[m]


def _weighted_vector(ca: np.ndarray, cb: np.ndarray, model: CostModel) -> float:
    # Constant substitution cost only; same prefix-min structure as the
    # unit kernels with slope insert_cost.
    m = len(cb)
    ins, dele = model.insert_cost, model.delete_cost
    slope = ins * np.arange(m + 1, dtype=np.float64)
    prev2 = np.empty(m + 1, dtype=np.float64)
    prev = slope.copy()
    cand = np.empty(m + 1, dtype=np.float64)
    for i in range(1, len(ca) + 1):
        ai = ca[i - 1]
        cand[0] = i * dele
        np.minimum(
            prev[1:] + dele,
            prev[:-1] + np.where(cb == ai, 0.0, model.substitute_cost),
            out=cand[1:],
        )
        if model.transpositions_enabled and i > 1 and m > 1:
            swap = (cb[: m - 1] == ai) & (cb[1:m] == ca[i - 2])
            np.minimum(
                cand[2:],
                np.where(swap, prev2[: m - 1] + model.transpose_cost, np.inf),
                out=cand[2:],
            )
        cand -= slope
        np.minimum.accumulate(cand, out=cand)
        cand += slope
        prev2, prev, cand = prev, cand, prev2
    return float(prev[m])


def weighted_distance(a: SymbolsLike, b: SymbolsLike, model: CostModel | None = None) -> float:
    """Minimal total edit cost between two traces under ``model``.

    With the default model (all unit costs, transpositions on) this is
    exactly ``damerau_levenshtein_osa`` as a float. A callable
    substitution cost receives the two candidate ``TraceStep`` objects,
    which is how parameter values enter the distance; see
    ``parameter_substitution_cost``.
    """
    if model is None:
        model = CostModel()
    model.validate()
    if callable(model.substitute_cost):
        steps_a, steps_b = _as_steps(a), _as_steps(b)
        if not steps_a and not steps_b:
            return 0.0
        return _weighted_scalar(steps_a, steps_b, model, model.substitute_cost)
    sa, sb = _as_symbols(a), _as_symbols(b)
    if len(sa) < len(sb):
        # Transforming a into b swaps roles of insertion and deletion.
        sa, sb = sb, sa
        model = CostModel(
            insert_cost=model.delete_cost,
            delete_cost=model.insert_cost,
            substitute_cost=model.substitute_cost,
            transpose_cost=model.transpose_cost,
            transpositions_enabled=model.transpositions_enabled,
        )
    if not sb:
        return len(sa) * model.delete_cost
    if len(sa) * len(sb) < _VECTOR_CUTOVER_CELLS:
        steps_a = tuple(TraceStep(t=0.0, symbol=s) for s in sa)
        steps_b = tuple(TraceStep(t=0.0, symbol=s) for s in sb)
        return _weighted_scalar(steps_a, steps_b, model, None)
    return _weighted_vector(*_codes(sa, sb), model)


def normalize_raw(raw: float, len_a: int, len_b: int, variant: NormalizationVariant) -> float:
    """Scale a raw distance between sequences of the given lengths into [0, 1].

    Two empty sequences normalize to 0.0. Cost models with per-operation
    costs above 1 can push the raw ratio past 1; the result is clamped
    so downstream score bands stay total.
    """
    if len_a == 0 and len_b == 0:
        return 0.0
    if variant is NormalizationVariant.MAX_LENGTH:
        ratio = raw / max(len_a, len_b)
    elif variant is NormalizationVariant.SUM_LENGTH:
        ratio = raw / (len_a + len_b)
    else:
        ratio = 2.0 * raw / (len_a + len_b + raw) if raw else 0.0
    return min(1.0, max(0.0, ratio))


def normalized_distance(
    a: SymbolsLike,
    b: SymbolsLike,
    variant: NormalizationVariant = NormalizationVariant.MAX_LENGTH,
    model: CostModel | None = None,
) -> float:
    """Distance scaled into [0, 1]; 0.0 for two empty sequences.

    Under unit costs the result is 0 exactly when the sequences are
    identical, and 1 for equal-length sequences with disjoint symbols
    under MAX_LENGTH.
    """
    sa, sb = _as_symbols(a), _as_symbols(b)
    if model is None:
        dist = float(damerau_levenshtein_osa(sa, sb))
    else:
        dist = weighted_distance(a, b, model)
    return normalize_raw(dist, len(sa), len(sb), variant)


def brute_force_distance(
    a: SymbolsLike, b: SymbolsLike, model: CostModel | None = None
) -> float:
    """Exact minimal cost by naive exhaustive recursion. Test oracle only.

    Explores every edit script directly from the operation definitions,
    with no memoization and no shared code with the DP kernels. Inputs
    longer than 8 symbols raise InputTooLarge; the recursion is
    exponential by design.
    """
    if model is None:
        model = CostModel()
    model.validate()
    steps_a, steps_b = _as_steps(a), _as_steps(b)
    if len(steps_a) > 8 or len(steps_b) > 8:
        raise InputTooLarge(
            f"oracle accepts at most 8 symbols per side, got {len(steps_a)} and {len(steps_b)}"
        )
    raw_sub = model.substitute_cost
    if callable(raw_sub):
        sub: SubstituteCost = raw_sub
    else:
        const = raw_sub

        def sub(x: TraceStep, y: TraceStep) -> float:
            return 0.0 if x.symbol == y.symbol else const

    ins, dele, tr = model.insert_cost, model.delete_cost, model.transpose_cost
    trans = model.transpositions_enabled

    def explore(i: int, j: int) -> float:
        if i == 0 and j == 0:
            return 0.0
        best = math.inf
        if i > 0:
            best = explore(i - 1, j) + dele
        if j > 0:
            cost = explore(i, j - 1) + ins
            if cost < best:
                best = cost
        if i > 0 and j > 0:
            cost = explore(i - 1, j - 1) + sub(steps_a[i - 1], steps_b[j - 1])
            if cost < best:
                best = cost
            if (
                trans
                and i > 1
                and j > 1
                and steps_a[i - 1].symbol == steps_b[j - 2].symbol
                and steps_a[i - 2].symbol == steps_b[j - 1].symbol
            ):
                cost = explore(i - 2, j - 2) + tr
                if cost < best:
                    best = cost
        return best

    return explore(len(steps_a), len(steps_b))


def parameter_substitution_cost(catalog: BehaviorCatalog) -> SubstituteCost:
    """Build the parameter-aware substitution cost for ``catalog``.

    Steps with different symbols cost 1.0. Steps sharing a symbol cost
    the mean, over subactions present in both steps, of |delta| divided
    by the schema range, each term clamped to [0, 1]. No shared
    subactions (or a symbol the catalog does not know) costs 0.0, so
    identical steps are always free.
    """

    def cost(x: TraceStep, y: TraceStep) -> float:
        if x.symbol != y.symbol:
            return 1.0
        action = catalog.action_by_symbol(x.symbol)
        if action is None:
            return 0.0
        terms: list[float] = []
        for sub in action.subactions:
            vx = x.params.get(sub.name)
            vy = y.params.get(sub.name)
            if vx is None or vy is None:
                continue
            span = sub.max - sub.min
            if span == 0:
                terms.append(0.0 if vx == vy else 1.0)
            else:
                terms.append(min(1.0, abs(vx - vy) / span))
        return sum(terms) / len(terms) if terms else 0.0

    return cost

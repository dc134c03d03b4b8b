"""Rating and ranking aggregation: means, Borda scores, Kendall's W,
cut-off selection, reduction rates, and the round-gate decision table.

Everything in this module is a pure function of its arguments; no workshop
state is touched. Numbers are plain Python floats; exports that need fixed
rendering format them downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    AfterExceedsBefore,
    EmptyInput,
    InvalidAgenda,
    MalformedBallot,
    TooFewItems,
    TooFewRankers,
)

GATE_CONVERGED = "Converged"
GATE_ITERATE = "Iterate"
GATE_BUDGET_STOP = "BudgetStop"


@dataclass(frozen=True)
class ConvergencePolicy:
    """Thresholds steering the gate decision at the end of each round.

    ``w_min`` is the concordance level treated as agreement, ``max_rounds``
    the evaluation-round budget, and ``min_elimination_fraction`` a
    report-only stagnation marker (it never changes the decision).
    """

    w_min: float = 0.6
    max_rounds: int = 2
    min_elimination_fraction: float = 0.1

    def validate(self) -> None:
        if not 0.0 <= self.w_min <= 1.0:
            raise InvalidAgenda(f"w_min must be in [0,1], got {self.w_min}")
        if self.max_rounds < 0:
            raise InvalidAgenda(f"max_rounds must be >= 0, got {self.max_rounds}")
        if not 0.0 <= self.min_elimination_fraction <= 1.0:
            raise InvalidAgenda(
                f"min_elimination_fraction must be in [0,1], got {self.min_elimination_fraction}"
            )


@dataclass
class ConvergenceReport:
    """Per-round concordance summary feeding the gate."""

    round_index: int
    kendall_w: float
    eliminated_fraction: float
    decision: str
    stagnant: bool = False

    def to_dict(self) -> dict:
        return {
            "round_index": self.round_index,
            "kendall_w": self.kendall_w,
            "eliminated_fraction": self.eliminated_fraction,
            "decision": self.decision,
            "stagnant": self.stagnant,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConvergenceReport":
        return cls(
            round_index=int(d["round_index"]),
            kendall_w=float(d["kendall_w"]),
            eliminated_fraction=float(d["eliminated_fraction"]),
            decision=str(d["decision"]),
            stagnant=bool(d.get("stagnant", False)),
        )


def mean_rating(values: Iterable[int]) -> float:
    """Arithmetic mean of a non-empty collection of scale ratings."""
    vals = list(values)
    if not vals:
        raise EmptyInput("mean_rating over an empty collection")
    return sum(vals) / len(vals)


def borda_scores(
    rankings: Mapping[str, Sequence[str]],
    top_k: int,
    items: Iterable[str],
) -> dict[str, float]:
    """Positional Borda points summed over ballots.

    Each ballot is an ordered list of at most ``top_k`` distinct items; the
    item in position r (1-based) earns ``top_k + 1 - r`` points, items left
    off a ballot earn nothing from it. Every item in ``items`` appears in
    the result, unranked items with score 0.
    """
    item_set = set(items)
    scores: dict[str, float] = {item: 0.0 for item in item_set}
    for alias, ballot in rankings.items():
        if len(ballot) > top_k:
            raise MalformedBallot(f"ballot of {alias} ranks {len(ballot)} items, top_k={top_k}")
        if len(set(ballot)) != len(ballot):
            raise MalformedBallot(f"ballot of {alias} repeats an item")
        for pos, item in enumerate(ballot, start=1):
            if item not in item_set:
                raise MalformedBallot(f"ballot of {alias} names unknown item {item!r}")
            scores[item] += top_k + 1 - pos
    return scores


def complete_rankings(
    rankings: Mapping[str, Sequence[str]],
    items: Sequence[str],
) -> dict[str, dict[str, float]]:
    """Expand partial ballots to full rank vectors over ``items``.

    A ballot ranking k of n items assigns ranks 1..k as cast; the n-k
    unranked items all receive the mid rank (k+1+n)/2, i.e. the average of
    the positions they jointly occupy. This adds no preference among the
    items a participant did not rank.
    """
    n = len(items)
    out: dict[str, dict[str, float]] = {}
    for alias, ballot in rankings.items():
        k = len(ballot)
        fill = (k + 1 + n) / 2
        vec = {item: fill for item in items}
        for pos, item in enumerate(ballot, start=1):
            vec[item] = float(pos)
        out[alias] = vec
    return out


def kendall_w(
    rankings: Mapping[str, Sequence[str]],
    items: Sequence[str],
) -> float:
    """Kendall's coefficient of concordance over m ballots and n items.

    W = 12S / (m^2 (n^3 - n)) with S the sum of squared deviations of the
    per-item rank sums R_i from their mean m(n+1)/2. Partial ballots are
    completed by mid-rank imputation first; no tie-correction term is
    applied. The result is clamped to [0, 1].
    """
    m = len(rankings)
    n = len(items)
    if m < 2:
        raise TooFewRankers(f"need at least 2 rankings, got {m}")
    if n < 2:
        raise TooFewItems(f"need at least 2 items, got {n}")
    completed = complete_rankings(rankings, items)
    mean_sum = m * (n + 1) / 2
    s = 0.0
    for item in items:
        r_i = sum(vec[item] for vec in completed.values())
        s += (r_i - mean_sum) ** 2
    w = 12.0 * s / (m * m * (n**3 - n))
    return min(1.0, max(0.0, w))


def cutoff_top(scores: Mapping[str, float], n: int) -> tuple[set[str], set[str]]:
    """Select the n top-scoring items; ties at the boundary survive too.

    Returns (selected, eliminated); the two sets partition the input and
    ties with the n-th score are never broken silently.
    """
    if n < 1:
        raise EmptyInput(f"cutoff size must be >= 1, got {n}")
    if not scores:
        raise EmptyInput("cutoff over an empty score map")
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    if n >= len(ordered):
        return set(scores), set()
    boundary = ordered[n - 1][1]
    selected = {item for item, score in ordered if score >= boundary}
    eliminated = set(scores) - selected
    return selected, eliminated


def reduction_rate(before: int, after: int) -> float:
    """Fraction of items removed going from ``before`` to ``after``."""
    if before <= 0:
        raise EmptyInput(f"before must be positive, got {before}")
    if after > before:
        raise AfterExceedsBefore(f"after={after} exceeds before={before}")
    return 1.0 - after / before


def decide(
    policy: ConvergencePolicy,
    round_number: int,
    kendall_w_value: float,
    eliminated_fraction: float,
) -> str:
    """Gate decision for a completed round.

    ``round_number`` counts completed evaluation rounds starting at 1.
    Concordance at or above ``w_min`` converges; otherwise the budget decides
    between another tour and stopping with the current list.
    ``eliminated_fraction`` is advisory only and never alters the outcome.
    """
    if kendall_w_value >= policy.w_min:
        return GATE_CONVERGED
    if round_number >= policy.max_rounds:
        return GATE_BUDGET_STOP
    return GATE_ITERATE


def low_discrimination(
    means: Iterable[float],
    band_width: float = 1.5,
    fraction: float = 0.75,
) -> bool:
    """Flag a round whose mean ratings bunch into a narrow band.

    True when at least ``fraction`` of the means fit inside some window of
    width ``band_width``. Report-only; the flag never alters the flow.
    """
    vals = sorted(means)
    if not vals:
        return False
    total = len(vals)
    hi = 0
    best = 0
    for lo in range(total):
        if hi < lo:
            hi = lo
        while hi + 1 < total and vals[hi + 1] <= vals[lo] + band_width:
            hi += 1
        best = max(best, hi - lo + 1)
    return best / total >= fraction

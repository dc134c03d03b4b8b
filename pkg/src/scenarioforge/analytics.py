"""Read-only behavioral analytics over committed workshop state.

Behavior snapshots captured at every rating/ranking close feed per-alias
time series, a rating-stability measure, per-round criteria distributions,
and knowledge-gain summaries. Nothing here mutates state.
"""

from __future__ import annotations

import csv
import io
from typing import Optional

from .errors import InsufficientHistory, TaggingDisabled, UnknownAlias
from .model import BehaviorSnapshot, StepKind, WorkshopState


def behavior_series(state: WorkshopState, alias: str) -> list[BehaviorSnapshot]:
    """Snapshots for one alias in (round, step) order; empty when none."""
    if alias not in state.participants:
        raise UnknownAlias(f"alias {alias!r} is not registered")
    kind_order = {StepKind.RATING: 0, StepKind.RANKING: 1}
    rows = [s for s in state.snapshots if s.alias == alias]
    rows.sort(key=lambda s: (s.round_index, kind_order.get(s.step_kind, 2)))
    return rows


def stability(state: WorkshopState, alias: str, items: Optional[set[str]] = None) -> float:
    """Mean absolute rating change over consecutive rounds.

    Only items present in both rounds of a pair count; pair means are then
    averaged. Zero means the participant never moved on any shared item.
    """
    series = [s for s in behavior_series(state, alias) if s.step_kind == StepKind.RATING]
    if len(series) < 2:
        raise InsufficientHistory(f"{alias} has {len(series)} rating snapshots, need at least 2")
    pair_means = []
    for prev, cur in zip(series, series[1:]):
        common = set(prev.vector) & set(cur.vector)
        if items is not None:
            common &= items
        if not common:
            continue
        pair_means.append(sum(abs(cur.vector[i] - prev.vector[i]) for i in common) / len(common))
    if not pair_means:
        raise InsufficientHistory(f"{alias} has no overlapping items across rounds")
    return sum(pair_means) / len(pair_means)


def criteria_distribution(state: WorkshopState, round_index: int) -> dict:
    """Fractions of tagged rating submissions per criterion for one round."""
    if state.agenda is None or not state.agenda.criteria:
        raise TaggingDisabled("the agenda configures no criteria list")
    rnd = state.round(round_index)
    tags = list(rnd.criterion_tags.values()) if rnd else []
    submitted = len(rnd.ratings) if rnd else 0
    counts: dict[str, int] = {}
    for tag in tags:
        counts[tag] = counts.get(tag, 0) + 1
    total = len(tags)
    return {
        "round_index": round_index,
        "fractions": {label: counts[label] / total for label in sorted(counts)} if total else {},
        "tagged": total,
        "untagged": submitted - total,
    }


def criteria_shift(state: WorkshopState) -> list[dict]:
    """Per-round distributions plus the dominant criterion of each round."""
    out = []
    for rnd in state.rounds:
        dist = criteria_distribution(state, rnd.index)
        fractions = dist["fractions"]
        dominant = None
        if fractions:
            top = max(fractions.values())
            dominant = sorted(label for label, f in fractions.items() if f == top)[0]
        dist["dominant"] = dominant
        out.append(dist)
    return out


def knowledge_gain_summary(state: WorkshopState) -> dict:
    """Mean self-ranked knowledge gain per assessment step plus alias series."""
    step_order = [s.id for s in state.steps if s.kind == StepKind.SELF_ASSESSMENT]
    per_step: dict[str, dict] = {}
    for step_id in step_order:
        values = [a.knowledge_gain for a in state.assessments.values() if a.step_id == step_id]
        per_step[step_id] = {
            "mean": sum(values) / len(values) if values else None,
            "count": len(values),
        }
    per_alias: dict[str, list] = {}
    for step_id in step_order:
        for a in state.assessments.values():
            if a.step_id == step_id:
                per_alias.setdefault(a.alias, []).append(
                    {"step_id": step_id, "knowledge_gain": a.knowledge_gain}
                )
    return {"per_step": per_step, "per_alias": per_alias}


# ---- CSV renderings ----


def snapshots_csv(state: WorkshopState) -> str:
    """One row per (alias, round, step, item, value)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alias", "round", "step", "item", "value"])
    kind_order = {StepKind.RATING: 0, StepKind.RANKING: 1}
    rows = sorted(
        state.snapshots,
        key=lambda s: (s.round_index, kind_order.get(s.step_kind, 2), s.alias),
    )
    for snap in rows:
        for item in sorted(snap.vector, key=lambda i: (len(i), i)):
            writer.writerow(
                [snap.alias, snap.round_index, snap.step_kind.value, item, _fmt(snap.vector[item])]
            )
    return buf.getvalue()


def criteria_csv(state: WorkshopState) -> str:
    """One row per (round, criterion, fraction)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "criterion", "fraction"])
    for dist in criteria_shift(state):
        for label, fraction in dist["fractions"].items():
            writer.writerow([dist["round_index"], label, _fmt(fraction)])
    return buf.getvalue()


def knowledge_csv(state: WorkshopState) -> str:
    """One row per (alias, step, knowledge_gain)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alias", "step", "knowledge_gain"])
    summary = knowledge_gain_summary(state)
    for alias in sorted(summary["per_alias"], key=lambda a: (len(a), a)):
        for row in summary["per_alias"][alias]:
            writer.writerow([alias, row["step_id"], row["knowledge_gain"]])
    return buf.getvalue()


def _fmt(value: float) -> str:
    return f"{value:.9f}"

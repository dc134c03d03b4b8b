"""Workshop export documents: full record, ratings CSV, chat log, and the
scenario outline.

Exports are pure functions of (state, format, disclose); regenerating one
from the same event log yields identical bytes. Statement and node
authorship stays hidden unless the facilitator discloses, in which case an
audit table mapping submissions back to aliases is included.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

from . import analytics
from .errors import EmptyInput, NotFacilitator
from .model import NodeKind, Role, StepKind, WorkshopState

FORMATS = ("full-record", "ratings-csv", "chat-log", "scenario-outline")


def export(state: WorkshopState, format: str, disclose: bool = False, actor_role: Role | None = None) -> str:
    """Render one export document; ``disclose`` requires the facilitator."""
    if disclose and actor_role != Role.FACILITATOR:
        raise NotFacilitator("disclosure requires the facilitator")
    if format == "full-record":
        return _full_record(state, disclose)
    if format == "ratings-csv":
        return _ratings_csv(state)
    if format == "chat-log":
        return _chat_log(state)
    if format == "scenario-outline":
        return _scenario_outline(state)
    raise EmptyInput(f"unknown export format {format!r}; expected one of {', '.join(FORMATS)}")


def _iso(ms: int) -> str:
    dt = datetime.fromtimestamp(ms / 1000, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


def _fnum(value: float) -> float:
    return float(f"{float(value):.9f}")


def _idkey(identifier: str) -> tuple[int, str]:
    return (len(identifier), identifier)


def _full_record(state: WorkshopState, disclose: bool) -> str:
    doc = {
        "workshop": {
            "id": state.id,
            "title": state.title,
            "created_at": _iso(state.created_at),
            "phase": state.phase.value,
            "phase_history": [p.value for p in state.phase_history],
            "issue_areas": [{"label": a.label, "keywords": a.keywords} for a in state.issue_areas],
            "criteria": state.agenda.criteria if state.agenda else [],
            "final_items": state.final_items,
        },
        "participants": [
            {"alias": p.alias, "role": p.role.value, "group_label": p.group_label}
            for p in sorted(state.participants.values(), key=lambda p: _idkey(p.alias))
        ],
        "statements": [
            {
                "id": s.id,
                "text": s.text,
                "status": s.status.value,
                "area": s.area,
                "merged_from": sorted(s.merged_from, key=_idkey),
            }
            for s in sorted(state.statements.values(), key=lambda s: _idkey(s.id))
        ],
        "rounds": [
            {
                "index": r.index,
                "item_ids": r.item_ids,
                "mean_ratings": {i: _fnum(v) for i, v in sorted(r.mean_ratings.items(), key=lambda kv: _idkey(kv[0]))},
                "borda": {i: _fnum(v) for i, v in sorted(r.borda.items(), key=lambda kv: _idkey(kv[0]))},
                "cutoff_scores": {
                    i: _fnum(v) for i, v in sorted(r.cutoff_scores.items(), key=lambda kv: _idkey(kv[0]))
                },
                "eliminated": sorted(r.eliminated, key=_idkey),
                "low_discrimination": r.low_discrimination,
                "ratings_submitted": len(r.ratings),
                "rankings_submitted": len(r.rankings),
                "convergence": r.convergence.to_dict() if r.convergence else None,
            }
            for r in state.rounds
        ],
        "chat": [{"seq": m.seq, "alias": m.alias, "at": _iso(m.at), "text": m.text} for m in state.chat],
        "scenario_forest": _forest(state, disclose),
        "scenarios": [
            {
                "id": sc.id,
                "label": sc.label,
                "visions": sc.vision_ids,
                "member_nodes": sc.member_nodes,
                "narrative": sc.narrative,
            }
            for sc in sorted(state.scenarios.values(), key=lambda sc: _idkey(sc.id))
        ],
        "uncovered_visions": state.uncovered_visions,
        "analytics": {
            "criteria_shift": _criteria_shift_or_none(state),
            "knowledge_gain": analytics.knowledge_gain_summary(state),
        },
    }
    if disclose:
        doc["audit"] = {
            "statements": [
                {"id": s.id, "author_alias": s.author_alias}
                for s in sorted(state.statements.values(), key=lambda s: _idkey(s.id))
                if s.author_alias is not None
            ],
            "nodes": [
                {"id": n.id, "author_alias": n.author_alias}
                for n in sorted(state.nodes.values(), key=lambda n: _idkey(n.id))
            ],
        }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _criteria_shift_or_none(state: WorkshopState):
    if state.agenda is None or not state.agenda.criteria:
        return None
    return analytics.criteria_shift(state)


def _forest(state: WorkshopState, disclose: bool) -> list[dict]:
    def node_doc(node_id: str) -> dict:
        node = state.nodes[node_id]
        doc = {
            "id": node.id,
            "kind": node.kind.value,
            "text": node.text,
            "children": [
                node_doc(child.id)
                for child in sorted(state.children_of(node.id), key=lambda n: _idkey(n.id))
            ],
        }
        if disclose:
            doc["author_alias"] = node.author_alias
        return doc

    roots = sorted(
        (n for n in state.nodes.values() if n.parent is None), key=lambda n: _idkey(n.id)
    )
    return [node_doc(r.id) for r in roots]


def _ratings_csv(state: WorkshopState) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alias", "round", "step", "item", "value"])
    kind_order = {StepKind.RATING: 0, StepKind.RANKING: 1}
    rows = sorted(
        state.snapshots,
        key=lambda s: (s.round_index, kind_order.get(s.step_kind, 2), _idkey(s.alias)),
    )
    for snap in rows:
        for item in sorted(snap.vector, key=_idkey):
            writer.writerow(
                [snap.alias, snap.round_index, snap.step_kind.value, item, f"{snap.vector[item]:.9f}"]
            )
    return buf.getvalue()


def _chat_log(state: WorkshopState) -> str:
    lines = [
        json.dumps(
            {"seq": m.seq, "alias": m.alias, "at": _iso(m.at), "text": m.text},
            sort_keys=True,
            ensure_ascii=False,
        )
        for m in state.chat
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _scenario_outline(state: WorkshopState) -> str:
    out = io.StringIO()

    def walk(node_id: str, depth: int) -> None:
        node = state.nodes[node_id]
        out.write("  " * depth + f"{node.kind.value} {node.id}: {node.text}\n")
        for child in sorted(state.children_of(node_id), key=lambda n: _idkey(n.id)):
            walk(child.id, depth + 1)

    scenarios = sorted(state.scenarios.values(), key=lambda sc: _idkey(sc.id))
    for sc in scenarios:
        out.write(f"Scenario {sc.id}: {sc.label}\n")
        if sc.narrative:
            out.write(f"  Narrative: {sc.narrative}\n")
        for vid in sc.vision_ids:
            walk(vid, 1)
    covered = {vid for sc in scenarios for vid in sc.vision_ids}
    loose = [
        n for n in sorted(state.nodes.values(), key=lambda n: _idkey(n.id))
        if n.kind == NodeKind.VISION and n.id not in covered
    ]
    if loose:
        out.write("Unassigned visions\n")
        for node in loose:
            walk(node.id, 1)
    return out.getvalue()

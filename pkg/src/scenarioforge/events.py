"""Event envelope, deterministic replay, and the canonical state hash.

A workshop's durable form is its event log: a dense ``seq`` sequence of
immutable records. ``replay`` folds a log into state and fails loudly, with
the offending sequence number, on any gap or schema violation. The state
hash digests a canonical serialization with sorted keys, 9-decimal float
rendering, and no timestamps, so two replays of one log always agree byte
for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional

from . import engine, scenario
from .errors import CorruptLog
from .model import WorkshopState, apply_participant_joined, apply_phase_advanced, apply_workshop_created


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    at: int
    actor: Optional[str]
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "at": self.at, "actor": self.actor, "payload": self.payload}

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Event":
        return cls(
            seq=int(d["seq"]),
            kind=str(d["kind"]),
            at=int(d["at"]),
            actor=d.get("actor"),
            payload=dict(d["payload"]),
        )


Applier = Callable[[WorkshopState, Mapping[str, Any], int], None]

_APPLIERS: dict[str, Applier] = {
    "workshop_created": apply_workshop_created,
    "participant_joined": apply_participant_joined,
    "phase_advanced": apply_phase_advanced,
    "step_opened": engine.apply_step_opened,
    "step_closed": engine.apply_step_closed,
    "ideas_submitted": engine.apply_ideas_submitted,
    "merge_plan_applied": engine.apply_merge_plan_applied,
    "ratings_submitted": engine.apply_ratings_submitted,
    "ranking_submitted": engine.apply_ranking_submitted,
    "chat_message": engine.apply_chat_message,
    "self_assessment_submitted": engine.apply_self_assessment_submitted,
    "gate_decision": engine.apply_gate_decision,
    "list_updated": engine.apply_list_updated,
    "scenario_node_added": scenario.apply_scenario_node_added,
    "guard_warning": scenario.apply_guard_warning,
    "scenarios_composed": scenario.apply_scenarios_composed,
}

EVENT_KINDS = frozenset(_APPLIERS)


def apply_event(state: WorkshopState, event: Event) -> None:
    """Fold one committed event into the state; raises CorruptLog on schema errors."""
    applier = _APPLIERS.get(event.kind)
    if applier is None:
        raise CorruptLog(f"unknown event kind {event.kind!r} at seq {event.seq}", seq=event.seq)
    try:
        applier(state, event.payload, event.at)
    except (KeyError, TypeError, ValueError, AssertionError) as exc:
        raise CorruptLog(f"malformed {event.kind} payload at seq {event.seq}: {exc}", seq=event.seq) from exc


def replay(events: Iterable[Event | Mapping[str, Any]]) -> tuple[WorkshopState, str]:
    """Deterministically fold an event log into (state, state_hash).

    The log must start at seq 1 and be dense; the first gap or malformed
    record raises :class:`CorruptLog` naming the offending seq.
    """
    state = WorkshopState()
    expected = 1
    for raw in events:
        event = raw if isinstance(raw, Event) else Event.from_dict(raw)
        if event.seq != expected:
            raise CorruptLog(
                f"sequence gap: expected seq {expected}, found {event.seq}", seq=expected
            )
        apply_event(state, event)
        expected += 1
    return state, state_hash(state)


def parse_log(text: str) -> list[Event]:
    """Parse a newline-delimited event log; bad JSON raises CorruptLog."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(Event.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(f"unparsable event at line {lineno}: {exc}", seq=lineno) from exc
    return events


# ---- canonical serialization ----


def _fnum(value: float) -> str:
    return f"{float(value):.9f}"


def _sorted_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=lambda i: (len(i), i))


def canonical_state(state: WorkshopState) -> dict:
    """Timestamp-free canonical view of the state for hashing and diffing."""
    agenda = state.agenda.to_dict() if state.agenda else None
    return {
        "id": state.id,
        "title": state.title,
        "phase": state.phase.value,
        "phase_history": [p.value for p in state.phase_history],
        "agenda": agenda,
        "issue_areas": [{"label": a.label, "keywords": list(a.keywords)} for a in state.issue_areas],
        "participants": [
            {
                "alias": p.alias,
                "role": p.role.value,
                "group_label": p.group_label,
                "token": p.token,
            }
            for p in sorted(state.participants.values(), key=lambda p: (len(p.alias), p.alias))
        ],
        "statements": [
            {
                "id": s.id,
                "text": s.text,
                "author_alias": s.author_alias,
                "status": s.status.value,
                "area": s.area,
                "merged_from": _sorted_ids(s.merged_from),
            }
            for s in sorted(state.statements.values(), key=lambda s: (len(s.id), s.id))
        ],
        "steps": [
            {
                "id": s.id,
                "kind": s.kind.value,
                "phase": s.phase.value,
                "round_index": s.round_index,
                "state": s.state.value,
                "params": s.params,
            }
            for s in state.steps
        ],
        "current_step": state.current_step,
        "rounds": [
            {
                "index": r.index,
                "item_ids": list(r.item_ids),
                "ratings": {
                    alias: {item: r.ratings[alias][item] for item in _sorted_ids(r.ratings[alias])}
                    for alias in sorted(r.ratings)
                },
                "rankings": {alias: list(r.rankings[alias]) for alias in sorted(r.rankings)},
                "criterion_tags": {alias: r.criterion_tags[alias] for alias in sorted(r.criterion_tags)},
                "mean_ratings": {i: _fnum(r.mean_ratings[i]) for i in _sorted_ids(r.mean_ratings)},
                "borda": {i: _fnum(r.borda[i]) for i in _sorted_ids(r.borda)},
                "cutoff_scores": {i: _fnum(r.cutoff_scores[i]) for i in _sorted_ids(r.cutoff_scores)},
                "eliminated": _sorted_ids(r.eliminated),
                "low_discrimination": r.low_discrimination,
                "convergence": (
                    {
                        "round_index": r.convergence.round_index,
                        "kendall_w": _fnum(r.convergence.kendall_w),
                        "eliminated_fraction": _fnum(r.convergence.eliminated_fraction),
                        "decision": r.convergence.decision,
                        "stagnant": r.convergence.stagnant,
                    }
                    if r.convergence
                    else None
                ),
            }
            for r in state.rounds
        ],
        "chat": [{"seq": m.seq, "alias": m.alias, "text": m.text} for m in state.chat],
        "assessments": [
            {
                "alias": a.alias,
                "step_id": a.step_id,
                "knowledge_gain": a.knowledge_gain,
                "comment": a.comment,
            }
            for a in sorted(state.assessments.values(), key=lambda a: (a.step_id, a.alias))
        ],
        "snapshots": [
            {
                "alias": s.alias,
                "round_index": s.round_index,
                "step_kind": s.step_kind.value,
                "vector": {i: _fnum(s.vector[i]) for i in _sorted_ids(s.vector)},
            }
            for s in state.snapshots
        ],
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "text": n.text,
                "parent": n.parent,
                "author_alias": n.author_alias,
            }
            for n in sorted(state.nodes.values(), key=lambda n: (len(n.id), n.id))
        ],
        "scenarios": [
            {
                "id": sc.id,
                "label": sc.label,
                "visions": list(sc.vision_ids),
                "member_nodes": list(sc.member_nodes),
                "narrative": sc.narrative,
            }
            for sc in sorted(state.scenarios.values(), key=lambda sc: (len(sc.id), sc.id))
        ],
        "uncovered_visions": list(state.uncovered_visions),
        "guard_warnings": state.guard_warnings,
        "final_items": list(state.final_items) if state.final_items is not None else None,
        "counters": dict(sorted(state.counters.items())),
        "chat_seq": state.chat_seq,
    }


def state_hash(state: WorkshopState) -> str:
    """SHA-256 over the canonical serialization."""
    doc = json.dumps(canonical_state(state), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()

"""Critique-phase orchestration: step lifecycle, submissions, aggregation
at close, chat, self-assessment, and the round gate.

Commands validate against :class:`~scenarioforge.model.WorkshopState` and
return event drafts; the ``apply_*`` functions fold committed events back
in. Aggregates are computed once, in the closing command, and travel inside
the event payload so a replayed log reproduces them bit for bit.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional

from . import aggregation
from .errors import (
    AlreadyOpen,
    DuplicateItem,
    EmptyText,
    NoReport,
    NotStakeholder,
    NothingOpen,
    NotFacilitator,
    OutOfOrder,
    OutOfScale,
    OverlappingGroups,
    StepClosed,
    TaggingDisabled,
    TextTooLong,
    TooMany,
    UnknownArea,
    UnknownCriterion,
    UnknownItem,
    UnknownStatement,
)
from .model import (
    MAX_CHAT_CHARS,
    MAX_STATEMENT_CHARS,
    OTHERS_LABEL,
    BehaviorSnapshot,
    ChatMessage,
    EvaluationRound,
    EventDraft,
    Phase,
    Role,
    Statement,
    StatementStatus,
    Step,
    StepKind,
    StepState,
    WorkshopState,
    assessment_key,
    require_facilitator,
    step_instances,
)


def _num_key(identifier: str) -> tuple[int, str]:
    return (len(identifier), identifier)


def _open_step_of_kind(state: WorkshopState, kind: StepKind) -> Step:
    step = state.open_step()
    if step is None or step.kind != kind:
        raise StepClosed(f"no {kind.value} step is open")
    return step


def _check_deadline(step: Step, now: int) -> None:
    if step.deadline is not None and now >= step.deadline:
        raise StepClosed(f"step {step.id} deadline has passed")


# ---- step lifecycle ----


def cmd_open_step(state: WorkshopState, now: int, actor_alias: str, kind: StepKind) -> list[EventDraft]:
    """Open the next pending step of the current phase; order is agenda order."""
    require_facilitator(state, actor_alias)
    if state.open_step() is not None:
        raise AlreadyOpen(f"step {state.open_step().id} is still open")
    if kind == StepKind.DELPHI_GATE:
        raise OutOfOrder("the gate runs atomically via the gate operation")
    nxt = state.next_pending_step()
    if nxt is None:
        raise OutOfOrder(f"no pending steps remain in phase {state.phase.value}")
    if nxt.kind != kind:
        raise OutOfOrder(f"next step is {nxt.kind.value} ({nxt.id}), not {kind.value}")
    payload: dict[str, Any] = {
        "step_id": nxt.id,
        "kind": nxt.kind.value,
        "round_index": nxt.round_index,
        "deadline": now + nxt.time_limit * 1000 if nxt.time_limit else None,
    }
    if kind == StepKind.RATING and state.round(nxt.round_index) is None:
        payload["round_items"] = state.active_item_ids()
    return [EventDraft(kind="step_opened", payload=payload, actor=actor_alias)]


def cmd_close_step(
    state: WorkshopState,
    now: int,
    actor_alias: Optional[str],
    n_override: Optional[int] = None,
    reason: str = "facilitator",
) -> list[EventDraft]:
    """Close the open step; Rating/Ranking/CutOff closes aggregate and eliminate.

    A missing or non-facilitator actor is accepted only once the step's
    deadline has elapsed (deadline expiry closes with whatever came in).
    """
    step = state.open_step()
    if step is None:
        raise NothingOpen("no step is open")
    deadline_passed = step.deadline is not None and now >= step.deadline
    if not deadline_passed:
        if actor_alias is None:
            raise NotFacilitator("only the facilitator may close before the deadline")
        require_facilitator(state, actor_alias)
    return _close_drafts(state, step, now, actor_alias, n_override, reason)


def cmd_cutoff(state: WorkshopState, now: int, actor_alias: str, n: int) -> list[EventDraft]:
    """Run the hard cut-off: top-n survive (boundary ties included).

    Applies to the open CutOff step, or opens the pending one first so the
    facilitator can fire the cut in a single call.
    """
    require_facilitator(state, actor_alias)
    if n < 1:
        raise OutOfScale(f"cutoff size must be >= 1, got {n}")
    drafts: list[EventDraft] = []
    step = state.open_step()
    if step is not None:
        if step.kind != StepKind.CUT_OFF:
            raise AlreadyOpen(f"step {step.id} ({step.kind.value}) is open; close it first")
    else:
        nxt = state.next_pending_step()
        if nxt is None or nxt.kind != StepKind.CUT_OFF:
            raise OutOfOrder("no CutOff step is open or next")
        step = nxt
        drafts.append(
            EventDraft(
                kind="step_opened",
                payload={
                    "step_id": step.id,
                    "kind": step.kind.value,
                    "round_index": step.round_index,
                    "deadline": None,
                },
                actor=actor_alias,
            )
        )
    drafts.extend(_close_drafts(state, step, now, actor_alias, n, "facilitator"))
    return drafts


def _close_drafts(
    state: WorkshopState,
    step: Step,
    now: int,
    actor_alias: Optional[str],
    n_override: Optional[int],
    reason: str,
) -> list[EventDraft]:
    result: dict[str, Any] = {}
    extra: list[EventDraft] = []
    rnd = state.round(step.round_index)

    if step.kind == StepKind.RATING and rnd is not None:
        means = {
            item: aggregation.mean_rating(
                [vec[item] for vec in rnd.ratings.values() if item in vec]
            )
            for item in rnd.item_ids
            if any(item in vec for vec in rnd.ratings.values())
        }
        result = {
            "mean_ratings": means,
            "low_discrimination": aggregation.low_discrimination(means.values()),
            "snapshots": [
                {"alias": alias, "vector": {k: float(v) for k, v in vec.items()}}
                for alias, vec in sorted(rnd.ratings.items(), key=lambda kv: _num_key(kv[0]))
            ],
            "submitted": len(rnd.ratings),
        }

    elif step.kind == StepKind.RANKING and rnd is not None:
        assert state.agenda is not None
        borda = aggregation.borda_scores(rnd.rankings, state.agenda.top_k, rnd.item_ids)
        zero_support: list[str] = []
        if state.agenda.zero_support_elimination:
            ranked_anywhere = {item for ballot in rnd.rankings.values() for item in ballot}
            for item in rnd.item_ids:
                if item in ranked_anywhere or state.statements[item].status != StatementStatus.ACTIVE:
                    continue
                mean = rnd.mean_ratings.get(item)
                if mean is None or mean < 1.0:
                    zero_support.append(item)
        zero_support.sort(key=_num_key)
        result = {
            "borda": borda,
            "zero_support_eliminated": zero_support,
            "snapshots": [
                {
                    "alias": alias,
                    "vector": {item: float(pos) for pos, item in enumerate(ballot, start=1)},
                }
                for alias, ballot in sorted(rnd.rankings.items(), key=lambda kv: _num_key(kv[0]))
            ],
            "submitted": len(rnd.rankings),
        }
        if zero_support:
            survivors = [i for i in state.active_item_ids() if i not in zero_support]
            extra.append(
                EventDraft(
                    kind="list_updated",
                    payload={"active_items": survivors, "cause": "zero_support"},
                    actor=actor_alias,
                )
            )

    elif step.kind == StepKind.CUT_OFF and rnd is not None:
        assert state.agenda is not None
        candidates = [i for i in rnd.item_ids if state.statements[i].status == StatementStatus.ACTIVE]
        basis = state.agenda.cutoff_basis.value
        source = rnd.borda if basis == "borda" else rnd.mean_ratings
        scores = {item: float(source.get(item, 0.0)) for item in candidates}
        n = n_override if n_override is not None else step.params.get("n", state.agenda.cutoff_n)
        if n is None:
            n = len(candidates)
        if candidates:
            selected, eliminated = aggregation.cutoff_top(scores, int(n))
        else:
            selected, eliminated = set(), set()
        already_out = len(rnd.eliminated)
        total_out = already_out + len(eliminated)
        w_value = _round_concordance(state, rnd)
        fraction = total_out / len(rnd.item_ids) if rnd.item_ids else 0.0
        policy = state.agenda.policy
        decision = aggregation.decide(policy, rnd.index + 1, w_value, fraction)
        result = {
            "n": int(n),
            "basis": basis,
            "scores": scores,
            "selected": sorted(selected, key=_num_key),
            "eliminated": sorted(eliminated, key=_num_key),
            "report": {
                "round_index": rnd.index,
                "kendall_w": w_value,
                "eliminated_fraction": fraction,
                "decision": decision,
                "stagnant": fraction < policy.min_elimination_fraction,
            },
        }
        if eliminated:
            survivors = [i for i in state.active_item_ids() if i not in eliminated]
            extra.append(
                EventDraft(
                    kind="list_updated",
                    payload={"active_items": survivors, "cause": "cutoff"},
                    actor=actor_alias,
                )
            )

    elif step.kind == StepKind.IDEA_ENTRY:
        result = {"pool_size": len(state.statements_with_status(StatementStatus.RAW))}
    elif step.kind == StepKind.MERGE:
        result = {"active": len(state.active_item_ids())}
    elif step.kind == StepKind.CHAT:
        result = {"messages": len(state.chat)}
    elif step.kind == StepKind.SELF_ASSESSMENT:
        result = {"submitted": sum(1 for a in state.assessments.values() if a.step_id == step.id)}
    elif step.kind == StepKind.TREE_BUILD:
        result = {"nodes": len(state.nodes)}

    closed = EventDraft(
        kind="step_closed",
        payload={
            "step_id": step.id,
            "kind": step.kind.value,
            "round_index": step.round_index,
            "reason": reason,
            "result": result,
        },
        actor=actor_alias,
    )
    return [closed] + extra


def _round_concordance(state: WorkshopState, rnd: EvaluationRound) -> float:
    """Kendall W over the round's ballots; degenerate rounds get a fixed value.

    Fewer than two items means there is nothing to disagree about (1.0);
    fewer than two ballots means agreement is unknowable, reported as 0.0 so
    a silent round never converges by accident.
    """
    if len(rnd.item_ids) < 2:
        return 1.0
    if len(rnd.rankings) < 2:
        return 0.0
    return aggregation.kendall_w(rnd.rankings, rnd.item_ids)


def pending_deadline_close(state: WorkshopState, now: int) -> Optional[list[EventDraft]]:
    """Drafts closing an expired open step, or None when nothing expired."""
    step = state.open_step()
    if step is not None and step.deadline is not None and now >= step.deadline:
        return _close_drafts(state, step, now, None, None, "deadline")
    return None


# ---- submissions ----


def cmd_submit_ideas(state: WorkshopState, now: int, alias: str, texts: list[str]) -> list[EventDraft]:
    """Pool free-text concerns; exact duplicates from one alias are dropped."""
    step = _open_step_of_kind(state, StepKind.IDEA_ENTRY)
    _check_deadline(step, now)
    participant = state.participants[alias]
    if participant.role != Role.STAKEHOLDER:
        raise NotStakeholder("only stakeholders submit ideas")
    if not texts:
        raise EmptyText("no idea texts supplied")
    seen = {
        s.text for s in state.statements.values() if s.author_alias == alias and s.status == StatementStatus.RAW
    }
    accepted: list[str] = []
    rejected = 0
    for text in texts:
        cleaned = text.strip()
        if not cleaned:
            raise EmptyText("idea text is empty")
        if len(cleaned) > MAX_STATEMENT_CHARS:
            raise TextTooLong(f"idea text exceeds {MAX_STATEMENT_CHARS} characters")
        if cleaned in seen:
            rejected += 1
            continue
        seen.add(cleaned)
        accepted.append(cleaned)
    ids = state.peek_ids("statement", len(accepted))
    return [
        EventDraft(
            kind="ideas_submitted",
            payload={
                "alias": alias,
                "step_id": step.id,
                "statements": [{"id": sid, "text": text} for sid, text in zip(ids, accepted)],
                "rejected": rejected,
            },
            actor=alias,
        )
    ]


def cmd_apply_merge_plan(
    state: WorkshopState,
    now: int,
    actor_alias: str,
    groups: list[Mapping[str, Any]],
    singleton_areas: Optional[Mapping[str, str]] = None,
) -> list[EventDraft]:
    """Fold the raw pool into a consistent Active list.

    Each group entry ({members, heading, area}) becomes a fresh Active
    statement carrying merge provenance; raw statements outside the plan
    become Active singletons in the catch-all area unless pre-assigned via
    ``singleton_areas``.
    """
    require_facilitator(state, actor_alias)
    step = _open_step_of_kind(state, StepKind.MERGE)
    _check_deadline(step, now)
    singleton_areas = dict(singleton_areas or {})
    labels = set(state.area_labels())
    raw_ids = {s.id for s in state.statements_with_status(StatementStatus.RAW)}

    covered: set[str] = set()
    for group in groups:
        members = list(group.get("members") or [])
        if not members:
            raise EmptyText("merge group has no members")
        heading = str(group.get("heading") or "").strip()
        if not heading:
            raise EmptyText("merge group heading is empty")
        if len(heading) > MAX_STATEMENT_CHARS:
            raise TextTooLong(f"heading exceeds {MAX_STATEMENT_CHARS} characters")
        area = group.get("area") or OTHERS_LABEL
        if area not in labels:
            raise UnknownArea(f"area {area!r} is not a configured issue area")
        for member in members:
            if member not in state.statements:
                raise UnknownStatement(f"statement {member} does not exist")
            if member not in raw_ids:
                raise UnknownStatement(f"statement {member} is not a Raw statement")
            if member in covered:
                raise OverlappingGroups(f"statement {member} appears in more than one group")
            covered.add(member)

    for sid, area in singleton_areas.items():
        if sid not in state.statements:
            raise UnknownStatement(f"statement {sid} does not exist")
        if sid not in raw_ids:
            raise UnknownStatement(f"statement {sid} is not a Raw statement")
        if sid in covered:
            raise OverlappingGroups(f"statement {sid} is both grouped and singled out")
        if area not in labels:
            raise UnknownArea(f"area {area!r} is not a configured issue area")

    uncovered = sorted(raw_ids - covered, key=_num_key)
    new_ids = state.peek_ids("statement", len(groups))
    before = len(raw_ids)
    after = len(groups) + len(uncovered)
    rate = aggregation.reduction_rate(before, after) if before else 0.0

    group_payload = [
        {
            "id": new_id,
            "members": sorted(list(group["members"]), key=_num_key),
            "heading": str(group["heading"]).strip(),
            "area": group.get("area") or OTHERS_LABEL,
        }
        for new_id, group in zip(new_ids, groups)
    ]
    singleton_payload = [
        {"id": sid, "area": singleton_areas.get(sid, OTHERS_LABEL)} for sid in uncovered
    ]
    active_after = new_ids + uncovered
    return [
        EventDraft(
            kind="merge_plan_applied",
            payload={
                "step_id": step.id,
                "groups": group_payload,
                "singletons": singleton_payload,
                "reduction": {"before": before, "after": after, "rate": rate},
            },
            actor=actor_alias,
        ),
        EventDraft(
            kind="list_updated",
            payload={"active_items": active_after, "cause": "merge"},
            actor=actor_alias,
        ),
    ]


def cmd_submit_ratings(
    state: WorkshopState,
    now: int,
    alias: str,
    ratings: Mapping[str, int],
    criterion: Optional[str] = None,
) -> list[EventDraft]:
    """Store a 0..max importance rating map; resubmission replaces it whole."""
    step = _open_step_of_kind(state, StepKind.RATING)
    _check_deadline(step, now)
    assert state.agenda is not None
    if not ratings:
        raise EmptyText("ratings map is empty")
    rnd = state.round(step.round_index)
    assert rnd is not None
    scale = state.agenda.rating_scale_max
    for item, value in ratings.items():
        if item not in rnd.item_ids or state.statements[item].status != StatementStatus.ACTIVE:
            raise UnknownItem(f"item {item} is not under evaluation")
        if not isinstance(value, int) or not 0 <= value <= scale:
            raise OutOfScale(f"rating {value!r} outside 0..{scale}")
    if criterion is not None:
        if not state.agenda.criteria:
            raise TaggingDisabled("the agenda configures no criteria list")
        if criterion not in state.agenda.criteria:
            raise UnknownCriterion(f"criterion {criterion!r} is not configured")
    return [
        EventDraft(
            kind="ratings_submitted",
            payload={
                "alias": alias,
                "step_id": step.id,
                "round_index": rnd.index,
                "ratings": dict(ratings),
                "criterion": criterion,
            },
            actor=alias,
        )
    ]


def cmd_submit_ranking(state: WorkshopState, now: int, alias: str, items: list[str]) -> list[EventDraft]:
    """Store an ordered top-k ballot; position is rank, resubmission replaces."""
    step = _open_step_of_kind(state, StepKind.RANKING)
    _check_deadline(step, now)
    assert state.agenda is not None
    if len(items) > state.agenda.top_k:
        raise TooMany(f"ballot ranks {len(items)} items, top_k is {state.agenda.top_k}")
    if len(set(items)) != len(items):
        raise DuplicateItem("ballot repeats an item")
    rnd = state.round(step.round_index)
    assert rnd is not None
    for item in items:
        if item not in rnd.item_ids or state.statements[item].status != StatementStatus.ACTIVE:
            raise UnknownItem(f"item {item} is not under evaluation")
    return [
        EventDraft(
            kind="ranking_submitted",
            payload={"alias": alias, "step_id": step.id, "round_index": rnd.index, "items": list(items)},
            actor=alias,
        )
    ]


def cmd_post_chat(state: WorkshopState, now: int, alias: str, text: str) -> list[EventDraft]:
    """Append a pseudonymous message to the workshop chat log."""
    step = _open_step_of_kind(state, StepKind.CHAT)
    _check_deadline(step, now)
    cleaned = text.strip()
    if not cleaned:
        raise EmptyText("chat message is empty")
    if len(cleaned) > MAX_CHAT_CHARS:
        raise TextTooLong(f"chat message exceeds {MAX_CHAT_CHARS} characters")
    return [
        EventDraft(
            kind="chat_message",
            payload={"chat_seq": state.chat_seq + 1, "alias": alias, "text": cleaned, "step_id": step.id},
            actor=alias,
        )
    ]


def fetch_chat(state: WorkshopState, from_seq: int = 0) -> list[ChatMessage]:
    """Messages with seq greater than ``from_seq``, in order. Always allowed."""
    return [m for m in state.chat if m.seq > from_seq]


def cmd_submit_self_assessment(
    state: WorkshopState, now: int, alias: str, knowledge_gain: int, comment: Optional[str] = None
) -> list[EventDraft]:
    """Record a 0..5 self-ranked knowledge gain for the open assessment step."""
    step = _open_step_of_kind(state, StepKind.SELF_ASSESSMENT)
    _check_deadline(step, now)
    if not isinstance(knowledge_gain, int) or not 0 <= knowledge_gain <= 5:
        raise OutOfScale(f"knowledge gain {knowledge_gain!r} outside 0..5")
    return [
        EventDraft(
            kind="self_assessment_submitted",
            payload={
                "alias": alias,
                "step_id": step.id,
                "knowledge_gain": knowledge_gain,
                "comment": comment,
            },
            actor=alias,
        )
    ]


def cmd_delphi_gate(state: WorkshopState, now: int, actor_alias: str) -> list[EventDraft]:
    """Enact the round's convergence decision.

    Converged and BudgetStop freeze the current Active list as the phase
    outcome; Iterate schedules a fresh Rating..DelphiGate tour over the
    survivors.
    """
    require_facilitator(state, actor_alias)
    open_step = state.open_step()
    if open_step is not None:
        raise AlreadyOpen(f"step {open_step.id} is still open")
    nxt = state.next_pending_step()
    if nxt is None or nxt.kind != StepKind.DELPHI_GATE:
        raise OutOfOrder("the gate is not the next step")
    rnd = state.round(nxt.round_index)
    if rnd is None or rnd.convergence is None:
        raise NoReport(f"round {nxt.round_index} has no convergence report")
    decision = rnd.convergence.decision
    payload: dict[str, Any] = {
        "gate_step_id": nxt.id,
        "round_index": rnd.index,
        "decision": decision,
        "report": rnd.convergence.to_dict(),
    }
    if decision == aggregation.GATE_ITERATE:
        assert state.agenda is not None
        payload["new_steps"] = step_instances(
            state, state.agenda.iterate_subsequence(), Phase.CRITIQUE, rnd.index + 1
        )
    else:
        payload["final_items"] = state.active_item_ids()
    return [EventDraft(kind="gate_decision", payload=payload, actor=actor_alias)]


# ---- applies ----


def apply_step_opened(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    step = state.step_by_id(payload["step_id"])
    assert step is not None
    step.state = StepState.OPEN
    step.opened_at = at
    step.deadline = payload.get("deadline")
    state.current_step = step.id
    if "round_items" in payload and state.round(step.round_index) is None:
        state.rounds.append(
            EvaluationRound(index=step.round_index, item_ids=list(payload["round_items"]))
        )


def apply_step_closed(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    step = state.step_by_id(payload["step_id"])
    assert step is not None
    step.state = StepState.CLOSED
    step.closed_at = at
    result = payload.get("result") or {}
    rnd = state.round(step.round_index)

    if step.kind == StepKind.RATING and rnd is not None:
        rnd.mean_ratings = {k: float(v) for k, v in result.get("mean_ratings", {}).items()}
        rnd.low_discrimination = bool(result.get("low_discrimination", False))
        _add_snapshots(state, rnd.index, step.kind, result.get("snapshots", []), at)
    elif step.kind == StepKind.RANKING and rnd is not None:
        rnd.borda = {k: float(v) for k, v in result.get("borda", {}).items()}
        for item in result.get("zero_support_eliminated", []):
            state.statements[item].status = StatementStatus.ELIMINATED
            rnd.eliminated.append(item)
        _add_snapshots(state, rnd.index, step.kind, result.get("snapshots", []), at)
    elif step.kind == StepKind.CUT_OFF and rnd is not None:
        rnd.cutoff_scores = {k: float(v) for k, v in result.get("scores", {}).items()}
        for item in result.get("eliminated", []):
            state.statements[item].status = StatementStatus.ELIMINATED
            rnd.eliminated.append(item)
        if "report" in result:
            rnd.convergence = aggregation.ConvergenceReport.from_dict(result["report"])

    nxt = state.next_pending_step()
    state.current_step = nxt.id if nxt else None


def _add_snapshots(
    state: WorkshopState, round_index: int, kind: StepKind, rows: list[Mapping[str, Any]], at: int
) -> None:
    for row in rows:
        state.snapshots.append(
            BehaviorSnapshot(
                alias=row["alias"],
                round_index=round_index,
                step_kind=kind,
                vector={k: float(v) for k, v in row["vector"].items()},
                taken_at=at,
            )
        )


def apply_ideas_submitted(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    for entry in payload["statements"]:
        state.statements[entry["id"]] = Statement(
            id=entry["id"],
            text=entry["text"],
            author_alias=payload["alias"],
            status=StatementStatus.RAW,
        )
    state.bump("statement", len(payload["statements"]))


def apply_merge_plan_applied(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    for group in payload["groups"]:
        for member in group["members"]:
            state.statements[member].status = StatementStatus.MERGED
        state.statements[group["id"]] = Statement(
            id=group["id"],
            text=group["heading"],
            author_alias=None,
            status=StatementStatus.ACTIVE,
            area=group["area"],
            merged_from=list(group["members"]),
        )
    for single in payload["singletons"]:
        stmt = state.statements[single["id"]]
        stmt.status = StatementStatus.ACTIVE
        stmt.area = single["area"]
    state.bump("statement", len(payload["groups"]))


def apply_ratings_submitted(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    rnd = state.round(payload["round_index"])
    assert rnd is not None
    rnd.ratings[payload["alias"]] = {k: int(v) for k, v in payload["ratings"].items()}
    criterion = payload.get("criterion")
    if criterion is not None:
        rnd.criterion_tags[payload["alias"]] = criterion
    else:
        rnd.criterion_tags.pop(payload["alias"], None)


def apply_ranking_submitted(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    rnd = state.round(payload["round_index"])
    assert rnd is not None
    rnd.rankings[payload["alias"]] = list(payload["items"])


def apply_chat_message(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.chat.append(
        ChatMessage(seq=payload["chat_seq"], alias=payload["alias"], text=payload["text"], at=at)
    )
    state.chat_seq = payload["chat_seq"]


def apply_self_assessment_submitted(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    from .model import SelfAssessment

    key = assessment_key(payload["alias"], payload["step_id"])
    state.assessments[key] = SelfAssessment(
        alias=payload["alias"],
        step_id=payload["step_id"],
        knowledge_gain=int(payload["knowledge_gain"]),
        comment=payload.get("comment"),
    )


def apply_gate_decision(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    gate = state.step_by_id(payload["gate_step_id"])
    assert gate is not None
    gate.state = StepState.CLOSED
    gate.closed_at = at
    rnd = state.round(payload["round_index"])
    if rnd is not None and rnd.convergence is not None:
        rnd.convergence.decision = payload["decision"]
    if payload["decision"] == aggregation.GATE_ITERATE:
        from .model import _add_steps

        _add_steps(state, payload["new_steps"])
    else:
        state.final_items = list(payload.get("final_items") or [])
    nxt = state.next_pending_step()
    state.current_step = nxt.id if nxt else None


def apply_list_updated(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    # informational event for stream subscribers; state already updated
    return None

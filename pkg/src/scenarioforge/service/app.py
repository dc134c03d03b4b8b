"""HTTP service exposing the workshop engine.

One FastAPI app wraps a :class:`WorkshopStore`; every mutation goes through
the store's per-workshop writer lock, every read sees committed state, and
``GET /workshops/{id}/events`` streams the event log as server-sent events
for live clients.
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, Response, StreamingResponse

from .. import analytics, engine, exports, scenario
from ..errors import EmptyInput, InvalidToken, NotFacilitator, UnknownStepKind, WorkshopError
from ..grouping import SimilarityConfig, profile_similarity, suggest_clusters
from ..model import (
    Agenda,
    NodeKind,
    Participant,
    Role,
    StatementStatus,
    StepKind,
    StepState,
    WorkshopState,
    cmd_advance_phase,
)
from ..scenario import ScenarioDigest, group_homologous
from ..store import WorkshopHandle, WorkshopStore
from . import schemas

TOKEN_HEADER = "X-Session-Token"


def create_app(data_dir: str | Path, fsync: bool = False, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="scenarioforge", version="0.1.0")
    store = WorkshopStore(data_dir, fsync=fsync)
    app.state.store = store

    @app.exception_handler(WorkshopError)
    async def _domain_error(request: Request, exc: WorkshopError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content={"error": exc.name, "detail": exc.detail})

    # ---- helpers ----

    def _participant(handle: WorkshopHandle, token: Optional[str]) -> Participant:
        if not token:
            raise InvalidToken(f"missing {TOKEN_HEADER} header")
        participant = handle.state.participant_by_token(token)
        if participant is None:
            raise InvalidToken("unrecognized session token")
        return participant

    def _facilitator(handle: WorkshopHandle, token: Optional[str]) -> Participant:
        participant = _participant(handle, token)
        if participant.role != Role.FACILITATOR:
            raise NotFacilitator(f"{participant.alias} is not the facilitator")
        return participant

    def _step_kind(raw: str) -> StepKind:
        try:
            return StepKind(raw)
        except ValueError:
            raise UnknownStepKind(f"unknown step kind {raw!r}")

    def _role(raw: str) -> Role:
        try:
            return Role(raw)
        except ValueError:
            raise UnknownStepKind(f"unknown role {raw!r}")

    def _node_kind(raw: str) -> NodeKind:
        try:
            return NodeKind(raw)
        except ValueError:
            raise UnknownStepKind(f"unknown node kind {raw!r}")

    def _now_ms(handle: WorkshopHandle) -> int:
        return max(int(time.time() * 1000), handle.last_at)

    def _step_view(state: WorkshopState, step, now: int) -> schemas.StepView:
        return schemas.StepView(
            id=step.id,
            kind=step.kind.value,
            phase=step.phase.value,
            round_index=step.round_index,
            state=step.state.value,
            deadline=step.deadline,
            expired=bool(step.deadline and step.state == StepState.OPEN and now >= step.deadline),
        )

    def _snapshot(handle: WorkshopHandle, facilitator_view: bool) -> schemas.WorkshopSnapshot:
        state = handle.state
        now = _now_ms(handle)
        open_step = state.open_step()
        agenda = state.agenda
        return schemas.WorkshopSnapshot(
            id=state.id,
            title=state.title,
            phase=state.phase.value,
            current_step=state.current_step,
            open_step=_step_view(state, open_step, now) if open_step else None,
            steps=[_step_view(state, s, now) for s in state.steps],
            participants=[
                schemas.ParticipantView(alias=p.alias, role=p.role.value, group_label=p.group_label)
                for p in sorted(state.participants.values(), key=lambda p: (len(p.alias), p.alias))
            ],
            issue_areas=[schemas.IssueAreaIn(label=a.label, keywords=a.keywords) for a in state.issue_areas],
            criteria=agenda.criteria if agenda else [],
            active_count=len(state.active_item_ids()),
            raw_count=len(state.statements_with_status(StatementStatus.RAW)),
            round_count=len(state.rounds),
            chat_seq=state.chat_seq,
            final_items=state.final_items,
            top_k=agenda.top_k if agenda else 10,
            rating_scale_max=agenda.rating_scale_max if agenda else 5,
            guard_warnings=state.guard_warnings if facilitator_view else None,
        )

    def _find_event(events, kind: str):
        for event in reversed(events):
            if event.kind == kind:
                return event
        return None

    # ---- meta ----

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "workshops": len(store.workshop_ids())}

    @app.post("/agenda/validate")
    def validate_agenda(body: schemas.AgendaDocument) -> dict:
        agenda = Agenda.from_dict(body.agenda)
        areas = [
            {"label": a, "keywords": []} if isinstance(a, str) else a.model_dump()
            for a in body.issue_areas
        ]
        return {"agenda": agenda.to_dict(), "issue_areas": areas, "valid": True}

    # ---- workshop lifecycle ----

    @app.post("/workshops", status_code=201)
    def create_workshop(body: schemas.CreateWorkshopRequest) -> schemas.WorkshopSnapshot:
        areas = [a if isinstance(a, str) else a.model_dump() for a in body.issue_areas]
        handle = store.create_workshop(
            title=body.title,
            agenda=body.agenda,
            issue_areas=areas,
            deterministic_seed=body.deterministic_seed,
        )
        return _snapshot(handle, facilitator_view=False)

    @app.get("/workshops/{workshop_id}")
    def get_workshop(
        workshop_id: str, token: Optional[str] = Header(default=None, alias=TOKEN_HEADER)
    ) -> schemas.WorkshopSnapshot:
        handle = store.get(workshop_id)
        with handle.lock:
            facilitator_view = False
            if token:
                participant = handle.state.participant_by_token(token)
                facilitator_view = participant is not None and participant.role == Role.FACILITATOR
            return _snapshot(handle, facilitator_view)

    @app.get("/workshops/{workshop_id}/agenda")
    def get_agenda(workshop_id: str) -> dict:
        handle = store.get(workshop_id)
        with handle.lock:
            assert handle.state.agenda is not None
            return {
                "agenda": handle.state.agenda.to_dict(),
                "issue_areas": [
                    {"label": a.label, "keywords": a.keywords} for a in handle.state.issue_areas
                ],
            }

    @app.post("/workshops/{workshop_id}/participants", status_code=201)
    def join(workshop_id: str, body: schemas.JoinRequest) -> schemas.JoinResponse:
        events = store.register_participant(workshop_id, _role(body.role), body.group_label)
        payload = _find_event(events, "participant_joined").payload
        return schemas.JoinResponse(alias=payload["alias"], token=payload["token"], role=payload["role"])

    @app.post("/workshops/{workshop_id}/phase/advance")
    def advance_phase(
        workshop_id: str, token: Optional[str] = Header(default=None, alias=TOKEN_HEADER)
    ) -> dict:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(workshop_id, cmd_advance_phase, actor_alias=actor.alias)
        payload = _find_event(events, "phase_advanced").payload
        return {"phase": payload["to_phase"], "steps": payload["steps"]}

    # ---- facilitator step control ----

    @app.post("/workshops/{workshop_id}/steps/open")
    def open_step(
        workshop_id: str,
        body: schemas.OpenStepRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(
            workshop_id, engine.cmd_open_step, actor_alias=actor.alias, kind=_step_kind(body.kind)
        )
        return _find_event(events, "step_opened").payload

    @app.post("/workshops/{workshop_id}/steps/close")
    def close_step(
        workshop_id: str, token: Optional[str] = Header(default=None, alias=TOKEN_HEADER)
    ) -> schemas.StepResultView:
        handle = store.get(workshop_id)
        actor_alias: Optional[str] = None
        if token:
            actor_alias = _participant(handle, token).alias
        events = store.execute(workshop_id, engine.cmd_close_step, actor_alias=actor_alias)
        payload = _find_event(events, "step_closed").payload
        return schemas.StepResultView(**payload)

    @app.post("/workshops/{workshop_id}/merge-plan")
    def merge_plan(
        workshop_id: str,
        body: schemas.MergePlanRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(
            workshop_id,
            engine.cmd_apply_merge_plan,
            actor_alias=actor.alias,
            groups=[g.model_dump() for g in body.groups],
            singleton_areas=body.singleton_areas,
        )
        return _find_event(events, "merge_plan_applied").payload

    @app.get("/workshops/{workshop_id}/merge-suggestions")
    def merge_suggestions(
        workshop_id: str,
        threshold: float = Query(default=0.4, ge=0.0, le=1.0),
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> list[schemas.MergeSuggestionView]:
        handle = store.get(workshop_id)
        _facilitator(handle, token)
        with handle.lock:
            state = handle.state
            raw = [(s.id, s.text) for s in state.statements_with_status(StatementStatus.RAW)]
            clusters = suggest_clusters(raw, SimilarityConfig(threshold=threshold)) if raw else []
            areas = state.issue_areas
            out = []
            for cluster in clusters:
                best_label, best_sim = "Others", 0.0
                for area in areas:
                    if not area.keywords:
                        continue
                    sim = profile_similarity(cluster.heading, area.keywords)
                    if sim > best_sim:
                        best_label, best_sim = area.label, sim
                out.append(
                    schemas.MergeSuggestionView(
                        members=cluster.member_ids, heading=cluster.heading, area=best_label
                    )
                )
            return out

    @app.post("/workshops/{workshop_id}/cutoff")
    def cutoff(
        workshop_id: str,
        body: schemas.CutoffRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> schemas.StepResultView:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(workshop_id, engine.cmd_cutoff, actor_alias=actor.alias, n=body.n)
        payload = _find_event(events, "step_closed").payload
        return schemas.StepResultView(**payload)

    @app.post("/workshops/{workshop_id}/gate")
    def gate(
        workshop_id: str, token: Optional[str] = Header(default=None, alias=TOKEN_HEADER)
    ) -> schemas.GateResponse:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(workshop_id, engine.cmd_delphi_gate, actor_alias=actor.alias)
        payload = _find_event(events, "gate_decision").payload
        return schemas.GateResponse(
            decision=payload["decision"],
            report=payload["report"],
            final_items=payload.get("final_items"),
        )

    # ---- participant submissions ----

    @app.post("/workshops/{workshop_id}/ideas")
    def submit_ideas(
        workshop_id: str,
        body: schemas.IdeasRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        events = store.execute(
            workshop_id, engine.cmd_submit_ideas, alias=participant.alias, texts=body.texts
        )
        payload = _find_event(events, "ideas_submitted").payload
        return {
            "statement_ids": [s["id"] for s in payload["statements"]],
            "rejected": payload["rejected"],
        }

    @app.post("/workshops/{workshop_id}/ratings")
    def submit_ratings(
        workshop_id: str,
        body: schemas.RatingsRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        store.execute(
            workshop_id,
            engine.cmd_submit_ratings,
            alias=participant.alias,
            ratings=body.ratings,
            criterion=body.criterion,
        )
        return {"status": "stored", "items": len(body.ratings)}

    @app.post("/workshops/{workshop_id}/ranking")
    def submit_ranking(
        workshop_id: str,
        body: schemas.RankingRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        store.execute(workshop_id, engine.cmd_submit_ranking, alias=participant.alias, items=body.items)
        return {"status": "stored", "items": len(body.items)}

    @app.post("/workshops/{workshop_id}/chat", status_code=201)
    def post_chat(
        workshop_id: str,
        body: schemas.ChatPostRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> schemas.ChatMessageView:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        events = store.execute(workshop_id, engine.cmd_post_chat, alias=participant.alias, text=body.text)
        event = _find_event(events, "chat_message")
        return schemas.ChatMessageView(
            seq=event.payload["chat_seq"], alias=event.payload["alias"], text=event.payload["text"], at=event.at
        )

    @app.post("/workshops/{workshop_id}/self-assessment")
    def submit_self_assessment(
        workshop_id: str,
        body: schemas.SelfAssessmentRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        store.execute(
            workshop_id,
            engine.cmd_submit_self_assessment,
            alias=participant.alias,
            knowledge_gain=body.knowledge_gain,
            comment=body.comment,
        )
        return {"status": "stored"}

    @app.post("/workshops/{workshop_id}/scenario-nodes", status_code=201)
    def add_scenario_node(
        workshop_id: str,
        body: schemas.ScenarioNodeRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        participant = _participant(handle, token)
        events = store.execute(
            workshop_id,
            scenario.cmd_add_node,
            alias=participant.alias,
            kind=_node_kind(body.kind),
            text=body.text,
            parent=body.parent,
        )
        node = _find_event(events, "scenario_node_added").payload
        warning = _find_event(events, "guard_warning")
        return {"node": node, "guard_warning": warning.payload if warning else None}

    @app.post("/workshops/{workshop_id}/scenarios/compose")
    def compose_scenarios(
        workshop_id: str,
        body: schemas.ComposeRequest,
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> dict:
        handle = store.get(workshop_id)
        actor = _facilitator(handle, token)
        events = store.execute(
            workshop_id,
            scenario.cmd_compose_scenarios,
            actor_alias=actor.alias,
            selections=[s.model_dump() for s in body.selections],
            target=body.target,
        )
        return _find_event(events, "scenarios_composed").payload

    # ---- reads ----

    @app.get("/workshops/{workshop_id}/items")
    def get_items(workshop_id: str, status: str = Query(default="Active")) -> list[schemas.ItemView]:
        handle = store.get(workshop_id)
        with handle.lock:
            state = handle.state
            try:
                wanted = StatementStatus(status)
            except ValueError:
                raise UnknownStepKind(f"unknown statement status {status!r}")
            open_step = state.open_step()
            if wanted == StatementStatus.RAW and open_step and open_step.kind == StepKind.IDEA_ENTRY:
                # pooled list stays hidden until idea entry closes
                return []
            return [
                schemas.ItemView(
                    id=s.id, text=s.text, status=s.status.value, area=s.area, merged_from=s.merged_from
                )
                for s in state.statements_with_status(wanted)
            ]

    @app.get("/workshops/{workshop_id}/rounds/{index}")
    def get_round(workshop_id: str, index: int) -> schemas.RoundView:
        handle = store.get(workshop_id)
        with handle.lock:
            rnd = handle.state.round(index)
            if rnd is None:
                raise EmptyInput(f"round {index} does not exist")
            return schemas.RoundView(
                index=rnd.index,
                item_ids=rnd.item_ids,
                mean_ratings=rnd.mean_ratings,
                borda=rnd.borda,
                cutoff_scores=rnd.cutoff_scores,
                eliminated=rnd.eliminated,
                ratings_submitted=len(rnd.ratings),
                rankings_submitted=len(rnd.rankings),
                low_discrimination=rnd.low_discrimination,
                convergence=rnd.convergence.to_dict() if rnd.convergence else None,
            )

    @app.get("/workshops/{workshop_id}/chat")
    def get_chat(workshop_id: str, from_seq: int = Query(default=0)) -> list[schemas.ChatMessageView]:
        handle = store.get(workshop_id)
        with handle.lock:
            return [
                schemas.ChatMessageView(seq=m.seq, alias=m.alias, text=m.text, at=m.at)
                for m in engine.fetch_chat(handle.state, from_seq)
            ]

    @app.get("/workshops/{workshop_id}/export")
    def get_export(
        workshop_id: str,
        format: str = Query(default="full-record"),
        disclose: bool = Query(default=False),
        token: Optional[str] = Header(default=None, alias=TOKEN_HEADER),
    ) -> Response:
        handle = store.get(workshop_id)
        role = None
        if token:
            participant = handle.state.participant_by_token(token)
            role = participant.role if participant else None
        with handle.lock:
            document = exports.export(handle.state, format, disclose=disclose, actor_role=role)
        media = {
            "full-record": "application/json",
            "ratings-csv": "text/csv",
            "chat-log": "application/x-ndjson",
            "scenario-outline": "text/plain",
        }[format]
        return Response(content=document, media_type=media)

    @app.get("/workshops/{workshop_id}/analytics/{table}")
    def get_analytics(workshop_id: str, table: str) -> Response:
        handle = store.get(workshop_id)
        with handle.lock:
            if table == "snapshots":
                body = analytics.snapshots_csv(handle.state)
            elif table == "criteria":
                body = analytics.criteria_csv(handle.state)
            elif table == "knowledge":
                body = analytics.knowledge_csv(handle.state)
            else:
                raise EmptyInput(f"unknown analytics table {table!r}")
        return Response(content=body, media_type="text/csv")

    @app.get("/workshops/{workshop_id}/behavior/{alias}")
    def get_behavior(workshop_id: str, alias: str) -> dict:
        handle = store.get(workshop_id)
        with handle.lock:
            series = analytics.behavior_series(handle.state, alias)
            return {
                "alias": alias,
                "series": [
                    {
                        "round_index": s.round_index,
                        "step_kind": s.step_kind.value,
                        "vector": s.vector,
                    }
                    for s in series
                ],
            }

    @app.get("/workshops/{workshop_id}/replay-verify")
    def replay_verify(workshop_id: str) -> schemas.ReplayVerifyResponse:
        return schemas.ReplayVerifyResponse(**store.verify_replay(workshop_id))

    # ---- live event stream ----

    @app.get("/workshops/{workshop_id}/events")
    def event_stream(
        workshop_id: str,
        from_seq: int = Query(default=0),
        wait: float = Query(default=25.0, ge=0.0, le=300.0),
    ) -> StreamingResponse:
        store.get(workshop_id)  # 404 before the stream starts

        def generate():
            last = from_seq
            deadline = time.monotonic() + wait
            while True:
                remaining = deadline - time.monotonic()
                fresh = store.wait_events(workshop_id, last, timeout=min(1.0, max(0.0, remaining)))
                for event in fresh:
                    last = event.seq
                    data = json.dumps(event.to_dict(), sort_keys=True, ensure_ascii=False)
                    yield f"id: {event.seq}\nevent: {event.kind}\ndata: {data}\n\n"
                if time.monotonic() >= deadline:
                    yield ": stream idle, reconnect with from_seq\n\n"
                    return

        return StreamingResponse(generate(), media_type="text/event-stream")

    # ---- cross-group tooling ----

    @app.post("/tools/homologous-grouping")
    def homologous(body: schemas.HomologousRequest) -> dict:
        sets = [
            [ScenarioDigest(group=d.group, label=d.label, texts=d.texts) for d in group]
            for group in body.scenario_sets
        ]
        clusters = group_homologous(sets, target=body.target, config=SimilarityConfig(threshold=body.threshold))
        return {
            "clusters": [
                {
                    "label": c.label,
                    "members": [{"group": m.group, "label": m.label} for m in c.members],
                }
                for c in clusters
            ]
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app

"""Pydantic request and response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Optional, Union

from pydantic import BaseModel, Field


class IssueAreaIn(BaseModel):
    label: str
    keywords: list[str] = Field(default_factory=list)


class CreateWorkshopRequest(BaseModel):
    title: str
    agenda: dict
    issue_areas: list[Union[str, IssueAreaIn]]
    deterministic_seed: Optional[int] = None


class JoinRequest(BaseModel):
    role: str = "Stakeholder"
    group_label: Optional[str] = None


class JoinResponse(BaseModel):
    alias: str
    token: str
    role: str


class OpenStepRequest(BaseModel):
    kind: str


class MergeGroupIn(BaseModel):
    members: list[str]
    heading: str
    area: Optional[str] = None


class MergePlanRequest(BaseModel):
    groups: list[MergeGroupIn] = Field(default_factory=list)
    singleton_areas: dict[str, str] = Field(default_factory=dict)


class CutoffRequest(BaseModel):
    n: int


class IdeasRequest(BaseModel):
    texts: list[str]


class RatingsRequest(BaseModel):
    ratings: dict[str, int]
    criterion: Optional[str] = None


class RankingRequest(BaseModel):
    items: list[str]


class ChatPostRequest(BaseModel):
    text: str


class SelfAssessmentRequest(BaseModel):
    knowledge_gain: int
    comment: Optional[str] = None


class ScenarioNodeRequest(BaseModel):
    kind: str
    text: str
    parent: Optional[str] = None


class ScenarioSelectionIn(BaseModel):
    label: str
    visions: list[str]
    narrative: str = ""


class ComposeRequest(BaseModel):
    selections: list[ScenarioSelectionIn]
    target: Optional[int] = None


class ScenarioDigestIn(BaseModel):
    group: str
    label: str
    texts: list[str]


class HomologousRequest(BaseModel):
    scenario_sets: list[list[ScenarioDigestIn]]
    target: int = 3
    threshold: float = 0.4


class AgendaDocument(BaseModel):
    title: Optional[str] = None
    agenda: dict
    issue_areas: list[Union[str, IssueAreaIn]] = Field(default_factory=list)


class ErrorBody(BaseModel):
    error: str
    detail: str = ""


class StepView(BaseModel):
    id: str
    kind: str
    phase: str
    round_index: int
    state: str
    deadline: Optional[int] = None
    expired: bool = False


class ParticipantView(BaseModel):
    alias: str
    role: str
    group_label: Optional[str] = None


class WorkshopSnapshot(BaseModel):
    id: str
    title: str
    phase: str
    current_step: Optional[str] = None
    open_step: Optional[StepView] = None
    steps: list[StepView]
    participants: list[ParticipantView]
    issue_areas: list[IssueAreaIn]
    criteria: list[str]
    active_count: int
    raw_count: int
    round_count: int
    chat_seq: int
    final_items: Optional[list[str]] = None
    top_k: int
    rating_scale_max: int
    guard_warnings: Optional[list[dict]] = None


class ItemView(BaseModel):
    id: str
    text: str
    status: str
    area: Optional[str] = None
    merged_from: list[str] = Field(default_factory=list)


class RoundView(BaseModel):
    index: int
    item_ids: list[str]
    mean_ratings: dict[str, float]
    borda: dict[str, float]
    cutoff_scores: dict[str, float]
    eliminated: list[str]
    ratings_submitted: int
    rankings_submitted: int
    low_discrimination: bool
    convergence: Optional[dict] = None


class ChatMessageView(BaseModel):
    seq: int
    alias: str
    text: str
    at: int


class EventView(BaseModel):
    seq: int
    kind: str
    at: int
    actor: Optional[str] = None
    payload: dict[str, Any]


class StepResultView(BaseModel):
    step_id: str
    kind: str
    round_index: int
    reason: str
    result: dict[str, Any]


class GateResponse(BaseModel):
    decision: str
    report: dict[str, Any]
    final_items: Optional[list[str]] = None


class MergeSuggestionView(BaseModel):
    members: list[str]
    heading: str
    area: str


class ReplayVerifyResponse(BaseModel):
    workshop_id: str
    events: int
    live_hash: str
    replay_hash: str
    deterministic: bool
    match: bool

"""Domain types and the workshop phase/step state machine.

All workshop state lives in :class:`WorkshopState`; commands elsewhere
validate against it and emit event drafts, and the paired ``apply_*``
functions fold committed events back into it. Nothing in this module does
I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

from .aggregation import ConvergencePolicy, ConvergenceReport
from .errors import (
    DuplicateFacilitator,
    InvalidAgenda,
    NotFacilitator,
    StepsIncomplete,
    WrongPhase,
)

MAX_STATEMENT_CHARS = 2000
MAX_CHAT_CHARS = 1000
OTHERS_LABEL = "Others"


class Phase(str, Enum):
    PREPARATION = "Preparation"
    CRITIQUE = "Critique"
    FANTASY = "Fantasy"
    IMPLEMENTATION = "Implementation"
    CLOSED = "Closed"


PHASE_ORDER = [
    Phase.PREPARATION,
    Phase.CRITIQUE,
    Phase.FANTASY,
    Phase.IMPLEMENTATION,
    Phase.CLOSED,
]


class StepKind(str, Enum):
    IDEA_ENTRY = "IdeaEntry"
    MERGE = "Merge"
    RATING = "Rating"
    RANKING = "Ranking"
    CUT_OFF = "CutOff"
    CHAT = "Chat"
    DELPHI_GATE = "DelphiGate"
    SELF_ASSESSMENT = "SelfAssessment"
    BEHAVIOR_SNAPSHOT = "BehaviorSnapshot"
    TREE_BUILD = "TreeBuild"
    SCENARIO_COMPOSE = "ScenarioCompose"
    HOMOLOGOUS_GROUP = "HomologousGroup"


CRITIQUE_CORE_ORDER = [
    StepKind.IDEA_ENTRY,
    StepKind.MERGE,
    StepKind.RATING,
    StepKind.RANKING,
    StepKind.CUT_OFF,
    StepKind.CHAT,
    StepKind.DELPHI_GATE,
]

COLLATERAL_KINDS = {StepKind.SELF_ASSESSMENT, StepKind.BEHAVIOR_SNAPSHOT}


class StepState(str, Enum):
    PENDING = "Pending"
    OPEN = "Open"
    CLOSED = "Closed"


class Role(str, Enum):
    FACILITATOR = "Facilitator"
    STAKEHOLDER = "Stakeholder"


class StatementStatus(str, Enum):
    RAW = "Raw"
    ACTIVE = "Active"
    MERGED = "Merged"
    ELIMINATED = "Eliminated"


class NodeKind(str, Enum):
    VISION = "Vision"
    OBSTACLE = "Obstacle"
    ACTION = "Action"
    RESOURCE = "Resource"


NODE_KIND_ORDER = [NodeKind.VISION, NodeKind.OBSTACLE, NodeKind.ACTION, NodeKind.RESOURCE]


class CutoffBasis(str, Enum):
    BORDA = "borda"
    MEAN_RATING = "mean_rating"


@dataclass(frozen=True)
class ExplosionGuard:
    """Node-count thresholds past which the facilitator gets warned."""

    max_nodes_per_vision: int = 40
    max_total_nodes: int = 200

    def validate(self) -> None:
        if self.max_nodes_per_vision < 1 or self.max_total_nodes < 1:
            raise InvalidAgenda("guard limits must be positive")
        if self.max_nodes_per_vision > self.max_total_nodes:
            raise InvalidAgenda("per-vision guard limit exceeds the total limit")


@dataclass(frozen=True)
class StepSpec:
    kind: StepKind
    time_limit: Optional[int] = None  # seconds
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PhaseSpec:
    phase: Phase
    steps: tuple[StepSpec, ...] = ()


@dataclass
class Agenda:
    """Workshop run plan: per-phase step lists plus evaluation settings."""

    phases: list[PhaseSpec]
    top_k: int = 10
    rating_scale_max: int = 5
    policy: ConvergencePolicy = field(default_factory=ConvergencePolicy)
    criteria: list[str] = field(default_factory=list)
    guard: ExplosionGuard = field(default_factory=ExplosionGuard)
    cutoff_basis: CutoffBasis = CutoffBasis.BORDA
    cutoff_n: Optional[int] = None
    zero_support_elimination: bool = True
    compose_min: int = 2
    compose_max: int = 3

    def validate(self) -> None:
        declared = [p.phase for p in self.phases]
        expected = [Phase.PREPARATION, Phase.CRITIQUE, Phase.FANTASY, Phase.IMPLEMENTATION]
        if declared != expected:
            raise InvalidAgenda(
                f"agenda must declare the phases {[p.value for p in expected]} in order, got {[p.value for p in declared]}"
            )
        critique = self.steps_for(Phase.CRITIQUE)
        core = [s.kind for s in critique if s.kind not in COLLATERAL_KINDS]
        if core != CRITIQUE_CORE_ORDER:
            raise InvalidAgenda(
                "Critique steps must contain exactly "
                f"{[k.value for k in CRITIQUE_CORE_ORDER]} in order (collateral steps may be interleaved), "
                f"got {[k.value for k in core]}"
            )
        if self.top_k < 1:
            raise InvalidAgenda(f"top_k must be >= 1, got {self.top_k}")
        if self.rating_scale_max < 1:
            raise InvalidAgenda(f"rating_scale_max must be >= 1, got {self.rating_scale_max}")
        for pspec in self.phases:
            for sspec in pspec.steps:
                if sspec.time_limit is not None and sspec.time_limit <= 0:
                    raise InvalidAgenda(f"time_limit must be > 0, got {sspec.time_limit}")
        if self.cutoff_n is not None and self.cutoff_n < 1:
            raise InvalidAgenda(f"cutoff_n must be >= 1, got {self.cutoff_n}")
        if not (1 <= self.compose_min <= self.compose_max):
            raise InvalidAgenda("compose target bounds must satisfy 1 <= min <= max")
        self.policy.validate()
        self.guard.validate()

    def steps_for(self, phase: Phase) -> tuple[StepSpec, ...]:
        for pspec in self.phases:
            if pspec.phase == phase:
                return pspec.steps
        return ()

    def iterate_subsequence(self) -> tuple[StepSpec, ...]:
        """Critique step specs reopened on each extra Delphi tour."""
        critique = self.steps_for(Phase.CRITIQUE)
        for i, sspec in enumerate(critique):
            if sspec.kind == StepKind.RATING:
                return critique[i:]
        return ()

    def to_dict(self) -> dict:
        return {
            "phases": [
                {
                    "phase": p.phase.value,
                    "steps": [
                        {"kind": s.kind.value, "time_limit": s.time_limit, "params": dict(s.params)}
                        for s in p.steps
                    ],
                }
                for p in self.phases
            ],
            "top_k": self.top_k,
            "rating_scale_max": self.rating_scale_max,
            "convergence": {
                "w_min": self.policy.w_min,
                "max_rounds": self.policy.max_rounds,
                "min_elimination_fraction": self.policy.min_elimination_fraction,
            },
            "criteria": list(self.criteria),
            "guard": {
                "max_nodes_per_vision": self.guard.max_nodes_per_vision,
                "max_total_nodes": self.guard.max_total_nodes,
            },
            "cutoff_basis": self.cutoff_basis.value,
            "cutoff_n": self.cutoff_n,
            "zero_support_elimination": self.zero_support_elimination,
            "compose_min": self.compose_min,
            "compose_max": self.compose_max,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Agenda":
        try:
            phases = [
                PhaseSpec(
                    phase=Phase(p["phase"]),
                    steps=tuple(
                        StepSpec(
                            kind=StepKind(s["kind"]),
                            time_limit=s.get("time_limit"),
                            params=dict(s.get("params") or {}),
                        )
                        for s in p.get("steps", [])
                    ),
                )
                for p in d["phases"]
            ]
            conv = d.get("convergence") or {}
            guard = d.get("guard") or {}
            agenda = cls(
                phases=phases,
                top_k=int(d.get("top_k", 10)),
                rating_scale_max=int(d.get("rating_scale_max", 5)),
                policy=ConvergencePolicy(
                    w_min=float(conv.get("w_min", 0.6)),
                    max_rounds=int(conv.get("max_rounds", 2)),
                    min_elimination_fraction=float(conv.get("min_elimination_fraction", 0.1)),
                ),
                criteria=list(d.get("criteria") or []),
                guard=ExplosionGuard(
                    max_nodes_per_vision=int(guard.get("max_nodes_per_vision", 40)),
                    max_total_nodes=int(guard.get("max_total_nodes", 200)),
                ),
                cutoff_basis=CutoffBasis(d.get("cutoff_basis", "borda")),
                cutoff_n=d.get("cutoff_n"),
                zero_support_elimination=bool(d.get("zero_support_elimination", True)),
                compose_min=int(d.get("compose_min", 2)),
                compose_max=int(d.get("compose_max", 3)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidAgenda(f"malformed agenda document: {exc}") from exc
        agenda.validate()
        return agenda


@dataclass
class IssueArea:
    label: str
    keywords: list[str] = field(default_factory=list)


@dataclass
class Participant:
    token: str
    alias: str
    role: Role
    group_label: Optional[str] = None


@dataclass
class Statement:
    id: str
    text: str
    author_alias: Optional[str]
    status: StatementStatus
    area: Optional[str] = None
    merged_from: list[str] = field(default_factory=list)


@dataclass
class Step:
    id: str
    kind: StepKind
    phase: Phase
    round_index: int
    state: StepState = StepState.PENDING
    time_limit: Optional[int] = None
    params: dict = field(default_factory=dict)
    opened_at: Optional[int] = None
    closed_at: Optional[int] = None
    deadline: Optional[int] = None


@dataclass
class EvaluationRound:
    index: int
    item_ids: list[str]
    ratings: dict[str, dict[str, int]] = field(default_factory=dict)
    rankings: dict[str, list[str]] = field(default_factory=dict)
    criterion_tags: dict[str, str] = field(default_factory=dict)
    mean_ratings: dict[str, float] = field(default_factory=dict)
    borda: dict[str, float] = field(default_factory=dict)
    cutoff_scores: dict[str, float] = field(default_factory=dict)
    eliminated: list[str] = field(default_factory=list)
    low_discrimination: bool = False
    convergence: Optional[ConvergenceReport] = None


@dataclass
class ChatMessage:
    seq: int
    alias: str
    text: str
    at: int


@dataclass
class SelfAssessment:
    alias: str
    step_id: str
    knowledge_gain: int
    comment: Optional[str] = None


@dataclass
class BehaviorSnapshot:
    alias: str
    round_index: int
    step_kind: StepKind
    vector: dict[str, float]
    taken_at: int


@dataclass
class ScenarioNode:
    id: str
    kind: NodeKind
    text: str
    parent: Optional[str]
    author_alias: str
    created_at: int


@dataclass
class Scenario:
    id: str
    label: str
    vision_ids: list[str]
    member_nodes: list[str]
    narrative: str = ""


@dataclass
class EventDraft:
    """An event a command wants committed; store assigns seq and time."""

    kind: str
    payload: dict
    actor: Optional[str] = None


_ID_PREFIX = {"statement": "i", "step": "s", "node": "n", "scenario": "sc"}


@dataclass
class WorkshopState:
    """Root aggregate; mutated only by ``apply_*`` functions."""

    id: str = ""
    title: str = ""
    created_at: int = 0
    agenda: Optional[Agenda] = None
    phase: Phase = Phase.PREPARATION
    phase_history: list[Phase] = field(default_factory=list)
    issue_areas: list[IssueArea] = field(default_factory=list)
    participants: dict[str, Participant] = field(default_factory=dict)
    statements: dict[str, Statement] = field(default_factory=dict)
    steps: list[Step] = field(default_factory=list)
    current_step: Optional[str] = None
    rounds: list[EvaluationRound] = field(default_factory=list)
    chat: list[ChatMessage] = field(default_factory=list)
    assessments: dict[str, SelfAssessment] = field(default_factory=dict)  # key "alias|step_id"
    snapshots: list[BehaviorSnapshot] = field(default_factory=list)
    nodes: dict[str, ScenarioNode] = field(default_factory=dict)
    scenarios: dict[str, Scenario] = field(default_factory=dict)
    uncovered_visions: list[str] = field(default_factory=list)
    guard_warnings: list[dict] = field(default_factory=list)
    final_items: Optional[list[str]] = None
    deterministic: bool = False
    det_seed: Optional[int] = None
    counters: dict[str, int] = field(default_factory=lambda: {k: 0 for k in _ID_PREFIX})
    chat_seq: int = 0

    # ---- lookups ----

    def facilitator(self) -> Optional[Participant]:
        for p in self.participants.values():
            if p.role == Role.FACILITATOR:
                return p
        return None

    def participant_by_token(self, token: str) -> Optional[Participant]:
        for p in self.participants.values():
            if p.token == token:
                return p
        return None

    def step_by_id(self, step_id: str) -> Optional[Step]:
        for s in self.steps:
            if s.id == step_id:
                return s
        return None

    def open_step(self) -> Optional[Step]:
        for s in self.steps:
            if s.state == StepState.OPEN:
                return s
        return None

    def next_pending_step(self) -> Optional[Step]:
        for s in self.steps:
            if s.phase == self.phase and s.state == StepState.PENDING:
                return s
        return None

    def phase_steps(self, phase: Phase) -> list[Step]:
        return [s for s in self.steps if s.phase == phase]

    def round(self, index: int) -> Optional[EvaluationRound]:
        for r in self.rounds:
            if r.index == index:
                return r
        return None

    def current_round(self) -> Optional[EvaluationRound]:
        return self.rounds[-1] if self.rounds else None

    def statements_with_status(self, status: StatementStatus) -> list[Statement]:
        return [s for s in self.statements.values() if s.status == status]

    def active_item_ids(self) -> list[str]:
        return [s.id for s in self.statements.values() if s.status == StatementStatus.ACTIVE]

    def area_labels(self) -> list[str]:
        return [a.label for a in self.issue_areas]

    # ---- scenario forest ----

    def children_of(self, node_id: str) -> list[ScenarioNode]:
        return [n for n in self.nodes.values() if n.parent == node_id]

    def vision_root_of(self, node_id: str) -> str:
        node = self.nodes[node_id]
        while node.parent is not None:
            node = self.nodes[node.parent]
        return node.id

    def subtree_ids(self, root_id: str) -> list[str]:
        out = [root_id]
        i = 0
        while i < len(out):
            out.extend(n.id for n in self.children_of(out[i]))
            i += 1
        return out

    # ---- id allocation ----

    def peek_ids(self, kind: str, count: int) -> list[str]:
        base = self.counters[kind]
        prefix = _ID_PREFIX[kind]
        return [f"{prefix}{base + i + 1}" for i in range(count)]

    def bump(self, kind: str, count: int) -> None:
        self.counters[kind] += count


def assessment_key(alias: str, step_id: str) -> str:
    return f"{alias}|{step_id}"


def default_agenda(
    top_k: int = 10,
    rating_scale_max: int = 5,
    policy: Optional[ConvergencePolicy] = None,
    criteria: Sequence[str] = (),
    include_self_assessment: bool = True,
    cutoff_n: Optional[int] = None,
    guard: Optional[ExplosionGuard] = None,
    chat_time_limit: Optional[int] = None,
) -> Agenda:
    """A ready-to-run agenda with the canonical Critique step sequence."""
    critique: list[StepSpec] = [
        StepSpec(StepKind.IDEA_ENTRY),
        StepSpec(StepKind.MERGE),
        StepSpec(StepKind.RATING),
        StepSpec(StepKind.RANKING),
        StepSpec(StepKind.CUT_OFF),
    ]
    if include_self_assessment:
        critique.append(StepSpec(StepKind.SELF_ASSESSMENT))
    critique.append(StepSpec(StepKind.CHAT, time_limit=chat_time_limit))
    if include_self_assessment:
        critique.append(StepSpec(StepKind.SELF_ASSESSMENT))
    critique.append(StepSpec(StepKind.DELPHI_GATE))
    agenda = Agenda(
        phases=[
            PhaseSpec(Phase.PREPARATION),
            PhaseSpec(Phase.CRITIQUE, tuple(critique)),
            PhaseSpec(Phase.FANTASY, (StepSpec(StepKind.TREE_BUILD), StepSpec(StepKind.CHAT))),
            PhaseSpec(
                Phase.IMPLEMENTATION,
                (StepSpec(StepKind.TREE_BUILD), StepSpec(StepKind.SCENARIO_COMPOSE)),
            ),
        ],
        top_k=top_k,
        rating_scale_max=rating_scale_max,
        policy=policy or ConvergencePolicy(),
        criteria=list(criteria),
        guard=guard or ExplosionGuard(),
        cutoff_n=cutoff_n,
    )
    agenda.validate()
    return agenda


def require_facilitator(state: WorkshopState, alias: str) -> Participant:
    p = state.participants.get(alias)
    if p is None or p.role != Role.FACILITATOR:
        raise NotFacilitator(f"{alias or 'anonymous'} is not the facilitator")
    return p


def step_instances(
    state: WorkshopState, specs: Sequence[StepSpec], phase: Phase, round_index: int
) -> list[dict]:
    ids = state.peek_ids("step", len(specs))
    return [
        {
            "id": sid,
            "kind": spec.kind.value,
            "phase": phase.value,
            "round_index": round_index,
            "time_limit": spec.time_limit,
            "params": dict(spec.params),
        }
        for sid, spec in zip(ids, specs)
    ]


# ---- commands ----


def cmd_register_participant(
    state: WorkshopState, now: int, role: Role, group_label: Optional[str], token: str
) -> list[EventDraft]:
    """Admit a participant during Preparation and assign the next alias."""
    if state.phase != Phase.PREPARATION:
        raise WrongPhase(f"registration is only open during Preparation, phase is {state.phase.value}")
    if role == Role.FACILITATOR and state.facilitator() is not None:
        raise DuplicateFacilitator("workshop already has a facilitator")
    alias = f"P{len(state.participants) + 1}"
    return [
        EventDraft(
            kind="participant_joined",
            payload={
                "alias": alias,
                "role": role.value,
                "group_label": group_label,
                "token": token,
            },
        )
    ]


def cmd_advance_phase(state: WorkshopState, now: int, actor_alias: str) -> list[EventDraft]:
    """Move the workshop one phase forward once the current phase is done."""
    require_facilitator(state, actor_alias)
    if state.phase == Phase.CLOSED:
        raise WrongPhase("workshop is already closed")
    unfinished = [s.id for s in state.phase_steps(state.phase) if s.state != StepState.CLOSED]
    if unfinished:
        raise StepsIncomplete(f"steps not closed yet: {', '.join(unfinished)}")
    next_phase = PHASE_ORDER[PHASE_ORDER.index(state.phase) + 1]
    assert state.agenda is not None
    specs = state.agenda.steps_for(next_phase)
    instances = step_instances(state, specs, next_phase, round_index=0)
    return [
        EventDraft(
            kind="phase_advanced",
            payload={
                "from_phase": state.phase.value,
                "to_phase": next_phase.value,
                "steps": instances,
            },
            actor=actor_alias,
        )
    ]


# ---- applies ----


def apply_workshop_created(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.id = payload["workshop_id"]
    state.title = payload["title"]
    state.created_at = at
    state.agenda = Agenda.from_dict(payload["agenda"])
    state.phase = Phase.PREPARATION
    state.phase_history = [Phase.PREPARATION]
    state.issue_areas = [
        IssueArea(label=a["label"], keywords=list(a.get("keywords") or [])) for a in payload["issue_areas"]
    ]
    state.deterministic = bool(payload.get("deterministic", False))
    state.det_seed = payload.get("seed")
    _add_steps(state, payload["steps"])
    first = state.next_pending_step()
    state.current_step = first.id if first else None


def apply_participant_joined(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    p = Participant(
        token=payload["token"],
        alias=payload["alias"],
        role=Role(payload["role"]),
        group_label=payload.get("group_label"),
    )
    state.participants[p.alias] = p


def apply_phase_advanced(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.phase = Phase(payload["to_phase"])
    state.phase_history.append(state.phase)
    _add_steps(state, payload["steps"])
    nxt = state.next_pending_step()
    state.current_step = nxt.id if nxt else None


def _add_steps(state: WorkshopState, instances: Sequence[Mapping[str, Any]]) -> None:
    for inst in instances:
        state.steps.append(
            Step(
                id=inst["id"],
                kind=StepKind(inst["kind"]),
                phase=Phase(inst["phase"]),
                round_index=int(inst["round_index"]),
                time_limit=inst.get("time_limit"),
                params=dict(inst.get("params") or {}),
            )
        )
    state.bump("step", len(instances))

"""Vision trees, scenario composition, and homologous grouping.

Fantasy-phase visions root kind-stratified trees (vision, obstacle,
action, resource); the facilitator composes connected subtrees into
alternative scenarios; grouping across stakeholder groups is a proposal
tool, never auto-committed. Guard limits warn, they never block.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

from .errors import (
    EmptySelection,
    EmptyText,
    KindOrderViolation,
    SingleGroup,
    StepClosed,
    TextTooLong,
    UnknownNode,
    UnknownParent,
    VisionReused,
    WrongPhase,
)
from .grouping import SimilarityConfig, tokenize
from .model import (
    MAX_STATEMENT_CHARS,
    EventDraft,
    NodeKind,
    NODE_KIND_ORDER,
    Phase,
    Scenario,
    ScenarioNode,
    StepKind,
    WorkshopState,
    require_facilitator,
)


def _parent_kind(kind: NodeKind) -> Optional[NodeKind]:
    idx = NODE_KIND_ORDER.index(kind)
    return NODE_KIND_ORDER[idx - 1] if idx > 0 else None


def cmd_add_node(
    state: WorkshopState, now: int, alias: str, kind: NodeKind, text: str, parent: Optional[str]
) -> list[EventDraft]:
    """Append a node to the scenario forest.

    Visions are created in Fantasy, everything below them in Implementation.
    Exceeding a guard limit still adds the node but pairs it with a warning
    event for the facilitator.
    """
    step = state.open_step()
    if step is None or step.kind != StepKind.TREE_BUILD:
        raise StepClosed("no TreeBuild step is open")
    if step.deadline is not None and now >= step.deadline:
        raise StepClosed(f"step {step.id} deadline has passed")
    cleaned = text.strip()
    if not cleaned:
        raise EmptyText("node text is empty")
    if len(cleaned) > MAX_STATEMENT_CHARS:
        raise TextTooLong(f"node text exceeds {MAX_STATEMENT_CHARS} characters")

    if kind == NodeKind.VISION:
        if state.phase != Phase.FANTASY:
            raise WrongPhase(f"visions are added during Fantasy, phase is {state.phase.value}")
        if parent is not None:
            raise KindOrderViolation("a vision node takes no parent")
    else:
        if state.phase != Phase.IMPLEMENTATION:
            raise WrongPhase(
                f"{kind.value} nodes are added during Implementation, phase is {state.phase.value}"
            )
        if parent is None:
            raise KindOrderViolation(f"a {kind.value} node needs a parent")
        parent_node = state.nodes.get(parent)
        if parent_node is None:
            raise UnknownParent(f"node {parent} does not exist")
        if parent_node.kind != _parent_kind(kind):
            raise KindOrderViolation(
                f"a {kind.value} node attaches under {_parent_kind(kind).value}, not {parent_node.kind.value}"
            )

    node_id = state.peek_ids("node", 1)[0]
    root = state.vision_root_of(parent) if parent is not None else node_id
    subtree_count = (len(state.subtree_ids(root)) + 1) if parent is not None else 1
    total_count = len(state.nodes) + 1
    guard = state.agenda.guard if state.agenda else None

    drafts = [
        EventDraft(
            kind="scenario_node_added",
            payload={
                "node_id": node_id,
                "kind": kind.value,
                "text": cleaned,
                "parent": parent,
                "alias": alias,
                "vision_root": root,
            },
            actor=alias,
        )
    ]
    if guard is not None and (
        subtree_count >= guard.max_nodes_per_vision or total_count >= guard.max_total_nodes
    ):
        drafts.append(
            EventDraft(
                kind="guard_warning",
                payload={
                    "node_id": node_id,
                    "vision_root": root,
                    "subtree_count": subtree_count,
                    "total_count": total_count,
                    "max_nodes_per_vision": guard.max_nodes_per_vision,
                    "max_total_nodes": guard.max_total_nodes,
                },
                actor=alias,
            )
        )
    return drafts


def cmd_compose_scenarios(
    state: WorkshopState,
    now: int,
    actor_alias: str,
    selections: Sequence[Mapping[str, Any]],
    target: Optional[int] = None,
) -> list[EventDraft]:
    """Compose alternative scenarios as unions of full vision subtrees.

    Each selection ({label, visions}) claims whole vision roots; a vision
    may back at most one scenario. Visions left out are reported, not
    deleted. Recomposing replaces the previous composition.
    """
    require_facilitator(state, actor_alias)
    if state.phase != Phase.IMPLEMENTATION:
        raise WrongPhase(f"scenarios are composed during Implementation, phase is {state.phase.value}")
    if not selections:
        raise EmptySelection("no scenario selections supplied")
    assert state.agenda is not None
    effective = target if target is not None else len(selections)
    if not (state.agenda.compose_min <= effective <= state.agenda.compose_max):
        raise EmptySelection(
            f"target {effective} outside the configured {state.agenda.compose_min}..{state.agenda.compose_max}"
        )
    if len(selections) > effective:
        raise EmptySelection(f"{len(selections)} selections exceed the target of {effective}")

    roots = {n.id for n in state.nodes.values() if n.kind == NodeKind.VISION}
    used: set[str] = set()
    scenario_ids = state.peek_ids("scenario", len(selections))
    payload_scenarios = []
    for sc_id, sel in zip(scenario_ids, selections):
        label = str(sel.get("label") or "").strip()
        if not label:
            raise EmptyText("scenario label is empty")
        visions = list(sel.get("visions") or [])
        if not visions:
            raise EmptySelection(f"scenario {label!r} selects no visions")
        members: list[str] = []
        for vid in visions:
            if vid not in state.nodes:
                raise UnknownNode(f"node {vid} does not exist")
            if vid not in roots:
                raise UnknownNode(f"node {vid} is not a vision root")
            if vid in used:
                raise VisionReused(f"vision {vid} appears in more than one scenario")
            used.add(vid)
            members.extend(state.subtree_ids(vid))
        payload_scenarios.append(
            {
                "id": sc_id,
                "label": label,
                "visions": visions,
                "member_nodes": members,
                "narrative": str(sel.get("narrative") or ""),
            }
        )
    uncovered = sorted(roots - used, key=lambda i: (len(i), i))
    return [
        EventDraft(
            kind="scenarios_composed",
            payload={"scenarios": payload_scenarios, "uncovered_visions": uncovered},
            actor=actor_alias,
        )
    ]


# ---- applies ----


def apply_scenario_node_added(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.nodes[payload["node_id"]] = ScenarioNode(
        id=payload["node_id"],
        kind=NodeKind(payload["kind"]),
        text=payload["text"],
        parent=payload.get("parent"),
        author_alias=payload["alias"],
        created_at=at,
    )
    state.bump("node", 1)


def apply_guard_warning(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.guard_warnings.append(dict(payload))


def apply_scenarios_composed(state: WorkshopState, payload: Mapping[str, Any], at: int) -> None:
    state.scenarios = {}
    for sc in payload["scenarios"]:
        state.scenarios[sc["id"]] = Scenario(
            id=sc["id"],
            label=sc["label"],
            vision_ids=list(sc["visions"]),
            member_nodes=list(sc["member_nodes"]),
            narrative=sc.get("narrative", ""),
        )
    state.uncovered_visions = list(payload["uncovered_visions"])
    state.bump("scenario", len(payload["scenarios"]))


# ---- homologous grouping (pure proposal) ----


@dataclass
class ScenarioDigest:
    """Cross-group grouping input: a labeled bag of node texts."""

    group: str
    label: str
    texts: list[str]


@dataclass
class HomologousCluster:
    members: list[ScenarioDigest]
    label: str


def _token_bag(digest: ScenarioDigest, cfg: SimilarityConfig) -> Counter:
    bag: Counter = Counter()
    for text in digest.texts:
        bag.update(set(tokenize(text, cfg)))
    return bag


def _bag_jaccard(a: Counter, b: Counter) -> float:
    if not a and not b:
        return 0.0
    inter = sum((a & b).values())
    union = sum((a | b).values())
    return inter / union if union else 0.0


def group_homologous(
    scenario_sets: Sequence[Sequence[ScenarioDigest]],
    target: int = 3,
    config: SimilarityConfig | None = None,
) -> list[HomologousCluster]:
    """Propose merging similar scenarios produced by different groups.

    Greedy agglomeration over multiset-Jaccard similarity of the scenarios'
    node-token bags until at most ``target`` clusters remain. With a single
    group there is nothing to homologate and the stage is skipped.
    """
    if len(scenario_sets) < 2:
        raise SingleGroup("homologous grouping needs at least two groups' scenario sets")
    if target < 1:
        raise EmptySelection(f"target must be >= 1, got {target}")
    cfg = config or SimilarityConfig()
    digests = [d for group in scenario_sets for d in group]
    if not digests:
        raise EmptySelection("no scenarios supplied")

    clusters: list[list[int]] = [[i] for i in range(len(digests))]
    bags = [_token_bag(d, cfg) for d in digests]

    def cluster_similarity(ca: list[int], cb: list[int]) -> float:
        return max(_bag_jaccard(bags[i], bags[j]) for i in ca for j in cb)

    while len(clusters) > target:
        best: tuple[float, int, int] | None = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                sim = cluster_similarity(clusters[i], clusters[j])
                cand = (sim, -i, -j)
                if best is None or cand > (best[0], -best[1], -best[2]):
                    best = (sim, i, j)
        assert best is not None
        _, i, j = best
        clusters[i] = clusters[i] + clusters[j]
        del clusters[j]

    out = []
    for members in clusters:
        digs = [digests[i] for i in members]
        out.append(HomologousCluster(members=digs, label=digs[0].label))
    return out

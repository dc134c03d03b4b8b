"""Deterministic synthetic participants.

Each policy maps (its own seed, the visible workshop state) to a
submission; no hidden state, no wall clock, so a seeded run replays to the
same decisions on every machine. Salience over items, derived from a shared
seed, models where the cohort's attention concentrates; obscure items may
end up unrated and unranked, which is exactly what the zero-support rule
prunes.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import UnknownStepKind

POLICY_KINDS = ("Random", "Conformist", "Stubborn", "SelfBiased")


@dataclass(frozen=True)
class AgentPolicy:
    """Behavior profile of one synthetic stakeholder."""

    kind: str
    seed: int
    conformity: float = 0.5
    criteria_script: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise UnknownStepKind(f"unknown policy kind {self.kind!r}")
        if not 0.0 <= self.conformity <= 1.0:
            raise ValueError(f"conformity must be in [0,1], got {self.conformity}")


@dataclass
class StepContext:
    """Visible state handed to an agent when a step asks for its input."""

    step_kind: str
    round_index: int
    items: list[str]
    scale_max: int
    top_k: int
    alias: str
    shared_seed: int = 0
    own_items: set[str] = field(default_factory=set)
    prev_own_ratings: Optional[dict[str, int]] = None
    prev_own_ranking: Optional[list[str]] = None
    group_means: Optional[dict[str, float]] = None
    salience_low_fraction: Optional[float] = None
    salience_low_p: float = 0.08
    salience_high_p: float = 0.92
    chat_tail: list[str] = field(default_factory=list)


def _derive(*parts: object) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _rng(policy: AgentPolicy, ctx: StepContext) -> random.Random:
    return random.Random(_derive(policy.seed, ctx.round_index, ctx.step_kind))


def item_salience(shared_seed: int, item: str) -> float:
    """Cohort-wide attention weight of an item, uniform in [0,1)."""
    return (_derive(shared_seed, "salience", item) % 10**9) / 10**9


def _attended(policy: AgentPolicy, ctx: StepContext) -> list[str]:
    if ctx.salience_low_fraction is None:
        return list(ctx.items)
    out = []
    for item in ctx.items:
        low = item_salience(ctx.shared_seed, item) < ctx.salience_low_fraction
        p = ctx.salience_low_p if low else ctx.salience_high_p
        u = (_derive(policy.seed, "attend", ctx.round_index, item) % 10**9) / 10**9
        if u < p:
            out.append(item)
    return out


def _criterion(policy: AgentPolicy, ctx: StepContext) -> Optional[str]:
    if not policy.criteria_script:
        return None
    idx = min(ctx.round_index, len(policy.criteria_script) - 1)
    return policy.criteria_script[idx]


def _rank_by_ratings(ratings: dict[str, int], ctx: StepContext) -> list[str]:
    order = {item: i for i, item in enumerate(ctx.items)}
    ranked = sorted(ratings, key=lambda item: (-ratings[item], order.get(item, 10**9)))
    return ranked[: ctx.top_k]


def agent_act(policy: AgentPolicy, ctx: StepContext) -> dict:
    """Produce this agent's submission for the open step."""
    policy.validate()
    rng = _rng(policy, ctx)

    if ctx.step_kind == "Rating":
        return {"ratings": _ratings(policy, ctx, rng), "criterion": _criterion(policy, ctx)}
    if ctx.step_kind == "Ranking":
        return {"items": _ranking(policy, ctx, rng)}
    if ctx.step_kind == "Chat":
        top = ctx.prev_own_ranking[0] if ctx.prev_own_ranking else (ctx.items[0] if ctx.items else "-")
        return {"text": f"{ctx.alias} round {ctx.round_index}: my lead concern is {top}"}
    if ctx.step_kind == "SelfAssessment":
        return {"knowledge_gain": rng.randint(0, 5)}
    raise UnknownStepKind(f"no policy behavior for step kind {ctx.step_kind!r}")


def _ratings(policy: AgentPolicy, ctx: StepContext, rng: random.Random) -> dict[str, int]:
    attended = _attended(policy, ctx)
    prev = ctx.prev_own_ratings or {}

    if policy.kind == "Stubborn" and prev:
        return {item: prev[item] for item in ctx.items if item in prev}

    if policy.kind == "Conformist" and prev and ctx.group_means:
        out = {}
        for item in ctx.items:
            own = prev.get(item)
            mean = ctx.group_means.get(item)
            if own is None and mean is None:
                out[item] = rng.randint(0, ctx.scale_max)
                continue
            if own is None:
                own = mean
            if mean is None:
                mean = own
            moved = own + policy.conformity * (mean - own)
            out[item] = min(ctx.scale_max, max(0, round(moved)))
        return out

    if policy.kind == "SelfBiased":
        out = {}
        order = {item: i for i, item in enumerate(ctx.items)}
        for item in sorted(set(attended) | (ctx.own_items & set(ctx.items)), key=order.get):
            out[item] = ctx.scale_max if item in ctx.own_items else rng.randint(0, ctx.scale_max)
        return out

    # Random, or any first-round fallback
    return {item: rng.randint(0, ctx.scale_max) for item in attended}


def _ranking(policy: AgentPolicy, ctx: StepContext, rng: random.Random) -> list[str]:
    prev_ballot = ctx.prev_own_ranking or []

    if policy.kind == "Stubborn" and prev_ballot:
        current = set(ctx.items)
        return [item for item in prev_ballot if item in current][: ctx.top_k]

    if policy.kind in ("Stubborn", "Conformist", "SelfBiased") and ctx.prev_own_ratings:
        ratings = {i: v for i, v in ctx.prev_own_ratings.items() if i in set(ctx.items)}
        if policy.kind == "SelfBiased":
            order = {item: i for i, item in enumerate(ctx.items)}
            own_first = sorted((i for i in ratings if i in ctx.own_items), key=lambda i: order[i])
            rest = _rank_by_ratings({i: v for i, v in ratings.items() if i not in ctx.own_items}, ctx)
            return (own_first + rest)[: ctx.top_k]
        return _rank_by_ratings(ratings, ctx)

    pool = _attended(policy, ctx)
    count = min(ctx.top_k, len(pool))
    return rng.sample(pool, count) if count else []

"""Shared test fixtures: a driver that walks a workshop through its phases."""

from __future__ import annotations

from typing import Optional

from scenarioforge import engine, scenario
from scenarioforge.model import NodeKind, Role, StepKind, default_agenda
from scenarioforge.store import WorkshopStore


class Driver:
    """Convenience wrapper running commands against one workshop."""

    def __init__(self, store: WorkshopStore, title: str = "Test workshop", agenda=None, areas=("Economic",), seed: Optional[int] = 1):
        self.store = store
        handle = store.create_workshop(title, agenda or default_agenda(), list(areas), deterministic_seed=seed)
        self.id = handle.id
        self.handle = handle
        fac = store.register_participant(self.id, Role.FACILITATOR)
        self.facilitator = fac[0].payload["alias"]
        self.tokens = {self.facilitator: fac[0].payload["token"]}

    @property
    def state(self):
        return self.handle.state

    def join(self, count: int = 1, group_label: Optional[str] = None) -> list[str]:
        aliases = []
        for _ in range(count):
            events = self.store.register_participant(self.id, Role.STAKEHOLDER, group_label)
            payload = events[0].payload
            aliases.append(payload["alias"])
            self.tokens[payload["alias"]] = payload["token"]
        return aliases

    def advance(self):
        from scenarioforge.model import cmd_advance_phase

        return self.store.execute(self.id, cmd_advance_phase, actor_alias=self.facilitator)

    def open(self, kind: StepKind):
        return self.store.execute(self.id, engine.cmd_open_step, actor_alias=self.facilitator, kind=kind)

    def close(self, actor: Optional[str] = "facilitator"):
        alias = self.facilitator if actor == "facilitator" else actor
        return self.store.execute(self.id, engine.cmd_close_step, actor_alias=alias)

    def ideas(self, alias: str, texts: list[str]):
        return self.store.execute(self.id, engine.cmd_submit_ideas, alias=alias, texts=texts)

    def merge(self, groups=None, singleton_areas=None):
        return self.store.execute(
            self.id,
            engine.cmd_apply_merge_plan,
            actor_alias=self.facilitator,
            groups=groups or [],
            singleton_areas=singleton_areas or {},
        )

    def rate(self, alias: str, ratings: dict, criterion: Optional[str] = None):
        return self.store.execute(
            self.id, engine.cmd_submit_ratings, alias=alias, ratings=ratings, criterion=criterion
        )

    def rank(self, alias: str, items: list[str]):
        return self.store.execute(self.id, engine.cmd_submit_ranking, alias=alias, items=items)

    def cutoff(self, n: int):
        return self.store.execute(self.id, engine.cmd_cutoff, actor_alias=self.facilitator, n=n)

    def gate(self):
        return self.store.execute(self.id, engine.cmd_delphi_gate, actor_alias=self.facilitator)

    def chat(self, alias: str, text: str):
        return self.store.execute(self.id, engine.cmd_post_chat, alias=alias, text=text)

    def assess(self, alias: str, value: int, comment: Optional[str] = None):
        return self.store.execute(
            self.id, engine.cmd_submit_self_assessment, alias=alias, knowledge_gain=value, comment=comment
        )

    def add_node(self, alias: str, kind: NodeKind, text: str, parent: Optional[str] = None):
        return self.store.execute(
            self.id, scenario.cmd_add_node, alias=alias, kind=kind, text=text, parent=parent
        )

    def compose(self, selections, target: Optional[int] = None):
        return self.store.execute(
            self.id,
            scenario.cmd_compose_scenarios,
            actor_alias=self.facilitator,
            selections=selections,
            target=target,
        )

    # ---- multi-step conveniences ----

    def to_critique(self):
        self.advance()
        return self

    def seed_pool(self, per_alias: dict[str, list[str]]):
        """Open idea entry, submit the given texts, close."""
        self.open(StepKind.IDEA_ENTRY)
        for alias, texts in per_alias.items():
            self.ideas(alias, texts)
        self.close()
        return self

    def identity_merge(self):
        self.open(StepKind.MERGE)
        self.merge([])
        self.close()
        return self

    def active_ids(self) -> list[str]:
        return self.state.active_item_ids()

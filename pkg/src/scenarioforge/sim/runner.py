"""Scripted end-to-end workshop runs against the public HTTP surface.

The runner drives create, registration, idea entry, the facilitator merge,
and as many evaluation rounds as the gate allows, entirely through API
calls, so every simulation doubles as an integration test of the wire
contract. A scenario plus its seed fully determines the run: workshops are
created in deterministic mode, agents are seeded policies, and the merge
plan is derived from cluster suggestions tuned to hit the target list size
exactly.
"""

from __future__ import annotations

import io
import csv
import json
import math
import tempfile
from dataclasses import dataclass, field
from typing import Any, Optional

import httpx

from ..grouping import SimilarityConfig, profile_similarity, suggest_clusters
from ..model import ConvergencePolicy, default_agenda
from .agents import AgentPolicy, StepContext, agent_act, _derive

TOKEN_HEADER = "X-Session-Token"

_THRESHOLD_SWEEP = [x / 20 for x in range(20, 0, -1)]  # 1.0 down to 0.05


class SimulationError(RuntimeError):
    """An API call failed; carries the pipeline stage where it happened."""

    def __init__(self, stage: str, error: str, detail: str = ""):
        super().__init__(f"[{stage}] {error}: {detail}")
        self.stage = stage
        self.error = error
        self.detail = detail


@dataclass(frozen=True)
class SimScenario:
    """Recipe for one deterministic synthetic workshop."""

    participants: int
    ideas_per_participant: tuple[int, ...]
    target_items: int
    rounds_budget: int
    policy_mix: dict[str, float]
    cutoff_n: Optional[int] = None
    conformity: float = 0.5
    seed: int = 0
    top_k: int = 10
    rating_scale_max: int = 5
    w_min: float = 0.6
    salience_low_fraction: Optional[float] = None
    salience_low_p: float = 0.08
    salience_high_p: float = 0.92
    criteria: tuple[str, ...] = ()
    criteria_scripts: dict[str, tuple[str, ...]] = field(default_factory=dict)
    chat_each_round: bool = True
    issue_areas: tuple[dict, ...] = ()
    idea_topics: tuple[str, ...] = ()
    title: str = "Simulated workshop"

    def validate(self) -> None:
        if self.participants < 1:
            raise ValueError("participants must be positive")
        if len(self.ideas_per_participant) != self.participants:
            raise ValueError("ideas_per_participant must list one count per participant")
        if any(c < 1 for c in self.ideas_per_participant):
            raise ValueError("idea counts must be positive")
        if self.target_items < 1:
            raise ValueError("target_items must be positive")
        if self.rounds_budget < 0:
            raise ValueError("rounds_budget must be >= 0")
        total = sum(self.policy_mix.values())
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError(f"policy mix fractions must sum to 1, got {total}")


@dataclass
class SimResult:
    workshop_id: str
    trace: list[dict]
    metrics: list[dict]
    summary: dict


def metrics_csv(result: SimResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "kendall_w", "eliminated_fraction", "active_count"])
    for row in result.metrics:
        writer.writerow(
            [
                row["round"],
                f"{row['kendall_w']:.9f}",
                f"{row['eliminated_fraction']:.9f}",
                row["active_count"],
            ]
        )
    return buf.getvalue()


def _expand_mix(mix: dict[str, float], n: int) -> list[str]:
    """Turn mix fractions into per-agent policy kinds (largest remainder)."""
    kinds = sorted(mix)
    exact = {k: mix[k] * n for k in kinds}
    counts = {k: int(exact[k]) for k in kinds}
    shortfall = n - sum(counts.values())
    by_remainder = sorted(kinds, key=lambda k: (-(exact[k] - counts[k]), k))
    for k in by_remainder[:shortfall]:
        counts[k] += 1
    out: list[str] = []
    for k in kinds:
        out.extend([k] * counts[k])
    return out


def _idea_texts(scenario: SimScenario, agent_index: int) -> list[str]:
    topics = scenario.idea_topics or tuple(f"theme{i:02d}" for i in range(30))
    aspects = ("access", "quality", "cost", "risk")
    texts = []
    for j in range(scenario.ideas_per_participant[agent_index]):
        topic = topics[_derive(scenario.seed, "topic", agent_index, j) % len(topics)]
        aspect = aspects[_derive(scenario.seed, "aspect", agent_index, j) % len(aspects)]
        texts.append(f"{topic} {aspect} p{agent_index}x{j}")
    return texts


def _best_area(text: str, areas: list[dict]) -> str:
    best_label, best_sim = "Others", 0.0
    for area in areas:
        if not area.get("keywords"):
            continue
        sim = profile_similarity(text, area["keywords"])
        if sim > best_sim:
            best_label, best_sim = area["label"], sim
    return best_label


def build_merge_plan(raw_items: list[dict], target: int, areas: list[dict]) -> dict:
    """Derive a merge plan from cluster suggestions, hitting ``target`` exactly.

    The threshold sweeps downward to the tightest clustering with at least
    ``target`` clusters, then the smallest clusters are folded together (or
    members split out) until the post-merge Active count is exact.
    """
    pairs = [(item["id"], item["text"]) for item in raw_items]
    texts = dict(pairs)
    chosen = None
    for threshold in _THRESHOLD_SWEEP:
        clusters = suggest_clusters(pairs, SimilarityConfig(threshold=threshold))
        if len(clusters) >= target:
            chosen = clusters
        else:
            break
    if chosen is None:
        chosen = suggest_clusters(pairs, SimilarityConfig(threshold=1.0))
    groups = [{"members": list(c.member_ids), "heading": c.heading} for c in chosen]

    while len(groups) > target:
        groups.sort(key=lambda g: (len(g["members"]), g["members"][0]))
        smallest = groups.pop(0)
        groups[0]["members"] = smallest["members"] + groups[0]["members"]
    while len(groups) < target:
        groups.sort(key=lambda g: -len(g["members"]))
        donor = groups[0]
        if len(donor["members"]) < 2:
            break
        moved = donor["members"].pop()
        groups.append({"members": [moved], "heading": texts[moved]})

    plan_groups = []
    singleton_areas = {}
    for group in groups:
        if len(group["members"]) == 1:
            sid = group["members"][0]
            singleton_areas[sid] = _best_area(texts[sid], areas)
        else:
            heading = group.get("heading") or texts[group["members"][0]]
            plan_groups.append(
                {"members": group["members"], "heading": heading, "area": _best_area(heading, areas)}
            )
    return {"groups": plan_groups, "singleton_areas": singleton_areas}


class _Api:
    """Minimal typed wrapper that turns HTTP errors into SimulationError."""

    def __init__(self, client: httpx.Client):
        self.client = client

    def call(self, stage: str, method: str, path: str, token: str | None = None, **kwargs: Any) -> Any:
        headers = {TOKEN_HEADER: token} if token else {}
        response = self.client.request(method, path, headers=headers, **kwargs)
        if response.status_code >= 400:
            try:
                body = response.json()
            except json.JSONDecodeError:
                body = {"error": "HTTPError", "detail": response.text}
            raise SimulationError(stage, body.get("error", "HTTPError"), body.get("detail", ""))
        return response

    def json(self, stage: str, method: str, path: str, token: str | None = None, **kwargs: Any) -> Any:
        return self.call(stage, method, path, token=token, **kwargs).json()


def _parse_sse(text: str) -> list[dict]:
    events = []
    for line in text.splitlines():
        if line.startswith("data: "):
            events.append(json.loads(line[len("data: ") :]))
    return events


def run_simulation(scenario: SimScenario, client: httpx.Client | None = None) -> SimResult:
    """Drive one full workshop through the public API and collect metrics."""
    scenario.validate()
    if client is not None:
        return _run(scenario, _Api(client))
    from starlette.testclient import TestClient

    from ..service.app import create_app

    with tempfile.TemporaryDirectory(prefix="scenarioforge-sim-") as tmp:
        app = create_app(tmp, fsync=False)
        with TestClient(app) as test_client:
            return _run(scenario, _Api(test_client))


def _run(scenario: SimScenario, api: _Api) -> SimResult:
    areas = list(scenario.issue_areas) or [{"label": "General", "keywords": []}]
    agenda = default_agenda(
        top_k=scenario.top_k,
        rating_scale_max=scenario.rating_scale_max,
        policy=ConvergencePolicy(w_min=scenario.w_min, max_rounds=scenario.rounds_budget),
        criteria=scenario.criteria,
        include_self_assessment=False,
        cutoff_n=scenario.cutoff_n,
    )
    created = api.json(
        "create",
        "POST",
        "/workshops",
        json={
            "title": scenario.title,
            "agenda": agenda.to_dict(),
            "issue_areas": areas,
            "deterministic_seed": scenario.seed,
        },
    )
    wid = created["id"]
    base = f"/workshops/{wid}"

    fac = api.json("register", "POST", f"{base}/participants", json={"role": "Facilitator"})
    fac_token = fac["token"]

    kinds = _expand_mix(scenario.policy_mix, scenario.participants)
    agents = []
    for i, kind in enumerate(kinds):
        joined = api.json("register", "POST", f"{base}/participants", json={"role": "Stakeholder"})
        agents.append(
            {
                "alias": joined["alias"],
                "token": joined["token"],
                "policy": AgentPolicy(
                    kind=kind,
                    seed=_derive(scenario.seed, "agent", i),
                    conformity=scenario.conformity,
                    criteria_script=scenario.criteria_scripts.get(kind, ()),
                ),
                "index": i,
                "own_raw": set(),
                "own_items": set(),
                "ratings": None,
                "ranking": None,
            }
        )

    api.json("advance", "POST", f"{base}/phase/advance", token=fac_token)

    # idea entry
    api.json("ideas", "POST", f"{base}/steps/open", token=fac_token, json={"kind": "IdeaEntry"})
    for agent in agents:
        texts = _idea_texts(scenario, agent["index"])
        out = api.json("ideas", "POST", f"{base}/ideas", token=agent["token"], json={"texts": texts})
        agent["own_raw"].update(out["statement_ids"])
    api.json("ideas", "POST", f"{base}/steps/close", token=fac_token)

    raw_items = api.json("merge", "GET", f"{base}/items", params={"status": "Raw"})
    pool_size = len(raw_items)
    plan = build_merge_plan(raw_items, scenario.target_items, areas)
    api.json("merge", "POST", f"{base}/steps/open", token=fac_token, json={"kind": "Merge"})
    merge_out = api.json("merge", "POST", f"{base}/merge-plan", token=fac_token, json=plan)
    api.json("merge", "POST", f"{base}/steps/close", token=fac_token)

    active = api.json("merge", "GET", f"{base}/items", params={"status": "Active"})
    for agent in agents:
        own = set()
        for item in active:
            if item["id"] in agent["own_raw"] or set(item["merged_from"]) & agent["own_raw"]:
                own.add(item["id"])
        agent["own_items"] = own

    # evaluation rounds
    metrics: list[dict] = []
    decision = "BudgetStop"
    round_index = 0
    prev_means: Optional[dict[str, float]] = None
    while True:
        stage = f"round{round_index}"
        items = [i["id"] for i in api.json(stage, "GET", f"{base}/items", params={"status": "Active"})]

        def ctx_for(agent: dict, step_kind: str) -> StepContext:
            return StepContext(
                step_kind=step_kind,
                round_index=round_index,
                items=items,
                scale_max=scenario.rating_scale_max,
                top_k=scenario.top_k,
                alias=agent["alias"],
                shared_seed=scenario.seed,
                own_items=agent["own_items"],
                prev_own_ratings=agent["ratings"],
                prev_own_ranking=agent["ranking"],
                group_means=prev_means,
                salience_low_fraction=scenario.salience_low_fraction,
                salience_low_p=scenario.salience_low_p,
                salience_high_p=scenario.salience_high_p,
            )

        api.json(stage, "POST", f"{base}/steps/open", token=fac_token, json={"kind": "Rating"})
        for agent in agents:
            act = agent_act(agent["policy"], ctx_for(agent, "Rating"))
            if act["ratings"]:
                api.json(stage, "POST", f"{base}/ratings", token=agent["token"], json=act)
                agent["ratings"] = act["ratings"]
        api.json(stage, "POST", f"{base}/steps/close", token=fac_token)

        api.json(stage, "POST", f"{base}/steps/open", token=fac_token, json={"kind": "Ranking"})
        for agent in agents:
            act = agent_act(agent["policy"], ctx_for(agent, "Ranking"))
            if act["items"]:
                api.json(stage, "POST", f"{base}/ranking", token=agent["token"], json=act)
                agent["ranking"] = act["items"]
        api.json(stage, "POST", f"{base}/steps/close", token=fac_token)

        survivors = api.json(stage, "GET", f"{base}/items", params={"status": "Active"})
        cut_n = scenario.cutoff_n if scenario.cutoff_n is not None else max(1, len(survivors))
        api.json(stage, "POST", f"{base}/cutoff", token=fac_token, json={"n": cut_n})

        api.json(stage, "POST", f"{base}/steps/open", token=fac_token, json={"kind": "Chat"})
        if scenario.chat_each_round:
            for agent in agents:
                act = agent_act(agent["policy"], ctx_for(agent, "Chat"))
                api.json(stage, "POST", f"{base}/chat", token=agent["token"], json=act)
        api.json(stage, "POST", f"{base}/steps/close", token=fac_token)

        gate_out = api.json(stage, "POST", f"{base}/gate", token=fac_token)
        decision = gate_out["decision"]

        round_view = api.json(stage, "GET", f"{base}/rounds/{round_index}")
        snapshot = api.json(stage, "GET", base)
        report = round_view["convergence"] or {}
        metrics.append(
            {
                "round": round_index + 1,
                "kendall_w": report.get("kendall_w", 0.0),
                "eliminated_fraction": report.get("eliminated_fraction", 0.0),
                "active_count": snapshot["active_count"],
            }
        )
        prev_means = round_view["mean_ratings"]

        if decision != "Iterate":
            break
        round_index += 1

    stream = api.call("trace", "GET", f"{base}/events", params={"from_seq": 0, "wait": 0})
    trace = _parse_sse(stream.text)
    final_snapshot = api.json("trace", "GET", base)
    summary = {
        "workshop_id": wid,
        "pool_size": pool_size,
        "after_merge": merge_out["reduction"]["after"],
        "reduction_rate": merge_out["reduction"]["rate"],
        "rounds": round_index + 1,
        "decision": decision,
        "final_count": len(final_snapshot["final_items"] or []),
    }
    return SimResult(workshop_id=wid, trace=trace, metrics=metrics, summary=summary)

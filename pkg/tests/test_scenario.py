import pytest

from helpers import Driver
from scenarioforge.errors import (
    EmptySelection,
    KindOrderViolation,
    SingleGroup,
    StepClosed,
    UnknownNode,
    UnknownParent,
    VisionReused,
    WrongPhase,
)
from scenarioforge.grouping import SimilarityConfig
from scenarioforge.model import ExplosionGuard, NodeKind, StepKind, default_agenda
from scenarioforge.scenario import ScenarioDigest, group_homologous


def to_fantasy(driver, stakeholders=2):
    aliases = driver.join(stakeholders)
    driver.advance()
    driver.seed_pool({aliases[0]: ["one idea"]})
    driver.identity_merge()
    items = driver.active_ids()
    driver.open(StepKind.RATING)
    for a in aliases:
        driver.rate(a, {items[0]: 3})
    driver.close()
    driver.open(StepKind.RANKING)
    for a in aliases:
        driver.rank(a, items[:1])
    driver.close()
    driver.cutoff(1)
    if any(s.kind == StepKind.SELF_ASSESSMENT for s in driver.state.steps):
        driver.open(StepKind.SELF_ASSESSMENT)
        driver.close()
    driver.open(StepKind.CHAT)
    driver.close()
    if any(
        s.kind == StepKind.SELF_ASSESSMENT and s.state.value == "Pending" for s in driver.state.steps
    ):
        driver.open(StepKind.SELF_ASSESSMENT)
        driver.close()
    driver.gate()
    driver.advance()
    driver.open(StepKind.TREE_BUILD)
    return aliases


def to_implementation(driver, aliases):
    driver.close()  # fantasy tree build
    driver.open(StepKind.CHAT)
    driver.close()
    driver.advance()
    driver.open(StepKind.TREE_BUILD)


@pytest.fixture
def lean(store):
    return Driver(store, agenda=default_agenda(include_self_assessment=False))


class TestAddNode:
    def test_vision_as_root_in_fantasy(self, lean):
        aliases = to_fantasy(lean)
        events = lean.add_node(aliases[0], NodeKind.VISION, "clean rivers by 2030")
        assert events[0].payload["parent"] is None
        assert len(lean.state.nodes) == 1

    def test_vision_rejected_outside_fantasy(self, lean):
        aliases = lean.join(1)
        lean.advance()
        lean.open(StepKind.IDEA_ENTRY)
        with pytest.raises(StepClosed):
            lean.add_node(aliases[0], NodeKind.VISION, "early vision")

    def test_kind_order_enforced(self, lean):
        aliases = to_fantasy(lean)
        vision = lean.add_node(aliases[0], NodeKind.VISION, "vision")[0].payload["node_id"]
        to_implementation(lean, aliases)
        obstacle = lean.add_node(aliases[0], NodeKind.OBSTACLE, "funding gap", parent=vision)[0].payload[
            "node_id"
        ]
        with pytest.raises(KindOrderViolation):
            lean.add_node(aliases[0], NodeKind.RESOURCE, "grant money", parent=obstacle)
        action = lean.add_node(aliases[0], NodeKind.ACTION, "apply for grants", parent=obstacle)[0].payload[
            "node_id"
        ]
        lean.add_node(aliases[0], NodeKind.RESOURCE, "grant money", parent=action)

    def test_unknown_parent(self, lean):
        aliases = to_fantasy(lean)
        lean.add_node(aliases[0], NodeKind.VISION, "vision")
        to_implementation(lean, aliases)
        with pytest.raises(UnknownParent):
            lean.add_node(aliases[0], NodeKind.OBSTACLE, "orphan", parent="n999")

    def test_obstacle_requires_parent(self, lean):
        aliases = to_fantasy(lean)
        lean.add_node(aliases[0], NodeKind.VISION, "vision")
        to_implementation(lean, aliases)
        with pytest.raises(KindOrderViolation):
            lean.add_node(aliases[0], NodeKind.OBSTACLE, "floating obstacle")

    def test_vision_takes_no_parent(self, lean):
        aliases = to_fantasy(lean)
        vid = lean.add_node(aliases[0], NodeKind.VISION, "vision")[0].payload["node_id"]
        with pytest.raises(KindOrderViolation):
            lean.add_node(aliases[0], NodeKind.VISION, "nested vision", parent=vid)


class TestExplosionGuard:
    def test_geometric_tree_triggers_at_forty(self, store):
        agenda = default_agenda(include_self_assessment=False, guard=ExplosionGuard(40, 200))
        driver = Driver(store, agenda=agenda)
        aliases = to_fantasy(driver)
        alias = aliases[0]
        vision = driver.add_node(alias, NodeKind.VISION, "root vision")[0].payload["node_id"]
        to_implementation(driver, aliases)
        warnings = 0
        obstacles = []
        for i in range(3):
            events = driver.add_node(alias, NodeKind.OBSTACLE, f"obstacle {i}", parent=vision)
            obstacles.append(events[0].payload["node_id"])
            warnings += sum(1 for e in events if e.kind == "guard_warning")
        actions = []
        for parent in obstacles:
            for i in range(3):
                events = driver.add_node(alias, NodeKind.ACTION, f"action {i}", parent=parent)
                actions.append(events[0].payload["node_id"])
                warnings += sum(1 for e in events if e.kind == "guard_warning")
        count = 0
        for parent in actions:
            for i in range(3):
                events = driver.add_node(alias, NodeKind.RESOURCE, f"resource {i}", parent=parent)
                count += 1
                warnings += sum(1 for e in events if e.kind == "guard_warning")
        # 1 + 3 + 9 + 27 = 40 nodes; only the 40th crosses the default limit
        assert len(driver.state.nodes) == 40
        assert warnings == 1
        assert driver.state.guard_warnings[0]["subtree_count"] == 40

    def test_guard_warns_but_never_blocks(self, store):
        agenda = default_agenda(include_self_assessment=False, guard=ExplosionGuard(2, 3))
        driver = Driver(store, agenda=agenda)
        aliases = to_fantasy(driver)
        driver.add_node(aliases[0], NodeKind.VISION, "v1")
        events2 = driver.add_node(aliases[0], NodeKind.VISION, "v2")
        events3 = driver.add_node(aliases[0], NodeKind.VISION, "v3")
        # total limit 3 reached on the third node; every add succeeded
        assert len(driver.state.nodes) == 3
        assert any(e.kind == "guard_warning" for e in events3)
        assert not any(e.kind == "guard_warning" for e in events2)


class TestCompose:
    def _six_visions(self, driver):
        aliases = to_fantasy(driver)
        visions = [
            driver.add_node(aliases[0], NodeKind.VISION, f"vision {i}")[0].payload["node_id"]
            for i in range(6)
        ]
        to_implementation(driver, aliases)
        return aliases, visions

    def test_partition_into_three(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        _, visions = self._six_visions(driver)
        events = driver.compose(
            [
                {"label": "A", "visions": visions[0:2]},
                {"label": "B", "visions": visions[2:4]},
                {"label": "C", "visions": visions[4:6]},
            ]
        )
        payload = events[0].payload
        assert len(payload["scenarios"]) == 3
        assert payload["uncovered_visions"] == []
        members = [set(sc["member_nodes"]) for sc in payload["scenarios"]]
        assert members[0] & members[1] == set()
        assert members[1] & members[2] == set()

    def test_vision_reuse_rejected(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        _, visions = self._six_visions(driver)
        with pytest.raises(VisionReused):
            driver.compose(
                [
                    {"label": "A", "visions": visions[0:2]},
                    {"label": "B", "visions": [visions[0], visions[3]]},
                ]
            )

    def test_uncovered_reported(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        _, visions = self._six_visions(driver)
        events = driver.compose(
            [
                {"label": "A", "visions": visions[0:3]},
                {"label": "B", "visions": visions[3:5]},
            ]
        )
        assert events[0].payload["uncovered_visions"] == [visions[5]]

    def test_empty_selection(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        self._six_visions(driver)
        with pytest.raises(EmptySelection):
            driver.compose([])

    def test_unknown_vision(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        self._six_visions(driver)
        with pytest.raises(UnknownNode):
            driver.compose([{"label": "A", "visions": ["n999"]}, {"label": "B", "visions": ["n998"]}])

    def test_wrong_phase(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        driver.join(1)
        with pytest.raises(WrongPhase):
            driver.compose([{"label": "A", "visions": ["n1"]}, {"label": "B", "visions": ["n2"]}])


class TestHomologous:
    def _digest(self, group, label, texts):
        return ScenarioDigest(group=group, label=label, texts=texts)

    def test_identical_sets_pair_up(self):
        g1 = [
            self._digest("G1", "coastal", ["protect the coast", "limit building"]),
            self._digest("G1", "farming", ["support farming", "water quotas"]),
        ]
        g2 = [
            self._digest("G2", "coastal twin", ["protect the coast", "limit building"]),
            self._digest("G2", "farming twin", ["support farming", "water quotas"]),
        ]
        clusters = group_homologous([g1, g2], target=2)
        assert len(clusters) == 2
        for cluster in clusters:
            assert {m.group for m in cluster.members} == {"G1", "G2"}

    def test_single_group_skips_stage(self):
        with pytest.raises(SingleGroup):
            group_homologous([[self._digest("G1", "only", ["text"])]], target=3)

    def test_target_bound(self):
        groups = [
            [self._digest("G1", f"s{i}", [f"alpha {i}", f"beta {i}"]) for i in range(3)],
            [self._digest("G2", f"t{i}", [f"gamma {i}", f"delta {i}"]) for i in range(3)],
        ]
        clusters = group_homologous(groups, target=3, config=SimilarityConfig(threshold=0.2))
        assert len(clusters) == 3

    def test_proposal_never_empty_clusters(self):
        groups = [
            [self._digest("G1", "a", ["one two"]), self._digest("G1", "b", ["three four"])],
            [self._digest("G2", "c", ["five six"])],
        ]
        clusters = group_homologous(groups, target=2)
        assert sum(len(c.members) for c in clusters) == 3
        assert all(c.members for c in clusters)

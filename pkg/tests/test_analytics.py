import math

import pytest

from helpers import Driver
from scenarioforge import analytics
from scenarioforge.errors import InsufficientHistory, TaggingDisabled, UnknownAlias
from scenarioforge.model import ConvergencePolicy, StepKind, default_agenda

CRITERIA = ["financial/economic", "social", "environmental"]


@pytest.fixture
def two_round_driver(store):
    """Two stakeholders through two full rounds with criteria tagging."""
    agenda = default_agenda(
        include_self_assessment=True,
        criteria=CRITERIA,
        policy=ConvergencePolicy(w_min=0.99, max_rounds=2),
    )
    driver = Driver(store, agenda=agenda)
    aliases = driver.join(2)
    driver.advance()
    driver.seed_pool({a: [f"{a} idea {j}" for j in range(3)] for a in aliases})
    driver.identity_merge()
    items = driver.active_ids()

    # round 0: opposed ballots keep W low, tags lean economic
    driver.open(StepKind.RATING)
    driver.rate(aliases[0], {items[0]: 1, items[1]: 5}, criterion="financial/economic")
    driver.rate(aliases[1], {items[0]: 2, items[1]: 4}, criterion="financial/economic")
    driver.close()
    driver.open(StepKind.RANKING)
    driver.rank(aliases[0], items)
    driver.rank(aliases[1], list(reversed(items)))
    driver.close()
    driver.cutoff(len(driver.active_ids()))
    driver.open(StepKind.SELF_ASSESSMENT)
    driver.assess(aliases[0], 2)
    driver.assess(aliases[1], 4)
    driver.close()
    driver.open(StepKind.CHAT)
    driver.chat(aliases[0], "leaning social now")
    driver.close()
    driver.open(StepKind.SELF_ASSESSMENT)
    driver.close()
    driver.gate()  # Iterate

    # round 1: tags shift social
    items = driver.active_ids()
    driver.open(StepKind.RATING)
    driver.rate(aliases[0], {items[0]: 3, items[1]: 5}, criterion="social")
    driver.rate(aliases[1], {items[0]: 2, items[1]: 4}, criterion="social")
    driver.close()
    driver.open(StepKind.RANKING)
    driver.rank(aliases[0], items)
    driver.rank(aliases[1], items)
    driver.close()
    driver.cutoff(len(driver.active_ids()))
    driver.open(StepKind.SELF_ASSESSMENT)
    driver.close()
    driver.open(StepKind.CHAT)
    driver.close()
    driver.open(StepKind.SELF_ASSESSMENT)
    driver.close()
    driver.gate()
    return driver, aliases, items


class TestBehaviorSeries:
    def test_counts_two_rounds(self, two_round_driver):
        driver, aliases, _ = two_round_driver
        series = analytics.behavior_series(driver.state, aliases[0])
        assert len(series) == 4  # rating + ranking per round
        assert [(s.round_index, s.step_kind) for s in series] == [
            (0, StepKind.RATING),
            (0, StepKind.RANKING),
            (1, StepKind.RATING),
            (1, StepKind.RANKING),
        ]

    def test_unknown_alias(self, two_round_driver):
        driver, _, _ = two_round_driver
        with pytest.raises(UnknownAlias):
            analytics.behavior_series(driver.state, "P99")

    def test_silent_participant_empty(self, store):
        driver = Driver(store)
        aliases = driver.join(1)
        assert analytics.behavior_series(driver.state, aliases[0]) == []


class TestStability:
    def test_value_from_two_rounds(self, two_round_driver):
        driver, aliases, items = two_round_driver
        # round 0 {i0:1, i1:5} to round 1 {i0:3, i1:5} moves (2 + 0) / 2
        assert math.isclose(analytics.stability(driver.state, aliases[0]), 1.0)

    def test_identical_rounds_zero(self, two_round_driver):
        driver, aliases, _ = two_round_driver
        assert analytics.stability(driver.state, aliases[1]) == 0.0

    def test_single_round_insufficient(self, store):
        driver = Driver(store, agenda=default_agenda(include_self_assessment=False))
        aliases = driver.join(1)
        driver.advance()
        driver.seed_pool({aliases[0]: ["solo idea"]})
        driver.identity_merge()
        items = driver.active_ids()
        driver.open(StepKind.RATING)
        driver.rate(aliases[0], {items[0]: 3})
        driver.close()
        with pytest.raises(InsufficientHistory):
            analytics.stability(driver.state, aliases[0])


class TestCriteria:
    def test_distribution_counts(self, two_round_driver):
        driver, _, _ = two_round_driver
        dist = analytics.criteria_distribution(driver.state, 0)
        assert dist["fractions"] == {"financial/economic": 1.0}
        assert dist["tagged"] == 2 and dist["untagged"] == 0

    def test_shift_changes_dominant(self, two_round_driver):
        driver, _, _ = two_round_driver
        shift = analytics.criteria_shift(driver.state)
        assert [d["dominant"] for d in shift] == ["financial/economic", "social"]

    def test_fractions_sum_to_one(self, two_round_driver):
        driver, _, _ = two_round_driver
        for dist in analytics.criteria_shift(driver.state):
            if dist["fractions"]:
                assert abs(sum(dist["fractions"].values()) - 1.0) < 1e-12

    def test_disabled_without_config(self, store):
        driver = Driver(store)
        with pytest.raises(TaggingDisabled):
            analytics.criteria_distribution(driver.state, 0)

    def test_untagged_counted_not_imputed(self, store):
        agenda = default_agenda(include_self_assessment=False, criteria=CRITERIA)
        driver = Driver(store, agenda=agenda)
        aliases = driver.join(2)
        driver.advance()
        driver.seed_pool({aliases[0]: ["an idea"]})
        driver.identity_merge()
        items = driver.active_ids()
        driver.open(StepKind.RATING)
        driver.rate(aliases[0], {items[0]: 3}, criterion="social")
        driver.rate(aliases[1], {items[0]: 4})  # untagged
        driver.close()
        dist = analytics.criteria_distribution(driver.state, 0)
        assert dist["fractions"] == {"social": 1.0}
        assert dist["untagged"] == 1


class TestKnowledgeGain:
    def test_mean_per_step(self, two_round_driver):
        driver, _, _ = two_round_driver
        summary = analytics.knowledge_gain_summary(driver.state)
        means = [v["mean"] for v in summary["per_step"].values()]
        assert 3.0 in means  # {2, 4} at the first assessment step
        assert means.count(None) == 3  # the other assessment steps got nothing

    def test_vacuous(self, store):
        driver = Driver(store)
        summary = analytics.knowledge_gain_summary(driver.state)
        assert summary["per_alias"] == {}


class TestCsv:
    def test_snapshot_rows(self, two_round_driver):
        driver, _, _ = two_round_driver
        csv_text = analytics.snapshots_csv(driver.state)
        lines = csv_text.strip().splitlines()
        assert lines[0] == "alias,round,step,item,value"
        assert len(lines) > 1

    def test_criteria_rows(self, two_round_driver):
        driver, _, _ = two_round_driver
        csv_text = analytics.criteria_csv(driver.state)
        assert "financial/economic" in csv_text and "social" in csv_text

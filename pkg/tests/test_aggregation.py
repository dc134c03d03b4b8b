import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scenarioforge.aggregation import (
    ConvergencePolicy,
    GATE_BUDGET_STOP,
    GATE_CONVERGED,
    GATE_ITERATE,
    borda_scores,
    complete_rankings,
    cutoff_top,
    decide,
    kendall_w,
    low_discrimination,
    mean_rating,
    reduction_rate,
)
from scenarioforge.errors import (
    AfterExceedsBefore,
    EmptyInput,
    MalformedBallot,
    TooFewItems,
    TooFewRankers,
)


# independent oracle: per-ballot point sum, written before the implementation path
def borda_oracle(rankings, top_k, items):
    scores = {i: 0.0 for i in items}
    for ballot in rankings.values():
        for pos, item in enumerate(ballot, start=1):
            scores[item] += top_k + 1 - pos
    return scores


class TestMeanRating:
    def test_constant(self):
        assert mean_rating([3, 3, 3]) == 3.0

    def test_direct(self):
        assert mean_rating([4, 5, 3, 3]) == 3.75

    def test_symmetry(self):
        assert mean_rating([0, 5]) == 2.5

    def test_empty(self):
        with pytest.raises(EmptyInput):
            mean_rating([])


class TestBorda:
    def test_single_ballot(self):
        scores = borda_scores({"P1": ["A", "B", "C"]}, 10, ["A", "B", "C", "D"])
        assert scores == {"A": 10.0, "B": 9.0, "C": 8.0, "D": 0.0}

    def test_two_opposed_ballots(self):
        # hand sum: each of A and B collects 10 + 9
        scores = borda_scores({"P1": ["A", "B"], "P2": ["B", "A"]}, 10, ["A", "B"])
        assert scores == {"A": 19.0, "B": 19.0}

    def test_no_ballots(self):
        assert borda_scores({}, 10, ["A", "B"]) == {"A": 0.0, "B": 0.0}

    def test_too_long_ballot(self):
        with pytest.raises(MalformedBallot):
            borda_scores({"P1": ["A", "B", "C"]}, 2, ["A", "B", "C"])

    def test_duplicate_item(self):
        with pytest.raises(MalformedBallot):
            borda_scores({"P1": ["A", "A"]}, 10, ["A", "B"])

    def test_unknown_item(self):
        with pytest.raises(MalformedBallot):
            borda_scores({"P1": ["Z"]}, 10, ["A"])

    @given(
        st.lists(
            st.permutations(["A", "B", "C", "D"]).map(lambda p: p[:3]),
            min_size=0,
            max_size=6,
        )
    )
    def test_matches_oracle_and_is_additive(self, ballots):
        items = ["A", "B", "C", "D"]
        named = {f"P{i}": b for i, b in enumerate(ballots)}
        scores = borda_scores(named, 5, items)
        assert scores == borda_oracle(named, 5, items)
        # additivity over disjoint ballot subsets
        half = len(ballots) // 2
        first = {k: named[k] for k in list(named)[:half]}
        second = {k: named[k] for k in list(named)[half:]}
        merged = {
            i: borda_scores(first, 5, items)[i] + borda_scores(second, 5, items)[i] for i in items
        }
        assert merged == scores


class TestKendallW:
    def test_identical_rankings(self):
        w = kendall_w({"P1": ["A", "B", "C"], "P2": ["A", "B", "C"]}, ["A", "B", "C"])
        assert abs(w - 1.0) < 1e-12

    def test_opposed_rankings(self):
        # rank sums 4,4,4 so S = 0
        w = kendall_w({"P1": ["A", "B", "C"], "P2": ["C", "B", "A"]}, ["A", "B", "C"])
        assert abs(w) < 1e-12

    def test_partial_agreement(self):
        # sums 2,5,5 give S = 6 against max 8, W = 0.75
        w = kendall_w({"P1": ["A", "B", "C"], "P2": ["A", "C", "B"]}, ["A", "B", "C"])
        assert abs(w - 0.75) < 1e-12

    def test_too_few_rankers(self):
        with pytest.raises(TooFewRankers):
            kendall_w({"P1": ["A", "B"]}, ["A", "B"])

    def test_too_few_items(self):
        with pytest.raises(TooFewItems):
            kendall_w({"P1": ["A"], "P2": ["A"]}, ["A"])

    def test_partial_ballots_mid_rank_imputation(self):
        vecs = complete_rankings({"P1": ["A"]}, ["A", "B", "C"])
        # unranked items share the average of positions 2 and 3
        assert vecs["P1"] == {"A": 1.0, "B": 2.5, "C": 2.5}

    @given(st.data())
    def test_permutation_symmetry(self, data):
        items = ["A", "B", "C", "D"]
        m = data.draw(st.integers(min_value=2, max_value=5))
        rankings = {f"P{i}": data.draw(st.permutations(items)) for i in range(m)}
        w = kendall_w(rankings, items)
        # relabel the rankers
        shuffled = {f"Q{i}": rankings[f"P{i}"] for i in range(m)}
        assert math.isclose(w, kendall_w(shuffled, items))
        # relabel the items consistently
        mapping = {"A": "W", "B": "X", "C": "Y", "D": "Z"}
        relabeled = {k: [mapping[i] for i in v] for k, v in rankings.items()}
        assert math.isclose(w, kendall_w(relabeled, [mapping[i] for i in items]), abs_tol=1e-12)
        assert 0.0 <= w <= 1.0

    @given(st.integers(min_value=2, max_value=6))
    def test_copies_of_one_ranking(self, m):
        items = ["A", "B", "C", "D", "E"]
        rankings = {f"P{i}": items for i in range(m)}
        assert abs(kendall_w(rankings, items) - 1.0) < 1e-12


class TestCutoff:
    def test_no_tie(self):
        scores = {f"i{k}": float(k) for k in range(35)}
        selected, eliminated = cutoff_top(scores, 17)
        assert len(selected) == 17 and len(eliminated) == 18

    def test_boundary_tie(self):
        selected, eliminated = cutoff_top({"A": 9.1, "B": 8.0, "C": 8.0, "D": 7.5}, 2)
        assert selected == {"A", "B", "C"}
        assert eliminated == {"D"}

    def test_degenerate_cut(self):
        scores = {"A": 1.0, "B": 2.0}
        selected, eliminated = cutoff_top(scores, 5)
        assert selected == {"A", "B"} and eliminated == set()

    @given(
        st.dictionaries(
            st.text(alphabet="abcdefgh", min_size=1, max_size=3),
            st.floats(min_value=-100, max_value=100, allow_nan=False),
            min_size=1,
            max_size=12,
        ),
        st.integers(min_value=1, max_value=15),
    )
    def test_partition_and_boundary(self, scores, n):
        selected, eliminated = cutoff_top(scores, n)
        assert selected | eliminated == set(scores)
        assert selected & eliminated == set()
        assert len(selected) >= min(n, len(scores))
        if eliminated:
            assert min(scores[i] for i in selected) > max(scores[i] for i in eliminated)


class TestReductionRate:
    def test_identity(self):
        assert reduction_rate(10, 10) == 0.0

    def test_pool_to_merged(self):
        assert math.isclose(reduction_rate(63, 40), 1 - 40 / 63)

    def test_merged_to_cut(self):
        assert math.isclose(reduction_rate(40, 17), 0.575)

    def test_after_exceeds_before(self):
        with pytest.raises(AfterExceedsBefore):
            reduction_rate(10, 11)


class TestDecide:
    def test_threshold_convergence(self):
        assert decide(ConvergencePolicy(), 1, 0.65, 0.2) == GATE_CONVERGED

    def test_budget_stop(self):
        assert decide(ConvergencePolicy(), 2, 0.2, 0.0) == GATE_BUDGET_STOP

    def test_iterate(self):
        assert decide(ConvergencePolicy(), 1, 0.2, 0.0) == GATE_ITERATE

    def test_zero_budget_stops_immediately(self):
        assert decide(ConvergencePolicy(max_rounds=0), 1, 0.2, 0.0) == GATE_BUDGET_STOP

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
        st.integers(min_value=1, max_value=5),
    )
    def test_monotone_in_w(self, w_low, w_high, round_number):
        lo, hi = sorted([w_low, w_high])
        policy = ConvergencePolicy()
        order = {GATE_ITERATE: 0, GATE_BUDGET_STOP: 0, GATE_CONVERGED: 1}
        assert order[decide(policy, round_number, hi, 0.0)] >= order[decide(policy, round_number, lo, 0.0)]


class TestLowDiscrimination:
    def test_bunched_means_flagged(self):
        # three quarters of the means inside a 1.5-wide band
        means = [3.0, 3.4, 4.1, 4.5, 4.4, 3.9, 3.2, 0.5]
        assert low_discrimination(means) is True

    def test_spread_means_not_flagged(self):
        assert low_discrimination([0.0, 1.0, 2.0, 3.0, 4.0, 5.0]) is False

    def test_empty(self):
        assert low_discrimination([]) is False

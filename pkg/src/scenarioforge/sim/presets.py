"""Canned scenarios: the cohort shapes used by the acceptance suite.

``RABAT_SEED`` was found by scripts/find_rabat_seed.py: it is the seed for
which the stubborn-heavy cohort reproduces the reference pipeline shape
exactly (63 pooled ideas merged to 40, 5 pruned as zero-support, a clean
17-item cut, and a budget stop after the second tour).
"""

from __future__ import annotations

from .runner import SimScenario

RABAT_SEED = 3

ISSUE_AREAS = (
    {
        "label": "Political/institutional",
        "keywords": ["governance", "institutions", "policy", "regulation", "law"],
    },
    {
        "label": "Physical/environmental",
        "keywords": ["water", "soil", "pollution", "coast", "land", "climate"],
    },
    {
        "label": "Social-cultural",
        "keywords": ["culture", "education", "community", "heritage", "health"],
    },
    {
        "label": "Economic",
        "keywords": ["trade", "market", "jobs", "industry", "tourism", "income"],
    },
    {"label": "Others", "keywords": []},
)

# idea topics reuse area keywords plus neutral fillers so both the merge
# clustering and the area matching have something to bite on
IDEA_TOPICS = tuple(
    kw for area in ISSUE_AREAS for kw in area["keywords"]
) + ("transport", "housing", "energy", "waste", "ports", "farming")


def rabat_scenario(seed: int = RABAT_SEED) -> SimScenario:
    """Eleven stakeholders, 63 ideas, merge to 40, cut to 17, budget 2."""
    return SimScenario(
        participants=11,
        ideas_per_participant=(6, 6, 6, 6, 6, 6, 6, 6, 5, 5, 5),
        target_items=40,
        cutoff_n=17,
        rounds_budget=2,
        policy_mix={"Stubborn": 7 / 11, "Random": 2 / 11, "SelfBiased": 2 / 11},
        seed=seed,
        top_k=10,
        rating_scale_max=5,
        w_min=0.6,
        salience_low_fraction=0.35,
        salience_low_p=0.05,
        salience_high_p=0.9,
        issue_areas=ISSUE_AREAS,
        idea_topics=IDEA_TOPICS,
        title="Globalization and local resources",
    )


def conformist_scenario(seed: int, conformity: float = 0.8, rounds_budget: int = 5) -> SimScenario:
    """Eight conformists over a 12-item list; averaging should converge."""
    return SimScenario(
        participants=8,
        ideas_per_participant=(2,) * 8,
        target_items=12,
        cutoff_n=None,
        rounds_budget=rounds_budget,
        policy_mix={"Conformist": 1.0},
        conformity=conformity,
        seed=seed,
        top_k=10,
        rating_scale_max=5,
        w_min=0.6,
        issue_areas=ISSUE_AREAS,
        idea_topics=IDEA_TOPICS,
        title="Conformist convergence probe",
    )


def criteria_shift_scenario(seed: int = 7) -> SimScenario:
    """Agents tag economic criteria first, then social after the first chat."""
    return SimScenario(
        participants=6,
        ideas_per_participant=(3,) * 6,
        target_items=10,
        cutoff_n=None,
        rounds_budget=3,
        policy_mix={"Random": 1.0},
        seed=seed,
        w_min=1.0,  # random ballots never hit perfect concordance, so the budget runs out
        criteria=("financial/economic", "social", "environmental"),
        criteria_scripts={"Random": ("financial/economic", "social", "social")},
        issue_areas=ISSUE_AREAS,
        idea_topics=IDEA_TOPICS,
        title="Criteria shift probe",
    )

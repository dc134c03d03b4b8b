"""Jury majority probability under independent equally-competent voters."""

from __future__ import annotations

from math import comb

from ..errors import EvenVoters, OutOfScale


def condorcet_majority_probability(m: int, p: float) -> float:
    """Probability that a strict majority of m voters judges correctly.

    Each voter is independently correct with probability p; m must be odd so
    no tie is possible. Binomial tail sum from ceil(m/2) upward.
    """
    if m < 1 or m % 2 == 0:
        raise EvenVoters(f"voter count must be odd and positive, got {m}")
    if not 0.0 <= p <= 1.0:
        raise OutOfScale(f"competence must be in [0,1], got {p}")
    majority = m // 2 + 1
    return sum(comb(m, k) * p**k * (1.0 - p) ** (m - k) for k in range(majority, m + 1))

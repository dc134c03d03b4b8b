"""Redundancy detection and issue-area assignment.

Covers the merge-support side of the facilitator's job: token-set
similarity between statements, single-linkage cluster suggestions for the
merge review screen, and a seeded genetic algorithm that assigns statements
to issue areas by keyword-profile consistency. Suggestions are proposals;
nothing here mutates workshop state.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import NoAreas, UnassignedStatement

_TOKEN_RE = re.compile(r"[^0-9a-z]+")

OTHERS_LABEL = "Others"
OTHERS_FLOOR = 0.05


@dataclass(frozen=True)
class SimilarityConfig:
    """Tokenizer settings and the clustering threshold."""

    threshold: float = 0.4
    stopwords: frozenset[str] = frozenset()

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0,1], got {self.threshold}")


@dataclass(frozen=True)
class GaParams:
    """Knobs for the generational GA; deterministic for a fixed seed."""

    population: int = 50
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05
    seed: int = 0
    elitism: int = 1

    def validate(self) -> None:
        if self.population < 2:
            raise ValueError(f"population must be >= 2, got {self.population}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        for name, rate in (("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {rate}")


@dataclass
class Cluster:
    member_ids: list[str]
    heading: str


def tokenize(text: str, config: SimilarityConfig | None = None) -> list[str]:
    """Lowercase word split on non-alphanumerics, stopwords removed."""
    stop = config.stopwords if config else frozenset()
    return [t for t in _TOKEN_RE.split(text.lower()) if t and t not in stop]


def similarity(a: str, b: str, config: SimilarityConfig | None = None) -> float:
    """Jaccard index of the two texts' token sets; both empty gives 0."""
    ta, tb = set(tokenize(a, config)), set(tokenize(b, config))
    if not ta and not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def profile_similarity(text: str, keywords: Iterable[str], config: SimilarityConfig | None = None) -> float:
    """Jaccard index between a statement's tokens and an area's keyword set."""
    ta = set(tokenize(text, config))
    tk: set[str] = set()
    for kw in keywords:
        tk.update(tokenize(kw, config))
    if not ta and not tk:
        return 0.0
    return len(ta & tk) / len(ta | tk)


def suggest_clusters(
    statements: Sequence[tuple[str, str]],
    config: SimilarityConfig | None = None,
) -> list[Cluster]:
    """Single-linkage clusters over the pairwise-similarity graph.

    ``statements`` is a sequence of (id, text). Two statements are linked
    when their similarity reaches the configured threshold; clusters are the
    connected components. The heading is the tokens shared by every member,
    in first-occurrence order of the earliest member, or the longest member
    text when the intersection is empty. Output order follows input order.
    """
    cfg = config or SimilarityConfig()
    cfg.validate()
    ids = [sid for sid, _ in statements]
    texts = {sid: text for sid, text in statements}
    parent = {sid: sid for sid in ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = ids[i], ids[j]
            if similarity(texts[a], texts[b], cfg) >= cfg.threshold:
                parent[find(a)] = find(b)

    groups: dict[str, list[str]] = {}
    for sid in ids:
        groups.setdefault(find(sid), []).append(sid)

    clusters = []
    seen = set()
    for sid in ids:
        root = find(sid)
        if root in seen:
            continue
        seen.add(root)
        members = groups[root]
        clusters.append(Cluster(member_ids=members, heading=_heading(members, texts, cfg)))
    return clusters


def _heading(members: list[str], texts: Mapping[str, str], cfg: SimilarityConfig) -> str:
    token_lists = [tokenize(texts[m], cfg) for m in members]
    common = set(token_lists[0])
    for toks in token_lists[1:]:
        common &= set(toks)
    if common:
        ordered = [t for t in token_lists[0] if t in common]
        # preserve first occurrence only
        out: list[str] = []
        for t in ordered:
            if t not in out:
                out.append(t)
        return " ".join(out)
    return max((texts[m] for m in members), key=len)


@dataclass
class AreaProfile:
    """An issue area plus its facilitator-authored keyword profile."""

    label: str
    keywords: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def with_default_keywords(cls, label: str) -> "AreaProfile":
        # fall back to the label's own tokens when no profile was authored
        return cls(label=label, keywords=tuple(tokenize(label)))


def fitness(
    assignment: Mapping[str, str],
    statements: Mapping[str, str],
    areas: Sequence[AreaProfile],
    config: SimilarityConfig | None = None,
) -> float:
    """Total keyword consistency of an area assignment.

    Sums, per statement, the profile similarity with its assigned area;
    assigning to the catch-all contributes the fixed floor instead, which
    guarantees uncategorizable statements land there rather than anywhere.
    """
    by_label = {a.label: a for a in areas}
    total = 0.0
    for sid, text in statements.items():
        if sid not in assignment:
            raise UnassignedStatement(f"statement {sid} has no assigned area")
        label = assignment[sid]
        if label not in by_label:
            raise NoAreas(f"assignment names unknown area {label!r}")
        if label == OTHERS_LABEL:
            total += OTHERS_FLOOR
        else:
            total += profile_similarity(text, by_label[label].keywords, config)
    return total


def ga_assign_areas(
    statements: Mapping[str, str],
    areas: Sequence[AreaProfile],
    params: GaParams | None = None,
    config: SimilarityConfig | None = None,
) -> tuple[dict[str, str], float]:
    """Assign each statement to an issue area by seeded genetic search.

    Chromosome: one area index per statement. Generational loop with
    tournament selection (size 2), uniform crossover, per-gene mutation, and
    single-individual elitism. Returns the best assignment found and its
    fitness; bit-reproducible for a fixed seed.
    """
    p = params or GaParams()
    p.validate()
    if len(areas) < 2:
        raise NoAreas(f"need at least 2 areas, got {len(areas)}")
    for area in areas:
        if area.label != OTHERS_LABEL and not area.keywords:
            raise NoAreas(f"area {area.label!r} has an empty keyword profile")

    sids = sorted(statements)
    n_genes = len(sids)
    n_areas = len(areas)
    if n_genes == 0:
        return {}, 0.0

    # score matrix; the GA loop only does table lookups
    gain = [
        [
            OTHERS_FLOOR
            if areas[a].label == OTHERS_LABEL
            else profile_similarity(statements[sid], areas[a].keywords, config)
            for a in range(n_areas)
        ]
        for sid in sids
    ]

    def score(chrom: list[int]) -> float:
        return sum(gain[g][chrom[g]] for g in range(n_genes))

    rng = random.Random(p.seed)
    population = [[rng.randrange(n_areas) for _ in range(n_genes)] for _ in range(p.population)]
    scored = [(score(c), c) for c in population]
    best_fit, best = max(scored, key=lambda t: t[0])

    for _ in range(p.generations):
        nxt: list[list[int]] = [list(best)]
        while len(nxt) < p.population:
            a = _tournament(scored, rng)
            b = _tournament(scored, rng)
            if rng.random() < p.crossover_rate:
                child = [a[g] if rng.random() < 0.5 else b[g] for g in range(n_genes)]
            else:
                child = list(a)
            for g in range(n_genes):
                if rng.random() < p.mutation_rate:
                    child[g] = rng.randrange(n_areas)
            nxt.append(child)
        population = nxt
        scored = [(score(c), c) for c in population]
        gen_fit, gen_best = max(scored, key=lambda t: t[0])
        if gen_fit > best_fit:
            best_fit, best = gen_fit, gen_best

    assignment = {sid: areas[best[g]].label for g, sid in enumerate(sids)}
    return assignment, best_fit


def _tournament(scored: list[tuple[float, list[int]]], rng: random.Random) -> list[int]:
    a = scored[rng.randrange(len(scored))]
    b = scored[rng.randrange(len(scored))]
    return a[1] if a[0] >= b[0] else b[1]

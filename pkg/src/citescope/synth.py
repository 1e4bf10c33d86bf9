"""Seeded synthetic corpus generator with known ground truth.

Articles are generated year by year; every reference in a later year picks
an earlier paper with probability proportional to
``(1 + citations)**attachment_exponent * 2**(-age / half_life)``.
Citation counts feeding the attachment weights advance between years (they
are frozen while a year is being generated), which keeps generation
sequential per year and cheap to vectorize.

References are rendered as realistic reference strings in the two supported
notation styles, alternating per citing article, so a generated corpus
exercises the full parsing pipeline.  The returned ground truth records the
exact per-paper citation series and the achieved share of every planted
milestone, making the generator usable as a brute-force oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .corpus import Article, Corpus
from .refparse import normalize_title

_FIRST_NAMES = (
    "Mara", "Tomas", "Livia", "Anders", "Noor", "Beatriz", "Kenji", "Amara",
    "Oskar", "Priya", "Hannes", "Celine", "Dario", "Ingrid", "Mateo", "Sanna",
    "Felix", "Aino", "Rafael", "Maija",
)
_LAST_NAMES = (
    "Ellis", "Reed", "Kovanen", "Madsen", "Haddad", "Moreno", "Tanaka",
    "Okafor", "Lindqvist", "Sharma", "Berger", "Dubois", "Rossi", "Nyberg",
    "Alvarez", "Kettunen", "Weber", "Salo", "Costa", "Virtanen",
)
_LEADS = (
    "Understanding", "Designing", "Evaluating", "Rethinking", "Modeling",
    "Supporting", "Exploring", "Measuring", "Sketching", "Negotiating",
)
_ADJS = (
    "adaptive", "tangible", "reflective", "ambient", "situated", "embodied",
    "participatory", "speculative", "ubiquitous", "wearable",
)
_NOUNS = (
    "interfaces", "gestures", "probes", "workloads", "annotations",
    "visualizations", "dialogues", "sensors", "notifications", "benchmarks",
)
_DOMAINS = (
    "mixed reality", "mobile health", "online communities",
    "accessible computing", "creative tools", "smart homes",
    "public displays", "social robots", "digital fabrication", "games",
)
_VENUES = (
    "Journal of Synthetic Studies", "Proceedings of the Annual Interaction Symposium",
    "Transactions on Example Systems", "International Workshop on Generated Work",
)

HalfLife = Union[float, tuple[float, float]]


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the generator; the seed is mandatory.

    ``papers_per_year`` is the article count in the first year and grows
    geometrically by ``growth_rate`` (1.0 means constant).  Every article
    after the first year carries exactly ``refs_per_paper`` references.
    ``recency_half_life`` is either one half-life in years (``inf``
    disables recency bias) or a (first-year, last-year) pair interpolated
    linearly over citing years.  Planted milestones are (publication year,
    target peak share) pairs; the peak is planted in the year after
    publication by redirecting evenly spaced reference slots.
    """

    start_year: int
    end_year: int
    papers_per_year: int
    refs_per_paper: int
    seed: int
    growth_rate: float = 1.0
    attachment_exponent: float = 0.0
    recency_half_life: HalfLife = math.inf
    planted_milestones: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class PlantedMilestone:
    paper: str
    peak_year: int
    target_share: float
    achieved_share: Fraction


@dataclass(frozen=True)
class GroundTruth:
    """Exact citation record of a generated corpus."""

    series: dict[str, dict[int, int]]
    planted: tuple[PlantedMilestone, ...]
    paper_ids: tuple[str, ...] = field(default=())


def papers_in_year(config: SynthConfig, year: int) -> int:
    """Closed-form article count schedule."""
    if not (config.start_year <= year <= config.end_year):
        return 0
    return max(1, round(config.papers_per_year * config.growth_rate ** (year - config.start_year)))


def _half_life_at(config: SynthConfig, year: int) -> float:
    hl = config.recency_half_life
    if isinstance(hl, tuple):
        lo, hi = config.start_year, config.end_year
        t = (year - lo) / (hi - lo) if hi > lo else 0.0
        return hl[0] + (hl[1] - hl[0]) * t
    return float(hl)


def _validate(config: SynthConfig) -> None:
    if config.seed is None:
        raise ValueError("seed is mandatory")
    if config.end_year < config.start_year:
        raise ValueError("end_year must be >= start_year")
    if config.papers_per_year < 1:
        raise ValueError("papers_per_year must be >= 1")
    if config.refs_per_paper < 0:
        raise ValueError("refs_per_paper must be >= 0")
    if config.growth_rate <= 0:
        raise ValueError("growth_rate must be positive")
    if config.attachment_exponent < 0:
        raise ValueError("attachment_exponent must be >= 0")
    hls = config.recency_half_life if isinstance(config.recency_half_life, tuple) \
        else (config.recency_half_life,)
    if any(h <= 0 for h in hls):
        raise ValueError("recency half-life must be positive")
    for year, share in config.planted_milestones:
        if share > 1:
            raise ValueError(f"planted share {share} exceeds 1")
        if share <= 0:
            raise ValueError("planted share must be positive")
        if not (config.start_year <= year < config.end_year):
            raise ValueError(f"planted milestone year {year} has no later year to peak in")


def _title(serial: int) -> str:
    return (f"{_LEADS[serial % 10]} {_ADJS[(serial // 10) % 10]} "
            f"{_NOUNS[(serial // 100) % 10]} for {_DOMAINS[(serial // 1000) % 10]} "
            f"study {serial}")


def _acm_name_list(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def _apa_name_list(names: list[str]) -> str:
    keys = [f"{n.split()[1]}, {n.split()[0][0]}." for n in names]
    if len(keys) == 1:
        return keys[0]
    return ", ".join(keys[:-1]) + f", & {keys[-1]}"


def _format_reference(style_acm: bool, names: list[str], year: int,
                      title: str, serial: int) -> str:
    venue = _VENUES[serial % len(_VENUES)]
    vol, no = serial % 40 + 1, serial % 4 + 1
    p0 = serial % 150 + 1
    p1 = p0 + serial % 20 + 1
    if style_acm:
        return f"{_acm_name_list(names)}. {year}. {title}. {venue} {vol}, {no}, {p0}–{p1}."
    return f"{_apa_name_list(names)} ({year}). {title}. {venue}, {vol}({no}), {p0}–{p1}."


def generate(config: SynthConfig) -> tuple[Corpus, GroundTruth]:
    """Generate a corpus plus its exact citation ground truth.

    Deterministic for a fixed seed: same config, same bytes.
    """
    _validate(config)
    rng = np.random.default_rng(config.seed)
    years = list(range(config.start_year, config.end_year + 1))

    titles: list[str] = []
    author_lists: list[list[str]] = []
    pub_years: list[int] = []
    paper_ids: list[str] = []
    # Planted milestones are the first article(s) of their publication year,
    # in config order.
    planted_paper: dict[int, int] = {}
    year_first: dict[int, int] = {}

    for year in years:
        year_first[year] = len(titles)
        for _ in range(papers_in_year(config, year)):
            serial = len(titles)
            n_authors = int(rng.integers(1, 5))
            picks = rng.choice(len(_FIRST_NAMES), size=n_authors, replace=False)
            names = [f"{_FIRST_NAMES[int(p)]} {_LAST_NAMES[int((p + serial) % len(_LAST_NAMES))]}"
                     for p in picks]
            title = _title(serial)
            titles.append(title)
            author_lists.append(names)
            pub_years.append(year)
            paper_ids.append(f"{year}_{normalize_title(title)}")
    seen_per_year: dict[int, int] = {}
    for pi, (py, _) in enumerate(config.planted_milestones):
        planted_paper[pi] = year_first[py] + seen_per_year.get(py, 0)
        seen_per_year[py] = seen_per_year.get(py, 0) + 1

    pub_years_arr = np.asarray(pub_years, dtype=np.int64)
    citations = np.zeros(len(titles), dtype=np.int64)
    series: dict[int, dict[int, int]] = {}
    achieved: dict[int, tuple[int, int, Fraction]] = {}
    references: list[list[int]] = [[] for _ in titles]

    for year in years[1:]:
        prior = int(np.searchsorted(pub_years_arr, year, side="left"))
        n_articles = papers_in_year(config, year)
        total_refs = n_articles * config.refs_per_paper
        if prior == 0 or total_refs == 0:
            continue
        half_life = _half_life_at(config, year)
        ages = year - pub_years_arr[:prior]
        weights = (1.0 + citations[:prior]) ** config.attachment_exponent
        if math.isfinite(half_life):
            weights = weights * np.exp2(-ages / half_life)
        cdf = np.cumsum(weights)
        targets = np.searchsorted(cdf, rng.random(total_refs) * cdf[-1], side="right")
        targets = np.minimum(targets, prior - 1)

        # Planted peaks: redirect evenly spaced reference slots so the
        # milestone's share of this year's citations hits its target.
        offset = 0
        for pi, (py, share) in enumerate(config.planted_milestones):
            if py != year - 1:
                continue
            paper_idx = planted_paper[pi]
            count = max(1, round(share * total_refs))
            if offset + count > total_refs:
                raise ValueError("planted shares exceed the year's reference budget")
            slots = offset + np.linspace(0, total_refs - 1 - offset, count).astype(np.int64)
            targets[slots] = paper_idx
            offset += count
            achieved[pi] = (paper_idx, year, Fraction(count, total_refs))

        hit, counts = np.unique(targets, return_counts=True)
        citations[hit] += counts
        for idx, cnt in zip(hit.tolist(), counts.tolist()):
            series.setdefault(idx, {})[year] = int(cnt)

        first_article = sum(papers_in_year(config, y) for y in years if y < year)
        for a in range(n_articles):
            lo = a * config.refs_per_paper
            references[first_article + a] = targets[lo:lo + config.refs_per_paper].tolist()

    articles = []
    for i, year in enumerate(pub_years):
        style_acm = i % 2 == 0
        refs = [_format_reference(style_acm, author_lists[t], pub_years[t],
                                  titles[t], t)
                for t in references[i]]
        articles.append(Article(venue_year=year, title=titles[i],
                                authors=tuple(author_lists[i]),
                                references=tuple(refs)))

    truth_series = {paper_ids[i]: dict(sorted(by_year.items()))
                    for i, by_year in sorted(series.items())}
    planted = tuple(
        PlantedMilestone(paper=paper_ids[achieved[pi][0]], peak_year=achieved[pi][1],
                         target_share=share, achieved_share=achieved[pi][2])
        for pi, (_, share) in enumerate(config.planted_milestones)
    )
    truth = GroundTruth(series=truth_series, planted=planted,
                        paper_ids=tuple(paper_ids))
    return Corpus(tuple(articles)), truth


def write_ground_truth(truth: GroundTruth, path: str) -> None:
    payload = {
        "series": {pid: {str(y): c for y, c in by_year.items()}
                   for pid, by_year in truth.series.items()},
        "planted": [
            {"paper": p.paper, "peak_year": p.peak_year,
             "target_share": p.target_share,
             "achieved_share": [p.achieved_share.numerator, p.achieved_share.denominator]}
            for p in truth.planted
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)

"""Citation curves, per-paper citation series, and milestone summaries.

A citation curve is, for one citing proceedings year, the histogram of
citations by cited publication year.  Citation series invert that view:
per identified paper, citations received by citing year.  On top of these
sit the ranked milestone list, cumulative citation shares, and the
absolute/relative milestone-citation panels with their moment statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .corpus import Corpus, DataError, corpus_stats
from .refparse import ParsedReference, paper_id, paper_id_year, parse_corpus


@dataclass(frozen=True)
class CitationCurve:
    citing_year: int
    counts: dict[int, int]


@dataclass(frozen=True)
class CitationSeries:
    paper: str
    by_year: dict[int, int]
    first_cited: int

    @property
    def total(self) -> int:
        return sum(self.by_year.values())


ParsedCorpus = tuple[tuple[ParsedReference, ...], ...]


def _require_parsed(corpus: Corpus, parsed: Optional[ParsedCorpus]) -> ParsedCorpus:
    return parse_corpus(corpus) if parsed is None else parsed


def build_citation_curves(corpus: Corpus,
                          parsed: Optional[ParsedCorpus] = None) -> dict[int, CitationCurve]:
    """Aggregate every year-parseable reference into per-citing-year curves.

    A reference contributes whenever a publication year was extracted,
    whether or not a full PaperId exists.  Cited years beyond the citing
    year plus one are never produced by the parser, so curve keys satisfy
    cited_year <= citing_year + 1.
    """
    parsed = _require_parsed(corpus, parsed)
    counts: dict[int, dict[int, int]] = {}
    for art, refs in zip(corpus.articles, parsed):
        bucket = counts.setdefault(art.venue_year, {})
        for ref in refs:
            if ref.year is not None:
                bucket[ref.year] = bucket.get(ref.year, 0) + 1
    return {y: CitationCurve(citing_year=y, counts=dict(sorted(c.items())))
            for y, c in sorted(counts.items()) if c}


def build_citation_series(corpus: Corpus,
                          parsed: Optional[ParsedCorpus] = None) -> dict[str, CitationSeries]:
    """Per identified paper, the map citing_year -> citation count."""
    parsed = _require_parsed(corpus, parsed)
    by_paper: dict[str, dict[int, int]] = {}
    for art, refs in zip(corpus.articles, parsed):
        for ref in refs:
            pid = paper_id(ref)
            if pid is not None:
                bucket = by_paper.setdefault(pid, {})
                bucket[art.venue_year] = bucket.get(art.venue_year, 0) + 1
    return {pid: CitationSeries(paper=pid, by_year=dict(sorted(b.items())),
                                first_cited=min(b))
            for pid, b in by_paper.items()}


def rank_by_total(series_map: Mapping[str, CitationSeries], n: int) -> list[tuple[str, int]]:
    """The n most cited papers, descending by total.

    Ties are broken by ascending PaperId so the ranking is a deterministic
    total order regardless of input iteration order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    totals = [(pid, s.total) for pid, s in series_map.items()]
    totals.sort(key=lambda item: (-item[1], item[0]))
    return totals[:n]


def prior_milestones(series_map: Mapping[str, CitationSeries],
                     citing_year: int, n: int) -> list[str]:
    """Top-n papers published and cited strictly before ``citing_year``.

    Rankings are recomputed per citing year from citations in earlier
    proceedings only, which is why early years can carry marginally fewer
    milestones than requested.
    """
    totals = []
    for pid, s in series_map.items():
        if paper_id_year(pid) >= citing_year:
            continue
        before = sum(c for y, c in s.by_year.items() if y < citing_year)
        if before > 0:
            totals.append((pid, before))
    totals.sort(key=lambda item: (-item[1], item[0]))
    return [pid for pid, _ in totals[:n]]


def cumulative_citation_share(corpus: Corpus, citing_year: int,
                              milestones: Iterable[str],
                              parsed: Optional[ParsedCorpus] = None) -> dict[int, Fraction]:
    """Cumulative percentage of milestone-directed citations by cited year.

    Percentages accumulate from the most recent cited year backwards and
    are monotone non-decreasing toward 100% of the citations that the
    citing year directed at the milestone set.
    """
    milestone_set = set(milestones)
    if not milestone_set:
        raise ValueError("milestone set is empty")
    if citing_year not in corpus.years_present:
        raise DataError(f"citing year {citing_year} not present in corpus")
    parsed = _require_parsed(corpus, parsed)
    by_pub_year: dict[int, int] = {}
    for art, refs in zip(corpus.articles, parsed):
        if art.venue_year != citing_year:
            continue
        for ref in refs:
            pid = paper_id(ref)
            if pid in milestone_set:
                year = paper_id_year(pid)
                by_pub_year[year] = by_pub_year.get(year, 0) + 1
    if not by_pub_year:
        return {}
    total = sum(by_pub_year.values())
    result: dict[int, Fraction] = {}
    running = 0
    for year in range(max(by_pub_year), min(by_pub_year) - 1, -1):
        running += by_pub_year.get(year, 0)
        result[year] = Fraction(100 * running, total)
    return dict(sorted(result.items()))


@dataclass(frozen=True)
class PanelStats:
    sd: float
    kurtosis: float
    skewness: float


@dataclass(frozen=True)
class MilestonePanel:
    citing_year: int
    absolute: dict[int, int]
    relative: dict[int, Fraction]
    stats: PanelStats


def _weighted_moments(values: Mapping[int, int]) -> PanelStats:
    # The histogram over cited years is read as a frequency distribution of
    # the cited-year variable: sample (n-1) sd, Fisher skewness g1, excess
    # kurtosis g2.
    n = sum(values.values())
    if n < 2:
        return PanelStats(sd=0.0, kurtosis=0.0, skewness=0.0)
    mean = sum(y * c for y, c in values.items()) / n
    m2 = sum(c * (y - mean) ** 2 for y, c in values.items()) / n
    if m2 == 0:
        return PanelStats(sd=0.0, kurtosis=0.0, skewness=0.0)
    m3 = sum(c * (y - mean) ** 3 for y, c in values.items()) / n
    m4 = sum(c * (y - mean) ** 4 for y, c in values.items()) / n
    sd = math.sqrt(n * m2 / (n - 1))
    return PanelStats(sd=sd, kurtosis=m4 / m2 ** 2 - 3.0, skewness=m3 / m2 ** 1.5)


def milestone_citation_panels(corpus: Corpus, citing_year: int,
                              milestones: Iterable[str],
                              parsed: Optional[ParsedCorpus] = None) -> MilestonePanel:
    """Absolute and relative citations from one proceedings year to a
    milestone set, grouped by milestone publication year.

    Relative values divide by all citations made in the citing year (every
    raw reference, parseable or not), so they sum to the milestone-directed
    share of the year's citations.
    """
    milestone_set = set(milestones)
    if not milestone_set:
        raise ValueError("milestone set is empty")
    stats = corpus_stats(corpus)
    year_total = stats.per_year_reference_totals.get(citing_year, 0)
    if year_total == 0:
        raise DataError(f"citing year {citing_year} has no references")
    parsed = _require_parsed(corpus, parsed)
    counts: dict[int, int] = {}
    for art, refs in zip(corpus.articles, parsed):
        if art.venue_year != citing_year:
            continue
        for ref in refs:
            pid = paper_id(ref)
            if pid in milestone_set:
                year = paper_id_year(pid)
                counts[year] = counts.get(year, 0) + 1
    if counts:
        absolute = {y: counts.get(y, 0) for y in range(min(counts), max(counts) + 1)}
    else:
        absolute = {}
    relative = {y: Fraction(c, year_total) for y, c in absolute.items()}
    return MilestonePanel(citing_year=citing_year, absolute=absolute,
                          relative=relative, stats=_weighted_moments(absolute))

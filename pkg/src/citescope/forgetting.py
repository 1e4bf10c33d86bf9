"""Growth-adjusted forgetting curves and their smoothness diagnostics.

For a citing proceedings year, the curve assigns every earlier corpus year
a growth-adjusted citation weight.  Two modes are exposed because the
growth adjustment admits two readings:

* ``literal`` multiplies the per-year expectation weight (publications in
  the cited year over all publications) by the citing year's total
  citations into the corpus range.  Peaks and valleys of actual citation
  behavior do not move this profile, only its overall level.
* ``per_capita`` divides actual citations to each cited year by that
  year's share of all publications, i.e. counts scaled by N / N_year.

Every curve is stamped with its mode.  Values are exact rationals; any
rounding happens at the reporting boundary, never here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .corpus import Corpus, DataError
from .refparse import paper_id_year
from .timeseries import (CitationSeries, ParsedCorpus, _require_parsed,
                         build_citation_curves, rank_by_total)

MODE_LITERAL = "literal"
MODE_PER_CAPITA = "per_capita"


@dataclass(frozen=True)
class ForgettingCurve:
    citing_year: int
    values: dict[int, Fraction]
    mode: str
    # Citations whose cited year falls outside the curve domain (before the
    # first proceedings year or after the citing year) are excluded from the
    # curve and reported here.
    excluded_citations: int = 0


@dataclass(frozen=True)
class SmoothnessStats:
    variance_of_derivative: Fraction
    total_variation: Fraction


def forgetting_curve(corpus: Corpus, citing_year: int, mode: str = MODE_LITERAL,
                     parsed: Optional[ParsedCorpus] = None,
                     curves: Optional[Mapping[int, object]] = None) -> ForgettingCurve:
    """Build the forgetting curve of one citing year.

    The domain is every corpus year with a known publication count, up to
    and including the citing year; missing proceedings years are absent,
    never zero-filled.  Citations to years outside the domain are excluded
    and counted in ``excluded_citations``.  Prebuilt citation ``curves``
    may be passed to avoid recounting.
    """
    if mode not in (MODE_LITERAL, MODE_PER_CAPITA):
        raise ValueError(f"unknown forgetting-curve mode: {mode!r}")
    if citing_year not in corpus.years_present:
        raise DataError(f"citing year {citing_year} not present in corpus")
    total_papers = corpus.total_articles
    if total_papers == 0:
        raise DataError("corpus has no articles")
    domain = sorted(y for y in corpus.years_present if y <= citing_year)
    if curves is None:
        curves = build_citation_curves(corpus, parsed=parsed)
    curve = curves.get(citing_year)
    cited = curve.counts if curve is not None else {}
    in_domain = {y: c for y, c in cited.items() if y in corpus.years_present and y <= citing_year}
    excluded = sum(cited.values()) - sum(in_domain.values())
    if mode == MODE_LITERAL:
        citations_in = sum(in_domain.values())
        values = {y: Fraction(corpus.counts[y] * citations_in, total_papers)
                  for y in domain}
    else:
        values = {y: Fraction(in_domain.get(y, 0) * total_papers, corpus.counts[y])
                  for y in domain}
    return ForgettingCurve(citing_year=citing_year, values=values, mode=mode,
                           excluded_citations=excluded)


def smoothness(curve: ForgettingCurve) -> SmoothnessStats:
    """Variance of the first differences and total variation of a curve.

    Values are taken on consecutive present years in ascending order; the
    variance is the sample variance (n-1 denominator) of the differences.
    """
    values = [curve.values[y] for y in sorted(curve.values)]
    if len(values) < 2:
        raise ValueError("smoothness needs a curve with at least 2 points")
    diffs = [b - a for a, b in zip(values, values[1:])]
    total_variation = sum(abs(d) for d in diffs)
    if len(diffs) < 2:
        variance = Fraction(0)
    else:
        mean = sum(diffs) / len(diffs)
        variance = sum((d - mean) ** 2 for d in diffs) / (len(diffs) - 1)
    return SmoothnessStats(variance_of_derivative=variance,
                           total_variation=total_variation)


def smoothness_trend(corpus: Corpus, mode: str = MODE_PER_CAPITA,
                     parsed: Optional[ParsedCorpus] = None) -> dict[int, SmoothnessStats]:
    """Smoothness statistics of every proceedings year's forgetting curve.

    Years whose curve has fewer than two in-range points (the first corpus
    year) are skipped.
    """
    if len(corpus.years_present) < 2:
        raise DataError("smoothness trend needs at least 2 proceedings years")
    parsed = _require_parsed(corpus, parsed)
    curves = build_citation_curves(corpus, parsed=parsed)
    trend: dict[int, SmoothnessStats] = {}
    for year in sorted(corpus.years_present):
        curve = forgetting_curve(corpus, year, mode=mode, parsed=parsed, curves=curves)
        if len(curve.values) >= 2:
            trend[year] = smoothness(curve)
    return trend


def milestone_bars(corpus: Corpus, top_n: int,
                   series_map: Optional[Mapping[str, CitationSeries]] = None,
                   parsed: Optional[ParsedCorpus] = None) -> dict[int, int]:
    """Citations to the top-n milestones grouped by publication year.

    These are the secondary-axis bars drawn under the forgetting curves:
    for each publication year, the total citations (over all proceedings)
    to top-n milestones published that year.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if series_map is None:
        from .timeseries import build_citation_series
        series_map = build_citation_series(corpus, parsed=parsed)
    bars: dict[int, int] = {}
    for pid, total in rank_by_total(series_map, top_n):
        year = paper_id_year(pid)
        bars[year] = bars.get(year, 0) + total
    return dict(sorted(bars.items()))

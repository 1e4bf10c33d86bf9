"""The milestone coefficient and its components.

For a paper with citation series c over proceedings years x:

* SIGN is +1 when the ordinary-least-squares slope of c on x is >= 0,
  otherwise -1; a single-point series has slope 0 and SIGN +1 by
  convention.
* TCS (total citation span) is max(c) - min(c).
* TCI (total citation impact) divides TCS by the series' year span times
  e**alpha, where alpha is the exponent of the power law that citation
  accrual follows.
* NCI (normalized citation impact) sums, over proceedings years, the
  paper's share of all citations made that year.
* MC is SIGN * |TCI * NCI| by default; a flagged variant computes the
  Euclidean norm SIGN * sqrt(TCI**2 + NCI**2) instead.  The two are not
  equivalent, so every record is stamped with the formula it used.

Alpha defaults to the fixed constant 3.63; a discrete maximum-likelihood
fit over the pooled per-year citation counts is available as an alternative
estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .timeseries import CitationSeries

DEFAULT_ALPHA = 3.63
FORMULA_PRODUCT = "product"
FORMULA_NORM = "norm"
SUPER_THRESHOLD = Fraction(1, 1000)


@dataclass(frozen=True)
class MilestoneRecord:
    paper: str
    total: int
    sign: int
    slope: float
    tcs: float
    tci: float
    nci: float
    mc: float
    years: tuple[int, ...]
    series: tuple[int, ...]
    formula: str


@dataclass(frozen=True)
class AlphaEstimate:
    alpha: float
    xmin: int
    n_tail: int
    method: str


@dataclass(frozen=True)
class SuperMilestoneFlag:
    paper: str
    peak_share: Fraction
    peak_year: int
    is_super: bool


@dataclass(frozen=True)
class CitingFraction:
    share: Fraction
    expected_citations_per_article: Fraction
    articles_per_citing_article: float


def sign_of_trend(years: Sequence[int], series: Sequence[float]) -> tuple[float, int]:
    """OLS slope of the citation series on its years, and its sign.

    A one-point series has slope 0 and sign +1 by convention; the same
    convention extends continuously to constant series.
    """
    if len(years) != len(series):
        raise ValueError("years and series lengths differ")
    if not years:
        raise ValueError("empty series")
    if any(b <= a for a, b in zip(years, years[1:])):
        raise ValueError("years must be strictly increasing")
    n = len(years)
    if n == 1:
        return 0.0, 1
    x_mean = sum(years) / n
    y_mean = sum(series) / n
    sxx = sum((x - x_mean) ** 2 for x in years)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(years, series))
    slope = sxy / sxx
    return slope, (1 if slope >= 0 else -1)


def tcs(series: Sequence[float]) -> float:
    """Total citation span: highest minus lowest yearly count."""
    if not series:
        raise ValueError("empty series")
    return max(series) - min(series)


def tci(years: Sequence[int], series: Sequence[float], alpha: float) -> float:
    """Span divided by the exponentially-scaled age span of the series."""
    if len(years) != len(series) or not years:
        raise ValueError("years and series must be non-empty and equal length")
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    span_years = max(years) - min(years) + 1
    return tcs(series) / (span_years * math.exp(alpha))


def nci(series_by_year: Mapping[int, int], per_year_totals: Mapping[int, int]) -> float:
    """Sum over years of the paper's share of all citations made that year."""
    acc = Fraction(0)
    for year, count in series_by_year.items():
        if count == 0:
            continue
        total = per_year_totals.get(year, 0)
        if total <= 0:
            raise ValueError(f"year {year} has citations but no positive citation total")
        acc += Fraction(count, total)
    return float(acc)


def milestone_coefficient(paper: str, years: Sequence[int], series: Sequence[int],
                          per_year_totals: Mapping[int, int], alpha: float,
                          formula: str = FORMULA_PRODUCT) -> MilestoneRecord:
    """Assemble the full milestone record for one paper.

    ``formula`` selects the default product form |TCI*NCI| or the flagged
    Euclidean-norm variant sqrt(TCI**2 + NCI**2); the record is stamped
    with the choice.
    """
    if formula not in (FORMULA_PRODUCT, FORMULA_NORM):
        raise ValueError(f"unknown MC formula: {formula!r}")
    slope, sign = sign_of_trend(years, series)
    tci_val = tci(years, series, alpha)
    nci_val = nci(dict(zip(years, series)), per_year_totals)
    if formula == FORMULA_PRODUCT:
        mc = sign * abs(tci_val * nci_val)
    else:
        mc = sign * math.hypot(tci_val, nci_val)
    return MilestoneRecord(paper=paper, total=int(sum(series)), sign=sign,
                           slope=slope, tcs=tcs(series), tci=tci_val,
                           nci=nci_val, mc=mc, years=tuple(years),
                           series=tuple(int(c) for c in series), formula=formula)


def records_for(series_map: Mapping[str, CitationSeries],
                per_year_totals: Mapping[int, int], alpha: float,
                formula: str = FORMULA_PRODUCT) -> dict[str, MilestoneRecord]:
    """Milestone records for every series in the map."""
    out = {}
    for pid, s in series_map.items():
        years = sorted(s.by_year)
        counts = [s.by_year[y] for y in years]
        out[pid] = milestone_coefficient(pid, years, counts, per_year_totals,
                                         alpha, formula=formula)
    return out


# --------------------------------------------------------------------------
# power-law exponent

def _mle_alpha(n: int, xmin: int, log_sum: float) -> float:
    def neg_loglik(a: float) -> float:
        return n * math.log(zeta(a, xmin)) + a * log_sum

    res = minimize_scalar(neg_loglik, bounds=(1.0 + 1e-6, 25.0), method="bounded",
                          options={"xatol": 1e-8})
    return float(res.x)


def _ks_distance(values: np.ndarray, counts: np.ndarray, xmin: int,
                 alpha: float) -> float:
    n = counts.sum()
    ecdf_hi = np.cumsum(counts) / n
    ecdf_lo = ecdf_hi - counts / n
    z = zeta(alpha, xmin)
    # Both step functions jump at the atoms: compare P(X <= x) against the
    # upper ECDF step and P(X < x) against the lower one.
    cdf_hi = 1.0 - zeta(alpha, values + 1.0) / z
    cdf_lo = 1.0 - zeta(alpha, values) / z
    return float(max(np.max(np.abs(ecdf_hi - cdf_hi)),
                     np.max(np.abs(ecdf_lo - cdf_lo))))


def fit_power_law(sample, min_tail: int = 100) -> AlphaEstimate:
    """Discrete power-law MLE with xmin chosen by KS-distance minimization.

    ``sample`` is any sequence of positive integer observations.  Candidate
    xmin values are the observed unique values whose tail keeps at least
    ``min_tail`` observations; for each, alpha maximizes the zeta-normalized
    discrete likelihood, and the xmin with the smallest Kolmogorov-Smirnov
    distance wins.
    """
    sample = np.asarray(sample, dtype=np.float64)
    if sample.size < min_tail:
        raise ValueError(f"need at least {min_tail} positive observations, got {sample.size}")
    if np.any(sample < 1):
        raise ValueError("sample values must be >= 1")
    values, counts = np.unique(sample, return_counts=True)
    if values.size == 1:
        raise ValueError("degenerate sample: all values equal")
    # Suffix sums let every candidate xmin reuse one pass over the data.
    log_suffix = np.cumsum((counts * np.log(values))[::-1])[::-1]
    tail_sizes = np.cumsum(counts[::-1])[::-1]
    best: Optional[tuple[float, float, int, int]] = None
    for i, xmin in enumerate(values):
        if tail_sizes[i] < min_tail:
            break
        alpha = _mle_alpha(int(tail_sizes[i]), int(xmin), float(log_suffix[i]))
        dist = _ks_distance(values[i:], counts[i:], int(xmin), alpha)
        if best is None or dist < best[0]:
            best = (dist, alpha, int(xmin), int(tail_sizes[i]))
    _, alpha, xmin, n_tail = best
    return AlphaEstimate(alpha=alpha, xmin=xmin, n_tail=n_tail, method="mle_discrete")


def estimate_alpha(series_map: Mapping[str, CitationSeries],
                   method: str = "fixed",
                   fixed_alpha: float = DEFAULT_ALPHA,
                   min_tail: int = 100) -> AlphaEstimate:
    """Estimate the citation-accrual power-law exponent.

    ``mle_discrete`` pools all per-year citation counts of all cited papers
    into one sample and fits a discrete power-law tail with
    :func:`fit_power_law`.  ``fixed`` returns the configured constant
    (default 3.63).
    """
    if method == "fixed":
        return AlphaEstimate(alpha=fixed_alpha, xmin=1, n_tail=0, method="fixed")
    if method != "mle_discrete":
        raise ValueError(f"unknown alpha method: {method!r}")
    pooled = [c for s in series_map.values() for c in s.by_year.values() if c > 0]
    return fit_power_law(pooled, min_tail=min_tail)


def fit_or_fixed_alpha(series_map: Mapping[str, CitationSeries],
                       spec: str | float = DEFAULT_ALPHA) -> AlphaEstimate:
    """Resolve an alpha request: a number means fixed, 'mle' means fitted."""
    if isinstance(spec, str):
        if spec == "mle":
            return estimate_alpha(series_map, method="mle_discrete")
        spec = float(spec)
    return estimate_alpha(series_map, method="fixed", fixed_alpha=spec)


# --------------------------------------------------------------------------
# super milestones

def _as_fraction(threshold: float | str | Fraction) -> Fraction:
    if isinstance(threshold, Fraction):
        return threshold
    # Going through str keeps decimal thresholds exact (0.001 -> 1/1000).
    return Fraction(str(threshold))


def detect_super(series_map: Mapping[str, CitationSeries],
                 per_year_totals: Mapping[int, int],
                 threshold: float | str | Fraction = "0.001") -> list[SuperMilestoneFlag]:
    """Flag papers whose peak yearly citation share strictly exceeds the
    threshold (default 0.1%, i.e. more than 1 in 1000 of a year's citations).
    """
    limit = _as_fraction(threshold)
    flags = []
    for pid in sorted(series_map):
        s = series_map[pid]
        peak_share = Fraction(0)
        peak_year = s.first_cited
        for year in sorted(s.by_year):
            total = per_year_totals.get(year, 0)
            if total <= 0:
                raise ValueError(f"year {year} has citations but no positive citation total")
            share = Fraction(s.by_year[year], total)
            if share > peak_share:
                peak_share = share
                peak_year = year
        flags.append(SuperMilestoneFlag(paper=pid, peak_share=peak_share,
                                        peak_year=peak_year,
                                        is_super=peak_share > limit))
    return flags


def estimated_citing_fraction(corpus, paper: str, year: int,
                              series_map: Optional[Mapping[str, CitationSeries]] = None,
                              parsed=None) -> CitingFraction:
    """How widely a paper is cited in one proceedings year.

    The paper's share of the year's citations times the mean reference
    count per article gives the expected number of citations to the paper
    per article (equivalently, the fraction of articles citing it once);
    the reciprocal says "one in how many articles".
    """
    from .corpus import corpus_stats
    from .timeseries import build_citation_series

    if corpus.counts.get(year, 0) == 0:
        raise ValueError(f"year {year} has no articles")
    if series_map is None:
        series_map = build_citation_series(corpus, parsed=parsed)
    stats = corpus_stats(corpus)
    total = stats.per_year_reference_totals.get(year, 0)
    series = series_map.get(paper)
    count = series.by_year.get(year, 0) if series is not None else 0
    if count == 0 or total == 0:
        return CitingFraction(share=Fraction(0),
                              expected_citations_per_article=Fraction(0),
                              articles_per_citing_article=math.inf)
    share = Fraction(count, total)
    expected = share * stats.mean_refs_per_paper[year]
    return CitingFraction(share=share, expected_citations_per_article=expected,
                          articles_per_citing_article=float(1 / expected))

import math
import random
from fractions import Fraction

import pytest

from citescope.corpus import DataError
from citescope.synth import SynthConfig, generate
from citescope.timeseries import (build_citation_curves, build_citation_series,
                                  cumulative_citation_share,
                                  milestone_citation_panels, prior_milestones,
                                  rank_by_total)

from helpers import acm_ref, article, corpus_of
from oracles import oracle_citation_curves, oracle_citation_series, oracle_cumulative


def pid_for(year, title):
    from citescope.refparse import normalize_title
    return f"{year}_{normalize_title(title)}"


@pytest.fixture(scope="module")
def synth_corpus():
    config = SynthConfig(start_year=1998, end_year=2012, papers_per_year=10,
                         refs_per_paper=7, seed=5, attachment_exponent=1.1,
                         recency_half_life=5.0)
    return generate(config)


class TestCitationCurves:
    def test_single_article_counting(self):
        refs = [acm_ref(["A B"], 1999, "Paper one"),
                acm_ref(["A B"], 1999, "Paper two"),
                acm_ref(["A B"], 2000, "Paper three")]
        corp = corpus_of(article(2002, refs))
        curves = build_citation_curves(corp)
        assert curves[2002].counts == {1999: 2, 2000: 1}

    def test_against_brute_force(self, synth_corpus):
        corp, _ = synth_corpus
        got = {y: c.counts for y, c in build_citation_curves(corp).items()}
        assert got == oracle_citation_curves(corp)

    def test_no_parseable_years(self):
        corp = corpus_of(article(2001, ["mystery string", "another fragment"]))
        assert build_citation_curves(corp) == {}

    def test_conservation(self, synth_corpus):
        corp, _ = synth_corpus
        curves = build_citation_curves(corp)
        for year, curve in curves.items():
            refs = sum(len(a.references) for a in corp.articles if a.venue_year == year)
            # every synthetic reference carries a parseable year
            assert sum(curve.counts.values()) == refs


class TestCitationSeries:
    def test_singleton(self):
        corp = corpus_of(article(2010, [acm_ref(["A B"], 2001, "Lone paper")]))
        series = build_citation_series(corp)
        s = series[pid_for(2001, "Lone paper")]
        assert s.by_year == {2010: 1}
        assert s.first_cited == 2010

    def test_against_brute_force(self, synth_corpus):
        corp, _ = synth_corpus
        got = {pid: s.by_year for pid, s in build_citation_series(corp).items()}
        assert got == oracle_citation_series(corp)

    def test_total_matches_identified_count(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        total = sum(s.total for s in series.values())
        assert total == sum(len(a.references) for a in corp.articles)


class TestRankByTotal:
    def _series(self, totals):
        refs = []
        for i, (title, total) in enumerate(totals.items()):
            refs.extend([acm_ref(["A B"], 2000, title)] * total)
        corp = corpus_of(article(2005, refs))
        return build_citation_series(corp)

    def test_descending_order(self):
        series = self._series({"Alpha": 7, "Beta": 2, "Gamma": 1})
        ranked = rank_by_total(series, 3)
        assert [t for _, t in ranked] == [7, 2, 1]

    def test_tie_breaks_lexicographically(self):
        series = self._series({"Zeta": 5, "Alpha": 5})
        ranked = rank_by_total(series, 1)
        assert ranked[0][0] == pid_for(2000, "Alpha")

    def test_n_clamped(self):
        series = self._series({"Alpha": 1, "Beta": 1})
        assert len(rank_by_total(series, 10)) == 2

    def test_shuffle_stable(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        items = list(series.items())
        rng = random.Random(3)
        rng.shuffle(items)
        assert rank_by_total(dict(items), 50) == rank_by_total(series, 50)

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            rank_by_total({}, 0)


class TestCumulativeShare:
    def test_single_milestone_single_year(self):
        corp = corpus_of(article(2010, [acm_ref(["A B"], 2001, "Lone paper")]))
        shares = cumulative_citation_share(corp, 2010, {pid_for(2001, "Lone paper")})
        assert shares == {2001: Fraction(100)}

    def test_empty_milestone_set_rejected(self, synth_corpus):
        corp, _ = synth_corpus
        with pytest.raises(ValueError):
            cumulative_citation_share(corp, 2012, set())

    def test_matches_oracle(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        milestones = prior_milestones(series, 2012, 30)
        got = cumulative_citation_share(corp, 2012, milestones)
        assert got == oracle_cumulative(corp, 2012, milestones)

    def test_monotone_toward_100(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        milestones = prior_milestones(series, 2012, 30)
        shares = cumulative_citation_share(corp, 2012, milestones)
        years = sorted(shares, reverse=True)
        values = [shares[y] for y in years]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] == Fraction(100)


class TestPanels:
    def test_uniform_distribution_symmetric(self):
        refs = [acm_ref(["A B"], y, f"Paper {y}") for y in range(1995, 2005)]
        corp = corpus_of(article(2010, refs))
        milestones = {pid_for(y, f"Paper {y}") for y in range(1995, 2005)}
        panel = milestone_citation_panels(corp, 2010, milestones)
        assert abs(panel.stats.skewness) < 1e-9
        assert panel.absolute == {y: 1 for y in range(1995, 2005)}

    def test_zero_reference_year_rejected(self):
        corp = corpus_of(article(2010, []), article(2011, [acm_ref(["A B"], 2001, "X")]))
        with pytest.raises(DataError):
            milestone_citation_panels(corp, 2010, {pid_for(2001, "X")})

    def test_relative_sums_to_milestone_share(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        milestones = prior_milestones(series, 2012, 300)
        panel = milestone_citation_panels(corp, 2012, milestones)
        total_refs = sum(len(a.references) for a in corp.articles
                         if a.venue_year == 2012)
        directed = sum(panel.absolute.values())
        assert sum(panel.relative.values()) == Fraction(directed, total_refs)
        assert sum(panel.relative.values()) <= 1

    def test_sd_is_sample_standard_deviation(self):
        refs = [acm_ref(["A B"], 2000, "P1")] * 2 + [acm_ref(["A B"], 2002, "P2")] * 2
        corp = corpus_of(article(2010, refs))
        panel = milestone_citation_panels(corp, 2010, {pid_for(2000, "P1"),
                                                       pid_for(2002, "P2")})
        # values are years 2000,2000,2002,2002: sample sd = sqrt(4/3)
        assert math.isclose(panel.stats.sd, math.sqrt(4 / 3), rel_tol=1e-12)


class TestPriorMilestones:
    def test_only_papers_published_before(self, synth_corpus):
        corp, _ = synth_corpus
        series = build_citation_series(corp)
        for pid in prior_milestones(series, 2005, 50):
            assert int(pid[:4]) < 2005

    def test_only_citations_before_count(self):
        corp = corpus_of(
            article(2005, [acm_ref(["A B"], 2001, "Early star")]),
            article(2010, [acm_ref(["A B"], 2002, "Late star")] * 5),
        )
        series = build_citation_series(corp)
        assert prior_milestones(series, 2006, 5) == [pid_for(2001, "Early star")]

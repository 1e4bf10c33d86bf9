
import numpy as np
import pytest
from scipy import stats as sstats

from citescope import corpus as corpus_mod
from citescope.corpus import corpus_stats
from citescope.milestone import detect_super
from citescope.refparse import parse_corpus
from citescope.synth import SynthConfig, generate, papers_in_year
from citescope.timeseries import build_citation_series


def test_uniform_targets_without_bias():
    # exponent 0, infinite half-life: every prior paper equally likely
    config = SynthConfig(start_year=2000, end_year=2001, papers_per_year=200,
                         refs_per_paper=500, seed=21)
    corp, truth = generate(config)
    counts = np.zeros(200)
    for pid, by_year in truth.series.items():
        idx = truth.paper_ids.index(pid)
        counts[idx] = by_year.get(2001, 0)
    assert counts.sum() == 200 * 500
    assert sstats.chisquare(counts).pvalue > 0.01


def test_geometric_growth_schedule():
    config = SynthConfig(start_year=1990, end_year=2019, papers_per_year=10,
                         refs_per_paper=2, seed=1, growth_rate=1.1)
    corp, _ = generate(config)
    for year in range(1990, 2020):
        assert corp.counts[year] == papers_in_year(config, year)
        assert corp.counts[year] == max(1, round(10 * 1.1 ** (year - 1990)))


def test_planted_milestone_detected():
    config = SynthConfig(start_year=2000, end_year=2010, papers_per_year=60,
                         refs_per_paper=40, seed=3,
                         planted_milestones=((2004, 0.005),))
    corp, truth = generate(config)
    planted = truth.planted[0]
    assert planted.peak_year == 2005
    stats = corpus_stats(corp)
    series = build_citation_series(corp, parsed=parse_corpus(corp))
    flags = {f.paper: f for f in detect_super(series, stats.per_year_reference_totals)}
    assert flags[planted.paper].is_super
    assert flags[planted.paper].peak_share >= planted.achieved_share


def test_ground_truth_matches_pipeline():
    config = SynthConfig(start_year=1995, end_year=2008, papers_per_year=12,
                         refs_per_paper=9, seed=8, attachment_exponent=1.2,
                         recency_half_life=6.0)
    corp, truth = generate(config)
    series = build_citation_series(corp)
    assert {pid: s.by_year for pid, s in series.items()} == truth.series


def test_same_seed_byte_identical(tmp_path):
    config = SynthConfig(start_year=2000, end_year=2006, papers_per_year=10,
                         refs_per_paper=5, seed=77, attachment_exponent=0.8,
                         recency_half_life=3.0)
    paths = []
    for name in ("a.jsonl", "b.jsonl"):
        corp, _ = generate(config)
        path = tmp_path / name
        corpus_mod.write_jsonl(corp, str(path))
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_infeasible_planted_share_rejected():
    with pytest.raises(ValueError, match="exceeds 1"):
        generate(SynthConfig(start_year=2000, end_year=2005, papers_per_year=5,
                             refs_per_paper=5, seed=1,
                             planted_milestones=((2001, 1.5),)))


def test_planted_year_needs_later_peak():
    with pytest.raises(ValueError):
        generate(SynthConfig(start_year=2000, end_year=2005, papers_per_year=5,
                             refs_per_paper=5, seed=1,
                             planted_milestones=((2005, 0.01),)))


def test_half_life_schedule_interpolates():
    from citescope.synth import _half_life_at
    config = SynthConfig(start_year=2000, end_year=2010, papers_per_year=5,
                         refs_per_paper=5, seed=1,
                         recency_half_life=(20.0, 10.0))
    assert _half_life_at(config, 2000) == 20.0
    assert _half_life_at(config, 2010) == 10.0
    assert _half_life_at(config, 2005) == 15.0


def test_first_year_articles_have_no_references():
    config = SynthConfig(start_year=2000, end_year=2002, papers_per_year=4,
                         refs_per_paper=6, seed=5)
    corp, _ = generate(config)
    for art in corp.articles:
        if art.venue_year == 2000:
            assert art.references == ()
        else:
            assert len(art.references) == 6


def test_recency_bias_prefers_recent_targets():
    config = SynthConfig(start_year=2000, end_year=2015, papers_per_year=40,
                         refs_per_paper=20, seed=10,
                         recency_half_life=2.0)
    _, truth = generate(config)
    by_age = {}
    years = {pid: int(pid[:4]) for pid in truth.series}
    for pid, by_year in truth.series.items():
        for citing, count in by_year.items():
            age = citing - years[pid]
            by_age[age] = by_age.get(age, 0) + count
    assert by_age[1] > by_age[5] > by_age.get(12, 0)

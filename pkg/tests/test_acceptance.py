"""Acceptance gate: one test per criterion, at its stated tolerance.

Each test prints a pass/fail line through the conftest report hook.
Criteria with runtime bounds time their own work with perf_counter.
"""

import json
import random
import string
import subprocess
import sys
from fractions import Fraction
from pathlib import Path
from time import perf_counter

import numpy as np
from scipy import stats as sstats
from sklearn.metrics import adjusted_rand_score

from citescope import corpus as corpus_mod
from citescope.cli import main as cli_main
from citescope.cluster import (cut_dendrogram, dtw_distance, dtw_kmeans,
                               ward_cluster)
from citescope.forgetting import forgetting_curve, smoothness_trend
from citescope.milestone import (detect_super, fit_power_law,
                                 milestone_coefficient, records_for)
from citescope.refparse import normalize_title, parse_corpus, parse_reference
from citescope.synth import SynthConfig, generate
from citescope.timeseries import (CitationSeries, build_citation_series,
                                  rank_by_total)
from citescope.authors import author_milestone_counts, concentration_curve

from helpers import acm_ref, article, corpus_of
from oracles import oracle_concentration, oracle_dtw, oracle_forgetting

TESTS_DIR = Path(__file__).parent

FIXTURE_YEARS = [2000, 2001, 2002]
FIXTURE_SERIES = [1, 2, 3]
FIXTURE_TOTALS = {2000: 10, 2001: 20, 2002: 30}


def test_c01_mc_formula_pins():
    """TCI/NCI/MC on the hand-computable fixture, within 1e-9 of the
    standalone oracle script; runtime < 1 s."""
    start = perf_counter()
    rec = milestone_coefficient("p", FIXTURE_YEARS, FIXTURE_SERIES,
                                FIXTURE_TOTALS, 3.63)
    elapsed = perf_counter() - start
    out = subprocess.run([sys.executable, str(TESTS_DIR / "mc_oracle.py")],
                         capture_output=True, text=True, check=True)
    oracle = json.loads(out.stdout)
    assert abs(rec.tci - oracle["tci"]) <= 1e-9
    assert abs(rec.nci - oracle["nci"]) <= 1e-9
    assert abs(rec.mc - oracle["mc"]) <= 1e-9
    assert rec.sign == oracle["sign"]
    # the published round-offs of the same quantities
    assert abs(rec.tci - 0.017678) < 1e-6
    assert abs(rec.nci - 0.3) < 1e-12
    assert abs(rec.mc - 0.0053033) < 1e-6
    assert elapsed < 1.0


def test_c02_singleton_convention():
    """A one-point series has slope 0, sign +1, span 0, and MC exactly 0."""
    for year, count, total in ((2010, 5, 50), (1981, 1, 1), (2024, 999, 10**6)):
        rec = milestone_coefficient("p", [year], [count], {year: total}, 3.63)
        assert rec.slope == 0.0
        assert rec.sign == 1
        assert rec.tcs == 0
        assert rec.mc == 0.0


def test_c03_forgetting_oracle_equivalence():
    """Both modes equal the brute-force rational oracle on 100 seeded
    corpora of at most 5,000 references; zero tolerance; < 30 s."""
    start = perf_counter()
    half_lives = [float("inf"), 5.0, (20.0, 3.0)]
    for seed in range(100):
        config = SynthConfig(start_year=1996, end_year=1996 + 8 + seed % 5,
                             papers_per_year=6 + seed % 6,
                             refs_per_paper=5 + seed % 4, seed=seed,
                             attachment_exponent=(seed % 3) * 0.65,
                             recency_half_life=half_lives[seed % 3])
        corp, _ = generate(config)
        assert sum(len(a.references) for a in corp.articles) <= 5000
        parsed = parse_corpus(corp)
        for year in sorted(corp.years_present):
            for mode in ("literal", "per_capita"):
                got = forgetting_curve(corp, year, mode=mode, parsed=parsed)
                assert got.values == oracle_forgetting(corp, year, mode)
    assert perf_counter() - start < 30.0


def test_c04_smoothing_reproduction():
    """A half-life shrinking over citing years smooths the curves: the
    total-variation trend over the last 10 citing years is strictly
    decreasing (negative fitted slope) in at least 95 of 100 seeds; < 60 s."""
    start = perf_counter()
    negative = 0
    for seed in range(100):
        config = SynthConfig(start_year=1988, end_year=2017, papers_per_year=12,
                             refs_per_paper=10, seed=seed,
                             attachment_exponent=1.3,
                             recency_half_life=(40.0, 2.0))
        corp, _ = generate(config)
        trend = smoothness_trend(corp, mode="per_capita",
                                 parsed=parse_corpus(corp))
        years = sorted(trend)[-10:]
        values = [float(trend[y].total_variation) for y in years]
        x_mean = sum(years) / len(years)
        v_mean = sum(values) / len(values)
        slope = (sum((x - x_mean) * (v - v_mean) for x, v in zip(years, values))
                 / sum((x - x_mean) ** 2 for x in years))
        if slope < 0:
            negative += 1
    assert negative >= 95, f"decreasing trend in only {negative}/100 seeds"
    assert perf_counter() - start < 60.0


def test_c05_super_milestone_detection():
    """A planted 0.5% peak share is flagged; a planted 0.09% is not
    (strict > 0.001); zero tolerance."""
    config = SynthConfig(start_year=1990, end_year=2010, papers_per_year=300,
                         refs_per_paper=17, seed=31,
                         planted_milestones=((2008, 0.005), (2008, 0.0009)))
    corp, truth = generate(config)
    hot, faint = truth.planted
    assert hot.achieved_share > Fraction(1, 1000)
    assert faint.achieved_share < Fraction(1, 1000)
    stats = corpus_mod.corpus_stats(corp)
    series = build_citation_series(corp, parsed=parse_corpus(corp))
    flags = {f.paper: f for f in detect_super(series,
                                              stats.per_year_reference_totals,
                                              threshold="0.001")}
    assert flags[hot.paper].is_super
    assert not flags[faint.paper].is_super
    # boundary rule: a share of exactly 0.001 is not super
    exact = detect_super({"2000_x": CitationSeries("2000_x", {2005: 1}, 2005)},
                         {2005: 1000}, threshold="0.001")[0]
    assert exact.peak_share == Fraction(1, 1000)
    assert not exact.is_super


def _archetype_set(rng, sigma):
    series, labels = [], []
    for i in range(30):
        kind = i % 3
        length = 14 + i % 5
        t = np.linspace(0, 1, length)
        if kind == 0:
            base = 0.05 + 0.75 * t
        elif kind == 1:
            base = 0.9 * np.exp(-4.0 * t) + 0.05
        else:
            base = np.full(length, 0.12)
        series.append(np.clip(base + rng.normal(0, sigma, length), 0, 1))
        labels.append(kind)
    return series, labels


def test_c06_clustering_recovery():
    """DTW k-means (k=3) and Ward cut at 3 recover the planted 3-archetype
    partition: ARI 1.0 at sigma=0 and >= 0.9 at sigma=0.05, on each of 20
    seeds; < 60 s."""
    start = perf_counter()
    for seed in range(20):
        for sigma, floor in ((0.0, 1.0), (0.05, 0.9)):
            rng = np.random.default_rng(1000 + seed)
            series, truth = _archetype_set(rng, sigma)
            km = dtw_kmeans(series, 3, seed=seed)
            ari_km = adjusted_rand_score(truth, km.assignments)
            ari_ward = adjusted_rand_score(
                truth, cut_dendrogram(ward_cluster(series), 3))
            assert ari_km >= floor, f"kmeans ARI {ari_km} at sigma={sigma}, seed={seed}"
            assert ari_ward >= floor, f"ward ARI {ari_ward} at sigma={sigma}, seed={seed}"
    assert perf_counter() - start < 60.0


def test_c07_dtw_correctness():
    """The worked example and 500 random short pairs match the exhaustive
    alignment-enumeration oracle exactly."""
    assert dtw_distance([0, 1, 2], [0, 2]) == 1.0
    rng = np.random.default_rng(77)
    for _ in range(500):
        a = rng.integers(0, 12, size=rng.integers(1, 7)).tolist()
        b = rng.integers(0, 12, size=rng.integers(1, 7)).tolist()
        assert dtw_distance(a, b) == oracle_dtw(a, b)


def test_c08_power_law_mle():
    """10^5 zeta-distributed draws recover alpha=2.5 within +/-0.05 and
    alpha=3.63 within +/-0.10; < 30 s."""
    start = perf_counter()
    for alpha, tol, seed in ((2.5, 0.05, 1), (3.63, 0.10, 2)):
        rng = np.random.default_rng(seed)
        draws = sstats.zipf.rvs(alpha, size=10**5, random_state=rng)
        est = fit_power_law(draws)
        assert abs(est.alpha - alpha) <= tol, f"{est.alpha} vs {alpha}"
    assert perf_counter() - start < 30.0


def test_c09_parser_fidelity(golden_rows):
    """At least 95% exact (year, title, authors) matches on the 200-string
    golden corpus; zero idempotence violations on 100,000 fuzzed strings."""
    exact = 0
    for raw, year, title_norm, keys in golden_rows:
        ref = parse_reference(raw)
        if ref.year == year and ref.title_norm == title_norm and ref.authors == keys:
            exact += 1
    assert len(golden_rows) == 200
    assert exact >= 190, f"only {exact}/200 exact"

    rng = random.Random(20240511)
    pool = (string.printable
            + "éÅüßć’“”—…"
            + "ΑβЖ中文²₁ﬁ\U0001f600")
    for _ in range(100_000):
        text = "".join(rng.choice(pool) for _ in range(rng.randrange(0, 60)))
        once = normalize_title(text)
        assert normalize_title(once) == once


def test_c10_matthew_effect_arithmetic():
    """A planted author on 8 of the top-300 milestones is counted exactly;
    the concentration curve equals the set-union oracle; zero tolerance."""
    co_pool = ["Ruth Aaber", "Omar Beck", "Lia Crane", "Max Dorn", "Eva Falk"]
    refs = []
    pids = []
    for i in range(320):
        year = 1990 + i % 20
        title = f"Collected milestone work {i}"
        if i < 8:
            authors = ["Paula Planted", co_pool[i % 5]]
            count = 40
        else:
            authors = [f"Ann {co_pool[i % 5].split()[1]}ley", co_pool[(i + 2) % 5]]
            count = 3 + i % 20
        refs.extend([acm_ref(authors, year, title)] * count)
        pids.append((year, title))
    corp = corpus_of(article(2015, refs[: len(refs) // 2]),
                     article(2016, refs[len(refs) // 2:]))
    parsed = parse_corpus(corp)
    series = build_citation_series(corp, parsed=parsed)
    assert len(series) == 320
    top300 = [pid for pid, _ in rank_by_total(series, 300)]
    flat = [r for art_refs in parsed for r in art_refs]
    stats, skipped = author_milestone_counts(top300, flat)
    assert skipped == []
    by_author = {s.author: s.milestone_count for s in stats}
    assert by_author["planted_p"] == 8
    for min_count in (1, 2, 3, 8):
        got = concentration_curve(stats, min_count, total_milestones=300)
        want = oracle_concentration(stats, min_count, 300)
        assert got[0] == want[0]
        assert got[1] == want[1]


def test_c11_determinism_and_scale(tmp_path, monkeypatch):
    """report-all over a 629,120-reference synthetic corpus finishes in
    under 120 s, and runs with different thread counts are byte-identical."""
    config = SynthConfig(start_year=1984, end_year=2024, papers_per_year=983,
                         refs_per_paper=16, seed=629120,
                         attachment_exponent=1.1,
                         recency_half_life=(25.0, 6.0))
    corp, _ = generate(config)
    assert sum(len(a.references) for a in corp.articles) == 629_120
    src = tmp_path / "corpus.jsonl"
    corpus_mod.write_jsonl(corp, str(src))
    trees = {}
    for threads, name in (("1", "run_a"), ("4", "run_b")):
        monkeypatch.setenv("CITESCOPE_THREADS", threads)
        out = tmp_path / name
        start = perf_counter()
        assert cli_main(["report-all", "--corpus", str(src), "--out", str(out)]) == 0
        elapsed = perf_counter() - start
        assert elapsed < 120.0, f"report-all took {elapsed:.1f}s"
        trees[name] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    assert trees["run_a"].keys() == trees["run_b"].keys()
    for name in trees["run_a"]:
        assert trees["run_a"][name] == trees["run_b"][name], f"{name} differs"


def test_c12_mc_rank_invariance_under_alpha():
    """argsort of |MC| is identical for alpha in {0, 3.63, 5}."""
    series_map = {}
    kernels = set()
    for i in range(200):
        start = 2000
        counts = {start: 1, start + 2: 2 + i}
        pid = f"{start}_paper{i:03d}"
        series_map[pid] = CitationSeries(paper=pid, by_year=counts,
                                         first_cited=start)
        # exact alpha-free ranking kernel (tcs * nci / span): strictly
        # increasing in i, so the fixture is tie-free and the float argsorts
        # are comparable verbatim
        kernels.add(Fraction(1 + i, 3) * Fraction(3 + i, 10000))
    assert len(kernels) == 200
    totals = {y: 10000 for y in range(2000, 2010)}
    papers = sorted(series_map)
    orders = []
    for alpha in (0.0, 3.63, 5.0):
        recs = records_for(series_map, totals, alpha)
        mags = np.array([abs(recs[p].mc) for p in papers])
        orders.append(np.argsort(mags, kind="stable").tolist())
    assert orders[0] == orders[1] == orders[2]

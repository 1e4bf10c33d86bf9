"""citescope command line: ingest, analyze, and report on a corpus.

Usage: ``citescope <command> [--corpus PATH] [--out DIR] [flags...]``.

Exit status is 0 on success, 1 on usage errors, 2 on data errors.
Diagnostics go to standard error as single-line JSON records.  The
CITESCOPE_THREADS environment variable caps worker threads; results never
depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import authors as authors_mod
from . import cluster as cluster_mod
from . import corpus as corpus_mod
from . import forgetting as forgetting_mod
from . import milestone as milestone_mod
from . import report
from . import synth as synth_mod
from . import timeseries
from .corpus import DataError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are 1
        raise UsageError(message)


def diag(level: str, event: str, **fields) -> None:
    record = {"level": level, "event": event}
    record.update(fields)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _add_corpus_out(p: _Parser, corpus_required: bool = True) -> None:
    p.add_argument("--corpus", required=corpus_required,
                   help="corpus path (.jsonl/.csv export or persisted store)")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="citescope", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ingest", help="validate an export and persist the corpus")
    _add_corpus_out(p)
    p.add_argument("--format", choices=("auto", "jsonl", "csv"), default="auto")

    p = sub.add_parser("parse", help="reference parse-yield telemetry")
    _add_corpus_out(p)

    p = sub.add_parser("curves", help="citation curves and per-paper series")
    _add_corpus_out(p)

    p = sub.add_parser("forgetting", help="forgetting curves and smoothness")
    _add_corpus_out(p)
    p.add_argument("--mode", choices=(forgetting_mod.MODE_LITERAL,
                                      forgetting_mod.MODE_PER_CAPITA),
                   default=forgetting_mod.MODE_LITERAL)
    p.add_argument("--log", action="store_true", help="log-scale the curve figure")
    p.add_argument("--top", type=int, default=30, help="milestone bars on the secondary axis")

    p = sub.add_parser("milestones", help="ranked milestone table")
    _add_corpus_out(p)
    p.add_argument("--top", type=int, default=30)
    p.add_argument("--alpha", default="3.63", help="power-law exponent or 'mle'")
    p.add_argument("--mc-formula", choices=(milestone_mod.FORMULA_PRODUCT,
                                            milestone_mod.FORMULA_NORM),
                   default=milestone_mod.FORMULA_PRODUCT)
    p.add_argument("--super-threshold", default="0.001")

    p = sub.add_parser("mc", help="milestone-coefficient bubble chart")
    _add_corpus_out(p)
    p.add_argument("--top", type=int, default=3000)
    p.add_argument("--alpha", default="3.63")
    p.add_argument("--mc-formula", choices=(milestone_mod.FORMULA_PRODUCT,
                                            milestone_mod.FORMULA_NORM),
                   default=milestone_mod.FORMULA_PRODUCT)
    p.add_argument("--super-threshold", default="0.001")

    p = sub.add_parser("cluster", help="milestone-type clustering")
    _add_corpus_out(p)
    p.add_argument("--top", type=int, default=100)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-window", type=int, default=10)
    p.add_argument("--label-override", default=None,
                   help="manual labels, e.g. '0=super,1=fading_super,2=milestone'")

    p = sub.add_parser("authors", help="milestone authorship concentration")
    _add_corpus_out(p)
    p.add_argument("--top", type=int, default=300)
    p.add_argument("--min-count", type=int, default=3)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--years", default="1981:2024", help="start:end")
    p.add_argument("--papers", type=int, default=40)
    p.add_argument("--growth", type=float, default=1.0)
    p.add_argument("--refs", type=int, default=20)
    p.add_argument("--attachment", type=float, default=1.0)
    p.add_argument("--half-life", default="inf", help="years, or start:end schedule")
    p.add_argument("--plant", action="append", default=[],
                   help="year:peak_share, repeatable")
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("report-all", help="full pipeline, tables and figures")
    _add_corpus_out(p)
    p.add_argument("--alpha", default="3.63")
    p.add_argument("--mc-formula", choices=(milestone_mod.FORMULA_PRODUCT,
                                            milestone_mod.FORMULA_NORM),
                   default=milestone_mod.FORMULA_PRODUCT)
    p.add_argument("--super-threshold", default="0.001")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--panel-years", default=None,
                   help="comma-separated citing years for panel/cumulative plots")
    return parser


def _ensure_out(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def _open_corpus(path: str):
    if not os.path.exists(path):
        raise DataError(f"corpus not found: {path}")
    return corpus_mod.open_corpus(path)


# --------------------------------------------------------------------------
# command implementations

def _cmd_ingest(args) -> int:
    fmt = None if args.format == "auto" else args.format
    corp = corpus_mod.ingest(args.corpus, fmt) if fmt else corpus_mod.open_corpus(args.corpus)
    _ensure_out(args.out)
    corpus_mod.save(corp, os.path.join(args.out, "corpus.json"))
    stats = corpus_mod.corpus_stats(corp)
    diag("info", "ingested", articles=corp.total_articles,
         years=len(corp.years_present),
         references=sum(stats.per_year_reference_totals.values()))
    return 0


def _cmd_parse(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    result = timeseries.parse_corpus(corp)
    from .refparse import parse_yield
    yield_ = parse_yield(corp, parsed=result)
    report.write_json(os.path.join(args.out, "parse_yield.json"), {
        "styles": yield_.styles,
        "parsed_fraction": float(yield_.parsed_fraction),
        "total_references": yield_.total_references,
        "identified_references": yield_.identified_references,
    })
    diag("info", "parse_yield", parsed_fraction=float(yield_.parsed_fraction))
    return 0


def _cmd_curves(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    curves = timeseries.build_citation_curves(corp, parsed=parsed)
    series = timeseries.build_citation_series(corp, parsed=parsed)
    report.emit_curves_csv(os.path.join(args.out, "curves.csv"), curves)
    report.emit_series_csv(os.path.join(args.out, "series.csv"), series)
    return 0


def _cmd_forgetting(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    base = timeseries.build_citation_curves(corp, parsed=parsed)
    curves = [forgetting_mod.forgetting_curve(corp, y, mode=args.mode,
                                              parsed=parsed, curves=base)
              for y in sorted(corp.years_present)]
    report.emit_forgetting_csv(os.path.join(args.out, "forgetting.csv"), curves)
    trend = forgetting_mod.smoothness_trend(corp, mode=args.mode, parsed=parsed) \
        if len(corp.years_present) >= 2 else {}
    if trend:
        report.emit_smoothness_csv(os.path.join(args.out, "smoothness.csv"), trend)
        report.write_svg(os.path.join(args.out, "smoothness.svg"),
                         report.figure_smoothness(trend))
    series = timeseries.build_citation_series(corp, parsed=parsed)
    bars = forgetting_mod.milestone_bars(corp, args.top, series_map=series) if series else {}
    fig = report.figure_forgetting(curves, bars=bars, log_scale=args.log)
    report.write_svg(os.path.join(args.out, "forgetting.svg"), fig)
    return 0


def _milestone_outputs(corp, parsed, top: int, alpha_spec: str, formula: str,
                       threshold: str):
    series = timeseries.build_citation_series(corp, parsed=parsed)
    if not series:
        raise DataError("no identifiable cited papers in corpus")
    stats = corpus_mod.corpus_stats(corp)
    totals = stats.per_year_reference_totals
    alpha = milestone_mod.fit_or_fixed_alpha(series, alpha_spec)
    ranked = timeseries.rank_by_total(series, top)
    top_map = {pid: series[pid] for pid, _ in ranked}
    records = milestone_mod.records_for(top_map, totals, alpha.alpha, formula=formula)
    flags = {f.paper: f for f in milestone_mod.detect_super(top_map, totals,
                                                            threshold=threshold)}
    return series, totals, alpha, ranked, records, flags


def _cmd_milestones(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    _, _, alpha, ranked, records, flags = _milestone_outputs(
        corp, parsed, args.top, args.alpha, args.mc_formula, args.super_threshold)
    report.emit_milestones_csv(os.path.join(args.out, "milestones.csv"),
                               ranked, records, flags)
    diag("info", "alpha", value=alpha.alpha, method=alpha.method)
    return 0


def _cmd_mc(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    _, _, alpha, ranked, records, flags = _milestone_outputs(
        corp, parsed, args.top, args.alpha, args.mc_formula, args.super_threshold)
    report.emit_milestones_csv(os.path.join(args.out, "mc.csv"), ranked, records, flags)
    ordered = [records[pid] for pid, _ in ranked]
    report.write_svg(os.path.join(args.out, "mc.svg"), report.figure_mc(ordered))
    diag("info", "alpha", value=alpha.alpha, method=alpha.method)
    return 0


def _parse_override(spec: str) -> dict[int, str]:
    valid = {cluster_mod.LABEL_SUPER, cluster_mod.LABEL_FADING, cluster_mod.LABEL_MILESTONE}
    out = {}
    for part in spec.split(","):
        idx, _, label = part.partition("=")
        if label not in valid:
            raise UsageError(f"bad --label-override entry: {part!r}")
        out[int(idx)] = label
    return out


def _cluster_outputs(corp, parsed, top: int, k: int, seed: int, restarts: int,
                     window: int, override: Optional[str]):
    series = timeseries.build_citation_series(corp, parsed=parsed)
    stats = corpus_mod.corpus_stats(corp)
    totals = stats.per_year_reference_totals
    ranked = timeseries.rank_by_total(series, top)
    papers = [pid for pid, _ in ranked]
    if len(papers) < max(k, 2):
        raise DataError(f"need at least {max(k, 2)} milestone series to cluster")
    rel = cluster_mod.relative_series(series, totals, papers=papers)
    result = cluster_mod.dtw_kmeans(rel, k, seed=seed)
    dendro = cluster_mod.ward_cluster(rel)
    k_max = min(8, len(rel))
    inertias = cluster_mod.elbow(rel, range(1, k_max + 1), seed=seed, restarts=restarts)
    if override:
        labels = _parse_override(override)
        assignments = [cluster_mod.ClusterAssignment(paper=s.paper, cluster=a,
                                                     label=labels.get(a, cluster_mod.LABEL_MILESTONE))
                       for a, s in zip(result.assignments, rel)]
    else:
        assignments = cluster_mod.label_clusters(result.assignments, rel, totals,
                                                 window=window)
    return rel, result, dendro, inertias, assignments


def _cmd_cluster(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    rel, result, dendro, inertias, assignments = _cluster_outputs(
        corp, parsed, args.top, args.k, args.seed, args.restarts,
        args.label_window, args.label_override)
    report.emit_clusters_csv(os.path.join(args.out, "clusters.csv"), assignments)
    report.emit_dendrogram_json(os.path.join(args.out, "dendrogram.json"),
                                dendro, [s.paper for s in rel])
    report.write_svg(os.path.join(args.out, "elbow.svg"), report.figure_elbow(inertias))
    report.write_svg(os.path.join(args.out, "dendrogram.svg"),
                     report.figure_dendrogram(dendro, [s.paper for s in rel]))
    report.write_svg(os.path.join(args.out, "clusters.svg"),
                     report.figure_cluster_series(rel, assignments))
    diag("info", "clustered", k=args.k, inertia=result.inertia)
    return 0


def _author_outputs(corp, parsed, top: int, min_count: int):
    series = timeseries.build_citation_series(corp, parsed=parsed)
    ranked = timeseries.rank_by_total(series, top)
    milestones = [pid for pid, _ in ranked]
    flat = [ref for refs in parsed for ref in refs]
    stats, unattributed = authors_mod.author_milestone_counts(milestones, flat)
    selected, shares = authors_mod.concentration_curve(stats, min_count,
                                                       total_milestones=len(milestones))
    return milestones, stats, unattributed, selected, shares


def _cmd_authors(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    parsed = timeseries.parse_corpus(corp)
    milestones, stats, unattributed, selected, shares = _author_outputs(
        corp, parsed, args.top, args.min_count)
    report.emit_authors_csv(os.path.join(args.out, "authors.csv"), stats)
    report.emit_concentration_csv(os.path.join(args.out, "concentration.csv"),
                                  selected, shares)
    if stats:
        report.write_svg(os.path.join(args.out, "authors.svg"),
                         report.figure_authors(stats))
    if selected:
        report.write_svg(os.path.join(args.out, "concentration.svg"),
                         report.figure_concentration(selected, shares))
    if unattributed:
        diag("warning", "milestones_without_authors", papers=unattributed[:20],
             count=len(unattributed))
    return 0


def _parse_half_life(spec: str):
    if ":" in spec:
        a, b = spec.split(":", 1)
        return (float(a), float(b))
    return float(spec)


def _cmd_synth(args) -> int:
    _ensure_out(args.out)
    try:
        start, end = (int(v) for v in args.years.split(":", 1))
    except ValueError:
        raise UsageError(f"--years must be start:end, got {args.years!r}")
    planted = []
    for spec in args.plant:
        year, _, share = spec.partition(":")
        planted.append((int(year), float(share)))
    config = synth_mod.SynthConfig(
        start_year=start, end_year=end, papers_per_year=args.papers,
        refs_per_paper=args.refs, seed=args.seed, growth_rate=args.growth,
        attachment_exponent=args.attachment,
        recency_half_life=_parse_half_life(args.half_life),
        planted_milestones=tuple(planted),
    )
    corp, truth = synth_mod.generate(config)
    corpus_mod.write_jsonl(corp, os.path.join(args.out, "corpus.jsonl"))
    synth_mod.write_ground_truth(truth, os.path.join(args.out, "ground_truth.json"))
    diag("info", "generated", articles=corp.total_articles,
         references=sum(len(a.references) for a in corp.articles))
    return 0


def _panel_years(corp, requested: Optional[str]) -> list[int]:
    years = sorted(corp.years_present)
    if requested:
        picked = [int(y) for y in requested.split(",")]
        bad = [y for y in picked if y not in corp.years_present]
        if bad:
            raise DataError(f"panel years not in corpus: {bad}")
        return picked
    candidates = years[1:]
    if len(candidates) <= 8:
        return candidates
    idx = np.linspace(0, len(candidates) - 1, 8).astype(int)
    return [candidates[i] for i in sorted(set(int(i) for i in idx))]


def _cmd_report_all(args) -> int:
    corp = _open_corpus(args.corpus)
    _ensure_out(args.out)
    out = args.out
    parsed = timeseries.parse_corpus(corp)

    from .refparse import parse_yield
    yld = parse_yield(corp, parsed=parsed)
    report.write_json(os.path.join(out, "parse_yield.json"), {
        "styles": yld.styles,
        "parsed_fraction": float(yld.parsed_fraction),
        "total_references": yld.total_references,
        "identified_references": yld.identified_references,
    })

    curves = timeseries.build_citation_curves(corp, parsed=parsed)
    series = timeseries.build_citation_series(corp, parsed=parsed)
    report.emit_curves_csv(os.path.join(out, "curves.csv"), curves)
    report.emit_series_csv(os.path.join(out, "series.csv"), series)

    years = sorted(corp.years_present)
    fcurves = {mode: [forgetting_mod.forgetting_curve(corp, y, mode=mode,
                                                      parsed=parsed, curves=curves)
                      for y in years]
               for mode in (forgetting_mod.MODE_LITERAL, forgetting_mod.MODE_PER_CAPITA)}
    report.emit_forgetting_csv(os.path.join(out, "forgetting.csv"),
                               fcurves[forgetting_mod.MODE_LITERAL]
                               + fcurves[forgetting_mod.MODE_PER_CAPITA])
    bars = forgetting_mod.milestone_bars(corp, 30, series_map=series) if series else {}
    for mode, curveset in fcurves.items():
        fig = report.figure_forgetting(curveset, bars=bars, log_scale=True)
        report.write_svg(os.path.join(out, f"forgetting_{mode}.svg"), fig)
    if len(years) >= 2:
        trend = forgetting_mod.smoothness_trend(corp, parsed=parsed)
        if trend:
            report.emit_smoothness_csv(os.path.join(out, "smoothness.csv"), trend)
            report.write_svg(os.path.join(out, "smoothness.svg"),
                             report.figure_smoothness(trend))

    if series:
        _, totals, alpha, ranked30, records30, flags30 = _milestone_outputs(
            corp, parsed, 30, args.alpha, args.mc_formula, args.super_threshold)
        report.emit_milestones_csv(os.path.join(out, "milestones.csv"),
                                   ranked30, records30, flags30)
        _, _, _, ranked3k, records3k, flags3k = _milestone_outputs(
            corp, parsed, 3000, args.alpha, args.mc_formula, args.super_threshold)
        report.emit_milestones_csv(os.path.join(out, "mc.csv"),
                                   ranked3k, records3k, flags3k)
        report.write_svg(os.path.join(out, "mc.svg"),
                         report.figure_mc([records3k[pid] for pid, _ in ranked3k]))
        diag("info", "alpha", value=alpha.alpha, method=alpha.method)

        try:
            rel, result, dendro, inertias, assignments = _cluster_outputs(
                corp, parsed, 100, 3, args.seed, 10, 10, None)
        except (DataError, cluster_mod.LabelingError) as exc:
            diag("warning", "cluster_skipped", reason=str(exc))
        else:
            report.emit_clusters_csv(os.path.join(out, "clusters.csv"), assignments)
            report.emit_dendrogram_json(os.path.join(out, "dendrogram.json"),
                                        dendro, [s.paper for s in rel])
            report.write_svg(os.path.join(out, "elbow.svg"),
                             report.figure_elbow(inertias))
            report.write_svg(os.path.join(out, "dendrogram.svg"),
                             report.figure_dendrogram(dendro, [s.paper for s in rel]))
            report.write_svg(os.path.join(out, "clusters.svg"),
                             report.figure_cluster_series(rel, assignments))

        milestones, astats, unattributed, selected, shares = _author_outputs(
            corp, parsed, 300, 3)
        report.emit_authors_csv(os.path.join(out, "authors.csv"), astats)
        report.emit_concentration_csv(os.path.join(out, "concentration.csv"),
                                      selected, shares)
        if astats:
            report.write_svg(os.path.join(out, "authors.svg"),
                             report.figure_authors(astats))
        if selected:
            report.write_svg(os.path.join(out, "concentration.svg"),
                             report.figure_concentration(selected, shares))
        if unattributed:
            diag("warning", "milestones_without_authors", count=len(unattributed))

        panels = []
        cumulative = {}
        for year in _panel_years(corp, args.panel_years):
            prior = timeseries.prior_milestones(series, year, 300)
            if not prior:
                continue
            try:
                panels.append(timeseries.milestone_citation_panels(
                    corp, year, prior, parsed=parsed))
            except DataError:
                continue
            shares_map = timeseries.cumulative_citation_share(corp, year, prior,
                                                              parsed=parsed)
            if shares_map:
                cumulative[year] = shares_map
        if panels:
            report.emit_panels_csv(os.path.join(out, "panels.csv"), panels)
            report.write_svg(os.path.join(out, "panels.svg"),
                             report.figure_panels(panels))
        if cumulative:
            report.emit_cumulative_csv(os.path.join(out, "cumulative.csv"), cumulative)
            report.write_svg(os.path.join(out, "cumulative.svg"),
                             report.figure_cumulative(cumulative))
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "parse": _cmd_parse,
    "curves": _cmd_curves,
    "forgetting": _cmd_forgetting,
    "milestones": _cmd_milestones,
    "mc": _cmd_mc,
    "cluster": _cmd_cluster,
    "authors": _cmd_authors,
    "synth": _cmd_synth,
    "report-all": _cmd_report_all,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        diag("error", "usage", message=str(exc))
        return 1
    except (DataError, cluster_mod.LabelingError, ValueError, OSError) as exc:
        diag("error", "data", message=str(exc))
        return 2
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())

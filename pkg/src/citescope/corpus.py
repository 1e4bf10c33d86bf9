"""Data model and on-disk formats for a proceedings corpus.

A corpus is an ordered collection of articles, each carrying its venue year,
title, author names, and the raw text of its reference list.  Years that do
not occur in the source data are represented by absence: publication counts
are never zero-filled, so expectation weights computed downstream only ever
see years that really had proceedings.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

FORMAT_VERSION = 1

# Sanity bounds for venue years; source exports outside this window are
# treated as corrupt rather than silently ingested.
MIN_YEAR = 1800
MAX_YEAR = 2100


class DataError(Exception):
    """Base class for malformed input data (CLI exit status 2)."""


class IngestError(DataError):
    """A source record failed validation; message names line and field."""


class PersistError(DataError):
    """A persisted corpus file is unreadable or has the wrong version."""


@dataclass(frozen=True)
class Article:
    """One published paper with its raw reference strings."""

    venue_year: int
    title: str
    authors: tuple[str, ...]
    references: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Corpus:
    """An immutable, order-preserving collection of articles.

    ``counts``, ``years_present`` and ``total_articles`` are derived from
    ``articles`` at construction time and cached on the instance; equality is
    defined by the article sequence alone.
    """

    articles: tuple[Article, ...]
    years_present: frozenset[int] = field(init=False)
    counts: dict[int, int] = field(init=False)
    total_articles: int = field(init=False)

    def __post_init__(self) -> None:
        counts: dict[int, int] = {}
        for art in self.articles:
            counts[art.venue_year] = counts.get(art.venue_year, 0) + 1
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "years_present", frozenset(counts))
        object.__setattr__(self, "total_articles", len(self.articles))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.articles == other.articles

    def __hash__(self) -> int:
        return hash(self.articles)

    def articles_in(self, year: int) -> tuple[Article, ...]:
        return tuple(a for a in self.articles if a.venue_year == year)


@dataclass(frozen=True)
class CorpusStats:
    """Per-year citation totals and mean reference counts.

    ``per_year_reference_totals`` counts every raw reference string in a
    year's articles, parseable or not; these are the denominators used for
    normalized citation impact.
    """

    per_year_reference_totals: dict[int, int]
    mean_refs_per_paper: dict[int, Fraction]


def _validate_article(venue_year: object, title: object, authors: object,
                      references: object, lineno: int) -> Article:
    if not isinstance(venue_year, int) or isinstance(venue_year, bool):
        raise IngestError(f"line {lineno}: field 'venue_year' must be an integer, got {venue_year!r}")
    if not (MIN_YEAR <= venue_year <= MAX_YEAR):
        raise IngestError(f"line {lineno}: field 'venue_year' out of range: {venue_year}")
    if not isinstance(title, str) or not title.strip():
        raise IngestError(f"line {lineno}: field 'title' must be non-empty text")
    if not isinstance(authors, (list, tuple)) or not all(isinstance(a, str) for a in authors):
        raise IngestError(f"line {lineno}: field 'authors' must be a list of strings")
    if not isinstance(references, (list, tuple)) or not all(isinstance(r, str) for r in references):
        raise IngestError(f"line {lineno}: field 'references' must be a list of strings")
    return Article(venue_year=venue_year, title=title,
                   authors=tuple(authors), references=tuple(references))


def _article_from_json_line(line: str, lineno: int) -> Article:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise IngestError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(rec, dict):
        raise IngestError(f"line {lineno}: record must be a JSON object")
    for name in ("venue_year", "title", "authors", "references"):
        if name not in rec:
            raise IngestError(f"line {lineno}: missing field '{name}'")
    return _validate_article(rec["venue_year"], rec["title"],
                             rec["authors"], rec["references"], lineno)


def _articles_from_csv(path: str) -> list[Article]:
    articles = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = {"venue_year", "title", "authors", "references"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise IngestError(f"line 1: CSV header must contain columns {sorted(expected)}")
        for lineno, row in enumerate(reader, start=2):
            raw_year = (row.get("venue_year") or "").strip()
            try:
                year = int(raw_year)
            except ValueError:
                raise IngestError(f"line {lineno}: field 'venue_year' is not an integer: {raw_year!r}") from None
            authors = [a for a in (row.get("authors") or "").split("|") if a]
            refs = [r for r in (row.get("references") or "").split("|") if r]
            articles.append(_validate_article(year, row.get("title"), authors, refs, lineno))
    return articles


def ingest(path: str, format: str | None = None) -> Corpus:
    """Read a corpus export (JSONL or CSV) into a validated Corpus.

    ``format`` is 'jsonl' or 'csv'; when omitted it is inferred from the
    file extension.  Article order is preserved as read.  Malformed records
    raise IngestError naming the offending line and field.
    """
    if format is None:
        format = "csv" if path.lower().endswith(".csv") else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown ingest format: {format!r}")
    if not os.path.exists(path):
        raise IngestError(f"no such file: {path}")
    if format == "csv":
        return Corpus(tuple(_articles_from_csv(path)))
    articles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                articles.append(_article_from_json_line(line, lineno))
    return Corpus(tuple(articles))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Per-year raw reference totals and mean references per article."""
    totals: dict[int, int] = {y: 0 for y in sorted(corpus.years_present)}
    for art in corpus.articles:
        totals[art.venue_year] += len(art.references)
    means = {y: Fraction(totals[y], corpus.counts[y]) for y in totals}
    return CorpusStats(per_year_reference_totals=totals, mean_refs_per_paper=means)


def _article_record(art: Article) -> dict:
    return {
        "venue_year": art.venue_year,
        "title": art.title,
        "authors": list(art.authors),
        "references": list(art.references),
    }


def write_jsonl(corpus: Corpus, path: str) -> None:
    """Write the corpus in the one-article-per-line export schema."""
    with open(path, "w", encoding="utf-8") as fh:
        for art in corpus.articles:
            fh.write(json.dumps(_article_record(art), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def save(corpus: Corpus, path: str) -> None:
    """Persist the corpus as a single self-describing JSON container."""
    # format_version stays the first key so readers can sniff the container
    # from the head of the file.
    payload = {
        "format_version": FORMAT_VERSION,
        "articles": [_article_record(a) for a in corpus.articles],
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
    os.replace(tmp, path)


def load(path: str) -> Corpus:
    """Load a corpus persisted by :func:`save`.

    Raises PersistError on version mismatch or a corrupt/truncated file.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise PersistError(f"cannot read corpus file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PersistError(f"corrupt corpus file {path}: {exc.msg} at position {exc.pos}") from exc
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise PersistError(f"{path} is not a persisted corpus (no format_version)")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise PersistError(f"unsupported corpus format_version {version!r}, expected {FORMAT_VERSION}")
    articles = []
    for lineno, rec in enumerate(payload.get("articles", []), start=1):
        articles.append(_validate_article(rec.get("venue_year"), rec.get("title"),
                                          rec.get("authors", []), rec.get("references", []),
                                          lineno))
    return Corpus(tuple(articles))


def open_corpus(path: str) -> Corpus:
    """Open either a raw export (.jsonl/.csv) or a persisted corpus store.

    A JSON object with a format_version key is treated as a persisted store;
    anything else goes through :func:`ingest`.
    """
    if path.lower().endswith(".csv"):
        return ingest(path, "csv")
    with open(path, encoding="utf-8") as fh:
        head = fh.read(64).lstrip()
    if head.startswith("{") and '"format_version"' in head:
        return load(path)
    return ingest(path, "jsonl")

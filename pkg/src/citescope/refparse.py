"""Reference-string parsing: years, normalized titles, author keys.

Raw reference strings come in two dominant notation families: a
firstname-first style where the year sits between periods
(``Virginia Braun and Victoria Clarke. 2006. Using thematic analysis ...``)
and a lastname-comma-initials style with a parenthesized year
(``Hart, S. G., & Staveland, L. E. (1988). Development of NASA-TLX ...``).
Parsing is a battery of regular expressions and logical checks layered per
style; it never hard-fails.  A string that defeats every check comes back
with style ``unknown`` and absent fields, and is accounted for in the
parse-yield telemetry.

Cited works are identified by the concatenation of the publication year and
the normalized title; authors by lowercase surname plus first initial, the
lowest common denominator across notation styles.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .corpus import Corpus
from .parallel import map_ordered

STYLE_FIRSTNAME = "firstname_first"
STYLE_LASTNAME = "lastname_comma_initials"
STYLE_UNKNOWN = "unknown"

MIN_REF_YEAR = 1800


@dataclass(frozen=True)
class ParsedReference:
    raw: str
    year: Optional[int]
    title_raw: Optional[str]
    title_norm: Optional[str]
    authors: tuple[str, ...]
    style: str


@dataclass(frozen=True)
class ParseYield:
    """Parser quality telemetry over a corpus."""

    styles: dict[str, int]
    parsed_fraction: Fraction
    total_references: int
    identified_references: int


_RE_NON_ALNUM = re.compile(r"[^a-z0-9]+")


def normalize_title(title_raw: str) -> str:
    """Collapse a title to lowercase alphanumerics.

    Unicode is compatibility-decomposed and combining marks are stripped
    before filtering, so diacritic and quote variants of the same title
    collide onto one normal form.  Idempotent; all-symbol input yields the
    empty string.
    """
    if title_raw.isascii():
        # NFKD and mark-stripping are identities on ASCII.
        return _RE_NON_ALNUM.sub("", title_raw.lower())
    decomposed = unicodedata.normalize("NFKD", title_raw)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return _RE_NON_ALNUM.sub("", stripped.casefold())


# --------------------------------------------------------------------------
# author keys

_NAME_SUFFIXES = {"jr", "jr.", "sr", "sr.", "ii", "iii", "iv", "v"}
_SURNAME_PARTICLES = {
    "van", "von", "vander", "der", "de", "den", "del", "della", "di", "da",
    "la", "le", "ter", "ten", "op", "het", "dos", "das", "do", "du", "el",
    "al", "bin", "ibn", "mac", "st", "st.",
}
_RE_LETTERS = re.compile(r"[^a-z]+")


def _fold(text: str) -> str:
    if text.isascii():
        return text.lower()
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch)).casefold()


def author_key(given: str, surname: str) -> Optional[str]:
    """Build ``<lastname>_<initial>`` from a given-name part and a surname.

    Hyphens, spaces, and apostrophes inside the surname are dropped so
    multi-word and hyphenated surnames map to a single deterministic token.
    Returns None when either part carries no usable letters.
    """
    last = _RE_LETTERS.sub("", _fold(surname))
    first = _RE_LETTERS.sub("", _fold(given))
    if not last or not first:
        return None
    return f"{last}_{first[0]}"


def _split_given_surname(name: str) -> Optional[tuple[str, str]]:
    """Split a firstname-first name into (given, surname)."""
    tokens = name.split()
    while tokens and _fold(tokens[-1]).strip(".") in _NAME_SUFFIXES:
        tokens.pop()
    if len(tokens) < 2:
        return None
    given = tokens[0]
    rest = tokens[1:]
    # A particle token starts the surname run: "Ludwig van der Berg" ->
    # surname "van der Berg".
    for i, tok in enumerate(rest[:-1]):
        if _fold(tok).strip(".") in _SURNAME_PARTICLES:
            return given, " ".join(rest[i:])
    return given, rest[-1]


_RE_APA_AUTHOR = re.compile(
    r"(?P<last>[A-Za-z][A-Za-z'’\- ]{0,40}?)\s*,\s*"
    r"(?P<initials>(?:[A-Z](?![a-z])\.?[\s\-]*)+)"
)
_RE_ETAL = re.compile(r"\bet\.?\s+al\.?,?", re.IGNORECASE)
_RE_EDS = re.compile(r"\(\s*eds?\.?\s*\)[.,]?", re.IGNORECASE)
_RE_AND_SEP = re.compile(r",?\s+(?:and|&|with)\s+|;\s*", re.IGNORECASE)


def _clean_author_block(block: str) -> str:
    block = _RE_ETAL.sub(" ", block)
    block = _RE_EDS.sub(" ", block)
    # Trailing initials keep their periods; only list punctuation is shed.
    return block.replace("*", " ").strip(" ,;")


def _keys_from_lastname_block(block: str) -> tuple[str, ...]:
    keys = []
    for m in _RE_APA_AUTHOR.finditer(block):
        key = author_key(m.group("initials"), m.group("last"))
        if key:
            keys.append(key)
    return tuple(keys)


_RE_INITIALS_FIRST = re.compile(r"^(?:[A-Z]\.[\s\-]*)+[A-Z][a-z]")


def _looks_lastname_style(block: str) -> bool:
    # "I. Keller, J. Meyer" is initials-first, not "Keller, J."-style, even
    # though the surname-comma-initial pattern matches inside it.
    if _RE_INITIALS_FIRST.match(block):
        return False
    matches = list(_RE_APA_AUTHOR.finditer(block))
    if not matches:
        return False
    covered = sum(m.end() - m.start() for m in matches)
    letters = sum(1 for ch in block if ch.isalpha())
    return covered >= 0.5 * max(letters, 1)


def _keys_from_author_block(block: str) -> tuple[str, ...]:
    """Extract author keys from either notation of an author block."""
    block = _clean_author_block(block)
    if not block:
        return ()
    if _looks_lastname_style(block):
        return _keys_from_lastname_block(block)
    keys = []
    for chunk in _RE_AND_SEP.split(block):
        for name in chunk.split(", "):
            name = name.strip(" ,.")
            if not name:
                continue
            if "," in name:
                # "Braun, Virginia" inside an otherwise firstname-first list
                last, _, first = name.partition(",")
                key = author_key(first.strip(), last.strip())
            else:
                parts = _split_given_surname(name)
                key = author_key(*parts) if parts else None
            if key:
                keys.append(key)
    return tuple(keys)


# --------------------------------------------------------------------------
# year and title extraction

_YEAR_PAT = r"(?:1[89]\d{2}|20\d{2})"
_RE_ENUM = re.compile(r"^\s*(?:\[\d+\]|\(\d+\)|\d{1,3}\.)\s+")
_RE_WS = re.compile(r"\s+")
_RE_PAREN_YEAR = re.compile(r"\(\s*(" + _YEAR_PAT + r")([a-z])?\s*(?:,[^)]{0,30})?\)")
_RE_DOTTED_YEAR = re.compile(r"[.,]\s+(" + _YEAR_PAT + r")([a-z])?[.,:]\s+")
_RE_BARE_YEAR = re.compile(r"(?<![0-9])(" + _YEAR_PAT + r")(?![0-9])")

# Cues that a "?"/"!" sentence break is followed by venue matter, not more
# title text.
_RE_VENUE_CUE = re.compile(
    r"^(?:In |Proceedings|Proc\.|Journal|J\. |ACM|IEEE|Springer|Elsevier|"
    r"arXiv|MIT Press|Morgan|O'Reilly|Oxford|Cambridge|Technical Report|"
    r"PhD|Ph\.D|Master|Retrieved|https?://|doi|DOI|New York|London|CRC)"
)
_RE_TRAILING_PAGES = re.compile(r"[,;]?\s*(?:pp?\.\s*\d|pages?\s+\d).*$")


def _plausible(year: int, citing_year: Optional[int]) -> bool:
    upper = citing_year + 1 if citing_year is not None else date.today().year + 1
    return MIN_REF_YEAR <= year <= upper


def _extract_title(rest: str) -> Optional[str]:
    """The sentence-like span opening ``rest``, trimmed of venue tails."""
    rest = rest.strip()
    if not rest:
        return None
    cut = len(rest)
    dot = rest.find(". ")
    if dot != -1:
        cut = dot
    for punct in ("? ", "! "):
        pos = rest.find(punct)
        if pos != -1 and pos + 2 <= len(rest) and _RE_VENUE_CUE.match(rest[pos + 2:]):
            cut = min(cut, pos + 1)
    title = rest[:cut].strip()
    title = _RE_TRAILING_PAGES.sub("", title)
    title = title.strip(" .,:;\"'“”‘’")
    return title or None


def _make(raw: str, year: Optional[int], title_raw: Optional[str],
          authors: tuple[str, ...], style: str) -> ParsedReference:
    title_norm = normalize_title(title_raw) if title_raw else None
    if title_norm == "":
        title_norm = None
    return ParsedReference(raw=raw, year=year, title_raw=title_raw,
                           title_norm=title_norm, authors=authors, style=style)


def parse_reference(raw: str, citing_year: Optional[int] = None) -> ParsedReference:
    """Parse one raw reference string into year, title, and author keys.

    ``citing_year`` is optional context: candidate years later than the
    citing proceedings year plus one are rejected, since a reference cannot
    meaningfully postdate the paper citing it.  Unparseable strings come
    back with ``style="unknown"`` and absent fields rather than raising.
    """
    return _parse_cached(raw, citing_year)


@lru_cache(maxsize=1 << 18)
def _parse_cached(raw: str, citing_year: Optional[int]) -> ParsedReference:
    # Popular papers are cited by many articles with identical reference
    # text; results are immutable and safe to share.
    text = _RE_WS.sub(" ", _RE_ENUM.sub("", raw)).strip()
    if not text:
        return _make(raw, None, None, (), STYLE_UNKNOWN)

    paren = None
    for m in _RE_PAREN_YEAR.finditer(text):
        if _plausible(int(m.group(1)), citing_year):
            paren = m
            break
    dotted = None
    for m in _RE_DOTTED_YEAR.finditer(text):
        if _plausible(int(m.group(1)), citing_year):
            dotted = m
            break

    # The style whose year token appears first wins; a parenthesized year
    # marks the lastname-comma-initials notation.
    if paren is not None and (dotted is None or paren.start() < dotted.start()):
        year = int(paren.group(1))
        authors = _keys_from_author_block(text[:paren.start()])
        title = _extract_title(text[paren.end():].lstrip(" .:,"))
        return _make(raw, year, title, authors, STYLE_LASTNAME)
    if dotted is not None:
        year = int(dotted.group(1))
        authors = _keys_from_author_block(text[:dotted.start()])
        title = _extract_title(text[dotted.end():])
        return _make(raw, year, title, authors, STYLE_FIRSTNAME)

    # Last resort: a bare plausible year anywhere lets the reference count
    # toward citation curves even though no style was detected.
    for m in _RE_BARE_YEAR.finditer(text):
        if _plausible(int(m.group(1)), citing_year):
            return _make(raw, int(m.group(1)), None, (), STYLE_UNKNOWN)
    return _make(raw, None, None, (), STYLE_UNKNOWN)


def paper_id(ref: ParsedReference) -> Optional[str]:
    """Mint the canonical ``<year>_<normalized title>`` identifier.

    Present iff both the year and a non-empty normalized title parsed.
    """
    if ref.year is None or not ref.title_norm:
        return None
    return f"{ref.year}_{ref.title_norm}"


def paper_id_year(pid: str) -> int:
    return int(pid[:4])


def parse_corpus(corpus: Corpus) -> tuple[tuple[ParsedReference, ...], ...]:
    """Parse every reference of every article, preserving article order.

    Articles are parsed independently (and possibly in parallel); each
    article's venue year provides the citing-year context.
    """
    def parse_article(art):
        return tuple(parse_reference(r, citing_year=art.venue_year)
                     for r in art.references)

    return tuple(map_ordered(parse_article, corpus.articles))


def parse_yield(corpus: Corpus,
                parsed: Optional[Iterable[tuple[ParsedReference, ...]]] = None) -> ParseYield:
    """Style counts and the fraction of references that minted a PaperId."""
    if parsed is None:
        parsed = parse_corpus(corpus)
    styles = {STYLE_FIRSTNAME: 0, STYLE_LASTNAME: 0, STYLE_UNKNOWN: 0}
    total = 0
    identified = 0
    for refs in parsed:
        for ref in refs:
            total += 1
            styles[ref.style] += 1
            if paper_id(ref) is not None:
                identified += 1
    fraction = Fraction(identified, total) if total else Fraction(1)
    return ParseYield(styles=styles, parsed_fraction=fraction,
                      total_references=total, identified_references=identified)

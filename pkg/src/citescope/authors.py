"""Milestone authorship concentration: the Matthew effect in numbers.

Author identities come from parsed reference strings (lowercase surname
plus first initial); a milestone's author list is the most common author
tuple among all references that resolved to it, which shrugs off the odd
typo in individual reference strings.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .refparse import ParsedReference, paper_id


@dataclass(frozen=True)
class AuthorMilestoneStats:
    author: str
    milestone_count: int
    milestones: tuple[str, ...]


def consensus_authors(parsed_refs: Iterable[ParsedReference]) -> dict[str, tuple[str, ...]]:
    """Modal author-key tuple per identified paper.

    Ties break toward the lexicographically smallest tuple so the outcome
    is independent of reference order.
    """
    votes: dict[str, Counter] = {}
    for ref in parsed_refs:
        pid = paper_id(ref)
        if pid is None or not ref.authors:
            continue
        votes.setdefault(pid, Counter())[ref.authors] += 1
    out = {}
    for pid, counter in votes.items():
        best = min(counter.items(), key=lambda kv: (-kv[1], kv[0]))
        out[pid] = best[0]
    return out


def author_milestone_counts(
    milestones: Sequence[str],
    parsed_refs: Iterable[ParsedReference],
) -> tuple[list[AuthorMilestoneStats], list[str]]:
    """Count how many of the given milestones each author key appears on.

    Returns the per-author records (milestone count descending, author key
    ascending) plus a diagnostics list of milestones whose references never
    yielded a parsed author; those count toward no one.
    """
    by_paper = consensus_authors(parsed_refs)
    per_author: dict[str, set[str]] = {}
    unattributed = []
    for pid in milestones:
        authors = by_paper.get(pid, ())
        if not authors:
            unattributed.append(pid)
            continue
        for key in set(authors):
            per_author.setdefault(key, set()).add(pid)
    stats = [AuthorMilestoneStats(author=key,
                                  milestone_count=len(papers),
                                  milestones=tuple(sorted(papers)))
             for key, papers in per_author.items()]
    stats.sort(key=lambda s: (-s.milestone_count, s.author))
    return stats, unattributed


def concentration_curve(
    stats: Sequence[AuthorMilestoneStats],
    min_count: int,
    total_milestones: Optional[int] = None,
) -> tuple[list[AuthorMilestoneStats], list[Fraction]]:
    """Authors with at least ``min_count`` milestones and their joint
    cumulative coverage of the milestone set.

    Coverage is the union of milestone sets, so a milestone co-authored by
    two prolific authors counts once.  ``total_milestones`` defaults to the
    number of distinct milestones across all stats.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    ordered = sorted(stats, key=lambda s: (-s.milestone_count, s.author))
    selected = [s for s in ordered if s.milestone_count >= min_count]
    if total_milestones is None:
        universe = set()
        for s in stats:
            universe.update(s.milestones)
        total_milestones = len(universe)
    covered: set[str] = set()
    shares = []
    for s in selected:
        covered.update(s.milestones)
        shares.append(Fraction(len(covered), total_milestones) if total_milestones else Fraction(0))
    return selected, shares

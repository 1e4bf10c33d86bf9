"""Small builders for handcrafted corpora in tests."""

from citescope.corpus import Article, Corpus


def acm_ref(authors, year, title, venue="Journal of Examples 1, 1, 10-20"):
    """authors: list of 'First Last' strings."""
    if len(authors) == 1:
        joined = authors[0]
    elif len(authors) == 2:
        joined = f"{authors[0]} and {authors[1]}"
    else:
        joined = ", ".join(authors[:-1]) + f", and {authors[-1]}"
    return f"{joined}. {year}. {title}. {venue}."


def apa_ref(authors, year, title, venue="Journal of Examples, 1(1), 10-20"):
    keys = [f"{a.split()[-1]}, {a.split()[0][0]}." for a in authors]
    if len(keys) == 1:
        joined = keys[0]
    elif len(keys) == 2:
        joined = f"{keys[0]}, & {keys[1]}"
    else:
        joined = ", ".join(keys[:-1]) + f", & {keys[-1]}"
    return f"{joined} ({year}). {title}. {venue}."


def article(year, refs=(), title=None, authors=("Ann Example",)):
    return Article(venue_year=year,
                   title=title or f"A paper from {year}",
                   authors=tuple(authors),
                   references=tuple(refs))


def corpus_of(*articles):
    return Corpus(tuple(articles))

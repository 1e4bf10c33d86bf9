import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import acm_ref, apa_ref, article, corpus_of  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden_rows():
    rows = []
    with open(DATA_DIR / "golden_references.tsv", encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            raw, year, title_norm, keys = line.rstrip("\n").split("\t")
            rows.append((raw, int(year), title_norm,
                         tuple(keys.split("|")) if keys else ()))
    return rows


@pytest.fixture
def tiny_corpus():
    """Two proceedings years with hand-countable citations."""
    braun = acm_ref(["Virginia Braun", "Victoria Clarke"], 2006,
                    "Using thematic analysis in psychology",
                    "Qualitative Research in Psychology 3, 2, 77-101")
    hart = apa_ref(["Sandra Hart", "Lowell Staveland"], 1988,
                   "Development of NASA-TLX")
    return corpus_of(
        article(2007, [braun, hart], title="First citing paper"),
        article(2008, [braun, braun, hart], title="Second citing paper"),
        article(2008, [braun], title="Third citing paper"),
    )


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
        print(f"\n[acceptance] {name}: {outcome}", flush=True)

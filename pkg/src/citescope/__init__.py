"""citescope: milestone analytics for conference proceedings corpora.

Pipeline stages: ingest raw proceedings exports, parse reference strings
into canonical paper and author identities, build citation curves and
series, compute growth-adjusted forgetting curves, score milestones with
the milestone coefficient, cluster milestone types, and measure author
concentration.  A seeded synthetic corpus generator provides ground truth
for all of it.
"""

__version__ = "0.1.0"

import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from mgs.surface import closed_surface_triangulation, flip, load_triangulation

ACCEPTANCE_LINES: list[str] = []

# property tests draw the same examples on every run
settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")


def random_triangulation(genus: int, punctures: int, seed: int, max_flips: int = 80):
    """Standard triangulation of the closed surface scrambled by random flips."""
    rng = random.Random(seed)
    t = closed_surface_triangulation(genus, punctures)
    for _ in range(rng.randint(5, max_flips)):
        t = flip(t, rng.choice(t.arc_ids))
    return t


# (label, builder) pairs for the construction suite; the coverage test checks
# that radial punctures and two levels of nested monogons really occur
SUITE_SPECS = [
    ("sphere4-s0", (0, 4, 0)),
    ("sphere4-s1", (0, 4, 1)),
    ("sphere4-s2", (0, 4, 2)),
    ("sphere5-s0", (0, 5, 0)),
    ("sphere5-s1", (0, 5, 1)),
    ("sphere5-s41", (0, 5, 41)),
    ("sphere6-s15", (0, 6, 15)),
    ("sphere6-s40", (0, 6, 40)),
    ("sphere7-s22", (0, 7, 22)),
    ("sphere7-s30", (0, 7, 30)),
    ("torus2-s0", (1, 2, 0)),
    ("torus2-s1", (1, 2, 1)),
    ("torus2-s2", (1, 2, 2)),
    ("torus4-file", "torus_4"),
    ("torus4-s13", (1, 4, 13)),
    ("torus4-s53", (1, 4, 53)),
    ("torus10-file", "torus_10"),
    ("genus2-2-s0", (2, 2, 0)),
    ("genus2-2-s1", (2, 2, 1)),
    ("genus2-10-file", "genus2_10"),
    ("genus2-10-s1", (2, 10, 1)),
    ("genus2-10-s45", (2, 10, 45)),
]


def build_suite_member(spec):
    if isinstance(spec, str):
        return load_triangulation(spec)
    return random_triangulation(*spec)


@pytest.fixture(scope="session")
def x7_searches():
    """Exhaustive length-20 searches on both X7 members (slow, computed once)."""
    from mgs.search import X7_MAX_LEN, enumerate_class, search_mgs
    from mgs.seeds import seed

    members = enumerate_class(seed("x7"))
    return [(q, search_mgs(q, X7_MAX_LEN, dedup="symmetric")) for q in members]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

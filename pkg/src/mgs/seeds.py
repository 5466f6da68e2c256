"""Seed quivers for the mutation classes handled by the search tools.

The exceptional seeds follow the standard pictures of finite mutation type
quivers (Felikson, Shapiro and Tumarkin; Derksen and Owen):

* E6, E7, E8 and their affine versions are orientations of star-shaped
  Dynkin diagrams, given by their arm lengths.
* The elliptic types E_n^(1,1) take the affine star, double its centre into
  a double arrow c1 => c2, and put each arm's first vertex a in an oriented
  triangle c2 -> a -> c1.
* X7 has a centre with three "wings" c -> a => b -> c; X6 has two wings and
  one pendant vertex.
"""

from __future__ import annotations

from typing import Callable

from .quiver import IceQuiver

__all__ = ["SEEDS", "seed", "seed_names", "star", "elliptic", "oriented_cycle_seed", "UnknownSeed"]


class UnknownSeed(KeyError):
    pass


def star(arms: tuple[int, ...]) -> IceQuiver:
    """Star-shaped tree: centre 1, arms oriented away from the centre."""
    edges = []
    nxt = 2
    for length in arms:
        prev = 1
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return IceQuiver.from_edges(nxt - 1, edges)


def elliptic(arms: tuple[int, ...]) -> IceQuiver:
    """Doubled-centre seed of the elliptic type whose affine star has these arms."""
    c1, c2 = 1, 2
    edges = [(c1, c2, 2)]
    nxt = 3
    for length in arms:
        a = nxt
        edges += [(c2, a), (a, c1)]
        prev = a
        nxt += 1
        for _ in range(length - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return IceQuiver.from_edges(nxt - 1, edges)


def _wings(k: int, pendant: bool) -> IceQuiver:
    edges = []
    nxt = 2
    for _ in range(k):
        a, b = nxt, nxt + 1
        edges += [(1, a), (a, b, 2), (b, 1)]
        nxt += 2
    if pendant:
        edges.append((1, nxt))
        nxt += 1
    return IceQuiver.from_edges(nxt - 1, edges)


def oriented_cycle_seed(n: int) -> IceQuiver:
    return IceQuiver.from_edges(n, [(i, i - 1) for i in range(2, n + 1)] + [(1, n)])


SEEDS: dict[str, Callable[[], IceQuiver]] = {
    "a2": lambda: IceQuiver.from_edges(2, [(1, 2)]),
    "a3": lambda: IceQuiver.from_edges(3, [(1, 2), (2, 3)]),
    "e6": lambda: star((1, 2, 2)),
    "e7": lambda: star((1, 2, 3)),
    "e8": lambda: star((1, 2, 4)),
    "e6~": lambda: star((2, 2, 2)),
    "e7~": lambda: star((1, 3, 3)),
    "e8~": lambda: star((1, 2, 5)),
    "e6^(1,1)": lambda: elliptic((2, 2, 2)),
    "e7^(1,1)": lambda: elliptic((1, 3, 3)),
    "e8^(1,1)": lambda: elliptic((1, 2, 5)),
    "x6": lambda: _wings(2, pendant=True),
    "x7": lambda: _wings(3, pendant=False),
}

ALIASES = {
    "e6t": "e6~", "e7t": "e7~", "e8t": "e8~",
    "e6-affine": "e6~", "e7-affine": "e7~", "e8-affine": "e8~",
    "e6_11": "e6^(1,1)", "e7_11": "e7^(1,1)", "e8_11": "e8^(1,1)",
    "e6-elliptic": "e6^(1,1)", "e7-elliptic": "e7^(1,1)", "e8-elliptic": "e8^(1,1)",
}

EXCEPTIONAL = ("e6", "e7", "e8", "e6~", "e7~", "e8~", "e6^(1,1)", "e7^(1,1)", "e8^(1,1)", "x6", "x7")


def seed_names() -> list[str]:
    return list(SEEDS)


def seed(name: str) -> IceQuiver:
    key = name.lower()
    key = ALIASES.get(key, key)
    if key in SEEDS:
        return SEEDS[key]()
    if key.startswith("c") and key[1:].isdigit() and int(key[1:]) >= 3:
        return oriented_cycle_seed(int(key[1:]))
    raise UnknownSeed(name)


def canonical_name(name: str) -> str:
    key = name.lower()
    return ALIASES.get(key, key)

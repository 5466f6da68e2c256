"""Mutation classes, maximal green sequence search and exceptional catalogs.

States of the search are framed exchange matrices ``[B | C]`` of shape
``n x 2n`` held in numpy arrays, one row per mutable vertex.  The left block is
the mutable part and the right block holds the arrows to the frozen
vertices, so row ``k`` is green exactly when its right block is nonnegative.

Two kinds of duplicate detection are offered by the breadth-first search:

``"labeled"``
    two states are merged only when the matrices are equal.
``"symmetric"``
    states are merged when one is obtained from the other by renaming the
    mutable vertices (frozen vertices fixed), or by an automorphism of the
    initial quiver applied to mutable and frozen vertices together.  Both
    moves commute with mutation and preserve green/red, so a state has an
    MGS continuation of length ``l`` iff every merged state does.  This only
    makes sense for existence questions; the returned sequence is still an
    honest path from the initial state.
"""

from __future__ import annotations

import json
import multiprocessing
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quiver import (
    IceQuiver,
    apply_green_sequence,
    canonical_form,
    framed,
    mutate,
    parse_quiver,
    quiver_from_obj,
    quiver_to_obj,
    serialize_quiver,
)
from .seeds import canonical_name, seed

__all__ = [
    "NotFoundWithin",
    "SearchCapExceeded",
    "ClassSizeCapExceeded",
    "IncompleteCatalog",
    "CatalogEntry",
    "Catalog",
    "automorphisms",
    "search_mgs",
    "find_mgs",
    "enumerate_class",
    "build_catalog",
    "default_max_len",
    "X7_MAX_LEN",
]

X7_MAX_LEN = 20
DEDUP_MODES = ("labeled", "symmetric")
_CHUNK = 100_000
_STORE_LIMIT = 2**31 - 1


@dataclass(frozen=True)
class NotFoundWithin:
    """No maximal green sequence of length at most ``max_len`` exists.

    The search behind it was exhaustive up to that length; it says nothing
    about longer sequences.
    """

    max_len: int
    states_explored: int
    dedup: str = "labeled"

    def __bool__(self) -> bool:
        return False


class SearchCapExceeded(RuntimeError):
    def __init__(self, cap: int, depth: int):
        super().__init__(f"state cap {cap} exceeded while expanding depth {depth}")
        self.cap = cap
        self.depth = depth


class ClassSizeCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"mutation class has more than {cap} members")
        self.cap = cap


class IncompleteCatalog(RuntimeError):
    def __init__(self, seed_name: str, missing: list[IceQuiver], max_len: int):
        super().__init__(
            f"{len(missing)} member(s) of {seed_name} have no certificate within length {max_len}; "
            "try a larger --max-len"
        )
        self.seed_name = seed_name
        self.missing = missing
        self.max_len = max_len


# --- state arrays ------------------------------------------------------------


def _initial_state(q: IceQuiver) -> np.ndarray:
    if q.n_frozen:
        raise ValueError("expected an unframed quiver (no frozen vertices)")
    n = q.n_mutable
    b = np.array(q.matrix(), dtype=np.int64).reshape(n, n)
    return np.concatenate([b, np.eye(n, dtype=np.int64)], axis=1)[None]


def _mutate_batch(states: np.ndarray, k: int) -> np.ndarray:
    bik = states[:, :, k]
    bkj = states[:, k, :]
    out = states + (np.abs(bik)[:, :, None] * bkj[:, None, :] + bik[:, :, None] * np.abs(bkj)[:, None, :]) // 2
    out[:, k, :] = -bkj
    out[:, :, k] = -bik
    return out


def _green_mask(states: np.ndarray, n: int) -> np.ndarray:
    return (states[:, :, n:] >= 0).all(axis=2)


def _pinned_mask(states: np.ndarray, n: int) -> np.ndarray:
    """Vertices flagged by ``permanently_red_vertices``, as a boolean (K, n) mask."""
    c = states[:, :, n:]
    lone = (c != 0).sum(axis=1) == 1  # frozen column with a single arrow
    hit = lone[:, None, :] & (c == -1)
    return hit.any(axis=2)


def _pack(rows: np.ndarray) -> list[bytes]:
    """Exact byte keys; the leading byte records the integer width, chosen per row."""
    out: list[bytes] = [b""] * len(rows)
    big = np.abs(rows).max(axis=1) if rows.shape[1] else np.zeros(len(rows), dtype=np.int64)
    lower = -1
    for dtype, limit, tag in ((np.int8, 127, b"\x01"), (np.int16, 32767, b"\x02"), (np.int64, None, b"\x08")):
        sel = np.nonzero(big > lower) if limit is None else np.nonzero((big > lower) & (big <= limit))
        if len(sel[0]):
            packed = rows[sel].astype(dtype)
            for i, r in zip(sel[0], packed):
                out[i] = tag + r.tobytes()
        lower = limit if limit is not None else lower
    return out


def _symmetric_rows(states: np.ndarray, n: int, perms: Sequence[np.ndarray]) -> np.ndarray:
    """Least row-sorted form of each state over the given automorphisms."""
    best = None
    idx = np.arange(len(states))
    for inv in perms:
        cols = np.concatenate([inv, n + inv])
        t = states[:, inv][:, :, cols]
        # c-vectors of a seed are distinct, so sorting rows by them is a canonical relabelling
        order = np.tile(np.arange(n), (len(t), 1))
        for c in range(2 * n - 1, n - 1, -1):
            col = np.take_along_axis(t[:, :, c], order, 1)
            order = np.take_along_axis(order, np.argsort(col, axis=1, kind="stable"), 1)
        t = np.take_along_axis(t, order[:, :, None], 1)
        b = np.take_along_axis(t[:, :, :n], order[:, None, :], 2)
        rows = np.concatenate([t[:, :, n:].reshape(len(t), -1), b.reshape(len(t), -1)], axis=1)
        if best is None:
            best = rows
            continue
        diff = rows != best
        first = diff.argmax(axis=1)
        less = diff.any(axis=1) & (rows[idx, first] < best[idx, first])
        best[less] = rows[less]
    return best


def automorphisms(q: IceQuiver) -> list[tuple[int, ...]]:
    """All permutations ``p`` with ``relabel(q, p) == q``, found by backtracking."""
    n = q.n_mutable
    b = q.matrix()
    profile = [tuple(sorted(b[i][:n])) for i in range(n)]
    out: list[tuple[int, ...]] = []
    image = [0] * n
    used = [False] * n

    def extend(i: int) -> None:
        if i == n:
            out.append(tuple(x + 1 for x in image))
            return
        for v in range(n):
            if used[v] or profile[v] != profile[i]:
                continue
            if any(b[i][j] != b[v][image[j]] for j in range(i)):
                continue
            used[v] = True
            image[i] = v
            extend(i + 1)
            used[v] = False

    extend(0)
    return out


class _Keyer:
    def __init__(self, q: IceQuiver, dedup: str):
        if dedup not in DEDUP_MODES:
            raise ValueError(f"dedup must be one of {DEDUP_MODES}, got {dedup!r}")
        self.n = q.n_mutable
        self.dedup = dedup
        if dedup == "symmetric":
            # a state relabelled by p has row p[i] equal to the old row i, so index by the inverse
            self.perms = [np.argsort(np.array(p) - 1) for p in automorphisms(q)]

    def __call__(self, states: np.ndarray) -> list[bytes]:
        if self.dedup == "labeled":
            return _pack(states.reshape(len(states), -1))
        return _pack(_symmetric_rows(states, self.n, self.perms))


# --- breadth-first search ---------------------------------------------------


def search_mgs(
    q: IceQuiver,
    max_len: int,
    *,
    dedup: str = "labeled",
    prune: bool = True,
    state_cap: int | None = None,
) -> tuple[int, ...] | NotFoundWithin:
    """Shortest, lexicographically least maximal green sequence of length <= ``max_len``.

    Breadth-first over green mutations of ``framed(q)``.  Frontiers are kept in
    lexicographic order of the paths that reached them and a state keeps the
    first path that found it, so the first terminal state met is reached by the
    lexicographically least shortest sequence.  With ``prune`` the vertices
    flagged by ``permanently_red_vertices`` are never expanded.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    n = q.n_mutable
    states = _initial_state(q)
    if n == 0:
        return ()
    keyer = _Keyer(q, dedup)
    seen = set(keyer(states))
    parents: list[np.ndarray] = []
    moves: list[np.ndarray] = []
    explored = 1
    for depth in range(max_len):
        mask = _green_mask(states, n)
        if prune:
            mask &= ~_pinned_mask(states, n)
        par, ks = np.nonzero(mask)
        if len(par) == 0:
            break
        keep_par: list[np.ndarray] = []
        keep_k: list[np.ndarray] = []
        keep_states: list[np.ndarray] = []
        for lo in range(0, len(par), _CHUNK):
            p, k = par[lo:lo + _CHUNK], ks[lo:lo + _CHUNK]
            kids = np.empty((len(p), n, 2 * n), dtype=np.int64)
            for v in np.unique(k):
                sel = k == v
                kids[sel] = _mutate_batch(states[p[sel]].astype(np.int64), int(v))
            done = ~_green_mask(kids, n).any(axis=1)
            if done.any():
                j = int(np.argmax(done))
                parents.append(np.array([p[j]]))
                moves.append(np.array([k[j]]))
                seq = _trace_back(parents, moves)
                if not apply_green_sequence(framed(q), seq).is_maximal_green:
                    raise AssertionError(f"search produced a sequence that does not verify: {seq}")
                return seq
            fresh = []
            for i, key in enumerate(keyer(kids)):
                if key not in seen:
                    seen.add(key)
                    fresh.append(i)
            fresh_idx = np.array(fresh, dtype=np.int64)
            keep_par.append(p[fresh_idx])
            keep_k.append(k[fresh_idx])
            fresh_states = kids[fresh_idx]
            if len(fresh_states) and np.abs(fresh_states).max() > _STORE_LIMIT:
                raise OverflowError("exchange matrix entries outgrew the int32 state store")
            keep_states.append(fresh_states.astype(np.int32))
            explored += len(fresh)
            if state_cap is not None and explored > state_cap:
                raise SearchCapExceeded(state_cap, depth + 1)
        states = np.concatenate(keep_states)
        parents.append(np.concatenate(keep_par))
        moves.append(np.concatenate(keep_k))
        if not len(states):
            break
    return NotFoundWithin(max_len, explored, dedup)


def _trace_back(parents: list[np.ndarray], moves: list[np.ndarray]) -> tuple[int, ...]:
    seq = []
    i = 0
    for d in range(len(parents) - 1, -1, -1):
        seq.append(int(moves[d][i]) + 1)
        i = int(parents[d][i])
    return tuple(reversed(seq))


# --- heuristic depth-first search -------------------------------------------


def _flat(q: IceQuiver) -> tuple[int, ...]:
    n = q.n_mutable
    w = 2 * n
    b = q.matrix()
    m = [0] * (n * w)
    for i in range(n):
        m[i * w:i * w + n] = b[i][:n]
        m[i * w + n + i] = 1
    return tuple(m)


def _flat_mutate(m: tuple[int, ...], n: int, k: int) -> tuple[int, ...]:
    w = 2 * n
    out = list(m)
    rk = k * w
    rowk = m[rk:rk + w]
    for i in range(n):
        if i == k:
            continue
        bik = m[i * w + k]
        if bik == 0:
            continue
        base = i * w
        if bik > 0:
            for j in range(w):
                if rowk[j] > 0:
                    out[base + j] += bik * rowk[j]
        else:
            for j in range(w):
                if rowk[j] < 0:
                    out[base + j] -= bik * rowk[j]
        out[base + k] = -bik
    for j in range(w):
        out[rk + j] = -rowk[j]
    return tuple(out)


def _flat_green(m: tuple[int, ...], n: int) -> list[int]:
    w = 2 * n
    return [k for k in range(n) if min(m[k * w + n:k * w + w]) >= 0]


class _Budget(Exception):
    pass


def _dfs(q: IceQuiver, max_len: int, node_limit: int, rng: random.Random | None) -> tuple[int, ...] | None:
    n = q.n_mutable
    w = 2 * n
    best_depth: dict[tuple[int, ...], int] = {}
    path: list[int] = []
    nodes = 0

    def weight(m: tuple[int, ...], green: set[int], k: int) -> int:
        return sum(m[j * w + k] for j in green if m[j * w + k] > 0)

    def rec(m: tuple[int, ...], depth: int) -> bool:
        nonlocal nodes
        green = _flat_green(m, n)
        if not green:
            return True
        if depth == max_len:
            return False
        nodes += 1
        if nodes > node_limit:
            raise _Budget
        gs = set(green)
        if rng is None:
            order = sorted(green, key=lambda k: (weight(m, gs, k), k))
        else:
            order = sorted(green, key=lambda k: (weight(m, gs, k), rng.random()))
        for k in order:
            child = _flat_mutate(m, n, k)
            # keep c-vectors small: a new entry beyond +-1 is where long detours start
            if max(abs(x) for x in child[k * w + n:k * w + w]) > 1:
                continue
            if best_depth.get(child, max_len + 1) <= depth + 1:
                continue
            best_depth[child] = depth + 1
            path.append(k + 1)
            if rec(child, depth + 1):
                return True
            path.pop()
        return False

    try:
        found = rec(_flat(q), 0)
    except _Budget:
        return None
    return tuple(path) if found else None


def find_mgs(
    q: IceQuiver,
    max_len: int,
    *,
    node_limit: int = 3000,
    restarts: int = 200,
    seed_value: int = 0,
) -> tuple[int, ...] | None:
    """Fast heuristic MGS finder; ``None`` means it gave up, not that none exists.

    Depth-first over green mutations, cheapest vertex first (fewest arrows
    arriving from other green vertices), with c-vector entries held to +-1.
    A deterministic pass is followed by seeded restarts with random tie-breaks.
    """
    if q.n_mutable == 0:
        return ()
    rng = random.Random(seed_value)
    for attempt in range(restarts + 1):
        seq = _dfs(q, max_len, node_limit, None if attempt == 0 else rng)
        if seq is not None:
            if not apply_green_sequence(framed(q), seq).is_maximal_green:
                raise AssertionError(f"heuristic produced a sequence that does not verify: {seq}")
            return seq
    return None


# --- mutation classes -------------------------------------------------------


def _sort_key(q: IceQuiver) -> tuple:
    return (q.n_mutable, q.arrows)


def enumerate_class(q: IceQuiver, cap: int = 20000) -> list[IceQuiver]:
    """Canonical representatives of the mutation class of ``q``, sorted."""
    if q.n_frozen:
        raise ValueError("enumerate_class expects a quiver without frozen vertices")
    start = canonical_form(q)[0]
    seen = {start}
    queue = [start]
    while queue:
        nxt = []
        for cur in queue:
            for k in range(1, cur.n_mutable + 1):
                child = canonical_form(mutate(cur, k))[0]
                if child not in seen:
                    seen.add(child)
                    if len(seen) > cap:
                        raise ClassSizeCapExceeded(cap)
                    nxt.append(child)
        queue = nxt
    return sorted(seen, key=_sort_key)


# --- catalogs -----------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    quiver: IceQuiver
    mgs: tuple[int, ...] | None
    searched_to: int
    states_explored: int | None = None


@dataclass
class Catalog:
    seed: str
    members: list[CatalogEntry] = field(default_factory=list)

    @property
    def class_size(self) -> int:
        return len(self.members)

    @property
    def certified(self) -> int:
        return sum(1 for e in self.members if e.mgs is not None)

    def to_obj(self) -> dict:
        members = []
        for e in self.members:
            item = {"quiver": quiver_to_obj(e.quiver), "mgs": list(e.mgs) if e.mgs is not None else None,
                    "searched_to": e.searched_to}
            if e.states_explored is not None:
                item["states_explored"] = e.states_explored
            members.append(item)
        return {"format": "catalog-v1", "seed": self.seed, "class_size": self.class_size, "members": members}

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), separators=(",", ":")) + "\n"

    @classmethod
    def from_obj(cls, obj: dict) -> "Catalog":
        if obj.get("format") != "catalog-v1":
            raise ValueError(f"expected catalog-v1, got {obj.get('format')!r}")
        members = [
            CatalogEntry(
                quiver_from_obj(m["quiver"]),
                tuple(m["mgs"]) if m["mgs"] is not None else None,
                m["searched_to"],
                m.get("states_explored"),
            )
            for m in obj["members"]
        ]
        cat = cls(obj["seed"], members)
        if cat.class_size != obj["class_size"]:
            raise ValueError("class_size does not match the member list")
        return cat

    def verify(self) -> list[str]:
        """Re-check every certificate; returns the problems found."""
        bad = []
        for i, e in enumerate(self.members):
            if e.mgs is not None and not apply_green_sequence(framed(e.quiver), e.mgs).is_maximal_green:
                bad.append(f"member {i}: certificate is not a maximal green sequence")
        return bad


def default_max_len(name: str, n: int) -> int:
    return X7_MAX_LEN if canonical_name(name) == "x7" else 4 * n


def _certify(job: tuple[str, int, bool]) -> CatalogEntry:
    text, max_len, exhaustive = job
    q = parse_quiver(text)
    seq = find_mgs(q, max_len)
    if seq is not None:
        return CatalogEntry(q, seq, max_len)
    if not exhaustive:
        return CatalogEntry(q, None, max_len)
    res = search_mgs(q, max_len, dedup="symmetric")
    if isinstance(res, NotFoundWithin):
        return CatalogEntry(q, None, max_len, res.states_explored)
    return CatalogEntry(q, res, max_len)


def build_catalog(
    name: str,
    max_len: int | None = None,
    *,
    jobs: int = 1,
    cap: int = 20000,
    progress: Callable[[int, int], None] | None = None,
) -> Catalog:
    """Enumerate the class of a named seed and certify every member.

    Each member first gets the heuristic finder.  X7 members it cannot
    certify get an exhaustive search to ``max_len``, whose outcome is recorded
    as a bounded failure.  Any other member left without a certificate makes
    the catalog incomplete.
    """
    key = canonical_name(name)
    q0 = seed(key)
    if max_len is None:
        max_len = default_max_len(key, q0.n_mutable)
    reps = enumerate_class(q0, cap=cap)
    exhaustive = key == "x7"
    work = [(serialize_quiver(r), max_len, exhaustive) for r in reps]
    entries: list[CatalogEntry] = []
    if jobs > 1:
        with multiprocessing.get_context("spawn").Pool(jobs) as pool:
            for i, e in enumerate(pool.imap(_certify, work, chunksize=8)):
                entries.append(e)
                if progress:
                    progress(i + 1, len(work))
    else:
        for i, job in enumerate(work):
            entries.append(_certify(job))
            if progress:
                progress(i + 1, len(work))
    cat = Catalog(key, entries)
    problems = cat.verify()
    if problems:
        raise AssertionError("; ".join(problems))
    missing = [e.quiver for e in entries if e.mgs is None]
    if missing and not exhaustive:
        raise IncompleteCatalog(key, missing, max_len)
    return cat

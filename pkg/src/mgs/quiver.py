"""Ice quivers, mutation, framing and green/red bookkeeping.

Vertices are integers.  Mutable vertices are ``1..n`` and frozen vertices are
``n+1..n+m``.  Arrows are stored consolidated as ``(source, target,
multiplicity)`` triples, at most one per ordered pair, sorted ascending.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "QuiverError",
    "FrozenVertexMutation",
    "AlreadyFramed",
    "SignIncoherent",
    "FormatError",
    "InvariantViolation",
    "MultiplicityOverflow",
    "VertexState",
    "IceQuiver",
    "GreenSequenceTrace",
    "mutate",
    "mutate_sequence",
    "framed",
    "vertex_state",
    "vertex_states",
    "apply_green_sequence",
    "permanently_red_vertices",
    "relabel",
    "canonical_form",
    "induced_subquiver",
    "parse_quiver",
    "serialize_quiver",
    "MAX_MULTIPLICITY",
]

# Multiplicities are kept within signed 64-bit range; anything larger is a caller bug.
MAX_MULTIPLICITY = 2**63 - 1


class QuiverError(Exception):
    """Base class for quiver errors."""


class FrozenVertexMutation(QuiverError, ValueError):
    pass


class AlreadyFramed(QuiverError, ValueError):
    pass


class SignIncoherent(QuiverError):
    pass


class FormatError(QuiverError, ValueError):
    pass


class InvariantViolation(QuiverError, ValueError):
    pass


class MultiplicityOverflow(QuiverError, OverflowError):
    pass


class VertexState(enum.Enum):
    GREEN = "Green"
    RED = "Red"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class IceQuiver:
    """An ice quiver with consolidated, sorted arrow triples.

    Construction validates the invariants (no loops, no 2-cycles, no arrows
    between frozen vertices, positive multiplicities, vertices in range) and
    raises :class:`InvariantViolation` otherwise.
    """

    n_mutable: int
    n_frozen: int = 0
    arrows: tuple[tuple[int, int, int], ...] = ()
    _out: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.n_mutable < 0 or self.n_frozen < 0:
            raise InvariantViolation("vertex counts must be non-negative")
        total = self.n_mutable + self.n_frozen
        seen: set[tuple[int, int]] = set()
        triples = []
        for arrow in self.arrows:
            if len(arrow) != 3:
                raise InvariantViolation(f"arrow {arrow!r} is not a (src, dst, mult) triple")
            s, t, m = (int(x) for x in arrow)
            if not (1 <= s <= total and 1 <= t <= total):
                raise InvariantViolation(f"arrow ({s},{t},{m}) has a vertex outside 1..{total}")
            if s == t:
                raise InvariantViolation(f"arrow ({s},{t},{m}) is a loop")
            if m <= 0:
                raise InvariantViolation(f"arrow ({s},{t},{m}) has non-positive multiplicity")
            if m > MAX_MULTIPLICITY:
                raise MultiplicityOverflow(f"arrow ({s},{t},{m}) exceeds the multiplicity limit")
            if s > self.n_mutable and t > self.n_mutable:
                raise InvariantViolation(f"arrow ({s},{t},{m}) joins two frozen vertices")
            if (s, t) in seen:
                raise InvariantViolation(f"duplicate arrow pair ({s},{t})")
            if (t, s) in seen:
                raise InvariantViolation(f"arrows ({t},{s}) and ({s},{t}) form a 2-cycle")
            seen.add((s, t))
            triples.append((s, t, m))
        object.__setattr__(self, "arrows", tuple(sorted(triples)))

    @classmethod
    def from_edges(cls, n_mutable: int, edges: Iterable[Sequence[int]], n_frozen: int = 0) -> "IceQuiver":
        """Build a quiver from ``(s, t)`` or ``(s, t, m)`` items, merging repeats."""
        acc: dict[tuple[int, int], int] = {}
        for e in edges:
            s, t = e[0], e[1]
            m = e[2] if len(e) > 2 else 1
            acc[(s, t)] = acc.get((s, t), 0) + m
        return cls(n_mutable, n_frozen, tuple((s, t, m) for (s, t), m in acc.items()))

    @classmethod
    def from_matrix(cls, b: Sequence[Sequence[int]], n_mutable: int | None = None) -> "IceQuiver":
        """Build a quiver from a skew-symmetric matrix (0-based rows)."""
        size = len(b)
        n = size if n_mutable is None else n_mutable
        arrows = []
        for i in range(size):
            for j in range(size):
                if b[i][j] > 0:
                    arrows.append((i + 1, j + 1, int(b[i][j])))
        return cls(n, size - n, tuple(arrows))

    @property
    def n_vertices(self) -> int:
        return self.n_mutable + self.n_frozen

    def is_frozen(self, v: int) -> bool:
        return v > self.n_mutable

    def out_map(self) -> dict[int, dict[int, int]]:
        """Adjacency ``{src: {dst: mult}}``; cached, treat as read-only."""
        if self._out is None:
            out: dict[int, dict[int, int]] = {}
            for s, t, m in self.arrows:
                out.setdefault(s, {})[t] = m
            object.__setattr__(self, "_out", out)
        return self._out

    def multiplicity(self, s: int, t: int) -> int:
        return self.out_map().get(s, {}).get(t, 0)

    def b(self, i: int, j: int) -> int:
        """Signed arrow count from ``i`` to ``j``."""
        return self.multiplicity(i, j) - self.multiplicity(j, i)

    def matrix(self) -> list[list[int]]:
        """Skew-symmetric exchange matrix, 0-based, over all vertices."""
        size = self.n_vertices
        b = [[0] * size for _ in range(size)]
        for s, t, m in self.arrows:
            b[s - 1][t - 1] = m
            b[t - 1][s - 1] = -m
        return b

    def mutable_part(self) -> "IceQuiver":
        n = self.n_mutable
        return IceQuiver(n, 0, tuple(a for a in self.arrows if a[0] <= n and a[1] <= n))

    def arrow_count(self) -> int:
        return sum(m for _, _, m in self.arrows)


def _check_mutable(q: IceQuiver, k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool):
        raise TypeError(f"vertex id must be an int, got {k!r}")
    if not 1 <= k <= q.n_mutable:
        if 1 <= k <= q.n_vertices:
            raise FrozenVertexMutation(f"vertex {k} is frozen")
        raise FrozenVertexMutation(f"vertex {k} is not a mutable vertex of a quiver with {q.n_mutable} mutable vertices")


def mutate(q: IceQuiver, k: int) -> IceQuiver:
    """Mutate ``q`` at the mutable vertex ``k`` and return the new quiver."""
    _check_mutable(q, k)
    n = q.n_mutable
    # signed weights keyed by ordered pair (a, b) with a < b: value = #(a->b) - #(b->a)
    w: dict[tuple[int, int], int] = {}
    ins: list[tuple[int, int]] = []
    outs: list[tuple[int, int]] = []
    for s, t, m in q.arrows:
        if t == k:
            ins.append((s, m))
        elif s == k:
            outs.append((t, m))
        if s < t:
            w[(s, t)] = m
        else:
            w[(t, s)] = -m
    for i, mi in ins:
        for j, mj in outs:
            if i > n and j > n:
                continue
            p = mi * mj
            if i < j:
                w[(i, j)] = w.get((i, j), 0) + p
            else:
                w[(j, i)] = w.get((j, i), 0) - p
    arrows = []
    for (a, b_), val in w.items():
        if a == k or b_ == k:
            val = -val
        if val > 0:
            if val > MAX_MULTIPLICITY:
                raise MultiplicityOverflow(f"multiplicity {val} on ({a},{b_}) overflows")
            arrows.append((a, b_, val))
        elif val < 0:
            if -val > MAX_MULTIPLICITY:
                raise MultiplicityOverflow(f"multiplicity {-val} on ({b_},{a}) overflows")
            arrows.append((b_, a, -val))
    return IceQuiver(q.n_mutable, q.n_frozen, tuple(arrows))


def mutate_sequence(q: IceQuiver, seq: Iterable[int]) -> IceQuiver:
    for k in seq:
        q = mutate(q, k)
    return q


def framed(q: IceQuiver) -> IceQuiver:
    """Attach a frozen copy ``n+i`` to every vertex ``i`` with an arrow ``i -> n+i``."""
    if q.n_frozen:
        raise AlreadyFramed(f"quiver already has {q.n_frozen} frozen vertices")
    n = q.n_mutable
    return IceQuiver(n, n, q.arrows + tuple((i, n + i, 1) for i in range(1, n + 1)))


def _frozen_flow(q: IceQuiver, i: int) -> tuple[bool, bool]:
    """(has arrow frozen->i, has arrow i->frozen)."""
    n = q.n_mutable
    incoming = outgoing = False
    for s, t, _ in q.arrows:
        if t == i and s > n:
            incoming = True
        elif s == i and t > n:
            outgoing = True
    return incoming, outgoing


def vertex_state(q: IceQuiver, i: int) -> VertexState:
    """Green if no frozen vertex points at ``i``, red if ``i`` points at no frozen vertex."""
    _check_mutable(q, i)
    incoming, outgoing = _frozen_flow(q, i)
    if incoming and outgoing:
        raise SignIncoherent(f"vertex {i} has arrows both to and from frozen vertices")
    if not incoming and not outgoing:
        raise SignIncoherent(f"vertex {i} has no arrows to or from frozen vertices")
    return VertexState.RED if incoming else VertexState.GREEN


def vertex_states(q: IceQuiver) -> tuple[VertexState, ...]:
    n = q.n_mutable
    inc = [False] * (n + 1)
    out = [False] * (n + 1)
    for s, t, _ in q.arrows:
        if s > n and t <= n:
            inc[t] = True
        elif t > n and s <= n:
            out[s] = True
    states = []
    for i in range(1, n + 1):
        if inc[i] == out[i]:
            raise SignIncoherent(f"vertex {i} is neither strictly green nor strictly red")
        states.append(VertexState.RED if inc[i] else VertexState.GREEN)
    return tuple(states)


@dataclass(frozen=True)
class GreenSequenceTrace:
    """Result of replaying a mutation sequence on a framed quiver.

    ``verdict`` is ``"ValidMaximalGreen"``, ``"ValidGreen"`` or
    ``"InvalidAtStep k"`` (1-based step of the first non-green mutation).
    ``snapshots[s]`` holds the vertex states before step ``s+1``;
    the last entry is the final state.
    """

    initial: IceQuiver
    steps: tuple[tuple[int, VertexState], ...]
    final: IceQuiver
    verdict: str
    snapshots: tuple[tuple[VertexState, ...], ...] = ()

    @property
    def sequence(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.steps)

    @property
    def is_green(self) -> bool:
        return self.verdict in ("ValidGreen", "ValidMaximalGreen")

    @property
    def is_maximal_green(self) -> bool:
        return self.verdict == "ValidMaximalGreen"

    @property
    def invalid_step(self) -> int | None:
        if self.verdict.startswith("InvalidAtStep"):
            return int(self.verdict.split()[1])
        return None


def apply_green_sequence(q0: IceQuiver, seq: Sequence[int], snapshots: bool = False) -> GreenSequenceTrace:
    q = q0
    steps = []
    snaps = []
    first_bad = None
    for idx, k in enumerate(seq, start=1):
        _check_mutable(q, k)
        if snapshots:
            snaps.append(vertex_states(q))
        state = vertex_state(q, k)
        steps.append((k, state))
        if state is not VertexState.GREEN and first_bad is None:
            first_bad = idx
        q = mutate(q, k)
    final_states = vertex_states(q)
    if snapshots:
        snaps.append(final_states)
    if first_bad is not None:
        verdict = f"InvalidAtStep {first_bad}"
    elif all(s is VertexState.RED for s in final_states):
        verdict = "ValidMaximalGreen"
    else:
        verdict = "ValidGreen"
    return GreenSequenceTrace(q0, tuple(steps), q, verdict, tuple(snaps))


def permanently_red_vertices(q: IceQuiver) -> frozenset[int]:
    """Mutable vertices pinned red by a frozen vertex whose only arrow is a single arrow into them."""
    n = q.n_mutable
    incident: dict[int, list[tuple[int, int, int]]] = {}
    for a in q.arrows:
        s, t, _ = a
        if s > n:
            incident.setdefault(s, []).append(a)
        if t > n:
            incident.setdefault(t, []).append(a)
    pinned = set()
    for f, arr in incident.items():
        if len(arr) == 1:
            s, t, m = arr[0]
            if s == f and m == 1 and t <= n:
                pinned.add(t)
    return frozenset(pinned)


def induced_subquiver(q: IceQuiver, vertices: Iterable[int]) -> IceQuiver:
    """Induced subquiver on the given mutable vertices, relabelled ``1..k`` in ascending order."""
    keep = sorted(set(vertices))
    pos = {v: i + 1 for i, v in enumerate(keep)}
    arrows = tuple((pos[s], pos[t], m) for s, t, m in q.arrows if s in pos and t in pos)
    return IceQuiver(len(keep), 0, arrows)


# --- isomorphism ---------------------------------------------------------


def relabel(q: IceQuiver, perm: Sequence[int]) -> IceQuiver:
    """Relabel mutable vertex ``i`` as ``perm[i-1]``; frozen partner ``n+i`` follows to ``n+perm[i-1]``.

    Frozen vertices without a partner (``n_frozen > n_mutable``) keep their labels.
    """
    n = q.n_mutable
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError("perm must be a permutation of 1..n")
    paired = min(n, q.n_frozen)

    def image(v: int) -> int:
        if v <= n:
            return perm[v - 1]
        if v - n <= paired:
            return n + perm[v - n - 1]
        return v

    return IceQuiver(n, q.n_frozen, tuple((image(s), image(t), m) for s, t, m in q.arrows))


def _canon_tables(q: IceQuiver):
    n = q.n_mutable
    paired = min(n, q.n_frozen)
    b = q.matrix()

    def partner(j: int) -> int | None:
        return n + j if j < paired else None

    node = []
    for u in range(n):
        pu = partner(u)
        extra = tuple(b[u][n + f] for f in range(paired, q.n_frozen))
        node.append((b[u][pu] if pu is not None else 0, extra))
    edge = [[None] * n for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            pv, pu = partner(v), partner(u)
            edge[u][v] = (
                b[u][v],
                b[u][pv] if pv is not None else 0,
                b[v][pu] if pu is not None else 0,
            )
    return node, edge


_ZERO_EDGE = (0, 0, 0)


def _refine(colors: list[int], edge, n: int) -> list[int]:
    """Colour refinement; colour ids are canonical (derived from sorted signatures)."""
    while True:
        sigs = []
        for u in range(n):
            row = edge[u]
            nb = sorted((row[v], colors[v]) for v in range(n) if v != u and row[v] != _ZERO_EDGE)
            sigs.append((colors[u], tuple(nb)))
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(q: IceQuiver) -> tuple[IceQuiver, tuple[int, ...]]:
    """Canonical relabelling of ``q`` up to permutations of the mutable vertices.

    Returns ``(canonical quiver, perm)`` where ``perm[i-1]`` is the new label
    of vertex ``i``, so ``relabel(q, perm)`` is the canonical quiver.
    Frozen partners move in lockstep with their mutable vertex.
    """
    n = q.n_mutable
    if n == 0:
        return q, ()
    node, edge = _canon_tables(q)
    ranking = {s: r for r, s in enumerate(sorted(set(node)))}
    start = _refine([ranking[s] for s in node], edge, n)

    # vertices u, v are twins when the transposition (u v) is an automorphism
    def twins(u: int, v: int) -> bool:
        if node[u] != node[v] or edge[u][v] != _ZERO_EDGE or edge[v][u] != _ZERO_EDGE:
            return False
        eu, ev = edge[u], edge[v]
        for w in range(n):
            if w != u and w != v and (eu[w] != ev[w] or edge[w][u] != edge[w][v]):
                return False
        return True

    best: list = [None, None]

    def certificate(order: list[int]) -> tuple:
        cert = [node[u] for u in order]
        for a in range(n):
            ua = order[a]
            for c in range(a + 1, n):
                cert.append(edge[ua][order[c]])
        return tuple(cert)

    def search(colors: list[int]) -> None:
        cells: dict[int, list[int]] = {}
        for u, c in enumerate(colors):
            cells.setdefault(c, []).append(u)
        if len(cells) == n:
            order = sorted(range(n), key=lambda u: colors[u])
            cert = certificate(order)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, order
            return
        target = min((c for c, mem in cells.items() if len(mem) > 1), key=lambda c: (len(cells[c]), c))
        tried: list[int] = []
        for u in cells[target]:
            if any(twins(u, t) for t in tried):
                continue
            tried.append(u)
            # individualise u: it keeps colour 2c, the rest of its cell moves to 2c+1
            nc = [2 * c + (1 if (c == target and v != u) else 0) for v, c in enumerate(colors)]
            search(_refine(nc, edge, n))

    search(start)
    order = best[1]
    perm = [0] * n
    for new, old in enumerate(order):
        perm[old] = new + 1
    perm_t = tuple(perm)
    return relabel(q, perm_t), perm_t


# --- serialisation --------------------------------------------------------


def serialize_quiver(q: IceQuiver) -> str:
    """iceq-v1 text: compact JSON, arrows sorted by (src, dst), trailing newline."""
    body = {
        "format": "iceq-v1",
        "mutable": q.n_mutable,
        "frozen": q.n_frozen,
        "arrows": [list(a) for a in q.arrows],
    }
    return json.dumps(body, separators=(",", ":")) + "\n"


def quiver_to_obj(q: IceQuiver) -> dict:
    return json.loads(serialize_quiver(q))


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {where}: expected an integer, got {value!r}")
    return value


def quiver_from_obj(obj) -> IceQuiver:
    if not isinstance(obj, dict):
        raise FormatError("top level: expected a JSON object")
    if obj.get("format") != "iceq-v1":
        raise FormatError(f"field 'format': expected 'iceq-v1', got {obj.get('format')!r}")
    for key in ("mutable", "frozen", "arrows"):
        if key not in obj:
            raise FormatError(f"field {key!r}: missing")
    n = _as_int(obj["mutable"], "'mutable'")
    m = _as_int(obj["frozen"], "'frozen'")
    if n < 0 or m < 0:
        raise FormatError("fields 'mutable'/'frozen' must be non-negative")
    raw = obj["arrows"]
    if not isinstance(raw, list):
        raise FormatError("field 'arrows': expected a list")
    triples = []
    for idx, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 3:
            raise FormatError(f"field 'arrows[{idx}]': expected [src, dst, mult]")
        triples.append(tuple(_as_int(x, f"'arrows[{idx}][{j}]'") for j, x in enumerate(item)))
    return IceQuiver(n, m, tuple(triples))


def parse_quiver(text: str) -> IceQuiver:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return quiver_from_obj(obj)

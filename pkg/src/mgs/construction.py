"""Maximal green sequences for triangulated surfaces.

The closed-surface pipeline partitions the punctures, then for each stratum
makes it independent, runs the cycle sequence around every non-radial
puncture of the stratum and mutates back with a modified reverse.  A final
stage does the same for the distinguished puncture X.  Surfaces with
boundary are closed up first and the resulting sequence is restricted to
the original arcs.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .quiver import (
    GreenSequenceTrace,
    IceQuiver,
    VertexState,
    apply_green_sequence,
    framed,
    mutate,
    vertex_state,
)
from .surface import (
    ExcludedSurface,
    NotABoundedSurface,
    NotADisk,
    TaggedTriangulation,
    Triangle,
    close_surface,
    flip,
    from_ideal,
    iota,
    monogon_interior,
    quiver_of,
    toggle_all_tags,
    validate,
    arcs_around,
)

__all__ = [
    "ConstructionError",
    "NoEligiblePuncture",
    "NoIndependencePath",
    "RadialPuncture",
    "LoopAtPuncture",
    "PuncturePartition",
    "IndependenceData",
    "Stage",
    "ConstructionTrace",
    "choose_X",
    "partition_punctures",
    "independence_data",
    "mu_ind",
    "mu_cycle",
    "mu_ind_star",
    "cycle_lemma_sequence",
    "oriented_cycle",
    "construct_closed",
    "construct_with_boundary",
    "relabel_arcs",
    "toggle_tags_at",
    "final_permutation",
    "restrict_sequence",
]


class ConstructionError(Exception):
    def __init__(self, message: str, stage: str | None = None, step: int | None = None):
        where = f"[{stage}" + (f", step {step}" if step is not None else "") + "] " if stage else ""
        super().__init__(where + message)
        self.stage = stage
        self.step = step


class NoEligiblePuncture(ConstructionError, ValueError):
    pass


class NoIndependencePath(ConstructionError):
    pass


class RadialPuncture(ConstructionError, ValueError):
    pass


class LoopAtPuncture(ConstructionError, ValueError):
    pass


@dataclass(frozen=True)
class PuncturePartition:
    X: str
    S: frozenset[str]
    strata: tuple[frozenset[str], ...]

    def ordered(self, stratum: Iterable[str], order: Sequence[str]) -> list[str]:
        pos = {p: k for k, p in enumerate(order)}
        return sorted(stratum, key=lambda p: pos[p])


@dataclass(frozen=True)
class IndependenceData:
    P_set: frozenset[str]
    E: frozenset[int]
    sigma: dict[int, int]
    order: tuple[int, ...]


@dataclass(frozen=True)
class Stage:
    name: str
    sequence: tuple[int, ...]


@dataclass
class ConstructionTrace:
    stages: list[Stage]
    full: tuple[int, ...]
    verdict: str
    partition: PuncturePartition | None = None
    green: GreenSequenceTrace | None = None
    final: TaggedTriangulation | None = None
    permutation: dict[int, int] = field(default_factory=dict)

    def stage(self, name: str) -> tuple[int, ...]:
        for st in self.stages:
            if st.name == name:
                return st.sequence
        raise KeyError(name)

    def to_obj(self) -> dict:
        return {
            "format": "trace-v1",
            "stages": [{"name": s.name, "sequence": list(s.sequence)} for s in self.stages],
            "full": list(self.full),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# triangulation helpers


def relabel_arcs(t: TaggedTriangulation, mapping: dict[int, int]) -> TaggedTriangulation:
    tris = [Triangle(tuple(mapping.get(s, s) for s in tri.sides), tri.corners) for tri in t.triangles]
    return from_ideal(t.surface, tris, t.signs, t.boundary_sides)


def toggle_tags_at(t: TaggedTriangulation, p: str) -> TaggedTriangulation:
    signs = dict(t.signs)
    signs[p] = -signs.get(p, 1)
    if p in t.enclosed:
        # keep the enclosed sign equal to its base: the two arcs at p trade places
        sf = t.enclosed[p]
        return relabel_arcs(t, {sf.radius: sf.loop, sf.loop: sf.radius})
    for q, sf in t.enclosed.items():
        if sf.base == p:
            signs[q] = signs[p]
    return from_ideal(t.surface, t.triangles, signs, t.boundary_sides)


def final_permutation(q: IceQuiver) -> dict[int, int]:
    """For an all-red framed quiver whose frozen part is a negated permutation: current vertex -> original vertex."""
    n = q.n_mutable
    out = {}
    for k in range(1, n + 1):
        srcs = [(j - n, q.b(j, k)) for j in range(n + 1, n + q.n_frozen + 1) if q.b(j, k) != 0]
        if len(srcs) != 1 or srcs[0][1] != 1:
            raise ConstructionError(f"vertex {k} does not carry a single frozen arrow")
        out[k] = srcs[0][0]
    return out


# ---------------------------------------------------------------------------
# partition


def _is_radial(t: TaggedTriangulation, p: str) -> bool:
    return p in t.enclosed


def _loops(t: TaggedTriangulation) -> list[tuple[int, str]]:
    out = []
    for a in t.arc_ids:
        u = iota(t, a)
        if u.is_loop:
            out.append((a, u.endpoints[0]))
    return out


def _monogons(t: TaggedTriangulation, exterior: str) -> list[tuple[str, frozenset[str]]]:
    """(base, interior) for every loop that cuts off a disk; interiors avoid ``exterior`` when ambiguous."""
    out = []
    for a, base in _loops(t):
        try:
            out.append((base, monogon_interior(t, a, exterior=exterior)))
        except NotADisk:
            continue
    return out


def choose_X(t: TaggedTriangulation) -> str:
    """First listed puncture that is neither radial nor inside a monogon."""
    if not t.surface.is_closed:
        raise ConstructionError("choose_X needs a closed surface")
    if len(t.surface.punctures) < 2:
        raise ExcludedSurface("a once-punctured closed surface has no maximal green sequence")
    for p in t.surface.punctures:
        if _is_radial(t, p):
            continue
        if any(p in inside for base, inside in _monogons(t, exterior=p)):
            continue
        return p
    raise NoEligiblePuncture("no puncture is outside every monogon and non-radial")


def partition_punctures(t: TaggedTriangulation, X: str | None = None) -> PuncturePartition:
    """Split the punctures into X, the radial ones and the monogon strata.

    Monogons based at X play no role in the strata: a puncture that is only
    enclosed by loops at X belongs to the outermost stratum.
    """
    if X is None:
        X = choose_X(t)
    S = frozenset(p for p in t.surface.punctures if _is_radial(t, p))
    M = [p for p in t.surface.punctures if p != X and p not in S]
    mons = [(b, inside) for b, inside in _monogons(t, exterior=X) if b != X]
    strata: list[frozenset[str]] = []
    first = frozenset(p for p in M if not any(p in inside for _, inside in mons))
    placed = set(first)
    cur = first
    while cur:
        strata.append(cur)
        rest = set(M) - placed
        nxt = set()
        for p in rest:
            inner = any(p in inside for b, inside in mons if b in cur)
            blocked = any(p in inside for b, inside in mons if b in rest)
            if inner and not blocked:
                nxt.add(p)
        placed |= nxt
        cur = frozenset(nxt)
    if placed != set(M):
        raise ConstructionError(f"punctures {sorted(set(M) - placed)} fall in no stratum")
    return PuncturePartition(X, S, tuple(strata))


# ---------------------------------------------------------------------------
# independence


def independence_data(t: TaggedTriangulation, P_set: Iterable[str]) -> IndependenceData:
    P = frozenset(P_set)
    if not P < frozenset(t.surface.marked_points()):
        raise ConstructionError("the independence set must be a proper subset of the marked points")
    E = frozenset(a for a in t.arc_ids if set(iota(t, a).endpoints) <= P)
    n_tri = len(t.triangles)
    target = [any(c not in P for c in tri.corners) for tri in t.triangles]
    # dual graph restricted to crossings of arcs in E
    nbrs: list[list[int]] = [[] for _ in range(n_tri)]
    for a in E:
        slots = t.slots[a]
        (t1, _), (t2, _) = slots
        if t1 != t2:
            nbrs[t1].append(t2)
            nbrs[t2].append(t1)
    sigma: dict[int, int] = {}
    for a in sorted(E):
        dist = {}
        heap = []
        for ti, _ in t.slots[a]:
            if ti not in dist:
                dist[ti] = 0
                heap.append((0, ti))
        heapq.heapify(heap)
        best = None
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist.get(x, d):
                continue
            if target[x]:
                best = d
                break
            for y in nbrs[x]:
                if d + 1 < dist.get(y, 1 << 30):
                    dist[y] = d + 1
                    heapq.heappush(heap, (d + 1, y))
        if best is None:
            raise NoIndependencePath(f"arc {a} has no independence path")
        sigma[a] = best
    order = tuple(sorted(E, key=lambda a: (sigma[a], a)))
    return IndependenceData(P, E, sigma, order)


def mu_ind(d: IndependenceData) -> tuple[int, ...]:
    return d.order


def mu_ind_star(
    d: IndependenceData | Sequence[int],
    radial_replacements: dict[int, int] | None = None,
    log: Iterable[tuple[int, int]] = (),
) -> tuple[int, ...]:
    """Reverse of the independence sequence with radial and interchange substitutions."""
    seq = d.order if isinstance(d, IndependenceData) else tuple(d)
    sub = dict(radial_replacements or {})
    swap = {}
    for a, b in log:
        swap[a], swap[b] = b, a
    out = []
    for a in reversed(seq):
        a = sub.get(a, a)
        out.append(swap.get(a, a))
    return tuple(out)


# ---------------------------------------------------------------------------
# cycles


def cycle_lemma_sequence(cycle: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, int]]:
    """Cycle sequence for vertices ``cycle`` listed along the arrows (c0 -> c1 -> ... -> c0).

    Labels run against the arrows starting from the smallest vertex, which is
    mutated first; the pair returned is the one interchanged.
    """
    n = len(cycle)
    if n == 2:
        a, b = sorted(cycle)
        return (a, b), (a, b)
    if n < 2:
        raise ConstructionError("a cycle needs at least two arcs")
    s = min(range(n), key=lambda i: cycle[i])
    x = [cycle[(s + k) % n] for k in range(n)]
    # label n = x[0], label n-1 = x[1], ..., label 1 = x[n-1]
    seq = tuple(x) + tuple(x[k] for k in range(n - 3, -1, -1))
    return seq, (x[n - 1], x[n - 2])


def oriented_cycle(n: int) -> IceQuiver:
    """The oriented n-cycle with arrows i -> i-1 and 1 -> n."""
    return IceQuiver.from_edges(n, [(i, i - 1) for i in range(2, n + 1)] + [(1, n)])


def mu_cycle(t: TaggedTriangulation, P: str) -> tuple[tuple[int, ...], tuple[int, int]]:
    if P in t.enclosed:
        raise RadialPuncture(f"{P} is a radial puncture")
    around = arcs_around(t, P)
    if len(set(around)) != len(around) or any(iota(t, a).is_loop for a in around):
        raise LoopAtPuncture(f"{P} has a loop")
    return cycle_lemma_sequence(around)


# ---------------------------------------------------------------------------
# the pipeline


class _Runner:
    def __init__(self, t: TaggedTriangulation, check_quiver: bool = True):
        self.t = t
        self.q = framed(quiver_of(t))
        self.check_quiver = check_quiver
        self.stages: list[Stage] = []
        self.full: list[int] = []

    def run(self, name: str, seq: Sequence[int]) -> None:
        for step, a in enumerate(seq, 1):
            if vertex_state(self.q, a) is not VertexState.GREEN:
                raise ConstructionError(f"arc {a} is red", name, step)
            self.t = flip(self.t, a, check=False)
            self.q = mutate(self.q, a)
            if self.check_quiver and quiver_of(self.t, check=False) != self.q.mutable_part():
                raise ConstructionError(f"triangulation and quiver diverged at arc {a}", name, step)
        self.stages.append(Stage(name, tuple(seq)))
        self.full.extend(seq)


def _stratum_pass(r: _Runner, label: str, punctures: Sequence[str], radial_rule: bool) -> None:
    d = independence_data(r.t, punctures)
    fwd = mu_ind(d)
    r.run(f"ind:{label}", fwd)
    left = [a for a in r.t.arc_ids if set(iota(r.t, a).endpoints) <= d.P_set]
    if left:
        raise ConstructionError(f"arcs {left} still join the set after the independence stage", f"ind:{label}")
    log: list[tuple[int, int]] = []
    replacements: dict[int, int] = {}
    mutated = set(fwd)
    for P in punctures:
        if P in r.t.enclosed:
            sf = r.t.enclosed[P]
            pair = {sf.radius, sf.loop}
            alpha = pair & mutated
            if radial_rule and len(alpha) == 1:
                (a,) = alpha
                (b,) = pair - alpha
                replacements[a] = b
            continue
        seq, pair = mu_cycle(r.t, P)
        before = r.t
        r.run(f"cycle:{P}", seq)
        want = relabel_arcs(toggle_tags_at(before, P), {pair[0]: pair[1], pair[1]: pair[0]})
        if not want.same_as(r.t):
            raise ConstructionError(f"cycle at {P} did not just toggle its tags", f"cycle:{P}")
        log.append(pair)
    r.run(f"ind*:{label}", mu_ind_star(d, replacements if radial_rule else None, log))


def construct_closed(t: TaggedTriangulation, check_quiver: bool = True) -> ConstructionTrace:
    """Build and certify a maximal green sequence for a closed surface with at least two punctures."""
    if not t.surface.is_closed:
        raise ConstructionError("surface has boundary; use construct_with_boundary")
    errs = validate(t)
    if errs:
        raise ConstructionError("invalid triangulation: " + "; ".join(errs))
    if len(t.surface.punctures) < 2:
        raise ExcludedSurface("a once-punctured closed surface has no maximal green sequence")
    part = partition_punctures(t)
    r = _Runner(t, check_quiver)
    order = t.surface.punctures
    for i, stratum in enumerate(part.strata):
        _stratum_pass(r, f"M{i}", part.ordered(stratum, order), radial_rule=True)
    _stratum_pass(r, "X", [part.X], radial_rule=False)
    green = apply_green_sequence(framed(quiver_of(t)), r.full)
    if not green.is_maximal_green:
        raise ConstructionError(f"sequence is not a maximal green sequence ({green.verdict})")
    perm = final_permutation(r.q)
    if not relabel_arcs(r.t, perm).same_as(toggle_all_tags(t)):
        raise ConstructionError("final triangulation is not the input with every tag changed")
    return ConstructionTrace(r.stages, tuple(r.full), green.verdict, part, green, r.t, perm)


def _c_vector(q: IceQuiver, k: int) -> tuple[int, ...]:
    n = q.n_mutable
    return tuple(q.b(k, n + j) for j in range(1, q.n_frozen + 1))


def _restrict_steps(big: IceQuiver, seq: Sequence[int], small: IceQuiver) -> list[int | None]:
    """Carry a green sequence of ``big`` over to its induced subquiver ``small`` on vertices ``1..m``.

    Only steps whose c-vector vanishes outside ``1..m`` survive; each one is
    replayed on ``framed(small)`` at the green vertex carrying the same
    c-vector.  Mutations at the other vertices change the arrows among
    ``1..m``, so the surviving vertex labels can differ from the original ones.
    """
    m = small.n_mutable
    q = framed(big)
    sub = framed(small)
    out: list[int | None] = []
    for step, k in enumerate(seq, 1):
        c = _c_vector(q, k)
        if any(c[m:]):
            out.append(None)
        else:
            target = c[:m]
            hits = [v for v in range(1, m + 1) if _c_vector(sub, v) == target]
            if len(hits) != 1 or vertex_state(sub, hits[0]) is not VertexState.GREEN:
                raise ConstructionError(f"no green vertex of the subquiver carries c-vector {target}", "restrict", step)
            out.append(hits[0])
            sub = mutate(sub, hits[0])
        q = mutate(q, k)
    return out


def restrict_sequence(big: IceQuiver, seq: Sequence[int], small: IceQuiver) -> tuple[int, ...]:
    return tuple(v for v in _restrict_steps(big, seq, small) if v is not None)


def construct_with_boundary(t: TaggedTriangulation, check_quiver: bool = True) -> ConstructionTrace:
    """Close the surface, build a sequence there and restrict it to the original arcs."""
    if t.surface.is_closed:
        raise NotABoundedSurface("surface has no boundary")
    errs = validate(t)
    if errs:
        raise ConstructionError("invalid triangulation: " + "; ".join(errs))
    closed, _ = close_surface(t)
    big = construct_closed(closed, check_quiver)
    small = quiver_of(t)
    steps = _restrict_steps(quiver_of(closed), big.full, small)
    stages = []
    pos = 0
    for st in big.stages:
        part = steps[pos:pos + len(st.sequence)]
        pos += len(st.sequence)
        stages.append(Stage(st.name, tuple(v for v in part if v is not None)))
    full = tuple(v for v in steps if v is not None)
    green = apply_green_sequence(framed(small), full)
    if not green.is_maximal_green:
        raise ConstructionError(f"restricted sequence is not a maximal green sequence ({green.verdict})")
    return ConstructionTrace(stages, full, green.verdict, big.partition, green, None, {})

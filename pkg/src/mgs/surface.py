"""Tagged triangulations of marked surfaces.

A tagged triangulation is stored as an ideal triangulation together with the
tagged arcs it determines:

* ``triangles`` lists every ideal triangle as a clockwise triple of side ids
  plus the marked point at the start of each side.  A self-folded triangle
  repeats its radius id; its third side is the enclosing loop.
* Each puncture carries a sign (plain = +1, notched = -1).  A non-loop arc
  takes the sign of its endpoints; the tagged arc sitting on the loop of a
  self-folded triangle is the radius notched (relative to the sign) at the
  enclosed puncture.

The representation is normalised so that the puncture inside a self-folded
triangle has the same sign as the base of the loop.  With this convention the
ideal arc in each position is exactly the underlying object of the tagged arc
(the loop position holds the arc whose two ends are tagged differently), and
toggling every tag is just negating every sign.

Boundary segments appear as sides of triangles but are not arcs and never
become quiver vertices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .quiver import FormatError, IceQuiver

__all__ = [
    "PLAIN",
    "NOTCHED",
    "SurfaceError",
    "InvalidTriangulation",
    "InvalidArc",
    "NotALoop",
    "NotADisk",
    "NotABoundedSurface",
    "ExcludedSurface",
    "MarkedSurface",
    "TaggedArc",
    "Triangle",
    "TaggedTriangulation",
    "RadialPunctureInfo",
    "IotaArc",
    "validate",
    "quiver_of",
    "flip",
    "flip_sequence",
    "arcs_around",
    "radial_punctures",
    "monogon_interior",
    "iota",
    "close_surface",
    "toggle_all_tags",
    "from_ideal",
    "from_arc_triangles",
    "closed_surface_triangulation",
    "disk_triangulation",
    "insert_puncture",
    "parse_triangulation",
    "serialize_triangulation",
    "load_triangulation",
]

PLAIN = "plain"
NOTCHED = "notched"
_TAG = {1: PLAIN, -1: NOTCHED}
_SIGN = {PLAIN: 1, NOTCHED: -1}


class SurfaceError(Exception):
    """Base class for surface errors."""


class InvalidTriangulation(SurfaceError, ValueError):
    pass


class InvalidArc(SurfaceError, ValueError):
    pass


class NotALoop(SurfaceError, ValueError):
    pass


class NotADisk(SurfaceError):
    pass


class NotABoundedSurface(SurfaceError, ValueError):
    pass


class ExcludedSurface(SurfaceError, ValueError):
    pass


@dataclass(frozen=True)
class MarkedSurface:
    genus: int
    boundary: tuple[int, ...] = ()
    punctures: tuple[str, ...] = ()
    boundary_points: tuple[tuple[str, ...], ...] = ()

    @property
    def is_closed(self) -> bool:
        return not self.boundary

    @property
    def n_punctures(self) -> int:
        return len(self.punctures)

    def expected_arc_count(self) -> int:
        g, b, p = self.genus, len(self.boundary), len(self.punctures)
        return 6 * g + 3 * b + 3 * p + sum(self.boundary) - 6

    def excluded_reason(self) -> str | None:
        g, b, p = self.genus, len(self.boundary), len(self.punctures)
        if g < 0:
            return "negative genus"
        if any(m < 1 for m in self.boundary):
            return "every boundary component needs a marked point"
        if g == 0 and b == 0 and p < 4:
            return "sphere with fewer than four punctures"
        if g == 0 and b == 1:
            m = self.boundary[0]
            if m == 1 and p <= 1:
                return "unpunctured or once-punctured monogon"
            if m == 2 and p == 0:
                return "unpunctured digon"
            if m == 3 and p == 0:
                return "unpunctured triangle"
        if b == 0 and p == 0:
            return "closed surface without marked points"
        return None

    def marked_points(self) -> tuple[str, ...]:
        return self.punctures + tuple(x for comp in self.boundary_points for x in comp)


@dataclass(frozen=True, order=True)
class TaggedArc:
    id: int
    ends: tuple[tuple[str, str], tuple[str, str]]

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.ends[0][0], self.ends[1][0])

    def tag_at(self, point: str) -> str:
        tags = {t for p, t in self.ends if p == point}
        if len(tags) != 1:
            raise KeyError(point)
        return tags.pop()

    @property
    def is_loop(self) -> bool:
        return self.ends[0][0] == self.ends[1][0]


@dataclass(frozen=True, order=True)
class Triangle:
    """Clockwise sides; ``corners[i]`` is the marked point where ``sides[i]`` starts."""

    sides: tuple[int, int, int]
    corners: tuple[str, str, str]

    def rotated(self, r: int) -> "Triangle":
        return Triangle(self.sides[r:] + self.sides[:r], self.corners[r:] + self.corners[:r])

    def canonical(self) -> "Triangle":
        return min(self.rotated(r) for r in range(3))

    @property
    def self_folded(self) -> bool:
        return len(set(self.sides)) < 3


@dataclass(frozen=True)
class RadialPunctureInfo:
    puncture: str
    inner: int  # the arc notched relative to the base tag (loop position)
    companion: int  # the arc tagged like the base (radius position)
    base: str
    digon: tuple[int, ...]  # the two other sides of the triangle on the loop


@dataclass(frozen=True)
class IotaArc:
    """Underlying object of a tagged arc: an untagged arc, or a loop enclosing a radial puncture."""

    arc: int
    endpoints: tuple[str, str]
    encloses: str | None = None

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


@dataclass(frozen=True)
class _SelfFolded:
    triangle: int
    radius: int
    loop: int
    puncture: str
    base: str


@dataclass(frozen=True)
class TaggedTriangulation:
    surface: MarkedSurface
    arcs: tuple[TaggedArc, ...]
    triangles: tuple[Triangle, ...]
    boundary_sides: tuple[tuple[int, tuple[str, str]], ...] = ()

    # ---- basic structure ----

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @cached_property
    def arc_ids(self) -> tuple[int, ...]:
        return tuple(a.id for a in self.arcs)

    @cached_property
    def arc_by_id(self) -> dict[int, TaggedArc]:
        return {a.id: a for a in self.arcs}

    @cached_property
    def boundary_ids(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.boundary_sides)

    @cached_property
    def slots(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {}
        for ti, tri in enumerate(self.triangles):
            for i, s in enumerate(tri.sides):
                out.setdefault(s, []).append((ti, i))
        return out

    def twin(self, ti: int, i: int) -> tuple[int, int] | None:
        s = self.triangles[ti].sides[i]
        for slot in self.slots.get(s, ()):
            if slot != (ti, i):
                return slot
        return None

    @cached_property
    def self_folded(self) -> dict[int, _SelfFolded]:
        """Self-folded triangles keyed by radius id."""
        out = {}
        for ti, tri in enumerate(self.triangles):
            s = tri.sides
            for i in range(3):
                if s[i] == s[(i + 1) % 3]:
                    r, loop = s[i], s[(i + 2) % 3]
                    out[r] = _SelfFolded(ti, r, loop, tri.corners[(i + 1) % 3], tri.corners[i])
        return out

    @cached_property
    def loop_to_radius(self) -> dict[int, int]:
        return {sf.loop: r for r, sf in self.self_folded.items()}

    @cached_property
    def enclosed(self) -> dict[str, _SelfFolded]:
        """Punctures enclosed by self-folded triangles."""
        return {sf.puncture: sf for sf in self.self_folded.values()}

    def ideal_endpoints(self, a: int) -> tuple[str, str]:
        ti, i = self.slots[a][0]
        tri = self.triangles[ti]
        return (tri.corners[i], tri.corners[(i + 1) % 3])

    @cached_property
    def signs(self) -> dict[str, int]:
        """Puncture signs read off the tags (assumes a consistent triangulation)."""
        out = {p: 1 for p in self.surface.punctures}
        enclosed = self.enclosed
        for arc in self.arcs:
            if arc.id in self.loop_to_radius:
                continue
            for p, tag in arc.ends:
                if p in out and p not in enclosed:
                    out[p] = _SIGN[tag]
        for p, sf in enclosed.items():
            out[p] = out.get(sf.base, 1)
        return out

    def sign(self, p: str) -> int:
        return self.signs.get(p, 1)

    # ---- comparison helpers ----

    def key(self) -> tuple:
        return (
            self.surface,
            tuple(sorted(self.arcs)),
            tuple(sorted(t.canonical() for t in self.triangles)),
            tuple(sorted(self.boundary_sides)),
        )

    def same_as(self, other: "TaggedTriangulation") -> bool:
        return self.key() == other.key()


# ---------------------------------------------------------------------------
# construction


def _tagged_arcs(triangles: Sequence[Triangle], signs: Mapping[str, int], boundary: frozenset[int]) -> tuple[TaggedArc, ...]:
    first: dict[int, tuple[str, str]] = {}
    sf_radius: dict[int, tuple[str, str]] = {}
    sf_loop: dict[int, tuple[str, str]] = {}
    for tri in triangles:
        s, c = tri.sides, tri.corners
        for i in range(3):
            if s[i] in boundary:
                continue
            first.setdefault(s[i], (c[i], c[(i + 1) % 3]))
            if s[i] == s[(i + 1) % 3]:
                base, punct = c[i], c[(i + 1) % 3]
                sf_radius[s[i]] = (base, punct)
                sf_loop[s[(i + 2) % 3]] = (base, punct)

    def tag(p: str, flip: bool = False) -> str:
        sg = signs.get(p, 1)
        return _TAG[-sg if flip else sg]

    arcs = []
    for a, (u, v) in first.items():
        if a in sf_loop:
            base, punct = sf_loop[a]
            ends = ((base, tag(base)), (punct, tag(punct, flip=True)))
        elif a in sf_radius:
            base, punct = sf_radius[a]
            ends = ((base, tag(base)), (punct, tag(punct)))
        else:
            ends = ((u, tag(u)), (v, tag(v)))
        arcs.append(TaggedArc(a, tuple(sorted(ends))))
    return tuple(sorted(arcs))


def _normalise(triangles: list[Triangle], signs: dict[str, int], boundary: frozenset[int]) -> None:
    """Make every enclosed puncture share the sign of its loop's base, swapping radius/loop ids as needed."""
    for ti, tri in enumerate(list(triangles)):
        s, c = tri.sides, tri.corners
        for i in range(3):
            if s[i] == s[(i + 1) % 3]:
                r, loop = s[i], s[(i + 2) % 3]
                base, punct = c[i], c[(i + 1) % 3]
                if signs.get(punct, 1) != signs.get(base, 1):
                    swap = {r: loop, loop: r}
                    for tj, other in enumerate(triangles):
                        if r in other.sides or loop in other.sides:
                            triangles[tj] = Triangle(tuple(swap.get(x, x) for x in other.sides), other.corners)
                    signs[punct] = signs.get(base, 1)
                break


def from_ideal(
    surface: MarkedSurface,
    triangles: Iterable[Triangle],
    signs: Mapping[str, int] | None = None,
    boundary_sides: Iterable[tuple[int, tuple[str, str]]] = (),
) -> TaggedTriangulation:
    """Assemble a tagged triangulation from ideal triangles and puncture signs."""
    sg = {p: 1 for p in surface.punctures}
    if signs:
        sg.update(signs)
    bsides = tuple(sorted((int(i), tuple(e)) for i, e in boundary_sides))
    bids = frozenset(i for i, _ in bsides)
    tris = [t for t in triangles]
    _normalise(tris, sg, bids)
    arcs = _tagged_arcs(tris, sg, bids)
    return TaggedTriangulation(surface, arcs, tuple(sorted(t.canonical() for t in tris)), bsides)


def _corner_classes(side_triples: Sequence[Sequence[int]]) -> list[list[tuple[int, int]]]:
    """Group triangle corners into marked points via the orientable gluing of equal side ids."""
    slots: dict[int, list[tuple[int, int]]] = {}
    for ti, sides in enumerate(side_triples):
        for i, s in enumerate(sides):
            slots.setdefault(s, []).append((ti, i))
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ti, sides in enumerate(side_triples):
        for i in range(3):
            find((ti, i))
            for tw in slots[sides[i]]:
                if tw != (ti, i):
                    # corner at the start of side i continues after the twin side
                    a, b = find((ti, i)), find((tw[0], (tw[1] + 1) % 3))
                    parent[a] = b
    classes: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ti in range(len(side_triples)):
        for i in range(3):
            classes.setdefault(find((ti, i)), []).append((ti, i))
    return list(classes.values())


def from_arc_triangles(
    surface: MarkedSurface,
    arcs: Iterable[TaggedArc],
    triangles: Sequence[Sequence[int]],
    boundary_sides: Iterable[tuple[int, tuple[str, str]]] = (),
) -> TaggedTriangulation:
    """Build a triangulation from tagged arcs and clockwise side-id triples.

    Corner labels are recovered from the gluing: each marked point is the
    unique endpoint shared by the sides meeting at its corners.  Raises
    :class:`InvalidTriangulation` when that assignment is not unique.
    """
    arcs = tuple(sorted(arcs))
    bsides = tuple(sorted((int(i), tuple(e)) for i, e in boundary_sides))
    ends: dict[int, set[str]] = {a.id: {p for p, _ in a.ends} for a in arcs}
    for i, e in bsides:
        ends[i] = set(e)
    for sides in triangles:
        if len(sides) != 3:
            raise InvalidTriangulation(f"triangle {list(sides)} does not have three sides")
        for s in sides:
            if s not in ends:
                raise InvalidTriangulation(f"triangle side {s} is neither an arc nor a boundary segment")
    classes = _corner_classes(triangles)
    candidates = []
    for cls in classes:
        cand: set[str] | None = None
        for ti, i in cls:
            sides = triangles[ti]
            here = ends[sides[i]] & ends[sides[i - 1]]
            cand = here if cand is None else cand & here
        candidates.append(set(cand or ()))
    assigned: dict[int, str] = {}
    changed = True
    while changed:
        changed = False
        used = set(assigned.values())
        for ci, cand in enumerate(candidates):
            if ci in assigned:
                continue
            left = cand - used
            if len(left) == 1:
                assigned[ci] = left.pop()
                changed = True
                used = set(assigned.values())
    if len(assigned) != len(classes):
        raise InvalidTriangulation("could not assign marked points to triangle corners consistently")
    corner_name: dict[tuple[int, int], str] = {}
    for ci, cls in enumerate(classes):
        for c in cls:
            corner_name[c] = assigned[ci]
    tris = tuple(
        Triangle(tuple(sides), tuple(corner_name[(ti, i)] for i in range(3))).canonical()
        for ti, sides in enumerate(triangles)
    )
    t = TaggedTriangulation(surface, arcs, tuple(sorted(tris)), bsides)
    if validate(t):
        return t
    # put the arc tagged like the base into the radius position
    swap: dict[int, int] = {}
    for sf in t.self_folded.values():
        rad = t.arc_by_id[sf.radius]
        if rad.tag_at(sf.puncture) != rad.tag_at(sf.base):
            swap[sf.radius], swap[sf.loop] = sf.loop, sf.radius
    if swap:
        tris = tuple(Triangle(tuple(swap.get(x, x) for x in tri.sides), tri.corners).canonical() for tri in t.triangles)
        t = TaggedTriangulation(surface, arcs, tuple(sorted(tris)), bsides)
    return t


# ---------------------------------------------------------------------------
# validation


def _rotation_classes(t: TaggedTriangulation) -> list[list[tuple[int, int]]]:
    return _corner_classes([tri.sides for tri in t.triangles])


def _boundary_cycles(t: TaggedTriangulation) -> list[list[tuple[int, str, str]]]:
    """Boundary components as cyclic lists of (side id, start, end) in triangle orientation."""
    bids = t.boundary_ids
    where: dict[int, tuple[int, int]] = {}
    for ti, tri in enumerate(t.triangles):
        for i, s in enumerate(tri.sides):
            if s in bids:
                where[s] = (ti, i)
    nxt: dict[int, int] = {}
    for s, (ti, i) in where.items():
        # walk around the end vertex of s until the next boundary side
        tj, j = ti, (i + 1) % 3
        for _ in range(4 * len(t.triangles) + 4):
            side = t.triangles[tj].sides[j]
            if side in bids:
                nxt[s] = side
                break
            tw = t.twin(tj, j)
            if tw is None:
                break
            tj, j = tw[0], (tw[1] + 1) % 3
    cycles = []
    seen: set[int] = set()
    for s in sorted(where):
        if s in seen:
            continue
        cyc = []
        cur = s
        while cur not in seen and cur in where:
            seen.add(cur)
            ti, i = where[cur]
            tri = t.triangles[ti]
            cyc.append((cur, tri.corners[i], tri.corners[(i + 1) % 3]))
            cur = nxt.get(cur)
            if cur is None:
                break
        cycles.append(cyc)
    return cycles


def validate(t: TaggedTriangulation) -> list[str]:
    """Return a list of violations (empty when ``t`` is a valid tagged triangulation)."""
    v: list[str] = []
    surf = t.surface
    reason = surf.excluded_reason()
    if reason:
        v.append(f"surface: excluded case ({reason})")
    if len(surf.boundary_points) != len(surf.boundary) or any(
        len(pts) != m for pts, m in zip(surf.boundary_points, surf.boundary)
    ):
        v.append("surface: boundary_points do not match the boundary marked-point counts")
    marked = surf.marked_points()
    if len(set(marked)) != len(marked):
        v.append("surface: duplicate marked point names")
    n = t.n_arcs
    expected = surf.expected_arc_count()
    if n != expected:
        v.append(f"arc count: {n} arcs, expected {expected}")
    ids = [a.id for a in t.arcs]
    if len(set(ids)) != len(ids):
        v.append("arc ids: duplicates")
    if sorted(ids) != list(range(1, n + 1)):
        v.append("arc ids: must be exactly 1..n")
    if any(i <= n for i in t.boundary_ids) or (t.boundary_ids & set(ids)):
        v.append("boundary sides: ids must be larger than every arc id")
    if len(t.triangles) * 3 != 2 * n + len(t.boundary_sides):
        v.append(f"triangles: {len(t.triangles)} triangles cannot hold {n} arcs and {len(t.boundary_sides)} boundary sides")
    for a in t.arcs:
        cnt = len(t.slots.get(a.id, ()))
        if cnt != 2:
            v.append(f"arc {a.id}: occurs in {cnt} triangle slots, expected 2")
    for b in t.boundary_ids:
        cnt = len(t.slots.get(b, ()))
        if cnt != 1:
            v.append(f"boundary side {b}: occurs in {cnt} triangle slots, expected 1")
    for s in t.slots:
        if s not in t.arc_by_id and s not in t.boundary_ids:
            v.append(f"triangles: unknown side id {s}")
    if v:
        return v
    # gluing consistency of corner labels
    for ti, tri in enumerate(t.triangles):
        for i in range(3):
            tw = t.twin(ti, i)
            if tw is None:
                continue
            o = t.triangles[tw[0]]
            if tri.corners[i] != o.corners[(tw[1] + 1) % 3] or tri.corners[(i + 1) % 3] != o.corners[tw[1]]:
                v.append(f"side {tri.sides[i]}: corner labels disagree across the gluing")
    classes = _rotation_classes(t)
    names = []
    for cls in classes:
        labels = {t.triangles[ti].corners[i] for ti, i in cls}
        if len(labels) != 1:
            v.append(f"marked points: one vertex carries labels {sorted(labels)}")
        names.extend(labels)
    if sorted(names) != sorted(marked):
        v.append("marked points: triangle corners do not match the surface's marked points one-to-one")
    chi = len(classes) - (n + len(t.boundary_sides)) + len(t.triangles)
    if chi != 2 - 2 * surf.genus - len(surf.boundary):
        v.append(f"euler characteristic: complex has {chi}, surface needs {2 - 2 * surf.genus - len(surf.boundary)}")
    cycles = _boundary_cycles(t)
    if sorted(len(c) for c in cycles) != sorted(surf.boundary):
        v.append("boundary: boundary sides do not form the expected components")
    bpoints = {x for comp in surf.boundary_points for x in comp}
    for bid, (p, q) in t.boundary_sides:
        ti, i = t.slots[bid][0]
        tri = t.triangles[ti]
        if {tri.corners[i], tri.corners[(i + 1) % 3]} != {p, q}:
            v.append(f"boundary side {bid}: endpoints disagree with its triangle")
        if p not in bpoints or q not in bpoints:
            v.append(f"boundary side {bid}: endpoints must be boundary marked points")
    if v:
        return v
    # tags
    punct = set(surf.punctures)
    enclosed = t.enclosed
    for a in t.arcs:
        for p, tag in a.ends:
            if tag not in (PLAIN, NOTCHED):
                v.append(f"arc {a.id}: unknown tag {tag!r}")
            if p in bpoints and tag != PLAIN:
                v.append(f"arc {a.id}: end on the boundary at {p} must be plain")
        if a.is_loop and a.ends[0][1] != a.ends[1][1]:
            v.append(f"arc {a.id}: loop at {a.ends[0][0]} has ends tagged differently")
        if a.id in t.loop_to_radius:
            sf = t.self_folded[t.loop_to_radius[a.id]]
            want = {sf.base, sf.puncture}
        else:
            want = set(t.ideal_endpoints(a.id))
        if {p for p, _ in a.ends} != want:
            v.append(f"arc {a.id}: endpoints {sorted(p for p, _ in a.ends)} disagree with the triangles")
    if v:
        return v
    for p in punct:
        if p in enclosed:
            sf = enclosed[p]
            tr = t.arc_by_id[sf.radius].tag_at(p)
            tl = t.arc_by_id[sf.loop].tag_at(p)
            if tr == tl:
                v.append(f"puncture {p}: the two arcs into the once-punctured monogon must differ in tag at {p}")
            continue
        tags = set()
        for a in t.arcs:
            for q, tag in a.ends:
                if q == p:
                    tags.add(tag)
        if len(tags) > 1:
            v.append(f"puncture {p}: arcs meeting at {p} are tagged inconsistently")
    return v


def _require_valid(t: TaggedTriangulation) -> None:
    errs = validate(t)
    if errs:
        raise InvalidTriangulation("; ".join(errs))


# ---------------------------------------------------------------------------
# quiver and flips


def quiver_of(t: TaggedTriangulation, check: bool = True) -> IceQuiver:
    """Signed adjacency from clockwise triangles; radii inherit the arrows of their loops."""
    if check:
        _require_valid(t)
    bids = t.boundary_ids
    pi = {sf.radius: sf.loop for sf in t.self_folded.values()}
    w: dict[tuple[int, int], int] = {}
    for tri in t.triangles:
        if tri.self_folded:
            continue
        s = tri.sides
        for i in range(3):
            a, b = s[i], s[(i + 1) % 3]
            if a in bids or b in bids:
                continue
            w[(a, b)] = w.get((a, b), 0) + 1
    ids = t.arc_ids
    arrows = []
    for x in ids:
        px = pi.get(x, x)
        for y in ids:
            if y <= x:
                continue
            py = pi.get(y, y)
            if px == py:
                continue
            val = w.get((px, py), 0) - w.get((py, px), 0)
            if val > 0:
                arrows.append((x, y, val))
            elif val < 0:
                arrows.append((y, x, -val))
    return IceQuiver(len(ids), 0, tuple(arrows))


def _ideal_flip(triangles: list[Triangle], e: int) -> None:
    where = [(ti, i) for ti, tri in enumerate(triangles) for i, s in enumerate(tri.sides) if s == e]
    (t1, i1), (t2, i2) = where
    if t1 == t2:
        raise InvalidArc(f"arc {e} is the radius of a self-folded triangle")
    A = triangles[t1].rotated(i1)
    B = triangles[t2].rotated(i2)
    _, a, b = A.sides
    v0, v1, v2 = A.corners
    _, c, d = B.sides
    w2 = B.corners[2]
    triangles[t1] = Triangle((b, c, e), (v2, v0, w2))
    triangles[t2] = Triangle((d, a, e), (w2, v1, v2))


def flip(t: TaggedTriangulation, a: int, check: bool = True) -> TaggedTriangulation:
    """Replace tagged arc ``a`` by the unique other arc completing a triangulation (id kept)."""
    if check:
        _require_valid(t)
    if a in t.boundary_ids:
        raise InvalidArc(f"{a} is a boundary segment")
    if a not in t.arc_by_id:
        raise InvalidArc(f"no arc with id {a}")
    tris = list(t.triangles)
    signs = dict(t.signs)
    sf = t.self_folded.get(a)
    if sf is not None:
        # toggle the tag at the enclosed puncture: the arc moves to the loop position
        swap = {sf.radius: sf.loop, sf.loop: sf.radius}
        tris = [Triangle(tuple(swap.get(x, x) for x in tri.sides), tri.corners) for tri in tris]
        signs[sf.puncture] = -signs.get(sf.puncture, 1)
    _ideal_flip(tris, a)
    return from_ideal(t.surface, tris, signs, t.boundary_sides)


def flip_sequence(t: TaggedTriangulation, seq: Iterable[int]) -> TaggedTriangulation:
    for a in seq:
        t = flip(t, a, check=False)
    return t


def toggle_all_tags(t: TaggedTriangulation) -> TaggedTriangulation:
    """The triangulation with every tag at every puncture changed."""
    signs = {p: -s for p, s in t.signs.items()}
    return from_ideal(t.surface, t.triangles, signs, t.boundary_sides)


# ---------------------------------------------------------------------------
# structural queries


def _corner_walk(t: TaggedTriangulation, ti: int, i: int) -> list[tuple[int, int]]:
    """Corners visited rotating around the point at corner (ti, i)."""
    out = []
    cur = (ti, i)
    for _ in range(3 * len(t.triangles) + 1):
        out.append(cur)
        tw = t.twin(cur[0], cur[1])
        if tw is None:
            return out
        cur = (tw[0], (tw[1] + 1) % 3)
        if cur == (ti, i):
            return out
    return out


def arcs_around(t: TaggedTriangulation, p: str) -> list[int]:
    """Tagged arcs at ``p`` in rotation order; consecutive arcs ``x -> y`` are joined by a quiver arrow.

    Loops appear twice.  At a boundary point the list is linear, starting
    after a boundary segment.
    """
    corners = [(ti, i) for ti, tri in enumerate(t.triangles) for i in range(3) if tri.corners[i] == p]
    if not corners:
        raise KeyError(p)
    bids = t.boundary_ids
    start = corners[0]
    for ti, i in corners:
        # at a boundary point start right after the incoming boundary side
        if t.triangles[ti].sides[(i - 1) % 3] in bids:
            start = (ti, i)
            break
    walk = _corner_walk(t, *start)
    seq = [t.triangles[ti].sides[i] for ti, i in walk if t.triangles[ti].sides[i] not in bids]
    enclosed = t.enclosed
    if p in enclosed:
        sf = enclosed[p]
        return [sf.radius, sf.loop]
    for sf in t.self_folded.values():
        if sf.base != p:
            continue
        # ideal rotation reads loop, radius, loop: tagged arcs are radius then the notched one
        m = len(seq)
        for idx in range(m):
            if seq[idx] == sf.radius and seq[idx - 1] == sf.loop:
                del seq[idx - 1]
                break
    return seq


def radial_punctures(t: TaggedTriangulation) -> list[RadialPunctureInfo]:
    out = []
    order = {p: k for k, p in enumerate(t.surface.punctures)}
    for p, sf in sorted(t.enclosed.items(), key=lambda kv: order.get(kv[0], 0)):
        if p not in order:
            continue
        ti, i = [s for s in t.slots[sf.loop] if s[0] != sf.triangle][0]
        tri = t.triangles[ti]
        digon = (tri.sides[(i + 1) % 3], tri.sides[(i + 2) % 3])
        out.append(RadialPunctureInfo(p, sf.loop, sf.radius, sf.base, digon))
    return out


def iota(t: TaggedTriangulation, a: int) -> IotaArc:
    """Underlying object of arc ``a``: a loop around a radial puncture when ``a``'s ends are tagged differently there."""
    if a not in t.arc_by_id:
        raise InvalidArc(f"no arc with id {a}")
    if a in t.loop_to_radius:
        sf = t.self_folded[t.loop_to_radius[a]]
        return IotaArc(a, (sf.base, sf.base), sf.puncture)
    u, v = t.ideal_endpoints(a)
    return IotaArc(a, tuple(sorted((u, v))))


def _components_without(t: TaggedTriangulation, cut: int) -> list[set[int]]:
    adj: dict[int, set[int]] = {ti: set() for ti in range(len(t.triangles))}
    for s, slots in t.slots.items():
        if s == cut or len(slots) != 2:
            continue
        (a, _), (b, _) = slots
        adj[a].add(b)
        adj[b].add(a)
    seen: set[int] = set()
    comps = []
    for ti in adj:
        if ti in seen:
            continue
        comp = {ti}
        dq = deque([ti])
        seen.add(ti)
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    dq.append(y)
        comps.append(comp)
    return comps


def monogon_interior(t: TaggedTriangulation, a: int, exterior: str | None = None) -> frozenset[str]:
    """Punctures inside the disk cut off by the loop ``a``.

    A side of the loop is a disk when its cell structure has Euler
    characteristic 1 and it contains no boundary.  When both sides are disks
    (a sphere) the side not containing ``exterior`` is the interior; without
    ``exterior`` the side with fewer punctures wins, ties going to the side
    avoiding the first-listed puncture.
    """
    if a not in t.arc_by_id:
        raise InvalidArc(f"no arc with id {a}")
    iu = iota(t, a)
    if not iu.is_loop:
        raise NotALoop(f"arc {a} is not a loop")
    base = iu.endpoints[0]
    comps = _components_without(t, a)
    if len(comps) != 2:
        raise NotADisk(f"loop {a} does not separate the surface")
    bids = t.boundary_ids
    sides = []
    for comp in comps:
        pts: set[str] = set()
        edges: set[int] = set()
        has_boundary = False
        for ti in comp:
            tri = t.triangles[ti]
            pts.update(tri.corners)
            edges.update(tri.sides)
            has_boundary |= any(s in bids for s in tri.sides)
        chi = len(pts) - len(edges) + len(comp)
        inside = frozenset(pts - {base})
        sides.append((chi == 1 and not has_boundary, inside))
    disks = [inside for ok, inside in sides if ok]
    if not disks:
        raise NotADisk(f"neither side of loop {a} is a disk")
    if len(disks) == 1:
        return disks[0]
    if exterior is not None:
        left = [d for d in disks if exterior not in d]
        if len(left) == 1:
            return left[0]
    order = {p: k for k, p in enumerate(t.surface.punctures)}
    return min(disks, key=lambda d: (len(d), min(order.get(p, 0) for p in d) == 0, sorted(order.get(p, 0) for p in d)))


# ---------------------------------------------------------------------------
# closing up boundary components


def close_surface(t: TaggedTriangulation) -> tuple[TaggedTriangulation, dict[int, int]]:
    """Glue a disk onto every boundary component and triangulate it.

    A component with ``m`` marked points receives a disk with ``m`` boundary
    points, plus one puncture when ``m <= 2``.  Boundary segments become arcs
    with fresh ids after the existing ones; the returned map sends every
    original arc id and boundary-segment id to its id in the closed
    triangulation (original arcs keep their ids).
    """
    surf = t.surface
    if surf.is_closed:
        raise NotABoundedSurface("surface has no boundary")
    _require_valid(t)
    n = t.n_arcs
    next_id = n + 1
    mapping = {a: a for a in t.arc_ids}
    for bid in sorted(t.boundary_ids):
        mapping[bid] = next_id
        next_id += 1
    tris = [Triangle(tuple(mapping[s] for s in tri.sides), tri.corners) for tri in t.triangles]
    new_punctures = list(surf.punctures) + [x for comp in surf.boundary_points for x in comp]
    used = set(new_punctures)
    counter = 0

    def fresh_name() -> str:
        nonlocal counter
        while True:
            counter += 1
            name = f"D{counter}"
            if name not in used:
                used.add(name)
                return name

    for cyc in _boundary_cycles(t):
        m = len(cyc)
        # disk polygon: reversed boundary, corners u_1, u_m, ..., u_2
        sides = [mapping[s] for s, _, _ in reversed(cyc)]
        verts = [cyc[0][1]] + [cyc[k][1] for k in range(m - 1, 0, -1)]
        if m == 1:
            r = fresh_name()
            new_punctures.append(r)
            rad = next_id
            next_id += 1
            tris.append(Triangle((sides[0], rad, rad), (verts[0], verts[0], r)))
        elif m == 2:
            r = fresh_name()
            new_punctures.append(r)
            x, y = next_id, next_id + 1
            next_id += 2
            w0, w1 = verts
            tris.append(Triangle((sides[0], y, x), (w0, w1, r)))
            tris.append(Triangle((sides[1], x, y), (w1, w0, r)))
        else:
            diag = {}
            for j in range(2, m - 1):
                diag[j] = next_id
                next_id += 1

            def chord(j: int) -> int:
                if j == 1:
                    return sides[0]
                if j == m - 1:
                    return sides[m - 1]
                return diag[j]

            for j in range(1, m - 1):
                tris.append(Triangle((chord(j), sides[j], chord(j + 1)), (verts[0], verts[j], verts[j + 1])))
    closed = MarkedSurface(surf.genus, (), tuple(new_punctures), ())
    signs = dict(t.signs)
    return from_ideal(closed, tris, signs), mapping


# ---------------------------------------------------------------------------
# standard triangulations


def insert_puncture(t: TaggedTriangulation, triangle_index: int, name: str) -> TaggedTriangulation:
    """Add a puncture inside one (non-self-folded) triangle, joined to its three corners."""
    tris = list(t.triangles)
    tri = tris.pop(triangle_index)
    n = max(t.arc_ids, default=0)
    if t.boundary_ids and max(t.boundary_ids) > n:
        raise InvalidTriangulation("renumber boundary sides before inserting punctures")
    (s0, s1, s2), (v0, v1, v2) = tri.sides, tri.corners
    e0, e1, e2 = n + 1, n + 2, n + 3
    tris += [
        Triangle((s0, e1, e0), (v0, v1, name)),
        Triangle((s1, e2, e1), (v1, v2, name)),
        Triangle((s2, e0, e2), (v2, v0, name)),
    ]
    s = t.surface
    surf = MarkedSurface(s.genus, s.boundary, s.punctures + (name,), s.boundary_points)
    return from_ideal(surf, tris, t.signs, t.boundary_sides)


def closed_surface_triangulation(genus: int, n_punctures: int, prefix: str = "P") -> TaggedTriangulation:
    """A triangulation of the closed genus-``genus`` surface with ``n_punctures`` punctures (all plain)."""
    if genus == 0:
        if n_punctures < 3:
            raise ExcludedSurface("sphere needs at least three marked points to start")
        a, b, c = f"{prefix}1", f"{prefix}2", f"{prefix}3"
        tris = [Triangle((1, 2, 3), (a, b, c)), Triangle((1, 3, 2), (b, a, c))]
        names = [a, b, c]
    else:
        if n_punctures < 1:
            raise ExcludedSurface("need at least one puncture")
        p0 = f"{prefix}1"
        names = [p0]
        k = 4 * genus
        side_ids = []
        for h in range(genus):
            side_ids += [2 * h + 1, 2 * h + 2, 2 * h + 1, 2 * h + 2]
        nid = 2 * genus + 1
        diag = {}
        for j in range(2, k - 1):
            diag[j] = nid
            nid += 1

        def chord(j: int) -> int:
            if j == 1:
                return side_ids[0]
            if j == k - 1:
                return side_ids[k - 1]
            return diag[j]

        tris = [Triangle((chord(j), side_ids[j], chord(j + 1)), (p0, p0, p0)) for j in range(1, k - 1)]
    surf = MarkedSurface(genus, (), tuple(names), ())
    t = from_ideal(surf, tris)
    idx = len(names)
    while len(t.surface.punctures) < n_punctures:
        idx += 1
        choice = (idx * 7) % len(t.triangles)
        while t.triangles[choice].self_folded:
            choice = (choice + 1) % len(t.triangles)
        t = insert_puncture(t, choice, f"{prefix}{idx}")
    return t


def disk_triangulation(m: int, prefix: str = "B") -> TaggedTriangulation:
    """Fan triangulation of an unpunctured disk with ``m >= 4`` boundary marked points."""
    if m < 4:
        raise ExcludedSurface("an unpunctured disk needs at least four marked points")
    pts = tuple(f"{prefix}{k + 1}" for k in range(m))
    n = m - 3
    bside = [n + 1 + k for k in range(m)]  # side k joins pts[k] -> pts[k+1]
    diag = {j: j - 1 for j in range(2, m - 1)}  # chord from pts[0] to pts[j]

    def chord(j: int) -> int:
        if j == 1:
            return bside[0]
        if j == m - 1:
            return bside[m - 1]
        return diag[j]

    tris = [Triangle((chord(j), bside[j], chord(j + 1)), (pts[0], pts[j], pts[(j + 1) % m])) for j in range(1, m - 1)]
    # chord(j+1) is traversed from pts[j+1] back to pts[0]
    bsides = [(bside[k], (pts[k], pts[(k + 1) % m])) for k in range(m)]
    surf = MarkedSurface(0, (m,), (), (pts,))
    return from_ideal(surf, tris, {}, bsides)


# ---------------------------------------------------------------------------
# tagtri-v1


def to_obj(t: TaggedTriangulation) -> dict:
    s = t.surface
    obj = {
        "format": "tagtri-v1",
        "genus": s.genus,
        "boundary": list(s.boundary),
        "punctures": list(s.punctures),
    }
    if s.boundary_points:
        obj["boundary_points"] = [list(c) for c in s.boundary_points]
    obj["arcs"] = [{"id": a.id, "ends": [list(e) for e in a.ends]} for a in t.arcs]
    obj["triangles"] = [list(tri.sides) for tri in t.triangles]
    obj["boundary_sides"] = [{"id": i, "ends": list(e)} for i, e in t.boundary_sides]
    return obj


def serialize_triangulation(t: TaggedTriangulation) -> str:
    return json.dumps(to_obj(t), separators=(",", ":")) + "\n"


def _need(obj: dict, key: str, kind):
    if key not in obj:
        raise FormatError(f"field {key!r}: missing")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise FormatError(f"field {key!r}: expected {kind.__name__ if isinstance(kind, type) else kind}")
    return val


def from_obj(obj) -> TaggedTriangulation:
    if not isinstance(obj, dict):
        raise FormatError("top level: expected a JSON object")
    if obj.get("format") != "tagtri-v1":
        raise FormatError(f"field 'format': expected 'tagtri-v1', got {obj.get('format')!r}")
    genus = _need(obj, "genus", int)
    boundary = _need(obj, "boundary", list)
    punctures = _need(obj, "punctures", list)
    bpoints = obj.get("boundary_points", [])
    if not isinstance(bpoints, list):
        raise FormatError("field 'boundary_points': expected a list")
    if not bpoints and boundary:
        bpoints = [[f"B{c + 1}.{k + 1}" for k in range(m)] for c, m in enumerate(boundary)]
    arcs_raw = _need(obj, "arcs", list)
    tris_raw = _need(obj, "triangles", list)
    bs_raw = obj.get("boundary_sides", [])
    arcs = []
    for idx, item in enumerate(arcs_raw):
        if not isinstance(item, dict) or "id" not in item or "ends" not in item:
            raise FormatError(f"field 'arcs[{idx}]': expected an object with 'id' and 'ends'")
        ends = item["ends"]
        if not isinstance(item["id"], int) or not isinstance(ends, list) or len(ends) != 2:
            raise FormatError(f"field 'arcs[{idx}]': malformed id or ends")
        parsed = []
        for j, e in enumerate(ends):
            if not isinstance(e, list) or len(e) != 2 or not all(isinstance(x, str) for x in e):
                raise FormatError(f"field 'arcs[{idx}].ends[{j}]': expected [point, tag]")
            parsed.append((e[0], e[1]))
        arcs.append(TaggedArc(item["id"], tuple(sorted(parsed))))
    tris = []
    for idx, item in enumerate(tris_raw):
        if not isinstance(item, list) or len(item) != 3 or not all(isinstance(x, int) for x in item):
            raise FormatError(f"field 'triangles[{idx}]': expected three integer side ids")
        tris.append(tuple(item))
    bsides = []
    for idx, item in enumerate(bs_raw):
        if not isinstance(item, dict) or not isinstance(item.get("id"), int):
            raise FormatError(f"field 'boundary_sides[{idx}]': expected an object with an integer 'id'")
        e = item.get("ends")
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"field 'boundary_sides[{idx}].ends': expected two marked points")
        bsides.append((item["id"], (e[0], e[1])))
    surf = MarkedSurface(genus, tuple(boundary), tuple(punctures), tuple(tuple(c) for c in bpoints))
    return from_arc_triangles(surf, arcs, tris, bsides)


def parse_triangulation(text: str) -> TaggedTriangulation:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_obj(obj)


def load_triangulation(name: str) -> TaggedTriangulation:
    """Load one of the bundled triangulations from ``mgs/data`` by file stem."""
    from importlib import resources

    text = resources.files("mgs").joinpath("data", f"{name}.tagtri.json").read_text(encoding="utf-8")
    return parse_triangulation(text)

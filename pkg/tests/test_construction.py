import pytest

from conftest import SUITE_SPECS, build_suite_member
from mgs.construction import (
    ConstructionError,
    choose_X,
    construct_closed,
    construct_with_boundary,
    cycle_lemma_sequence,
    final_permutation,
    independence_data,
    mu_ind_star,
    oriented_cycle,
    relabel_arcs,
    restrict_sequence,
)
from mgs.quiver import IceQuiver, apply_green_sequence, framed, induced_subquiver, relabel
from mgs.surface import (
    ExcludedSurface,
    NotABoundedSurface,
    NotADisk,
    closed_surface_triangulation,
    disk_triangulation,
    iota,
    load_triangulation,
    monogon_interior,
    quiver_of,
    radial_punctures,
    toggle_all_tags,
)
from reference_data import (
    CYCLE_P1,
    CYCLE_P2,
    CYCLE_P3,
    CYCLE_R1,
    CYCLE_R3,
    IND_M0,
    IND_M1,
    IND_STAR_M0,
    IND_STAR_X,
    IND_X,
)


@pytest.fixture(scope="module")
def genus2_trace():
    return construct_closed(load_triangulation("genus2_10"))


def nesting_depth(t):
    """Longest chain of monogons, each based inside the previous one (loops at X ignored)."""
    X = choose_X(t)
    mons = []
    for a in t.arc_ids:
        u = iota(t, a)
        if u.is_loop and u.endpoints[0] != X:
            try:
                mons.append((u.endpoints[0], monogon_interior(t, a, exterior=X)))
            except NotADisk:
                pass
    memo = {}

    def depth(i):
        if i not in memo:
            base, inside = mons[i]
            outer = [j for j, (_, other) in enumerate(mons) if base in other and inside < other]
            memo[i] = 1 + max((depth(j) for j in outer), default=0)
        return memo[i]

    return max((depth(i) for i in range(len(mons))), default=0)


def test_genus2_stages(genus2_trace):
    tr = genus2_trace
    assert [s.name for s in tr.stages] == [
        "ind:M0", "cycle:P1", "cycle:P2", "cycle:P3", "ind*:M0",
        "ind:M1", "cycle:R1", "cycle:R3", "ind*:M1",
        "ind:X", "cycle:X", "ind*:X",
    ]
    assert tr.stage("ind:M0") == IND_M0
    assert tr.stage("cycle:P1") == CYCLE_P1
    assert tr.stage("cycle:P2") == CYCLE_P2
    assert tr.stage("cycle:P3") == CYCLE_P3
    assert tr.stage("ind*:M0") == IND_STAR_M0
    assert tr.stage("ind:M1") == IND_M1
    assert tr.stage("cycle:R1") == CYCLE_R1
    assert tr.stage("cycle:R3") == CYCLE_R3
    assert tr.stage("ind*:M1") == (34, 33, 35)
    assert tr.stage("ind:X") == IND_X
    assert tr.stage("ind*:X") == IND_STAR_X
    assert len(tr.full) == 100
    assert tr.verdict == "ValidMaximalGreen"


def test_genus2_partition(genus2_trace):
    part = genus2_trace.partition
    assert part.X == "X"
    assert part.S == {"S1"}
    assert part.strata == ({"P1", "P2", "P3", "P4", "P5"}, {"R1", "R2", "R3"})


def test_final_triangulation_is_the_input_with_all_tags_toggled(genus2_trace):
    tr = genus2_trace
    assert relabel_arcs(tr.final, tr.permutation).same_as(toggle_all_tags(load_triangulation("genus2_10")))


def test_independence_distances_on_the_ten_punctured_torus():
    t = load_triangulation("torus_10")
    d = independence_data(t, [f"P{i}" for i in range(1, 9)])
    by_sigma = {}
    for a, s in d.sigma.items():
        by_sigma.setdefault(s, set()).add(a)
    assert by_sigma == {0: {3, 4, 5, 6, 30}, 1: set(range(11, 19)), 2: {7, 8, 9, 10}, 3: {29}}
    assert [d.sigma[a] for a in d.order] == sorted(d.sigma.values())


def test_independence_rejects_the_whole_marked_set():
    t = load_triangulation("torus_4")
    with pytest.raises(ConstructionError):
        independence_data(t, t.surface.punctures)


def test_reverse_stage_substitutions():
    assert mu_ind_star((32, 33, 36), {36: 34}, [(32, 35)]) == (34, 33, 35)
    assert mu_ind_star((1, 2, 3)) == (3, 2, 1)


def test_cycle_sequence_shape():
    assert cycle_lemma_sequence([1, 2, 3, 4, 5]) == ((1, 2, 3, 4, 5, 3, 2, 1), (5, 4))
    # rotation puts the smallest id first
    assert cycle_lemma_sequence([16, 20, 21])[0] == CYCLE_P3


@pytest.mark.parametrize("n", range(3, 9))
def test_cycle_lemma_on_oriented_cycles(n):
    q = oriented_cycle(n)
    seq = tuple(range(n, 0, -1)) + tuple(range(3, n + 1))
    trace = apply_green_sequence(framed(q), seq)
    assert trace.verdict == "ValidMaximalGreen"
    swap = (2, 1) + tuple(range(3, n + 1))
    assert trace.final.mutable_part() == relabel(q, swap)


def test_final_permutation_recovers_the_original_labels():
    q = oriented_cycle(5)
    final = apply_green_sequence(framed(q), (5, 4, 3, 2, 1, 3, 4, 5)).final
    perm = final_permutation(final)
    assert sorted(perm.values()) == [1, 2, 3, 4, 5]
    back = {orig: cur for cur, orig in perm.items()}
    assert relabel(q, tuple(back[i] for i in range(1, 6))) == final.mutable_part()


@pytest.mark.parametrize("label,spec", SUITE_SPECS, ids=[s[0] for s in SUITE_SPECS])
def test_construction_suite(label, spec):
    t = build_suite_member(spec)
    tr = construct_closed(t)
    assert tr.verdict == "ValidMaximalGreen"
    assert apply_green_sequence(framed(quiver_of(t)), tr.full).is_maximal_green
    assert tr.full == tuple(a for s in tr.stages for a in s.sequence)


def test_construction_suite_coverage():
    kinds = set()
    radial = nested = 0
    for _, spec in SUITE_SPECS:
        t = build_suite_member(spec)
        kinds.add((t.surface.genus, len(t.surface.punctures)))
        radial += bool(radial_punctures(t))
        nested += nesting_depth(t) >= 2
    assert len(SUITE_SPECS) >= 20
    assert {(0, 4), (0, 5), (1, 2), (1, 4), (2, 2), (2, 10)} <= kinds
    assert radial >= 3
    assert nested >= 2


def test_once_punctured_surfaces_are_excluded():
    with pytest.raises(ExcludedSurface):
        construct_closed(load_triangulation("once_punctured_torus"))
    with pytest.raises(ExcludedSurface):
        construct_closed(closed_surface_triangulation(2, 1))


def test_closed_construction_rejects_boundary():
    with pytest.raises(ConstructionError):
        construct_closed(load_triangulation("pentagon"))


def test_bounded_torus():
    t = load_triangulation("torus_1_boundary_3")
    tr = construct_with_boundary(t)
    assert tr.verdict == "ValidMaximalGreen"
    assert quiver_of(t).n_mutable == 9
    assert apply_green_sequence(framed(quiver_of(t)), tr.full).is_maximal_green


@pytest.mark.parametrize("m", [4, 5, 6, 7, 8])
def test_disks(m):
    t = disk_triangulation(m)
    tr = construct_with_boundary(t)
    assert tr.verdict == "ValidMaximalGreen"
    assert len(tr.full) >= m - 3


def test_pentagon_file():
    assert construct_with_boundary(load_triangulation("pentagon")).full == (2, 1)


def test_restriction_keeps_only_steps_visible_on_the_subquiver():
    big = IceQuiver.from_edges(3, [(1, 2), (2, 3)])
    small = induced_subquiver(big, (1, 2))
    seq = restrict_sequence(big, (1, 2, 3), small)
    assert apply_green_sequence(framed(small), seq).is_maximal_green


def test_boundary_construction_rejects_closed_surfaces():
    with pytest.raises(NotABoundedSurface):
        construct_with_boundary(load_triangulation("torus_4"))

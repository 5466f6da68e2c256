import json

import pytest

from mgs.cli import main, parse_sequence
from mgs.quiver import IceQuiver, mutate_sequence, parse_quiver, serialize_quiver
from mgs.surface import load_triangulation, parse_triangulation, quiver_of, serialize_triangulation
from reference_data import TORUS_4_ARROWS


@pytest.fixture
def a2(tmp_path):
    path = tmp_path / "a2.iceq"
    path.write_text(serialize_quiver(IceQuiver.from_edges(2, [(1, 2)])))
    return str(path)


@pytest.fixture
def tri(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.tagtri"
        path.write_text(serialize_triangulation(load_triangulation(name)))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mutate_single_vertex(capsys, a2):
    code, out, _ = run(capsys, "mutate", a2, "1")
    assert code == 0
    assert parse_quiver(out) == IceQuiver.from_edges(2, [(2, 1)])


def test_mutate_twice_is_the_identity(capsys, a2):
    code, out, _ = run(capsys, "mutate", a2, "1,1")
    assert code == 0
    assert out == open(a2).read()


def test_mutate_out_of_range(capsys, a2):
    code, _, err = run(capsys, "mutate", a2, "3")
    assert code == 2 and "vertex 3" in err


def test_mutate_with_input_flag_and_output_file(capsys, a2, tmp_path):
    target = tmp_path / "out.iceq"
    code, out, _ = run(capsys, "mutate", "-i", a2, "-o", str(target), "1")
    assert code == 0 and out == ""
    assert parse_quiver(target.read_text()) == IceQuiver.from_edges(2, [(2, 1)])


def test_check_source_first(capsys, a2, tmp_path):
    seq = tmp_path / "seq.txt"
    seq.write_text("1,2\n")
    code, out, _ = run(capsys, "check", a2, str(seq))
    assert (code, out) == (0, "ValidMaximalGreen\n")


def test_check_sink_first_reports_the_engine_verdict(capsys, a2):
    code, out, _ = run(capsys, "check", a2, "--seq", "2,1")
    assert (code, out) == (1, "ValidGreen\n")


def test_check_red_mutation(capsys, a2):
    code, out, _ = run(capsys, "check", a2, "--seq", "1 1")
    assert (code, out.strip()) == (1, "InvalidAtStep 2")


def test_check_trace_lists_each_step(capsys, a2):
    code, out, _ = run(capsys, "check", a2, "--seq", "1,2", "--trace")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 3 and lines[0].startswith("step 1: mutate 1")


def test_check_malformed_sequence_file(capsys, a2, tmp_path):
    seq = tmp_path / "seq.txt"
    seq.write_text("1,x\n")
    assert run(capsys, "check", a2, str(seq))[0] == 2


def test_missing_file_is_an_input_error(capsys, tmp_path):
    assert run(capsys, "mutate", str(tmp_path / "nope.iceq"), "1")[0] == 2


def test_malformed_quiver_is_an_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.iceq"
    bad.write_text("{")
    assert run(capsys, "mutate", str(bad), "1")[0] == 2


def test_surface_quiver(capsys, tri):
    code, out, _ = run(capsys, "surface", "quiver", tri("torus_4"))
    assert code == 0
    q = parse_quiver(out)
    assert q.n_mutable == 12
    assert {(s, t) for s, t, _ in q.arrows} == set(TORUS_4_ARROWS)


def test_surface_flip(capsys, tri):
    code, out, _ = run(capsys, "surface", "flip", tri("torus_4"), "1,2")
    assert code == 0
    assert quiver_of(parse_triangulation(out)) == mutate_sequence(quiver_of(load_triangulation("torus_4")), (1, 2))


def test_surface_flip_of_a_missing_arc(capsys, tri):
    assert run(capsys, "surface", "flip", tri("torus_4"), "99")[0] == 2


def test_surface_construct_genus2(capsys, tri):
    code, out, err = run(capsys, "surface", "construct", tri("genus2_10"))
    assert code == 0
    assert len(parse_sequence(out)) == 100
    assert "ValidMaximalGreen" in err


def test_surface_construct_trace(capsys, tri):
    code, out, _ = run(capsys, "surface", "construct", "--trace", tri("genus2_10"))
    obj = json.loads(out)
    assert code == 0
    assert obj["format"] == "trace-v1" and obj["verdict"] == "ValidMaximalGreen"
    assert sum(len(s["sequence"]) for s in obj["stages"]) == len(obj["full"]) == 100


def test_surface_construct_with_boundary(capsys, tri):
    code, out, _ = run(capsys, "surface", "construct", tri("torus_1_boundary_3"))
    assert code == 0 and parse_sequence(out)


def test_surface_construct_once_punctured_torus(capsys, tri):
    code, _, err = run(capsys, "surface", "construct", tri("once_punctured_torus"))
    assert code == 2
    assert "no maximal green sequence" in err


def test_class_enumerate_x7(capsys):
    assert run(capsys, "class", "enumerate", "--seed", "x7")[:2] == (0, "2\n")


def test_class_catalog_x6(capsys, tmp_path):
    target = tmp_path / "x6.catalog"
    code, out, _ = run(capsys, "class", "catalog", "--seed", "x6", "--max-len", "24", "-o", str(target))
    assert code == 0
    assert "5 certificates" in out
    obj = json.loads(target.read_text())
    assert obj["format"] == "catalog-v1" and obj["class_size"] == 5
    # every certificate re-verifies through the check command
    for i, m in enumerate(obj["members"]):
        qf = tmp_path / f"m{i}.iceq"
        qf.write_text(json.dumps(m["quiver"]))
        assert run(capsys, "check", str(qf), "--seq", ",".join(map(str, m["mgs"])))[0] == 0


def test_class_unknown_seed(capsys):
    assert run(capsys, "class", "enumerate", "--seed", "e9")[0] == 2


def test_search_a2(capsys, a2):
    assert run(capsys, "search", a2)[:2] == (0, "1,2\n")


def test_search_bounded_failure(capsys, tmp_path):
    q = tmp_path / "markov.iceq"
    q.write_text(serialize_quiver(IceQuiver.from_edges(3, [(1, 2, 2), (2, 3, 2), (3, 1, 2)])))
    code, out, err = run(capsys, "search", str(q), "--max-len", "6")
    assert (code, out) == (1, "NotFoundWithin(6)\n")
    assert "states explored" in err


def test_search_by_seed(capsys):
    code, out, _ = run(capsys, "search", "--seed", "a3")
    assert code == 0 and len(parse_sequence(out)) == 3


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_outputs_are_byte_deterministic(capsys, tri):
    path = tri("genus2_10")
    first = run(capsys, "surface", "construct", "--trace", path)
    second = run(capsys, "surface", "construct", "--trace", path)
    assert first == second


def test_parse_sequence_forms():
    assert parse_sequence("1,2, 3") == (1, 2, 3)
    assert parse_sequence("4 5\n6") == (4, 5, 6)

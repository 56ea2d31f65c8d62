import json
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from stabkit import io
from stabkit.cli import main
from stabkit.errors import BadParams, ParseError
from stabkit.generate import FAMILIES, gen, is_laminar
from stabkit.geometry import Instance, Solution, hseg, vseg
from stabkit.render import render_svg

SVG = "{http://www.w3.org/2000/svg}"


def test_gen_deterministic():
    assert io.dump_instance(gen("squares", 5, 7)) == io.dump_instance(gen("squares", 5, 7))
    assert io.dump_instance(gen("squares", 5, 7)) != io.dump_instance(gen("squares", 5, 8))


@pytest.mark.parametrize("seed", range(20))
def test_family_constraints(seed):
    assert all(r.width == r.height for r in gen("squares", 10, seed).rects)
    assert all(r.is_tall for r in gen("tall", 10, seed).rects)
    assert all(not r.is_tall for r in gen("wide", 10, seed).rects)
    assert is_laminar(gen("laminar", 12, seed))
    d = gen("delta_large", 10, seed, {"delta": F(1, 2)})
    g = d.grid_unit
    assert all(F(1, 2) <= max(r.width, r.height) * g and r.width * g <= 1 and r.height * g <= 1
               for r in d.rects)


def test_is_laminar_detects_crossing():
    assert not is_laminar(Instance.from_boxes([(0, 0, 3, 1), (2, 0, 5, 1)]))
    assert is_laminar(Instance.from_boxes([(0, 0, 5, 1), (1, 0, 2, 1), (6, 0, 7, 1)]))


def test_gen_bad_params():
    with pytest.raises(BadParams):
        gen("nope", 3, 1)
    with pytest.raises(BadParams):
        gen("uniform", -1, 1)
    with pytest.raises(BadParams):
        gen("delta_large", 3, 1, {"delta": 2})


def test_gen_empty():
    assert gen("uniform", 0, 1).n == 0


@settings(max_examples=60)
@given(st.sampled_from(FAMILIES), st.integers(0, 15), st.integers(0, 10**6))
def test_round_trip(family, n, seed):
    inst = gen(family, n, seed)
    back = io.load_instance(io.dump_instance(inst))
    assert back == inst
    assert io.dump_instance(back) == io.dump_instance(inst)


def test_grid_unit_inferred_without_field():
    text = json.dumps({"schema_version": "1", "epsilon": "1/4",
                       "rects": [{"x1": "1/2", "y1": 0, "x2": "3/4", "y2": "1/3"}]})
    inst = io.load_instance(text)
    assert inst.grid_unit == F(1, 12)
    assert inst.rects[0].x1 == 6 and inst.rects[0].y2 == 4


@pytest.mark.parametrize("text, where", [
    ("{", "line 1"),
    ('{"schema_version": "1", "epsilon": "1/4"}', "rects"),
    ('{"schema_version": "2", "epsilon": "1/4", "rects": []}', "schema_version"),
    ('{"schema_version": "1", "epsilon": "x", "rects": []}', "epsilon"),
    ('{"schema_version": "1", "epsilon": "1/4", "rects": [{"x1": 0, "y1": 0, "x2": 1}]}',
     "rects[0].y2"),
    ('{"schema_version": "1", "epsilon": "1/4", "rects": [{"x1": 0.5, "y1": 0, "x2": 1, "y2": 1}]}',
     "rects[0].x1"),
    ('{"schema_version": "1", "epsilon": "1/4", "rects": [{"x1": 2, "y1": 0, "x2": 1, "y2": 1}]}',
     "rects[0]"),
    ('{"schema_version": "1", "epsilon": "1/4", "grid_unit": "1/2", '
     '"rects": [{"x1": "1/3", "y1": 0, "x2": 1, "y2": 1}]}', "rects[0].x1"),
])
def test_parse_errors_name_the_field(text, where):
    with pytest.raises(ParseError, match=__import__("re").escape(where)):
        io.load_instance(text)


def test_solution_round_trip():
    sol = Solution.of([hseg(1, 0, 3), vseg(2, 1, 5)], "greedy")
    text = io.dump_solution(sol, F(1, 4))
    assert json.loads(text)["cost"] == "7/4"
    assert io.load_solution(text, F(1, 4)) == sol


def test_render_structure():
    inst = gen("uniform", 5, 1)
    sol = Solution.of([hseg(inst.rects[0].y1, inst.rects[0].x1, inst.rects[0].x2)], "x")
    root = ET.fromstring(render_svg(inst, sol))
    assert len(root.findall(f".//{SVG}rect[@class='rect']")) == 5
    assert len(root.findall(f".//{SVG}line[@class='segment']")) == 1
    assert root.findall(f".//{SVG}g[@id='legend']")


def test_render_flips_y():
    inst = Instance.from_boxes([(0, 0, 1, 1), (0, 5, 1, 6)])
    root = ET.fromstring(render_svg(inst))
    low, high = root.findall(f".//{SVG}rect[@class='rect']")
    assert float(high.get("y")) < float(low.get("y"))


def test_render_empty_instance():
    ET.fromstring(render_svg(Instance(())))


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_cli_solve_verify(tmp_path, capsys):
    inst = tmp_path / "a.json"
    sol = tmp_path / "s.json"
    assert run(["gen", "--family", "uniform", "--n", "3", "--seed", "1", "--out", str(inst)],
               capsys)[0] == 0
    code, out = run(["solve", "--instance", str(inst), "--solver", "exact", "--out", str(sol)],
                    capsys)
    assert code == 0 and json.loads(out.out)["feasible"] is True
    code, out = run(["verify", "--instance", str(inst), "--solution", str(sol)], capsys)
    assert code == 0 and json.loads(out.out)["feasible"] is True
    code, out = run(["compare", "--instance", str(inst), "--solvers", "exact"], capsys)
    assert "1.000000" in out.out


def test_cli_verify_infeasible_solution(tmp_path, capsys):
    inst = tmp_path / "a.json"
    inst.write_text(io.dump_instance(Instance.from_boxes([(0, 0, 2, 1)])))
    bad = tmp_path / "s.json"
    bad.write_text(io.dump_solution(Solution.of([hseg(0, 0, 1)]), 1))
    assert run(["verify", "--instance", str(inst), "--solution", str(bad)], capsys)[0] == 1


def test_cli_bad_input(tmp_path, capsys):
    inst = tmp_path / "a.json"
    inst.write_text("{oops")
    code, out = run(["solve", "--instance", str(inst)], capsys)
    assert code == 2 and "ParseError" in out.err
    inst.write_text(io.dump_instance(gen("uniform", 3, 1)))
    code, out = run(["solve", "--instance", str(inst), "--solver", "magic"], capsys)
    assert code == 2 and "UnknownSolver" in out.err
    code, _ = run(["solve", "--instance", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_cli_compare_dp_not_above_greedy(tmp_path, capsys):
    paths = []
    for seed in range(5):
        p = tmp_path / f"t{seed}.json"
        p.write_text(io.dump_instance(gen("tall", 6, seed)))
        paths.append(str(p))
    code, out = run(["compare", "--instance", *paths, "--solvers", "greedy,dp",
                     "--offset", "0"], capsys)
    assert code == 0
    rows = [line.split() for line in out.out.splitlines()[1:]]
    cost = {(r[0], r[1]): F(r[2]) for r in rows}
    for p in paths:
        assert cost[(p, "dp")] <= cost[(p, "greedy")]


def test_cli_render(tmp_path, capsys):
    inst = tmp_path / "a.json"
    svg = tmp_path / "a.svg"
    inst.write_text(io.dump_instance(gen("tall", 4, 2)))
    assert run(["render", "--instance", str(inst), "--solver", "greedy", "--out", str(svg)],
               capsys)[0] == 0
    root = ET.fromstring(svg.read_text())
    assert len(root.findall(f".//{SVG}rect[@class='rect']")) == 4


def test_cli_bench_sorted_and_thread_independent(tmp_path, capsys):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"b{threads}.csv"
        assert run(["bench", "--corpus-dir", str(tmp_path / "c"), "--family", "squares",
                    "--n", "5", "--count", "4", "--seed", "3", "--solvers", "exact,greedy,dp2eps",
                    "--offset", "0", "--threads", threads, "--out", str(out)], capsys)[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert lines[0] == "instance,solver,cost,ratio_vs_exact,wall_ms"
    keys = [tuple(line.split(",")[:2]) for line in lines[1:]]
    assert keys == sorted(keys) and len(keys) == 12
    assert all(line.endswith(",") for line in lines[1:])


def test_cli_bench_timing_column(tmp_path, capsys):
    out = tmp_path / "b.csv"
    run(["bench", "--corpus-dir", str(tmp_path / "c"), "--n", "3", "--count", "1",
         "--solvers", "greedy", "--timing", "--out", str(out)], capsys)
    row = out.read_text().splitlines()[1].split(",")
    assert float(row[-1]) >= 0

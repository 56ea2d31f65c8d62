"""Command line entry point: ``stabkit gen|solve|verify|compare|render|bench``.

Exit codes: 0 success, 1 a solver emitted an infeasible solution,
2 bad input (parse errors, unknown solvers, violated preconditions).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import io
from .baseline import OracleBudget, exact_oracle, greedy_cover
from .delta_large import DeltaConfig, solve_delta_large
from .dp import DpConfig, solve_hv_2eps, solve_hv_tall, solve_stabbing
from .errors import Infeasible, ParseError, StabError, UnknownSolver, VerticalLeak
from .generate import FAMILIES, gen
from .geometry import Instance, verify
from .render import render_svg

SOLVERS = ("exact", "greedy", "dp", "dp2eps", "stabbing", "delta")


class InfeasibleOutput(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _offset(text: str):
    if text == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("offset must be 'all' or an integer") from None


def make_solver(name: str, eps=Fraction(1, 4), delta=Fraction(1, 2), offset="all") -> Callable:
    cfg = DpConfig(eps=eps, offset_policy=offset)
    table = {
        "exact": lambda inst: exact_oracle(inst, budget=OracleBudget(max_n=12, max_cands=256)),
        "greedy": greedy_cover,
        "dp": lambda inst: solve_hv_tall(inst, cfg)[0],
        "dp2eps": lambda inst: solve_hv_2eps(inst, cfg),
        "stabbing": lambda inst: solve_stabbing(inst, cfg),
        "delta": lambda inst: solve_delta_large(inst, DeltaConfig(
            delta=delta, eps=eps, dp_offset=0 if offset == "all" else offset)),
    }
    if name not in table:
        raise UnknownSolver(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}")
    return table[name]


def run_solver(name: str, inst: Instance, args) -> tuple:
    """``(solution, row)``; the row's feasibility comes from ``verify``."""
    solver = make_solver(name, args.eps, args.delta, args.offset)
    t0 = time.perf_counter()
    sol = solver(inst)
    wall = (time.perf_counter() - t0) * 1000
    verdict = verify(inst, sol)
    row = {"solver_tag": name, "cost": io.rat(sol.cost * inst.grid_unit),
           "feasible": verdict.feasible}
    if getattr(args, "timing", False):
        row["wall_ms"] = round(wall, 3)
    return sol, row


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> Instance:
    return io.load_instance(_read(path))


def cmd_gen(args) -> int:
    params = {"eps": args.eps, "delta": args.delta}
    if args.max_side is not None:
        params["max_side"] = args.max_side
    if args.extent is not None:
        params["extent"] = args.extent
    _emit(io.dump_instance(gen(args.family, args.n, args.seed, params)), args.out)
    return 0


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    sol, row = run_solver(args.solver, inst, args)
    if args.out:
        Path(args.out).write_text(io.dump_solution(sol, inst.grid_unit))
    sys.stdout.write(io.dumps(row))
    if not row["feasible"]:
        raise InfeasibleOutput(f"{args.solver} produced an infeasible solution")
    return 0


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    sol = io.load_solution(_read(args.solution), inst.grid_unit)
    verdict = verify(inst, sol)
    sys.stdout.write(io.dumps({"feasible": verdict.feasible, "unstabbed": verdict.unstabbed,
                               "cost": io.rat(verdict.recomputed_cost * inst.grid_unit)}))
    return 0 if verdict.feasible else 1


def _report(paths: list, solvers: list, args) -> list:
    """Rows sorted by (instance, solver); ratios against ``exact`` when it ran."""
    def one(path):
        inst = _load(path)
        rows = []
        for name in solvers:
            _, row = run_solver(name, inst, args)
            row["instance"] = path
            rows.append(row)
        exact = next((r for r in rows if r["solver_tag"] == "exact"), None)
        for r in rows:
            if exact is not None and Fraction(exact["cost"]) > 0:
                r["ratio_vs_exact"] = f"{float(Fraction(r['cost']) / Fraction(exact['cost'])):.6f}"
            elif exact is not None:
                r["ratio_vs_exact"] = "1.000000" if Fraction(r["cost"]) == 0 else "inf"
            else:
                r["ratio_vs_exact"] = ""
        return rows

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(one, paths))
    rows = sorted((r for rs in results for r in rs),
                  key=lambda r: (r["instance"], r["solver_tag"]))
    bad = [r for r in rows if not r["feasible"]]
    if bad:
        sys.stdout.write(io.dumps(rows))
        raise InfeasibleOutput(f"infeasible output in {len(bad)} row(s)")
    return rows


def _solver_list(text: str) -> list:
    names = [s for s in text.split(",") if s]
    for s in names:
        if s not in SOLVERS:
            raise UnknownSolver(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
    return names


def cmd_compare(args) -> int:
    rows = _report(args.instance, _solver_list(args.solvers), args)
    cols = ["instance", "solver_tag", "cost", "feasible", "ratio_vs_exact"]
    if args.timing:
        cols.append("wall_ms")
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(cols, widths)).rstrip())
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    if args.instance:
        paths = list(args.instance)
    else:
        if not args.corpus_dir:
            raise ParseError("bench needs --instance files or --corpus-dir")
        d = Path(args.corpus_dir)
        d.mkdir(parents=True, exist_ok=True)
        paths = []
        for k in range(args.count):
            p = d / f"{args.family}_n{args.n}_s{args.seed + k}.json"
            p.write_text(io.dump_instance(gen(args.family, args.n, args.seed + k,
                                              {"eps": args.eps, "delta": args.delta})))
            paths.append(str(p))
    rows = _report(paths, _solver_list(args.solvers), args)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "solver", "cost", "ratio_vs_exact", "wall_ms"])
    for r in rows:
        w.writerow([r["instance"], r["solver_tag"], r["cost"], r["ratio_vs_exact"],
                    r.get("wall_ms", "")])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_render(args) -> int:
    inst = _load(args.instance)
    sol = None
    if args.solution:
        sol = io.load_solution(_read(args.solution), inst.grid_unit)
    elif args.solver:
        sol, row = run_solver(args.solver, inst, args)
        if not row["feasible"]:
            raise InfeasibleOutput(f"{args.solver} produced an infeasible solution")
    _emit(render_svg(inst, sol, title=Path(args.instance).name), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=_frac, default=Fraction(1, 4))
    common.add_argument("--delta", type=_frac, default=Fraction(1, 2))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--offset", type=_offset, default="all")
    common.add_argument("--out")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--timing", action="store_true",
                        help="record wall-clock times (makes output run-dependent)")

    p = argparse.ArgumentParser(prog="stabkit", description="Rectangle stabbing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("--family", choices=FAMILIES, default="uniform")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--max-side", type=int)
    g.add_argument("--extent", type=int)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="run one solver and verify")
    s.add_argument("--instance", required=True)
    s.add_argument("--solver", default="greedy")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check a solution file")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", parents=[common], help="solver table over instances")
    c.add_argument("--instance", nargs="+", required=True)
    c.add_argument("--solvers", default="exact,greedy,dp2eps")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("render", parents=[common], help="SVG of an instance and solution")
    r.add_argument("--instance", required=True)
    r.add_argument("--solution")
    r.add_argument("--solver")
    r.set_defaults(func=cmd_render)

    b = sub.add_parser("bench", parents=[common], help="CSV benchmark over a corpus")
    b.add_argument("--instance", nargs="*")
    b.add_argument("--corpus-dir")
    b.add_argument("--family", choices=FAMILIES, default="uniform")
    b.add_argument("--n", type=int, default=8)
    b.add_argument("--count", type=int, default=10)
    b.add_argument("--solvers", default="exact,greedy,dp2eps")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleOutput, Infeasible, VerticalLeak) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except StabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

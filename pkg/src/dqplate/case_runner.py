"""Case-file driven command line: solve, sweep, bench, converge.

Cases are plain JSON documents validated strictly (unknown keys rejected).
Each run writes CSV artifacts with a header row, '.' decimals and 12
significant digits, so outputs are comparable across implementations.

Exit codes: 0 success, 2 unreadable or invalid case file, 3 solver did not
converge (the iteration report is dumped to stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from time import perf_counter

import numpy as np

from . import linear_bending, newton_solver, plate_model
from .bc_builder import BC_KINDS, CLAMPED
from .dq_core import CHEBYSHEV, UNIFORM
from .newton_solver import FINITE_DIFFERENCE, SJT_ANALYTIC
from .plate_model import PlateSpec

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_CONVERGENCE = 3

_GRID_ALIASES = {
    "uniform": UNIFORM,
    "chebyshev": CHEBYSHEV,
    "chebyshev_mapped": CHEBYSHEV,
}
_JACOBIAN_ALIASES = {"sjt": SJT_ANALYTIC, "fd": FINITE_DIFFERENCE}

WORKERS_ENV = "DQPLATE_WORKERS"


class CaseError(ValueError):
    """Invalid case file; the message carries the offending field path."""


@dataclass(frozen=True)
class SolverOptions:
    tol: float = newton_solver.DEFAULT_TOL
    max_iter: int = newton_solver.DEFAULT_MAX_ITER
    jacobian: str = SJT_ANALYTIC


@dataclass(frozen=True)
class Case:
    spec: PlateSpec
    solver: SolverOptions
    sweep_loads: list[float] | None
    bench_grids: list[int] | None
    bench_repeats: int
    conv_grids: list[int] | None
    conv_kinds: list[str]
    conv_reference: tuple[int, str] | None
    conv_loads: list[float] | None
    conv_linear: bool
    conv_delta: float


def _expect_mapping(node, path):
    if not isinstance(node, dict):
        raise CaseError(f"{path}: expected an object")
    return node


def _take(node: dict, path: str, key: str, required=False, default=None):
    if key in node:
        return node.pop(key)
    if required:
        raise CaseError(f"{path}: missing required key '{key}'")
    return default


def _no_leftovers(node: dict, path: str) -> None:
    if node:
        raise CaseError(f"{path}: unknown key '{sorted(node)[0]}'")


def _number(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CaseError(f"{path}: expected a number")
    if positive and value <= 0:
        raise CaseError(f"{path}: must be positive")
    return float(value)


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise CaseError(f"{path}: expected an integer")
    return value


def _grid_kind(value, path):
    if value not in _GRID_ALIASES:
        raise CaseError(
            f"{path}: unknown grid kind {value!r}; expected one of "
            f"{sorted(_GRID_ALIASES)}"
        )
    return _GRID_ALIASES[value]


def _parse_material(node, path):
    node = dict(_expect_mapping(node, path))
    if "e" in node:
        e = _number(_take(node, path, "e", required=True), f"{path}.e", positive=True)
        nu = _number(_take(node, path, "nu", required=True), f"{path}.nu")
        _no_leftovers(node, path)
        return {"e1": e, "e2": e, "nu12": nu, "g12": e / (2.0 * (1.0 + nu))}
    out = {}
    for key in ("e1", "e2", "g12"):
        out[key] = _number(
            _take(node, path, key, required=True), f"{path}.{key}", positive=True
        )
    out["nu12"] = _number(_take(node, path, "nu12", required=True), f"{path}.nu12")
    _no_leftovers(node, path)
    return out


def _parse_plate(node, path) -> PlateSpec:
    node = dict(_expect_mapping(node, path))
    a = _number(_take(node, path, "a", required=True), f"{path}.a", positive=True)
    b_raw = _take(node, path, "b")
    b = a if b_raw is None else _number(b_raw, f"{path}.b", positive=True)
    h = _number(_take(node, path, "h", required=True), f"{path}.h", positive=True)
    material = _parse_material(
        _take(node, path, "material", required=True), f"{path}.material"
    )
    bc = _take(node, path, "bc", required=True)
    if bc not in BC_KINDS:
        raise CaseError(f"{path}.bc: unknown kind {bc!r}; expected one of {BC_KINDS}")
    q = _number(_take(node, path, "q", required=True), f"{path}.q")
    grid = dict(_expect_mapping(_take(node, path, "grid", required=True), f"{path}.grid"))
    nx = _integer(_take(grid, f"{path}.grid", "nx", required=True), f"{path}.grid.nx")
    ny = _integer(_take(grid, f"{path}.grid", "ny", required=True), f"{path}.grid.ny")
    kind = _grid_kind(
        _take(grid, f"{path}.grid", "kind", default="chebyshev"), f"{path}.grid.kind"
    )
    _no_leftovers(grid, f"{path}.grid")
    _no_leftovers(node, path)
    try:
        return PlateSpec(
            a=a, b=b, h=h, bc=bc, q=q, nx=nx, ny=ny, grid_kind=kind, **material
        )
    except ValueError as exc:
        raise CaseError(f"{path}: {exc}") from exc


def _parse_solver(node, path) -> SolverOptions:
    if node is None:
        return SolverOptions()
    node = dict(_expect_mapping(node, path))
    tol = _take(node, path, "tol")
    max_iter = _take(node, path, "max_iter")
    jac = _take(node, path, "jacobian")
    _no_leftovers(node, path)
    opts = SolverOptions()
    if tol is not None:
        opts = replace(opts, tol=_number(tol, f"{path}.tol", positive=True))
    if max_iter is not None:
        opts = replace(opts, max_iter=_integer(max_iter, f"{path}.max_iter"))
    if jac is not None:
        if jac not in _JACOBIAN_ALIASES:
            raise CaseError(
                f"{path}.jacobian: expected one of {sorted(_JACOBIAN_ALIASES)}"
            )
        opts = replace(opts, jacobian=_JACOBIAN_ALIASES[jac])
    return opts


def parse_case(path: str | Path) -> Case:
    """Read and validate one case file; raises CaseError on any defect."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CaseError(f"cannot read case file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    doc = dict(_expect_mapping(doc, "case"))

    spec = _parse_plate(_take(doc, "case", "plate", required=True), "plate")
    solver = _parse_solver(_take(doc, "case", "solver"), "solver")

    sweep_loads = None
    sweep = _take(doc, "case", "sweep")
    if sweep is not None:
        sweep = dict(_expect_mapping(sweep, "sweep"))
        loads = _take(sweep, "sweep", "loads", required=True)
        if not isinstance(loads, list) or not loads:
            raise CaseError("sweep.loads: expected a non-empty list")
        sweep_loads = [
            _number(x, f"sweep.loads[{i}]", positive=True) for i, x in enumerate(loads)
        ]
        _no_leftovers(sweep, "sweep")

    bench_grids, bench_repeats = None, 3
    bench = _take(doc, "case", "bench")
    if bench is not None:
        bench = dict(_expect_mapping(bench, "bench"))
        grids = _take(bench, "bench", "grids", required=True)
        if not isinstance(grids, list) or not grids:
            raise CaseError("bench.grids: expected a non-empty list")
        bench_grids = [_integer(g, f"bench.grids[{i}]") for i, g in enumerate(grids)]
        rep = _take(bench, "bench", "repeats")
        if rep is not None:
            bench_repeats = _integer(rep, "bench.repeats")
            if bench_repeats < 1:
                raise CaseError("bench.repeats: must be at least 1")
        _no_leftovers(bench, "bench")

    conv_grids, conv_kinds, conv_reference = None, [], None
    conv_loads, conv_linear, conv_delta = None, False, 1e-5
    conv = _take(doc, "case", "convergence")
    if conv is not None:
        conv = dict(_expect_mapping(conv, "convergence"))
        grids = _take(conv, "convergence", "grids", required=True)
        if not isinstance(grids, list) or not grids:
            raise CaseError("convergence.grids: expected a non-empty list")
        conv_grids = [
            _integer(g, f"convergence.grids[{i}]") for i, g in enumerate(grids)
        ]
        kinds_raw = _take(conv, "convergence", "kinds", default=["chebyshev"])
        if not isinstance(kinds_raw, list) or not kinds_raw:
            raise CaseError("convergence.kinds: expected a non-empty list")
        conv_kinds = [
            _grid_kind(k, f"convergence.kinds[{i}]") for i, k in enumerate(kinds_raw)
        ]
        ref = _take(conv, "convergence", "reference")
        if ref is not None:
            ref = dict(_expect_mapping(ref, "convergence.reference"))
            ref_n = _integer(
                _take(ref, "convergence.reference", "n", required=True),
                "convergence.reference.n",
            )
            ref_kind = _grid_kind(
                _take(ref, "convergence.reference", "kind", default="chebyshev"),
                "convergence.reference.kind",
            )
            _no_leftovers(ref, "convergence.reference")
            conv_reference = (ref_n, ref_kind)
        loads = _take(conv, "convergence", "loads")
        if loads is not None:
            if not isinstance(loads, list) or not loads:
                raise CaseError("convergence.loads: expected a non-empty list")
            conv_loads = [
                _number(x, f"convergence.loads[{i}]", positive=True)
                for i, x in enumerate(loads)
            ]
        linear = _take(conv, "convergence", "linear_comparison", default=False)
        if not isinstance(linear, bool):
            raise CaseError("convergence.linear_comparison: expected a boolean")
        conv_linear = linear
        delta = _take(conv, "convergence", "delta")
        if delta is not None:
            conv_delta = _number(delta, "convergence.delta", positive=True)
        _no_leftovers(conv, "convergence")

    _no_leftovers(doc, "case")
    return Case(
        spec=spec,
        solver=solver,
        sweep_loads=sweep_loads,
        bench_grids=bench_grids,
        bench_repeats=bench_repeats,
        conv_grids=conv_grids,
        conv_kinds=conv_kinds,
        conv_reference=conv_reference,
        conv_loads=conv_loads,
        conv_linear=conv_linear,
        conv_delta=conv_delta,
    )


# ---------------------------------------------------------------------------
# CSV helpers: fixed column order, 12 significant digits, '.' decimals.
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _dump_report(report: newton_solver.NewtonReport) -> None:
    print("solver did not converge:", file=sys.stderr)
    print(f"  strategy: {report.jacobian_strategy}", file=sys.stderr)
    print(f"  iterations: {report.iterations}", file=sys.stderr)
    print(f"  failure: {report.failure}", file=sys.stderr)
    hist = ", ".join(f"{r:.6g}" for r in report.residual_history)
    print(f"  residual history: [{hist}]", file=sys.stderr)


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Modes.
# ---------------------------------------------------------------------------


def run_case(case: Case, out_dir: Path) -> int:
    """Single solve: writes solution.csv and summary.csv."""
    start = perf_counter()
    sol = newton_solver.solve_plate(
        case.spec,
        tol=case.solver.tol,
        max_iter=case.solver.max_iter,
        strategy=case.solver.jacobian,
    )
    wall = perf_counter() - start
    if not sol.report.converged:
        _dump_report(sol.report)
        return EXIT_NO_CONVERGENCE

    fld = sol.field
    rows = []
    for i, xv in enumerate(fld.x):
        for j, yv in enumerate(fld.y):
            rows.append([xv, yv, fld.w[i, j], fld.u[i, j], fld.v[i, j]])
    _write_csv(out_dir / "solution.csv", ["x", "y", "w", "u", "v"], rows)
    _write_csv(
        out_dir / "summary.csv",
        ["center_w_over_h", "iterations", "final_residual", "wall_time_s"],
        [[fld.center_deflection_ratio, sol.report.iterations,
          sol.report.final_residual, wall]],
    )
    return EXIT_OK


def run_sweep(case: Case, out_dir: Path) -> int:
    """Load sweep with warm starts: writes sweep.csv."""
    if case.sweep_loads is None:
        raise CaseError("case has no 'sweep' block")
    points = newton_solver.load_sweep(
        case.spec,
        case.sweep_loads,
        tol=case.solver.tol,
        max_iter=case.solver.max_iter,
        strategy=case.solver.jacobian,
    )
    _write_csv(
        out_dir / "sweep.csv",
        ["q", "center_w_over_h", "iterations", "converged"],
        [[p.q, p.center_w_over_h, p.iterations, p.converged] for p in points],
    )
    if not all(p.converged for p in points):
        print(f"sweep stopped at q = {points[-1].q:g}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _bench_one(spec: PlateSpec, solver: SolverOptions, repeats: int):
    sys_n = plate_model.build_system(spec)
    base = newton_solver.solve_plate(
        spec, tol=solver.tol, max_iter=solver.max_iter, system=sys_n
    )
    w_star = base.field.w_stack

    def time_best(fn):
        best = np.inf
        for _ in range(repeats):
            t0 = perf_counter()
            fn()
            best = min(best, perf_counter() - t0)
        return best * 1e3

    jac_sjt = time_best(lambda: plate_model.jacobian(sys_n, w_star))
    jac_fd = time_best(
        lambda: newton_solver.fd_jacobian(
            lambda z: plate_model.residual(sys_n, z), w_star
        )
    )

    out = []
    for strategy, jac_ms in ((SJT_ANALYTIC, jac_sjt), (FINITE_DIFFERENCE, jac_fd)):
        t0 = perf_counter()
        sol = newton_solver.solve_plate(
            spec, tol=solver.tol, max_iter=solver.max_iter,
            strategy=strategy, system=sys_n,
        )
        solve_ms = (perf_counter() - t0) * 1e3
        out.append(
            {
                "n": sys_n.n,
                "strategy": strategy,
                "jac_ms": jac_ms,
                "solve_ms": solve_ms,
                "iterations": sol.report.iterations,
                "w": sol.field.w_stack,
                "converged": sol.report.converged,
            }
        )
    return out


def run_bench(case: Case, out_dir: Path) -> int:
    """Jacobian-strategy benchmark across grid sizes: writes bench.csv."""
    if case.bench_grids is None:
        raise CaseError("case has no 'bench' block")
    rows = []
    for npts in case.bench_grids:
        spec = replace(case.spec, nx=npts, ny=npts)
        for rec in _bench_one(spec, case.solver, case.bench_repeats):
            if not rec["converged"]:
                print(f"bench solve failed at grid {npts}", file=sys.stderr)
                return EXIT_NO_CONVERGENCE
            rows.append(
                [rec["n"], rec["strategy"], rec["jac_ms"], rec["solve_ms"],
                 rec["iterations"]]
            )
    _write_csv(
        out_dir / "bench.csv",
        ["n", "strategy", "jac_ms", "solve_ms", "iterations"],
        rows,
    )
    return EXIT_OK


def _converge_point(spec: PlateSpec, solver: SolverOptions, loads):
    """Center w/h at each load for one grid, warm-started in load order."""
    points = newton_solver.load_sweep(
        spec, loads, tol=solver.tol, max_iter=solver.max_iter,
        strategy=solver.jacobian,
    ) if len(loads) > 1 else None
    if points is None:
        sol = newton_solver.solve_plate(
            replace(spec, q=loads[0]), tol=solver.tol,
            max_iter=solver.max_iter, strategy=solver.jacobian,
        )
        if not sol.report.converged:
            return None
        return [(loads[0], sol.field.center_deflection_ratio)]
    if not all(p.converged for p in points):
        return None
    return [(p.q, p.center_w_over_h) for p in points]


def run_convergence(case: Case, out_dir: Path) -> int:
    """Grid study (and optional boundary-treatment comparison).

    Writes convergence.csv; with a reference grid an absolute-difference
    column is included.  With linear_comparison, linear_comparison.csv gets
    the built-in and auxiliary-point center coefficients against the
    classical series value.
    """
    if case.conv_grids is None:
        raise CaseError("case has no 'convergence' block")
    loads = case.conv_loads or [case.spec.q]

    tasks = [
        (kind, npts)
        for kind in case.conv_kinds
        for npts in case.conv_grids
    ]

    def solve_task(task):
        kind, npts = task
        spec = replace(case.spec, nx=npts, ny=npts, grid_kind=kind)
        return _converge_point(spec, case.solver, loads)

    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_task, tasks))
    else:
        results = [solve_task(t) for t in tasks]

    reference = None
    if case.conv_reference is not None:
        ref_n, ref_kind = case.conv_reference
        ref_spec = replace(case.spec, nx=ref_n, ny=ref_n, grid_kind=ref_kind)
        reference = _converge_point(ref_spec, case.solver, loads)
        if reference is None:
            print("reference grid did not converge", file=sys.stderr)
            return EXIT_NO_CONVERGENCE

    header = ["kind", "n", "q", "center_w_over_h"]
    if reference is not None:
        header.append("abs_diff_to_reference")
    rows = []
    for task, res in zip(tasks, results):
        kind, npts = task
        if res is None:
            print(f"grid {kind} {npts} did not converge", file=sys.stderr)
            return EXIT_NO_CONVERGENCE
        for k, (q, center) in enumerate(res):
            row = [kind, npts, q, center]
            if reference is not None:
                row.append(abs(center - reference[k][1]))
            rows.append(row)
    _write_csv(out_dir / "convergence.csv", header, rows)

    if case.conv_linear:
        try:
            reference_center = linear_bending.linear_reference_center(case.spec)
        except ValueError as exc:
            raise CaseError(f"convergence.linear_comparison: {exc}") from exc
        lin_rows = []
        builtin_name = "dqcy" if case.spec.bc == CLAMPED else "dqwb"
        for npts in case.conv_grids:
            spec = replace(case.spec, nx=npts, ny=npts)
            center_b = linear_bending.linear_center_builtin(spec)
            center_d = linear_bending.linear_center_delta(spec, case.conv_delta)
            for scheme, center in ((builtin_name, center_b), ("delta", center_d)):
                lin_rows.append(
                    [scheme, npts, center, reference_center,
                     abs(center - reference_center)]
                )
        _write_csv(
            out_dir / "linear_comparison.csv",
            ["scheme", "n", "center_w_over_h", "series_center_w_over_h",
             "abs_error"],
            lin_rows,
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqplate",
        description="Differential-quadrature plate bending runs from JSON case files.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, help_text in (
        ("solve", "single nonlinear solve; writes solution.csv and summary.csv"),
        ("sweep", "load sweep with warm starts; writes sweep.csv"),
        ("bench", "Jacobian strategy benchmark; writes bench.csv"),
        ("converge", "grid study; writes convergence.csv"),
    ):
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("case", help="path to the JSON case file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--tol", type=float, help="override solver tolerance")
        p.add_argument("--max-iter", type=int, help="override iteration budget")
        p.add_argument(
            "--jacobian", choices=sorted(_JACOBIAN_ALIASES),
            help="override Jacobian strategy",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        case = parse_case(args.case)
    except CaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    solver = case.solver
    if args.tol is not None:
        solver = replace(solver, tol=args.tol)
    if args.max_iter is not None:
        solver = replace(solver, max_iter=args.max_iter)
    if args.jacobian is not None:
        solver = replace(solver, jacobian=_JACOBIAN_ALIASES[args.jacobian])
    case = replace(case, solver=solver)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    runner = {
        "solve": run_case,
        "sweep": run_sweep,
        "bench": run_bench,
        "converge": run_convergence,
    }[args.mode]
    try:
        return runner(case, out_dir)
    except CaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

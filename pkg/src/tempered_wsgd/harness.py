"""Convergence sweeps: one row per grid, rows runnable in parallel.

A row is described by a plain dict so it can be shipped to worker
processes; the manufactured case is rebuilt on the worker side.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

from .bs_solver import BSProblem, solve_bs
from .config import RunConfig, parse_number
from .diffusion_solver import DiffusionProblem, solve
from .mms import make_case
from .report import ConvergenceReport, l2_h, linf, load_golden, rms
from .tempered_ops import GridFn, build_weights, left_all, right_all


def derivative_errors(case, order: int, free_param: float, M: int):
    """Pointwise errors of the discrete tempered derivative on ``M`` intervals of [0, 1].

    The left operator is evaluated at x_1..x_M, which needs one sample past
    the right end; the right operator at the interior nodes x_1..x_{M-1}.
    """
    h = 1.0 / M
    lam = case.params["lambda_l"]
    if case.name == "deriv-left":
        u = GridFn.sample(case.profile, 0.0, 1.0 + h, M + 1)
        w = build_weights(order, case.alpha, lam, h, free_param, M + 2)
        approx = left_all(w, u)
        x = u.x[1 : M + 1]
    else:
        u = GridFn.sample(case.profile, 0.0, 1.0, M)
        w = build_weights(order, case.alpha, lam, h, free_param, M + 1)
        approx = right_all(w, u)
        x = u.x[1:M]
    return approx - case.target(x)


def run_row(task: dict) -> dict:
    """Errors for one grid; failures are reported in ``error`` instead of raised."""
    M, N = task["M"], task.get("N")
    h = 1.0 / M
    out = {"h": h, "tau": None if N is None else task["T"] / N, "l2": math.nan, "linf": math.nan, "error": None}
    try:
        case = make_case(task["case"], **task["case_params"])
        if task["command"] == "deriv-test":
            e = derivative_errors(case, task["order"], task["free_param"], M)
            out["l2"] = rms(e, M + 1)
        elif task["command"] == "diffusion":
            res = solve(DiffusionProblem.from_case(case), task["order"], M, N, task["free_param"])
            e = (res.grid.values - case.exact(res.grid.x, case.params["T"]))[1:-1]
            out["l2"] = l2_h(e, h)
        else:
            prob = BSProblem.from_case(case)
            res = solve_bs(prob, M, N, task["free_param"], task["order"], task.get("boundary", "one-sided"))
            e = (res.grid.values - case.exact(res.grid.x, 0.0))[1:-1]
            out["l2"] = l2_h(e, h)
        out["linf"] = linf(e)
    except Exception as exc:  # surfaced per row, the sweep goes on
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def solution_csv(cfg: RunConfig) -> str:
    """``x,u,exact,error`` at the final time on the finest grid of a PDE config."""
    if cfg.command not in ("diffusion", "black-scholes"):
        raise ValueError(f"{cfg.command} has no solution profile")
    task = tasks_for(cfg)[-1]
    case = make_case(task["case"], **task["case_params"])
    if cfg.command == "diffusion":
        res = solve(DiffusionProblem.from_case(case), cfg.order, task["M"], task["N"], cfg.free_param)
        exact = case.exact(res.grid.x, case.params["T"])
    else:
        res = solve_bs(BSProblem.from_case(case), task["M"], task["N"], cfg.free_param, cfg.order, cfg.boundary)
        exact = case.exact(res.grid.x, 0.0)
    lines = ["x,u,exact,error"]
    for x, u, e in zip(res.grid.x, res.grid.values, exact):
        lines.append(f"{x:.10e},{u:.10e},{e:.10e},{u - e:.5e}")
    return "\n".join(lines) + "\n"


def _case_params(cfg: RunConfig) -> dict:
    params = dict(cfg.case_params)
    if cfg.alpha is not None:
        params["alpha"] = cfg.alpha
    if cfg.lam is not None:
        params["lam"] = cfg.lam
    return params


def tasks_for(cfg: RunConfig) -> list:
    params = _case_params(cfg)
    T = params.get("T", 1.0)
    tasks = []
    for h in cfg.grid:
        M = cfg.intervals(h)
        N = None if cfg.command == "deriv-test" else cfg.steps(h, T)
        tasks.append(
            dict(
                command=cfg.command,
                case=cfg.case,
                case_params=params,
                order=cfg.order,
                free_param=cfg.free_param,
                M=M,
                N=N,
                T=T,
                boundary=cfg.boundary,
            )
        )
    return tasks


def _map(tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [run_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_row, tasks))


def _report(rows, meta):
    return ConvergenceReport.from_errors(
        [r["h"] for r in rows],
        [r["tau"] for r in rows],
        [r["l2"] for r in rows],
        [r["linf"] for r in rows],
        meta,
        [r["error"] for r in rows],
    )


def sweep(cfg: RunConfig, jobs: int = 1) -> ConvergenceReport:
    """Run every grid of a deriv-test, diffusion or black-scholes config."""
    t0 = time.perf_counter()
    tasks = tasks_for(cfg)
    rows = _map(tasks, jobs)
    meta = dict(
        command=cfg.command,
        case=cfg.case,
        order=cfg.order,
        free_param=cfg.free_param,
        case_params=tasks[0]["case_params"],
        tau=cfg.tau,
        wall_time=time.perf_counter() - t0,
    )
    return _report(rows, meta)


def table_configs(table: str, max_rows: int | None = None) -> list:
    """One config per column of a reference table."""
    ref = load_golden(table)
    cfgs = []
    for col in ref["columns"]:
        grid = [parse_number(h) for h in col["h"]][:max_rows]
        kw = dict(command=ref["command"], case=ref["case"], order=ref["order"], grid=grid)
        if ref["command"] == "deriv-test":
            kw.update(alpha=col["alpha"], lam=col["lam"], free_param=ref["free_param"])
        else:
            kw["free_param"] = col["free_param"]
            kw["tau"] = ref["tau"] if ref["tau"] == "h" else float(ref["tau"])
            if "alpha" in ref:
                kw.update(alpha=ref["alpha"], lam=ref["lam"])
        cfgs.append(RunConfig(**kw).validate())
    return cfgs


def run_table(table: str, jobs: int = 1, max_rows: int | None = None) -> list:
    """Reports for every column of a reference table, rows spread over ``jobs`` processes."""
    cfgs = table_configs(table, max_rows)
    t0 = time.perf_counter()
    all_tasks = [tasks_for(c) for c in cfgs]
    flat = _map([t for ts in all_tasks for t in ts], jobs)
    reports, k = [], 0
    elapsed = time.perf_counter() - t0
    for cfg, ts in zip(cfgs, all_tasks):
        rows = flat[k : k + len(ts)]
        k += len(ts)
        meta = dict(table=table, command=cfg.command, case=cfg.case, order=cfg.order, free_param=cfg.free_param)
        meta.update(case_params=ts[0]["case_params"], tau=cfg.tau, wall_time=elapsed)
        reports.append(_report(rows, meta))
    return reports


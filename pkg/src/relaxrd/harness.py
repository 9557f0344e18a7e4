"""Error norms, convergence studies and the brute-force scheme oracle."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import relax_core
from .findiff import fill_ghosts_batch
from .mesh import Field, Grid2D, make_grid, make_grid2d, restrict_to_coarse
from .reconstruct import ReconstructionKind


@dataclass
class ReportRow:
    m: int
    error_l1: float
    error_l2: float
    rate_l1: float | None
    rate_l2: float | None
    wall_time: float


@dataclass
class RunReport:
    rows: list
    refinement_factor: int

    def column(self, name):
        return [getattr(r, name) for r in self.rows]


def error_norm(numeric: Field, reference: Field, which: str = "l1") -> float:
    """Grid-weighted discrete L1 or L2 distance between two fields."""
    ga, gb = numeric.grid, reference.grid
    if isinstance(ga, Grid2D) != isinstance(gb, Grid2D):
        raise ValueError("cannot compare 1D and 2D fields")
    if isinstance(ga, Grid2D):
        same = (ga.x.a, ga.x.b, ga.x.m, ga.y.a, ga.y.b, ga.y.m) == \
               (gb.x.a, gb.x.b, gb.x.m, gb.y.a, gb.y.b, gb.y.m)
        weight = ga.x.h * ga.y.h
    else:
        same = (ga.a, ga.b, ga.m) == (gb.a, gb.b, gb.m)
        weight = ga.h
    if not same:
        raise ValueError("error norms require matching grids")
    e = numeric.interior - reference.interior
    if which == "l1":
        return float(weight * np.abs(e).sum())
    if which == "l2":
        return float(math.sqrt(weight * (e * e).sum()))
    raise ValueError(f"unknown norm {which!r}; use 'l1' or 'l2'")


def _make_grid_for(problem, m, ghost):
    ax, bx = problem.domain_x
    if problem.dim == 2:
        ay, by = problem.domain_y
        return make_grid2d(ax, bx, m, ay, by, m, ghost)
    return make_grid(ax, bx, m, ghost)


def _final_field(problem, cfg, m, t_end):
    grid = _make_grid_for(problem, m, cfg.ghost)
    snaps = relax_core.run(problem, grid, cfg, t_end, [t_end])
    out = Field.zeros(grid)
    out.interior[...] = snaps[-1].fields[0]
    return out


def convergence_study(problem, cfg, m_list, t_end, reference="exact",
                      threads: int = 1) -> RunReport:
    """Errors and observed rates over a nested family of grids.

    `reference` is "exact" (the problem must carry an exact solution) or
    ("fine", m_ref) with m_ref a 3^k multiple of every entry of m_list;
    the fine run is compared by restriction to coincident centers.
    Rates are reported positive: rate_k = log(E_{k-1}/E_k) / log(r).
    """
    m_list = [int(m) for m in m_list]
    if sorted(m_list) != m_list or len(set(m_list)) != len(m_list):
        raise ValueError("m_list must be strictly increasing")
    if len(m_list) >= 2:
        r = m_list[1] // m_list[0]
        for a, b in zip(m_list, m_list[1:]):
            if b != a * r:
                raise ValueError("m_list must refine by one constant integer factor")
    else:
        r = 1

    fine_field = None
    if reference != "exact":
        kind, m_ref = reference
        if kind != "fine":
            raise ValueError(f"unknown reference {reference!r}")
        if problem.dim != 1:
            raise ValueError("fine-grid reference restriction is 1D only")
        fine_field = _final_field(problem, cfg, int(m_ref), t_end)
    elif problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")

    def one(m):
        t0 = time.perf_counter()
        num = _final_field(problem, cfg, m, t_end)
        if fine_field is not None:
            ref = restrict_to_coarse(fine_field, num.grid)
        else:
            ref = Field.zeros(num.grid)
            if problem.dim == 2:
                xc, yc = num.grid.centers()
                ref.interior[...] = problem.exact(t_end, xc[None, :], yc[:, None])
            else:
                ref.interior[...] = problem.exact(t_end, num.grid.centers())
        e1 = error_norm(num, ref, "l1")
        e2 = error_norm(num, ref, "l2")
        return e1, e2, time.perf_counter() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, m_list))
    else:
        results = [one(m) for m in m_list]

    rows = []
    for i, (m, (e1, e2, wt)) in enumerate(zip(m_list, results)):
        if i == 0:
            r1 = r2 = None
        else:
            p1, p2 = results[i - 1][0], results[i - 1][1]
            r1 = math.log(p1 / e1) / math.log(r) if e1 > 0 and p1 > 0 else None
            r2 = math.log(p2 / e2) / math.log(r) if e2 > 0 and p2 > 0 else None
        rows.append(ReportRow(m, e1, e2, r1, r2, wt))
    return RunReport(rows, r)


# ---------------------------------------------------------------------------
# first-order brute-force oracle


def direct_explicit_step(u, grid, problem, dt):
    """One forward-Euler step of u_t = D (A(u) u_x)_x + g, standard 3-point
    flux form with interface diffusivity A((u_j + u_{j+1})/2).  Written
    independently of the relaxed pipeline as an anti-regression oracle."""
    g = grid.ghost
    m, h = grid.m, grid.h
    work = u.copy()
    fill_ghosts_batch(work, g, m, problem.bc_x, 2)
    ui = work[g - 1:g + m + 1]
    state = [work[g:g + m]]
    dcoef = problem.D[0]
    if problem.A[0] is None:
        flux_div = np.zeros(m)
    else:
        mid = 0.5 * (ui[:-1] + ui[1:])
        a_mid = np.asarray(problem.A[0]([mid]), dtype=float)
        flux = dcoef * a_mid * (ui[1:] - ui[:-1]) / h
        flux_div = (flux[1:] - flux[:-1]) / h
    rhs = flux_div
    if problem.g is not None:
        rhs = rhs + problem.g(state)[0]
    out = u.copy()
    out[g:g + m] += dt * rhs
    return out


def oracle_compare(problem, m: int, steps: int, dt=None) -> float:
    """Run the relaxed scheme (constant reconstruction, RK1) against the
    direct explicit discretization and return the max pointwise deviation."""
    cfg = relax_core.SchemeConfig(ReconstructionKind("constant"), relax_core.tableau(1),
                                  gradient_order=2)
    grid = _make_grid_for(problem, m, cfg.ghost)
    if isinstance(grid, Grid2D):
        raise ValueError("the brute-force oracle is 1D")
    eng = relax_core._Engine(problem, grid, cfg)
    arrs = [Field.from_function(grid, fn).values for fn in problem.u0]
    direct = arrs[0].copy()
    dev = 0.0
    t = 0.0
    for _ in range(steps):
        step_dt = dt if dt is not None else min(eng.stable_dt(eng.interiors(arrs)), 1e-3)
        arrs = eng.step_arrays(arrs, step_dt, t)
        direct = direct_explicit_step(direct, grid, problem, step_dt)
        t += step_dt
        dev = max(dev, float(np.max(np.abs(arrs[0] - direct)[grid.ghost:grid.ghost + m])))
    return dev

"""The relaxed scheme: relaxation steps v = -D A(u) grad(u) alternating with
explicit upwinded transport steps of the linear hyperbolic pair, assembled
into an explicit Runge-Kutta stage loop under a parabolic CFL restriction.

Only the zero-relaxation-time limit is implemented: every stage first
projects v onto -D A(u) du/dx (per axis in 2D), splits (u, v) into the
characteristic pair U = (v + phi u)/(2 phi), V = (phi u - v)/(2 phi),
reconstructs both at interfaces and differences the Godunov flux
(phi U^-, -phi V^+).  Reaction terms ride along explicitly with positive
sign on the right-hand side.  Unknowns whose diffusivity vanishes
identically over the current state skip transport and see only reactions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import findiff
from .findiff import is_periodic
from .mesh import Field, Grid2D
from .reconstruct import ReconstructionKind, edges_batch

_TIME_EPS = 1e-12


class SolverFault(RuntimeError):
    """Non-finite value produced by a step; carries the offending location."""

    def __init__(self, message, t=None, unknown=None, index=None):
        super().__init__(message)
        self.t = t
        self.unknown = unknown
        self.index = index


# ---------------------------------------------------------------------------
# tableaux and configuration


@dataclass(frozen=True)
class Tableau:
    name: str
    a: np.ndarray          # strictly lower triangular explicit coefficients
    b: np.ndarray
    order: int

    def __post_init__(self):
        a, b = np.asarray(self.a, float), np.asarray(self.b, float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError(f"{self.name}: stage weights must sum to 1")
        if np.any(np.triu(a) != 0.0):
            raise ValueError(f"{self.name}: explicit tableau must be strictly lower triangular")

    @property
    def stages(self) -> int:
        return len(self.b)


RK1 = Tableau("RK1", np.zeros((1, 1)), np.array([1.0]), 1)
RK2 = Tableau("RK2", np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([0.5, 0.5]), 2)
RK3 = Tableau(
    "RK3",
    np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.25, 0.25, 0.0]]),
    np.array([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]),
    3,
)

_TABLEAUX = {1: RK1, 2: RK2, 3: RK3}


def tableau(order: int) -> Tableau:
    try:
        return _TABLEAUX[int(order)]
    except KeyError:
        raise ValueError(f"Runge-Kutta order must be 1, 2 or 3, got {order}") from None


@dataclass(frozen=True)
class PhiFixed:
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("fixed phi must be positive")


@dataclass(frozen=True)
class PhiAuto:
    """phi = safety * sqrt(D max A), the subcharacteristic-style speed scale.

    Grid- and step-independent, so the upwind dissipation stays at the
    order of the reconstruction instead of polluting it.
    """

    safety: float = 1.0

    def __post_init__(self):
        if not self.safety >= 1.0:
            raise ValueError("phi safety factor must be >= 1")


@dataclass(frozen=True)
class SchemeConfig:
    reconstruction: ReconstructionKind
    tableau: Tableau
    cfl_parabolic: float = 0.25
    phi_policy: object = PhiAuto(1.0)
    gradient_order: Optional[int] = None

    def __post_init__(self):
        go = self.gradient_order
        if go is None:
            go = 2 * self.tableau.order
            object.__setattr__(self, "gradient_order", go)
        if go not in findiff.SUPPORTED_ORDERS:
            raise ValueError(f"gradient order must be one of {findiff.SUPPORTED_ORDERS}")
        if go < 2 * self.tableau.order:
            raise ValueError(
                f"gradient order {go} too low for {self.tableau.name}: needs >= {2 * self.tableau.order}")
        if not 0 < self.cfl_parabolic <= 0.5:
            raise ValueError("parabolic CFL constant must lie in (0, 0.5]")

    @property
    def ghost(self) -> int:
        return max(self.reconstruction.radius, self.gradient_order // 2)


@dataclass
class RelaxState:
    u: list[Field]
    v: Optional[list] = None      # per unknown: tuple of per-axis Fields, or None
    t: float = 0.0


@dataclass
class Snapshot:
    t: float
    names: list[str]
    fields: list[np.ndarray]      # interior values, copies
    grid: object


# ---------------------------------------------------------------------------
# single-field operations (the public operator surface)


def relaxation_step(u: Field, problem, order: int, unknown: int = 0, state=None):
    """v = -D A(u) grad(u); one Field per space dimension, ghosts extrapolated.

    For systems whose diffusivity reads several unknowns, pass the full
    list of interior arrays as `state`.
    """
    if not u.ghosts_filled:
        raise ValueError("relaxation step requires a populated ghost layer")
    grid = u.grid
    if state is None:
        state = _interior_state(problem, u, unknown)
    a_vals = _eval_A(problem, unknown, state)
    dcoef = problem.D[unknown]
    if isinstance(grid, Grid2D):
        out = []
        for axis, bc, g1d in (("x", problem.bc_x, grid.x), ("y", problem.bc_y, grid.y)):
            grad = findiff.gradient(u, order, bc=bc, axis=axis)
            v = Field.zeros(grid)
            v.interior[...] = -dcoef * a_vals * grad.interior
            _extrapolate_axis(v, axis, order, bc)
            out.append(v)
        return tuple(out)
    grad = findiff.gradient(u, order, bc=problem.bc_x)
    v = Field.zeros(grid)
    v.interior[...] = -dcoef * a_vals * grad.interior
    findiff.extrapolate_ghosts_batch(v.values, grid.ghost, grid.m, order,
                                     is_periodic(problem.bc_x))
    v.ghosts_filled = True
    return v


def characteristic_split(u: Field, v: Field, phi: float):
    """U = (v + phi u)/(2 phi), V = (phi u - v)/(2 phi); U + V = u."""
    if not phi > 0:
        raise ValueError(f"characteristic velocity must be positive, got {phi}")
    U = Field.zeros(u.grid)
    V = Field.zeros(u.grid)
    U.values[...] = (v.values + phi * u.values) / (2.0 * phi)
    V.values[...] = (phi * u.values - v.values) / (2.0 * phi)
    U.ghosts_filled = V.ghosts_filled = u.ghosts_filled and v.ghosts_filled
    return U, V


def transport_rhs(U: Field, V: Field, phi: float, kind: ReconstructionKind,
                  g_vals: Optional[Field] = None) -> Field:
    """du/dt at centers from the upwind characteristic flux, plus reaction."""
    if not (U.ghosts_filled and V.ghosts_filled):
        raise ValueError("transport requires populated ghosts on U and V")
    grid = U.grid
    if isinstance(grid, Grid2D):
        raise ValueError("transport_rhs is the 1D/per-axis operator")
    stacked = np.vstack([U.values, V.values])
    left, right = edges_batch(stacked, grid.ghost, grid.m, kind)
    u_minus, v_plus = left[0], right[1]
    out = Field.zeros(grid)
    out.interior[...] = -(phi / grid.h) * (np.diff(u_minus) - np.diff(v_plus))
    if g_vals is not None:
        out.interior[...] += g_vals.interior
    return out


def choose_phi(u0: Field, problem, dt: float, policy, unknown: int = 0) -> float:
    """Characteristic speed for the step; Auto balances the stiff source."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if isinstance(policy, PhiFixed):
        return policy.value
    if isinstance(policy, PhiAuto):
        state = _interior_state(problem, u0, unknown)
        max_a = float(np.max(_eval_A(problem, unknown, state)))
        dd = problem.D[unknown] * max_a
        if dd <= 0.0:
            raise ValueError(
                "auto phi undefined for a degenerate-everywhere state; supply a fixed phi")
        return policy.safety * math.sqrt(dd)
    raise TypeError(f"unknown phi policy {policy!r}")


def _interior_state(problem, u: Field, unknown: int):
    if len(problem.A) == 1:
        return [u.interior]
    raise ValueError("systems need the full state: pass state=[...] explicitly")


def _eval_A(problem, unknown, state):
    fn = problem.A[unknown]
    if fn is None:
        return np.zeros_like(state[unknown])
    return np.asarray(fn(state), dtype=float)


def _extrapolate_axis(v: Field, axis: str, order: int, bc):
    grid = v.grid
    g = grid.ghost
    if axis == "x":
        findiff.extrapolate_ghosts_batch(v.values[g:g + grid.y.m, :], g, grid.x.m,
                                         order, is_periodic(bc))
    else:
        findiff.extrapolate_ghosts_batch(v.values.T[g:g + grid.x.m, :], g, grid.y.m,
                                         order, is_periodic(bc))
    v.ghosts_filled = True


# ---------------------------------------------------------------------------
# array-level stage engine


class _Engine:
    """Array-level stepper bound to one (problem, grid, cfg) triple."""

    def __init__(self, problem, grid, cfg: SchemeConfig):
        self.problem = problem
        self.grid = grid
        self.cfg = cfg
        self.two_d = isinstance(grid, Grid2D)
        self.nuk = len(problem.A)
        self.diff_idx = [k for k in range(self.nuk) if problem.A[k] is not None]
        self.ghost = grid.ghost
        if self.ghost < cfg.ghost:
            raise ValueError(f"grid ghost layer {self.ghost} < required {cfg.ghost}")
        self.order = cfg.gradient_order
        if self.two_d:
            self.shape_int = (grid.y.m, grid.x.m)
        else:
            self.shape_int = (grid.m,)

    # -- time step control ---------------------------------------------------

    def max_a(self, interiors) -> list:
        out = [0.0] * self.nuk
        for k in self.diff_idx:
            a = self.problem.A[k](interiors)
            out[k] = float(np.max(a)) if np.size(a) else 0.0
        return out

    def parabolic_dt(self, interiors) -> float:
        da = max((self.problem.D[k] * a for k, a in zip(range(self.nuk), self.max_a(interiors))),
                 default=0.0)
        if da <= 0.0:
            return math.inf
        if self.two_d:
            inv_h2 = 1.0 / self.grid.x.h ** 2 + 1.0 / self.grid.y.h ** 2
        else:
            inv_h2 = 1.0 / self.grid.h ** 2
        return self.cfg.cfl_parabolic / (inv_h2 * da)

    def reaction_dt(self, interiors) -> float:
        g = self.problem.g
        if g is None:
            return math.inf
        means = [float(np.mean(s)) for s in interiors]
        lip = 0.0
        for k in range(self.nuk):
            lo = float(np.min(interiors[k]))
            hi = float(np.max(interiors[k]))
            if hi - lo < 1e-12:
                samples = np.array([means[k], means[k] + 1e-6])
            else:
                samples = np.linspace(lo, hi, 33)
            probe = [np.full_like(samples, means[j]) for j in range(self.nuk)]
            probe[k] = samples
            gk = np.asarray(g(probe)[k], dtype=float)
            dg = np.abs(np.diff(gk)) / np.diff(samples)
            if dg.size:
                lip = max(lip, float(np.max(dg)))
        return 0.5 / lip if lip > 0 else math.inf

    def stable_dt(self, interiors) -> float:
        return min(self.parabolic_dt(interiors), self.reaction_dt(interiors))

    # -- stage right-hand side ------------------------------------------------

    def interiors(self, arrs):
        g = self.ghost
        if self.two_d:
            return [a[g:g + self.grid.y.m, g:g + self.grid.x.m] for a in arrs]
        return [a[g:g + self.grid.m] for a in arrs]

    def fill_all_ghosts(self, arrs):
        g = self.ghost
        p = self.problem
        for a in arrs:
            if self.two_d:
                findiff.fill_ghosts_batch(a[g:g + self.grid.y.m, :], g, self.grid.x.m,
                                          p.bc_x, self.order)
                findiff.fill_ghosts_batch(a.T, g, self.grid.y.m, p.bc_y, self.order)
            else:
                findiff.fill_ghosts_batch(a, g, self.grid.m, p.bc_x, self.order)

    def rhs(self, arrs, phis, skip):
        """Stage right-hand side for every unknown (interior arrays)."""
        self.fill_all_ghosts(arrs)
        ints = self.interiors(arrs)
        out = [np.zeros(self.shape_int) for _ in range(self.nuk)]
        transported = [k for k in self.diff_idx if not skip[k]]
        if transported:
            if self.two_d:
                for k in transported:
                    out[k] += self._flux_divergence_2d(arrs[k], ints, k, phis[k])
            else:
                self._flux_divergence_1d(arrs, ints, transported, phis, out)
        if self.problem.g is not None:
            gvals = self.problem.g(ints)
            for k in range(self.nuk):
                out[k] += gvals[k]
        adv = getattr(self.problem, "extra_advection", None)
        if adv is not None and adv[0] != 0.0:
            self._add_advection(arrs, ints, adv, out)
        return out

    def _flux_divergence_1d(self, arrs, ints, transported, phis, out):
        g, m, h = self.ghost, self.grid.m, self.grid.h
        p = self.problem
        periodic = is_periodic(p.bc_x)
        u_stack = np.stack([arrs[k] for k in transported])
        grad = findiff.gradient_batch(u_stack, g, m, h, self.order, periodic)
        coef = np.array([-p.D[k] for k in transported])[:, None]
        a_rows = np.stack([np.asarray(p.A[k](ints), dtype=float) for k in transported])
        v = np.zeros_like(u_stack)
        v[:, g:g + m] = coef * a_rows * grad
        findiff.extrapolate_ghosts_batch(v, g, m, self.order, periodic)
        phi_col = np.array([phis[k] for k in transported])[:, None]
        U = (v + phi_col * u_stack) / (2.0 * phi_col)
        V = (phi_col * u_stack - v) / (2.0 * phi_col)
        left, right = edges_batch(np.vstack([U, V]), g, m, self.cfg.reconstruction)
        nt = len(transported)
        u_minus, v_plus = left[:nt], right[nt:]
        flux = phi_col * ((u_minus[:, 1:] - u_minus[:, :-1])
                          - (v_plus[:, 1:] - v_plus[:, :-1])) / h
        for row, k in enumerate(transported):
            out[k] -= flux[row]

    def _flux_divergence_2d(self, arr, ints, k, phi):
        p, g = self.problem, self.ghost
        gx, gy = self.grid.x, self.grid.y
        a_vals = np.asarray(p.A[k](ints), dtype=float)
        dcoef = p.D[k]
        total = np.zeros(self.shape_int)
        for axis in ("x", "y"):
            if axis == "x":
                rows = arr[g:g + gy.m, :]
                bc, m, h = p.bc_x, gx.m, gx.h
                a_rows = a_vals
            else:
                rows = np.ascontiguousarray(arr.T[g:g + gx.m, :])
                bc, m, h = p.bc_y, gy.m, gy.h
                a_rows = a_vals.T
            periodic = is_periodic(bc)
            grad = findiff.gradient_batch(rows, g, m, h, self.order, periodic)
            v = np.zeros_like(rows)
            v[:, g:g + m] = -dcoef * a_rows * grad
            findiff.extrapolate_ghosts_batch(v, g, m, self.order, periodic)
            U = (v + phi * rows) / (2.0 * phi)
            V = (phi * rows - v) / (2.0 * phi)
            nb = rows.shape[0]
            left, right = edges_batch(np.vstack([U, V]), g, m, self.cfg.reconstruction)
            u_minus, v_plus = left[:nb], right[nb:]
            flux = phi * ((u_minus[:, 1:] - u_minus[:, :-1])
                          - (v_plus[:, 1:] - v_plus[:, :-1])) / h
            total += flux if axis == "x" else flux.T
        return -total

    def _add_advection(self, arrs, ints, adv, out):
        """gamma * div(carrier * grad(potential)), central 2p-order differences."""
        gamma, carrier, potential = adv
        g = self.ghost
        p = self.problem
        if self.two_d:
            raise NotImplementedError("extra advection is defined for 1D systems")
        m, h = self.grid.m, self.grid.h
        periodic = is_periodic(p.bc_x)
        w = findiff.gradient_batch(arrs[potential][None, :], g, m, h, self.order, periodic)[0]
        prod = np.zeros(self.grid.n_total)
        prod[g:g + m] = ints[carrier] * w
        findiff.extrapolate_ghosts_batch(prod, g, m, self.order, periodic)
        out[carrier] += gamma * findiff.gradient_batch(
            prod[None, :], g, m, h, self.order, periodic)[0]

    # -- full step -------------------------------------------------------------

    def phis_and_skip(self, interiors):
        max_a = self.max_a(interiors)
        phis = [0.0] * self.nuk
        skip = [True] * self.nuk
        pol = self.cfg.phi_policy
        for k in self.diff_idx:
            dd = self.problem.D[k] * max_a[k]
            if dd <= 0.0:
                continue
            skip[k] = False
            if isinstance(pol, PhiFixed):
                phis[k] = pol.value
            else:
                phis[k] = pol.safety * math.sqrt(dd)
        return phis, skip

    def step_arrays(self, arrs, dt, t):
        phis, skip = self.phis_and_skip(self.interiors(arrs))
        tab = self.cfg.tableau
        nu = tab.stages
        base = [a.copy() for a in arrs]
        stage_rhs = []
        work = [a.copy() for a in base]
        for i in range(nu):
            if i > 0:
                for k in range(self.nuk):
                    acc = base[k].copy()
                    gi = self.interiors([acc])[0]
                    for l in range(i):
                        coef = tab.a[i, l]
                        if coef != 0.0:
                            gi += dt * coef * stage_rhs[l][k]
                    work[k] = acc
            stage_rhs.append(self.rhs(work, phis, skip))
        new = [a.copy() for a in base]
        for k in range(self.nuk):
            gi = self.interiors([new[k]])[0]
            for i in range(nu):
                if tab.b[i] != 0.0:
                    gi += dt * tab.b[i] * stage_rhs[i][k]
        self._check_finite(new, t + dt)
        return new

    def _check_finite(self, arrs, t):
        for k in range(self.nuk):
            interior = self.interiors([arrs[k]])[0]
            if not np.all(np.isfinite(interior)):
                idx = np.argwhere(~np.isfinite(interior))[0]
                name = self.problem.field_names[k]
                raise SolverFault(
                    f"non-finite value in {name!r} at cell {tuple(idx)} (t = {t:.6g})",
                    t=t, unknown=k, index=tuple(int(i) for i in idx))


# ---------------------------------------------------------------------------
# public stepping and run driver


def step(state: RelaxState, problem, cfg: SchemeConfig, dt: float) -> RelaxState:
    """Advance one step of size dt; the caller enforces the CFL limits."""
    grid = state.u[0].grid
    eng = _Engine(problem, grid, cfg)
    arrs = [f.values.copy() for f in state.u]
    new = eng.step_arrays(arrs, dt, state.t)
    fields = [Field(grid, a) for a in new]
    v_fields = _final_relaxation(problem, grid, cfg, fields)
    return RelaxState(u=fields, v=v_fields, t=state.t + dt)


def _final_relaxation(problem, grid, cfg, fields):
    """Relax the freshly advanced u so that state.v matches state.u."""
    interiors = [f.interior for f in fields]
    out = []
    for k in range(len(problem.A)):
        if problem.A[k] is None:
            out.append(None)
            continue
        f = fields[k].copy()
        findiff.fill_ghosts(f, problem.bc_x, cfg.gradient_order,
                            bc_y=getattr(problem, "bc_y", None))
        v = relaxation_step(f, problem, cfg.gradient_order, unknown=k,
                            state=interiors)
        out.append(v if isinstance(v, tuple) else (v,))
    return out


def initial_state(problem, grid) -> RelaxState:
    fields = []
    for fn in problem.u0:
        fields.append(Field.from_function(grid, fn))
    return RelaxState(u=fields, v=None, t=0.0)


def run(problem, grid, cfg: SchemeConfig, t_end: float,
        snapshot_times: Sequence[float] = ()) -> list[Snapshot]:
    """Advance to t_end, emitting snapshots at exactly the requested times."""
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    eng = _Engine(problem, grid, cfg)
    arrs = [Field.from_function(grid, fn).values for fn in problem.u0]

    snaps = sorted({float(s) for s in snapshot_times if 0.0 <= s <= t_end + _TIME_EPS})
    if not snaps:
        snaps = [t_end]
    events = sorted(getattr(problem, "events", ()) or [], key=lambda e: e[0])
    events = [(te, fn) for te, fn in events if 0.0 < te <= t_end + _TIME_EPS]
    milestones = sorted({*snaps, *(te for te, _ in events), t_end})

    out = []

    def emit(t):
        ints = eng.interiors(arrs)
        out.append(Snapshot(t, list(problem.field_names),
                            [np.array(i) for i in ints], grid))

    t = 0.0
    if snaps and abs(snaps[0]) <= _TIME_EPS:
        emit(0.0)
        snaps = snaps[1:]
    for target in milestones:
        if target <= _TIME_EPS:
            continue
        while t < target - _TIME_EPS * max(1.0, target):
            dt = eng.stable_dt(eng.interiors(arrs))
            dt = min(dt, target - t)
            if not math.isfinite(dt) or dt <= 0:
                dt = target - t
            arrs = eng.step_arrays(arrs, dt, t)
            t += dt
        t = target
        for te, fn in events:
            if abs(te - target) <= _TIME_EPS * max(1.0, target):
                fn(eng.interiors(arrs), grid)
        if any(abs(s - target) <= _TIME_EPS * max(1.0, target) for s in snaps):
            emit(t)
    return out

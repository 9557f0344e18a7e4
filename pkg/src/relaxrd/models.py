"""Problem catalog: the reaction-diffusion instances driven by the solver.

All problems are posed in the nonconservative form
u_t = D div(A(u) grad u) + g(u); degenerate diffusivities are clamped at
negative arguments so A stays nonnegative when the numerics undershoot
the vacuum state, and fractional powers never see a negative base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .findiff import FREEFLOW, PERIODIC, check_bc_pair, dirichlet


@dataclass
class Problem:
    name: str
    dim: int
    field_names: list
    A: list                      # per unknown: callable(state)->array, or None
    D: list
    u0: list                     # per unknown: callable(x) / callable(x, y)
    bc_x: tuple
    domain_x: tuple = (0.0, 1.0)
    domain_y: Optional[tuple] = None
    bc_y: Optional[tuple] = None
    g: Optional[Callable] = None  # state -> list of per-unknown rates
    exact: Optional[Callable] = None
    extra_advection: Optional[tuple] = None  # (gamma, carrier idx, potential idx)
    events: list = dc_field(default_factory=list)

    def __post_init__(self):
        n = len(self.field_names)
        if not (len(self.A) == len(self.D) == len(self.u0) == n):
            raise ValueError("A, D, u0 and field_names must have one entry per unknown")
        check_bc_pair(self.bc_x)
        if self.dim == 2:
            if self.bc_y is None:
                raise ValueError("2D problems need bc_y")
            check_bc_pair(self.bc_y)

    @property
    def unknowns(self) -> int:
        return len(self.field_names)


def _pos(u):
    return np.maximum(u, 0.0)


# ---------------------------------------------------------------------------
# heat equation (convergence fixture)


def heat_exact(t, x):
    return math.exp(-4.0 * math.pi ** 2 * t) * np.sin(2.0 * np.pi * np.asarray(x))


def heat_problem() -> Problem:
    """A = 1, D = 1, g = 0 on [0, 1] with periodic u0 = sin(2 pi x)."""
    return Problem(
        name="heat",
        dim=1,
        field_names=["u"],
        A=[lambda f: np.ones_like(f[0])],
        D=[1.0],
        u0=[lambda x: np.sin(2.0 * np.pi * x)],
        bc_x=(PERIODIC, PERIODIC),
        domain_x=(0.0, 1.0),
        exact=heat_exact,
    )


# ---------------------------------------------------------------------------
# generalized Fisher-Kolmogoroff


def genfk_wave_speed(alpha: float) -> float:
    return 1.0 / math.sqrt(1.0 + alpha)


def genfk_exact(t, x, alpha: float):
    """Exact travelling wave for p=1, q=m=alpha; identically 0 ahead of the front."""
    if alpha <= 0:
        raise ValueError(f"travelling wave needs alpha > 0, got {alpha}")
    c = genfk_wave_speed(alpha)
    arg = alpha * (np.asarray(x, dtype=float) - c * t) / math.sqrt(1.0 + alpha)
    return _pos(1.0 - np.exp(np.minimum(arg, 50.0))) ** (1.0 / alpha)


def genfk_problem(p_exp: float, q_exp: float, m_exp: float,
                  domain=(-5.0, 5.0)) -> Problem:
    """u_t = (u^m u_x)_x + u^p (1 - u^q) on `domain`.

    For p = 1 and q = m = alpha the exact travelling wave is attached.
    """
    if m_exp <= 0 or q_exp <= 0 or p_exp <= 0:
        raise ValueError("exponents must be positive")

    def a_fn(f):
        return _pos(f[0]) ** m_exp

    def g_fn(f):
        up = _pos(f[0])
        return [up ** p_exp * (1.0 - up ** q_exp)]

    exact = None
    u0 = lambda x: np.zeros_like(x)
    if p_exp == 1.0 and q_exp == m_exp:
        alpha = q_exp
        exact = lambda t, x: genfk_exact(t, x, alpha)
        u0 = lambda x: genfk_exact(0.0, x, alpha)
    return Problem(
        name="genfk",
        dim=1,
        field_names=["u"],
        A=[a_fn],
        D=[1.0],
        g=g_fn,
        u0=[u0],
        bc_x=(FREEFLOW, dirichlet(0.0)),
        domain_x=tuple(float(d) for d in domain),
        exact=exact,
    )


def travelling_wave_problem(alpha: float, domain=(-5.0, 5.0)) -> Problem:
    if alpha <= 0:
        raise ValueError(f"travelling wave needs alpha > 0, got {alpha}")
    return genfk_problem(1.0, alpha, alpha, domain)


# ---------------------------------------------------------------------------
# porous medium with strong absorption (finite-time extinction, 2D)


def extinction_problem(m_exp: float = 2.0, p_exp: float = 0.5, c_abs: float = 1.0,
                       perturb_amp: float = 0.2, perturb_ecc: float = 0.2,
                       perturb_mode: int = 2,
                       sector=(0.0, 2.0 * math.pi)) -> Problem:
    """u_t = Lap(u^m) - c u^p on [-2, 2]^2, rewritten with A(u) = m u^(m-1).

    The initial datum is a low bump over an eccentric support,
    amp * max(0, 1 - r^2 (1 + ecc cos(mode theta))^2): the low amplitude
    keeps absorption ahead of the nonlinear diffusion so the angular
    asymmetry survives until extinction; every shape parameter is
    configurable.  The absorption is clamped to zero for u <= 0.
    """
    if not m_exp > 1:
        raise ValueError(f"extinction regime needs m > 1, got {m_exp}")
    if not 0 < p_exp < 1:
        raise ValueError(f"extinction regime needs 0 < p < 1, got {p_exp}")
    if not c_abs > 0:
        raise ValueError(f"extinction regime needs c > 0, got {c_abs}")

    def a_fn(f):
        return m_exp * _pos(f[0]) ** (m_exp - 1.0)

    def g_fn(f):
        return [-c_abs * _pos(f[0]) ** p_exp]

    lo, hi = sector

    def u0(x, y):
        theta = np.arctan2(y, x) % (2.0 * math.pi)
        window = (theta >= lo) & (theta < hi)
        stretch = 1.0 + perturb_ecc * np.cos(perturb_mode * theta) * window
        r2 = (x ** 2 + y ** 2) * stretch ** 2
        return perturb_amp * _pos(1.0 - r2)

    return Problem(
        name="extinction",
        dim=2,
        field_names=["u"],
        A=[a_fn],
        D=[1.0],
        g=g_fn,
        u0=[u0],
        bc_x=(FREEFLOW, FREEFLOW),
        domain_x=(-2.0, 2.0),
        domain_y=(-2.0, 2.0),
        bc_y=(FREEFLOW, FREEFLOW),
    )


# ---------------------------------------------------------------------------
# frog dispersal and settling


@dataclass(frozen=True)
class FrogParameters:
    mu: float = 1.0
    gamma: float = 0.0
    alpha: float = 0.01
    beta: float = 10.0
    capacity: float = 0.25    # u0 in D(u) = u/u0 and the settling threshold

    def __post_init__(self):
        if self.mu <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError("mu, alpha and beta must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")


def chi(x):
    """Right-open step: 1 for x > 0, 0 otherwise (no smoothing)."""
    return np.where(np.asarray(x) > 0.0, 1.0, 0.0)


def settling_rate(total, pheromone=None, capacity: float = 0.25):
    """S = chi(1 - total/capacity); stops exactly at capacity.

    The pheromone argument is accepted for forward compatibility but does
    not enter the rate.
    """
    return chi(1.0 - np.asarray(total) / capacity)


FROG_FIELDS = ["u_m", "u_s", "c_u", "v_m", "v_s"]


def frog_problem(params: FrogParameters = FrogParameters(),
                 second_release_time: float = 5.0,
                 release_profile: Optional[Callable] = None,
                 domain=(-4.0, 4.0)) -> Problem:
    """Two-batch dispersal/settling system (u_m, u_s, c_u, v_m, v_s).

    Migrating classes diffuse degenerately with rate mu D(total); settled
    classes only receive the settling transfer; the pheromone c_u diffuses
    linearly and relaxes onto u_m + u_s.  At `second_release_time` the
    run driver adds `release_profile` (default: the initial u_m) onto v_m.
    """
    cap = params.capacity
    u0_um = lambda x: 2.5 * np.exp(-100.0 * x ** 2)
    release = release_profile or u0_um

    def d_slope(total):
        return _pos(total) / cap

    A = [
        lambda f: d_slope(f[0] + f[1]),
        None,
        lambda f: np.ones_like(f[2]),
        lambda f: d_slope(f[3] + f[4]),
        None,
    ]
    D = [params.mu, 0.0, params.alpha, params.mu, 0.0]

    def g_fn(f):
        u_m, u_s, c_u, v_m, v_s = f
        s_u = settling_rate(u_m + u_s, capacity=cap)
        s_v = settling_rate(u_s + v_m + v_s, capacity=cap)
        transfer_u = s_u * u_m
        transfer_v = s_v * v_m
        return [
            -transfer_u,
            transfer_u,
            params.beta * (u_m + u_s - c_u),
            -transfer_v,
            transfer_v,
        ]

    def release_event(interiors, grid):
        interiors[3][...] += release(grid.centers())

    zero = lambda x: np.zeros_like(x)
    return Problem(
        name="frog",
        dim=1,
        field_names=list(FROG_FIELDS),
        A=A,
        D=D,
        g=g_fn,
        u0=[u0_um, zero, zero, zero, zero],
        bc_x=(FREEFLOW, FREEFLOW),
        domain_x=tuple(float(d) for d in domain),
        extra_advection=(params.gamma, 3, 2),
        events=[(float(second_release_time), release_event)],
    )

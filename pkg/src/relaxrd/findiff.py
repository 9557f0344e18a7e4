"""High-order finite-difference gradients and ghost-cell extrapolation.

Gradients use centered stencils of even order 2p in the interior and
one-sided rows of the same order within p points of a physical wall, so
no ghost data is differentiated across a non-periodic boundary.  Ghost
cells themselves are filled either by periodic wrap-around or by a
boundary polynomial of degree 2p fitted to the first 2p interior values
plus one boundary constraint, evaluated outward as far as the layer goes.

All stencil and extrapolation weights are generated at first use by
solving the Vandermonde moment systems (in grid units, so they are
independent of h) and cached per order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import Field, Grid2D

SUPPORTED_ORDERS = (2, 4, 6)


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str  # "periodic" | "dirichlet" | "freeflow"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("periodic", "dirichlet", "freeflow"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")


PERIODIC = BoundaryCondition("periodic")
FREEFLOW = BoundaryCondition("freeflow")


def dirichlet(value: float) -> BoundaryCondition:
    return BoundaryCondition("dirichlet", float(value))


def check_bc_pair(bc: tuple[BoundaryCondition, BoundaryCondition]):
    left, right = bc
    if (left.kind == "periodic") != (right.kind == "periodic"):
        raise ValueError("periodic boundaries must be set on both sides or neither")
    return left, right


def is_periodic(bc) -> bool:
    return bc[0].kind == "periodic"


@dataclass(frozen=True)
class StencilTable:
    """First-derivative stencils of order 2p, in grid units (divide by h)."""

    order: int
    centered: np.ndarray        # (2p+1,) offsets -p..p
    biased: np.ndarray          # (p, 2p+1) row d: derivative at point d, points 0..2p

    @property
    def p(self) -> int:
        return self.order // 2


def _derivative_row(offsets: np.ndarray, at: float) -> np.ndarray:
    """Weights w with sum w_k f(o_k) = f'(at) exact for degree <= len-1."""
    n = len(offsets)
    mat = np.vander(offsets - at, n, increasing=True).T  # mat[j,k] = (o_k-at)^j
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(mat, rhs)


@lru_cache(maxsize=None)
def stencil_table(order: int) -> StencilTable:
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"gradient order must be one of {SUPPORTED_ORDERS}, got {order}")
    p = order // 2
    centered = _derivative_row(np.arange(-p, p + 1, dtype=float), 0.0)
    # exact antisymmetry: constants differentiate to exactly zero
    centered = 0.5 * (centered - centered[::-1])
    pts = np.arange(order + 1, dtype=float)
    biased = np.array([_derivative_row(pts, float(d)) for d in range(p)])
    for d in range(p):
        biased[d, d] -= biased[d].sum()
    return StencilTable(order, centered, biased)


# ---------------------------------------------------------------------------
# ghost filling


@lru_cache(maxsize=None)
def _ghost_weights(degree: int, kind: str, n_ghost: int):
    """Weight matrix W (n_ghost, n_data) and bc column w0 so that
    ghost_values = W @ u_first + w0 * bc_value, in wall-anchored grid units.

    kind "dirichlet"/"freeflow": polynomial of degree 2p through the first
    2p interior values plus one constraint at the wall.  kind "free" is the
    unconstrained fit of degree 2p-1 used for auxiliary variables.
    """
    if kind == "free":
        n_data = degree
        nodes = np.arange(degree) + 0.5
        mat = np.vander(nodes, degree, increasing=True)
        bc_col = np.zeros(degree)
    else:
        n_data = degree
        nodes = np.arange(degree) + 0.5
        mat = np.vander(nodes, degree + 1, increasing=True)
        if kind == "dirichlet":
            crow = np.zeros(degree + 1)
            crow[0] = 1.0                      # q(0) = value
        else:                                  # freeflow: q'(0) = 0
            crow = np.zeros(degree + 1)
            crow[1] = 1.0
        mat = np.vstack([mat, crow])
        bc_col = np.zeros(degree + 1)
        bc_col[degree] = 1.0 if kind == "dirichlet" else 0.0
    inv = np.linalg.inv(mat)
    ghosts = -(np.arange(n_ghost) + 0.5)
    basis = np.vander(ghosts, mat.shape[1], increasing=True)
    full = basis @ inv                         # (n_ghost, n_constraints)
    if kind == "free":
        return full, np.zeros(n_ghost)
    return full[:, :n_data], full @ bc_col


def _fill_side(block: np.ndarray, ghost_block: np.ndarray, bc: BoundaryCondition,
               degree: int, n_ghost: int):
    """Fill one side's ghost columns.  block: first `degree` interior columns
    ordered wall-outward; ghost_block: ghost columns ordered wall-outward."""
    if bc.kind == "periodic":
        raise AssertionError("periodic handled by wrap copy")
    W, w0 = _ghost_weights(degree, bc.kind, n_ghost)
    ghost_block[...] = block @ W.T + bc.value * w0


def fill_ghosts_batch(vals: np.ndarray, lo: int, m: int,
                      bc: tuple[BoundaryCondition, BoundaryCondition],
                      fit_degree: int):
    """Fill ghost columns of a (..., n_total) array along the last axis."""
    left, right = check_bc_pair(bc)
    g = lo
    if g == 0:
        return vals
    if left.kind == "periodic":
        if m < g:
            raise ValueError(f"periodic wrap needs m >= ghost count ({m} < {g})")
        vals[..., :g] = vals[..., lo + m - g:lo + m]
        vals[..., lo + m:] = vals[..., lo:lo + g]
        return vals
    if m < fit_degree:
        raise ValueError(f"boundary fit of degree {fit_degree} needs m >= {fit_degree}, got {m}")
    _fill_side(vals[..., lo:lo + fit_degree], vals[..., lo - 1::-1], left, fit_degree, g)
    _fill_side(vals[..., lo + m - 1:lo + m - 1 - fit_degree:-1],
               vals[..., lo + m:], right, fit_degree, g)
    return vals


def extrapolate_ghosts_batch(vals: np.ndarray, lo: int, m: int, fit_degree: int,
                             periodic: bool):
    """Unconstrained polynomial extrapolation of ghosts (auxiliary variables)."""
    g = lo
    if g == 0:
        return vals
    if periodic:
        vals[..., :g] = vals[..., lo + m - g:lo + m]
        vals[..., lo + m:] = vals[..., lo:lo + g]
        return vals
    n_fit = min(fit_degree, m)
    W, _ = _ghost_weights(n_fit, "free", g)
    vals[..., :lo][..., ::-1] = vals[..., lo:lo + n_fit] @ W.T
    vals[..., lo + m:] = vals[..., lo + m - 1:lo + m - 1 - n_fit:-1] @ W.T
    return vals


def fill_ghosts(values: Field, bc, fit_degree: int, bc_y=None) -> Field:
    """Extrapolate the ghost layer of a Field in place and mark it filled.

    `bc` is the (left, right) pair for the x axis; 2D fields take the
    (bottom, top) pair in `bc_y`.  Interior values are never touched and
    the operation is idempotent.
    """
    grid = values.grid
    if isinstance(grid, Grid2D):
        if bc_y is None:
            raise ValueError("2D fields need bc_y")
        g = grid.ghost
        # x first on interior rows, then y on every column (corners included)
        fill_ghosts_batch(values.values[g:g + grid.y.m, :], g, grid.x.m, bc, fit_degree)
        fill_ghosts_batch(values.values.T, g, grid.y.m, bc_y, fit_degree)
    else:
        fill_ghosts_batch(values.values, grid.ghost, grid.m, bc, fit_degree)
    values.ghosts_filled = True
    return values


# ---------------------------------------------------------------------------
# gradients


def gradient_batch(vals: np.ndarray, lo: int, m: int, h: float, order: int,
                   periodic: bool) -> np.ndarray:
    """d/dx along the last axis at the m interior points of a (..., n) array.

    Periodic data must have ghosts populated; non-periodic data is
    differentiated with one-sided rows near the walls and touches no ghosts.
    """
    table = stencil_table(order)
    p = table.p
    out = np.zeros(vals.shape[:-1] + (m,))
    for k in range(1, p + 1):
        # antisymmetric pairing: constants cancel exactly
        out += table.centered[p + k] * (vals[..., lo + k:lo + k + m]
                                        - vals[..., lo - k:lo - k + m])
    if not periodic:
        body = vals[..., lo:lo + order + 1]
        for d in range(p):
            out[..., d] = body @ table.biased[d]
        body_r = vals[..., lo + m - 1:lo + m - 2 - order:-1]
        for d in range(p):
            out[..., m - 1 - d] = -(body_r @ table.biased[d])
    return out / h


def gradient(values: Field, order: int, bc=None, axis: str = "x") -> Field:
    """Spatial derivative of a Field along one axis (interior points only)."""
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"gradient order must be one of {SUPPORTED_ORDERS}, got {order}")
    grid = values.grid
    periodic = bc is None or is_periodic(bc)
    if periodic and not values.ghosts_filled:
        raise ValueError("gradient requires a populated ghost layer")
    out = Field.zeros(grid)
    if isinstance(grid, Grid2D):
        g = grid.ghost
        if axis == "x":
            out.interior[...] = gradient_batch(
                values.values[g:g + grid.y.m, :], g, grid.x.m, grid.x.h, order, periodic)
        elif axis == "y":
            out.interior[...] = gradient_batch(
                values.values.T[g:g + grid.x.m, :], g, grid.y.m, grid.y.h, order, periodic).T
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    else:
        out.interior[...] = gradient_batch(
            values.values, grid.ghost, grid.m, grid.h, order, periodic)
    return out

"""Non-oscillatory boundary-extrapolated edge data.

Edge values follow the conservative finite-difference construction: the r
point values of a stencil are combined with the classical cell-average
reconstruction coefficients, so that differencing the interface values
across a cell recovers the derivative of the underlying function to the
full order of the method.  ENO picks its stencil hierarchically by
divided differences (left-preferred on ties); WENO blends all stencils
with the standard smoothness indicators and optimal linear weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import eno_edges_kernel, weno_edges_kernel
from ._tables import WENO_GAMMA_LEFT, WENO_GAMMA_RIGHT, recon_tables
from .mesh import Field, Grid2D

WENO_EPS = 1e-6

_ENO_ORDERS = (2, 3, 4, 5, 6)
_WENO_ORDERS = (3, 5)


@dataclass(frozen=True)
class ReconstructionKind:
    kind: str        # "constant" | "eno" | "weno"
    order: int = 1

    def __post_init__(self):
        if self.kind == "constant":
            if self.order != 1:
                raise ValueError("constant reconstruction has order 1")
        elif self.kind == "eno":
            if self.order not in _ENO_ORDERS:
                raise ValueError(f"ENO order out of range 2..6, got {self.order}")
        elif self.kind == "weno":
            if self.order not in _WENO_ORDERS:
                raise ValueError(f"WENO order must be 3 or 5, got {self.order}")
        else:
            raise ValueError(f"unknown reconstruction kind {self.kind!r}")

    @property
    def radius(self) -> int:
        """Ghost cells required per side."""
        if self.kind == "constant":
            return 1
        if self.kind == "eno":
            return self.order - 1
        return (self.order + 1) // 2

    @staticmethod
    def parse(spec: str) -> "ReconstructionKind":
        s = spec.strip().lower()
        if s == "constant":
            return ReconstructionKind("constant")
        for prefix in ("eno", "weno"):
            if s.startswith(prefix) and s[len(prefix):].isdigit():
                return ReconstructionKind(prefix, int(s[len(prefix):]))
        raise ValueError(f"unknown reconstruction {spec!r}")

    def __str__(self):
        return "constant" if self.kind == "constant" else f"{self.kind}{self.order}"


@dataclass
class EdgeValues:
    """Interface states: left[i] = u^-_{i+1/2}, right[i] = u^+_{i+1/2},
    for the m+1 interfaces bounding the interior cells."""

    left: np.ndarray
    right: np.ndarray


def edges_batch(vals: np.ndarray, lo: int, m: int, kind: ReconstructionKind):
    """Edge states along the last axis of a (batch, n_total) array."""
    if kind.kind == "constant":
        return vals[:, lo - 1:lo + m].copy(), vals[:, lo:lo + m + 1].copy()
    nrows = vals.shape[0]
    left_state = np.empty((nrows, m + 1))
    right_state = np.empty((nrows, m + 1))
    if kind.kind == "eno":
        c_right, c_left = recon_tables(kind.order)
        eno_edges_kernel(vals, lo, m, kind.order, c_right, c_left,
                         left_state, right_state)
    else:
        r_sub = (kind.order + 1) // 2
        c_right, c_left = recon_tables(r_sub)
        weno_edges_kernel(vals, lo, m, r_sub, c_right, c_left,
                          WENO_GAMMA_RIGHT[r_sub], WENO_GAMMA_LEFT[r_sub],
                          WENO_EPS, left_state, right_state)
    return left_state, right_state


def reconstruct_edges(values: Field, kind: ReconstructionKind) -> EdgeValues:
    """Reconstruct boundary-extrapolated data at every interior interface."""
    grid = values.grid
    if isinstance(grid, Grid2D):
        raise ValueError("reconstruct_edges works on 1D fields; 2D sweeps are axis-wise")
    if not values.ghosts_filled:
        raise ValueError("reconstruction requires a populated ghost layer")
    if grid.ghost < kind.radius:
        raise ValueError(
            f"{kind} needs {kind.radius} ghost cells, grid has {grid.ghost}")
    left, right = edges_batch(values.values[None, :], grid.ghost, grid.m, kind)
    return EdgeValues(left[0], right[0])


def weno_weights(smoothness: np.ndarray, linear_weights: np.ndarray,
                 eps: float = WENO_EPS) -> np.ndarray:
    """Nonlinear WENO weights from smoothness indicators.

    Nonnegative by construction and renormalized to sum to one exactly;
    equal indicators reproduce the linear weights.
    """
    smoothness = np.asarray(smoothness, dtype=float)
    linear_weights = np.asarray(linear_weights, dtype=float)
    if np.any(smoothness < 0):
        raise ValueError("smoothness indicators must be nonnegative")
    alpha = linear_weights / (eps + smoothness) ** 2
    return alpha / alpha.sum()

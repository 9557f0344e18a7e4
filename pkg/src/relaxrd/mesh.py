"""Uniform cell-centered grids with ghost layers, in 1D and 2D.

Cell centers follow x_j = a - h/2 + j*h for j = 1..m, so the first center
sits at a + h/2 and the last at b - h/2.  Refining m -> 3m keeps every
coarse center coincident with the middle fine center of its triple, which
is what makes fine-grid reference solutions comparable by pure sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    m: int
    ghost: int = 0

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def n_total(self) -> int:
        return self.m + 2 * self.ghost

    def centers(self) -> np.ndarray:
        """Interior cell centers, a + (i + 1/2) h for i = 0..m-1."""
        return self.a + (np.arange(self.m) + 0.5) * self.h

    def centers_with_ghosts(self) -> np.ndarray:
        i = np.arange(self.n_total) - self.ghost
        return self.a + (i + 0.5) * self.h

    def interfaces(self) -> np.ndarray:
        """Interior interface coordinates x_{j+1/2}, length m+1."""
        return self.a + np.arange(self.m + 1) * self.h


@dataclass(frozen=True)
class Grid2D:
    """Tensor product of two 1D axes; fields are stored row-major as (y, x)."""

    x: Grid1D
    y: Grid1D

    @property
    def ghost(self) -> int:
        return self.x.ghost

    def centers(self):
        return self.x.centers(), self.y.centers()


def make_grid(a: float, b: float, m: int, ghost: int = 0) -> Grid1D:
    """Build a uniform 1D grid on [a, b] with m cells and a ghost layer."""
    if m < 1:
        raise ValueError(f"cell count must be >= 1, got {m}")
    if not b > a:
        raise ValueError(f"domain requires b > a, got [{a}, {b}]")
    if ghost < 0:
        raise ValueError(f"ghost count must be >= 0, got {ghost}")
    return Grid1D(float(a), float(b), int(m), int(ghost))


def make_grid2d(ax, bx, mx, ay, by, my, ghost: int = 0) -> Grid2D:
    gx = make_grid(ax, bx, mx, ghost)
    gy = make_grid(ay, by, my, ghost)
    return Grid2D(gx, gy)


@dataclass
class Field:
    """Point values of one unknown over interior + ghost cells.

    `ghosts_filled` records whether the ghost layer currently holds valid
    extrapolated data; operators with a stencil reaching into the layer
    refuse to run otherwise.
    """

    grid: Grid1D | Grid2D
    values: np.ndarray = field(repr=False)
    ghosts_filled: bool = False

    def __post_init__(self):
        expected = self._expected_shape()
        if self.values.shape != expected:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid layout {expected}"
            )

    def _expected_shape(self):
        if isinstance(self.grid, Grid2D):
            return (self.grid.y.n_total, self.grid.x.n_total)
        return (self.grid.n_total,)

    @property
    def interior(self) -> np.ndarray:
        """View of the interior values (no copy)."""
        g = self.grid
        if isinstance(g, Grid2D):
            gh = g.ghost
            return self.values[gh:gh + g.y.m, gh:gh + g.x.m]
        return self.values[g.ghost:g.ghost + g.m]

    def copy(self) -> "Field":
        return replace(self, values=self.values.copy())

    @classmethod
    def zeros(cls, grid) -> "Field":
        shape = (
            (grid.y.n_total, grid.x.n_total)
            if isinstance(grid, Grid2D)
            else (grid.n_total,)
        )
        return cls(grid, np.zeros(shape))

    @classmethod
    def from_function(cls, grid, fn) -> "Field":
        """Sample fn at interior centers; ghosts start unfilled (zero)."""
        f = cls.zeros(grid)
        if isinstance(grid, Grid2D):
            xc, yc = grid.centers()
            f.interior[...] = fn(xc[None, :], yc[:, None])
        else:
            f.interior[...] = fn(grid.centers())
        return f


def restrict_to_coarse(fine: Field, coarse_grid: Grid1D) -> Field:
    """Sample a fine-grid field at the coincident centers of a coarser grid.

    Requires the fine cell count to be 3^k times the coarse one; centers
    then coincide exactly and no averaging is involved.
    """
    fg = fine.grid
    if isinstance(fg, Grid2D):
        raise ValueError("restriction is defined for 1D fields")
    if (fg.a, fg.b) != (coarse_grid.a, coarse_grid.b):
        raise ValueError("fine and coarse grids must cover the same domain")
    ratio, mm = divmod(fg.m, coarse_grid.m)
    if mm != 0 or not _is_power_of_three(ratio):
        raise ValueError(
            f"fine/coarse cell ratio must be a power of 3, got {fg.m}/{coarse_grid.m}"
        )
    # coarse interior i maps to fine interior i*ratio + (ratio-1)//2
    idx = np.arange(coarse_grid.m) * ratio + (ratio - 1) // 2
    out = Field.zeros(coarse_grid)
    out.interior[...] = fine.interior[idx]
    return out


def _is_power_of_three(n: int) -> bool:
    if n < 1:
        return False
    while n % 3 == 0:
        n //= 3
    return n == 1

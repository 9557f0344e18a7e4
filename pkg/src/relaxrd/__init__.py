"""Relaxed ENO/WENO schemes for degenerate reaction-diffusion equations."""

from .findiff import (BoundaryCondition, FREEFLOW, PERIODIC, dirichlet,
                      fill_ghosts, gradient)
from .harness import RunReport, convergence_study, error_norm, oracle_compare
from .mesh import Field, Grid1D, Grid2D, make_grid, make_grid2d, restrict_to_coarse
from .models import (FrogParameters, Problem, extinction_problem, frog_problem,
                     genfk_exact, genfk_problem, genfk_wave_speed, heat_problem,
                     travelling_wave_problem)
from .reconstruct import EdgeValues, ReconstructionKind, reconstruct_edges, weno_weights
from .relax_core import (PhiAuto, PhiFixed, RelaxState, SchemeConfig, Snapshot,
                         SolverFault, Tableau, characteristic_split, choose_phi,
                         initial_state, relaxation_step, run, step, tableau,
                         transport_rhs)

__all__ = [
    "BoundaryCondition", "EdgeValues", "FREEFLOW", "Field", "FrogParameters",
    "Grid1D", "Grid2D", "PERIODIC", "PhiAuto", "PhiFixed", "Problem",
    "ReconstructionKind", "RelaxState", "RunReport", "SchemeConfig", "Snapshot",
    "SolverFault", "Tableau", "characteristic_split", "choose_phi",
    "convergence_study", "dirichlet", "error_norm", "extinction_problem",
    "fill_ghosts", "frog_problem", "genfk_exact", "genfk_problem",
    "genfk_wave_speed", "gradient", "heat_problem", "initial_state", "make_grid",
    "make_grid2d", "oracle_compare", "reconstruct_edges", "relaxation_step",
    "restrict_to_coarse", "run", "step", "tableau", "transport_rhs",
    "travelling_wave_problem", "weno_weights",
]

__version__ = "0.1.0"

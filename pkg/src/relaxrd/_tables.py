"""Reconstruction coefficient tables, generated exactly with rationals.

For a stencil of r cells starting at cell j-s, the edge value of the
reconstruction in cell j is a fixed linear combination of the r values.
The coefficients come from differentiating the degree-r interpolant of the
primitive function at the target edge; doing the algebra in Fractions and
rounding once keeps them correct to the last bit.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np


def _lagrange_deriv(nodes, i, tau):
    num = Fraction(0)
    for l in range(len(nodes)):
        if l == i:
            continue
        prod = Fraction(1)
        for q in range(len(nodes)):
            if q not in (i, l):
                prod *= tau - nodes[q]
        num += prod
    den = Fraction(1)
    for q in range(len(nodes)):
        if q != i:
            den *= nodes[i] - nodes[q]
    return num / den


def _edge_coeffs(r: int, s: int, tau: Fraction) -> list[Fraction]:
    # cell j sits at [-1/2, 1/2]; stencil cell edges at k - s - 1/2, k = 0..r
    nodes = [Fraction(2 * (k - s) - 1, 2) for k in range(r + 1)]
    derivs = [_lagrange_deriv(nodes, i, tau) for i in range(r + 1)]
    return [sum(derivs[k + 1:], Fraction(0)) for k in range(r)]


@lru_cache(maxsize=None)
def recon_tables(r: int):
    """(c_right, c_left), each (r, r): row s holds the coefficients of the
    stencil starting at cell j-s for the right/left edge value of cell j."""
    right = np.array(
        [[float(c) for c in _edge_coeffs(r, s, Fraction(1, 2))] for s in range(r)]
    )
    left = np.array(
        [[float(c) for c in _edge_coeffs(r, s, Fraction(-1, 2))] for s in range(r)]
    )
    return right, left


# optimal linear weights of the classical WENO blends, indexed by shift s
WENO_GAMMA_RIGHT = {
    2: np.array([2.0 / 3.0, 1.0 / 3.0]),
    3: np.array([3.0 / 10.0, 6.0 / 10.0, 1.0 / 10.0]),
}
WENO_GAMMA_LEFT = {r: g[::-1].copy() for r, g in WENO_GAMMA_RIGHT.items()}

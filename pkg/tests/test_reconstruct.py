import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relaxrd import findiff as fd
from relaxrd.mesh import Field, make_grid
from relaxrd.reconstruct import (EdgeValues, ReconstructionKind, edges_batch,
                                 reconstruct_edges, weno_weights)

ALL_KINDS = [ReconstructionKind("constant")] + \
    [ReconstructionKind("eno", r) for r in (2, 3, 4, 5, 6)] + \
    [ReconstructionKind("weno", r) for r in (3, 5)]


def field_from(grid, fn):
    f = Field.zeros(grid)
    f.values[...] = fn(grid.centers_with_ghosts())
    f.ghosts_filled = True
    return f


def deconvolve_poly(coeffs, h):
    """Coefficients of the polynomial whose sliding h-average is `coeffs`.

    Independent oracle: build the linear map x^k -> ((x+h/2)^(k+1) -
    (x-h/2)^(k+1)) / ((k+1) h) on the monomial basis and invert it.
    """
    n = len(coeffs)
    M = np.zeros((n, n))
    for k in range(n):
        plus = np.polynomial.polynomial.polypow([h / 2, 1], k + 1)
        minus = np.polynomial.polynomial.polypow([-h / 2, 1], k + 1)
        avg = ((plus - minus) / ((k + 1) * h))[:n]  # top coefficient cancels
        M[:len(avg), k] = avg
    lowhigh = np.linalg.solve(M, np.array(coeffs[::-1], dtype=float))
    return lowhigh[::-1]  # back to np.polyval's high-to-low order


def test_parse_and_validation():
    assert str(ReconstructionKind.parse("eno4")) == "eno4"
    assert ReconstructionKind.parse("constant").radius == 1
    assert ReconstructionKind.parse("eno6").radius == 5
    assert ReconstructionKind.parse("weno5").radius == 3
    for bad in ("eno7", "eno1", "weno4", "mp5"):
        with pytest.raises(ValueError):
            ReconstructionKind.parse(bad)


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_constant_data_reproduced_by_every_kind(kind):
    grid = make_grid(0, 1, 14, kind.radius)
    f = field_from(grid, lambda x: np.full_like(x, 2.625))
    ev = reconstruct_edges(f, kind)
    assert np.max(np.abs(ev.left - 2.625)) < 1e-13
    assert np.max(np.abs(ev.right - 2.625)) < 1e-13


def test_constant_kind_is_cell_value_upwinding():
    grid = make_grid(0, 1, 8, 1)
    f = field_from(grid, lambda x: x ** 2 + 1)
    ev = reconstruct_edges(f, ReconstructionKind("constant"))
    vals = f.values
    assert np.array_equal(ev.left, vals[0:9])    # u^-_{j+1/2} = u_j
    assert np.array_equal(ev.right, vals[1:10])  # u^+_{j+1/2} = u_{j+1}


def test_linear_data_gives_exact_interface_values():
    # for linear data the sliding average is the function itself
    kind = ReconstructionKind("eno", 2)
    grid = make_grid(-1, 1, 10, kind.radius)
    f = field_from(grid, lambda x: 3 * x + 0.5)
    ev = reconstruct_edges(f, kind)
    xi = grid.interfaces()
    assert np.max(np.abs(ev.left - (3 * xi + 0.5))) < 1e-13
    assert np.max(np.abs(ev.right - (3 * xi + 0.5))) < 1e-13


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6])
def test_eno_edges_match_deconvolved_polynomial(order):
    # point values of a degree order-1 polynomial are exactly the sliding
    # averages of its deconvolution; the reconstruction must return the
    # deconvolved polynomial's interface values
    kind = ReconstructionKind("eno", order)
    grid = make_grid(0.25, 1.75, 12, kind.radius)
    rng = np.random.default_rng(order)
    coeffs = rng.uniform(-1, 1, order)
    f = field_from(grid, lambda x: np.polyval(coeffs, x))
    ev = reconstruct_edges(f, kind)
    hat = deconvolve_poly(coeffs, grid.h)
    want = np.polyval(hat, grid.interfaces())
    scale = max(1.0, np.abs(f.values).max())
    assert np.max(np.abs(ev.left - want)) < 200 * np.finfo(float).eps * scale
    assert np.max(np.abs(ev.right - want)) < 200 * np.finfo(float).eps * scale


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_flux_difference_differentiates_polynomials_exactly(kind):
    # the conservative-form identity: differencing the edge values across a
    # cell recovers d/dx exactly for polynomials the stencils can represent
    degree = {"constant": 0, "eno": kind.order - 1, "weno": (kind.order + 1) // 2 - 1}
    d = degree[kind.kind]
    grid = make_grid(-0.5, 1.0, 18, kind.radius)
    rng = np.random.default_rng(7)
    coeffs = rng.uniform(-1, 1, d + 1)
    f = field_from(grid, lambda x: np.polyval(coeffs, x))
    ev = reconstruct_edges(f, kind)
    want = np.polyval(np.polyder(coeffs), grid.centers()) if d else np.zeros(grid.m)
    for edge in (ev.left, ev.right):
        got = np.diff(edge) / grid.h
        assert np.max(np.abs(got - want)) < 1e-11


def reference_eno_edge(vals, cell, r, c_right, c_left):
    """Tiny reference ENO: hierarchical growth on undivided differences,
    left-preferred ties, stencil clamped to the array."""
    n = len(vals)
    diffs = [np.asarray(vals, dtype=float)]
    for k in range(1, r):
        diffs.append(np.diff(diffs[-1]))
    i0, npts = cell, 1
    while npts < r:
        can_left = i0 - 1 >= 0
        can_right = i0 + npts + 1 <= n
        if can_left and (not can_right or
                         abs(diffs[npts][i0 - 1]) <= abs(diffs[npts][i0])):
            i0 -= 1
        elif not can_right:
            break
        npts += 1
    s = cell - i0
    window = np.asarray(vals[i0:i0 + r], dtype=float)
    return float(c_right[s] @ window), float(c_left[s] @ window), i0


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6])
def test_eno_step_data_no_overshoot_with_enumeration_oracle(order):
    from relaxrd._tables import recon_tables
    kind = ReconstructionKind("eno", order)
    grid = make_grid(0, 1, 16, kind.radius)
    f = Field.zeros(grid)
    f.interior[...] = (grid.centers() > 0.5).astype(float)
    fd.fill_ghosts(f, (fd.FREEFLOW, fd.FREEFLOW), 4)
    ev = reconstruct_edges(f, kind)
    eps = 1e-12
    assert ev.left.min() >= -eps and ev.left.max() <= 1 + eps
    assert ev.right.min() >= -eps and ev.right.max() <= 1 + eps
    # the kernel's choice must match the reference selection exactly
    c_right, c_left = recon_tables(order)
    g = grid.ghost
    for i in range(grid.m + 1):
        r_edge, _, sel = reference_eno_edge(f.values, g - 1 + i, order, c_right, c_left)
        _, l_edge, _ = reference_eno_edge(f.values, g + i, order, c_right, c_left)
        # selected stencil data stays within the global step range
        window = f.values[sel:sel + order]
        assert window.min() >= 0.0 and window.max() <= 1.0
        assert ev.left[i] == pytest.approx(r_edge, abs=1e-14)
        assert ev.right[i] == pytest.approx(l_edge, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6),
       st.floats(min_value=-5, max_value=5, allow_nan=False),
       st.integers(min_value=-8, max_value=8))
def test_eno_selection_invariant_under_shift_and_scaling(seed, c, pow2):
    rng = np.random.default_rng(seed)
    kind = ReconstructionKind("eno", 3)
    grid = make_grid(0, 1, 12, kind.radius)
    base = Field.zeros(grid)
    base.values[...] = rng.standard_normal(grid.n_total)
    base.ghosts_filled = True
    ev0 = reconstruct_edges(base, kind)
    shifted = Field(grid, base.values + c, ghosts_filled=True)
    ev1 = reconstruct_edges(shifted, kind)
    assert np.allclose(ev1.left, ev0.left + c, rtol=0, atol=1e-12 * (1 + abs(c)))
    lam = 2.0 ** pow2  # exact scaling keeps every comparison and tie identical
    scaled = Field(grid, base.values * lam, ghosts_filled=True)
    ev2 = reconstruct_edges(scaled, kind)
    assert np.array_equal(ev2.left, ev0.left * lam)
    assert np.array_equal(ev2.right, ev0.right * lam)


def test_eno_monotone_data_stays_in_range():
    # edge values may exceed the point-value range only by the sliding
    # average correction, of the size of a second difference
    kind = ReconstructionKind("eno", 4)
    for fn in (lambda x: np.tanh(8 * (x - 0.5)),
               lambda x: np.minimum(1.0, np.maximum(0.0, 3 * x - 1))):
        grid = make_grid(0, 1, 24, kind.radius)
        f = Field.zeros(grid)
        f.interior[...] = fn(grid.centers())
        fd.fill_ghosts(f, (fd.FREEFLOW, fd.FREEFLOW), 4)
        ev = reconstruct_edges(f, kind)
        lo, hi = f.values.min(), f.values.max()
        pad = np.abs(np.diff(f.values, 2)).max() / 8.0 + 1e-12
        assert ev.left.min() >= lo - pad and ev.left.max() <= hi + pad
        assert ev.right.min() >= lo - pad and ev.right.max() <= hi + pad


def test_reconstruct_rejects_unfilled_ghosts_and_thin_layers():
    kind = ReconstructionKind("eno", 3)
    grid = make_grid(0, 1, 8, kind.radius)
    f = Field.zeros(grid)
    with pytest.raises(ValueError):
        reconstruct_edges(f, kind)
    thin = Field.zeros(make_grid(0, 1, 8, 1))
    thin.ghosts_filled = True
    with pytest.raises(ValueError):
        reconstruct_edges(thin, kind)


def test_edge_values_shape():
    kind = ReconstructionKind("weno", 5)
    grid = make_grid(0, 1, 20, kind.radius)
    ev = reconstruct_edges(field_from(grid, np.cos), kind)
    assert isinstance(ev, EdgeValues)
    assert ev.left.shape == (21,) and ev.right.shape == (21,)


# ---------------------------------------------------------------------------
# weno weights


def test_weno_weights_equal_indicators_give_linear_weights():
    lin = np.array([0.1, 0.6, 0.3])
    w = weno_weights(np.array([2.0, 2.0, 2.0]), lin)
    assert np.allclose(w, lin, rtol=0, atol=1e-15)
    assert w.sum() == pytest.approx(1.0, abs=0)


def test_weno_weights_huge_indicator_vanishes():
    lin = np.array([0.1, 0.6, 0.3])
    w = weno_weights(np.array([1e30, 1e-4, 1e-4]), lin)
    assert w[0] < 1e-40
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(w[1:] / w[1:].sum(), [2 / 3, 1 / 3], atol=1e-12)


def test_weno_weights_on_smooth_sine_near_linear():
    # indicators computed from sampled sine at h = 1/100 (Jiang-Shu formulas)
    h = 1 / 100
    x = np.arange(-2, 103) * h + h / 2
    u = np.sin(2 * np.pi * x)
    lin = np.array([0.1, 0.6, 0.3])
    worst = 0.0
    for j in range(2, 102):
        q = u[j - 2:j + 3]
        b_right = 13 / 12 * (q[2] - 2 * q[3] + q[4]) ** 2 + 0.25 * (3 * q[2] - 4 * q[3] + q[4]) ** 2
        b_mid = 13 / 12 * (q[1] - 2 * q[2] + q[3]) ** 2 + 0.25 * (q[1] - q[3]) ** 2
        b_left = 13 / 12 * (q[0] - 2 * q[1] + q[2]) ** 2 + 0.25 * (q[0] - 4 * q[1] + 3 * q[2]) ** 2
        w = weno_weights(np.array([b_left, b_mid, b_right]), lin)
        worst = max(worst, float(np.max(np.abs(w - lin))))
    assert worst < 1e-2


@settings(max_examples=50)
@given(st.lists(st.floats(min_value=0, max_value=1e6), min_size=2, max_size=4))
def test_weno_weights_nonnegative_and_normalized(betas):
    lin = np.full(len(betas), 1.0 / len(betas))
    w = weno_weights(np.array(betas), lin)
    assert np.all(w >= 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_weno_weights_reject_negative_indicators():
    with pytest.raises(ValueError):
        weno_weights(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))


def test_weno_gamma_blend_reproduces_full_stencil():
    # the optimal linear weights must recombine the 3-cell candidates into
    # the full 5-cell reconstruction exactly
    from relaxrd._tables import WENO_GAMMA_RIGHT, recon_tables
    cr3, _ = recon_tables(3)
    cr5, _ = recon_tables(5)
    blend = np.zeros(5)
    for s, gamma in enumerate(WENO_GAMMA_RIGHT[3]):
        blend[2 - s:5 - s] += gamma * cr3[s]
    assert np.allclose(blend, cr5[2], rtol=0, atol=1e-15)

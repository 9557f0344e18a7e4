import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaxrd.mesh import Field, make_grid, make_grid2d, restrict_to_coarse


def test_centers_formula():
    g = make_grid(0, 1, 4, 0)
    assert g.h == 0.25
    assert np.allclose(g.centers(), [0.125, 0.375, 0.625, 0.875], rtol=0, atol=0)


def test_centers_with_ghosts():
    g = make_grid(-5, 5, 300, 3)
    assert g.h == pytest.approx(1 / 30)
    # first interior center: a + h/2
    assert g.centers()[0] == pytest.approx(-5 + 1 / 60, abs=1e-14)
    cg = g.centers_with_ghosts()
    assert len(cg) == 306
    assert cg[3] == g.centers()[0]


def test_endpoints():
    g = make_grid(2.0, 3.0, 10, 0)
    c = g.centers()
    assert c[0] == pytest.approx(2.0 + g.h / 2, rel=1e-15)
    assert c[-1] == pytest.approx(3.0 - g.h / 2, rel=1e-15)


def test_triple_refinement_nesting():
    coarse = make_grid(0, 1, 12, 0)
    fine = make_grid(0, 1, 36, 0)
    cc, cf = coarse.centers(), fine.centers()
    for j in range(12):
        # coarse center j coincides with fine center 3j+1 (0-based)
        assert cf[3 * j + 1] == pytest.approx(cc[j], rel=1e-15, abs=1e-16)


def test_make_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        make_grid(0, 1, 0)
    with pytest.raises(ValueError):
        make_grid(1, 1, 4)
    with pytest.raises(ValueError):
        make_grid(1, 0, 4)


def test_cell_widths_sum_to_domain():
    for m in (7, 108, 973):
        g = make_grid(-2.5, 3.5, m, 0)
        total = np.full(m, g.h).sum()
        assert total == pytest.approx(6.0, rel=1e-13)


def test_field_shape_checks():
    g = make_grid(0, 1, 8, 2)
    with pytest.raises(ValueError):
        Field(g, np.zeros(8))
    f = Field.zeros(g)
    assert f.values.shape == (12,)
    assert f.interior.shape == (8,)
    f.interior[...] = 1.0
    assert f.values[:2].sum() == 0.0 and f.values[2:10].sum() == 8.0


def test_field_2d_layout_row_major_yx():
    g = make_grid2d(0, 1, 4, 0, 2, 6, 1)
    f = Field.zeros(g)
    assert f.values.shape == (8, 6)
    xc, yc = g.centers()
    f2 = Field.from_function(g, lambda x, y: 10 * y + x)
    assert f2.interior[2, 3] == pytest.approx(10 * yc[2] + xc[3])


def test_restrict_constant_and_coordinates():
    fine = make_grid(0, 1, 36, 0)
    coarse = make_grid(0, 1, 12, 0)
    ones = Field.from_function(fine, lambda x: np.ones_like(x))
    assert np.all(restrict_to_coarse(ones, coarse).interior == 1.0)
    coords = Field.from_function(fine, lambda x: x)
    got = restrict_to_coarse(coords, coarse).interior
    assert np.allclose(got, coarse.centers(), rtol=0, atol=1e-15)


def test_restrict_sine_matches_direct_sampling():
    # oracle: sample both grids independently; centers coincide so the
    # restriction must agree to round-off
    fine = make_grid(0, 1, 972, 0)
    coarse = make_grid(0, 1, 324, 0)
    f = Field.from_function(fine, lambda x: np.sin(2 * np.pi * x))
    direct = np.sin(2 * np.pi * coarse.centers())
    got = restrict_to_coarse(f, coarse).interior
    assert np.max(np.abs(got - direct)) < 1e-14


def test_restrict_power_of_three_ratios_only():
    fine = make_grid(0, 1, 24, 0)
    with pytest.raises(ValueError):
        restrict_to_coarse(Field.zeros(fine), make_grid(0, 1, 12, 0))
    with pytest.raises(ValueError):
        restrict_to_coarse(Field.zeros(make_grid(0, 1, 27, 0)), make_grid(0, 2, 9, 0))
    # 27 -> 9 and 27 -> 3 are fine (3^1, 3^2)
    f = Field.from_function(make_grid(0, 1, 27, 0), lambda x: x ** 2)
    for mc in (9, 3):
        c = make_grid(0, 1, mc, 0)
        assert np.allclose(restrict_to_coarse(f, c).interior, c.centers() ** 2,
                           rtol=0, atol=1e-16)


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=3))
def test_restrict_is_sampling_for_smooth_functions(mc, k):
    fine = make_grid(-1, 2, mc * 3 ** k, 0)
    coarse = make_grid(-1, 2, mc, 0)
    f = Field.from_function(fine, lambda x: np.cos(x) + 0.3 * x)
    direct = np.cos(coarse.centers()) + 0.3 * coarse.centers()
    got = restrict_to_coarse(f, coarse).interior
    assert np.max(np.abs(got - direct)) < 5e-14

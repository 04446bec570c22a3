import numpy as np
import pytest

from nlsusy import (
    Field,
    Grid1D,
    NonlinearitySpec,
    RiccatiSolveError,
    catalog_grid,
    energy_of,
    eval_catalog,
    riccati_residual,
    solve_riccati_linearized,
    solve_riccati_shooting,
)

BOX = Grid1D(-10.0, 10.0, 1024)


def kerr_field(eta=1.0, grid=BOX):
    psi = eval_catalog(eta, "psi", grid)
    return Field(grid, 2.0 * np.abs(psi.values) ** 2)


def test_kerr_spec_evaluates_kappa_abs_square():
    spec = NonlinearitySpec.kerr(2.0)
    psi = np.array([1.0, 2.0j, 1.0 + 1.0j])
    assert np.allclose(spec(psi), [2.0, 8.0, 4.0])


def test_custom_spec_requires_vanishing_at_zero():
    NonlinearitySpec.custom(lambda p: np.abs(p) ** 4)
    with pytest.raises(ValueError):
        NonlinearitySpec.custom(lambda p: np.abs(p) ** 2 + 1.0)


def test_linearized_reproduces_kink():
    w = solve_riccati_linearized(kerr_field(), -4.0)
    assert np.abs(w.w.values - 2.0 * np.tanh(BOX.x)).max() <= 1e-6
    assert w.provenance == "riccati-linearized"


def test_linearized_constant_solution():
    nf = Field(BOX, np.zeros(BOX.n))
    w = solve_riccati_linearized(nf, -1.0, w0=1.0)
    assert np.abs(w.w.values - 1.0).max() <= 1e-10
    rep = riccati_residual(w, nf)
    assert rep.linf <= 1e-10


def test_linearized_scaled_family():
    # W = 2*eta*tanh(eta x) solves the equation at E0 = -4 eta^2 (symbolic check)
    eta = 2.0
    grid = catalog_grid(eta)
    w = solve_riccati_linearized(kerr_field(eta, grid), energy_of(eta)[1])
    assert np.abs(w.w.values - 4.0 * np.tanh(2.0 * grid.x)).max() <= 1e-6


def test_linearized_rejects_inadmissible_e0():
    # E0 = -0.5 sits above the admissible range: v develops a node
    with pytest.raises(RiccatiSolveError):
        solve_riccati_linearized(kerr_field(), -0.5)


def test_shooting_midpoint_on_all_bounded_bracket():
    with pytest.warns(UserWarning, match="non-unique"):
        w = solve_riccati_shooting(kerr_field(), -4.0, w0_bracket=(-1.0, 1.0))
    w_at_zero = np.interp(0.0, BOX.x, w.w.values)
    assert abs(w_at_zero) <= 1e-4  # W(0) -> 0
    assert np.abs(w.w.values - 2.0 * np.tanh(BOX.x)).max() <= 1e-4
    assert w.provenance == "riccati-shooting"


def test_shooting_constant_solution_via_threshold():
    nf = Field(BOX, np.zeros(BOX.n))
    w = solve_riccati_shooting(nf, -1.0, w0_bracket=(0.5, 1.5))
    assert np.abs(w.w.values - 1.0).max() <= 1e-3


def test_shooting_bracket_error():
    with pytest.raises(RiccatiSolveError, match="same direction"):
        solve_riccati_shooting(kerr_field(), -4.0, w0_bracket=(-5.0, -4.0))


def test_method_agreement_across_family():
    # eta >= 1 brackets are all-bounded (midpoint path, warns); eta = 0.5's
    # bounded band is narrower than [-1, 1], so plain bisection runs silently
    import warnings

    for eta in (0.5, 1.0, 2.0):
        grid = catalog_grid(eta)
        nf = kerr_field(eta, grid)
        e0 = energy_of(eta)[1]
        w_lin = solve_riccati_linearized(nf, e0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            w_shoot = solve_riccati_shooting(nf, e0, w0_bracket=(-1.0, 1.0))
        assert np.abs(w_lin.w.values - w_shoot.w.values).max() <= 1e-4


def test_plugback_residuals():
    grid = catalog_grid(1.0)
    nf = kerr_field(1.0, grid)
    w_lin = solve_riccati_linearized(nf, -4.0)
    assert riccati_residual(w_lin, nf).linf <= 1e-6
    with pytest.warns(UserWarning, match="non-unique"):
        w_shoot = solve_riccati_shooting(nf, -4.0, w0_bracket=(-1.0, 1.0))
    assert riccati_residual(w_shoot, nf).linf <= 1e-4


def test_residual_of_analytic_kink():
    grid = catalog_grid(1.0)
    w = eval_catalog(1.0, "w", grid)
    from nlsusy import Superpotential

    sp = Superpotential(w=w, provenance="analytic", e0=-4.0)
    rep = riccati_residual(sp, kerr_field(1.0, grid))
    assert rep.linf <= 1e-8


def test_residual_zero_case():
    from nlsusy import Superpotential

    nf = Field(BOX, np.zeros(BOX.n))
    sp = Superpotential(w=Field(BOX, np.zeros(BOX.n)), provenance="analytic", e0=0.0)
    assert riccati_residual(sp, nf, 0.0).linf <= 1e-15


def test_residual_detects_wrong_level():
    from nlsusy import Superpotential

    grid = catalog_grid(1.0)
    sp = Superpotential(w=eval_catalog(1.0, "w", grid), provenance="analytic", e0=-4.0)
    rep = riccati_residual(sp, kerr_field(1.0, grid), e0=-3.0)
    assert rep.linf == pytest.approx(1.0, abs=1e-6)


def test_level_shift_moves_residual_by_constant():
    from nlsusy import Superpotential

    grid = catalog_grid(1.0)
    sp = Superpotential(w=eval_catalog(1.0, "w", grid), provenance="analytic", e0=-4.0)
    nf = kerr_field(1.0, grid)
    delta = 0.37
    r_base = riccati_residual(sp, nf, e0=-4.0).residual.values
    r_shift = riccati_residual(sp, nf, e0=-4.0 - delta).residual.values
    assert np.abs((r_base - r_shift) - delta).max() <= 1e-8


def test_even_input_gives_odd_superpotential():
    w = solve_riccati_linearized(kerr_field(), -4.0, w0=0.0)
    vals = w.w.values
    assert np.abs(vals + vals[::-1]).max() <= 1e-6

"""Acceptance suite: one test per primary criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines.  Tolerances are pinned here, not configurable.
"""

import warnings

import numpy as np
import pytest

from nlsusy import (
    DerivativeScheme,
    EvolutionState,
    Field,
    Grid1D,
    NonlinearitySpec,
    PartnerForm,
    Superpotential,
    apply_A,
    apply_h1,
    build_pair,
    catalog_grid,
    default_mask,
    derivative,
    duality_defect,
    energy_of,
    eval_catalog,
    evolve_vacuum,
    factorization_check,
    lax_residual,
    nlse_residual,
    partner_from_psi,
    partner_residual_phi,
    partner_residual_u,
    riccati_residual,
    scale_invariance_check,
    solve_riccati_linearized,
    solve_riccati_shooting,
    superpotential_from_pair,
    vacuum_residual,
)

KERR = NonlinearitySpec.kerr(2.0)


def _check(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_riccati_reproduction():
    # linearized <= 1e-6 and shooting <= 1e-4 on [-10, 10], n = 1024
    grid = Grid1D(-10.0, 10.0, 1024)
    psi = eval_catalog(1.0, "psi", grid)
    n_field = Field(grid, KERR(psi.values))
    target = 2.0 * np.tanh(grid.x)

    w_lin = solve_riccati_linearized(n_field, -4.0, w0=0.0)
    err_lin = float(np.abs(w_lin.w.values - target).max())
    _check("riccati-linearized", err_lin <= 1e-6, f"max|W - 2tanh| = {err_lin:.3e} (tol 1e-6)")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        w_shoot = solve_riccati_shooting(n_field, -4.0, w0_bracket=(-1.0, 1.0))
    err_shoot = float(np.abs(w_shoot.w.values - target).max())
    _check("riccati-shooting", err_shoot <= 1e-4, f"max|W - 2tanh| = {err_shoot:.3e} (tol 1e-4)")


def test_partner_reproduction_and_recovery():
    grid = catalog_grid(1.0)
    psi = eval_catalog(1.0, "psi", grid)
    w = Superpotential(w=eval_catalog(1.0, "w", grid), provenance="analytic", e0=-4.0)
    phi = partner_from_psi(psi, w, e_n=-1.0, e0=-4.0)
    expected = np.sqrt(3.0) * np.tanh(grid.x) / np.cosh(grid.x)
    err_phi = float(np.abs(phi.values - expected).max())
    _check("partner-reproduction", err_phi <= 1e-8, f"max|phi - sqrt3 sech tanh| = {err_phi:.3e} (tol 1e-8)")

    rec = superpotential_from_pair(psi, phi, e_n=-1.0, e0=-4.0)
    um = ~rec.w.mask
    err_w = float(np.abs((rec.w.values - w.w.values)[um]).max())
    _check("pair-recovery", err_w <= 1e-6, f"max|W_rec - W| = {err_w:.3e} on unmasked (tol 1e-6)")


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
def test_equation_residual_suite(eta):
    grid = catalog_grid(eta)
    pair = build_pair(eta, grid)
    mask = default_mask(pair.phi)
    n_field = Field(grid, KERR(pair.psi.values))
    u = eval_catalog(eta, "u", grid)

    checks = {
        "eq5": nlse_residual(pair.psi, pair.e_n, KERR).linf,
        "eq6": factorization_check(pair).linf,
        "eq7": riccati_residual(pair.w, n_field).linf,
        "eq10": partner_residual_phi(pair, PartnerForm.EQ10, mask=mask).linf,
        "eq11-corrected": partner_residual_phi(pair, PartnerForm.EQ11_CORRECTED, mask=mask).linf,
        "eq14": partner_residual_u(Field(grid, u.values), pair.psi, pair.e_n,
                                   pair.e0, KERR, mask=mask).linf,
    }
    worst = max(checks.values())
    ok = worst <= 1e-6
    detail = ", ".join(f"{k}={v:.2e}" for k, v in checks.items())
    _check(f"residual-suite[eta={eta}]", ok, detail + " (tol 1e-6)")

    if eta == 1.0:
        as_printed = partner_residual_phi(pair, PartnerForm.EQ11_AS_PRINTED, mask=mask).linf
        _check("eq11-as-printed-discrepancy", as_printed >= 0.1,
               f"linf = {as_printed:.3e} (must be >= 0.1)")


def test_duality_identity():
    worst = 0.0
    for eta in (0.5, 1.0, 2.0):
        grid = catalog_grid(eta)
        pair = build_pair(eta, grid)
        worst = max(worst, duality_defect(pair.phi, pair.psi, pair.e_n, pair.e0, KERR).linf)

    rng = np.random.default_rng(20240817)
    grid = catalog_grid(1.0)
    x = grid.x
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(10):
            phi = Field(grid, (rng.uniform(0.6, 1.2) + rng.uniform(0.2, 0.4)
                               * np.sin(rng.uniform(0.5, 2.0) * x + rng.uniform(0, np.pi)))
                        / np.cosh(rng.uniform(0.8, 1.2) * x))
            psi = Field(grid, (rng.uniform(0.3, 0.8) + rng.uniform(0.2, 0.4)
                               * np.cos(rng.uniform(0.5, 1.5) * x)) / np.cosh(x))
            e_n = rng.uniform(-2.0, 0.0)
            e0 = e_n - rng.uniform(1.0, 5.0)
            worst = max(worst, duality_defect(phi, psi, e_n, e0, KERR).linf)
    _check("duality-identity", worst <= 1e-8,
           f"max pointwise defect = {worst:.3e} over 3 catalog + 10 random pairs (tol 1e-8)")


def test_annihilation_and_h1_eigenstate():
    grid = catalog_grid(1.0)
    w = Superpotential(w=Field(grid, 2 * np.tanh(grid.x)), provenance="analytic", e0=-4.0)
    phi0 = Field(grid, 1 / np.cosh(grid.x) ** 2)
    ann = float(np.abs(apply_A(w, phi0).values).max())
    _check("annihilation", ann <= 1e-8, f"max|(d/dx + 2tanh) sech^2| = {ann:.3e} (tol 1e-8)")

    h1 = apply_h1(w, phi0)
    err = float(np.abs(h1.values + 4.0 * phi0.values).max())
    _check("h1-eigenstate", err <= 1e-6, f"max|H1 sech^2 + 4 sech^2| = {err:.3e} (tol 1e-6)")


def test_vacuum_dynamics():
    grid = Grid1D(-4.0, 4.0, 1024)
    phi0 = Field(grid, 1 / np.cosh(2 * grid.x))

    states = evolve_vacuum(phi0, dt=1e-3, steps=1000)
    mod0 = np.abs(1.0 / states[0].u.values)
    drift = max(float(np.abs(np.abs(1.0 / s.u.values) - mod0).max()) for s in states[1:])
    _check("vacuum-modulus-drift", drift <= 1e-6, f"drift = {drift:.3e} over t in [0,1] (tol 1e-6)")

    res = vacuum_residual(states)
    _check("vacuum-residual", res.linf <= 1e-4, f"linf = {res.linf:.3e} (tol 1e-4)")

    states_half = evolve_vacuum(phi0, dt=5e-4, steps=2000)
    ratio = res.linf / vacuum_residual(states_half).linf
    _check("vacuum-dt-convergence", 3.5 <= ratio <= 4.5,
           f"residual ratio under dt halving = {ratio:.2f} (must be in [3.5, 4.5])")

    for c in (5.0, 1j):
        diff = scale_invariance_check(phi0, c, dt=1e-3, steps=1000).linf
        _check(f"scale-invariance[c={c}]", diff <= 1e-10, f"max diff = {diff:.3e} (tol 1e-10)")


def test_fake_lax_identity():
    grid = Grid1D(-4.0, 4.0, 1024)
    phi0 = Field(grid, 1 / np.cosh(2 * grid.x))
    states = evolve_vacuum(phi0, dt=1e-3, steps=1000)
    on_shell = lax_residual(states).identity_defect.linf
    _check("fake-lax-on-shell", on_shell <= 1e-8, f"identity defect = {on_shell:.3e} (tol 1e-8)")

    dt = 1e-3

    def phi_of(t):
        return (1.2 + 0.3 * np.sin(1.1 * grid.x) * np.cos(2.3 * t)) / np.cosh(0.7 * grid.x) + 0.1

    off_states = [
        EvolutionState(u=Field(grid, 1.0 / phi_of(t).astype(complex)), t=t, dt=dt, step_index=i)
        for i, t in enumerate((0.3 - dt, 0.3, 0.3 + dt))
    ]
    rep = lax_residual(off_states)
    _check("fake-lax-off-shell", rep.identity_defect.linf <= 1e-8 and rep.relative.linf > 0.01,
           f"identity defect = {rep.identity_defect.linf:.3e} while Lax residual is "
           f"O(1) ({rep.relative.linf:.3e})")


def test_shared_spectrum_scan():
    grid = catalog_grid(1.0)
    pair = build_pair(1.0, grid)
    mask = default_mask(pair.phi)
    energies = np.arange(-2.0, 0.0 + 1e-12, 1e-2)
    nlse_l2 = np.empty(energies.size)
    partner_l2 = np.empty(energies.size)
    for i, e in enumerate(energies):
        nlse_l2[i] = nlse_residual(pair.psi, e, KERR).l2
        probe = build_pair(1.0, grid)
        probe.e_n = float(e)
        partner_l2[i] = partner_residual_phi(probe, PartnerForm.EQ10, mask=mask).l2
    e_a = float(energies[np.argmin(nlse_l2)])
    e_b = float(energies[np.argmin(partner_l2)])
    ok = abs(e_a + 1.0) <= 1e-2 + 1e-12 and abs(e_a - e_b) <= 1e-2 + 1e-12
    _check("shared-spectrum-scan", ok,
           f"minimizers: original {e_a:+.2f}, partner {e_b:+.2f} (both must sit at -1.00)")


def test_differentiation_orders():
    def err2(n):
        g = Grid1D(-10.0, 10.0, n)
        f = 1 / np.cosh(g.x)
        d = derivative(Field(g, f), 1, DerivativeScheme.CENTRAL2)
        return np.abs(d.values + f * np.tanh(g.x)).max()

    ratio = err2(513) / err2(1025)
    _check("central2-order", 3.5 <= ratio <= 4.5,
           f"error ratio under grid doubling = {ratio:.2f} (must be in [3.5, 4.5])")

    g = Grid1D(-10.0, 10.0, 1024)
    f = 1 / np.cosh(3 * g.x)
    d1 = derivative(Field(g, f), 1, DerivativeScheme.SPECTRAL)
    d2 = derivative(Field(g, f), 2, DerivativeScheme.SPECTRAL)
    t3 = np.tanh(3 * g.x)
    e1 = float(np.abs(d1.values + 3 * f * t3).max())
    e2 = float(np.abs(d2.values - 9 * (f - 2 * f**3)).max())
    ok = e1 <= 1e-10 and e2 <= 1e-10
    _check("spectral-floor", ok, f"errors at n=1024 on [-10,10]: d1 {e1:.3e}, d2 {e2:.3e} (tol 1e-10)")

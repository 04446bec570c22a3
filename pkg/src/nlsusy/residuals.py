"""Residual evaluators for the stationary equations.

Forms of the partner equation in phi:

``eq10``            phi'' - 2 phi'^2/phi - kappa|psi|^2 phi
                    + 2 sqrt(dE) (psi phi'/phi - psi') = E phi   (Kerr only)
``eq13``            the same with a general N(psi) in place of kappa|psi|^2
``eq11-corrected``  the sqrt(dE) coupling written as -2 sqrt(dE) phi d/dx(psi/phi);
                    algebraically identical to eq10
``eq11-as-printed`` the coupling -2 sqrt(dE) d/dx(psi/phi) without the phi
                    factor; kept as a documented-discrepancy fixture, its
                    residual does not vanish on exact solutions

The 8 (d sqrt(phi)/dx)^2 term of the eq11/eq13 family equals 2 phi'^2/phi on
any branch of the square root and is evaluated in that form.  Derivatives of
ratios (psi/phi, 1/phi) are expanded by the chain rule onto derivatives of
the smooth fields, which is what makes pointwise evaluation next to masked
zeros meaningful.

The reciprocal-variable equation (u = 1/phi) is evaluated by
:func:`partner_residual_u`; u's derivatives are obtained from the smooth
reciprocal 1/u, since u itself grows where phi decays and has poles at the
zeros of phi, so no direct scheme is accurate on it.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .grid import (
    DEFAULT_SCHEME,
    DerivativeScheme,
    Field,
    ResidualReport,
    default_mask,
    derivative_values,
    residual_report,
)
from .riccati import NonlinearitySpec
from .susy import BrokenSusyError, SusyPair

__all__ = [
    "PartnerForm",
    "duality_defect",
    "invert_field",
    "nlse_residual",
    "partner_residual_phi",
    "partner_residual_u",
]


class PartnerForm(str, Enum):
    EQ10 = "eq10"
    EQ13 = "eq13"
    EQ11_AS_PRINTED = "eq11-as-printed"
    EQ11_CORRECTED = "eq11-corrected"


def _result_dtype(*arrays: np.ndarray):
    return np.result_type(np.float64, *(a.dtype for a in arrays))


def nlse_residual(psi: Field, e_n: float, nspec: NonlinearitySpec,
                  scheme: DerivativeScheme = DEFAULT_SCHEME) -> ResidualReport:
    """Residual of -psi'' - N(psi) psi - E_n psi."""
    d2 = derivative_values(psi.values, psi.grid.h, 2, scheme)
    res = -d2 - nspec(psi.values) * psi.values - e_n * psi.values
    return residual_report(res, psi.grid,
                           mask=None if psi.mask is None else psi.mask.copy())


def _phi_form_residual(phi: np.ndarray, psi: np.ndarray, nvals: np.ndarray,
                       e_n: float, delta_e: float, h: float,
                       form: PartnerForm, mask: np.ndarray,
                       scheme: DerivativeScheme) -> np.ndarray:
    p1 = derivative_values(phi, h, 1, scheme)
    p2 = derivative_values(phi, h, 2, scheme)
    s1 = derivative_values(psi, h, 1, scheme)
    sdE = np.sqrt(delta_e)
    um = ~mask
    res = np.zeros(phi.size, dtype=_result_dtype(phi, psi))
    if form in (PartnerForm.EQ10, PartnerForm.EQ13):
        coupling = 2.0 * sdE * (psi[um] * p1[um] / phi[um] - s1[um])
    else:
        dratio = s1[um] / phi[um] - psi[um] * p1[um] / phi[um] ** 2
        coupling = -2.0 * sdE * dratio
        if form is PartnerForm.EQ11_CORRECTED:
            coupling = coupling * phi[um]
    res[um] = (
        p2[um]
        - 2.0 * p1[um] ** 2 / phi[um]
        - nvals[um] * phi[um]
        + coupling
        - e_n * phi[um]
    )
    return res


def partner_residual_phi(pair: SusyPair, form: PartnerForm | str = PartnerForm.EQ10,
                         scheme: DerivativeScheme = DEFAULT_SCHEME,
                         mask: np.ndarray | None = None) -> ResidualReport:
    """Residual of the chosen partner-equation form on unmasked points."""
    form = PartnerForm(form)
    if mask is None:
        mask = default_mask(pair.phi)
    if np.any(pair.phi.values[~mask] == 0.0):
        raise ValueError("unmasked zero of phi; tighten the mask threshold")
    psi = pair.psi.values
    if form is PartnerForm.EQ10:
        if pair.nspec.kind != "kerr":
            raise ValueError("eq10 is the Kerr-written form; use eq13 for a general N(psi)")
        nvals = pair.nspec.kappa * np.abs(psi) ** 2
    else:
        nvals = pair.nspec(psi)
    res = _phi_form_residual(pair.phi.values, psi, nvals, pair.e_n, pair.delta_e,
                             pair.phi.grid.h, form, mask, scheme)
    return residual_report(res, pair.phi.grid, mask=mask)


def _u_residual(u: np.ndarray, psi: np.ndarray, nvals: np.ndarray,
                e_n: float, delta_e: float, h: float,
                mask: np.ndarray, scheme: DerivativeScheme) -> np.ndarray:
    # derivatives of u via the smooth reciprocal g = 1/u
    g = 1.0 / u
    g1 = derivative_values(g, h, 1, scheme)
    g2 = derivative_values(g, h, 2, scheme)
    s1 = derivative_values(psi, h, 1, scheme)
    sdE = np.sqrt(delta_e)
    um = ~mask
    res = np.zeros(u.size, dtype=_result_dtype(u, psi))
    u1 = -g1[um] / g[um] ** 2
    u2 = 2.0 * g1[um] ** 2 / g[um] ** 3 - g2[um] / g[um] ** 2
    res[um] = (
        -u2
        - nvals[um] * u[um]
        - 2.0 * sdE * (u1 * u[um] * psi[um] + s1[um] * u[um] ** 2)
        - e_n * u[um]
    )
    return res


def partner_residual_u(u: Field, psi: Field, e_n: float, e0: float,
                       nspec: NonlinearitySpec,
                       scheme: DerivativeScheme = DEFAULT_SCHEME,
                       mask: np.ndarray | None = None) -> ResidualReport:
    """Residual of -u'' - N(psi) u - 2 sqrt(dE) (u' u psi + psi' u^2) - E_n u.

    The mask must exclude the poles of u (zeros of 1/u); by default it is
    built from the reciprocal field.  A vanishing psi is rejected: with no
    coupling term the superpotential would be eigenfunction-independent and
    the construction void.
    """
    if not e_n > e0:
        raise BrokenSusyError(f"e_n={e_n} must exceed e0={e0}")
    if np.abs(psi.values).max() == 0.0:
        raise ValueError(
            "psi is identically zero: the reciprocal partner equation requires "
            "a solution of the nonlinear equation (the decoupled level is the "
            "vacuum module's business)"
        )
    if np.any(u.values == 0.0) or not np.isfinite(u.values).all():
        raise ValueError("u must be finite and nonzero on every grid point")
    recip = Field(u.grid, 1.0 / u.values)
    if mask is None:
        mask = default_mask(recip)
    res = _u_residual(u.values, psi.values, nspec(psi.values), float(e_n),
                      float(e_n) - float(e0), u.grid.h, mask, scheme)
    return residual_report(res, u.grid, mask=mask)


def invert_field(phi: Field, mask: np.ndarray | None = None) -> Field:
    """Pointwise reciprocal; masked samples are stored as zeros."""
    if mask is None:
        mask = default_mask(phi)
    if np.any(phi.values[~mask] == 0.0):
        raise ValueError("unmasked zero; cannot invert")
    out = np.zeros_like(phi.values)
    um = ~mask
    out[um] = 1.0 / phi.values[um]
    return Field(phi.grid, out, mask.copy())


def duality_defect(phi: Field, psi: Field, e_n: float, e0: float,
                   nspec: NonlinearitySpec,
                   scheme: DerivativeScheme = DEFAULT_SCHEME,
                   mask: np.ndarray | None = None) -> ResidualReport:
    """Pointwise defect phi^2 * R_u(1/phi) - R_phi(phi) of the substitution identity.

    Both residuals are oriented left-minus-right of their printed equations.
    The identity holds off-shell (any smooth pair), so the defect measures
    the evaluators' internal consistency, not solution quality.  Requires
    phi nonzero on every node (place zeros between nodes, e.g. even n).
    """
    if not e_n > e0:
        raise BrokenSusyError(f"e_n={e_n} must exceed e0={e0}")
    if np.any(phi.values == 0.0):
        raise ValueError(
            "phi vanishes exactly on a grid node; 1/phi is not representable "
            "(use a grid whose nodes avoid the zeros, e.g. even n)"
        )
    if mask is None:
        mask = default_mask(phi)
    pv, sv = phi.values, psi.values
    nvals = nspec(sv)
    de = float(e_n) - float(e0)
    r_phi = _phi_form_residual(pv, sv, nvals, float(e_n), de, phi.grid.h,
                               PartnerForm.EQ13, mask, scheme)
    r_u = _u_residual(1.0 / pv, sv, nvals, float(e_n), de, phi.grid.h, mask, scheme)
    defect = pv**2 * r_u - r_phi
    return residual_report(defect, phi.grid, mask=mask)

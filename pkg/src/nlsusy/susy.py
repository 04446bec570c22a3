"""Factorization operators and the maps between a solution and its partner.

A = d/dx + W and its formal partner A~ = -d/dx + W (not the Hermitian
adjoint) factorize the pair of effective Hamiltonians sharing the spectrum
above the factorization energy E0.  The eigenfunction maps, the recovery of
W from a (psi, phi) pair, the factorization check and the annihilation
vacuum exp(-int W) all live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    DEFAULT_SCHEME,
    DerivativeScheme,
    Field,
    ResidualReport,
    antiderivative,
    default_mask,
    derivative,
    residual_report,
)
from .riccati import NonlinearitySpec, Superpotential

__all__ = [
    "BrokenSusyError",
    "PotentialField",
    "SusyPair",
    "apply_A",
    "apply_A_dagger",
    "apply_h1",
    "factorization_check",
    "partner_from_psi",
    "psi_from_partner",
    "superpotential_from_pair",
    "v1_effective",
    "v2_effective",
    "vacuum_state_from_w",
]


class BrokenSusyError(ValueError):
    """Requested a transform with e_n <= e0 (factorization energy not below the level)."""


@dataclass
class SusyPair:
    """One level: a solution psi, its partner phi, the connecting W and energies."""

    psi: Field
    phi: Field
    w: Superpotential
    e_n: float
    e0: float
    nspec: NonlinearitySpec

    def __post_init__(self):
        if not self.e_n > self.e0:
            raise BrokenSusyError(
                f"need e_n > e0 for an unbroken factorization, got e_n={self.e_n}, e0={self.e0}"
            )

    @property
    def delta_e(self) -> float:
        return self.e_n - self.e0


@dataclass
class PotentialField:
    v: Field
    role: str  # "v1-effective" | "v2-effective"


def _merge(*fields: Field) -> np.ndarray | None:
    masks = [f.mask for f in fields if f.mask is not None]
    if not masks:
        return None
    out = masks[0].copy()
    for m in masks[1:]:
        out |= m
    return out


def apply_A(w: Superpotential, f: Field, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """(d/dx + W) f."""
    df = derivative(f, 1, scheme)
    return Field(f.grid, df.values + w.w.values * f.values, _merge(w.w, f))


def apply_A_dagger(w: Superpotential, f: Field, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """(-d/dx + W) f."""
    df = derivative(f, 1, scheme)
    return Field(f.grid, -df.values + w.w.values * f.values, _merge(w.w, f))


def partner_from_psi(psi: Field, w: Superpotential, e_n: float, e0: float,
                     scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """phi = (e_n - e0)^(-1/2) (-d/dx + W) psi."""
    if not e_n > e0:
        raise BrokenSusyError(f"e_n={e_n} must exceed e0={e0}")
    out = apply_A_dagger(w, psi, scheme)
    out.values = out.values / np.sqrt(e_n - e0)
    return out


def psi_from_partner(phi: Field, w: Superpotential, e_n: float, e0: float,
                     scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """psi = (e_n - e0)^(-1/2) (d/dx + W) phi."""
    if not e_n > e0:
        raise BrokenSusyError(f"e_n={e_n} must exceed e0={e0}")
    out = apply_A(w, phi, scheme)
    out.values = out.values / np.sqrt(e_n - e0)
    return out


def superpotential_from_pair(psi: Field, phi: Field, e_n: float, e0: float,
                             mask: np.ndarray | None = None,
                             scheme: DerivativeScheme = DEFAULT_SCHEME) -> Superpotential:
    """Recover W = (sqrt(e_n - e0) psi - phi') / phi away from the zeros of phi."""
    if not e_n > e0:
        raise BrokenSusyError(f"e_n={e_n} must exceed e0={e0}")
    if mask is None:
        mask = default_mask(phi)
    if np.any(phi.values[~mask] == 0.0):
        raise ValueError("unmasked zero of phi; tighten the mask threshold")
    dphi = derivative(phi, 1, scheme)
    w = np.zeros_like(phi.values)
    um = ~mask
    w[um] = (np.sqrt(e_n - e0) * psi.values[um] - dphi.values[um]) / phi.values[um]
    w = np.real_if_close(w, tol=100)
    return Superpotential(w=Field(phi.grid, w, mask.copy()), provenance="pair-derived", e0=float(e0))


def v1_effective(w: Superpotential, scheme: DerivativeScheme = DEFAULT_SCHEME) -> PotentialField:
    """Effective potential W^2 - W' + E0 of the partner-side Hamiltonian."""
    dw = derivative(w.w, 1, scheme)
    v = w.w.values**2 - dw.values + w.e0
    return PotentialField(v=Field(w.w.grid, v, None if w.w.mask is None else w.w.mask.copy()),
                          role="v1-effective")


def v2_effective(psi: Field, nspec: NonlinearitySpec) -> PotentialField:
    """Effective potential -N(psi) seen by the original equation."""
    return PotentialField(v=Field(psi.grid, -nspec(psi.values),
                                  None if psi.mask is None else psi.mask.copy()),
                          role="v2-effective")


def apply_h1(w: Superpotential, f: Field, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """(-d^2/dx^2 + W^2 - W' + E0) f."""
    d2 = derivative(f, 2, scheme)
    v1 = v1_effective(w, scheme)
    return Field(f.grid, -d2.values + v1.v.values * f.values, _merge(w.w, f))


def factorization_check(pair: SusyPair, scheme: DerivativeScheme = DEFAULT_SCHEME) -> ResidualReport:
    """Residual of (A A~ + E0) psi - E_n psi; vanishes when W and psi are consistent."""
    g = apply_A_dagger(pair.w, pair.psi, scheme)
    aad = apply_A(pair.w, g, scheme)
    res = aad.values + pair.e0 * pair.psi.values - pair.e_n * pair.psi.values
    mask = _merge(pair.psi, pair.w.w)
    return residual_report(res, pair.psi.grid, mask=mask)


def vacuum_state_from_w(w: Superpotential, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """Annihilation vacuum exp(-int W), normalized to unit peak.

    Built so that (d/dx + W) phi0 = 0; the cumulative integral is shifted
    before exponentiation so growing superpotentials cannot overflow.
    """
    integral = antiderivative(w.w, scheme)
    expo = -integral.values
    expo = expo - expo.real.max()
    phi0 = np.exp(expo)
    if np.isrealobj(w.w.values):
        phi0 = phi0.real
    peak = np.abs(phi0).max()
    return Field(w.w.grid, phi0 / peak, None if w.w.mask is None else w.w.mask.copy())

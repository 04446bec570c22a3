"""Closed-form ground truth: the cubic-NLSE soliton level and its scaling family.

At scale eta > 0 (eta = 1 is the textbook member) with Kerr coefficient
kappa = 2:

    psi      = eta sech(eta x) e^{-i E_n t}          E_n = -eta^2
    W        = 2 eta tanh(eta x)                     E_0 = -4 eta^2
    phi      = sqrt(3) eta sech(eta x) tanh(eta x) e^{-i E_n t}
    u        = 1/(sqrt(3) eta) cosh(eta x) coth(eta x) e^{+i E_n t}
    vacuum_a = sech^2(eta x)      (annihilation vacuum exp(-int W))
    vacuum_b = sech(2 eta x)      (bound-state profile of the vacuum equation)

E_n follows from substituting sech into the stationary equation; it is also
pinned by the sqrt(3) = sqrt(E_n - E_0) amplitude of phi.  Every member
passes the full residual suite, which is what the tests assert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid1D, default_mask
from .riccati import NonlinearitySpec, Superpotential
from .susy import SusyPair

__all__ = [
    "AnalyticSolutionFamily",
    "build_pair",
    "catalog_grid",
    "energy_of",
    "eval_catalog",
]

KAPPA = 2.0

#: members verified by the acceptance suite
CERTIFIED_ETAS = (0.5, 1.0, 2.0)


def energy_of(eta: float) -> tuple[float, float, float]:
    """(E_n, E_0, delta_E) = (-eta^2, -4 eta^2, 3 eta^2)."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    return -(eta**2), -4.0 * eta**2, 3.0 * eta**2


def catalog_grid(eta: float, n: int = 1024, half_width: float = 30.0) -> Grid1D:
    """Grid scaled so every member is sampled identically: [-30/eta, 30/eta].

    The fields decay below ~1e-13 at the ends there, which keeps spectral
    differentiation at its rounding floor.  Even n keeps the zeros of phi
    (and poles of u) between nodes.
    """
    return Grid1D(-half_width / eta, half_width / eta, n)


@dataclass(frozen=True)
class AnalyticSolutionFamily:
    """One member of the scaling family; evaluators sample the closed forms."""

    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")

    @property
    def e_n(self) -> float:
        return energy_of(self.eta)[0]

    @property
    def e0(self) -> float:
        return energy_of(self.eta)[1]

    @property
    def delta_e(self) -> float:
        return energy_of(self.eta)[2]

    @property
    def kappa(self) -> float:
        return KAPPA

    def nspec(self) -> NonlinearitySpec:
        return NonlinearitySpec.kerr(KAPPA)

    def _phase(self, t: float, sign: int) -> complex:
        return np.exp(sign * 1j * self.e_n * t)

    def psi(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        vals = self.eta / np.cosh(self.eta * x)
        return vals * self._phase(t, -1) if t != 0.0 else vals

    def w(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * self.eta * np.tanh(self.eta * x)

    def phi(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        vals = np.sqrt(3.0) * self.eta * np.tanh(self.eta * x) / np.cosh(self.eta * x)
        return vals * self._phase(t, -1) if t != 0.0 else vals

    def u(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.cosh(self.eta * x) / np.tanh(self.eta * x) / (np.sqrt(3.0) * self.eta)
        return vals * self._phase(t, +1) if t != 0.0 else vals

    def vacuum_a(self, x: np.ndarray) -> np.ndarray:
        return 1.0 / np.cosh(self.eta * x) ** 2

    def vacuum_b(self, x: np.ndarray) -> np.ndarray:
        return 1.0 / np.cosh(2.0 * self.eta * x)


_WHICH = ("psi", "phi", "u", "w", "vacuum_a", "vacuum_b")


def eval_catalog(eta: float, which: str, grid: Grid1D, t: float = 0.0) -> Field:
    """Sample one closed form on a grid at time t.

    ``u`` carries a mask around the zeros of phi (its poles); nodes where the
    formula is singular (x = 0 on odd grids) are stored as 0 under the mask.
    """
    if which not in _WHICH:
        raise ValueError(f"unknown catalog member {which!r}; choose from {_WHICH}")
    fam = AnalyticSolutionFamily(eta)
    x = grid.x
    if which == "u":
        phi = Field(grid, fam.phi(x))
        mask = default_mask(phi)
        vals = fam.u(x, t)
        bad = ~np.isfinite(vals)
        vals[bad] = 0.0
        return Field(grid, vals, mask | bad)
    vals = getattr(fam, which)(x, t) if which in ("psi", "phi") else getattr(fam, which)(x)
    return Field(grid, vals)


def build_pair(eta: float, grid: Grid1D | None = None, t: float = 0.0) -> SusyPair:
    """Assemble the full SusyPair for one family member (analytic W)."""
    fam = AnalyticSolutionFamily(eta)
    grid = grid or catalog_grid(eta)
    w = Superpotential(w=Field(grid, fam.w(grid.x)), provenance="analytic", e0=fam.e0)
    return SusyPair(
        psi=Field(grid, fam.psi(grid.x, t)),
        phi=Field(grid, fam.phi(grid.x, t)),
        w=w,
        e_n=fam.e_n,
        e0=fam.e0,
        nspec=fam.nspec(),
    )

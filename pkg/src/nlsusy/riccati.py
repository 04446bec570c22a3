"""Level-dependent superpotentials from the Riccati equation W^2 + W' = -N - E0.

Two independent solvers cross-validate each other:

* :func:`solve_riccati_linearized` substitutes W = v'/v, turning the Riccati
  equation into the linear ODE v'' + (N + E0) v = 0, and integrates from the
  center outward (the bounded branch is attracting in that direction).  A
  node in v means the chosen (E0, w0) admits no pole-free superpotential.
* :func:`solve_riccati_shooting` integrates the Riccati equation directly
  with blow-up detection and bisects on W(0).

Both return a :class:`Superpotential`; :func:`riccati_residual` plugs any W
back into the equation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .grid import (
    DEFAULT_SCHEME,
    DerivativeScheme,
    Field,
    Grid1D,
    ResidualReport,
    derivative,
    residual_report,
)

__all__ = [
    "NonlinearitySpec",
    "RiccatiSolveError",
    "Superpotential",
    "riccati_residual",
    "solve_riccati_linearized",
    "solve_riccati_shooting",
]

BLOWUP_CAP = 1e6
W0_TOL = 1e-12
_ODE_RTOL = 1e-12
_ODE_ATOL = 1e-14


class RiccatiSolveError(RuntimeError):
    """The Riccati solve failed (nodeful linearization, bad bracket, ...)."""


@dataclass(frozen=True)
class NonlinearitySpec:
    """Pointwise nonlinear operator N(psi).

    ``kerr`` evaluates to kappa*|psi|^2, which turns the general stationary
    form -psi'' - N(psi) psi = E psi into the cubic NLSE.  Custom evaluators
    must map samples of psi to real samples of N(psi) with N(0) = 0.
    """

    kind: str
    kappa: float = 2.0
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def kerr(cls, kappa: float = 2.0) -> "NonlinearitySpec":
        return cls(kind="kerr", kappa=float(kappa))

    @classmethod
    def custom(cls, evaluator: Callable[[np.ndarray], np.ndarray]) -> "NonlinearitySpec":
        probe = np.asarray(evaluator(np.zeros(4, dtype=complex)))
        if not np.allclose(probe, 0.0, atol=1e-12):
            raise ValueError("nonlinearity must satisfy N(0) = 0")
        return cls(kind="custom", evaluator=evaluator)

    def __call__(self, psi_values: np.ndarray) -> np.ndarray:
        if self.kind == "kerr":
            return self.kappa * np.abs(psi_values) ** 2
        if self.evaluator is None:
            raise ValueError("custom nonlinearity without evaluator")
        return np.real_if_close(np.asarray(self.evaluator(psi_values)))


@dataclass
class Superpotential:
    """Sampled superpotential with its provenance and factorization energy."""

    w: Field
    provenance: str  # riccati-linearized | riccati-shooting | pair-derived | analytic
    e0: float


def _n_spline(n_field: Field) -> CubicSpline:
    vals = n_field.values
    if np.iscomplexobj(vals):
        if np.abs(vals.imag).max() > 1e-12 * max(1.0, np.abs(vals).max()):
            raise ValueError("N(psi) samples must be real-valued")
        vals = vals.real
    return CubicSpline(n_field.grid.x, vals)


def _split_sides(grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    x = grid.x
    return x[x >= 0.0], x[x <= 0.0][::-1]


def solve_riccati_linearized(n_field: Field, e0: float, grid: Grid1D | None = None,
                             w0: float = 0.0) -> Superpotential:
    """Superpotential via the v = exp(int W) linearization.

    Integrates vt = v*exp(-sigma*x) with sigma = sqrt(max(-e0, 0)) to keep the
    growing solution in range on wide boxes; W = sigma + vt'/vt is unaffected.
    Raises :class:`RiccatiSolveError` when v crosses zero (nodeful
    linearization: adjust w0 or E0) or the stepper fails.
    """
    grid = grid or n_field.grid
    if grid != n_field.grid:
        raise ValueError("grid does not match the N(psi) samples")
    spline = _n_spline(n_field)
    e0 = float(e0)
    sigma = float(np.sqrt(max(-e0, 0.0)))

    def rhs(s, y):
        vt, dvt = y
        return (dvt, -2.0 * sigma * dvt - (spline(s) + e0 + sigma**2) * vt)

    xr, xl = _split_sides(grid)
    w = np.empty(grid.n, dtype=float)
    for xs, right in ((xr, True), (xl, False)):
        if xs.size == 0:
            continue
        sol = solve_ivp(rhs, (0.0, xs[-1]), [1.0, w0 - sigma], t_eval=xs,
                        rtol=_ODE_RTOL, atol=_ODE_ATOL, max_step=0.5)
        if sol.status != 0 or not np.isfinite(sol.y).all():
            raise RiccatiSolveError(f"linearized integration failed: {sol.message}")
        vt, dvt = sol.y
        if np.any(vt <= 0.0):
            raise RiccatiSolveError(
                "nodeful linearization: v crosses zero on the grid; "
                "adjust w0 or choose E0 further below the spectrum"
            )
        ws = sigma + dvt / vt
        if right:
            w[grid.x >= 0.0] = ws
        else:
            w[grid.x <= 0.0] = ws[::-1]
    return Superpotential(w=Field(grid, w), provenance="riccati-linearized", e0=e0)


def _shoot_side(spline, e0: float, xs: np.ndarray, w0: float, bound: float):
    """Integrate W' = -N - E0 - W^2 along one side; returns (bounded, W)."""

    def rhs(s, y):
        return (-spline(s) - e0 - y[0] ** 2,)

    def blew(s, y):
        return abs(y[0]) - bound

    blew.terminal = True
    sol = solve_ivp(rhs, (0.0, xs[-1]), [w0], t_eval=xs,
                    rtol=1e-10, atol=1e-12, events=blew, max_step=0.5)
    if sol.status == 1:  # crossed the pole-free bound: blowing up
        return False, None
    if sol.status != 0:
        raise RiccatiSolveError(f"shooting integration failed: {sol.message}")
    return True, sol.y[0]


def _classify(spline, e0, xr, xl, w0, bound):
    """-1: blows integrating rightward (w0 too low), +1: leftward (too high), 0: bounded."""
    ok_r, wr = _shoot_side(spline, e0, xr, w0, bound)
    if not ok_r:
        return -1, None
    ok_l, wl = _shoot_side(spline, e0, xl, w0, bound)
    if not ok_l:
        return +1, None
    return 0, (wr, wl)


def solve_riccati_shooting(n_field: Field, e0: float, grid: Grid1D | None = None,
                           w0_bracket: tuple[float, float] = (-1.0, 1.0),
                           cap: float = BLOWUP_CAP, w0_tol: float = W0_TOL) -> Superpotential:
    """Superpotential by direct integration of the Riccati equation with bisection on W(0).

    A trajectory counts as blowing up once |W| leaves the a-priori bound for
    pole-free solutions (a generous multiple of sqrt(max(-N - E0)), capped by
    ``cap``): past that, W'' ~ -W^2 drives it to infinity within ~1/|W|.  If
    both bracket endpoints give bounded trajectories the solution is
    non-unique; the midpoint is returned with a warning.  If exactly one
    endpoint is bounded, bisection walks to the boundedness threshold and
    returns the last bounded trajectory.
    """
    grid = grid or n_field.grid
    if grid != n_field.grid:
        raise ValueError("grid does not match the N(psi) samples")
    spline = _n_spline(n_field)
    e0 = float(e0)
    xr, xl = _split_sides(grid)
    lo, hi = float(w0_bracket[0]), float(w0_bracket[1])
    if not hi > lo:
        raise ValueError("bracket must satisfy w0_bracket[0] < w0_bracket[1]")
    asymptote = np.sqrt(max(0.0, float(np.max(-n_field.values.real - e0))))
    bound = min(float(cap), max(50.0 * (1.0 + asymptote), 4.0 * max(abs(lo), abs(hi)) + 10.0))

    def assemble(w0, sides):
        wr, wl = sides
        w = np.empty(grid.n, dtype=float)
        w[grid.x >= 0.0] = wr
        w[grid.x <= 0.0] = wl[::-1]
        return Superpotential(w=Field(grid, w), provenance="riccati-shooting", e0=e0)

    s_lo, sides_lo = _classify(spline, e0, xr, xl, lo, bound)
    s_hi, sides_hi = _classify(spline, e0, xr, xl, hi, bound)

    if s_lo == 0 and s_hi == 0:
        mid = 0.5 * (lo + hi)
        warnings.warn(
            "both bracket endpoints give bounded Riccati trajectories; "
            "returning the midpoint solution (non-unique)",
            stacklevel=2,
        )
        s_mid, sides_mid = _classify(spline, e0, xr, xl, mid, bound)
        if s_mid != 0:
            raise RiccatiSolveError("midpoint of an all-bounded bracket blew up")
        return assemble(mid, sides_mid)
    if s_lo == s_hi:
        raise RiccatiSolveError(
            f"bracket endpoints blow up in the same direction (sign {s_lo:+d}); widen the bracket"
        )

    # Bisect toward the boundedness threshold, collecting bounded candidates
    # in order.  On a finite box, trajectories just past the true threshold
    # can look bounded while hugging the blow-up bound (their pole sits just
    # outside the box); those are filtered out by size against the smallest
    # candidate, and the latest surviving candidate (the one closest to the
    # threshold from the bounded side) is returned.
    candidates: list[tuple[float, tuple, float]] = []

    def consider(w0, sides):
        size = max(float(np.abs(sides[0]).max()), float(np.abs(sides[1]).max()))
        candidates.append((w0, sides, size))

    if s_lo == 0:
        consider(lo, sides_lo)
    if s_hi == 0:
        consider(hi, sides_hi)
    while hi - lo > w0_tol:
        mid = 0.5 * (lo + hi)
        s_mid, sides_mid = _classify(spline, e0, xr, xl, mid, bound)
        if s_mid == 0:
            consider(mid, sides_mid)
            if s_lo != 0 and s_hi != 0:
                # both endpoints blew in opposite directions and a bounded
                # trajectory sits between them: done
                return assemble(mid, sides_mid)
            # one endpoint bounded: walk toward the boundedness threshold
            if s_lo != 0:
                hi = mid
            else:
                lo = mid
        elif s_mid == s_lo or (s_mid == -1 and s_lo == 0):
            lo = mid
        else:
            hi = mid
    if not candidates:
        raise RiccatiSolveError(
            "bisection found no bounded trajectory inside the bracket"
        )
    smallest = min(size for _, _, size in candidates)
    cutoff = 2.0 * smallest + 0.1 * (1.0 + asymptote)
    accepted = [(w0, sides) for w0, sides, size in candidates if size <= cutoff]
    return assemble(*accepted[-1])


def riccati_residual(w: Superpotential, n_field: Field, e0: float | None = None,
                     scheme: DerivativeScheme = DEFAULT_SCHEME) -> ResidualReport:
    """Residual of W^2 + W' + N + E0 (zero when W solves the equation at E0)."""
    e0 = w.e0 if e0 is None else float(e0)
    grid = w.w.grid
    if grid != n_field.grid:
        raise ValueError("superpotential and N(psi) live on different grids")
    dw = derivative(w.w, 1, scheme)
    res = w.w.values**2 + dw.values + n_field.values + e0
    mask = w.w.mask
    return residual_report(res, grid, mask=None if mask is None else mask.copy())

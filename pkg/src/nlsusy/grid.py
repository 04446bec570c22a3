"""Uniform 1-D grids, sampled fields, differentiation, norms and masking.

Everything downstream works on :class:`Field` objects: complex samples on a
uniform :class:`Grid1D` (units fixed by hbar = 1, m = 1/2, so the stationary
operator is -d^2/dx^2 + V).  Three derivative schemes are provided:

``central-2`` / ``central-4``
    Standard central stencils on interior points with one-sided stencils of
    matching order at the boundaries.  Local, so they tolerate fields that
    are singular somewhere (the garbage stays next to the singularity).

``spectral``
    FFT differentiation after removing the straight line through the
    endpoint samples (slope taken over the implied period n*h).  The
    detrending makes tanh-shaped fields effectively periodic to machine
    precision; fields whose detrended samples still do not wrap smoothly
    trigger :class:`SpectralAccuracyWarning`.

Masks are plain boolean arrays, ``True`` on excluded points.  They exist
because partner fields vanish at isolated points (e.g. sech*tanh at x = 0)
and their reciprocals/log-derivatives are singular there; norms and reports
simply skip masked points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "DegenerateFieldError",
    "DerivativeScheme",
    "Field",
    "Grid1D",
    "ResidualReport",
    "SpectralAccuracyWarning",
    "antiderivative",
    "default_mask",
    "derivative",
    "mask_near_zeros",
    "norms",
    "residual_report",
]

#: Relative wrap-mismatch above which spectral differentiation warns.
SPECTRAL_DECAY_TOL = 1e-10

#: Default relative threshold for masks around field zeros.
MASK_REL_THRESHOLD = 1e-3


class DegenerateFieldError(ValueError):
    """A field or mask is unusable (all samples masked, empty, ...)."""


class SpectralAccuracyWarning(UserWarning):
    """Spectral differentiation applied to a field that does not wrap smoothly."""


class DerivativeScheme(str, Enum):
    """Differentiation scheme; boundary handling is implied by the kind.

    Finite-difference kinds use one-sided stencils of the same order at the
    grid ends; the spectral kind assumes the detrended field is periodic
    (valid once the field has decayed at both ends, warned otherwise).
    """

    CENTRAL2 = "central-2"
    CENTRAL4 = "central-4"
    SPECTRAL = "spectral"


DEFAULT_SCHEME = DerivativeScheme.SPECTRAL


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` points on [x_min, x_max], spacing h = (x_max-x_min)/(n-1)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs at least 8 points, got n={self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n)


@dataclass
class Field:
    """Complex (or real) samples on a grid, optionally carrying a singularity mask.

    Unmasked samples must be finite.  Masked samples are placeholders at
    points where the represented function is singular or meaningless.
    """

    grid: Grid1D
    values: np.ndarray
    mask: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid size {self.grid.n}"
            )
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.values.shape:
                raise ValueError("mask shape does not match values")
            finite = np.isfinite(self.values[~self.mask]).all()
        else:
            finite = np.isfinite(self.values).all()
        if not finite:
            raise ValueError("field has non-finite unmasked samples")

    def copy(self) -> "Field":
        m = None if self.mask is None else self.mask.copy()
        return Field(self.grid, self.values.copy(), m)


def _merge_masks(*fields: Field) -> np.ndarray | None:
    masks = [f.mask for f in fields if f.mask is not None]
    if not masks:
        return None
    out = masks[0].copy()
    for m in masks[1:]:
        out |= m
    return out


def _detrend(values: np.ndarray, h: float):
    # slope over the implied period n*h, so tanh-like offsets wrap cleanly
    n = values.size
    slope = (values[-1] - values[0]) / (n * h)
    line = values[0] + slope * h * np.arange(n)
    return values - line, slope


def _check_wrap(g: np.ndarray, scale: float) -> None:
    gap_value = abs(g[-1] + (g[-1] - g[-2]) - g[0])
    gap_slope = abs((g[-1] - g[-2]) - (g[1] - g[0]))
    if max(gap_value, gap_slope) > SPECTRAL_DECAY_TOL * max(scale, 1e-300):
        warnings.warn(
            "field is not decayed/periodic at the grid ends; spectral derivative "
            "accuracy is degraded",
            SpectralAccuracyWarning,
            stacklevel=3,
        )


def _spectral_diff(values: np.ndarray, h: float, order: int) -> np.ndarray:
    g, slope = _detrend(values, h)
    _check_wrap(g, float(np.abs(g).max()))
    k = 2.0 * np.pi * np.fft.fftfreq(values.size, d=h)
    dg = np.fft.ifft((1j * k) ** order * np.fft.fft(g))
    if np.isrealobj(values):
        dg = dg.real
    if order == 1:
        dg = dg + slope
    return dg


def _fd2_diff(values: np.ndarray, h: float, order: int) -> np.ndarray:
    f = values
    d = np.empty_like(f)
    if order == 1:
        d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
        d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    else:
        d[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
        d[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return d


_FD4_EDGE1 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_FD4_EDGE1B = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
_FD4_EDGE2 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_FD4_EDGE2B = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0


def _fd4_diff(values: np.ndarray, h: float, order: int) -> np.ndarray:
    f = values
    d = np.empty_like(f)
    if order == 1:
        d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
        d[0] = np.dot(_FD4_EDGE1, f[:5]) / h
        d[1] = np.dot(_FD4_EDGE1B, f[:5]) / h
        d[-1] = -np.dot(_FD4_EDGE1, f[-5:][::-1]) / h
        d[-2] = -np.dot(_FD4_EDGE1B, f[-5:][::-1]) / h
    else:
        d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h**2)
        d[0] = np.dot(_FD4_EDGE2, f[:6]) / h**2
        d[1] = np.dot(_FD4_EDGE2B, f[:6]) / h**2
        d[-1] = np.dot(_FD4_EDGE2, f[-6:][::-1]) / h**2
        d[-2] = np.dot(_FD4_EDGE2B, f[-6:][::-1]) / h**2
    return d


_DIFF_IMPL = {
    DerivativeScheme.CENTRAL2: _fd2_diff,
    DerivativeScheme.CENTRAL4: _fd4_diff,
    DerivativeScheme.SPECTRAL: _spectral_diff,
}


def derivative(f: Field, order: int = 1, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """Sampled first or second derivative of ``f``.

    The mask (if any) is propagated unchanged; note that near masked points
    the derivative samples inherit whatever garbage the masked samples carry,
    which is exactly why consumers dilate masks by one point.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if f.mask is None and not np.isfinite(f.values).all():
        raise ValueError("derivative of a non-finite field")
    scheme = DerivativeScheme(scheme)
    d = _DIFF_IMPL[scheme](f.values, f.grid.h, order)
    return Field(f.grid, d, None if f.mask is None else f.mask.copy())


def derivative_values(values: np.ndarray, h: float, order: int,
                      scheme: DerivativeScheme = DEFAULT_SCHEME) -> np.ndarray:
    """Array-level differentiation used by the residual evaluators."""
    return _DIFF_IMPL[DerivativeScheme(scheme)](values, h, order)


def antiderivative(f: Field, scheme: DerivativeScheme = DEFAULT_SCHEME) -> Field:
    """Cumulative integral of ``f`` from the left grid end.

    Spectral scheme: integrate Fourier modes of the detrended samples and
    add back the line's antiderivative (exact for resolved fields).  The
    finite-difference schemes fall back to the cumulative trapezoid rule.
    """
    v, h = f.values, f.grid.h
    if DerivativeScheme(scheme) is DerivativeScheme.SPECTRAL:
        n = v.size
        g, slope = _detrend(v, h)
        xr = h * np.arange(n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        gh = np.fft.fft(g)
        mean = gh[0] / n
        gh[0] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ih = np.where(k != 0.0, gh / (1j * k), 0.0)
        G = np.fft.ifft(ih)
        if np.isrealobj(v):
            G = G.real
            mean = mean.real
        out = (G - G[0]) + mean * xr + v[0] * xr + slope * xr**2 / 2.0
    else:
        from scipy.integrate import cumulative_trapezoid

        out = cumulative_trapezoid(v, dx=h, initial=0.0)
    return Field(f.grid, out, None if f.mask is None else f.mask.copy())


def mask_near_zeros(f: Field, threshold: float) -> np.ndarray:
    """Boolean mask, True where |f| <= threshold, dilated by one point each side.

    The dilation absorbs derivative-stencil smearing of the singular point.
    Raises :class:`DegenerateFieldError` when everything ends up masked.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    mask = np.abs(f.values) <= threshold
    dilated = mask.copy()
    dilated[1:] |= mask[:-1]
    dilated[:-1] |= mask[1:]
    if dilated.all():
        raise DegenerateFieldError("all grid points masked; field is degenerate")
    return dilated


def default_mask(f: Field, rel_threshold: float = MASK_REL_THRESHOLD) -> np.ndarray:
    """Mask near zeros with a threshold relative to the field's peak magnitude."""
    peak = float(np.abs(f.values[~f.mask] if f.mask is not None else f.values).max())
    if peak == 0.0:
        raise DegenerateFieldError("cannot build a relative mask for an all-zero field")
    mask = mask_near_zeros(Field(f.grid, f.values, f.mask), rel_threshold * peak)
    if f.mask is not None:
        mask = mask | f.mask
        if mask.all():
            raise DegenerateFieldError("all grid points masked; field is degenerate")
    return mask


def _quad_weights(grid: Grid1D) -> np.ndarray:
    # trapezoid end-weights: integral of 1 over [0,1] with n=101 is exactly 1
    w = np.full(grid.n, grid.h)
    w[0] = w[-1] = grid.h / 2.0
    return w


def norms(f: Field, mask: np.ndarray | None = None) -> tuple[float, float]:
    """(L-infinity, L2) of the unmasked samples; L2 uses trapezoid weights."""
    mask = _combine(f, mask)
    if mask is not None and mask.all():
        raise DegenerateFieldError("all points masked; norms undefined")
    a = np.abs(f.values)
    w = _quad_weights(f.grid)
    if mask is not None:
        a = a[~mask]
        w = w[~mask]
    return float(a.max()), float(np.sqrt((a**2 * w).sum()))


def _combine(f: Field, mask: np.ndarray | None) -> np.ndarray | None:
    if mask is None:
        return f.mask
    if f.mask is None:
        return mask
    return mask | f.mask


@dataclass
class ResidualReport:
    """Masked residual norms plus the per-point residual field."""

    linf: float
    l2: float
    mask_fraction: float
    mask_threshold: float
    residual: Field

    def __post_init__(self):
        if self.linf < 0 or self.l2 < 0:
            raise ValueError("norms must be nonnegative")
        if not self.mask_fraction < 1.0:
            raise DegenerateFieldError("fully masked residual report")


def residual_report(values: np.ndarray, grid: Grid1D,
                    mask: np.ndarray | None = None,
                    mask_threshold: float = 0.0) -> ResidualReport:
    """Bundle residual samples into a report (masked samples zeroed for storage)."""
    values = np.asarray(values)
    if mask is not None and mask.all():
        raise DegenerateFieldError("fully masked residual report")
    stored = values.copy()
    if mask is not None:
        stored[mask] = 0.0
    fld = Field(grid, stored, None if mask is None else mask.copy())
    linf, l2 = norms(fld, mask)
    frac = 0.0 if mask is None else float(mask.mean())
    return ResidualReport(linf=linf, l2=l2, mask_fraction=frac,
                          mask_threshold=mask_threshold, residual=fld)

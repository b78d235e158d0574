"""Frequency-sensitivity functional, interrogation-time optima, and scaling fits.

The figure of merit throughout is the smallest resolvable detuning

    delta_Omega = min over the detuning grid of  Delta S_z / |d<S_z>/dOmega|,

the quantum standard deviation of the signal divided by the slope of the
resonance/fringe.  Closed forms exist for phase-noise Ramsey interrogation:

    standard   delta_Omega = sqrt(N sinh(g t) + cosh(g t)) / (t sqrt(N))
    twin beams delta_Omega = sqrt(cosh(g t)) / (t sqrt(N))

and their tau-optima give the saturation bound ~0.951*gamma_d (independent
of N) and the recovered ~0.969*gamma_d/sqrt(N).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import normalize_scheme


class DegenerateProfileError(ValueError):
    """The signal has no usable slope anywhere on the grid."""


class SensitivityPoint(NamedTuple):
    control: float
    sensitivity: float


def sensitivity_functional(
    detunings: np.ndarray, signal: np.ndarray, second_moment: np.ndarray
) -> tuple[float, float]:
    """Minimize Delta S_z / |d signal / d Omega| over the grid.

    Derivatives are central differences on the interior points; exact ties
    are broken toward the smallest |Omega|.  Returns (delta_Omega, Omega*).
    """
    omega = np.asarray(detunings, dtype=float)
    sig = np.asarray(signal, dtype=float)
    sec = np.asarray(second_moment, dtype=float)
    if omega.ndim != 1 or omega.size < 5:
        raise ValueError("need a 1-d detuning grid with at least 5 points")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("detuning grid must be strictly increasing")
    if sig.shape != omega.shape or sec.shape != omega.shape:
        raise ValueError("signal/second-moment arrays must match the grid")

    deriv = np.gradient(sig, omega)
    std = np.sqrt(np.clip(sec - sig**2, 0.0, None))
    threshold = 1e-12 * max(1.0, float(np.max(np.abs(sig))))
    valid = np.abs(deriv) > threshold
    valid[0] = valid[-1] = False  # endpoints are one-sided, not central
    if not np.any(valid):
        raise DegenerateProfileError("signal derivative vanishes everywhere on the grid")
    ratio = np.full_like(sig, np.inf)
    ratio[valid] = std[valid] / np.abs(deriv[valid])
    best = np.min(ratio)
    # Break (floating-point) ties toward the smallest |Omega|.
    ties = np.flatnonzero(ratio <= best * (1 + 1e-12))
    idx = ties[np.argmin(np.abs(omega[ties]))]
    return float(ratio[idx]), float(omega[idx])


def _scaled_ramsey_sensitivity(x: float, n_atoms: int, scheme: str) -> float:
    # delta_Omega in units of gamma_d, as a function of x = gamma_d * tau.
    if scheme == "standard":
        return np.sqrt(n_atoms * np.sinh(x) + np.cosh(x)) / (x * np.sqrt(n_atoms))
    return np.sqrt(np.cosh(x)) / (x * np.sqrt(n_atoms))


def _minimize_unimodal(f, x_lo: float = 1e-3, x_hi: float = 10.0, n_scan: int = 64):
    """Coarse log-spaced scan followed by golden-section refinement."""
    xs = np.geomspace(x_lo, x_hi, n_scan)
    values = np.array([f(x) for x in xs])
    k = int(np.argmin(values))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, n_scan - 1)]
    if k == 0 or k == n_scan - 1:
        bracket = (lo, hi)
    else:
        bracket = (lo, xs[k], hi)
    res = minimize_scalar(f, bracket=bracket, method="golden", options={"xtol": 1e-8})
    return float(res.x), float(res.fun)


def optimize_tau(n_atoms: int, gamma_d: float, scheme: str = "standard") -> tuple[float, float]:
    """Interrogation time minimizing the analytic Ramsey sensitivity.

    Works in the scaled variable x = gamma_d * tau on (0, 10]; returns
    (tau*, delta_Omega*).
    """
    if gamma_d <= 0:
        raise ValueError(f"optimize_tau needs gamma_d > 0, got {gamma_d}")
    scheme = normalize_scheme(scheme)
    x_star, f_star = _minimize_unimodal(lambda x: _scaled_ramsey_sensitivity(x, n_atoms, scheme))
    return x_star / gamma_d, f_star * gamma_d


def saturation_bound(gamma_d: float) -> float:
    """Large-N floor of the standard-scheme optimum: min over tau of
    sqrt(sinh(gamma_d tau))/tau, about 0.9512*gamma_d."""
    if gamma_d <= 0:
        raise ValueError(f"saturation_bound needs gamma_d > 0, got {gamma_d}")
    _, f_star = _minimize_unimodal(lambda x: np.sqrt(np.sinh(x)) / x)
    return f_star * gamma_d


def loglog_fit(points) -> tuple[float, float, float]:
    """Least-squares line through (ln x, ln y); returns (slope, intercept, residual).

    ``residual`` is the sum of squared log-space deviations.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (x, y) pairs")
    if np.any(pts <= 0):
        raise ValueError("log-log fit needs strictly positive values")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    design = np.column_stack([lx, np.ones_like(lx)])
    coeffs, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    resid = float(np.sum((design @ coeffs - ly) ** 2))
    return float(coeffs[0]), float(coeffs[1]), resid

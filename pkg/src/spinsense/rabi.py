"""Rabi interrogation under collective phase noise.

The ground-state ensemble is driven for the resonant pi-pulse duration
tau = pi/(2 eta) and the final inversion is recorded against the detuning.
The sensitivity is read off at the steepest flanks of the resonance, to the
left and to the right of it.  The twin-detuning variant drives both halves
collectively while their free Hamiltonians carry opposite detunings; the
dephasing stays collective.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import moments
from .basis import DickeBasis, SplitBasis, build_operator, collective_operator, embed, ground_state
from .dynamics import IntegrationError, evolve, normalize_scheme
from .sensitivity import DegenerateProfileError, SensitivityPoint, loglog_fit

# Flat-profile rejection threshold, scaled by the atom number.
_SLOPE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class RabiProfile:
    """Resonance profile of one Rabi interrogation."""

    n_atoms: int
    scheme: str
    eta: float
    gamma_d: float
    detunings: np.ndarray
    signal: np.ndarray
    second_moment: np.ndarray
    tau: float = field(init=False)
    std_dev: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("drive strength eta must be > 0")
        for name in ("detunings", "signal", "second_moment"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.detunings.ndim != 1 or np.any(np.diff(self.detunings) <= 0):
            raise ValueError("detuning grid must be 1-d and strictly increasing")
        if np.max(np.abs(self.signal)) > self.n_atoms / 2 + 1e-9:
            raise ValueError("signal exceeds the N/2 inversion bound")
        object.__setattr__(self, "tau", np.pi / (2 * self.eta))
        std = np.sqrt(np.clip(self.second_moment - self.signal**2, 0.0, None))
        std.flags.writeable = False
        object.__setattr__(self, "std_dev", std)


def default_detuning_grid(eta: float, gamma_d: float, n_points: int = 401) -> np.ndarray:
    """Uniform grid over [-6 eta', 6 eta'] with eta' = max(eta, gamma_d)."""
    span = 6.0 * max(eta, gamma_d)
    return np.linspace(-span, span, n_points)


def rabi_profile(
    n_atoms: int,
    eta: float,
    gamma_d: float,
    detunings=None,
    scheme: str = "standard",
    *,
    method: str = "auto",
    tol: float = 1e-9,
) -> RabiProfile:
    """Drive the ground state for tau = pi/(2 eta) at each detuning.

    ``method`` selects the evolution backend: "moments" (default under
    "auto") propagates the exactly closed first/second moments, "lindblad"
    integrates the full master equation per grid point.  Both agree to
    integrator precision; the moment route is what makes wide scans cheap.
    """
    scheme = normalize_scheme(scheme)
    if scheme == "phase-conjugate":
        raise ValueError("Rabi interrogation supports the standard and twin-detuning schemes")
    if eta <= 0:
        raise ValueError("drive strength eta must be > 0")
    if detunings is None:
        detunings = default_detuning_grid(eta, gamma_d)
    omegas = np.atleast_1d(np.asarray(detunings, dtype=float))
    tau = np.pi / (2 * eta)
    if method not in ("auto", "moments", "lindblad"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "moments"):
        signal, second = moments.rabi_moment_expectations(n_atoms, omegas, eta, gamma_d, tau, scheme)
    else:
        signal, second = _lindblad_rabi(n_atoms, omegas, eta, gamma_d, tau, scheme, tol)
    return RabiProfile(n_atoms, scheme, float(eta), float(gamma_d), omegas, signal, second)


def _lindblad_rabi(n_atoms, omegas, eta, gamma_d, tau, scheme, tol):
    if scheme == "standard":
        basis = DickeBasis(n_atoms)
        h_det = collective_operator("Sz", basis)
    else:
        if n_atoms % 2:
            raise ValueError("twin-detuning Rabi needs even n_atoms")
        basis = SplitBasis(n_atoms)
        sz_sub = build_operator("Sz", basis.sub_basis())
        h_det = embed(sz_sub, 1, basis) - embed(sz_sub, 2, basis)
    sx = collective_operator("Sx", basis)
    sz = collective_operator("Sz", basis)
    jumps = [(gamma_d / 2, sz)] if gamma_d > 0 else []
    rho0 = ground_state(basis)
    sz2 = sz @ sz
    signal = np.empty(omegas.size)
    second = np.empty(omegas.size)
    for i, omega in enumerate(omegas):
        try:
            state = evolve(rho0, omega * h_det + 2 * eta * sx, jumps, tau, tol)
        except IntegrationError as exc:
            raise IntegrationError(
                f"grid point omega = {omega:.6g}: {exc}", t_reached=exc.t_reached
            ) from exc
        signal[i] = state.expectation(sz)
        second[i] = state.expectation(sz2)
    return signal, second


def rabi_sensitivity(profile: RabiProfile) -> float:
    """Minimal Delta S_z / |d<S_z>/dOmega| near the two steepest flanks.

    The search is restricted to +-5 grid points around the derivative
    extremum on each side of resonance; that is where the readout operates
    and it avoids spurious minima in the wings where both the slope and the
    noise vanish.
    """
    omega = profile.detunings
    deriv = np.gradient(profile.signal, omega)
    threshold = _SLOPE_THRESHOLD * profile.n_atoms
    if np.max(np.abs(deriv)) < threshold:
        raise DegenerateProfileError("flat Rabi profile: no usable slope")
    candidates: list[int] = []
    for side in (omega < 0, omega > 0):
        idx = np.flatnonzero(side)
        if idx.size == 0:
            continue
        peak = idx[np.argmax(np.abs(deriv[idx]))]
        lo = max(peak - 5, 1)
        hi = min(peak + 5, omega.size - 2)
        candidates.extend(range(lo, hi + 1))
    candidates = np.unique(candidates)
    usable = candidates[np.abs(deriv[candidates]) > threshold]
    if usable.size == 0:
        raise DegenerateProfileError("no usable slope near the resonance flanks")
    ratios = profile.std_dev[usable] / np.abs(deriv[usable])
    return float(np.min(ratios))


def rabi_scaling_study(
    n_values,
    eta: float,
    gamma_d: float,
    scheme: str = "standard",
    *,
    n_detunings: int = 401,
    method: str = "auto",
) -> tuple[list[SensitivityPoint], float]:
    """Sensitivity versus atom number plus the fitted log-log exponent."""
    scheme = normalize_scheme(scheme)
    n_values = [int(n) for n in n_values]
    if len(n_values) < 4:
        raise ValueError("need at least 4 atom numbers for the scaling fit")
    if scheme == "twin-detuning" and any(n % 2 for n in n_values):
        raise ValueError("twin-detuning scheme needs even atom numbers")
    grid = default_detuning_grid(eta, gamma_d, n_detunings)
    tau = np.pi / (2 * eta)
    points = []
    if method in ("auto", "moments"):
        # The moment propagators are atom-number independent: one batch
        # serves every N in the study.
        props = moments.rabi_moment_propagators(grid, eta, gamma_d, tau, scheme)
        for n in n_values:
            signal, second = moments.rabi_expectations_from_propagators(props, n, scheme)
            profile = RabiProfile(n, scheme, float(eta), float(gamma_d), grid, signal, second)
            points.append(SensitivityPoint(float(n), rabi_sensitivity(profile)))
    else:
        for n in n_values:
            profile = rabi_profile(n, eta, gamma_d, grid, scheme, method=method)
            points.append(SensitivityPoint(float(n), rabi_sensitivity(profile)))
    exponent, _, _ = loglog_fit([(p.control, p.sensitivity) for p in points])
    return points, exponent

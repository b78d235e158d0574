"""Independent validation engines for the collective master-equation code.

Two routes certify the Dicke-basis implementation without sharing its
mathematics:

* stochastic trajectories of the noisy von Neumann equation -- each
  realization evolves unitarily with Gaussian white-noise increments on the
  detuning (phase noise) or the drive (amplitude noise); the trajectory
  average converges to the Lindblad solution,
* brute-force propagation in the full 2^N product space with collective
  operators built as sums of single-atom Paulis, projected back onto the
  symmetric subspace afterwards.

A scalar multiplicative-noise check pins the Stratonovich convention: the
average of dx = a0 x dt + b0 x o dW grows as exp((a0 + b0^2/2) t).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .basis import (
    Basis,
    CollectiveState,
    DickeBasis,
    SplitBasis,
    collective_operator,
    rotation_y,
)
from .dynamics import NoiseModel, integrate_lindblad, normalize_scheme

_NOISE_KINDS = ("phase", "amplitude")

# White-noise resolution rule: each step must resolve the noise bandwidth.
_MAX_RATE_DT = 0.01

_FULL_SPACE_MAX_ATOMS = 4

_NORM_DRIFT_TOL = 1e-6


class TrajectoryIntegrityError(RuntimeError):
    """A trajectory state left the unit sphere beyond tolerance."""


@dataclass(frozen=True)
class TrajectoryConfig:
    """Stochastic-ensemble parameters; dt must satisfy dt * rate <= 0.01."""

    n_trajectories: int
    dt: float
    seed: int
    noise_kind: str = "phase"

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ValueError("need at least one trajectory")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.noise_kind not in _NOISE_KINDS:
            raise ValueError(f"noise_kind must be one of {_NOISE_KINDS}")

    def check_resolution(self, rate: float) -> None:
        if self.dt * rate > _MAX_RATE_DT + 1e-15:
            raise ValueError(
                f"dt * rate = {self.dt * rate:.3g} exceeds the white-noise resolution bound {_MAX_RATE_DT}"
            )


def trajectory_stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based RNG stream keyed by (seed, index).

    Stream identity depends only on the key, so results are independent of
    execution order and parallel layout.
    """
    key = (int(seed) % (1 << 64)) * (1 << 64) + int(index)
    return np.random.Generator(np.random.Philox(key=key))


def _noise_increments(seed: int, n_traj: int, n_steps: int) -> np.ndarray:
    out = np.empty((n_traj, n_steps))
    for i in range(n_traj):
        out[i] = trajectory_stream(seed, i).standard_normal(n_steps)
    return out


def _initial_wavefunction(basis: DickeBasis, initial: str) -> np.ndarray:
    if initial == "coherent":
        return rotation_y(basis, np.pi / 2)[:, 0].copy()
    if initial == "ground":
        psi = np.zeros(basis.dim, dtype=complex)
        psi[0] = 1.0
        return psi
    raise ValueError(f"unknown initial state {initial!r}")


def _evolve_trajectories(
    n_atoms: int,
    detuning: float,
    eta: float,
    noise_kind: str,
    rate: float,
    tau: float,
    config: TrajectoryConfig,
    initial: str,
) -> np.ndarray:
    """Final wavefunctions of all trajectories, shape (n_trajectories, dim).

    Each step applies the exact unitary of the sampled generator
    H + xi * V with xi = sqrt(rate/dt) * g, the Stratonovich-consistent
    piecewise-constant (Wong-Zakai) scheme.
    """
    if config.noise_kind != noise_kind:
        raise ValueError(
            f"config.noise_kind {config.noise_kind!r} disagrees with noise_kind {noise_kind!r}"
        )
    if rate < 0 or tau < 0:
        raise ValueError("rate and tau must be >= 0")
    config.check_resolution(rate)
    basis = DickeBasis(n_atoms)
    psi0 = _initial_wavefunction(basis, initial)
    psis = np.tile(psi0, (config.n_trajectories, 1))
    if tau == 0:
        return psis

    n_steps = max(1, int(np.ceil(tau / config.dt)))
    dt = tau / n_steps
    sz = collective_operator("Sz", basis)
    sx = collective_operator("Sx", basis)
    m = basis.projections()
    kicks = np.sqrt(rate / dt) * _noise_increments(config.seed, config.n_trajectories, n_steps)

    if noise_kind == "phase" and eta == 0.0:
        # Everything commutes with S_z: accumulate the total phase exactly.
        total = detuning * tau + dt * kicks.sum(axis=1)
        psis = psis * np.exp(-1j * np.outer(total, m))
    elif noise_kind == "amplitude" and detuning == 0.0:
        # Generator stays proportional to S_x: shared eigenbasis.
        w, v = np.linalg.eigh(sx)
        total = 2 * (eta * tau + dt * kicks.sum(axis=1))
        psis = (np.exp(-1j * np.outer(total, w)) * (psis @ v.conj())) @ v.T
    else:
        h_base = detuning * sz + 2 * eta * sx
        noise_op = sz if noise_kind == "phase" else 2 * sx
        for step in range(n_steps):
            hams = h_base[None, :, :] + kicks[:, step, None, None] * noise_op[None, :, :]
            w, v = np.linalg.eigh(hams)
            rotated = np.einsum("tji,tj->ti", v.conj(), psis)
            rotated *= np.exp(-1j * dt * w)
            psis = np.einsum("tij,tj->ti", v, rotated)

    drift = float(np.max(np.abs(np.linalg.norm(psis, axis=1) - 1.0)))
    if drift > _NORM_DRIFT_TOL:
        raise TrajectoryIntegrityError(f"trajectory norm drift {drift:.3e} exceeds {_NORM_DRIFT_TOL}")
    return psis


def stochastic_trajectory_projectors(
    n_atoms: int,
    detuning: float,
    eta: float,
    noise_kind: str,
    rate: float,
    tau: float,
    config: TrajectoryConfig,
    initial: str = "coherent",
) -> np.ndarray:
    """Per-trajectory projectors |psi><psi|, shape (n_trajectories, dim, dim)."""
    psis = _evolve_trajectories(n_atoms, detuning, eta, noise_kind, rate, tau, config, initial)
    return psis[:, :, None] * psis[:, None, :].conj()


def stochastic_ensemble_average(
    n_atoms: int,
    detuning: float,
    eta: float,
    noise_kind: str,
    rate: float,
    tau: float,
    config: TrajectoryConfig,
    initial: str = "coherent",
) -> CollectiveState:
    """Trajectory-averaged density matrix of the noisy von Neumann equation.

    Phase noise kicks the detuning by sqrt(rate/dt) * g per step, amplitude
    noise the drive; per-trajectory evolution is unitary.  ``initial``
    selects the post-pulse coherent state (the Ramsey starting point) or
    "ground".
    """
    outers = stochastic_trajectory_projectors(
        n_atoms, detuning, eta, noise_kind, rate, tau, config, initial
    )
    rho = np.add.reduce(outers, axis=0) / outers.shape[0]  # pairwise, order-stable
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.real(np.trace(rho))
    return CollectiveState(DickeBasis(n_atoms), rho, check=False)


def bootstrap_stderr(outers: np.ndarray, n_resamples: int = 200, seed: int = 0) -> np.ndarray:
    """Element-wise bootstrap standard error of the trajectory average."""
    n = outers.shape[0]
    rng = trajectory_stream(seed, 0)
    flat = outers.reshape(n, -1)
    means = np.empty((n_resamples, flat.shape[1]), dtype=complex)
    for b in range(n_resamples):
        weights = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(float)
        means[b] = (weights @ flat) / n
    stderr = np.sqrt(np.var(means.real, axis=0) + np.var(means.imag, axis=0))
    return stderr.reshape(outers.shape[1:])


class ScalarSdeResult(NamedTuple):
    empirical_mean: float
    predicted_mean: float
    standard_error: float


def scalar_sde_check(
    a0: float, b0: float, t_final: float, n_trajectories: int, seed: int
) -> ScalarSdeResult:
    """Heun (Stratonovich) integration of dx = a0 x dt + b0 x o dW from x = 1.

    Returns the sample mean, the closed-form average exp((a0 + b0^2/2) t)
    obtained after the Ito drift correction, and the standard error.
    """
    if t_final <= 0:
        raise ValueError("t_final must be > 0")
    if n_trajectories < 1:
        raise ValueError("need at least one trajectory")
    n_steps = 1000
    if b0 != 0.0:
        n_steps = max(n_steps, int(np.ceil(b0**2 * t_final / _MAX_RATE_DT)))
    dt = t_final / n_steps
    x = np.ones(n_trajectories)
    for step in range(n_steps):
        dw = np.sqrt(dt) * trajectory_stream(seed, step).standard_normal(n_trajectories)
        x_pred = x + a0 * x * dt + b0 * x * dw
        x = x + 0.5 * a0 * (x + x_pred) * dt + 0.5 * b0 * (x + x_pred) * dw
    empirical = float(np.mean(x))
    stderr = float(np.std(x, ddof=1) / np.sqrt(n_trajectories)) if n_trajectories > 1 else 0.0
    predicted = float(np.exp((a0 + 0.5 * b0**2) * t_final))
    return ScalarSdeResult(empirical, predicted, stderr)


# ---------------------------------------------------------------------------
# Full 2^N product-space propagation
# ---------------------------------------------------------------------------

_PAULI = {
    # Single-atom matrices in (ground, excited) ordering.
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}


def _single_atom(axis: str, site: int, n_atoms: int) -> np.ndarray:
    op = np.array([[1.0]], dtype=complex)
    for j in range(n_atoms):
        op = np.kron(op, _PAULI[axis] / 2 if j == site else np.eye(2))
    return op


def product_space_operator(kind: str, n_atoms: int, sites=None) -> np.ndarray:
    """Collective operator as a sum of single-atom operators in the 2^N space."""
    sites = list(range(n_atoms)) if sites is None else list(sites)
    if kind in ("Sx", "Sy", "Sz"):
        axis = kind[-1].lower()
        return sum(_single_atom(axis, j, n_atoms) for j in sites)
    if kind == "Splus":
        return product_space_operator("Sx", n_atoms, sites) + 1j * product_space_operator("Sy", n_atoms, sites)
    if kind == "Sminus":
        return product_space_operator("Sx", n_atoms, sites) - 1j * product_space_operator("Sy", n_atoms, sites)
    raise ValueError(f"unknown operator kind {kind!r}")


def symmetric_isometry(n_atoms: int) -> np.ndarray:
    """Columns are the Dicke states |S, M=k-S> over the 2^N product basis."""
    iso = np.zeros((2**n_atoms, n_atoms + 1))
    for k in range(n_atoms + 1):
        indices = [
            sum(1 << (n_atoms - 1 - site) for site in excited)
            for excited in combinations(range(n_atoms), k)
        ]
        iso[indices, k] = 1.0 / np.sqrt(len(indices))
    return iso


def _split_isometry(n_atoms: int) -> np.ndarray:
    half = n_atoms // 2
    return np.kron(symmetric_isometry(half), symmetric_isometry(half))


class ProjectedEvolution(NamedTuple):
    state: CollectiveState
    leakage: float


def full_space_propagate(
    n_atoms: int,
    detuning: float,
    eta: float,
    noise: NoiseModel,
    tau: float,
    scheme: str = "standard",
    initial: str = "coherent",
    tol: float = 1e-10,
) -> ProjectedEvolution:
    """Lindblad evolution carried out in the full 2^N product space.

    The evolved matrix is projected onto the symmetric subspace (for split
    schemes, the product of the two halves' symmetric subspaces) and
    returned together with the population that leaked outside it.  Guarded
    to n_atoms <= 4 against accidental exponential blowup.
    """
    if n_atoms > _FULL_SPACE_MAX_ATOMS:
        raise ValueError(f"full-space propagation is limited to n_atoms <= {_FULL_SPACE_MAX_ATOMS}")
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    scheme = normalize_scheme(scheme)
    if scheme != "standard" and n_atoms % 2:
        raise ValueError("split schemes need an even atom number")

    sz = product_space_operator("Sz", n_atoms)
    sx = product_space_operator("Sx", n_atoms)
    half = n_atoms // 2
    if scheme == "twin-detuning":
        sz1 = product_space_operator("Sz", n_atoms, range(half))
        sz2 = product_space_operator("Sz", n_atoms, range(half, n_atoms))
        h = detuning * (sz1 - sz2) + 2 * eta * sx
    else:
        h = detuning * sz + 2 * eta * sx
    jumps = []
    if noise.gamma_d > 0:
        if scheme == "phase-conjugate":
            sz1 = product_space_operator("Sz", n_atoms, range(half))
            sz2 = product_space_operator("Sz", n_atoms, range(half, n_atoms))
            jumps.append((noise.gamma_d / 2, sz1 - sz2))
        else:
            jumps.append((noise.gamma_d / 2, sz))
    if noise.gamma_a > 0:
        jumps.append((2 * noise.gamma_a, sx))

    if initial == "ground":
        psi = np.zeros(2**n_atoms, dtype=complex)
        psi[0] = 1.0
    elif initial == "coherent":
        single = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
        psi = np.array([1.0], dtype=complex)
        for _ in range(n_atoms):
            psi = np.kron(psi, single)
    else:
        raise ValueError(f"unknown initial state {initial!r}")

    rho_full = integrate_lindblad(np.outer(psi, psi.conj()), h, jumps, tau, tol)
    iso = symmetric_isometry(n_atoms) if scheme == "standard" else _split_isometry(n_atoms)
    rho_proj = iso.T @ rho_full @ iso
    leakage = float(abs(1.0 - np.real(np.trace(rho_proj))))
    rho_proj = 0.5 * (rho_proj + rho_proj.conj().T)
    rho_proj /= np.real(np.trace(rho_proj))
    basis: Basis = DickeBasis(n_atoms) if scheme == "standard" else SplitBasis(n_atoms)
    return ProjectedEvolution(CollectiveState(basis, rho_proj, check=False), leakage)

"""Exact closed dynamics of first and second collective-spin moments.

For a Hamiltonian linear in the collective generators and Lindblad operators
that are themselves linear in the generators, the adjoint Liouvillian maps
the span of {1, S_a, (S_a S_b + S_b S_a)/2} into itself: commutators only
lower polynomial degree.  First and second moments therefore obey a closed
linear ODE whose coefficient matrix depends only on the su(2) structure
constants, not on the spin magnitude, so a single small matrix exponential
gives machine-precision expectation values for any atom number.

The coefficient matrices are extracted numerically from a faithful reducible
representation (spin 1 + spin 3/2 per ensemble), where the moment basis is
linearly independent.  This module backs the fast paths for amplitude-noise
Ramsey sweeps and Rabi resonance profiles; the density-matrix integrator in
`dynamics` remains the reference route and is cross-checked in the tests.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag, expm

from .dynamics import normalize_scheme

_AXES = ("x", "y", "z")


def _spin_matrices(s: float) -> dict[str, np.ndarray]:
    dim = int(round(2 * s)) + 1
    m = np.arange(dim) - s
    c = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(1, dim), np.arange(dim - 1)] = c
    sm = sp.conj().T
    return {"x": (sp + sm) / 2, "y": (sp - sm) / 2j, "z": np.diag(m).astype(complex)}


def _faithful_generators() -> dict[str, np.ndarray]:
    # Direct sum of two irreps with different Casimir values: degree-<=2
    # polynomials in the generators stay linearly independent.
    a = _spin_matrices(1.0)
    b = _spin_matrices(1.5)
    return {ax: block_diag(a[ax], b[ax]) for ax in _AXES}


class _MomentEngine:
    """Moment basis, coefficient extraction, and adjoint generators."""

    def __init__(self, n_ensembles: int):
        if n_ensembles not in (1, 2):
            raise ValueError("n_ensembles must be 1 or 2")
        single = _faithful_generators()
        if n_ensembles == 1:
            gens = {(ax,): single[ax] for ax in _AXES}
        else:
            eye = np.eye(single["x"].shape[0])
            gens = {}
            for ax in _AXES:
                gens[(ax + "1",)] = np.kron(single[ax], eye)
                gens[(ax + "2",)] = np.kron(eye, single[ax])
        gen_keys = list(gens)
        dim = next(iter(gens.values())).shape[0]

        self.labels: list[tuple[str, ...]] = [()]
        ops = [np.eye(dim, dtype=complex)]
        for key in gen_keys:
            self.labels.append(key)
            ops.append(gens[key])
        for i, ki in enumerate(gen_keys):
            for kj in gen_keys[i:]:
                a, b = gens[ki], gens[kj]
                self.labels.append((ki[0], kj[0]))
                ops.append((a @ b + b @ a) / 2)

        self.gens = gens
        self.ops = ops
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self._phi = np.column_stack([op.ravel() for op in ops])
        if np.linalg.matrix_rank(self._phi) != len(ops):
            raise RuntimeError("moment basis is not linearly independent in the chosen representation")
        self._pinv = np.linalg.pinv(self._phi)

    def expand(self, mat: np.ndarray) -> np.ndarray:
        """Coefficients of a Hermitian operator over the moment basis."""
        coeffs = self._pinv @ mat.ravel()
        resid = np.max(np.abs(self._phi @ coeffs - mat.ravel()))
        if resid > 1e-9 * max(1.0, np.max(np.abs(mat))):
            raise RuntimeError(f"operator leaves the closed moment algebra (residual {resid:.2e})")
        if np.max(np.abs(coeffs.imag)) > 1e-10:
            raise RuntimeError("unexpected complex moment coefficients")
        return coeffs.real

    def operator(self, terms: dict[tuple[str, ...], float]) -> np.ndarray:
        out = np.zeros_like(self.ops[0])
        for lab, coeff in terms.items():
            out = out + coeff * self.ops[self.index[lab]]
        return out

    def adjoint_generator(self, hamiltonian=None, dissipator=None) -> np.ndarray:
        """Matrix G with d<A_i>/dt = sum_j G_ij <A_j>.

        ``hamiltonian`` contributes i[H, A]; ``dissipator`` L contributes
        2 L A L - A L^2 - L^2 A at unit rate (L Hermitian).
        """
        rows = []
        l2 = None if dissipator is None else dissipator @ dissipator
        for op in self.ops:
            t = np.zeros_like(op)
            if hamiltonian is not None:
                t = t + 1j * (hamiltonian @ op - op @ hamiltonian)
            if dissipator is not None:
                t = t + 2.0 * (dissipator @ op @ dissipator) - op @ l2 - l2 @ op
            rows.append(self.expand(t))
        return np.array(rows)


@lru_cache(maxsize=None)
def _engine(n_ensembles: int) -> _MomentEngine:
    return _MomentEngine(n_ensembles)


@lru_cache(maxsize=None)
def _structure(n_ensembles: int) -> dict[str, np.ndarray]:
    """Named generator blocks; the full generator is a linear combination."""
    eng = _engine(n_ensembles)
    if n_ensembles == 1:
        blocks = {
            "detuning": eng.adjoint_generator(hamiltonian=eng.operator({("z",): 1.0})),
            "drive": eng.adjoint_generator(hamiltonian=eng.operator({("x",): 1.0})),
            "dephasing": eng.adjoint_generator(dissipator=eng.operator({("z",): 1.0})),
            "amplitude": eng.adjoint_generator(dissipator=eng.operator({("x",): 1.0})),
        }
    else:
        z_sum = eng.operator({("z1",): 1.0, ("z2",): 1.0})
        z_diff = eng.operator({("z1",): 1.0, ("z2",): -1.0})
        x_sum = eng.operator({("x1",): 1.0, ("x2",): 1.0})
        blocks = {
            "detuning_sum": eng.adjoint_generator(hamiltonian=z_sum),
            "detuning_diff": eng.adjoint_generator(hamiltonian=z_diff),
            "drive": eng.adjoint_generator(hamiltonian=x_sum),
            "dephasing_sum": eng.adjoint_generator(dissipator=z_sum),
            "dephasing_diff": eng.adjoint_generator(dissipator=z_diff),
            "amplitude": eng.adjoint_generator(dissipator=x_sum),
        }
    for mat in blocks.values():
        mat.flags.writeable = False
    return blocks


def _initial_moments(n_ensembles: int, n_atoms: int, orientation: str) -> np.ndarray:
    """Moment vector of the ground state ("minus_z") or the post-pulse
    coherent state along +x ("plus_x"); split halves are uncorrelated."""
    eng = _engine(n_ensembles)
    if n_ensembles == 1:
        s = n_atoms / 2
        suffixes = ("",)
    else:
        if n_atoms % 2:
            raise ValueError("split moments need even n_atoms")
        s = n_atoms / 4
        suffixes = ("1", "2")
    if orientation == "minus_z":
        mean = {"x": 0.0, "y": 0.0, "z": -s}
        second = {"x": s / 2, "y": s / 2, "z": s * s}
    elif orientation == "plus_x":
        mean = {"x": s, "y": 0.0, "z": 0.0}
        second = {"x": s * s, "y": s / 2, "z": s / 2}
    else:
        raise ValueError(f"unknown orientation {orientation!r}")

    def moment(label: tuple[str, ...]) -> float:
        if label == ():
            return 1.0
        if len(label) == 1:
            return mean[label[0][0]]
        a, b = label
        if len(suffixes) == 2 and a[1] != b[1]:
            return mean[a[0]] * mean[b[0]]  # independent sub-ensembles
        if a[0] == b[0]:
            return second[a[0]]
        return 0.0  # symmetrized cross moments vanish for these states

    return np.array([moment(lab) for lab in eng.labels])


def _propagate(generator: np.ndarray, m0: np.ndarray, tau: float) -> np.ndarray:
    return expm(tau * generator) @ m0


def _readout(n_ensembles: int) -> tuple[np.ndarray, np.ndarray]:
    """Row vectors extracting <S_z> and <S_z^2> for the total ensemble."""
    eng = _engine(n_ensembles)
    nb = len(eng.labels)
    w1 = np.zeros(nb)
    w2 = np.zeros(nb)
    if n_ensembles == 1:
        w1[eng.index[("z",)]] = 1.0
        w2[eng.index[("z", "z")]] = 1.0
    else:
        w1[eng.index[("z1",)]] = 1.0
        w1[eng.index[("z2",)]] = 1.0
        w2[eng.index[("z1", "z1")]] = 1.0
        w2[eng.index[("z2", "z2")]] = 1.0
        w2[eng.index[("z1", "z2")]] = 2.0
    return w1, w2


def _readout_x(n_ensembles: int) -> tuple[np.ndarray, np.ndarray]:
    """Row vectors extracting <S_x> and <S_x^2> for the total ensemble."""
    eng = _engine(n_ensembles)
    nb = len(eng.labels)
    w1 = np.zeros(nb)
    w2 = np.zeros(nb)
    if n_ensembles == 1:
        w1[eng.index[("x",)]] = 1.0
        w2[eng.index[("x", "x")]] = 1.0
    else:
        w1[eng.index[("x1",)]] = 1.0
        w1[eng.index[("x2",)]] = 1.0
        w2[eng.index[("x1", "x1")]] = 1.0
        w2[eng.index[("x2", "x2")]] = 1.0
        w2[eng.index[("x1", "x2")]] = 2.0
    return w1, w2


def _batched_propagators(
    base: np.ndarray, det_block: np.ndarray, detunings: np.ndarray, tau: float
) -> np.ndarray:
    gens = tau * (base[None, :, :] + detunings[:, None, None] * det_block[None, :, :])
    return expm(gens)


def ramsey_moment_propagators(detunings, gamma_d: float, gamma_a: float, tau: float) -> np.ndarray:
    """Per-detuning moment propagators for standard-scheme free evolution.

    These do not depend on the atom number, so one batch serves a whole
    atom-number scaling study.
    """
    det = np.atleast_1d(np.asarray(detunings, dtype=float))
    blocks = _structure(1)
    base = (gamma_d / 2.0) * blocks["dephasing"] + (2.0 * gamma_a) * blocks["amplitude"]
    return _batched_propagators(base, blocks["detuning"], det, tau)


def ramsey_expectations_from_propagators(
    propagators: np.ndarray, n_atoms: int
) -> tuple[np.ndarray, np.ndarray]:
    m_final = propagators @ _initial_moments(1, n_atoms, "plus_x")
    w1, w2 = _readout_x(1)
    return m_final @ w1, m_final @ w2


def ramsey_moment_expectations(
    n_atoms: int,
    detunings,
    gamma_d: float,
    gamma_a: float,
    tau: float,
):
    """Signal <S_z> and second moment <S_z^2> after the closing pi/2 pulse of a
    standard-scheme Ramsey sequence, from the closed moment dynamics.

    The closing rotation maps S_z to S_x, so the post-pulse observables are
    the pre-pulse S_x moments.  Vectorized over ``detunings``.
    """
    props = ramsey_moment_propagators(detunings, gamma_d, gamma_a, tau)
    signal, second = ramsey_expectations_from_propagators(props, n_atoms)
    if np.ndim(detunings) == 0:
        return float(signal[0]), float(second[0])
    return signal, second


def rabi_moment_propagators(
    detunings, eta: float, gamma_d: float, tau: float, scheme: str = "standard"
) -> np.ndarray:
    """Per-detuning moment propagators for driven evolution (atom-number free)."""
    scheme = normalize_scheme(scheme)
    det = np.atleast_1d(np.asarray(detunings, dtype=float))
    if scheme == "standard":
        blocks = _structure(1)
        base = 2.0 * eta * blocks["drive"] + (gamma_d / 2.0) * blocks["dephasing"]
        det_block = blocks["detuning"]
    elif scheme == "twin-detuning":
        blocks = _structure(2)
        base = 2.0 * eta * blocks["drive"] + (gamma_d / 2.0) * blocks["dephasing_sum"]
        det_block = blocks["detuning_diff"]
    else:
        raise ValueError("Rabi interrogation supports the standard and twin-detuning schemes")
    return _batched_propagators(base, det_block, det, tau)


def rabi_expectations_from_propagators(
    propagators: np.ndarray, n_atoms: int, scheme: str = "standard"
) -> tuple[np.ndarray, np.ndarray]:
    scheme = normalize_scheme(scheme)
    n_ensembles = 1 if scheme == "standard" else 2
    m_final = propagators @ _initial_moments(n_ensembles, n_atoms, "minus_z")
    w1, w2 = _readout(n_ensembles)
    return m_final @ w1, m_final @ w2


def rabi_moment_expectations(
    n_atoms: int,
    detunings,
    eta: float,
    gamma_d: float,
    tau: float,
    scheme: str = "standard",
):
    """<S_z> and <S_z^2> after driving the ground state for a time ``tau``.

    Standard scheme: H = Omega*S_z + 2*eta*S_x with collective dephasing.
    Twin scheme: H = Omega*(S_z1 - S_z2) + 2*eta*S_x, noise stays collective.
    """
    props = rabi_moment_propagators(detunings, eta, gamma_d, tau, scheme)
    signal, second = rabi_expectations_from_propagators(props, n_atoms, scheme)
    if np.ndim(detunings) == 0:
        return float(signal[0]), float(second[0])
    return signal, second

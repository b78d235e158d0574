"""Dicke bases, collective spin operators, and ensemble density matrices.

An ensemble of N identical two-level atoms driven collectively stays inside
the permutation-symmetric subspace, which is spanned by the Dicke states
|S, M> with S = N/2 and M = -S, ..., S.  All operators here are dense complex
matrices over that (N+1)-dimensional space, indexed by k = M + S so that
index 0 is the ground state.

For interrogation schemes that address two halves of the ensemble
differently, each half of N/2 atoms keeps its own symmetric subspace and the
state lives on the product of the two Dicke bases (`SplitBasis`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import gammaln

OPERATOR_KINDS = ("Sz", "Sx", "Sy", "Splus", "Sminus")

# Tolerances for density-matrix invariants.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

# Above this dimension a Cholesky probe replaces the full spectrum for the
# positivity check; same tolerance, much cheaper for large ensembles.
_EIG_CHECK_MAX_DIM = 400


@dataclass(frozen=True)
class DickeBasis:
    """Symmetric subspace of ``n_atoms`` two-level atoms.

    The basis states are |S, M> with total spin S = n_atoms/2 and projection
    M running from -S to S; array index k = M + S.
    """

    n_atoms: int

    def __post_init__(self):
        n = self.n_atoms
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {n!r}")
        object.__setattr__(self, "n_atoms", int(n))

    @property
    def total_spin(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def projections(self) -> np.ndarray:
        """Projection quantum numbers M ordered by index k = M + S."""
        return np.arange(self.dim) - self.total_spin


@dataclass(frozen=True)
class SplitBasis:
    """Product of the Dicke bases of two sub-ensembles of ``n_atoms/2`` atoms.

    Each sub-ensemble has spin s = n_atoms/4.  Flat index K = k1*sub_dim + k2
    with k_i = m_i + s, matching ``numpy.kron(A_1, A_2)`` ordering.
    """

    n_atoms: int

    def __post_init__(self):
        n = self.n_atoms
        if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
            raise ValueError(f"split ensembles need an even n_atoms >= 2, got {n!r}")
        object.__setattr__(self, "n_atoms", int(n))

    @property
    def sub_spin(self) -> float:
        return self.n_atoms / 4

    @property
    def sub_dim(self) -> int:
        return self.n_atoms // 2 + 1

    @property
    def dim(self) -> int:
        return self.sub_dim**2

    def sub_basis(self) -> DickeBasis:
        return DickeBasis(self.n_atoms // 2)

    def projection_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-flat-index projections (m1, m2) of the two sub-ensembles."""
        m = self.sub_basis().projections()
        m1 = np.repeat(m, self.sub_dim)
        m2 = np.tile(m, self.sub_dim)
        return m1, m2


Basis = Union[DickeBasis, SplitBasis]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def _dicke_operator(kind: str, n_atoms: int) -> np.ndarray:
    basis = DickeBasis(n_atoms)
    s = basis.total_spin
    m = basis.projections()
    if kind == "Sz":
        return _readonly(np.diag(m).astype(complex))
    # <S, M+1| S+ |S, M> = sqrt(S(S+1) - M(M+1))
    c = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1))
    splus = np.zeros((basis.dim, basis.dim), dtype=complex)
    splus[np.arange(1, basis.dim), np.arange(basis.dim - 1)] = c
    if kind == "Splus":
        return _readonly(splus)
    if kind == "Sminus":
        return _readonly(splus.conj().T.copy())
    if kind == "Sx":
        return _readonly((splus + splus.conj().T) / 2)
    if kind == "Sy":
        return _readonly((splus - splus.conj().T) / 2j)
    raise ValueError(f"unknown operator kind {kind!r}; expected one of {OPERATOR_KINDS}")


def build_operator(kind: str, basis: DickeBasis) -> np.ndarray:
    """Collective spin operator in the Dicke basis (read-only array)."""
    if not isinstance(basis, DickeBasis):
        raise TypeError("build_operator expects a DickeBasis; use embed/collective_operator for split bases")
    return _dicke_operator(kind, basis.n_atoms)


def embed(op: np.ndarray, which: int, basis: SplitBasis) -> np.ndarray:
    """Lift a sub-ensemble operator to the product space, identity elsewhere."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    op = np.asarray(op)
    d = basis.sub_dim
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match sub-ensemble dimension {d}")
    eye = np.eye(d)
    return np.kron(op, eye) if which == 1 else np.kron(eye, op)


@lru_cache(maxsize=None)
def _split_collective(kind: str, n_atoms: int) -> np.ndarray:
    basis = SplitBasis(n_atoms)
    sub = _dicke_operator(kind, n_atoms // 2)
    return _readonly(embed(sub, 1, basis) + embed(sub, 2, basis))


def collective_operator(kind: str, basis: Basis) -> np.ndarray:
    """Total-ensemble operator: plain Dicke operator, or the sum over both halves."""
    if isinstance(basis, DickeBasis):
        return _dicke_operator(kind, basis.n_atoms)
    return _split_collective(kind, basis.n_atoms)


@lru_cache(maxsize=None)
def _rotation_y_single(n_atoms: int, angle: float) -> np.ndarray:
    sy = _dicke_operator("Sy", n_atoms)
    # Exact eigendecomposition keeps the rotation unitary at machine precision.
    w, v = np.linalg.eigh(sy)
    r = (v * np.exp(1j * angle * w)) @ v.conj().T
    return _readonly(r)


def rotation_y(basis: Basis, angle: float) -> np.ndarray:
    """Collective rotation exp(i * angle * S_y).

    On a split basis the same rotation is applied to both sub-ensembles.
    """
    angle = float(angle)
    if isinstance(basis, DickeBasis):
        return _rotation_y_single(basis.n_atoms, angle)
    r = _rotation_y_single(basis.n_atoms // 2, angle)
    return np.kron(r, r)


def _log_binomial(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@lru_cache(maxsize=None)
def _coherent_amplitudes(n_atoms: int) -> np.ndarray:
    # sqrt(binom(N, k) / 2^N), evaluated in log space so N ~ 10^3 stays finite.
    k = np.arange(n_atoms + 1)
    return _readonly(np.exp(0.5 * _log_binomial(n_atoms, k) - 0.5 * n_atoms * np.log(2.0)))


@dataclass(frozen=True)
class CollectiveState:
    """Density matrix over a Dicke or split-product basis.

    Instances are immutable; the stored matrix is a defensive, read-only
    copy.  Construction validates Hermiticity, unit trace, and positivity
    unless ``check=False`` (reserved for internal paths whose algebra
    preserves the invariants exactly).
    """

    basis: Basis
    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex, copy=True, order="C")
        d = self.basis.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match basis dimension {d}")
        if self.check:
            _validate_density_matrix(mat)
        object.__setattr__(self, "matrix", _readonly(mat))

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_split(self) -> bool:
        return isinstance(self.basis, SplitBasis)

    def expectation(self, op: np.ndarray) -> float:
        """Real expectation value tr(op rho) of a Hermitian observable."""
        return float(np.real(np.einsum("ij,ji->", op, self.matrix)))

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))


def _validate_density_matrix(mat: np.ndarray) -> None:
    herm = np.max(np.abs(mat - mat.conj().T))
    if herm > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(mat)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"matrix trace {tr} is not 1 within {TRACE_TOL}")
    d = mat.shape[0]
    if d <= _EIG_CHECK_MAX_DIM:
        lo = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if lo < -POSITIVITY_TOL:
            raise ValueError(f"matrix has negative eigenvalue {lo:.3e}")
    else:
        try:
            np.linalg.cholesky((mat + mat.conj().T) / 2 + POSITIVITY_TOL * np.eye(d))
        except np.linalg.LinAlgError:
            raise ValueError(f"matrix is not positive within {POSITIVITY_TOL}") from None


def ground_state(basis: Basis) -> CollectiveState:
    """All atoms in the ground state: |S, -S> (both halves for a split basis)."""
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    mat[0, 0] = 1.0
    return CollectiveState(basis, mat, check=False)


def coherent_state_after_first_pulse(basis: Basis) -> CollectiveState:
    """Coherent spin state produced by a perfect pi/2 pulse on the ground state.

    Dicke amplitudes are sqrt(binom(N, M+S)/2^N); for a split basis each
    sub-ensemble carries its own binomial amplitudes, giving the
    four-binomial product matrix.
    """
    if isinstance(basis, DickeBasis):
        amp = _coherent_amplitudes(basis.n_atoms)
    else:
        sub = _coherent_amplitudes(basis.n_atoms // 2)
        amp = np.kron(sub, sub)
    return CollectiveState(basis, np.outer(amp, amp).astype(complex), check=False)

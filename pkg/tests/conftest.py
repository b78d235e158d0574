import numpy as np

from spinsense import CollectiveState


def random_density_matrix(basis, seed):
    """Random full-rank density matrix on the given basis."""
    rng = np.random.default_rng(seed)
    d = basis.dim
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    rho /= np.real(np.trace(rho))
    return CollectiveState(basis, rho)

"""Shared random generators and independent oracles for the test suite.

Oracles here deliberately use routes the library avoids (numpy SVD /
eigvals, power iteration, hand-coded 2x2 formulas) so that agreement is
a genuine cross-check rather than a tautology.
"""

from __future__ import annotations

import numpy as np

from usd_kit.duality import StateSet, state_set
from usd_kit.equivalence import ProjectiveBasis, projective_basis

FIG1_GAMMA = 0.5
# sqrt(2) * gamma / sqrt(1 + gamma^2) at gamma = 0.5
FIG1_AMPLITUDE = 0.6324555320336759


def fig1_k(gamma: float = FIG1_GAMMA) -> np.ndarray:
    return np.array([[1.0, gamma], [-1.0, gamma]], dtype=complex) / np.sqrt(2.0)


def fig1_states(gamma: float = FIG1_GAMMA) -> np.ndarray:
    norm = np.sqrt(1.0 + gamma * gamma)
    return np.column_stack(
        [np.array([gamma, 1.0]) / norm, np.array([-gamma, 1.0]) / norm]
    ).astype(complex)


def jordan_k(a: float) -> np.ndarray:
    return np.array([[a, 0.5], [0.0, a]], dtype=complex)


def fig2_hamiltonian(coupling: float = 1.0) -> np.ndarray:
    return coupling * (np.ones((3, 3), dtype=complex) - np.eye(3))


def fig2_propagator_closed_form(z: float, coupling: float = 1.0) -> np.ndarray:
    """Independent closed form: e^{iaz} I + (e^{-2iaz} - e^{iaz}) J / 3."""
    az = coupling * z
    return np.exp(1j * az) * np.eye(3) + (np.exp(-2j * az) - np.exp(1j * az)) / 3.0 * np.ones((3, 3))


def inverse_2x2(m: np.ndarray) -> np.ndarray:
    """Cofactor formula, independent of the library's inverse."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    det = a * d - b * c
    return np.array([[d, -b], [-c, a]], dtype=complex) / det


def power_iteration_spectral_norm(k: np.ndarray, iters: int = 50000) -> float:
    """Top singular value via power iteration on K^dag K, run to convergence."""
    gram = k.conj().T @ k
    n = gram.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    v[0] += 0.001j  # break symmetry away from exact eigenvector misses
    v /= np.linalg.norm(v)
    rayleigh = 0.0
    for _ in range(iters):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        updated = float((v.conj() @ (gram @ v)).real)
        if abs(updated - rayleigh) <= 1e-16 * max(1.0, updated):
            rayleigh = updated
            break
        rayleigh = updated
    return float(np.sqrt(max(rayleigh, 0.0)))


def random_complex(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(rng, n))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_basis(rng: np.random.Generator, n: int) -> ProjectiveBasis:
    return projective_basis(random_unitary(rng, n))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = random_complex(rng, n)
    return (g + g.conj().T) / 2.0


def random_passive(rng: np.random.Generator, n: int, slack: float | None = None) -> np.ndarray:
    """Random operator with spectral norm <= 1 (strictly below with slack)."""
    g = random_complex(rng, n)
    top = np.linalg.norm(g, 2)  # numpy SVD route, not the library's
    factor = rng.uniform(1.05, 2.0) if slack is None else slack
    return g / (top * factor)


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    g = random_complex(rng, n)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state_set(
    rng: np.random.Generator, dim: int, count: int | None = None, max_cond: float = 20.0
) -> StateSet:
    count = dim if count is None else count
    while True:
        m = random_complex(rng, dim, count)
        m /= np.linalg.norm(m, axis=0)
        if np.linalg.cond(m) <= max_cond:
            return state_set(m)

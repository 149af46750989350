"""Conversions between lossy evolution operators and USD POVMs.

A passive evolution operator K (spectral norm at most one) followed by a
projective measurement induces the POVM ``F_i = K^dag Pi_i K`` completed
by ``F_{N+1} = I - K^dag K``; conversely any POVM whose first N operators
are rank one is realized by an explicit K built from the measurement
projectors.  Passiveness of K and positivity of the completion operator
are two views of the same constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .duality import PovmSet, StateSet, is_rank_one, operator_rank, state_set
from .errors import (
    DegenerateBasisAlignment,
    DimensionMismatch,
    GammaTooSmall,
    NotPassive,
    NotUnitary,
    RankMismatch,
)
from .linalg import DEFAULT_TOL, ToleranceContext


@dataclass(frozen=True)
class LossyEvolution:
    """Evolution operator with cached singular values and passiveness flag.

    ``passive`` means the largest singular value does not exceed one
    (within ``eq_tol``): the operator never amplifies any input state.
    """

    k: np.ndarray
    sv: np.ndarray
    passive: bool

    @property
    def dim(self) -> int:
        return self.k.shape[0]


@dataclass(frozen=True)
class ProjectiveBasis:
    """Orthonormal measurement basis; column i defines the projector onto it."""

    psi: np.ndarray

    @property
    def dim(self) -> int:
        return self.psi.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.psi[:, i]

    def projector(self, i: int) -> np.ndarray:
        v = self.psi[:, i]
        return np.outer(v, v.conj())


def projective_basis(psi, ctx: ToleranceContext = DEFAULT_TOL) -> ProjectiveBasis:
    """Validate unitarity of the basis matrix and freeze it."""
    m = linalg.require_square(psi, "basis")
    residual = linalg.frobenius(m.conj().T @ m - np.eye(m.shape[0]))
    if residual > ctx.eq_tol * max(1.0, float(m.shape[0])):
        raise NotUnitary(f"basis matrix is not unitary (residual {residual:.3e})")
    return ProjectiveBasis(psi=linalg.frozen(m))


def computational_basis(n: int) -> ProjectiveBasis:
    return ProjectiveBasis(psi=linalg.frozen(np.eye(n, dtype=complex)))


def make_lossy(k, ctx: ToleranceContext = DEFAULT_TOL) -> LossyEvolution:
    """Wrap a square operator, caching singular values and passiveness."""
    km = linalg.require_square(k, "evolution operator")
    sv = linalg.singular_values(km, ctx)
    passive = bool(sv[0] <= 1.0 + ctx.eq_tol)
    return LossyEvolution(k=linalg.frozen(km), sv=linalg.frozen(sv), passive=passive)


def normalize_passive(
    le: LossyEvolution,
    gamma: float | None = None,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> LossyEvolution:
    """Rescale ``k`` by ``1/gamma`` so the result is passive.

    With ``gamma`` omitted the largest singular value is used, which puts
    the rescaled operator exactly on the passiveness boundary.

    Raises
    ------
    GammaTooSmall
        If ``gamma`` is below the spectral norm (the result would still
        amplify) or the operator is zero.
    """
    top = float(le.sv[0])
    scale = top if gamma is None else float(gamma)
    if scale <= 0.0:
        raise GammaTooSmall(f"cannot rescale by nonpositive factor {scale!r}")
    if scale < top - ctx.eq_tol:
        raise GammaTooSmall(
            f"rescaling factor {scale!r} is below the spectral norm {top!r}",
            spectral_norm=top,
        )
    return make_lossy(np.asarray(le.k) / scale, ctx)


def povm_from_lossy(
    le: LossyEvolution,
    basis: ProjectiveBasis,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> PovmSet:
    """POVM induced by measuring projectively after the lossy evolution.

    ``F_i`` is the dyad of ``K^dag psi_i`` (exactly Hermitian and rank at
    most one by construction); the inconclusive operator is
    ``I - K^dag K``, positive precisely because K is passive.
    """
    if not le.passive:
        raise NotPassive(
            f"operator has spectral norm {float(le.sv[0])!r} > 1; "
            "the completion operator would be indefinite",
            spectral_norm=float(le.sv[0]),
        )
    if basis.dim != le.dim:
        raise DimensionMismatch(
            f"basis dimension {basis.dim} does not match operator dimension {le.dim}"
        )
    k = np.asarray(le.k)
    n = le.dim
    operators = []
    for i in range(n):
        v = k.conj().T @ basis.vector(i)
        operators.append(linalg.frozen(np.outer(v, v.conj())))
    gram = k.conj().T @ k
    f_last = np.eye(n, dtype=complex) - (gram + gram.conj().T) / 2.0
    operators.append(linalg.frozen((f_last + f_last.conj().T) / 2.0))
    return PovmSet(dim=n, operators=tuple(operators), scaling=None)


def lossy_from_povm(
    p: PovmSet,
    basis: ProjectiveBasis,
    phases=None,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> LossyEvolution:
    """Evolution operator realizing a rank-one POVM in the given basis.

    Implements ``K = sum_i Pi_i F_i e^{i phi_i} / sqrt(tr(F_i Pi_i))``.
    The resulting operator reproduces every ``F_i`` exactly and is
    passive (its Gram matrix is ``I - F_{N+1}``); the phases are free
    parameters that never affect measurement statistics.

    Raises
    ------
    RankMismatch
        If some detection operator is not rank one.
    DegenerateBasisAlignment
        If a basis projector is orthogonal to its detection operator.
    """
    n = p.dim
    if basis.dim != n:
        raise DimensionMismatch(
            f"basis dimension {basis.dim} does not match POVM dimension {n}"
        )
    if phases is None:
        phi = np.zeros(n)
    else:
        phi = np.asarray(phases, dtype=float)
        if phi.shape != (n,):
            raise DimensionMismatch(f"expected {n} phases, got shape {phi.shape}")
    k = np.zeros((n, n), dtype=complex)
    for i in range(n):
        f = np.asarray(p.operators[i])
        top = float(np.abs(linalg.hermitian_eigen(f, ctx).eigenvalues).max())
        if not is_rank_one(f, ctx) or top <= ctx.psd_tol:
            raise RankMismatch(
                f"detection operator {i + 1} is not rank one", operator=i + 1
            )
        weight = float((basis.vector(i).conj() @ f @ basis.vector(i)).real)
        if weight <= ctx.psd_tol:
            raise DegenerateBasisAlignment(
                f"basis vector {i + 1} is orthogonal to detection operator {i + 1}",
                operator=i + 1,
                weight=weight,
            )
        row = basis.vector(i).conj() @ f  # Pi_i F_i collapsed onto psi_i
        k += np.exp(1j * phi[i]) / np.sqrt(weight) * np.outer(basis.vector(i), row)
    return make_lossy(k, ctx)


def dyadic_form(
    le: LossyEvolution,
    basis: ProjectiveBasis,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> list[tuple[complex, np.ndarray, np.ndarray]]:
    """Decompose ``K = sum_i a_i |psi_i><beta_i|``.

    Each ``|beta_i>`` is the detection-operator direction: its squared
    norm is the trace of ``F_i = K^dag Pi_i K`` and its phase follows the
    first-nonzero-entry-real-positive convention; the unit-modulus ``a_i``
    absorbs the removed phase.  Requires K invertible so no dyad
    degenerates.
    """
    linalg.inverse(le.k, ctx)  # raises SingularMatrix when K is not invertible
    if basis.dim != le.dim:
        raise DimensionMismatch(
            f"basis dimension {basis.dim} does not match operator dimension {le.dim}"
        )
    rows = basis.psi.conj().T @ np.asarray(le.k)
    terms = []
    for i in range(le.dim):
        beta_raw = rows[i].conj()
        beta, phase = linalg.fix_column_phase(beta_raw, ctx)
        terms.append((np.conj(phase), basis.vector(i).copy(), beta))
    return terms


def discriminable_states(
    le: LossyEvolution,
    basis: ProjectiveBasis,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> StateSet:
    """States that K maps onto distinct measurement-basis directions.

    These are the columns of ``K^{-1} Psi`` normalized to unit length;
    feeding state i through K leaves no component on any other basis
    vector, which is what makes error-free discrimination possible.
    """
    k_inv = linalg.inverse(le.k, ctx)
    raw = k_inv @ np.asarray(basis.psi)
    norms = np.linalg.norm(raw, axis=0)
    return state_set(raw / norms, ctx)


def dilate_unitary(le: LossyEvolution, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Embed a passive K in the 2N x 2N unitary built from its defect operators.

    The top-left block is K itself (bit for bit); the defect blocks
    ``(I - K K^dag)^{1/2}`` and ``(I - K^dag K)^{1/2}`` route the lost
    amplitude into the ancilla coordinates.
    """
    if not le.passive:
        raise NotPassive(
            f"operator has spectral norm {float(le.sv[0])!r} > 1; "
            "only passive operators embed in a unitary",
            spectral_norm=float(le.sv[0]),
        )
    k = np.asarray(le.k)
    n = le.dim
    eye = np.eye(n, dtype=complex)
    defect_left = linalg.psd_sqrt(eye - k @ k.conj().T, ctx)
    defect_right = linalg.psd_sqrt(eye - k.conj().T @ k, ctx)
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = k
    u[:n, n:] = defect_left
    u[n:, :n] = defect_right
    u[n:, n:] = -k.conj().T
    return u


def reduced_evolution(
    u, subspace_dim: int, ctx: ToleranceContext = DEFAULT_TOL
) -> LossyEvolution:
    """Restrict a unitary to its leading coordinates.

    The top-left block of a unitary always has spectral norm at most one,
    so the result is passive by construction.
    """
    um = linalg.require_square(u, "unitary")
    n = um.shape[0]
    residual = linalg.frobenius(um.conj().T @ um - np.eye(n))
    if residual > ctx.eq_tol * max(1.0, float(n)):
        raise NotUnitary(f"matrix is not unitary (residual {residual:.3e})")
    if not 0 < subspace_dim <= n:
        raise DimensionMismatch(
            f"subspace dimension {subspace_dim} out of range for size {n}"
        )
    le = make_lossy(um[:subspace_dim, :subspace_dim], ctx)
    if not le.passive:  # cannot happen for a genuine unitary
        raise NotPassive("submatrix of a unitary failed the passiveness check")
    return le


def inconclusive_rank(p: PovmSet, ctx: ToleranceContext = DEFAULT_TOL) -> int:
    """Numeric rank of the inconclusive operator.

    Strictly below N whenever the generating operator sits exactly on the
    passiveness boundary (largest singular value one).
    """
    return operator_rank(p.inconclusive, ctx)

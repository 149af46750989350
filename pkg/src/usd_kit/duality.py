"""Bi-orthogonal dual sets and USD POVM construction over an N-level space.

Given N linearly independent unit states, the dual vectors are the
conjugated rows of the inverse of the state matrix; pairing each dual
with a positive weight yields the rank-one detection operators of an
unambiguous discrimination POVM, completed by an inconclusive operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InfeasibleScaling,
    InvalidDensityMatrix,
    InvalidStateSet,
    ParamOutOfRange,
    RankDeficient,
    SingularStates,
)
from .linalg import DEFAULT_TOL, ToleranceContext

# Bisection tolerance on the uniform POVM weight.
LAMBDA_BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class StateSet:
    """Unit-norm state vectors stored as the columns of ``states``.

    ``dim`` is the dimension of the carrier space; the number of columns
    may be smaller (see :func:`subspace_reduce`) but never larger.
    """

    dim: int
    states: np.ndarray

    @property
    def count(self) -> int:
        return self.states.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.states[:, i]


@dataclass(frozen=True)
class DualSet:
    """Dual (transverse) vectors as columns; unnormalized by construction.

    Column ``i`` pairs to one with state ``i`` and to zero with every
    other state.  The normalization freedom of dual vectors is absorbed
    into the POVM scaling weights.
    """

    dim: int
    duals: np.ndarray


@dataclass(frozen=True)
class PovmSet:
    """Ordered positive operators ``F_1 .. F_{N+1}`` summing to identity.

    The first N operators are the rank-one detection operators; the last
    one collects the inconclusive outcome.  ``scaling`` holds the weights
    applied to the dual dyads when they are known (construction from an
    explicit state set); it is ``None`` for POVMs obtained from a lossy
    evolution operator.
    """

    dim: int
    operators: tuple[np.ndarray, ...]
    scaling: np.ndarray | None = None

    @property
    def inconclusive(self) -> np.ndarray:
        return self.operators[-1]


@dataclass(frozen=True)
class OperatorDiagnostics:
    hermiticity_residual: float
    min_eigenvalue: float
    rank: int


@dataclass(frozen=True)
class ValidationReport:
    """Per-operator diagnostics plus the completeness residual and verdict."""

    operators: tuple[OperatorDiagnostics, ...]
    completeness_residual: float
    valid: bool


ScalingStrategy = Union[str, Sequence[float]]


def state_set(states, ctx: ToleranceContext = DEFAULT_TOL) -> StateSet:
    """Validate and freeze a matrix of state columns.

    Raises
    ------
    InvalidStateSet
        If any column norm deviates from 1 by more than ``eq_tol``.
    SingularStates
        If the columns are linearly dependent within ``cond_max``.
    """
    m = linalg.as_matrix(states, "states")
    dim, count = m.shape
    if count == 0 or count > dim:
        raise InvalidStateSet(
            f"need between 1 and {dim} states in dimension {dim}, got {count}"
        )
    norms = np.linalg.norm(m, axis=0)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > ctx.eq_tol:
        raise InvalidStateSet(
            f"state norms deviate from 1 by {worst:.3e} (eq_tol {ctx.eq_tol:.1e})",
            worst_norm_deviation=worst,
        )
    if linalg.condition_number(m, ctx) > ctx.cond_max:
        raise SingularStates(
            "states are linearly dependent within tolerance",
            condition_number=linalg.condition_number(m, ctx),
        )
    return StateSet(dim=dim, states=linalg.frozen(m))


def dual_set(s: StateSet, ctx: ToleranceContext = DEFAULT_TOL) -> DualSet:
    """Dual vectors of a complete state set: conjugated rows of ``A^{-1}``.

    Requires as many states as dimensions; with fewer states the duals
    are not uniquely defined, so rotate into a subspace first with
    :func:`subspace_reduce`.
    """
    if s.count != s.dim:
        raise DimensionMismatch(
            f"duals need {s.dim} states in dimension {s.dim}, got {s.count}; "
            "apply subspace_reduce first"
        )
    a_inv = linalg.inverse(s.states, ctx)
    return DualSet(dim=s.dim, duals=linalg.frozen(a_inv.conj().T))


def _dyad(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def build_usd_povm(
    s: StateSet,
    strategy: ScalingStrategy = "uniform-max",
    ctx: ToleranceContext = DEFAULT_TOL,
) -> PovmSet:
    """Construct the USD POVM ``F_i = lambda_i |d_i><d_i|`` for a state set.

    ``strategy`` is either the string ``"uniform-max"`` (one shared weight,
    maximized by bisection so the inconclusive operator stays positive) or
    an explicit sequence of N positive weights.

    Raises
    ------
    InfeasibleScaling
        If explicit weights push the inconclusive operator indefinite.
    """
    duals = dual_set(s, ctx).duals
    n = s.dim

    def min_eig_of_completion(lam_vec: np.ndarray) -> float:
        f_last = np.eye(n, dtype=complex)
        for i in range(n):
            f_last -= lam_vec[i] * _dyad(duals[:, i])
        f_last = (f_last + f_last.conj().T) / 2.0
        return float(linalg.hermitian_eigen(f_last, ctx).eigenvalues[-1])

    if isinstance(strategy, str):
        if strategy != "uniform-max":
            raise ParamOutOfRange(f"unknown scaling strategy {strategy!r}")
        lam_hi = 1.0 / float(np.max(np.linalg.norm(duals, axis=0) ** 2))
        if min_eig_of_completion(np.full(n, lam_hi)) >= 0.0:
            lam = lam_hi
        else:
            lo, hi = 0.0, lam_hi
            while hi - lo > LAMBDA_BISECTION_TOL:
                mid = (lo + hi) / 2.0
                if min_eig_of_completion(np.full(n, mid)) >= 0.0:
                    lo = mid
                else:
                    hi = mid
            lam = lo
        lambdas = np.full(n, lam)
    else:
        lambdas = np.asarray(strategy, dtype=float)
        if lambdas.shape != (n,):
            raise DimensionMismatch(f"expected {n} scaling weights, got {lambdas.shape}")
        if np.any(lambdas <= 0.0):
            raise ParamOutOfRange("scaling weights must be strictly positive")
        if min_eig_of_completion(lambdas) < -ctx.psd_tol:
            raise InfeasibleScaling(
                "inconclusive operator is indefinite for the supplied weights",
                min_eigenvalue=min_eig_of_completion(lambdas),
            )

    operators = [linalg.frozen(lambdas[i] * _dyad(duals[:, i])) for i in range(n)]
    f_last = np.eye(n, dtype=complex) - sum(np.asarray(op) for op in operators)
    operators.append(linalg.frozen((f_last + f_last.conj().T) / 2.0))
    return PovmSet(dim=n, operators=tuple(operators), scaling=linalg.frozen(lambdas))


def operator_rank(f, ctx: ToleranceContext = DEFAULT_TOL) -> int:
    """Numeric rank of a Hermitian operator: eigenvalues above ``psd_tol``."""
    w = linalg.hermitian_eigen(f, ctx).eigenvalues
    return int(np.count_nonzero(w > ctx.psd_tol))


def is_rank_one(f, ctx: ToleranceContext = DEFAULT_TOL) -> bool:
    """True when the second singular value is at most ``psd_tol`` times the first.

    ``f`` must be Hermitian, so its singular values are the moduli of its
    eigenvalues; the direct eigenvalue route avoids squaring round-off
    through the Gram matrix.
    """
    sv = np.sort(np.abs(linalg.hermitian_eigen(f, ctx).eigenvalues))[::-1]
    if sv.size < 2:
        return True
    return bool(sv[1] <= ctx.psd_tol * sv[0])


def validate_povm(p: PovmSet, ctx: ToleranceContext = DEFAULT_TOL) -> ValidationReport:
    """Diagnostics for Hermiticity, positivity and completeness.

    Never raises; the boolean verdict is true when every operator is
    Hermitian within ``eq_tol``, has smallest eigenvalue at least
    ``-psd_tol``, and the operators sum to identity within ``eq_tol``.
    """
    diagnostics = []
    total = np.zeros((p.dim, p.dim), dtype=complex)
    valid = True
    for op in p.operators:
        f = np.asarray(op)
        herm_residual = linalg.frobenius(f - f.conj().T)
        sym = (f + f.conj().T) / 2.0
        w = np.linalg.eigvalsh(sym)
        min_eig = float(w[0])
        rank = int(np.count_nonzero(w > ctx.psd_tol))
        diagnostics.append(
            OperatorDiagnostics(
                hermiticity_residual=float(herm_residual),
                min_eigenvalue=min_eig,
                rank=rank,
            )
        )
        if herm_residual > ctx.eq_tol or min_eig < -ctx.psd_tol:
            valid = False
        total += f
    completeness = linalg.frobenius(total - np.eye(p.dim))
    if completeness > ctx.eq_tol:
        valid = False
    return ValidationReport(
        operators=tuple(diagnostics),
        completeness_residual=float(completeness),
        valid=valid,
    )


def check_density_matrix(rho, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD, unit trace."""
    m = linalg.require_square(rho, "density matrix")
    herm = linalg.frobenius(m - m.conj().T)
    if herm > ctx.eq_tol:
        raise InvalidDensityMatrix(f"density matrix is not Hermitian (residual {herm:.3e})")
    trace = float(np.trace(m).real)
    if abs(trace - 1.0) > ctx.eq_tol:
        raise InvalidDensityMatrix(f"density matrix trace is {trace!r}, expected 1")
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
    if min_eig < -ctx.psd_tol:
        raise InvalidDensityMatrix(
            f"density matrix has eigenvalue {min_eig:.3e} below -psd_tol"
        )
    return m


def outcome_probabilities(rho, p: PovmSet, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Outcome distribution ``p_i = tr(rho F_i)`` including the inconclusive slot.

    Tiny negative values from round-off (above ``-psd_tol``) are clamped
    to zero; completeness of the POVM makes the entries sum to one.
    """
    m = check_density_matrix(rho, ctx)
    if m.shape[0] != p.dim:
        raise DimensionMismatch(
            f"density matrix dimension {m.shape[0]} does not match POVM dimension {p.dim}"
        )
    probs = np.array([float(np.trace(m @ op).real) for op in p.operators])
    if np.any(probs < -ctx.psd_tol):
        raise InvalidDensityMatrix(
            "negative outcome probability beyond psd_tol; POVM or state invalid",
            min_probability=float(probs.min()),
        )
    return np.clip(probs, 0.0, None)


def subspace_reduce(
    s: StateSet, ctx: ToleranceContext = DEFAULT_TOL
) -> tuple[StateSet, np.ndarray]:
    """Rotate L <= dim states into the leading L coordinates.

    Returns the rotated state set together with the unitary rotation that
    was applied.  Overlaps are preserved exactly (the rotation is
    unitary) and components beyond coordinate L vanish within ``eq_tol``.

    Raises
    ------
    RankDeficient
        When the states are not linearly independent.
    """
    frame = linalg.gram_schmidt(s.states, ctx)
    rotation = linalg.complete_basis(frame, ctx).conj().T
    rotated = rotation @ s.states
    reduced = StateSet(dim=s.dim, states=linalg.frozen(rotated))
    return reduced, linalg.frozen(rotation)

"""End-to-end discrimination workflow: ensembles, reports, sampling.

Analytic outcome probabilities come from traces against the POVM
operators; Monte Carlo sampling draws outcomes by inverse CDF from a
counter-based generator so runs are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .duality import PovmSet, StateSet, check_density_matrix, validate_povm
from .errors import (
    DimensionMismatch,
    InvalidEnsemble,
    InvalidPovm,
    ZeroProbabilityBranch,
)
from .linalg import DEFAULT_TOL, ToleranceContext

# Priors are constructed, not measured; their budget is tighter than eq_tol.
PRIOR_TOL = 1e-12


@dataclass(frozen=True)
class StateEnsemble:
    """States with preparation probabilities ``priors`` (nonnegative, sum 1)."""

    states: StateSet
    priors: np.ndarray

    @property
    def dim(self) -> int:
        return self.states.dim

    @property
    def count(self) -> int:
        return self.states.count


@dataclass(frozen=True)
class DiscriminationReport:
    """Per-state and prior-weighted discrimination statistics.

    ``error_matrix[i, j]`` is the probability of detecting j when state i
    was prepared (zero on the diagonal); success, errors and the
    inconclusive probability sum to one for every prepared state.
    """

    per_state_success: np.ndarray
    error_matrix: np.ndarray
    inconclusive_per_state: np.ndarray
    total_success: float
    total_error: float
    total_inconclusive: float


@dataclass(frozen=True)
class RandomSource:
    """Seeded counter-based generator (numpy Philox 4x64).

    The same seed always reproduces the same stream; quality targets
    reproducibility, not cryptography.
    """

    seed: int
    algorithm: str = field(default="philox4x64")

    def generator(self, offset: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed + offset))


@dataclass(frozen=True)
class OutcomeStats:
    """Sampled outcome counts, one row of N+1 counts per prepared state."""

    counts: np.ndarray
    trials: int
    seed: int


def state_ensemble(states: StateSet, priors, ctx: ToleranceContext = DEFAULT_TOL) -> StateEnsemble:
    """Validate priors against the state set and freeze the ensemble."""
    p = np.asarray(priors, dtype=float)
    if p.ndim != 1 or p.shape[0] != states.count:
        raise InvalidEnsemble(
            f"expected {states.count} priors, got shape {p.shape}"
        )
    if np.any(p < 0.0):
        raise InvalidEnsemble("priors must be nonnegative")
    total = float(p.sum())
    if abs(total - 1.0) > PRIOR_TOL:
        raise InvalidEnsemble(f"priors sum to {total!r}, expected 1")
    return StateEnsemble(states=states, priors=linalg.frozen(p))


def density_matrix(e: StateEnsemble) -> np.ndarray:
    """Mixture density matrix ``sum_i P_i |alpha_i><alpha_i|``."""
    rho = np.zeros((e.dim, e.dim), dtype=complex)
    for i in range(e.count):
        v = e.states.column(i)
        rho += e.priors[i] * np.outer(v, v.conj())
    return (rho + rho.conj().T) / 2.0


def _per_state_probabilities(e: StateEnsemble, p: PovmSet, ctx: ToleranceContext) -> np.ndarray:
    if e.dim != p.dim:
        raise DimensionMismatch(
            f"ensemble dimension {e.dim} does not match POVM dimension {p.dim}"
        )
    n = e.count
    probs = np.zeros((n, len(p.operators)))
    for i in range(n):
        v = e.states.column(i)
        for j, op in enumerate(p.operators):
            probs[i, j] = float((v.conj() @ np.asarray(op) @ v).real)
    return np.clip(probs, 0.0, None)


def usd_report(e: StateEnsemble, p: PovmSet, ctx: ToleranceContext = DEFAULT_TOL) -> DiscriminationReport:
    """Analytic discrimination report for an ensemble measured with a POVM."""
    if e.count != p.dim:
        raise DimensionMismatch(
            f"report needs one detection operator per state: {e.count} states, "
            f"{p.dim} detection operators"
        )
    probs = _per_state_probabilities(e, p, ctx)
    n = e.count
    success = np.array([probs[i, i] for i in range(n)])
    errors = probs[:, :n].copy()
    np.fill_diagonal(errors, 0.0)
    inconclusive = probs[:, n]
    weights = np.asarray(e.priors)
    return DiscriminationReport(
        per_state_success=linalg.frozen(success),
        error_matrix=linalg.frozen(errors),
        inconclusive_per_state=linalg.frozen(inconclusive),
        total_success=float(weights @ success),
        total_error=float(weights @ errors.sum(axis=1)),
        total_inconclusive=float(weights @ inconclusive),
    )


def _split_trials(total: int, workers: int) -> list[int]:
    base, rem = divmod(total, workers)
    return [base + (1 if w < rem else 0) for w in range(workers)]


def sample_outcomes(
    e: StateEnsemble,
    p: PovmSet,
    trials_per_state: int,
    rng: RandomSource,
    workers: int = 1,
    ctx: ToleranceContext = DEFAULT_TOL,
) -> OutcomeStats:
    """Draw measurement outcomes by inverse CDF; deterministic per (seed, workers).

    Worker w runs its share of the trials on a generator keyed with
    ``seed + w``; merged counts are the sum, so the worker count is part
    of the reproducibility contract (it is never auto-detected).

    Raises
    ------
    InvalidPovm
        When the POVM fails validation (Hermiticity, positivity or
        completeness).
    """
    if trials_per_state < 0:
        raise InvalidEnsemble(f"trials_per_state must be nonnegative, got {trials_per_state}")
    if workers < 1:
        raise InvalidEnsemble(f"workers must be at least 1, got {workers}")
    report = validate_povm(p, ctx)
    if not report.valid:
        raise InvalidPovm(
            "POVM failed validation",
            completeness_residual=report.completeness_residual,
        )
    probs = _per_state_probabilities(e, p, ctx)
    n_outcomes = probs.shape[1]
    counts = np.zeros((e.count, n_outcomes), dtype=np.int64)
    shares = _split_trials(trials_per_state, workers)
    for w in range(workers):
        gen = rng.generator(offset=w)
        for i in range(e.count):
            row = probs[i] / probs[i].sum()
            cumulative = np.cumsum(row)
            cumulative[-1] = 1.0  # final interval absorbs round-off
            draws = gen.random(shares[w])
            outcome = np.searchsorted(cumulative, draws, side="right")
            outcome = np.minimum(outcome, n_outcomes - 1)
            counts[i] += np.bincount(outcome, minlength=n_outcomes)
    return OutcomeStats(counts=linalg.frozen(counts), trials=trials_per_state, seed=rng.seed)


def post_measurement_state(rho, f, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """State conditioned on an outcome: ``M rho M^dag`` renormalized, ``M = sqrt(F)``.

    Raises
    ------
    ZeroProbabilityBranch
        When the outcome has vanishing probability on ``rho``.
    """
    m = check_density_matrix(rho, ctx)
    root = linalg.psd_sqrt(f, ctx)
    if root.shape != m.shape:
        raise DimensionMismatch(
            f"operator shape {root.shape} does not match state shape {m.shape}"
        )
    updated = root @ m @ root.conj().T
    weight = float(np.trace(updated).real)
    if weight <= ctx.psd_tol:
        raise ZeroProbabilityBranch(
            f"outcome probability {weight:.3e} is too small to condition on",
            probability=weight,
        )
    updated /= weight
    return (updated + updated.conj().T) / 2.0

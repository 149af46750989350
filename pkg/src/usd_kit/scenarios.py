"""Named optical scenarios with closed-form expectations.

``fig1`` is a 50-50 beam splitter followed by an attenuator on one arm;
``fig2`` is three evanescently coupled waveguides where the third carries
away the inconclusive amplitude; ``fig1-embed`` replaces the attenuator
by a beam splitter, embedding the lossy two-port in a four-port unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .duality import StateSet
from .equivalence import (
    LossyEvolution,
    ProjectiveBasis,
    computational_basis,
    dilate_unitary,
    discriminable_states,
    make_lossy,
    reduced_evolution,
)
from .errors import ParamOutOfRange, SingularAtThisZ, SingularMatrix
from .linalg import DEFAULT_TOL, ToleranceContext


@dataclass(frozen=True)
class Scenario:
    name: str
    k: LossyEvolution
    basis: ProjectiveBasis
    input_states: StateSet
    expected: dict[str, float]
    full_unitary: np.ndarray | None = None


@dataclass(frozen=True)
class Fig2Params:
    """Propagation length ``z`` and waveguide coupling (default 1).

    The coupling only rescales the propagation coordinate, so it is fixed
    to one unless stated otherwise.
    """

    z: float
    coupling: float = 1.0

    def __post_init__(self):
        if not (self.coupling > 0.0 and math.isfinite(self.coupling)):
            raise ParamOutOfRange(f"coupling must be positive and finite, got {self.coupling!r}")
        if not math.isfinite(self.z):
            raise ParamOutOfRange(f"z must be finite, got {self.z!r}")


def beam_splitter_attenuator(gamma: float) -> np.ndarray:
    """Two-port evolution of a 50-50 splitter with attenuation ``gamma`` on arm 2."""
    return np.array([[1.0, gamma], [-1.0, gamma]], dtype=complex) / np.sqrt(2.0)


def tight_binding_hamiltonian(coupling: float = 1.0) -> np.ndarray:
    """Equal nearest-coupling Hamiltonian of three symmetric waveguides."""
    h = np.ones((3, 3), dtype=complex) - np.eye(3, dtype=complex)
    return coupling * h


def _check_gamma(gamma: float) -> float:
    g = float(gamma)
    if not (0.0 < g < 1.0):
        raise ParamOutOfRange(f"gamma must lie strictly between 0 and 1, got {g!r}")
    return g


def fig1_scenario(gamma: float, ctx: ToleranceContext = DEFAULT_TOL) -> Scenario:
    """Beam splitter plus attenuator discriminating two symmetric states."""
    g = _check_gamma(gamma)
    k = make_lossy(beam_splitter_attenuator(g), ctx)
    basis = computational_basis(2)
    states = discriminable_states(k, basis, ctx)
    norm_sq = 1.0 + g * g
    expected = {
        "output_amplitude": math.sqrt(2.0) * g / math.sqrt(norm_sq),
        "success_per_state": 2.0 * g * g / norm_sq,
        "inconclusive": (1.0 - g * g) / norm_sq,
        "overlap": (1.0 - g * g) / norm_sq,
    }
    return Scenario(name="fig1", k=k, basis=basis, input_states=states, expected=expected)


def _fig2_closed_form(params: Fig2Params) -> tuple[complex, complex]:
    """Diagonal and off-diagonal entries of the reduced two-port operator."""
    az = params.coupling * params.z
    off = (np.exp(-2j * az) - np.exp(1j * az)) / 3.0
    return np.exp(1j * az) + off, off


def fig2_scenario(params: Fig2Params, ctx: ToleranceContext = DEFAULT_TOL) -> Scenario:
    """Three coupled waveguides; ports 1 and 2 form the lossy subsystem.

    Expected values come from the closed form of the propagator: the
    reduced operator is ``e^{iaz} I + c J`` with
    ``c = (e^{-2iaz} - e^{iaz})/3`` and J the all-ones matrix.
    """
    h = tight_binding_hamiltonian(params.coupling)
    full_u = linalg.unitary_exp(h, params.z, ctx)
    try:
        k = reduced_evolution(full_u, 2, ctx)
        states = discriminable_states(k, computational_basis(2), ctx)
    except SingularMatrix as exc:
        raise SingularAtThisZ(
            f"reduced operator is not invertible at z={params.z!r}", z=params.z
        ) from exc

    diag, off = _fig2_closed_form(params)
    alpha = diag - off  # bare propagation phase e^{iaz}
    det = alpha * (alpha + 2.0 * off)
    col_norm_sq = (abs(diag) ** 2 + abs(off) ** 2) / abs(det) ** 2
    beta = 1.0 / math.sqrt(col_norm_sq)
    overlap = abs(2.0 * (np.conj(diag) * -off).real) / (abs(diag) ** 2 + abs(off) ** 2)
    expected = {
        "beta_magnitude": beta,
        "success_per_state": beta * beta,
        "inconclusive": 1.0 - beta * beta,
        "overlap": overlap,
        "spectral_norm": 1.0,
    }
    return Scenario(
        name="fig2",
        k=k,
        basis=computational_basis(2),
        input_states=states,
        expected=expected,
        full_unitary=linalg.frozen(full_u),
    )


def fig1_as_embedding(gamma: float, ctx: ToleranceContext = DEFAULT_TOL) -> Scenario:
    """The fig1 system with the attenuator replaced by a beam splitter.

    The two-port operator is embedded in a four-port unitary; the
    probability routed to the ancilla ports equals the inconclusive
    probability of the lossy scheme.
    """
    g = _check_gamma(gamma)
    base = fig1_scenario(g, ctx)
    full_u = dilate_unitary(base.k, ctx)
    expected = dict(base.expected)
    expected["ancilla_mass"] = expected["inconclusive"]
    return Scenario(
        name="fig1-embed",
        k=base.k,
        basis=base.basis,
        input_states=base.input_states,
        expected=expected,
        full_unitary=linalg.frozen(full_u),
    )


def build_scenario(name: str, param: float, ctx: ToleranceContext = DEFAULT_TOL) -> Scenario:
    """Dispatch on the stable scenario names used by the command line."""
    if name == "fig1":
        return fig1_scenario(param, ctx)
    if name == "fig2":
        return fig2_scenario(Fig2Params(z=float(param)), ctx)
    if name == "fig1-embed":
        return fig1_as_embedding(param, ctx)
    raise ParamOutOfRange(f"unknown scenario {name!r}; expected fig1, fig2 or fig1-embed")

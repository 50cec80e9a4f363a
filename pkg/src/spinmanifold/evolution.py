"""Initial-state preparation, Ising / field propagation and tangent states.

The zero-field propagator is applied as per-basis-label phases (the
generator is diagonal), never as a dense matrix exponential.  The field
propagator goes through one cached eigendecomposition of the Hermitian
generator per (system, field) pair.  Global phases are never stripped:
all comparisons downstream are gauge invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional, Tuple

import numpy as np

from .spin_ops import (
    BASIS_CONVENTION,
    FieldConfig,
    SpinSystem,
    _site_matrices,
    _total_matrix,
    ising_pair_sums,
    total_z_values,
)


@dataclass(eq=False)
class StateVector:
    """Normalized complex amplitude vector over the product basis."""

    amplitudes: np.ndarray
    basis: str = BASIS_CONVENTION

    def __post_init__(self):
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")


@dataclass(frozen=True)
class CoordinatePoint:
    """A point (theta, phi, chi) of the three-parameter state family.

    chi = J*t is dimensionless and unrestricted; periodicity is the
    caller's business.
    """

    theta: float
    phi: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")


@dataclass(eq=False)
class TangentStates:
    """Parameter derivatives of the evolved state (unnormalized vectors)."""

    d_theta: np.ndarray
    d_phi: np.ndarray
    d_chi: np.ndarray


@lru_cache(maxsize=64)
def _site_y_eig(two_s: int):
    """Eigendecomposition of the single-site Sy, for cheap rotations."""
    evals, evecs = np.linalg.eigh(_site_matrices(two_s)["y"])
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def _rotated_site_vector(two_s: int, theta: float, phi: float) -> np.ndarray:
    """Single-site e^{-i phi Sz} e^{-i theta Sy} |s>."""
    evals, evecs = _site_y_eig(two_s)
    v = evecs @ (np.exp(-1j * theta * evals) * evecs[0].conj())
    m = (two_s / 2.0) - np.arange(two_s + 1)
    return np.exp(-1j * phi * m) * v


def _initial_amplitudes(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    site = _rotated_site_vector(sys.two_s, theta, phi)
    return reduce(np.kron, [site] * sys.n_sites)


def initial_state(sys: SpinSystem, theta: float, phi: float = 0.0) -> StateVector:
    """Polarized product state: every spin at maximal projection along n.

    Constructed as e^{-i phi Sum Sz} e^{-i theta Sum Sy} |s, ..., s>, which
    factorizes into identical single-site rotations.
    """
    sys.check_dim_guard()
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must be in [0, pi], got {theta}")
    return StateVector(_initial_amplitudes(sys, theta, phi))


def evolve_ising(sys: SpinSystem, state: StateVector, chi: float) -> StateVector:
    """Apply e^{-i 2 chi Sum_{i<j} S_i^z S_j^z} as diagonal phases."""
    phases = np.exp(-2j * chi * ising_pair_sums(sys))
    return StateVector(phases * state.amplitudes)


@lru_cache(maxsize=256)
def _field_generator_eig(sys: SpinSystem, field: FieldConfig):
    """Eigendecomposition of G = Sum S_i^z S_j^z + (h/2J) Sum S_j . n'.

    G is the dimensionless generator of Eq.-(33)-style evolution:
    U(chi) = exp(-i 2 chi G).
    """
    nx, ny, nz = field.direction.unit_vector()
    half_ratio = field.ratio_h_over_j / 2.0
    g = np.diag(ising_pair_sums(sys)).astype(complex)
    g += half_ratio * (
        nx * _total_matrix(sys.n_sites, sys.two_s, "x")
        + ny * _total_matrix(sys.n_sites, sys.two_s, "y")
        + nz * _total_matrix(sys.n_sites, sys.two_s, "z")
    )
    try:
        evals, evecs = np.linalg.eigh(g)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on Hermitian
        raise RuntimeError("eigensolver failed on the field generator") from exc
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def _field_propagate(sys: SpinSystem, field: FieldConfig, vec: np.ndarray, chi: float) -> np.ndarray:
    evals, evecs = _field_generator_eig(sys, field)
    return evecs @ (np.exp(-2j * chi * evals) * (evecs.conj().T @ vec))


def _apply_field_generator(sys: SpinSystem, field: FieldConfig, vec: np.ndarray) -> np.ndarray:
    evals, evecs = _field_generator_eig(sys, field)
    return evecs @ (evals * (evecs.conj().T @ vec))


def evolve_with_field(
    sys: SpinSystem, field: FieldConfig, state: StateVector, chi: float
) -> StateVector:
    """Apply exp{-i 2 chi (Sum S_i^z S_j^z + (h/2J) Sum S_j . n')}."""
    sys.check_dim_guard()
    return StateVector(_field_propagate(sys, field, state.amplitudes, chi))


def state_at(
    sys: SpinSystem, point: CoordinatePoint, field: Optional[FieldConfig] = None
) -> StateVector:
    """Evolved family member at (theta, phi, chi), zero-field or dressed."""
    psi0 = initial_state(sys, point.theta, point.phi)
    if field is None:
        return evolve_ising(sys, psi0, point.chi)
    return evolve_with_field(sys, field, psi0, point.chi)


def _initial_theta_derivative(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """d/dtheta of the initial state (exact operator application)."""
    site0 = _rotated_site_vector(sys.two_s, theta, 0.0)
    u = reduce(np.kron, [site0] * sys.n_sites)
    w = -1j * (_total_matrix(sys.n_sites, sys.two_s, "y") @ u)
    return np.exp(-1j * phi * total_z_values(sys)) * w


def tangent_states(
    sys: SpinSystem, point: CoordinatePoint, field: Optional[FieldConfig] = None
) -> TangentStates:
    """Analytic derivatives of the evolved state w.r.t. (theta, phi, chi).

    No finite differencing: each derivative is an operator applied to the
    exactly propagated state.  Zero field: the chi and phi generators are
    diagonal, so they reduce to elementwise multiplications; the theta
    derivative needs one dense matvec with Sum S_j^y.  With a field the
    initial-state derivatives are pushed through the cached spectral
    propagator and d_chi applies the full generator.
    """
    sys.check_dim_guard()
    theta, phi, chi = point.theta, point.phi, point.chi
    d_theta0 = _initial_theta_derivative(sys, theta, phi)
    if field is None:
        phases = np.exp(-2j * chi * ising_pair_sums(sys))
        psi = phases * _initial_amplitudes(sys, theta, phi)
        d_chi = -2j * ising_pair_sums(sys) * psi
        d_phi = -1j * total_z_values(sys) * psi
        d_theta = phases * d_theta0
    else:
        psi0 = _initial_amplitudes(sys, theta, phi)
        psi = _field_propagate(sys, field, psi0, chi)
        d_chi = -2j * _apply_field_generator(sys, field, psi)
        d_phi = _field_propagate(sys, field, -1j * total_z_values(sys) * psi0, chi)
        d_theta = _field_propagate(sys, field, d_theta0, chi)
    return TangentStates(d_theta=d_theta, d_phi=d_phi, d_chi=d_chi)


def chi_period(two_s: int) -> float:
    """Zero-field period of chi: 2*pi for half-integer s, pi for integer s."""
    return 2.0 * math.pi if two_s % 2 == 1 else math.pi

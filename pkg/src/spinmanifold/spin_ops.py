"""Dense spin-s operators, tensor-product embedding and Hamiltonians.

Basis convention used everywhere: lexicographic product basis with site 1
slowest, per-site magnetic quantum number m descending from s to -s.  With
that ordering every S^z is diagonal and the all-to-all zz coupling is a
diagonal matrix whose entries are enumerable from the basis labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional, Tuple

import numpy as np

#: Default ceiling on the Hilbert-space dimension (2s+1)^N for dense work.
DIMENSION_GUARD = 20000

#: Label attached to every state/operator built by this package.
BASIS_CONVENTION = "site1-slowest, m descending s..-s"

TWO_PI = 2.0 * math.pi


class DimensionGuardError(ValueError):
    """Hilbert-space dimension exceeds the configured guard."""


@dataclass(frozen=True)
class SpinSystem:
    """Static description of the model.

    Parameters
    ----------
    n_sites : int
        Number of spins N (>= 2).
    two_s : int
        Twice the spin magnitude, so s = two_s / 2.  Integer storage keeps
        half-integer spins exact (the evolution period depends on the
        parity of two_s).
    coupling_j : float
        Pair coupling J in Hz (hbar = 1).
    gamma : float
        Scale factor of the metric, default 1.
    dim_guard : int
        Maximum allowed Hilbert dimension for dense constructions.
    """

    n_sites: int
    two_s: int
    coupling_j: float = 1.0
    gamma: float = 1.0
    dim_guard: int = DIMENSION_GUARD

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.two_s < 1:
            raise ValueError(f"two_s must be >= 1, got {self.two_s}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def s(self) -> float:
        return self.two_s / 2.0

    @property
    def site_dim(self) -> int:
        return self.two_s + 1

    @property
    def dim(self) -> int:
        return self.site_dim**self.n_sites

    def check_dim_guard(self):
        if self.dim > self.dim_guard:
            raise DimensionGuardError(
                f"Hilbert dimension {self.dim} exceeds guard {self.dim_guard}"
            )


@dataclass(eq=False)
class SiteOperator:
    """Single-site spin component, dense (2s+1) x (2s+1)."""

    matrix: np.ndarray
    kind: str  # one of "x", "y", "z"


@dataclass(eq=False)
class ManyBodyOperator:
    """Dense operator on the full (2s+1)^N product space."""

    matrix: np.ndarray
    basis: str = BASIS_CONVENTION


@dataclass(frozen=True)
class Direction:
    """Unit vector given by polar/azimuthal angles (radians).

    The azimuth is normalized into [0, 2*pi); the polar angle must lie in
    [0, pi].
    """

    polar: float
    azimuth: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.polar <= math.pi:
            raise ValueError(f"polar angle must be in [0, pi], got {self.polar}")
        object.__setattr__(self, "azimuth", self.azimuth % TWO_PI)

    def unit_vector(self) -> np.ndarray:
        st, ct = math.sin(self.polar), math.cos(self.polar)
        return np.array([st * math.cos(self.azimuth), st * math.sin(self.azimuth), ct])


@dataclass(frozen=True)
class FieldConfig:
    """Uniform magnetic field: strength ratio h/J and direction angles.

    ``rational_ratio`` optionally declares h/J = p/q with coprime integers;
    rationality is never inferred from the float value.  The tag controls
    the evolution period when the field points along z.
    """

    ratio_h_over_j: float
    direction: Direction
    rational_ratio: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.rational_ratio is not None:
            p, q = self.rational_ratio
            if q < 1 or math.gcd(p, q) != 1:
                raise ValueError(f"rational_ratio must be coprime with q >= 1: {p}/{q}")
            if abs(p / q - self.ratio_h_over_j) > 1e-12:
                raise ValueError(
                    f"rational_ratio {p}/{q} inconsistent with ratio {self.ratio_h_over_j}"
                )

    @property
    def along_z(self) -> bool:
        """True when the field is aligned with the z axis (either sign)."""
        return math.sin(self.direction.polar) == 0.0


def build_spin_operators(two_s: int) -> Tuple[SiteOperator, SiteOperator, SiteOperator]:
    """Build (Sx, Sy, Sz) for spin s = two_s / 2.

    Sz is diagonal with entries s, s-1, ..., -s; Sx and Sy follow from the
    ladder operators, S+/- |m> = sqrt(s(s+1) - m(m +/- 1)) |m +/- 1>.
    """
    if two_s < 1:
        raise ValueError(f"two_s must be >= 1, got {two_s}")
    s = two_s / 2.0
    m = s - np.arange(two_s + 1)  # descending s .. -s
    sz = np.diag(m).astype(complex)
    # raising operator: |m+1> sits one index *above* |m> in descending order
    splus = np.zeros((two_s + 1, two_s + 1), dtype=complex)
    rows = np.arange(two_s)
    splus[rows, rows + 1] = np.sqrt(s * (s + 1) - m[rows + 1] * (m[rows + 1] + 1))
    sminus = splus.conj().T
    sx = (splus + sminus) / 2.0
    sy = (splus - sminus) / 2.0j
    return (
        SiteOperator(sx, "x"),
        SiteOperator(sy, "y"),
        SiteOperator(sz, "z"),
    )


def embed_site_operator(op: SiteOperator, site: int, sys: SpinSystem) -> ManyBodyOperator:
    """Embed a single-site operator at 1-based ``site``, identity elsewhere."""
    if not 1 <= site <= sys.n_sites:
        raise ValueError(f"site {site} out of range 1..{sys.n_sites}")
    sys.check_dim_guard()
    eye = np.eye(sys.site_dim, dtype=complex)
    factors = [op.matrix if k == site else eye for k in range(1, sys.n_sites + 1)]
    return ManyBodyOperator(reduce(np.kron, factors))


@lru_cache(maxsize=64)
def _site_matrices(two_s: int) -> dict:
    sx, sy, sz = build_spin_operators(two_s)
    return {"x": sx.matrix, "y": sy.matrix, "z": sz.matrix}


@lru_cache(maxsize=64)
def _total_matrix(n_sites: int, two_s: int, kind: str) -> np.ndarray:
    """Sum over sites of the embedded spin component ``kind``."""
    local = _site_matrices(two_s)[kind]
    d1 = two_s + 1
    total = np.zeros((d1**n_sites, d1**n_sites), dtype=complex)
    for site in range(n_sites):
        factors = [local if k == site else np.eye(d1, dtype=complex) for k in range(n_sites)]
        total += reduce(np.kron, factors)
    total.setflags(write=False)
    return total


def total_spin_operator(sys: SpinSystem, kind: str) -> ManyBodyOperator:
    """Sum_j S_j^kind on the full product space."""
    sys.check_dim_guard()
    return ManyBodyOperator(_total_matrix(sys.n_sites, sys.two_s, kind))


@lru_cache(maxsize=64)
def _basis_m_table(n_sites: int, two_s: int) -> np.ndarray:
    """Per-basis-state m labels, shape (d, N), following the basis order."""
    s = two_s / 2.0
    single = s - np.arange(two_s + 1)
    grids = np.meshgrid(*([single] * n_sites), indexing="ij")
    table = np.stack([g.ravel() for g in grids], axis=1)
    table.setflags(write=False)
    return table


def basis_m_values(sys: SpinSystem) -> np.ndarray:
    """m labels (m_1 ... m_N) of every product-basis state, shape (d, N)."""
    return _basis_m_table(sys.n_sites, sys.two_s)


@lru_cache(maxsize=64)
def _pair_sums(n_sites: int, two_s: int) -> np.ndarray:
    """Sum_{i<j} m_i m_j per basis state."""
    table = _basis_m_table(n_sites, two_s)
    totals = table.sum(axis=1)
    squares = (table**2).sum(axis=1)
    out = (totals**2 - squares) / 2.0
    out.setflags(write=False)
    return out


def ising_pair_sums(sys: SpinSystem) -> np.ndarray:
    """Diagonal of Sum_{i<j} S_i^z S_j^z in the product basis."""
    return _pair_sums(sys.n_sites, sys.two_s)


def total_z_values(sys: SpinSystem) -> np.ndarray:
    """Diagonal of Sum_j S_j^z (the total magnetization labels)."""
    return basis_m_values(sys).sum(axis=1)


def build_ising_hamiltonian(sys: SpinSystem) -> ManyBodyOperator:
    """H = 2J Sum_{i<j} S_i^z S_j^z, diagonal in the product basis."""
    sys.check_dim_guard()
    return ManyBodyOperator(np.diag(2.0 * sys.coupling_j * ising_pair_sums(sys)).astype(complex))


def build_field_hamiltonian(sys: SpinSystem, field: FieldConfig) -> ManyBodyOperator:
    """H = 2J Sum_{i<j} S_i^z S_j^z + h Sum_j S_j . n', with h = (h/J) * J."""
    sys.check_dim_guard()
    h = field.ratio_h_over_j * sys.coupling_j
    nx, ny, nz = field.direction.unit_vector()
    mat = np.diag(2.0 * sys.coupling_j * ising_pair_sums(sys)).astype(complex)
    if h != 0.0:
        mat = mat + h * (
            nx * _total_matrix(sys.n_sites, sys.two_s, "x")
            + ny * _total_matrix(sys.n_sites, sys.two_s, "y")
            + nz * _total_matrix(sys.n_sites, sys.two_s, "z")
        )
    return ManyBodyOperator(mat)

"""Nonlinear coherent modes via spectrum-adapted imaginary time propagation.

The solver targets eigenmodes phi_j of the density-dependent Hamiltonian
H[phi] = H0 + V_trap + g0*|phi|^2.  Plain imaginary time propagation damps
everything above the ground mode; here the spectrum of the instantaneous
Hamiltonian is adapted each iteration by replacing its lowest j eigenvalues
with the largest one, so the j-th mode is the most slowly damped component
and becomes the fixed point of the damp-and-renormalize loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite

from .fields import (
    Array,
    PhysicalConstants,
    SpatialGrid,
    TimeGrid,
    inner_product,
    norm,
    normalize,
    parity_defect,
)
from .propagator import Hamiltonian1D, propagate


@dataclass(frozen=True)
class SaitpConfig:
    """Iteration knobs for the imaginary-time mode search."""

    dt_imag: float = 0.15
    epsilon: float = 1e-10
    max_iters: int = 50000

    def __post_init__(self):
        if self.dt_imag <= 0 or self.epsilon <= 0 or self.max_iters <= 0:
            raise ValueError("all SaitpConfig fields must be positive")


@dataclass
class CoherentMode:
    """A converged nonlinear coherent mode."""

    index: int
    g0: float
    field: Array
    energy: float
    residual: float = 0.0
    iterations: int = 0


@dataclass
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix."""

    eigenvalues: Array
    eigenvectors: Array  # column k is the k-th eigenvector


class SaitpNonConvergence(RuntimeError):
    def __init__(self, j: int, g0: float, last_defect: float, last_iterate: Array,
                 defect_history: Array):
        super().__init__(
            f"mode search (j={j}, g0={g0}) did not converge; "
            f"last defect {last_defect:.3e}"
        )
        self.last_defect = last_defect
        self.last_iterate = last_iterate
        self.defect_history = defect_history


def second_derivative_matrix(grid: SpatialGrid) -> Array:
    """Fourth-order central-difference d^2/dx^2 with periodic wrap."""
    n = grid.n
    row = np.zeros(n)
    row[0] = -30.0
    row[1] = row[-1] = 16.0
    row[2] = row[-2] = -1.0
    d2 = np.empty((n, n))
    for i in range(n):
        d2[i] = np.roll(row, i)
    return d2 / (12.0 * grid.dx**2)


def apply_second_derivative(grid: SpatialGrid, f: Array) -> Array:
    """Same 4th-order periodic stencil applied directly to one field."""
    return (
        -30.0 * f
        + 16.0 * (np.roll(f, 1) + np.roll(f, -1))
        - (np.roll(f, 2) + np.roll(f, -2))
    ) / (12.0 * grid.dx**2)


def build_hamiltonian_matrix(
    grid: SpatialGrid,
    constants: PhysicalConstants,
    psi: Array,
    g0: float,
) -> Array:
    """Real symmetric matrix of H0 + V_trap + g0*|psi|^2 on the grid."""
    c = constants
    h = -(c.hbar**2) / (2.0 * c.m) * second_derivative_matrix(grid)
    trap = 0.5 * c.m * c.omega**2 * (grid.x - 0.5 * grid.L) ** 2
    np.fill_diagonal(h, h.diagonal() + trap + g0 * np.abs(psi) ** 2)
    return h


def diagonalize(h: Array) -> EigenDecomposition:
    vals, vecs = np.linalg.eigh(h)
    return EigenDecomposition(vals, vecs)


def harmonic_trial(grid: SpatialGrid, constants: PhysicalConstants, j: int) -> Array:
    """Normalized Hermite-Gaussian of index j centred at L/2."""
    if j < 0 or j > 10:
        raise ValueError("trial index must be in 0..10")
    c = constants
    u = (grid.x - 0.5 * grid.L) * np.sqrt(c.m * c.omega / c.hbar)
    coeffs = np.zeros(j + 1)
    coeffs[j] = 1.0
    psi = hermite.hermval(u, coeffs) * np.exp(-0.5 * u**2)
    return normalize(grid, psi.astype(complex))


def fix_phase(psi: Array) -> Array:
    """Rotate so the entry of largest magnitude is real and positive."""
    i = int(np.argmax(np.abs(psi)))
    phase = psi[i] / abs(psi[i])
    return psi / phase


def mode_energy(
    grid: SpatialGrid, constants: PhysicalConstants, psi: Array, g0: float
) -> float:
    """Energy functional with the 4th-order finite-difference kinetic term."""
    c = constants
    trap = 0.5 * c.m * c.omega**2 * (grid.x - 0.5 * grid.L) ** 2
    hpsi = (
        -(c.hbar**2) / (2.0 * c.m) * apply_second_derivative(grid, psi)
        + (trap + g0 * np.abs(psi) ** 2) * psi
    )
    return float(np.real(np.vdot(psi, hpsi)) * grid.dx)


def mode_residual(
    grid: SpatialGrid, constants: PhysicalConstants, psi: Array, g0: float
) -> float:
    """|| H[psi] psi - E psi ||  with E the energy functional value."""
    c = constants
    trap = 0.5 * c.m * c.omega**2 * (grid.x - 0.5 * grid.L) ** 2
    hpsi = (
        -(c.hbar**2) / (2.0 * c.m) * apply_second_derivative(grid, psi)
        + (trap + g0 * np.abs(psi) ** 2) * psi
    )
    e = float(np.real(np.vdot(psi, hpsi)) * grid.dx)
    return norm(grid, hpsi - e * psi)


def saitp_find_mode(
    j: int,
    g0: float,
    trial: Array,
    grid: SpatialGrid,
    constants: PhysicalConstants = PhysicalConstants(),
    config: SaitpConfig = SaitpConfig(),
) -> CoherentMode:
    """Locate coherent mode j by spectrum-adapted imaginary time propagation.

    Each iteration diagonalizes the instantaneous Hamiltonian, replaces its
    j smallest eigenvalues with the largest one, applies the damping factor
    exp(-adapted_spectrum * dt) in the eigenbasis and renormalizes.  Stops
    when ||psi_new - psi_old||^2 falls below epsilon.
    """
    if j < 0:
        raise ValueError("mode index must be non-negative")
    psi = normalize(grid, np.asarray(trial, dtype=complex))
    defects = []
    for it in range(1, config.max_iters + 1):
        h = build_hamiltonian_matrix(grid, constants, psi, g0)
        dec = diagonalize(h)
        lam = dec.eigenvalues.copy()
        if j > 0:
            lam[:j] = lam[-1]
        damp = np.exp(-lam * config.dt_imag)
        # M exp(-adapted) M^T psi, dx factors cancel in the sandwich
        psi_new = dec.eigenvectors @ (damp * (dec.eigenvectors.T @ psi))
        psi_new = normalize(grid, psi_new)
        defect = norm(grid, psi_new - psi) ** 2
        defects.append(defect)
        psi = psi_new
        if defect < config.epsilon:
            psi = fix_phase(psi)
            return CoherentMode(
                index=j,
                g0=g0,
                field=psi,
                energy=mode_energy(grid, constants, psi, g0),
                residual=mode_residual(grid, constants, psi, g0),
                iterations=it,
            )
    raise SaitpNonConvergence(j, g0, defects[-1], psi, np.asarray(defects))


def solve_family(
    grid: SpatialGrid,
    constants: PhysicalConstants,
    g0: float,
    j_max: int,
    config: SaitpConfig = SaitpConfig(),
) -> list[CoherentMode]:
    """Modes j = 0..j_max for one nonlinearity strength, from Hermite trials."""
    return [
        saitp_find_mode(j, g0, harmonic_trial(grid, constants, j), grid, constants, config)
        for j in range(j_max + 1)
    ]


def stability_distance(
    mode: CoherentMode,
    grid: SpatialGrid,
    constants: PhysicalConstants = PhysicalConstants(),
    T: float = 10.0,
    steps: int = 500,
) -> float:
    """1 - |<phi | psi(T)>|^2 after control-free real-time propagation of phi."""
    ham = Hamiltonian1D(grid, constants, g0=mode.g0)
    psi_T = propagate(mode.field, ham, TimeGrid(T, steps), record=False)
    return 1.0 - abs(inner_product(grid, mode.field, psi_T)) ** 2


def overlap_coefficient(grid: SpatialGrid, mode_j: CoherentMode, mode_k: CoherentMode) -> complex:
    """a_{j,k} = <phi_j | phi_k> between two modes of the same family."""
    if mode_j.g0 != mode_k.g0:
        raise ValueError("overlap coefficients are defined within one g0 family")
    return inner_product(grid, mode_j.field, mode_k.field)


def overlap_matrix(grid: SpatialGrid, family: list[CoherentMode]) -> Array:
    """Matrix of pairwise overlaps a_{j,k} for one mode family."""
    m = len(family)
    a = np.empty((m, m), dtype=complex)
    for r in range(m):
        for s in range(m):
            a[r, s] = inner_product(grid, family[r].field, family[s].field)
    return a


def mode_parity_defect(grid: SpatialGrid, mode: CoherentMode) -> float:
    return parity_defect(grid, mode.field)

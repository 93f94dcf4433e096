"""Grids, complex fields and the discrete inner-product / Fourier conventions
shared by every other module.

Conventions (used consistently throughout the package):

* the spatial domain is [0, L) with N uniform points x_j = j*dx, dx = L/N,
  treated as periodic (no duplicated endpoint); the trap sits at L/2,
* inner products and norms are plain Riemann sums  sum_j conj(a_j) b_j dx,
* the time transform is F(w_n) = sum_k exp(-i w_n t_k) f(t_k) dt with
  w_n = 2 pi n / T, i.e. dt times the standard DFT of the first `steps`
  samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

Array = np.ndarray


@dataclass(frozen=True)
class PhysicalConstants:
    """Problem constants; the canonical setup uses hbar = m = omega = 1."""

    hbar: float = 1.0
    m: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "m", "omega"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on [0, L) with the trap centre at L/2."""

    L: float = 20.0
    n: int = 300

    def __post_init__(self):
        if self.L <= 0.0:
            raise ValueError("L must be positive")
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError("n must be even and at least 8 (FFT-friendly)")

    @property
    def dx(self) -> float:
        return self.L / self.n

    @cached_property
    def x(self) -> Array:
        return np.arange(self.n) * self.dx

    @cached_property
    def k(self) -> Array:
        """Signed angular FFT wavenumbers 2*pi*n/L."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def matches(self, field: Array) -> bool:
        return field.ndim >= 1 and field.shape[0] == self.n


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_k = k*dt, k = 0..steps, with dt = T/steps."""

    T: float
    steps: int

    def __post_init__(self):
        if self.T < 0.0:
            raise ValueError("T must be non-negative")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @cached_property
    def t(self) -> Array:
        """All steps+1 node times."""
        return np.arange(self.steps + 1) * self.dt

    @cached_property
    def omega(self) -> Array:
        """Angular frequency bins 2*pi*n/T, n = 0..steps-1."""
        return 2.0 * np.pi * np.arange(self.steps) / self.T


def _check_same_grid(grid: SpatialGrid, *fields: Array) -> None:
    for f in fields:
        if not grid.matches(np.asarray(f)):
            raise ValueError(
                f"grid mismatch: field of length {np.asarray(f).shape[0]} "
                f"on a grid of {grid.n} points"
            )


def inner_product(grid: SpatialGrid, a: Array, b: Array) -> complex:
    """Discrete overlap  sum_j conj(a_j) b_j dx."""
    _check_same_grid(grid, a, b)
    return complex(np.vdot(a, b) * grid.dx)


def norm(grid: SpatialGrid, psi: Array) -> float:
    _check_same_grid(grid, psi)
    return float(np.sqrt(np.real(np.vdot(psi, psi)) * grid.dx))


def normalize(grid: SpatialGrid, psi: Array) -> Array:
    """Rescale to unit norm under the Riemann inner product."""
    n = norm(grid, psi)
    if n == 0.0:
        raise ValueError("cannot normalize a zero field")
    return psi / n


def reflect(psi: Array) -> Array:
    """Field values at the mirrored points x -> L - x (periodic identification)."""
    return np.roll(psi[::-1], 1)


def parity_defect(grid: SpatialGrid, psi: Array) -> float:
    """Distance from definite parity about L/2.

    Returns min over sign s in {+1,-1} of ||psi - s*reflect(psi)|| / ||psi||;
    0 means the field is exactly even or odd.
    """
    _check_same_grid(grid, psi)
    n = norm(grid, psi)
    if n == 0.0:
        return 0.0
    rev = reflect(psi)
    d_even = norm(grid, psi - rev)
    d_odd = norm(grid, psi + rev)
    return min(d_even, d_odd) / n


def parity_sign(grid: SpatialGrid, psi: Array) -> int:
    """+1 for (closer to) even fields, -1 for odd ones."""
    rev = reflect(psi)
    return 1 if norm(grid, psi - rev) <= norm(grid, psi + rev) else -1


def dft_time(values: Array, dt: float) -> Array:
    """Riemann-sum Fourier transform of a uniformly sampled time series.

    F(w_n) = sum_k exp(-i w_n t_k) f(t_k) dt  at  w_n = 2 pi n / (len*dt),
    which is dt times the standard DFT.  `values` may carry extra leading
    axes; the transform acts on the last axis.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    return np.fft.fft(np.asarray(values), axis=-1) * dt

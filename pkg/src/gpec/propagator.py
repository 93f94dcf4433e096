"""Forward real-time evolution of the controlled Gross-Pitaevskii equation.

Second-order symmetric split-step scheme with the corrected nonlinear
half-step: the step from t to t+dt is

    psi <- exp(-i*Hh1*dt/2) exp(-i*H0*dt) exp(-i*H1*dt/2) psi

where H1 uses the density |psi(t)|^2 and Hh1 re-evaluates it with
|psi(t+dt)| obtained from the first two factors (the last factor is a pure
phase, so the modulus is already final).  Potential and nonlinearity
controls are sampled at the node t+dt for both half-steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import Array, PhysicalConstants, SpatialGrid, TimeGrid, norm


class PropagationUnstableError(RuntimeError):
    """Raised when a split step produces non-finite amplitudes."""

    def __init__(self, step_index: int):
        super().__init__(
            f"non-finite wavefunction after step {step_index}; "
            "dt is too large for the given potential/nonlinearity magnitudes"
        )
        self.step_index = step_index


@dataclass
class Hamiltonian1D:
    """Harmonic trap plus base nonlinearity plus optional space-time controls.

    v_cont / g_cont are (n, steps+1) arrays sampled on the space-time nodes,
    or None for control-free evolution.  Totals follow
    V(x,t) = trap + v_cont and g(x,t) = g0 + g_cont.
    """

    grid: SpatialGrid
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    g0: float = 0.0
    v_cont: Array | None = None
    g_cont: Array | None = None

    def __post_init__(self):
        c, g = self.constants, self.grid
        self.trap = 0.5 * c.m * c.omega**2 * (g.x - 0.5 * g.L) ** 2
        for name in ("v_cont", "g_cont"):
            ctrl = getattr(self, name)
            if ctrl is not None:
                ctrl = np.asarray(ctrl, dtype=float)
                if ctrl.ndim != 2 or ctrl.shape[0] != g.n:
                    raise ValueError(f"{name} must have shape (n, steps+1)")
                setattr(self, name, ctrl)

    def v_total(self, k: int) -> Array:
        if self.v_cont is None:
            return self.trap
        return self.trap + self.v_cont[:, k]

    def g_total(self, k: int) -> Array | float:
        if self.g_cont is None:
            return self.g0
        return self.g0 + self.g_cont[:, k]


@dataclass
class Trajectory:
    """Dense record of psi at every time node (steps+1 snapshots)."""

    grid: SpatialGrid
    time_grid: TimeGrid
    psi: Array  # complex, shape (steps+1, n)

    def norm_drift(self) -> float:
        """max_k | ||psi(t_k)||^2 - 1 |."""
        n2 = np.sum(np.abs(self.psi) ** 2, axis=1) * self.grid.dx
        return float(np.max(np.abs(n2 - 1.0)))


def kinetic_phase(grid: SpatialGrid, constants: PhysicalConstants, dt: float) -> Array:
    """Momentum-space factor exp(-i hbar k^2 dt / 2m)."""
    c = constants
    return np.exp(-1j * c.hbar * grid.k**2 * dt / (2.0 * c.m))


def kinetic_half(
    grid: SpatialGrid, constants: PhysicalConstants, psi: Array, dt: float
) -> Array:
    """Apply the free-particle factor exp(-i H0 dt / hbar) via the FFT."""
    return np.fft.ifft(kinetic_phase(grid, constants, dt) * np.fft.fft(psi))


def step_forward(
    psi: Array,
    hamiltonian: Hamiltonian1D,
    k_next: int,
    dt: float,
    _kin: Array | None = None,
) -> Array:
    """One split step from node k_next-1 to node k_next.

    Controls are evaluated at the destination node k_next; the nonlinear
    phase of the first half uses |psi|^2 at the start of the step and the
    final half uses the corrected post-kinetic modulus.
    """
    ham = hamiltonian
    hbar = ham.constants.hbar
    v = ham.v_total(k_next)
    g = ham.g_total(k_next)
    if _kin is None:
        _kin = kinetic_phase(ham.grid, ham.constants, dt)

    chi = np.exp(-0.5j * dt / hbar * (v + g * np.abs(psi) ** 2)) * psi
    xi = np.fft.ifft(_kin * np.fft.fft(chi))
    out = np.exp(-0.5j * dt / hbar * (v + g * np.abs(xi) ** 2)) * xi
    return out


def propagate(
    psi0: Array,
    hamiltonian: Hamiltonian1D,
    time_grid: TimeGrid,
    record: bool = True,
) -> Trajectory | Array:
    """Evolve psi0 over the whole time grid.

    With record=True all steps+1 snapshots are kept (the adjoint sweep needs
    them); otherwise only the final field is returned.  Non-finite values
    abort with the offending step index.
    """
    ham = hamiltonian
    grid, tg = ham.grid, time_grid
    if not grid.matches(psi0):
        raise ValueError("initial field does not match the spatial grid")
    for name in ("v_cont", "g_cont"):
        ctrl = getattr(ham, name)
        if ctrl is not None and ctrl.shape[1] != tg.steps + 1:
            raise ValueError(f"{name} does not match the time grid")
    if tg.T == 0.0:
        psi0 = np.array(psi0, dtype=complex)
        if record:
            return Trajectory(grid, tg, np.repeat(psi0[None, :], tg.steps + 1, axis=0))
        return psi0

    dt = tg.dt
    kin = kinetic_phase(grid, ham.constants, dt)
    psi = np.array(psi0, dtype=complex)
    if record:
        snaps = np.empty((tg.steps + 1, grid.n), dtype=complex)
        snaps[0] = psi
    for k in range(1, tg.steps + 1):
        psi = step_forward(psi, ham, k, dt, _kin=kin)
        if not np.all(np.isfinite(psi.view(float))):
            raise PropagationUnstableError(k)
        if record:
            snaps[k] = psi
    if record:
        return Trajectory(grid, tg, snaps)
    return psi


def expectation_x(grid: SpatialGrid, psi: Array) -> float:
    """Position expectation value of a normalized field."""
    return float(np.sum(grid.x * np.abs(psi) ** 2) * grid.dx)

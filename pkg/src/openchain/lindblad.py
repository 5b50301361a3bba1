"""Open-system dynamics in the energy representation of the chain.

The bath exchanges single energy quanta with the chain: jump operators connect
adjacent energy levels only (simultaneous multi-phonon processes are excluded),
at the thermal rates

    absorption  n -> n+1 :  1 / (exp(beta*omega) - 1)
    emission    n+1 -> n :  1 / (exp(beta*omega) - 1) + 1

with omega the level gap, so detailed balance holds and the Gibbs vector is
stationary. The chain-bath coupling strength ``zeta`` multiplies all rates.

Under these rates the density matrix decouples in the energy eigenbasis:
populations follow a classical master equation (solved exactly through the
matrix exponential of its generator), while each coherence decays
autonomously,

    rho_mn(t) = rho_mn(0) * exp([-i (e_m - e_n) - zeta (G_m + G_n)/2] t),

where G_m is the total outflow rate from level m. ``zeta = 0`` reduces every
formula to the closed-system evolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .chains import EigenSystem, HamiltonianOperator, diagonalize
from .series import ObservableSeries


class DegenerateGapError(ValueError):
    """Adjacent energy levels coincide, so the thermal rates are undefined."""


@dataclass(frozen=True)
class BathSpec:
    """Thermal reservoir: inverse temperature and coupling constant.

    ``zeta = 0`` is allowed and gives exactly unitary evolution (handy for
    consistency checks); dissipative runs use zeta > 0.
    """

    beta: float
    zeta: float

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"inverse temperature must be > 0, got {self.beta}")
        if self.zeta < 0:
            raise ValueError(f"coupling constant must be >= 0, got {self.zeta}")


@dataclass(frozen=True)
class TransitionRates:
    """gamma[m, n] = bare rate of the level transition n -> m (zeta excluded).

    Only nearest-level entries are nonzero. ``widths[m]`` is the total outflow
    rate G_m = sum_j gamma[j, m].
    """

    gamma: np.ndarray
    widths: np.ndarray

    @property
    def dim(self) -> int:
        return self.widths.size


def transition_rates(eigenvalues: np.ndarray, bath: BathSpec) -> TransitionRates:
    """Thermal absorption/emission rates between adjacent levels."""
    evals = np.asarray(eigenvalues, dtype=float)
    n = evals.size
    gamma = np.zeros((n, n))
    for k in range(n - 1):
        omega = evals[k + 1] - evals[k]
        if omega <= 0:
            raise DegenerateGapError(
                f"levels {k + 1} and {k + 2} have gap {omega}; "
                "rates require a strictly ascending spectrum"
            )
        with np.errstate(over="ignore"):
            occupation = 1.0 / np.expm1(bath.beta * omega)
        gamma[k + 1, k] = occupation  # absorption
        gamma[k, k + 1] = occupation + 1.0  # stimulated + spontaneous emission
    return TransitionRates(gamma, gamma.sum(axis=0))


def population_generator(rates: TransitionRates, bath: BathSpec) -> np.ndarray:
    """Generator A of dp/dt = A p; columns sum to zero (trace preserving)."""
    a = bath.zeta * rates.gamma.copy()
    np.fill_diagonal(a, -bath.zeta * rates.widths)
    return a


def propagate_populations(
    rates: TransitionRates,
    bath: BathSpec,
    p0: np.ndarray,
    t: float,
    method: str = "expm",
) -> np.ndarray:
    """Populations at time t from the classical master equation.

    ``method="expm"`` (default) is exact via the matrix exponential of the
    generator; ``method="ivp"`` integrates with an adaptive Runge-Kutta
    scheme and exists purely as an independent cross-check.
    """
    p0 = np.asarray(p0, dtype=float)
    if np.any(p0 < -1e-12):
        raise ValueError(f"negative input probabilities: min = {p0.min()}")
    if abs(p0.sum() - 1.0) > 1e-9:
        raise ValueError(f"input populations must sum to 1, got {p0.sum()}")
    gen = population_generator(rates, bath)
    if method == "expm":
        return expm(gen * t) @ p0
    if method == "ivp":
        sol = solve_ivp(
            lambda _, p: gen @ p,
            (0.0, t),
            p0,
            method="DOP853",
            rtol=1e-11,
            atol=1e-13,
        )
        if not sol.success:
            raise RuntimeError(f"population integrator failed: {sol.message}")
        return sol.y[:, -1]
    raise ValueError(f"unknown method {method!r}")


def coherence_decay_matrix(
    eigenvalues: np.ndarray, rates: TransitionRates, bath: BathSpec
) -> np.ndarray:
    """Complex per-element rate of the autonomous coherence equations."""
    e = np.asarray(eigenvalues, dtype=float)
    g = bath.zeta * rates.widths
    return -1j * (e[:, None] - e[None, :]) - 0.5 * (g[:, None] + g[None, :])


def propagate_coherences(
    eigenvalues: np.ndarray,
    rates: TransitionRates,
    bath: BathSpec,
    rho0_offdiag: np.ndarray,
    t: float,
) -> np.ndarray:
    """Closed-form off-diagonal elements at time t (diagonal is returned as 0)."""
    coh = np.asarray(rho0_offdiag, dtype=complex) * np.exp(
        coherence_decay_matrix(eigenvalues, rates, bath) * t
    )
    np.fill_diagonal(coh, 0.0)
    return coh


def thermal_fixed_point(eigenvalues: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs populations proportional to exp(-beta e_m)."""
    e = np.asarray(eigenvalues, dtype=float)
    w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


@dataclass
class EnergyRepDensity:
    """Density matrix split into populations and coherences in the energy basis.

    Also used for the sub-unit-trace blocks of a two-branch state, so the
    unit-trace check lives in :meth:`validate` rather than the constructor.
    """

    populations: np.ndarray
    coherences: np.ndarray

    def __post_init__(self) -> None:
        self.populations = np.asarray(self.populations, dtype=float)
        self.coherences = np.asarray(self.coherences, dtype=complex)
        n = self.populations.size
        if self.coherences.shape != (n, n):
            raise ValueError("coherence matrix must be dim x dim")

    @property
    def dim(self) -> int:
        return self.populations.size

    def matrix(self) -> np.ndarray:
        return np.diag(self.populations).astype(complex) + self.coherences

    def trace(self) -> float:
        return float(self.populations.sum())

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "EnergyRepDensity":
        rho = np.asarray(rho, dtype=complex)
        pops = np.real(np.diag(rho)).copy()
        coh = rho.copy()
        np.fill_diagonal(coh, 0.0)
        return cls(pops, coh)

    def validate(self, atol: float = 1e-9) -> None:
        """Check the unit-trace, positivity and hermiticity invariants."""
        if np.any(self.populations < -1e-12):
            raise ValueError(f"negative population: min = {self.populations.min()}")
        if abs(self.trace() - 1.0) > atol:
            raise ValueError(f"trace is {self.trace()}, expected 1")
        m = self.matrix()
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -atol:
            raise ValueError("density matrix is not positive semidefinite")


def to_position_representation(eig: EigenSystem, rho: EnergyRepDensity) -> np.ndarray:
    """Rotate an energy-representation density matrix to the site basis."""
    if rho.dim != eig.dim:
        raise ValueError(f"density dim {rho.dim} does not match system dim {eig.dim}")
    v = eig.eigenvectors
    return v @ rho.matrix() @ v.T


def to_energy_representation(eig: EigenSystem, rho_pos: np.ndarray) -> EnergyRepDensity:
    """Inverse of :func:`to_position_representation`."""
    v = eig.eigenvectors
    return EnergyRepDensity.from_matrix(v.T @ np.asarray(rho_pos, dtype=complex) @ v)


def density_observables(
    rho: np.ndarray, region: Iterable[int] | None = None
) -> tuple[float, float, float]:
    """(mean_Q, var_Q, p_region) of a position-basis density matrix."""
    rho = np.asarray(rho, dtype=complex)
    prob = np.real(np.diag(rho))
    dim = prob.size
    x = np.arange(1, dim + 1)
    mean = float(prob @ x)
    var = max(float(prob @ x**2 - mean**2), 0.0)
    p_reg = 1.0
    if region is not None:
        sites = sorted(set(region))
        if sites and (sites[0] < 1 or sites[-1] > dim):
            raise ValueError(f"region {sites} not contained in 1..{dim}")
        p_reg = float(sum(prob[s - 1] for s in sites))
    return mean, var, p_reg


def relax_energy_density(
    eigenvalues: np.ndarray,
    rates: TransitionRates,
    bath: BathSpec,
    rho0: EnergyRepDensity,
    t_grid: np.ndarray,
) -> list[EnergyRepDensity]:
    """Energy-representation state at each grid time (grid must be nondecreasing).

    Populations advance by exact exponential steps of the generator (cached per
    distinct step size); coherences use their closed form.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("time grid must be nondecreasing")
    gen = population_generator(rates, bath)
    decay = coherence_decay_matrix(eigenvalues, rates, bath)
    steps: dict[float, np.ndarray] = {}
    pops = rho0.populations.copy()
    out = []
    prev_t = t_grid[0] if t_grid.size else 0.0
    if t_grid.size and t_grid[0] > 0:
        pops = expm(gen * t_grid[0]) @ pops
    for t in t_grid:
        if t > prev_t:
            dt = round(float(t - prev_t), 12)
            if dt not in steps:
                steps[dt] = expm(gen * dt)
            pops = steps[dt] @ pops
        prev_t = t
        coh = rho0.coherences * np.exp(decay * t)
        out.append(EnergyRepDensity(pops.copy(), coh))
    return out


def dissipative_transport_run(
    h: HamiltonianOperator,
    bath: BathSpec,
    psi0: np.ndarray,
    t_grid: np.ndarray,
    region: Iterable[int] | None = None,
) -> ObservableSeries:
    """Full pipeline: diagonalize, relax in the energy basis, report site observables.

    ``psi0`` is a position-basis pure state; ``region`` defaults to the last
    site. The initial energy-basis coherences are kept and propagated, so the
    early-time transient is exact.
    """
    eig = diagonalize(h)
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    if region is None:
        region = {h.dim}
    region = sorted(set(region))
    rates = transition_rates(eig.eigenvalues, bath)
    rho0 = to_energy_representation(eig, np.outer(psi0, psi0.conj()))
    t_grid = np.asarray(t_grid, dtype=float)
    states = relax_energy_density(eig.eigenvalues, rates, bath, rho0, t_grid)
    mean = np.empty(t_grid.size)
    var = np.empty(t_grid.size)
    p_reg = np.empty(t_grid.size)
    for i, state in enumerate(states):
        rho_pos = to_position_representation(eig, state)
        mean[i], var[i], p_reg[i] = density_observables(rho_pos, region)
    return ObservableSeries(t_grid, mean, var, p_reg)

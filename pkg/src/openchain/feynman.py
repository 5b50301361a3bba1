"""Clocked computation on a chain: the CNOT switch circuit.

A cursor excitation walks along a clock track and applies one primitive per
bond to a two-qubit register (control sigma(c), passive sigma(p)). The CNOT
switch occupies sites a..b with b = a + 5:

    upper branch (control up):    a -- a+1 --NOT-- a+2 -- b
    lower branch (control down):  a -- a+3 ------- a+4 -- b

with plain (inertial) sites 1..a before and b..s after the switch. Because
the register state is a function of the cursor position within a branch, each
branch reduces exactly to an (s-2)-site chain in "path coordinates": hopping
-1/2, on-site energy eps_{x(j)} - g*j, where x(j) is the physical site visited
at path coordinate j and the tilt is linear in j (the physical-site tilt is
-g*x before the branch split and -g*(x-2) after it, which is the same thing).

The pairing (path coordinate, physical site, register label) is the branch's
computational basis; labels are classical product states, so any site-diagonal
potential commutes with the projector onto the branch subspace and the
computation survives disorder unharmed.

For a superposed control the state is a 2x2 block matrix over the two branch
subspaces. Each diagonal block relaxes like a single chain; the cross block
only dephases (the bath jumps act within a branch and never transfer
population between branches):

    rho^{UD}_mn(t) = rho^{UD}_mn(0)
                     * exp([-i (e^U_m - e^D_n) - zeta (G^U_m + G^D_n)/2] t).

Tracing out the cursor in the physical-site basis gives the register state:
diagonal blocks contribute their site populations; the cross block contributes
only where the two branches traverse the same physical site (1..a and b..s).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .chains import DisorderRealization, EigenSystem, HamiltonianOperator, PotentialProfile, diagonalize
from .lindblad import (
    BathSpec,
    EnergyRepDensity,
    relax_energy_density,
    transition_rates,
)
from .series import ObservableSeries, write_csv

Branch = Literal["U", "D"]
RegisterLabel = tuple[int, int]

#: two-qubit register basis order: (sigma3(c), sigma3(p))
REGISTER_BASIS: tuple[RegisterLabel, ...] = ((-1, -1), (-1, +1), (+1, -1), (+1, +1))

#: maximally entangled target state (|-1,-1> + |+1,+1>)/sqrt(2)
BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def register_index(label: RegisterLabel) -> int:
    c, p = label
    if c not in (-1, 1) or p not in (-1, 1):
        raise ValueError(f"register label must be a (+-1, +-1) pair, got {label}")
    return 2 * (c > 0) + (p > 0)


@dataclass(frozen=True)
class CircuitLayout:
    """Switch geometry: s clock sites, switch entry a, exit b = a + 5."""

    s: int
    a: int

    def __post_init__(self) -> None:
        if self.a < 1:
            raise ValueError(f"switch entry must be >= 1, got a={self.a}")
        if self.s < self.a + 6:
            raise ValueError(
                f"need s >= a + 6 so that an inertial site follows the switch; "
                f"got s={self.s}, a={self.a}"
            )

    @property
    def b(self) -> int:
        return self.a + 5

    @property
    def path_length(self) -> int:
        """Number of sites visited by either branch."""
        return self.s - 2


def build_cnot_layout(s: int, a: int) -> CircuitLayout:
    return CircuitLayout(s, a)


@dataclass(frozen=True)
class PathCoordinateMap:
    """Physical site x(j) visited at each path coordinate j = 1..s-2, per branch."""

    up: np.ndarray
    down: np.ndarray

    def sites(self, branch: Branch) -> np.ndarray:
        return self.up if branch == "U" else self.down

    @property
    def shared(self) -> np.ndarray:
        """0-based path coordinates where both branches sit on the same site."""
        return np.flatnonzero(self.up == self.down)


def coordinate_map(layout: CircuitLayout) -> PathCoordinateMap:
    a, n = layout.a, layout.path_length
    j = np.arange(1, n + 1)
    up = np.where(j <= a + 2, j, j + 2)
    down = j.copy()
    down[j == a + 1] = a + 3
    down[j == a + 2] = a + 4
    down[j >= a + 3] = j[j >= a + 3] + 2
    return PathCoordinateMap(up, down)


@dataclass(frozen=True)
class PeresBasis:
    """Ordered computational basis of one branch: (path 1..n, site, register label)."""

    branch: Branch
    sites: np.ndarray
    registers: tuple[RegisterLabel, ...]

    @property
    def path_length(self) -> int:
        return self.sites.size

    @property
    def entries(self) -> list[tuple[int, int, RegisterLabel]]:
        return [
            (j + 1, int(self.sites[j]), self.registers[j])
            for j in range(self.path_length)
        ]

    def register_indices(self) -> np.ndarray:
        return np.array([register_index(r) for r in self.registers])


def peres_basis(
    layout: CircuitLayout, branch: Branch, input_register: RegisterLabel
) -> PeresBasis:
    """Computational basis of a branch for a classical input register.

    The control qubit must match the branch (+1 up, -1 down). On the upper
    branch the passive qubit flips across the NOT bond (path coordinates a+1
    to a+2); the lower branch applies no primitive at all.
    """
    c, p = input_register
    register_index(input_register)  # validates the label
    if (branch == "U") != (c == +1):
        raise ValueError(
            f"branch {branch} requires control {'+1' if branch == 'U' else '-1'}, "
            f"got sigma3(c) = {c}"
        )
    maps = coordinate_map(layout)
    n = layout.path_length
    if branch == "U":
        registers = tuple(
            (c, p) if j <= layout.a + 1 else (c, -p) for j in range(1, n + 1)
        )
    else:
        registers = tuple((c, p) for _ in range(n))
    return PeresBasis(branch, maps.sites(branch), registers)


def reduced_chain_hamiltonian(
    layout: CircuitLayout,
    branch: Branch,
    disorder: DisorderRealization,
    g: float,
) -> HamiltonianOperator:
    """Branch Hamiltonian in path coordinates: hopping -1/2, diagonal eps_x(j) - g*j."""
    if len(disorder) != layout.s:
        raise ValueError(
            f"disorder has {len(disorder)} entries, layout has {layout.s} sites"
        )
    sites = coordinate_map(layout).sites(branch)
    j = np.arange(1, layout.path_length + 1, dtype=float)
    diag = disorder.epsilons[sites - 1] - g * j
    return HamiltonianOperator(diag, -0.5 * np.ones(layout.path_length - 1))


# ---------------------------------------------------------------------------
# conservation of the computational subspace
# ---------------------------------------------------------------------------


def embedded_labels(basis: PeresBasis) -> list[RegisterLabel]:
    """Register labels reachable along the branch, in order of first appearance."""
    seen: list[RegisterLabel] = []
    for label in basis.registers:
        if label not in seen:
            seen.append(label)
    return seen


def embedded_potential(
    potential: PotentialProfile, basis: PeresBasis, labels: list[RegisterLabel] | None = None
) -> np.ndarray:
    """f(x) x identity on the (site, reachable-label) product space."""
    labels = embedded_labels(basis) if labels is None else labels
    return np.kron(np.diag(potential.values), np.eye(len(labels)))


def embedded_subspace_projector(
    basis: PeresBasis, s: int, labels: list[RegisterLabel] | None = None
) -> np.ndarray:
    """Projector onto the branch's computational subspace in the same product space."""
    labels = embedded_labels(basis) if labels is None else labels
    nlab = len(labels)
    proj = np.zeros((s * nlab, s * nlab))
    for j in range(basis.path_length):
        idx = (int(basis.sites[j]) - 1) * nlab + labels.index(basis.registers[j])
        proj[idx, idx] = 1.0
    return proj


def check_subspace_conservation(
    potential: PotentialProfile, basis: PeresBasis
) -> float:
    """Frobenius norm of [V, P] for a site-diagonal potential V.

    Zero (to machine precision) for every diagonal potential: the clock
    position determines the register state, so no potential on the clock can
    leak amplitude out of the computational subspace.
    """
    s = len(potential)
    if s < basis.sites.max():
        raise ValueError(
            f"potential over {s} sites cannot cover a path reaching site {basis.sites.max()}"
        )
    labels = embedded_labels(basis)
    v = embedded_potential(potential, basis, labels)
    p = embedded_subspace_projector(basis, s, labels)
    return float(np.linalg.norm(v @ p - p @ v))


# ---------------------------------------------------------------------------
# evolution with classical and superposed control
# ---------------------------------------------------------------------------


@dataclass
class BranchModel:
    """Everything needed to evolve one branch: basis, reduced operator, spectrum."""

    layout: CircuitLayout
    branch: Branch
    basis: PeresBasis
    hamiltonian: HamiltonianOperator
    eig: EigenSystem

    @classmethod
    def build(
        cls,
        layout: CircuitLayout,
        branch: Branch,
        disorder: DisorderRealization,
        g: float,
        input_register: RegisterLabel | None = None,
    ) -> "BranchModel":
        if input_register is None:
            input_register = (+1 if branch == "U" else -1, -1)
        basis = peres_basis(layout, branch, input_register)
        h = reduced_chain_hamiltonian(layout, branch, disorder, g)
        return cls(layout, branch, basis, h, diagonalize(h))

    def beyond_gate_coordinates(self) -> np.ndarray:
        """0-based path coordinates whose physical site is >= b."""
        return np.flatnonzero(self.basis.sites >= self.layout.b)


def _series_from_site_probabilities(
    t_grid: np.ndarray, prob: np.ndarray, sites: np.ndarray, region: np.ndarray
) -> ObservableSeries:
    # prob has shape (T, n); observables use physical-site positions
    x = sites.astype(float)
    mean = prob @ x
    var = prob @ x**2 - mean**2
    p_reg = prob[:, region].sum(axis=1)
    return ObservableSeries(t_grid, mean, var, p_reg)


def run_classical_input(
    layout: CircuitLayout,
    disorder: DisorderRealization,
    g: float,
    bath: BathSpec | None,
    branch: Branch,
    t_grid: np.ndarray,
    input_register: RegisterLabel | None = None,
    with_sites: bool = False,
) -> ObservableSeries:
    """Cursor dynamics of one branch, started at path coordinate 1.

    Unitary when ``bath`` is None, Lindblad otherwise. ``p_region`` is the
    probability of the sites at and beyond the switch exit b. Position
    observables are reported in physical-site coordinates; with ``with_sites``
    the full path-coordinate distribution is kept on the series.
    """
    model = BranchModel.build(layout, branch, disorder, g, input_register)
    t_grid = np.asarray(t_grid, dtype=float)
    n = layout.path_length
    region = model.beyond_gate_coordinates()
    if bath is None or bath.zeta == 0.0:
        v, w = model.eig.eigenvectors, model.eig.eigenvalues
        phases = np.exp(-1j * np.outer(t_grid, w)) * v[0, :][None, :]
        prob = np.abs(phases @ v.T) ** 2  # (T, n)
    else:
        rates = transition_rates(model.eig.eigenvalues, bath)
        rho0 = EnergyRepDensity.from_matrix(
            np.outer(model.eig.eigenvectors[0], model.eig.eigenvectors[0])
        )
        states = relax_energy_density(model.eig.eigenvalues, rates, bath, rho0, t_grid)
        v = model.eig.eigenvectors
        prob = np.empty((t_grid.size, n))
        for i, state in enumerate(states):
            prob[i] = np.real(np.einsum("xm,mn,xn->x", v, state.matrix(), v))
    series = _series_from_site_probabilities(t_grid, prob, model.basis.sites, region)
    if with_sites:
        series.site_probabilities = prob
    return series


@dataclass
class BlockDensity:
    """State of the superposed-control machine over the two branch subspaces.

    ``uu``/``dd`` live in their branch's energy eigenbasis; ``ud`` is the
    cross-branch coherence block with row index in the upper-branch eigenbasis
    and column index in the lower-branch one. The eigensystems are kept so the
    cursor can be traced out in the physical-site basis.
    """

    uu: EnergyRepDensity
    dd: EnergyRepDensity
    ud: np.ndarray
    eig_up: EigenSystem
    eig_down: EigenSystem

    @property
    def trace_up(self) -> float:
        return self.uu.trace()

    @property
    def trace_down(self) -> float:
        return self.dd.trace()

    def position_blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(uu, dd, ud) rotated to the path-coordinate (site) basis."""
        vu, vd = self.eig_up.eigenvectors, self.eig_down.eigenvectors
        return (
            vu @ self.uu.matrix() @ vu.T,
            vd @ self.dd.matrix() @ vd.T,
            vu @ self.ud @ vd.T,
        )

    def full_matrix(self) -> np.ndarray:
        """The complete 2n x 2n block matrix (position basis), for invariant checks."""
        uu, dd, ud = self.position_blocks()
        return np.block([[uu, ud], [ud.conj().T, dd]])


def register_reduced_state(
    block: BlockDensity,
    maps: PathCoordinateMap,
    bases: tuple[PeresBasis, PeresBasis],
    region: Iterable[int] | None = None,
) -> np.ndarray:
    """Trace out the cursor position (physical-site basis) -> 4x4 register matrix.

    With ``region`` (a set of physical sites) the trace is restricted to those
    sites and the result is unnormalized: its trace is the probability of the
    cursor being there. Diagonal blocks contribute site populations; the
    cross block contributes only on sites traversed by both branches.
    """
    basis_up, basis_down = bases
    uu, dd, ud = block.position_blocks()
    idx_up = basis_up.register_indices()
    idx_down = basis_down.register_indices()
    n = basis_up.path_length
    if region is None:
        keep_up = keep_down = np.ones(n, dtype=bool)
    else:
        sites = set(region)
        keep_up = np.array([int(x) in sites for x in maps.up])
        keep_down = np.array([int(x) in sites for x in maps.down])
    rho = np.zeros((4, 4), dtype=complex)
    pu = np.real(np.diag(uu))
    pd = np.real(np.diag(dd))
    for j in range(n):
        if keep_up[j]:
            rho[idx_up[j], idx_up[j]] += pu[j]
        if keep_down[j]:
            rho[idx_down[j], idx_down[j]] += pd[j]
    for j in maps.shared:
        if keep_up[j]:
            rho[idx_up[j], idx_down[j]] += ud[j, j]
            rho[idx_down[j], idx_up[j]] += np.conj(ud[j, j])
    return rho


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-sum lambda ln lambda over the eigenvalues (natural log, 0 ln 0 = 0)."""
    lam = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log(lam)))


def bell_fidelity(rho: np.ndarray) -> float:
    """Overlap of a 4x4 register state with the entangled target Phi+."""
    return float(np.real(BELL_PHI_PLUS @ np.asarray(rho, dtype=complex) @ BELL_PHI_PLUS))


@dataclass
class SwitchSeries:
    """Time series of a superposed-control run.

    ``bell_fidelity`` is conditioned on the cursor having passed the switch
    (physical site >= b) and is NaN where that probability vanishes;
    ``entropy`` is the unconditioned register entropy.
    """

    times: np.ndarray
    trace_uu: np.ndarray
    trace_dd: np.ndarray
    p_beyond_gate: np.ndarray
    entropy: np.ndarray
    bell_fidelity: np.ndarray
    blocks: list[BlockDensity] | None = None

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "t": self.times,
            "trace_UU": self.trace_uu,
            "trace_DD": self.trace_dd,
            "p_beyond_gate": self.p_beyond_gate,
            "entropy": self.entropy,
            "bell_fidelity": self.bell_fidelity,
        }

    def to_csv(self, path) -> None:
        write_csv(path, self.columns())


def run_superposed_input(
    layout: CircuitLayout,
    disorder: DisorderRealization,
    g: float,
    bath: BathSpec | None,
    t_grid: np.ndarray,
    keep_blocks: bool = False,
) -> SwitchSeries:
    """Evolve the machine from the equal superposition of control up and down.

    The initial state is (|1, +1,-1> + |1, -1,-1>)/sqrt(2): cursor at path
    start with all four blocks populated. Diagonal blocks follow their
    branch's relaxation; the cross block dephases with the combined level
    widths. ``bath = None`` (or zeta = 0) gives the unitary limit.
    """
    up = BranchModel.build(layout, "U", disorder, g)
    down = BranchModel.build(layout, "D", disorder, g)
    t_grid = np.asarray(t_grid, dtype=float)
    n = layout.path_length
    maps = coordinate_map(layout)
    bases = (up.basis, down.basis)
    vu, wu = up.eig.eigenvectors, up.eig.eigenvalues
    vd, wd = down.eig.eigenvectors, down.eig.eigenvalues

    uu0 = EnergyRepDensity.from_matrix(0.5 * np.outer(vu[0], vu[0]))
    dd0 = EnergyRepDensity.from_matrix(0.5 * np.outer(vd[0], vd[0]))
    ud0 = 0.5 * np.outer(vu[0], vd[0]).astype(complex)

    unitary = bath is None or bath.zeta == 0.0
    if unitary:
        widths_u = np.zeros(n)
        widths_d = np.zeros(n)
        uu_states = [
            EnergyRepDensity(
                uu0.populations,
                uu0.coherences * np.exp(-1j * (wu[:, None] - wu[None, :]) * t),
            )
            for t in t_grid
        ]
        dd_states = [
            EnergyRepDensity(
                dd0.populations,
                dd0.coherences * np.exp(-1j * (wd[:, None] - wd[None, :]) * t),
            )
            for t in t_grid
        ]
    else:
        rates_u = transition_rates(wu, bath)
        rates_d = transition_rates(wd, bath)
        widths_u = bath.zeta * rates_u.widths
        widths_d = bath.zeta * rates_d.widths
        uu_states = relax_energy_density(wu, rates_u, bath, uu0, t_grid)
        dd_states = relax_energy_density(wd, rates_d, bath, dd0, t_grid)
    cross_decay = -1j * (wu[:, None] - wd[None, :]) - 0.5 * (
        widths_u[:, None] + widths_d[None, :]
    )

    region_sites = set(range(layout.b, layout.s + 1))
    beyond_up = up.beyond_gate_coordinates()
    beyond_down = down.beyond_gate_coordinates()
    trace_uu = np.empty(t_grid.size)
    trace_dd = np.empty(t_grid.size)
    p_beyond = np.empty(t_grid.size)
    entropy = np.empty(t_grid.size)
    fidelity = np.empty(t_grid.size)
    blocks: list[BlockDensity] | None = [] if keep_blocks else None
    for i, t in enumerate(t_grid):
        block = BlockDensity(
            uu_states[i], dd_states[i], ud0 * np.exp(cross_decay * t), up.eig, down.eig
        )
        uu_pos, dd_pos, _ = block.position_blocks()
        trace_uu[i] = block.trace_up
        trace_dd[i] = block.trace_down
        p_beyond[i] = float(
            np.real(np.diag(uu_pos))[beyond_up].sum()
            + np.real(np.diag(dd_pos))[beyond_down].sum()
        )
        entropy[i] = von_neumann_entropy(register_reduced_state(block, maps, bases))
        cond = register_reduced_state(block, maps, bases, region=region_sites)
        weight = float(np.real(np.trace(cond)))
        fidelity[i] = bell_fidelity(cond / weight) if weight > 1e-12 else np.nan
        if blocks is not None:
            blocks.append(block)
    return SwitchSeries(t_grid, trace_uu, trace_dd, p_beyond, entropy, fidelity, blocks)

"""Tight-binding chain Hamiltonians, disorder, and localization diagnostics.

Conventions used throughout the package:

* sites are labelled x = 1..s (1-based in all formulas; arrays are 0-based),
* the hopping amplitude is -1/2 on every nearest-neighbour bond,
* hbar = 1, all energies and times are dimensionless,
* eigenvalues are always reported in ascending order; eigenvector columns are
  sign-normalized so that the first significant component is positive.

On-site disorder is drawn from a zero-mean Gaussian with the Philox4x64
counter-based generator (``numpy.random.Philox``) keyed directly by the seed,
so realizations are reproducible across platforms and independent of call
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass(frozen=True)
class ChainSpec:
    """Parameters of a disordered, tilted chain: size, disorder width, tilt, seed."""

    s: int
    sigma: float = 0.0
    g: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.s < 2:
            raise ValueError(f"chain needs at least 2 sites, got s={self.s}")
        if self.sigma < 0:
            raise ValueError(f"disorder standard deviation must be >= 0, got {self.sigma}")
        if self.g < 0:
            raise ValueError(f"tilt strength must be >= 0, got {self.g}")


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random on-site energies eps_x, x = 1..s."""

    epsilons: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", np.asarray(self.epsilons, dtype=float))

    def __len__(self) -> int:
        return len(self.epsilons)

    def to_json(self) -> str:
        """JSON array of the on-site energies, for run provenance."""
        return json.dumps([float(e) for e in self.epsilons])

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        return cls(np.asarray(json.loads(text), dtype=float))


@dataclass(frozen=True)
class PotentialProfile:
    """Diagonal potential f(x), one value per site."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class HamiltonianOperator:
    """Real symmetric tridiagonal operator: diagonal plus one hopping band."""

    diagonal: np.ndarray
    hopping: np.ndarray

    def __post_init__(self) -> None:
        diag = np.asarray(self.diagonal, dtype=float)
        hop = np.asarray(self.hopping, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diagonal must be a non-empty 1-d array")
        if hop.shape != (diag.size - 1,):
            raise ValueError(
                f"hopping must have length dim-1 = {diag.size - 1}, got {hop.size}"
            )
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "hopping", hop)

    @property
    def dim(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        """Full matrix representation."""
        h = np.diag(self.diagonal)
        if self.dim > 1:
            h += np.diag(self.hopping, 1) + np.diag(self.hopping, -1)
        return h


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with the orthonormal eigenvector matrix (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.eigenvectors, dtype=float)
        if v.shape != (w.size, w.size):
            raise ValueError(f"eigenvector matrix must be {w.size}x{w.size}, got {v.shape}")
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues must be in ascending order")
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def bandwidth(self) -> float:
        """Spectral width e_max - e_min."""
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def build_free_chain(s: int) -> HamiltonianOperator:
    """Clean chain: zero on-site energies, hopping -1/2 on every bond."""
    if s < 2:
        raise ValueError(f"chain needs at least 2 sites, got s={s}")
    return HamiltonianOperator(np.zeros(s), -0.5 * np.ones(s - 1))


def free_eigensystem(s: int) -> EigenSystem:
    """Closed-form spectrum of the free chain.

    e_k = -cos(k pi / (s+1)) and v_k(x) = sqrt(2/(s+1)) sin(k pi x / (s+1)),
    k = 1..s, already ascending and with positive first components.
    """
    if s < 2:
        raise ValueError(f"chain needs at least 2 sites, got s={s}")
    k = np.arange(1, s + 1)
    x = np.arange(1, s + 1)
    evals = -np.cos(k * np.pi / (s + 1))
    evecs = np.sqrt(2.0 / (s + 1)) * np.sin(np.outer(x, k) * np.pi / (s + 1))
    return EigenSystem(evals, evecs)


def sample_disorder(spec: ChainSpec) -> DisorderRealization:
    """Draw the s on-site energies: i.i.d. normal(0, sigma^2), Philox keyed by seed."""
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    return DisorderRealization(rng.normal(0.0, spec.sigma, spec.s))


def build_linear_potential(s: int, g: float) -> PotentialProfile:
    """Uniform-force profile -g*x, x = 1..s."""
    if g < 0:
        raise ValueError(f"tilt strength must be >= 0, got {g}")
    return PotentialProfile(-g * np.arange(1, s + 1, dtype=float))


def assemble_hamiltonian(
    free: HamiltonianOperator,
    potentials: Sequence[PotentialProfile | DisorderRealization] = (),
) -> HamiltonianOperator:
    """Add diagonal potentials to a chain; the hopping band is untouched."""
    diag = free.diagonal.copy()
    for pot in potentials:
        values = pot.values if isinstance(pot, PotentialProfile) else pot.epsilons
        if len(values) != free.dim:
            raise ValueError(
                f"potential of length {len(values)} does not match chain of {free.dim} sites"
            )
        diag += values
    return HamiltonianOperator(diag, free.hopping)


def build_chain_hamiltonian(spec: ChainSpec) -> HamiltonianOperator:
    """Free chain plus the disorder and tilt of ``spec`` in one step."""
    return assemble_hamiltonian(
        build_free_chain(spec.s),
        [sample_disorder(spec), build_linear_potential(spec.s, spec.g)],
    )


def _fix_eigenvector_signs(evecs: np.ndarray) -> np.ndarray:
    # deterministic convention: first significant component of each column > 0
    for k in range(evecs.shape[1]):
        col = evecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        idx = nz[0] if nz.size else 0
        if col[idx] < 0:
            evecs[:, k] = -col
    return evecs


def diagonalize(h: HamiltonianOperator) -> EigenSystem:
    """Numerically diagonalize a symmetric tridiagonal operator.

    Eigenvalues come back ascending; eigenvector signs follow the package
    convention (first significant component positive).
    """
    if h.dim == 1:
        return EigenSystem(h.diagonal.copy(), np.ones((1, 1)))
    try:
        evals, evecs = eigh_tridiagonal(h.diagonal, h.hopping)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"tridiagonal eigensolver failed for dim={h.dim} "
            f"(diagonal range [{h.diagonal.min():.3g}, {h.diagonal.max():.3g}]): {exc}"
        ) from exc
    return EigenSystem(evals, _fix_eigenvector_signs(evecs))


def localization_length_gaussian(sigma: float) -> float:
    """Disorder-induced localization length (2 pi^2 / sigma)^(2/3)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    return (2.0 * np.pi**2 / sigma) ** (2.0 / 3.0)


def localization_length_bloch(bandwidth: float, g: float) -> float:
    """Tilt-induced localization length bandwidth/g.

    ``bandwidth`` is the spectral width of the chain *without* the tilt
    (use ``EigenSystem.bandwidth()`` of the untilted operator).
    """
    if g <= 0:
        raise ValueError(f"tilt strength must be > 0, got {g}")
    if bandwidth < 0:
        raise ValueError(f"bandwidth must be >= 0, got {bandwidth}")
    return bandwidth / g


def participation_ratio(state: np.ndarray) -> float:
    """Inverse participation ratio 1 / sum |psi_x|^4 of a normalized state.

    Equals 1 for a single-site state and dim for the uniform superposition.
    """
    psi = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state must be normalized, got ||psi|| = {norm}")
    return float(1.0 / np.sum(np.abs(psi) ** 4))

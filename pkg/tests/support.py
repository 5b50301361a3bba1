"""Independent oracles used by the tests.

Everything here is deliberately written from scratch against the model
definitions (full product-space Hamiltonian, brute-force master-equation
integration) so it shares no code path with the package implementations it
checks.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from openchain.chains import DisorderRealization
from openchain.feynman import CircuitLayout

# register basis order (sigma3(c), sigma3(p)): (-1,-1), (-1,+1), (+1,-1), (+1,+1)
P_CONTROL_UP = np.diag([0.0, 0.0, 1.0, 1.0])
P_CONTROL_DOWN = np.diag([1.0, 1.0, 0.0, 0.0])
NOT_PASSIVE = np.array(
    [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]]
)
I4 = np.eye(4)


def _hop(x: int, y: int, op: np.ndarray, s: int) -> np.ndarray:
    m = np.zeros((s, s))
    m[x - 1, y - 1] = 1.0
    return np.kron(m, op)


def full_switch_hamiltonian(
    layout: CircuitLayout, disorder: DisorderRealization, g: float
) -> np.ndarray:
    """Complete clock-and-register Hamiltonian on the 4s-dimensional product space.

    Bond operators: control-up projector into and out of the upper branch with
    the passive-qubit NOT on its middle bond; control-down projector around
    the lower branch with a bare middle bond; identity on the inertial bonds.
    The diagonal carries the disorder plus the tilt (-g x before the branch
    split, -g (x - 2) after it).
    """
    s, a, b = layout.s, layout.a, layout.b
    h = np.zeros((4 * s, 4 * s))
    bonds = [(x, x + 1, I4) for x in range(1, a)]
    bonds += [
        (a, a + 1, P_CONTROL_UP),
        (a + 1, a + 2, NOT_PASSIVE),
        (a + 2, b, P_CONTROL_UP),
        (a, a + 3, P_CONTROL_DOWN),
        (a + 3, a + 4, I4),
        (a + 4, b, P_CONTROL_DOWN),
    ]
    bonds += [(x, x + 1, I4) for x in range(b, s)]
    for x, y, op in bonds:
        h += -0.5 * (_hop(y, x, op, s) + _hop(x, y, op, s))
    x = np.arange(1, s + 1)
    tilt = np.where(x <= a + 2, -g * x, -g * (x - 2)).astype(float)
    h += np.kron(np.diag(disorder.epsilons + tilt), I4)
    return h


def full_space_state(layout: CircuitLayout, register_amplitudes: np.ndarray) -> np.ndarray:
    """Cursor at site 1 tensor a register state given in the 4-dim basis."""
    psi = np.zeros(4 * layout.s, dtype=complex)
    psi[:4] = register_amplitudes
    return psi


def evolve_full(h: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))


def full_space_observables(psi: np.ndarray, s: int) -> tuple[float, np.ndarray]:
    """(mean cursor position, 4x4 register density matrix) from a full-space state."""
    amp = psi.reshape(s, 4)
    site_prob = np.sum(np.abs(amp) ** 2, axis=1)
    mean_q = float(site_prob @ np.arange(1, s + 1))
    rho_reg = amp.T @ amp.conj()  # sum over cursor sites of |amp_x><amp_x|
    return mean_q, rho_reg


def brute_force_lindblad(
    eigenvalues: np.ndarray,
    gamma: np.ndarray,
    zeta: float,
    rho0: np.ndarray,
    t: float,
) -> np.ndarray:
    """Integrate the full master equation in the energy basis with explicit jumps.

    d rho/dt = -i[H, rho] + zeta sum_{m != n} gamma[m,n] (L rho L+ - 1/2 {L+L, rho})
    with L = |m><n|, H = diag(eigenvalues). Uses a high-order adaptive
    integrator at tight tolerance.
    """
    n = len(eigenvalues)
    ham = np.diag(np.asarray(eigenvalues, dtype=float))
    jumps = [
        (gamma[m, c], m, c) for m in range(n) for c in range(n) if m != c and gamma[m, c] != 0
    ]

    def rhs(_, flat):
        rho = flat.reshape(n, n)
        drho = -1j * (ham @ rho - rho @ ham)
        for rate, m, c in jumps:
            l_rho_ld = np.zeros_like(rho)
            l_rho_ld[m, m] = rho[c, c]
            anti = np.zeros_like(rho)
            anti[c, :] += 0.5 * rho[c, :]
            anti[:, c] += 0.5 * rho[:, c]
            drho += zeta * rate * (l_rho_ld - anti)
        return drho.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, t),
        np.asarray(rho0, dtype=complex).ravel(),
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
    )
    assert sol.success, sol.message
    return sol.y[:, -1].reshape(n, n)

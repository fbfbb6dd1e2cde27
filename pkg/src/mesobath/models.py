"""Canonical example models used by the demos, configs and tests.

Qubit convention: basis order (up, down), so
  sigma_z = diag(1, -1), raise_op |down> -> |up>, lower_op |up> -> |down>.
"""

import numpy as np

from .analytics import NonDemolitionSpec
from .model import ComponentSpec, ModelSpec, SystemSpec

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
RAISE_OP = np.array([[0, 1], [0, 0]], dtype=complex)   # |down> -> |up>
LOWER_OP = np.array([[0, 0], [1, 0]], dtype=complex)   # |up> -> |down>
PLUS_STATE = 0.5 * np.ones((2, 2), dtype=complex)      # |+><+|


def qubit_model(w=0.25, omega_r=1.0, coupling_scale=1.0, rho_s=None) -> ModelSpec:
    """Spin-1/2 system exchanging excitations with spin-1/2 components.

    Component: h = omega_r |up><up|, state w |down><down| + (1-w) |up><up|,
    coupling v = |up><down|. System: H_S = 0.5 sigma_z, G = lower_op,
    optionally rescaled.
    """
    h_r = omega_r * np.diag([1.0, 0.0]).astype(complex)
    rho_r = np.diag([1.0 - w, w]).astype(complex)
    system = SystemSpec(
        h_s=0.5 * SIGMA_Z,
        rho_s=PLUS_STATE if rho_s is None else rho_s,
        couplings=(coupling_scale * LOWER_OP,),
    )
    component = ComponentSpec(h_r=h_r, rho_r=rho_r, couplings=(RAISE_OP,))
    return ModelSpec(system=system, component=component)


def multimode_model(levels=3, energies=None, rho_s=None) -> ModelSpec:
    """Components with `levels` levels in their ground state, one coupling
    per excited level, so the equivalent bath has levels-1 oscillators."""
    if levels < 2:
        raise ValueError("need at least two component levels")
    if energies is None:
        energies = [0.0] + [1.0 + 0.3 * j for j in range(levels - 1)]
    energies = np.asarray(energies, dtype=float)
    if energies.size != levels:
        raise ValueError("one energy per level required")
    d = levels
    ground = np.zeros((d, d), dtype=complex)
    ground[0, 0] = 1.0
    vs = []
    for j in range(1, d):
        v = np.zeros((d, d), dtype=complex)
        v[j, 0] = 1.0  # |j><0|
        vs.append(v)
    gs = []
    for j in range(1, d):
        g = LOWER_OP * (0.8 / j) if j % 2 else 0.4 * SIGMA_X
        gs.append(g)
    system = SystemSpec(
        h_s=0.5 * SIGMA_Z,
        rho_s=PLUS_STATE if rho_s is None else rho_s,
        couplings=tuple(gs),
    )
    component = ComponentSpec(
        h_r=np.diag(energies).astype(complex), rho_r=ground, couplings=tuple(vs)
    )
    return ModelSpec(system=system, component=component)


def braun_model(omega_f=1.0, gamma_scale=0.35, rho_s=None) -> ModelSpec:
    """Two uncoupled qubits talking to a common two-level bath component.

    G = gamma_scale (sigma_x (x) 1 + 1 (x) sigma_x), v = |ground><excited|,
    component state pinned to its ground level, so the equivalent bath is
    a single oscillator at omega_f coupled through a + a^dag.
    """
    eye2 = np.eye(2, dtype=complex)
    h_s = 0.5 * (np.kron(SIGMA_Z, eye2) + np.kron(eye2, SIGMA_Z))
    g = gamma_scale * (np.kron(SIGMA_X, eye2) + np.kron(eye2, SIGMA_X))
    if rho_s is None:
        down = np.diag([0.0, 1.0]).astype(complex)  # |down><down|
        rho_s = np.kron(down, down)
    h_r = np.diag([0.0, omega_f]).astype(complex)
    rho_r = np.diag([1.0, 0.0]).astype(complex)
    v = np.zeros((2, 2), dtype=complex)
    v[0, 1] = 1.0  # |ground><excited|
    system = SystemSpec(h_s=h_s, rho_s=rho_s, couplings=(g,))
    component = ComponentSpec(h_r=h_r, rho_r=rho_r, couplings=(v,))
    return ModelSpec(system=system, component=component)


def nondemolition_model(e=(0.0, 1.0), g=(0.3, -0.3), w=0.5, omega_r=1.0,
                        rho_s=None):
    """Dephasing fixture: diagonal system operators, sigma_x component
    coupling. Returns (NonDemolitionSpec, ModelSpec)."""
    component = ComponentSpec(
        h_r=np.diag([omega_r, 0.0]).astype(complex),
        rho_r=np.diag([1.0 - w, w]).astype(complex),
        couplings=(SIGMA_X,),
    )
    nd = NonDemolitionSpec(energies=np.asarray(e, dtype=float),
                           weights=np.asarray(g, dtype=complex),
                           component=component)
    dim = len(e)
    if rho_s is None:
        rho_s = np.full((dim, dim), 1.0 / dim, dtype=complex)
    return nd, nd.to_model(rho_s)


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = z @ z.conj().T
    return rho / np.trace(rho)


def random_model(rng, d_s=2, d_r=2, n_couplings=1, coupling_scale=1.0,
                 rank=None, zero_diagonal=False, hermitian_v=False) -> ModelSpec:
    """Random stationary, centralized model for property tests.

    The component Hamiltonian and state share a random eigenbasis by
    construction; couplings are complex Gaussian, optionally Hermitian
    or with zero diagonal in that eigenbasis, and always centralized.
    """
    basis = random_unitary(rng, d_r)
    energies = np.sort(rng.uniform(0.0, 2.0, size=d_r))
    rank = d_r if rank is None else rank
    pops = np.zeros(d_r)
    pops[:rank] = rng.dirichlet(np.ones(rank))
    pops = pops[rng.permutation(d_r)] if rank == d_r else pops
    h_r = basis @ np.diag(energies).astype(complex) @ basis.conj().T
    rho_r = basis @ np.diag(pops).astype(complex) @ basis.conj().T

    vs = []
    for _ in range(n_couplings):
        vt = rng.standard_normal((d_r, d_r)) + 1j * rng.standard_normal((d_r, d_r))
        if hermitian_v:
            vt = 0.5 * (vt + vt.conj().T)
        if zero_diagonal:
            np.fill_diagonal(vt, 0.0)
        v = coupling_scale * (basis @ vt @ basis.conj().T)
        v = v - np.trace(rho_r @ v) * np.eye(d_r)
        vs.append(v)

    gs = []
    for _ in range(n_couplings):
        g = rng.standard_normal((d_s, d_s)) + 1j * rng.standard_normal((d_s, d_s))
        gs.append(coupling_scale * g)

    h_s = rng.standard_normal((d_s, d_s)) + 1j * rng.standard_normal((d_s, d_s))
    h_s = 0.5 * (h_s + h_s.conj().T)
    system = SystemSpec(h_s=h_s, rho_s=random_density(rng, d_s), couplings=tuple(gs))
    component = ComponentSpec(h_r=h_r, rho_r=rho_r, couplings=tuple(vs))
    return ModelSpec(system=system, component=component)

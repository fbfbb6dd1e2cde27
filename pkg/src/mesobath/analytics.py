"""Closed forms for dephasing-type models and derived observables.

When the system Hamiltonian and its coupling operator are diagonal in
the same basis, populations are frozen and each coherence picks up an
explicit product of per-oscillator decay factors. The product runs over
the off-diagonal (k != l) modes of the equivalent bath; couplings with
diagonal matrix elements in the component eigenbasis fall outside this
closed form and should be handled by the simulators instead.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .fluctuation import build_mode_set
from .model import ComponentSpec, ModelSpec, SystemSpec, spectral_decompose
from .numerics import negativity
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .trajectory import Trajectory


@dataclass(frozen=True)
class NonDemolitionSpec:
    """System levels e_j, diagonal coupling weights g_j, one component.

    The system Hamiltonian and coupling are diag(e) and diag(g) in the
    same basis by construction; the component must carry exactly one
    coupling operator.
    """

    energies: np.ndarray  # e_j, real
    weights: np.ndarray   # g_j, may be complex
    component: ComponentSpec

    def __post_init__(self):
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=complex))
        if self.energies.shape != self.weights.shape or self.energies.ndim != 1:
            raise DimensionMismatchError("energies and weights must be equal-length vectors")
        if len(self.component.couplings) != 1:
            raise DimensionMismatchError("non-demolition analysis needs exactly one coupling")

    @property
    def levels(self) -> int:
        return self.energies.size

    def to_model(self, rho_s) -> ModelSpec:
        system = SystemSpec(
            h_s=np.diag(self.energies.astype(complex)),
            rho_s=rho_s,
            couplings=(np.diag(self.weights),),
        )
        return ModelSpec(system=system, component=self.component)


def _mode_data(nd: NonDemolitionSpec, tol: Tolerances):
    spectrum = spectral_decompose(nd.component, tol)
    vt = spectrum.transform(nd.component.couplings[0])
    modes = build_mode_set(spectrum, nd.component.couplings, tol.pop, tol.mat)
    out = []
    for k, l in modes:
        if k == l:
            continue
        out.append((
            float(spectrum.populations[k]),
            float(spectrum.energies[l] - spectrum.energies[k]),
            vt[k, l],
            vt[l, k],
        ))
    return spectrum, vt, out


def decoherence_modulus(nd: NonDemolitionSpec, m: int, n: int, t, tol: Tolerances = None):
    """|D_mn(t)|: modulus of the coherence damping factor between system
    levels m and n.

    Product over off-diagonal modes (k, l) of
      exp[-2 p_k sin^2(t w/2)/w^2 |conj(g_n - g_m) conj(v_kl)
                                     + (g_n - g_m) v_lk|^2],
    with sin^2(t w/2)/w^2 -> t^2/4 at w = 0, handled via sinc so
    degenerate frequencies never divide by zero. Accepts scalar or array t.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if m == n:
        raise ValueError("coherence indices must differ")
    t = np.asarray(t, dtype=float)
    _, _, modes = _mode_data(nd, tol)
    delta = nd.weights[n] - nd.weights[m]
    exponent = np.zeros_like(t)
    for pk, omega, v_kl, v_lk in modes:
        amp = abs(np.conj(delta) * np.conj(v_kl) + delta * v_lk) ** 2
        # sin(w t / 2) / w = (t / 2) sinc(w t / (2 pi)), exact at w = 0
        s = (t / 2.0) * np.sinc(omega * t / (2.0 * np.pi))
        exponent += 2.0 * pk * amp * s ** 2
    result = np.exp(-exponent)
    return float(result) if result.ndim == 0 else result


def short_time_gaussian(nd: NonDemolitionSpec, m: int, n: int, t, tol: Tolerances = None):
    """Initial Gaussian decay exp[-2 (g_m - g_n)^2 t^2 sum_kl |v_kl|^2 p_k].

    Valid for real weights and a Hermitian coupling, on times well below
    the shortest transition period; |g_m - g_n|^2 is used so complex
    input degrades gracefully.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if m == n:
        raise ValueError("coherence indices must differ")
    t = np.asarray(t, dtype=float)
    spectrum = spectral_decompose(nd.component, tol)
    vt = spectrum.transform(nd.component.couplings[0])
    strength = float(np.sum(spectrum.populations[:, None] * np.abs(vt) ** 2))
    delta2 = abs(nd.weights[m] - nd.weights[n]) ** 2
    result = np.exp(-2.0 * delta2 * strength * t ** 2)
    return float(result) if result.ndim == 0 else result


def minimum_transition_period(nd: NonDemolitionSpec, tol: Tolerances = None) -> float:
    """min over off-diagonal modes of 1/|omega|, the Gaussian's horizon."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    _, _, modes = _mode_data(nd, tol)
    freqs = [abs(om) for _, om, _, _ in modes if om != 0.0]
    if not freqs:
        return np.inf
    return 1.0 / max(freqs)


def population_drift(traj: Trajectory, basis) -> float:
    """Largest change of any diagonal element <psi_j|rho(t)|psi_j> over time."""
    basis = np.asarray(basis, dtype=complex)
    if basis.shape[0] != traj.dim:
        raise DimensionMismatchError("basis dimension does not match trajectory")
    pops = np.array([
        np.real(np.einsum("ij,jk,ki->i", basis.conj().T, s, basis))
        for s in traj.states
    ])
    return float(np.max(np.abs(pops - pops[0])))


def entanglement_trajectory(traj: Trajectory, d_a: int, d_b: int):
    """Negativity across the (d_a, d_b) bipartition at every grid time."""
    if d_a * d_b != traj.dim:
        raise DimensionMismatchError(
            f"bipartition {d_a}x{d_b} does not match state dimension {traj.dim}"
        )
    return [(float(t), negativity(s, d_a, d_b)) for t, s in zip(traj.times, traj.states)]

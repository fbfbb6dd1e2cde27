"""The equivalent oscillator bath: construction and simulation.

One oscillator per ordered pair (k, l) of component eigenlevels with a
populated source level and a nonzero coupling matrix element in either
direction. The oscillator (k, l) has frequency E_l - E_k and enters the
system coupling with amplitudes sqrt(p_k) * v_kl (annihilation) and
sqrt(p_k) * v_lk (creation). All oscillators start in their ground
state; the Fock space is truncated per mode and, in adaptive runs,
cutoffs are doubled until the reduced dynamics stops moving.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionOverflowError
from .model import ComponentSpectrum, ModelSpec, spectral_decompose
from .numerics import (
    KronTerm,
    dense_generator,
    krylov_step,
    reduced_state_from_vector,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .trajectory import Trajectory, max_trace_distance

DENSE_DIM_LIMIT = 1024


def destroy(levels: int) -> np.ndarray:
    """Truncated annihilation operator on `levels` Fock states."""
    a = np.zeros((levels, levels), dtype=complex)
    for n in range(1, levels):
        a[n - 1, n] = np.sqrt(n)
    return a


def build_mode_set(spectrum: ComponentSpectrum, couplings, tol_pop=None, tol_mat=None):
    """Ordered pairs (k, l) with p_k above threshold and some coupling
    matrix element v_kl or v_lk above threshold, in lexicographic order.
    Zero-frequency pairs (including diagonal ones) are kept."""
    tol_pop = DEFAULT_TOLERANCES.pop if tol_pop is None else tol_pop
    tol_mat = DEFAULT_TOLERANCES.mat if tol_mat is None else tol_mat
    mats = [spectrum.transform(v) for v in couplings]
    d = spectrum.dim
    modes = []
    for k in range(d):
        if spectrum.populations[k] <= tol_pop:
            continue
        for l in range(d):
            if any(abs(m[k, l]) > tol_mat or abs(m[l, k]) > tol_mat for m in mats):
                modes.append((k, l))
    return modes


@dataclass(frozen=True)
class FluctuationModel:
    """Mode list, frequencies and per-coupling amplitude vectors.

    For coupling q and mode (k, l):
      z[q, mode] = sqrt(p_k) * conj(v_kl)   (annihilation amplitude is conj(z))
      w[q, mode] = sqrt(p_k) * v_lk         (creation amplitude)
    """

    modes: tuple
    frequencies: np.ndarray
    z: np.ndarray  # shape (Q, n_modes)
    w: np.ndarray
    spectrum: ComponentSpectrum

    @property
    def n_modes(self) -> int:
        return len(self.modes)


def build_fluctuation_model(spec: ModelSpec, tol: Tolerances = None) -> FluctuationModel:
    tol = DEFAULT_TOLERANCES if tol is None else tol
    spectrum = spectral_decompose(spec.component, tol)
    couplings = spec.component.couplings
    modes = build_mode_set(spectrum, couplings, tol.pop, tol.mat)
    nq = len(couplings)
    freqs = np.array(
        [spectrum.energies[l] - spectrum.energies[k] for k, l in modes], dtype=float
    )
    z = np.zeros((nq, len(modes)), dtype=complex)
    w = np.zeros((nq, len(modes)), dtype=complex)
    mats = [spectrum.transform(v) for v in couplings]
    for i, (k, l) in enumerate(modes):
        root = np.sqrt(spectrum.populations[k])
        for q in range(nq):
            z[q, i] = root * np.conj(mats[q][k, l])
            w[q, i] = root * mats[q][l, k]
    return FluctuationModel(tuple(modes), freqs, z, w, spectrum)


@dataclass(frozen=True)
class FockConfig:
    """Per-mode occupation cutoffs and the adaptive-refinement policy."""

    cutoff: object = 4  # int shared by all modes, or a sequence per mode
    adaptive: bool = True
    adapt_tol: float = 1e-6
    dim_cap: int = 2 ** 20

    def resolve_cutoffs(self, n_modes: int) -> np.ndarray:
        if np.isscalar(self.cutoff):
            cuts = np.full(n_modes, int(self.cutoff), dtype=int)
        else:
            cuts = np.asarray([int(c) for c in self.cutoff], dtype=int)
            if cuts.size != n_modes:
                raise ValueError(
                    f"{cuts.size} cutoffs given for {n_modes} modes"
                )
        if np.any(cuts < 1):
            raise ValueError("every cutoff must be >= 1")
        return cuts


def _fock_dims(d_s, cutoffs):
    return (int(d_s),) + tuple(int(c) + 1 for c in cutoffs)


def build_fock_hamiltonian(spec: ModelSpec, model: FluctuationModel,
                           fock: FockConfig, cutoffs=None):
    """KronTerm list for the system + truncated oscillator bath.

    H = H_S + sum_i omega_i a_i^dag a_i
          + sum_q (G_q (x) X_q + G_q^dag (x) X_q^dag),
    with each mode truncated at its cutoff.
    """
    cutoffs = fock.resolve_cutoffs(model.n_modes) if cutoffs is None else cutoffs
    dims = _fock_dims(spec.system.dim, cutoffs)
    total = int(np.prod(dims, dtype=object))
    if total > fock.dim_cap:
        raise DimensionOverflowError(total, fock.dim_cap, "reduce mode cutoffs")

    terms = [KronTerm(dims, ((0, spec.system.h_s),))]
    lowering = [destroy(c + 1) for c in cutoffs]
    for i, om in enumerate(model.frequencies):
        if om != 0.0:
            num = lowering[i].conj().T @ lowering[i]
            terms.append(KronTerm(dims, ((i + 1, om * num),)))
    for q, g in enumerate(spec.system.couplings):
        for i in range(model.n_modes):
            ann = np.conj(model.z[q, i])
            cre = model.w[q, i]
            if ann == 0.0 and cre == 0.0:
                continue
            local = ann * lowering[i] + cre * lowering[i].conj().T
            terms.append(KronTerm(dims, ((0, g), (i + 1, local))))
            terms.append(KronTerm(dims, ((0, g.conj().T), (i + 1, local.conj().T))))
    return terms


def _pure_branches(rho, tol=1e-12):
    """Eigendecompose a density matrix into (weight, vector) branches."""
    evals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return [(float(p), vecs[:, i].copy()) for i, p in enumerate(evals) if p > tol]


def propagate_branches(terms, dims, branches, times, krylov_tol, dense_limit=DENSE_DIM_LIMIT):
    """Weighted sum of reduced states over pure initial branches.

    Uses one shared eigendecomposition for all branches and times when
    the total dimension is small, Lanczos stepping otherwise. The
    reduction order over branches is fixed, so results are reproducible.
    """
    total = int(np.prod(dims, dtype=object))
    d_s = dims[0]
    states = [np.zeros((d_s, d_s), dtype=complex) for _ in times]
    use_dense = total <= dense_limit
    if use_dense:
        h = dense_generator(terms)
        evals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    for weight, psi0 in branches:
        if use_dense:
            coeff = vecs.conj().T @ psi0
            for i, t in enumerate(times):
                psi = vecs @ (np.exp(-1j * t * evals) * coeff)
                states[i] += weight * reduced_state_from_vector(psi, dims, [0])
        else:
            psi = psi0.astype(complex)
            states[0] += weight * reduced_state_from_vector(psi, dims, [0])
            for i in range(1, len(times)):
                psi = krylov_step(terms, psi, times[i] - times[i - 1], tol=krylov_tol)
                states[i] += weight * reduced_state_from_vector(psi, dims, [0])
    return states


def _bosonic_run(spec, model, fock, cutoffs, times, tol):
    terms = build_fock_hamiltonian(spec, model, fock, cutoffs)
    dims = _fock_dims(spec.system.dim, cutoffs)
    vacuum = np.zeros(int(np.prod(dims[1:], dtype=object)), dtype=complex)
    vacuum[0] = 1.0
    branches = [
        (w, np.kron(v, vacuum)) for w, v in _pure_branches(spec.system.rho_s)
    ]
    states = propagate_branches(terms, dims, branches, times, tol.krylov)
    return Trajectory(times=np.asarray(times, dtype=float), states=states)


def reduce_dynamics_bosonic(spec: ModelSpec, fock: FockConfig, times,
                            tol: Tolerances = None) -> Trajectory:
    """Reduced system dynamics induced by the oscillator bath, starting
    from rho_S tensor the multimode ground state.

    With `fock.adaptive`, all cutoffs are doubled until the trajectory
    moves by at most adapt_tol in max-over-time trace distance; the
    final cutoffs and residual land in the provenance.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    times = np.asarray(times, dtype=float)
    model = build_fluctuation_model(spec, tol)
    base = {"simulator": "bosonic", "n_modes": model.n_modes,
            "modes": [list(m) for m in model.modes]}

    if model.n_modes == 0:
        traj = _bosonic_run(spec, model, fock, np.zeros(0, dtype=int), times, tol)
        traj.provenance = dict(base, cutoffs=[], adaptive_residual=0.0)
        return traj

    cutoffs = fock.resolve_cutoffs(model.n_modes)
    traj = _bosonic_run(spec, model, fock, cutoffs, times, tol)
    if not fock.adaptive:
        traj.provenance = dict(base, cutoffs=cutoffs.tolist(), adaptive_residual=None)
        return traj

    residual = np.inf
    while True:
        refined = cutoffs * 2
        try:
            finer = _bosonic_run(spec, model, fock, refined, times, tol)
        except DimensionOverflowError as exc:
            raise DimensionOverflowError(
                exc.dim, exc.cap,
                f"adaptive refinement hit the cap at residual {residual:.3e}",
            ) from exc
        residual = max_trace_distance(finer, traj)
        traj, cutoffs = finer, refined
        if residual <= fock.adapt_tol:
            break
    traj.provenance = dict(base, cutoffs=cutoffs.tolist(), adaptive_residual=residual)
    return traj


@dataclass(frozen=True)
class ThermalModes:
    """Alternative bath realization with one thermal mode per level pair.

    Pairs are index-ordered (k < l, energies ascending); `beta_omega`
    stores ln(p_l / p_k), whose sign says which level is more populated,
    and `mode_frequencies` carry the signed frequency of the realized
    oscillator (the one that makes its occupancy nonnegative).
    """

    pairs: tuple
    frequencies: np.ndarray       # E_l - E_k per pair
    beta_omega: np.ndarray        # ln(p_l / p_k), +-inf when one side is empty
    covariances: np.ndarray       # (p_k + p_l) / |p_k - p_l| >= 1
    couplings: np.ndarray         # g with g^2 = |p_k - p_l| |v_kl|^2
    occupancies: np.ndarray       # min(p_k, p_l) / |p_k - p_l|
    mode_frequencies: np.ndarray  # sign(p_k - p_l) * (E_l - E_k)


@dataclass(frozen=True)
class NotRepresentable:
    """Reason record when no thermal realization exists."""

    reason: str  # nonzero_diagonal | phases_not_opposite | not_hermitian | equal_populations
    detail: str = ""


def thermal_representation(spectrum: ComponentSpectrum, v, tol: Tolerances = None):
    """Thermal-mode realization of the bath for a single Hermitian,
    zero-diagonal coupling with pairwise distinct populations.

    Returns ThermalModes on success, otherwise a NotRepresentable record
    with a machine-readable reason.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    vt = spectrum.transform(v)
    d = spectrum.dim
    scale = max(1.0, float(np.max(np.abs(vt))))

    diag = np.max(np.abs(np.diag(vt)))
    if diag > tol.mat * scale:
        return NotRepresentable("nonzero_diagonal", f"max diagonal element {diag:.3e}")

    for k in range(d):
        for l in range(k + 1, d):
            prod = vt[k, l] * vt[l, k]
            if abs(prod.imag) > tol.mat * scale ** 2:
                return NotRepresentable(
                    "phases_not_opposite",
                    f"v_{k}{l} v_{l}{k} = {prod:.3e} is not real",
                )
    defect = float(np.max(np.abs(vt - vt.conj().T)))
    if defect > tol.herm * scale:
        return NotRepresentable("not_hermitian", f"max|v - v^dag| = {defect:.3e}")

    pops = spectrum.populations
    energies = spectrum.energies
    pairs, freqs, betas, covs, gs, nbars, mode_freqs = [], [], [], [], [], [], []
    for k in range(d):
        for l in range(k + 1, d):
            if abs(vt[k, l]) <= tol.mat * scale:
                continue
            pk, pl = float(pops[k]), float(pops[l])
            if pk + pl <= tol.pop:
                continue  # pair carries no weight in the two-point function
            if abs(pk - pl) <= tol.pop:
                return NotRepresentable(
                    "equal_populations",
                    f"levels {k},{l} have populations {pk:.6g} and {pl:.6g}",
                )
            pairs.append((k, l))
            freqs.append(energies[l] - energies[k])
            if pk > tol.pop and pl > tol.pop:
                betas.append(np.log(pl / pk))
            else:
                betas.append(np.inf if pk <= tol.pop else -np.inf)
            covs.append((pk + pl) / abs(pk - pl))
            gs.append(np.sqrt(abs(pk - pl)) * abs(vt[k, l]))
            nbars.append(min(pk, pl) / abs(pk - pl))
            mode_freqs.append(np.sign(pk - pl) * (energies[l] - energies[k]))
    return ThermalModes(
        pairs=tuple(pairs),
        frequencies=np.array(freqs, dtype=float),
        beta_omega=np.array(betas, dtype=float),
        covariances=np.array(covs, dtype=float),
        couplings=np.array(gs, dtype=float),
        occupancies=np.array(nbars, dtype=float),
        mode_frequencies=np.array(mode_freqs, dtype=float),
    )


def thermal_two_point(modes: ThermalModes, tau: float) -> complex:
    """Analytic stationary two-point function of the thermal realization.

    Each mode contributes g^2 (nbar e^{i w tau} + (nbar + 1) e^{-i w tau})
    with its signed realized frequency w.
    """
    g2 = modes.couplings ** 2
    nb = modes.occupancies
    w = modes.mode_frequencies
    vals = g2 * (nb * np.exp(1j * w * tau) + (nb + 1.0) * np.exp(-1j * w * tau))
    return complex(np.sum(vals))

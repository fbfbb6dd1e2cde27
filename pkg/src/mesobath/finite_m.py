"""Exact finite-M dynamics on the full system + M-component space.

The reservoir initial state is a product of M identical mixed states;
its eigendecomposition is a sum over product configurations of
component eigenvectors. The Hamiltonian and the partial trace are
invariant under permutations of the reservoir sites, so configurations
sharing a multiset of eigenlabels give identical reduced dynamics: the
exact sum runs over multisets with multinomial weights, one
representative configuration each. That turns d_r^M branches into a
polynomial-in-M count.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionOverflowError, GridMismatchError
from .model import ModelSpec, spectral_decompose
from .numerics import KronTerm, multinomial_weight
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .trajectory import ErrorTable, Trajectory, max_trace_distance
from .fluctuation import propagate_branches

SCALINGS = ("mesoscopic", "meanfield", "none")
PROPAGATIONS = ("dense", "krylov", "auto")
BRANCH_POLICIES = ("exact_multiset", "monte_carlo")


@dataclass(frozen=True)
class FiniteMConfig:
    m: int
    scaling: str = "mesoscopic"
    propagation: str = "auto"
    branch_policy: str = "exact_multiset"
    seed: int = 0
    samples: int = 0
    dim_cap: int = 2 ** 20

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("M must be >= 1")
        if self.scaling not in SCALINGS:
            raise ValueError(f"scaling must be one of {SCALINGS}")
        if self.propagation not in PROPAGATIONS:
            raise ValueError(f"propagation must be one of {PROPAGATIONS}")
        if self.branch_policy not in BRANCH_POLICIES:
            raise ValueError(f"branch_policy must be one of {BRANCH_POLICIES}")
        if self.branch_policy == "monte_carlo" and self.samples < 1:
            raise ValueError("monte_carlo branch policy needs samples >= 1")


def coupling_prefactor(scaling: str, m: int) -> float:
    if scaling == "mesoscopic":
        return 1.0 / np.sqrt(m)
    if scaling == "meanfield":
        return 1.0 / m
    return 1.0


def _layout(spec: ModelSpec, m: int):
    return (spec.system.dim,) + (spec.component.dim,) * m


def build_hamiltonian_terms(spec: ModelSpec, cfg: FiniteMConfig):
    """KronTerm list for H_S + sum_m h^[m] + s * sum_q,m (G_q v_q^[m] + h.c.)."""
    dims = _layout(spec, cfg.m)
    total = int(np.prod(dims, dtype=object))
    if total > cfg.dim_cap:
        raise DimensionOverflowError(total, cfg.dim_cap, "reduce M")
    s = coupling_prefactor(cfg.scaling, cfg.m)
    terms = [KronTerm(dims, ((0, spec.system.h_s),))]
    for site in range(1, cfg.m + 1):
        terms.append(KronTerm(dims, ((site, spec.component.h_r),)))
    for g, v in zip(spec.system.couplings, spec.component.couplings):
        for site in range(1, cfg.m + 1):
            terms.append(KronTerm(dims, ((0, g), (site, v)), scalar=s))
            terms.append(KronTerm(dims, ((0, g.conj().T), (site, v.conj().T)), scalar=s))
    return terms


def _compositions(total, parts):
    """All count vectors of length `parts` summing to `total`, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _branch_weights_exact(pops, m):
    """(counts, weight) per multiset of component eigenlabels."""
    out = []
    for counts in _compositions(m, pops.size):
        w = float(multinomial_weight(counts)) * float(np.prod(pops ** np.array(counts)))
        if w > 0.0:
            out.append((counts, w))
    return out


def _branch_weights_monte_carlo(pops, m, seed, samples):
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(m, pops / pops.sum(), size=samples)
    tally = {}
    for row in draws:
        key = tuple(int(c) for c in row)
        tally[key] = tally.get(key, 0) + 1
    return [(counts, tally[counts] / samples) for counts in sorted(tally)]


def _reservoir_vector(spectrum, counts):
    columns = []
    for level, count in enumerate(counts):
        columns.extend([spectrum.basis[:, level]] * count)
    return reduce(np.kron, columns)


def branch_weights(spectrum, cfg: FiniteMConfig):
    if cfg.branch_policy == "monte_carlo":
        return _branch_weights_monte_carlo(
            spectrum.populations, cfg.m, cfg.seed, cfg.samples
        )
    return _branch_weights_exact(spectrum.populations, cfg.m)


def reduce_dynamics_finite(spec: ModelSpec, cfg: FiniteMConfig, times,
                           tol: Tolerances = None) -> Trajectory:
    """tr_R( e^{-itH} (rho_S (x) rho_R^{(x)M}) e^{itH} ) on the grid."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    times = np.asarray(times, dtype=float)
    terms = build_hamiltonian_terms(spec, cfg)
    dims = _layout(spec, cfg.m)
    spectrum = spectral_decompose(spec.component, tol)

    sys_branches = np.linalg.eigh(
        0.5 * (spec.system.rho_s + spec.system.rho_s.conj().T)
    )
    branches = []
    for counts, weight in branch_weights(spectrum, cfg):
        res_vec = _reservoir_vector(spectrum, counts)
        for lam, col in zip(sys_branches[0], sys_branches[1].T):
            if lam <= 1e-12:
                continue
            branches.append((weight * float(lam), np.kron(col, res_vec)))

    if cfg.propagation == "dense":
        dense_limit = np.inf
    elif cfg.propagation == "krylov":
        dense_limit = 0
    else:
        dense_limit = 1024
    states = propagate_branches(terms, dims, branches, times, tol.krylov,
                                dense_limit=dense_limit)
    prov = {
        "simulator": "finite_m",
        "m": cfg.m,
        "scaling": cfg.scaling,
        "propagation": cfg.propagation,
        "branch_policy": cfg.branch_policy,
        "branches": len(branches),
    }
    if cfg.branch_policy == "monte_carlo":
        prov["seed"] = cfg.seed
        prov["samples"] = cfg.samples
    return Trajectory(times=times, states=states, provenance=prov)


def convergence_scan(spec: ModelSpec, ms, times, reference: Trajectory,
                     scaling="mesoscopic", propagation="auto",
                     branch_policy="exact_multiset", seed=0, samples=0,
                     dim_cap=2 ** 20, tol: Tolerances = None) -> ErrorTable:
    """Max-over-time trace distance to a reference trajectory per M,
    with the d(M)/d(2M) ratio wherever both sizes are in the list."""
    times = np.asarray(times, dtype=float)
    if reference.times.size != times.size or not np.allclose(
        reference.times, times, rtol=0.0, atol=1e-12
    ):
        raise GridMismatchError("reference trajectory uses a different grid")
    ms = [int(m) for m in ms]
    distances = {}
    for m in ms:
        cfg = FiniteMConfig(m=m, scaling=scaling, propagation=propagation,
                            branch_policy=branch_policy, seed=seed,
                            samples=samples, dim_cap=dim_cap)
        traj = reduce_dynamics_finite(spec, cfg, times, tol)
        distances[m] = max_trace_distance(traj, reference)
    table = ErrorTable()
    for m in ms:
        ratio = None
        if 2 * m in distances and distances[2 * m] > 0.0:
            ratio = distances[m] / distances[2 * m]
        table.rows.append({"M": m, "distance": distances[m], "ratio_to_2M": ratio})
    return table

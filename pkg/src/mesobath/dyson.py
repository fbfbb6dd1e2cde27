"""Interaction-picture series propagation of the limiting dynamics.

The reduced dynamics in the large-reservoir limit has a norm-convergent
expansion in nested commutators of the interaction, with every
reservoir trace replaced by a Gaussian pairing sum of the stationary
two-point function. This module truncates that expansion at a given
order and integrates each term over the ordered time simplex with a
tensor Gauss-Legendre rule, as an independent cross-check against the
oscillator-bath simulator. Odd orders vanish identically (odd Gaussian
moments), so only even orders are evaluated.

A rigorous majorant for the discarded tail is available as
`truncation_bound`; trajectory points where the bound exceeds the
validity threshold are flagged in the provenance rather than suppressed.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .correlations import pairings
from .errors import OrderTooHighError, QuadratureUnderResolvedError
from .model import ModelSpec, spectral_decompose
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .trajectory import Trajectory

NODE_CHUNK = 1 << 16


@dataclass(frozen=True)
class DysonConfig:
    order: int = 4
    quadrature_points: int = 24
    estimate_quadrature: bool = True
    validity_threshold: float = 0.1

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.order > 6:
            raise OrderTooHighError(f"order {self.order} exceeds the cost guard of 6")
        if self.quadrature_points < 4:
            raise ValueError("quadrature_points must be >= 4")


def truncation_bound(gmax: float, vmax: float, q: int, t: float, order: int) -> float:
    """Tail of the majorant series sum_n (2Q)^n (2 e gmax vmax t)^n n^(n/2) / n!
    over n > order, summed until terms stop mattering.

    The series converges for every argument (ratio test); a guard
    asserts the terms are eventually decreasing before truncating.
    """
    if min(gmax, vmax, t) < 0 or q < 1:
        raise ValueError("arguments must be nonnegative, q >= 1")
    x = 2.0 * q * 2.0 * np.e * gmax * vmax * t
    if x == 0.0:
        return 0.0
    total = 0.0
    prev = np.inf
    n = order + 1
    # log-space running factorial to avoid overflow
    logfact = sum(np.log(k) for k in range(1, n))
    while True:
        logfact += np.log(n) if n > 0 else 0.0
        log_term = n * np.log(x) + 0.5 * n * np.log(n) - logfact
        term = float(np.exp(log_term))
        total += term
        if term < 1e-16 * max(total, 1e-300):
            assert term <= prev, "majorant terms stopped decreasing"
            return total
        prev = term
        n += 1
        if n > 100000:
            raise AssertionError("majorant series did not converge")


def _gauss_legendre_unit(p):
    x, w = np.polynomial.legendre.leggauss(p)
    return 0.5 * (x + 1.0), 0.5 * w


def _simplex_nodes(t, n, p):
    """Map a tensor grid on [0,1]^n to the simplex t >= t_1 >= ... >= t_n >= 0.

    Uses the nested substitution t_1 = t u_1, t_j = t_{j-1} u_j with
    polynomial Jacobian t^n prod_j u_j^(n-j).
    """
    x, w = _gauss_legendre_unit(p)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    wgrids = np.meshgrid(*([w] * n), indexing="ij")
    u = np.stack([g.reshape(-1) for g in grids])  # (n, N)
    weight = np.prod(np.stack([g.reshape(-1) for g in wgrids]), axis=0)
    ts = np.empty_like(u)
    ts[0] = t * u[0]
    for j in range(1, n):
        ts[j] = ts[j - 1] * u[j]
    jac = np.full(u.shape[1], float(t) ** n)
    for j in range(n - 1):
        jac *= u[j] ** (n - 1 - j)
    return ts, weight * jac


def _kernel_coefficients(spectrum, couplings):
    """For each (dag_a, q_a, dag_b, q_b): amplitudes and frequencies with
    c(tau) = sum_r amp_r e^{i tau freq_r}."""
    mats = [spectrum.transform(v) for v in couplings]
    dags = [m.conj().T for m in mats]
    pops = spectrum.populations
    energies = spectrum.energies
    freq = energies[:, None] - energies[None, :]
    table = {}
    nq = len(couplings)
    for dag_a, qa, dag_b, qb in itertools.product((False, True), range(nq),
                                                  (False, True), range(nq)):
        ma = dags[qa] if dag_a else mats[qa]
        mb = dags[qb] if dag_b else mats[qb]
        coeff = pops[:, None] * ma * mb.T
        mask = np.abs(coeff) > 0.0
        table[(dag_a, qa, dag_b, qb)] = (coeff[mask], freq[mask])
    return table


def _commutator_sides(n):
    """For every subset S of positions: (left tuple ascending, right tuple
    descending, sign (-1)^(n-|S|)). The nested commutator
    [X_1,[...,[X_n, rho]...]] expands into sum over S of
    sign * (prod_{S asc} X) rho (prod_{S^c desc} X)."""
    sides = []
    for bits in range(1 << n):
        left = tuple(j for j in range(n) if bits >> j & 1)
        right = tuple(j for j in reversed(range(n)) if not bits >> j & 1)
        sides.append((left, right, (-1) ** (n - len(left))))
    return sides


def _order_term(spec, kernel_table, n, t, p, assignments, sides,
                pairing_list, hs_eig):
    """One even-order simplex integral, chunked over quadrature nodes."""
    d_s = spec.system.dim
    evals_s, vecs_s = hs_eig
    g_eig = [vecs_s.conj().T @ g @ vecs_s for g in spec.system.couplings]
    g_eig_dag = [g.conj().T for g in g_eig]
    rho_eig = vecs_s.conj().T @ spec.system.rho_s @ vecs_s

    nodes, weights = _simplex_nodes(t, n, p)
    total = np.zeros((d_s, d_s), dtype=complex)
    comp = np.zeros_like(total)  # compensated accumulation across chunks

    for start in range(0, weights.size, NODE_CHUNK):
        sl = slice(start, start + NODE_CHUNK)
        ts = nodes[:, sl]
        wt = weights[sl]
        nn = wt.size

        # interaction-picture system couplings per position and dagger flag
        phases = np.exp(1j * np.outer(ts.reshape(-1), evals_s)).reshape(n, nn, d_s)
        g_batch = {}
        for j in range(n):
            ph = phases[j]
            for dag in (False, True):
                for q in range(len(g_eig)):
                    base = g_eig_dag[q] if dag else g_eig[q]
                    g_batch[(j, dag, q)] = (
                        ph[:, :, None] * base[None, :, :] * ph.conj()[:, None, :]
                    )

        kernel_cache = {}

        def kernel_values(i, di, qi, j, dj, qj):
            key = (i, di, qi, j, dj, qj)
            if key not in kernel_cache:
                amp, freq = kernel_table[(di, qi, dj, qj)]
                tau = ts[i] - ts[j]
                kernel_cache[key] = np.exp(1j * np.outer(tau, freq)) @ amp
            return kernel_cache[key]

        chunk_sum = np.zeros((d_s, d_s), dtype=complex)
        for qs, dagf in assignments:
            for left, right, sign in sides:
                order = right + left  # trace order after cyclic rotation
                pos = {orig: k for k, orig in enumerate(order)}
                wick = np.zeros(nn, dtype=complex)
                for pairing in pairing_list:
                    prod = np.ones(nn, dtype=complex)
                    for a, b in pairing:
                        i, j = order[a], order[b]
                        prod = prod * kernel_values(i, dagf[i], qs[i],
                                                    j, dagf[j], qs[j])
                    wick += prod
                scal = sign * wt * wick
                block = rho_eig[None, :, :] if not left else None
                if left:
                    acc = g_batch[(left[0], dagf[left[0]], qs[left[0]])]
                    for j in left[1:]:
                        acc = acc @ g_batch[(j, dagf[j], qs[j])]
                    block = acc @ rho_eig
                for j in right:
                    block = block @ g_batch[(j, dagf[j], qs[j])]
                chunk_sum += np.einsum("n,nij->ij", scal, block)
        # Kahan step on the chunk totals
        y = chunk_sum - comp
        t_new = total + y
        comp = (t_new - total) - y
        total = t_new

    total = ((-1j) ** n) * total
    return vecs_s @ total @ vecs_s.conj().T


def dyson_propagate(spec: ModelSpec, cfg: DysonConfig, times,
                    tol: Tolerances = None) -> Trajectory:
    """Reduced dynamics from the truncated commutator series.

    Every nested-commutator placement (2^n of them) and every coupling /
    adjoint assignment ((2Q)^n) is enumerated literally; the reservoir
    factor of each placement is a pairing sum evaluated on the shared
    quadrature nodes. Partial sums are Hermitized, with the asymmetry
    recorded, and each time carries its majorant bound plus a validity
    flag. The quadrature error is estimated at the last grid time by
    comparing the point count against its double.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    times = np.asarray(times, dtype=float)
    spectrum = spectral_decompose(spec.component, tol)
    kernel_table = _kernel_coefficients(spectrum, spec.component.couplings)
    hs_eig = np.linalg.eigh(0.5 * (spec.system.h_s + spec.system.h_s.conj().T))

    nq = len(spec.system.couplings)
    gmax = max(float(np.linalg.norm(g, 2)) for g in spec.system.couplings)
    vmax = max(float(np.linalg.norm(v, 2)) for v in spec.component.couplings)

    orders = [n for n in range(2, cfg.order + 1, 2)]
    per_order = {
        n: (
            [(qs, dagf) for qs in itertools.product(range(nq), repeat=n)
             for dagf in itertools.product((False, True), repeat=n)],
            _commutator_sides(n),
            list(pairings(n)),
        )
        for n in orders
    }

    def interaction_picture_state(t, p):
        out = spec.system.rho_s.astype(complex)
        for n in orders:
            assignments, sides, pairing_list = per_order[n]
            out = out + _order_term(spec, kernel_table, n, t, p,
                                    assignments, sides, pairing_list, hs_eig)
        return out

    states, bounds, flags, asyms = [], [], [], []
    evals_s, vecs_s = hs_eig
    for t in times:
        raw = interaction_picture_state(t, cfg.quadrature_points)
        phase = np.exp(-1j * t * evals_s)
        u = (vecs_s * phase) @ vecs_s.conj().T
        rho = u @ raw @ u.conj().T
        asym = float(np.max(np.abs(rho - rho.conj().T)))
        rho = 0.5 * (rho + rho.conj().T)
        bound = truncation_bound(gmax, vmax, nq, float(t), cfg.order)
        states.append(rho)
        bounds.append(bound)
        flags.append(bound <= cfg.validity_threshold)
        asyms.append(asym)

    quad_estimate = None
    if cfg.estimate_quadrature and times[-1] > 0.0 and orders:
        a = interaction_picture_state(times[-1], cfg.quadrature_points)
        b = interaction_picture_state(times[-1], 2 * cfg.quadrature_points)
        quad_estimate = float(np.max(np.abs(a - b)))
        if quad_estimate > tol.quad:
            raise QuadratureUnderResolvedError(quad_estimate, tol.quad)

    prov = {
        "simulator": "dyson",
        "order": cfg.order,
        "quadrature_points": cfg.quadrature_points,
        "quadrature_estimate": quad_estimate,
        "truncation_bound": [float(b) for b in bounds],
        "within_validity": [bool(f) for f in flags],
        "max_hermiticity_asymmetry": max(asyms) if asyms else 0.0,
    }
    return Trajectory(times=times, states=states, provenance=prov)

"""Exact reservoir correlation functions.

Three layers:
  * closed-form stationary two-point functions of the component
    (`two_point_reservoir`) and of the equivalent oscillator bath
    (`two_point_bosonic`),
  * exact finite-M collective correlations via a set-partition cluster
    expansion (`multitime_finite`), never building the M-fold space,
  * the Gaussian pairing sum (`wick_sum`) they converge to.

Collective operators here are (1/sqrt M) sum_m v^[m](t); their n-point
function in the product state factorizes over same-site clusters, with
a falling-factorial multiplicity per partition and zero weight for any
partition containing a singleton (the couplings are centralized).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import ComponentSpectrum


@dataclass(frozen=True)
class DressedOperator:
    """v_q (or its adjoint) freely evolved to time t."""

    q: int
    dag: bool
    t: float


def _eig_matrices(spectrum: ComponentSpectrum, couplings):
    """Coupling matrices in the component eigenbasis, plain and daggered."""
    mats = [spectrum.transform(v) for v in couplings]
    return mats, [m.conj().T for m in mats]


def _dressed_matrix(spectrum, plain, dagged, op: DressedOperator):
    base = dagged[op.q] if op.dag else plain[op.q]
    phases = np.exp(1j * op.t * spectrum.energies)
    return (phases[:, None] * base) * phases.conj()[None, :]


def two_point_reservoir(spectrum: ComponentSpectrum, couplings, a: DressedOperator,
                        b: DressedOperator) -> complex:
    """tr(rho v_a(t_a) v_b(t_b)) in closed form.

    With A, B the (possibly daggered) coupling matrices in the common
    eigenbasis, this is sum_{k,l} p_k A_kl B_lk e^{i(t_a-t_b)(E_k-E_l)}.
    """
    plain, dagged = _eig_matrices(spectrum, couplings)
    ma = dagged[a.q] if a.dag else plain[a.q]
    mb = dagged[b.q] if b.dag else plain[b.q]
    tau = a.t - b.t
    freq = spectrum.energies[:, None] - spectrum.energies[None, :]
    phases = np.exp(1j * tau * freq)
    return complex(np.sum(spectrum.populations[:, None] * ma * phases * mb.T))


def reservoir_kernel(spectrum: ComponentSpectrum, couplings):
    """Pairing kernel closure around `two_point_reservoir`."""
    plain, dagged = _eig_matrices(spectrum, couplings)
    pops = spectrum.populations
    freq = spectrum.energies[:, None] - spectrum.energies[None, :]

    def kernel(a: DressedOperator, b: DressedOperator) -> complex:
        ma = dagged[a.q] if a.dag else plain[a.q]
        mb = dagged[b.q] if b.dag else plain[b.q]
        phases = np.exp(1j * (a.t - b.t) * freq)
        return complex(np.sum(pops[:, None] * ma * phases * mb.T))

    return kernel


def _mode_amplitudes(model, op: DressedOperator):
    """(annihilation, creation) coefficient vectors of X_q^(dag)(t)."""
    om = model.frequencies
    if op.dag:
        ann = model.w[op.q].conj() * np.exp(-1j * op.t * om)
        cre = model.z[op.q] * np.exp(1j * op.t * om)
    else:
        ann = model.z[op.q].conj() * np.exp(-1j * op.t * om)
        cre = model.w[op.q] * np.exp(1j * op.t * om)
    return ann, cre


def two_point_bosonic(model, a: DressedOperator, b: DressedOperator) -> complex:
    """Vacuum two-point function of the oscillator-bath couplings X_q.

    Only <a_j a_j^dag> = 1 survives in the ground state, so the value is
    the overlap of a's annihilation part with b's creation part.
    """
    if len(model.modes) == 0:
        return 0.0 + 0.0j
    ann_a, _ = _mode_amplitudes(model, a)
    _, cre_b = _mode_amplitudes(model, b)
    return complex(np.sum(ann_a * cre_b))


def bosonic_kernel(model):
    def kernel(a: DressedOperator, b: DressedOperator) -> complex:
        return two_point_bosonic(model, a, b)

    return kernel


def pairings(n: int):
    """Yield all (n-1)!! canonical pairings of range(n).

    Pairs are produced by repeatedly matching the smallest unpaired
    index, so each pairing comes out as ((i1, j1), (i2, j2), ...) with
    i1 < i2 < ... and i < j inside every pair.
    """
    if n % 2:
        return
    items = list(range(n))

    def rec(remaining):
        if not remaining:
            yield ()
            return
        first = remaining[0]
        for pos in range(1, len(remaining)):
            partner = remaining[pos]
            rest = remaining[1:pos] + remaining[pos + 1:]
            for tail in rec(rest):
                yield ((first, partner),) + tail

    yield from rec(items)


def wick_sum(kernel, ops) -> complex:
    """Gaussian pairing sum: 0 for odd length, else the sum over all
    canonical pairings of products of kernel values."""
    ops = list(ops)
    n = len(ops)
    if n % 2:
        return 0.0 + 0.0j
    if n == 0:
        return 1.0 + 0.0j
    if n > 16:
        raise ValueError("wick_sum limited to 16 operators")
    cache = {}
    total = 0.0 + 0.0j
    for pairing in pairings(n):
        prod = 1.0 + 0.0j
        for i, j in pairing:
            if (i, j) not in cache:
                cache[(i, j)] = complex(kernel(ops[i], ops[j]))
            prod *= cache[(i, j)]
        total += prod
    return total


def set_partitions(n: int):
    """Yield all set partitions of range(n) as restricted growth strings."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i, maxval):
        if i == n:
            yield tuple(a)
            return
        for v in range(maxval + 2):
            a[i] = v
            yield from rec(i + 1, max(maxval, v))

    yield from rec(1, 0)


def _partition_blocks(rgs):
    blocks = {}
    for pos, label in enumerate(rgs):
        blocks.setdefault(label, []).append(pos)
    return [tuple(blocks[k]) for k in sorted(blocks)]


def _cluster_sums(spectrum, couplings, ops):
    """Per-cluster-count sums S_kappa of products of single-site traces.

    S_kappa collects, over all partitions of the operator positions into
    kappa blocks of size >= 2, the product over blocks of
    tr(rho * ordered product of the block's dressed operators). This is
    M-independent; the M dependence enters only through the
    falling-factorial weights.
    """
    ops = list(ops)
    n = len(ops)
    if n == 0:
        return {}
    if n > 10:
        raise ValueError("multitime correlations limited to 10 operators")
    plain, dagged = _eig_matrices(spectrum, couplings)
    mats = [_dressed_matrix(spectrum, plain, dagged, op) for op in ops]
    pops = spectrum.populations

    @lru_cache(maxsize=None)
    def block_trace(block):
        prod = mats[block[0]]
        for pos in block[1:]:
            prod = prod @ mats[pos]
        return complex(np.sum(pops * np.diag(prod)))

    sums = {}
    for rgs in set_partitions(n):
        blocks = _partition_blocks(rgs)
        if any(len(b) < 2 for b in blocks):
            continue  # singleton traces vanish for centralized couplings
        value = 1.0 + 0.0j
        for block in blocks:
            value *= block_trace(block)
        kappa = len(blocks)
        sums[kappa] = sums.get(kappa, 0.0 + 0.0j) + value
    block_trace.cache_clear()
    return sums


def _falling_factorial_weight(m: int, kappa: int, n: int) -> float:
    """M(M-1)...(M-kappa+1) / M^(n/2), exact integer arithmetic inside."""
    if kappa > m:
        return 0.0
    ff = 1
    for i in range(kappa):
        ff *= m - i
    if n % 2 == 0:
        return float(ff) / float(m ** (n // 2))
    return float(ff) / (float(m ** (n // 2)) * math.sqrt(m))


def multitime_finite(spectrum: ComponentSpectrum, couplings, ops, m: int) -> complex:
    """Exact n-point function of the scaled collective couplings at
    reservoir size m, via the singleton-free set-partition expansion."""
    ops = list(ops)
    if m < 1:
        raise ValueError("reservoir size must be >= 1")
    if not ops:
        return 1.0 + 0.0j
    n = len(ops)
    sums = _cluster_sums(spectrum, couplings, ops)
    total = 0.0 + 0.0j
    for kappa in sorted(sums):
        total += _falling_factorial_weight(m, kappa, n) * sums[kappa]
    return total


def clt_convergence(spectrum: ComponentSpectrum, couplings, ops, ms) -> dict:
    """Scan |C_M - Wick| (even n) or |C_M| (odd n) over reservoir sizes."""
    ops = list(ops)
    n = len(ops)
    sums = _cluster_sums(spectrum, couplings, ops)
    rows = []
    if n % 2 == 0:
        wick = wick_sum(reservoir_kernel(spectrum, couplings), ops)
        for m in ms:
            c_m = sum(
                _falling_factorial_weight(m, kappa, n) * sums[kappa]
                for kappa in sorted(sums)
            )
            rows.append({"M": int(m), "c_m": complex(c_m), "wick": complex(wick),
                         "error": abs(complex(c_m) - complex(wick))})
        return {"kind": "even", "rows": rows}
    for m in ms:
        c_m = sum(
            _falling_factorial_weight(m, kappa, n) * sums[kappa]
            for kappa in sorted(sums)
        )
        rows.append({"M": int(m), "abs_c_m": abs(complex(c_m))})
    return {"kind": "odd", "rows": rows}

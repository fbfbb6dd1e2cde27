"""System + reservoir-component model data, validation and spectral data.

A model is a system (Hamiltonian, initial state, coupling operators
G_q) plus one reservoir component (Hamiltonian h, stationary state rho,
coupling operators v_q). The component state must commute with its
Hamiltonian and every v_q must have zero expectation in it; `validate`
checks all of this and `centralize` can shift non-centralized couplings
(changing the model, hence the warning record).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NotSimultaneouslyDiagonalizableError
from .numerics import as_operator, herm_defect
from .tolerances import DEFAULT_TOLERANCES, Tolerances


def _operator_list(ops):
    out = tuple(as_operator(o) for o in ops)
    if not out:
        raise DimensionMismatchError("at least one coupling operator is required")
    d = out[0].shape[0]
    for o in out:
        if o.shape[0] != d:
            raise DimensionMismatchError("coupling operators have mixed dimensions")
    return out


@dataclass(frozen=True)
class SystemSpec:
    h_s: np.ndarray
    rho_s: np.ndarray
    couplings: tuple  # G_q, not necessarily Hermitian

    def __post_init__(self):
        object.__setattr__(self, "h_s", as_operator(self.h_s))
        object.__setattr__(self, "rho_s", as_operator(self.rho_s))
        object.__setattr__(self, "couplings", _operator_list(self.couplings))
        d = self.h_s.shape[0]
        if self.rho_s.shape[0] != d or any(g.shape[0] != d for g in self.couplings):
            raise DimensionMismatchError("system operators have mixed dimensions")

    @property
    def dim(self) -> int:
        return self.h_s.shape[0]


@dataclass(frozen=True)
class ComponentSpec:
    h_r: np.ndarray
    rho_r: np.ndarray
    couplings: tuple  # v_q

    def __post_init__(self):
        object.__setattr__(self, "h_r", as_operator(self.h_r))
        object.__setattr__(self, "rho_r", as_operator(self.rho_r))
        object.__setattr__(self, "couplings", _operator_list(self.couplings))
        d = self.h_r.shape[0]
        if self.rho_r.shape[0] != d or any(v.shape[0] != d for v in self.couplings):
            raise DimensionMismatchError("component operators have mixed dimensions")

    @property
    def dim(self) -> int:
        return self.h_r.shape[0]


@dataclass(frozen=True)
class ModelSpec:
    system: SystemSpec
    component: ComponentSpec

    def __post_init__(self):
        if len(self.system.couplings) != len(self.component.couplings):
            raise DimensionMismatchError(
                f"{len(self.system.couplings)} system couplings vs "
                f"{len(self.component.couplings)} component couplings; "
                "lists must have equal length"
            )

    @property
    def q(self) -> int:
        return len(self.system.couplings)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    violation: float
    tolerance: float

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "violation": float(self.violation),
            "tolerance": float(self.tolerance),
        }


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, violation, tolerance):
        self.checks.append(
            CheckResult(name, float(violation) <= float(tolerance), violation, tolerance)
        )

    def as_dict(self):
        return {
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "warnings": list(self.warnings),
        }


def _density_checks(report, label, rho, tol: Tolerances):
    report.add(f"{label}_hermitian", herm_defect(rho), tol.herm * max(1.0, float(np.max(np.abs(rho)))))
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    report.add(f"{label}_psd", max(0.0, -float(evals.min())), tol.psd)
    report.add(f"{label}_trace", abs(float(np.trace(rho).real) - 1.0) + abs(float(np.trace(rho).imag)), tol.trace)


def validate(spec: ModelSpec, tol: Tolerances = None) -> ValidationReport:
    """Check every standing assumption; failures are report entries."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    report = ValidationReport()
    sys_, comp = spec.system, spec.component

    hs_scale = max(1.0, float(np.max(np.abs(sys_.h_s))))
    report.add("h_s_hermitian", herm_defect(sys_.h_s), tol.herm * hs_scale)
    _density_checks(report, "rho_s", sys_.rho_s, tol)

    hr_scale = max(1.0, float(np.max(np.abs(comp.h_r))))
    report.add("h_r_hermitian", herm_defect(comp.h_r), tol.herm * hr_scale)
    _density_checks(report, "rho_r", comp.rho_r, tol)

    comm = comp.h_r @ comp.rho_r - comp.rho_r @ comp.h_r
    report.add("stationarity", float(np.max(np.abs(comm))), tol.stat)

    for i, v in enumerate(comp.couplings):
        report.add(f"centralization_q{i}", abs(complex(np.trace(comp.rho_r @ v))), tol.cent)
    return report


def centralize(spec: ModelSpec, tol: Tolerances = None):
    """Shift each v_q by -tr(rho_r v_q) so it has zero expectation.

    Returns (new_spec, shift_records). The shift is NOT harmless: the
    dropped term grows like sqrt(M) with the reservoir size, so a
    warning is emitted whenever any coupling actually moves.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    comp = spec.component
    eye = np.eye(comp.dim)
    shifts, new_vs = [], []
    for i, v in enumerate(comp.couplings):
        mean = complex(np.trace(comp.rho_r @ v))
        new_vs.append(v - mean * eye)
        if abs(mean) > tol.cent:
            shifts.append({"q": i, "shift": mean})
    if shifts:
        warnings.warn(
            "centralize shifted couplings "
            + ", ".join(f"q={s['q']} by {s['shift']:.3e}" for s in shifts)
            + "; the discarded collective term grows like sqrt(M)",
            stacklevel=2,
        )
    new_comp = ComponentSpec(comp.h_r, comp.rho_r, tuple(new_vs))
    return ModelSpec(spec.system, new_comp), shifts


@dataclass(frozen=True)
class ComponentSpectrum:
    """Joint eigendata of (rho_r, h_r): populations, energies and the
    common eigenbasis, ordered by energy ascending then population
    descending."""

    populations: np.ndarray
    energies: np.ndarray
    basis: np.ndarray  # columns are the common eigenvectors

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return int(np.sum(self.populations > DEFAULT_TOLERANCES.pop))

    def transform(self, op) -> np.ndarray:
        """Matrix elements of op in the common eigenbasis."""
        return self.basis.conj().T @ as_operator(op) @ self.basis


def spectral_decompose(component: ComponentSpec, tol: Tolerances = None) -> ComponentSpectrum:
    """Simultaneously diagonalize h_r and rho_r.

    Diagonalizes h_r first, then rho_r inside each (near-)degenerate
    energy block. Raises NotSimultaneouslyDiagonalizableError when the
    refined basis leaves residual off-diagonals above 1e-8.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    h = as_operator(component.h_r)
    rho = as_operator(component.rho_r)
    energies, basis = np.linalg.eigh(0.5 * (h + h.conj().T))
    d = h.shape[0]

    gap_tol = 1e-9 * float(np.max(np.abs(energies))) if np.any(energies != 0.0) else 0.0
    blocks, start = [], 0
    for i in range(1, d + 1):
        if i == d or abs(energies[i] - energies[i - 1]) > gap_tol:
            blocks.append((start, i))
            start = i

    # eigh already sorts energies ascending; refining inside each block
    # keeps that order, and the stable argsort below implements the
    # population-descending tie-break with the eigh index as final key.
    rho_eig = basis.conj().T @ rho @ basis
    pops = np.empty(d)
    for lo, hi in blocks:
        block = 0.5 * (rho_eig[lo:hi, lo:hi] + rho_eig[lo:hi, lo:hi].conj().T)
        p, u = np.linalg.eigh(block)
        idx = np.argsort(-p, kind="stable")
        basis[:, lo:hi] = basis[:, lo:hi] @ u[:, idx]
        pops[lo:hi] = p[idx]

    residual = 0.0
    for mat, diag in ((h, energies), (rho, pops)):
        m = basis.conj().T @ mat @ basis
        residual = max(residual, float(np.max(np.abs(m - np.diag(np.diag(m))))))
    if residual > 1e-8:
        raise NotSimultaneouslyDiagonalizableError(residual)

    return ComponentSpectrum(populations=pops, energies=energies, basis=basis)

"""Central registry of numerical tolerances.

Every tolerance used by the package lives here with its default, so a run
can override any of them by name and record the effective map in its
output provenance.
"""

from dataclasses import dataclass, asdict, fields


@dataclass(frozen=True)
class Tolerances:
    # Hermiticity check, relative to max(1, max|entry|).
    herm: float = 1e-10
    # Density-matrix positivity: eigenvalues >= -psd.
    psd: float = 1e-10
    # Unit-trace check: |tr(rho) - 1| <= trace.
    trace: float = 1e-10
    # Stationarity: max|h rho - rho h| <= stat.
    stat: float = 1e-10
    # Centralization: |tr(rho v_q)| <= cent.
    cent: float = 1e-10
    # Krylov step residual target.
    krylov: float = 1e-9
    # Population threshold for mode-set membership.
    pop: float = 1e-12
    # Coupling matrix-element threshold for mode-set membership.
    mat: float = 1e-12
    # Quadrature error budget for the series propagator.
    quad: float = 1e-8

    def as_dict(self):
        return asdict(self)

    def replace(self, **overrides):
        bad = sorted(set(overrides) - {f.name for f in fields(self)})
        if bad:
            raise KeyError(f"unknown tolerance keys: {', '.join(bad)}")
        merged = self.as_dict()
        merged.update({k: float(v) for k, v in overrides.items()})
        return Tolerances(**merged)


TOLERANCE_KEYS = tuple(f.name for f in fields(Tolerances))

DEFAULT_TOLERANCES = Tolerances()

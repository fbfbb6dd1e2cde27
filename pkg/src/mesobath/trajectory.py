"""Reduced-dynamics trajectories and comparison tables."""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError
from .numerics import herm_defect, trace_distance


def time_grid(t_max: float, steps: int) -> np.ndarray:
    """Uniform grid 0..t_max with `steps` steps (steps+1 points)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    return np.linspace(0.0, float(t_max), int(steps) + 1)


@dataclass
class Trajectory:
    """Time grid plus the reduced system density matrix at each time.

    `provenance` records which simulator produced it and with what
    parameters, so output files can embed the full recipe.
    """

    times: np.ndarray
    states: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.states) != self.times.size:
            raise GridMismatchError("state count does not match time grid")

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def density_defects(self):
        """Worst-case Hermiticity / trace / positivity violations."""
        herm = max(herm_defect(s) for s in self.states)
        tr = max(abs(complex(np.trace(s)) - 1.0) for s in self.states)
        neg = max(
            max(0.0, -float(np.linalg.eigvalsh(0.5 * (s + s.conj().T)).min()))
            for s in self.states
        )
        return {"hermiticity": herm, "trace": tr, "negative_eigenvalue": neg}

    def check_density(self, herm_tol=1e-8, trace_tol=1e-8, eig_tol=1e-7) -> bool:
        d = self.density_defects()
        return (
            d["hermiticity"] <= herm_tol
            and d["trace"] <= trace_tol
            and d["negative_eigenvalue"] <= eig_tol
        )


def max_trace_distance(a: Trajectory, b: Trajectory) -> float:
    """Largest trace distance between two trajectories over the shared grid."""
    if a.times.size != b.times.size or not np.allclose(a.times, b.times, rtol=0.0, atol=1e-12):
        raise GridMismatchError("trajectories live on different time grids")
    return max(trace_distance(x, y) for x, y in zip(a.states, b.states))


@dataclass
class ErrorTable:
    """Convergence table: one row per reservoir size M."""

    rows: list = field(default_factory=list)  # dicts with M, distance, ratio
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return {"rows": list(self.rows), "extras": dict(self.extras)}

"""Wall-clock scaling of the integrator across lattice sizes.

Times ``leapfrog_step`` on full grids after one warm-up pass; per-step
cost is linear in the edge count, which the report makes visible.
Sizes that exhaust memory are recorded as failed entries instead of
aborting the remaining sizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dynamics import estimate_stable_dt, free_protocol, leapfrog_init, leapfrog_step
from .geometry import LatticeSpec, PoreShape, build_lattice
from .models.base import EdgeEnergyModel


@dataclass(frozen=True)
class SizeTiming:
    rows: int
    cols: int
    n_edges: int
    per_step_mean: float | None  # seconds
    per_step_std: float | None
    repetitions: tuple[float, ...]  # total seconds per repetition
    error: str | None = None


@dataclass(frozen=True)
class BenchReport:
    entries: tuple[SizeTiming, ...]
    steps: int
    repetitions: int

    def __post_init__(self):
        if self.steps > 0 and self.repetitions < 5:
            raise ValueError(f"benchmarks need at least 5 repetitions, got {self.repetitions}")

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "repetitions": self.repetitions,
            "entries": [
                {
                    "rows": e.rows,
                    "cols": e.cols,
                    "n_edges": e.n_edges,
                    "per_step_mean": e.per_step_mean,
                    "per_step_std": e.per_step_std,
                    "repetitions": list(e.repetitions),
                    "error": e.error,
                }
                for e in self.entries
            ],
        }


def bench_scaling(
    sizes,
    model: EdgeEnergyModel,
    steps: int = 5,
    repetitions: int = 5,
    threads: int = 1,
    shape: PoreShape | None = None,
    seed: int = 0,
) -> BenchReport:
    """Time ``steps`` integrator steps per size, ``repetitions`` times each.

    ``sizes`` is an iterable of (rows, cols).  ``steps`` = 0 produces an
    empty report.  The lattice starts from a small seeded perturbation
    so the force evaluation sees generic inputs.
    """
    if steps == 0:
        return BenchReport(entries=(), steps=0, repetitions=repetitions)
    shape = shape or PoreShape(xi=0.0, phi0=0.5, l0=1.0)
    model = model.calibrated()
    entries = []
    for rows, cols in sizes:
        try:
            lattice = build_lattice(LatticeSpec(rows=rows, cols=cols, shape=shape))
            protocol = free_protocol(lattice)
            dt = estimate_stable_dt(lattice, model)
            rng = np.random.default_rng(seed)
            x0 = lattice.positions + rng.uniform(-0.01, 0.01, lattice.positions.shape) * lattice.l0
            theta0 = rng.uniform(-0.01, 0.01, lattice.n_nodes)
            state0 = leapfrog_init(
                lattice, model, protocol, dt, positions=x0, orientations=theta0, threads=threads
            )

            # warm-up pass outside the timers
            leapfrog_step(state0, lattice, model, protocol, dt, threads=threads)

            reps = []
            for _ in range(repetitions):
                state = state0
                t0 = time.perf_counter()
                for _ in range(steps):
                    state = leapfrog_step(state, lattice, model, protocol, dt, threads=threads)
                reps.append(time.perf_counter() - t0)
            per_step = np.asarray(reps) / steps
            entries.append(
                SizeTiming(
                    rows=rows,
                    cols=cols,
                    n_edges=lattice.n_edges,
                    per_step_mean=float(per_step.mean()),
                    per_step_std=float(per_step.std()),
                    repetitions=tuple(reps),
                )
            )
        except MemoryError:
            entries.append(
                SizeTiming(
                    rows=rows,
                    cols=cols,
                    n_edges=-1,
                    per_step_mean=None,
                    per_step_std=None,
                    repetitions=(),
                    error="out of memory",
                )
            )
    return BenchReport(entries=tuple(entries), steps=steps, repetitions=repetitions)

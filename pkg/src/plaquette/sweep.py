"""Parameter-space sweeps of the self-trapping verdict.

Every cell is an independent integration from the fixed initial state;
results land in preallocated slots keyed by cell index, so the output does
not depend on the number of worker threads or on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import DEFAULT_T_START, DEFAULT_THRESHOLD, classify_selftrapping
from .errors import InvalidParameters, NonFinite, ToleranceExceeded
from .integrator import SELFTRAP_CONFIG, IntegratorConfig, integrate
from .model import PlaquetteParams, initial_state_paper

WORKERS_ENV = "PLAQUETTE_WORKERS"


def resolve_workers(workers=None) -> int:
    """Explicit argument, else $PLAQUETTE_WORKERS, else the CPU count."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise InvalidParameters(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise InvalidParameters("worker count must be at least 1")
    return workers


@dataclass(frozen=True)
class GridSpec:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise InvalidParameters(f"grid {self.name}: bounds must be finite")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParameters(f"grid {self.name}: count must be an integer >= 2")
        if not self.min < self.max:
            raise InvalidParameters(f"grid {self.name}: min must be below max")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))

    @classmethod
    def parse(cls, name: str, text: str) -> GridSpec:
        """Build from ``"min:max:count"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameters(f"grid {name}: expected 'min:max:count', got {text!r}")
        try:
            lo, hi = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError:
            raise InvalidParameters(f"grid {name}: cannot parse {text!r}") from None
        return cls(name, lo, hi, count)

    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    def to_dict(self) -> dict:
        return {"name": self.name, "min": self.min, "max": self.max, "count": self.count}


@dataclass(frozen=True, eq=False)
class PhaseDiagram:
    """Verdict grid; arrays are indexed [x index, y index]."""

    x_axis: GridSpec
    y_axis: GridSpec
    average_xc: np.ndarray
    trapped: np.ndarray
    failures: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def flips_along_y(self) -> np.ndarray:
        """Number of verdict changes along y for each x column."""
        t = self.trapped
        return np.count_nonzero(t[:, 1:] != t[:, :-1], axis=1)


def _cell(state0, params, sim, threshold, t_start):
    traj = integrate(state0, params, sim)
    return classify_selftrapping(traj, t_start, threshold).average_xc


def _warm_up(sim):
    # compile the kernel once before threads race for it
    integrate(initial_state_paper(), PlaquetteParams(K=1.0, phi=0.0), sim.replace(t_max=sim.dt * 2, sample_stride=1))


def _state_record(state0):
    return [[float(z.real), float(z.imag)] for z in state0.psi]


def _run_cells(param_list, coords, sim, threshold, t_start, workers, state0):
    n = len(param_list)
    averages = np.full(n, np.nan)
    failures = {}
    _warm_up(sim)

    def work(i):
        try:
            return i, _cell(state0, param_list[i], sim, threshold, t_start), None
        except NonFinite as exc:
            return i, math.nan, str(exc)
        except ToleranceExceeded as exc:
            exc.cell = coords[i]
            raise

    workers = resolve_workers(workers)
    if workers == 1:
        results = map(work, range(n))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(work, range(n))
    try:
        for i, avg, err in results:
            averages[i] = avg
            if err is not None:
                failures[coords[i]] = err
    finally:
        if workers != 1:
            pool.shutdown(wait=True, cancel_futures=True)
    return averages, failures


def _provenance(kind, fixed, x_axis, y_axis, sim, threshold, t_start, state0):
    return {
        "kind": kind,
        "fixed": fixed,
        "J": 1.0,
        "initial_state": _state_record(state0),
        "x_axis": x_axis.to_dict(),
        "y_axis": y_axis.to_dict(),
        "integrator": sim.to_dict(),
        "threshold": threshold,
        "t_start": t_start,
    }


def _sweep(kind, fixed, x_axis, y_axis, make_params, sim, threshold, t_start, workers, state0):
    state0 = initial_state_paper() if state0 is None else state0
    xs, ys = x_axis.points(), y_axis.points()
    params, coords = [], []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            params.append(make_params(float(x), float(y)))
            coords.append((float(x), float(y)))
    averages, failures = _run_cells(params, coords, sim, threshold, t_start, workers, state0)
    averages = averages.reshape(len(xs), len(ys))
    trapped = averages < threshold
    return PhaseDiagram(
        x_axis, y_axis, averages, trapped, failures,
        _provenance(kind, fixed, x_axis, y_axis, sim, threshold, t_start, state0),
    )


def sweep_selftrap_KU(
    phi: float,
    k_grid: GridSpec,
    u_grid: GridSpec,
    sim: IntegratorConfig = SELFTRAP_CONFIG,
    threshold: float = DEFAULT_THRESHOLD,
    t_start: float = DEFAULT_T_START,
    workers=None,
    state0=None,
) -> PhaseDiagram:
    """Verdicts over (K/J, U/J) at fixed flux."""
    if not math.isfinite(phi):
        raise InvalidParameters("phi must be finite")
    return _sweep(
        "KU", {"phi": phi}, k_grid, u_grid,
        lambda k, u: PlaquetteParams(K=k, phi=phi, U=u),
        sim, threshold, t_start, workers, state0,
    )


def sweep_selftrap_phiU(
    k_over_j: float,
    phi_grid: GridSpec,
    u_grid: GridSpec,
    sim: IntegratorConfig = SELFTRAP_CONFIG,
    threshold: float = DEFAULT_THRESHOLD,
    t_start: float = DEFAULT_T_START,
    workers=None,
    state0=None,
) -> PhaseDiagram:
    """Verdicts over (phi, U/J) at fixed K/J."""
    return _sweep(
        "phiU", {"k_over_j": k_over_j}, phi_grid, u_grid,
        lambda ph, u: PlaquetteParams(K=k_over_j, phi=ph, U=u),
        sim, threshold, t_start, workers, state0,
    )


@dataclass(frozen=True, eq=False)
class InteractionScan:
    u_values: np.ndarray
    average_xc: np.ndarray
    trapped: np.ndarray
    failures: dict
    provenance: dict

    @property
    def flips(self) -> list:
        """Intervals (U_i, U_i+1) across which the verdict changes."""
        t = self.trapped
        return [
            (float(self.u_values[i]), float(self.u_values[i + 1]))
            for i in range(len(t) - 1)
            if t[i] != t[i + 1]
        ]


def scan_interaction(
    params_base: PlaquetteParams,
    u_grid: GridSpec,
    sim: IntegratorConfig = SELFTRAP_CONFIG,
    threshold: float = DEFAULT_THRESHOLD,
    t_start: float = DEFAULT_T_START,
    workers=None,
    state0=None,
) -> InteractionScan:
    state0 = initial_state_paper() if state0 is None else state0
    us = u_grid.points()
    params = [params_base.replace(U=float(u)) for u in us]
    coords = [(params_base.K, params_base.phi, float(u)) for u in us]
    averages, failures = _run_cells(params, coords, sim, threshold, t_start, workers, state0)
    prov = {
        "kind": "U-scan",
        "fixed": {"k_over_j": params_base.K / params_base.J, "phi": params_base.phi},
        "J": params_base.J,
        "initial_state": _state_record(state0),
        "u_axis": u_grid.to_dict(),
        "integrator": sim.to_dict(),
        "threshold": threshold,
        "t_start": t_start,
    }
    return InteractionScan(us, averages, averages < threshold, failures, prov)


def critical_U_scan(
    params_base: PlaquetteParams,
    u_grid: GridSpec,
    sim: IntegratorConfig = SELFTRAP_CONFIG,
    threshold: float = DEFAULT_THRESHOLD,
    t_start: float = DEFAULT_T_START,
    workers=None,
    state0=None,
) -> list:
    """Every grid interval where the self-trapping verdict flips."""
    return scan_interaction(params_base, u_grid, sim, threshold, t_start, workers, state0).flips

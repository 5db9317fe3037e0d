"""Fixed-step time evolution of the mean-field equations with drift diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from . import _kernels
from .analytic import mode_frequencies
from .errors import InvalidParameters, NonFinite, ToleranceExceeded
from .model import NORM_TOLERANCE, PlaquetteParams, SiteOccupations, State, energy_batch, gpe_rhs

SCHEMES = ("split4", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and acceptance tolerances for one integration.

    ``scheme`` selects the fourth-order split-step method (default) or
    classical RK4 on the full right-hand side.
    """

    dt: float = 1e-3
    t_max: float = 100.0
    sample_stride: int = 10
    renormalize: bool = False
    norm_tolerance: float = 1e-10
    energy_tolerance: float = 1e-8
    scheme: str = "split4"
    keep_states: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidParameters(f"dt must be positive, got {self.dt}")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise InvalidParameters(f"t_max must be positive, got {self.t_max}")
        if self.dt > self.t_max:
            raise InvalidParameters("dt must not exceed t_max")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise InvalidParameters("sample_stride must be a positive integer")
        if not (self.norm_tolerance > 0 and self.energy_tolerance > 0):
            raise InvalidParameters("tolerances must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidParameters(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        object.__setattr__(self, "sample_stride", int(self.sample_stride))

    @property
    def nsteps(self) -> int:
        n = round(self.t_max / self.dt)
        return max(int(n), 1)

    def replace(self, **changes) -> IntegratorConfig:
        values = asdict(self)
        values.update(changes)
        return IntegratorConfig(**values)

    def to_dict(self) -> dict:
        return asdict(self)


SELFTRAP_CONFIG = IntegratorConfig(t_max=200.0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    occupations: np.ndarray  # (n, 4)
    centers: np.ndarray  # (n, 2): x_c, y_c
    norms: np.ndarray
    energies: np.ndarray
    max_norm_drift: float
    max_energy_drift: float
    states: Optional[np.ndarray] = None  # (n, 4) complex when requested

    def __len__(self):
        return len(self.times)

    @property
    def xc(self) -> np.ndarray:
        return self.centers[:, 0]

    @property
    def yc(self) -> np.ndarray:
        return self.centers[:, 1]

    def occupation(self, i: int) -> SiteOccupations:
        return SiteOccupations(*(float(v) for v in self.occupations[i]))

    def state(self, i: int) -> State:
        if self.states is None:
            raise ValueError("trajectory was recorded without states (keep_states=False)")
        return State(self.states[i], self.times[i])


def _split_coefficients(params: PlaquetteParams, dt: float) -> np.ndarray:
    freqs = mode_frequencies(params)
    return _kernels.linear_flow_coefficients(freqs.alpha, freqs.beta, _kernels.SPLIT4_LINEAR * dt)


def _run_kernel(psi0, params, dt, nsteps, stride, scheme, renormalize):
    rows = nsteps // stride + 1 + (1 if nsteps % stride else 0)
    out = np.empty((rows, 4), dtype=np.complex128)
    ku = params.peierls
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if scheme == "split4":
        coef = _split_coefficients(params, dt)
        defect = _kernels.unitarity_defects(coef, params.J, ku.real, ku.imag)
        written = _kernels.evolve_split4(
            psi0, params.K, params.J, ku.real, ku.imag, params.U, dt, nsteps, stride,
            coef, defect, _kernels.SPLIT4_NONLINEAR, renormalize, out,
        )
    else:
        written = _kernels.evolve_rk4(
            psi0, params.K, params.J, ku.real, ku.imag, params.U, dt, nsteps, stride,
            renormalize, out,
        )
    if written < 0:
        raise NonFinite(f"amplitudes became non-finite near sample {-written - 1}")
    return out[:written]


def _sample_times(nsteps, stride, dt):
    idx = np.arange(0, nsteps + 1, stride)
    if idx[-1] != nsteps:
        idx = np.append(idx, nsteps)
    return idx * dt


def step_rk4(state: State, params: PlaquetteParams, dt: float) -> State:
    """One classical RK4 step of size ``dt``."""
    if not dt > 0:
        raise InvalidParameters("dt must be positive")
    p = state.psi
    k1 = gpe_rhs(p, params)
    k2 = gpe_rhs(p + 0.5 * dt * k1, params)
    k3 = gpe_rhs(p + 0.5 * dt * k2, params)
    k4 = gpe_rhs(p + dt * k3, params)
    new = p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise NonFinite("RK4 step produced non-finite amplitudes")
    return State(new, state.t + dt)


def step_split4(state: State, params: PlaquetteParams, dt: float) -> State:
    """One fourth-order split step of size ``dt``."""
    if not dt > 0:
        raise InvalidParameters("dt must be positive")
    out = _run_kernel(state.psi, params, dt, 1, 1, "split4", False)
    return State(out[-1], state.t + dt)


def evolve_amplitudes(psi0, params: PlaquetteParams, config: IntegratorConfig):
    """Raw sampled amplitudes and sample times, without diagnostics."""
    nsteps = config.nsteps
    states = _run_kernel(
        psi0, params, config.dt, nsteps, config.sample_stride, config.scheme, config.renormalize
    )
    return _sample_times(nsteps, config.sample_stride, config.dt), states


def integrate(state0: State, params: PlaquetteParams, config: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Evolve ``state0`` to ``config.t_max`` and record the trajectory.

    Raises ToleranceExceeded when (without renormalisation) the norm or the
    relative energy drifts beyond the configured tolerances.
    """
    drift0 = abs(float(np.sum(np.abs(state0.psi) ** 2)) - 1.0)
    if drift0 > NORM_TOLERANCE:
        raise InvalidParameters(f"initial state is not normalized (drift {drift0:.3g})")
    times, states = evolve_amplitudes(state0.psi, params, config)
    times = times + state0.t
    occ = states.real**2 + states.imag**2
    norms = occ.sum(axis=1)
    energies = energy_batch(states, params)
    e0 = energies[0]
    norm_drift = float(np.max(np.abs(norms - 1.0)))
    energy_drift = float(np.max(np.abs(energies - e0)) / max(abs(e0), 1.0))
    if not config.renormalize and (
        norm_drift > config.norm_tolerance or energy_drift > config.energy_tolerance
    ):
        raise ToleranceExceeded(
            f"drift beyond tolerance: norm {norm_drift:.3g} (limit {config.norm_tolerance:g}), "
            f"energy {energy_drift:.3g} (limit {config.energy_tolerance:g}); reduce dt",
            norm_drift=norm_drift,
            energy_drift=energy_drift,
        )
    centers = np.column_stack(
        (
            -occ[:, 0] + occ[:, 1] + occ[:, 2] - occ[:, 3],
            occ[:, 0] + occ[:, 1] - occ[:, 2] - occ[:, 3],
        )
    )
    return Trajectory(
        times=times,
        occupations=occ,
        centers=centers,
        norms=norms,
        energies=energies,
        max_norm_drift=norm_drift,
        max_energy_drift=energy_drift,
        states=states if config.keep_states else None,
    )

"""Orbit observables, self-trapping classification and the double-well reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyPair, EmptyWindow, ZeroImbalance
from .model import State

DEFAULT_THRESHOLD = -0.5
DEFAULT_T_START = 0.0


def orbit_center(state: State):
    """Mean position (x_c, y_c) in units of the well half-separations."""
    a = state.psi
    n = a.real**2 + a.imag**2
    return float(-n[0] + n[1] + n[2] - n[3]), float(n[0] + n[1] - n[2] - n[3])


def time_average_xc(traj, t_start: float = DEFAULT_T_START) -> float:
    """Trapezoidal time average of x_c over samples with t >= t_start."""
    times = np.asarray(traj.times)
    if times.size == 0:
        raise EmptyWindow("trajectory is empty")
    mask = times >= t_start
    if mask.sum() < 2:
        raise EmptyWindow(f"fewer than two samples at or after t = {t_start}")
    t = times[mask]
    x = np.asarray(traj.centers)[mask, 0]
    return float(np.trapezoid(x, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class SelfTrapVerdict:
    average_xc: float
    trapped: bool
    window: tuple


def classify_selftrapping(traj, t_start: float = DEFAULT_T_START, threshold: float = DEFAULT_THRESHOLD) -> SelfTrapVerdict:
    avg = time_average_xc(traj, t_start)
    times = np.asarray(traj.times)
    start = float(times[times >= t_start][0])
    return SelfTrapVerdict(avg, bool(avg < threshold), (start, float(times[-1])))


@dataclass(frozen=True)
class ReducedState:
    """Imbalances and relative phases of the upper (1,2) and lower (4,3) pairs."""

    s_u: float
    s_d: float
    theta_u: float
    theta_d: float


def _wrap(angle):
    # into (-pi, pi]
    w = math.remainder(angle, 2 * math.pi)
    return math.pi if w == -math.pi else w


def reduce(state: State) -> ReducedState:
    """Project onto the two x-direction double wells.

    A relative phase involving an empty site is set to 0; the reduced
    Hamiltonian does not depend on it there because sqrt(1 - s^2) = 0.
    """
    a = state.psi
    n = a.real**2 + a.imag**2
    upper, lower = n[0] + n[1], n[2] + n[3]
    if upper == 0.0:
        raise EmptyPair("upper pair (sites 1, 2) is empty")
    if lower == 0.0:
        raise EmptyPair("lower pair (sites 3, 4) is empty")
    theta = np.angle(a)

    def rel(i, j):
        if n[i] == 0.0 or n[j] == 0.0:
            return 0.0
        return _wrap(float(theta[i] - theta[j]))

    return ReducedState(
        s_u=float((n[1] - n[0]) / upper),
        s_d=float((n[2] - n[3]) / lower),
        theta_u=rel(1, 0),
        theta_d=rel(2, 3),
    )


def reduced_hamiltonian(r: ReducedState, K: float, U: float, phi: float) -> float:
    def well(s, theta):
        return -0.5 * K * math.sqrt(max(1.0 - s * s, 0.0)) * math.cos(theta + phi / 2) + U * s * s / 16

    return well(r.s_u, r.theta_u) + well(r.s_d, r.theta_d)


def critical_interaction(s_ui: float, theta_ui: float, phi: float) -> float:
    """(U/K) at the onset of self-trapping in the double-well approximation."""
    if s_ui == 0.0:
        raise ZeroImbalance("critical interaction diverges for zero initial imbalance")
    if abs(s_ui) > 1.0:
        raise ValueError(f"imbalance must lie in [-1, 1], got {s_ui}")
    return 8.0 * (1.0 + math.sqrt(1.0 - s_ui * s_ui) * math.cos(theta_ui + phi / 2)) / (s_ui * s_ui)

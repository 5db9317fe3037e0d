"""Four-site plaquette: parameters, mean-field state, energy and equations of motion.

Sites 1..4 sit at the corners (-x,+y), (+x,+y), (+x,-y), (-x,-y). The
x-bonds 1-2 and 3-4 carry the laser-assisted hopping K e^{+-i phi/2}; the
y-bonds 2-3 and 4-1 carry the bare hopping J. Units: hbar = 1, energies in
the same units as J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameters, InvalidState

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PlaquetteParams:
    K: float
    phi: float
    U: float = 0.0
    J: float = 1.0

    def __post_init__(self):
        for name in ("K", "phi", "U", "J"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.J <= 0:
            raise InvalidParameters(f"J must be positive, got {self.J}")
        if self.K < 0:
            raise InvalidParameters(f"K must be non-negative, got {self.K}")

    @property
    def peierls(self) -> complex:
        """K e^{i phi/2}, the hopping amplitude on the 1<-2 and 3<-4 bonds."""
        return complex(self.K * math.cos(self.phi / 2), self.K * math.sin(self.phi / 2))

    def replace(self, **changes) -> PlaquetteParams:
        values = {"K": self.K, "phi": self.phi, "U": self.U, "J": self.J}
        values.update(changes)
        return PlaquetteParams(**values)


def _as_amplitudes(psi) -> np.ndarray:
    arr = np.array(psi, dtype=np.complex128).reshape(-1)
    if arr.shape != (4,):
        raise InvalidState(f"expected four amplitudes, got shape {np.shape(psi)}")
    if not np.all(np.isfinite(arr)):
        raise InvalidState("amplitudes must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class State:
    """Four complex site amplitudes at time ``t``; unit norm within 1e-6."""

    psi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        arr = _as_amplitudes(self.psi)
        object.__setattr__(self, "psi", arr)
        object.__setattr__(self, "t", float(self.t))
        drift = abs(norm(arr) - 1.0)
        if drift > NORM_TOLERANCE:
            raise InvalidState(f"state norm deviates from 1 by {drift:.3g}")

    @classmethod
    def normalized(cls, psi, t: float = 0.0) -> State:
        arr = np.array(psi, dtype=np.complex128).reshape(-1)
        n = math.sqrt(norm(arr)) if arr.shape == (4,) else 0.0
        if n == 0.0 or not math.isfinite(n):
            raise InvalidState("cannot normalize a zero or non-finite state")
        return cls(arr / n, t)

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.t == other.t and bool(np.array_equal(self.psi, other.psi))

    def __hash__(self):
        return hash((self.t, self.psi.tobytes()))


class SiteOccupations(NamedTuple):
    n1: float
    n2: float
    n3: float
    n4: float


def norm(psi) -> float:
    """Total population sum |psi_j|^2 (not its square root)."""
    a = psi.psi if isinstance(psi, State) else np.asarray(psi)
    return float(np.sum(a.real**2 + a.imag**2))


def initial_state_paper() -> State:
    """The fixed initial condition (sqrt(0.5), 0, 0, -sqrt(0.5)) at t = 0."""
    s = math.sqrt(0.5)
    return State(np.array([s, 0.0, 0.0, -s], dtype=np.complex128), 0.0)


def occupations(state: State) -> SiteOccupations:
    a = state.psi
    return SiteOccupations(*(float(v) for v in a.real**2 + a.imag**2))


def hopping_matrix(params: PlaquetteParams) -> np.ndarray:
    """Single-particle matrix H with i dpsi/dt = H psi + U |psi|^2 psi."""
    k = params.peierls
    J = params.J
    return np.array(
        [
            [0, -k, 0, -J],
            [-k.conjugate(), 0, -J, 0],
            [0, -J, 0, -k],
            [-J, 0, -k.conjugate(), 0],
        ],
        dtype=np.complex128,
    )


def gpe_rhs(state: State, params: PlaquetteParams) -> np.ndarray:
    """Time derivatives d psi_j / dt of the coupled mean-field equations."""
    p = state.psi if isinstance(state, State) else np.asarray(state, dtype=np.complex128)
    k = params.peierls
    kc = k.conjugate()
    J, U = params.J, params.U
    n = p.real**2 + p.imag**2
    force = np.array(
        [
            -k * p[1] - J * p[3],
            -kc * p[0] - J * p[2],
            -k * p[3] - J * p[1],
            -kc * p[2] - J * p[0],
        ]
    )
    return -1j * (force + U * n * p)


def energy_batch(psi: np.ndarray, params: PlaquetteParams) -> np.ndarray:
    """Mean-field energy for an array of states with shape (..., 4)."""
    p = np.asarray(psi, dtype=np.complex128)
    k = params.peierls
    x_bonds = k * (np.conj(p[..., 0]) * p[..., 1] + np.conj(p[..., 2]) * p[..., 3])
    y_bonds = np.conj(p[..., 1]) * p[..., 2] + np.conj(p[..., 3]) * p[..., 0]
    n = p.real**2 + p.imag**2
    return (
        -2.0 * x_bonds.real
        - 2.0 * params.J * y_bonds.real
        + 0.5 * params.U * np.sum(n**2, axis=-1)
    )


def energy(state: State, params: PlaquetteParams) -> float:
    return float(energy_batch(state.psi, params))

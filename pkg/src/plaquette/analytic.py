"""Closed-form results for the non-interacting plaquette (U = 0).

For the initial state (sqrt(0.5), 0, 0, -sqrt(0.5)) the linear dynamics
lives on two modes with frequencies

    alpha = sqrt(K^2 + J^2 + 2 K J cos(phi/2))
    beta  = sqrt(K^2 + J^2 - 2 K J cos(phi/2))

and the orbit centre is a two-tone Lissajous-like curve. Whether it closes
is decided by the commensurability of alpha and beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateFrequency, DegenerateRatio, NonlinearUnsupported, NotPeriodic
from .model import PlaquetteParams, State

DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_DENOMINATOR = 64
_SQRT8 = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class ModeFrequencies:
    alpha: float
    beta: float

    @property
    def ratio(self) -> float:
        """alpha / beta; +inf when beta vanishes."""
        if self.beta == 0.0:
            return math.inf
        return self.alpha / self.beta


@dataclass(frozen=True)
class Periodic:
    p: int
    q: int
    error: float

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class QuasiPeriodic:
    """No p/q with q <= max_denominator lies within tolerance.

    ``best`` is the closest fraction found and ``error`` its distance.
    """

    best: Fraction
    error: float


Commensurability = Periodic | QuasiPeriodic


def _quarter_flux_sin2(phi):
    # sin^2(phi/4) after folding phi into [0, 2pi]; the map has period 4pi
    # and mirror symmetry about 2pi, so folding keeps mirrored inputs close.
    r = np.mod(phi, 4 * np.pi)
    r = np.where(r > 2 * np.pi, 4 * np.pi - r, r)
    return np.sin(r / 4) ** 2


def _frequencies(K, J, phi):
    s2 = _quarter_flux_sin2(phi)
    a2 = (K + J) ** 2 - 4 * K * J * s2
    b2 = (K - J) ** 2 + 4 * K * J * s2
    return np.sqrt(np.maximum(a2, 0.0)), np.sqrt(np.maximum(b2, 0.0))


def mode_frequencies(params: PlaquetteParams) -> ModeFrequencies:
    """The two linear-mode frequencies.

    Evaluated as (K +- J)^2 -+ 4KJ sin^2(phi/4), which equals the textbook
    K^2 + J^2 +- 2KJ cos(phi/2) but avoids cancellation when beta -> 0.
    """
    a, b = _frequencies(params.K, params.J, params.phi)
    return ModeFrequencies(float(a), float(b))


def _sin_over(omega, t):
    # sin(omega t) / omega with the omega -> 0 limit t
    return t * np.sinc(omega * t / np.pi)


def _require_linear(params):
    if params.U != 0.0:
        raise NonlinearUnsupported(f"closed form requires U = 0, got U = {params.U}")


def analytic_amplitudes(t, params: PlaquetteParams) -> np.ndarray:
    """Amplitudes at time(s) ``t``; returns shape t.shape + (4,)."""
    _require_linear(params)
    t = np.asarray(t, dtype=float)
    freqs = mode_frequencies(params)
    a, b = freqs.alpha, freqs.beta
    ku = params.peierls
    J = params.J
    half = 1.0 / _SQRT8
    ca, cb = np.cos(a * t), np.cos(b * t)
    # A = c1 sin(alpha t), B = c2 sin(beta t) with
    # c1 = i (J + K e^{i phi/2}) / (2 sqrt2 alpha), c2 likewise with J - K e^{..}
    A = 1j * (J + ku) / _SQRT8 * _sin_over(a, t)
    B = 1j * (J - ku) / _SQRT8 * _sin_over(b, t)
    return np.stack(
        [
            half * (ca + cb) - A - B,
            half * (cb - ca) - np.conj(A) + np.conj(B),
            half * (ca - cb) - A + B,
            -half * (ca + cb) - np.conj(A) - np.conj(B),
        ],
        axis=-1,
    )


def analytic_state(t: float, params: PlaquetteParams) -> State:
    """Exact state at time ``t`` starting from the fixed initial condition."""
    return State(analytic_amplitudes(float(t), params), t)


def closed_form_center(t, alpha, beta, k2_minus_j2, k_sin_half_phi):
    """Orbit centre as a function of the two mode frequencies.

    x_c = (K^2-J^2) S_a S_b - cos(alpha t) cos(beta t)
    y_c = K sin(phi/2) [cos(beta t) S_a - cos(alpha t) S_b]
    with S_w = sin(w t)/w. Exchanging alpha and beta with the prefactors
    fixed leaves x_c alone and flips the sign of y_c.
    """
    t = np.asarray(t, dtype=float)
    ca, cb = np.cos(alpha * t), np.cos(beta * t)
    sa, sb = _sin_over(alpha, t), _sin_over(beta, t)
    xc = k2_minus_j2 * sa * sb - ca * cb
    yc = k_sin_half_phi * (cb * sa - ca * sb)
    return xc, yc


def analytic_center(t, params: PlaquetteParams):
    """Exact (x_c, y_c) at time(s) ``t``; scalars in, floats out."""
    _require_linear(params)
    freqs = mode_frequencies(params)
    xc, yc = closed_form_center(
        t,
        freqs.alpha,
        freqs.beta,
        params.K**2 - params.J**2,
        params.K * math.sin(params.phi / 2),
    )
    if np.ndim(xc) == 0:
        return float(xc), float(yc)
    return xc, yc


def classify_commensurability(
    freqs: ModeFrequencies,
    tolerance: float = DEFAULT_TOLERANCE,
    max_denominator: int = DEFAULT_MAX_DENOMINATOR,
) -> Commensurability:
    """Smallest-denominator p/q within ``tolerance`` of alpha/beta."""
    if tolerance <= 0 or max_denominator < 1:
        raise ValueError("tolerance must be positive and max_denominator >= 1")
    if freqs.beta == 0.0 or freqs.alpha == 0.0:
        raise DegenerateFrequency(
            f"frequency ratio undefined for alpha={freqs.alpha}, beta={freqs.beta}"
        )
    ratio = freqs.alpha / freqs.beta
    target = Fraction(ratio)
    best = target.limit_denominator(max_denominator)
    best_err = abs(float(best) - ratio)
    for q in range(1, max_denominator + 1):
        cand = target.limit_denominator(q)
        err = abs(float(cand) - ratio)
        if err <= tolerance and cand.numerator > 0:
            return Periodic(cand.numerator, cand.denominator, err)
    return QuasiPeriodic(best, best_err)


def orbit_period(freqs: ModeFrequencies, comm: Commensurability) -> float:
    """Closure time 2 pi p / alpha of a periodic orbit."""
    if not isinstance(comm, Periodic):
        raise NotPeriodic("quasi-periodic orbits have no closure time")
    return 2 * math.pi * comm.p / freqs.alpha


class KRoots(list):
    """Solutions K > 0 of alpha/beta = r; ``degenerate`` marks r = 1 off the
    odd-pi lines, where only the excluded K = 0 solves the equation."""

    degenerate = False


class _AllK:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ALL_K"

    def __bool__(self):
        return True


ALL_K = _AllK()

_COS_ZERO = 1e-12


def find_k_for_ratio(r: float, phi: float, J: float = 1.0):
    """All K > 0 with alpha/beta = r at flux ``phi``.

    Solves (1 - r^2)(K^2 + J^2) + 2(1 + r^2) K J cos(phi/2) = 0 in closed
    form. Returns ``ALL_K`` when the equation is an identity (r = 1 with
    cos(phi/2) = 0), and an empty ``KRoots`` with ``degenerate`` set for
    r = 1 otherwise.
    """
    if not (r > 0 and math.isfinite(r)):
        raise ValueError(f"ratio must be positive and finite, got {r}")
    if not J > 0:
        raise ValueError(f"J must be positive, got {J}")
    c = math.cos(phi / 2)
    roots = KRoots()
    if r == 1.0:
        if abs(c) <= _COS_ZERO:
            return ALL_K
        roots.degenerate = True
        return roots
    # K^2 + 2 b J K + J^2 = 0
    b = (1 + r * r) * c / (1 - r * r)
    disc = b * b - 1.0
    if b >= 0 or disc < 0:
        return roots
    if disc == 0.0:
        roots.append(J)
        return roots
    big = J * (-b + math.sqrt(disc))
    roots.extend(sorted([J * J / big, big]))
    return roots


def frequency_map(phi_grid, k_over_j_grid):
    """(alpha, beta) on the grid (rows: phi, columns: K/J) at J = 1."""
    phi = np.asarray(phi_grid, dtype=float)[:, None]
    k = np.asarray(k_over_j_grid, dtype=float)[None, :]
    if phi.size == 0 or k.size == 0:
        raise ValueError("grids must be non-empty")
    if np.any(k <= 0):
        raise ValueError("K/J values must be positive")
    return _frequencies(k, 1.0, phi)


def ratio_map(phi_grid, k_over_j_grid) -> np.ndarray:
    """alpha/beta on the grid (rows: phi, columns: K/J) at J = 1.

    Cells with beta = 0 hold +inf.
    """
    a, b = frequency_map(phi_grid, k_over_j_grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(b > 0, a / np.where(b > 0, b, 1.0), np.inf)
    return out


def default_ratio_grids():
    """phi in [0, 4pi] (401 points) and K/J in (0, 4] (400 points)."""
    return np.linspace(0.0, 4 * np.pi, 401), np.arange(1, 401) * 0.01


def harper_frequencies(J_tilde: float, phi: float):
    """Two-tone frequencies of the four-site Harper plaquette, hopping J~."""
    if not J_tilde > 0:
        raise ValueError("J_tilde must be positive")
    c = math.cos(phi / 2)
    return J_tilde * math.sqrt(max(2 + 2 * c, 0.0)), J_tilde * math.sqrt(max(2 - 2 * c, 0.0))

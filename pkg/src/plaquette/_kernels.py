"""Compiled inner loops for the time stepping.

Amplitudes are carried as separate real/imaginary float64 arrays. Every
kernel treats sites (1, 4) and (2, 3) with mirrored operation order, so a
state with psi4 = -psi1, psi3 = -psi2 stays exactly on that subspace at
phi = 0 (the subspace is invariant but transversally unstable).
"""

import math
from fractions import Fraction

import numpy as np
from numba import njit

# Yoshida triple-jump built on the symmetric Strang step
# L(h/2) N(h) L(h/2); the inner linear half-steps are merged.
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1
SPLIT4_LINEAR = np.array([_W1 / 2, (_W1 + _W0) / 2, (_W0 + _W1) / 2, _W1 / 2])
SPLIT4_NONLINEAR = np.array([_W1, _W0, _W1])


def _sin_over(omega, tau):
    # sin(omega tau) / omega, continuous through omega = 0
    return tau * np.sinc(omega * tau / np.pi)


def linear_flow_coefficients(alpha, beta, taus):
    """Coefficients (c+, c-, s+, s-) of exp(-i H tau) for each tau.

    H**2 = alpha**2 on the +1 eigenspace of the diagonal swap X
    (1<->3, 2<->4) and beta**2 on the -1 eigenspace, so
    exp(-i H tau) = c+ I + c- X - i H (s+ I + s- X).
    """
    taus = np.asarray(taus, dtype=float)
    ca, cb = np.cos(alpha * taus), np.cos(beta * taus)
    sa, sb = _sin_over(alpha, taus), _sin_over(beta, taus)
    return np.ascontiguousarray(
        np.stack([(ca + cb) / 2, (ca - cb) / 2, (sa + sb) / 2, (sa - sb) / 2], axis=1)
    )


def unitarity_defects(coef, J, kr, ki):
    """Exact (P - 1, Q) with M^dagger M = P I + Q X for each coefficient row.

    The rounded coefficients make every linear sub-step slightly
    non-unitary by the same amount; left alone that bias grows linearly
    with the number of steps. Evaluated in rational arithmetic against the
    hopping matrix the kernel actually applies (H^2 = a I + b X with
    a = kr^2 + ki^2 + J^2, b = 2 J kr).
    """
    fkr, fki, fJ = Fraction(kr), Fraction(ki), Fraction(J)
    a = fkr * fkr + fki * fki + fJ * fJ
    b = 2 * fJ * fkr
    out = np.empty((coef.shape[0], 2))
    for n, row in enumerate(coef):
        cp, cm, sp, sm = (Fraction(float(v)) for v in row)
        ss = sp * sp + sm * sm
        P = cp * cp + cm * cm + a * ss + 2 * b * sp * sm
        Q = 2 * cp * cm + b * ss + 2 * a * sp * sm
        out[n, 0] = float(P - 1)
        out[n, 1] = float(Q)
    return out


@njit(cache=True, nogil=True)
def _hop(K, J, kr, ki, xr, xi, hr, hi):
    # h = H x with the hopping matrix; (kr, ki) = K e^{i phi/2}
    hr[0] = -(kr * xr[1] - ki * xi[1]) - J * xr[3]
    hi[0] = -(kr * xi[1] + ki * xr[1]) - J * xi[3]
    hr[3] = -(kr * xr[2] + ki * xi[2]) - J * xr[0]
    hi[3] = -(kr * xi[2] - ki * xr[2]) - J * xi[0]
    hr[1] = -(kr * xr[0] + ki * xi[0]) - J * xr[2]
    hi[1] = -(kr * xi[0] - ki * xr[0]) - J * xi[2]
    hr[2] = -(kr * xr[3] - ki * xi[3]) - J * xr[1]
    hi[2] = -(kr * xi[3] + ki * xr[3]) - J * xi[1]


@njit(cache=True, nogil=True)
def _rhs(K, J, kr, ki, U, xr, xi, dr, di, hr, hi):
    # d psi/dt = -i (H psi + U |psi|^2 psi)
    _hop(K, J, kr, ki, xr, xi, hr, hi)
    for j in range(4):
        g = U * (xr[j] * xr[j] + xi[j] * xi[j])
        hr[j] += g * xr[j]
        hi[j] += g * xi[j]
        dr[j] = hi[j]
        di[j] = -hr[j]


@njit(cache=True, nogil=True)
def _linear(K, J, kr, ki, coef, defect, s, pr, pi, wr, wi, hr, hi):
    cp, cm, sp, sm = coef[s, 0], coef[s, 1], coef[s, 2], coef[s, 3]
    # relative norm gain of this sub-step, known from the coefficients
    xo = 2.0 * ((pr[0] * pr[2] + pi[0] * pi[2]) + (pr[1] * pr[3] + pi[1] * pi[3]))
    gain = defect[s, 0] + defect[s, 1] * xo
    for j in range(4):
        x = (j + 2) % 4
        wr[j] = sp * pr[j] + sm * pr[x]
        wi[j] = sp * pi[j] + sm * pi[x]
    _hop(K, J, kr, ki, wr, wi, hr, hi)
    for j in range(4):
        x = (j + 2) % 4
        ar = cp * pr[j] + cm * pr[x]
        ai = cp * pi[j] + cm * pi[x]
        # p must stay intact until every row is done; w is free after _hop
        wr[j] = ar + hi[j]
        wi[j] = ai - hr[j]
    for j in range(4):
        pr[j] = wr[j]
        pi[j] = wi[j]
    return gain


@njit(cache=True, nogil=True)
def _nonlinear(U, tau, pr, pi):
    for j in range(4):
        theta = -U * (pr[j] * pr[j] + pi[j] * pi[j]) * tau
        c = math.cos(theta)
        s = math.sin(theta)
        a = pr[j]
        pr[j] = a * c - pi[j] * s
        pi[j] = a * s + pi[j] * c


@njit(cache=True, nogil=True)
def _scale(pr, pi, g):
    for j in range(4):
        pr[j] += g * pr[j]
        pi[j] += g * pi[j]


# accumulated norm gain is removed once it is well above one ulp, so the
# correction is not lost to rounding
_GAIN_FLUSH = 1e-13


@njit(cache=True, nogil=True)
def _renorm(pr, pi):
    n = 0.0
    for j in range(4):
        n += pr[j] * pr[j] + pi[j] * pi[j]
    f = 1.0 / math.sqrt(n)
    for j in range(4):
        pr[j] *= f
        pi[j] *= f


@njit(cache=True, nogil=True)
def _finite(pr, pi):
    for j in range(4):
        if not (math.isfinite(pr[j]) and math.isfinite(pi[j])):
            return False
    return True


@njit(cache=True, nogil=True)
def evolve_split4(psi0, K, J, kr, ki, U, dt, nsteps, stride, coef, defect, nl, renormalize, out):
    """Fourth-order split-step evolution; writes samples into ``out``.

    Returns the number of rows written, or -(row + 1) on a non-finite state.
    """
    pr = psi0.real.copy()
    pi = psi0.imag.copy()
    wr = np.empty(4)
    wi = np.empty(4)
    hr = np.empty(4)
    hi = np.empty(4)
    nsub = nl.shape[0]
    for j in range(4):
        out[0, j] = complex(pr[j], pi[j])
    row = 1
    gain = 0.0
    for step in range(1, nsteps + 1):
        for s in range(nsub):
            gain += _linear(K, J, kr, ki, coef, defect, s, pr, pi, wr, wi, hr, hi)
            _nonlinear(U, nl[s] * dt, pr, pi)
        gain += _linear(K, J, kr, ki, coef, defect, nsub, pr, pi, wr, wi, hr, hi)
        if abs(gain) > _GAIN_FLUSH:
            _scale(pr, pi, -0.5 * gain)
            gain = 0.0
        if renormalize:
            _renorm(pr, pi)
        if step % stride == 0 or step == nsteps:
            if not _finite(pr, pi):
                return -(row + 1)
            for j in range(4):
                out[row, j] = complex(pr[j], pi[j])
            row += 1
    return row


@njit(cache=True, nogil=True)
def evolve_rk4(psi0, K, J, kr, ki, U, dt, nsteps, stride, renormalize, out):
    """Classical fourth-order Runge-Kutta over the full right-hand side."""
    pr = psi0.real.copy()
    pi = psi0.imag.copy()
    k1r = np.empty(4)
    k1i = np.empty(4)
    k2r = np.empty(4)
    k2i = np.empty(4)
    k3r = np.empty(4)
    k3i = np.empty(4)
    k4r = np.empty(4)
    k4i = np.empty(4)
    tr = np.empty(4)
    ti = np.empty(4)
    hr = np.empty(4)
    hi = np.empty(4)
    half = 0.5 * dt
    sixth = dt / 6.0
    for j in range(4):
        out[0, j] = complex(pr[j], pi[j])
    row = 1
    for step in range(1, nsteps + 1):
        _rhs(K, J, kr, ki, U, pr, pi, k1r, k1i, hr, hi)
        for j in range(4):
            tr[j] = pr[j] + half * k1r[j]
            ti[j] = pi[j] + half * k1i[j]
        _rhs(K, J, kr, ki, U, tr, ti, k2r, k2i, hr, hi)
        for j in range(4):
            tr[j] = pr[j] + half * k2r[j]
            ti[j] = pi[j] + half * k2i[j]
        _rhs(K, J, kr, ki, U, tr, ti, k3r, k3i, hr, hi)
        for j in range(4):
            tr[j] = pr[j] + dt * k3r[j]
            ti[j] = pi[j] + dt * k3i[j]
        _rhs(K, J, kr, ki, U, tr, ti, k4r, k4i, hr, hi)
        for j in range(4):
            pr[j] += sixth * (k1r[j] + 2.0 * k2r[j] + 2.0 * k3r[j] + k4r[j])
            pi[j] += sixth * (k1i[j] + 2.0 * k2i[j] + 2.0 * k3i[j] + k4i[j])
        if renormalize:
            _renorm(pr, pi)
        if step % stride == 0 or step == nsteps:
            if not _finite(pr, pi):
                return -(row + 1)
            for j in range(4):
                out[row, j] = complex(pr[j], pi[j])
            row += 1
    return row

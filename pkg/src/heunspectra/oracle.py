"""Independent reference computations for testing the spectral solver.

Everything here works directly with the physical differential equations
(built from scratch, not through the Heun reduction): local Frobenius
seeding at a singular point, direct numerical integration, and simple
one-dimensional Newton root finding.  The results serve as an oracle for
the series/reduction/solver pipeline, so no code from the other modules
is reused.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NoConvergence

__all__ = [
    "frobenius_seed",
    "integrate_ode",
    "angular_eigenvalue",
    "schwarzschild_qnm",
    "schwarzschild_qnm_modes",
]


# ---------------------------------------------------------------------------
# Generic Frobenius machinery
# ---------------------------------------------------------------------------


def _taylor_coeffs(f: Callable[[complex], complex], x0: complex,
                   n: int, radius: float = 0.05) -> np.ndarray:
    """Taylor coefficients of an analytic f about x0 via sampling on a
    circle (discrete Cauchy integral)."""
    m = max(4 * n, 64)
    ang = 2.0 * math.pi * np.arange(m) / m
    ring = x0 + radius * np.exp(1j * ang)
    vals = np.array([f(x) for x in ring], dtype=complex)
    coef = np.fft.fft(vals) / m
    return coef[:n] / radius ** np.arange(n)


def frobenius_seed(
    p: Callable[[complex], complex],
    q: Callable[[complex], complex],
    x0: complex,
    rho: complex,
    n_terms: int = 14,
    radius: float = 0.05,
):
    """Local Frobenius solution w = (x-x0)**rho * sum d_k (x-x0)**k of
    w'' + p w' + q w = 0 about a regular singular point x0.

    ``rho`` must be an indicial root.  Returns a callable giving (w, w')
    at points near x0.  A(x) = (x-x0) p and B(x) = (x-x0)**2 q must be
    analytic at x0.
    """
    A = _taylor_coeffs(lambda x: (x - x0) * p(x), x0, n_terms + 1, radius)
    B = _taylor_coeffs(lambda x: (x - x0) ** 2 * q(x), x0, n_terms + 1, radius)

    def indicial(r):
        return r * (r - 1.0) + A[0] * r + B[0]

    if abs(indicial(rho)) > 1e-8 * max(1.0, abs(rho) ** 2):
        raise ValueError(f"rho={rho} is not an indicial root "
                         f"(residual {abs(indicial(rho)):.3g})")

    d = np.zeros(n_terms, dtype=complex)
    d[0] = 1.0
    for k in range(1, n_terms):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += ((rho + k - j) * A[j] + B[j]) * d[k - j]
        denom = indicial(rho + k)
        if abs(denom) < 1e-12:
            raise ValueError(f"indicial degeneracy at offset {k}")
        d[k] = -acc / denom

    def evaluate(x: complex):
        t = complex(x) - x0
        poly = 0.0 + 0.0j
        dpoly = 0.0 + 0.0j
        for k in range(n_terms - 1, -1, -1):
            dpoly = dpoly * t + (k * d[k] if k else 0.0)
            poly = poly * t + d[k]
        dpoly /= t
        pref = t ** rho
        w = pref * poly
        wp = pref * (rho / t * poly + dpoly)
        return w, wp

    return evaluate


def integrate_ode(
    p: Callable[[complex], complex],
    q: Callable[[complex], complex],
    x_from: complex,
    x_to: complex,
    w0: complex,
    wp0: complex,
    rtol: float = 1e-12,
):
    """Integrate w'' + p w' + q w = 0 along the straight segment from
    x_from to x_to; returns (w, w') at x_to."""
    seg = complex(x_to) - complex(x_from)

    def rhs(t, y):
        x = x_from + t * seg
        return [seg * y[1], seg * (-p(x) * y[1] - q(x) * y[0])]

    sol = solve_ivp(rhs, (0.0, 1.0), [complex(w0), complex(wp0)],
                    method="DOP853", rtol=rtol, atol=1e-300)
    if not sol.success:
        raise NoConvergence(f"integration {x_from} -> {x_to} failed: "
                            f"{sol.message}")
    return complex(sol.y[0, -1]), complex(sol.y[1, -1])


# ---------------------------------------------------------------------------
# Angular eigenvalue
# ---------------------------------------------------------------------------


def _angular_pq(a: float, s: int, m: int, omega: complex, E: complex):
    """Coefficients of the angular equation in u = cos(theta):
    ((1-u^2) S')' + W S = 0 written as S'' + p S' + q S = 0."""
    c = a * omega

    def p(u):
        return -2.0 * u / (1.0 - u * u)

    def q(u):
        W = ((c * u) ** 2 + 2.0 * c * s * u + E - s * s
             - (m + s * u) ** 2 / (1.0 - u * u))
        return W / (1.0 - u * u)

    return p, q


def _angular_mismatch(a, s, m, omega, E, u_match=0.3, eps=1e-3) -> complex:
    # u_match is off-center: at u = 0 the mismatch is blind to odd-parity
    # eigenfunctions of the non-rotating, m = 0 equation
    p, q = _angular_pq(a, s, m, omega, E)
    out = []
    for pole in (+1, -1):
        rho = 0.5 * abs(m + s * pole)
        seed = frobenius_seed(p, q, pole, rho, n_terms=16, radius=0.02)
        x1 = pole * (1.0 - eps)
        w, wp = seed(x1)
        w, wp = integrate_ode(p, q, x1, u_match, w, wp)
        out.append(wp / w)
    return out[0] - out[1]


def angular_eigenvalue(
    cfg,
    omega: complex,
    l: int | None = None,
    tol: float = 1e-11,
    max_iter: int = 40,
) -> complex:
    """Eigenvalue E of the angular equation, found by shooting from both
    poles and Newton iteration on the off-center log-derivative mismatch.

    ``cfg`` carries a, s, m (and l unless given explicitly).  Seeded at
    the closed-form value l(l+1) of the non-rotating limit.
    """
    a, s, m = cfg.a, cfg.s, cfg.m
    if l is None:
        l = cfg.l
    E = complex(l * (l + 1))
    h = 1e-6
    for _ in range(max_iter):
        f = _angular_mismatch(a, s, m, omega, E)
        if abs(f) < tol:
            return E
        step = h * max(1.0, abs(E))
        fp = _angular_mismatch(a, s, m, omega, E + step)
        dE = -f * step / (fp - f)
        if abs(dE) > 2.0:
            dE *= 2.0 / abs(dE)
        E = E + dE
        if abs(dE) < tol * max(1.0, abs(E)):
            return E
    raise NoConvergence(f"angular eigenvalue search stalled at E={E}")


# ---------------------------------------------------------------------------
# Non-rotating ringdown frequencies
# ---------------------------------------------------------------------------


def _radial_pq_schw(M: float, s: int, omega: complex, E: complex):
    """Non-rotating radial equation R'' + p R' + q R = 0 in r, with
    time dependence exp(+i omega t)."""
    lam = E - s * (s + 1)

    def Delta(r):
        return r * (r - 2.0 * M)

    def p(r):
        return (s + 1) * (2.0 * r - 2.0 * M) / Delta(r)

    def q(r):
        K = -omega * r * r
        return ((K * K - 1j * s * (2.0 * r - 2.0 * M) * K) / Delta(r)
                - 4j * s * omega * r - lam) / Delta(r)

    return p, q


def _qnm_mismatch(M, s, omega, E, r_match=None, r_far=None, eps=5e-3) -> complex:
    """Log-derivative mismatch at r_match between the horizon-regular
    solution (ingoing at the horizon for damped modes) and the far
    solution carrying only the outgoing radiative behavior."""
    if r_match is None:
        r_match = 8.0 * M
    if r_far is None:
        r_far = 80.0 * M
    p, q = _radial_pq_schw(M, s, omega, E)
    rp = 2.0 * M

    # horizon side: exponent -s + i K(r+)/ (r- - r+) = -s - i omega r+ ... /
    # built from the indicial equation at r = r+ directly
    k_plus = -omega * rp * rp
    d = -rp  # r_minus - r_plus for a = 0
    rho = -s + 1j * k_plus / d
    seed = frobenius_seed(p, q, rp, rho, n_terms=16, radius=0.02 * M)
    r1 = rp + eps * M
    w, wp = seed(r1)
    w, wp = integrate_ode(p, q, r1, r_match, w, wp)
    left = wp / w

    # far side: R ~ exp(-i omega r) r^(-2 i M omega - (2s+1)); integrate
    # inward from a point rotated into the direction of steepest decay
    theta = -0.5 * math.pi - cmath.phase(omega)
    r_start = r_match + (r_far - r_match) * cmath.exp(1j * theta)
    nu = -2j * M * omega - (2 * s + 1)
    w = cmath.exp(-1j * omega * r_start) * r_start ** nu
    wp = (-1j * omega + nu / r_start) * w
    w, wp = integrate_ode(p, q, r_start, r_match, w, wp)
    right = wp / w
    return left - right


def schwarzschild_qnm(l: int, n: int, s: int = -1, M: float = 0.5,
                      tol: float = 1e-10) -> complex:
    """Ringdown frequency of overtone n for the non-rotating hole."""
    modes = schwarzschild_qnm_modes(M, s, l, n_modes=n + 1, tol=tol)
    if len(modes) <= n:
        raise NoConvergence(f"found only {len(modes)} modes for l={l}")
    return modes[n]


def schwarzschild_qnm_modes(
    M: float,
    s: int,
    l: int,
    n_modes: int = 2,
    seeds: Sequence[complex] | None = None,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> list[complex]:
    """Lowest ringdown frequencies of the non-rotating hole, by Newton
    iteration on the shooting mismatch over a seed grid.

    In the exp(+i omega t) convention damped modes have Im(omega) > 0.
    Returns frequencies sorted by increasing |Im(omega)| (overtone order).
    """
    E = complex(l * (l + 1))
    if seeds is None:
        re = np.linspace(0.3, 1.3, 6) / (2.0 * M)
        im = np.linspace(0.05, 0.9, 5) / (2.0 * M)
        seeds = [complex(x, y) for x in re for y in im]

    roots: list[complex] = []
    for seed_om in seeds:
        om = complex(seed_om)
        ok = False
        for _ in range(max_iter):
            f = _qnm_mismatch(M, s, om, E)
            step = 1e-7 * max(1.0, abs(om))
            fp = _qnm_mismatch(M, s, om + step, E)
            dom = -f * step / (fp - f)
            if abs(dom) > 0.3 / (2.0 * M):
                dom *= 0.3 / (2.0 * M) / abs(dom)
            om = om + dom
            if abs(dom) < tol:
                ok = True
                break
        if not ok or om.imag <= 0 or om.real <= 0:
            continue
        if abs(_qnm_mismatch(M, s, om, E)) > 1e-6:
            continue
        if all(abs(om - r) > 1e-6 for r in roots):
            roots.append(om)
    roots.sort(key=lambda w: abs(w.imag))
    return roots[:n_modes]

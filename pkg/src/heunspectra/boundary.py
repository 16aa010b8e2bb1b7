"""Spectral boundary conditions: angular regularity residual, jet-mode
polynomial/tridiagonal conditions, radial branch validity, and the radial
connection residual.

Kinds of modes:
  * QNM          — angular regularity at both poles plus the black-hole
                   radial branch (R2): waves falling into the horizon and
                   decaying outgoing radiation far away.
  * QUASI_BOUND  — same angular condition, opposite radial branch (R1).
  * JET_PRIMARY  — polynomial truncation of the angular solution
                   (the series terminates), no radial condition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    AlphaZero,
    BranchInvalid,
    EvaluationFailure,
    PoleAtMatchPoint,
)
from .heun import MapleHeunParams, canonical_to_maple, eval_series
from .teukolsky import (
    PhysicalConfig,
    SpectralUnknowns,
    build_tae_solution,
    build_tre_solution,
    horizons,
)

__all__ = [
    "BoundaryKind",
    "SpectralResidual",
    "angular_qnm_residual",
    "jet_mode_conditions",
    "maple_series_coefficients",
    "radial_branch_valid",
    "radial_residual",
]


class BoundaryKind(Enum):
    QNM = "qnm"
    JET_PRIMARY = "jet"
    QUASI_BOUND = "quasi_bound"

    @property
    def radial_branch(self) -> str | None:
        if self is BoundaryKind.QNM:
            return "R2"
        if self is BoundaryKind.QUASI_BOUND:
            return "R1"
        return None


@dataclass(frozen=True)
class SpectralResidual:
    angular: complex
    radial: complex
    diagnostics: dict


# ---------------------------------------------------------------------------
# Angular regularity (two-point connection at the poles)
# ---------------------------------------------------------------------------


def angular_qnm_residual(
    cfg: PhysicalConfig,
    unk: SpectralUnknowns,
    z1: float = 0.75,
    series_tol: float = 1e-12,
) -> complex:
    """Logarithmic-derivative mismatch of the two pole-anchored angular
    solutions, evaluated at one common physical point.

    The anchor u=+1 solution is evaluated at its Heun variable z1 and the
    u=-1 solution at z2 = 1 - z1 (the same point on the sphere).  The
    residual is

        W = L1(z1) + H1'/H1(z1) + L2(z2) + H2'/H2(z2)

    where L_i are the d/dz log-derivatives of the s-homotopic prefactors;
    the opposite signs of dz/du for the two anchors turn the sum into the
    difference of the physical log-derivatives, so W = 0 iff the two local
    solutions are proportional, i.e. iff the mode is regular at both poles.
    """
    if not 0.0 < z1 < 1.0:
        raise ValueError("z1 must lie strictly between the singular points")
    z2 = 1.0 - z1
    total = 0.0 + 0.0j
    for anchor, zm in ((+1, z1), (-1, z2)):
        sol = build_tae_solution(cfg, unk, anchor)
        try:
            ev = eval_series(sol.params, zm, tol=series_tol)
        except Exception as exc:  # noqa: BLE001 - rewrap with context
            raise EvaluationFailure(
                f"angular evaluation failed at anchor {anchor}: {exc}"
            ) from exc
        if abs(ev.value) < 1e3 * max(ev.err_estimate, 1e-280):
            raise PoleAtMatchPoint(
                f"Heun factor vanishes at matching point z={zm} "
                f"(anchor {anchor}); the residual has a pole here, not a root"
            )
        total += sol.prefactor_logderiv_z(zm) + ev.derivative / ev.value
    return total


# ---------------------------------------------------------------------------
# Jet modes: polynomial truncation of the angular series
# ---------------------------------------------------------------------------


def _maple_mu_nu(p: MapleHeunParams) -> tuple[complex, complex]:
    """Zero- and one-residue combinations entering the series recurrence of
    the five-parameter form."""
    a, b, g, d, e = p.alpha, p.beta, p.gamma, p.delta, p.eta
    mu = 0.5 * (a - b - g + a * b - b * g) - e
    nu = 0.5 * (a + b + g + a * g + b * g) + d + e
    return mu, nu


def _maple_recurrence_AB(p: MapleHeunParams, n: int) -> tuple[complex, complex]:
    """Coefficients of the three-term recurrence
    (n+1)(n+1+beta) a_{n+1} = A_n a_n + B_n a_{n-1}."""
    mu, nu = _maple_mu_nu(p)
    A_n = n * (n - 1) + n * (p.beta + p.gamma + 2.0 - p.alpha) - mu
    B_n = p.alpha * (n - 1) + mu + nu
    return A_n, B_n


def maple_series_coefficients(p: MapleHeunParams, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients of the five-parameter-form
    solution normalized to 1 at the origin."""
    a = np.zeros(count, dtype=complex)
    a[0] = 1.0
    for n in range(count - 1):
        denom = (n + 1) * (n + 1 + p.beta)
        if abs(denom) < 1e-14:
            raise ZeroDivisionError(f"degenerate beta at order {n + 1}")
        A_n, B_n = _maple_recurrence_AB(p, n)
        acc = A_n * a[n]
        if n >= 1:
            acc += B_n * a[n - 1]
        a[n + 1] = acc / denom
    return a


def jet_maple_params(
    cfg: PhysicalConfig,
    unk: SpectralUnknowns,
    N: int,
    anchor: int = +1,
) -> MapleHeunParams:
    """Five-parameter-form parameters of the angular solution in the gauge
    where a degree-N polynomial truncation is expressible.

    The polynomial (jet) boundary condition encodes angular singularity:
    the solution is regular at the anchor but takes the singular
    (non-positive) indicial branch at the opposite pole, and the
    exponential split may use either square-root branch.  delta/alpha and
    (beta+gamma)/2 are gauge-discrete constants, so only specific N can
    make c1 = delta/alpha + (beta+gamma)/2 + N + 1 vanish; between the two
    square-root branches the one minimizing |c1| is returned.
    """
    from ._reduction import indicial_exponents, reduce_to_canonical

    if anchor not in (+1, -1):
        raise ValueError("anchor must be +1 or -1")
    ode = _tae_ode_for_jets(cfg, unk, anchor)
    (r0a, r0b), (r1a, r1b) = indicial_exponents(ode)
    rho0 = r0a if r0a.real >= r0b.real else r0b  # regular at the anchor
    rho1 = r1a if r1a.real <= r1b.real else r1b  # singular opposite pole
    red = reduce_to_canonical(ode, rho0, rho1)
    mp = canonical_to_maple(red.params)
    best = None
    for alpha in (mp.alpha, -mp.alpha):
        cand = MapleHeunParams(alpha, mp.beta, mp.gamma, mp.delta, mp.eta)
        try:
            c1, _ = jet_conditions_from_params(cand, N)
        except AlphaZero as exc:
            raise AlphaZero(
                "c1 is undefined at alpha = 0 (a*omega = 0)"
            ) from exc
        if best is None or abs(c1) < best[0] - 1e-12:
            best = (abs(c1), cand)
    return best[1]


def _tae_ode_for_jets(cfg, unk, anchor):
    # reuse the angular ODE assembly from the builder module
    from .teukolsky import _tae_ode

    return _tae_ode(cfg, unk.omega, unk.E, anchor)


def jet_mode_conditions(
    cfg: PhysicalConfig,
    unk: SpectralUnknowns,
    N: int,
    anchor: int = +1,
) -> tuple[complex, complex]:
    """The two conditions for a polynomial angular solution of degree N.

    Returns (c1, detvalue) on the five-parameter-form parameters of the
    anchored angular Heun factor in the truncating gauge:

        c1       = delta/alpha + (beta+gamma)/2 + N + 1
        detvalue = the (N+1)x(N+1) tridiagonal determinant of the
                   truncation system, via the three-term recursion
                   D_k = A_k D_{k-1} + k (k+beta) B_k D_{k-2}.

    c1 = 0 makes the recurrence's forcing term B_{N+1} vanish; detvalue = 0
    then makes the coefficient a_{N+1} (and hence the whole tail) vanish,
    so the series truncates to a polynomial of degree <= N.  c1 takes
    discrete gauge-determined values, so it acts as a selection rule on N
    while detvalue = 0 carries the (omega, E) dependence.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    return jet_conditions_from_params(jet_maple_params(cfg, unk, N, anchor), N)


def jet_conditions_from_params(p: MapleHeunParams, N: int) -> tuple[complex, complex]:
    """Truncation conditions evaluated directly on five-parameter-form
    parameters (see jet_mode_conditions)."""
    if abs(p.alpha) < 1e-14:
        raise AlphaZero("c1 is undefined at alpha = 0")
    c1 = p.delta / p.alpha + 0.5 * (p.beta + p.gamma) + N + 1.0

    # determinant recursion with scaling against overflow for large N
    d_prev2 = 1.0 + 0.0j  # D_{-1}
    A0, _ = _maple_recurrence_AB(p, 0)
    d_prev = A0  # D_0
    scale = 0.0  # log-magnitude factored out of both running values
    for k in range(1, N + 1):
        A_k, B_k = _maple_recurrence_AB(p, k)
        d_cur = A_k * d_prev + k * (k + p.beta) * B_k * d_prev2
        mag = max(abs(d_cur), abs(d_prev))
        if mag > 1e100:
            d_cur /= mag
            d_prev /= mag
            scale += math.log(mag)
        d_prev2, d_prev = d_prev, d_cur
    detvalue = d_prev * cmath.exp(min(scale, 600.0))
    return complex(c1), complex(detvalue)


# ---------------------------------------------------------------------------
# Radial branch validity
# ---------------------------------------------------------------------------


def radial_branch_valid(
    omega: complex,
    cfg: PhysicalConfig,
    branch: str,
    r_probe: complex,
) -> bool:
    """Whether the requested radial branch decays along the probe ray.

    R2 (black-hole boundary condition) needs sin(arg w + arg r) < 0 on the
    probe ray; R1 (quasi-bound) needs it > 0.  Both exclude frequencies
    with Re(w) in the rotation-induced interval (-m a/(2 M r_plus), 0),
    which is empty at a = 0.
    """
    if branch not in ("R1", "R2"):
        raise ValueError(f"unknown branch {branch!r}")
    omega = complex(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    h = horizons(cfg)
    lo = -cfg.m * cfg.a / (2.0 * cfg.M * h.r_plus)
    lo, hi = min(lo, 0.0), max(lo, 0.0)
    if lo < omega.real < hi:
        return False
    sgn = math.sin(cmath.phase(omega) + cmath.phase(complex(r_probe)))
    return sgn < 0 if branch == "R2" else sgn > 0


# ---------------------------------------------------------------------------
# Radial connection residual
# ---------------------------------------------------------------------------


def _far_ray_angle(omega: complex, branch: str) -> float:
    """Direction of the far-field integration ray, measured from the
    positive real r-axis.

    Steepest decay of the selected behavior would put the ray at
    -+ pi/2 - arg(omega); the angle is clipped away from the negative real
    axis (where the equation's singular points lie) as long as the clipped
    ray still decays.
    """
    if branch == "R2":
        theta = -0.5 * math.pi - cmath.phase(omega)
    else:
        theta = 0.5 * math.pi - cmath.phase(omega)
    margin = 0.35
    clipped = min(max(theta, -math.pi + margin), math.pi - margin)
    decay = math.sin(cmath.phase(omega) + clipped)
    if (branch == "R2" and decay < -0.1) or (branch == "R1" and decay > 0.1):
        return clipped
    return theta


def radial_residual(
    cfg: PhysicalConfig,
    unk: SpectralUnknowns,
    kind: BoundaryKind,
    r_match: float | None = None,
    r_far: float | None = None,
    series_tol: float = 1e-12,
) -> complex:
    """Logarithmic-derivative mismatch at r_match between the
    horizon-anchored solution and the far-field-selected solution.

    Horizon side: the anchored local solution (branch per kind) is summed
    near the horizon and continued outward through the Heun z-plane.  Far
    side: the decaying large-r behavior is integrated inward from r_far
    along its ray of steepest decay.  Zero mismatch means the two boundary
    conditions are connected by one global solution.
    """
    branch = kind.radial_branch
    if branch is None:
        raise ValueError(f"{kind} has no radial condition")
    if r_match is None:
        r_match = 4.0 * cfg.M
    if r_far is None:
        r_far = 40.0 * cfg.M
    omega, E = unk.omega, unk.E
    if not radial_branch_valid(omega, cfg, branch,
                               cmath.exp(1j * _far_ray_angle(omega, branch))):
        raise BranchInvalid(
            f"branch {branch} is not valid at omega={omega} for this config"
        )

    h = horizons(cfg)
    d = h.d
    sol = build_tre_solution(cfg, unk, branch)
    z_match = (r_match - h.r_plus) / d  # negative real
    try:
        if abs(z_match) < 0.8:
            ev = eval_series(sol.params, z_match, tol=series_tol)
        else:
            z0 = 0.3 * z_match / abs(z_match)
            ev = sol.heun_at(z_match, tol=series_tol, path=[z0])
        if abs(ev.value) == 0.0:
            raise PoleAtMatchPoint(f"Heun factor vanishes at z={z_match}")
        # d/dr log R = (1/d) * d/dz log(prefactor * H)
        left = (sol.prefactor_logderiv_z(z_match)
                + ev.derivative / ev.value) / d
    except (PoleAtMatchPoint, BranchInvalid):
        raise
    except Exception as exc:  # noqa: BLE001 - rewrap with context
        raise EvaluationFailure(f"horizon-side evaluation failed: {exc}") from exc

    right = _far_logderiv(cfg, omega, E, branch, r_match, r_far)
    return left - right


def _far_logderiv(cfg: PhysicalConfig, omega: complex, E: complex,
                  branch: str, r_match: float, r_far: float) -> complex:
    """(dR/dr)/R at r_match of the far-field-selected solution, obtained
    by inward integration from the steepest-decay ray (the discarded
    behavior decays inward, so the integration is self-correcting)."""
    from scipy.integrate import solve_ivp

    s = cfg.s
    M = cfg.M
    a = cfg.a
    h = horizons(cfg)
    theta = _far_ray_angle(omega, branch)
    r_start = r_match + (r_far - r_match) * cmath.exp(1j * theta)
    if branch == "R2":
        nu = -2j * M * omega - (2 * s + 1)
        w = cmath.exp(-1j * omega * r_start) * r_start ** nu
        wp = (-1j * omega + nu / r_start) * w
    else:
        nu = 2j * M * omega - 1.0
        w = cmath.exp(1j * omega * r_start) * r_start ** nu
        wp = (1j * omega + nu / r_start) * w
    lam = E - s * (s + 1) + (a * omega) ** 2 + 2.0 * a * cfg.m * omega

    def coeffs(r):
        Delta = (r - h.r_minus) * (r - h.r_plus)
        K = -omega * (r * r + a * a) - cfg.m * a
        dDelta = 2.0 * r - 2.0 * M
        p = (s + 1) * dDelta / Delta
        q = ((K * K - 1j * s * dDelta * K) / Delta
             - 4j * s * omega * r - lam) / Delta
        return p, q

    seg = complex(r_match) - r_start

    def rhs(t, y):
        r = r_start + t * seg
        p, q = coeffs(r)
        return [seg * y[1], seg * (-p * y[1] - q * y[0])]

    # renormalize midway to keep magnitudes tame over the decaying ray
    y = np.array([w, wp], dtype=complex)
    t0 = 0.0
    for t1 in (0.5, 1.0):
        sol = solve_ivp(rhs, (t0, t1), y, method="DOP853",
                        rtol=1e-12, atol=1e-300)
        if not sol.success:
            raise EvaluationFailure(f"far-side integration failed: {sol.message}")
        y = sol.y[:, -1]
        y = y / np.max(np.abs(y))
        t0 = t1
    if y[0] == 0:
        raise PoleAtMatchPoint("far solution vanishes at the matching radius")
    return complex(y[1] / y[0])

"""Angular and radial perturbation equations of a rotating black hole,
reduced to canonical confluent Heun form.

Conventions: time dependence exp(+i(omega t + m phi)), spin weight s
(electromagnetic case s = -1), mass M, rotation parameter a in [0, M),
horizons r_pm = M +- sqrt(M**2 - a**2).  The angular variable is
u = cos(theta); the angular equation has regular singular points at
u = -1, +1 and the radial one at the two horizons.

Angular reduction: z = (1 - sign*u)/2 maps the chosen anchor (u = sign)
to z = 0 and the opposite pole to z = 1.  Radial reduction:
z = (r - r_plus)/(r_minus - r_plus) puts the outer horizon at z = 0, the
inner at z = 1; the physical exterior r > r_plus is the negative real
z-axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._reduction import (
    PartialFractionODE,
    Reduction,
    indicial_exponents,
    reduce_to_canonical,
    split_over_z2_zm1_2,
    split_over_z_zm1,
)
from .errors import ExtremalNotSupported
from .heun import (
    CanonicalHeunParams,
    HeunEval,
    eval_continued,
    eval_series,
    series_coefficients,
)

__all__ = [
    "PhysicalConfig",
    "Horizons",
    "SpectralUnknowns",
    "LocalSolution",
    "horizons",
    "tre_coefficients",
    "build_tae_solution",
    "build_tre_solution",
]


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical inputs of one spectral problem (geometric units)."""

    M: float = 0.5
    a: float = 0.0
    s: int = -1
    l: int = 1
    m: int = 0

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be positive")
        if not 0 <= self.a < self.M:
            raise ExtremalNotSupported(
                f"a must satisfy 0 <= a < M, got a={self.a}, M={self.M}"
            )
        if self.l < abs(self.s):
            raise ValueError(f"l must be >= |s|, got l={self.l}, s={self.s}")
        if abs(self.m) > self.l:
            raise ValueError(f"|m| must be <= l, got m={self.m}, l={self.l}")


@dataclass(frozen=True)
class SpectralUnknowns:
    """The two complex unknowns of the coupled spectral problem."""

    omega: complex
    E: complex


@dataclass(frozen=True)
class Horizons:
    r_plus: float
    r_minus: float

    @property
    def d(self) -> float:
        """Horizon separation r_minus - r_plus (negative)."""
        return self.r_minus - self.r_plus


def horizons(cfg: PhysicalConfig) -> Horizons:
    root = math.sqrt(cfg.M * cfg.M - cfg.a * cfg.a)
    return Horizons(cfg.M + root, cfg.M - root)


def tre_coefficients(cfg: PhysicalConfig, unk: SpectralUnknowns, r: complex):
    """Pointwise coefficient data of the radial equation.

    Returns (K, lam, Delta) at radius r:
        K = -omega (r**2 + a**2) - m a
        lam = E - s(s+1) + a**2 omega**2 + 2 a m omega
        Delta = (r - r_minus)(r - r_plus)
    """
    h = horizons(cfg)
    r = complex(r)
    K = -unk.omega * (r * r + cfg.a ** 2) - cfg.m * cfg.a
    lam = (unk.E - cfg.s * (cfg.s + 1) + (cfg.a * unk.omega) ** 2
           + 2.0 * cfg.a * cfg.m * unk.omega)
    Delta = (r - h.r_minus) * (r - h.r_plus)
    return complex(K), complex(lam), complex(Delta)


def _tre_poly(cfg: PhysicalConfig, omega: complex, E: complex):
    """K as a quadratic in the horizon variable z = (r - r_plus)/d, plus
    the separation combination lam (coefficients for the Heun reduction)."""
    h = horizons(cfg)
    d = h.d
    k0 = -omega * (h.r_plus ** 2 + cfg.a ** 2) - cfg.m * cfg.a
    k1 = -2.0 * omega * h.r_plus * d
    k2 = -omega * d * d
    lam = E - cfg.s * (cfg.s + 1) + (cfg.a * omega) ** 2 + 2.0 * cfg.a * cfg.m * omega
    return (complex(k0), complex(k1), complex(k2)), complex(lam)


@dataclass(frozen=True)
class LocalSolution:
    """One local solution of an angular or radial equation in Heun form.

    The physical solution is prefactor * H(z(x)), with
    prefactor = z**rho0 (z-1)**rho1 exp(sigma z); ``x_to_z`` is affine,
    z = z_shift + z_scale * x.
    """

    params: CanonicalHeunParams
    rho0: complex
    rho1: complex
    sigma: complex
    z_shift: complex
    z_scale: complex
    equation: str  # "angular" | "radial"
    anchor: str  # "north"/"south" for angular, "horizon" for radial
    # coefficient callables of the pre-reduction ODE, for verification
    _ode: PartialFractionODE = field(repr=False, default=None)

    def x_to_z(self, x: complex) -> complex:
        return self.z_shift + self.z_scale * complex(x)

    @property
    def heun_params(self):
        """The Heun factor's parameters in the five-parameter convention."""
        from .heun import canonical_to_maple

        return canonical_to_maple(self.params)

    @property
    def prefactor_exponents(self) -> tuple[tuple[complex, complex], ...]:
        """(base point, exponent) pairs of the s-homotopic prefactor, in
        the Heun variable; the exp(sigma z) factor is carried separately."""
        return ((0.0 + 0.0j, self.rho0), (1.0 + 0.0j, self.rho1))

    def prefactor_logderiv_z(self, z: complex) -> complex:
        return self.rho0 / z + self.rho1 / (z - 1.0) + self.sigma

    def heun_at(self, z: complex, tol: float = 1e-12,
                path: Sequence[complex] | None = None) -> HeunEval:
        if path is not None:
            return eval_continued(self.params, z, path, tol=tol)
        return eval_series(self.params, z, tol=tol)

    def value_and_derivs(self, z: complex, tol: float = 1e-12,
                         path: Sequence[complex] | None = None):
        """Full solution value R(z) and dR/dz, including the prefactor."""
        ev = self.heun_at(z, tol=tol, path=path)
        pre = z ** self.rho0 * (z - 1.0) ** self.rho1 * cmath.exp(self.sigma * z)
        val = pre * ev.value
        der = pre * (ev.derivative + self.prefactor_logderiv_z(z) * ev.value)
        return val, der

    def logderiv_z(self, z: complex, tol: float = 1e-12,
                   path: Sequence[complex] | None = None) -> complex:
        """d/dz log(prefactor * H) at z."""
        ev = self.heun_at(z, tol=tol, path=path)
        return self.prefactor_logderiv_z(z) + ev.derivative / ev.value

    def verify(self, residual_tol: float = 1e-9, n_points: int = 20) -> float:
        """Check the Heun series against the source ODE on quasi-random
        points in the series disk; returns the worst relative residual."""
        if self._ode is None:
            raise ValueError("no source ODE attached to this solution")
        worst = 0.0
        for k in range(n_points):
            # Halton-like radial/angular sampling inside |z| < 0.6,
            # clear of both singular points
            r = 0.15 + 0.45 * _halton(k + 1, 2)
            th = 2.0 * math.pi * _halton(k + 1, 3)
            z = r * cmath.exp(1j * th)
            if abs(z - 1.0) < 0.2:
                continue
            worst = max(worst, self._residual_at(z))
        if worst > residual_tol:
            raise AssertionError(
                f"ODE residual {worst:.3g} exceeds tolerance {residual_tol}"
            )
        return worst

    def _residual_at(self, z: complex, n_coeffs: int = 220) -> float:
        """Relative residual of the source ODE at z, with the prefactor
        divided out:  H'' + (2 psi + p) H' + (psi' + psi**2 + p psi + q) H.

        H, H', H'' are summed directly from the series coefficients, so
        the check exercises both the coefficient recurrence and the
        reduction algebra against the original equation.
        """
        o = self._ode
        c = series_coefficients(self.params, n_coeffs)
        k = np.arange(n_coeffs)
        zp = z ** k
        H = np.sum(c * zp)
        H1 = np.sum(k[1:] * c[1:] * zp[:-1])
        H2 = np.sum(k[2:] * (k[2:] - 1) * c[2:] * zp[:-2])
        psi = self.prefactor_logderiv_z(z)
        dpsi = -self.rho0 / z ** 2 - self.rho1 / (z - 1.0) ** 2
        p = o.pc + o.p01 / z + o.p11 / (z - 1)
        q = (o.qc + o.q01 / z + o.q02 / z ** 2
             + o.q11 / (z - 1) + o.q12 / (z - 1) ** 2)
        a1 = 2.0 * psi + p
        a0 = dpsi + psi * psi + p * psi + q
        res = H2 + a1 * H1 + a0 * H
        # scale by the constituent magnitudes before cancellation, so a
        # residual at roundoff level registers as small even when the
        # individual terms cancel exactly (e.g. H identically constant)
        a0_mag = abs(dpsi) + abs(psi) ** 2 + abs(p * psi) + abs(q)
        scale = abs(H2) + abs(a1 * H1) + a0_mag * abs(H) + 1e-30
        return abs(res) / scale


def _halton(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


# ---------------------------------------------------------------------------
# Angular equation
# ---------------------------------------------------------------------------


def _tae_ode(cfg: PhysicalConfig, omega: complex, E: complex,
             sign: int) -> PartialFractionODE:
    """Angular equation in z = (1 - sign*u)/2, partial-fraction form."""
    c = cfg.a * omega
    st = cfg.s * sign
    # numerator polynomial of the regular part of the potential,
    # W_reg(z)/(z(z-1)) with W_reg = c^2(1-2z)^2 + 2 c st (1-2z) + E - s^2
    n_poly = (
        c * c + 2.0 * c * st + E - cfg.s * cfg.s,
        -4.0 * c * c - 4.0 * c * st,
        4.0 * c * c,
    )
    qc, q01n, q11n = split_over_z_zm1(n_poly)
    # singular part: -(A + B z)**2 / (4 z**2 (z-1)**2), A = m + st, B = -2 st
    A = cfg.m + st
    B = -2.0 * st
    g_poly = (A * A / 4.0, A * B / 2.0, B * B / 4.0)
    gc, g01, g02, g11, g12 = split_over_z2_zm1_2(g_poly)
    # q = -N/(z(z-1)) - g/(z^2(z-1)^2); the 1/(z(z-1)) split already returns
    # f(z)/(z(z-1)) = fc + f0/z + f1/(z-1) with fc the z^2 coefficient, so
    # q parts are negatives of the splits
    return PartialFractionODE(
        pc=0.0,
        p01=1.0,
        p11=1.0,
        qc=-(qc) - gc,
        q01=-(q01n) - g01,
        q02=-g02,
        q11=-(q11n) - g11,
        q12=-g12,
    )


def build_tae_solution(cfg: PhysicalConfig, unk: SpectralUnknowns,
                       anchor: int) -> LocalSolution:
    """Local angular solution regular at the pole u = anchor (+1 or -1).

    The regular indicial exponent at the anchor is |m + s*anchor|/2; at the
    opposite pole the exponent |m - s*anchor|/2 is carried in the
    prefactor (it does not impose regularity there).
    """
    if anchor not in (+1, -1):
        raise ValueError("anchor must be +1 or -1")
    ode = _tae_ode(cfg, unk.omega, unk.E, anchor)
    (r0a, r0b), (r1a, r1b) = indicial_exponents(ode)
    rho0 = r0a if r0a.real >= r0b.real else r0b
    rho1 = r1a if r1a.real >= r1b.real else r1b
    red = reduce_to_canonical(ode, rho0, rho1)
    return LocalSolution(
        params=red.params,
        rho0=red.rho0,
        rho1=red.rho1,
        sigma=red.sigma,
        z_shift=0.5,
        z_scale=-0.5 * anchor,
        equation="angular",
        anchor=("north" if anchor == +1 else "south"),
        _ode=ode,
    )


# ---------------------------------------------------------------------------
# Radial equation
# ---------------------------------------------------------------------------


def _tre_ode(cfg: PhysicalConfig, omega: complex, E: complex) -> PartialFractionODE:
    """Radial equation in z = (r - r_plus)/(r_minus - r_plus)."""
    h = horizons(cfg)
    d = h.d
    (k0, k1, k2), lam = _tre_poly(cfg, omega, E)
    s = cfg.s
    # n(z) = K(z)**2/d**2 - i s K(z) (2z - 1)/d   (degree 4)
    Ksq = _poly_mul((k0, k1, k2), (k0, k1, k2))
    n_poly = [c / (d * d) for c in Ksq]
    lin = _poly_mul((k0, k1, k2), (-1.0, 2.0))  # K * (2z - 1)
    for j, c in enumerate(lin):
        n_poly[j] -= 1j * s * c / d
    # m(z) = -lambda - 4 i s omega (r_plus + d z)   (degree 1)
    m_poly = (-lam - 4j * s * omega * h.r_plus, -4j * s * omega * d)
    qc2, q01_2, q02, q11_2, q12 = split_over_z2_zm1_2(n_poly)
    qc1, q01_1, q11_1 = split_over_z_zm1(m_poly)
    return PartialFractionODE(
        pc=0.0,
        p01=1.0 + s,
        p11=1.0 + s,
        qc=qc2 + qc1,
        q01=q01_2 + q01_1,
        q02=q02,
        q11=q11_2 + q11_1,
        q12=q12,
    )


def _poly_mul(a, b):
    out = [0.0 + 0.0j] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += complex(ai) * complex(bj)
    return out


def build_tre_solution(cfg: PhysicalConfig, unk: SpectralUnknowns,
                       branch: str = "R2") -> LocalSolution:
    """Local radial solution anchored at the outer horizon.

    ``branch`` selects the horizon exponent: "R2" takes
    rho0 = -s + i K_plus / d (the boundary condition of damped ringdown
    modes falling into the hole), "R1" takes rho0 = -i K_plus / d
    (quasi-bound boundary condition).
    """
    if branch not in ("R1", "R2"):
        raise ValueError(f"unknown branch {branch!r}")
    omega, E = unk.omega, unk.E
    h = horizons(cfg)
    d = h.d
    (k0, k1, k2), _ = _tre_poly(cfg, omega, E)
    ode = _tre_ode(cfg, omega, E)
    if branch == "R2":
        rho0 = -cfg.s + 1j * k0 / d
    else:
        rho0 = -1j * k0 / d
    k_minus = k0 + k1 + k2  # K at the inner horizon (z = 1)
    rho1 = 1j * k_minus / d
    red = reduce_to_canonical(ode, rho0, rho1)
    return LocalSolution(
        params=red.params,
        rho0=red.rho0,
        rho1=red.rho1,
        sigma=red.sigma,
        z_shift=-h.r_plus / d,
        z_scale=1.0 / d,
        equation="radial",
        anchor="horizon",
        _ode=ode,
    )

"""Reduction of second-order ODEs with singular points at z = 0, 1 and a
rank-1 irregular point at infinity to the canonical confluent Heun form.

The coefficient functions are represented by their partial fractions

    p(z) = pc + p01/z + p11/(z-1)
    q(z) = qc + q01/z + q02/z**2 + q11/(z-1) + q12/(z-1)**2

and the substitution R = z**rho0 (z-1)**rho1 exp(sigma z) H removes the
second-order poles in q, after which the coefficients of the canonical
equation are read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import cmath

from .errors import DerivationFailure
from .heun import CanonicalHeunParams

__all__ = [
    "PartialFractionODE",
    "Reduction",
    "split_over_z_zm1",
    "split_over_z2_zm1_2",
    "reduce_to_canonical",
]


@dataclass(frozen=True)
class PartialFractionODE:
    """R'' + p(z) R' + q(z) R = 0 with p, q in partial-fraction form."""

    pc: complex
    p01: complex
    p11: complex
    qc: complex
    q01: complex
    q02: complex
    q11: complex
    q12: complex


@dataclass(frozen=True)
class Reduction:
    """Outcome of an s-homotopic reduction to canonical form.

    rho0, rho1 are the exponents peeled off at z = 0 and z = 1, and sigma
    the exponential rate; H(z) = z**-rho0 (z-1)**-rho1 exp(-sigma z) R(z).
    """

    params: CanonicalHeunParams
    rho0: complex
    rho1: complex
    sigma: complex

    def prefactor_logderiv(self, z: complex) -> complex:
        return self.rho0 / z + self.rho1 / (z - 1.0) + self.sigma


def _poly_eval(coeffs, z):
    """Evaluate sum(coeffs[k] * z**k)."""
    acc = 0.0 + 0.0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def split_over_z_zm1(coeffs) -> tuple[complex, complex, complex]:
    """Decompose f(z)/(z(z-1)), deg f <= 2, as fc + f0/z + f1/(z-1).

    Returns (fc, f0, f1) with fc the z**2 coefficient, f0 = -f(0),
    f1 = f(1).
    """
    coeffs = list(coeffs) + [0.0] * (3 - len(coeffs))
    if len(coeffs) > 3:
        raise ValueError("polynomial degree must be <= 2")
    f0 = -_poly_eval(coeffs, 0.0)
    f1 = _poly_eval(coeffs, 1.0)
    return complex(coeffs[2]), complex(f0), complex(f1)


def split_over_z2_zm1_2(coeffs):
    """Decompose f(z)/(z**2 (z-1)**2), deg f <= 4, as

        fc + c01/z + c02/z**2 + c11/(z-1) + c12/(z-1)**2.

    Returns (fc, c01, c02, c11, c12).
    """
    coeffs = list(coeffs) + [0.0] * (5 - len(coeffs))
    if len(coeffs) > 5:
        raise ValueError("polynomial degree must be <= 4")
    fc = complex(coeffs[4])
    # remainder after removing fc * z**2 (z-1)**2 = fc (z**4 - 2z**3 + z**2)
    rem = list(coeffs)
    rem[4] -= fc
    rem[3] += 2.0 * fc
    rem[2] -= fc
    dr = [k * rem[k] for k in range(1, 5)]
    r0 = _poly_eval(rem, 0.0)
    r1 = _poly_eval(rem, 1.0)
    dr0 = _poly_eval(dr, 0.0)
    dr1 = _poly_eval(dr, 1.0)
    c02 = r0
    c01 = dr0 + 2.0 * r0
    c12 = r1
    c11 = dr1 - 2.0 * r1
    return fc, complex(c01), complex(c02), complex(c11), complex(c12)


def _indicial_roots(p_res: complex, q_res2: complex) -> tuple[complex, complex]:
    """Roots of rho(rho-1) + p_res*rho + q_res2 = 0."""
    b = p_res - 1.0
    disc = cmath.sqrt(b * b - 4.0 * q_res2)
    r1 = 0.5 * (-b + disc)
    r2 = 0.5 * (-b - disc)
    return r1, r2


def indicial_exponents(ode: PartialFractionODE) -> tuple[tuple[complex, complex],
                                                         tuple[complex, complex]]:
    """Indicial exponent pairs at z = 0 and z = 1."""
    return (_indicial_roots(ode.p01, ode.q02),
            _indicial_roots(ode.p11, ode.q12))


def reduce_to_canonical(
    ode: PartialFractionODE,
    rho0: complex,
    rho1: complex,
    sigma_pick: str = "max",
) -> Reduction:
    """Reduce the ODE to canonical form with prescribed local exponents.

    rho0, rho1 must be indicial exponents at z = 0 and z = 1.  The
    exponential rate sigma solves a consistency quadratic; sigma_pick
    selects which root deterministically ("max": larger real part, ties by
    larger imaginary part; "min": the other root).  Both roots describe the
    same local solution in different gauges.
    """
    pc, p01, p11 = ode.pc, ode.p01, ode.p11

    for label, rho, pres, qres in (
        ("z=0", rho0, p01, ode.q02),
        ("z=1", rho1, p11, ode.q12),
    ):
        res = rho * (rho - 1.0) + pres * rho + qres
        if abs(res) > 1e-9 * max(1.0, abs(rho) ** 2):
            raise DerivationFailure(
                f"exponent {rho} is not an indicial root at {label} "
                f"(residual {abs(res):.3g})"
            )

    # consistency quadratic: the z=0 residue of the transformed q must
    # cancel its constant part, which forces
    #   sigma**2 + sigma*(pc + p01 + 2 rho0) + c0 = 0
    b = pc + p01 + 2.0 * rho0
    c = (ode.qc + ode.q01 + pc * rho0
         - p01 * rho1 - p11 * rho0 - 2.0 * rho0 * rho1)
    disc = cmath.sqrt(b * b - 4.0 * c)
    roots = [0.5 * (-b + disc), 0.5 * (-b - disc)]
    roots.sort(key=lambda s: (s.real, s.imag), reverse=(sigma_pick == "max"))
    sigma = roots[0]

    g0 = p01 + 2.0 * rho0
    d0 = p11 + 2.0 * rho1
    e0 = -(pc + 2.0 * sigma)
    q0 = ode.qc + pc * sigma + sigma * sigma
    # residue of the transformed potential at z = 1; the canonical form
    # carries -(alpha0*beta0 - q0) there
    qt11 = (ode.q11 + pc * rho1 + p11 * sigma + p01 * rho1
            + p11 * rho0 + 2.0 * sigma * rho1 + 2.0 * rho0 * rho1)
    ab = q0 - qt11

    # the second-order poles of the transformed q must vanish identically
    qt02 = ode.q02 + p01 * rho0 + rho0 * rho0 - rho0
    qt12 = ode.q12 + p11 * rho1 + rho1 * rho1 - rho1
    scale = max(1.0, abs(ode.q02), abs(ode.q12))
    if abs(qt02) > 1e-8 * scale or abs(qt12) > 1e-8 * scale:
        raise DerivationFailure(
            f"reduction left second-order poles: {abs(qt02):.3g}, {abs(qt12):.3g}"
        )

    # first-order residue at z=0 of transformed q must equal -q0 exactly
    qt01 = (ode.q01 + pc * rho0 + p01 * sigma - p01 * rho1
            - p11 * rho0 + 2.0 * sigma * rho0 - 2.0 * rho0 * rho1)
    if abs(qt01 + q0) > 1e-7 * max(1.0, abs(q0)):
        raise DerivationFailure(
            f"sigma consistency check failed (residual {abs(qt01 + q0):.3g})"
        )

    params = CanonicalHeunParams.from_product(g0, d0, e0, ab, q0)
    return Reduction(params, rho0, rho1, sigma)

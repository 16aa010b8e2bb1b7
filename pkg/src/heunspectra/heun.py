"""Confluent Heun functions: parameter conventions, series evaluation,
analytic continuation and singularity classification.

The canonical form used throughout is the five-parameter confluent equation

    H'' + (gamma0/z + delta0/(z-1) - epsilon0) H'
        + [q0 - q0/z - (alpha0*beta0 - q0)/(z-1)] H = 0

with regular singular points at z = 0 and z = 1 and a rank-1 irregular
point at infinity.  The local solution at z = 0 is normalized to H(0) = 1.
See docs/series-recurrence.md for the derivation of the coefficient
recurrence and of the map to the five-parameter HeunC convention used by
Maple.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateGamma,
    NoConvergence,
    NonInvertible,
    PathTooClose,
)

__all__ = [
    "CanonicalHeunParams",
    "MapleHeunParams",
    "GeneralHeunParams",
    "HeunEval",
    "SingularPoint",
    "SingularityReport",
    "canonical_to_maple",
    "maple_to_canonical",
    "eval_series",
    "eval_continued",
    "series_coefficients",
    "classify_singularities",
]

_EPS_INT = 1e-12


def _require_finite(**fields: complex) -> None:
    for name, value in fields.items():
        z = complex(value)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"parameter {name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CanonicalHeunParams:
    """Parameters of the canonical confluent equation.

    Only the product alpha0*beta0 enters the equation; ``from_product``
    builds an instance when just the product is known (the convention map
    from the five-parameter form is a partial inverse and recovers the
    product only).
    """

    gamma0: complex
    delta0: complex
    epsilon0: complex
    alpha0: complex
    beta0: complex
    q0: complex

    def __post_init__(self):
        _require_finite(
            gamma0=self.gamma0,
            delta0=self.delta0,
            epsilon0=self.epsilon0,
            alpha0=self.alpha0,
            beta0=self.beta0,
            q0=self.q0,
        )

    @classmethod
    def from_product(cls, gamma0, delta0, epsilon0, ab, q0) -> "CanonicalHeunParams":
        return cls(gamma0, delta0, epsilon0, ab, 1.0, q0)

    @property
    def ab(self) -> complex:
        return complex(self.alpha0) * complex(self.beta0)

    @property
    def gamma0_degenerate(self) -> bool:
        g = complex(self.gamma0)
        if abs(g.imag) > _EPS_INT:
            return False
        n = round(g.real)
        return n <= 0 and abs(g.real - n) <= _EPS_INT


@dataclass(frozen=True)
class MapleHeunParams:
    """Parameters in the five-argument HeunC(alpha, beta, gamma, delta, eta, z)
    convention used by Maple."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    eta: complex

    def __post_init__(self):
        _require_finite(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            delta=self.delta,
            eta=self.eta,
        )


@dataclass(frozen=True)
class GeneralHeunParams:
    """Parameters of the general (four regular points) Heun equation.

    The accessory relation epsilon = alpha + beta - gamma - delta + 1 is
    enforced on construction.
    """

    a_sing: complex
    q: complex
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex

    def __post_init__(self):
        _require_finite(
            a_sing=self.a_sing,
            q=self.q,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            delta=self.delta,
            epsilon=self.epsilon,
        )
        expected = self.alpha + self.beta - self.gamma - self.delta + 1
        if abs(complex(self.epsilon) - complex(expected)) > 1e-13:
            raise ValueError(
                "epsilon must equal alpha + beta - gamma - delta + 1 "
                f"(got {self.epsilon}, expected {expected})"
            )
        if min(abs(complex(self.a_sing)), abs(complex(self.a_sing) - 1)) < 1e-13:
            raise ValueError("a_sing must not coincide with 0 or 1")


@dataclass(frozen=True)
class HeunEval:
    """Value and derivative of a Heun function at one point, with a bound on
    the absolute truncation error of ``value``."""

    value: complex
    derivative: complex
    err_estimate: float
    terms_used: int


@dataclass(frozen=True)
class SingularPoint:
    point: complex  # cmath.inf encodes the point at infinity
    kind: str  # "regular" | "irregular"
    rank: int  # >= 1 for irregular points, 0 otherwise


@dataclass(frozen=True)
class SingularityReport:
    points: tuple[SingularPoint, ...]

    def at(self, point) -> SingularPoint:
        for sp in self.points:
            if sp.point == point or (
                not cmath.isinf(sp.point)
                and not cmath.isinf(complex(point))
                and abs(sp.point - complex(point)) < 1e-9
            ):
                return sp
        raise KeyError(point)


# ---------------------------------------------------------------------------
# Parameter convention maps
# ---------------------------------------------------------------------------


def canonical_to_maple(p: CanonicalHeunParams) -> MapleHeunParams:
    """Map canonical parameters to the five-parameter HeunC convention.

    The map peels the gauge factor exp(kappa*z), kappa = (epsilon0+alpha)/2,
    off the canonical solution; alpha is fixed on the principal square-root
    branch with a leading minus sign.
    """
    g0, d0, e0, q0 = p.gamma0, p.delta0, p.epsilon0, p.q0
    ab = p.ab
    alpha = -cmath.sqrt(e0 * e0 - 4.0 * q0)
    beta = g0 - 1.0
    gamma = d0 - 1.0
    delta = -ab + 0.5 * d0 * e0 + 0.5 * e0 * g0
    eta = -0.5 * d0 * g0 - 0.5 * e0 * g0 + q0 + 0.5
    return MapleHeunParams(alpha, beta, gamma, delta, eta)


def maple_to_canonical(
    p: MapleHeunParams, sqrt_branch: str = "principal"
) -> CanonicalHeunParams:
    """Partial inverse of :func:`canonical_to_maple`.

    Only the product alpha0*beta0 is recoverable, and epsilon0 is a root of
    a quadratic, so the inverse is two-valued: ``sqrt_branch`` selects
    "principal" or "negated" for the square root entering epsilon0.
    """
    if sqrt_branch not in ("principal", "negated"):
        raise ValueError(f"unknown sqrt_branch {sqrt_branch!r}")
    g0 = p.beta + 1.0
    d0 = p.gamma + 1.0
    disc = g0 * g0 + 2.0 * g0 * d0 + p.alpha * p.alpha + 4.0 * p.eta - 2.0
    root = cmath.sqrt(disc)
    if sqrt_branch == "negated":
        root = -root
    e0 = g0 + root
    q0 = p.eta + 0.5 * g0 * d0 + 0.5 * e0 * g0 - 0.5
    ab = 0.5 * e0 * (g0 + d0) - p.delta
    for name, v in (("epsilon0", e0), ("q0", q0), ("alpha0*beta0", ab)):
        z = complex(v)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise NonInvertible(f"recovered {name} is not finite")
    return CanonicalHeunParams.from_product(g0, d0, e0, ab, q0)


# ---------------------------------------------------------------------------
# Series evaluation about z = 0
# ---------------------------------------------------------------------------


def series_coefficients(p: CanonicalHeunParams, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients of the z=0 solution (c0 = 1).

    Recurrence (see docs/series-recurrence.md):
        (n+1)(n+gamma0) c_{n+1} = [n(n-1) + (gamma0+delta0+epsilon0) n + q0] c_n
                                  + [-epsilon0 (n-1) - alpha0*beta0 - q0] c_{n-1}
                                  + q0 c_{n-2}
    """
    if p.gamma0_degenerate:
        raise DegenerateGamma(f"gamma0 = {p.gamma0} is zero or a negative integer")
    g0, d0, e0, q0 = p.gamma0, p.delta0, p.epsilon0, p.q0
    ab = p.ab
    c = np.zeros(count, dtype=complex)
    c[0] = 1.0
    for n in range(count - 1):
        acc = (n * (n - 1) + (g0 + d0 + e0) * n + q0) * c[n]
        if n >= 1:
            acc += (-e0 * (n - 1) - ab - q0) * c[n - 1]
        if n >= 2:
            acc += q0 * c[n - 2]
        c[n + 1] = acc / ((n + 1) * (n + g0))
    return c


def eval_series(
    p: CanonicalHeunParams,
    z: complex,
    tol: float = 1e-12,
    max_terms: int = 6000,
) -> HeunEval:
    """Evaluate the z=0 solution and its derivative by direct summation.

    Valid strictly inside the unit disk (the nearest other singular point
    is z = 1).  Truncation: stop once |c_k z^k| + |c_{k-1} z^{k-1}| drops
    below tol * |partial sum| for three consecutive k; the error estimate
    is the geometric tail bound from the last term ratio.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.gamma0_degenerate:
        raise DegenerateGamma(f"gamma0 = {p.gamma0} is zero or a negative integer")
    z = complex(z)
    if abs(z) >= 0.98:
        raise ValueError(f"|z| = {abs(z):.3f} too close to the unit circle; "
                         "use eval_continued")
    g0, d0, e0, q0 = p.gamma0, p.delta0, p.epsilon0, p.q0
    ab = p.ab

    c_nm2, c_nm1, c_n = 0.0 + 0.0j, 0.0 + 0.0j, 1.0 + 0.0j
    value = c_n
    deriv = 0.0 + 0.0j
    zpow = 1.0 + 0.0j  # z**n
    t_prev = abs(c_n)
    t_cur = t_prev
    small_streak = 0
    for n in range(max_terms):
        c_np1 = (
            (n * (n - 1) + (g0 + d0 + e0) * n + q0) * c_n
            + (-e0 * (n - 1) - ab - q0) * c_nm1
            + q0 * c_nm2
        ) / ((n + 1) * (n + g0))
        zpow_n1 = zpow * z
        term = c_np1 * zpow_n1
        value += term
        deriv += (n + 1) * c_np1 * zpow
        t_prev, t_cur = t_cur, abs(term)
        if t_cur + t_prev < tol * max(abs(value), 1e-300):
            small_streak += 1
            if small_streak >= 3:
                ratio = t_cur / t_prev if t_prev > 0 else 0.0
                if ratio < 1.0:
                    err = t_cur * ratio / (1.0 - ratio) + t_cur
                else:
                    err = t_cur
                return HeunEval(value, deriv, float(err), n + 2)
        else:
            small_streak = 0
        c_nm2, c_nm1, c_n = c_nm1, c_n, c_np1
        zpow = zpow_n1
    raise NoConvergence(
        f"series did not meet tol={tol} within {max_terms} terms at z={z}"
    )


# ---------------------------------------------------------------------------
# Analytic continuation
# ---------------------------------------------------------------------------

MIN_CLEARANCE = 0.05
_SINGULAR_POINTS = (0.0 + 0.0j, 1.0 + 0.0j)


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    """Distance from point p to the segment [a, b]."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def _ode_coeffs(p: CanonicalHeunParams):
    g0, d0, e0, q0 = p.gamma0, p.delta0, p.epsilon0, p.q0
    ab = p.ab

    def drift(z: complex) -> complex:
        return g0 / z + d0 / (z - 1.0) - e0

    def potential(z: complex) -> complex:
        return q0 - q0 / z - (ab - q0) / (z - 1.0)

    return drift, potential


def eval_continued(
    p: CanonicalHeunParams,
    z: complex,
    path: Sequence[complex],
    tol: float = 1e-12,
    min_clearance: float = MIN_CLEARANCE,
) -> HeunEval:
    """Continue (H, H') from the series disk to ``z`` along ``path``.

    The piecewise-linear path starts at ``path[0]`` (inside the series
    disk) and ends at ``z``; every segment must keep at least
    ``min_clearance`` away from the singular points z = 0 and z = 1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not path:
        raise ValueError("path must contain at least the starting point")
    nodes = [complex(w) for w in path] + [complex(z)]
    if abs(nodes[0]) > 0.85:
        raise PathTooClose(
            f"path must start inside the series disk, got |z0| = {abs(nodes[0]):.3f}"
        )
    for a, b in zip(nodes, nodes[1:]):
        for s in _SINGULAR_POINTS:
            dist = _segment_distance(a, b, s)
            if dist < min_clearance and abs(a - b) > 0:
                raise PathTooClose(
                    f"segment {a} -> {b} passes within {dist:.3g} of z = {s}"
                )

    start = eval_series(p, nodes[0], tol=min(tol, 1e-12))
    if abs(nodes[-1] - nodes[0]) == 0.0:
        return start

    drift, potential = _ode_coeffs(p)
    y = np.array([start.value, start.derivative], dtype=complex)
    total_len = 0.0
    for a, b in zip(nodes, nodes[1:]):
        seg = b - a
        if abs(seg) == 0.0:
            continue
        total_len += abs(seg)

        def rhs(t, yv, a=a, seg=seg):
            zt = a + t * seg
            h, hp = yv
            hpp = -drift(zt) * hp - potential(zt) * h
            return [seg * hp, seg * hpp]

        sol = solve_ivp(
            rhs,
            (0.0, 1.0),
            y,
            method="DOP853",
            rtol=max(tol, 1e-13),
            atol=max(tol, 1e-13) * max(1.0, float(np.max(np.abs(y)))),
            dense_output=False,
        )
        if not sol.success:
            raise NoConvergence(f"continuation failed on segment {a} -> {b}: "
                                f"{sol.message}")
        y = sol.y[:, -1]

    err = start.err_estimate + tol * max(total_len, 1.0) * max(1.0, abs(y[0]))
    return HeunEval(complex(y[0]), complex(y[1]), float(err), start.terms_used)


def eval_auto(
    p: CanonicalHeunParams,
    z: complex,
    tol: float = 1e-12,
) -> HeunEval:
    """Evaluate at ``z`` by series when possible, otherwise by continuation
    along the ray from the series disk to ``z`` (the ray must clear z = 1)."""
    z = complex(z)
    if abs(z) <= 0.85:
        return eval_series(p, z, tol=tol)
    zhat = z / abs(z)
    start = 0.5 * zhat
    if _segment_distance(start, z, 1.0 + 0.0j) < MIN_CLEARANCE:
        # detour above the z=1 singular point
        mid = 1.0 + 0.5j if z.imag >= 0 else 1.0 - 0.5j
        return eval_continued(p, z, [start, mid], tol=tol)
    return eval_continued(p, z, [start], tol=tol)


# ---------------------------------------------------------------------------
# Singularity classification
# ---------------------------------------------------------------------------


def _pole_order(f: Callable[[complex], complex], x0: complex) -> int:
    """Estimate the pole order of f at x0 by log-log slope fitting on small
    circles around the point.  Returns 0 for finite (or vanishing) limits."""
    radii = (1e-2, 10 ** -2.5, 1e-3)
    logr = []
    logf = []
    for r in radii:
        vals = []
        for k in range(8):
            x = x0 + r * cmath.exp(2j * math.pi * (k + 0.37) / 8)
            try:
                v = f(x)
            except (ZeroDivisionError, OverflowError):
                return 99
            vals.append(abs(v))
        m = float(np.mean(vals))
        if m < 1e-250:
            return 0
        logr.append(math.log(1.0 / r))
        logf.append(math.log(m))
    slope = np.polyfit(logr, logf, 1)[0]
    return max(0, int(round(slope)))


def _classify_point(
    p1: Callable[[complex], complex],
    p0: Callable[[complex], complex],
    x0: complex,
) -> SingularPoint | None:
    o1 = _pole_order(p1, x0)
    o0 = _pole_order(p0, x0)
    if o1 <= 0 and o0 <= 0:
        return None  # ordinary point
    if o1 <= 1 and o0 <= 2:
        return SingularPoint(x0, "regular", 0)
    rank = max(o1 - 1, (o0 + 1) // 2 - 1, 1)
    return SingularPoint(x0, "irregular", rank)


def _classify_infinity(p1, p0) -> SingularPoint | None:
    def p1_inf(t: complex) -> complex:
        return 2.0 / t - p1(1.0 / t) / (t * t)

    def p0_inf(t: complex) -> complex:
        return p0(1.0 / t) / (t ** 4)

    sp = _classify_point(p1_inf, p0_inf, 0.0 + 0.0j)
    if sp is None:
        return None
    return SingularPoint(complex("inf"), sp.kind, sp.rank)


def classify_singularities(kind: str, params) -> SingularityReport:
    """Classify the singular points of a Heun-class equation.

    ``kind`` is "general" (GeneralHeunParams), "confluent"
    (CanonicalHeunParams) or "hypergeometric" (tuple (a, b, c)).  Each
    candidate point is subjected to the two limit tests for a regular
    singular point; irregular points get a rank estimate from the pole
    orders of the coefficient functions.
    """
    if kind == "general":
        if not isinstance(params, GeneralHeunParams):
            raise TypeError("general classification expects GeneralHeunParams")
        g = params

        def p1(z):
            return g.gamma / z + g.delta / (z - 1) + g.epsilon / (z - g.a_sing)

        def p0(z):
            return (g.alpha * g.beta * z - g.q) / (z * (z - 1) * (z - g.a_sing))

        candidates = [0.0 + 0j, 1.0 + 0j, complex(g.a_sing)]
    elif kind == "confluent":
        if not isinstance(params, CanonicalHeunParams):
            raise TypeError("confluent classification expects CanonicalHeunParams")
        p1, p0 = _ode_coeffs(params)
        candidates = [0.0 + 0j, 1.0 + 0j]
    elif kind == "hypergeometric":
        a, b, c = (complex(v) for v in params)

        def p1(z):
            return (c - (a + b + 1) * z) / (z * (1 - z))

        def p0(z):
            return -a * b / (z * (1 - z))

        candidates = [0.0 + 0j, 1.0 + 0j]
    else:
        raise ValueError(f"unknown equation kind {kind!r}")

    found = []
    for x0 in candidates:
        sp = _classify_point(p1, p0, x0)
        if sp is not None:
            found.append(sp)
    sp_inf = _classify_infinity(p1, p0)
    if sp_inf is not None:
        found.append(sp_inf)
    return SingularityReport(tuple(found))

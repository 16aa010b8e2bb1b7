"""Two-parameter complex root finding for the coupled spectral problem:
drive the angular and radial residuals (or the two jet truncation
conditions) to zero in (omega, E), continue roots in the rotation
parameter, and filter numerically spurious roots.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .boundary import (
    BoundaryKind,
    angular_qnm_residual,
    jet_mode_conditions,
    radial_residual,
)
from .errors import (
    JacobianSingular,
    NoConvergence,
    TrackLost,
)
from .teukolsky import PhysicalConfig, SpectralUnknowns

__all__ = [
    "SolverSettings",
    "SpectralPoint",
    "ContinuationTrack",
    "solve_point",
    "continue_in_a",
    "stability_filter",
    "enumerate_modes",
    "default_seed_grid",
]


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs of the residual evaluation and the root search."""

    series_tol: float = 1e-12
    match_z1: float = 0.75  # angular matching point (the other is 1 - z1)
    r_match: float | None = None  # default 4M
    r_far: float | None = None  # default 40M
    root_tol: float = 1e-10
    max_iter: int = 60
    fd_step: float = 1e-7
    jet_N: int = 0  # truncation order for jet-mode runs


@dataclass(frozen=True)
class SpectralPoint:
    cfg: PhysicalConfig
    unk: SpectralUnknowns
    kind: BoundaryKind
    residual_norm: float
    n: int = -1  # overtone index; assigned by enumerate_modes
    stable: bool | None = None
    jacobian_cond: float = float("nan")

    @property
    def omega(self) -> complex:
        return self.unk.omega

    @property
    def E(self) -> complex:
        return self.unk.E


@dataclass(frozen=True)
class ContinuationTrack:
    points: tuple[SpectralPoint, ...]
    jump_cap: float

    @property
    def a_values(self) -> list[float]:
        return [p.cfg.a for p in self.points]


def _residual_vector(cfg: PhysicalConfig, kind: BoundaryKind,
                     omega: complex, E: complex,
                     st: SolverSettings) -> np.ndarray:
    unk = SpectralUnknowns(omega, E)
    if kind is BoundaryKind.JET_PRIMARY:
        c1, det = jet_mode_conditions(cfg, unk, st.jet_N)
        # c1 takes gauge-determined discrete values: it selects admissible
        # truncation orders N and must already vanish identically here
        if abs(c1) > 1e-8:
            raise NoConvergence(
                f"no polynomial angular family at N={st.jet_N} for this "
                f"(s, m): c1 = {c1}"
            )
        rad = radial_residual(cfg, unk, BoundaryKind.QNM, r_match=st.r_match,
                              r_far=st.r_far, series_tol=st.series_tol)
        return np.array([det, rad], dtype=complex)
    ang = angular_qnm_residual(cfg, unk, z1=st.match_z1,
                               series_tol=st.series_tol)
    rad = radial_residual(cfg, unk, kind, r_match=st.r_match,
                          r_far=st.r_far, series_tol=st.series_tol)
    return np.array([ang, rad], dtype=complex)


def solve_point(
    cfg: PhysicalConfig,
    kind: BoundaryKind,
    guess: SpectralUnknowns,
    root_tol: float | None = None,
    settings: SolverSettings | None = None,
) -> SpectralPoint:
    """Newton iteration on the complex 2x2 system F(omega, E) = 0.

    The Jacobian is a forward finite difference with relative step
    fd_step; on stagnation the step direction is kept and its length
    re-optimized by a quadratic (three-point) fit of ||F||^2, which
    recovers the quadratic-interpolation root jump of Muller's method
    along that line.
    """
    st = settings or SolverSettings()
    if root_tol is None:
        root_tol = st.root_tol
    if root_tol <= 0:
        raise ValueError("root_tol must be positive")

    x = np.array([guess.omega, guess.E], dtype=complex)
    if not np.all(np.isfinite(x.view(float))):
        raise ValueError("guess must be finite")

    def F(v):
        return _residual_vector(cfg, kind, v[0], v[1], st)

    fx = F(x)
    cond = float("nan")
    for _ in range(st.max_iter):
        norm = float(np.linalg.norm(fx))
        if norm < root_tol:
            return SpectralPoint(cfg, SpectralUnknowns(x[0], x[1]), kind,
                                 norm, jacobian_cond=cond)
        J = np.empty((2, 2), dtype=complex)
        for j in range(2):
            h = st.fd_step * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (F(xp) - fx) / h
        cond = float(np.linalg.cond(J))
        if not math.isfinite(cond) or cond > 1e14:
            raise JacobianSingular(
                f"Jacobian condition number {cond:.3g} at omega={x[0]}, E={x[1]}"
            )
        dx = np.linalg.solve(J, -fx)
        # damped line search along the Newton direction
        t, accepted = 1.0, False
        for _ in range(8):
            x_try = x + t * dx
            try:
                f_try = F(x_try)
            except Exception:  # noqa: BLE001 - treat as a bad step
                t *= 0.5
                continue
            if np.linalg.norm(f_try) < norm:
                x, fx, accepted = x_try, f_try, True
                break
            t *= 0.5
        if accepted:
            continue
        # stagnation: quadratic fit of g(t) = ||F(x + t dx)||^2 through
        # three trial lengths, jump to its minimizer
        ts = np.array([0.25, 0.75, 1.5])
        gs = []
        for tv in ts:
            try:
                gs.append(float(np.linalg.norm(F(x + tv * dx))) ** 2)
            except Exception:  # noqa: BLE001
                gs.append(1e6 * norm * norm)
        coef = np.polyfit(ts, gs, 2)
        t_opt = -coef[1] / (2.0 * coef[0]) if coef[0] > 0 else 2.0
        t_opt = float(np.clip(t_opt, -2.0, 4.0))
        x_try = x + t_opt * dx
        try:
            f_try = F(x_try)
        except Exception as exc:  # noqa: BLE001
            raise NoConvergence(
                f"stagnated at omega={x[0]}, E={x[1]} (||F||={norm:.3g})"
            ) from exc
        if np.linalg.norm(f_try) >= norm:
            raise NoConvergence(
                f"stagnated at omega={x[0]}, E={x[1]} (||F||={norm:.3g})"
            )
        x, fx = x_try, f_try
    raise NoConvergence(
        f"no root within {st.max_iter} iterations from omega={guess.omega}, "
        f"E={guess.E} (last ||F||={float(np.linalg.norm(fx)):.3g})"
    )


def continue_in_a(
    seed: SpectralPoint,
    a_max: float,
    da0: float,
    settings: SolverSettings | None = None,
    jump_cap: float = 0.2,
) -> ContinuationTrack:
    """Predictor-corrector continuation of one root in the rotation
    parameter, from seed.cfg.a toward a_max.

    Linear extrapolation of (omega, E) from the last two points seeds each
    corrector solve; the step halves on failure (or on an omega jump above
    jump_cap), doubles after three easy steps, and never exceeds da0.
    """
    M = seed.cfg.M
    if not abs(a_max) <= 0.9999 * M:
        raise ValueError("a_max must satisfy |a_max| <= 0.9999*M")
    st = settings or SolverSettings()
    direction = 1.0 if a_max >= seed.cfg.a else -1.0
    da = abs(da0)
    points = [seed]
    easy = 0
    a = seed.cfg.a
    while (a_max - a) * direction > 1e-12:
        step = min(da, abs(a_max - a))
        a_next = a + direction * step
        if len(points) >= 2:
            p1, p0 = points[-1], points[-2]
            h1 = p1.cfg.a - p0.cfg.a
            slope_w = (p1.omega - p0.omega) / h1 if h1 else 0.0
            slope_E = (p1.E - p0.E) / h1 if h1 else 0.0
            guess = SpectralUnknowns(
                p1.omega + slope_w * (a_next - p1.cfg.a),
                p1.E + slope_E * (a_next - p1.cfg.a),
            )
        else:
            guess = points[-1].unk
        cfg_next = replace(seed.cfg, a=a_next)
        try:
            pt = solve_point(cfg_next, seed.kind, guess, settings=st)
            if abs(pt.omega - points[-1].omega) > jump_cap:
                raise NoConvergence("omega jump exceeds the track cap")
        except (NoConvergence, JacobianSingular):
            da *= 0.5
            easy = 0
            if da < 1e-7 * M:
                raise TrackLost(
                    f"step size underflow at a={a:.6f} "
                    f"(track has {len(points)} points)"
                ) from None
            continue
        points.append(pt)
        a = a_next
        easy += 1
        if easy >= 3:
            da = min(2.0 * da, abs(da0))
            easy = 0
    return ContinuationTrack(tuple(points), jump_cap)


def stability_filter(
    point: SpectralPoint,
    settings: SolverSettings | None = None,
    stability_tol: float = 1e-5,
) -> bool:
    """Re-solve the root under perturbed numerics and flag it stable iff
    omega moves less than stability_tol under every perturbation.

    Perturbations: series tolerance x10 and /10, angular matching point
    +-0.05, far radius x2.  Roots that drift are numerical artifacts, not
    physical modes.
    """
    st = settings or SolverSettings()
    r_far = st.r_far if st.r_far is not None else 40.0 * point.cfg.M
    perturbed = [
        replace(st, series_tol=st.series_tol * 10.0),
        replace(st, series_tol=st.series_tol / 10.0),
        replace(st, match_z1=st.match_z1 + 0.05),
        replace(st, match_z1=st.match_z1 - 0.05),
        replace(st, r_far=2.0 * r_far),
    ]
    for pst in perturbed:
        try:
            pt = solve_point(point.cfg, point.kind, point.unk, settings=pst)
        except (NoConvergence, JacobianSingular):
            return False
        if abs(pt.omega - point.omega) >= stability_tol:
            return False
    return True


def default_seed_grid(M: float = 0.5, n_re: int = 20, n_im: int = 15):
    """Rectangular omega seed grid bracketing the low overtones.

    With the exp(+i omega t) time dependence damped modes sit in the upper
    half plane, so the grid spans Im(omega) in [0.01, 1.5]/(2M).
    """
    scale = 1.0 / (2.0 * M)
    res = np.linspace(0.1, 2.5, n_re) * scale
    ims = np.linspace(0.01, 1.5, n_im) * scale
    return [complex(x, y) for x in res for y in ims]


def enumerate_modes(
    cfg: PhysicalConfig,
    kind: BoundaryKind,
    n_max: int,
    seed_grid,
    settings: SolverSettings | None = None,
    E_seed: complex | None = None,
    dedup_radius: float = 1e-6,
    run_stability: bool = True,
) -> list[SpectralPoint]:
    """Solve from every seed, deduplicate, order by damping, label
    overtones, and keep up to n_max+1 stable modes."""
    st = settings or SolverSettings()
    if E_seed is None:
        E_seed = complex(cfg.l * (cfg.l + 1))
    roots: list[SpectralPoint] = []
    for seed in seed_grid:
        seed = complex(seed)
        if kind is BoundaryKind.JET_PRIMARY:
            e_seeds = _jet_E_seeds(cfg, seed, st)
        else:
            e_seeds = [E_seed]
        for e0 in e_seeds:
            try:
                pt = solve_point(cfg, kind, SpectralUnknowns(seed, e0),
                                 settings=st)
            except (NoConvergence, JacobianSingular):
                continue
            _absorb_root(roots, pt, dedup_radius)
    roots.sort(key=lambda p: abs(p.omega.imag))
    out: list[SpectralPoint] = []
    for p in roots:
        stable = stability_filter(p, settings=st) if run_stability else True
        p = dataclasses.replace(p, n=len(out), stable=stable)
        if run_stability and not stable:
            continue
        out.append(p)
        if len(out) > n_max:
            break
    return out[: n_max + 1]


def _jet_E_seeds(cfg: PhysicalConfig, omega: complex,
                 st: SolverSettings) -> list[complex]:
    """E values zeroing the truncation determinant at fixed omega.

    The determinant is a polynomial of degree jet_N + 1 in E, so it is
    recovered exactly from jet_N + 2 samples and its roots seed the
    two-dimensional solve.
    """
    deg = st.jet_N + 1
    Es = np.arange(deg + 1, dtype=float)
    try:
        vals = [jet_mode_conditions(cfg, SpectralUnknowns(omega, complex(e)),
                                    st.jet_N)[1] for e in Es]
    except Exception:  # noqa: BLE001 - no seeds from a bad omega
        return []
    coef = np.polyfit(Es.astype(complex), np.array(vals, dtype=complex), deg)
    return [complex(r) for r in np.roots(coef)]


def _absorb_root(roots: list[SpectralPoint], pt: SpectralPoint,
                 dedup_radius: float) -> None:
    if pt.omega.imag <= 0 or pt.omega.real < -dedup_radius:
        return
    dup = next((i for i, r in enumerate(roots)
                if abs(r.omega - pt.omega) < dedup_radius), None)
    if dup is not None:
        if pt.residual_norm < roots[dup].residual_norm:
            roots[dup] = pt
        return
    roots.append(pt)

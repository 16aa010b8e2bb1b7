"""Batch front end: read a JSON run configuration, execute evaluations,
spectra, continuations, or oracle runs, and emit CSV/JSON artifacts plus
plot-ready complex-plane data.

Config format is a single JSON document; all physical quantities are in
geometric units with the mass M explicit.  All floating-point output uses
17 significant digits so that parsing the artifacts reproduces the
in-memory doubles bit-exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .boundary import BoundaryKind
from .errors import (
    ComputeError,
    ConfigError,
    EmptyInput,
    HeunSpectraError,
)
from .heun import (
    CanonicalHeunParams,
    MapleHeunParams,
    eval_auto,
    eval_series,
    maple_to_canonical,
)
from .oracle import _qnm_mismatch, schwarzschild_qnm_modes
from .solver import (
    ContinuationTrack,
    SolverSettings,
    SpectralPoint,
    continue_in_a,
    default_seed_grid,
    enumerate_modes,
)
from .teukolsky import PhysicalConfig

__all__ = ["CSV_HEADER", "RunConfig", "run", "emit_plot_data", "main"]

CSV_HEADER = "l,m,n,a,kind,re_omega,im_omega,re_E,im_E,residual,stable"

_MODES = ("eval", "spectrum", "continue", "oracle", "emit-plot")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# configuration


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    The raw JSON document is kept alongside the fields every mode needs;
    mode-specific blocks are validated lazily by the mode runners.
    """

    mode: str
    raw: dict

    @staticmethod
    def load(path: str, mode: str) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path!r} is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        if mode not in _MODES:
            raise ConfigError(f"unknown mode {mode!r}; expected one of {_MODES}")
        return RunConfig(mode=mode, raw=raw)


def _cplx(node, what: str) -> complex:
    """Parse a complex number written as [re, im] or a plain number."""
    if isinstance(node, (int, float)):
        return complex(node)
    if (isinstance(node, list) and len(node) == 2
            and all(isinstance(v, (int, float)) for v in node)):
        return complex(node[0], node[1])
    raise ConfigError(f"{what} must be a number or a [re, im] pair")


def _require(raw: dict, key: str, what: str | None = None):
    if key not in raw:
        raise ConfigError(f"missing required config block {what or key!r}")
    return raw[key]


def _physical_configs(raw: dict) -> tuple[list[PhysicalConfig], float]:
    phys = _require(raw, "physical")
    if not isinstance(phys, dict):
        raise ConfigError("'physical' must be an object")
    try:
        M = float(_require(phys, "M", "physical.M"))
        a = float(phys.get("a", 0.0))
        s = int(phys.get("s", -1))
        ls = phys.get("l", [1])
        ms = phys.get("m", [0])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'physical' block: {exc}")
    if isinstance(ls, int):
        ls = [ls]
    if isinstance(ms, int):
        ms = [ms]
    if M <= 0:
        raise ConfigError("physical.M must be positive")
    if not 0.0 <= a <= 0.9999 * M:
        raise ConfigError("physical.a must lie in [0, 0.9999*M]")
    cfgs = []
    try:
        for l in ls:
            for m in ms:
                cfgs.append(PhysicalConfig(M=M, a=a, s=s, l=int(l), m=int(m)))
    except ValueError as exc:
        raise ConfigError(str(exc))
    return cfgs, M


def _kind(raw: dict) -> BoundaryKind:
    name = raw.get("kind", "qnm")
    try:
        return BoundaryKind(name)
    except ValueError:
        raise ConfigError(
            f"unknown kind {name!r}; expected one of "
            f"{[k.value for k in BoundaryKind]}")


def _settings(raw: dict) -> tuple[SolverSettings, int, list[complex]]:
    sol = raw.get("solver", {})
    if not isinstance(sol, dict):
        raise ConfigError("'solver' must be an object")
    kwargs = {}
    for key in ("series_tol", "root_tol", "fd_step"):
        if key in sol:
            v = float(sol[key])
            if v <= 0:
                raise ConfigError(f"solver.{key} must be positive")
            kwargs[key] = v
    for key in ("max_iter", "jet_N"):
        if key in sol:
            kwargs[key] = int(sol[key])
    if "match_z1" in sol:
        kwargs["match_z1"] = float(sol["match_z1"])
    for key in ("r_match", "r_far"):
        if key in sol:
            kwargs[key] = float(sol[key])
    try:
        st = SolverSettings(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'solver' block: {exc}")
    n_max = int(sol.get("n_max", 2))
    if n_max < 0:
        raise ConfigError("solver.n_max must be non-negative")
    grid = sol.get("seed_grid")
    if grid is None:
        M = float(_require(raw, "physical").get("M", 0.5))
        seeds = default_seed_grid(M=M)
    elif isinstance(grid, list):
        seeds = [_cplx(g, "solver.seed_grid entry") for g in grid]
    elif isinstance(grid, dict):
        try:
            re = np.linspace(float(grid["re_min"]), float(grid["re_max"]),
                             int(grid["n_re"]))
            im = np.linspace(float(grid["im_min"]), float(grid["im_max"]),
                             int(grid["n_im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad solver.seed_grid: {exc}")
        if grid["re_min"] > grid["re_max"] or grid["im_min"] > grid["im_max"]:
            raise ConfigError("solver.seed_grid ranges must be well-ordered")
        seeds = [complex(r, i) for r in re for i in im]
    else:
        raise ConfigError("solver.seed_grid must be a list or an object")
    return st, n_max, seeds


# ---------------------------------------------------------------------------
# rows and artifacts


def _point_row(p: SpectralPoint) -> dict:
    return {
        "l": p.cfg.l,
        "m": p.cfg.m,
        "n": p.n,
        "a": p.cfg.a,
        "kind": p.kind.value,
        "re_omega": p.omega.real,
        "im_omega": p.omega.imag,
        "re_E": p.E.real,
        "im_E": p.E.imag,
        "residual": p.residual_norm,
        "stable": bool(p.stable) if p.stable is not None else True,
    }


def _row_line(row: dict) -> str:
    return ",".join([
        str(row["l"]), str(row["m"]), str(row["n"]), _fmt(row["a"]),
        row["kind"],
        _fmt(row["re_omega"]), _fmt(row["im_omega"]),
        _fmt(row["re_E"]), _fmt(row["im_E"]),
        _fmt(row["residual"]),
        "true" if row["stable"] else "false",
    ])


def _write_rows(rows: list[dict], out_dir: str, stem: str,
                diagnostics: dict) -> None:
    csv_text = CSV_HEADER + "\n" + "".join(_row_line(r) + "\n" for r in rows)
    _atomic_write(os.path.join(out_dir, stem + ".csv"), csv_text)
    doc = {"rows": rows, "diagnostics": diagnostics}
    _atomic_write(os.path.join(out_dir, stem + ".json"),
                  json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _summarize(row: dict) -> str:
    return (f"l={row['l']} m={row['m']} n={row['n']} a={_fmt(row['a'])} "
            f"kind={row['kind']} omega={_fmt(row['re_omega'])}"
            f"{'+' if row['im_omega'] >= 0 else ''}{_fmt(row['im_omega'])}j "
            f"residual={_fmt(row['residual'])} "
            f"stable={'true' if row['stable'] else 'false'}")


# ---------------------------------------------------------------------------
# plot data


def emit_plot_data(points, style: str, out_dir: str) -> list[str]:
    """Write plot-ready series files for a set of spectral points or
    continuation tracks.

    complex-plane style: two columns (re_omega, im_omega); track-vs-a
    style: three columns (a, re_omega, im_omega).  One file per
    (l, m, kind), with stable and spurious points routed to separate
    series files.  Returns the paths written.
    """
    if style not in ("complex-plane", "track-vs-a"):
        raise ConfigError(f"unknown plot style {style!r}")
    flat: list[SpectralPoint] = []
    for item in points:
        if isinstance(item, ContinuationTrack):
            flat.extend(item.points)
        else:
            flat.append(item)
    if not flat:
        raise EmptyInput("no points to plot")
    series: dict[tuple, list[SpectralPoint]] = {}
    for p in flat:
        stable = True if p.stable is None else bool(p.stable)
        key = (p.cfg.l, p.cfg.m, p.kind.value,
               "stable" if stable else "spurious")
        series.setdefault(key, []).append(p)
    paths = []
    for (l, m, kind, tag), pts in sorted(series.items()):
        name = f"plot_l{l}_m{m}_{kind}_{tag}.csv"
        if style == "complex-plane":
            header = "re_omega,im_omega"
            lines = [f"{_fmt(p.omega.real)},{_fmt(p.omega.imag)}"
                     for p in pts]
        else:
            header = "a,re_omega,im_omega"
            lines = [f"{_fmt(p.cfg.a)},{_fmt(p.omega.real)},"
                     f"{_fmt(p.omega.imag)}" for p in pts]
        path = os.path.join(out_dir, name)
        _atomic_write(path, header + "\n" + "".join(ln + "\n"
                                                    for ln in lines))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# mode runners


def _run_eval(config: RunConfig, out_dir: str) -> None:
    blk = _require(config.raw, "eval")
    if not isinstance(blk, dict):
        raise ConfigError("'eval' must be an object")
    params_blk = _require(blk, "params", "eval.params")
    conv = blk.get("convention", "canonical")
    try:
        if conv == "canonical":
            params = CanonicalHeunParams(
                **{k: _cplx(v, f"eval.params.{k}")
                   for k, v in params_blk.items()})
        elif conv == "maple":
            params = maple_to_canonical(MapleHeunParams(
                **{k: _cplx(v, f"eval.params.{k}")
                   for k, v in params_blk.items()}))
        else:
            raise ConfigError(f"unknown convention {conv!r}")
    except TypeError as exc:
        raise ConfigError(f"bad eval.params: {exc}")
    z = _cplx(_require(blk, "z", "eval.z"), "eval.z")
    tol = float(blk.get("series_tol", 1e-12))
    if tol <= 0:
        raise ConfigError("eval.series_tol must be positive")
    try:
        if blk.get("continued", False):
            res = eval_auto(params, z, tol=tol)
        else:
            res = eval_series(params, z, tol=tol)
    except HeunSpectraError as exc:
        raise ComputeError(f"evaluation failed: {exc}")
    print(f"H({_fmt(z.real)}{'+' if z.imag >= 0 else ''}{_fmt(z.imag)}j) = "
          f"{_fmt(res.value.real)}"
          f"{'+' if res.value.imag >= 0 else ''}{_fmt(res.value.imag)}j")
    doc = {
        "z": [z.real, z.imag],
        "value": [res.value.real, res.value.imag],
        "derivative": [res.derivative.real, res.derivative.imag],
        "err_estimate": res.err_estimate,
        "terms_used": res.terms_used,
    }
    _atomic_write(os.path.join(out_dir, "eval.json"),
                  json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _spectrum_task(args) -> list[SpectralPoint]:
    cfg, kind, n_max, seeds, st = args
    return enumerate_modes(cfg, kind, n_max, seeds, settings=st)


def _run_spectrum(config: RunConfig, out_dir: str, jobs: int) -> None:
    cfgs, _ = _physical_configs(config.raw)
    kind = _kind(config.raw)
    st, n_max, seeds = _settings(config.raw)
    tasks = [(cfg, kind, n_max, seeds, st) for cfg in cfgs]
    try:
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_spectrum_task, tasks))
        else:
            results = [_spectrum_task(t) for t in tasks]
    except HeunSpectraError as exc:
        raise ComputeError(f"spectrum solve failed: {exc}")
    points = [p for group in results for p in group]
    if not points:
        raise ComputeError("no modes converged from the seed grid")
    rows = [_point_row(p) for p in points]
    for row in rows:
        print(_summarize(row))
    diag = {"mode": "spectrum", "n_seeds": len(seeds),
            "settings": dataclasses.asdict(st)}
    _write_rows(rows, out_dir, "spectrum", diag)
    emit_plot_data(points, "complex-plane", out_dir)


def _run_continue(config: RunConfig, out_dir: str, jobs: int) -> None:
    blk = config.raw.get("continue", {})
    if not isinstance(blk, dict):
        raise ConfigError("'continue' must be an object")
    cfgs, M = _physical_configs(config.raw)
    kind = _kind(config.raw)
    st, n_max, seeds = _settings(config.raw)
    a_min = float(blk.get("a_min", config.raw["physical"].get("a", 0.0)))
    a_max = float(blk.get("a_max", a_min))
    da0 = float(blk.get("da0", 0.02 * M))
    jump_cap = float(blk.get("jump_cap", 0.2))
    if a_min > a_max:
        raise ConfigError("continue.a_min must not exceed continue.a_max")
    if not 0.0 <= a_min <= a_max <= 0.9999 * M:
        raise ConfigError("continue range must lie in [0, 0.9999*M]")
    if da0 <= 0 or jump_cap <= 0:
        raise ConfigError("continue.da0 and continue.jump_cap must be positive")
    rows: list[dict] = []
    tracks: list[ContinuationTrack] = []
    for cfg in cfgs:
        cfg0 = dataclasses.replace(cfg, a=a_min)
        seeds_pts = enumerate_modes(cfg0, kind, n_max, seeds, settings=st)
        if not seeds_pts:
            raise ComputeError(
                f"no modes converged at a={a_min} for l={cfg.l} m={cfg.m}")
        for p in seeds_pts:
            if a_max > a_min:
                try:
                    track = continue_in_a(p, a_max, da0, settings=st,
                                          jump_cap=jump_cap)
                except HeunSpectraError as exc:
                    raise ComputeError(f"continuation failed: {exc}")
            else:
                track = ContinuationTrack(points=(p,), jump_cap=jump_cap)
            track = ContinuationTrack(
                points=tuple(dataclasses.replace(q, n=p.n)
                             for q in track.points),
                jump_cap=track.jump_cap)
            tracks.append(track)
            for q in track.points:
                row = _point_row(q)
                rows.append(row)
                print(_summarize(row))
    diag = {"mode": "continue", "a_min": a_min, "a_max": a_max, "da0": da0,
            "settings": dataclasses.asdict(st)}
    _write_rows(rows, out_dir, "continuation", diag)
    emit_plot_data(tracks, "track-vs-a", out_dir)


def _run_oracle(config: RunConfig, out_dir: str) -> None:
    blk = config.raw.get("oracle", {})
    if not isinstance(blk, dict):
        raise ConfigError("'oracle' must be an object")
    cfgs, M = _physical_configs(config.raw)
    n_modes = int(blk.get("n_modes", 2))
    if n_modes < 1:
        raise ConfigError("oracle.n_modes must be at least 1")
    seeds = None
    if "seeds" in blk:
        seeds = [_cplx(v, "oracle.seeds entry") for v in blk["seeds"]]
    rows = []
    for cfg in cfgs:
        if cfg.a != 0.0:
            raise ConfigError("oracle mode requires a=0 (non-rotating)")
        try:
            modes = schwarzschild_qnm_modes(M=cfg.M, s=cfg.s, l=cfg.l,
                                            n_modes=n_modes, seeds=seeds)
        except HeunSpectraError as exc:
            raise ComputeError(f"oracle run failed: {exc}")
        if not modes:
            raise ComputeError(f"oracle found no modes for l={cfg.l}")
        E = complex(cfg.l * (cfg.l + 1))
        for n, omega in enumerate(modes):
            mismatch = abs(_qnm_mismatch(cfg.M, cfg.s, omega, E))
            row = {
                "l": cfg.l, "m": cfg.m, "n": n, "a": 0.0, "kind": "qnm",
                "re_omega": omega.real, "im_omega": omega.imag,
                "re_E": float(cfg.l * (cfg.l + 1)), "im_E": 0.0,
                "residual": mismatch, "stable": True,
            }
            rows.append(row)
            print(_summarize(row))
    diag = {"mode": "oracle", "n_modes": n_modes}
    _write_rows(rows, out_dir, "oracle", diag)


def _points_from_rows(rows: list[dict]) -> list[SpectralPoint]:
    from .teukolsky import SpectralUnknowns
    pts = []
    for row in rows:
        try:
            cfg = PhysicalConfig(M=float(row.get("M", 0.5)),
                                 a=float(row["a"]), s=int(row.get("s", -1)),
                                 l=int(row["l"]), m=int(row["m"]))
            unk = SpectralUnknowns(
                omega=complex(row["re_omega"], row["im_omega"]),
                E=complex(row["re_E"], row["im_E"]))
            pts.append(SpectralPoint(
                cfg=cfg, unk=unk, kind=BoundaryKind(row["kind"]),
                residual_norm=float(row["residual"]), n=int(row["n"]),
                stable=bool(row["stable"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad plot input row: {exc}")
    return pts


def _run_emit_plot(config: RunConfig, out_dir: str) -> None:
    blk = _require(config.raw, "plot")
    if not isinstance(blk, dict):
        raise ConfigError("'plot' must be an object")
    style = blk.get("style", "complex-plane")
    src = _require(blk, "input", "plot.input")
    try:
        with open(src) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read plot input {src!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"plot input {src!r} is not valid JSON: {exc}")
    rows = doc.get("rows") if isinstance(doc, dict) else None
    if not isinstance(rows, list):
        raise ConfigError("plot input must contain a 'rows' list")
    points = _points_from_rows(rows)
    try:
        paths = emit_plot_data(points, style, out_dir)
    except EmptyInput as exc:
        raise ComputeError(str(exc))
    for p in paths:
        print(f"wrote {p}")


# ---------------------------------------------------------------------------
# entry point


def run(config: RunConfig, out_dir: str = ".", jobs: int = 1) -> int:
    """Execute the configured mode; returns a process exit status."""
    try:
        if config.mode == "eval":
            _run_eval(config, out_dir)
        elif config.mode == "spectrum":
            _run_spectrum(config, out_dir, jobs)
        elif config.mode == "continue":
            _run_continue(config, out_dir, jobs)
        elif config.mode == "oracle":
            _run_oracle(config, out_dir)
        elif config.mode == "emit-plot":
            _run_emit_plot(config, out_dir)
        else:
            raise ConfigError(f"unknown mode {config.mode!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ComputeError, HeunSpectraError) as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="heun-spectra",
        description="Confluent-Heun spectral solver batch runner.")
    parser.add_argument("mode", choices=_MODES)
    parser.add_argument("--config", required=True,
                        help="path to the JSON run configuration")
    parser.add_argument("--out", default=".",
                        help="output directory for artifacts")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for independent solves")
    args = parser.parse_args(argv)
    if args.jobs < 1:
        print("config error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        config = RunConfig.load(args.config, args.mode)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(config, out_dir=args.out, jobs=args.jobs)


if __name__ == "__main__":
    sys.exit(main())

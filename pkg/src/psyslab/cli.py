"""Command-line front end: flat key=value configs, scenario dispatch,
CSV/JSON emission for plots and CI.

Subcommands: simulate, trace, predict, energy, verify, validate-law.
Exit codes: 0 success / all scenarios pass, 1 scenario failure or
invariant violation, 2 configuration error.  A simulation that ends in
blow-up exits 0: blow-up is a result, not an error.

All emission is data-only (plotting is left to external tools), floats
carry 17 significant digits, and identical config + seed reproduces
byte-identical files.  CSV files start with a comment line carrying the
tool version and the config hash; JSON files carry the same pair as
top-level fields, comments not being valid JSON.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .characteristics import (ClassLabel, Direction, classify, gradient_beta,
                              predict_blowup, trace)
from .energy import (ConcaveGauge, energy, energy_ddot_direct,
                     energy_ddot_formula)
from .errors import ConfigError, DomainError, EllipticStart
from .field import PeriodicGrid
from .pressure import PressureLaw, validate_law
from .riemann import Family
from .solver import SolverConfig, run
from .verify import (constant_state, default_suite, random_elliptic_state,
                     random_trig_state, simple_wave_state)

PRESETS = ("constant", "simple_wave", "random_trig", "elliptic_random")


@dataclass
class RunConfig:
    law: str = "quadratic"
    quartic_a: float = 0.0
    n: int = 256
    preset: str = "constant"
    u0: float = -1.0
    v0: float = 0.0
    u_center: float = -1.0
    amplitude: float = 0.3
    mode: int = 1
    r2_value: float = 0.0
    seed: int = 0
    modes: int = 3
    u_offset: float = -1.0
    t0: float = 0.0
    t_max: float = 10.0
    cfl_safety: float = 0.4
    grad_blowup_factor: float = 1e4
    tail_ratio_max: float = 1e-4
    hyperbolicity_eps: float = 1e-3
    snapshot_stride: int = 5
    outdir: str = "out"
    curve_seeds: int = 8
    family: str = "first"
    direction: str = "forward"
    horizon: float = 0.0  # 0 means the full trajectory window
    growth_factor: float = 10.0
    eps_b: float = 1e-3
    gauge: str = "log1p"
    verify_seeds: int = 5
    verify_t_max: float = 30.0
    verify_n: int = 256
    wave_n: int = 512
    validate_u_min: float = -10.0
    validate_u_max: float = 10.0
    validate_samples: int = 1001

    def law_obj(self) -> PressureLaw:
        if self.law == "quadratic":
            return PressureLaw.quadratic()
        return PressureLaw.quartic(self.quartic_a)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(t_max=self.t_max, cfl_safety=self.cfl_safety,
                            grad_blowup_factor=self.grad_blowup_factor,
                            tail_ratio_max=self.tail_ratio_max,
                            hyperbolicity_eps=self.hyperbolicity_eps,
                            snapshot_stride=self.snapshot_stride)

    def config_hash(self) -> str:
        """Hash of the run-defining keys (output location excluded)."""
        canon = "\n".join(f"{f.name}={getattr(self, f.name)!r}"
                          for f in sorted(dataclasses.fields(self),
                                          key=lambda f: f.name)
                          if f.name != "outdir")
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_CONVERTERS = {"int": int, "float": float, "str": str}


def _coerce(key: str, raw: str, where: str):
    if key not in _FIELDS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    conv = _CONVERTERS[_FIELDS[key]]
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from exc


def _validate(cfg: RunConfig) -> RunConfig:
    n = cfg.n
    if n < 16 or n > 4096 or (n & (n - 1)) != 0:
        raise ConfigError(f"n = {n} is not a power of two in [16, 4096]")
    if cfg.law not in ("quadratic", "quartic"):
        raise ConfigError(f"law must be quadratic or quartic, got {cfg.law!r}")
    if cfg.quartic_a < 0.0:
        raise ConfigError("quartic_a must be >= 0")
    if cfg.preset not in PRESETS:
        raise ConfigError(f"preset must be one of {PRESETS}, got {cfg.preset!r}")
    if cfg.family not in ("first", "second", "both"):
        raise ConfigError("family must be first, second, or both")
    if cfg.direction not in ("forward", "backward", "both"):
        raise ConfigError("direction must be forward, backward, or both")
    if cfg.gauge not in ("log1p", "rational"):
        raise ConfigError("gauge must be log1p or rational")
    if not 0.0 < cfg.cfl_safety <= 1.0:
        raise ConfigError("cfl_safety must be in (0, 1]")
    if cfg.snapshot_stride < 1:
        raise ConfigError("snapshot_stride must be >= 1")
    return cfg


def parse_config(path=None, overrides=()) -> RunConfig:
    """Assemble the effective config: defaults, then file, then --set flags."""
    cfg = RunConfig()
    if path is not None:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = stripped.partition("=")
            key, raw = key.strip(), raw.strip().strip('"')
            setattr(cfg, key, _coerce(key, raw, f"{path}:{lineno}"))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, _, raw = item.partition("=")
        key, raw = key.strip(), raw.strip()
        setattr(cfg, key, _coerce(key, raw, f"--set {key}"))
    return _validate(cfg)


def _echo_config(cfg: RunConfig, stream=sys.stderr):
    for f in dataclasses.fields(cfg):
        print(f"config: {f.name} = {getattr(cfg, f.name)}", file=stream)


def build_initial_state(cfg: RunConfig, grid: PeriodicGrid):
    law = cfg.law_obj()
    if cfg.preset == "constant":
        return constant_state(grid, cfg.u0, cfg.v0)
    if cfg.preset == "simple_wave":
        return simple_wave_state(law, grid, cfg.u_center, cfg.amplitude,
                                 cfg.mode, cfg.r2_value)
    if cfg.preset == "random_trig":
        return random_trig_state(grid, cfg.seed, cfg.modes, cfg.amplitude,
                                 cfg.u_offset)
    return random_elliptic_state(grid, np.random.default_rng(cfg.seed))


# ---------------------------------------------------------------------------
# emission

def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _header(cfg: RunConfig) -> str:
    return f"# psyslab {__version__} config_sha256={cfg.config_hash()}"


def _write_csv(cfg: RunConfig, path: Path, columns, rows):
    lines = [_header(cfg), ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(cfg: RunConfig, path: Path, payload: dict):
    payload = {"tool_version": __version__,
               "config_hash": cfg.config_hash(), **payload}
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"outdir {cfg.outdir!r} is not writable: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    law = cfg.law_obj()
    grid = PeriodicGrid(cfg.n)
    traj = run(law, build_initial_state(cfg, grid), cfg.t0, cfg.solver_config())
    nodes = grid.nodes
    snap_rows = [(t, nodes[j], s.u[j], s.v[j])
                 for t, s in traj.snapshots for j in range(grid.n)]
    _write_csv(cfg, out / "snapshots.csv", ("t", "x", "u", "v"), snap_rows)
    _write_csv(cfg, out / "series.csv",
               ("t", "max_u", "min_u", "max_abs_ux", "max_abs_vx", "tail_ratio"),
               traj.series)
    _write_json(cfg, out / "run.json", {
        "status": traj.status.value,
        "t_detect": traj.t_detect,
        "steps": traj.steps,
        "t_end": traj.t_end,
        "law": law.describe(),
    })
    return 0


def _families(cfg: RunConfig):
    if cfg.family == "both":
        return [Family.first, Family.second]
    return [Family[cfg.family]]


def _directions(cfg: RunConfig):
    if cfg.direction == "both":
        return [Direction.forward, Direction.backward]
    return [Direction[cfg.direction]]


def cmd_trace(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    law = cfg.law_obj()
    grid = PeriodicGrid(cfg.n)
    traj = run(law, build_initial_state(cfg, grid), cfg.t0, cfg.solver_config())
    horizon = cfg.horizon if cfg.horizon > 0.0 else traj.t_end - traj.t0
    entries = []
    for fam in _families(cfg):
        for direction in _directions(cfg):
            for i in range(cfg.curve_seeds):
                x0 = (i + 0.5) / cfg.curve_seeds
                name = f"curve_{fam.name}_{direction.name}_{i}.csv"
                try:
                    curve = trace(traj, x0, fam, direction, eps_b=cfg.eps_b)
                except EllipticStart as exc:
                    entries.append({"x0": x0, "family": fam.name,
                                    "direction": direction.name,
                                    "label": ClassLabel.undetermined.value,
                                    "error": str(exc)})
                    continue
                _write_csv(cfg, out / name,
                           ("t", "x", "u", "r1", "r2", "beta", "K_accum"),
                           curve.samples)
                label = classify(curve, horizon, cfg.growth_factor, cfg.eps_b)
                entries.append({"x0": x0, "family": fam.name,
                                "direction": direction.name,
                                "label": label.value,
                                "termination": curve.termination.value,
                                "t_hit": curve.t_hit,
                                "artifact": name})
    _write_json(cfg, out / "classification.json", {
        "run_status": traj.status.value,
        "curves": entries,
        "thresholds": {"horizon": horizon, "growth_factor": cfg.growth_factor,
                       "eps_b": cfg.eps_b},
    })
    return 0


def cmd_predict(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    law = cfg.law_obj()
    grid = PeriodicGrid(cfg.n)
    traj = run(law, build_initial_state(cfg, grid), cfg.t0, cfg.solver_config())
    fam = Family.second if cfg.family == "second" else Family.first
    rows = []
    predictions = []
    for i in range(cfg.curve_seeds):
        x0 = i / cfg.curve_seeds
        beta0 = gradient_beta(traj, x0, fam)
        curve = trace(traj, x0, fam, eps_b=cfg.eps_b)
        t_pred = predict_blowup(curve, beta0, extrapolate=0.25)
        rows.append((x0, beta0, np.nan if t_pred is None else t_pred))
        if t_pred is not None:
            predictions.append(t_pred)
    _write_csv(cfg, out / "predictions.csv", ("x0", "beta0", "t_predicted"), rows)
    _write_json(cfg, out / "predict.json", {
        "family": fam.name,
        "t_predicted_min": min(predictions) if predictions else None,
        "n_predicting": len(predictions),
        "solver_status": traj.status.value,
        "solver_t_detect": traj.t_detect,
    })
    return 0


def cmd_energy(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    law = cfg.law_obj()
    grid = PeriodicGrid(cfg.n)
    state = build_initial_state(cfg, grid)
    gauge = ConcaveGauge(cfg.gauge)
    try:
        e = energy(state, gauge)
        d_formula = energy_ddot_formula(law, state, gauge)
        d_direct = energy_ddot_direct(law, state, gauge)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_json(cfg, out / "energy.json", {
        "E": e,
        "ddot_formula": d_formula,
        "ddot_direct": d_direct,
        "identity_gap": abs(d_direct - d_formula),
        "gauge": cfg.gauge,
        "law": law.describe(),
    })
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    reports = default_suite(cfg.law_obj(), n_sweep_seeds=cfg.verify_seeds,
                            sweep_t_max=cfg.verify_t_max, sweep_n=cfg.verify_n,
                            wave_n=cfg.wave_n)
    for rep in reports:
        path = out / f"scenario_{rep.scenario_id}.json"
        rep.artifacts.append(str(path))
        _write_json(cfg, path, rep.to_dict())
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    for rep in reports:
        counts[rep.verdict] += 1
    _write_json(cfg, out / "verify.json", {
        "reports": [rep.to_dict() for rep in reports],
        "n_pass": counts["pass"],
        "n_fail": counts["fail"],
        "n_inconclusive": counts["inconclusive"],
        "all_pass": counts["pass"] == len(reports),
    })
    for rep in reports:
        print(f"{rep.scenario_id}: {rep.verdict}")
    return 0 if counts["pass"] == len(reports) else 1


def cmd_validate_law(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    report = validate_law(cfg.law_obj(), cfg.validate_u_min,
                          cfg.validate_u_max, cfg.validate_samples)
    _write_json(cfg, out / "validate_law.json", report.to_dict())
    return 0 if report.ok else 1


_COMMANDS = {
    "simulate": cmd_simulate,
    "trace": cmd_trace,
    "predict": cmd_predict,
    "energy": cmd_energy,
    "verify": cmd_verify,
    "validate-law": cmd_validate_law,
}


def dispatch(subcommand: str, cfg: RunConfig) -> int:
    return _COMMANDS[subcommand](cfg)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="psyslab",
        description="Numerical laboratory for the mixed-type p-system "
                    "u_t = -v_x, v_t = (p(u))_x on the unit circle.")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the config echo")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        _echo_config(cfg)
    try:
        return dispatch(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def console_main():
    sys.exit(main())

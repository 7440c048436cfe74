"""Scenario runner: JSON config in, CSV and JSON artifacts out.

Config keys
    name          optional label
    omega0        rest-mass frequency (> 0); default 100 * max|beta| over the run
    dimension     4 (default) or 2 for the two-oscillator pendulum
    field         a FieldProfile dict ({"kind": ..., ...}); add
                  "charge_to_mass" to give strengths as a magnetic field
    initial       exactly one of
                    {"spinor": {"chi_plus", "chi_minus"} or {"f", "g"}, "u": [w, x, y, z]}
                    {"oscillator": {"x": [...], "v": [...]}}
                    {"modes": {"a", "b", "c", "d"}}  (a, b only in dimension 2)
                  complex numbers are written as numbers or [re, im] pairs
    run           {"t0", "t1", "dt"}
    outputs       {"dir", "every", "observables": [...], "spectrum_component"}
                  observables: spectrum, geometric_phase, precession,
                  formulation, hidden_variables

Exit codes: 0 ok, 2 invalid config, 3 integration failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import dynamics, fields, foucault, mapping, observables
from .dynamics import OscillatorSystem, OscState, SpinorSystem, integrate
from .errors import (
    ConfigInvalid,
    IntegrationFailed,
    JumpNotOnGrid,
    NonFinite,
    OutOfDomain,
    SpinAnalogError,
    StepTooLarge,
)
from .quaternion import J, ONE, Quat, Spinor

DEFAULT_OMEGA0_RATIO = 100.0
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4

TRAJECTORY_COLUMNS = (
    "t", "x1", "x2", "x3", "x4", "v1", "v2", "v3", "v4", "p1", "p2", "p3", "p4", "L2",
    "chi_plus_re", "chi_plus_im", "chi_minus_re", "chi_minus_im", "norm", "Sx", "Sy", "Sz",
)
OBSERVABLE_COLUMNS = (
    "t", "constraint_residual", "bloch_x", "bloch_y", "bloch_z", "S_parallel", "q_norm",
)
KNOWN_OBSERVABLES = ("spectrum", "geometric_phase", "precession", "formulation", "hidden_variables")

# field keys that carry a coupling strength, per kind
_STRENGTH_KEYS = {
    "constant": ("beta",),
    "rotating": ("amplitude", "static"),
    "linear_ramp": ("start", "slope"),
    "sinusoidal": ("offset", "amplitude"),
    "piecewise_constant": ("values",),
}


# --------------------------------------------------------------------------
# config parsing


def _need(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise ConfigInvalid(path, "expected an object")
    if key not in d:
        raise ConfigInvalid(f"{path}.{key}" if path else key, "missing required key")
    return d[key]


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigInvalid(path, f"expected a finite number, got {v!r}")
    return float(v)


def _complex(v, path: str) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigInvalid(path, "complex numbers are [re, im] pairs")
        return complex(_number(v[0], path), _number(v[1], path))
    return complex(_number(v, path))


def _vector(v, n: int, path: str) -> np.ndarray:
    if not isinstance(v, (list, tuple)) or len(v) != n:
        raise ConfigInvalid(path, f"expected a list of {n} numbers")
    return np.array([_number(c, f"{path}[{i}]") for i, c in enumerate(v)])


def _scale_strengths(spec: dict, factor: float) -> dict:
    out = dict(spec)
    for key in _STRENGTH_KEYS.get(spec.get("kind"), ()):
        if key in out:
            out[key] = (np.asarray(out[key], dtype=float) * factor).tolist()
    return out


def parse_field(d, path: str = "field") -> fields.FieldProfile:
    if not isinstance(d, dict):
        raise ConfigInvalid(path, "expected an object")
    d = dict(d)
    q_over_m = d.pop("charge_to_mass", None)
    if q_over_m is not None:
        q_over_m = _number(q_over_m, f"{path}.charge_to_mass")
        if q_over_m <= 0:
            raise ConfigInvalid(f"{path}.charge_to_mass", "must be positive")
        d = _scale_strengths(d, float(fields.from_magnetic_field(1.0, q_over_m)))
    try:
        return fields.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(path, str(exc)) from None


@dataclass
class Scenario:
    name: str
    omega0: float
    dimension: int
    profile: fields.FieldProfile
    initial_kind: str
    initial: object
    u: Quat
    t0: float
    t1: float
    dt: float
    every: int = 1
    observables: tuple = ()
    spectrum_component: int = 0
    out_dir: str | None = None
    raw: dict = field(default_factory=dict)

    @property
    def spinor(self) -> Spinor | None:
        return self.initial if self.initial_kind == "spinor" else None


def _parse_spinor(d: dict, path: str, beta0) -> Spinor:
    if "chi_plus" in d or "chi_minus" in d:
        s = Spinor(
            _complex(_need(d, "chi_plus", path), f"{path}.chi_plus"),
            _complex(_need(d, "chi_minus", path), f"{path}.chi_minus"),
        )
    elif "f" in d or "g" in d:
        f = _complex(_need(d, "f", path), f"{path}.f")
        g = _complex(_need(d, "g", path), f"{path}.g")
        e_plus, e_minus = dynamics.eigenspinors(beta0)
        s = Spinor.from_array(f * e_plus + g * e_minus)
    else:
        raise ConfigInvalid(path, "give chi_plus/chi_minus or f/g")
    if not s.is_normalized(1e-9):
        raise ConfigInvalid(path, f"spinor must be normalized, |chi|^2 = {s.norm2()!r}")
    return s


def parse_config(cfg: dict) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigInvalid("<root>", "config must be a JSON object")
    dim = cfg.get("dimension", 4)
    if dim not in (2, 4):
        raise ConfigInvalid("dimension", "must be 2 or 4")
    profile = parse_field(_need(cfg, "field", ""))
    if dim == 2:
        for key in _STRENGTH_KEYS[profile.kind]:
            vals = np.atleast_2d(np.asarray(profile.spec.get(key, [0, 0, 0]), dtype=float))
            if vals.shape[-1] == 3 and np.any(vals[:, [0, 2]] != 0):
                raise ConfigInvalid(f"field.{key}", "dimension 2 needs a y-directed field")
        if profile.kind == "rotating":
            raise ConfigInvalid("field.kind", "a rotating field is not y-directed")

    run = _need(cfg, "run", "")
    t0 = _number(run.get("t0", 0.0), "run.t0")
    t1 = _number(_need(run, "t1", "run"), "run.t1")
    dt = _number(_need(run, "dt", "run"), "run.dt")
    if not t1 > t0:
        raise ConfigInvalid("run.t1", "must exceed run.t0")
    if not dt > 0:
        raise ConfigInvalid("run.dt", "must be positive")
    lo, hi = profile.domain
    if t0 < lo or t1 > hi:
        raise ConfigInvalid("run", f"[t0, t1] leaves the field domain [{lo}, {hi}]")
    if "omega0" in cfg:
        omega0 = _number(cfg["omega0"], "omega0")
    else:
        omega0 = DEFAULT_OMEGA0_RATIO * profile.max_norm(t0, t1)
    if not omega0 > 0:
        raise ConfigInvalid("omega0", "must be positive (a zero field needs it set explicitly)")
    limit = dynamics.max_step(omega0, profile.max_norm(t0, t1))
    if dt > limit:
        raise ConfigInvalid("run.dt", f"{dt!r} exceeds the step limit {limit!r}")
    beta0 = profile.sample(t0).beta

    init = _need(cfg, "initial", "")
    forms = [k for k in ("spinor", "oscillator", "modes") if isinstance(init, dict) and k in init]
    if len(forms) != 1:
        raise ConfigInvalid("initial", "give exactly one of spinor, oscillator, modes")
    kind = forms[0]
    body = init[kind]
    path = f"initial.{kind}"
    if not isinstance(body, dict):
        raise ConfigInvalid(path, "expected an object")
    u = ONE
    if "u" in init:
        u = Quat.from_array(_vector(init["u"], 4, "initial.u"))
        if not u.is_unit():
            raise ConfigInvalid("initial.u", f"hidden quaternion must be unit, |u| = {u.norm()!r}")
    if kind == "spinor":
        initial = _parse_spinor(body, path, beta0)
    elif kind == "oscillator":
        initial = OscState(
            _vector(_need(body, "x", path), dim, f"{path}.x"),
            _vector(_need(body, "v", path), dim, f"{path}.v"),
        )
    else:
        names = "abcd" if dim == 4 else "ab"
        initial = tuple(_complex(body.get(k, 0.0), f"{path}.{k}") for k in names)

    out = cfg.get("outputs", {})
    if not isinstance(out, dict):
        raise ConfigInvalid("outputs", "expected an object")
    every = out.get("every", 1)
    if isinstance(every, bool) or not isinstance(every, int) or every < 1:
        raise ConfigInvalid("outputs.every", "must be a positive integer")
    obs = tuple(out.get("observables", ()))
    for i, name in enumerate(obs):
        if name not in KNOWN_OBSERVABLES:
            raise ConfigInvalid(f"outputs.observables[{i}]", f"unknown observable {name!r}")
    needs_spinor = {"geometric_phase", "precession", "formulation", "hidden_variables"}
    if kind != "spinor" and needs_spinor.intersection(obs):
        raise ConfigInvalid("initial", f"observables {sorted(needs_spinor.intersection(obs))} need a spinor initial state")
    if "spectrum" in obs and profile.kind != "constant":
        raise ConfigInvalid("outputs.observables", "spectrum needs a constant field")
    if "geometric_phase" in obs and (profile.kind != "constant" or not np.linalg.norm(beta0) > 0):
        raise ConfigInvalid("outputs.observables", "geometric_phase needs a constant non-zero field")
    comp = out.get("spectrum_component", 0)
    if comp not in range(dim):
        raise ConfigInvalid("outputs.spectrum_component", f"must be an index below {dim}")

    return Scenario(
        name=str(cfg.get("name", "scenario")), omega0=omega0, dimension=dim, profile=profile,
        initial_kind=kind, initial=initial, u=u, t0=t0, t1=t1, dt=dt, every=every,
        observables=obs, spectrum_component=comp, out_dir=out.get("dir"), raw=cfg,
    )


def load_config(path) -> dict:
    """Read a config file, or a bundled scenario when ``path`` names one."""
    p = Path(path)
    if not p.exists() and str(path) in list_scenarios():
        return scenario_config(str(path))
    text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("<root>", f"not valid JSON: {exc}") from None


# --------------------------------------------------------------------------
# bundled scenarios


def list_scenarios() -> list[str]:
    folder = resources.files("spinanalog") / "scenarios"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def scenario_config(name: str) -> dict:
    if name not in list_scenarios():
        raise ConfigInvalid("<scenario>", f"unknown scenario {name!r}")
    text = (resources.files("spinanalog") / "scenarios" / f"{name}.json").read_text()
    return json.loads(text)


# --------------------------------------------------------------------------
# running


@dataclass
class RunResult:
    summary: dict
    out_dir: Path
    files: dict


def _integrate(system, initial, sc: Scenario):
    try:
        return integrate(system, initial, sc.t0, sc.t1, sc.dt)
    except (StepTooLarge, JumpNotOnGrid) as exc:
        raise ConfigInvalid("run.dt", str(exc)) from None
    except OutOfDomain as exc:
        raise ConfigInvalid("run", str(exc)) from None
    except NonFinite as exc:
        raise IntegrationFailed(str(exc)) from None


def _oscillator_initial(sc: Scenario, beta0) -> OscState:
    if sc.initial_kind == "spinor":
        return mapping.spinor_to_oscillator_init(sc.initial, sc.u, beta0, sc.omega0)
    if sc.initial_kind == "oscillator":
        return sc.initial
    return dynamics.analytic_oscillator(sc.initial, beta0, sc.omega0, 0.0)


def _pendulum_initial(sc: Scenario, beta0) -> foucault.Osc2State:
    if sc.initial_kind == "oscillator":
        return foucault.Osc2State(*sc.initial.x, *sc.initial.v)
    if sc.initial_kind == "modes":
        a, b = sc.initial
        return foucault.foucault_analytic(a, b, -float(beta0[1]), sc.omega0, 0.0)
    s = sc.initial
    d = dynamics.spe_rhs(s, sc.t0, sc.profile, sc.omega0)
    return foucault.Osc2State(s.chi_plus.real, s.chi_minus.real, d.chi_plus.real, d.chi_minus.real)


def _fmt(rows: np.ndarray) -> list[str]:
    return [",".join(format(float(v), ".17g") for v in row) for row in rows]


def _write_csv(path: Path, header, rows: np.ndarray) -> None:
    lines = [",".join(header)] + _fmt(rows)
    path.write_text("\n".join(lines) + "\n")


def _trajectory_tables(sc: Scenario, traj):
    """Full-resolution trajectory and observable columns."""
    t = traj.t
    betas, _ = fields.sample_many(sc.profile, t)
    n = len(t)
    if sc.dimension == 4:
        x, v = traj.x, traj.v
        p = dynamics.momentum_series(x, v, betas)
        L = 0.5 * (np.sum(p * p, axis=1) - sc.omega0**2 * np.sum(x * x, axis=1))
        chi = mapping.extract_spinor_path(x, sc.u)
        bex = np.stack([x @ dynamics.build_coupling_matrix(e).T for e in np.eye(3)], axis=1)
        spin = -np.einsum("nj,nkj->nk", p, bex) / (2.0 * sc.omega0)
    else:
        x = np.zeros((n, 4))
        v = np.zeros((n, 4))
        p = np.zeros((n, 4))
        x[:, :2] = traj.y[:, :2]
        v[:, :2] = traj.y[:, 2:]
        b = -betas[:, 1]
        p[:, 0] = v[:, 0] - b * x[:, 1]
        p[:, 1] = v[:, 1] + b * x[:, 0]
        L = 0.5 * (np.sum(p * p, axis=1) - sc.omega0**2 * np.sum(x * x, axis=1))
        chi = np.stack([x[:, 0] + 1j * p[:, 0] / sc.omega0, x[:, 1] + 1j * p[:, 1] / sc.omega0], axis=1)
        spin = observables.bloch_path(chi) * np.sum(np.abs(chi) ** 2, axis=1)[:, None]
    norm = np.sum(np.abs(chi) ** 2, axis=1)
    xx = np.sum(x * x, axis=1)
    # in two dimensions L1 oscillates; scale by the Jones norm instead of x.x
    scale = xx if sc.dimension == 4 else norm
    residual = np.abs(L) / (sc.omega0**2 * np.maximum(scale, 1e-300))
    safe = np.where(norm > 0, norm, 1.0)
    bloch = 2.0 * spin / safe[:, None]
    bnorm = np.linalg.norm(betas, axis=1)
    s_par = np.where(bnorm > 0, np.sum(spin * betas, axis=1) / np.where(bnorm > 0, bnorm, 1.0), 0.0)

    traj_rows = np.column_stack(
        [t, x, v, p, L, chi[:, 0].real, chi[:, 0].imag, chi[:, 1].real, chi[:, 1].imag, norm, spin]
    )
    obs_rows = np.column_stack([t, residual, bloch, s_par, np.sqrt(xx)])
    return traj_rows, obs_rows, residual


def compare_formulations(config, u: Quat | None = None, out_dir=None) -> dict:
    """Integrate the spinor equation and the oscillators from q = u s and compare.

    Returns a report with the pointwise deviation |extract(x(t)) - chi(t)|_max
    and its maximum; writes ``deviation.csv`` when ``out_dir`` is given.
    """
    sc = config if isinstance(config, Scenario) else parse_config(config)
    if sc.initial_kind != "spinor":
        raise ConfigInvalid("initial", "compare needs a spinor initial state")
    if sc.dimension != 4:
        raise ConfigInvalid("dimension", "compare runs the four-oscillator system")
    u = sc.u if u is None else u
    if not u.is_unit():
        raise ConfigInvalid("u", f"hidden quaternion must be unit, |u| = {u.norm()!r}")
    beta0 = sc.profile.sample(sc.t0).beta
    spin = _integrate(SpinorSystem(sc.profile, sc.omega0), sc.initial, sc)
    osc = _integrate(
        OscillatorSystem(sc.profile, sc.omega0),
        mapping.spinor_to_oscillator_init(sc.initial, u, beta0, sc.omega0), sc,
    )
    dev = np.max(np.abs(mapping.extract_spinor_path(osc.x, u) - spin.chi), axis=1)
    report = {
        "t": spin.t, "deviation": dev, "max_deviation": float(dev.max()),
        "u": u.as_array().tolist(), "oscillator_x": osc.x,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = np.column_stack([spin.t, dev])[:: sc.every]
        _write_csv(out / "deviation.csv", ("t", "deviation"), rows)
    return report


def run_scenario(config, out_dir=None) -> RunResult:
    """Run one scenario and write trajectory.csv, observables.csv and summary.json."""
    sc = config if isinstance(config, Scenario) else parse_config(config)
    out = Path(out_dir or sc.out_dir or Path("runs") / sc.name)
    beta0 = sc.profile.sample(sc.t0).beta

    if sc.dimension == 4:
        traj = _integrate(OscillatorSystem(sc.profile, sc.omega0), _oscillator_initial(sc, beta0), sc)
    else:
        traj = _integrate(foucault.FoucaultSystem(sc.profile, sc.omega0), _pendulum_initial(sc, beta0), sc)
    traj_rows, obs_rows, residual = _trajectory_tables(sc, traj)

    summary = {
        "name": sc.name,
        "dimension": sc.dimension,
        "omega0": sc.omega0,
        "field": sc.profile.to_dict(),
        "run": {"t0": sc.t0, "t1": sc.t1, "dt": sc.dt, "step": traj.dt, "samples": len(traj)},
        "max_L2_residual": float(residual.max()) if sc.dimension == 4 else None,
        "spectral_peaks": None,
        "phase_residual": None,
        "max_formulation_deviation": None,
        "precession_rate": None,
    }
    if "spectrum" in sc.observables:
        est = observables.frequency_split(traj, sc.spectrum_component)
        summary["spectral_peaks"] = est.peaks.tolist()
        summary["spectral_resolution"] = est.resolution
    if "geometric_phase" in sc.observables:
        g = observables.geometric_phase_check(sc.profile, sc.spinor, sc.omega0, sc.dt, 1, sc.u)
        summary["phase_residual"] = g.phase_residual
        summary["oscillator_sign_flip_residual"] = max(g.position_residual, g.velocity_residual)
        summary["revolution_time"] = g.period
    if "precession" in sc.observables:
        spin = _integrate(SpinorSystem(sc.profile, sc.omega0), sc.spinor, sc)
        axis = beta0 / np.linalg.norm(beta0)
        summary["precession_rate"] = observables.precession_rate(spin, axis)
        if sc.profile.kind == "constant" and sc.dimension == 4:
            summary["eigenphase_rates"] = list(observables.eigenphase_rates(spin, axis, sc.omega0))
    if "formulation" in sc.observables:
        rep = compare_formulations(sc)
        summary["max_formulation_deviation"] = rep["max_deviation"]
    if "hidden_variables" in sc.observables:
        alt = sc.u * J
        a = compare_formulations(sc)
        b = compare_formulations(sc, alt)
        summary["hidden_variables"] = {
            "u_a": a["u"], "u_b": b["u"],
            "oscillator_separation": float(np.max(np.abs(a["oscillator_x"] - b["oscillator_x"]))),
            "max_deviation_a": a["max_deviation"], "max_deviation_b": b["max_deviation"],
            "deviation_curve_gap": float(np.max(np.abs(a["deviation"] - b["deviation"]))),
        }

    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "trajectory.csv", TRAJECTORY_COLUMNS, traj_rows[:: sc.every])
    _write_csv(out / "observables.csv", OBSERVABLE_COLUMNS, obs_rows[:: sc.every])
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    files = {k: out / f"{k}.{ext}" for k, ext in
             (("trajectory", "csv"), ("observables", "csv"), ("summary", "json"))}
    return RunResult(summary, out, files)


def _run_named(args) -> tuple[str, int]:
    name, out_root = args
    try:
        run_scenario(scenario_config(name), Path(out_root) / name)
        return name, EXIT_OK
    except ConfigInvalid:
        return name, EXIT_CONFIG
    except IntegrationFailed:
        return name, EXIT_INTEGRATION
    except OSError:
        return name, EXIT_IO


def run_many(names, out_root, workers: int | None = None) -> dict:
    """Run bundled scenarios in separate processes, one output folder each."""
    jobs = [(n, str(out_root)) for n in names]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(_run_named, jobs))


# --------------------------------------------------------------------------
# command line


def _parse_u(text: str) -> Quat:
    try:
        vals = [float(c) for c in text.split(",")]
    except ValueError:
        raise ConfigInvalid("--hidden-u", "expected four comma-separated numbers") from None
    if len(vals) != 4:
        raise ConfigInvalid("--hidden-u", "expected four comma-separated numbers")
    return Quat(*vals)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinanalog", description="Run oscillator/spinor scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config (file path or bundled name)")
    r.add_argument("config")
    r.add_argument("--out", help="output directory")
    c = sub.add_parser("compare", help="oscillator vs spinor deviation for a spinor-form config")
    c.add_argument("config")
    c.add_argument("--out", help="output directory for deviation.csv")
    c.add_argument("--hidden-u", help="override u as w,x,y,z")
    s = sub.add_parser("scenarios", help="bundled scenarios")
    ssub = s.add_subparsers(dest="action", required=True)
    ssub.add_parser("list")
    show = ssub.add_parser("show")
    show.add_argument("name")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scenarios":
            if args.action == "list":
                for name in list_scenarios():
                    print(name)
            else:
                print(json.dumps(scenario_config(args.name), indent=2))
            return EXIT_OK
        cfg = load_config(args.config)
        if args.command == "run":
            res = run_scenario(cfg, args.out)
            print(json.dumps(res.summary, indent=2, sort_keys=True))
            print(f"wrote {res.out_dir}", file=sys.stderr)
        else:
            u = _parse_u(args.hidden_u) if args.hidden_u else None
            rep = compare_formulations(cfg, u, args.out)
            print(json.dumps({"max_deviation": rep["max_deviation"], "u": rep["u"]}, indent=2))
        return EXIT_OK
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationFailed as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpinAnalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())

"""Scenario runner: declarative JSON configs in, CSV trajectories and flat
key = value summaries out.

Everything physical in a config must name its unit; there are no defaults
for dimensional quantities.  Outputs are written atomically and are
byte-identical across reruns of the same config.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fields, landau_lifshitz, lorentz_dirac, memory_force, penning
from .darwin import (BodySpec, ManyBodyState, coulomb_forces,
                     darwin_mechanical_forces, integrate_darwin,
                     retarded_twobody_oracle)
from .errors import ConfigError, PhysicsError, RadReactError
from .integrate import StepControls
from .units import (DEFAULT_UNITS, ChargeModel, PointLimit, SphereShell,
                    UniformBall, UnitSystem, electron_preset, proton_preset)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_IO = 4

CSV_HEADER = "t,qx,qy,qz,vx,vy,vz,ax,ay,az,energy,schott,radiated_cum"


@dataclass
class RunReport:
    status: str
    summary: dict
    files: list[str]


# --- config parsing ---------------------------------------------------------

def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing '{key}' in {where}")
    return cfg[key]


def _unit_system(cfg: dict) -> UnitSystem:
    units = _require(cfg, "units", "config")
    kind = _require(units, "system", "units block")
    if kind == "internal":
        return DEFAULT_UNITS
    if kind == "si_seconds_electron_mass":
        return UnitSystem()
    raise ConfigError(f"unknown unit system '{kind}'")


def _quantity(units: UnitSystem, spec, kind: str, where: str) -> float:
    """Parse {'value': x, 'unit': u}; every dimensional input declares a unit."""
    if not isinstance(spec, dict) or "value" not in spec or "unit" not in spec:
        raise ConfigError(f"{where}: physical quantities need value and unit")
    value = float(spec["value"])
    unit = spec["unit"]
    if unit == "internal":
        return value
    converters = {
        "bfield": {"gauss": units.bfield_from_gauss, "tesla": units.bfield_from_si},
        "frequency": {"rad_s": units.frequency_from_si},
        "time": {"s": units.time_from_si},
        "length": {"m": units.length_from_si},
        "velocity": {"m_s": units.velocity_from_si, "c": lambda x: x},
        "plain": {},
    }
    table = converters.get(kind, {})
    if unit not in table:
        raise ConfigError(f"{where}: unit '{unit}' not valid for {kind}")
    return float(table[unit](value))


def _form_factor(cfg: dict):
    kind = _require(cfg, "kind", "form_factor")
    if kind == "point":
        return PointLimit()
    radius = float(_require(cfg, "radius", "form_factor"))
    if kind == "sphere_shell":
        return SphereShell(radius)
    if kind == "uniform_ball":
        return UniformBall(radius)
    raise ConfigError(f"unknown form factor '{kind}'")


def _particle(cfg: dict, units: UnitSystem) -> ChargeModel:
    p = _require(cfg, "particle", "config")
    if "preset" in p:
        ff = _form_factor(p["form_factor"]) if "form_factor" in p else None
        if p["preset"] == "electron":
            return electron_preset(units, ff)
        if p["preset"] == "proton":
            return proton_preset(units, ff)
        raise ConfigError(f"unknown preset '{p['preset']}'")
    e = float(_require(p, "e", "particle"))
    m0 = float(_require(p, "m0", "particle"))
    ff = _form_factor(_require(p, "form_factor", "particle"))
    m_b = float(p["m_b"]) if "m_b" in p else None
    return ChargeModel(e=e, m0=m0, form_factor=ff, m_b=m_b, units=units)


def _field_map(cfg: dict, units: UnitSystem, model: ChargeModel) -> fields.FieldMap:
    f = _require(cfg, "field", "config")
    kind = _require(f, "kind", "field")
    if kind == "zero":
        return fields.zero_field()
    if kind == "uniform_b":
        b = _quantity(units, _require(f, "b", "field"), "bfield", "field.b")
        axis = f.get("axis", [0.0, 0.0, 1.0])
        return fields.uniform_magnetic(b, axis)
    if kind == "penning":
        b = _quantity(units, _require(f, "b", "field"), "bfield", "field.b")
        wz = _quantity(units, _require(f, "omega_z", "field"), "frequency",
                       "field.omega_z")
        return fields.penning_trap(model.m0, model.e, wz, b)
    if kind == "harmonic_central":
        w0 = _quantity(units, _require(f, "omega0", "field"), "frequency",
                       "field.omega0")
        return fields.harmonic_central(model.m0, model.e, w0)
    if kind == "axial_harmonic":
        w0 = _quantity(units, _require(f, "omega0", "field"), "frequency",
                       "field.omega0")
        k = model.m0 * w0 * w0 / model.e
        return fields.axial_1d(lambda x: 0.5 * k * x * x, lambda x: k * x,
                               lambda x: k)
    if kind == "axial_linear":
        a0 = float(_require(f, "a0", "field"))
        return fields.axial_1d(lambda x: -a0 * x, lambda x: -a0, lambda x: 0.0)
    raise ConfigError(f"unknown field kind '{kind}'")


def _controls(cfg: dict) -> StepControls:
    c = cfg.get("controls", {})
    return StepControls(
        rtol=float(c.get("rtol", 1e-10)),
        atol=float(c.get("atol", 1e-12)),
        max_step=float(c.get("max_step", math.inf)),
    )


def _vec(cfg, key, where) -> np.ndarray:
    raw = _require(cfg, key, where)
    arr = np.asarray([float(x) for x in raw], dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{where}.{key} must be a 3-vector")
    return arr


# --- output writing ---------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(x))


def trajectory_csv(traj) -> str:
    lines = [CSV_HEADER]
    for i in range(len(traj.t)):
        row = [traj.t[i], *traj.q[i], *traj.v[i], *traj.a[i],
               traj.energy[i], traj.schott[i], traj.radiated[i]]
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def manybody_csv(traj, body: int) -> str:
    lines = [CSV_HEADER]
    zero = 0.0
    for i in range(len(traj.t)):
        row = [traj.t[i], *traj.q[i, body], *traj.v[i, body], zero, zero, zero,
               traj.energy[i], traj.energy[i], zero]
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def summary_text(summary: dict) -> str:
    lines = [f"{k} = {_fmt(v) if isinstance(v, float) else v}"
             for k, v in sorted(summary.items())]
    return "\n".join(lines) + "\n"


def _out_dir(cfg: dict) -> Path:
    root = os.environ.get("RADREACT_OUT_DIR")
    base = Path(root) if root else Path(cfg.get("out_dir", "."))
    return base


# --- scenario implementations ------------------------------------------------

def _fit_exponential_rate(t, mag) -> float:
    good = mag > 0
    return float(np.polyfit(t[good], np.log(mag[good]), 1)[0])


def _run_ld(cfg, units, forward: bool) -> tuple[dict, object]:
    model_c = _particle(cfg, units)
    fmap = _field_map(cfg, units, model_c)
    eps = float(_require(cfg, "eps", "config"))
    ld = lorentz_dirac.LdModel(
        charge=model_c, field=fmap, eps=eps,
        mass_model=lorentz_dirac.MassModel(cfg.get("mass_model", "relativistic")))
    init = _require(cfg, "initial", "config")
    t_span = _require(cfg, "t_span", "config")
    controls = lorentz_dirac.LdControls(
        step=_controls(cfg),
        detect_runaways=bool(cfg.get("detect_runaways", True)),
        runaway_multiple=float(cfg.get("runaway_multiple", 10.0)))
    if forward:
        q0 = _vec(init, "q", "initial")
        v0 = _vec(init, "v", "initial")
        if init.get("a", "manifold") == "manifold":
            a0 = ld.h_manifold(q0, v0)
        else:
            a0 = _vec(init, "a", "initial")
        traj = lorentz_dirac.integrate_forward(
            ld, lorentz_dirac.JetState(q0, v0, a0),
            (float(t_span[0]), float(t_span[1])), controls)
    else:
        q_t = _vec(init, "q", "initial (terminal)")
        v_t = _vec(init, "v", "initial (terminal)")
        traj = lorentz_dirac.integrate_backward(
            ld, q_t, v_t, float(t_span[1]), controls)
    summary = {
        "ld.final_energy": float(traj.energy[-1]),
        "ld.total_radiated": float(traj.radiated[-1]),
        "ld.runaway_detected": str(traj.runaway_detected).lower(),
        "ld.samples": len(traj.t),
    }
    if traj.runaway_detected:
        amag = np.sqrt(np.sum(traj.a**2, axis=1))
        tail = amag > 10.0 * max(amag[0], 1e-300)
        if np.count_nonzero(tail) >= 4:
            summary["ld.runaway_rate"] = _fit_exponential_rate(traj.t[tail], amag[tail])
            summary["ld.runaway_rate_expected"] = 1.0 / (eps * model_c.beta)
    return summary, traj


def _run_ll(cfg, units) -> tuple[dict, object]:
    model_c = _particle(cfg, units)
    fmap = _field_map(cfg, units, model_c)
    eps = float(_require(cfg, "eps", "config"))
    ll = landau_lifshitz.LlModel(
        charge=model_c, field=fmap, eps=eps,
        mass_model=lorentz_dirac.MassModel(cfg.get("mass_model", "relativistic")))
    init = _require(cfg, "initial", "config")
    t_span = _require(cfg, "t_span", "config")
    traj = landau_lifshitz.integrate(
        ll, _vec(init, "q", "initial"), _vec(init, "v", "initial"),
        (float(t_span[0]), float(t_span[1])), _controls(cfg))
    summary = {
        "ll.final_energy": float(traj.energy[-1]),
        "ll.total_radiated": float(traj.radiated[-1]),
        "ll.samples": len(traj.t),
    }
    return summary, traj


def _run_penning(cfg, units) -> tuple[dict, object]:
    model_c = _particle(cfg, units)
    f = _require(cfg, "field", "config")
    b = _quantity(units, _require(f, "b", "field"), "bfield", "field.b")
    wz = _quantity(units, _require(f, "omega_z", "field"), "frequency",
                   "field.omega_z")
    spec = penning.TrapSpec(model_c, wz, b)
    rep = penning.mode_analysis(spec)
    eig = penning.numeric_eigen_oracle(spec)
    summary = {
        "penning.omega_plus": rep.omega_plus,
        "penning.omega_minus": rep.omega_minus,
        "penning.omega_z": rep.omega_z,
        "penning.gamma_plus": rep.gamma_plus,
        "penning.gamma_minus": rep.gamma_minus,
        "penning.gamma_z": rep.gamma_z,
        "penning.lambda": spec.lam,
        "penning.critical_field": penning.critical_field(model_c, wz),
        "penning.critical_field_gauss": units.bfield_to_gauss(
            penning.critical_field(model_c, wz)),
        "penning.lifetime_cyclotron": rep.lifetimes["cyclotron"],
        "penning.lifetime_magnetron": rep.lifetimes["magnetron"],
        "penning.lifetime_axial": rep.lifetimes["axial"],
    }
    for i, val in enumerate(eig):
        summary[f"penning.eigen{i}_re"] = float(val.real)
        summary[f"penning.eigen{i}_im"] = float(val.imag)
    return summary, None


def _run_synchrotron(cfg, units) -> tuple[dict, object]:
    model_c = _particle(cfg, units)
    f = _require(cfg, "field", "config")
    b = _quantity(units, _require(f, "b", "field"), "bfield", "field.b")
    gamma0 = float(_require(cfg, "gamma0", "config"))
    eps = float(cfg.get("eps", 1.0))
    ll = landau_lifshitz.LlModel(charge=model_c,
                                 field=fields.uniform_magnetic(b, [0, 0, 1]),
                                 eps=eps)
    dec = landau_lifshitz.constant_b_closed_forms(ll, b, gamma0)
    ratio = float(cfg.get("radius_ratio", 1e-5))
    t_star = dec.time_for_radius_ratio(ratio)
    revs = dec.revolution_count(t_star)
    summary = {
        "synchrotron.omega_c": dec.omega_c,
        "synchrotron.damping_rate": dec.damping,
        "synchrotron.per_angle_decay": dec.per_angle,
        "synchrotron.r0": dec.r0,
        "synchrotron.time_for_ratio": t_star,
        "synchrotron.time_for_ratio_ultrarel": (1.0 / ratio - 1.0) / (gamma0 * dec.damping),
        "synchrotron.revolutions": revs,
        "synchrotron.time_for_ratio_si": units.time_to_si(t_star),
    }
    return summary, None


def _darwin_state(cfg, units) -> ManyBodyState:
    parts = _require(cfg, "particles", "config")
    bodies = []
    for i, p in enumerate(parts):
        e = float(_require(p, "e", f"particles[{i}]"))
        m0 = float(_require(p, "m0", f"particles[{i}]"))
        ff = _form_factor(p["form_factor"]) if "form_factor" in p else PointLimit()
        model_c = ChargeModel(e=e, m0=m0, form_factor=ff, units=units)
        bodies.append(BodySpec(model_c, _vec(p, "q", f"particles[{i}]"),
                               _vec(p, "v", f"particles[{i}]")))
    return ManyBodyState(bodies=tuple(bodies), c=float(cfg.get("c", 1.0)))


def _run_darwin(cfg, units) -> tuple[dict, object]:
    state = _darwin_state(cfg, units)
    t_span = _require(cfg, "t_span", "config")
    traj = integrate_darwin(state, (float(t_span[0]), float(t_span[1])),
                            _controls(cfg),
                            collision_radius=cfg.get("collision_radius"))
    summary = {
        "darwin.final_energy": float(traj.energy[-1]),
        "darwin.energy_drift": float(np.max(np.abs(traj.energy - traj.energy[0]))),
        "darwin.momentum_drift": float(np.max(np.abs(traj.momentum - traj.momentum[0]))),
        "darwin.collision_halt": str(traj.collision_halt).lower(),
        "darwin.samples": len(traj.t),
    }
    return summary, traj


def _run_retarded2(cfg, units) -> tuple[dict, object]:
    state = _darwin_state(cfg, units)
    t_span = _require(cfg, "t_span", "config")
    traj = retarded_twobody_oracle(state, (float(t_span[0]), float(t_span[1])),
                                   _controls(cfg),
                                   collision_radius=cfg.get("collision_radius"))
    summary = {
        "retarded2.collision_halt": str(traj.collision_halt).lower(),
        "retarded2.samples": len(traj.t),
        "retarded2.final_separation": float(np.linalg.norm(
            traj.q[-1, 0] - traj.q[-1, 1])),
    }
    return summary, traj


def _run_memory(cfg, units) -> tuple[dict, object]:
    model_c = _particle(cfg, units)
    fmap = _field_map(cfg, units, model_c)
    init = _require(cfg, "initial", "config")
    t_span = _require(cfg, "t_span", "config")
    lag = 2.0 * model_c.form_factor.radius
    hist = memory_force.HistoryFunction.constant(
        _vec(init, "q", "initial"), _vec(init, "v", "initial"), window=lag)
    traj = memory_force.integrate_dde(model_c, fmap, hist,
                                      (float(t_span[0]), float(t_span[1])))
    m_ren, jerk = memory_force.taylor_reduced_coefficients(model_c)
    summary = {
        "memory.final_energy": float(traj.energy[-1]),
        "memory.dissipated": float(traj.radiated[-1]),
        "memory.renormalized_mass": m_ren,
        "memory.jerk_coefficient": jerk,
        "memory.samples": len(traj.t),
    }
    return summary, traj


_SCENARIOS = {
    "ld_forward": lambda cfg, units: _run_ld(cfg, units, True),
    "ld_backward": lambda cfg, units: _run_ld(cfg, units, False),
    "ll": _run_ll,
    "penning": _run_penning,
    "synchrotron": _run_synchrotron,
    "darwin": _run_darwin,
    "retarded2": _run_retarded2,
    "memory_dde": _run_memory,
}


def run_config(cfg: dict, out_dir: Path) -> RunReport:
    kind = _require(cfg, "kind", "config")
    if kind in ("compare_ld_ll", "compare_darwin_retarded", "compare_runs"):
        return compare_config(cfg, out_dir)
    if kind == "sweep":
        return sweep_config(cfg, out_dir, jobs=1)
    if kind not in _SCENARIOS:
        raise ConfigError(f"unknown scenario kind '{kind}'")
    units = _unit_system(cfg)
    summary, traj = _SCENARIOS[kind](cfg, units)
    outputs = cfg.get("outputs", {})
    files = []
    if traj is not None and "trajectory" in outputs:
        if hasattr(traj, "momentum"):   # many-body
            for body in range(traj.q.shape[1]):
                path = out_dir / f"{Path(outputs['trajectory']).stem}_p{body}.csv"
                _atomic_write(path, manybody_csv(traj, body))
                files.append(str(path))
        else:
            path = out_dir / outputs["trajectory"]
            _atomic_write(path, trajectory_csv(traj))
            files.append(str(path))
    if "summary" in outputs:
        path = out_dir / outputs["summary"]
        summary["config.kind"] = kind
        _atomic_write(path, summary_text(summary))
        files.append(str(path))
    return RunReport(status="ok", summary=summary, files=files)


# --- comparisons -------------------------------------------------------------

def _deviation_table(cfg, units) -> tuple[dict, list[str]]:
    """LD-backward vs Landau-Lifshitz across a list of eps values."""
    model_c = _particle(cfg, units)
    fmap = _field_map(cfg, units, model_c)
    eps_values = [float(x) for x in _require(cfg, "eps_values", "compare")]
    init = _require(cfg, "initial", "config")
    t_span = _require(cfg, "t_span", "config")
    t1 = float(t_span[1])
    q0 = _vec(init, "q", "initial")
    v0 = _vec(init, "v", "initial")
    step = _controls(cfg)
    devs = []
    for eps in eps_values:
        ll = landau_lifshitz.LlModel(charge=model_c, field=fmap, eps=eps)
        fwd = landau_lifshitz.integrate(ll, q0, v0, (0.0, t1), step)
        bwd = lorentz_dirac.integrate_backward(
            lorentz_dirac.LdModel(charge=model_c, field=fmap, eps=eps),
            fwd.q[-1], fwd.v[-1], t1, lorentz_dirac.LdControls(step=step))
        qa, _, _ = fwd.sample_qva(bwd.t)
        devs.append(float(np.max(np.linalg.norm(qa - bwd.q, axis=1))))
    summary = {}
    rows = ["eps,deviation"]
    for eps, dev in zip(eps_values, devs):
        rows.append(f"{_fmt(eps)},{_fmt(dev)}")
    if len(eps_values) >= 2 and all(d > 0 for d in devs):
        slope = np.polyfit(np.log(eps_values), np.log(devs), 1)[0]
        summary["compare.fitted_exponent"] = float(slope)
    summary["compare.max_deviation"] = max(devs)
    return summary, rows


def _darwin_retarded_table(cfg, units) -> tuple[dict, list[str]]:
    """Force-residual ratio across speed scalings (geometry-similar family)."""
    base_state = _darwin_state(cfg, units)
    scales = [float(x) for x in _require(cfg, "speed_scales", "compare")]
    t_span = _require(cfg, "t_span", "config")
    t1 = float(t_span[1])
    step = _controls(cfg)
    ratios = []
    for s in scales:
        bodies = tuple(
            BodySpec(b.model, b.q / (s * s), b.v * s) for b in base_state.bodies)
        state = ManyBodyState(bodies=bodies, c=base_state.c)
        forces = []
        step_s = step if math.isinf(step.max_step) else \
            step.with_(max_step=step.max_step / s**3)
        retarded_twobody_oracle(state, (0.0, t1 / s**3), step_s,
                                forces_out=forces)
        num = 0.0
        den = 0.0
        for (t, f_ret, q, v) in forces[1:]:
            snap = ManyBodyState(bodies=tuple(
                BodySpec(b.model, q[i], v[i]) for i, b in enumerate(state.bodies)),
                c=state.c)
            f_dar = darwin_mechanical_forces(snap)[0]
            f_cou = coulomb_forces(snap)[0]
            num = max(num, float(np.linalg.norm(f_ret - f_dar)))
            den = max(den, float(np.linalg.norm(f_dar - f_cou)))
        ratios.append(num / den)
    rows = ["speed_scale,force_ratio"]
    for s, r in zip(scales, ratios):
        rows.append(f"{_fmt(s)},{_fmt(r)}")
    summary = {"compare.max_ratio": max(ratios)}
    if len(scales) >= 2 and all(r > 0 for r in ratios):
        slope = np.polyfit(np.log(scales), np.log(ratios), 1)[0]
        summary["compare.fitted_exponent"] = float(slope)
    return summary, rows


def compare_config(cfg: dict, out_dir: Path) -> RunReport:
    kind = _require(cfg, "kind", "config")
    units = _unit_system(cfg)
    if kind == "compare_ld_ll":
        summary, rows = _deviation_table(cfg, units)
    elif kind == "compare_darwin_retarded":
        summary, rows = _darwin_retarded_table(cfg, units)
    elif kind == "compare_runs":
        rep_a = run_config(dict(_require(cfg, "a", "compare"), outputs={}), out_dir)
        rep_b = run_config(dict(_require(cfg, "b", "compare"), outputs={}), out_dir)
        keys = sorted(set(rep_a.summary) & set(rep_b.summary))
        dev = 0.0
        for k in keys:
            va, vb = rep_a.summary[k], rep_b.summary[k]
            if isinstance(va, (int, float)) and isinstance(vb, (int, float)):
                dev = max(dev, abs(float(va) - float(vb)))
        summary = {"compare.summary_deviation": dev}
        rows = ["key,deviation"]
    else:
        raise ConfigError(f"unknown compare kind '{kind}'")
    outputs = cfg.get("outputs", {})
    files = []
    if "table" in outputs:
        path = out_dir / outputs["table"]
        _atomic_write(path, "\n".join(rows) + "\n")
        files.append(str(path))
    if "summary" in outputs:
        path = out_dir / outputs["summary"]
        summary["config.kind"] = kind
        _atomic_write(path, summary_text(summary))
        files.append(str(path))
    return RunReport(status="ok", summary=summary, files=files)


# --- sweeps -------------------------------------------------------------------

def sweep_config(cfg: dict, out_dir: Path, jobs: int) -> RunReport:
    base = _require(cfg, "base", "sweep")
    parameter = _require(cfg, "parameter", "sweep")
    values = _require(cfg, "values", "sweep")

    def one(idx_value):
        idx, value = idx_value
        sub = json.loads(json.dumps(base))
        sub[parameter] = value
        outputs = sub.get("outputs", {})
        sub["outputs"] = {k: f"run{idx:03d}_{v}" for k, v in outputs.items()}
        return run_config(sub, out_dir)

    items = list(enumerate(values))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(one, items))
    else:
        reports = [one(item) for item in items]
    files = [f for rep in reports for f in rep.files]
    summary = {"sweep.runs": len(reports), "sweep.parameter": parameter}
    outputs = cfg.get("outputs", {})
    if "summary" in outputs:
        path = out_dir / outputs["summary"]
        _atomic_write(path, summary_text(summary))
        files.append(str(path))
    return RunReport(status="ok", summary=summary, files=files)


# --- entry point ---------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="radreact",
        description="radiating-charge dynamics: scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config")
    p_cmp = sub.add_parser("compare", help="run a paired comparison config")
    p_cmp.add_argument("config")
    p_sweep = sub.add_parser("sweep", help="fan a config over parameter values")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        out_dir = _out_dir(cfg)
        if args.command == "run":
            report = run_config(cfg, out_dir)
        elif args.command == "compare":
            report = compare_config(cfg, out_dir)
        else:
            report = sweep_config(cfg, out_dir, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error ({exc.__class__.__name__}): {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except RadReactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in summary_text(report.summary).splitlines():
        print(line)
    for f in report.files:
        print(f"wrote {f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

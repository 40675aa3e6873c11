"""End-to-end runs: residual reports, field dumps, trajectory tables.

A run takes a scenario config plus tolerance overrides, sweeps the
requested times, and produces a JSON-able report with one block per
time. CSV emission is byte-reproducible: fixed column order, C-order
row sweep, floats through repr-faithful %.17g, LF line endings.
"""

from __future__ import annotations

import logging
import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bridge import (
    BridgeResult,
    assemble_psi,
    continuity_residual,
    forward_bridge,
    inverse_bridge,
    schrodinger_residual,
)
from .calculus import divergence
from .constants import DEFAULT_CONSTANTS, Constants
from .em import (
    chi_field,
    classify_agreement,
    electric_field,
    electric_field_via_chi,
    em_fields,
    faraday_residual,
    gauss_chi_gap,
    magnetic_field,
)
from .fields import ComplexField, ScalarField, VectorField
from .grid import Grid
from .kinematics import com_diagnostics, lorentz_residual, material_derivative
from .scenarios import SampledScenario, Scenario, scenario_from_config
from .sphere import (
    first_integral_drift,
    initial_state,
    sphere_integrate,
    sphere_radius_at_time,
    state_from_gamma_bar,
)

log = logging.getLogger("vlasov_bridge.pipeline")

DEFAULT_TOLERANCES = {
    "tol_rec": 1e-6,      # closed-form potential comparison, relative
    "tol_agree": 1e-6,    # strong/weak classification, relative
    "ode_rel": 1e-8,      # sphere integrator step-halving gate
    "tol_schrod": 1e-3,   # schrodinger residual vs max|U psi|
    "tol_im_u": 1e-8,     # imaginary-part residual, continuity-derived scenarios
    "tol_route": 1e-6,    # field-route and analogue-law gaps, relative
    "support_rel": 1e-6,  # comparison mask: f >= support_rel * max f
    "tol_com": 1e-3,      # center-of-mass potential balance, relative
}

EMIT_CHOICES = ("fields", "residuals", "com", "agreement", "sphere_trajectory")


class ConfigError(ValueError):
    """Malformed run configuration; maps to exit code 2 in the CLI."""


@dataclass
class RunConfig:
    """One resolved invocation: scenario, times, tolerances, outputs."""

    scenario: Scenario
    scenario_cfg: dict
    constants: Constants = DEFAULT_CONSTANTS
    times: tuple[float, ...] = ()
    tolerances: dict = field(default_factory=dict)
    output_dir: Path | None = None
    emit: tuple[str, ...] = ("residuals",)

    def __post_init__(self):
        merged = dict(DEFAULT_TOLERANCES)
        merged.update(self.tolerances)
        self.tolerances = merged
        if not self.times:
            self.times = tuple(self.scenario.default_times)
        if list(self.times) != sorted(self.times):
            raise ConfigError("times must be increasing")
        for token in self.emit:
            if token not in EMIT_CHOICES:
                raise ConfigError(f"unknown emit target {token!r}")

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])


def load_config(raw: dict) -> RunConfig:
    """Build a RunConfig from one JSON document (CLI flags already merged)."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"scenario", "constants", "times", "tolerances", "output_dir", "emit"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    scenario_cfg = raw.get("scenario")
    if not isinstance(scenario_cfg, dict):
        raise ConfigError("config needs a 'scenario' object")
    c = DEFAULT_CONSTANTS
    if "constants" in raw:
        cdict = raw["constants"]
        if not isinstance(cdict, dict):
            raise ConfigError("'constants' must be an object")
        try:
            c = Constants(
                alpha=float(cdict.get("alpha", c.alpha)),
                beta=float(cdict.get("beta", c.beta)),
                gamma=float(cdict.get("gamma", c.gamma)),
                eps_bar=float(cdict.get("eps_bar", c.eps_bar)),
                mu_bar=float(cdict.get("mu_bar", c.mu_bar)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad constants: {exc}") from exc
    try:
        scenario = scenario_from_config(scenario_cfg, c)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario config: {exc}") from exc
    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown_tol = set(tolerances) - set(DEFAULT_TOLERANCES)
    if unknown_tol:
        raise ConfigError(f"unknown tolerances: {sorted(unknown_tol)}")
    times = tuple(float(t) for t in raw.get("times", ()))
    out = raw.get("output_dir")
    emit = tuple(raw.get("emit", ("residuals",)))
    return RunConfig(
        scenario=scenario,
        scenario_cfg=dict(scenario_cfg),
        constants=c,
        times=times,
        tolerances={k: float(v) for k, v in tolerances.items()},
        output_dir=Path(out) if out is not None else None,
        emit=emit,
    )


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _coord_columns(grid: Grid) -> tuple[list[str], np.ndarray]:
    names = ["x", "y", "z"][: grid.dim]
    cols = np.stack([m.reshape(-1) for m in grid.meshes()], axis=1)
    return names, cols


def dump_scalar(path: Path, s: ScalarField, value_name: str = "value") -> None:
    names, cols = _coord_columns(s.grid)
    data = np.column_stack([cols, s.data.reshape(-1)])
    write_csv(path, names + [value_name], data)


def dump_vector(path: Path, v: VectorField) -> None:
    names, cols = _coord_columns(v.grid)
    comps = [v.data[i].reshape(-1) for i in range(v.grid.dim)]
    vnames = ["vx", "vy", "vz"][: v.grid.dim]
    write_csv(path, names + vnames, np.column_stack([cols] + comps))


def _support_mask(f: ScalarField, support_rel: float) -> np.ndarray:
    return f.data >= support_rel * float(np.max(f.data))


def _masked_max(data: np.ndarray, mask: np.ndarray) -> float:
    vals = data[mask]
    vals = vals[np.isfinite(vals)]
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def _check(value: float, tol: float | None) -> dict:
    entry = {"value": value, "tol": tol, "pass": True}
    if tol is not None:
        entry["pass"] = bool(value <= tol)
    return entry


def _dpsi_dt(frame, psi: ComplexField) -> ComplexField:
    """d(psi)/dt = (df/dt / 2f + i dphi/dt) psi, from the frame's rates."""
    f = np.maximum(frame.f.data, 1e-300)
    rate = (0.5 * frame.df_dt.data / f + 1j * frame.dphi_dt.data) * psi.data
    return ComplexField(frame.grid, rate)


def _d_field_of(frame, c: Constants) -> VectorField:
    e = electric_field(frame, c)
    return VectorField(frame.grid, c.eps_bar * e.data)


def _dd_dt(scenario: Scenario, t: float, grid: Grid, c: Constants, dt: float) -> VectorField:
    """Rate of the displacement field when no ansatz supplies it."""
    if isinstance(scenario, SampledScenario):
        times = np.asarray(scenario.times)
        series = np.stack([_d_field_of(scenario.frame(tk, grid), c).data for tk in times])
        rates = np.gradient(series, times, axis=0, edge_order=2)
        idx = int(np.argmin(np.abs(times - t)))
        return VectorField(grid, rates[idx])
    plus = _d_field_of(scenario.frame(t + dt, grid), c)
    minus = _d_field_of(scenario.frame(t - dt, grid), c)
    return VectorField(grid, (plus.data - minus.data) / (2.0 * dt))


def _per_time_block(cfg: RunConfig, t: float) -> dict:
    sc = cfg.scenario
    c = cfg.constants
    frame = sc.frame(t)
    grid = frame.grid
    support = _support_mask(frame.f, cfg.tol("support_rel"))
    gated_examples = sc.expected_verdict is not None

    result: BridgeResult = forward_bridge(frame, c)
    psi = result.psi
    dpsi_dt = _dpsi_dt(frame, psi)
    u_fill = ScalarField(grid, np.where(np.isfinite(result.u_pot.data), result.u_pot.data, 0.0))

    residuals: dict[str, dict] = {}

    cont = continuity_residual(frame.f, frame.df_dt, frame.v)
    cont_tol = sc.continuity_tolerance(t, grid)
    residuals["continuity"] = _check(float(np.max(np.abs(cont.data))), cont_tol)

    sres = schrodinger_residual(psi, dpsi_dt, u_fill, frame.a_vec, c)
    s_num = _masked_max(sres.data, support)
    s_scale = _masked_max(u_fill.data * psi.data, support)
    s_tol = cfg.tol("tol_schrod") * max(s_scale, 1e-300) if gated_examples else None
    residuals["schrodinger"] = _check(s_num, s_tol)

    im_u = result.im_u_residual
    if sc.derived_df_dt:
        imu_scale = (frame.df_dt.max_norm() + float(np.max(np.abs(
            cont.data - frame.df_dt.data)))) / (2.0 * abs(c.beta) * frame.f.max_norm())
        im_u_tol = cfg.tol("tol_im_u") * max(imu_scale, 1e-300)
    else:
        im_u_tol = None  # truncation-limited when df/dt is analytic
    residuals["im_u"] = _check(im_u, im_u_tol)

    e_kin = electric_field(frame, c)
    b = magnetic_field(frame.v, c)
    dv_mat = material_derivative(frame.v, frame.dv_dt)
    lz = lorentz_residual(dv_mat, e_kin, b, frame.v, c)
    lz_scale = max(dv_mat.max_norm(), abs(c.gamma) * e_kin.max_norm(), 1e-300)
    lz_tol = cfg.tol("tol_route") * lz_scale if gated_examples else None
    residuals["lorentz"] = _check(lz.max_norm(), lz_tol)

    db_dt = VectorField(grid, magnetic_field(frame.dv_dt, c).data)
    far = faraday_residual(e_kin, db_dt)
    residuals["faraday"] = _check(
        far.max_norm(), cfg.tol("tol_route") * max(db_dt.max_norm(), 1.0))

    div_b = float(np.max(np.abs(divergence(b).data)))
    residuals["div_b"] = _check(div_b, cfg.tol("tol_route") * max(b.max_norm(), 1.0))

    e_chi = electric_field_via_chi(frame, c)
    gap_e = float(np.max(np.abs(e_kin.data - e_chi.data)))
    declared = getattr(sc, "route_gap_tolerance", None)
    if callable(declared):
        route_tol = float(declared(t, grid))
    elif gated_examples:
        route_tol = cfg.tol("tol_route") * max(e_kin.max_norm(), 1.0)
    else:
        route_tol = None  # sampled series carry no consistency promise
    residuals["route_gap_E"] = _check(gap_e, route_tol)

    ansatz = sc.displacement_ansatz(t, grid)
    if ansatz is not None:
        d_field, dd_dt = ansatz
    else:
        d_field = _d_field_of(frame, c)
        dd_dt = _dd_dt(sc, t, grid, c, sc.dt_fd)
    chi = chi_field(frame, c)
    eq74 = gauss_chi_gap(d_field, chi, c)
    eq74_scale = max(frame.f.max_norm(), 1.0)
    eq74_tol = cfg.tol("tol_route") * eq74_scale if gated_examples else None
    residuals["eq74_gap"] = _check(eq74, eq74_tol)

    agreement = classify_agreement(frame, d_field,
                                   em_fields(frame, c, d_field=d_field).h_field,
                                   dd_dt, c, tol_agree=cfg.tol("tol_agree"))
    agree_block = agreement.as_dict()
    agree_pass = True
    if sc.expected_verdict is not None:
        agree_pass = agreement.verdict == sc.expected_verdict
    agree_block["pass"] = agree_pass

    com_block = None
    com_pass = True
    if sc.com_capable:
        rep = com_diagnostics(frame, e_kin, b, result.u_pot, c)
        com_block = rep.as_dict()
        balance = rep.identity_gaps["potential_balance"]
        com_pass = balance <= cfg.tol("tol_com")
        com_block["pass"] = com_pass

    closed = sc.closed_form_potential(t, grid)
    if closed is not None:
        num = _masked_max(result.u_pot.data - closed.data, support)
        den = max(_masked_max(closed.data, support), 1e-300)
        residuals["u_closed_form"] = _check(num / den, sc.closed_form_rel_tol)

    block_pass = (
        all(entry["pass"] for entry in residuals.values()) and agree_pass and com_pass
    )
    return {
        "t": t,
        "residuals": residuals,
        "agreement": agree_block,
        "com": com_block,
        "pass": block_pass,
    }


def _constants_dict(c: Constants) -> dict:
    return {
        "alpha": c.alpha,
        "beta": c.beta,
        "gamma": c.gamma,
        "eps_bar": c.eps_bar,
        "mu_bar": c.mu_bar,
        "hbar_eff": c.hbar_eff,
    }


def _scenario_meta(cfg: RunConfig) -> dict:
    sc = cfg.scenario
    return {
        "name": sc.name,
        "type": cfg.scenario_cfg.get("type", sc.name),
        "params": cfg.scenario_cfg.get("params", {}),
        "grid": sc.default_grid().spec(),
        "derivative_mode": sc.derivative_mode.value,
        "dt_fd": sc.dt_fd,
    }


def run_verify(cfg: RunConfig) -> dict:
    """Sweep times, gather residual checks, return the report document."""
    t0 = _time.perf_counter()
    per_time = [_per_time_block(cfg, t) for t in cfg.times]
    report = {
        "scenario": _scenario_meta(cfg),
        "constants": _constants_dict(cfg.constants),
        "per_time": per_time,
        "pass": all(block["pass"] for block in per_time),
    }
    log.info("verify %s over %d times in %.3fs: %s",
             cfg.scenario.name, len(cfg.times),
             _time.perf_counter() - t0, "pass" if report["pass"] else "FAIL")
    return report


def run_bridge(cfg: RunConfig, direction: str = "forward",
               roundtrip: bool = False) -> dict:
    """Forward emits psi_re/psi_im/U per time; inverse emits f/v.

    With roundtrip=True both directions run and the velocity gap
    max-norm is reported per time.
    """
    if direction not in ("forward", "inverse"):
        raise ConfigError(f"unknown bridge direction {direction!r}")
    sc = cfg.scenario
    c = cfg.constants
    out = cfg.output_dir
    entries = []
    for idx, t in enumerate(cfg.times):
        frame = sc.frame(t)
        grid = frame.grid
        entry: dict = {"t": t}
        if direction == "forward" or roundtrip:
            result = forward_bridge(frame, c)
            if out is not None and "fields" in cfg.emit:
                tag = f"t{idx:03d}"
                dump_scalar(out / f"psi_re_{tag}.csv", ScalarField(grid, result.psi.data.real))
                dump_scalar(out / f"psi_im_{tag}.csv", ScalarField(grid, result.psi.data.imag))
                dump_scalar(out / f"U_{tag}.csv", result.u_pot)
            entry["im_u"] = result.im_u_residual
        if direction == "inverse" or roundtrip:
            psi = assemble_psi(frame.f, frame.phi)
            f_rec, v_rec = inverse_bridge(psi, frame.a_vec, c)
            if out is not None and "fields" in cfg.emit:
                tag = f"t{idx:03d}"
                dump_scalar(out / f"f_{tag}.csv", f_rec)
                dump_vector(out / f"v_{tag}.csv", v_rec)
            if roundtrip:
                gap = float(np.max(np.abs(v_rec.data - frame.v.data)))
                scale = max(frame.v.max_norm(), 1e-300)
                entry["roundtrip_velocity_gap"] = gap
                entry["roundtrip_velocity_rel"] = gap / scale
        entries.append(entry)
    return {
        "scenario": _scenario_meta(cfg),
        "direction": direction,
        "roundtrip": roundtrip,
        "per_time": entries,
    }


def run_sphere(q_charge: float | None = None, r0: float = 1.0,
               gamma_bar: float | None = None, t_end: float = 1.0,
               dt: float = 1e-3, c: Constants = DEFAULT_CONSTANTS,
               rel_tol: float = 1e-8,
               output_dir: Path | None = None) -> dict:
    """Integrate the expansion ODE and tabulate against the closed form."""
    if t_end < 0.0 or dt <= 0.0:
        raise ConfigError("sphere run needs t_end >= 0 and dt > 0")
    try:
        if gamma_bar is not None:
            state0 = state_from_gamma_bar(gamma_bar, r0, c)
        else:
            state0 = initial_state(q_charge if q_charge is not None else 1.0, r0, c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    trajectory = sphere_integrate(state0, t_end, dt, rel_tol=rel_tol)
    rows = []
    worst_gap = 0.0
    for st in trajectory:
        r_closed = sphere_radius_at_time(st.t, state0)
        gap = abs(st.r_radius - r_closed) / r_closed
        worst_gap = max(worst_gap, gap)
        rows.append((st.t, st.r_radius, gap, st.a_coef, st.b_coef, st.f_value))
    drift = first_integral_drift(trajectory)
    if output_dir is not None:
        write_csv(Path(output_dir) / "sphere_trajectory.csv",
                  ["t", "R", "R_closed_form_gap", "a", "b", "f"], rows)
    return {
        "state0": {
            "q_charge": state0.q_charge,
            "r0": state0.r0,
            "gamma_bar": state0.gamma_bar,
        },
        "t_end": t_end,
        "dt": dt,
        "rows": len(rows),
        "final_radius": trajectory[-1].r_radius,
        "worst_closed_form_gap": worst_gap,
        "first_integral_drift": drift,
        "pass": bool(worst_gap <= 1e-6 and drift <= rel_tol),
    }


def run_fields(cfg: RunConfig) -> dict:
    """Dump the analogue fields per time and report the homogeneous-law gaps."""
    sc = cfg.scenario
    c = cfg.constants
    entries = []
    for idx, t in enumerate(cfg.times):
        frame = sc.frame(t)
        bundle = em_fields(frame, c)
        if cfg.output_dir is not None and "fields" in cfg.emit:
            tag = f"t{idx:03d}"
            dump_scalar(cfg.output_dir / f"chi_{tag}.csv", bundle.chi)
            dump_vector(cfg.output_dir / f"E_{tag}.csv", bundle.e_field)
            dump_vector(cfg.output_dir / f"B_{tag}.csv", bundle.b_field)
            dump_vector(cfg.output_dir / f"D_{tag}.csv", bundle.d_field)
            dump_vector(cfg.output_dir / f"H_{tag}.csv", bundle.h_field)
        db_dt = magnetic_field(frame.dv_dt, c)
        entries.append({
            "t": t,
            "div_b": float(np.max(np.abs(divergence(bundle.b_field).data))),
            "faraday": faraday_residual(bundle.e_field, db_dt).max_norm(),
            "route_gap_E": float(np.max(np.abs(
                bundle.e_field.data - electric_field_via_chi(frame, c).data))),
        })
    return {"scenario": _scenario_meta(cfg), "per_time": entries}


def run_com(cfg: RunConfig) -> dict:
    """Center-of-mass diagnostics per time; needs a decaying scenario."""
    sc = cfg.scenario
    if not sc.com_capable:
        raise ConfigError(
            f"scenario {sc.name!r} does not support center-of-mass diagnostics")
    c = cfg.constants
    entries = []
    for t in cfg.times:
        frame = sc.frame(t)
        e = electric_field(frame, c)
        b = magnetic_field(frame.v, c)
        result = forward_bridge(frame, c)
        rep = com_diagnostics(frame, e, b, result.u_pot, c)
        block = rep.as_dict()
        block["t"] = t
        block["pass"] = bool(
            rep.identity_gaps["potential_balance"] <= cfg.tol("tol_com"))
        entries.append(block)
    return {
        "scenario": _scenario_meta(cfg),
        "per_time": entries,
        "pass": all(e["pass"] for e in entries),
    }

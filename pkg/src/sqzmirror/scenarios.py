"""Scenario definitions and the configuration-driven runner.

Every figure-style scenario resolves to a set of CSV curves plus a manifest
that fully determines the run: replaying the manifest reproduces the output
byte for byte. Frequencies in configs are ordinary Hz (converted by 2*pi),
power in W, temperature in K.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import full as full_model
from . import reduced as reduced_model
from .dynamics import TimeGrid, Trajectory, periodic_steady_state, steady_at_phase
from .errors import ConfigError, SimulationError
from .gaussian import quadrature_observables
from .generator import compile_generator, reduced_generator
from .params import BASELINE_HZ, PhysicalParams, baseline_params, derive

OUTPUT_DIR_ENV = "SQZ_OUTPUT_DIR"

PARAM_KEYS = tuple(BASELINE_HZ) + ("drive_prefactor",)
MODELS = ("reduced3", "reduced10", "reduced_analytic", "full6")
SCENARIOS = (
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
    "fig4a", "fig4b", "figS1", "figS2", "custom",
)
PHASES = ("+1", "-1", "average")

TRAJECTORY_COLUMNS = (
    "t_s", "E_N", "dP2_minus", "dQ2_minus", "theta", "n_phonon_1", "n_phonon_2",
)


@dataclass
class ScenarioConfig:
    scenario: str
    params_hz: dict[str, float] = field(default_factory=dict)
    models: list[str] = field(default_factory=list)
    phase: str = "+1"
    sweep: tuple[str, list[float]] | None = None
    output_dir: str = "out"
    jobs: int = 1
    t_end_s: float | None = None
    n_samples: int = 800

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario.name: unknown scenario {self.scenario!r}")
        for key in self.params_hz:
            if key not in PARAM_KEYS:
                raise ConfigError(f"params.{key}: unknown parameter field")
        for m in self.models:
            if m not in MODELS:
                raise ConfigError(f"scenario.model: unknown model {m!r}")
        if self.phase not in PHASES:
            raise ConfigError(f"scenario.phase: must be one of {PHASES}")
        if self.sweep is not None:
            name, values = self.sweep
            if name not in PARAM_KEYS:
                raise ConfigError(f"sweep.name: {name!r} is not a parameter field")
            if len(values) == 0:
                raise ConfigError("sweep.values: empty value list")
            if not all(np.isfinite(v) for v in values):
                raise ConfigError("sweep.values: values must be finite")
        if self.jobs < 1:
            raise ConfigError("scenario.jobs: must be >= 1")
        if self.n_samples < 2:
            raise ConfigError("scenario.n_samples: must be >= 2")


def parse_config_file(path: str | Path) -> ScenarioConfig:
    """Read a flat sectioned key-value config (same format as manifests)."""
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")
    cfg = ScenarioConfig(scenario="custom")
    if parser.has_section("scenario"):
        sec = parser["scenario"]
        cfg.scenario = sec.get("name", "custom").strip()
        if "model" in sec:
            cfg.models = [m.strip() for m in sec["model"].split(",") if m.strip()]
        cfg.phase = sec.get("phase", "+1").strip()
        cfg.jobs = _to_int(sec.get("jobs", "1"), "scenario.jobs")
        if "t_end_s" in sec:
            cfg.t_end_s = _to_float(sec["t_end_s"], "scenario.t_end_s")
        if "n_samples" in sec:
            cfg.n_samples = _to_int(sec["n_samples"], "scenario.n_samples")
    if parser.has_section("params"):
        for key, val in parser["params"].items():
            cfg.params_hz[key] = _to_float(val, f"params.{key}")
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        if "name" not in sec or "values" not in sec:
            raise ConfigError("sweep section needs both 'name' and 'values'")
        values = [
            _to_float(v, "sweep.values")
            for v in sec["values"].replace("\n", ",").split(",")
            if v.strip()
        ]
        cfg.sweep = (sec["name"].strip(), values)
    if parser.has_section("output"):
        cfg.output_dir = parser["output"].get("dir", cfg.output_dir).strip()
    cfg.validate()
    return cfg


def _to_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: not a number: {text!r}") from exc


def _to_int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: not an integer: {text!r}") from exc


def resolved_params_hz(cfg: ScenarioConfig) -> dict[str, float]:
    out = dict(BASELINE_HZ)
    out["drive_prefactor"] = 2.0
    out.update(cfg.params_hz)
    return out


def _params(cfg: ScenarioConfig, **extra_hz) -> PhysicalParams:
    merged = dict(cfg.params_hz)
    merged.update(extra_hz)
    return baseline_params(**merged)


def _phase_value(phase: str) -> complex | str:
    return {"+1": 1.0, "-1": -1.0, "average": "average"}[phase]


def trajectory_grid(params: PhysicalParams, t_end: float, n_samples: int) -> TimeGrid:
    """Default plot grid: the step resolves the fastest model frequency."""
    fastest = max(params.omega_m, abs(params.delta), params.kappa)
    n_steps = max(int(np.ceil(t_end * fastest / 0.0125)), n_samples)
    stride = max(n_steps // n_samples, 1)
    return TimeGrid(0.0, t_end, n_steps, sample_stride=stride)


def default_t_end(params: PhysicalParams) -> float:
    # repo convention for trajectory scenarios: ten mirror damping times
    return 10.0 / params.gamma_m


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{x:.12e}"


def write_csv(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _trajectory_rows(traj: Trajectory) -> list[tuple]:
    rows = []
    for t, obs in zip(traj.times, traj.observables):
        rows.append(
            (t, obs.E_N, obs.dP2_minus, obs.dQ2_minus, obs.theta,
             obs.phonon[0], obs.phonon[1])
        )
    return rows


def _evolve_model(model: str, params: PhysicalParams, grid: TimeGrid) -> Trajectory:
    if model == "reduced3":
        return reduced_model.evolve(params, grid)
    if model == "reduced10":
        return reduced_model.evolve_full10(params, grid)
    if model == "reduced_analytic":
        return reduced_model.evolve_analytic(params, grid)
    if model == "full6":
        return full_model.evolve_full(params, grid)
    raise ConfigError(f"unknown model {model!r}")


def _steady_observables(model: str, params: PhysicalParams, phase) -> dict:
    if model == "full6":
        z = 0.0 if phase == "average" else complex(phase)
        V = full_model.steady_full(params, z)
        obs = quadrature_observables(full_model.mirror_block(V))
    elif model in ("reduced3", "reduced_analytic"):
        state, _ = reduced_model.steady_state(params, phase)
        obs = quadrature_observables(state.covariance())
    elif model == "reduced10":
        eqs = compile_generator(reduced_generator(derive(params)))
        z = 0.0 if phase == "average" else complex(phase)
        V = steady_at_phase(*periodic_steady_state(eqs), z)
        obs = quadrature_observables(V)
    else:
        raise ConfigError(f"unknown model {model!r}")
    return {
        "E_N": obs.E_N,
        "dP2_minus": obs.dP2_minus,
        "dQ2_minus": obs.dQ2_minus,
        "theta": obs.theta,
    }


def _map_jobs(fn, items, jobs: int) -> list:
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


Curve = tuple[str, tuple[str, ...], list[tuple]]


def _label(x: float) -> str:
    return f"{x:g}"


def _scenario_fig2a(cfg: ScenarioConfig) -> list[Curve]:
    curves: list[Curve] = []
    for r in (0.0, 0.5, 1.0, 2.0):
        params = _params(cfg, r=r)
        grid = trajectory_grid(params, cfg.t_end_s or default_t_end(params),
                               cfg.n_samples)
        traj = reduced_model.evolve(params, grid)
        curves.append((f"fig2a_r{_label(r)}", TRAJECTORY_COLUMNS,
                       _trajectory_rows(traj)))
    return curves


def _scenario_fig2b(cfg: ScenarioConfig) -> list[Curve]:
    curves: list[Curve] = []
    steady_rows = []
    omega_m_hz = resolved_params_hz(cfg)["omega_m_hz"]
    phase = _phase_value(cfg.phase)
    for ratio in (0.5, 1.0, 1.5):
        params = _params(cfg, delta_hz=ratio * omega_m_hz)
        grid = trajectory_grid(params, cfg.t_end_s or default_t_end(params),
                               cfg.n_samples)
        traj = reduced_model.evolve(params, grid)
        curves.append((f"fig2b_delta{_label(ratio)}", TRAJECTORY_COLUMNS,
                       _trajectory_rows(traj)))
        _, report = reduced_model.steady_state(params, phase)
        steady_rows.append((ratio, report.E_N, report.dP2_minus))
    curves.append(
        ("fig2b_steady", ("delta_over_omega_m", "E_N", "dP2_minus"), steady_rows)
    )
    return curves


def _steady_sweep_r(cfg: ScenarioConfig, r_values, **extra_hz):
    phase = _phase_value(cfg.phase)

    def point(r: float):
        _, report = reduced_model.steady_state(_params(cfg, r=r, **extra_hz), phase)
        return report

    return _map_jobs(point, r_values, cfg.jobs)


def _scenario_fig2c(cfg: ScenarioConfig) -> list[Curve]:
    r_values = np.arange(0.0, 2.5 + 1e-12, 0.025)
    reports = _steady_sweep_r(cfg, r_values)
    en_rows = [(r, rep.E_N) for r, rep in zip(r_values, reports)]
    dp_rows = [(r, rep.dP2_minus) for r, rep in zip(r_values, reports)]
    return [
        ("fig2c_EN", ("r", "E_N"), en_rows),
        ("fig2c_dP2", ("r", "dP2_minus"), dp_rows),
    ]


def _scenario_fig2d(cfg: ScenarioConfig) -> list[Curve]:
    phase = _phase_value(cfg.phase)
    temps = np.linspace(0.0, 5e-3, 101)

    def point(T: float):
        _, report = reduced_model.steady_state(_params(cfg, temperature_k=T), phase)
        return report

    reports = _map_jobs(point, temps, cfg.jobs)
    return [
        ("fig2d_EN", ("T_K", "E_N"), [(T, rep.E_N) for T, rep in zip(temps, reports)]),
        ("fig2d_dP2", ("T_K", "dP2_minus"),
         [(T, rep.dP2_minus) for T, rep in zip(temps, reports)]),
        ("fig2d_threshold", ("T_K", "threshold"),
         [(T, rep.threshold) for T, rep in zip(temps, reports)]),
    ]


def _scenario_fig3a(cfg: ScenarioConfig) -> list[Curve]:
    curves: list[Curve] = []
    r_values = np.arange(0.0, 2.5 + 1e-12, 0.025)
    for p_uw in (0.01, 0.1, 2.0):
        reports = _steady_sweep_r(cfg, r_values, power_w=p_uw * 1e-6)
        rows = [(r, rep.dP2_minus) for r, rep in zip(r_values, reports)]
        curves.append((f"fig3a_dP2_P{_label(p_uw)}uW", ("r", "dP2_minus"), rows))
    return curves


def _scenario_fig3b(cfg: ScenarioConfig) -> list[Curve]:
    phase = _phase_value(cfg.phase)
    powers = np.geomspace(0.01e-6, 4e-6, 25)

    def point(P: float):
        try:
            opt = reduced_model.optimal_squeezing(_params(cfg, power_w=P), phase=phase)
            r_formula = np.nan if opt.r_formula is None else opt.r_formula
            return (P, opt.r_numeric, r_formula, opt.E_N, "")
        except SimulationError as exc:
            return (P, np.nan, np.nan, np.nan, _err_text(exc))

    rows = _map_jobs(point, powers, cfg.jobs)
    return [
        ("fig3b_ropt",
         ("power_w", "r_opt_numeric", "r_opt_formula", "E_N_opt", "error"), rows)
    ]


def _err_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")


def _adiabatic_rows(cfg: ScenarioConfig, sweep_values, sweep_field: str):
    phase = _phase_value(cfg.phase)
    z = 0.0 if phase == "average" else complex(phase)

    def point(val: float):
        try:
            comp = full_model.compare_adiabatic(
                _params(cfg, **{sweep_field: val}), grid=None, phase=z
            )
            return (val, comp.steady_dp2_full, comp.steady_dp2_reduced,
                    comp.steady_rel_deviation, "")
        except SimulationError as exc:
            return (val, np.nan, np.nan, np.nan, _err_text(exc))

    return _map_jobs(point, sweep_values, cfg.jobs)


def _scenario_fig4a(cfg: ScenarioConfig) -> list[Curve]:
    kappa_hz = resolved_params_hz(cfg)["kappa_hz"]
    ratios = np.geomspace(1.5e-5, 1.0, 25)
    rows = _adiabatic_rows(cfg, [r * kappa_hz for r in ratios], "gamma_m_hz")
    rows = [(row[0] / kappa_hz,) + row for row in rows]
    return [
        ("fig4a_dP2",
         ("gamma_over_kappa", "gamma_m_hz", "dP2_full", "dP2_reduced",
          "rel_deviation", "error"),
         rows)
    ]


def _scenario_fig4b(cfg: ScenarioConfig) -> list[Curve]:
    kappa_hz = resolved_params_hz(cfg)["kappa_hz"]
    powers = np.geomspace(0.1e-6, 32e-6, 25)
    base = dict(cfg.params_hz)
    base.setdefault("gamma_m_hz", kappa_hz)
    cfg_b = dataclasses.replace(cfg, params_hz=base)
    rows = _adiabatic_rows(cfg_b, powers, "power_w")
    return [
        ("fig4b_dP2",
         ("power_w", "dP2_full", "dP2_reduced", "rel_deviation", "error"), rows)
    ]


def _supplement_params(cfg: ScenarioConfig, r: float) -> PhysicalParams:
    kappa_hz = resolved_params_hz(cfg)["kappa_hz"]
    extra = {"temperature_k": 2.5e-3, "gamma_m_hz": 1.5e-3 * kappa_hz, "r": r}
    merged = {**extra, **cfg.params_hz}
    merged["r"] = r
    return baseline_params(**merged)


def _scenario_figS1(cfg: ScenarioConfig) -> list[Curve]:
    curves: list[Curve] = []
    for r in (0.0, 1.0, 2.0):
        params = _supplement_params(cfg, r)
        t_end = cfg.t_end_s or 5.0 / params.gamma_m
        grid = trajectory_grid(params, t_end, cfg.n_samples)
        for model in ("full6", "reduced3"):
            traj = _evolve_model(model, params, grid)
            name = f"figS1_r{_label(r)}_{'full' if model == 'full6' else 'reduced'}"
            curves.append((name, TRAJECTORY_COLUMNS, _trajectory_rows(traj)))
    return curves


def _scenario_figS2(cfg: ScenarioConfig) -> list[Curve]:
    curves: list[Curve] = []
    params = _supplement_params(cfg, 1.0)
    t_end = cfg.t_end_s or 5.0 / params.gamma_m
    grid = trajectory_grid(params, t_end, cfg.n_samples)
    for model in ("full6", "reduced3"):
        traj = _evolve_model(model, params, grid)
        name = f"figS2_{'full' if model == 'full6' else 'reduced'}"
        curves.append((name, TRAJECTORY_COLUMNS, _trajectory_rows(traj)))
    return curves


def _scenario_custom(cfg: ScenarioConfig) -> list[Curve]:
    params = _params(cfg)
    models = cfg.models or ["reduced3"]
    if cfg.sweep is not None:
        name, values = cfg.sweep
        phase = _phase_value(cfg.phase)
        curves: list[Curve] = []
        for model in models:
            def point(val: float, model=model):
                try:
                    obs = _steady_observables(model, _params(cfg, **{name: val}),
                                              phase)
                    return (val, obs["E_N"], obs["dP2_minus"], obs["dQ2_minus"],
                            obs["theta"], "")
                except SimulationError as exc:
                    return (val, np.nan, np.nan, np.nan, np.nan, _err_text(exc))

            rows = _map_jobs(point, values, cfg.jobs)
            curves.append(
                (f"custom_sweep_{model}",
                 (name, "E_N", "dP2_minus", "dQ2_minus", "theta", "error"), rows)
            )
        return curves
    t_end = cfg.t_end_s or default_t_end(params)
    grid = trajectory_grid(params, t_end, cfg.n_samples)
    return [
        (f"custom_{model}", TRAJECTORY_COLUMNS,
         _trajectory_rows(_evolve_model(model, params, grid)))
        for model in models
    ]


_SCENARIO_FNS = {
    "fig2a": _scenario_fig2a,
    "fig2b": _scenario_fig2b,
    "fig2c": _scenario_fig2c,
    "fig2d": _scenario_fig2d,
    "fig3a": _scenario_fig3a,
    "fig3b": _scenario_fig3b,
    "fig4a": _scenario_fig4a,
    "fig4b": _scenario_fig4b,
    "figS1": _scenario_figS1,
    "figS2": _scenario_figS2,
    "custom": _scenario_custom,
}


def write_manifest(cfg: ScenarioConfig, path: Path) -> None:
    """Materialize every default so the file replays to identical output."""
    lines = ["[scenario]", f"name = {cfg.scenario}"]
    models = cfg.models or ["reduced3"]
    lines.append(f"model = {', '.join(models)}")
    lines.append(f"phase = {cfg.phase}")
    lines.append(f"jobs = {cfg.jobs}")
    lines.append(f"n_samples = {cfg.n_samples}")
    if cfg.t_end_s is not None:
        lines.append(f"t_end_s = {cfg.t_end_s!r}")
    lines.append("")
    lines.append("[params]")
    for key, val in resolved_params_hz(cfg).items():
        lines.append(f"{key} = {val!r}")
    if cfg.sweep is not None:
        lines += ["", "[sweep]", f"name = {cfg.sweep[0]}",
                  "values = " + ", ".join(repr(v) for v in cfg.sweep[1])]
    lines += ["", "[output]", f"dir = {cfg.output_dir}", ""]
    path.write_text("\n".join(lines), encoding="ascii")


def run(cfg: ScenarioConfig) -> list[Path]:
    """Execute a scenario: write one CSV per curve plus the manifest.

    Returns the written paths. Raises ConfigError / SimulationError for the
    CLI to map onto exit codes.
    """
    cfg.validate()
    out_dir = Path(os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = _SCENARIO_FNS[cfg.scenario](cfg)
    written: list[Path] = []
    for name, header, rows in curves:
        path = out_dir / f"{name}.csv"
        write_csv(path, header, rows)
        written.append(path)
    manifest = out_dir / f"{cfg.scenario}_manifest.cfg"
    write_manifest(cfg, manifest)
    written.append(manifest)
    return written

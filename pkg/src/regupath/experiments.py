"""Experiment configuration, execution, and result persistence."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .grid import Grid, GridFunction, lr_norm
from .models import ForwardModel, NoiseSpec, elliptic_model, fredholm_model, make_noisy
from .penalties import (
    Fidelity,
    Penalty,
    QuadraticPenalty,
    ShiftedQuadraticPenalty,
    SmoothedTVPenalty,
    bregman_distance,
)
from .rules import RuleOutcome, TheoryReport, discrepancy_select, hanke_raus_select
from .solver import AlphaPathRecord, SolveOptions, compute_alpha_path


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the full list of problems."""

    def __init__(self, errors: List[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


EXPERIMENTS = ("example1", "example2_smooth", "example2_piecewise", "custom")
TRUTHS = ("parabola_sine", "smooth_mix", "three_steps")
SOURCES = ("gaussian_bump",)
C0_PROFILES = ("linear_t",)
PENALTY_KINDS = ("quadratic", "shifted_quadratic", "smoothed_tv")
RULE_KINDS = ("hanke_raus", "discrepancy")
NOISE_KINDS = ("gaussian", "impulsive", "impulsive_gaussian")
INIT_PROFILES = ("zeros", "ones")


@dataclass
class ModelSpec:
    kind: str = "fredholm"
    n: int = 401
    subintervals: int = 400
    g0: float = 1.0
    g1: float = 6.0
    source: str = "gaussian_bump"

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "subintervals": self.subintervals,
            "g0": self.g0,
            "g1": self.g1,
            "source": self.source,
        }


@dataclass
class PenaltySpec:
    kind: str = "quadratic"
    c0: Optional[str] = None
    eps: float = 1e-4
    mu: float = 0.0

    def to_dict(self):
        return {"kind": self.kind, "c0": self.c0, "eps": self.eps, "mu": self.mu}


@dataclass
class RuleSpec:
    kind: str = "hanke_raus"
    tau: Optional[float] = None

    def to_dict(self):
        return {"kind": self.kind, "tau": self.tau}


@dataclass
class NoisePlan:
    kind: str = "gaussian"
    level: Optional[float] = None
    fraction: Optional[float] = None
    amplitude: Optional[float] = None
    seed: int = 0

    def to_dict(self):
        return {
            "kind": self.kind,
            "level": self.level,
            "fraction": self.fraction,
            "amplitude": self.amplitude,
            "seed": self.seed,
        }

    def to_spec(self) -> NoiseSpec:
        return NoiseSpec(
            kind=self.kind,
            level=self.level,
            fraction=self.fraction,
            amplitude=self.amplitude,
            seed=self.seed,
        )


@dataclass
class SolverPlan:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    grad_tol_abs: float = 0.0
    init: str = "zeros"

    def to_dict(self):
        return {
            "max_iters": self.max_iters,
            "grad_tol": self.grad_tol,
            "grad_tol_abs": self.grad_tol_abs,
            "init": self.init,
        }

    def to_options(self, init: GridFunction) -> SolveOptions:
        return SolveOptions(
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            grad_tol_abs=self.grad_tol_abs,
            init=init,
        )


@dataclass
class ExperimentConfig:
    experiment: str = "custom"
    model: ModelSpec = field(default_factory=ModelSpec)
    truth: str = "parabola_sine"
    fidelity_r: float = 2.0
    penalties: List[PenaltySpec] = field(default_factory=lambda: [PenaltySpec()])
    rules: List[RuleSpec] = field(default_factory=lambda: [RuleSpec()])
    alpha0: float = 1.0
    q: float = 0.9
    j_max: int = 60
    noise: NoisePlan = field(default_factory=lambda: NoisePlan(level=0.01))
    solver: SolverPlan = field(default_factory=SolverPlan)
    output_dir: str = "results"
    implementation_defaults: List[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "model": self.model.to_dict(),
            "truth": self.truth,
            "fidelity_r": self.fidelity_r,
            "penalties": [p.to_dict() for p in self.penalties],
            "rules": [r.to_dict() for r in self.rules],
            "alpha0": self.alpha0,
            "q": self.q,
            "j_max": self.j_max,
            "noise": self.noise.to_dict(),
            "solver": self.solver.to_dict(),
            "output_dir": self.output_dir,
            "implementation_defaults": list(self.implementation_defaults),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _parse_section(data, cls, known, errors, prefix):
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            errors.append(f"{prefix}: unknown key {key!r}")
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        errors.append(f"{prefix}: {exc}")
        return cls()


def config_from_dict(data: dict) -> ExperimentConfig:
    """Parse a config mapping; raises ConfigError listing every problem."""
    errors: List[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["configuration must be a JSON object"])
    top_known = {
        "experiment",
        "model",
        "truth",
        "fidelity_r",
        "penalties",
        "rules",
        "alpha0",
        "q",
        "j_max",
        "noise",
        "solver",
        "output_dir",
        "implementation_defaults",
    }
    for key in data:
        if key not in top_known:
            errors.append(f"unknown key {key!r}")

    cfg = ExperimentConfig()
    cfg.experiment = data.get("experiment", cfg.experiment)
    cfg.truth = data.get("truth", cfg.truth)
    cfg.fidelity_r = data.get("fidelity_r", cfg.fidelity_r)
    cfg.alpha0 = data.get("alpha0", cfg.alpha0)
    cfg.q = data.get("q", cfg.q)
    cfg.j_max = data.get("j_max", cfg.j_max)
    cfg.output_dir = data.get("output_dir", cfg.output_dir)
    cfg.implementation_defaults = list(data.get("implementation_defaults", []))

    if "model" in data:
        cfg.model = _parse_section(
            data["model"], ModelSpec, {"kind", "n", "subintervals", "g0", "g1", "source"}, errors, "model"
        )
    if "noise" in data:
        cfg.noise = _parse_section(
            data["noise"], NoisePlan, {"kind", "level", "fraction", "amplitude", "seed"}, errors, "noise"
        )
    if "solver" in data:
        cfg.solver = _parse_section(
            data["solver"], SolverPlan, {"max_iters", "grad_tol", "grad_tol_abs", "init"}, errors, "solver"
        )
    if "penalties" in data:
        raw = data["penalties"]
        if not isinstance(raw, list) or not raw:
            errors.append("penalties must be a nonempty list")
        else:
            cfg.penalties = [
                _parse_section(p, PenaltySpec, {"kind", "c0", "eps", "mu"}, errors, f"penalties[{i}]")
                for i, p in enumerate(raw)
            ]
    if "rules" in data:
        raw = data["rules"]
        if not isinstance(raw, list) or not raw:
            errors.append("rules must be a nonempty list")
        else:
            cfg.rules = [
                _parse_section(r, RuleSpec, {"kind", "tau"}, errors, f"rules[{i}]")
                for i, r in enumerate(raw)
            ]

    errors.extend(validate_config(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


def config_from_json(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"invalid JSON: {exc}"]) from exc
    return config_from_dict(data)


def validate_config(cfg: ExperimentConfig) -> List[str]:
    """Collect every semantic problem in a config (empty list = valid)."""
    errors: List[str] = []
    if cfg.experiment not in EXPERIMENTS:
        errors.append(f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}")
    if cfg.model.kind not in ("fredholm", "elliptic"):
        errors.append(f"model.kind must be fredholm or elliptic, got {cfg.model.kind!r}")
    if cfg.model.kind == "fredholm" and (not isinstance(cfg.model.n, int) or cfg.model.n < 3):
        errors.append(f"model.n must be an integer >= 3, got {cfg.model.n!r}")
    if cfg.model.kind == "elliptic":
        if not isinstance(cfg.model.subintervals, int) or cfg.model.subintervals < 4:
            errors.append(f"model.subintervals must be an integer >= 4, got {cfg.model.subintervals!r}")
        if cfg.model.source not in SOURCES:
            errors.append(f"model.source must be one of {SOURCES}, got {cfg.model.source!r}")
    if cfg.truth not in TRUTHS:
        errors.append(f"truth must be one of {TRUTHS}, got {cfg.truth!r}")
    if not (isinstance(cfg.fidelity_r, (int, float)) and 1.0 < cfg.fidelity_r < math.inf):
        errors.append(f"fidelity_r must lie in (1, inf), got {cfg.fidelity_r!r}")
    for i, pen in enumerate(cfg.penalties):
        if pen.kind not in PENALTY_KINDS:
            errors.append(f"penalties[{i}].kind must be one of {PENALTY_KINDS}, got {pen.kind!r}")
        if pen.kind == "shifted_quadratic" and pen.c0 not in C0_PROFILES:
            errors.append(f"penalties[{i}].c0 must be one of {C0_PROFILES}, got {pen.c0!r}")
        if pen.kind == "smoothed_tv":
            if not (isinstance(pen.eps, (int, float)) and pen.eps > 0):
                errors.append(f"penalties[{i}].eps must be positive, got {pen.eps!r}")
            if not (isinstance(pen.mu, (int, float)) and pen.mu >= 0):
                errors.append(f"penalties[{i}].mu must be nonnegative, got {pen.mu!r}")
    for i, rule in enumerate(cfg.rules):
        if rule.kind not in RULE_KINDS:
            errors.append(f"rules[{i}].kind must be one of {RULE_KINDS}, got {rule.kind!r}")
        if rule.kind == "discrepancy" and not (isinstance(rule.tau, (int, float)) and rule.tau > 0):
            errors.append(f"rules[{i}].tau must be positive, got {rule.tau!r}")
    if not (isinstance(cfg.alpha0, (int, float)) and cfg.alpha0 > 0):
        errors.append(f"alpha0 must be positive, got {cfg.alpha0!r}")
    if not (isinstance(cfg.q, (int, float)) and 0 < cfg.q < 1):
        errors.append(f"q must lie in (0, 1), got {cfg.q!r}")
    if not (isinstance(cfg.j_max, int) and cfg.j_max >= 0):
        errors.append(f"j_max must be a nonnegative integer, got {cfg.j_max!r}")
    if cfg.noise.kind not in NOISE_KINDS:
        errors.append(f"noise.kind must be one of {NOISE_KINDS}, got {cfg.noise.kind!r}")
    else:
        if cfg.noise.kind in ("gaussian", "impulsive_gaussian") and not (
            isinstance(cfg.noise.level, (int, float)) and cfg.noise.level > 0
        ):
            errors.append(f"noise.level must be positive, got {cfg.noise.level!r}")
        if cfg.noise.kind in ("impulsive", "impulsive_gaussian"):
            if not (isinstance(cfg.noise.fraction, (int, float)) and 0 < cfg.noise.fraction < 1):
                errors.append(f"noise.fraction must lie in (0, 1), got {cfg.noise.fraction!r}")
            if not (isinstance(cfg.noise.amplitude, (int, float)) and cfg.noise.amplitude > 0):
                errors.append(f"noise.amplitude must be positive, got {cfg.noise.amplitude!r}")
    if not isinstance(cfg.noise.seed, int):
        errors.append(f"noise.seed must be an integer, got {cfg.noise.seed!r}")
    if not (isinstance(cfg.solver.max_iters, int) and cfg.solver.max_iters > 0):
        errors.append(f"solver.max_iters must be a positive integer, got {cfg.solver.max_iters!r}")
    if not (isinstance(cfg.solver.grad_tol, (int, float)) and cfg.solver.grad_tol > 0):
        errors.append(f"solver.grad_tol must be positive, got {cfg.solver.grad_tol!r}")
    if not (isinstance(cfg.solver.grad_tol_abs, (int, float)) and cfg.solver.grad_tol_abs >= 0):
        errors.append(f"solver.grad_tol_abs must be nonnegative, got {cfg.solver.grad_tol_abs!r}")
    if cfg.solver.init not in INIT_PROFILES:
        errors.append(f"solver.init must be one of {INIT_PROFILES}, got {cfg.solver.init!r}")
    if not isinstance(cfg.output_dir, str) or not cfg.output_dir:
        errors.append("output_dir must be a nonempty string")
    return errors


# ---------------------------------------------------------------------------
# shipped profiles

def truth_function(name: str, grid: Grid) -> GridFunction:
    t = grid.points()
    if name == "parabola_sine":
        return grid.function(4.0 * t * (1.0 - t) + np.sin(2.0 * np.pi * t))
    if name == "smooth_mix":
        return grid.function(
            np.sin(np.pi * t) + np.sin(4.0 * np.pi * t) + 2.0 * t**3 * (1.0 - t) + t
        )
    if name == "three_steps":
        vals = np.full(grid.n, 1.0)
        vals[(t >= 0.3) & (t < 0.6)] = 6.0
        vals[t >= 0.6] = 3.0
        return grid.function(vals)
    raise ValueError(f"unknown truth profile {name!r}")


def source_function(name: str, grid: Grid) -> GridFunction:
    t = grid.points()
    if name == "gaussian_bump":
        return grid.function(100.0 * np.exp(-10.0 * (t - 0.5) ** 2))
    raise ValueError(f"unknown source profile {name!r}")


def build_model(spec: ModelSpec) -> ForwardModel:
    if spec.kind == "fredholm":
        return fredholm_model(spec.n)
    u_grid = Grid(spec.subintervals - 1, convention="interior")
    return elliptic_model(spec.subintervals, spec.g0, spec.g1, source_function(spec.source, u_grid))


def build_penalty(spec: PenaltySpec, x_grid: Grid) -> Penalty:
    if spec.kind == "quadratic":
        return QuadraticPenalty()
    if spec.kind == "shifted_quadratic":
        if spec.c0 == "linear_t":
            c0 = x_grid.function(x_grid.points())
        else:
            raise ValueError(f"unknown c0 profile {spec.c0!r}")
        return ShiftedQuadraticPenalty(c0)
    if spec.kind == "smoothed_tv":
        return SmoothedTVPenalty(eps=spec.eps, mu=spec.mu)
    raise ValueError(f"unknown penalty kind {spec.kind!r}")


def build_init(name: str, grid: Grid) -> GridFunction:
    if name == "zeros":
        return grid.zeros()
    if name == "ones":
        return grid.function(np.ones(grid.n))
    raise ValueError(f"unknown init profile {name!r}")


# ---------------------------------------------------------------------------
# presets matching the shipped reconstruction studies

def example1_config(seed: int = 7571) -> ExperimentConfig:
    return ExperimentConfig(
        experiment="example1",
        model=ModelSpec(kind="fredholm", n=401),
        truth="parabola_sine",
        fidelity_r=1.01,
        penalties=[PenaltySpec(kind="quadratic")],
        rules=[
            RuleSpec(kind="hanke_raus"),
            RuleSpec(kind="discrepancy", tau=1.01),
            RuleSpec(kind="discrepancy", tau=1.615),
            RuleSpec(kind="discrepancy", tau=0.996),
        ],
        alpha0=1.0,
        q=0.95,
        j_max=120,
        noise=NoisePlan(kind="impulsive_gaussian", fraction=0.02, amplitude=1.0,
                        level=0.01, seed=seed),
        solver=SolverPlan(max_iters=2000, grad_tol=1e-7, init="zeros"),
        output_dir="results/example1",
        implementation_defaults=[
            "model.n",
            "noise.kind",
            "noise.fraction",
            "noise.amplitude",
            "noise.level",
            "noise.seed",
            "j_max",
            "solver",
        ],
    )


def example2_smooth_config(seed: int = 1009) -> ExperimentConfig:
    return ExperimentConfig(
        experiment="example2_smooth",
        model=ModelSpec(kind="elliptic", subintervals=400, g0=1.0, g1=6.0, source="gaussian_bump"),
        truth="smooth_mix",
        fidelity_r=2.0,
        penalties=[PenaltySpec(kind="quadratic"), PenaltySpec(kind="shifted_quadratic", c0="linear_t")],
        rules=[RuleSpec(kind="hanke_raus")],
        alpha0=0.005,
        q=0.8,
        j_max=38,
        noise=NoisePlan(kind="gaussian", level=0.0025, seed=seed),
        solver=SolverPlan(max_iters=3000, grad_tol=1e-7, init="ones"),
        output_dir="results/example2_smooth",
        implementation_defaults=["noise.seed", "j_max", "solver"],
    )


def example2_piecewise_config(seed: int = 2203) -> ExperimentConfig:
    return ExperimentConfig(
        experiment="example2_piecewise",
        model=ModelSpec(kind="elliptic", subintervals=400, g0=1.0, g1=6.0, source="gaussian_bump"),
        truth="three_steps",
        fidelity_r=2.0,
        penalties=[PenaltySpec(kind="smoothed_tv", eps=0.5, mu=0.001)],
        rules=[RuleSpec(kind="hanke_raus")],
        alpha0=0.001,
        q=0.8,
        j_max=42,
        noise=NoisePlan(kind="gaussian", level=0.001, seed=seed),
        solver=SolverPlan(max_iters=6000, grad_tol=1e-7, init="ones"),
        output_dir="results/example2_piecewise",
        implementation_defaults=["truth", "noise.seed", "j_max", "solver", "penalties[0].eps"],
    )


def preset(name: str, seed: Optional[int] = None) -> ExperimentConfig:
    factories = {
        "example1": example1_config,
        "example2_smooth": example2_smooth_config,
        "example2_piecewise": example2_piecewise_config,
    }
    if name not in factories:
        raise ConfigError([f"unknown preset {name!r}"])
    return factories[name]() if seed is None else factories[name](seed=seed)


# ---------------------------------------------------------------------------
# execution

@dataclass
class PenaltyResult:
    spec: PenaltySpec
    tag: str
    penalty: Penalty
    path: List[AlphaPathRecord]
    outcomes: List[RuleOutcome]
    kappa_hat: float


@dataclass
class ResultBundle:
    config: ExperimentConfig
    truth: GridFunction
    exact_data: GridFunction
    noisy_data: GridFunction
    delta: float
    results: List[PenaltyResult]


def penalty_tags(specs: List[PenaltySpec]) -> List[str]:
    tags = []
    for spec in specs:
        tag = spec.kind
        if sum(1 for s in specs if s.kind == spec.kind) > 1:
            tag = f"{spec.kind}_{sum(1 for t in tags if t.startswith(spec.kind))}"
        tags.append(tag)
    return tags


def run_experiment(
    config: ExperimentConfig, apply_rules: bool = True, max_workers: int = 1
) -> ResultBundle:
    """Build model + truth + noise, solve the alpha path(s), apply the rules."""
    errors = validate_config(config)
    if errors:
        raise ConfigError(errors)
    model = build_model(config.model)
    truth = truth_function(config.truth, model.x_grid)
    exact = model.apply(truth)
    noisy, delta = make_noisy(exact, config.noise.to_spec(), norm_exponent=config.fidelity_r)
    fid = Fidelity(config.fidelity_r, noisy)
    init = build_init(config.solver.init, model.x_grid)
    tags = penalty_tags(config.penalties)

    def one_penalty(spec_tag):
        spec, tag = spec_tag
        pen = build_penalty(spec, model.x_grid)
        path = compute_alpha_path(
            model, fid, pen, config.alpha0, config.q, config.j_max,
            config.solver.to_options(init),
        )
        outcomes: List[RuleOutcome] = []
        if apply_rules:
            for rule in config.rules:
                if rule.kind == "hanke_raus":
                    outcomes.append(hanke_raus_select(path))
                else:
                    outcomes.append(discrepancy_select(path, rule.tau, delta))
        kappa_hat = min(1.0, min(rec.residual for rec in path) / delta) if delta > 0 else float("nan")
        return PenaltyResult(spec=spec, tag=tag, penalty=pen, path=path, outcomes=outcomes, kappa_hat=kappa_hat)

    jobs = list(zip(config.penalties, tags))
    if max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one_penalty, jobs))
    else:
        results = [one_penalty(job) for job in jobs]

    return ResultBundle(
        config=config,
        truth=truth,
        exact_data=exact,
        noisy_data=noisy,
        delta=delta,
        results=results,
    )


# ---------------------------------------------------------------------------
# persistence: RFC-4180 CSVs, UTF-8, LF line endings, 17 significant digits

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_rows(path: Path, header: List[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def l1_error(x: GridFunction, truth: GridFunction) -> float:
    x._check_same_grid(truth)
    return float(np.sum(x.grid.weights() * np.abs(x.values - truth.values)))


def tv_roughness(x: GridFunction) -> float:
    """Discrete total variation sum |x_{i+1} - x_i| of a reconstruction."""
    return float(np.sum(np.abs(np.diff(x.values))))


def rule_tag(outcome: RuleOutcome) -> str:
    if outcome.rule == "discrepancy":
        return f"discrepancy_tau{outcome.tau:g}"
    return outcome.rule


def write_bundle(bundle: ResultBundle, out_dir) -> List[Path]:
    """Write the bundle as CSVs + config echo; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    created: List[Path] = []

    cfg_path = out / "config.json"
    cfg_path.write_text(bundle.config.to_json(), encoding="utf-8")
    created.append(cfg_path)

    data_path = out / "data.csv"
    _write_rows(
        data_path,
        ["t", "exact", "noisy"],
        zip(bundle.exact_data.points(), bundle.exact_data.values, bundle.noisy_data.values),
    )
    created.append(data_path)

    outcome_rows = []
    for result in bundle.results:
        xi = result.penalty.subgradient(bundle.truth)
        path_rows = []
        for j, rec in enumerate(result.path):
            breg = bregman_distance(result.penalty, xi, rec.x, bundle.truth)
            l2e = lr_norm(rec.x - bundle.truth, 2.0)
            path_rows.append(
                (j, rec.alpha, rec.residual, rec.penalty, rec.theta, rec.objective,
                 rec.iters, rec.converged, breg, l2e)
            )
        path_path = out / f"path_{result.tag}.csv"
        _write_rows(
            path_path,
            ["j", "alpha", "residual", "penalty", "theta", "objective", "iters",
             "converged", "bregman_to_truth", "l2_error_to_truth"],
            path_rows,
        )
        created.append(path_path)

        for outcome in result.outcomes:
            x_star = outcome.record.x
            outcome_rows.append(
                (
                    result.tag,
                    outcome.rule,
                    "" if outcome.tau is None else _fmt(outcome.tau),
                    outcome.alpha_star,
                    outcome.delta_star,
                    bundle.delta,
                    result.kappa_hat,
                    lr_norm(x_star - bundle.truth, 2.0),
                    l1_error(x_star, bundle.truth),
                    bregman_distance(result.penalty, xi, x_star, bundle.truth),
                    tv_roughness(x_star),
                    ";".join(outcome.flags),
                )
            )
            recon_path = out / f"recon_{result.tag}_{rule_tag(outcome)}.csv"
            _write_rows(
                recon_path,
                ["t", "truth", "estimate"],
                zip(bundle.truth.points(), bundle.truth.values, x_star.values),
            )
            created.append(recon_path)

    if outcome_rows:
        outcomes_path = out / "outcomes.csv"
        _write_rows(
            outcomes_path,
            ["penalty", "rule", "tau", "alpha_star", "delta_star", "delta", "kappa_hat",
             "l2_error", "l1_error", "bregman", "tv_roughness", "flags"],
            outcome_rows,
        )
        created.append(outcomes_path)
    return created


def write_theory_report(report: TheoryReport, path) -> Path:
    """One CSV row per noise level, then a key/value summary block."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["delta", "alpha_star", "theta_star", "bregman", "kappa_hat"])
        for row in report.convergence_table:
            writer.writerow(
                [_fmt(row.delta), _fmt(row.alpha_star), _fmt(row.theta_star),
                 _fmt(row.bregman), _fmt(row.kappa_hat)]
            )
        writer.writerow([])
        writer.writerow(["key", "value"])
        for key in (
            "kappa_estimate", "delta", "delta_star", "alpha_star",
            "lower_bound_alpha", "bound_ratio",
        ):
            writer.writerow([key, _fmt(getattr(report, key))])
        for key in ("precondition_holds", "delta_bound_ok", "alpha_bound_ok"):
            writer.writerow([key, _fmt(getattr(report, key))])
        writer.writerow(["flags", ";".join(report.flags)])
    return path

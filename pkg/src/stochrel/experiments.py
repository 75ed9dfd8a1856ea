"""Experiment configuration parsing and execution.

Configs are flat ``key = value`` documents (one experiment per document,
``#`` comments allowed).  ``parse_config`` validates the document against the
schema of its ``kind`` and fills documented defaults; ``run_experiment``
executes the experiment and returns rendered artifacts plus a manifest, with
no file I/O of its own.  All outputs are a pure function of the resolved
configuration, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kinematics, noise, stats
from .collision import ShockReport, config_from_drift, integrate_shock, shock_report
from .csvio import (
    render_histogram_csv,
    render_series_csv,
    render_shock_csv,
    render_table_csv,
)
from .errors import ConfigurationError
from .histogram import histogram_from_samples
from .kinematics import ParticleModel
from .noise import NoiseSpec, draw_realization

EIGHT_PI = 8.0 * math.pi

KINDS = ("force-path", "force-dist", "single", "velocity-dist", "trajectory", "shock", "ensemble")

_REQUIRED = object()

# key -> (parser, default); defaults of None are resolved contextually
_COMMON_KEYS = {
    "kind": ("str", _REQUIRED),
    "seeds": ("int_list", (0,)),
}

_NOISE_KEYS = {
    "n_components": ("int", 250),
    "bandwidth": ("float", EIGHT_PI),
    "f0": ("float", None),
    "amplitude_rate": ("float", None),
}

_PARTICLE_KEYS = {
    "m0": ("float", 1.0),
    "c": ("float", 1.0),
}

_KIND_KEYS = {
    "force-path": {
        **_NOISE_KEYS,
        "horizon": ("float", 50.0),
        "n_samples": ("int", 2001),
    },
    "force-dist": {
        **_NOISE_KEYS,
        "horizon": ("float", None),  # defaults to one fundamental period
        "n_samples": ("int", 1_000_000),
        "n_bins": ("int", 80),
        "n_realizations": ("int", 50),
    },
    "single": {
        **_NOISE_KEYS,
        **_PARTICLE_KEYS,
        "theta0": ("float_list", (0.0,)),
        "horizon": ("float", 125.0),
        "n_samples": ("int", 4001),
        "hist_bins": ("int", 0),
        "hist_horizon": ("float", 3125.0),
        "hist_samples": ("int", 200_000),
    },
    "velocity-dist": {
        **_NOISE_KEYS,
        **_PARTICLE_KEYS,
        "theta0": ("float_list", (0.0,)),
        "horizon": ("float", 3125.0),
        "n_samples": ("int", 200_000),
        "n_bins": ("int", 101),
        "sample_in": ("str", "proper"),
    },
    "trajectory": {
        **_NOISE_KEYS,
        **_PARTICLE_KEYS,
        "theta0": ("float_list", (0.0,)),
        "t_end": ("float", 500.0),
        "n_steps": ("int", 10_001),
        "x0": ("float", 0.0),
        "tol": ("float", 1e-8),
    },
    "shock": {
        **_NOISE_KEYS,
        **_PARTICLE_KEYS,
        "alpha": ("float", 0.01),
        "drift_v1": ("float", 0.015),
        "drift_v2": ("float", 0.15),
        "x1_0": ("float", 0.0),
        "x2_0": ("float", -30.0),
        "t0": ("float", 500.0),
        "t_end": ("float", 2905.0),
        "dt": ("float", 0.02),
        "min_separation": ("float", 1e-4),
        "pre_window": ("float_pair", (505.0, 650.0)),
        "post_window": ("float_pair", (900.0, 2900.0)),
        "record_stride": ("int", 20),
        "seed_offset": ("int", 7919),
        "shared_realization": ("bool", False),
    },
}
# an ensemble wraps a sub-kind and shares its keys
_KIND_KEYS["ensemble"] = {
    "of": ("str", "shock"),
    **_KIND_KEYS["shock"],
    "theta0": ("float_list", (0.0,)),
    "horizon": ("float", 3125.0),
    "n_samples": ("int", 200_000),
}

_PARSERS = {
    "str": lambda s: s,
    "int": lambda s: int(s),
    "float": lambda s: float(s),
    "bool": lambda s: {"true": True, "false": False}[s.lower()],
    "int_list": lambda s: tuple(int(p.strip()) for p in s.split(",") if p.strip()),
    "float_list": lambda s: tuple(float(p.strip()) for p in s.split(",") if p.strip()),
    "float_pair": lambda s: tuple(float(p.strip()) for p in s.split(",")),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment: its kind, seeds and resolved parameters."""

    kind: str
    seeds: tuple[int, ...]
    params: dict
    canonical_text: str = field(repr=False, default="")

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text.encode()).hexdigest()


@dataclass(frozen=True)
class Artifact:
    filename: str
    content: str


@dataclass(frozen=True)
class RunResult:
    kind: str
    artifacts: tuple[Artifact, ...]
    manifest: dict
    summary: dict


def _parse_lines(text: str) -> dict:
    """Raw key -> (value string, line number) with syntax checking."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"column {raw.index(line[0]) + 1}: expected 'key = value', got {line!r}",
                line=lineno,
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if not key:
            raise ConfigurationError("empty key before '='", line=lineno)
        if not value:
            raise ConfigurationError(f"empty value for key {key!r}", line=lineno)
        if key in entries:
            raise ConfigurationError(
                f"duplicate key {key!r} (first set on line {entries[key][1]})", line=lineno
            )
        entries[key] = (value, lineno)
    return entries


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a flat key-value experiment document.

    ``overrides`` are applied on top of the document (same value syntax) and
    are part of the configuration identity.  Unknown keys are rejected with
    the allowed key set; missing required keys are reported all at once.
    """
    entries = _parse_lines(text)
    for key, value in (overrides or {}).items():
        entries[key.strip()] = (str(value).strip(), 0)

    if "kind" not in entries:
        required = sorted({"kind"})
        raise ConfigurationError(
            f"missing required keys: {', '.join(required)} "
            f"(every document needs 'kind', one of: {', '.join(KINDS)})"
        )
    kind = entries["kind"][0]
    if kind not in KINDS:
        raise ConfigurationError(
            f"unknown kind {kind!r}; expected one of: {', '.join(KINDS)}",
            line=entries["kind"][1] or None,
        )

    schema = {**_COMMON_KEYS, **_KIND_KEYS[kind]}
    for key, (value, lineno) in entries.items():
        if key not in schema:
            raise ConfigurationError(
                f"unknown key {key!r} for kind {kind!r}; allowed: "
                f"{', '.join(sorted(schema))}",
                line=lineno or None,
            )

    params: dict = {}
    missing = []
    for key, (typ, default) in schema.items():
        if key in entries:
            value, lineno = entries[key]
            try:
                params[key] = _PARSERS[typ](value)
            except (ValueError, KeyError) as err:
                raise ConfigurationError(
                    f"cannot parse {key!r} as {typ}: {value!r}", line=lineno or None
                ) from err
        elif default is _REQUIRED:
            missing.append(key)
        else:
            params[key] = default
    if missing:
        raise ConfigurationError(f"missing required keys: {', '.join(sorted(missing))}")

    config = _validate(kind, params)
    canonical = "\n".join(f"{k} = {_canon_value(config.params[k])}" for k in sorted(config.params))
    return ExperimentConfig(
        kind=config.kind, seeds=config.seeds, params=config.params, canonical_text=canonical
    )


def _canon_value(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(_canon_value(x) for x in v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _validate(kind: str, params: dict) -> ExperimentConfig:
    seeds = params.pop("seeds")
    if not seeds:
        raise ConfigurationError("seeds must be non-empty")
    params.pop("kind", None)

    if params.get("f0") is not None and params.get("amplitude_rate") is not None:
        raise ConfigurationError("give either f0 or amplitude_rate, not both")
    if "f0" in params:
        m0 = params.get("m0", 1.0)
        c = params.get("c", 1.0)
        if params["f0"] is None:
            # per-kind default normalizations: force experiments use f0 = 1 N,
            # particle experiments the dimensionless rate 0.1
            if params["amplitude_rate"] is None:
                if kind in ("force-path", "force-dist"):
                    params["f0"] = 1.0
                else:
                    params["amplitude_rate"] = 0.1
            if params["f0"] is None:
                params["f0"] = params["amplitude_rate"] * params["bandwidth"] * m0 * c
        if params["amplitude_rate"] is None:
            params["amplitude_rate"] = params["f0"] / (params["bandwidth"] * m0 * c)
        if params["f0"] <= 0:
            raise ConfigurationError(f"force amplitude must be positive, got {params['f0']}")

    if "m0" in params and params["m0"] <= 0:
        raise ConfigurationError(f"m0 must be positive, got {params['m0']}")
    if "c" in params and params["c"] <= 0:
        raise ConfigurationError(f"c must be positive, got {params['c']}")

    if kind == "velocity-dist" and params["sample_in"] not in ("proper", "lab"):
        raise ConfigurationError(
            f"sample_in must be 'proper' or 'lab', got {params['sample_in']!r}"
        )

    if kind == "trajectory":
        if params["t_end"] <= 0:
            raise ConfigurationError(f"t_end must be positive, got {params['t_end']}")
        if params["n_steps"] < 2:
            raise ConfigurationError(f"n_steps must be at least 2, got {params['n_steps']}")
        if params["tol"] <= 0:
            raise ConfigurationError(f"tol must be positive, got {params['tol']}")

    if kind in ("shock", "ensemble"):
        c = params.get("c", 1.0)
        for key in ("drift_v1", "drift_v2"):
            if abs(params[key]) >= c:
                raise ConfigurationError(
                    f"{key} = {params[key]} violates the sub-luminality invariant |v| < c = {c}"
                )
        if params["t_end"] <= params["t0"]:
            raise ConfigurationError(
                f"t_end ({params['t_end']}) must exceed t0 ({params['t0']})"
            )
        if params["dt"] <= 0:
            raise ConfigurationError(f"dt must be positive, got {params['dt']}")
        if params["min_separation"] <= 0:
            raise ConfigurationError(
                f"min_separation must be positive, got {params['min_separation']}"
            )
        if params["record_stride"] < 1:
            raise ConfigurationError(
                f"record_stride must be at least 1, got {params['record_stride']}"
            )
        for key in ("pre_window", "post_window"):
            win = params[key]
            if len(win) != 2 or not win[0] < win[1]:
                raise ConfigurationError(f"{key} must be 'start, end' with start < end, got {win}")
    if kind == "ensemble" and params["of"] not in ("shock", "single"):
        raise ConfigurationError(f"ensemble 'of' must be shock or single, got {params['of']!r}")
    if "horizon" in params:
        if params["horizon"] is None:
            # force-dist defaults to one fundamental period of the comb
            params["horizon"] = 2.0 * math.pi * params["n_components"] / params["bandwidth"]
        if params["horizon"] <= 0:
            raise ConfigurationError(f"horizon must be positive, got {params['horizon']}")

    return ExperimentConfig(kind=kind, seeds=tuple(seeds), params=params)


def _noise_spec(params: dict) -> NoiseSpec:
    return NoiseSpec(
        f0=params["f0"], n_components=params["n_components"], bandwidth=params["bandwidth"]
    )


def _theta_tag(theta: float) -> str:
    return format(theta, "g").replace("-", "m").replace(".", "p")


def _particle_model(params: dict, theta0: float, seed: int) -> ParticleModel:
    spec = _noise_spec(params)
    return ParticleModel(
        m0=params["m0"],
        c=params["c"],
        c_hat=theta0 * params["m0"] * params["c"],
        noise=spec,
        realization=draw_realization(spec, seed),
    )


def _shock_run(params: dict, seed: int):
    spec = _noise_spec(params)
    real1 = draw_realization(spec, seed)
    if params["shared_realization"]:
        real2 = real1
    else:
        real2 = draw_realization(spec, seed + params["seed_offset"])
    cfg = config_from_drift(
        alpha=params["alpha"],
        m0=params["m0"],
        c=params["c"],
        noise1=spec,
        real1=real1,
        noise2=spec,
        real2=real2,
        drift_v1=params["drift_v1"],
        drift_v2=params["drift_v2"],
        x1_0=params["x1_0"],
        x2_0=params["x2_0"],
        t0=params["t0"],
        min_separation=params["min_separation"],
    )
    series = integrate_shock(cfg, params["t_end"], params["dt"])
    report = shock_report(series, cfg, params["pre_window"], params["post_window"])
    return series, report


def _report_dict(report: ShockReport) -> dict:
    def summary(s):
        return {
            "mean_velocity": s.mean_velocity,
            "mean_momentum": s.mean_momentum,
            "mean_kinetic_energy": s.mean_kinetic_energy,
            "window": list(s.window),
        }

    return {
        "before": {"particle1": summary(report.before[0]), "particle2": summary(report.before[1])},
        "after": {"particle1": summary(report.after[0]), "particle2": summary(report.after[1])},
        "total_momentum_before": report.total_momentum_before,
        "total_momentum_after": report.total_momentum_after,
        "closest_approach": report.closest_approach,
        "t_closest": report.t_closest,
    }


def _json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _run_force_path(config: ExperimentConfig):
    p = config.params
    spec = _noise_spec(p)
    artifacts = []
    for seed in config.seeds:
        real = draw_realization(spec, seed)
        grid = np.arange(p["n_samples"]) * (p["horizon"] / p["n_samples"])
        force = noise.force_at(spec, real, grid)
        content = render_table_csv("tau,force", [grid, force])
        artifacts.append(Artifact(f"force_path_seed{seed}.csv", "# units: s,N\n" + content))
    summary = {"n_samples": p["n_samples"], "horizon": p["horizon"], "f0": p["f0"]}
    return artifacts, summary


def _run_force_dist(config: ExperimentConfig):
    p = config.params
    spec = _noise_spec(p)
    horizon = p["horizon"]
    n_real = max(1, p["n_realizations"])
    per = p["n_samples"] // n_real
    if per < 10 * p["n_bins"]:
        raise ConfigurationError(
            f"n_samples/n_realizations = {per} is below 10 samples per bin "
            f"for n_bins = {p['n_bins']}"
        )
    edges = np.linspace(-spec.f0, spec.f0, p["n_bins"] + 1)
    artifacts = []
    for seed in config.seeds:
        grid = np.arange(per) * (horizon / per)
        samples = np.empty(per * n_real)
        for k in range(n_real):
            real = draw_realization(spec, seed + k)
            samples[k * per : (k + 1) * per] = noise.force_at(spec, real, grid)
        hist = histogram_from_samples(samples, p["n_bins"], edges=edges)
        artifacts.append(Artifact(f"force_dist_seed{seed}.csv", render_histogram_csv(hist)))
    summary = {
        "horizon": horizon,
        "n_realizations": n_real,
        "samples_per_realization": per,
        "support": [-spec.f0, spec.f0],
    }
    return artifacts, summary


def _run_single(config: ExperimentConfig):
    p = config.params
    artifacts = []
    drift_rows = []
    for seed in config.seeds:
        for theta0 in p["theta0"]:
            model = _particle_model(p, theta0, seed)
            tag = f"theta{_theta_tag(theta0)}_seed{seed}"
            grid = np.arange(p["n_samples"]) * (p["horizon"] / p["n_samples"])
            v = kinematics.velocity_at_proper_time(model, grid)
            artifacts.append(
                Artifact(f"single_{tag}.csv", "# units: s,m/s\n" + render_table_csv("tau,v", [grid, v]))
            )
            drift_rows.append((seed, theta0, float(v.mean())))
            if p["hist_bins"] > 0:
                hist = stats.velocity_distribution(
                    model, p["hist_horizon"], p["hist_samples"], p["hist_bins"]
                )
                artifacts.append(Artifact(f"single_{tag}_vdist.csv", render_histogram_csv(hist)))
    summary = {
        "series_average_velocity": {
            f"theta0={t:g}/seed={s}": v for (s, t, v) in drift_rows
        }
    }
    return artifacts, summary


def _run_velocity_dist(config: ExperimentConfig):
    p = config.params
    artifacts = []
    means = {}
    for seed in config.seeds:
        for theta0 in p["theta0"]:
            model = _particle_model(p, theta0, seed)
            hist = stats.velocity_distribution(
                model,
                p["horizon"],
                p["n_samples"],
                p["n_bins"],
                sample_in_lab_time=(p["sample_in"] == "lab"),
            )
            tag = f"theta{_theta_tag(theta0)}_seed{seed}"
            artifacts.append(Artifact(f"vdist_{tag}.csv", render_histogram_csv(hist)))
            means[f"theta0={theta0:g}/seed={seed}"] = stats.mean_of(hist)
    return artifacts, {"distribution_means": means}


def _run_trajectory(config: ExperimentConfig):
    p = config.params
    artifacts = []
    slopes = {}
    for seed in config.seeds:
        for theta0 in p["theta0"]:
            model = _particle_model(p, theta0, seed)
            series = kinematics.trajectory(model, p["t_end"], p["n_steps"], p["x0"], p["tol"])
            tag = f"theta{_theta_tag(theta0)}_seed{seed}"
            artifacts.append(Artifact(f"trajectory_{tag}.csv", render_series_csv(series)))
            slopes[f"theta0={theta0:g}/seed={seed}"] = float(
                (series.x[-1] - series.x[0]) / (series.t[-1] - series.t[0])
            )
    return artifacts, {"mean_slopes": slopes}


def _run_shock_kind(config: ExperimentConfig):
    p = config.params
    artifacts = []
    summaries = {}
    for seed in config.seeds:
        series, report = _shock_run(p, seed)
        artifacts.append(
            Artifact(f"shock_seed{seed}.csv", render_shock_csv(series, p["record_stride"]))
        )
        rep = _report_dict(report)
        artifacts.append(Artifact(f"shock_seed{seed}_report.json", _json(rep)))
        summaries[f"seed={seed}"] = {
            "v1_after": rep["after"]["particle1"]["mean_velocity"],
            "v2_after": rep["after"]["particle2"]["mean_velocity"],
            "momentum_relative_change": abs(
                rep["total_momentum_after"] - rep["total_momentum_before"]
            )
            / abs(rep["total_momentum_before"]),
        }
    return artifacts, {"shocks": summaries}


def _run_ensemble(config: ExperimentConfig):
    p = config.params
    if p["of"] == "shock":
        header = (
            "seed,v1_before,v2_before,v1_after,v2_after,"
            "p_total_before,p_total_after,closest_approach,t_closest"
        )
        with ThreadPoolExecutor(max_workers=min(4, len(config.seeds))) as pool:
            results = list(pool.map(lambda s: _shock_run(p, s), config.seeds))
        rows = []
        for seed, (series, rep) in zip(config.seeds, results):
            rows.append(
                (
                    float(seed),
                    rep.before[0].mean_velocity,
                    rep.before[1].mean_velocity,
                    rep.after[0].mean_velocity,
                    rep.after[1].mean_velocity,
                    rep.total_momentum_before,
                    rep.total_momentum_after,
                    rep.closest_approach,
                    rep.t_closest,
                )
            )
        columns = [np.array(col) for col in zip(*rows)]
        table = render_table_csv(header, columns)
        v1_after = columns[3]
        p_before, p_after = columns[5], columns[6]
        aggregate = {
            "n_runs": len(config.seeds),
            "v1_after_mean": float(v1_after.mean()),
            "v1_after_std": float(v1_after.std(ddof=1)) if len(config.seeds) > 1 else 0.0,
            "v2_after_mean": float(columns[4].mean()),
            "max_momentum_relative_change": float(
                np.max(np.abs(p_after - p_before) / np.abs(p_before))
            ),
        }
        artifacts = [
            Artifact("ensemble_shock_summary.csv", table),
            Artifact("ensemble_shock_report.json", _json(aggregate)),
        ]
        return artifacts, aggregate

    # of == "single": per-seed tau-averaged drift velocities
    header = "seed,theta0,v_drift"
    rows = []

    def one(seed):
        out = []
        for theta0 in p["theta0"]:
            model = _particle_model(p, theta0, seed)
            grid = np.arange(p["n_samples"]) * (p["horizon"] / p["n_samples"])
            v_bar = float(kinematics.velocity_at_proper_time(model, grid).mean())
            out.append((float(seed), theta0, v_bar))
        return out

    with ThreadPoolExecutor(max_workers=min(4, len(config.seeds))) as pool:
        for chunk in pool.map(one, config.seeds):
            rows.extend(chunk)
    columns = [np.array(col) for col in zip(*rows)]
    table = render_table_csv(header, columns)
    aggregate = {
        "n_runs": len(config.seeds),
        "theta0": list(p["theta0"]),
        "max_drift_deviation": float(
            np.max(np.abs(columns[2] - np.tanh(columns[1])))
        ),
    }
    artifacts = [
        Artifact("ensemble_single_summary.csv", table),
        Artifact("ensemble_single_report.json", _json(aggregate)),
    ]
    return artifacts, aggregate


_RUNNERS = {
    "force-path": _run_force_path,
    "force-dist": _run_force_dist,
    "single": _run_single,
    "velocity-dist": _run_velocity_dist,
    "trajectory": _run_trajectory,
    "shock": _run_shock_kind,
    "ensemble": _run_ensemble,
}


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Execute an experiment and return its artifacts, manifest and summary."""
    artifacts, summary = _RUNNERS[config.kind](config)
    manifest = {
        "tool": "stochrel",
        "version": __version__,
        "kind": config.kind,
        "config_sha256": config.config_hash,
        "seeds": ", ".join(str(s) for s in config.seeds),
        "artifacts": ", ".join(a.filename for a in artifacts),
    }
    return RunResult(
        kind=config.kind, artifacts=tuple(artifacts), manifest=manifest, summary=summary
    )


def render_manifest(manifest: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in manifest.items())

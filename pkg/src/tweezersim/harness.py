"""Experiment harness: configuration, validation, dispatch, CSV emission.

Every experiment is a pure function of (config, seed): trials draw from
counter-based per-trial substreams and results are aggregated with
commutative reductions, so identical configs produce byte-identical CSV
files regardless of scheduling.  Numeric CSV fields use 17 significant
digits (round-trip exact for doubles).

Config files are flat ``key = value`` text; keys are dotted per module
(e.g. ``emitter.pulse_duration = 4e-9``, SI units throughout).  Unknown
keys are rejected.
"""

from dataclasses import dataclass, field
import json
import math
import time
from pathlib import Path

import numpy as np
from scipy.optimize import curve_fit

from . import emission, interference, qubit, trap
from .rng import trial_rng
from .states import basis_state

EXPERIMENTS = (
    "rabi",
    "ramsey",
    "echo",
    "transfer",
    "transport",
    "fluorescence",
    "g2",
    "hom_sweep",
    "herald",
    "rate",
)

# every overridable key with its default (types are inferred from these)
_DEFAULTS = {
    "qubit.rabi_frequency": 2 * math.pi * 6.7e6,
    "qubit.laser_detuning": 2 * math.pi * 5e3,
    "dephasing.inhomogeneous_tau": 630e-6,
    "dephasing.irreversible_tau": 50e-3,
    "dephasing.model_kind": qubit.GAUSSIAN_STATIC,
    "dephasing.mean_detuning": 0.0,
    "dephasing.echo_exponent": 2.0,
    "plan.max_displacement": 9e-6,
    "plan.round_trip_time": 6e-3,
    "plan.dwell_time": 200e-6,
    "plan.depth_ratio": 1.0,
    "trap.loading_rate": 0.5,
    "trap.loss_rate": 0.1,
    "trap.blockade": True,
    "trap.bin_width": 10e-3,
    "trap.background_rate": 1000.0,
    "trap.atom_rate": 10000.0,
    "trap.duration": 100.0,
    "readout.pumping_efficiency": 0.85,
    "readout.pushout_efficiency": 1.0,
    "readout.background_loss": 0.0,
    "emitter.excited_lifetime": 26e-9,
    "emitter.pulse_duration": 4e-9,
    "emitter.pulse_area": math.pi,
    "emitter.pulse_shape": emission.SQUARE,
    "emitter.pulse_period": 200e-9,
    "emitter.pulses_per_train": 16,
    "detection.collection_efficiency": 0.006,
    "detection.detector_efficiency": 1.0,
    "detection.dark_rate": 0.0,
    "herald.overlap_sq": 1.0,
    "herald.coincidence_window": 100e-9,
    "herald.two_photon_contamination": 0.0,
    "herald.per_photon_detection": 1.0,
    "hom.mode_waist": 1e-6,
    "hom.v_max": 0.6,
    "hom.max_displacement": 3e-6,
    "hom.points": 25,
    "rabi.max_duration": 450e-9,
    "rabi.points": 61,
    "ramsey.max_delay": 2e-3,
    "ramsey.points": 81,
    "echo.max_total_time": 60e-3,
    "echo.points": 61,
    "transport.points": 10,
    "transport.heating_coefficient": 0.0,
    "g2.window": 2e-6,
    "rate.attempt_rate": 1.1e3,
    "rate.p_emit": 1.0,
}

# experiment-specific defaults applied under the user's overrides
_EXPERIMENT_DEFAULTS = {
    # unit detection so the histogram has usable statistics at desk scale;
    # the physical 0.6% collection is restored with an override
    "g2": {"detection.collection_efficiency": 1.0},
    "herald": {"herald.two_photon_contamination": 0.018},
    "rate": {"herald.per_photon_detection": 0.006},
}

_DEFAULT_TRIALS = {
    "rabi": 100,
    "ramsey": 200,
    "echo": 0,
    "transfer": 0,
    "transport": 0,
    "fluorescence": 0,
    "g2": 400,
    "hom_sweep": 0,
    "herald": 0,
    "rate": 0,
}


class ConfigError(ValueError):
    """Raised when a run is attempted with an invalid configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    trials: int | None = None
    overrides: dict = field(default_factory=dict)
    output_path: str = "runs"

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": int(self.seed),
            "trials": self.trials,
            "overrides": dict(self.overrides),
            "output_path": str(self.output_path),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            experiment=d["experiment"],
            seed=int(d["seed"]),
            trials=d.get("trials"),
            overrides=dict(d.get("overrides", {})),
            output_path=d.get("output_path", "runs"),
        )


def parse_value(text: str):
    """Parse a config value: int, float, bool, or bare string."""
    s = text.strip().strip('"').strip("'")
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    return s


def parse_config_file(path) -> dict:
    """Read flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = parse_value(value)
    return out


def merged_overrides(config: ExperimentConfig) -> dict:
    base = dict(_EXPERIMENT_DEFAULTS.get(config.experiment, {}))
    base.update(config.overrides)
    return base


@dataclass
class RunParams:
    """Module parameter objects resolved from a config."""

    dephasing: qubit.DephasingModel
    plan: qubit.TransportPlan
    occupancy: trap.OccupancyProcess
    readout: trap.ReadoutParams
    emitter: emission.EmitterParams
    detection: emission.DetectionParams
    herald: interference.HeraldConfig
    values: dict


def _resolve_values(config: ExperimentConfig, violations: list[str]) -> dict:
    values = dict(_DEFAULTS)
    for key, raw in merged_overrides(config).items():
        if key not in _DEFAULTS:
            violations.append(f"unknown override key: {key}")
            continue
        default = _DEFAULTS[key]
        if isinstance(default, bool):
            if not isinstance(raw, bool):
                violations.append(f"{key}: expected a boolean")
                continue
            values[key] = raw
        elif isinstance(default, int) and not isinstance(default, bool):
            if isinstance(raw, bool) or not isinstance(raw, (int, float)) or raw != int(raw):
                violations.append(f"{key}: expected an integer")
                continue
            values[key] = int(raw)
        elif isinstance(default, float):
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                violations.append(f"{key}: expected a number")
                continue
            values[key] = float(raw)
        else:
            values[key] = str(raw)
    return values


def _build_params(config: ExperimentConfig, violations: list[str]) -> RunParams | None:
    v = _resolve_values(config, violations)
    if violations:
        return None

    built = {}

    def attempt(group, fn):
        try:
            built[group] = fn()
        except ValueError as err:
            violations.append(f"{group}: {err}")

    attempt("dephasing", lambda: qubit.DephasingModel(
        inhomogeneous_tau=v["dephasing.inhomogeneous_tau"],
        irreversible_tau=v["dephasing.irreversible_tau"],
        model_kind=v["dephasing.model_kind"],
        mean_detuning=v["dephasing.mean_detuning"],
        echo_exponent=v["dephasing.echo_exponent"],
    ))
    attempt("plan", lambda: qubit.TransportPlan(
        max_displacement=v["plan.max_displacement"],
        round_trip_time=v["plan.round_trip_time"],
        dwell_time=v["plan.dwell_time"],
        depth_ratio=v["plan.depth_ratio"],
    ))
    attempt("trap", lambda: trap.OccupancyProcess(
        loading_rate=v["trap.loading_rate"],
        loss_rate=v["trap.loss_rate"],
        blockade=v["trap.blockade"],
        bin_width=v["trap.bin_width"],
    ))
    attempt("readout", lambda: trap.ReadoutParams(
        pumping_efficiency=v["readout.pumping_efficiency"],
        pushout_efficiency=v["readout.pushout_efficiency"],
        background_loss=v["readout.background_loss"],
    ))
    attempt("emitter", lambda: emission.EmitterParams(
        excited_lifetime=v["emitter.excited_lifetime"],
        pulse_duration=v["emitter.pulse_duration"],
        pulse_area=v["emitter.pulse_area"],
        pulse_shape=v["emitter.pulse_shape"],
        pulse_period=v["emitter.pulse_period"],
        pulses_per_train=v["emitter.pulses_per_train"],
    ))
    attempt("detection", lambda: emission.DetectionParams(
        collection_efficiency=v["detection.collection_efficiency"],
        detector_efficiency=v["detection.detector_efficiency"],
        dark_rate=v["detection.dark_rate"],
    ))
    attempt("herald", lambda: interference.HeraldConfig(
        coincidence_window=v["herald.coincidence_window"],
        two_photon_contamination=v["herald.two_photon_contamination"],
        per_photon_detection=v["herald.per_photon_detection"],
    ))

    if not v["trap.atom_rate"] > v["trap.background_rate"]:
        violations.append("trap: atom_rate > background_rate")
    if not v["trap.duration"] > 0:
        violations.append("trap: duration > 0")
    if not 0.0 <= v["herald.overlap_sq"] <= 1.0:
        violations.append("herald: overlap_sq in [0, 1]")
    if not v["qubit.rabi_frequency"] > 0:
        violations.append("qubit: rabi_frequency > 0")
    if not 0.0 <= v["hom.v_max"] <= 1.0:
        violations.append("hom: v_max in [0, 1]")
    if not v["hom.mode_waist"] > 0:
        violations.append("hom: mode_waist > 0")
    for key in ("hom.points", "rabi.points", "ramsey.points", "echo.points", "transport.points"):
        if v[key] < 2:
            violations.append(f"{key} >= 2")
    if not v["rate.attempt_rate"] > 0:
        violations.append("rate: attempt_rate > 0")
    if not 0.0 <= v["rate.p_emit"] <= 1.0:
        violations.append("rate: p_emit in [0, 1]")
    if not v["g2.window"] > 0:
        violations.append("g2: window > 0")

    if violations:
        return None
    return RunParams(
        dephasing=built["dephasing"],
        plan=built["plan"],
        occupancy=built["trap"],
        readout=built["readout"],
        emitter=built["emitter"],
        detection=built["detection"],
        herald=built["herald"],
        values=v,
    )


def validate(config: ExperimentConfig) -> list[str]:
    """Check a config against every module invariant; violations are data."""
    violations: list[str] = []
    if config.experiment not in EXPERIMENTS:
        violations.append(
            f"unknown experiment: {config.experiment!r} (choose from {', '.join(EXPERIMENTS)})"
        )
        return violations
    if config.trials is not None and config.trials < 0:
        violations.append("trials >= 0")
    _build_params(config, violations)
    return violations


@dataclass(frozen=True)
class RunReport:
    config: dict
    summary: dict
    csv_paths: list[str]
    duration_seconds: float

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "summary": self.summary,
            "csv_files": list(self.csv_paths),
            "duration_seconds": self.duration_seconds,
        }


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: Path, header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _px_population_zero(pump_eff: float, theta: float) -> float:
    c2 = math.cos(theta / 2.0) ** 2
    return pump_eff * c2 + (1.0 - pump_eff) * (1.0 - c2)


def fit_rabi_frequency(durations: np.ndarray, populations: np.ndarray):
    """Least-squares cosine fit a + b cos(w t); returns (w, a, b).

    The initial frequency guess comes from the spectrum, so the fit does
    not presume the configured drive frequency.
    """
    y = np.asarray(populations, dtype=float)
    t = np.asarray(durations, dtype=float)
    dt = t[1] - t[0]
    spec = np.abs(np.fft.rfft(y - y.mean()))
    freqs = np.fft.rfftfreq(y.size, dt)
    w0 = 2 * math.pi * freqs[np.argmax(spec[1:]) + 1]

    def model(tt, a, b, w):
        return a + b * np.cos(w * tt)

    p0 = (float(y.mean()), float((y.max() - y.min()) / 2.0), float(w0))
    popt, _ = curve_fit(model, t, y, p0=p0, maxfev=20000)
    a, b, w = popt
    if b < 0:  # fold the sign into a pi phase: cos fit is even in w
        b, w = -b, w
    return abs(w), a, abs(b)


def _run_rabi(config, params, out_dir):
    v = params.values
    omega = v["qubit.rabi_frequency"]
    n_points = v["rabi.points"]
    shots = config.trials if config.trials is not None else _DEFAULT_TRIALS["rabi"]
    if shots < 1:
        raise ConfigError("rabi requires trials >= 1")
    durations = np.linspace(0.0, v["rabi.max_duration"], n_points)
    pump_eff = params.readout.pumping_efficiency

    observed = np.zeros(n_points)
    expected = np.zeros(n_points)
    for i, t in enumerate(durations):
        pulse = qubit.PulseSpec(rabi_frequency=omega, duration=float(t))
        expected[i] = _px_population_zero(pump_eff, omega * t)
        hits = 0
        for shot in range(shots):
            rng = trial_rng(config.seed, i * shots + shot, stream=0)
            start = basis_state(2, 0 if rng.random() < pump_eff else 1, ("0", "1"))
            rotated = qubit.rabi_rotation(start, pulse)
            if trap.pushout_readout(rotated, params.readout, rng).atom_present:
                hits += 1
        observed[i] = hits / shots

    w_fit, offset, amp = fit_rabi_frequency(durations, observed)
    csv = _write_csv(
        out_dir / "rabi_fringes.csv",
        ["duration_s", "p_present_expected", "p_present_observed"],
        zip(durations, expected, observed),
    )
    summary = {
        "shots_per_point": shots,
        "configured_rabi_frequency": omega,
        "fitted_rabi_frequency": w_fit,
        "relative_frequency_error": abs(w_fit - omega) / omega,
        "fitted_ceiling": offset + amp,
        "fitted_floor": offset - amp,
    }
    return summary, [csv]


def _run_ramsey(config, params, out_dir):
    v = params.values
    model = params.dephasing
    detuning = v["qubit.laser_detuning"]
    n_points = v["ramsey.points"]
    shots = config.trials if config.trials is not None else _DEFAULT_TRIALS["ramsey"]
    delays = np.linspace(0.0, v["ramsey.max_delay"], n_points)
    rows = []
    for i, d in enumerate(delays):
        p = qubit.ramsey_signal(float(d), model, detuning)
        c = qubit.ramsey_contrast(float(d), model)
        if shots > 0:
            rng = trial_rng(config.seed, i, stream=1)
            sampled = float(np.mean(rng.random(shots) < p))
        else:
            sampled = p
        rows.append((d, p, c, sampled))
    csv = _write_csv(
        out_dir / "ramsey_fringes.csv",
        ["delay_s", "p0", "contrast", "p0_sampled"],
        rows,
    )
    summary = {
        "shots_per_point": shots,
        "laser_detuning": detuning,
        "contrast_at_inhomogeneous_tau": qubit.ramsey_contrast(
            model.inhomogeneous_tau, model
        ),
    }
    return summary, [csv]


def _run_echo(config, params, out_dir):
    v = params.values
    model = params.dephasing
    times = np.linspace(0.0, v["echo.max_total_time"], v["echo.points"])
    rows = [
        (t, qubit.spin_echo_signal(float(t), float(t) / 2.0, model)) for t in times
    ]
    csv = _write_csv(out_dir / "echo_amplitude.csv", ["total_time_s", "echo_amplitude"], rows)
    summary = {
        "amplitude_at_40ms": qubit.spin_echo_signal(40e-3, 20e-3, model),
        "irreversible_tau": model.irreversible_tau,
    }
    return summary, [csv]


def _run_transfer(config, params, out_dir):
    model = params.dephasing
    plan = params.plan
    ratios = sorted({0.5, 1.0, 2.0, plan.depth_ratio})
    baseline = qubit.ramsey_contrast(plan.dwell_time, model)
    rows = []
    worst = 0.0
    for r in ratios:
        p = qubit.TransportPlan(
            plan.max_displacement, plan.round_trip_time, plan.dwell_time, r
        )
        contrast, phase = qubit.transfer_sequence(model, p)
        rows.append((r, contrast, baseline, phase))
        worst = max(worst, abs(contrast - baseline))
    csv = _write_csv(
        out_dir / "transfer_contrast.csv",
        ["depth_ratio", "contrast", "no_transfer_contrast", "phase_shift_rad"],
        rows,
    )
    return {"max_contrast_deviation": worst, "dwell_time": plan.dwell_time}, [csv]


def _run_transport(config, params, out_dir):
    v = params.values
    model = params.dephasing
    plan = params.plan
    ds = np.linspace(0.0, plan.max_displacement, v["transport.points"])
    k = v["transport.heating_coefficient"]
    rows = [(d, qubit.transport_echo(plan, model, float(d), k)) for d in ds]
    amps = [r[1] for r in rows]
    csv = _write_csv(
        out_dir / "transport_echo.csv", ["displacement_m", "echo_amplitude"], rows
    )
    summary = {
        "amplitude_spread": max(amps) - min(amps),
        "round_trip_time": plan.round_trip_time,
    }
    return summary, [csv]


def _run_fluorescence(config, params, out_dir):
    v = params.values
    proc = params.occupancy
    duration = v["trap.duration"]
    traj = trap.simulate_occupancy(proc, duration, config.seed)
    trace = trap.fluorescence_trace(
        traj, v["trap.background_rate"], v["trap.atom_rate"], proc.bin_width, config.seed
    )
    lam0 = v["trap.background_rate"] * proc.bin_width
    lam1 = (v["trap.background_rate"] + v["trap.atom_rate"]) * proc.bin_width
    threshold = trap.two_poisson_threshold(lam0, lam1)
    result = trap.classify_occupancy(trace, threshold)

    bin_starts = np.arange(trace.counts.size) * proc.bin_width
    trace_csv = _write_csv(
        out_dir / "fluorescence_trace.csv",
        ["bin_start_s", "counts", "occupied"],
        zip(bin_starts, trace.counts, result.labels),
    )
    values, freq = trace.histogram()
    hist_csv = _write_csv(
        out_dir / "fluorescence_histogram.csv",
        ["counts_value", "frequency"],
        zip(values, freq),
    )
    summary = {
        "occupied_fraction": float(result.labels.mean()),
        "stationary_occupied_fraction": (
            proc.stationary_occupied_fraction() if proc.blockade else float("nan")
        ),
        "threshold": threshold,
        "misclassification_probability": result.misclassification_probability,
        "max_occupancy": int(traj.values.max()),
    }
    return summary, [trace_csv, hist_csv]


def _run_g2(config, params, out_dir):
    v = params.values
    n_trains = config.trials if config.trials is not None else _DEFAULT_TRIALS["g2"]
    if n_trains < 1:
        raise ConfigError("g2 requires trials >= 1")
    records = emission.quantum_jump_trials(params.emitter, config.seed, n_trains)
    hist = emission.g2_histogram(
        records, params.detection, v["g2.window"], config.seed, params.emitter
    )
    starts_ns = (hist.bin_centers - hist.pulse_period / 2.0) * 1e9
    csv = _write_csv(
        out_dir / "g2_histogram.csv",
        ["delay_bin_start_ns", "counts"],
        zip(starts_ns, hist.counts),
    )
    ratio = hist.zero_delay_ratio()
    k_max = (hist.counts.size - 1) // 2
    summary = {
        "trains": n_trains,
        "pulses_per_train": params.emitter.pulses_per_train,
        "zero_delay_counts": int(hist.counts[k_max]),
        "total_coincidences": int(hist.counts.sum()),
        "zero_delay_ratio": ratio if not math.isnan(ratio) else None,
    }
    return summary, [csv]


def _herald_config(params) -> interference.HeraldConfig:
    return params.herald


def _run_hom_sweep(config, params, out_dir):
    v = params.values
    waist = v["hom.mode_waist"]
    v_max = v["hom.v_max"]
    ds = np.linspace(-v["hom.max_displacement"], v["hom.max_displacement"], v["hom.points"])
    curve = interference.coincidence_vs_displacement(waist, ds, v_max)
    hom_csv = _write_csv(
        out_dir / "hom_displacement.csv",
        ["displacement_m", "normalized_coincidence"],
        curve,
    )
    cfg = _herald_config(params)
    rows = []
    for osq in (0.0, 0.25, 0.5, 0.6, 0.75, 1.0):
        pair = interference.PhotonModePair(math.sqrt(osq))
        out = interference.herald_filter(pair, cfg)
        rows.append((
            osq,
            interference.hom_coincidence_probability(pair),
            out.herald_probability,
            out.fidelity_to_singlet,
        ))
    herald_csv = _write_csv(
        out_dir / "herald_sweep.csv",
        ["overlap_sq", "coincidence_prob", "herald_prob", "fidelity"],
        rows,
    )
    summary = {
        "v_max": v_max,
        "residual_at_zero_displacement": 1.0 - v_max,
        "mode_waist": waist,
    }
    return summary, [hom_csv, herald_csv]


def _run_herald(config, params, out_dir):
    v = params.values
    pair = interference.PhotonModePair(math.sqrt(v["herald.overlap_sq"]))
    out = interference.herald_filter(pair, _herald_config(params))
    csv = _write_csv(
        out_dir / "herald_outcome.csv",
        ["overlap_sq", "herald_prob", "fidelity"],
        [(v["herald.overlap_sq"], out.herald_probability, out.fidelity_to_singlet)],
    )
    summary = {
        "overlap_sq": v["herald.overlap_sq"],
        "herald_probability": out.herald_probability,
        "fidelity_to_singlet": out.fidelity_to_singlet,
        "two_photon_contamination": v["herald.two_photon_contamination"],
    }
    return summary, [csv]


def _run_rate(config, params, out_dir):
    v = params.values
    efficiency, pairs = interference.entanglement_rate(
        _herald_config(params),
        v["rate.attempt_rate"],
        p_emit=v["rate.p_emit"],
        emitter_lifetime=params.emitter.excited_lifetime,
    )
    interval = math.inf if pairs == 0 else 1.0 / pairs
    csv = _write_csv(
        out_dir / "entanglement_rate.csv",
        ["efficiency_per_attempt", "pairs_per_second", "mean_interval_s"],
        [(efficiency, pairs, interval)],
    )
    summary = {
        "efficiency_per_attempt": efficiency,
        "pairs_per_second": pairs,
        "mean_interval_s": interval,
        "attempt_rate": v["rate.attempt_rate"],
    }
    return summary, [csv]


_RUNNERS = {
    "rabi": _run_rabi,
    "ramsey": _run_ramsey,
    "echo": _run_echo,
    "transfer": _run_transfer,
    "transport": _run_transport,
    "fluorescence": _run_fluorescence,
    "g2": _run_g2,
    "hom_sweep": _run_hom_sweep,
    "herald": _run_herald,
    "rate": _run_rate,
}


def _check_finite(summary: dict):
    for key, value in summary.items():
        if isinstance(value, float) and not math.isfinite(value):
            if key == "mean_interval_s":
                continue
            raise RuntimeError(f"summary value {key} is not finite")


def run(config: ExperimentConfig) -> RunReport:
    """Validate, dispatch, and write CSV + report files.

    Fail-closed: any violation aborts before anything is written.
    """
    violations = validate(config)
    if violations:
        raise ConfigError("; ".join(violations))
    t0 = time.perf_counter()
    out_dir = Path(config.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = _build_params(config, [])
    summary, csv_paths = _RUNNERS[config.experiment](config, params, out_dir)
    _check_finite(summary)
    report = RunReport(
        config=config.to_dict(),
        summary=summary,
        csv_paths=csv_paths,
        duration_seconds=time.perf_counter() - t0,
    )
    report_path = out_dir / f"{config.experiment}_report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return report

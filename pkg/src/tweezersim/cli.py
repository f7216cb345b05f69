"""Command-line interface: one subcommand per experiment, plus validate/selftest."""

import argparse
import json
import math
import sys

import numpy as np

from . import emission, interference, qubit, states, trap
from .harness import (
    ConfigError,
    EXPERIMENTS,
    ExperimentConfig,
    parse_config_file,
    parse_value,
    run,
    validate,
)


def _add_common(parser):
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")
    parser.add_argument("--seed", type=int, default=None, metavar="N")
    parser.add_argument("--out", default=None, metavar="DIR")
    parser.add_argument("--trials", type=int, default=None, metavar="N")
    parser.add_argument(
        "--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
        help="override one parameter (repeatable)",
    )


def _config_from_args(args, experiment=None) -> ExperimentConfig:
    file_values = parse_config_file(args.config) if args.config else {}
    exp = experiment or file_values.pop("experiment", None)
    if exp is None:
        raise ConfigError("no experiment given (subcommand or 'experiment =' in the config)")
    seed = args.seed if args.seed is not None else int(file_values.pop("seed", 0))
    trials = args.trials if args.trials is not None else file_values.pop("trials", None)
    out = args.out if args.out is not None else str(file_values.pop("out", f"runs/{exp}"))
    file_values.pop("experiment", None)
    overrides = dict(file_values)
    for item in args.sets:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = parse_value(value)
    return ExperimentConfig(
        experiment=exp, seed=seed,
        trials=int(trials) if trials is not None else None,
        overrides=overrides, output_path=out,
    )


def _selftest() -> int:
    """Run the quick invariant battery; one line per check."""
    checks = []

    def check(name, fn):
        checks.append((name, fn))

    def bs_antibunching():
        basis = states.ModeOccupationBasis(2, 2)
        u = states.beam_splitter_unitary(basis)
        col = basis.index((1, 1))
        assert u[col, col] == 0.0
        assert np.max(np.abs(u.conj().T @ u - np.eye(basis.dim))) < 1e-12

    def tensor_associative():
        a = states.ket([1, 1j], ("0", "1"))
        b = states.ket([2, 1], ("0", "1"))
        c = states.ket([1, 3], ("0", "1"))
        left = states.tensor(states.tensor(a, b), c)
        right = states.tensor(a, states.tensor(b, c))
        assert np.max(np.abs(left.amplitudes - right.amplitudes)) < 1e-12

    def echo_invariance():
        model = qubit.DephasingModel(irreversible_tau=math.inf)
        for t in (1e-4, 5e-3, 0.3):
            assert abs(qubit.spin_echo_signal(t, t / 2, model) - 1.0) < 1e-6

    def ramsey_zero_delay():
        model = qubit.DephasingModel()
        assert abs(qubit.ramsey_signal(0.0, model)) < 1e-12

    def hom_endpoints():
        assert interference.hom_coincidence_probability(interference.PhotonModePair(1.0)) == 0.0
        assert interference.hom_coincidence_probability(interference.PhotonModePair(0.0)) == 0.5

    def herald_ideal():
        out = interference.herald_filter(
            interference.PhotonModePair(1.0), interference.HeraldConfig()
        )
        assert abs(out.fidelity_to_singlet - 1.0) < 1e-10
        assert abs(out.herald_probability - 0.25) < 1e-10

    def readout_affine():
        params = trap.ReadoutParams()
        for p1 in (0.0, 0.25, 0.5, 0.75, 1.0):
            amps = [math.sqrt(1 - p1), math.sqrt(p1)]
            res = trap.pushout_readout(states.ket(amps, ("0", "1")), params, 1)
            assert abs(res.absent_probability - p1) < 1e-12

    def trajectory_determinism():
        p = emission.EmitterParams(pulses_per_train=3)
        a = emission.quantum_jump_trial(p, seed=7, trial_id=5)
        b = emission.quantum_jump_trial(p, seed=7, trial_id=5)
        batch = emission.quantum_jump_trials(p, seed=7, n_trials=8)
        assert np.array_equal(a.emission_times, b.emission_times)
        assert np.array_equal(a.emission_times, batch[5].emission_times)

    def blockade_cap():
        proc = trap.OccupancyProcess(loading_rate=2.0, loss_rate=1.0)
        traj = trap.simulate_occupancy(proc, 2000.0, seed=3)
        assert traj.values.max() <= 1

    check("beam splitter unitary + exact antibunching", bs_antibunching)
    check("tensor associativity", tensor_associative)
    check("spin echo rephases static spread exactly", echo_invariance)
    check("ramsey zero-delay signal is 0", ramsey_zero_delay)
    check("HOM endpoint identities", hom_endpoints)
    check("ideal herald: fidelity 1, probability 1/4", herald_ideal)
    check("readout probability affine in P(|1>)", readout_affine)
    check("trajectories reproducible and batch-independent", trajectory_determinism)
    check("blockade caps occupancy at 1", blockade_cap)

    failures = 0
    for name, fn in checks:
        try:
            fn()
            print(f"SELFTEST PASS  {name}")
        except Exception as err:  # report and continue
            failures += 1
            print(f"SELFTEST FAIL  {name}: {err}")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tweezersim",
        description="Seeded simulator of a single-atom optical-tweezer qubit experiment",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for exp in EXPERIMENTS:
        p = sub.add_parser(exp, help=f"run the {exp} experiment")
        _add_common(p)
    pv = sub.add_parser("validate", help="check a configuration without running")
    _add_common(pv)
    pv.add_argument("experiment", nargs="?", help="experiment name (else from config file)")
    sub.add_parser("selftest", help="run the built-in invariant checks")

    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest()
        if args.command == "validate":
            config = _config_from_args(args, experiment=args.experiment)
            violations = validate(config)
            if violations:
                for line in violations:
                    print(f"violation: {line}")
            else:
                print("ok")
            return 0
        config = _config_from_args(args, experiment=args.command)
        report = run(config)
        print(json.dumps({"summary": report.summary, "csv_files": report.csv_paths}))
        return 0
    except ConfigError as err:
        print(json.dumps({"error": str(err)}), file=sys.stderr)
        return 2
    except (OSError, RuntimeError, ValueError) as err:
        print(json.dumps({"error": str(err)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

    nlchr run --config run.cfg --out out/
    nlchr kernel-report [--config run.cfg]
    nlchr study-epsilon --config run.cfg [--epsilons 1e-2 5e-3 ...]
    nlchr study-uniqueness --config run.cfg
    nlchr preset separation

Exit status is 0 when every requested check passed, 1 when a check failed,
2 for usage and configuration errors and 3 for numerical failures. Errors
print a single line ``error: <kind>: <message>`` on stderr.
"""

import argparse
import math
import os
import sys

from .config import parse_config, parse_text, to_text
from .diagnostics import balance_residuals, dependence_probe, write_csv
from .errors import ConfigError, NLCHError
from .kernel import KernelSpec, format_reports, kernel_property_report, refinement_change
from .outputs import OutputError, write_outputs
from .presets import PRESETS, Check, run_preset, standard_checks
from .solver import Simulation, epsilon_study, format_epsilon_table

EXIT_OK, EXIT_CHECKS, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
REFINEMENT_TOL = 0.10
SPREAD_TOL = 0.20


class UsageError(NLCHError):
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--config", help="flat 'section.key = value' run configuration")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--seed", type=int, help="random seed (overrides run.seed)")
    p.add_argument("-q", "--quiet", action="store_true", help="print only failures and errors")


def build_parser():
    parser = _Parser(prog="nlchr", description="Nonlocal Cahn-Hilliard-reaction solver")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    _common(sub.add_parser("run", help="run one simulation and write CSV, snapshots and manifest"))
    _common(sub.add_parser("kernel-report", help="empirical kernel hypothesis report"))
    p = sub.add_parser("study-epsilon", help="convergence table over decreasing epsilons")
    _common(p)
    p.add_argument("--epsilons", type=float, nargs="+", help="strictly decreasing epsilons")
    p = sub.add_parser("study-uniqueness", help="continuous-dependence probe table")
    _common(p)
    p.add_argument("--delta", type=float, help="perturbation size")
    p.add_argument("--directions", type=int, help="number of perturbation directions")
    p = sub.add_parser("preset", help="run a named acceptance scenario")
    _common(p)
    p.add_argument("name", choices=sorted(PRESETS))
    return parser


def _load(args):
    overrides = {}
    if args.out is not None:
        overrides["output.dir"] = args.out
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if args.config:
        return parse_config(args.config, overrides)
    return parse_text("", overrides=overrides)


def _out_dir(args, config):
    out = args.out if args.out is not None else config.out_dir
    os.makedirs(out, exist_ok=True)
    return out


def _write(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror}") from exc


def _finish(checks, out, args, stdout):
    text = "".join(c.line() + "\n" for c in checks)
    _write(os.path.join(out, "checks.txt"), text)
    for c in checks:
        if not args.quiet or not c.passed:
            print(c.line(), file=stdout)
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"checks failed: {len(failed)} of {len(checks)}", file=stdout)
        return EXIT_CHECKS
    return EXIT_OK


def cmd_run(args, stdout):
    config = _load(args)
    out = _out_dir(args, config)
    sim = Simulation(config.solver)
    fields = []
    every = config.snapshot_every
    n_steps = config.solver.n_steps

    def snap(record, state):
        if every and (state.step_index % every == 0 or state.step_index == n_steps):
            fields.append((state.step_index, state.t, state.u.copy()))

    _, records = sim.run([snap] if every else [])
    write_outputs(
        records,
        fields,
        {
            "csv": os.path.join(out, "diagnostics.csv"),
            "snapshot_dir": os.path.join(out, "snapshots"),
            "manifest": os.path.join(out, "manifest.txt"),
        },
        config,
    )
    _write(os.path.join(out, "config.txt"), to_text(config))
    checks = []
    if config.checks:
        checks = standard_checks("run", config.solver, records)
        if config.solver.reaction.kind == "none":
            bal = balance_residuals(records)
            checks.append(Check("energy increases above 1e-12", bal.energy_increases == 0,
                                bal.max_energy_increase, 1e-12))
    return _finish(checks, out, args, stdout)


DEFAULT_REPORT_KERNELS = (
    KernelSpec("gaussian", 1.0, 0.01, 1),
    KernelSpec("mollifier", 1.0, 0.05, 1),
    KernelSpec("newton", 1.0, 0.0, 1),
)


def cmd_kernel_report(args, stdout):
    config = _load(args)
    out = _out_dir(args, config)
    grid = config.solver.grid
    if args.config:
        specs = [config.solver.kernel]
    else:
        specs = [KernelSpec(s.kind, s.amplitude, s.scale, grid.dimension) for s in DEFAULT_REPORT_KERNELS]
    reports, checks = [], []
    for spec in specs:
        coarse = kernel_property_report(spec, grid, config.samples, config.solver.seed)
        fine = kernel_property_report(spec, grid.refined(), config.samples, config.solver.seed)
        reports += [coarse, fine]
        checks.append(Check(f"{spec.label}: symmetry exact", coarse.symmetry_defect == 0.0, coarse.symmetry_defect, 0.0))
        checks.append(Check(f"{spec.label}: K2 finite", math.isfinite(coarse.k2), coarse.k2, math.inf))
        if spec.kind != "newton":
            change = refinement_change(coarse, fine)
            for name in ("r2", "rinf"):
                checks.append(Check(f"{spec.label}: {name} change under refinement",
                                    change[name] < REFINEMENT_TOL, change[name], REFINEMENT_TOL))
    table = format_reports(reports)
    _write(os.path.join(out, "kernel_report.txt"), table)
    if not args.quiet:
        stdout.write(table)
    return _finish(checks, out, args, stdout)


def cmd_study_epsilon(args, stdout):
    config = _load(args)
    epsilons = tuple(args.epsilons) if args.epsilons else tuple(config.epsilons)
    if len(epsilons) < 2:
        raise UsageError("study-epsilon needs at least two epsilons")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise UsageError("epsilons must be strictly decreasing")
    out = _out_dir(args, config)
    rows = epsilon_study(config.solver, epsilons)
    table = format_epsilon_table(rows)
    _write(os.path.join(out, "epsilon_study.csv"), table)
    if not args.quiet:
        stdout.write(table)
    over = [r.max_overshoot for r in rows]
    gaps = [r.l2_to_next for r in rows[:-1]]
    worst_over = max([0.0] + [b - a for a, b in zip(over, over[1:])])
    worst_gap = max([0.0] + [b - a for a, b in zip(gaps, gaps[1:])])
    checks = [
        Check("overshoot non-increasing", worst_over <= 0.0, worst_over, 0.0),
        Check("L2 gaps non-increasing", worst_gap <= 0.0, worst_gap, 0.0),
    ] if config.checks else []
    return _finish(checks, out, args, stdout)


def cmd_study_uniqueness(args, stdout):
    config = _load(args)
    out = _out_dir(args, config)
    delta = args.delta if args.delta is not None else config.delta
    directions = args.directions if args.directions is not None else config.directions
    if directions < 1:
        raise UsageError("--directions must be positive")
    probe = dependence_probe(config.solver, delta, directions)
    text = probe.to_text()
    _write(os.path.join(out, "dependence.csv"), text)
    if not args.quiet:
        print(f"C_hat = {probe.c_hat:.6g}  spread = {probe.spread:.3g}", file=stdout)
    checks = [
        Check("C_hat finite", math.isfinite(probe.c_hat), probe.c_hat, math.inf),
        Check("C_hat spread across directions", probe.spread < SPREAD_TOL, probe.spread, SPREAD_TOL),
        Check("D(t) <= D(0) exp(C_hat t)", probe.certificate_ok, probe.c_hat, probe.c_hat),
    ] if config.checks else []
    return _finish(checks, out, args, stdout)


def _slug(label):
    return "".join(ch if ch.isalnum() or ch in "-." else "_" for ch in label).strip("_")


def cmd_preset(args, stdout):
    out = args.out if args.out is not None else os.path.join("out", args.name)
    if args.config:
        raise UsageError("presets are fixed scenarios and take no --config")
    os.makedirs(out, exist_ok=True)
    result = run_preset(args.name)
    for label, records in result.records.items():
        name = "diagnostics.csv" if len(result.records) == 1 else f"diagnostics_{_slug(label)}.csv"
        write_csv(os.path.join(out, name), records)
    for label, table in result.tables.items():
        _write(os.path.join(out, f"{_slug(label)}.csv"), table)
    return _finish(result.checks, out, args, stdout)


COMMANDS = {
    "run": cmd_run,
    "kernel-report": cmd_kernel_report,
    "study-epsilon": cmd_study_epsilon,
    "study-uniqueness": cmd_study_uniqueness,
    "preset": cmd_preset,
}


def _one_line(text):
    return " ".join(str(text).split())


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc.kind}: {_one_line(exc)}", file=stderr)
        return EXIT_USAGE
    except NLCHError as exc:
        code = EXIT_USAGE if isinstance(exc, ValueError) else EXIT_RUNTIME
        print(f"error: {exc.kind}: {_one_line(exc)}", file=stderr)
        return code
    except OSError as exc:
        print(f"error: io: {_one_line(exc)}", file=stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

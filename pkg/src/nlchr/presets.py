"""Named scenarios that exercise the solution properties end to end.

Each preset builds its configurations, runs them and evaluates a list of
checks. Every run also gets the mass-balance and mean-lower-bound checks.
"""

from dataclasses import dataclass, field
import math

from .diagnostics import (
    balance_residuals,
    dependence_probe,
    level_set_lower_bound,
    mean_lower_bound_check,
)
from .grid import Grid
from .kernel import KernelSpec
from .reaction import ReactionSpec, lipschitz_estimate
from .solver import InitialCondition, SolverConfig, Simulation, epsilon_study, format_epsilon_table

# phase-separating kernel: 2 * ||K||_1 = 2 * 20 * sqrt(0.01 pi) ~ 7.1 > f''(1/2) = 4
SEPARATING_KERNEL = KernelSpec("gaussian", 20.0, 0.01, 1)
MASS_TOL = 1e-10
MASS_TOL_CONSERVATIVE = 1e-12
MEAN_BOUND_RTOL = 1e-6


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={self.value:.6g} limit={self.limit:.6g} {self.detail}".rstrip()


@dataclass
class PresetResult:
    name: str
    config: SolverConfig
    checks: list = field(default_factory=list)
    records: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    final_states: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def summary(self):
        return "\n".join(c.line() for c in self.checks) + "\n"


def standard_checks(label, config, records):
    """Mass balance and mean lower bound for one run."""
    tol = MASS_TOL_CONSERVATIVE if config.reaction.kind == "none" else MASS_TOL
    balance = balance_residuals(records)
    L_hat = lipschitz_estimate(config.reaction, config.grid, (0.0, config.t_end))
    bound = mean_lower_bound_check(records, L_hat, MEAN_BOUND_RTOL)
    return [
        Check(f"{label}: mass residual", balance.max_mass_residual <= tol, balance.max_mass_residual, tol),
        Check(
            f"{label}: mean lower bound",
            bound.passed,
            bound.min_margin,
            -MEAN_BOUND_RTOL,
            f"L_hat={L_hat:.6g}",
        ),
    ]


def _run(result, label, config):
    state, records = Simulation(config).run()
    result.records[label] = records
    result.final_states[label] = state
    result.checks.extend(standard_checks(label, config, records))
    return state, records


def mass_decay(dt=1e-4, points=256):
    """g = -u from u0 = 0.6: the mean must follow 0.6 exp(-t)."""
    cfg = SolverConfig(
        grid=Grid((points,), (1.0,)),
        kernel=SEPARATING_KERNEL,
        reaction=ReactionSpec("polymer", sigma=1.0),
        initial=InitialCondition("constant", value=0.6),
        epsilon=1e-3,
        dt=dt,
        t_end=1.0,
        diagnostics_every=max(1, int(round(0.01 / dt))),
    )
    result = PresetResult("mass-decay", cfg)
    exact = 0.6 * math.exp(-1.0)
    errors = []
    for label, c in (("dt", cfg), ("dt/2", cfg.with_(dt=dt / 2, diagnostics_every=2 * cfg.diagnostics_every))):
        _, records = _run(result, label, c)
        errors.append(abs(records[-1].mass - exact))
    result.checks.append(Check("mean-decay error", errors[0] <= 5 * dt, errors[0], 5 * dt, "|mean(1) - 0.6/e|"))
    result.checks.append(
        Check("halving dt halves the error", errors[1] <= errors[0] / 2, errors[1], errors[0] / 2)
    )
    return result


def separation(points=256, t_end=1.0, t0=0.1):
    """Clamped tanh interface with logistic growth: u stays in [k, 1 - k] after t0."""
    cfg = SolverConfig(
        grid=Grid((points,), (1.0,)),
        kernel=SEPARATING_KERNEL,
        reaction=ReactionSpec("logistic", alpha=1.0),
        initial=InitialCondition("tanh", center=0.5, width=0.02, floor=0.01, ceiling=0.99),
        epsilon=1e-3,
        dt=1e-4,
        t_end=t_end,
        diagnostics_every=100,
    )
    result = PresetResult("separation", cfg)
    stats = {}
    for label, c in (("n", cfg), ("2n", cfg.with_(grid=cfg.grid.refined()))):
        _, records = _run(result, label, c)
        late = [r for r in records if r.t >= t0 - 1e-12]
        floor = min(min(r.min_u, 1.0 - r.max_u) for r in late)
        minf = max(r.Minf for r in late)
        stats[label] = (floor, minf)
        lo = min(r.min_u for r in late)
        hi = max(r.max_u for r in late)
        result.checks.append(Check(f"{label}: min u after t0", lo >= 1e-3, lo, 1e-3))
        result.checks.append(Check(f"{label}: max u after t0", hi <= 1 - 1e-3, hi, 1 - 1e-3))
        result.checks.append(Check(f"{label}: Minf bounded after t0", minf <= math.log(1e3), minf, math.log(1e3)))
        holder = max(
            max(r.M1 - math.sqrt(c.grid.volume) * r.M2, math.sqrt(c.grid.volume) * r.M2 - c.grid.volume * r.Minf)
            for r in records
        )
        result.checks.append(Check(f"{label}: Holder chain M1 <= |O|^1/2 M2 <= |O| Minf", holder <= 1e-12, holder, 1e-12))
        b0 = 0.5 * records[0].mass
        slack = min(
            r.level_set_measure - level_set_lower_bound(r.mass, c.grid.volume, b0, r.max_u)
            for r in records
        )
        result.checks.append(Check(f"{label}: level-set measure bound", slack >= -1e-12, slack, -1e-12))
    floor_change = abs(stats["2n"][0] - stats["n"][0]) / stats["n"][0]
    result.checks.append(Check("separation floor stable under refinement", floor_change < 0.5, floor_change, 0.5))
    minf_change = abs(stats["2n"][1] - stats["n"][1]) / stats["n"][1]
    result.checks.append(Check("Minf stable under refinement", minf_change < 0.5, minf_change, 0.5))
    return result


def energy_dissipation(points=256, t_end=1.0):
    """No reaction, noisy data: the regularized Lyapunov functional never increases."""
    cfg = SolverConfig(
        grid=Grid((points,), (1.0,)),
        kernel=SEPARATING_KERNEL,
        reaction=ReactionSpec("none"),
        initial=InitialCondition("noise", lo=0.3, hi=0.7),
        epsilon=1e-3,
        dt=1e-4,
        t_end=t_end,
        diagnostics_every=10,
        seed=1,
    )
    result = PresetResult("energy-dissipation", cfg)
    _, records = _run(result, "run", cfg)
    bal = balance_residuals(records, energy_tol=1e-12)
    result.checks.append(
        Check("energy increases above 1e-12", bal.energy_increases == 0, bal.max_energy_increase, 1e-12,
              f"count={bal.energy_increases}")
    )
    return result


EPSILONS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def epsilon_convergence(points=256, t_end=0.5, epsilons=EPSILONS):
    """Overshoot and successive final-state gaps shrink as epsilon decreases."""
    cfg = SolverConfig(
        grid=Grid((points,), (1.0,)),
        kernel=SEPARATING_KERNEL,
        reaction=ReactionSpec("logistic", alpha=1.0),
        initial=InitialCondition("tanh", center=0.5, width=0.02, floor=0.0, ceiling=1.0),
        epsilon=epsilons[0],
        dt=1e-4,
        t_end=t_end,
        diagnostics_every=50,
    )
    result = PresetResult("epsilon-convergence", cfg)
    rows = epsilon_study(cfg, epsilons, keep_records=True)
    for row in rows:
        label = f"eps={row.epsilon:g}"
        result.records[label] = row.records
        result.checks.extend(standard_checks(label, cfg.with_(epsilon=row.epsilon), row.records))
    result.tables["epsilon"] = format_epsilon_table(rows)
    over = [r.max_overshoot for r in rows]
    gaps = [r.l2_to_next for r in rows[:-1]]
    worst_over = max([0.0] + [b - a for a, b in zip(over, over[1:])])
    worst_gap = max([0.0] + [b - a for a, b in zip(gaps, gaps[1:])])
    result.checks.append(Check("overshoot non-increasing", worst_over <= 0.0, worst_over, 0.0))
    result.checks.append(Check("L2 gaps non-increasing", worst_gap <= 0.0, worst_gap, 0.0))
    return result


def continuous_dependence(points=256, t_end=0.5, delta=1e-3, directions=4):
    """Gap growth between perturbed runs is certified by one exponential rate."""
    cfg = SolverConfig(
        grid=Grid((points,), (1.0,)),
        kernel=SEPARATING_KERNEL,
        reaction=ReactionSpec("logistic", alpha=1.0),
        initial=InitialCondition("constant", value=0.4),
        epsilon=1e-3,
        dt=1e-4,
        t_end=t_end,
        diagnostics_every=100,
    )
    result = PresetResult("continuous-dependence", cfg)
    _run(result, "base", cfg)
    probes = {}
    for label, c in (("dt", cfg), ("dt/2", cfg.with_(dt=cfg.dt / 2, diagnostics_every=2 * cfg.diagnostics_every))):
        probe = dependence_probe(c, delta, directions)
        probes[label] = probe
        result.tables[f"dependence {label}"] = probe.to_text()
        result.checks.append(Check(f"{label}: C_hat finite", math.isfinite(probe.c_hat), probe.c_hat, math.inf))
        result.checks.append(Check(f"{label}: C_hat spread across directions", probe.spread < 0.2, probe.spread, 0.2))
        result.checks.append(Check(f"{label}: D(t) <= D(0) exp(C_hat t)", probe.certificate_ok, probe.c_hat, probe.c_hat))
    a, b = probes["dt"].c_hat, probes["dt/2"].c_hat
    change = abs(a - b) / max(a, b) if max(a, b) > 0 else 0.0
    result.checks.append(Check("C_hat stable under dt halving", change < 0.2, change, 0.2))
    return result


PRESETS = {
    "mass-decay": mass_decay,
    "separation": separation,
    "energy-dissipation": energy_dissipation,
    "epsilon-convergence": epsilon_convergence,
    "continuous-dependence": continuous_dependence,
}


def run_preset(name, **kwargs):
    try:
        fn = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return fn(**kwargs)

"""Measurements of the solution properties: mass balance, energies, bounds,
separation metrics and the continuous-dependence probe."""

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
import csv
import math
import os

import numpy as np

from .errors import DomainError
from .kernel import boundary_weight, convolve, random_sign_fields
from .potential import f_eps

FLOOR = 1e-14
CSV_FIELDS = (
    "t", "mass", "min_u", "max_u", "overshoot", "energy", "energy_eps",
    "mass_residual", "M1", "M2", "Minf", "level_set_measure",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    min_u: float
    max_u: float
    overshoot: float
    energy: float
    energy_eps: float
    mass_residual: float
    M1: float
    M2: float
    Minf: float
    level_set_measure: float

    def as_row(self):
        return [f"{getattr(self, name):.17g}" for name in CSV_FIELDS]


def _floored(u):
    return np.clip(u, FLOOR, 1.0 - FLOOR)


def _nonlocal_part(u, kernel, k=None):
    """sum [k u - u (K * u)] dV = 1/2 double integral of K (u(x) - u(y))^2 + int k u (1 - u)."""
    if k is None:
        k = boundary_weight(kernel)
    return kernel.grid.integrate(k * u - u * convolve(kernel, u))


def energy(u, kernel, k=None):
    """Free energy with the logarithmic potential, evaluated on u floored to [1e-14, 1 - 1e-14]."""
    u = kernel.grid.check(u)
    v = _floored(u)
    f = v * np.log(v) + (1.0 - v) * np.log1p(-v)
    return kernel.grid.integrate(f) + _nonlocal_part(u, kernel, k)


def energy_eps(u, kernel, family, k=None):
    """Regularized Lyapunov functional sum [f_eps(u) + (K * (1 - u)) u] dV."""
    if family.degenerate:
        return math.nan
    u = kernel.grid.check(u)
    return kernel.grid.integrate(f_eps(family, u)) + _nonlocal_part(u, kernel, k)


def separation_metrics(grid, u, b0):
    """``(min_u, max_u, M1, M2, Minf, level_set_measure)`` with M_r = ||ln u||_{L^r}."""
    u = grid.check(u)
    logs = np.abs(np.log(_floored(u)))
    cv = grid.cell_volume
    m1 = float(np.sum(logs) * cv)
    m2 = math.sqrt(float(np.sum(logs * logs)) * cv)
    minf = float(np.max(logs))
    level = cv * int(np.count_nonzero(u >= b0))
    return float(np.min(u)), float(np.max(u)), m1, m2, minf, level


def make_record(sim, state):
    grid, kernel = sim.grid, sim.kernel
    if sim.boundary_weight is None:
        sim.boundary_weight = boundary_weight(kernel)
    k = sim.boundary_weight
    u = state.u
    mass = grid.mean(u)
    lo, hi, m1, m2, minf, level = separation_metrics(grid, u, sim.b0)
    return DiagnosticsRecord(
        t=state.t,
        mass=mass,
        min_u=lo,
        max_u=hi,
        overshoot=max(-lo, hi - 1.0, 0.0),
        energy=energy(u, kernel, k),
        energy_eps=energy_eps(u, kernel, sim.family, k),
        mass_residual=mass - sim.mass0 - state.reaction_integral,
        M1=m1,
        M2=m2,
        Minf=minf,
        level_set_measure=level,
    )


@dataclass
class BalanceReport:
    max_mass_residual: float
    energy_increases: int
    max_energy_increase: float

    def passed(self, mass_tol=1e-10, energy_tol=1e-12, check_energy=False):
        ok = self.max_mass_residual <= mass_tol
        if check_energy:
            ok = ok and self.max_energy_increase <= energy_tol
        return ok


def balance_residuals(records, energy_tol=1e-12, field="energy_eps"):
    """Largest |mass residual| and the count/size of energy increases above ``energy_tol``."""
    if len(records) < 2:
        raise DomainError("need at least two records")
    max_res = max(abs(r.mass_residual) for r in records)
    series = [getattr(r, field) for r in records]
    jumps = [b - a for a, b in zip(series, series[1:]) if math.isfinite(a) and math.isfinite(b)]
    increases = [d for d in jumps if d > energy_tol]
    return BalanceReport(max_res, len(increases), max([0.0] + jumps))


@dataclass
class MeanBoundResult:
    passed: bool
    min_margin: float  # min over records of mean(t) / (mean(0) exp(-L t)) - 1


def mean_lower_bound_check(records, L_hat, rtol=1e-6):
    """Check mean(t) >= mean(0) exp(-L t) (1 - rtol) at every record."""
    m0 = records[0].mass
    t0 = records[0].t
    margins = [r.mass / (m0 * math.exp(-L_hat * (r.t - t0))) - 1.0 for r in records]
    worst = min(margins)
    return MeanBoundResult(worst >= -rtol, worst)


def level_set_lower_bound(mass, volume, b0, max_u):
    """Lower bound on |{u >= b0}| implied by the mean (counting argument).

    mean |Omega| = int u <= max_u |Omega_1| + b0 (|Omega| - |Omega_1|), so
    |Omega_1| >= (mean - b0) |Omega| / (max_u - b0) whenever mean > b0.
    With b0 = mean / 2 and u <= 1 this is at least mean |Omega| / 2.
    """
    if mass <= b0 or max_u <= b0:
        return 0.0
    return (mass - b0) * volume / (max_u - b0)


@dataclass
class DependenceResult:
    c_hat: float
    per_direction: list
    times: list
    gaps: list  # one list of D(t) per direction
    certificate_ok: bool

    @property
    def spread(self):
        vals = self.per_direction
        hi, lo = max(vals), min(vals)
        return 0.0 if hi == 0.0 else (hi - lo) / hi

    def to_text(self):
        lines = ["direction,t,D,bound"]
        for d, gaps in enumerate(self.gaps):
            c = self.per_direction[d]
            for t, gap in zip(self.times, gaps):
                lines.append(f"{d},{t:.17g},{gap:.17g},{gaps[0] * math.exp(c * t):.17g}")
        lines.append(f"# C_hat,{self.c_hat:.17g}")
        lines.append(f"# spread,{self.spread:.17g}")
        return "\n".join(lines) + "\n"


def fit_growth_rate(times, gaps):
    """Smallest C with D(t) <= D(0) exp(C t) at every sample (max-slope certificate)."""
    d0 = gaps[0]
    if d0 == 0.0:
        return 0.0
    slopes = [max(0.0, math.log(d / d0)) / t for t, d in zip(times, gaps) if t > 0.0 and d > 0.0]
    return max([0.0] + slopes)


def dependence_probe(config, delta, directions=4, modes=4):
    """Pairs of runs from u0 and u0 + delta * p_k for seeded directions p_k.

    Directions share one amplitude envelope over the cosine modes and differ
    only in their signs (see ``random_sign_fields``), so the fitted rates
    reflect the dynamics rather than how much of a lucky draw falls on the
    fastest-growing mode.
    """
    from .solver import Simulation

    base = Simulation(config)
    grid = base.grid
    u0 = base.u0
    perturb = random_sign_fields(grid, directions, seed=config.seed + 1, modes=modes)
    ref_state = base.initial_state()
    ref_records = [ref_state.u.copy()]
    times = [0.0]
    for n in range(1, config.n_steps + 1):
        ref_state = base.step(ref_state)
        if n % config.diagnostics_every == 0 or n == config.n_steps:
            ref_records.append(ref_state.u.copy())
            times.append(ref_state.t)
    def probe(p):
        p = p / float(np.max(np.abs(p)))
        u1 = u0 + delta * p
        sim = Simulation(config, initial=u1)
        state = sim.initial_state()
        gaps = [math.sqrt(grid.inner(u1 - u0, u1 - u0))]
        k = 1
        for n in range(1, config.n_steps + 1):
            state = sim.step(state)
            if n % config.diagnostics_every == 0 or n == config.n_steps:
                diff = state.u - ref_records[k]
                gaps.append(math.sqrt(grid.inner(diff, diff)))
                k += 1
        return gaps

    for p in perturb:
        u1 = u0 + delta * p / float(np.max(np.abs(p)))
        if np.min(u1) < 0.0 or np.max(u1) > 1.0:
            raise DomainError("perturbed initial data leave [0, 1]; reduce delta")
    # the perturbed runs are independent; results are collected in direction order
    with ThreadPoolExecutor(max_workers=min(len(perturb), os.cpu_count() or 1)) as pool:
        all_gaps = list(pool.map(probe, perturb))
    rates = [fit_growth_rate(times, gaps) for gaps in all_gaps]
    c_hat = max(rates)
    ok = all(
        d <= gaps[0] * math.exp(c_hat * t) * (1.0 + 1e-9)
        for gaps in all_gaps
        for t, d in zip(times, gaps)
    )
    return DependenceResult(c_hat, rates, times, all_gaps, ok)


def write_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow(r.as_row())


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_FIELDS:
            raise DomainError(f"{path}: unexpected header {header}")
        return [DiagnosticsRecord(*(float(x) for x in row)) for row in reader]


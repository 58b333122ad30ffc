"""IMEX time stepping for the regularized nonlocal Cahn-Hilliard equation.

    u_t = div(mu_eps(u) grad v) + g1(x, t, u),   v = f_eps'(u) + K * (1 - 2u).

Because mu_eps f_eps'' = 1 + 2a on all reals, the flux splits into
(1 + 2a) grad u + mu_eps grad w. One step is

    w     = K * (1 - 2 u^n)
    r     = u^n + dt [div(mu_eps(u^n) grad w) + g1(t^n, u^n)]
    u^n+1 = (I - dt (1 + 2a) Lap)^-1 r

The diffusion is implicit, the nonlocal drift and reaction explicit. The state
is never clamped; excursions outside [0, 1] are measured as overshoot.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math
import os

import numpy as np

from ._backend import kernels
from .errors import BlowUpError, DomainError, HypothesisError, NLCHError, StepError
from .grid import Grid, helmholtz_solve, read_snapshot
from .kernel import KernelSpec, build_kernel
from .potential import make_epsilon_family
from .reaction import ReactionSpec, eval_reaction, validate_reaction
from . import diagnostics

BLOW_UP = 10.0
INITIAL_KINDS = ("constant", "noise", "tanh", "checkerboard", "snapshot")


@dataclass(frozen=True)
class InitialCondition:
    """Initial data u_0.

    constant: ``value``; noise: uniform in [lo, hi] from the run seed;
    tanh: interface at ``center`` (1D coordinate, or disk radius about the
    domain centre in 2D) with half-width ``width``, clamped to [floor, ceiling];
    checkerboard: ``blocks`` per axis alternating lo/hi; snapshot: ``path``.
    """

    kind: str = "constant"
    value: float = 0.5
    lo: float = 0.4
    hi: float = 0.6
    center: float = 0.5
    width: float = 0.05
    floor: float = 0.0
    ceiling: float = 1.0
    blocks: int = 4
    path: str = ""

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise DomainError(f"unknown initial kind {self.kind!r}; expected one of {INITIAL_KINDS}")

    def sample(self, grid, seed=0):
        k = self.kind
        if k == "constant":
            return np.full(grid.shape, float(self.value))
        if k == "noise":
            rng = np.random.default_rng(seed)
            return rng.uniform(self.lo, self.hi, grid.shape)
        if k == "tanh":
            coords = grid.coordinates()
            if grid.dimension == 1:
                u = 0.5 * (1.0 + np.tanh((coords[0] - self.center) / self.width))
            else:
                r = np.sqrt(sum((x - e / 2.0) ** 2 for x, e in zip(coords, grid.extent)))
                u = 0.5 * (1.0 - np.tanh((r - self.center) / self.width))
            return np.clip(u, self.floor, self.ceiling)
        if k == "checkerboard":
            idx = [np.floor(x / e * self.blocks).astype(int) for x, e in zip(grid.coordinates(), grid.extent)]
            parity = sum(idx) % 2
            return np.where(parity == 0, self.lo, self.hi).astype(float)
        snap_grid, values, _ = read_snapshot(self.path, grid.boundary)
        if snap_grid.shape != grid.shape:
            raise DomainError(f"snapshot {self.path} has shape {snap_grid.shape}, grid is {grid.shape}")
        return values


@dataclass(frozen=True)
class SolverConfig:
    grid: Grid = field(default_factory=lambda: Grid((256,), (1.0,)))
    kernel: KernelSpec = field(default_factory=KernelSpec)
    reaction: ReactionSpec = field(default_factory=ReactionSpec)
    initial: InitialCondition = field(default_factory=InitialCondition)
    epsilon: float = 1e-3
    dt: float = 1e-4
    t_end: float = 0.1
    diagnostics_every: int = 100
    seed: int = 0
    level_threshold: float = None  # b0; defaults to half the initial mean

    @property
    def n_steps(self):
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))

    def with_(self, **changes):
        return replace(self, **changes)


def validate_config(config):
    """Run every hypothesis validator; raise HypothesisError or DomainError on failure.

    Returns the initial field.
    """
    if not config.dt > 0.0:
        raise DomainError(f"dt must be positive, got {config.dt}")
    if not config.t_end >= config.dt:
        raise DomainError(f"t_end ({config.t_end}) must be at least dt ({config.dt})")
    if config.diagnostics_every < 1:
        raise DomainError("diagnostics_every must be a positive integer")
    make_epsilon_family(config.epsilon)
    build_kernel(config.kernel, config.grid)
    u0 = config.grid.check_finite(config.initial.sample(config.grid, config.seed), "initial data")
    if np.min(u0) < 0.0 or np.max(u0) > 1.0:
        raise HypothesisError("U02", f"initial data must satisfy 0 <= u0 <= 1 (range [{np.min(u0):.6g}, {np.max(u0):.6g}])")
    mean0 = config.grid.mean(u0)
    if not 0.0 < mean0 < 1.0:
        raise HypothesisError("U03", f"initial mean is {mean0:.6g}; need 0 < mean(u0) < 1")
    report = validate_reaction(config.reaction, config.grid, (0.0, config.t_end))
    g3 = report.get("G3")
    if not g3.passed:
        raise HypothesisError("G3", f"need g(x,t,0) >= 0 >= g(x,t,1); worst value {g3.value:.6g}")
    return u0


@dataclass
class SimState:
    t: float
    u: np.ndarray
    step_index: int = 0
    w: np.ndarray = None
    reaction_integral: float = 0.0  # sum over steps of dt * mean(g1)
    max_overshoot: float = 0.0

    def copy(self):
        return replace(self, u=self.u.copy(), w=None if self.w is None else self.w.copy())


def overshoot(u):
    return max(-float(np.min(u)), float(np.max(u)) - 1.0, 0.0)


class Simulation:
    """A validated configuration with its precomputed operators."""

    def __init__(self, config, validate=True, initial=None):
        self.config = config
        self.grid = config.grid
        self.family = make_epsilon_family(config.epsilon)
        self.kernel = build_kernel(config.kernel, config.grid)
        self.boundary_weight = None
        if initial is not None:
            self.u0 = self.grid.check_finite(initial, "initial data")
        elif validate:
            self.u0 = validate_config(config)
        else:
            self.u0 = config.initial.sample(config.grid, config.seed)
        self.mass0 = self.grid.mean(self.u0)
        self.b0 = config.level_threshold if config.level_threshold is not None else 0.5 * self.mass0

    def initial_state(self):
        u = self.u0.copy()
        return SimState(t=0.0, u=u, step_index=0, max_overshoot=overshoot(u))

    def step(self, state):
        cfg, grid, fam = self.config, self.grid, self.family
        u = state.u
        w = self.kernel(1.0 - 2.0 * u)
        g = eval_reaction(cfg.reaction, u, state.t, clamped=True)
        r = kernels.explicit_update(u, w, g, fam.a_eps, fam.epsilon, cfg.dt, grid.spacing, grid.periodic)
        u_new = helmholtz_solve(grid, r, cfg.dt * fam.one_plus_2a)
        if not np.all(np.isfinite(u_new)) or float(np.max(np.abs(u_new))) > BLOW_UP:
            raise BlowUpError(f"|u| exceeded {BLOW_UP} at t = {state.t + cfg.dt:.6g}")
        n = state.step_index + 1
        return SimState(
            t=n * cfg.dt,
            u=u_new,
            step_index=n,
            w=w,
            reaction_integral=state.reaction_integral + cfg.dt * grid.mean(np.broadcast_to(g, u.shape)),
            max_overshoot=max(state.max_overshoot, overshoot(u_new)),
        )

    def record(self, state):
        return diagnostics.make_record(self, state)

    def run(self, sinks=()):
        cfg = self.config
        state = self.initial_state()
        records = [self.record(state)]
        for sink in sinks:
            sink(records[-1], state)
        n_steps = cfg.n_steps
        for n in range(1, n_steps + 1):
            try:
                state = self.step(state)
            except NLCHError as exc:
                raise StepError(n, exc) from exc
            if n % cfg.diagnostics_every == 0 or n == n_steps:
                records.append(self.record(state))
                for sink in sinks:
                    sink(records[-1], state)
        return state, records


def step(state, config):
    """One IMEX step; ``config`` is a SolverConfig or a prepared Simulation."""
    sim = config if isinstance(config, Simulation) else Simulation(config, validate=False)
    return sim.step(state)


def run(config, sinks=()):
    """Integrate to t_end; returns ``(final_state, records)``."""
    return Simulation(config).run(sinks)


@dataclass
class EpsilonRow:
    epsilon: float
    l2_to_next: float
    max_overshoot: float
    records: list = field(default=None, repr=False)


def epsilon_study(base, epsilons, keep_records=False):
    """Final-state L2 gaps between successive epsilons and the overshoot of each run.

    With ``keep_records`` each row also carries the diagnostics of its run.
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 2:
        raise DomainError("epsilon study needs at least two epsilons")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("epsilons must be strictly decreasing")
    # independent runs; map returns them in epsilon order
    with ThreadPoolExecutor(max_workers=min(len(eps), os.cpu_count() or 1)) as pool:
        results = list(pool.map(lambda e: run(base.with_(epsilon=e)), eps))
    finals = [state.u for state, _ in results]
    overs = [state.max_overshoot for state, _ in results]
    histories = [records if keep_records else None for _, records in results]
    grid = base.grid
    rows = []
    for i, e in enumerate(eps):
        gap = math.nan
        if i + 1 < len(eps):
            gap = math.sqrt(grid.inner(finals[i] - finals[i + 1], finals[i] - finals[i + 1]))
        rows.append(EpsilonRow(e, gap, overs[i], histories[i]))
    return rows


def format_epsilon_table(rows):
    lines = ["epsilon,l2_to_next,max_overshoot"]
    for r in rows:
        lines.append(f"{r.epsilon:.17g},{r.l2_to_next:.17g},{r.max_overshoot:.17g}")
    return "\n".join(lines) + "\n"

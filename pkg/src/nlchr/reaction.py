"""Reaction laws g(x, t, s), their clamped extension and hypothesis audits.

Coefficients (alpha, lam, h, sigma) are scalars or arrays of the grid shape;
evaluation broadcasts them against ``s`` cell by cell. Time dependence is a
scalar multiplier ``time_factor(t)`` applied to the whole law.

The clamped extension freezes the endpoint values:
g1(s) = g(0) for s <= 0, g(s) on [0, 1], g(1) for s >= 1.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError

KINDS = ("none", "logistic", "inpainting", "polymer", "cubic", "user_table")
LATTICE_STEP = 1e-3


@dataclass(frozen=True)
class ReactionSpec:
    kind: str = "none"
    alpha: object = 1.0
    lam: object = 1.0
    h: object = 0.5
    sigma: object = 1.0
    sign: int = 1
    table_s: tuple = ()
    table_g: tuple = ()
    declared_lipschitz: float = None
    time_factor: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown reaction kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "cubic" and self.sign not in (1, -1):
            raise DomainError("cubic reaction sign must be +1 or -1")
        if self.kind == "user_table":
            s = np.asarray(self.table_s, dtype=float)
            if s.size < 2 or s.shape != np.shape(self.table_g) or np.any(np.diff(s) <= 0):
                raise DomainError("user_table needs increasing s nodes and matching g values")
            if s[0] > 0.0 or s[-1] < 1.0:
                raise DomainError("user_table nodes must cover [0, 1]")
        if self.declared_lipschitz is not None and not self.declared_lipschitz > 0:
            raise DomainError("declared Lipschitz constant must be positive")

    def _scale(self, t):
        return 1.0 if self.time_factor is None else float(self.time_factor(t))

    def raw(self, s, t=0.0):
        """g(x, t, s) without any domain check; coefficients broadcast against s."""
        s = np.asarray(s, dtype=float)
        k = self.kind
        if k == "none":
            g = np.zeros_like(s)
        elif k == "logistic":
            g = np.asarray(self.alpha, dtype=float) * s * (1.0 - s)
        elif k == "inpainting":
            g = np.asarray(self.lam, dtype=float) * (np.asarray(self.h, dtype=float) - s)
        elif k == "polymer":
            g = -np.asarray(self.sigma, dtype=float) * s
        elif k == "cubic":
            g = self.sign * (s**3 - s)
        else:
            g = np.interp(s, self.table_s, self.table_g)
        return self._scale(t) * g


def eval_reaction(spec, s, t=0.0, clamped=True):
    """g (clamped=False, requires s in [0, 1]) or its plateau extension g1."""
    s = np.asarray(s, dtype=float)
    if clamped:
        g = spec.raw(np.clip(s, 0.0, 1.0), t)
    else:
        if np.any(s < 0.0) or np.any(s > 1.0):
            raise DomainError("unclamped reaction needs s in [0, 1]")
        g = spec.raw(s, t)
    return g[()] if g.ndim == 0 else g


def _coefficient_shape(spec, grid):
    spatial = any(np.ndim(c) > 0 for c in (spec.alpha, spec.lam, spec.h, spec.sigma))
    return grid.shape if (grid is not None and spatial) else ()


def _time_samples(spec, t_range, count=11):
    t0, t1 = t_range
    if spec.time_factor is None or t1 <= t0:
        return np.array([float(t0)])
    return np.linspace(t0, t1, count)


def lipschitz_estimate(spec, grid=None, t_range=(0.0, 1.0), s_range=(0.0, 1.0), clamped=True):
    """Largest difference quotient |dg/ds| over a 1e-3 s-lattice, all cells and sampled times.

    Returns max(estimate, declared_lipschitz) when a declared constant is set.
    """
    n = int(round((s_range[1] - s_range[0]) / LATTICE_STEP))
    lattice = np.linspace(s_range[0], s_range[1], n + 1)
    shape = _coefficient_shape(spec, grid)
    best = 0.0
    for t in _time_samples(spec, t_range):
        s = lattice.reshape((-1,) + (1,) * len(shape)) + np.zeros(shape)
        g = eval_reaction(spec, s, t, clamped=clamped)
        q = np.abs(np.diff(g, axis=0)) / np.diff(lattice).reshape((-1,) + (1,) * len(shape))
        best = max(best, float(np.max(q)))
    if spec.declared_lipschitz is not None:
        best = max(best, float(spec.declared_lipschitz))
    return best


@dataclass
class HypothesisCheck:
    tag: str
    passed: bool
    value: float
    detail: str = ""


@dataclass
class ReactionReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def get(self, tag):
        for c in self.checks:
            if c.tag == tag:
                return c
        raise KeyError(tag)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_text(self):
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{c.tag:<4} {status}  {c.value:.6e}  {c.detail}".rstrip())
        return "\n".join(lines) + "\n"


def validate_reaction(spec, grid=None, t_range=(0.0, 1.0)):
    """Per-hypothesis report; never raises for a violated hypothesis."""
    shape = _coefficient_shape(spec, grid)
    times = _time_samples(spec, t_range)
    zeros, ones = np.zeros(shape), np.ones(shape)
    lattice = np.linspace(0.0, 1.0, int(round(1.0 / LATTICE_STEP)) + 1)
    checks = []

    finite = True
    bound = 0.0
    worst_sign = math.inf
    for t in times:
        s = lattice.reshape((-1,) + (1,) * len(shape)) + zeros
        g = eval_reaction(spec, s, t, clamped=False)
        finite &= bool(np.all(np.isfinite(g)))
        bound = max(bound, float(np.max(np.abs(g))))
        g0 = np.asarray(eval_reaction(spec, zeros, t, clamped=False))
        g1 = np.asarray(eval_reaction(spec, ones, t, clamped=False))
        worst_sign = min(worst_sign, float(np.min(g0)), float(-np.max(g1)))
    checks.append(HypothesisCheck("G1", finite, 0.0 if finite else math.nan, "finite on grid samples"))

    lip_s = lipschitz_estimate(spec, grid, t_range)
    checks.append(HypothesisCheck("G2", math.isfinite(lip_s), lip_s, "Lipschitz in s"))
    checks.append(
        HypothesisCheck("G3", worst_sign >= 0.0, worst_sign, "min over samples of g(0) and -g(1)")
    )

    lip_t = 0.0
    if len(times) > 1:
        s = lattice.reshape((-1,) + (1,) * len(shape)) + zeros
        vals = np.stack([eval_reaction(spec, s, t, clamped=False) for t in times])
        lip_t = float(np.max(np.abs(np.diff(vals, axis=0)) / np.diff(times).reshape((-1,) + (1,) * vals[0].ndim)))
    checks.append(HypothesisCheck("G4", math.isfinite(lip_t), lip_t, "Lipschitz in t"))
    checks.append(HypothesisCheck("GC", math.isfinite(bound), bound, "sup |g| on [0, 1]"))
    return ReactionReport(checks)

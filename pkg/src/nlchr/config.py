"""Flat ``section.key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Lists (``study.epsilons``,
``reaction.table_s``) are whitespace separated. ``to_text`` writes the
normalized form with every key filled in; it parses back to an equal
``RunConfig``.
"""

from dataclasses import dataclass, field
import os

from .errors import ConfigError
from .grid import Grid
from .kernel import KernelSpec
from .reaction import ReactionSpec
from .solver import InitialCondition, SolverConfig, validate_config


def _float(v):
    return float(v)


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _floats(v):
    return tuple(float(x) for x in v.replace(",", " ").split())


def _ints(v):
    return tuple(_int(x) for x in v.replace(",", " ").split())


def _bool(v):
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{v!r} is not a boolean")


def _optional_float(v):
    return None if v.strip().lower() in ("", "none") else float(v)


def _str(v):
    return v.strip()


# key -> (parser, default)
SCHEMA = {
    "grid.dimension": (_int, 1),
    "grid.points": (_ints, (256,)),
    "grid.extent": (_floats, (1.0,)),
    "grid.boundary": (_str, "zero_flux"),
    "model.epsilon": (_float, 1e-3),
    "time.dt": (_float, 1e-4),
    "time.t_end": (_float, 0.1),
    "time.diagnostics_every": (_int, 100),
    "kernel.kind": (_str, "gaussian"),
    "kernel.amplitude": (_float, 1.0),
    "kernel.scale": (_float, 0.01),
    "reaction.kind": (_str, "none"),
    "reaction.alpha": (_float, 1.0),
    "reaction.lambda": (_float, 1.0),
    "reaction.h": (_float, 0.5),
    "reaction.sigma": (_float, 1.0),
    "reaction.sign": (_int, 1),
    "reaction.table_s": (_floats, ()),
    "reaction.table_g": (_floats, ()),
    "reaction.lipschitz": (_optional_float, None),
    "initial.kind": (_str, "constant"),
    "initial.value": (_float, 0.5),
    "initial.lo": (_float, 0.4),
    "initial.hi": (_float, 0.6),
    "initial.center": (_float, 0.5),
    "initial.width": (_float, 0.05),
    "initial.floor": (_float, 0.0),
    "initial.ceiling": (_float, 1.0),
    "initial.blocks": (_int, 4),
    "initial.path": (_str, ""),
    "diagnostics.level_threshold": (_optional_float, None),
    "run.seed": (_int, 0),
    "run.preset": (_str, ""),
    "output.dir": (_str, "out"),
    "output.snapshot_every": (_int, 0),
    "report.samples": (_int, 64),
    "report.checks": (_bool, True),
    "study.epsilons": (_floats, (1e-2, 5e-3, 2.5e-3, 1.25e-3)),
    "study.delta": (_float, 1e-3),
    "study.directions": (_int, 4),
}


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: str = "out"
    snapshot_every: int = 0
    preset: str = ""
    samples: int = 64
    checks: bool = True
    epsilons: tuple = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
    delta: float = 1e-3
    directions: int = 4


def _build(values):
    dim = values["grid.dimension"]
    points = values["grid.points"]
    extent = values["grid.extent"]
    if len(points) == 1:
        points = points * dim
    if len(extent) == 1:
        extent = extent * dim
    grid = Grid(points, extent, values["grid.boundary"])
    kernel = KernelSpec(values["kernel.kind"], values["kernel.amplitude"], values["kernel.scale"], dim)
    reaction = ReactionSpec(
        kind=values["reaction.kind"],
        alpha=values["reaction.alpha"],
        lam=values["reaction.lambda"],
        h=values["reaction.h"],
        sigma=values["reaction.sigma"],
        sign=values["reaction.sign"],
        table_s=values["reaction.table_s"],
        table_g=values["reaction.table_g"],
        declared_lipschitz=values["reaction.lipschitz"],
    )
    initial = InitialCondition(
        kind=values["initial.kind"],
        value=values["initial.value"],
        lo=values["initial.lo"],
        hi=values["initial.hi"],
        center=values["initial.center"],
        width=values["initial.width"],
        floor=values["initial.floor"],
        ceiling=values["initial.ceiling"],
        blocks=values["initial.blocks"],
        path=values["initial.path"],
    )
    solver = SolverConfig(
        grid=grid,
        kernel=kernel,
        reaction=reaction,
        initial=initial,
        epsilon=values["model.epsilon"],
        dt=values["time.dt"],
        t_end=values["time.t_end"],
        diagnostics_every=values["time.diagnostics_every"],
        seed=values["run.seed"],
        level_threshold=values["diagnostics.level_threshold"],
    )
    return RunConfig(
        solver=solver,
        out_dir=values["output.dir"],
        snapshot_every=values["output.snapshot_every"],
        preset=values["run.preset"],
        samples=values["report.samples"],
        checks=values["report.checks"],
        epsilons=values["study.epsilons"],
        delta=values["study.delta"],
        directions=values["study.directions"],
    )


def parse_text(text, base_dir=".", overrides=None, validate=True):
    values = {k: default for k, (_, default) in SCHEMA.items()}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
        seen[key] = lineno
        try:
            values[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno) from None
    for key, value in (overrides or {}).items():
        values[key] = value
    path = values["initial.path"]
    if path and not os.path.isabs(path):
        values["initial.path"] = os.path.normpath(os.path.join(base_dir, path))
    config = _build(values)
    if validate:
        validate_run_config(config)
    return config


def parse_config(path, overrides=None, validate=True):
    with open(path) as fh:
        text = fh.read()
    return parse_text(text, os.path.dirname(os.path.abspath(path)), overrides, validate)


def validate_run_config(config):
    ic = config.solver.initial
    if ic.kind == "snapshot" and not os.path.isfile(ic.path):
        raise ConfigError(f"initial snapshot {ic.path!r} does not exist")
    if config.snapshot_every < 0:
        raise ConfigError("output.snapshot_every must be >= 0")
    if config.samples < 1 or config.directions < 1:
        raise ConfigError("report.samples and study.directions must be positive")
    out = os.path.abspath(config.out_dir)
    parent = out
    while not os.path.exists(parent):
        parent = os.path.dirname(parent)
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(f"output directory {config.out_dir!r} is not creatable")
    validate_config(config.solver)
    return config


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return " ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_values(config):
    s = config.solver
    r, ic, g = s.reaction, s.initial, s.grid
    return {
        "grid.dimension": g.dimension,
        "grid.points": g.points,
        "grid.extent": g.extent,
        "grid.boundary": g.boundary,
        "model.epsilon": s.epsilon,
        "time.dt": s.dt,
        "time.t_end": s.t_end,
        "time.diagnostics_every": s.diagnostics_every,
        "kernel.kind": s.kernel.kind,
        "kernel.amplitude": s.kernel.amplitude,
        "kernel.scale": s.kernel.scale,
        "reaction.kind": r.kind,
        "reaction.alpha": r.alpha,
        "reaction.lambda": r.lam,
        "reaction.h": r.h,
        "reaction.sigma": r.sigma,
        "reaction.sign": r.sign,
        "reaction.table_s": tuple(r.table_s),
        "reaction.table_g": tuple(r.table_g),
        "reaction.lipschitz": r.declared_lipschitz,
        "initial.kind": ic.kind,
        "initial.value": ic.value,
        "initial.lo": ic.lo,
        "initial.hi": ic.hi,
        "initial.center": ic.center,
        "initial.width": ic.width,
        "initial.floor": ic.floor,
        "initial.ceiling": ic.ceiling,
        "initial.blocks": ic.blocks,
        "initial.path": ic.path,
        "diagnostics.level_threshold": s.level_threshold,
        "run.seed": s.seed,
        "run.preset": config.preset,
        "output.dir": config.out_dir,
        "output.snapshot_every": config.snapshot_every,
        "report.samples": config.samples,
        "report.checks": config.checks,
        "study.epsilons": tuple(config.epsilons),
        "study.delta": config.delta,
        "study.directions": config.directions,
    }


def to_text(config):
    """Normalized form: every key, one per line, in schema order."""
    values = to_values(config)
    return "".join(f"{k} = {_fmt(values[k])}\n" for k in SCHEMA)

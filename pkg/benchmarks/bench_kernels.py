"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times each hot kernel on a few grid sizes, then one full IMEX step with
each backend swapped into the solver. Prints a table of best-of-repeat
times in microseconds and the speed-up of the compiled version.
"""

import argparse
import timeit

import numpy as np

from nlchr import _backend, _pykernels, solver
from nlchr.grid import Grid
from nlchr.kernel import KernelSpec
from nlchr.potential import epsilon_offset
from nlchr.reaction import ReactionSpec
from nlchr.solver import InitialCondition, Simulation, SolverConfig

SHAPES = [(256,), (4096,), (128, 128)]
EPS = 1e-3


def best_us(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number * 1e6


def kernel_cases(shape):
    rng = np.random.default_rng(0)
    u, w, g = (rng.uniform(-0.05, 1.05, shape) for _ in range(3))
    m = rng.uniform(0.0, 0.25, shape)
    spacing = tuple(1.0 / n for n in shape)
    a = epsilon_offset(EPS)
    return {
        "mobility_eps": lambda k: k.mobility_eps(u, a, EPS),
        "f_prime_eps": lambda k: k.f_prime_eps(u, a, EPS),
        "laplacian": lambda k: k.laplacian(u, spacing, False),
        "flux_divergence": lambda k: k.flux_divergence(m, w, spacing, False),
        "explicit_update": lambda k: k.explicit_update(u, w, g, a, EPS, 1e-4, spacing, False),
    }


def step_time(points, backend, repeat):
    dim = len(points)
    cfg = SolverConfig(
        grid=Grid(points, (1.0,) * dim),
        kernel=KernelSpec("gaussian", 20.0, 0.01, dim),
        reaction=ReactionSpec("logistic"),
        initial=InitialCondition("noise", lo=0.3, hi=0.7),
    )
    saved = solver.kernels
    solver.kernels = backend
    try:
        sim = Simulation(cfg)
        state = sim.initial_state()
        return best_us(lambda: sim.step(state), repeat)
    finally:
        solver.kernels = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    compiled = _backend.compiled_kernels
    if compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rows = [("operation", "grid", "python_us", "compiled_us", "speedup")]
    for shape in SHAPES:
        grid = "x".join(map(str, shape))
        for name, call in kernel_cases(shape).items():
            py = best_us(lambda: call(_pykernels), args.repeat)
            c = best_us(lambda: call(compiled), args.repeat)
            rows.append((name, grid, f"{py:.1f}", f"{c:.1f}", f"{py / c:.2f}"))
        py = step_time(shape, _pykernels, args.repeat)
        c = step_time(shape, compiled, args.repeat)
        rows.append(("full step", grid, f"{py:.1f}", f"{c:.1f}", f"{py / c:.2f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))


if __name__ == "__main__":
    main()

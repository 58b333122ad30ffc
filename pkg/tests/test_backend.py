import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlchr import _backend, _pykernels
from nlchr.diagnostics import read_csv
from nlchr.potential import epsilon_offset

compiled = _backend.compiled_kernels
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")

EPSILONS = [1e-1, 1e-3, 1e-6]


@needs_compiled
@pytest.mark.parametrize("eps", EPSILONS)
def test_pointwise_functions_agree(eps):
    a = epsilon_offset(eps)
    s = np.concatenate([np.random.default_rng(0).uniform(-0.5, 1.5, 5000), [0.0, 0.25, 0.5, 0.75, 1.0]])
    np.testing.assert_allclose(compiled.mobility_eps(s, a, eps), _pykernels.mobility_eps(s, a, eps), rtol=1e-15)
    np.testing.assert_allclose(compiled.f_prime_eps(s, a, eps), _pykernels.f_prime_eps(s, a, eps),
                               rtol=1e-14, atol=1e-15)


@needs_compiled
@pytest.mark.parametrize("shape, spacing", [((64,), (1 / 64,)), ((24, 16), (1 / 24, 0.5 / 16))])
@pytest.mark.parametrize("periodic", [False, True])
def test_stencils_agree(shape, spacing, periodic):
    rng = np.random.default_rng(1)
    u, w, g = (rng.uniform(-0.1, 1.1, shape) for _ in range(3))
    np.testing.assert_allclose(compiled.laplacian(u, spacing, periodic),
                               _pykernels.laplacian(u, spacing, periodic), rtol=1e-12, atol=1e-9)
    m = rng.uniform(0.0, 0.3, shape)
    np.testing.assert_allclose(compiled.flux_divergence(m, w, spacing, periodic),
                               _pykernels.flux_divergence(m, w, spacing, periodic), rtol=1e-12, atol=1e-9)
    for eps in (0.0, 1e-3):
        a = epsilon_offset(eps)
        np.testing.assert_allclose(compiled.explicit_update(u, w, g, a, eps, 1e-4, spacing, periodic),
                                   _pykernels.explicit_update(u, w, g, a, eps, 1e-4, spacing, periodic),
                                   rtol=1e-13, atol=1e-15)


@needs_compiled
@settings(max_examples=100, deadline=None)
@given(st.sampled_from(EPSILONS), st.floats(-3.0, 4.0))
def test_scalar_agreement(eps, s):
    a = epsilon_offset(eps)
    assert compiled.f_prime_eps(np.array([s]), a, eps)[0] == pytest.approx(
        _pykernels.f_prime_eps(np.array([s]), a, eps)[()], rel=1e-14, abs=1e-15)


def test_selected_backend_reported():
    assert _backend.BACKEND == ("compiled" if compiled is not None else "python")


def test_environment_forces_fallback():
    env = dict(os.environ, NLCHR_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import nlchr; print(nlchr.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_fallback_run_matches_compiled(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid.points = 64\ntime.t_end = 0.005\ntime.diagnostics_every = 10\nkernel.amplitude = 20\n"
                   "reaction.kind = logistic\ninitial.kind = tanh\ninitial.floor = 0.05\ninitial.ceiling = 0.95\n")
    results = {}
    for backend in ("python", "auto"):
        env = dict(os.environ, NLCHR_BACKEND=backend)
        out = tmp_path / backend
        subprocess.run([sys.executable, "-m", "nlchr.cli", "run", "-q", "--config", str(cfg), "--out", str(out)],
                       env=env, check=True)
        results[backend] = read_csv(out / "diagnostics.csv")
    for a, b in zip(results["python"], results["auto"]):
        np.testing.assert_allclose([float(x) for x in a.as_row()], [float(x) for x in b.as_row()],
                                   rtol=1e-10, atol=1e-13)

"""Pure-numpy implementations of the hot kernels.

Same signatures as the compiled ``_ckernels`` module. Both must agree to
rounding; ``tests/test_backend.py`` checks this.
"""

import numpy as np


# Writing 1 + a - s as a + (1 - s) makes the evaluators exactly symmetric
# about s = 1/2: for s >= 1/2 both 1 - s and 1 - (1 - s) are exact.
CENTRAL = 0.25  # |s - 1/2| below which f_eps' uses the atanh form


def mobility_eps(s, a, eps):
    s = np.asarray(s, dtype=float)
    inside = (a + s) * (a + (1.0 - s))
    return np.where((s < 0.0) | (s > 1.0), eps, inside)


def f_prime_eps(s, a, eps):
    """f_eps' for eps > 0: log branch on [0, 1], linear continuation outside.

    Near s = 1/2 the branch is 2 atanh(d / (a + 1/2)) with d = s - 1/2 exact;
    towards the ends it is ln(a + s) - ln(a + (1 - s)). Both are odd in d.
    """
    s = np.asarray(s, dtype=float)
    slope = (1.0 + 2.0 * a) / eps
    at_zero = np.log(a / (1.0 + a))
    d = s - 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        edge = np.log(a + s) - np.log(a + (1.0 - s))
        central = 2.0 * np.arctanh(d / (a + 0.5))
    inside = np.where(np.abs(d) <= CENTRAL, central, edge)
    out = np.where(s < 0.0, at_zero + slope * s, inside)
    return np.where(s > 1.0, -at_zero + slope * (s - 1.0), out)


def _face_fluxes(m, w, h, axis, periodic):
    m = np.moveaxis(m, axis, 0)
    w = np.moveaxis(w, axis, 0)
    n = m.shape[0]
    flux = np.zeros((n + 1,) + m.shape[1:])
    flux[1:n] = 0.5 * (m[1:] + m[:-1]) * (w[1:] - w[:-1]) / h
    if periodic:
        flux[0] = 0.5 * (m[0] + m[-1]) * (w[0] - w[-1]) / h
        flux[n] = flux[0]
    return flux


def flux_divergence(m, w, spacing, periodic):
    m = np.asarray(m, dtype=float)
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(m)
    for axis, h in enumerate(spacing):
        flux = _face_fluxes(m, w, h, axis, periodic)
        div = (flux[1:] - flux[:-1]) / h
        out += np.moveaxis(div, 0, axis)
    return out


def laplacian(v, spacing, periodic):
    v = np.asarray(v, dtype=float)
    padded = np.pad(v, 1, mode="wrap" if periodic else "edge")
    out = np.zeros_like(v)
    for axis, h in enumerate(spacing):
        lo = [slice(1, -1)] * v.ndim
        hi = [slice(1, -1)] * v.ndim
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        out += (padded[tuple(lo)] - 2.0 * v + padded[tuple(hi)]) / (h * h)
    return out


def explicit_update(u, w, g, a, eps, dt, spacing, periodic):
    """Return u + dt * (div(mu_eps(u) grad w) + g).

    With eps == 0 the mobility is s(1-s) on all reals.
    """
    u = np.asarray(u, dtype=float)
    if eps == 0.0:
        m = u * (1.0 - u)
    else:
        m = mobility_eps(u, a, eps)
    return u + dt * (flux_divergence(m, w, spacing, periodic) + g)

"""Independent reference implementations shared by the unit and acceptance tests.

They use dense matrices, direct sums and adaptive quadrature, never the
transforms or stencils of the package itself.
"""

import math

import numpy as np
from scipy.integrate import dblquad, quad


def self_weight_by_quadrature(spec, spacing):
    """Cell average of the Newton kernel around the origin, by adaptive quadrature."""
    if spec.dimension == 1:
        h = spacing[0]
        val, _ = quad(lambda x: spec.amplitude * abs(x), -h / 2, h / 2)
        return val / h
    a, b = spacing[0] / 2, spacing[1] / 2
    quarter, _ = dblquad(lambda y, x: -spec.amplitude * 0.5 * math.log(x * x + y * y), 0, a, 0, b,
                         epsabs=1e-14, epsrel=1e-13)
    return 4 * quarter / (4 * a * b)


def direct_convolution(spec, grid, rho):
    """O(N^2) double sum over cell centres: the independent oracle."""
    pts = np.stack([c.ravel() for c in grid.coordinates()], axis=1)
    flat = rho.ravel()
    diff = pts[:, None, :] - pts[None, :, :]
    if grid.periodic:
        ext = np.array(grid.extent)
        diff = diff - ext * np.round(diff / ext)
    r = np.sqrt(np.sum(diff**2, axis=-1))
    with np.errstate(divide="ignore"):
        K = spec(r)
    if spec.kind == "newton":
        np.fill_diagonal(K, self_weight_by_quadrature(spec, grid.spacing))
    return (K @ flat).reshape(grid.shape) * grid.cell_volume


def _dense_lap_1d(n, h, periodic):
    A = np.zeros((n, n))
    for i in range(n):
        for j, wgt in ((i - 1, 1.0), (i, -2.0), (i + 1, 1.0)):
            j = j % n if periodic else min(max(j, 0), n - 1)
            A[i, j] += wgt / h**2
    return A


def _dense_div_1d(m, w, h, periodic):
    n = len(m)
    out = np.zeros(n)
    for i in range(n):
        for nb in (i + 1, i - 1):
            if not periodic and not 0 <= nb < n:
                continue
            nb %= n
            out[i] += 0.5 * (m[i] + m[nb]) * (w[nb] - w[i]) / h**2
    return out


def dense_step(cfg, u, t):
    """Straight-line reimplementation of one step with dense matrices, no transforms."""
    grid, spec = cfg.grid, cfg.kernel
    n, h = grid.points[0], grid.spacing[0]
    (x,) = grid.coordinates()
    dist = np.abs(x[:, None] - x[None, :])
    if grid.periodic:
        dist = np.minimum(dist, grid.extent[0] - dist)
    K = spec(dist) * h
    if spec.kind == "newton":
        np.fill_diagonal(K, spec.amplitude * h / 4 * h)  # mean of k|x| over the cell [-h/2, h/2]
    w = K @ (1.0 - 2.0 * u)
    eps = cfg.epsilon
    a = (math.sqrt(1.0 + 4.0 * eps) - 1.0) / 2.0
    if eps == 0.0:
        m = u * (1.0 - u)
    else:
        m = np.where((u < 0) | (u > 1), eps, u * (1.0 - u) + eps)
    g = cfg.reaction.raw(np.clip(u, 0.0, 1.0), t)
    r = u + cfg.dt * (_dense_div_1d(m, w, h, grid.periodic) + g)
    A = np.eye(n) - cfg.dt * (1.0 + 2.0 * a) * _dense_lap_1d(n, h, grid.periodic)
    return np.linalg.solve(A, r)

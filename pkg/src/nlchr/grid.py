"""Uniform cell-centered grids on 1D intervals and 2D rectangles.

Fields are plain float arrays of shape ``grid.shape``. Zero-flux boundaries use
mirrored ghost cells, so every flux through the boundary faces is exactly zero
and the discrete divergence telescopes to zero.
"""

from dataclasses import dataclass
import functools
import math

import numpy as np
import scipy.fft

from ._backend import kernels
from .errors import ConvergenceError, DomainError, GridMismatchError

BOUNDARIES = ("zero_flux", "periodic")


@dataclass(frozen=True)
class Grid:
    points: tuple
    extent: tuple
    boundary: str = "zero_flux"

    def __post_init__(self):
        points = tuple(int(n) for n in np.atleast_1d(self.points))
        extent = tuple(float(e) for e in np.atleast_1d(self.extent))
        if len(extent) == 1 and len(points) > 1:
            extent = extent * len(points)
        if len(points) not in (1, 2) or len(extent) != len(points):
            raise DomainError("grids are 1D or 2D with one extent per axis")
        if any(n < 8 for n in points):
            raise DomainError(f"need at least 8 points per axis, got {points}")
        if any(not (e > 0.0 and math.isfinite(e)) for e in extent):
            raise DomainError(f"extent must be positive, got {extent}")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "extent", extent)

    @classmethod
    def uniform(cls, dimension, points, extent=1.0, boundary="zero_flux"):
        return cls((points,) * dimension, (extent,) * dimension, boundary)

    @property
    def dimension(self):
        return len(self.points)

    @property
    def shape(self):
        return self.points

    @property
    def spacing(self):
        return tuple(e / n for e, n in zip(self.extent, self.points))

    @property
    def cell_volume(self):
        return math.prod(self.spacing)

    @property
    def volume(self):
        return math.prod(self.extent)

    @property
    def periodic(self):
        return self.boundary == "periodic"

    def axes(self):
        """Cell-center coordinates per axis: (i + 1/2) * spacing."""
        return [(np.arange(n) + 0.5) * h for n, h in zip(self.points, self.spacing)]

    def coordinates(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def refined(self, factor=2):
        return Grid(tuple(factor * n for n in self.points), self.extent, self.boundary)

    def check(self, values, name="field"):
        values = np.asarray(values, dtype=float)
        if values.shape != self.shape:
            raise GridMismatchError(f"{name} has shape {values.shape}, grid is {self.shape}")
        return values

    def check_finite(self, values, name="field"):
        values = self.check(values, name)
        if not np.all(np.isfinite(values)):
            raise DomainError(f"{name} contains non-finite values")
        return values

    def integrate(self, values):
        return float(np.sum(values) * self.cell_volume)

    def mean(self, values):
        return self.integrate(values) / self.volume

    def inner(self, a, b):
        return float(np.sum(a * b) * self.cell_volume)


def mean_and_norms(grid, values):
    """Return ``(mean, l1, l2, linf)`` by cell quadrature."""
    v = grid.check(values)
    cv = grid.cell_volume
    mean = float(np.sum(v) * cv / grid.volume)
    l1 = float(np.sum(np.abs(v)) * cv)
    l2 = math.sqrt(float(np.sum(v * v)) * cv)
    linf = float(np.max(np.abs(v)))
    return mean, l1, l2, linf


def lp_norm(grid, values, p):
    v = np.abs(np.asarray(values, dtype=float))
    if p == math.inf:
        return float(np.max(v))
    return float((np.sum(v**p) * grid.cell_volume) ** (1.0 / p))


def laplacian(grid, values):
    """Five-point (three-point in 1D) Laplacian; zero-flux ghosts mirror the boundary cell."""
    v = grid.check(values)
    return kernels.laplacian(v, grid.spacing, grid.periodic)


def flux_divergence(grid, m, w):
    """div(m grad w) with arithmetic-mean face mobility and zero boundary flux."""
    m = grid.check(m, "mobility")
    w = grid.check(w, "potential")
    return kernels.flux_divergence(m, w, grid.spacing, grid.periodic)


@functools.lru_cache(maxsize=32)
def laplacian_eigenvalues(grid):
    """Eigenvalues of the discrete Laplacian in the transform basis, shape grid.shape."""
    lam = np.zeros(grid.shape)
    for axis, (n, h) in enumerate(zip(grid.points, grid.spacing)):
        k = np.arange(n)
        if grid.periodic:
            ev = -(2.0 * np.sin(np.pi * k / n) / h) ** 2
        else:
            ev = -(2.0 * np.sin(np.pi * k / (2 * n)) / h) ** 2
        shape = [1] * grid.dimension
        shape[axis] = n
        lam = lam + ev.reshape(shape)
    lam.setflags(write=False)
    return lam


@functools.lru_cache(maxsize=32)
def _helmholtz_symbol(grid, coefficient):
    symbol = 1.0 - coefficient * laplacian_eigenvalues(grid)
    symbol.setflags(write=False)
    return symbol


def helmholtz_solve(grid, rhs, coefficient, rtol=1e-10):
    """Solve u - coefficient * laplacian(u) = rhs by transform diagonalization.

    Zero-flux grids use the type-II cosine transform (even reflection about
    the boundary faces), periodic grids the FFT.
    """
    if not coefficient > 0.0:
        raise DomainError("helmholtz coefficient must be positive")
    rhs = grid.check(rhs, "rhs")
    symbol = _helmholtz_symbol(grid, float(coefficient))
    if grid.periodic:
        u = np.real(scipy.fft.ifftn(scipy.fft.fftn(rhs) / symbol))
    else:
        u = scipy.fft.idctn(scipy.fft.dctn(rhs, type=2, norm="ortho") / symbol, type=2, norm="ortho")
    # the zero mode has symbol 1: restore the mean lost to transform rounding
    u += (np.sum(rhs) - np.sum(u)) / rhs.size
    residual = u - coefficient * laplacian(grid, u) - rhs
    scale = max(float(np.linalg.norm(rhs)), np.finfo(float).tiny)
    if float(np.linalg.norm(residual)) > rtol * scale:
        raise ConvergenceError(
            f"helmholtz residual {np.linalg.norm(residual) / scale:.3e} above {rtol:.0e}"
        )
    return u


def write_snapshot(path, grid, values, time):
    """Write ``NLCH1 <dim> <nx> [ny] <hx> [hy] <time>`` then one value per line."""
    v = grid.check(values)
    head = ["NLCH1", str(grid.dimension)]
    head += [str(n) for n in grid.points]
    head += [repr(float(h)) for h in grid.spacing]
    head.append(repr(float(time)))
    with open(path, "w") as fh:
        fh.write(" ".join(head) + "\n")
        for x in v.ravel(order="C"):
            fh.write(f"{x:.17g}\n")


def read_snapshot(path, boundary="zero_flux"):
    """Return ``(grid, values, time)`` from a snapshot file."""
    with open(path) as fh:
        tokens = fh.readline().split()
        if not tokens or tokens[0] != "NLCH1":
            raise DomainError(f"{path}: not an NLCH1 snapshot")
        dim = int(tokens[1])
        if dim not in (1, 2) or len(tokens) != 3 + 2 * dim:
            raise DomainError(f"{path}: malformed snapshot header")
        points = tuple(int(t) for t in tokens[2 : 2 + dim])
        spacing = tuple(float(t) for t in tokens[2 + dim : 2 + 2 * dim])
        time = float(tokens[-1])
        values = np.array([float(line) for line in fh if line.strip()])
    if values.size != math.prod(points):
        raise DomainError(f"{path}: expected {math.prod(points)} values, found {values.size}")
    grid = Grid(points, tuple(n * h for n, h in zip(points, spacing)), boundary)
    return grid, values.reshape(points), time

"""Convolution kernels and the bounded-domain convolution operator.

The nonlocal term integrates over the domain only:

    (K * rho)(x_i) = sum_j K(x_i - x_j) rho_j * cell_volume,

which is a linear (aperiodic) convolution. It is evaluated with FFTs after
zero-padding every axis to twice its length, so no wrap-around contributions
appear. On periodic grids the periodic convolution with minimum-image
distances is used instead.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, GridMismatchError, ResolutionError
from .grid import lp_norm

KINDS = ("gaussian", "mollifier", "newton")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    amplitude: float = 1.0
    scale: float = 0.01
    dimension: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.dimension not in (1, 2):
            raise DomainError("kernel dimension must be 1 or 2")
        if not self.amplitude > 0.0:
            raise DomainError(f"kernel amplitude must be positive, got {self.amplitude}")
        if self.kind != "newton" and not self.scale > 0.0:
            raise DomainError(f"kernel scale must be positive, got {self.scale}")

    @property
    def label(self):
        if self.kind == "newton":
            return f"newton(k={self.amplitude:g},d={self.dimension})"
        name = "lambda" if self.kind == "gaussian" else "h"
        return f"{self.kind}(C={self.amplitude:g},{name}={self.scale:g},d={self.dimension})"

    @property
    def paper_family(self):
        """False for the 1D Newton analogue, which is an extrapolation."""
        return not (self.kind == "newton" and self.dimension == 1)

    @property
    def length_scale(self):
        if self.kind == "gaussian":
            return math.sqrt(self.scale)
        if self.kind == "mollifier":
            return self.scale
        return math.inf

    def __call__(self, r):
        """Kernel value at distance r >= 0 (Newton kernels are singular at 0 in 2D)."""
        r = np.asarray(r, dtype=float)
        C = self.amplitude
        if self.kind == "gaussian":
            return C * np.exp(-(r * r) / self.scale)
        if self.kind == "mollifier":
            h2 = self.scale**2
            inside = r < self.scale
            with np.errstate(divide="ignore", over="ignore"):
                q = np.where(inside, h2 - r * r, 1.0)
                return np.where(inside, C * np.exp(-h2 / q), 0.0)
        if self.dimension == 1:
            return C * r
        with np.errstate(divide="ignore"):
            return -C * np.log(r)


def newton_self_weight(spec, spacing):
    """Cell average of a Newton kernel over the cell centred at the origin."""
    if spec.dimension == 1:
        return spec.amplitude * spacing[0] / 4.0
    a, b = spacing[0] / 2.0, spacing[1] / 2.0
    # integral of ln(x^2 + y^2) over [0, a] x [0, b]
    quarter = a * b * (math.log(a * a + b * b) - 3.0) + a * a * math.atan(b / a) + b * b * math.atan(a / b)
    # ln r = ln(x^2 + y^2) / 2, four quarters, divide by the cell area 4ab
    return -spec.amplitude * (2.0 * quarter) / (4.0 * a * b)


def _offsets(n, periodic):
    """Signed integer offsets stored at each FFT index, and a validity mask."""
    if periodic:
        k = np.arange(n)
        return np.where(k <= n // 2, k, k - n), np.ones(n, dtype=bool)
    k = np.arange(2 * n)
    off = np.where(k < n, k, k - 2 * n)
    return off, off != -n


@dataclass(frozen=True)
class DiscreteKernel:
    spec: KernelSpec
    grid: object
    table: np.ndarray = field(repr=False)
    newton_singularity_rule: float = None

    def __post_init__(self):
        self.table.setflags(write=False)
        object.__setattr__(self, "_hat", np.fft.rfftn(self.table))

    @property
    def padded_shape(self):
        return self.table.shape

    def __call__(self, field):
        return convolve(self, field)


def build_kernel(spec, grid):
    if spec.dimension != grid.dimension:
        raise GridMismatchError(f"kernel is {spec.dimension}D but grid is {grid.dimension}D")
    if 2.0 * max(grid.spacing) > spec.length_scale:
        raise ResolutionError(
            f"{spec.label} under-resolved: length scale {spec.length_scale:.3g} "
            f"needs at least 2 spacings ({2 * max(grid.spacing):.3g})"
        )
    offs, masks = zip(*(_offsets(n, grid.periodic) for n in grid.points))
    grids = np.meshgrid(*[o * h for o, h in zip(offs, grid.spacing)], indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    valid = np.ones(r.shape, dtype=bool)
    for axis, m in enumerate(masks):
        shape = [1] * grid.dimension
        shape[axis] = m.size
        valid = valid & m.reshape(shape)
    self_weight = None
    with np.errstate(divide="ignore"):
        table = np.where(valid, spec(r), 0.0)
    if spec.kind == "newton":
        self_weight = newton_self_weight(spec, grid.spacing)
        table[(0,) * grid.dimension] = self_weight
    return DiscreteKernel(spec, grid, np.ascontiguousarray(table), self_weight)


def _apply(hat, padded_shape, grid, rho):
    axes = tuple(range(len(padded_shape)))
    out = np.fft.irfftn(np.fft.rfftn(rho, s=padded_shape, axes=axes) * hat, s=padded_shape, axes=axes)
    return out[tuple(slice(0, n) for n in grid.points)] * grid.cell_volume


def convolve(kernel, field):
    """(K * rho)(x_i) = sum_j K(x_i - x_j) rho_j dV over the domain only."""
    rho = np.asarray(field, dtype=float)
    if rho.shape != kernel.grid.shape:
        raise GridMismatchError(f"field shape {rho.shape} does not match kernel grid {kernel.grid.shape}")
    return _apply(kernel._hat, kernel.padded_shape, kernel.grid, rho)


def boundary_weight(kernel):
    """k(x) = integral over the domain of K(x - y) dy."""
    return convolve(kernel, np.ones(kernel.grid.shape))


def symmetry_defect(kernel):
    """max |K(m) - K(-m)| over the stored lattice (0 by construction)."""
    t = kernel.table
    mirrored = t
    for axis in range(t.ndim):
        mirrored = np.roll(np.flip(mirrored, axis=axis), 1, axis=axis)
    return float(np.max(np.abs(t - mirrored)))


# -- empirical audit of the kernel hypotheses ---------------------------------

def random_smooth_fields(grid, samples, seed=0, modes=6):
    """Seeded cosine series; the same seed gives the same continuum field on any grid."""
    rng = np.random.default_rng(seed)
    coords = grid.coordinates()
    period = 1.0 if grid.periodic else 0.5
    ks = np.stack(np.meshgrid(*[np.arange(modes + 1)] * grid.dimension, indexing="ij"), -1)
    ks = ks.reshape(-1, grid.dimension)
    fields = []
    for _ in range(samples):
        coef = rng.uniform(-1.0, 1.0, len(ks)) / (1.0 + np.sum(ks * ks, axis=1))
        phase = rng.uniform(0.0, 2.0 * np.pi, len(ks)) if grid.periodic else np.zeros(len(ks))
        rho = np.zeros(grid.shape)
        for c, k, ph in zip(coef, ks, phase):
            arg = sum(2.0 * np.pi * period * kk * x / L for kk, x, L in zip(k, coords, grid.extent))
            rho += c * np.cos(arg + ph)
        fields.append(rho)
    return fields


def random_sign_fields(grid, count, seed=0, modes=4):
    """Cosine series with a fixed amplitude envelope 1 / (1 + |k|^2) and seeded random signs.

    Cosine modes are orthogonal on the grid, so every field carries the same
    energy in each mode; only the signs differ.
    """
    rng = np.random.default_rng(seed)
    coords = grid.coordinates()
    period = 1.0 if grid.periodic else 0.5
    ks = np.stack(np.meshgrid(*[np.arange(modes + 1)] * grid.dimension, indexing="ij"), -1)
    ks = ks.reshape(-1, grid.dimension)
    basis = [
        np.cos(sum(2.0 * np.pi * period * kk * x / L for kk, x, L in zip(k, coords, grid.extent)))
        / (1.0 + float(np.dot(k, k)))
        for k in ks
    ]
    fields = []
    for _ in range(count):
        signs = rng.choice([-1.0, 1.0], len(ks))
        fields.append(sum(s * b for s, b in zip(signs, basis)))
    return fields


def _gradient(grid, g):
    if grid.dimension == 1:
        return [np.gradient(g, grid.spacing[0], edge_order=1)]
    return list(np.gradient(g, *grid.spacing, edge_order=1))


def sobolev_norm(grid, g, order, p):
    """Discrete W^{order,p} norm: sum of L^p norms of |D^j g|, j = 0..order."""
    total = lp_norm(grid, g, p)
    derivs = [g]
    for _ in range(order):
        nxt = []
        for d in derivs:
            nxt.extend(_gradient(grid, d))
        mag = np.sqrt(sum(d * d for d in nxt))
        total += lp_norm(grid, mag, p)
        derivs = nxt
    return total


@dataclass
class KernelReport:
    kernel_id: str
    paper_family: bool
    points: tuple
    k2: float
    r1: float
    r2: float
    rinf: float
    k4: float
    symmetry_defect: float
    samples: int

    @property
    def passed(self):
        finite = all(math.isfinite(v) for v in (self.k2, self.r1, self.r2, self.rinf, self.k4))
        return finite and self.symmetry_defect == 0.0

    HEADER = ("kernel", "grid", "K2", "r1", "r2", "rinf", "K4", "sym_defect", "note")

    def row(self):
        note = "" if self.paper_family else "non-paper"
        return (
            self.kernel_id,
            "x".join(str(n) for n in self.points),
            f"{self.k2:.6e}",
            f"{self.r1:.6e}",
            f"{self.r2:.6e}",
            f"{self.rinf:.6e}",
            f"{self.k4:.6e}",
            f"{self.symmetry_defect:.1e}",
            note,
        )


def kernel_property_report(spec, grid, samples=64, seed=0):
    kernel = build_kernel(spec, grid)
    abs_hat = np.fft.rfftn(np.abs(kernel.table))
    k2 = float(np.max(_apply(abs_hat, kernel.padded_shape, grid, np.ones(grid.shape))))
    ratios = {1: 0.0, 2: 0.0, math.inf: 0.0}
    k4 = 0.0
    for rho in random_smooth_fields(grid, samples, seed):
        conv = convolve(kernel, rho)
        for p in ratios:
            ratios[p] = max(ratios[p], sobolev_norm(grid, conv, 1, p) / lp_norm(grid, rho, p))
        k4 = max(k4, sobolev_norm(grid, conv, 2, 2) / sobolev_norm(grid, rho, 1, 2))
    return KernelReport(
        kernel_id=spec.label,
        paper_family=spec.paper_family,
        points=grid.points,
        k2=k2,
        r1=ratios[1],
        r2=ratios[2],
        rinf=ratios[math.inf],
        k4=k4,
        symmetry_defect=symmetry_defect(kernel),
        samples=samples,
    )


def refinement_change(coarse, fine):
    """Relative change of each empirical constant between two reports."""
    out = {}
    for name in ("k2", "r1", "r2", "rinf", "k4"):
        a, b = getattr(coarse, name), getattr(fine, name)
        out[name] = abs(b - a) / max(abs(a), np.finfo(float).tiny)
    return out


def format_reports(reports):
    rows = [KernelReport.HEADER] + [r.row() for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows) + "\n"

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from nlchr.errors import DomainError, GridMismatchError, ResolutionError
from nlchr.grid import Grid
from nlchr.kernel import (
    KernelReport,
    KernelSpec,
    boundary_weight,
    build_kernel,
    convolve,
    format_reports,
    kernel_property_report,
    newton_self_weight,
    random_sign_fields,
    random_smooth_fields,
    refinement_change,
    sobolev_norm,
    symmetry_defect,
)

SPECS_1D = [
    KernelSpec("gaussian", 2.0, 0.01, 1),
    KernelSpec("mollifier", 1.5, 0.2, 1),
    KernelSpec("newton", 0.7, 0.0, 1),
]
SPECS_2D = [
    KernelSpec("gaussian", 2.0, 0.05, 2),
    KernelSpec("mollifier", 1.5, 0.3, 2),
    KernelSpec("newton", 0.7, 0.0, 2),
]

from oracles import direct_convolution, self_weight_by_quadrature


class TestKernelSpec:
    def test_gaussian_origin(self):
        assert KernelSpec("gaussian", 3.0, 0.01)(0.0) == 3.0

    def test_mollifier_support(self):
        k = KernelSpec("mollifier", 1.0, 0.1)
        assert k(0.1) == 0.0 and k(0.2) == 0.0
        assert k(0.0) == pytest.approx(math.exp(-1.0))

    def test_newton_2d_unit_distance(self):
        assert KernelSpec("newton", 2.0, 0.0, 2)(1.0) == 0.0

    def test_newton_1d_is_non_paper(self):
        assert not KernelSpec("newton", 1.0, 0.0, 1).paper_family
        assert KernelSpec("newton", 1.0, 0.0, 2).paper_family

    @pytest.mark.parametrize(
        "kwargs", [dict(kind="cauchy"), dict(amplitude=0.0), dict(amplitude=-1.0), dict(scale=0.0), dict(dimension=3)]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            KernelSpec(**kwargs)


class TestBuild:
    def test_under_resolved(self):
        with pytest.raises(ResolutionError):
            build_kernel(KernelSpec("gaussian", 1.0, 1e-4), Grid((64,), (1.0,)))
        with pytest.raises(ResolutionError):
            build_kernel(KernelSpec("mollifier", 1.0, 0.02), Grid((64,), (1.0,)))

    def test_dimension_mismatch(self):
        with pytest.raises(GridMismatchError):
            build_kernel(KernelSpec("gaussian", 1.0, 0.05, 2), Grid((64,), (1.0,)))

    def test_field_mismatch(self):
        k = build_kernel(SPECS_1D[0], Grid((64,), (1.0,)))
        with pytest.raises(GridMismatchError):
            convolve(k, np.ones(63))

    @pytest.mark.parametrize("spec", SPECS_1D + SPECS_2D, ids=lambda s: s.label)
    def test_symmetric_table(self, spec):
        grid = Grid((64,) * spec.dimension, (1.0,) * spec.dimension)
        assert symmetry_defect(build_kernel(spec, grid)) == 0.0

    def test_padded_to_double(self):
        k = build_kernel(SPECS_2D[0], Grid((16, 12), (1.0, 1.0)))
        assert k.padded_shape == (32, 24)
        kp = build_kernel(SPECS_2D[0], Grid((16, 12), (1.0, 1.0), "periodic"))
        assert kp.padded_shape == (16, 12)

    @pytest.mark.parametrize("spec", [SPECS_1D[2], SPECS_2D[2]], ids=["1d", "2d"])
    def test_newton_self_weight_matches_quadrature(self, spec):
        spacing = (0.05, 0.03)[: spec.dimension]
        assert newton_self_weight(spec, spacing) == pytest.approx(self_weight_by_quadrature(spec, spacing), rel=1e-10)

    def test_newton_self_weight_recorded(self):
        k = build_kernel(SPECS_2D[2], Grid((16, 16), (1.0, 1.0)))
        assert k.newton_singularity_rule == newton_self_weight(SPECS_2D[2], (1 / 16, 1 / 16))
        assert build_kernel(SPECS_1D[0], Grid((64,), (1.0,))).newton_singularity_rule is None


class TestConvolution:
    @pytest.mark.parametrize("spec", SPECS_1D, ids=lambda s: s.label)
    def test_direct_sum_1d(self, spec):
        grid = Grid((64,), (1.0,))
        rho = np.random.default_rng(0).normal(size=grid.shape)
        oracle = direct_convolution(spec, grid, rho)
        got = convolve(build_kernel(spec, grid), rho)
        assert np.max(np.abs(got - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    @pytest.mark.parametrize("spec", SPECS_2D, ids=lambda s: s.label)
    def test_direct_sum_2d(self, spec):
        grid = Grid((16, 16), (1.0, 1.0))
        rho = np.random.default_rng(1).normal(size=grid.shape)
        oracle = direct_convolution(spec, grid, rho)
        got = convolve(build_kernel(spec, grid), rho)
        assert np.max(np.abs(got - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    @pytest.mark.parametrize("spec", [SPECS_1D[0], SPECS_2D[1]], ids=["1d", "2d"])
    def test_direct_sum_periodic(self, spec):
        grid = Grid((20,) * spec.dimension, (1.0,) * spec.dimension, "periodic")
        rho = np.random.default_rng(2).normal(size=grid.shape)
        oracle = direct_convolution(spec, grid, rho)
        got = convolve(build_kernel(spec, grid), rho)
        assert np.max(np.abs(got - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    def test_rectangular_anisotropic(self):
        spec = SPECS_2D[0]
        grid = Grid((16, 12), (1.0, 0.6))
        rho = np.random.default_rng(3).normal(size=grid.shape)
        oracle = direct_convolution(spec, grid, rho)
        got = convolve(build_kernel(spec, grid), rho)
        assert np.max(np.abs(got - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    def test_half_gives_zero(self):
        grid = Grid((64,), (1.0,))
        k = build_kernel(SPECS_1D[0], grid)
        u = np.full(grid.shape, 0.5)
        assert np.all(k(1.0 - 2.0 * u) == 0.0)

    def test_boundary_weight_interior_equals_kernel_mass(self):
        spec = KernelSpec("mollifier", 1.0, 0.05, 1)
        grid = Grid((512,), (1.0,))
        k = boundary_weight(build_kernel(spec, grid))
        mass, _ = quad(lambda x: spec(abs(x)), -0.05, 0.05, epsabs=1e-14, epsrel=1e-13)
        assert k[256] == pytest.approx(mass, rel=1e-5)  # midpoint rule on a 51-cell support
        assert np.argmax(k) not in (0, 511)
        x0 = grid.spacing[0] / 2
        edge, _ = quad(lambda y: spec(abs(x0 - y)), 0.0, 0.06, points=[x0], epsabs=1e-14)
        assert k[0] == pytest.approx(edge, rel=1e-5)
        assert k[0] < 0.6 * k[256]

    def test_boundary_weight_gaussian_quadrature(self):
        spec = KernelSpec("gaussian", 1.0, 0.01, 1)
        grid = Grid((256,), (1.0,))
        k = boundary_weight(build_kernel(spec, grid))
        (x,) = grid.coordinates()
        # midpoint rule: spectrally accurate in the interior, O(h^2) where the Gaussian meets an edge
        for i, rel in ((0, 1e-4), (40, 1e-4), (128, 1e-10)):
            oracle, _ = quad(lambda y: spec(abs(x[i] - y)), 0.0, 1.0, points=[x[i]], epsabs=1e-14, epsrel=1e-13)
            assert k[i] == pytest.approx(oracle, rel=rel)

    def test_interior_saturation(self):
        spec = KernelSpec("mollifier", 1.0, 0.05, 1)
        small = boundary_weight(build_kernel(spec, Grid((200,), (1.0,))))
        large = boundary_weight(build_kernel(spec, Grid((400,), (2.0,))))
        # cells further than h from the right end of the small domain
        np.testing.assert_allclose(small[10:190], large[10:190], rtol=1e-13)
        np.testing.assert_allclose(small[20:180], small[100], rtol=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
    def test_linearity(self, seed, a, b):
        grid = Grid((32,), (1.0,))
        k = build_kernel(SPECS_1D[1], grid)
        r1, r2 = np.random.default_rng(seed).normal(size=(2, 32))
        lhs = k(a * r1 + b * r2)
        rhs = a * k(r1) + b * k(r2)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(lhs)))

    @pytest.mark.parametrize("spec", SPECS_1D + SPECS_2D, ids=lambda s: s.label)
    def test_self_adjoint(self, spec):
        grid = Grid((32,) * spec.dimension, (1.0,) * spec.dimension)
        k = build_kernel(spec, grid)
        r1, r2 = np.random.default_rng(4).normal(size=(2,) + grid.shape)
        assert grid.inner(k(r1), r2) == pytest.approx(grid.inner(r1, k(r2)), rel=1e-12)


class TestRandomFields:
    def test_smooth_fields_resolution_independent(self):
        coarse = random_smooth_fields(Grid((64,), (1.0,)), 3, seed=5)
        fine = random_smooth_fields(Grid((128,), (1.0,)), 3, seed=5)
        for c, f in zip(coarse, fine):
            # cell centres of the coarse grid are midpoints of fine-cell pairs; the fields are smooth
            np.testing.assert_allclose(c, 0.5 * (f[0::2] + f[1::2]), atol=5e-3)

    def test_sign_fields_share_envelope(self):
        grid = Grid((64,), (1.0,))
        fields = random_sign_fields(grid, 4, seed=1)
        norms = [grid.inner(f, f) for f in fields]
        np.testing.assert_allclose(norms, norms[0], rtol=1e-10)
        assert not np.allclose(fields[0], fields[1])

    def test_sobolev_norm_of_constant(self):
        grid = Grid((16,), (2.0,))
        assert sobolev_norm(grid, np.full(16, 3.0), 1, 2) == pytest.approx(3.0 * math.sqrt(2.0))


class TestReport:
    def test_gaussian_k2_below_line_integral(self):
        spec = KernelSpec("gaussian", 1.0, 0.01, 1)
        rep = kernel_property_report(spec, Grid((256,), (1.0,)), samples=8)
        assert rep.k2 <= math.sqrt(math.pi * 0.01) * (1 + 1e-12)
        assert rep.k2 == pytest.approx(math.sqrt(math.pi * 0.01), rel=1e-6)
        assert rep.passed and rep.symmetry_defect == 0.0

    @pytest.mark.parametrize("spec", [KernelSpec("gaussian", 1.0, 0.01, 1), KernelSpec("mollifier", 1.0, 0.05, 1)],
                             ids=["gaussian", "mollifier"])
    def test_refinement_stable(self, spec):
        coarse = kernel_property_report(spec, Grid((256,), (1.0,)), samples=16)
        fine = kernel_property_report(spec, Grid((512,), (1.0,)), samples=16)
        change = refinement_change(coarse, fine)
        assert change["r1"] < 0.1 and change["r2"] < 0.1 and change["rinf"] < 0.1

    def test_deterministic(self):
        spec = KernelSpec("mollifier", 1.0, 0.05, 1)
        a = kernel_property_report(spec, Grid((128,), (1.0,)), samples=4, seed=3)
        b = kernel_property_report(spec, Grid((128,), (1.0,)), samples=4, seed=3)
        assert a == b

    def test_table(self):
        rep = kernel_property_report(KernelSpec("newton", 1.0, 0.0, 1), Grid((64,), (1.0,)), samples=2)
        text = format_reports([rep])
        lines = text.splitlines()
        assert lines[0].split() == list(KernelReport.HEADER)
        assert "non-paper" in lines[1] and "newton(k=1,d=1)" in lines[1]

    def test_two_dimensional(self):
        rep = kernel_property_report(KernelSpec("newton", 1.0, 0.0, 2), Grid((16, 16), (1.0, 1.0)), samples=2)
        assert rep.passed and rep.paper_family

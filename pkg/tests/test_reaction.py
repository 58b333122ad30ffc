import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlchr.errors import DomainError
from nlchr.grid import Grid
from nlchr.reaction import ReactionSpec, eval_reaction, lipschitz_estimate, validate_reaction

VALID = [
    ReactionSpec("none"),
    ReactionSpec("logistic", alpha=2.0),
    ReactionSpec("inpainting", lam=3.0, h=0.4),
    ReactionSpec("polymer", sigma=1.5),
    ReactionSpec("cubic", sign=1),
    ReactionSpec("cubic", sign=-1),
    ReactionSpec("user_table", table_s=(0.0, 0.5, 1.0), table_g=(0.2, 0.5, -0.1)),
]
valid_ids = [f"{r.kind}{i}" for i, r in enumerate(VALID)]


class TestEvaluation:
    @pytest.mark.parametrize("s", [0.0, 1.0])
    def test_logistic_endpoints(self, s):
        assert eval_reaction(ReactionSpec("logistic", alpha=1.0), s, clamped=False) == 0.0

    def test_polymer_plateau(self):
        assert eval_reaction(ReactionSpec("polymer", sigma=2.0), 1.7) == -2.0
        assert eval_reaction(ReactionSpec("polymer", sigma=2.0), -0.4) == 0.0

    def test_cubic_half(self):
        assert eval_reaction(ReactionSpec("cubic", sign=1), 0.5, clamped=False) == pytest.approx(-3 / 8)

    def test_inpainting(self):
        assert eval_reaction(ReactionSpec("inpainting", lam=2.0, h=0.3), 0.5) == pytest.approx(-0.4)

    def test_unclamped_domain(self):
        with pytest.raises(DomainError):
            eval_reaction(ReactionSpec("logistic"), 1.2, clamped=False)
        with pytest.raises(DomainError):
            eval_reaction(ReactionSpec("logistic"), np.array([0.5, -1e-9]), clamped=False)

    def test_field_coefficients_broadcast(self):
        alpha = np.linspace(0.0, 1.0, 8)
        g = eval_reaction(ReactionSpec("logistic", alpha=alpha), np.full(8, 0.5))
        np.testing.assert_allclose(g, alpha / 4)

    def test_time_factor(self):
        spec = ReactionSpec("polymer", sigma=1.0, time_factor=lambda t: 1.0 + t)
        assert eval_reaction(spec, 0.5, t=2.0) == pytest.approx(-1.5)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(kind="exotic"), dict(kind="cubic", sign=2), dict(kind="user_table", table_s=(0.2, 1.0), table_g=(0, 0)),
         dict(kind="user_table", table_s=(0.0, 1.0), table_g=(0,)), dict(declared_lipschitz=-1.0)],
    )
    def test_invalid_spec(self, kwargs):
        with pytest.raises(DomainError):
            ReactionSpec(**kwargs)


@pytest.mark.parametrize("spec", VALID, ids=valid_ids)
def test_clamped_agrees_inside_and_is_flat_outside(spec):
    s = np.linspace(0.0, 1.0, 101)
    np.testing.assert_array_equal(eval_reaction(spec, s), eval_reaction(spec, s, clamped=False))
    below = eval_reaction(spec, np.linspace(-3.0, 0.0, 31))
    above = eval_reaction(spec, np.linspace(1.0, 4.0, 31))
    assert np.all(below == below[-1]) and np.all(above == above[0])


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(VALID), st.floats(-5.0, 0.0), st.floats(1.0, 6.0))
def test_sign_condition_extends_to_plateaus(spec, s_low, s_high):
    assert eval_reaction(spec, s_low) >= 0.0
    assert eval_reaction(spec, s_high) <= 0.0


class TestLipschitz:
    def test_logistic(self):
        assert lipschitz_estimate(ReactionSpec("logistic", alpha=1.0)) == pytest.approx(1.0, abs=1e-3)

    def test_polymer(self):
        assert lipschitz_estimate(ReactionSpec("polymer", sigma=3.0)) == pytest.approx(3.0, rel=1e-12)

    def test_none(self):
        assert lipschitz_estimate(ReactionSpec("none")) == 0.0

    def test_cubic_dense_oracle(self):
        # |d/ds (s^3 - s)| = |3 s^2 - 1| peaks at 2 when s = 1
        assert lipschitz_estimate(ReactionSpec("cubic")) == pytest.approx(2.0, abs=3e-3)

    def test_declared_dominates(self):
        assert lipschitz_estimate(ReactionSpec("logistic", declared_lipschitz=7.0)) == 7.0

    @pytest.mark.parametrize("spec", VALID, ids=valid_ids)
    def test_clamped_extension_inherits_constant(self, spec):
        inside = lipschitz_estimate(spec)
        wide = lipschitz_estimate(spec, s_range=(-2.0, 3.0))
        assert wide == pytest.approx(inside, rel=1e-9, abs=1e-12)

    def test_field_coefficient(self):
        grid = Grid((8,), (1.0,))
        sigma = np.linspace(0.5, 4.0, 8)
        assert lipschitz_estimate(ReactionSpec("polymer", sigma=sigma), grid) == pytest.approx(4.0)


class TestValidation:
    @pytest.mark.parametrize("spec", VALID, ids=valid_ids)
    def test_valid_specs_pass(self, spec):
        report = validate_reaction(spec)
        assert report.passed, report.to_text()
        assert [c.tag for c in report.checks] == ["G1", "G2", "G3", "G4", "GC"]

    def test_inpainting_above_one_fails_g3(self):
        report = validate_reaction(ReactionSpec("inpainting", lam=1.0, h=1.2))
        assert not report.get("G3").passed
        assert report.get("G3").value == pytest.approx(-0.2)
        assert [c.tag for c in report.failures()] == ["G3"]

    def test_inpainting_field_fails_somewhere(self):
        grid = Grid((8,), (1.0,))
        h = np.full(8, 0.5)
        h[3] = 1.2
        assert not validate_reaction(ReactionSpec("inpainting", lam=1.0, h=h), grid).get("G3").passed

    def test_cubic_minus_passes(self):
        assert validate_reaction(ReactionSpec("cubic", sign=-1)).get("G3").passed

    def test_bound_constant(self):
        assert validate_reaction(ReactionSpec("logistic", alpha=2.0)).get("GC").value == pytest.approx(0.5)

    def test_time_lipschitz(self):
        spec = ReactionSpec("polymer", sigma=1.0, time_factor=lambda t: 1.0 + 3.0 * t)
        g4 = validate_reaction(spec, t_range=(0.0, 1.0)).get("G4")
        assert g4.passed and g4.value == pytest.approx(3.0)

    def test_nan_coefficient_fails_g1(self):
        report = validate_reaction(ReactionSpec("polymer", sigma=math.nan))
        assert not report.get("G1").passed

    def test_text(self):
        text = validate_reaction(ReactionSpec("logistic")).to_text()
        assert text.splitlines()[0].startswith("G1   PASS")

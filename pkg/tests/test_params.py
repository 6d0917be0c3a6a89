from __future__ import annotations

import warnings
from dataclasses import replace

import pytest

from h2p.errors import ValidationError
from h2p.params import (CorrelationStructure, DesignInputs, DesignWarning, EffectSpec,
                        VarianceSpec, ceil_count, check, validate, vif_set)


class TestValidate:
    def test_worked_example_is_valid(self, circl):
        assert validate(circl) is circl
        assert check(circl) == ([], [])

    def test_idempotent(self, circl):
        assert validate(validate(circl)) == validate(circl)

    def test_cluster_size_below_two(self, circl):
        with pytest.raises(ValidationError) as exc:
            validate(replace(circl, m=1))
        assert [v.field for v in exc.value.violations] == ["m"]
        assert exc.value.violations[0].value == 1

    def test_between_endpoint_bound_is_error_when_singular(self, circl):
        bad = replace(circl, corr=replace(circl.corr, rho1_12=0.05))
        with pytest.raises(ValidationError) as exc:
            validate(bad)
        (v,) = exc.value.violations
        assert v.field == "corr.rho1_12"
        assert "sqrt(rho0_1*rho0_2)=0.025" in v.constraint

    def test_between_endpoint_bound_is_warning_when_nonsingular(self, circl):
        # bound exceeded, but VIF determinant still positive at m=3
        x = replace(circl, m=3, corr=replace(circl.corr, rho1_12=0.03))
        assert vif_set(x.corr, x.m).determinant > 0
        with pytest.warns(DesignWarning):
            validate(x)

    def test_all_violations_reported(self, circl):
        x = replace(circl, m=0, alpha=1.5, target_power=0.0,
                    variances=VarianceSpec(-1.0, 0.25),
                    corr=CorrelationStructure(1.0, 0.025, 0.01, 0.05))
        with pytest.raises(ValidationError) as exc:
            validate(x)
        fields = {v.field for v in exc.value.violations}
        assert {"m", "alpha", "target_power", "variances.sigma1_sq", "corr.rho0_1"} <= fields
        assert "5 invalid" in str(exc.value) or len(exc.value.violations) >= 5

    @pytest.mark.parametrize("kw", [
        {"K": None}, {"K1": 10, "ratio": 1.0}, {"K": None, "K1": 10}, {"K": 2.5}])
    def test_allocation_choice(self, circl, kw):
        with pytest.raises(ValidationError):
            validate(replace(circl, **kw))

    def test_unequal_allocation_accepted(self, circl):
        x = replace(circl, K=None, K1=12, ratio=1.5)
        validate(x)
        assert x.n_treated == 12 and x.alloc_factor == pytest.approx(1 + 1 / 1.5)
        assert x.with_clusters(20).K1 == 20

    def test_negative_icc_rejected(self, circl):
        with pytest.raises(ValidationError):
            validate(replace(circl, corr=replace(circl.corr, rho0_2=-0.01)))

    def test_bool_is_not_a_number(self, circl):
        with pytest.raises(ValidationError):
            validate(replace(circl, m=True))

    def test_binary_origin_must_match_construction(self, circl):
        v = VarianceSpec.from_binary(0.66, 0.60, 0.025, 0.025)
        validate(replace(circl, variances=v))
        forged = replace(v, sigma1_sq=0.23)
        with pytest.raises(ValidationError) as exc:
            validate(replace(circl, variances=forged))
        assert exc.value.violations[0].field == "variances.sigma1_sq"

    def test_combined_overrides_checked(self, circl):
        from h2p.params import CombinedOverrides

        with pytest.raises(ValidationError):
            validate(replace(circl, combined=CombinedOverrides(sigma_c_sq=-0.5)))

    def test_no_warning_for_valid_inputs(self, circl):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            validate(circl)


class TestHelpers:
    def test_vif_set(self, circl):
        v = vif_set(circl.corr, 300)
        assert v.vif1 == pytest.approx(8.475, abs=1e-12)
        assert v.vif2 == pytest.approx(8.475, abs=1e-12)
        assert v.vif12 == pytest.approx(3.04, abs=1e-12)
        one = vif_set(circl.corr, 1)
        assert (one.vif1, one.vif2, one.vif12) == (1.0, 1.0, 0.05)

    @pytest.mark.parametrize("x, expected", [
        (12.35, 13), (13.0, 13), (13.0 + 1e-12, 13), (13.0001, 14), (0.2, 1)])
    def test_ceil_count(self, x, expected):
        assert ceil_count(x) == expected

    def test_equal_allocation_defaults(self):
        x = DesignInputs(EffectSpec(0.1, 0.1), VarianceSpec(0.2, 0.2),
                         CorrelationStructure(0.0, 0.0, 0.0, 0.0), m=10, K=5)
        assert x.r == 1.0 and x.alloc_factor == 2.0 and x.n_treated == 5

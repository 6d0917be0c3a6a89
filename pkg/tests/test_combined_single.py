from __future__ import annotations

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from h2p.combined import (combined_cluster_size, combined_clusters, combined_lambda,
                          combined_parameters, combined_power)
from h2p.errors import InfeasibleDesignError, SignConstraintError
from h2p.numerics import required_ncp, DistributionSpec
from h2p.params import CombinedOverrides, CorrelationStructure, DesignInputs, EffectSpec, VarianceSpec
from h2p.single_df import (single1df_cluster_size, single1df_clusters, single1df_lambda,
                           single1df_power, z_correlation)

NCP80 = required_ncp(0.05, 0.80, DistributionSpec.chisq(1))


@pytest.fixture
def rounded(circl):
    """Worked example with the combined variance supplied as 0.50."""
    return replace(circl, combined=CombinedOverrides(sigma_c_sq=0.50))


class TestCombined:
    def test_parameters_derived(self, circl):
        cp = combined_parameters(circl)
        assert cp.beta_c == pytest.approx(0.2)
        assert cp.sigma_c_sq == pytest.approx(0.503979, abs=1e-6)
        assert cp.rho0_c == pytest.approx(0.0333262, abs=1e-6)
        assert cp.derived == ("beta_c", "sigma_c_sq", "rho0_c")

    def test_overrides_take_precedence(self, circl):
        x = replace(circl, combined=CombinedOverrides(beta_c=0.3, sigma_c_sq=0.4, rho0_c=0.02))
        cp = combined_parameters(x)
        assert (cp.beta_c, cp.sigma_c_sq, cp.rho0_c, cp.derived) == (0.3, 0.4, 0.02, ())

    def test_worked_example_with_rounded_variance(self, rounded):
        r = combined_power(rounded)
        assert abs(r.lam - 16.42) < 0.02
        assert abs(r.power - 0.9818) < 5e-4
        k = combined_clusters(rounded)
        assert abs(k.K_real - 7.17) < 0.01 and k.K_required == 8
        m = combined_cluster_size(rounded)
        assert abs(m.m_real - 22.42) < 0.01 and m.m_required == 23

    def test_unrounded_pipeline(self, circl):
        r = combined_power(circl)
        assert abs(r.lam - 16.287) < 1e-3
        assert abs(r.lam - 16.42) < 0.5
        assert combined_clusters(circl).K_required == 8
        assert combined_cluster_size(circl).m_required == 23

    def test_f_reference(self, circl):
        assert abs(combined_power(circl, "f").power - 0.9727) < 5e-4

    def test_null_effect_gives_size(self, circl):
        r = combined_power(replace(circl, effects=EffectSpec(0.0, 0.0)))
        assert r.lam == 0.0 and r.power == pytest.approx(0.05, abs=1e-12)

    def test_large_cluster_limit(self, circl):
        cp = combined_parameters(circl)
        limit = circl.K * cp.beta_c ** 2 / (2 * cp.sigma_c_sq * cp.rho0_c)
        big = combined_lambda(replace(circl, m=10**8))
        assert big == pytest.approx(limit, rel=1e-6)

    def test_k_scales_inverse_square_in_effect(self, circl):
        k1 = combined_clusters(circl).K_real
        k2 = combined_clusters(replace(circl, combined=CombinedOverrides(beta_c=0.4))).K_real
        assert k2 == pytest.approx(k1 / 4, rel=1e-12)

    def test_lower_target_needs_fewer_clusters(self, circl):
        assert combined_clusters(replace(circl, target_power=0.5)).K_real < \
            combined_clusters(circl).K_real

    def test_infeasible_cluster_size(self, circl):
        with pytest.raises(InfeasibleDesignError) as exc:
            combined_cluster_size(replace(circl, K=1))
        assert exc.value.min_feasible_K >= 2

    def test_no_clustering_matches_two_sample_formula(self, circl):
        x = replace(circl, corr=CorrelationStructure(0.0, 0.0, 0.0, 0.05))
        cp = combined_parameters(x)
        m = combined_cluster_size(x).m_real
        assert m == pytest.approx(2 * NCP80 * cp.sigma_c_sq / (x.K * cp.beta_c ** 2), rel=1e-12)


class TestZCorrelation:
    def test_worked_example(self, circl):
        assert z_correlation(circl.corr, 300).value == pytest.approx(3.04 / 8.475, abs=1e-12)

    def test_single_subject_and_zero(self, circl):
        assert z_correlation(circl.corr, 1).value == pytest.approx(0.05)
        assert z_correlation(CorrelationStructure(0.1, 0.2, 0.0, 0.0), 50).value == 0.0


class TestSingleDf:
    def test_worked_example(self, circl):
        r = single1df_power(circl)
        assert abs(r.lam - 16.30) < 0.02 and abs(r.power - 0.9811) < 5e-4
        k = single1df_clusters(circl)
        assert abs(k.K_real - 7.22) < 0.01 and k.K_required == 8
        m = single1df_cluster_size(circl)
        assert abs(m.m_real - 22.69) < 0.01 and m.m_required == 23

    def test_f_reference(self, circl):
        assert abs(single1df_power(circl, "f").power - 0.9729) < 5e-4

    def test_null_effect(self, circl):
        assert single1df_power(replace(circl, effects=EffectSpec(0.0, 0.0))).power == \
            pytest.approx(0.05, abs=1e-12)

    def test_opposite_signs_rejected(self, circl):
        with pytest.raises(SignConstraintError, match="reverse the coding"):
            single1df_power(replace(circl, effects=EffectSpec(0.1, -0.1)))

    def test_halving_effects_quadruples_k(self, circl):
        half = replace(circl, effects=EffectSpec(0.05, 0.05))
        assert single1df_clusters(half).K_real == pytest.approx(
            4 * single1df_clusters(circl).K_real, rel=1e-12)

    def test_cluster_size_meets_target(self, circl):
        m = single1df_cluster_size(circl).m_required
        assert single1df_power(replace(circl, m=m)).power >= 0.8
        assert single1df_power(replace(circl, m=m - 1)).power < 0.8

    def test_infeasible_cluster_size(self, circl):
        with pytest.raises(InfeasibleDesignError) as exc:
            single1df_cluster_size(replace(circl, K=1))
        assert exc.value.limiting_lambda < NCP80

    def test_no_clustering_closed_form(self, circl):
        x = replace(circl, corr=CorrelationStructure(0.0, 0.0, 0.0, 0.05))
        s1, s2 = 0.23, 0.25
        per_m = x.K / 2 * (0.1 / math.sqrt(s1) + 0.1 / math.sqrt(s2)) ** 2 / (2 * 1.05)
        assert single1df_cluster_size(x).m_real == pytest.approx(NCP80 / per_m, rel=1e-9)

    def test_unit_ratio_matches_equal_allocation(self, circl):
        u = replace(circl, K=None, K1=15, ratio=1.0)
        assert single1df_lambda(u) == single1df_lambda(circl)
        assert single1df_power(u) == single1df_power(circl)
        assert replace(single1df_clusters(u), K2_required=None) == single1df_clusters(circl)
        assert single1df_cluster_size(u) == single1df_cluster_size(circl)


def _design(b1, b2, s1, s2, r01, r02, frac, r2, K, m):
    r1 = frac * math.sqrt(r01 * r02)
    return DesignInputs(EffectSpec(b1, b2), VarianceSpec(s1, s2),
                        CorrelationStructure(r01, r02, r1, r2), m=m, K=K)


designs = st.builds(
    _design, st.floats(0.01, 0.3), st.floats(0.01, 0.3), st.floats(0.05, 0.4),
    st.floats(0.05, 0.4), st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 1),
    st.floats(0, 0.9), st.integers(2, 50), st.integers(2, 500))


class TestProperties:
    @settings(max_examples=80, deadline=None)
    @given(x=designs)
    def test_label_swap_symmetry(self, x):
        c = x.corr
        swapped = replace(x, effects=EffectSpec(x.effects.beta2, x.effects.beta1),
                          variances=VarianceSpec(x.variances.sigma2_sq, x.variances.sigma1_sq),
                          corr=replace(c, rho0_1=c.rho0_2, rho0_2=c.rho0_1))
        assert single1df_lambda(swapped) == pytest.approx(single1df_lambda(x), rel=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(x=designs)
    def test_lambda_monotone(self, x):
        lam = single1df_lambda(x)
        assert single1df_lambda(replace(x, K=x.K + 1)) > lam
        e = x.effects
        assert single1df_lambda(replace(x, effects=EffectSpec(e.beta1 * 1.1, e.beta2))) > lam
        v = x.variances
        assert single1df_lambda(replace(x, variances=VarianceSpec(v.sigma1_sq * 1.1,
                                                                  v.sigma2_sq))) < lam

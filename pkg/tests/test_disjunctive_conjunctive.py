from __future__ import annotations

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from h2p.conjunctive import (conjunctive_cluster_size, conjunctive_clusters, conjunctive_power,
                             wald_pair)
from h2p.disjunctive import (disjunctive_cluster_size, disjunctive_clusters, disjunctive_lambda,
                             disjunctive_power, omega_entries)
from h2p.errors import NotSupportedError, SignConstraintError, ValidationError
from h2p.numerics import bvn_upper_orthant, critical_value, DistributionSpec
from h2p.params import CorrelationStructure, DesignInputs, EffectSpec, VarianceSpec, vif_set


class TestDisjunctive:
    def test_vifs_at_example(self, circl):
        v = vif_set(circl.corr, 300)
        assert v.vif1 == pytest.approx(8.475, abs=1e-12)
        assert v.vif12 == pytest.approx(3.04, abs=1e-12)

    def test_omega_entries(self, circl):
        o = omega_entries(circl)
        assert o.omega1_sq == pytest.approx(4 * 0.23 * 8.475 / 300)
        assert o.omega12 == pytest.approx(4 * math.sqrt(0.23 * 0.25) * 3.04 / 300)

    def test_worked_example(self, circl):
        r = disjunctive_power(circl)
        assert abs(r.lam - 16.32) < 0.02 and abs(r.power - 0.9601) < 5e-4
        k = disjunctive_clusters(circl)
        assert abs(k.K_real - 8.856) < 0.01 and k.K_required == 9
        m = disjunctive_cluster_size(circl)
        assert abs(m.m_real - 33.84) < 0.01 and m.m_required == 34

    def test_f_reference(self, circl):
        r = disjunctive_power(circl, "f")
        assert r.dist.df2 == 26
        assert abs(r.critical_value - 3.369) < 1e-3
        assert abs(r.power - 0.9363) < 5e-4

    def test_f_needs_at_least_as_many_clusters(self, circl):
        for target in (0.7, 0.8, 0.9):
            x = replace(circl, target_power=target)
            assert disjunctive_clusters(x, "f").K_required >= disjunctive_clusters(x).K_required

    def test_uncorrelated_estimators_add(self, circl):
        x = replace(circl, corr=CorrelationStructure(0.025, 0.025, 0.0, 0.0))
        v = vif_set(x.corr, x.m)
        lam1 = x.m * x.K * 0.01 / (2 * 0.23 * v.vif1)
        lam2 = x.m * x.K * 0.01 / (2 * 0.25 * v.vif2)
        assert disjunctive_lambda(x) == pytest.approx(lam1 + lam2, rel=1e-12)

    def test_one_zero_effect_reduces_to_single_outcome(self, circl):
        x = replace(circl, effects=EffectSpec(0.1, 0.0))
        v = vif_set(x.corr, x.m)
        lam1 = x.m * x.K * 0.01 / (2 * 0.23 * v.vif1)
        assert disjunctive_lambda(x) == pytest.approx(lam1 / (1 - v.vif12 ** 2
                                                              / (v.vif1 * v.vif2)), rel=1e-12)

    def test_unequal_allocation_not_supported(self, circl):
        u = replace(circl, K=None, K1=15, ratio=1.0)
        for fn in (disjunctive_power, disjunctive_clusters, disjunctive_cluster_size):
            with pytest.raises(NotSupportedError):
                fn(u)

    def test_singular_covariance_rejected(self, circl):
        # singular only once rho1_12 leaves its admissible range
        x = replace(circl, corr=CorrelationStructure(0.02, 0.02, 0.05, 0.5))
        assert vif_set(x.corr, x.m).determinant < 0
        with pytest.raises(ValidationError, match="rho1_12"):
            disjunctive_power(x)

    def test_f_power_approaches_chisq(self, circl):
        x = replace(circl, K=4000, m=5)
        assert disjunctive_power(x, "f").power == pytest.approx(disjunctive_power(x).power,
                                                                abs=2e-3)


class TestConjunctive:
    def test_wald_pair(self, circl):
        w = wald_pair(circl)
        assert w.zeta1 == pytest.approx(0.1 * math.sqrt(30) / math.sqrt(4 * 0.23 * 8.475 / 300))
        assert w.phi12 == pytest.approx(3.04 / 8.475, abs=1e-12)

    def test_worked_example_normal(self, circl):
        assert abs(conjunctive_power(circl, "mvn").power - 0.9143) < 5e-4
        assert conjunctive_clusters(circl, "mvn").K_required == 11
        m = conjunctive_cluster_size(circl, "mvn")
        assert abs(m.m_real - 73.80) < 0.01 and m.m_required == 74

    def test_worked_example_t(self, circl):
        r = conjunctive_power(circl)
        assert abs(r.critical_value - 1.706) < 1e-3
        assert abs(r.power - 0.8992) < 5e-4
        assert conjunctive_clusters(circl).K_required == 12
        m = conjunctive_cluster_size(circl)
        assert abs(m.m_real - 85.27) < 0.01 and m.m_required == 86

    def test_t_needs_at_least_as_many_clusters(self, circl):
        for target in (0.7, 0.8, 0.9):
            x = replace(circl, target_power=target)
            assert conjunctive_clusters(x, "mvt").K_required >= \
                conjunctive_clusters(x, "mvn").K_required

    def test_unequal_allocation_not_supported(self, circl):
        with pytest.raises(NotSupportedError):
            conjunctive_power(replace(circl, K=None, K1=15, ratio=2.0))

    def test_negative_effect_rejected(self, circl):
        with pytest.raises(SignConstraintError, match="reverse the coding"):
            conjunctive_power(replace(circl, effects=EffectSpec(-0.1, 0.1)))

    def test_huge_effects_give_power_one(self, circl):
        x = replace(circl, effects=EffectSpec(5.0, 5.0))
        assert conjunctive_power(x, "mvn").power == pytest.approx(1.0, abs=1e-9)

    def test_t_approaches_normal(self, circl):
        x = replace(circl, K=20000, m=2, effects=EffectSpec(0.01, 0.01))
        assert conjunctive_power(x, "mvt").power == pytest.approx(
            conjunctive_power(x, "mvn").power, abs=2e-3)

    def test_can_exceed_two_df_power_when_phi_is_high(self):
        # strongly correlated statistics with equal means: both-significant is
        # nearly as likely as one, and the 2-DF test pays for its second df
        x = DesignInputs(EffectSpec(0.1, 0.1), VarianceSpec(0.25, 0.25),
                         CorrelationStructure(0.0, 0.0, 0.0, 0.95), m=10, K=10)
        assert conjunctive_power(x, "mvn").power > disjunctive_power(x).power


def _design(b1, b2, r0, frac, r2, K, m):
    return DesignInputs(EffectSpec(b1, b2), VarianceSpec(0.23, 0.25),
                        CorrelationStructure(r0, r0, frac * r0, r2), m=m, K=K)


designs = st.builds(_design, st.floats(0.0, 0.3), st.floats(0.0, 0.3),
                    st.floats(0, 0.1).map(lambda r: r if r > 1e-9 else 0.0),
                    st.floats(0, 0.99), st.floats(0, 0.8), st.integers(3, 40),
                    st.integers(2, 300))


class TestProperties:
    @settings(max_examples=80, deadline=None)
    @given(x=designs)
    def test_relabelling_invariance(self, x):
        swapped = replace(x, effects=EffectSpec(x.effects.beta2, x.effects.beta1),
                          variances=VarianceSpec(0.25, 0.23))
        assert disjunctive_lambda(swapped) == pytest.approx(disjunctive_lambda(x), rel=1e-10,
                                                            abs=1e-300)
        a = conjunctive_power(x, "mvn").power
        assert conjunctive_power(swapped, "mvn").power == pytest.approx(a, abs=1e-9)

    @settings(max_examples=80, deadline=None)
    @given(x=designs)
    def test_conjunctive_bounded_by_one_sided_components(self, x):
        w = wald_pair(x)
        c = critical_value(x.alpha, DistributionSpec("mvn"))
        p = conjunctive_power(x, "mvn").power
        both_fail = bvn_upper_orthant(-c, -c, -w.zeta1, -w.zeta2, w.phi12)
        at_least_one = 1.0 - both_fail
        one1 = 0.5 * math.erfc((c - w.zeta1) / math.sqrt(2))
        one2 = 0.5 * math.erfc((c - w.zeta2) / math.sqrt(2))
        assert p <= min(one1, one2) + 1e-9
        assert max(one1, one2) <= at_least_one + 1e-9

    @settings(max_examples=60, deadline=None)
    @given(x=designs.filter(lambda d: d.effects.beta1 > 0 and d.effects.beta2 > 0))
    def test_equal_effect_lambda_decreases_with_estimator_covariance(self, x):
        # for same-sign effects a larger between-outcome covariance lowers lambda
        c = x.corr
        hi = replace(x, corr=replace(c, rho2_12=min(c.rho2_12 + 0.1, 0.9)))
        if vif_set(hi.corr, x.m).determinant <= 0 or hi.corr == c:
            return
        b1, b2 = x.effects.beta1, x.effects.beta2
        v = vif_set(hi.corr, x.m)
        z1, z2 = b1 / math.sqrt(0.23 * v.vif1), b2 / math.sqrt(0.25 * v.vif2)
        phi = v.vif12 / math.sqrt(v.vif1 * v.vif2)
        # d(lambda)/d(phi) < 0 while phi < min(z1/z2, z2/z1); phi only grows here
        if phi >= min(z1 / z2, z2 / z1):
            return
        assert disjunctive_lambda(hi) <= disjunctive_lambda(x) * (1 + 1e-12)

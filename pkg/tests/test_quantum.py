import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from clickmux.quantum import (
    asymptotics,
    bare_joint,
    branch_odds,
    click_probabilities,
    cp_closed_form,
    post_selected_joint,
    qb_closed_form,
)
from clickmux.stats import (
    MultiplexerConfig,
    coincident_probability,
    post_select,
    sub_binomiality,
)

N4 = MultiplexerConfig(2)


class TestClickProbabilities:
    def test_vacuum_never_clicks(self):
        c, d = click_probabilities(0.0, N4)
        assert (c, d) == (0.0, 1.0)

    def test_unit_amplitude(self):
        # oracle: 1 - e^{-1/4} evaluated directly
        c, d = click_probabilities(1.0, N4)
        assert abs(c - (1.0 - math.exp(-0.25))) < 1e-12
        assert abs(c - 0.22119921692859512) < 1e-12
        assert abs(d - math.exp(-0.25)) < 1e-12

    def test_strong_field_always_clicks(self):
        c, _ = click_probabilities(50.0, N4)
        assert abs(c - 1.0) <= 1e-12

    @given(
        alpha=st.floats(min_value=0.0, max_value=40.0),
        depth=st.integers(1, 12),
    )
    def test_exact_complementarity(self, alpha, depth):
        c, d = click_probabilities(alpha, MultiplexerConfig(depth))
        assert c + d == 1.0

    @pytest.mark.parametrize("alpha", [-1.0, math.nan, math.inf])
    def test_invalid_amplitude(self, alpha):
        with pytest.raises(ValueError):
            click_probabilities(alpha, N4)


class TestBareJoint:
    def test_vacuum_point_mass(self):
        dist = bare_joint(0.0, N4)
        assert dist.table[0, 0] == 1.0

    def test_no_click_probability(self):
        # oracle: (e^{-1/4})^4 = e^{-1}
        dist = bare_joint(1.0, N4)
        assert abs(dist.table[0, 0] - math.exp(-1.0)) < 1e-12

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("depth", range(1, 11))
    def test_bare_statistics_are_binomial(self, alpha, depth):
        cfg = MultiplexerConfig(depth)
        dist = bare_joint(alpha, cfg)
        assert abs(sub_binomiality(dist, cfg.degree)) <= 1e-10

    @given(alpha=st.floats(min_value=0.05, max_value=4.0), depth=st.integers(1, 8))
    def test_branch_independence(self, alpha, depth):
        dist = bare_joint(alpha, MultiplexerConfig(depth))
        marginal_1 = dist.table.sum(axis=1)
        marginal_2 = dist.table.sum(axis=0)
        assert np.max(np.abs(dist.table - np.outer(marginal_1, marginal_2))) <= 1e-14


class TestBranchOdds:
    def test_vacuum(self):
        assert branch_odds(0.0, N4) == 0.0

    def test_unit_amplitude(self):
        # oracle: 2 (e^{1/4} - 1)
        assert abs(branch_odds(1.0, N4) - 2.0 * (math.exp(0.25) - 1.0)) < 1e-12
        assert abs(branch_odds(1.0, N4) - 0.568050833375483) < 1e-12

    def test_large_degree_limit(self):
        assert abs(branch_odds(1.0, MultiplexerConfig(20)) - 0.5) < 1e-6

    def test_overflow_raises(self):
        with pytest.raises(OverflowError):
            branch_odds(50.0, MultiplexerConfig(1))  # |alpha|^2/N = 1250

    def test_overflow_threshold_is_exclusive(self):
        cfg = MultiplexerConfig(1)
        branch_odds(math.sqrt(2 * 699.0), cfg)  # just below, fine
        with pytest.raises(OverflowError):
            branch_odds(math.sqrt(2 * 700.5), cfg)


class TestPostSelectedJoint:
    def test_vacuum(self):
        dist = post_selected_joint(0.0, N4)
        assert dist.table[0, 0] == 1.0

    def test_unit_amplitude_entries(self):
        # oracle: C^{k1+k2}/(C+1)^2 with C = 2(e^{1/4} - 1)
        odds = 2.0 * (math.exp(0.25) - 1.0)
        expected = np.array(
            [[1.0, odds], [odds, odds * odds]]
        ) / (odds + 1.0) ** 2
        dist = post_selected_joint(1.0, N4)
        assert np.max(np.abs(dist.table - expected)) < 1e-15
        frozen = np.array(
            [
                [0.40670519960097573, 0.23102922757147645],
                [0.23102922757147645, 0.13123634525607134],
            ]
        )
        assert np.max(np.abs(dist.table - frozen)) < 1e-12
        assert abs(dist.table.sum() - 1.0) <= 1e-12

    @given(alpha=st.floats(min_value=0.01, max_value=6.0), depth=st.integers(1, 10))
    @settings(max_examples=60)
    def test_matches_post_selected_bare_table(self, alpha, depth):
        cfg = MultiplexerConfig(depth)
        via_table = post_select(bare_joint(alpha, cfg))
        closed = post_selected_joint(alpha, cfg)
        assert np.max(np.abs(via_table.table - closed.table)) <= 1e-12


class TestQbClosedForm:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 50.0])
    def test_vanishes_at_degree_two(self, alpha):
        assert qb_closed_form(alpha, MultiplexerConfig(1)) == 0.0

    def test_unit_amplitude(self):
        assert abs(qb_closed_form(1.0, N4) - (-0.22119921692859518)) < 1e-12

    def test_strong_field_saturation(self):
        assert abs(qb_closed_form(50.0, MultiplexerConfig(10)) - (-1.0)) < 2e-3

    @given(alpha=st.floats(min_value=0.01, max_value=20.0), depth=st.integers(2, 12))
    def test_strictly_negative_beyond_degree_two(self, alpha, depth):
        assert qb_closed_form(alpha, MultiplexerConfig(depth)) < 0.0

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 5.0])
    @pytest.mark.parametrize("depth", range(2, 11))
    def test_matches_table_pipeline(self, alpha, depth):
        cfg = MultiplexerConfig(depth)
        table_value = sub_binomiality(post_selected_joint(alpha, cfg), cfg.degree)
        assert abs(qb_closed_form(alpha, cfg) - table_value) <= 1e-10

    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
    def test_non_increasing_in_depth(self, alpha):
        values = [qb_closed_form(alpha, MultiplexerConfig(m)) for m in range(1, 21)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
    def test_converges_to_asymptote(self, alpha):
        limit = asymptotics(alpha).qb_inf
        assert abs(qb_closed_form(alpha, MultiplexerConfig(20)) - limit) < 1e-5

    def test_total_in_overflow_regime(self):
        assert qb_closed_form(50.0, MultiplexerConfig(1)) == 0.0
        assert qb_closed_form(80.0, MultiplexerConfig(2)) == -1.0  # x = 1600


class TestCpClosedForm:
    def test_vacuum(self):
        assert cp_closed_form(0.0, N4) == 0.0

    def test_unit_amplitude(self):
        # oracle: (C/(C+1))^2
        odds = 2.0 * (math.exp(0.25) - 1.0)
        assert abs(cp_closed_form(1.0, N4) - (odds / (odds + 1.0)) ** 2) < 1e-12

    def test_infinite_degree_limit(self):
        value = cp_closed_form(1.0, MultiplexerConfig(20))
        assert abs(value - 1.0 / 9.0) < 1e-5

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("depth", range(1, 11))
    def test_matches_table_pipeline(self, alpha, depth):
        cfg = MultiplexerConfig(depth)
        table_value = coincident_probability(post_selected_joint(alpha, cfg))
        assert abs(cp_closed_form(alpha, cfg) - table_value) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_non_increasing_and_above_asymptote(self, alpha):
        limit = asymptotics(alpha).cp_inf
        values = [cp_closed_form(alpha, MultiplexerConfig(m)) for m in range(1, 21)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
        assert all(v >= limit > 0.0 for v in values)

    def test_total_in_overflow_regime(self):
        assert cp_closed_form(50.0, MultiplexerConfig(1)) == 1.0


class TestAsymptotics:
    def test_vacuum(self):
        limits = asymptotics(0.0)
        assert (limits.c_inf, limits.qb_inf, limits.cp_inf) == (0.0, 0.0, 0.0)

    def test_unit_amplitude(self):
        limits = asymptotics(1.0)
        assert limits.c_inf == 0.5
        assert abs(limits.qb_inf - (-1.0 / 3.0)) < 1e-15
        assert abs(limits.cp_inf - 1.0 / 9.0) < 1e-15

    def test_strong_field(self):
        limits = asymptotics(50.0)
        assert limits.c_inf == 1250.0
        assert abs(limits.qb_inf - (-1250.0 / 1251.0)) < 1e-15
        assert abs(limits.qb_inf - (-0.9992006394884093)) < 1e-12

    @given(alpha=st.floats(min_value=0.0, max_value=100.0))
    def test_square_identity_exact(self, alpha):
        limits = asymptotics(alpha)
        assert limits.qb_inf * limits.qb_inf == limits.cp_inf
        assert -1.0 < limits.qb_inf <= 0.0
        assert 0.0 <= limits.cp_inf < 1.0

    def test_invalid_amplitude(self):
        with pytest.raises(ValueError):
            asymptotics(-2.0)

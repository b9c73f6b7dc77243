#!/usr/bin/env python3
"""
Unit tests for function tables, joint distributions and benchmark generators
"""

import json
import math
import os

import numpy as np
import pytest

from oneway_bounds.core.errors import CapExceededError, ValidationError
from oneway_bounds.core.tables import (STAR, FunctionTable, JointDistribution, MassFunction, conditional_row,
                                       double_factorial, enumerate_matchings, is_product, load_distribution,
                                       load_function_table, make_benchmark, make_copy_distribution, make_npm,
                                       matching_images, npm_radius, popcounts, save_distribution,
                                       save_function_table)


class TestFunctionTable:
    """Test FunctionTable validation and row statistics"""

    def test_boolean_table_properties(self, xor_table):
        assert xor_table.x_size == 2
        assert xor_table.y_size == 2
        assert xor_table.is_boolean
        assert xor_table.is_total
        assert not xor_table.is_trivial()

    def test_value_outside_range_names_cell(self):
        with pytest.raises(ValidationError, match=r"values\[1\]\[0\] = 3 is outside \{0\.\.2\}"):
            FunctionTable(np.array([[0, 1], [3, 2]]), z_size=3)

    def test_undefined_marker_requires_partial(self):
        with pytest.raises(ValidationError, match="partial is false"):
            FunctionTable(np.array([[0, STAR]]))
        table = FunctionTable(np.array([[0, STAR]]), partial=True)
        assert not table.is_total

    def test_non_integer_values_rejected(self):
        with pytest.raises(ValidationError, match="not an integer"):
            FunctionTable(np.array([[0.5, 1.0]]))

    def test_z_size_must_be_at_least_two(self):
        with pytest.raises(ValidationError):
            FunctionTable(np.zeros((2, 2), dtype=int), z_size=1)

    def test_values_are_read_only(self, xor_table):
        with pytest.raises(ValueError):
            xor_table.values[0, 0] = 1

    def test_distinct_rows_and_triviality(self):
        table = FunctionTable(np.array([[0, 1, 1], [0, 1, 1], [0, 1, 1]]))
        assert table.distinct_rows().shape == (1, 3)
        assert table.is_trivial()

    def test_scaled_values(self):
        table = FunctionTable(np.array([[0, 1, 2, STAR]]), z_size=4, partial=True)
        scaled = table.scaled()
        assert scaled[0, :3].tolist() == [0.25, 0.5, 0.75]
        assert np.isnan(scaled[0, 3])

    def test_dict_form(self, ternary_table):
        data = ternary_table.to_dict()
        assert data["z_size"] == 3
        assert FunctionTable.from_dict(data).equals(ternary_table)

    def test_from_dict_rejects_booleans_and_ragged_rows(self):
        with pytest.raises(ValidationError, match=r"values\[0\]\[1\]"):
            FunctionTable.from_dict({"x_size": 1, "y_size": 2, "z_size": 2, "values": [[0, True]]})
        with pytest.raises(ValidationError, match=r"values\[1\] must hold"):
            FunctionTable.from_dict({"x_size": 2, "y_size": 2, "z_size": 2, "values": [[0, 1], [1]]})
        with pytest.raises(ValidationError, match="missing 'z_size'"):
            FunctionTable.from_dict({"x_size": 1, "y_size": 1, "values": [[0]]})


class TestJointDistribution:
    """Test JointDistribution validation, marginals and conditionals"""

    def test_mass_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="distribution mass"):
            JointDistribution(np.array([[0.5, 0.4]]))

    def test_negative_entry_names_cell(self):
        with pytest.raises(ValidationError, match=r"p\[0\]\[1\]"):
            JointDistribution(np.array([[1.2, -0.2]]))

    def test_small_rounding_is_tolerated(self):
        mu = JointDistribution(np.array([[0.5, 0.5 + 1e-11]]))
        assert mu.total == pytest.approx(1.0)

    def test_marginals(self, correlated_4x4):
        assert np.allclose(correlated_4x4.marginal_x().probs, 0.25)
        assert np.allclose(correlated_4x4.marginal_y().probs, 0.25)

    def test_conditional_row(self, correlated_4x4):
        row = correlated_4x4.conditional_row(2).probs
        assert row[2] == pytest.approx(0.5 + 0.125)
        assert row[0] == pytest.approx(0.125)

    def test_conditional_of_zero_row_raises(self):
        mu = JointDistribution(np.array([[0.5, 0.5], [0.0, 0.0]]))
        with pytest.raises(ValidationError, match="zero mass"):
            conditional_row(mu, 1)
        assert mu.conditional_matrix()[1].tolist() == [0.0, 0.0]

    def test_is_product(self, uniform_4x4, correlated_4x4):
        assert is_product(uniform_4x4)
        assert is_product(JointDistribution.product([0.2, 0.8], [0.1, 0.3, 0.6]))
        assert not is_product(correlated_4x4)

    def test_copy_distribution_extremes(self):
        assert np.allclose(make_copy_distribution(3, 1.0).p, np.eye(3) / 3)
        assert is_product(make_copy_distribution(3, 0.0))
        with pytest.raises(ValidationError):
            make_copy_distribution(3, 1.5)

    def test_mass_function(self):
        assert MassFunction.uniform(4).support_size == 4
        with pytest.raises(ValidationError, match="sums to"):
            MassFunction(np.array([0.3, 0.3]))


class TestBenchmarks:
    """Test GT, IP, DISJ and NPM generators"""

    def test_popcounts(self):
        assert popcounts(3).tolist() == [0, 1, 1, 2, 1, 2, 2, 3]

    def test_greater_than(self, gt2_table):
        assert gt2_table.values.tolist() == [[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]]

    def test_inner_product(self, ip2_table):
        assert ip2_table.values[3].tolist() == [0, 1, 1, 0]
        assert ip2_table.values[0].tolist() == [0, 0, 0, 0]

    def test_disjointness(self):
        table = make_benchmark('disj', 2)
        assert table.values[0].tolist() == [1, 1, 1, 1]
        assert table.values[3].tolist() == [1, 0, 0, 0]

    def test_bit_width_limit(self):
        with pytest.raises(ValidationError):
            make_benchmark('gt', 0)
        with pytest.raises(ValidationError):
            make_benchmark('ip', 5, limit=4)

    def test_matchings(self):
        assert enumerate_matchings(4) == [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
        assert len(enumerate_matchings(6)) == double_factorial(5) == 15
        with pytest.raises(ValidationError):
            enumerate_matchings(3)

    def test_matching_images_read_x_twice(self):
        # n = 2: positions 0..3 read x0, x1, x0, x1
        images = matching_images(2, [((0, 2), (1, 3)), ((0, 1), (2, 3))])
        assert images[0].tolist() == [0, 0, 0, 0]
        assert images[1].tolist() == [0, 3, 3, 0]

    def test_npm_two(self):
        table, mu = make_npm(2)
        assert (table.x_size, table.y_size) == (4, 12)
        assert npm_radius(2) == 0
        assert float(mu.p[table.values == 1].sum()) == pytest.approx(0.5)
        assert float(mu.p[table.values == 0].sum()) == pytest.approx(0.5)

    def test_npm_three_radius_one(self):
        table, mu = make_npm(3)
        assert table.y_size == 15 * 8
        assert npm_radius(3) == 1
        assert float(mu.p[table.values == 1].sum()) == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_npm_matches_definition(self, n):
        """Cell-by-cell comparison with a loop over (x, M, w)"""
        table, mu = make_npm(n)
        matchings = enumerate_matchings(2 * n)
        radius = n // 3
        full = (1 << n) - 1
        ball = sum(math.comb(n, i) for i in range(radius + 1))
        for x in range(1 << n):
            bits = [(x >> (i % n)) & 1 for i in range(2 * n)]
            for index, matching in enumerate(matchings):
                image = sum((bits[a] ^ bits[b]) << t for t, (a, b) in enumerate(matching))
                for w in range(1 << n):
                    near_zero = bin(image ^ w).count('1') <= radius
                    near_one = bin(image ^ full ^ w).count('1') <= radius
                    assert not (near_zero and near_one)
                    column = index * (1 << n) + w
                    assert table.values[x, column] == int(near_one)
                    expected = (0.5 * near_zero + 0.5 * near_one) / ((1 << n) * len(matchings) * ball)
                    assert mu.p[x, column] == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_npm_target_word_outputs_zero(self, n):
        table, _ = make_npm(n)
        images = matching_images(n, enumerate_matchings(2 * n))
        for index in range(images.shape[0]):
            for x in range(1 << n):
                assert table.values[x, index * (1 << n) + images[index, x]] == 0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_npm_distribution_has_uniform_x(self, n):
        table, mu = make_npm(n)
        assert float(mu.p.sum()) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(mu.row_masses(), 1.0 / (1 << n), atol=1e-12)
        assert table.is_total

    def test_npm_cap(self):
        with pytest.raises(CapExceededError, match="MAX_Y_SIZE"):
            make_npm(3, limit=100)


class TestFileFormat:
    """Test JSON function and distribution files"""

    def test_save_and_load(self, temp_dir, ternary_table, correlated_4x4):
        fn_path = os.path.join(temp_dir, 'fn.json')
        dist_path = os.path.join(temp_dir, 'dist.json')
        save_function_table(ternary_table, fn_path)
        save_distribution(correlated_4x4, dist_path)
        assert load_function_table(fn_path).equals(ternary_table)
        assert load_distribution(dist_path).equals(correlated_4x4)

    def test_errors_carry_the_path(self, temp_dir):
        path = os.path.join(temp_dir, 'bad.json')
        with open(path, 'w') as f:
            json.dump({"x_size": 1, "y_size": 2, "z_size": 2, "values": [[0, 2]]}, f)
        with pytest.raises(ValidationError, match=r"bad\.json: values\[0\]\[1\] = 2"):
            load_function_table(path)

    def test_invalid_json(self, temp_dir):
        path = os.path.join(temp_dir, 'broken.json')
        with open(path, 'w') as f:
            f.write('{"x_size": ')
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_distribution(path)

    def test_distribution_mass_checked_on_load(self, temp_dir):
        path = os.path.join(temp_dir, 'light.json')
        with open(path, 'w') as f:
            json.dump({"x_size": 1, "y_size": 2, "p": [[0.25, 0.25]]}, f)
        with pytest.raises(ValidationError, match="light.json"):
            load_distribution(path)

    def test_double_factorial(self):
        assert double_factorial(7) == 105
        assert double_factorial(0) == 1
        assert math.prod([1, 3, 5]) == double_factorial(5)

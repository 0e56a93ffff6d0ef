import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from curveflow.mesh_hermite import (HermiteCurve, Partition, gauss_rule, interpolate_31,
                                    lumped_inner_product, lumped_norm, make_uniform_partition,
                                    max_norm, nodal_interpolate, shape_functions)

from .conftest import hermite_monomials, poly_eval

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def random_curve(rng, J, periodic=False, L=None):
    part = make_uniform_partition(L or float(J), J, periodic)
    n = part.n_nodes
    return HermiteCurve(part, rng.standard_normal((n, 3)), rng.standard_normal((n, 3)))


class TestPartition:
    def test_uniform_element_lengths(self):
        p = make_uniform_partition(2 * np.pi, 80, False)
        assert np.allclose(p.element_lengths, 2 * np.pi / 80, rtol=0, atol=1e-15)
        assert p.mesh_size == pytest.approx(2 * np.pi / 80, rel=1e-15)

    def test_two_elements(self):
        assert np.array_equal(make_uniform_partition(1, 2).nodes, [0.0, 0.5, 1.0])

    def test_periodic_identifies_last_node(self):
        p = make_uniform_partition(2 * np.pi, 80, True)
        assert p.n_nodes == 80 and p.n_dofs == 480
        assert p.element_node_indices()[-1].tolist() == [79, 0]

    @pytest.mark.parametrize("L, J", [(0.0, 4), (-1.0, 4), (1.0, 1), (1.0, 0)])
    def test_invalid_arguments(self, L, J):
        with pytest.raises(ValueError):
            make_uniform_partition(L, J)

    def test_nonincreasing_nodes_rejected(self):
        with pytest.raises(ValueError):
            Partition(np.array([0.0, 0.5, 0.5, 1.0]))

    def test_locate_right_continuous(self):
        p = make_uniform_partition(1.0, 4)
        e, xi = p.locate(np.array([0.25, 1.0, 0.0]))
        assert e.tolist() == [1, 3, 0]
        assert xi.tolist() == [0.0, 1.0, 0.0]


class TestEval:
    def test_line_has_zero_second_derivative(self):
        p = make_uniform_partition(3.0, 6)
        z = p.nodes
        u = HermiteCurve(p, np.stack([z, 0 * z, 0 * z], 1), np.tile([1.0, 0, 0], (7, 1)))
        x = np.linspace(0, 3, 37)
        assert np.abs(u.eval(x, 2)).max() < 1e-12
        assert np.allclose(u.eval(x, 0)[:, 0], x, atol=1e-14)

    def test_single_element_value_and_curvature(self):
        # element [0, 1] is the first of a two-element mesh with h = 1
        p = Partition(np.array([0.0, 1.0, 2.0]))
        vals = np.array([[0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]])
        u = HermiteCurve(p, vals, np.zeros((3, 3)))
        # oracle values from the monomial solve: 3x^2 - 2x^3 at 1/2 and its second derivative at 0
        assert u.eval(0.5, 0) == pytest.approx([0.5, 0, 0], abs=1e-15)
        assert u.eval(0.0, 2) == pytest.approx([6.0, 0, 0], abs=1e-13)

    def test_shape_functions_match_monomial_oracle(self):
        C = hermite_monomials()
        xi = np.linspace(0, 1, 11)
        for order in range(4):
            ref = np.stack([poly_eval(C[:, i], xi, order) for i in range(4)], axis=1)
            assert np.allclose(shape_functions(xi, order), ref, atol=1e-12)

    def test_out_of_range(self):
        u = HermiteCurve.zeros(make_uniform_partition(1.0, 4))
        with pytest.raises(ValueError):
            u.eval(1.5)
        with pytest.raises(ValueError):
            u.eval(-0.1)

    def test_periodic_wraps(self):
        rng = np.random.default_rng(0)
        u = random_curve(rng, 8, periodic=True, L=2.0)
        assert np.allclose(u.eval(2.0 + 0.3), u.eval(0.3))
        assert np.allclose(u.eval(-0.25, 1), u.eval(1.75, 1))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 12), st.booleans(), st.integers(0, 2**31 - 1))
    def test_nodes_reproduce_dofs(self, J, periodic, seed):
        u = random_curve(np.random.default_rng(seed), J, periodic)
        z = u.partition.node_coordinates
        assert np.allclose(u.eval(z, 0), u.values, atol=1e-12)
        assert np.allclose(u.eval(z, 1), u.derivs, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**31 - 1))
    def test_c1_across_interior_nodes(self, J, seed):
        u = random_curve(np.random.default_rng(seed), J)
        z = u.partition.nodes[1:-1]
        for order in (0, 1):
            left = u.eval(z - 1e-9, order)
            right = u.eval(z + 1e-9, order)
            assert np.allclose(left, right, atol=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(arrays(float, (4, 3), elements=finite), st.integers(2, 10))
    def test_cubics_are_reproduced(self, coef, J):
        def v(x):
            return np.stack([np.polynomial.polynomial.polyval(x, coef[:, k]) for k in range(3)], -1)

        def dv(x):
            d = [np.polynomial.polynomial.polyder(coef[:, k]) for k in range(3)]
            return np.stack([np.polynomial.polynomial.polyval(x, c) for c in d], -1)

        u = interpolate_31(v, dv, make_uniform_partition(2.0, J))
        x = np.linspace(0, 2, 41)
        assert np.allclose(u.eval(x), v(x), atol=1e-9 * (1 + np.abs(coef).sum()))


class TestInterpolation:
    def test_zero_function(self):
        u = interpolate_31(lambda x: np.zeros((x.size, 3)), lambda x: np.zeros((x.size, 3)),
                           make_uniform_partition(1.0, 5))
        assert not np.any(u.vector)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**31 - 1))
    def test_projection_property(self, J, seed):
        u = random_curve(np.random.default_rng(seed), J)
        w = interpolate_31(lambda x: u.eval(x, 0), lambda x: u.eval(x, 1), u.partition)
        assert np.allclose(w.vector, u.vector, atol=1e-12)

    def test_error_orders_at_least_bound(self):
        """Observed orders for (cos, sin, 0) are at least 3 - k - 0.2."""
        ders = [lambda x: np.stack([np.cos(x), np.sin(x), 0 * x], -1),
                lambda x: np.stack([-np.sin(x), np.cos(x), 0 * x], -1),
                lambda x: np.stack([-np.cos(x), -np.sin(x), 0 * x], -1)]
        errs = []
        for J in (20, 40, 80, 160, 320):
            p = make_uniform_partition(2 * np.pi, J)
            u = interpolate_31(ders[0], ders[1], p)
            x, w = gauss_rule(8).on_partition(p)
            errs.append([np.sqrt(np.sum(w * np.sum((u.eval(x, k) - ders[k](x)) ** 2, -1)))
                         for k in range(3)])
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        for k in range(3):
            assert rates[:, k].min() >= 3 - k - 0.2


class TestLumped:
    def test_piecewise_linear_interpolant(self):
        p = make_uniform_partition(1.0, 2)
        f = nodal_interpolate([0.0, 0.25, 1.0], p)  # x^2 at the nodes
        x = np.linspace(0, 1, 10001)
        err = np.abs(f(x) - x**2)
        assert err.max() == pytest.approx(1 / 16, abs=1e-8)
        assert x[np.argmax(err)] == pytest.approx(0.25, abs=1e-4)

    def test_constant_and_identity(self):
        p = make_uniform_partition(1.0, 2)
        assert np.allclose(nodal_interpolate([2.0, 2.0, 2.0], p)(np.linspace(0, 1, 7)), 2.0)
        q = Partition(np.array([0.0, 1.0, 2.0]))
        assert nodal_interpolate([0.0, 1.0, 2.0], q)(0.3) == pytest.approx(0.3)

    def test_wrong_count(self):
        with pytest.raises(ValueError):
            nodal_interpolate([1.0, 2.0], make_uniform_partition(1.0, 2))

    def test_inner_product_values(self):
        p = make_uniform_partition(3.5, 7)
        assert lumped_inner_product(np.ones(8), np.ones(8), p) == pytest.approx(3.5)
        q = make_uniform_partition(1.0, 2)
        # oracle: the interpolant of the product is a unit hat of width 1
        hat = nodal_interpolate([0.0, 1.0, 0.0], q)
        x = np.linspace(0, 1, 200001)
        assert np.trapezoid(hat(x), x) == pytest.approx(0.5, abs=1e-9)
        assert lumped_inner_product([0, 1, 0], [0, 1, 0], q) == pytest.approx(0.5, abs=1e-15)
        periodic = make_uniform_partition(2 * np.pi, 4, True)
        assert np.allclose(periodic.node_weights(), np.pi / 2)

    def test_max_norm(self):
        assert max_norm([1.0, -3.0, 2.0]) == 3.0
        p = make_uniform_partition(1.0, 2)
        assert lumped_norm([1.0, -3.0, 2.0], p, np.inf) == 3.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 20), st.booleans(), st.floats(0.1, 10))
    def test_weights_sum_to_length(self, J, periodic, L):
        p = make_uniform_partition(L, J, periodic)
        assert p.node_weights().sum() == pytest.approx(L, rel=1e-12)

    def test_inner_product_is_integral_of_linear_interpolant(self):
        rng = np.random.default_rng(3)
        p = Partition(np.cumsum(np.concatenate([[0.0], rng.uniform(0.1, 1.0, 6)])))
        v, w = rng.standard_normal(7), rng.standard_normal(7)
        x, wq = gauss_rule(2).on_partition(p)
        exact = np.sum(wq * nodal_interpolate(v * w, p)(x))
        assert lumped_inner_product(v, w, p) == pytest.approx(exact, rel=1e-12)


class TestGauss:
    def test_midpoint(self):
        r = gauss_rule(1)
        assert r.points.tolist() == [0.5] and r.weights.tolist() == [1.0]

    def test_exactness(self):
        r2, r4 = gauss_rule(2), gauss_rule(4)
        assert r2.weights @ r2.points**3 == pytest.approx(0.25, abs=1e-15)
        assert r4.weights @ r4.points**7 == pytest.approx(0.125, abs=1e-15)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_weights_sum_and_degree(self, n):
        r = gauss_rule(n)
        assert r.weights.sum() == pytest.approx(1.0, abs=1e-14)
        d = r.degree
        assert r.weights @ r.points**d == pytest.approx(1 / (d + 1), rel=1e-12)

    @pytest.mark.parametrize("n", [0, 11, 2.5])
    def test_unsupported(self, n):
        with pytest.raises(ValueError):
            gauss_rule(n)

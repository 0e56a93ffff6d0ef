import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from curveflow.energy import bending_energy, constraint_violations
from curveflow.errors import DegenerateCurveError
from curveflow.initial import (ParametricCurve, project_to_admissible, random_periodic_admissible,
                               reparametrize_arclength, single_fold_admissible, single_fold_curve,
                               torus_seed)
from curveflow.mesh_hermite import HermiteCurve, make_uniform_partition
from curveflow.surface import sphere, torus


class TestTorusSeed:
    def test_meridian(self):
        c = torus_seed(0, 1)
        x = np.linspace(0, 2 * np.pi, 50)
        assert np.all(c.func(x)[:, 0] == 0.0)
        assert np.abs(torus(2, 1).phi(c.func(x))).max() <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(-3, 3), st.integers(-3, 3), st.floats(0, 2 * np.pi))
    def test_on_torus(self, a, b, x):
        if a == 0 and b == 0:
            return
        assert abs(torus(2, 1).phi(torus_seed(a, b).func(np.array([x]))))[0] <= 1e-10

    def test_origin(self):
        assert torus_seed(1, 2).func(np.array([0.0]))[0] == pytest.approx([0, 2, 1])

    def test_derivative_consistent(self):
        c = torus_seed(1, 2)
        x = np.linspace(0.1, 6, 17)
        fd = (c.func(x + 1e-6) - c.func(x - 1e-6)) / 2e-6
        assert np.allclose(c.deriv(x), fd, atol=1e-8)

    def test_zero_frequencies(self):
        with pytest.raises(ValueError):
            torus_seed(0, 0)


class TestReparametrize:
    def test_circle_radius_two(self):
        c = ParametricCurve(lambda x: np.stack([2 * np.cos(x), 2 * np.sin(x), 0 * x], -1),
                            lambda x: np.stack([-2 * np.sin(x), 2 * np.cos(x), 0 * x], -1),
                            closed=True)
        u = reparametrize_arclength(c, 16)
        assert u.partition.length == pytest.approx(4 * np.pi, rel=1e-12)
        assert u.partition.periodic and u.partition.n_nodes == 16
        assert np.allclose(np.linalg.norm(u.derivs, axis=1), 1.0, atol=1e-15)

    def test_straight_segment_identity(self):
        d = np.array([0.6, 0.8, 0.0])
        c = ParametricCurve(lambda x: np.outer(x, d), lambda x: np.tile(d, (np.size(x), 1)),
                            length=3.0)
        u = reparametrize_arclength(c, 6)
        z = u.partition.nodes
        assert np.allclose(u.values, np.outer(z, d), atol=1e-13)
        assert np.allclose(u.derivs, d, atol=1e-15)

    def test_torus_seed_lengths_and_speed(self):
        c = torus_seed(1, 2)
        u = reparametrize_arclength(c, 80, periodic=False)
        # oracle: cumulative length of the seed at the recovered node parameters
        L = quad(lambda x: float(c.speed(x)[0]), 0, 2 * np.pi, epsrel=1e-13, limit=500)[0]
        assert u.partition.length == pytest.approx(L, rel=1e-10)
        assert np.abs(np.linalg.norm(u.derivs, axis=1) - 1).max() <= 1e-10
        assert constraint_violations(u, torus(2, 1))[1] <= 1e-10
        chords = np.linalg.norm(np.diff(u.values, axis=0), axis=1)
        assert chords.max() / chords.min() < 1.05  # nearly equal spacing

    def test_image_preserved(self):
        c = torus_seed(1, 2)
        u = reparametrize_arclength(c, 160, periodic=False)
        xs = np.linspace(0, 2 * np.pi, 20001)
        tree = cKDTree(c.func(xs))
        _, pts = u.sample(8)
        _, idx = tree.query(pts)
        dx = xs[1]
        dist = [minimize_scalar(lambda t: np.sum((c.func(np.array([t]))[0] - q) ** 2),
                                bounds=(xs[i] - dx, xs[i] + dx), method="bounded",
                                options={"xatol": 1e-13}).fun ** 0.5
                for q, i in zip(pts, idx)]
        assert max(dist) <= 1e-6

    def test_degenerate(self):
        c = ParametricCurve(lambda x: np.stack([x**3, 0 * x, 0 * x], -1),
                            lambda x: np.stack([3 * (x - 1) ** 2, 0 * x, 0 * x], -1), length=2.0)
        with pytest.raises(DegenerateCurveError):
            reparametrize_arclength(c, 8)


class TestProjection:
    def test_radial_example(self):
        p = make_uniform_partition(1.0, 2)
        u = HermiteCurve(p, np.tile([0, 0, 2.0], (3, 1)), np.tile([2.0, 0, 0], (3, 1)))
        w = project_to_admissible(u, sphere())
        assert np.allclose(w.values, [0, 0, 1]) and np.allclose(w.derivs, [1, 0, 0])

    def test_idempotent(self, clamped_torus_curve, torus_surface):
        w = project_to_admissible(clamped_torus_curve, torus_surface)
        assert np.abs(w.vector - clamped_torus_curve.vector).max() <= 1e-14
        ww = project_to_admissible(w, torus_surface)
        assert np.abs(ww.vector - w.vector).max() <= 1e-12

    def test_obstacle(self):
        rng = np.random.default_rng(4)
        p = make_uniform_partition(2 * np.pi, 40, True)
        z = p.node_coordinates
        vals = np.stack([np.cos(z), np.sin(z), 0.3 * np.ones_like(z)], 1) + 0.2 * rng.standard_normal((40, 3))
        ders = np.stack([-np.sin(z), np.cos(z), 0 * z], 1) + 0.2 * rng.standard_normal((40, 3))
        w = project_to_admissible(HermiteCurve(p, vals, ders), sphere(), delta=0.25)
        assert np.abs(np.linalg.norm(w.values, axis=1) - 1).max() <= 1e-12
        assert np.abs(np.linalg.norm(w.derivs, axis=1) - 1).max() <= 1e-14
        assert np.abs(np.einsum("ij,ij->i", w.values, w.derivs)).max() <= 1e-12
        assert w.values[:, 2].min() >= 0.25 - 1e-12

    def test_tangent_along_normal(self):
        p = make_uniform_partition(1.0, 2)
        u = HermiteCurve(p, np.tile([0, 0, 1.0], (3, 1)), np.tile([0, 0, 1.0], (3, 1)))
        with pytest.raises(DegenerateCurveError):
            project_to_admissible(u, sphere())


class TestRandomStart:
    def test_deterministic(self):
        a = random_periodic_admissible(3, 40, 0.25)
        b = random_periodic_admissible(3, 40, 0.25)
        assert np.array_equal(a.vector, b.vector)
        assert not np.array_equal(a.vector, random_periodic_admissible(4, 40, 0.25).vector)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from([8, 16, 40, 80]), st.sampled_from([0.05, 0.25, 0.5]))
    def test_admissible(self, seed, J, delta):
        u = random_periodic_admissible(seed, J, delta)
        arc, surf = constraint_violations(u, sphere())
        assert arc <= 1e-14 and surf <= 1e-12
        assert u.values[:, 2].min() >= delta - 1e-12

    def test_small_J(self):
        with pytest.raises(ValueError):
            random_periodic_admissible(0, 6, 0.25)

    @pytest.mark.xfail(strict=True, reason="a latitude circle of radius rho has length 2 pi rho, "
                       "but the generator samples it on a partition of length 2 pi, so its "
                       "parametrization is not by arclength and the energy is not pi / rho")
    def test_zero_amplitude_is_latitude_circle(self):
        u = random_periodic_admissible(0, 80, 0.25, amplitude=0.0)
        rho = np.sqrt(1 - 0.3**2)
        assert bending_energy(u) == pytest.approx(np.pi / rho, rel=1e-2)

    def test_zero_amplitude_shape(self):
        """Nodal data lie exactly on the latitude circle at height 0.3."""
        u = random_periodic_admissible(0, 80, 0.25, amplitude=0.0)
        assert np.allclose(u.values[:, 2], 0.3, atol=1e-15)
        assert np.allclose(np.linalg.norm(u.values[:, :2], axis=1), np.sqrt(1 - 0.09), atol=1e-15)


class TestSingleFold:
    @pytest.mark.parametrize("delta", [0.05, 0.25])
    def test_length_and_obstacle(self, delta):
        c = single_fold_curve(delta, seed=2)
        L = quad(lambda x: float(c.speed(x)[0]), 0, 2 * np.pi, epsrel=1e-13, limit=500)[0]
        assert L == pytest.approx(2 * np.pi, rel=1e-10)
        x = np.linspace(0, 2 * np.pi, 2001)
        pts = c.func(x)
        assert pts[:, 2].min() >= delta - 1e-15
        assert np.abs(sphere().phi(pts)).max() <= 1e-14

    def test_admissible_and_seeded(self):
        u = single_fold_admissible(80, 0.05, seed=1)
        arc, surf = constraint_violations(u, sphere())
        assert arc <= 1e-14 and surf <= 1e-12
        assert u.partition.length == pytest.approx(2 * np.pi) and u.partition.periodic
        assert np.array_equal(u.vector, single_fold_admissible(80, 0.05, seed=1).vector)

    def test_too_blunt(self):
        with pytest.raises(ValueError):
            single_fold_curve(0.05, sharpness=1)

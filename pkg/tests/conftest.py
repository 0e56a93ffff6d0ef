import numpy as np
import pytest

from curveflow import BoundaryCondition, interpolate_31, make_uniform_partition, sphere, torus
from curveflow.initial import reparametrize_arclength, torus_seed

# torus scenario used across the flow tests: seed frequencies (a, b) = (1, 2), R = 2, r = 1
SEED_AB = (1, 2)


def hermite_monomials():
    """Oracle: monomial coefficients of the reference Hermite cubics.

    Solves the 4x4 interpolation system [v(0), v'(0), v(1), v'(1)] directly;
    column i holds the coefficients (of 1, x, x^2, x^3) of basis function i.
    """
    V = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 1], [0, 1, 2, 3]], dtype=float)
    return np.linalg.solve(V, np.eye(4))


def poly_eval(coef, x, order=0):
    c = np.polynomial.polynomial.polyder(coef, order) if order else coef
    return np.polynomial.polynomial.polyval(x, c)


def circle(radius=1.0, height=0.0):
    def v(x):
        return np.stack([radius * np.cos(x / radius), radius * np.sin(x / radius),
                         np.full_like(x, height)], axis=-1)

    def dv(x):
        return np.stack([-np.sin(x / radius), np.cos(x / radius), np.zeros_like(x)], axis=-1)

    return v, dv


def circle_curve(J, radius=1.0, height=0.0):
    """Arclength-parametrized horizontal circle as a periodic Hermite curve."""
    part = make_uniform_partition(2 * np.pi * radius, J, periodic=True)
    return interpolate_31(*circle(radius, height), part)


@pytest.fixture(scope="session")
def torus_surface():
    return torus(2.0, 1.0)


@pytest.fixture(scope="session")
def unit_sphere():
    return sphere()


@pytest.fixture(scope="session")
def clamped_torus_curve():
    return reparametrize_arclength(torus_seed(*SEED_AB), 80, periodic=False)


@pytest.fixture(scope="session")
def closed_torus_curve():
    return reparametrize_arclength(torus_seed(*SEED_AB), 80, periodic=True)


@pytest.fixture(scope="session")
def clamped_bc(clamped_torus_curve):
    return BoundaryCondition("clamped").with_target(clamped_torus_curve)

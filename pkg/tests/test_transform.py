from math import pi, sqrt

import numpy as np
import pytest
from scipy import integrate, special
from spheremean.errors import DimensionError, DomainError, GridError
from spheremean.harmonics import sphere_grid, sphere_measure
from spheremean.profile import RadialProfile
from spheremean.transform import (
    BoundaryData,
    Phantom,
    cosine_wave,
    demo_phantom,
    forward_data,
    perturbation_bump,
    phantom_eval,
    rotate_phantom,
    spherical_mean,
    t_grid,
)


def _random_samples(n, size, rng):
    x = rng.standard_normal((size, n))
    x *= 0.5 * rng.uniform(size=(size, 1)) / np.linalg.norm(x, axis=1)[:, None]
    t = rng.uniform(0.0, 1.0, size)
    xi = rng.standard_normal(n)
    return x, t, xi / np.linalg.norm(xi)


@pytest.mark.parametrize("lam", [1.0, 5.0, 10.0])
def test_mean_value_circle(lam):
    rng = np.random.default_rng(1)
    x, t, xi = _random_samples(2, 20, rng)
    my_val = spherical_mean(cosine_wave(lam, xi), x, t, sphere_grid(2, 256))
    tr_val = special.j0(lam * t) * np.cos(lam * x.dot(xi))
    assert np.abs(my_val - tr_val).max() <= 1e-9


@pytest.mark.parametrize("lam", [1.0, 5.0, 10.0])
def test_mean_value_sphere(lam):
    rng = np.random.default_rng(2)
    x, t, xi = _random_samples(3, 20, rng)
    my_val = spherical_mean(cosine_wave(lam, xi), x, t, sphere_grid(3, 32))
    tr_val = np.sinc(lam * t / pi) * np.cos(lam * x.dot(xi))
    assert np.abs(my_val - tr_val).max() <= 1e-8


def test_mean_at_zero_radius():
    ph = demo_phantom(2)
    x = np.array([[0.3, 0.4], [0.0, 0.5]])
    assert np.allclose(spherical_mean(ph, x, 0.0, sphere_grid(2, 16)), ph(x))


def test_mean_negative_radius():
    with pytest.raises(DomainError):
        spherical_mean(demo_phantom(2), [0.0, 0.0], -0.1, sphere_grid(2, 16))


def test_phantom_eval():
    profile = RadialProfile("annular-bump", 0.2, 0.8, 2.0)
    ph = Phantom(2, (((1, 1), profile),))
    assert np.isclose(phantom_eval(ph, [0.5, 0.0]), profile(0.5) / sqrt(pi))
    assert np.isclose(ph([0.0, 0.5]), 0.0)
    assert ph([0.0, 0.0]) == 0.0
    assert np.all(ph(np.array([[0.95, 0.0], [2.0, 1.0]])) == 0.0)


def test_phantom_origin():
    profile = RadialProfile("annular-bump", 0.0, 0.8)
    ph = Phantom(3, (((0, 1), profile),))
    assert np.isclose(ph([0.0, 0.0, 0.0]), profile(0.0) / sqrt(4 * pi))


def test_phantom_errors():
    profile = RadialProfile("annular-bump", 0.2, 0.8)
    with pytest.raises(DimensionError):
        Phantom(4, ())
    with pytest.raises(DomainError):
        Phantom(2, (((1, 3), profile),))
    with pytest.raises(DomainError):
        demo_phantom(2)([0.0, 0.0, 0.0])


def test_phantom_dict():
    ph = demo_phantom(3)
    other = Phantom.from_dict(ph.to_dict())
    x = np.array([[0.1, 0.2, 0.3], [0.5, -0.2, 0.1]])
    assert np.allclose(other(x), ph(x))
    assert other.m_max == 2 and np.isclose(other.outer_radius, 0.9)


def test_empty_phantom():
    grid = sphere_grid(2, 8)
    g = forward_data(Phantom(2), grid, t_grid(2.0, 41), sphere_grid(2, 16))
    assert np.all(g.values == 0.0)


def test_support_condition():
    ph = demo_phantom(2)
    t = t_grid(2.5, 251)
    g = forward_data(ph, sphere_grid(2, 8), t, sphere_grid(2, 64))
    assert np.all(g.values[:, t > 1.9 + 1e-12] == 0.0)
    assert np.all(g.values[:, t < 0.1 - 1e-12] == 0.0)
    assert np.abs(g.values).max() > 0.0


def test_forward_errors():
    ph = demo_phantom(2)
    with pytest.raises(GridError):
        forward_data(ph, sphere_grid(2, 8), np.linspace(0.1, 2.0, 20), sphere_grid(2, 16))
    with pytest.raises(GridError):
        forward_data(ph, sphere_grid(2, 8), t_grid(1.5, 31), sphere_grid(2, 16))
    with pytest.raises(DimensionError):
        forward_data(ph, sphere_grid(3, 4), t_grid(), sphere_grid(2, 16))


def test_resolution_agreement():
    ph = demo_phantom(2)
    t = t_grid(2.0, 21)
    coarse = forward_data(ph, sphere_grid(2, 8), t, sphere_grid(2, 512))
    fine = forward_data(ph, sphere_grid(2, 16), t, sphere_grid(2, 1024))
    assert np.allclose(coarse.values, fine.values[::2], atol=1e-6)


def test_rotation_equivariance():
    ph = demo_phantom(2)
    grid, quad, t = sphere_grid(2, 16), sphere_grid(2, 128), t_grid(2.0, 41)
    shift = 3
    rotated = rotate_phantom(ph, 2 * pi * shift / grid.resolution)
    g = forward_data(ph, grid, t, quad)
    g_rot = forward_data(rotated, grid, t, quad)
    assert np.allclose(g_rot.values, np.roll(g.values, shift, axis=0), atol=1e-10)


def test_rotate_error():
    with pytest.raises(DimensionError):
        rotate_phantom(demo_phantom(3), 0.1)


@pytest.mark.parametrize("n", [2, 3])
def test_volume_integral(n):
    # int f = omega_n int_0^inf R f(x, t) t^(n-1) dt for any center x
    ph = demo_phantom(n)
    grid = sphere_grid(n, 8 if n == 2 else 4)
    t = t_grid(2.0, 201)
    g = forward_data(ph, grid, t, sphere_grid(n, 256 if n == 2 else 32))
    moments = sphere_measure(n) * integrate.simpson(g.values * t ** (n - 1), x=t, axis=1)
    assert np.allclose(moments, ph.volume_integral(), rtol=1e-4)


def test_perturbation_bump():
    grid, t = sphere_grid(2, 8), t_grid()
    g = perturbation_bump(grid, t, amplitude=0.01)
    assert np.isclose(g.values[:, 200], 0.01).all()
    assert np.all(g.values[:, t <= 0.5] == 0.0) and np.all(g.values[:, t >= 1.5] == 0.0)
    assert g.metadata["source"] == "perturbation"


def test_boundary_data_validation():
    grid, t = sphere_grid(2, 8), t_grid(2.0, 21)
    with pytest.raises(GridError):
        BoundaryData(grid, t, np.zeros((grid.size, t.size + 1)))
    with pytest.raises(GridError):
        BoundaryData(grid, t, np.full((grid.size, t.size), np.nan))
    with pytest.raises(GridError):
        BoundaryData(grid, np.array([0.0, 0.1, 0.3]), np.zeros((grid.size, 3)))


def test_boundary_data_add():
    grid, t = sphere_grid(2, 8), t_grid(2.0, 21)
    g = BoundaryData(grid, t, np.ones((grid.size, t.size)), {"source": "test"})
    total = g + g
    assert np.all(total.values == 2.0) and total.metadata["source"] == "test"
    assert np.isclose(g.t_step, 0.1) and g.t_max == 2.0 and g.dimension == 2


def test_mode_profile():
    first = RadialProfile("annular-bump", 0.2, 0.6)
    second = RadialProfile("annular-bump", 0.4, 0.8, 2.0)
    ph = Phantom(2, (((0, 1), first), ((0, 1), second)))
    r = np.linspace(0.0, 1.2, 25)
    tr_val = first(r) + second(r)
    assert np.allclose(ph.mode_profile((0, 1))(r), tr_val)
    assert np.all(ph.mode_profile((1, 1))(r) == 0.0)

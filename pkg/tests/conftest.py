import pytest
from spheremean.darboux import extension_check, solve_modes
from spheremean.harmonics import sphere_grid
from spheremean.transform import demo_phantom, forward_data, perturbation_bump, t_grid


@pytest.fixture(scope="session")
def phantom():
    return demo_phantom(2)


@pytest.fixture(scope="session")
def center_grid():
    return sphere_grid(2, 32)


@pytest.fixture(scope="session")
def demo_data(phantom, center_grid):
    return forward_data(phantom, center_grid, t_grid(), sphere_grid(2, 256))


@pytest.fixture(scope="session")
def fine_demo_data(phantom, center_grid):
    return forward_data(phantom, center_grid, t_grid(2.0, 801), sphere_grid(2, 256))


@pytest.fixture(scope="session")
def bump_data(center_grid):
    return perturbation_bump(center_grid, t_grid())


@pytest.fixture(scope="session")
def demo_solutions(demo_data):
    return solve_modes(demo_data, 2, eigs=64, sigma_threshold=1e-4)


@pytest.fixture(scope="session")
def bump_solutions(bump_data):
    return solve_modes(bump_data, 0, eigs=64, sigma_threshold=1e-4)


@pytest.fixture(scope="session")
def demo_extension(demo_data, phantom):
    return extension_check(demo_data, phantom, m_max=4, eigs=64)

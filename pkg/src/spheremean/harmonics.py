"""Quadrature on the unit sphere and a real orthonormal spherical harmonic
basis for ``n = 2`` and ``n = 3``. Harmonics are orthonormal with respect to
the surface measure ``dA``, not the normalized measure ``dA / omega_n``.

"""

import logging
from dataclasses import dataclass, field
from math import comb, pi, sqrt

import numpy as np

from spheremean.errors import AliasingError, DimensionError, DomainError, GridError
from spheremean.specfun import gamma_fn
from spheremean.typing import HarmonicIndex, NDArray, Points

logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (2, 3)


def _check_dimension(n: int) -> int:
    n = int(n)
    if n not in SUPPORTED_DIMENSIONS:
        raise DimensionError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
    return n


def sphere_measure(n: int) -> float:
    """Total measure ``omega_n = 2 pi^(n/2) / Gamma(n/2)`` of the unit sphere
    in ``R^n``.

    """
    if int(n) < 1:
        raise DimensionError("dimension must be positive")
    return 2.0 * pi ** (0.5 * n) / gamma_fn(0.5 * n)


def harmonic_dimension(n: int, m: int) -> int:
    """Dimension ``d(m)`` of the space of spherical harmonics of degree `m` on
    the unit sphere of ``R^n``.

    Example
    -------
    >>> harmonic_dimension(2, 0), harmonic_dimension(2, 5), harmonic_dimension(3, 2)
    (1, 2, 5)

    """
    n, m = int(n), int(m)
    if n < 2:
        raise DimensionError("dimension must be at least 2")
    if m < 0:
        raise DomainError("harmonic degree must be nonnegative")
    if m == 0:
        return 1
    return comb(m + n - 1, n - 1) - comb(m + n - 3, n - 1)


def harmonic_indices(n: int, m_max: int) -> tuple[HarmonicIndex, ...]:
    """All harmonic indices ``(m, k)`` with ``m <= m_max`` ordered by degree
    and then by branch. This is the row order of every basis matrix and
    coefficient table in the package.

    """
    return tuple(
        (m, k)
        for m in range(int(m_max) + 1)
        for k in range(1, harmonic_dimension(n, m) + 1)
    )


def _check_index(n: int, idx: HarmonicIndex) -> HarmonicIndex:
    m, k = int(idx[0]), int(idx[1])
    if m < 0 or not 1 <= k <= harmonic_dimension(n, m):
        raise DomainError(f"harmonic index {(m, k)} out of range for n={n}")
    return m, k


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature rule on the unit sphere.

    Parameters
    ----------
    dimension
        Space dimension, 2 or 3.
    resolution
        Resolution the grid was built with.
    nodes
        Unit vectors stored row-wise, shape ``(size, dimension)``.
    weights
        Positive quadrature weights summing to ``omega_n``.

    """

    dimension: int
    resolution: int
    nodes: NDArray = field(repr=False)
    weights: NDArray = field(repr=False)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def band(self) -> int:
        """Largest degree the grid analyses without aliasing."""
        if self.dimension == 2:
            return int(np.ceil(0.5 * self.resolution - 1.0)) - 1
        return (self.resolution - 1) // 2

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "resolution": self.resolution,
            "nodes": self.nodes.tolist(),
        }


def sphere_grid(n: int, resolution: int) -> SphereGrid:
    """Build a quadrature grid on the unit sphere.

    Parameters
    ----------
    n
        Space dimension, 2 or 3.
    resolution
        For ``n = 2`` the number of equally spaced angles. For ``n = 3`` the
        number of Gauss-Legendre nodes in the polar cosine, combined with
        ``2 * resolution`` equally spaced azimuths.

    Returns
    -------
    describe
        Quadrature grid.

    Raises
    ------
    DimensionError
        Raised when `n` is not 2 or 3.
    GridError
        Raised when `resolution < 4`.

    Example
    -------
    >>> grid = sphere_grid(2, 64)
    >>> float(grid.weights.sum())
    6.283185307179586

    """
    n, resolution = _check_dimension(n), int(resolution)
    if resolution < 4:
        raise GridError("sphere grid resolution must be at least 4")
    if n == 2:
        phi = 2.0 * pi * np.arange(resolution) / resolution
        nodes = np.column_stack([np.cos(phi), np.sin(phi)])
        weights = np.full(resolution, 2.0 * pi / resolution)
    else:
        z, wz = np.polynomial.legendre.leggauss(resolution)
        phi = pi * np.arange(2 * resolution) / resolution
        s = np.sqrt(1.0 - z**2)
        nodes = np.column_stack(
            [
                np.outer(s, np.cos(phi)).ravel(),
                np.outer(s, np.sin(phi)).ravel(),
                np.repeat(z, phi.size),
            ]
        )
        weights = np.repeat(wz * (pi / resolution), phi.size)
    logger.debug("sphere grid n=%d resolution=%d size=%d", n, resolution, weights.size)
    return SphereGrid(n, resolution, nodes, weights)


def _circle_basis(theta: Points, m_max: int) -> NDArray:
    phi = np.arctan2(theta[:, 1], theta[:, 0])
    rows = [np.full(phi.size, 1.0 / sqrt(2.0 * pi))]
    for m in range(1, m_max + 1):
        rows.append(np.cos(m * phi) / sqrt(pi))
        rows.append(np.sin(m * phi) / sqrt(pi))
    return np.vstack(rows)


def _legendre_table(z: NDArray, s: NDArray, m_max: int) -> dict[tuple[int, int], NDArray]:
    # fully normalized associated Legendre functions without Condon-Shortley
    # phase, keyed by (degree, order)
    table = {(0, 0): np.full(z.size, 1.0 / sqrt(4.0 * pi))}
    for j in range(1, m_max + 1):
        table[j, j] = sqrt((2 * j + 1) / (2 * j)) * s * table[j - 1, j - 1]
    for j in range(m_max):
        table[j + 1, j] = sqrt(2 * j + 3) * z * table[j, j]
    for j in range(m_max + 1):
        for m in range(j + 2, m_max + 1):
            a = sqrt((4 * m**2 - 1) / (m**2 - j**2))
            b = sqrt(((m - 1) ** 2 - j**2) / (4 * (m - 1) ** 2 - 1))
            table[m, j] = a * (z * table[m - 1, j] - b * table[m - 2, j])
    return table


def _sphere_basis(theta: Points, m_max: int) -> NDArray:
    z = theta[:, 2]
    s = np.hypot(theta[:, 0], theta[:, 1])
    phi = np.arctan2(theta[:, 1], theta[:, 0])
    table = _legendre_table(z, s, m_max)
    rows = []
    for m in range(m_max + 1):
        rows.append(table[m, 0])
        for j in range(1, m + 1):
            rows.append(sqrt(2.0) * table[m, j] * np.cos(j * phi))
            rows.append(sqrt(2.0) * table[m, j] * np.sin(j * phi))
    return np.vstack(rows)


def _basis_at(n: int, theta: Points, m_max: int) -> NDArray:
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    if theta.shape[-1] != n:
        raise DomainError(f"points must have {n} coordinates")
    if m_max < 0:
        raise DomainError("m_max must be nonnegative")
    if n == 2:
        return _circle_basis(theta, m_max)
    return _sphere_basis(theta, m_max)


def harmonic_basis(grid: SphereGrid, m_max: int) -> NDArray:
    """Values of all harmonics up to degree `m_max` on the grid nodes, one
    row per index of :func:`harmonic_indices`.

    """
    return _basis_at(grid.dimension, grid.nodes, int(m_max))


def harmonic_eval(n: int, idx: HarmonicIndex, theta: Points) -> NDArray:
    """Evaluate the real orthonormal harmonic ``Y_{m,k}``.

    For ``n = 2`` the basis is ``1/sqrt(2 pi)``, ``cos(m phi)/sqrt(pi)`` and
    ``sin(m phi)/sqrt(pi)``. For ``n = 3`` branch ``k = 1`` is the zonal
    harmonic while ``k = 2j`` and ``k = 2j + 1`` carry ``cos(j phi)`` and
    ``sin(j phi)``.

    Parameters
    ----------
    n
        Space dimension, 2 or 3.
    idx
        Harmonic index ``(m, k)``.
    theta
        Unit vector or array of unit vectors stored row-wise.

    Returns
    -------
    describe
        Harmonic values, a scalar for a single unit vector.

    Raises
    ------
    DomainError
        Raised when the index is out of range or `theta` is not unit length.

    """
    n = _check_dimension(n)
    m, k = _check_index(n, idx)
    theta = np.asarray(theta, dtype=float)
    isscalar = theta.ndim == 1
    theta = np.atleast_2d(theta)
    if not np.allclose(np.linalg.norm(theta, axis=1), 1.0, atol=1e-10):
        raise DomainError("harmonics are evaluated on unit vectors")
    offset = len(harmonic_indices(n, m - 1)) if m > 0 else 0
    value = _basis_at(n, theta, m)[offset + k - 1]
    return value[0] if isscalar else value


@dataclass
class AngularCoefficients:
    """Angular Fourier coefficients ``g_{m,k}`` sampled on a t-grid (or an
    r-grid).

    Parameters
    ----------
    dimension
        Space dimension.
    m_max
        Highest degree stored.
    values
        Coefficient table, one row per index of :func:`harmonic_indices`.

    """

    dimension: int
    m_max: int
    values: NDArray

    def __post_init__(self) -> None:
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] != len(self.indices):
            raise ValueError("number of rows does not match the harmonic indices")
        if not np.isfinite(self.values).all():
            raise ValueError("angular coefficients must be finite")

    @property
    def indices(self) -> tuple[HarmonicIndex, ...]:
        return harmonic_indices(self.dimension, self.m_max)

    def __getitem__(self, idx: HarmonicIndex) -> NDArray:
        return self.values[self.indices.index(tuple(idx))]

    def __len__(self) -> int:
        return self.values.shape[0]


def angular_decompose(
    samples: NDArray, grid: SphereGrid, m_max: int
) -> AngularCoefficients:
    """Project samples onto the harmonics,
    ``g_{m,k}(t_j) = sum_i w_i g(theta_i, t_j) Y_{m,k}(theta_i)``.

    Parameters
    ----------
    samples
        Values on the grid nodes, shape ``(grid.size,)`` or
        ``(grid.size, num_t)``.
    grid
        Quadrature grid the samples live on.
    m_max
        Highest degree to analyse.

    Returns
    -------
    describe
        Angular coefficients.

    Raises
    ------
    AliasingError
        Raised when `m_max` is beyond the band of the grid.

    """
    m_max = int(m_max)
    if m_max > grid.band:
        raise AliasingError(
            f"m_max={m_max} exceeds the band {grid.band} of the "
            f"resolution {grid.resolution} grid"
        )
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] != grid.size:
        raise GridError("samples do not match the sphere grid")
    if samples.ndim == 1:
        samples = samples[:, None]
    basis = harmonic_basis(grid, m_max)
    values = basis.dot(grid.weights[:, None] * samples)
    return AngularCoefficients(grid.dimension, m_max, values)


def angular_synthesize(coeffs: AngularCoefficients, grid: SphereGrid) -> NDArray:
    """Evaluate ``g(theta_i, t_j) = sum_{m,k} g_{m,k}(t_j) Y_{m,k}(theta_i)``
    on the grid nodes, shape ``(grid.size, num_t)``.

    """
    if coeffs.dimension != grid.dimension:
        raise DimensionError("coefficients and grid have different dimensions")
    basis = harmonic_basis(grid, coeffs.m_max)
    return basis.T.dot(coeffs.values)

"""Phantoms and the spherical mean transform

    R f(x, t) = (1 / omega_n) int_S f(x + t theta) dA(theta)

restricted to centers on the unit sphere.

"""

import logging
from dataclasses import dataclass, field, replace
from math import cos, sin

import numpy as np

from spheremean.errors import DimensionError, DomainError, GridError
from spheremean.harmonics import (
    SUPPORTED_DIMENSIONS,
    SphereGrid,
    _basis_at,
    _check_index,
    harmonic_indices,
    sphere_measure,
)
from spheremean.profile import RadialProfile, peak_factor, profile_val
from spheremean.stencil import uniform_spacing
from spheremean.typing import Field, HarmonicIndex, NDArray, Points
from spheremean.xfunction import BasisXFunction, XFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Phantom:
    """Smooth function supported in the closed unit ball, written as a finite
    sum ``f(r theta) = sum profile(r) Y_{m,k}(theta)``. Each profile is the
    full radial factor of its harmonic.

    Parameters
    ----------
    dimension
        Space dimension, 2 or 3.
    terms
        Pairs of harmonic index and radial profile.

    """

    dimension: int
    terms: tuple[tuple[HarmonicIndex, RadialProfile], ...] = ()

    def __post_init__(self) -> None:
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise DimensionError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
        terms = tuple(
            (_check_index(self.dimension, idx), profile) for idx, profile in self.terms
        )
        object.__setattr__(self, "terms", terms)

    @property
    def m_max(self) -> int:
        return max((idx[0] for idx, _ in self.terms), default=0)

    @property
    def outer_radius(self) -> float:
        return max((profile.support[1] for _, profile in self.terms), default=0.0)

    def __call__(self, x: Points) -> NDArray:
        return phantom_eval(self, x)

    def mode_profile(self, idx: HarmonicIndex) -> XFunction:
        """Radial factor of the harmonic `idx`, the sum of every matching
        term.

        """
        profiles = tuple(p for i, p in self.terms if i == tuple(idx))
        return BasisXFunction(profiles).combine(np.ones(len(profiles)))

    def volume_integral(self, size: int = 200) -> float:
        """Integral of the phantom over the ball. Only degree zero terms
        contribute, ``int f = sqrt(omega_n) int_0^1 profile(r) r^(n-1) dr``.

        """
        n = self.dimension
        nodes, weights = np.polynomial.legendre.leggauss(size)
        total = 0.0
        for (m, _), profile in self.terms:
            if m != 0:
                continue
            a, b = profile.support
            r = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            total += 0.5 * (b - a) * weights.dot(profile(r) * r ** (n - 1))
        return float(np.sqrt(sphere_measure(n)) * total)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "terms": [
                {"m": m, "k": k, "profile": profile.to_dict()}
                for (m, k), profile in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Phantom":
        terms = tuple(
            ((int(term["m"]), int(term["k"])), RadialProfile.from_dict(term["profile"]))
            for term in data.get("terms", [])
        )
        return cls(int(data["dimension"]), terms)


def phantom_eval(ph: Phantom, x: Points) -> NDArray:
    """Evaluate a phantom at points of ``R^n``.

    Parameters
    ----------
    ph
        Phantom.
    x
        A point or points stored row-wise. Points outside the support of
        every profile evaluate to exactly zero.

    Returns
    -------
    describe
        Phantom values, a scalar for a single point.

    """
    x = np.asarray(x, dtype=float)
    isscalar = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != ph.dimension:
        raise DomainError(f"points must have {ph.dimension} coordinates")
    shape = x.shape[:-1]
    x = x.reshape(-1, ph.dimension)
    r = np.linalg.norm(x, axis=1)
    result = np.zeros(r.size)

    inside = r < ph.outer_radius
    origin = inside & (r == 0.0)
    inside &= r > 0.0
    if inside.any():
        ri = r[inside]
        basis = _basis_at(ph.dimension, x[inside] / ri[:, None], ph.m_max)
        rows = {idx: i for i, idx in enumerate(harmonic_indices(ph.dimension, ph.m_max))}
        values = np.zeros(ri.size)
        for idx, profile in ph.terms:
            values += profile(ri) * basis[rows[idx]]
        result[inside] = values
    if origin.any():
        y0 = 1.0 / np.sqrt(sphere_measure(ph.dimension))
        result[origin] = sum(
            (profile(0.0) * y0 for (m, _), profile in ph.terms if m == 0), 0.0
        )

    result = result.reshape(shape)
    return result[0] if isscalar else result


def spherical_mean(
    f: Field, x: Points, t: NDArray, grid: SphereGrid
) -> NDArray:
    """Quadrature approximation of the spherical mean of `f`.

    Parameters
    ----------
    f
        Field evaluable on points stored row-wise.
    x
        Center or centers stored row-wise.
    t
        Radius or radii, broadcast against the centers. At ``t = 0`` the
        value ``f(x)`` is returned exactly.
    grid
        Sphere quadrature used for the average.

    Returns
    -------
    describe
        Spherical means, one per center.

    """
    x = np.asarray(x, dtype=float)
    isscalar = x.ndim == 1
    x = np.atleast_2d(x)
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:1])
    if (t < 0.0).any():
        raise DomainError("radius must be nonnegative")
    points = x[:, None, :] + t[:, None, None] * grid.nodes[None, :, :]
    values = np.asarray(f(points.reshape(-1, grid.dimension)), dtype=float)
    result = values.reshape(x.shape[0], grid.size).dot(grid.weights)
    result /= sphere_measure(grid.dimension)
    center = t == 0.0
    if center.any():
        result[center] = f(x[center])
    return result[0] if isscalar else result


@dataclass
class BoundaryData:
    """Sampled values ``g(theta_i, t_j)`` on the sphere times a uniform
    t-grid.

    Parameters
    ----------
    grid
        Sphere grid of the centers.
    t
        Uniform t-grid starting at 0.
    values
        Matrix of values, one row per center and one column per t-node.
    metadata
        Provenance, free form.

    """

    grid: SphereGrid
    t: NDArray
    values: NDArray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        uniform_spacing(self.t)
        if self.values.shape != (self.grid.size, self.t.size):
            raise GridError(
                f"values of shape {self.values.shape} do not match "
                f"{self.grid.size} centers and {self.t.size} t-nodes"
            )
        if not np.isfinite(self.values).all():
            raise GridError("boundary data must be finite")

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    @property
    def t_step(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    def with_values(self, values: NDArray, **metadata) -> "BoundaryData":
        return replace(self, values=values, metadata={**self.metadata, **metadata})

    def __add__(self, other: "BoundaryData") -> "BoundaryData":
        if other.values.shape != self.values.shape:
            raise GridError("boundary data live on different grids")
        return self.with_values(self.values + other.values)


def t_grid(t_max: float = 2.0, samples: int = 401) -> NDArray:
    """Uniform t-grid on ``[0, t_max]``."""
    if samples < 5:
        raise GridError("t-grid needs at least 5 samples")
    return np.linspace(0.0, float(t_max), int(samples))


def restricted_transform(
    f: Field, centers: Points, t: NDArray, quad: SphereGrid, reach: float = 1.0
) -> NDArray:
    """Spherical means of a field supported in the ball of radius `reach`,
    for centers on the unit sphere and every radius of `t`.

    Returns
    -------
    describe
        Matrix of means, one row per center and one column per radius.

    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    values = np.zeros((centers.shape[0], len(t)))
    if reach <= 0.0:
        return values
    for j, tj in enumerate(t):
        # spheres that miss the support contribute exact zeros
        if tj < 1.0 - reach or tj > 1.0 + reach:
            continue
        values[:, j] = spherical_mean(f, centers, tj, quad)
    return values


def forward_data(
    ph: Phantom, center_grid: SphereGrid, t: NDArray, quad: SphereGrid
) -> BoundaryData:
    """Forward spherical mean transform with centers on the unit sphere.

    Parameters
    ----------
    ph
        Phantom.
    center_grid
        Sphere grid of the centers.
    t
        Uniform t-grid covering ``[0, 2]``.
    quad
        Sphere quadrature used for each spherical mean.

    Returns
    -------
    describe
        Boundary data. Every value with ``t > 2`` is exactly zero since no
        quadrature point lands in the unit ball.

    """
    if not ph.dimension == center_grid.dimension == quad.dimension:
        raise DimensionError("phantom and grids have different dimensions")
    t = np.asarray(t, dtype=float)
    uniform_spacing(t)
    if t[0] != 0.0 or t[-1] < 2.0:
        raise GridError("t-grid must start at 0 and cover [0, 2]")

    values = restricted_transform(ph, center_grid.nodes, t, quad, ph.outer_radius)
    logger.info(
        "forward data: %d centers, %d t-nodes, %d quadrature nodes",
        center_grid.size, t.size, quad.size,
    )
    metadata = {
        "source": "forward",
        "phantom": ph.to_dict(),
        "quad_resolution": quad.resolution,
    }
    return BoundaryData(center_grid, t, values, metadata)


def demo_phantom(n: int = 2) -> Phantom:
    """Phantom with degree 0, 1 and 2 annular bumps supported in
    ``(0.2, 0.9)``, with peak values 1, 0.8 and 0.6.

    """
    if n not in SUPPORTED_DIMENSIONS:
        raise DimensionError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
    second = (2, 2) if n == 2 else (2, 3)
    terms = (
        ((0, 1), RadialProfile.from_peak("annular-bump", 0.2, 0.7, 1.0)),
        ((1, 1), RadialProfile.from_peak("annular-bump", 0.3, 0.9, 0.8)),
        (second, RadialProfile.from_peak("truncated-gaussian-bump", 0.25, 0.85, 0.6)),
    )
    return Phantom(n, terms)


def cosine_wave(lam: float, xi: NDArray) -> Field:
    """Plane wave ``f(y) = cos(lam <y, xi>)``. Its spherical mean is
    ``2^nu Gamma(nu + 1) j_nu(lam t) cos(lam <x, xi>)`` with
    ``nu = (n - 2) / 2``.

    """
    xi = np.asarray(xi, dtype=float)

    def fun(y: Points) -> NDArray:
        return np.cos(lam * np.asarray(y, dtype=float).dot(xi))

    return fun


def rotate_phantom(ph: Phantom, alpha: float) -> Phantom:
    """Rotate a planar phantom by the angle `alpha`, so that the new phantom
    evaluates to ``f(R_{-alpha} x)``.

    """
    if ph.dimension != 2:
        raise DimensionError("rotation is provided for n = 2")
    terms = []
    for (m, k), profile in ph.terms:
        if m == 0:
            terms.append(((m, k), profile))
            continue
        c, s = cos(m * alpha), sin(m * alpha)
        kind, (a, b), amp = profile.kind, profile.support, profile.amplitude
        # cos(m(phi - alpha)) and sin(m(phi - alpha)) in the (cos, sin) pair
        pair = (c, s) if k == 1 else (-s, c)
        for branch, factor in zip((1, 2), pair):
            terms.append(((m, branch), RadialProfile(kind, a, b, amp * factor)))
    return Phantom(2, tuple(terms))


def perturbation_bump(
    grid: SphereGrid,
    t: NDArray,
    amplitude: float = 1.0,
    support: tuple[float, float] = (0.5, 1.5),
) -> BoundaryData:
    """Angle independent bump ``g(theta, t) = eta(t)``, which satisfies the
    support conditions but not the orthogonality conditions.

    Parameters
    ----------
    grid
        Sphere grid of the centers.
    t
        Uniform t-grid.
    amplitude
        Peak value of the bump.
    support
        Support of the bump in t.

    """
    t = np.asarray(t, dtype=float)
    a, b = support
    eta = profile_val(("annular-bump", a, b, amplitude / peak_factor(a, b)), t)
    values = np.tile(eta, (grid.size, 1))
    metadata = {"source": "perturbation", "amplitude": amplitude, "support": list(support)}
    return BoundaryData(grid, t, values, metadata)

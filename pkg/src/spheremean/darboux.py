"""Backward boundary value problem for the Darboux equation

    G_tt + (n - 1)/t G_t - Delta G = 0

in the cylinder ``B x (0, T]``, solved mode by mode in the Dirichlet
eigenbasis of the ball, together with the extension verifier and the
infinite order vanishing diagnostic at the unit sphere.

"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil

import numpy as np
from scipy.interpolate import CubicSpline

from spheremean.errors import DomainError, GridError
from spheremean.harmonics import (
    _basis_at,
    harmonic_indices,
    sphere_grid,
    sphere_measure,
)
from spheremean.rangecond import (
    NORM_FLOOR,
    ModeSeries,
    boundary_modes,
    eigen_normal_derivative,
    eigen_order,
    orthogonality_residuals,
)
from spheremean.specfun import bessel_j, bessel_zeros, normalized_j
from spheremean.stencil import (
    central_derivative,
    linear_fit,
    one_sided_derivative,
    uniform_spacing,
)
from spheremean.transform import BoundaryData, Phantom, restricted_transform, spherical_mean
from spheremean.typing import EigenParams, HarmonicIndex, NDArray, Points
from spheremean.xfunction import BasisXFunction, BundleXFunction, XFunction

logger = logging.getLogger(__name__)

MIN_SUBSTEPS = 4
MAX_PHASE_STEP = 0.1
FIT_NODES = 3
MAX_VANISHING_ORDER = 4
VANISHING_ACCURACY = 4


def eigen_val(params: EigenParams, x: NDArray) -> NDArray:
    """Radial Dirichlet eigenfunction ``(lam r)^(-(n-2)/2) J_{nu_m}(lam r)``,
    written as ``u^m j_{nu_m}(u)`` with ``u = lam r``.

    """
    n, m, lam = params
    u = lam * x
    return u**m * normalized_j(eigen_order(n, m), u)


def eigen_der(params: EigenParams, x: NDArray, order: int) -> NDArray:
    """Derivatives of :func:`eigen_val` from ``j_nu'(u) = -u j_{nu+1}(u)``."""
    n, m, lam = params
    nu = eigen_order(n, m)
    u = lam * x
    if order == 1:
        result = -(u ** (m + 1)) * normalized_j(nu + 1, u)
        if m >= 1:
            result += m * u ** (m - 1) * normalized_j(nu, u)
        return lam * result
    if order == 2:
        result = -(2 * m + 1) * u**m * normalized_j(nu + 1, u)
        result += u ** (m + 2) * normalized_j(nu + 2, u)
        if m >= 2:
            result += m * (m - 1) * u ** (m - 2) * normalized_j(nu, u)
        return lam**2 * result
    raise ValueError("eigenfunction derivatives are provided up to order 2")


class RadialEigenfunction(BundleXFunction):
    """Radial factor of the Dirichlet eigenfunction of degree `m` with
    eigenvalue ``lam^2``.

    Parameters
    ----------
    n
        Space dimension.
    m
        Harmonic degree.
    lam
        Positive zero of ``J_{m + (n-2)/2}``.

    """

    def __init__(self, n: int, m: int, lam: float) -> None:
        super().__init__(
            (int(n), int(m), float(lam)), eigen_val, eigen_der, max_order=2
        )


@dataclass(frozen=True)
class EigenData:
    """Dirichlet eigenvalues and radial eigenfunctions of one degree.

    Parameters
    ----------
    dimension
        Space dimension.
    m
        Harmonic degree.
    lam
        Square roots of the eigenvalues.
    norms
        Squared norms ``N_j = int_0^1 phi_j^2 r^(n-1) dr``.
    basis
        Eigenfunctions as a basis.

    """

    dimension: int
    m: int
    lam: NDArray = field(repr=False)
    norms: NDArray = field(repr=False)
    basis: BasisXFunction = field(repr=False)

    @property
    def count(self) -> int:
        return self.lam.size

    def closed_form_norms(self) -> NDArray:
        """``N_j = lam^(2-n) J_{nu_m + 1}(lam)^2 / 2``."""
        nu = eigen_order(self.dimension, self.m)
        return self.lam ** (2 - self.dimension) * bessel_j(nu + 1.0, self.lam) ** 2 / 2

    def normal_derivatives(self) -> NDArray:
        return eigen_normal_derivative(self.dimension, self.m, self.lam)


def _gauss_radial(size: int) -> tuple[NDArray, NDArray]:
    x, w = np.polynomial.legendre.leggauss(size)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def dirichlet_eigendata(n: int, m: int, count: int) -> EigenData:
    """Dirichlet eigendata of degree `m` in the unit ball of ``R^n``.

    Parameters
    ----------
    n
        Space dimension.
    m
        Harmonic degree.
    count
        Number of eigenvalues.

    Returns
    -------
    describe
        Eigenvalues ``lam_j``, the zeros of ``J_{m + (n-2)/2}``, with
        eigenfunctions and their squared norms by Gauss-Legendre quadrature.

    """
    n, m, count = int(n), int(m), int(count)
    if count < 1:
        raise DomainError("please request at least one eigenvalue")
    if m < 0 or n < 2:
        raise DomainError("eigendata needs n >= 2 and m >= 0")
    lam = bessel_zeros(eigen_order(n, m), count).as_array()
    basis = BasisXFunction(tuple(RadialEigenfunction(n, m, x) for x in lam))
    r, w = _gauss_radial(64 + int(lam[-1]))
    phi = basis.design_mat(r)
    norms = (w * r ** (n - 1)).dot(phi**2)
    return EigenData(n, m, lam, norms, basis)


def harmonic_extension_coeffs(n: int, m: int, count: int) -> NDArray:
    """Coefficients ``c_j = <r^m, phi_j> / N_j`` of the harmonic extension
    ``r^m`` in the radial eigenbasis of degree `m`.

    """
    eig = dirichlet_eigendata(n, m, count)
    r, w = _gauss_radial(64 + int(eig.lam[-1]))
    phi = eig.basis.design_mat(r)
    return (w * r ** (m + n - 1)).dot(phi) / eig.norms


def _regular(n: int, lam: NDArray, t: NDArray) -> tuple[NDArray, NDArray]:
    # u = j_mu(lam t) and du/dt = -lam^2 t j_{mu+1}(lam t), shape (J, len(t))
    mu = 0.5 * (n - 2)
    u = np.vstack([normalized_j(mu, x * t) for x in lam])
    du = np.vstack([-(x**2) * t * normalized_j(mu + 1.0, x * t) for x in lam])
    return u, du


@dataclass
class ModeProblem:
    """Backward problem of one harmonic mode.

    Parameters
    ----------
    series
        Boundary coefficient ``g_{m,k}(t)`` on a uniform t-grid starting at 0.
    eigs
        Number of eigenfunctions.
    horizon
        Time ``T`` beyond which the solution vanishes, a node of the t-grid.
    r_samples
        Number of samples of the recovered profile on ``[0, 1]``.
    sigma_threshold
        Threshold on the singularity indicator, no verdict when ``None``.
    norm_floor
        Lower bound added to the norm of the series when scaling the
        singularity indicator.

    """

    series: ModeSeries
    eigs: int = 64
    horizon: float = 2.0
    r_samples: int = 201
    sigma_threshold: float | None = None
    norm_floor: float = 0.0

    def __post_init__(self) -> None:
        if self.eigs < 1:
            raise DomainError("please use at least one eigenfunction")
        t = self.series.grid
        if t[0] != 0.0:
            raise GridError("t-grid must start at 0")
        if t.size <= FIT_NODES + 1:
            raise GridError("t-grid is too coarse")
        last = int(round(self.horizon / self.series.step))
        if last >= t.size or abs(t[last] - self.horizon) > 1e-9 * self.horizon:
            raise GridError("horizon must be a node of the t-grid")
        values = np.abs(self.series.values)
        if values[last:].max() > 1e-12 * max(values.max(), 1e-300):
            raise DomainError("boundary series is not supported in [0, T]")

    @property
    def dimension(self) -> int:
        return self.series.dimension

    @property
    def index(self) -> HarmonicIndex:
        return self.series.index

    @property
    def last(self) -> int:
        return int(round(self.horizon / self.series.step))


@dataclass
class ModeSolution:
    """Solution of one backward mode problem.

    Parameters
    ----------
    problem
        The mode problem.
    eig
        Eigendata of the mode.
    c
        Harmonic extension coefficients.
    h
        Eigen-coefficients ``h_j(t)`` on the t-grid, shape ``(J, num_t)``.
    velocity
        Estimated eigen-coefficients of ``G_t(r, 0)``.
    velocity_floor
        Truncation floor of the velocity estimator, per eigenfunction.
    sigma
        Singularity indicator.
    profile
        Recovered initial value ``f_{m,k}(r)``.

    """

    problem: ModeProblem
    eig: EigenData = field(repr=False)
    c: NDArray = field(repr=False)
    h: NDArray = field(repr=False)
    velocity: NDArray = field(repr=False)
    velocity_floor_coeffs: NDArray = field(repr=False)
    sigma: float = 0.0
    profile: ModeSeries | None = field(default=None, repr=False)

    @property
    def index(self) -> HarmonicIndex:
        return self.problem.index

    @property
    def t(self) -> NDArray:
        return self.problem.series.grid

    @property
    def verdict(self) -> bool:
        threshold = self.problem.sigma_threshold
        return True if threshold is None else self.sigma <= threshold

    @property
    def velocity_norm(self) -> float:
        return float(np.sqrt(self.velocity**2 @ self.eig.norms))

    @property
    def velocity_floor(self) -> float:
        return float(np.sqrt(self.velocity_floor_coeffs**2 @ self.eig.norms))

    @property
    def tail(self) -> float:
        """Size of the last eigen-contribution, ``max |h_J| max |phi_J|``."""
        r = self.profile.grid
        phi_last = self.eig.basis.basis_funs[-1](r)
        return float(np.abs(self.h[-1]).max() * np.abs(phi_last).max())

    def radial_slice(self, r: NDArray, t: NDArray | None = None) -> NDArray:
        """``G_{m,k}(r, t) = r^m g(t) + sum_j h_j(t) phi_j(r)`` on a grid,
        shape ``(len(r), len(t))``. Defaults to the solver t-grid.

        """
        r = np.asarray(r, dtype=float)
        g, h = self.problem.series.values, self.h
        if t is not None:
            g, h = self._g_spline(t), self._h_spline(t)
        phi = self.eig.basis.design_mat(r)
        return np.outer(r**self.eig.m, g) + phi.dot(h)

    def pointwise(self, r: NDArray, t: NDArray) -> NDArray:
        """``G_{m,k}(r_i, t_i)`` at paired samples."""
        r, t = np.asarray(r, dtype=float), np.asarray(t, dtype=float)
        phi = self.eig.basis.design_mat(r)
        return r**self.eig.m * self._g_spline(t) + (phi * self._h_spline(t).T).sum(axis=1)

    def _g_spline(self, t: NDArray) -> NDArray:
        return CubicSpline(self.t, self.problem.series.values)(t)

    def _h_spline(self, t: NDArray) -> NDArray:
        return CubicSpline(self.t, self.h, axis=1)(t)

    def profile_function(self) -> XFunction:
        """Recovered ``f_{m,k}`` as a radial function on ``[0, inf)``, extended
        by zero outside the unit ball.

        """
        spline = CubicSpline(self.profile.grid, self.profile.values)
        return XFunction(lambda x, order=0: spline(x, order), radius=1.0)

    def to_dict(self) -> dict:
        m, k = self.index
        return {
            "m": m,
            "k": k,
            "eigs": self.eig.count,
            "sigma": self.sigma,
            "velocity_norm": self.velocity_norm,
            "velocity_floor": self.velocity_floor,
            "tail": self.tail,
            "verdict": "pass" if self.verdict else "fail",
        }


def _substeps(lam_max: float, h: float) -> int:
    return max(MIN_SUBSTEPS, ceil(lam_max * h / MAX_PHASE_STEP))


def _rk4_backward(
    n: int, lam: NDArray, c: NDArray, spline: CubicSpline, t: NDArray, last: int
) -> tuple[NDArray, NDArray]:
    # a'' + (n-1)/t a' + lam^2 a = lam^2 c g with a(T) = a'(T) = 0
    h = t[1] - t[0]
    substeps = _substeps(lam[-1], h)
    dt = -h / substeps
    fine = t[last] + 0.5 * dt * np.arange(2 * substeps * (last - 1) + 1)
    forcing = spline(fine)
    lam2, lam2c = lam**2, lam**2 * c

    def rhs(tau, y, dy, gval):
        return dy, -(n - 1) / tau * dy - lam2 * y + lam2c * gval

    a = np.zeros((lam.size, t.size))
    da = np.zeros((lam.size, t.size))
    y, dy = np.zeros(lam.size), np.zeros(lam.size)
    step = 0
    for i in range(last, 1, -1):
        for _ in range(substeps):
            tau = t[last] + step * dt
            g0, g1, g2 = forcing[2 * step], forcing[2 * step + 1], forcing[2 * step + 2]
            k1y, k1d = rhs(tau, y, dy, g0)
            k2y, k2d = rhs(tau + 0.5 * dt, y + 0.5 * dt * k1y, dy + 0.5 * dt * k1d, g1)
            k3y, k3d = rhs(tau + 0.5 * dt, y + 0.5 * dt * k2y, dy + 0.5 * dt * k2d, g1)
            k4y, k4d = rhs(tau + dt, y + dt * k3y, dy + dt * k3d, g2)
            y = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            dy = dy + dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
            step += 1
        a[:, i - 1], da[:, i - 1] = y, dy
    return a, da


def backward_solve_mode(p: ModeProblem) -> ModeSolution:
    """Solve the backward Darboux problem of one mode.

    The eigen-coefficients ``a_j = h_j + c_j g`` of ``G_{m,k}(., t)`` solve
    ``a'' + (n-1)/t a' + lam_j^2 a = lam_j^2 c_j g`` with ``a(T) = a'(T) = 0``
    and are integrated backward to the first positive node by classical
    Runge-Kutta. Near ``t = 0`` the coefficients are matched to the regular
    solution ``u_j = j_{(n-2)/2}(lam_j t)``:

    * ``h_j(0)`` is the least squares multiple of ``u_j`` through the three
      smallest positive nodes,
    * ``sigma`` is the largest ``|t^(n-1) (a_j' u_j - a_j u_j')|``, which is
      constant where ``g`` vanishes and equals ``lam_j^2 c_j`` times the
      Fourier-Bessel transform of ``g`` at ``lam_j``, scaled to
      ``|g_hat(lam_j)| / ||g||``,
    * the velocity is the intercept of the least squares line through
      ``a_j'``.

    Parameters
    ----------
    p
        Mode problem.

    Returns
    -------
    describe
        Mode solution. When ``sigma`` exceeds the threshold of the problem the
        solution is still returned with a failing verdict.

    """
    n, (m, _) = p.dimension, p.index
    t, g = p.series.grid, p.series.values
    eig = dirichlet_eigendata(n, m, p.eigs)
    c = harmonic_extension_coeffs(n, m, p.eigs)
    lam, last = eig.lam, p.last

    spline = CubicSpline(t, g)
    if np.any(g):
        a, da = _rk4_backward(n, lam, c, spline, t, last)
    else:
        a, da = np.zeros((lam.size, t.size)), np.zeros((lam.size, t.size))
    a[:, 0] = 0.0
    h = a - np.outer(c, g)
    h[:, last:] = 0.0

    near = t[1 : FIT_NODES + 1]
    u, du = _regular(n, lam, near)
    hn, an, dan = h[:, 1 : FIT_NODES + 1], a[:, 1 : FIT_NODES + 1], da[:, 1 : FIT_NODES + 1]
    u0 = normalized_j(0.5 * (n - 2), 0.0)
    h[:, 0] = u0 * (hn * u).sum(axis=1) / (u**2).sum(axis=1)
    a0 = h[:, 0] + c * g[0]

    wronskian = np.abs(near ** (n - 1) * (dan * u - an * du)).max(axis=1)
    scale = lam**2 * np.abs(c) * (p.series.norm() + p.norm_floor)
    sigma = float((wronskian / scale).max()) if np.any(wronskian) else 0.0

    velocity = linear_fit(near, dan.T)[0]
    exact_slope = linear_fit(near, du.T)[0]
    floor = np.abs(exact_slope * a0 / u0)

    r = np.linspace(0.0, 1.0, p.r_samples)
    values = r**m * g[0] + eig.basis.combine(h[:, 0])(r)
    profile = ModeSeries(n, p.index, r, values)
    solution = ModeSolution(p, eig, c, h, velocity, floor, sigma, profile)
    logger.debug(
        "mode %s: sigma %.3e, velocity %.3e (floor %.3e)",
        p.index, sigma, solution.velocity_norm, solution.velocity_floor,
    )
    if not solution.verdict:
        logger.warning("mode %s: non-range boundary data, sigma %.3e", p.index, sigma)
    return solution


def separable_solution(n: int, m: int, lam: float):
    """Exact solution ``j_{(n-2)/2}(lam t) (lam r)^m j_{nu_m}(lam r)`` of the
    Darboux equation for degree `m`, as a function of ``(r, t)`` grids
    returning shape ``(len(r), len(t))``.

    """
    phi = RadialEigenfunction(n, m, lam)
    mu = 0.5 * (n - 2)

    def fun(r: NDArray, t: NDArray) -> NDArray:
        r, t = np.asarray(r, dtype=float), np.asarray(t, dtype=float)
        return np.outer(phi(r), normalized_j(mu, lam * t))

    return fun


def darboux_residual(G: NDArray, r: NDArray, t: NDArray, n: int, m: int) -> float:
    """Discrete L2 norm of the Darboux operator
    ``G_tt + (n-1)/t G_t - G_rr - (n-1)/r G_r + m(m+n-2)/r^2 G`` applied
    with second order central differences at the interior nodes.

    Parameters
    ----------
    G
        Values on the grid, shape ``(len(r), len(t))``.
    r
        Uniform r-grid.
    t
        Uniform t-grid.
    n
        Space dimension.
    m
        Harmonic degree.

    Raises
    ------
    GridError
        Raised when a direction has fewer than 5 points.

    """
    G = np.asarray(G, dtype=float)
    r, t = np.asarray(r, dtype=float), np.asarray(t, dtype=float)
    if r.size < 5 or t.size < 5:
        raise GridError("darboux residual needs at least 5 points per direction")
    hr, ht = uniform_spacing(r), uniform_spacing(t)
    if G.shape != (r.size, t.size):
        raise GridError("values do not match the grids")
    ri, ti = r[1:-1, None], t[None, 1:-1]
    if (ri <= 0.0).any() or (ti <= 0.0).any():
        raise GridError("interior nodes must have r > 0 and t > 0")
    inner = G[1:-1, 1:-1]
    gt = central_derivative(G.T, ht, 1).T[1:-1]
    gtt = central_derivative(G.T, ht, 2).T[1:-1]
    gr = central_derivative(G, hr, 1)[:, 1:-1]
    grr = central_derivative(G, hr, 2)[:, 1:-1]
    residual = gtt + (n - 1) / ti * gt - grr - (n - 1) / ri * gr
    residual += m * (m + n - 2) / ri**2 * inner
    return float(np.sqrt((residual**2).sum() * hr * ht))


class RecoveredField:
    """Recovered initial value ``f*(x) = sum f_{m,k}(|x|) Y_{m,k}(x/|x|)``,
    extended by zero outside the unit ball.

    """

    def __init__(self, n: int, solutions: list[ModeSolution]) -> None:
        self.dimension = n
        self.m_max = max((s.index[0] for s in solutions), default=0)
        self.rows = {idx: i for i, idx in enumerate(harmonic_indices(n, self.m_max))}
        self.profiles = [(s.index, s.profile_function()) for s in solutions]

    def __call__(self, x: Points) -> NDArray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        result = np.zeros(r.size)
        inside = (r > 0.0) & (r < 1.0)
        if inside.any():
            ri = r[inside]
            basis = _basis_at(self.dimension, x[inside] / ri[:, None], self.m_max)
            values = np.zeros(ri.size)
            for idx, fun in self.profiles:
                values += fun(ri) * basis[self.rows[idx]]
            result[inside] = values
        origin = r == 0.0
        if origin.any():
            y0 = 1.0 / np.sqrt(sphere_measure(self.dimension))
            result[origin] = sum(
                (float(fun(0.0)) * y0 for (m, _), fun in self.profiles if m == 0), 0.0
            )
        return result


def assemble_field(solutions: list[ModeSolution], x: Points, t: NDArray) -> NDArray:
    """Evaluate ``G+(x, t) = sum G_{m,k}(|x|, t) Y_{m,k}(x/|x|)`` at paired
    samples of points in the ball and times.

    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:1])
    if not solutions:
        return np.zeros(x.shape[0])
    n = solutions[0].problem.dimension
    m_max = max(s.index[0] for s in solutions)
    rows = {idx: i for i, idx in enumerate(harmonic_indices(n, m_max))}
    r = np.linalg.norm(x, axis=1)
    safe = np.where(r > 0.0, r, 1.0)
    basis = _basis_at(n, np.where(r[:, None] > 0.0, x / safe[:, None], _pole(n)), m_max)
    result = np.zeros(x.shape[0])
    for s in solutions:
        result += s.pointwise(r, t) * basis[rows[s.index]]
    return result


def _pole(n: int) -> NDArray:
    pole = np.zeros(n)
    pole[-1] = 1.0
    return pole


@dataclass
class ExtensionReport:
    """Diagnostics of the extension of boundary data to a global solution.

    All mismatches are relative. Entries are ``None`` when the range test
    failed and the check was short-circuited.

    """

    params: dict
    range_verdict: bool
    modes: list[dict] = field(default_factory=list)
    sigma: float = 0.0
    sigma_threshold: float = 0.0
    boundary_mismatch: float | None = None
    interior_mismatch: float | None = None
    downward_cone_mismatch: float | None = None
    upward_cone_max: float | None = None
    velocity_norm: float | None = None
    velocity_floor: float | None = None
    profile_error: float | None = None
    untested: list[dict] = field(default_factory=list)
    tol: float = 1e-2
    cone_tol: float = 1e-3
    velocity_factor: float = 10.0
    solutions: list[ModeSolution] = field(default_factory=list, repr=False)

    @property
    def checks(self) -> dict[str, bool]:
        checks = {"range": self.range_verdict, "sigma": self.sigma <= self.sigma_threshold}
        if self.boundary_mismatch is None:
            return checks
        checks["boundary"] = self.boundary_mismatch <= self.tol
        checks["interior"] = self.interior_mismatch <= self.tol
        checks["downward_cone"] = self.downward_cone_mismatch <= self.tol
        checks["upward_cone"] = self.upward_cone_max <= self.cone_tol
        checks["velocity"] = self.velocity_norm <= self.velocity_factor * self.velocity_floor
        if self.profile_error is not None:
            checks["profile"] = self.profile_error <= self.tol
        return checks

    @property
    def verdict(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "params": {
                **self.params,
                "tol": self.tol,
                "cone_tol": self.cone_tol,
                "velocity_factor": self.velocity_factor,
            },
            "sigma": self.sigma,
            "sigma_threshold": self.sigma_threshold,
            "boundary_mismatch": self.boundary_mismatch,
            "interior_mismatch": self.interior_mismatch,
            "downward_cone_mismatch": self.downward_cone_mismatch,
            "upward_cone_max": self.upward_cone_max,
            "velocity_norm": self.velocity_norm,
            "velocity_floor": self.velocity_floor,
            "profile_error": self.profile_error,
            "modes": self.modes,
            "untested": self.untested,
            "checks": {k: "pass" if v else "fail" for k, v in self.checks.items()},
            "verdict": "pass" if self.verdict else "fail",
        }


def _relative(diff: NDArray, ref: NDArray) -> float:
    norm = float(np.linalg.norm(ref))
    value = float(np.linalg.norm(diff))
    return value / norm if norm > 0.0 else value


def solve_modes(
    g: BoundaryData,
    m_max: int,
    eigs: int = 64,
    r_samples: int = 201,
    sigma_threshold: float | None = None,
    horizon: float = 2.0,
) -> list[ModeSolution]:
    """Backward solve of every mode of `g` up to degree `m_max`, in the order
    of :func:`~spheremean.harmonics.harmonic_indices`.

    """
    horizon = min(horizon, g.t_max)
    modes = boundary_modes(g, m_max)
    floor = NORM_FLOOR * float(np.sqrt(sum(s.norm() ** 2 for s in modes)))
    solutions = []
    for series in modes:
        problem = ModeProblem(series, eigs, horizon, r_samples, sigma_threshold, floor)
        solutions.append(backward_solve_mode(problem))
    return solutions


def _profile_error(ph: Phantom, solutions: list[ModeSolution]) -> float:
    n = ph.dimension
    r, w = _gauss_radial(256)
    weight = w * r ** (n - 1)
    recovered = {s.index: s.profile_function()(r) for s in solutions}
    truth = {idx: ph.mode_profile(idx)(r) for idx, _ in ph.terms}
    error = sum(
        weight.dot((recovered.get(idx, 0.0) - truth.get(idx, 0.0)) ** 2)
        for idx in set(recovered) | set(truth)
    )
    total = sum(weight.dot(v**2) for v in truth.values())
    return float(np.sqrt(error / total)) if total > 0.0 else float(np.sqrt(error))


def extension_check(
    g: BoundaryData,
    ph_truth: Phantom | None = None,
    m_max: int = 8,
    eigs: int = 64,
    *,
    q_max: int = 10,
    tol: float = 1e-5,
    extension_tol: float = 1e-2,
    sigma_factor: float = 10.0,
    velocity_factor: float = 10.0,
    r_samples: int = 201,
    quad_resolution: int | None = None,
    check_centers: int = 16,
    interior_samples: int = 100,
    cone_margin: float = 0.05,
    cone_tol: float = 1e-3,
    seed: int = 0,
) -> ExtensionReport:
    """Verify that boundary data extends to a global solution of the Darboux
    equation whose initial value is the recovered ``f`` extended by zero.

    The check solves every mode backward, assembles ``f*``, and compares

    * ``R_S f*`` with ``g`` at ``check_centers`` centers and every t-node,
    * ``R f*`` with ``G+`` at ``interior_samples`` seeded points of the
      cylinder, and separately on the downward cone ``|x| + t <= 1``,
    * ``G+`` with zero on the upward cone ``t - |x| >= 1 + cone_margin``,
    * the estimated ``G_t(., 0)`` with the truncation floor of the velocity
      estimator.

    When the orthogonality test fails the report only carries the
    singularity indicators.

    """
    n = g.dimension
    range_report = orthogonality_residuals(g, m_max, q_max, tol)
    sigma_threshold = sigma_factor * tol
    solutions = solve_modes(g, m_max, eigs, r_samples, sigma_threshold)
    report = ExtensionReport(
        params={"dimension": n, "m_max": m_max, "eigs": eigs, "q_max": q_max, "seed": seed},
        range_verdict=range_report.verdict,
        modes=[s.to_dict() for s in solutions],
        sigma=max(s.sigma for s in solutions),
        sigma_threshold=sigma_threshold,
        tol=extension_tol,
        cone_tol=cone_tol,
        velocity_factor=velocity_factor,
        solutions=solutions,
    )
    if g.grid.band > m_max:
        report.untested.append({"m_from": m_max + 1, "m_to": g.grid.band})
    if not range_report.verdict:
        logger.warning("range test failed, extension check short-circuited")
        return report

    field_star = RecoveredField(n, solutions)
    if quad_resolution is None:
        quad_resolution = 256 if n == 2 else 32
    quad = sphere_grid(n, quad_resolution)

    picks = np.linspace(0, g.grid.size, min(check_centers, g.grid.size), endpoint=False)
    picks = picks.astype(int)
    retrace = restricted_transform(field_star, g.grid.nodes[picks], g.t, quad)
    report.boundary_mismatch = _relative(retrace - g.values[picks], g.values[picks])

    rng = np.random.default_rng(seed)
    direction = rng.standard_normal((interior_samples, n))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    x = direction * rng.uniform(size=(interior_samples, 1)) ** (1.0 / n)
    last = int(round(min(2.0, g.t_max) / g.t_step))
    t = g.t[rng.integers(0, last + 1, size=interior_samples)]
    mean = spherical_mean(field_star, x, t, quad)
    extended = assemble_field(solutions, x, t)
    report.interior_mismatch = _relative(mean - extended, extended)
    downward = np.linalg.norm(x, axis=1) + t <= 1.0
    report.downward_cone_mismatch = _relative(
        mean[downward] - extended[downward], extended[downward]
    )

    r = solutions[0].profile.grid
    slices = [s.radial_slice(r) for s in solutions]
    peak = max(float(np.abs(G).max()) for G in slices)
    upward = g.t[None, :] - r[:, None] >= 1.0 + cone_margin
    cone = max(float(np.abs(G[upward]).max(initial=0.0)) for G in slices)
    report.upward_cone_max = cone / peak if peak > 0.0 else cone

    report.velocity_norm = float(np.sqrt(sum(s.velocity_norm**2 for s in solutions)))
    report.velocity_floor = float(np.sqrt(sum(s.velocity_floor**2 for s in solutions)))
    if ph_truth is not None:
        report.profile_error = _profile_error(ph_truth, solutions)
    logger.info(
        "extension: boundary %.3e, interior %.3e, cone %.3e, verdict %s",
        report.boundary_mismatch,
        report.interior_mismatch,
        report.upward_cone_max,
        report.verdict,
    )
    return report


@dataclass(frozen=True)
class DerivativeEstimate:
    """One-sided estimate of ``f^(j)(1)`` with its refinement tag.

    Parameters
    ----------
    order
        Derivative order ``j``.
    value
        Estimate at spacing ``h``.
    coarse
        Estimate at spacing ``2h``.
    scale
        Largest interior magnitude of the ``j``-th difference quotient.
    tag
        ``"floor"``, ``"converging"`` or ``"nonvanishing"``.

    """

    order: int
    value: float
    coarse: float
    scale: float
    tag: str

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "value": self.value,
            "coarse": self.coarse,
            "scale": self.scale,
            "tag": self.tag,
        }


def vanishing_diagnostic(
    f_m: ModeSeries, orders: int, vanishing_tol: float = 1e-3
) -> list[DerivativeEstimate]:
    """Estimate ``f_m^(j)(1)`` for ``j = 0..orders`` by one-sided finite
    differences at spacings ``h`` and ``2h``.

    An estimate is tagged ``"floor"`` when it is below `vanishing_tol` times
    the largest interior difference quotient of the same order,
    ``"converging"`` when halving the spacing at least halves it, and
    ``"nonvanishing"`` otherwise.

    Raises
    ------
    GridError
        Raised when `orders` is beyond the largest resolvable order.

    """
    values, h = f_m.values, f_m.step
    resolvable = min(MAX_VANISHING_ORDER, values.size // 2 - VANISHING_ACCURACY)
    if orders > resolvable:
        raise GridError(f"orders must be at most {max(resolvable, 0)} on this grid")
    coarse_values = values[::-1][::2][::-1]
    estimates = []
    for j in range(orders + 1):
        value = float(one_sided_derivative(values, h, j, VANISHING_ACCURACY))
        coarse = float(one_sided_derivative(coarse_values, 2.0 * h, j, VANISHING_ACCURACY))
        scale = float(np.abs(np.diff(values, j)).max() / h**j) if j else float(np.abs(values).max())
        if abs(value) <= vanishing_tol * scale:
            tag = "floor"
        elif abs(value) <= 0.5 * abs(coarse):
            tag = "converging"
        else:
            tag = "nonvanishing"
        estimates.append(DerivativeEstimate(j, value, coarse, scale, tag))
    return estimates

"""Range conditions of the spherical mean transform with centers on the unit
sphere: Fourier-Bessel transforms of the angular coefficients at Dirichlet
Bessel zeros, and the moment conditions for ``n = 2``.

"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import pi

import numpy as np
from scipy import integrate

from spheremean.errors import ConditioningError, DimensionError, DomainError, GridError
from spheremean.harmonics import (
    AngularCoefficients,
    angular_decompose,
    harmonic_basis,
    harmonic_eval,
)
from spheremean.specfun import bessel_j_derivative, bessel_zeros, normalized_j
from spheremean.stencil import uniform_spacing
from spheremean.transform import BoundaryData
from spheremean.typing import HarmonicIndex, NDArray

logger = logging.getLogger(__name__)

# modes are measured against at least this fraction of the total data norm.
# Degrees absent from the data hold only quadrature leakage, whose ratio to
# its own norm is of order one; with this floor the demo phantom at default
# grids gives max rho 3.2e-12 for m <= 8, q <= 10, at 401 and 801 t-nodes.
NORM_FLOOR = 1e-3
MAX_CONDITION = 1e12
SUPPORT_EDGE = 2.0


def eigen_order(n: int, m: int) -> float:
    """Bessel order ``m + (n - 2) / 2`` whose zeros are the Dirichlet
    eigenvalues of degree `m` in the unit ball.

    """
    return m + 0.5 * (n - 2)


def eigen_normal_derivative(n: int, m: int, lam: NDArray) -> NDArray:
    """Normal derivative on the unit sphere of the radial eigenfunction
    ``(lam r)^(-(n-2)/2) J_{nu_m}(lam r)``, evaluated at Dirichlet zeros where
    it reduces to ``lam^(1 - (n-2)/2) J_{nu_m}'(lam)``.

    """
    lam = np.asarray(lam, dtype=float)
    mu = 0.5 * (n - 2)
    return lam ** (1.0 - mu) * bessel_j_derivative(eigen_order(n, m), lam)


@lru_cache(maxsize=16)
def _weights(t0: float, h: float, size: int) -> tuple[NDArray, str]:
    t = t0 + h * np.arange(size)
    eye = np.eye(size)
    if size % 2 == 1:
        return integrate.simpson(eye, x=t, axis=-1), "simpson"
    logger.warning("even number of samples (%d), using the trapezoid rule", size)
    return integrate.trapezoid(eye, x=t, axis=-1), "trapezoid"


def quadrature_weights(t: NDArray) -> tuple[NDArray, str]:
    """Integration weights on a uniform grid: composite Simpson for an odd
    number of samples, composite trapezoid otherwise.

    Returns
    -------
    describe
        Weights and the name of the rule.

    """
    h = uniform_spacing(t)
    weights, rule = _weights(float(t[0]), h, len(t))
    return weights.copy(), rule


@dataclass
class ModeSeries:
    """Coefficient function of one harmonic sampled on a uniform grid, either
    ``g_{m,k}(t)`` or ``f_{m,k}(r)``.

    Parameters
    ----------
    dimension
        Space dimension.
    index
        Harmonic index ``(m, k)``.
    grid
        Uniform sample locations starting at 0.
    values
        Sample values.

    """

    dimension: int
    index: HarmonicIndex
    grid: NDArray
    values: NDArray

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        uniform_spacing(self.grid)
        if self.values.shape != self.grid.shape:
            raise GridError("mode series values do not match the grid")
        if not np.isfinite(self.values).all():
            raise GridError("mode series must be finite")

    @property
    def m(self) -> int:
        return self.index[0]

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def norm(self) -> float:
        """L2 norm with weight ``x^(n-1)``."""
        weights, _ = quadrature_weights(self.grid)
        return float(
            np.sqrt(abs(weights.dot(self.values**2 * self.grid ** (self.dimension - 1))))
        )


def boundary_modes(g: BoundaryData, m_max: int) -> list[ModeSeries]:
    """Angular coefficients of boundary data as a list of mode series, in the
    order of :func:`~spheremean.harmonics.harmonic_indices`.

    """
    coeffs = angular_decompose(g.values, g.grid, m_max)
    return _to_modes(coeffs, g.t)


def _to_modes(coeffs: AngularCoefficients, t: NDArray) -> list[ModeSeries]:
    return [
        ModeSeries(coeffs.dimension, idx, t, row)
        for idx, row in zip(coeffs.indices, coeffs.values)
    ]


def _kernel(n: int, lam: NDArray, t: NDArray) -> NDArray:
    # j_{(n-2)/2}(lam t), one row per lambda
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return np.vstack([normalized_j(0.5 * (n - 2), abs(x) * t) for x in lam])


def fourier_bessel(series: ModeSeries, n: int, lam: NDArray) -> NDArray:
    """Fourier-Bessel transform
    ``int_0^inf g(t) j_{(n-2)/2}(lam t) t^(n-1) dt``.

    Parameters
    ----------
    series
        Series sampled on a uniform grid covering its support.
    n
        Space dimension.
    lam
        Transform variable, scalar or array.

    Returns
    -------
    describe
        Transform values, a scalar for a scalar `lam`.

    """
    isscalar = np.ndim(lam) == 0
    weights, _ = quadrature_weights(series.grid)
    kernel = _kernel(n, lam, series.grid)
    result = kernel.dot(weights * series.values * series.grid ** (n - 1))
    return float(result[0]) if isscalar else result


def _check_support(g: BoundaryData) -> None:
    if g.values.size == 0:
        raise DomainError("boundary data is empty")
    if g.t[0] != 0.0 or g.t_max < SUPPORT_EDGE:
        raise GridError("t-grid must start at 0 and cover [0, 2]")


def tested_zeros(n: int, m: int, q_max: int, h: float) -> tuple[NDArray, NDArray]:
    """First `q_max` Dirichlet zeros of degree `m` split into those resolved by
    a grid of spacing `h` (``lam h <= pi/4``) and the untested rest.

    """
    zeros = bessel_zeros(eigen_order(n, m), q_max).as_array()
    resolved = zeros * h <= 0.25 * pi
    return zeros, resolved


@dataclass
class RangeReport:
    """Residuals of the orthogonality conditions.

    Parameters
    ----------
    params
        Parameters of the test.
    residuals
        One entry per tested ``(m, k, q)`` with the zero ``lambda``, the
        transform value and the normalized residual ``rho``.
    norms
        Norms of the angular coefficients, one per ``(m, k)``.
    tol
        Tolerance for the verdict.
    untested
        Zeros skipped because the grid does not resolve them.
    rule
        Integration rule in t.

    """

    params: dict
    residuals: list[dict] = field(default_factory=list)
    norms: dict[HarmonicIndex, float] = field(default_factory=dict)
    tol: float = 1e-5
    untested: list[dict] = field(default_factory=list)
    rule: str = "simpson"

    @property
    def max_residual(self) -> float:
        return max((entry["rho"] for entry in self.residuals), default=0.0)

    @property
    def verdict(self) -> bool:
        return self.max_residual < self.tol

    def rho(self, m: int, k: int, q: int) -> float:
        for entry in self.residuals:
            if (entry["m"], entry["k"], entry["q"]) == (m, k, q):
                return entry["rho"]
        raise KeyError((m, k, q))

    def to_dict(self) -> dict:
        return {
            "params": {**self.params, "tol": self.tol, "rule": self.rule},
            "residuals": self.residuals,
            "norms": [
                {"m": m, "k": k, "norm": value} for (m, k), value in self.norms.items()
            ],
            "max_residual": self.max_residual,
            "verdict": "pass" if self.verdict else "fail",
            "untested": self.untested,
        }


def orthogonality_residuals(
    g: BoundaryData, m_max: int, q_max: int, tol: float = 1e-5
) -> RangeReport:
    """Normalized residuals of the orthogonality conditions.

    For every ``(m, k)`` with ``m <= m_max`` and each of the first `q_max`
    zeros ``lam`` of ``J_{m + (n-2)/2}`` the residual is
    ``|g_hat_{m,k}(lam)| / (||g_{m,k}|| + 1e-3 ||g||)``, so modes that only carry
    quadrature leakage are judged against the size of the data.

    Parameters
    ----------
    g
        Boundary data on a t-grid covering ``[0, 2]``.
    m_max
        Highest harmonic degree tested.
    q_max
        Number of zeros tested per degree.
    tol
        Tolerance of the verdict.

    Returns
    -------
    describe
        Range report.

    """
    if q_max < 1:
        raise DomainError("please test at least one zero")
    _check_support(g)
    n, h = g.dimension, g.t_step
    modes = boundary_modes(g, m_max)
    norms = {mode.index: mode.norm() for mode in modes}
    floor = NORM_FLOOR * float(np.sqrt(sum(v**2 for v in norms.values())))
    _, rule = quadrature_weights(g.t)

    report = RangeReport(
        params={"dimension": n, "m_max": m_max, "q_max": q_max, "t_step": h},
        norms=norms,
        tol=tol,
        rule=rule,
    )
    for m in range(m_max + 1):
        zeros, resolved = tested_zeros(n, m, q_max, h)
        for q in np.flatnonzero(~resolved):
            report.untested.append({"m": m, "q": int(q) + 1, "lambda": float(zeros[q])})
        for mode in modes:
            if mode.m != m:
                continue
            values = np.atleast_1d(fourier_bessel(mode, n, zeros[resolved]))
            denom = norms[mode.index] + floor
            for q, (lam, value) in enumerate(zip(zeros[resolved], values), start=1):
                rho = abs(value) / denom if denom > 0.0 else 0.0
                report.residuals.append(
                    {
                        "m": m,
                        "k": mode.index[1],
                        "q": q,
                        "lambda": float(lam),
                        "value": float(value),
                        "rho": float(rho),
                    }
                )
    if report.untested:
        logger.warning("%d zeros not resolved by the t-grid", len(report.untested))
    logger.info(
        "orthogonality: max residual %.3e, tol %.1e", report.max_residual, tol
    )
    return report


@dataclass
class MomentReport:
    """Angular content of the moments ``M_k(theta) = int g t^(2k+1) dt``.

    Parameters
    ----------
    entries
        One entry per ``k`` with the moment norm, the largest coefficient of
        degree above ``2k`` and its verdict.
    tol
        Relative tolerance.

    """

    entries: list[dict] = field(default_factory=list)
    tol: float = 1e-5
    formulation: str = "external"

    @property
    def verdict(self) -> bool:
        return all(entry["verdict"] == "pass" for entry in self.entries)

    def to_dict(self) -> dict:
        return {
            "params": {"tol": self.tol, "formulation": self.formulation},
            "moments": self.entries,
            "verdict": "pass" if self.verdict else "fail",
        }


def moment_test(g: BoundaryData, k_max: int, tol: float = 1e-5) -> MomentReport:
    """Test that the k-th moment of planar data is a trigonometric polynomial
    of degree at most ``2k``.

    Parameters
    ----------
    g
        Boundary data with ``n = 2``.
    k_max
        Highest moment tested.
    tol
        Tolerance relative to the moment norm.

    Raises
    ------
    DimensionError
        Raised when the data is not planar.

    """
    if g.dimension != 2:
        raise DimensionError("moment test is provided for n = 2")
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    _check_support(g)
    weights, _ = quadrature_weights(g.t)
    band = g.grid.band
    report = MomentReport(tol=tol)
    for k in range(k_max + 1):
        moment = g.values.dot(weights * g.t ** (2 * k + 1))
        coeffs = angular_decompose(moment, g.grid, band)
        values = coeffs.values[:, 0]
        degrees = np.array([m for m, _ in coeffs.indices])
        norm = float(np.linalg.norm(values))
        high = np.abs(values[degrees > 2 * k])
        max_high = float(high.max()) if high.size else 0.0
        entry = {
            "k": k,
            "norm": norm,
            "max_high": max_high,
            "m_argmax": int(degrees[degrees > 2 * k][high.argmax()]) if high.size else None,
            "verdict": "pass" if max_high <= tol * norm else "fail",
        }
        report.entries.append(entry)
        logger.debug("moment k=%d: norm %.3e, high %.3e", k, norm, max_high)
    return report


def range_project(g: BoundaryData, m_max: int, q_max: int) -> BoundaryData:
    """Remove the component of the data that violates the orthogonality
    conditions at the tested zeros.

    For each ``(m, k)`` the correction is the minimal norm combination
    ``delta = sum_q alpha_q j_{(n-2)/2}(lam_q t)`` on ``[0, 2]`` that cancels
    the transform at the first `q_max` resolved zeros.

    Raises
    ------
    ConditioningError
        Raised when a dual system has condition number above 1e12.

    """
    _check_support(g)
    n = g.dimension
    modes = boundary_modes(g, m_max)
    weights, _ = quadrature_weights(g.t)
    weights = weights * g.t ** (n - 1)
    inside = g.t <= SUPPORT_EDGE
    corrections = np.zeros((len(modes), g.t.size))
    for m in range(m_max + 1):
        zeros, resolved = tested_zeros(n, m, q_max, g.t_step)
        if not resolved.any():
            continue
        kernel = _kernel(n, zeros[resolved], g.t) * inside
        gram = (kernel * weights).dot(kernel.T)
        cond = float(np.linalg.cond(gram))
        if cond > MAX_CONDITION:
            raise ConditioningError("range projection dual system", cond)
        for i, mode in enumerate(modes):
            if mode.m != m:
                continue
            alpha = np.linalg.solve(gram, kernel.dot(weights * mode.values))
            corrections[i] = alpha.dot(kernel)
    basis = harmonic_basis(g.grid, m_max)
    values = g.values - basis.T.dot(corrections)
    logger.info("range projection: correction norm %.3e", np.linalg.norm(corrections))
    return g.with_values(values, projected={"m_max": m_max, "q_max": q_max})


def surface_orthogonality(
    g: BoundaryData, m: int, k: int, lam: float
) -> float:
    """Orthogonality condition in surface integral form,
    ``int_0^inf int_S g(y, t) d_nu phi(y) j_{(n-2)/2}(lam t) t^(n-1) dA dt``,
    where ``phi`` is the Dirichlet eigenfunction of index ``(m, k)`` and
    eigenvalue ``lam``. It equals ``phi'(1)`` times the Fourier-Bessel
    transform of ``g_{m,k}``.

    """
    _check_support(g)
    n = g.dimension
    normal = float(eigen_normal_derivative(n, m, lam)) * harmonic_eval(
        n, (m, k), g.grid.nodes
    )
    surface = (g.grid.weights * normal).dot(g.values)
    weights, _ = quadrature_weights(g.t)
    kernel = _kernel(n, lam, g.t)[0]
    return float((weights * kernel * g.t ** (n - 1)).dot(surface))

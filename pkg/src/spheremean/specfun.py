"""Bessel functions of the first kind of real order, their normalized variant
``j_nu(x) = x^(-nu) J_nu(x)`` and their positive zeros.

Small arguments use the ascending power series. Larger arguments use Miller's
backward recurrence normalized against the Neumann series

    (x/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k! J_{nu+2k}(x),

which is valid for every ``nu >= 0`` once the ``k = 0`` coefficient is written
as ``Gamma(nu + 1)``.

"""

import logging
from dataclasses import dataclass
from math import isfinite, pi, sqrt

import numpy as np
from scipy import special

from spheremean.errors import DomainError
from spheremean.typing import Callable, NDArray

logger = logging.getLogger(__name__)

# the series loses about log10(I_0(x)) digits to cancellation
SERIES_LIMIT = 6.0
SERIES_TERMS = 60
RESCALE = 1e200
ZERO_RESIDUAL = 1e-13


def gamma_fn(x: float) -> float:
    """Gamma function on the positive real axis.

    Parameters
    ----------
    x
        Positive argument.

    Returns
    -------
    describe
        Value of ``Gamma(x)``.

    Raises
    ------
    DomainError
        Raised when `x <= 0`.

    """
    x = float(x)
    if not (x > 0.0 and isfinite(x)):
        raise DomainError("gamma_fn requires a finite x > 0")
    return float(special.gamma(x))


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not (nu >= 0.0 and isfinite(nu)):
        raise DomainError("Bessel order must be finite and nonnegative")
    return nu


def _check_argument(x: NDArray) -> tuple[NDArray, bool]:
    x = np.asarray(x, dtype=float)
    if (x < 0.0).any() or not np.isfinite(x).all():
        raise DomainError("Bessel argument must be finite and nonnegative")
    return np.atleast_1d(x), x.ndim == 0


def _normalized_series(nu: float, x: NDArray) -> NDArray:
    z = -0.25 * x**2
    term = np.full(x.shape, 1.0 / (2.0**nu * gamma_fn(nu + 1.0)))
    total = term.copy()
    for k in range(1, SERIES_TERMS):
        term = term * z / (k * (nu + k))
        total += term
    return total


def _neumann_weights(nu: float, size: int) -> NDArray:
    # w_0 = Gamma(nu + 1), w_k = (nu + 2k) Gamma(nu + k) / k!
    weights = np.empty(size)
    weights[0] = gamma_fn(nu + 1.0)
    ratio = weights[0]
    for k in range(1, size):
        weights[k] = (nu + 2 * k) * ratio
        ratio *= (nu + k) / (k + 1)
    return weights


def _miller(nu: float, x: NDArray) -> NDArray:
    xmax = float(x.max())
    start = int(xmax + 30.0 + 4.0 * sqrt(xmax))
    weights = _neumann_weights(nu, start // 2 + 1)

    upper = np.zeros(x.shape)
    current = np.full(x.shape, 1e-30)
    norm = np.zeros(x.shape)
    for k in range(start, 0, -1):
        if k % 2 == 0:
            norm += weights[k // 2] * current
        lower = (2.0 * (nu + k) / x) * current - upper
        upper, current = current, lower
        big = np.abs(current) > RESCALE
        if big.any():
            current[big] /= RESCALE
            upper[big] /= RESCALE
            norm[big] /= RESCALE
    norm += weights[0] * current
    return current * (0.5 * x) ** nu / norm


def bessel_j(nu: float, x: NDArray) -> NDArray:
    """Bessel function of the first kind ``J_nu(x)``.

    Parameters
    ----------
    nu
        Nonnegative order.
    x
        Nonnegative arguments, scalar or array.

    Returns
    -------
    describe
        Function values with the shape of `x`.

    """
    nu = _check_order(nu)
    x, isscalar = _check_argument(x)
    result = np.empty(x.shape)
    small = x <= SERIES_LIMIT
    if small.any():
        xs = x[small]
        result[small] = xs**nu * _normalized_series(nu, xs)
    if (~small).any():
        result[~small] = _miller(nu, x[~small])
    return result[0] if isscalar else result


def normalized_j(nu: float, x: NDArray) -> NDArray:
    """Normalized Bessel function ``j_nu(x) = x^(-nu) J_nu(x)``. It is an even
    entire function of ``x`` with ``j_nu(0) = 1 / (2^nu Gamma(nu + 1))``.

    Parameters
    ----------
    nu
        Nonnegative order.
    x
        Nonnegative arguments, scalar or array.

    Returns
    -------
    describe
        Function values with the shape of `x`.

    """
    nu = _check_order(nu)
    x, isscalar = _check_argument(x)
    result = np.empty(x.shape)
    small = x <= SERIES_LIMIT
    if small.any():
        result[small] = _normalized_series(nu, x[small])
    if (~small).any():
        xl = x[~small]
        result[~small] = _miller(nu, xl) / xl**nu
    return result[0] if isscalar else result


def bessel_j_derivative(nu: float, x: NDArray) -> NDArray:
    """Derivative ``J_nu'(x) = (nu / x) J_nu(x) - J_{nu+1}(x)``.

    Parameters
    ----------
    nu
        Nonnegative order.
    x
        Nonnegative arguments, scalar or array. At ``x = 0`` the limit is
        returned, which is infinite for ``0 < nu < 1``.

    Returns
    -------
    describe
        Derivative values with the shape of `x`.

    """
    nu = _check_order(nu)
    x, isscalar = _check_argument(x)
    if nu == 0.0:
        result = -bessel_j(1.0, x)
    else:
        result = np.empty(x.shape)
        pos = x > 0.0
        xp = x[pos]
        result[pos] = (nu / xp) * bessel_j(nu, xp) - bessel_j(nu + 1.0, xp)
        result[~pos] = 0.5 if nu == 1.0 else (np.inf if nu < 1.0 else 0.0)
    return result[0] if isscalar else result


@dataclass(frozen=True)
class ZeroTable:
    """First positive zeros of ``J_nu`` in increasing order.

    Parameters
    ----------
    nu
        Bessel order.
    zeros
        Positive zeros ``lambda_{nu,1} < lambda_{nu,2} < ...``.

    """

    nu: float
    zeros: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.zeros)

    def __getitem__(self, index: int) -> float:
        return self.zeros[index]

    def as_array(self) -> NDArray:
        return np.array(self.zeros)


def cache_zeros(function: Callable) -> Callable:
    """Cache implementation for zero tables. A request is served from any
    cached table of the same order that holds at least as many zeros.

    Parameters
    ----------
    function
        Raw zero finder with signature ``function(nu, count)``.

    Returns
    -------
    describe
        Cached version of the zero finder.

    """
    cache: dict[float, ZeroTable] = {}

    def wrapper_function(nu: float, count: int) -> ZeroTable:
        nu, count = _check_order(nu), int(count)
        if count < 1:
            raise DomainError("please request at least one zero")
        table = cache.get(nu)
        if table is None or len(table) < count:
            table = function(nu, count)
            cache[nu] = table
        if len(table) == count:
            return table
        return ZeroTable(nu, table.zeros[:count])

    def cache_clear():
        cache.clear()

    wrapper_function.cache_clear = cache_clear
    return wrapper_function


def _refine_zeros(nu: float, lo: NDArray, hi: NDArray) -> NDArray:
    # safeguarded Newton on brackets that each hold one sign change
    flo = bessel_j(nu, lo)
    x = 0.5 * (lo + hi)
    for _ in range(100):
        f = bessel_j(nu, x)
        df = (nu / x) * f - bessel_j(nu + 1.0, x)
        keep_lo = np.sign(f) == np.sign(flo)
        lo = np.where(keep_lo, x, lo)
        flo = np.where(keep_lo, f, flo)
        hi = np.where(keep_lo, hi, x)
        step = f / df
        xn = x - step
        outside = ~((xn > lo) & (xn < hi)) | ~np.isfinite(xn)
        outside &= f != 0.0
        xn = np.where(outside, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) <= 4e-16 * xn
        x = xn
        if done.all() and (np.abs(f) < ZERO_RESIDUAL).all():
            break
    return x


@cache_zeros
def bessel_zeros(nu: float, count: int) -> ZeroTable:
    """First positive zeros of ``J_nu``, which are also the zeros of the
    normalized function ``j_nu``.

    The zeros of the base order ``nu_b = nu - floor(nu)`` are bracketed by
    ``((k - 1/2) pi, k pi]`` for ``nu_b <= 1/2`` and by ``(k pi, (k + 1/2) pi)``
    otherwise (zeros increase with the order and ``J_{+-1/2}`` are elementary).
    The zeros of ``J_{mu+1}`` interlace those of ``J_mu``, which brackets every
    unit step up to ``nu``.

    Parameters
    ----------
    nu
        Nonnegative order.
    count
        Number of zeros.

    Returns
    -------
    describe
        Table of the first `count` zeros.

    Example
    -------
    >>> bessel_zeros(0.5, 3).zeros
    (3.141592653589793, 6.283185307179586, 9.42477796076938)

    """
    if nu >= 1.0:
        lower = bessel_zeros(nu - 1.0, count + 1).as_array()
        zeros = _refine_zeros(nu, lower[:-1], lower[1:])
        return ZeroTable(nu, tuple(float(z) for z in zeros))

    k = np.arange(1, count + 1, dtype=float)
    if nu == 0.5:
        zeros = k * pi
    elif nu < 0.5:
        zeros = _refine_zeros(nu, (k - 0.5) * pi, k * pi)
    else:
        zeros = _refine_zeros(nu, k * pi, (k + 0.5) * pi)
    logger.debug("computed %d zeros of J_%g", count, nu)
    return ZeroTable(nu, tuple(float(z) for z in zeros))


def clear_zero_cache() -> None:
    """Clear all cached zero tables."""
    bessel_zeros.cache_clear()

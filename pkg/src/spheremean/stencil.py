from math import factorial

import numpy as np

from spheremean.errors import GridError
from spheremean.typing import NDArray


def fd_weights(offsets: NDArray, order: int) -> NDArray:
    """Solve finite difference weights from the Taylor expansion.

    Parameters
    ----------
    offsets
        Stencil offsets in units of the grid spacing, all distinct.
    order
        Order of the derivative to approximate.

    Returns
    -------
    describe
        Weights ``w`` such that ``sum(w * f(x0 + offsets * h)) / h**order``
        approximates ``f^(order)(x0)``, exact for polynomials of degree less
        than the number of offsets.

    """
    offsets = np.asarray(offsets, dtype=float)
    size = offsets.size
    if order >= size:
        raise GridError("stencil needs more points than the derivative order")
    mat = np.zeros((size, size))
    for i in range(size):
        mat[i] = offsets**i / factorial(i)
    rhs = np.zeros(size)
    rhs[order] = 1.0
    return np.linalg.solve(mat, rhs)


def one_sided_derivative(
    values: NDArray, h: float, order: int, accuracy: int = 4
) -> NDArray:
    """One-sided finite difference derivative at the last sample.

    Parameters
    ----------
    values
        Samples on a uniform grid, the last one is the evaluation point. If it
        is a 2d array, the first axis is the grid axis.
    h
        Grid spacing.
    order
        Order of the derivative.
    accuracy
        Formal accuracy order, the stencil uses ``order + accuracy`` points.

    Returns
    -------
    describe
        Derivative estimates, one per column of ``values``.

    """
    values = np.asarray(values, dtype=float)
    size = order + accuracy
    if values.shape[0] < size:
        raise GridError(
            f"derivative of order {order} needs at least {size} samples"
        )
    weights = fd_weights(np.arange(-size + 1, 1), order)
    return np.tensordot(weights, values[-size:], axes=(0, 0)) / h**order


def linear_fit(t: NDArray, y: NDArray) -> tuple[NDArray, NDArray]:
    """Least squares fit ``y = a + b t``.

    Parameters
    ----------
    t
        Sample locations.
    y
        Sample values, 1d or 2d with the first axis matching ``t``.

    Returns
    -------
    describe
        Intercept ``a`` and slope ``b``.

    """
    mat = np.vstack([np.ones_like(t), t]).T
    coef = np.linalg.lstsq(mat, y, rcond=None)[0]
    return coef[0], coef[1]


def central_derivative(values: NDArray, h: float, order: int) -> NDArray:
    """Second order central differences of order 1 or 2 on the interior
    points of a uniform grid, along the first axis.

    """
    values = np.asarray(values, dtype=float)
    if order == 1:
        return (values[2:] - values[:-2]) / (2.0 * h)
    if order == 2:
        return (values[2:] - 2.0 * values[1:-1] + values[:-2]) / h**2
    raise ValueError("central differences are provided for order 1 and 2")


def uniform_spacing(t: NDArray, rtol: float = 1e-9) -> float:
    """Spacing of a uniform grid.

    Raises
    ------
    GridError
        Raised when `t` has fewer than two points, is not increasing or is not
        uniformly spaced.

    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise GridError("please provide a 1d grid with at least two points")
    steps = np.diff(t)
    h = float(steps.mean())
    if h <= 0.0 or np.abs(steps - h).max() > rtol * max(1.0, abs(t[-1])):
        raise GridError("grid must be increasing and uniformly spaced")
    return h

from __future__ import annotations

from functools import partial
from math import inf

import numpy as np

from spheremean.errors import DomainError
from spheremean.typing import Callable, NDArray, RawDFunction, RawVFunction


class XFunction:
    """Radial function ``r -> f(r)`` with access to its derivatives. Radial
    profiles, eigenfunctions and recovered initial values all go through this
    interface.

    Parameters
    ----------
    fun
        Implementation with signature ``fun(r, order)``, where ``r`` is a 1d
        array of radii and ``order`` a nonnegative integer, returning a 1d array
        of the same size.
    radius
        Outer radius of the support, the function is extended by zero for
        ``r > radius``. Default is no truncation.
    max_order
        Highest order of differentiation `fun` provides, ``None`` when there is
        no limit.

    """

    def __init__(
        self, fun: Callable, radius: float = inf, max_order: int | None = None
    ) -> None:
        self._fun = fun
        self.radius = float(radius)
        self.max_order = max_order

    def _check_args(self, x: NDArray, order: int) -> tuple[NDArray, int, bool]:
        x, order = np.asarray(x, dtype=float), int(order)
        if x.ndim > 1:
            raise DomainError("please provide a scalar or an 1d array of radii")
        if order < 0:
            raise DomainError("order of differentiation must be nonnegative")
        if self.max_order is not None and order > self.max_order:
            raise DomainError(f"derivatives are provided up to order {self.max_order}")
        return np.atleast_1d(x), order, x.ndim == 0

    def __call__(self, x: NDArray, order: int = 0) -> NDArray:
        """Function values or derivatives.

        Parameters
        ----------
        x
            Radii where the function is evaluated.
        order
            Order of differentiation, `0` for function values.

        Raises
        ------
        DomainError
            Raised when `x` is not a scalar or 1d array, or when `order` is
            negative or beyond `max_order`.

        """
        x, order, isscalar = self._check_args(x, order)
        result = self.evaluate(x, order)
        return result[0] if isscalar else result

    def evaluate(self, x: NDArray, order: int = 0) -> NDArray:
        """Evaluate on a parsed 1d array without argument checks."""
        if x.size == 0:
            return np.empty(x.shape, dtype=float)
        inside = x <= self.radius
        if inside.all():
            return self._fun(x, order)
        result = np.zeros(x.shape, dtype=float)
        if inside.any():
            result[inside] = self._fun(x[inside], order)
        return result

    def truncate(self, radius: float) -> XFunction:
        """The same function extended by zero beyond `radius`."""
        return XFunction(self._fun, min(self.radius, float(radius)), self.max_order)


class BundleXFunction(XFunction):
    """Parametric ``XFunction`` bundled from a value function and a derivative
    function that share the parameter tuple `params`.

    Parameters
    ----------
    params
        Parameters passed as first argument to both functions.
    val_fun
        Value function ``val_fun(params, r)``.
    der_fun
        Derivative function ``der_fun(params, r, order)`` for ``order >= 1``.
    radius
        Outer radius of the support.
    max_order
        Highest order `der_fun` provides.

    """

    def __init__(
        self,
        params: tuple,
        val_fun: RawVFunction,
        der_fun: RawDFunction,
        radius: float = inf,
        max_order: int | None = None,
    ) -> None:
        self.params = params
        val, der = partial(val_fun, params), partial(der_fun, params)

        def fun(x: NDArray, order: int = 0) -> NDArray:
            return val(x) if order == 0 else der(x, order)

        super().__init__(fun, radius, max_order)


class BasisXFunction:
    """Finite radial basis. It provides design matrices and turns coefficient
    vectors into ``XFunction`` instances.

    Parameters
    ----------
    basis_funs
        Instances of ``XFunction``.

    """

    def __init__(self, basis_funs: tuple[XFunction, ...]) -> None:
        if not all(isinstance(fun, XFunction) for fun in basis_funs):
            raise TypeError("basis functions must all be instances of 'XFunction'")
        self.basis_funs = tuple(basis_funs)
        orders = [f.max_order for f in self.basis_funs if f.max_order is not None]
        self._span = XFunction(
            lambda x, order=0: x,
            max((f.radius for f in self.basis_funs), default=inf),
            min(orders) if orders else None,
        )

    def design_mat(self, x: NDArray, order: int = 0) -> NDArray:
        """Design matrix with one row per radius and one column per basis
        function.

        """
        x, order, _ = self._span._check_args(x, order)
        return self._design_mat(x, order)

    def _design_mat(self, x: NDArray, order: int) -> NDArray:
        if len(self) == 0:
            return np.zeros((x.size, 0))
        return np.column_stack([fun.evaluate(x, order) for fun in self.basis_funs])

    def combine(self, coef: NDArray) -> XFunction:
        """Linear combination ``sum_j coef_j f_j``.

        Raises
        ------
        DomainError
            Raised when the number of coefficients does not match the basis.

        """
        coef = np.asarray(coef, dtype=float).ravel()
        if coef.size != len(self):
            raise DomainError(
                "number of coefficients does not match number of basis functions"
            )

        def fun(x: NDArray, order: int = 0) -> NDArray:
            return self._design_mat(x, order).dot(coef)

        return XFunction(fun, self._span.radius, self._span.max_order)

    def __len__(self) -> int:
        return len(self.basis_funs)

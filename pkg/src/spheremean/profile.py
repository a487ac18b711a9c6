import numpy as np

from spheremean.errors import DomainError
from spheremean.typing import NDArray, ProfileParams
from spheremean.xfunction import BundleXFunction

PROFILE_KINDS = ("annular-bump", "truncated-gaussian-bump")
MIN_Q = 1.0 / 700.0


def peak_factor(a: float, b: float) -> float:
    """Value ``exp(-4 / (b - a)^2)`` of the unit amplitude bump at the middle
    of its support.

    """
    return float(np.exp(-4.0 / (b - a) ** 2))


def _bump_parts(params: ProfileParams, x: NDArray) -> tuple[NDArray, NDArray]:
    # kind, lower and upper bounds, amplitude
    kind, a, b, amplitude = params
    q = (x - a) * (b - x)
    # exp(-1/q) is below 1e-300 once q < 1/700
    ind = q > MIN_Q
    val = np.zeros(x.shape, dtype=x.dtype)
    val[ind] = amplitude * np.exp(-1.0 / q[ind])
    if kind == "truncated-gaussian-bump":
        c, w = 0.5 * (a + b), 0.25 * (b - a)
        val[ind] *= np.exp(-(((x[ind] - c) / w) ** 2))
    return val, ind


def profile_val(params: ProfileParams, x: NDArray) -> NDArray:
    """Profile value function.

    Parameters
    ----------
    params
        Profile parameters as a tuple consists of kind, lower and upper bound
        of the support and the amplitude ``A`` of ``A exp(-1 / ((r - a)(b - r)))``.
    x
        Radius values.

    Returns
    -------
    describe
        Profile function value.

    """
    return _bump_parts(params, x)[0]


def profile_der(params: ProfileParams, x: NDArray, order: int) -> NDArray:
    """Profile derivative function. The bump is written as
    ``exp(s(r))`` with a closed-form exponent, so the first two derivatives are
    ``s' exp(s)`` and ``(s'' + s'^2) exp(s)``.

    Parameters
    ----------
    params
        Profile parameters, see :func:`profile_val`.
    x
        Radius values.
    order
        Order of differentiation, 1 or 2.

    Returns
    -------
    describe
        Profile derivative value.

    """
    kind, a, b, _ = params
    val, ind = _bump_parts(params, x)
    r = x[ind]
    q = (r - a) * (b - r)
    dq = a + b - 2.0 * r
    ds = dq / q**2
    dds = -2.0 * (q + dq**2) / q**3
    if kind == "truncated-gaussian-bump":
        c, w = 0.5 * (a + b), 0.25 * (b - a)
        ds = ds - 2.0 * (r - c) / w**2
        dds = dds - 2.0 / w**2
    factor = ds if order == 1 else dds + ds**2
    result = np.zeros(x.shape, dtype=x.dtype)
    result[ind] = val[ind] * factor
    return result


class RadialProfile(BundleXFunction):
    """Smooth radial profile with compact support in ``(a, b)``. It vanishes
    to infinite order at both ends of the support, so ``profile(|x|) Y(x/|x|)``
    is a smooth function supported in the closed unit ball when ``a > 0``.

    Parameters
    ----------
    kind
        Either ``"annular-bump"`` or ``"truncated-gaussian-bump"``.
    a
        Lower end of the support, ``0 <= a``.
    b
        Upper end of the support, ``a < b <= 1``.
    amplitude
        Factor ``A`` of ``A exp(-1 / ((r - a)(b - r)))``. Use :meth:`from_peak`
        to prescribe the value at the middle of the support instead.

    Example
    -------
    >>> profile = RadialProfile.from_peak("annular-bump", 0.2, 0.8, 1.0)
    >>> profile([0.1, 0.5, 0.9])
    array([0., 1., 0.])

    """

    def __init__(
        self, kind: str, a: float, b: float, amplitude: float = 1.0
    ) -> None:
        a, b, amplitude = float(a), float(b), float(amplitude)
        if kind not in PROFILE_KINDS:
            raise DomainError(f"profile kind must be one of {PROFILE_KINDS}")
        if not 0.0 <= a < b <= 1.0:
            raise DomainError("profile support must satisfy 0 <= a < b <= 1")
        super().__init__(
            (kind, a, b, amplitude), profile_val, profile_der, radius=b, max_order=2
        )

    @property
    def kind(self) -> str:
        return self.params[0]

    @property
    def support(self) -> tuple[float, float]:
        return self.params[1], self.params[2]

    @property
    def amplitude(self) -> float:
        return self.params[3]

    def to_dict(self) -> dict:
        kind, a, b, amplitude = self.params
        return {"kind": kind, "a": a, "b": b, "amplitude": amplitude}

    @classmethod
    def from_peak(
        cls, kind: str, a: float, b: float, peak: float = 1.0
    ) -> "RadialProfile":
        """Profile whose value at the middle of the support is `peak`."""
        if not 0.0 <= a < b <= 1.0:
            raise DomainError("profile support must satisfy 0 <= a < b <= 1")
        return cls(kind, a, b, peak / peak_factor(a, b))

    @classmethod
    def from_dict(cls, data: dict) -> "RadialProfile":
        return cls(data["kind"], data["a"], data["b"], data.get("amplitude", 1.0))

from fractions import Fraction
from typing import Callable

from numpy.typing import NDArray


RawVFunction = Callable[[tuple, NDArray], NDArray]
RawDFunction = Callable[[tuple, NDArray, int], NDArray]

# points in R^n are stored row-wise, shape (..., n)
Points = NDArray
Field = Callable[[Points], NDArray]

HarmonicIndex = tuple[int, int]
ProfileParams = tuple[str, float, float, float]
EigenParams = tuple[int, int, float]
ExactRow = tuple[Fraction, ...]
ExactMatrix = tuple[ExactRow, ...]

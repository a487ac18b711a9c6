"""Exact algebra of ordinary differential operators in ``r`` with Laurent
polynomial coefficients, and the ``2m x 2m`` system whose nondegeneracy
forces every derivative of ``f_m`` to vanish at ``r = 1``.

The system collects, at ``r = 1``, the rows of ``d^i L_m`` for
``i = 0..m-1`` and of ``Q_m^l`` for ``l = 0..m-1`` with

    L_m = prod_{s=1}^m ((1 / (n + 2(m - s))) r d/dr + 1),
    Q_m = d^2/dr^2 + ((n + 2m - 1) / r) d/dr.

"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod

import numpy as np
import sympy

from spheremean.errors import DomainError, WidthError
from spheremean.typing import ExactMatrix, ExactRow

logger = logging.getLogger(__name__)

M_CAP = 16


class LaurentPoly:
    """Laurent polynomial ``sum c_e r^e`` with rational coefficients.

    Parameters
    ----------
    terms
        Mapping from integer exponent to coefficient. Zero coefficients are
        dropped.

    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, Fraction | int] | None = None) -> None:
        terms = terms or {}
        self._terms = {
            int(e): Fraction(c) for e, c in sorted(terms.items()) if Fraction(c) != 0
        }

    @classmethod
    def monomial(cls, exponent: int, coef: Fraction | int = 1) -> LaurentPoly:
        return cls({exponent: coef})

    @classmethod
    def constant(cls, coef: Fraction | int) -> LaurentPoly:
        return cls({0: coef})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coef(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPoly(terms)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly | Fraction | int) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        terms: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def derivative(self, order: int = 1) -> LaurentPoly:
        """Exact derivative, ``d/dr r^e = e r^(e-1)``."""
        terms = self._terms
        for _ in range(order):
            terms = {e - 1: e * c for e, c in terms.items()}
        return LaurentPoly(terms)

    def __call__(self, r: Fraction | int) -> Fraction:
        r = Fraction(r)
        if r == 0 and any(e < 0 for e in self._terms):
            raise DomainError("negative powers cannot be evaluated at r = 0")
        return sum((c * r**e for e, c in self._terms.items()), Fraction(0))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*r^{e}" for e, c in self._terms.items())


class DiffOp:
    """Differential operator ``sum_j p_j(r) d^j/dr^j`` in normal form: orders
    ascending, zero coefficients dropped.

    Parameters
    ----------
    terms
        Mapping from derivative order to Laurent polynomial coefficient.

    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, LaurentPoly] | None = None) -> None:
        terms = terms or {}
        if any(j < 0 for j in terms):
            raise DomainError("derivative orders must be nonnegative")
        self._terms = {
            int(j): p for j, p in sorted(terms.items()) if not p.is_zero()
        }

    @classmethod
    def identity(cls) -> DiffOp:
        return cls({0: LaurentPoly.constant(1)})

    @classmethod
    def derivative(cls, order: int = 1) -> DiffOp:
        return cls({order: LaurentPoly.constant(1)})

    @classmethod
    def multiplication(cls, p: LaurentPoly) -> DiffOp:
        return cls({0: p})

    @property
    def terms(self) -> dict[int, LaurentPoly]:
        return dict(self._terms)

    @property
    def order(self) -> int:
        """Highest derivative order, ``-1`` for the zero operator."""
        return max(self._terms, default=-1)

    def coef(self, order: int) -> LaurentPoly:
        return self._terms.get(order, LaurentPoly())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DiffOp) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other: DiffOp) -> DiffOp:
        terms = dict(self._terms)
        for j, p in other._terms.items():
            terms[j] = terms.get(j, LaurentPoly()) + p
        return DiffOp(terms)

    def __mul__(self, scalar: Fraction | int) -> DiffOp:
        return DiffOp({j: p * scalar for j, p in self._terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: DiffOp) -> DiffOp:
        return op_compose(self, other)

    def apply(self, p: LaurentPoly) -> LaurentPoly:
        """Apply the operator to a Laurent polynomial."""
        result = LaurentPoly()
        for j, coef in self._terms.items():
            result = result + coef * p.derivative(j)
        return result

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"[{p}]*d^{j}" for j, p in self._terms.items())


def op_compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """Exact composition ``a o b`` by the Leibniz rule

        (p d^j) o (q d^k) = p sum_i binom(j, i) q^(i) d^(j - i + k).

    Example
    -------
    >>> d = DiffOp.derivative()
    >>> r = DiffOp.multiplication(LaurentPoly.monomial(1))
    >>> op_compose(d, r) == r @ d + DiffOp.identity()
    True

    """
    terms: dict[int, LaurentPoly] = {}
    for j, p in a.terms.items():
        for k, q in b.terms.items():
            for i in range(j + 1):
                order = j - i + k
                term = p * q.derivative(i) * comb(j, i)
                terms[order] = terms.get(order, LaurentPoly()) + term
    return DiffOp(terms)


def op_power(op: DiffOp, power: int) -> DiffOp:
    result = DiffOp.identity()
    for _ in range(power):
        result = op_compose(op, result)
    return result


def l_factor(n: int, m: int, s: int) -> DiffOp:
    """Factor ``(1 / (n + 2(m - s))) r d/dr + 1`` of ``L_m``."""
    return DiffOp(
        {
            0: LaurentPoly.constant(1),
            1: LaurentPoly.monomial(1, Fraction(1, n + 2 * (m - s))),
        }
    )


def _check_nm(n: int, m: int) -> tuple[int, int]:
    n, m = int(n), int(m)
    if n < 2:
        raise DomainError("dimension must be at least 2")
    if m < 0:
        raise DomainError("degree must be nonnegative")
    return n, m


@lru_cache(maxsize=None)
def build_L(n: int, m: int) -> DiffOp:
    """Operator ``L_m`` of order `m`, the identity for ``m = 0``.

    Example
    -------
    >>> build_L(2, 2) == DiffOp({
    ...     0: LaurentPoly.constant(1),
    ...     1: LaurentPoly.monomial(1, Fraction(7, 8)),
    ...     2: LaurentPoly.monomial(2, Fraction(1, 8)),
    ... })
    True

    """
    n, m = _check_nm(n, m)
    result = DiffOp.identity()
    for s in range(m, 0, -1):
        result = op_compose(l_factor(n, m, s), result)
    return result


@lru_cache(maxsize=None)
def build_Q(n: int, m: int) -> DiffOp:
    """Operator ``Q_m = d^2 + ((n + 2m - 1) / r) d``."""
    n, m = _check_nm(n, m)
    return DiffOp(
        {
            1: LaurentPoly.monomial(-1, n + 2 * m - 1),
            2: LaurentPoly.constant(1),
        }
    )


@lru_cache(maxsize=None)
def q_power(n: int, m: int, power: int) -> DiffOp:
    return op_power(build_Q(n, m), power)


def derivative_row(op: DiffOp, width: int, prefix_order: int = 0) -> ExactRow:
    """Coefficients at ``r = 1`` of ``d^i o op``, padded with zeros.

    Parameters
    ----------
    op
        Differential operator.
    width
        Length of the row.
    prefix_order
        Order ``i`` of the derivative composed on the left.

    Raises
    ------
    WidthError
        Raised when the composed operator has order at least `width`.

    """
    full = op_compose(DiffOp.derivative(prefix_order), op)
    if full.order >= width:
        raise WidthError(
            f"operator of order {full.order} does not fit in a row of width {width}"
        )
    return tuple(full.coef(j)(1) for j in range(width))


@lru_cache(maxsize=None)
def system_matrix(n: int, m: int) -> ExactMatrix:
    """Exact ``2m x 2m`` matrix with rows ``A_i`` of ``d^i L_m`` for
    ``i = 0..m-1`` followed by rows ``B_l`` of ``Q_m^l`` for ``l = 0..m-1``.

    """
    n, m = _check_nm(n, m)
    if m < 1:
        raise DomainError("system needs m >= 1")
    width = 2 * m
    rows = [derivative_row(build_L(n, m), width, i) for i in range(m)]
    rows += [derivative_row(q_power(n, m, l), width) for l in range(m)]
    return tuple(rows)


def structure_check(n: int, m: int) -> bool:
    """Check the banded structure of the system: ``A_{i,j} = 0`` for
    ``j > m + i`` with ``A_{i,m+i} != 0``, and ``B_{l,j} = 0`` outside
    ``l <= j <= 2l`` with ``B_{l,2l} = 1``.

    """
    matrix = system_matrix(n, m)
    for i, row in enumerate(matrix[:m]):
        if any(row[m + i + 1 :]) or row[m + i] == 0:
            return False
    for l, row in enumerate(matrix[m:]):
        if any(row[:l]) or any(row[2 * l + 1 :]) or row[2 * l] != 1:
            return False
    return True


def _sympy_matrix(rows: ExactMatrix) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]
    )


def exact_det(rows: ExactMatrix) -> Fraction:
    det = _sympy_matrix(rows).det(method="bareiss")
    return Fraction(int(det.p), int(det.q))


def exact_rank(rows: ExactMatrix) -> int:
    if not rows:
        return 0
    return int(_sympy_matrix(rows).rank())


@dataclass(frozen=True)
class NondegeneracyReport:
    """Exact determinant of the system with a floating point conditioning
    diagnostic (smallest singular value after row equilibration).

    """

    n: int
    m: int
    determinant: Fraction
    min_singular: float

    @property
    def verdict(self) -> bool:
        return self.determinant != 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "determinant": str(self.determinant),
            "min_singular": self.min_singular,
            "verdict": "pass" if self.verdict else "fail",
        }


def nondegeneracy_check(n: int, m: int, m_cap: int = M_CAP) -> NondegeneracyReport:
    """Exact nondegeneracy verdict of the ``2m x 2m`` system."""
    n, m = _check_nm(n, m)
    if not 1 <= m <= m_cap:
        raise DomainError(f"m must be between 1 and {m_cap}")
    rows = system_matrix(n, m)
    det = exact_det(rows)
    mat = np.array([[float(x) for x in row] for row in rows])
    mat /= np.abs(mat).max(axis=1, keepdims=True)
    min_singular = float(np.linalg.svd(mat, compute_uv=False).min())
    logger.debug("n=%d m=%d det=%s", n, m, det)
    return NondegeneracyReport(n, m, det, min_singular)


def certificate_vector(n: int, m: int, p: int) -> ExactRow:
    """Derivatives at ``r = 1`` of ``Psi_p(r) = r^(-n-2p)`` of orders
    ``0..2m-1``, ``Psi_p^(j)(1) = prod_{q<j} (-n - 2p - q)``.

    """
    n, m = _check_nm(n, m)
    if not 0 <= p <= m - 1:
        raise DomainError(f"p must be between 0 and {m - 1}")
    return tuple(Fraction(prod(-n - 2 * p - q for q in range(j))) for j in range(2 * m))


def ladder_constant(n: int, m: int, p: int, l: int) -> int:
    """``C_l = prod_{q<l} (n + 2(p + q)) 2(p + q + 1 - m)``, the coefficient of
    ``Q_m^l Psi_p = C_l r^(-n-2(p+l))``.

    """
    return prod((n + 2 * (p + q)) * 2 * (p + q + 1 - m) for q in range(l))


def _dot(row: ExactRow, vec: ExactRow) -> Fraction:
    return sum((a * b for a, b in zip(row, vec)), Fraction(0))


@dataclass(frozen=True)
class CertificateReport:
    """Pairings of the certificate ``v_p`` with the rows of the system.

    Parameters
    ----------
    a_products
        ``<A_i, v_p>`` for ``i = 0..m-1``, all zero.
    b_products
        ``<B_l, v_p>`` for ``l = 0..m-1``.
    ladder
        ``C_l`` from the closed form.
    applied
        Coefficient of ``r^(-n-2(p+l))`` in ``Q_m^l Psi_p`` by exact operator
        application.
    annihilated
        Whether ``L_m Psi_p = 0`` exactly.

    """

    n: int
    m: int
    p: int
    a_products: tuple[Fraction, ...]
    b_products: tuple[Fraction, ...]
    ladder: tuple[int, ...]
    applied: tuple[Fraction, ...]
    annihilated: bool

    @property
    def pivot(self) -> int:
        """Index ``m - 1 - p`` of the row the certificate singles out."""
        return self.m - 1 - self.p

    @property
    def verdict(self) -> bool:
        return (
            self.annihilated
            and not any(self.a_products)
            and not any(self.b_products[self.pivot + 1 :])
            and self.b_products[self.pivot] != 0
            and self.b_products == tuple(Fraction(c) for c in self.ladder)
            and self.applied == self.b_products
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "a_products": [str(x) for x in self.a_products],
            "b_products": [str(x) for x in self.b_products],
            "ladder": self.ladder,
            "pivot": self.pivot,
            "verdict": "pass" if self.verdict else "fail",
        }


def certificate_check(n: int, m: int, p: int) -> CertificateReport:
    """Check the certificate ``v_p`` against the system: it is orthogonal to
    every ``A_i`` and to ``B_l`` for ``l >= m - p``, and pairs with
    ``B_{m-1-p}`` to the nonzero ``C_{m-1-p}``. The pairings are cross-checked
    against ``Q_m^l`` applied to ``Psi_p``.

    """
    vec = certificate_vector(n, m, p)
    matrix = system_matrix(n, m)
    psi = LaurentPoly.monomial(-n - 2 * p)
    applied = tuple(
        q_power(n, m, l).apply(psi).coef(-n - 2 * (p + l)) for l in range(m)
    )
    return CertificateReport(
        n=n,
        m=m,
        p=p,
        a_products=tuple(_dot(row, vec) for row in matrix[:m]),
        b_products=tuple(_dot(row, vec) for row in matrix[m:]),
        ladder=tuple(ladder_constant(n, m, p, l) for l in range(m)),
        applied=applied,
        annihilated=build_L(n, m).apply(psi).is_zero(),
    )


@dataclass
class ChainReport:
    """Step by step independence certificate: the ``A`` block has full rank,
    then ``B_{m-1}, ..., B_0`` are added one at a time, each certified by a
    vector orthogonal to every earlier row but not to the new one.

    """

    n: int
    m: int
    a_rank: int
    steps: list[dict] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.a_rank == self.m and all(step["certified"] for step in self.steps)


def independence_chain(n: int, m: int) -> ChainReport:
    matrix = system_matrix(n, m)
    report = ChainReport(n, m, exact_rank(matrix[:m]))
    included = list(matrix[:m])
    for p in range(m):
        vec = certificate_vector(n, m, p)
        row = matrix[m + m - 1 - p]
        orthogonal = all(_dot(prev, vec) == 0 for prev in included)
        pairing = _dot(row, vec)
        report.steps.append(
            {
                "row": f"B_{m - 1 - p}",
                "certificate": p,
                "pairing": str(pairing),
                "certified": orthogonal and pairing != 0,
            }
        )
        included.append(row)
    return report


def shift_row_check(n: int, m: int) -> tuple[ExactRow, bool]:
    """Row of ``d^m L_m`` at width ``2m + 1``, with the verdict that its last
    entry, the coefficient of the new unknown ``F_{2m}``, is nonzero.

    """
    row = derivative_row(build_L(n, m), 2 * m + 1, m)
    return row, row[2 * m] != 0


@dataclass
class LemmaReport:
    """Nondegeneracy sweep over dimensions and degrees."""

    entries: list[dict] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(entry["verdict"] == "pass" for entry in self.entries)

    def to_dict(self) -> dict:
        return {"entries": self.entries, "verdict": "pass" if self.verdict else "fail"}


def verify_lemma(n_max: int, m_max: int, n_min: int = 2) -> LemmaReport:
    """Verify nondegeneracy for every ``n_min <= n <= n_max`` and
    ``1 <= m <= m_max`` twice: by the exact determinant and by the
    certificate chain.

    """
    report = LemmaReport()
    for n in range(n_min, n_max + 1):
        for m in range(1, m_max + 1):
            det = nondegeneracy_check(n, m)
            certificates = [certificate_check(n, m, p) for p in range(m)]
            chain = independence_chain(n, m)
            _, shift = shift_row_check(n, m)
            structure = structure_check(n, m)
            ok = (
                det.verdict
                and chain.verdict
                and shift
                and structure
                and all(c.verdict for c in certificates)
            )
            report.entries.append(
                {
                    **det.to_dict(),
                    "certificates": [c.to_dict() for c in certificates],
                    "chain": chain.verdict,
                    "shift": shift,
                    "structure": structure,
                    "verdict": "pass" if ok else "fail",
                }
            )
        logger.info("lemma sweep: n=%d done", n)
    return report

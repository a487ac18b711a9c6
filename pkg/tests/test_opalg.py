from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from spheremean.errors import DomainError, WidthError
from spheremean.opalg import (
    DiffOp,
    LaurentPoly,
    build_L,
    build_Q,
    certificate_check,
    certificate_vector,
    derivative_row,
    exact_det,
    exact_rank,
    independence_chain,
    ladder_constant,
    nondegeneracy_check,
    op_compose,
    q_power,
    shift_row_check,
    structure_check,
    system_matrix,
    verify_lemma,
)

R = LaurentPoly.monomial(1)


def test_laurent_arithmetic():
    p = LaurentPoly({-1: 2, 0: 1})
    q = LaurentPoly({1: Fraction(1, 2)})
    assert p * q == LaurentPoly({0: 1, 1: Fraction(1, 2)})
    assert (p - p).is_zero()
    assert p + q == LaurentPoly({-1: 2, 0: 1, 1: Fraction(1, 2)})
    assert 3 * q == LaurentPoly({1: Fraction(3, 2)})
    assert LaurentPoly({0: 0, 2: 1}).terms == {2: Fraction(1)}


def test_laurent_derivative():
    p = LaurentPoly({-2: 1, 0: 5, 3: 2})
    assert p.derivative() == LaurentPoly({-3: -2, 2: 6})
    assert p.derivative(2) == LaurentPoly({-4: 6, 1: 12})
    assert LaurentPoly.constant(7).derivative().is_zero()


def test_laurent_eval():
    p = LaurentPoly({-1: 2, 2: Fraction(1, 3)})
    assert p(2) == Fraction(1) + Fraction(4, 3)
    assert LaurentPoly({1: 3})(0) == 0
    with pytest.raises(DomainError):
        p(0)


def test_laurent_equality():
    assert LaurentPoly.constant(3) == 3
    assert LaurentPoly() == 0
    assert hash(LaurentPoly({1: 2})) == hash(LaurentPoly({1: Fraction(4, 2)}))
    assert LaurentPoly.constant(1) != "1"


def test_op_basics():
    assert DiffOp().order == -1
    assert DiffOp.derivative(3).order == 3
    assert DiffOp({1: LaurentPoly()}) == DiffOp()
    with pytest.raises(DomainError):
        DiffOp({-1: R})


def test_op_compose():
    d = DiffOp.derivative()
    r = DiffOp.multiplication(R)
    assert d @ r == r @ d + DiffOp.identity()
    assert op_compose(d, d) == DiffOp.derivative(2)


def test_op_apply():
    q = build_Q(2, 2)
    assert q.apply(LaurentPoly.monomial(-2)) == LaurentPoly.monomial(-4, -4)
    assert (2 * q).apply(R) == LaurentPoly.monomial(-1, 10)


def test_build_L():
    tr_val = DiffOp(
        {
            0: LaurentPoly.constant(1),
            1: LaurentPoly.monomial(1, Fraction(7, 8)),
            2: LaurentPoly.monomial(2, Fraction(1, 8)),
        }
    )
    assert build_L(2, 2) == tr_val
    assert build_L(3, 0) == DiffOp.identity()
    assert build_L(4, 5).order == 5


def test_q_power():
    q = build_Q(3, 1)
    assert q_power(3, 1, 2) == q @ q
    assert q_power(3, 1, 0) == DiffOp.identity()


def test_derivative_row():
    row = derivative_row(build_L(2, 1), 3, 1)
    assert row == (0, Fraction(3, 2), Fraction(1, 2))
    with pytest.raises(WidthError):
        derivative_row(build_L(2, 2), 2)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_det_first_degree(n):
    assert exact_det(system_matrix(n, 1)) == Fraction(-1, n)


def test_system_matrix():
    matrix = system_matrix(2, 2)
    assert len(matrix) == 4 and all(len(row) == 4 for row in matrix)
    assert matrix[2] == (1, 0, 0, 0)
    assert exact_rank(matrix) == 4
    assert exact_rank(()) == 0


@pytest.mark.parametrize(("n", "m"), [(2, 1), (2, 4), (3, 3), (5, 6)])
def test_structure(n, m):
    assert structure_check(n, m)


def test_nondegeneracy():
    report = nondegeneracy_check(2, 1)
    assert report.determinant == Fraction(-1, 2)
    assert report.verdict and report.min_singular > 0.0
    assert report.to_dict()["determinant"] == "-1/2"


def test_ladder():
    # Q_2 applied to r^-2 for n = 2 gives -4 r^-4
    report = certificate_check(2, 2, 0)
    assert report.applied[1] == -4
    assert report.ladder[1] == -4
    assert ladder_constant(2, 2, 0, 0) == 1
    assert report.pivot == 1


def test_certificate_vector():
    assert certificate_vector(2, 2, 0) == (1, -2, 6, -24)
    assert certificate_vector(3, 2, 1) == (1, -5, 30, -210)


@pytest.mark.parametrize("n", [2, 3, 6])
@pytest.mark.parametrize("m", [1, 3, 5])
def test_certificates(n, m):
    for p in range(m):
        report = certificate_check(n, m, p)
        assert report.annihilated
        assert report.verdict
        assert report.to_dict()["verdict"] == "pass"


@pytest.mark.parametrize(("n", "m"), [(2, 3), (4, 5)])
def test_chain(n, m):
    report = independence_chain(n, m)
    assert report.a_rank == m
    assert [step["row"] for step in report.steps] == [f"B_{m - 1 - p}" for p in range(m)]
    assert report.verdict


def test_shift_row():
    row, ok = shift_row_check(2, 1)
    assert row == (0, Fraction(3, 2), Fraction(1, 2)) and ok
    assert all(shift_row_check(n, m)[1] for n in (2, 3) for m in (2, 4))


def test_verify_lemma_small():
    report = verify_lemma(3, 3)
    assert len(report.entries) == 6
    assert report.verdict
    assert report.to_dict()["verdict"] == "pass"


def test_verify_lemma_sweep():
    report = verify_lemma(6, 12)
    assert len(report.entries) == 5 * 12
    assert all(entry["verdict"] == "pass" for entry in report.entries)


@pytest.mark.parametrize(
    ("fun", "args"),
    [
        (build_L, (1, 2)),
        (build_Q, (2, -1)),
        (system_matrix, (2, 0)),
        (nondegeneracy_check, (2, 17)),
        (certificate_vector, (2, 2, 2)),
        (certificate_vector, (2, 2, -1)),
    ],
)
def test_domain_errors(fun, args):
    with pytest.raises(DomainError):
        fun(*args)


laurent_polys = st.dictionaries(
    st.integers(-2, 3), st.fractions(-10, 10, max_denominator=5), max_size=3
).map(LaurentPoly)
diff_ops = st.dictionaries(st.integers(0, 2), laurent_polys, max_size=3).map(DiffOp)


@settings(max_examples=30, deadline=None)
@given(diff_ops, diff_ops, diff_ops)
def test_compose_associative(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)


@settings(max_examples=30, deadline=None)
@given(diff_ops, diff_ops, laurent_polys)
def test_compose_apply(a, b, p):
    assert (a @ b).apply(p) == a.apply(b.apply(p))
    assert (a + b).apply(p) == a.apply(p) + b.apply(p)

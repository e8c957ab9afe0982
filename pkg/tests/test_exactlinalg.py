import random
from fractions import Fraction

import pytest

from dahalink.exactfield import QQ, FieldContext
from dahalink.exactlinalg import (
    ExactMatrix,
    NotInvariantError,
    SingularMatrixError,
    Subspace,
    change_of_basis,
    char_poly,
    eigenspace,
    is_diagonal,
    is_irreducible_tridiagonal,
    is_lower_bidiagonal,
    is_lower_tridiagonal,
    is_tridiagonal,
    is_upper_bidiagonal,
    is_upper_tridiagonal,
    kernel_basis,
    rank,
    restrict,
    restrict_to_basis,
    solve,
)


def M(rows, ctx=QQ):
    return ExactMatrix.from_rows(ctx, rows)


def rnd_matrix(rng, n, m=None, ctx=QQ):
    m = n if m is None else m
    return M([[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(m)]
              for _ in range(n)], ctx)


def test_constructors_and_indexing():
    a = M([[1, 2], [3, 4]])
    assert a.shape == (2, 2)
    assert a[0, 1] == 2 and a[1, 0] == 3
    assert ExactMatrix.identity(QQ, 3)[2, 2] == 1
    assert ExactMatrix.zeros(QQ, 2, 3).shape == (2, 3)
    d = ExactMatrix.diagonal(QQ, [QQ.rational(5), QQ.rational(7)])
    assert d == M([[5, 0], [0, 7]])
    c = ExactMatrix.from_cols(QQ, [[1, 2], [3, 4]])
    assert c == M([[1, 3], [2, 4]])
    assert c.col(0) == (QQ.rational(1), QQ.rational(2))


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        M([[1, 2], [3]])


def test_immutability():
    a = M([[1]])
    with pytest.raises(AttributeError):
        a.rows = ()


def test_arithmetic():
    a = M([[1, 2], [3, 4]])
    b = M([[0, 1], [1, 0]])
    assert a + b == M([[1, 3], [4, 4]])
    assert a - b == M([[1, 1], [2, 4]])
    assert -a == M([[-1, -2], [-3, -4]])
    assert a * b == M([[2, 1], [4, 3]])
    assert a.scale(QQ.rational(2)) == M([[2, 4], [6, 8]])
    assert a.transpose() == M([[1, 3], [2, 4]])
    assert a.trace() == 5
    assert a.apply([QQ.rational(1), QQ.rational(1)]) == (QQ.rational(3), QQ.rational(7))


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        M([[1, 2]]) + M([[1], [2]])
    with pytest.raises(ValueError):
        M([[1, 2]]) * M([[1, 2]])


def test_inverse():
    a = M([[2, 1], [1, 1]])
    assert a * a.inverse() == ExactMatrix.identity(QQ, 2)
    assert a.inverse() * a == ExactMatrix.identity(QQ, 2)
    with pytest.raises(SingularMatrixError):
        M([[1, 2], [2, 4]]).inverse()


def test_inverse_randomized():
    rng = random.Random(99)
    done = 0
    while done < 20:
        a = rnd_matrix(rng, 4)
        try:
            inv = a.inverse()
        except SingularMatrixError:
            continue
        assert a * inv == ExactMatrix.identity(QQ, 4)
        done += 1


def test_rank_nullity():
    rng = random.Random(5)
    for _ in range(25):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        a = rnd_matrix(rng, n, m)
        ker = kernel_basis(a)
        assert rank(a) + ker.dim == m
        zero = tuple(QQ.zero() for _ in range(n))
        for v in ker.basis:
            assert a.apply(v) == zero


def test_solve():
    a = M([[1, 2], [3, 4]])
    x = solve(a, [QQ.rational(5), QQ.rational(11)])
    assert x is not None and a.apply(x) == (QQ.rational(5), QQ.rational(11))
    # inconsistent system
    b = M([[1, 1], [2, 2]])
    assert solve(b, [QQ.rational(1), QQ.rational(3)]) is None
    # underdetermined: any exact solution is acceptable
    c = M([[1, 1]])
    x = solve(c, [QQ.rational(7)])
    assert x is not None and c.apply(x) == (QQ.rational(7),)


def test_char_poly_known_cases():
    # x^2 - 5x - 2 for [[1,2],[3,4]]: det(xI - M) = x^2 - (tr)x + det
    cs = char_poly(M([[1, 2], [3, 4]]))
    assert [c for c in cs] == [QQ.rational(-2), QQ.rational(-5), QQ.rational(1)]
    # companion matrix of x^3 - 2
    comp = M([[0, 0, 2], [1, 0, 0], [0, 1, 0]])
    assert char_poly(comp) == [QQ.rational(-2), QQ.zero(), QQ.zero(), QQ.rational(1)]


def test_char_poly_evaluates_to_zero_on_matrix():
    # Cayley-Hamilton as a randomized structural check
    rng = random.Random(3)
    for _ in range(10):
        a = rnd_matrix(rng, 3)
        cs = char_poly(a)
        acc = ExactMatrix.zeros(QQ, 3)
        power = ExactMatrix.identity(QQ, 3)
        for c in cs:
            acc = acc + power.scale(c)
            power = power * a
        assert acc == ExactMatrix.zeros(QQ, 3)


def test_eigenspace_exactness():
    a = M([[2, 1], [0, 3]])
    for mu, dim in ((QQ.rational(2), 1), (QQ.rational(3), 1), (QQ.rational(5), 0)):
        es = eigenspace(a, mu)
        assert es.dim == dim
        for v in es.basis:
            assert a.apply(v) == tuple(mu * x for x in v)


def test_eigenspace_in_quadratic_field():
    ctx = FieldContext(5)
    # [[0,1],[1,1]] has eigenvalues (1 ± sqrt 5)/2
    a = ExactMatrix.from_rows(ctx, [[ctx.zero(), ctx.one()], [ctx.one(), ctx.one()]])
    mu = ctx.element(Fraction(1, 2), Fraction(1, 2))
    es = eigenspace(a, mu)
    assert es.dim == 1
    v = es.basis[0]
    assert a.apply(v) == tuple(mu * x for x in v)


def test_subspace_canonical_equality():
    v1 = [QQ.rational(1), QQ.rational(2)]
    v2 = [QQ.rational(2), QQ.rational(4), ]
    s = Subspace(QQ, 2, [v1])
    t = Subspace(QQ, 2, [v2])
    assert s == t and hash(s) == hash(t)
    assert s.contains(v2)
    assert not s.contains([QQ.rational(1), QQ.rational(3)])
    with pytest.raises(ValueError):
        Subspace(QQ, 2, [v1, v2])  # dependent


def test_change_of_basis():
    a = M([[1, 1], [0, 2]])
    p = M([[1, 1], [0, 1]])
    b = change_of_basis(a, p)
    assert p * b == a * p


def test_restrict_composition():
    # restriction respects products on a shared invariant subspace
    a = M([[2, 0, 0], [0, 3, 1], [0, 0, 3]])
    b = M([[1, 0, 0], [0, 5, 0], [0, 0, 5]])
    w = Subspace(QQ, 3, [[QQ.rational(0), QQ.rational(1), QQ.rational(0)],
                         [QQ.rational(0), QQ.rational(0), QQ.rational(1)]])
    ra, rb = restrict(a, w), restrict(b, w)
    assert restrict(a * b, w) == ra * rb


def test_restrict_not_invariant():
    a = M([[0, 1], [1, 0]])
    with pytest.raises(NotInvariantError):
        restrict_to_basis(a, [[QQ.rational(1), QQ.rational(0)]])


def test_restrict_to_basis_order_matters():
    a = M([[1, 0], [0, 2]])
    e0 = [QQ.rational(1), QQ.rational(0)]
    e1 = [QQ.rational(0), QQ.rational(1)]
    assert restrict_to_basis(a, [e0, e1]) == M([[1, 0], [0, 2]])
    assert restrict_to_basis(a, [e1, e0]) == M([[2, 0], [0, 1]])


def test_shape_predicates():
    diag = M([[1, 0], [0, 2]])
    assert is_diagonal(diag) and is_tridiagonal(diag)
    tri = M([[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    assert is_tridiagonal(tri) and is_irreducible_tridiagonal(tri)
    red = M([[1, 0, 0], [1, 1, 1], [0, 1, 1]])  # zero superdiagonal entry
    assert is_tridiagonal(red) and not is_irreducible_tridiagonal(red)
    assert not is_tridiagonal(M([[1, 0, 1], [0, 1, 0], [0, 0, 1]]))
    lower2 = M([[1, 0, 0], [1, 1, 0], [1, 1, 1]])
    assert is_lower_tridiagonal(lower2) and not is_upper_tridiagonal(lower2)
    assert is_upper_tridiagonal(lower2.transpose())
    lb = M([[1, 0], [1, 1]])
    assert is_lower_bidiagonal(lb) and not is_upper_bidiagonal(lb)
    assert is_upper_bidiagonal(lb.transpose())
    # bidiagonal is in particular (lower/upper) tridiagonal in the 2-band sense
    assert is_lower_tridiagonal(lb) and is_upper_tridiagonal(lb.transpose())


def test_matrix_json_round_trip():
    ctx = FieldContext(3)
    a = ExactMatrix.from_rows(ctx, [[ctx.element(1, 2), ctx.zero()],
                                    [ctx.element(0, -1), ctx.rational(7, 2)]])
    back = ExactMatrix.from_json(a.to_json(), ctx)
    assert back == a
    # plain-Q matrices need no context hint
    b = M([[1, 2], [3, 4]])
    assert ExactMatrix.from_json(b.to_json()) == b

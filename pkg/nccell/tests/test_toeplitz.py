import numpy as np
import pytest

from .. import linalg as L
from .. import toeplitz as T
from ..errors import PresentationError


def test_laurent_arithmetic():
    z = T.LaurentPoly.monomial(1)
    f = z * z.adjoint()
    assert f == T.LaurentPoly.constant(1)
    g = (z + 2) * (z - 2)
    assert g == T.LaurentPoly({2: 1, 0: -4})
    assert (z - z).is_zero()
    assert g.degrees == (0, 2)
    assert T.LaurentPoly.monomial(-3).band == 3


def test_laurent_immutable():
    z = T.LaurentPoly.monomial(1)
    with pytest.raises(AttributeError):
        z.size = 2


def test_bott():
    b = T.LaurentPoly.bott(1, 2)
    assert b.size == 2
    assert b.is_unitary()
    assert b.winding() == 1
    assert T.LaurentPoly.bott(2, 2).winding() == 2
    with pytest.raises(ValueError):
        T.LaurentPoly.bott(3, 2)


@pytest.mark.parametrize('w', range(-3, 4))
def test_monomial_winding(w):
    u = T.LaurentPoly.monomial(w, 1, np.exp(0.3j))
    assert u.is_unitary()
    assert u.winding() == w


def test_conjugate_keeps_winding():
    V = L.random_unitary(2, 4)
    u = T.LaurentPoly.bott(1, 2).conjugate_by(V)
    assert u.is_unitary()
    assert u.winding() == 1


def test_evaluate():
    u = T.parse_symbol('z^2 + 0.5')
    np.testing.assert_allclose(u.evaluate(1j)[0, 0], -0.5)
    values = u.evaluate(np.array([1.0, -1.0]))
    assert values.shape == (2, 1, 1)


@pytest.mark.parametrize('text, expected', [
    ('z', T.LaurentPoly.monomial(1)),
    ('z^-2', T.LaurentPoly.monomial(-2)),
    ('2i*z', T.LaurentPoly.monomial(1, 1, 2j)),
    ('-z + 3', T.LaurentPoly({1: -1, 0: 3})),
    ('(z + 1)*(z - 1)', T.LaurentPoly({2: 1, 0: -1})),
    ('bott(1, 2)', T.LaurentPoly.bott(1, 2)),
    ('z*bott(2, 3)', T.LaurentPoly.monomial(1, 3) * T.LaurentPoly.bott(2, 3)),
])
def test_parse_symbol(text, expected):
    assert T.parse_symbol(text) == expected


@pytest.mark.parametrize('text', ['z^', 'bott(3, 2)', 'y', 'z +'])
def test_parse_symbol_errors(text):
    with pytest.raises(PresentationError):
        T.parse_symbol(text)


def test_symbol_printing():
    assert str(T.parse_symbol('3.5*z^1 + (0+1i)')) == '(0+1i) + 3.5*z'
    assert str(T.LaurentPoly.monomial(-2)) == 'z^-2'


def test_shift():
    S = T.toep(T.LaurentPoly.monomial(1))
    D = S.dense(4)
    np.testing.assert_allclose(D, np.eye(4, k=-1))
    # S*S = 1 and SS* = 1 - e00
    assert (S.adjoint() * S - 1).is_ideal()
    assert T.trace_ideal(S.adjoint() * S - 1) == 0
    assert T.trace_ideal(S * S.adjoint() - 1) == pytest.approx(-1)


def test_mul_matches_dense():
    rng = L.make_rng(1)
    f = T.LaurentPoly({-1: 0.5, 0: 1.0, 2: -0.25j})
    g = T.LaurentPoly({1: 2.0, -2: 1j})
    a = T.ToepOp(f, rng.standard_normal((2, 2)))
    b = T.ToepOp(g, rng.standard_normal((3, 3)))
    product = T.mul(a, b)
    n = 20
    wide = 40
    expected = (a.dense(wide) @ b.dense(wide))[:n, :n]
    np.testing.assert_allclose(product.dense(n), expected, atol=1e-12)
    assert product.symbol == f * g


def test_ideal_and_quotient():
    K = T.ToepOp.ideal(np.diag([1.0, 2.0]))
    assert K.is_ideal()
    assert T.trace_ideal(K) == 3
    assert T.quotient_symbol(K).is_zero()
    with pytest.raises(ValueError):
        T.trace_ideal(T.toep(T.LaurentPoly.monomial(1)))
    with pytest.raises(ValueError):
        T.toep(T.LaurentPoly.monomial(1)).to_ideal()


def test_correction_shape_checked():
    with pytest.raises(ValueError):
        T.ToepOp(T.LaurentPoly.bott(1, 2), np.zeros((3, 3)))


def test_funcalc_on_constant_symbol():
    a = T.ToepOp(T.LaurentPoly.constant(1.0), np.diag([-1.0, -0.75]))
    root = a.funcalc('sqrt_clamped')
    np.testing.assert_allclose(root.dense(3), np.diag([0.0, 0.5, 1.0]),
                               atol=1e-12)
    with pytest.raises(ValueError):
        T.toep(T.LaurentPoly.monomial(1)).funcalc('sqrt_clamped')


@pytest.mark.parametrize('w', range(-3, 4))
def test_index_of_monomials(w):
    result = T.index_boundary(T.LaurentPoly.monomial(w))
    assert result.index == -w
    assert result.drift < 1e-9
    assert result.rep.check(1e-7).passed


@pytest.mark.parametrize('r', [0, 1, 2])
def test_index_of_bott(r):
    result = T.index_boundary(T.LaurentPoly.bott(r, 2))
    assert result.index == -r


def test_index_rejects_non_unitary():
    with pytest.raises(ValueError):
        T.index_boundary(T.LaurentPoly({0: 1, 1: 1}))


def test_index_with_perturbed_lift():
    u = T.LaurentPoly.monomial(2)
    rng = L.make_rng(3)
    K = rng.standard_normal((3, 3)) * 0.1
    b = T.toep(u) + T.ToepOp.ideal(K)
    # any contraction lift with symbol u gives the same index
    a = b * (b.adjoint() * b).funcalc('inv_sqrt_shifted')
    assert T.index_boundary(u, lift=a).index == -2
    with pytest.raises(ValueError):
        T.index_boundary(T.LaurentPoly.monomial(1), lift=a)


@pytest.mark.parametrize('text, expected', [
    ('z', -1),
    ('z^-2', 2),
    ('bott(1, 2)', -1),
    ('2i*z^3', None),
])
def test_fredholm_oracle(text, expected):
    u = T.parse_symbol(text)
    if expected is None:
        with pytest.raises(ValueError):
            T.fredholm_oracle(u)
        return
    assert T.fredholm_oracle(u) == expected
    assert T.index_boundary(u).index == expected

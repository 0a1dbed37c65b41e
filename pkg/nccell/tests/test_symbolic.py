import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from .. import symbolic as S
from ..errors import PresentationError, RewriteOrderError
from ..expr import parse_expression


def poly(text, lets=None):
    return S.to_ncpoly(parse_expression(text), lets)


@pytest.mark.parametrize('filename', ['ideal', 'block'])
def test_shipped_identities_prove(filename):
    identities = S.shipped_identities(filename)
    assert identities
    for identity in identities:
        result = identity.prove()
        assert result, "{}: {} reduces to {}".format(identity.line,
                                                     identity.source,
                                                     result.difference)


def test_ideal_identity_count():
    assert len(S.shipped_identities('ideal')) == 9


def test_normal_form_g2st():
    rules = S.rewrite_system('g2st')
    assert S.normal_form(poly('h*h'), rules) == poly('h - adj(x)*x')
    assert S.normal_form(poly('k*x'), rules) == poly('x*h')
    assert S.normal_form(poly('adj(h)'), rules) == poly('h')


def test_prove_identity_certificate():
    rules = S.rewrite_system('g2st')
    result = S.prove_identity(poly('h*k'), S.NCPoly.zero(), rules)
    assert not result
    assert result.difference == poly('h*k')

    result = S.prove_identity(poly('h0*k0'), S.NCPoly.zero(),
                              S.rewrite_system('qc'))
    assert result.holds


def test_prove_block_identity():
    rules = S.rewrite_system('cc')
    lets = {'P': parse_expression('[[p0, 0], [0, 1 - p0]]')}
    lhs = poly('P*P', lets)
    rhs = poly('P', lets)
    assert S.prove_identity(lhs, rhs, rules)


def test_rewrite_order_error():
    with pytest.raises(RewriteOrderError):
        S.RewriteSystem.from_strings([('x', 'x*x')])
    with pytest.raises(RewriteOrderError):
        S.RewriteSystem.from_strings([('x + y', 'x')])


def test_unknown_rewrite_system():
    with pytest.raises(KeyError):
        S.rewrite_system('nope')


def test_ncpoly_printing():
    assert str(poly('x*h - 2*h + 1')) == '1 - 2*h + x*h'
    assert str(S.NCPoly.zero()) == '0'
    assert poly('x - x').is_zero()


def test_polymatrix_adjoint():
    block = poly('[[h, x], [0, k]]')
    assert isinstance(block, S.PolyMatrix)
    assert block.adjoint() == poly('[[adj(h), 0], [adj(x), adj(k)]]')
    assert block.shape == (2, 2)


def test_substitute_genmap():
    images = {'h': poly('k'), 'k': poly('h'), 'x': poly('adj(x)')}
    assert S.substitute_genmap(poly('k*x - x*h'), images) == poly('h*adj(x) - adj(x)*k')


def test_substitute_genmap_blocks():
    images = {'p': poly('[[p0, 0], [0, 0]]')}
    result = S.substitute_genmap(poly('1 - p'), images)
    assert result == poly('[[1 - p0, 0], [0, 1]]')


def test_evaluate_poly():
    rng = np.random.default_rng(0)
    h = rng.standard_normal((3, 3))
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    value = S.evaluate_poly(poly('h*x - 0.5i*adj(x)'), {'h': h, 'x': x}, 3)
    np.testing.assert_allclose(value, h @ x - 0.5j * x.conj().T)


def test_load_identities():
    text = "\n".join([
        "# a comment",
        "let A = 1 - p",
        "A*A == A  modulo cc01",
        "A*p == 0  modulo cc01",
    ])
    identities = S.load_identities(text)
    assert [identity.line for identity in identities] == [3, 4]
    assert identities[0].rules == 'cc01'
    assert identities[0].source == 'A*A == A'
    assert all(identity.prove() for identity in identities)


def test_load_identities_error_line():
    text = "let A = p\n\nA*A == == A modulo cc01\n"
    with pytest.raises(PresentationError) as err:
        S.load_identities(text)
    assert err.value.line == 3


_letters = st.builds(S.Letter, st.sampled_from(['x', 'h']), st.booleans())
_words = st.lists(_letters, max_size=3).map(tuple)
_coefficients = st.builds(complex, st.integers(-3, 3), st.integers(-3, 3))
_polys = st.dictionaries(_words, _coefficients, max_size=4).map(S.NCPoly)


@settings(max_examples=100, deadline=None)
@given(_polys, _polys)
def test_adjoint_is_an_antimultiplicative_involution(p, q):
    assert p.adjoint().adjoint() == p
    assert (p * q).adjoint() == q.adjoint() * p.adjoint()
    assert (p + q).adjoint() == p.adjoint() + q.adjoint()


@settings(max_examples=50, deadline=None)
@given(_polys)
def test_normal_form_is_idempotent(p):
    rules = S.rewrite_system('g2st')
    reduced = S.normal_form(p, rules)
    assert S.normal_form(reduced, rules) == reduced

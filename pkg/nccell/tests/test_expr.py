from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from .. import expr as E
from ..errors import PresentationError


def test_parse_and_print():
    e = E.parse_expression('adj(adj(x)) * (1 - h)')
    assert E.to_source(e) == 'x*(1 - h)'
    assert str(e) == 'x*(1 - h)'


@pytest.mark.parametrize('text', [
    'x',
    'x + y',
    'x - y*z',
    'x - (y - z)',
    '-x*y',
    '-(x*y)',
    'adj(x)*y',
    '(x + y)*z',
    '0.5i*x',
    '[[1 - h, adj(x)], [x, k]]',
])
def test_printer_is_a_fixed_point(text):
    e = E.parse_expression(text)
    assert E.to_source(e) == text
    assert E.parse_expression(E.to_source(e)) == e


def test_unit_literal():
    assert E.parse_expression('1') == E.UNIT
    one = E.parse_expression('1.0')
    assert isinstance(one, E.Scalar)
    assert one.value == 1
    assert E.to_source(one) == '1.0'
    assert E.parse_expression('2i') == E.Scalar(Fraction(0), Fraction(2))


def test_adjoint_is_an_involution():
    x = E.Name('x')
    assert E.adjoint(E.adjoint(x)) == x
    assert E.adjoint(x) == E.Adj(x)


def test_walk_paths():
    e = E.parse_expression('h*adj(y)')
    paths = {path: node for path, node in E.walk(e)}
    assert paths['.right.arg'] == E.Name('y')
    assert E.names_in(e) == {'h', 'y'}
    assert not E.contains_unit(e)
    assert E.contains_unit(E.parse_expression('[[1, 0], [0, h]]'))


def test_substitute():
    e = E.parse_expression('adj(P)*P')
    result = E.substitute(e, {'P': E.parse_expression('adj(x)')})
    assert E.to_source(result) == 'x*adj(x)'


def test_syntax_error_position():
    with pytest.raises(PresentationError) as err:
        E.parse_expression('x +\n* y')
    assert err.value.line == 2
    assert 'syntax error' in str(err.value)


def test_rectangular_block_required():
    with pytest.raises(PresentationError):
        E.parse_expression('[[x, y], [z]]')


def test_evaluate():
    x = np.array([[0, 1], [0, 0]], dtype=complex)
    h = np.diag([1.0, 0.0])
    e = E.parse_expression('x*(1 - h) + adj(x)')
    value = E.evaluate(e, {'x': x, 'h': h}, 2)
    np.testing.assert_allclose(value, x @ (np.eye(2) - h) + x.conj().T)


def test_evaluate_block_with_lets():
    h = np.diag([0.25, 0.5])
    lets = {'P': E.parse_expression('[[1 - h, 0], [0, h]]')}
    value = E.evaluate(E.Name('P'), {'h': h}, 2, lets)
    expected = np.zeros((4, 4))
    expected[:2, :2] = np.eye(2) - h
    expected[2:, 2:] = h
    np.testing.assert_allclose(value, expected)


_names = st.sampled_from(['x', 'h', 'k']).map(E.Name)
_quarters = st.integers(0, 12).map(lambda n: Fraction(n, 4))
_scalars = st.builds(
    lambda q, imaginary: (E.Scalar(Fraction(0), q) if imaginary
                          else E.Scalar(q, Fraction(0))),
    _quarters, st.booleans())
_trees = st.recursive(
    st.one_of(_names, _scalars, st.just(E.UNIT)),
    lambda children: st.one_of(
        st.builds(E.Add, children, children),
        st.builds(E.Sub, children, children),
        st.builds(E.Mul, children, children),
        st.builds(E.Neg, children),
        children.map(E.adjoint)),
    max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(_trees)
def test_printed_source_parses_back(e):
    assert E.parse_expression(E.to_source(e)) == e

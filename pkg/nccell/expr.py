"""*-expressions: AST, grammar, canonical printer and numeric evaluation

The expression language is shared by presentation files, identity files
and generator-map images::

    expr  := term (("+" | "-") term)*
    term  := unary ("*" unary)*
    unary := "-" unary | atom
    atom  := number | "adj" "(" expr ")" | ident | "(" expr ")" | block
    block := "[" row ("," row)* "]"      row := "[" expr ("," expr)* "]"

The literal ``1`` is the unit; any other number (including ``1.0``) is a
complex scalar, with a trailing ``i`` for imaginary literals (``0.5i``).
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
import parsy

from .errors import PresentationError


class StarExpr(object):
    """Base class of expression nodes"""
    __slots__ = ()

    def __str__(self):
        return to_source(self)

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __neg__(self):
        return Neg(self)


@dataclass(frozen=True)
class Name(StarExpr):
    """A generator or a let-bound name"""
    name: str


@dataclass(frozen=True)
class Unit(StarExpr):
    """The unit literal, read in the unitization when the algebra has none"""


@dataclass(frozen=True)
class Scalar(StarExpr):
    """A complex scalar with exact rational parts"""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @property
    def value(self):
        return complex(float(self.re), float(self.im))


@dataclass(frozen=True)
class Add(StarExpr):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True)
class Sub(StarExpr):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True)
class Mul(StarExpr):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True)
class Neg(StarExpr):
    operand: StarExpr


@dataclass(frozen=True)
class Adj(StarExpr):
    operand: StarExpr


@dataclass(frozen=True)
class Block(StarExpr):
    """A block matrix; rows is a tuple of equally long tuples"""
    rows: Tuple[Tuple[StarExpr, ...], ...]

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)


UNIT = Unit()
ZERO = Scalar()


def adjoint(expr):
    """Adjoint of ``expr``; ``adj(adj(e))`` collapses to ``e``"""
    if isinstance(expr, Adj):
        return expr.operand
    return Adj(expr)


def _coerce(value):
    if isinstance(value, StarExpr):
        return value
    if isinstance(value, str):
        return Name(value)
    if value == 1:
        return UNIT
    value = complex(value)
    return Scalar(Fraction(value.real), Fraction(value.imag))


def block(rows):
    """Build a Block from nested lists, coercing names and numbers"""
    return Block(tuple(tuple(_coerce(e) for e in row) for row in rows))


###############################################################################
# Tree utilities
###############################################################################

def children(expr):
    if isinstance(expr, (Add, Sub, Mul)):
        return (expr.left, expr.right)
    elif isinstance(expr, (Neg, Adj)):
        return (expr.operand,)
    elif isinstance(expr, Block):
        return tuple(e for row in expr.rows for e in row)
    return ()


def walk(expr, path=''):
    """Yield ``(path, node)`` pairs in preorder

    Paths use ``.left``/``.right``/``.arg`` for operator children and
    ``[i][j]`` for block entries, so diagnostics can point into a relation.
    """
    yield path, expr
    if isinstance(expr, (Add, Sub, Mul)):
        yield from walk(expr.left, path + '.left')
        yield from walk(expr.right, path + '.right')
    elif isinstance(expr, (Neg, Adj)):
        yield from walk(expr.operand, path + '.arg')
    elif isinstance(expr, Block):
        for i, row in enumerate(expr.rows):
            for j, entry in enumerate(row):
                yield from walk(entry, '{}[{}][{}]'.format(path, i, j))


def names_in(expr):
    return {node.name for _, node in walk(expr) if isinstance(node, Name)}


def contains_unit(expr):
    return any(isinstance(node, Unit) for _, node in walk(expr))


def substitute(expr, mapping):
    """Replace names found in ``mapping`` (recursively through the images)"""
    if isinstance(expr, Name):
        if expr.name in mapping:
            return substitute(mapping[expr.name], mapping)
        return expr
    elif isinstance(expr, (Add, Sub, Mul)):
        return type(expr)(substitute(expr.left, mapping),
                          substitute(expr.right, mapping))
    elif isinstance(expr, Neg):
        return Neg(substitute(expr.operand, mapping))
    elif isinstance(expr, Adj):
        return adjoint(substitute(expr.operand, mapping))
    elif isinstance(expr, Block):
        return Block(tuple(tuple(substitute(e, mapping) for e in row)
                           for row in expr.rows))
    return expr


###############################################################################
# Grammar
###############################################################################

_ws = parsy.regex(r'(\s|#[^\n]*)*')


def lexeme(parser):
    return parser << _ws


def token(text):
    return lexeme(parsy.string(text))


identifier = lexeme(parsy.regex(r'[A-Za-z_][A-Za-z0-9_]*')).desc('identifier')
_number = lexeme(parsy.regex(r'\d+(\.\d+)?i?')).desc('number')


def _number_node(text):
    if text == '1':
        return UNIT
    imaginary = text.endswith('i')
    value = Fraction(text[:-1] if imaginary else text)
    if imaginary:
        return Scalar(Fraction(0), value)
    return Scalar(value, Fraction(0))


@parsy.generate('adj(...)')
def _adjoint_call():
    yield lexeme(parsy.regex(r'adj(?=\s*\()'))
    yield token('(')
    inner = yield expression
    yield token(')')
    return adjoint(inner)


@parsy.generate('block matrix')
def _block():
    yield token('[')
    rows = yield _block_row.sep_by(token(','), min=1)
    yield token(']')
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        yield parsy.fail("rectangular block matrix")
    return Block(tuple(rows))


@parsy.generate('block row')
def _block_row():
    yield token('[')
    entries = yield expression.sep_by(token(','), min=1)
    yield token(']')
    return tuple(entries)


@parsy.generate('parenthesized expression')
def _parens():
    yield token('(')
    inner = yield expression
    yield token(')')
    return inner


_atom = (_number.map(_number_node)
         | _adjoint_call
         | identifier.map(Name)
         | _parens
         | _block)


@parsy.generate('unary expression')
def _unary():
    minus = yield token('-').optional()
    if minus is not None:
        operand = yield _unary
        return Neg(operand)
    atom = yield _atom
    return atom


@parsy.generate('product')
def _term():
    result = yield _unary
    rest = yield (token('*') >> _unary).many()
    for factor in rest:
        result = Mul(result, factor)
    return result


@parsy.generate('expression')
def expression():
    result = yield _term
    rest = yield parsy.seq(token('+') | token('-'), _term).many()
    for op, operand in rest:
        result = Add(result, operand) if op == '+' else Sub(result, operand)
    return result


def raise_parse_error(err, text):
    """Convert a parsy.ParseError into a PresentationError with position"""
    line, column = parsy.line_info_at(text, err.index)
    raise PresentationError("syntax error: expected {}".format(
        ', '.join(sorted(err.expected))), line=line + 1, column=column + 1)


def parse_expression(text):
    """Parse a single expression

    Examples
    --------
    >>> print(parse_expression('adj(adj(x)) * (1 - h)'))
    x*(1 - h)
    """
    try:
        return (_ws >> expression << parsy.eof).parse(text)
    except parsy.ParseError as err:
        raise_parse_error(err, text)


###############################################################################
# Canonical printer
###############################################################################

_SUM, _PRODUCT, _UNARY, _ATOM = 1, 2, 3, 4


def _format_rational(q):
    if q.denominator == 1:
        return str(q.numerator)
    for digits in range(1, 64):
        if 10 ** digits % q.denominator == 0:
            break
    else:
        raise ValueError("scalar {} has no finite decimal form".format(q))
    sign = '-' if q < 0 else ''
    scaled = abs(q.numerator) * 10 ** digits // q.denominator
    text = str(scaled).rjust(digits + 1, '0')
    return '{}{}.{}'.format(sign, text[:-digits], text[-digits:]).rstrip('0')


def _format_scalar(node):
    re, im = node.re, node.im
    if im == 0:
        if re == 1:
            return '1.0', _ATOM
        text = _format_rational(re)
    elif re == 0:
        text = _format_rational(im) + 'i'
    else:
        imag = _format_rational(abs(im)) + 'i'
        return '({} {} {})'.format(_format_rational(re),
                                   '-' if im < 0 else '+', imag), _ATOM
    return text, (_UNARY if text.startswith('-') else _ATOM)


def _source(expr):
    if isinstance(expr, Name):
        return expr.name, _ATOM
    elif isinstance(expr, Unit):
        return '1', _ATOM
    elif isinstance(expr, Scalar):
        return _format_scalar(expr)
    elif isinstance(expr, (Add, Sub)):
        op = ' + ' if isinstance(expr, Add) else ' - '
        return _wrap(expr.left, _SUM) + op + _wrap(expr.right, _PRODUCT), _SUM
    elif isinstance(expr, Mul):
        return _wrap(expr.left, _PRODUCT) + '*' + _wrap(expr.right, _UNARY), _PRODUCT
    elif isinstance(expr, Neg):
        return '-' + _wrap(expr.operand, _UNARY), _UNARY
    elif isinstance(expr, Adj):
        return 'adj({})'.format(to_source(expr.operand)), _ATOM
    elif isinstance(expr, Block):
        rows = ('[' + ', '.join(to_source(e) for e in row) + ']'
                for row in expr.rows)
        return '[' + ', '.join(rows) + ']', _ATOM
    raise TypeError("not an expression: {!r}".format(expr))


def _wrap(expr, level):
    text, precedence = _source(expr)
    return text if precedence >= level else '(' + text + ')'


def to_source(expr):
    """Print an expression in canonical DSL syntax"""
    return _source(expr)[0]


###############################################################################
# Numeric evaluation
###############################################################################

def _as_matrix(value, size):
    if np.isscalar(value):
        return value * np.eye(size, dtype=complex)
    return value


def _block_value(rows, dim):
    heights = [next((e.shape[0] for e in row if not np.isscalar(e)), None)
               for row in rows]
    widths = [next((row[j].shape[1] for row in rows
                    if not np.isscalar(row[j])), None)
              for j in range(len(rows[0]))]
    grid = []
    for i, row in enumerate(rows):
        line = []
        for j, entry in enumerate(row):
            if np.isscalar(entry):
                size = heights[i] or widths[j] or dim
                entry = entry * np.eye(size, dtype=complex)
            line.append(entry)
        grid.append(line)
    return np.block(grid)


def _combine(left, right, dim, op):
    if np.isscalar(left) and np.isscalar(right):
        return op(left, right)
    if np.isscalar(left):
        left = _as_matrix(left, right.shape[0])
    if np.isscalar(right):
        right = _as_matrix(right, left.shape[0])
    if left.shape != right.shape:
        raise ValueError("shape mismatch: {} and {}".format(left.shape,
                                                             right.shape))
    return op(left, right)


def evaluate(expr, images, dim, lets=None):
    """Evaluate ``expr`` on complex matrices

    Parameters
    ----------
    expr : StarExpr
        the expression
    images : dict
        generator name -> square ndarray
    dim : int
        size of the identity used for the unit and scalars
    lets : dict, optional
        let-bound names -> StarExpr, expanded on demand

    Returns
    -------
    value : ndarray
        the evaluated matrix (scalars are returned as multiples of the
        identity of size ``dim``)
    """
    lets = lets or {}
    cache = {}

    def _eval(node):
        if isinstance(node, Name):
            if node.name in lets:
                if node.name not in cache:
                    cache[node.name] = _eval(lets[node.name])
                return cache[node.name]
            try:
                return images[node.name]
            except KeyError:
                raise KeyError("no image for generator {!r}".format(node.name))
        elif isinstance(node, Unit):
            return complex(1)
        elif isinstance(node, Scalar):
            return node.value
        elif isinstance(node, Add):
            return _combine(_eval(node.left), _eval(node.right), dim,
                            lambda a, b: a + b)
        elif isinstance(node, Sub):
            return _combine(_eval(node.left), _eval(node.right), dim,
                            lambda a, b: a - b)
        elif isinstance(node, Mul):
            left, right = _eval(node.left), _eval(node.right)
            if np.isscalar(left) or np.isscalar(right):
                return left * right
            return left @ right
        elif isinstance(node, Neg):
            return -_eval(node.operand)
        elif isinstance(node, Adj):
            value = _eval(node.operand)
            return np.conj(value) if np.isscalar(value) else value.conj().T
        elif isinstance(node, Block):
            return _block_value([[_eval(e) for e in row] for row in node.rows],
                                dim)
        raise TypeError("not an expression: {!r}".format(node))

    return _as_matrix(_eval(expr), dim)

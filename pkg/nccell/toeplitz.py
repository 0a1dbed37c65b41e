"""Toeplitz operators with Laurent polynomial symbols

A :class:`ToepOp` is ``T(f) + C``: the semi-infinite block Toeplitz matrix
of a matrix-valued Laurent polynomial ``f`` plus a correction ``C``
supported in a finite top-left corner. Products of such operators are
again of this form (the Hankel part of a polynomial symbol has finite
rank), so the algebra is modelled without truncation error. The ideal is
the set of operators with zero symbol, and the quotient map sends an
operator to its symbol.
"""
import logging
import warnings
from types import MappingProxyType
from typing import NamedTuple

import numpy as np
import parsy

from . import config
from . import expr as E
from . import linalg as L
from .conegrid import winding
from .errors import NumericalModelError
from .reps import Rep, check_relations

logger = logging.getLogger(__name__)


###############################################################################
# LaurentPoly
###############################################################################

def _frozen(c):
    c = np.array(c, dtype=complex)
    c.setflags(write=False)
    return c


class LaurentPoly(object):
    """A Laurent polynomial ``sum_k c_k z^k`` with ``s x s`` coefficients

    Zero coefficients are never stored. Instances are immutable.

    Parameters
    ----------
    coeffs : mapping
        exponent (int) -> coefficient (scalar or s x s matrix)
    size : int, optional
        block size ``s``; inferred from the coefficients when omitted
    """
    __slots__ = ('coeffs', 'size')

    def __init__(self, coeffs, size=None):
        blocks = {}
        for k, c in dict(coeffs).items():
            c = np.asarray(c, dtype=complex)
            if c.ndim == 0:
                c = c * np.eye(size or 1)
            if size is None:
                size = c.shape[0]
            if c.shape != (size, size):
                raise ValueError("coefficient of z^{} has shape {}, expected "
                                 "{}".format(k, c.shape, (size, size)))
            if np.any(c):
                blocks[int(k)] = _frozen(c)
        object.__setattr__(self, 'coeffs', MappingProxyType(blocks))
        object.__setattr__(self, 'size', size or 1)

    def __setattr__(self, item, val):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def zero(cls, size=1):
        return cls({}, size)

    @classmethod
    def constant(cls, value, size=1):
        value = np.asarray(value, dtype=complex)
        if value.ndim == 2:
            size = value.shape[0]
        return cls({0: value}, size)

    @classmethod
    def monomial(cls, power, size=1, coef=1):
        return cls({power: coef}, size)

    @classmethod
    def bott(cls, rank, size):
        """The loop ``P^perp + z P`` for the diagonal rank-``rank`` projection
        ``P`` in ``M_size``"""
        if not 0 <= rank <= size:
            raise ValueError("rank {} out of range for block size {}".format(
                rank, size))
        P = np.diag([1.0] * rank + [0.0] * (size - rank))
        return cls({0: np.eye(size) - P, 1: P}, size)

    def coefficient(self, k):
        c = self.coeffs.get(k)
        return c if c is not None else np.zeros((self.size, self.size), complex)

    @property
    def degrees(self):
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    @property
    def band(self):
        low, high = self.degrees
        return max(-low, high, 0)

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.size == other.size
                and set(self.coeffs) == set(other.coeffs)
                and all(np.array_equal(c, other.coeffs[k])
                        for k, c in self.coeffs.items()))

    __hash__ = None

    def allclose(self, other, tol=1e-12):
        diff = self - other
        return all(np.abs(c).max() <= tol for c in diff.coeffs.values())

    def _resized(self, size):
        if self.size == size:
            return self
        if self.size != 1:
            raise ValueError("block size mismatch: {} and {}".format(self.size,
                                                                   size))
        return LaurentPoly({k: c[0, 0] for k, c in self.coeffs.items()}, size)

    def _coerce(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(complex(other), self.size)
        size = max(self.size, other.size)
        return self._resized(size), other._resized(size)

    def __add__(self, other):
        a, b = self._coerce(other)
        coeffs = dict(a.coeffs)
        for k, c in b.coeffs.items():
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        return LaurentPoly(coeffs, a.size)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.coeffs.items()}, self.size)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ToepOp):
            return NotImplemented
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({k: complex(other) * c
                                for k, c in self.coeffs.items()}, self.size)
        a, b = self._coerce(other)
        coeffs = {}
        for k1, c1 in a.coeffs.items():
            for k2, c2 in b.coeffs.items():
                term = c1 @ c2
                coeffs[k1 + k2] = coeffs[k1 + k2] + term if k1 + k2 in coeffs else term
        return LaurentPoly(coeffs, a.size)

    def __rmul__(self, other):
        return self * other

    def adjoint(self):
        """``f*(z) = sum_k c_k^* z^-k`` (the pointwise adjoint on the circle)"""
        return LaurentPoly({-k: L.adj(c) for k, c in self.coeffs.items()},
                           self.size)

    def conjugate_by(self, V):
        """The symbol ``V* f V`` for a constant matrix ``V``"""
        V = L.as_cmat(V)
        return LaurentPoly({k: L.adj(V) @ c @ V for k, c in self.coeffs.items()},
                           self.size)

    def evaluate(self, z):
        """Value at ``z``; an array of points gives a stack of matrices"""
        z = np.asarray(z, dtype=complex)
        result = np.zeros(z.shape + (self.size, self.size), dtype=complex)
        for k, c in self.coeffs.items():
            result = result + np.multiply.outer(z ** k, c)
        return result

    def circle_values(self, samples=None, closed=False):
        samples = samples or config.CIRCLE_SAMPLES
        t = np.arange(samples + 1 if closed else samples) / samples
        return self.evaluate(np.exp(2j * np.pi * t))

    def unitary_residual(self, samples=None):
        values = self.circle_values(samples)
        one = np.eye(self.size)
        gram = np.conj(np.swapaxes(values, 1, 2)) @ values - one
        return float(np.linalg.norm(gram, ord=2, axis=(1, 2)).max())

    def is_unitary(self, tol=None):
        if tol is None:
            tol = config.TOLERANCES.unitary
        return self.unitary_residual() <= tol

    def winding(self):
        """Winding number of ``det f`` around the unit circle"""
        samples = max(config.CIRCLE_SAMPLES, 8 * self.band * self.size)
        return winding(np.linalg.det(self.circle_values(samples, closed=True)))

    def __str__(self):
        if self.size != 1:
            return "LaurentPoly(size={}, exponents={})".format(
                self.size, sorted(self.coeffs))
        if not self.coeffs:
            return '0'
        terms = []
        for k in sorted(self.coeffs):
            c = complex(self.coeffs[k][0, 0])
            if c.imag == 0:
                coef = '{:g}'.format(c.real)
            else:
                coef = '({:g}{:+g}i)'.format(c.real, c.imag)
            mono = 'z' if k == 1 else 'z^{}'.format(k)
            if k == 0:
                terms.append(coef)
            elif c == 1:
                terms.append(mono)
            else:
                terms.append('{}*{}'.format(coef, mono))
        return ' + '.join(terms)

    def __repr__(self):
        return "LaurentPoly({})".format(self)


###############################################################################
# Symbol literals
###############################################################################

_int = E.lexeme(parsy.regex(r'\d+')).map(int)
_signed_int = E.lexeme(parsy.regex(r'[+-]?\d+')).map(int)
_real = E.lexeme(parsy.regex(r'\d+(\.\d*)?([eE][+-]?\d+)?i?')).desc('number')


def _number_symbol(text):
    if text.endswith('i'):
        return LaurentPoly.constant(1j * float(text[:-1]))
    return LaurentPoly.constant(float(text))


@parsy.generate('monomial')
def _monomial():
    yield E.lexeme(parsy.regex(r'z(?![A-Za-z0-9_])'))
    power = yield (E.token('^') >> _signed_int).optional()
    return LaurentPoly.monomial(1 if power is None else power)


@parsy.generate('bott(r, s)')
def _bott():
    yield E.lexeme(parsy.regex(r'bott(?=\s*\()'))
    yield E.token('(')
    rank = yield _int
    yield E.token(',')
    size = yield _int
    yield E.token(')')
    if rank > size:
        yield parsy.fail("rank at most the block size")
    return LaurentPoly.bott(rank, size)


@parsy.generate('parenthesized symbol')
def _symbol_parens():
    yield E.token('(')
    inner = yield symbol_expression
    yield E.token(')')
    return inner


_symbol_atom = _real.map(_number_symbol) | _bott | _monomial | _symbol_parens


@parsy.generate('signed factor')
def _symbol_unary():
    minus = yield E.token('-').optional()
    operand = yield (_symbol_unary if minus is not None else _symbol_atom)
    return -operand if minus is not None else operand


@parsy.generate('symbol product')
def _symbol_term():
    result = yield _symbol_unary
    rest = yield (E.token('*') >> _symbol_unary).many()
    for factor in rest:
        result = result * factor
    return result


@parsy.generate('symbol')
def symbol_expression():
    result = yield _symbol_term
    rest = yield parsy.seq(E.token('+') | E.token('-'), _symbol_term).many()
    for op, operand in rest:
        result = result + operand if op == '+' else result - operand
    return result


def parse_symbol(text):
    """Parse a symbol literal

    Literals are sums and products of numbers (``3.5``, ``2i``), powers of
    ``z`` (``z``, ``z^-2``) and ``bott(r, s)``, the loop ``P^perp + z P``
    with ``rank P = r`` in block size ``s``. Scalars broadcast to the block
    size of the other operand.

    Examples
    --------
    >>> print(parse_symbol('3.5*z^1 + (0+1i)'))
    (0+1i) + 3.5*z
    """
    try:
        return (E._ws >> symbol_expression << parsy.eof).parse(text)
    except parsy.ParseError as err:
        E.raise_parse_error(err, text)


###############################################################################
# ToepOp
###############################################################################

def _trim(correction, size):
    """Drop trailing all-zero block rows and columns"""
    nonzero = np.nonzero(np.any(correction != 0, axis=0)
                         | np.any(correction != 0, axis=1))[0]
    if not nonzero.size:
        return np.zeros((0, 0), dtype=complex)
    m = (nonzero[-1] // size + 1) * size
    return correction[:m, :m]


class ToepOp(object):
    """The operator ``T(symbol) + correction``

    Parameters
    ----------
    symbol : LaurentPoly
    correction : array_like, optional
        square matrix of side ``m * symbol.size``, acting on the first
        ``m`` blocks
    """
    __slots__ = ('symbol', 'correction')

    def __init__(self, symbol, correction=None):
        if correction is None:
            correction = np.zeros((0, 0), dtype=complex)
        correction = np.atleast_2d(np.asarray(correction, dtype=complex))
        if correction.size == 0:
            correction = np.zeros((0, 0), dtype=complex)
        s = symbol.size
        n = correction.shape[0]
        if correction.shape != (n, n) or n % s:
            raise ValueError("correction of shape {} does not fit block size "
                             "{}".format(correction.shape, s))
        object.__setattr__(self, 'symbol', symbol)
        object.__setattr__(self, 'correction', _frozen(_trim(correction, s)))

    def __setattr__(self, item, val):
        raise AttributeError("ToepOp is immutable")

    @classmethod
    def identity(cls, size=1):
        return cls(LaurentPoly.constant(1, size))

    @classmethod
    def ideal(cls, correction, size=1):
        """The ideal element with zero symbol and the given correction"""
        return cls(LaurentPoly.zero(size), correction)

    @property
    def size(self):
        return self.symbol.size

    @property
    def corner(self):
        """Number of blocks the correction acts on"""
        return self.correction.shape[0] // self.size

    def is_ideal(self):
        return self.symbol.is_zero()

    def corner_matrix(self, m):
        """The correction padded to ``m`` blocks"""
        if m < self.corner:
            raise ValueError("corner {} is smaller than the correction ({} "
                             "blocks)".format(m, self.corner))
        n = m * self.size
        out = np.zeros((n, n), dtype=complex)
        k = self.correction.shape[0]
        out[:k, :k] = self.correction
        return out

    def dense(self, n):
        """The ``n x n`` block truncation as a dense matrix"""
        s = self.size
        D = np.zeros((n * s, n * s), dtype=complex)
        for k, c in self.symbol.coeffs.items():
            if abs(k) < n:
                D += np.kron(np.eye(n, k=-k), c)
        m = min(n, self.corner) * s
        D[:m, :m] += self.correction[:m, :m]
        return D

    def _check_size(self, other):
        if other.size != self.size:
            raise ValueError("block size mismatch: {} and {}".format(self.size,
                                                                   other.size))

    def __add__(self, other):
        if not isinstance(other, ToepOp):
            other = ToepOp(LaurentPoly.constant(complex(other), self.size))
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return ToepOp(-self.symbol, -self.correction)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ToepOp):
            return mul(self, other)
        return ToepOp(self.symbol * complex(other), complex(other) * self.correction)

    def __rmul__(self, other):
        return self * other

    def adjoint(self):
        return ToepOp(self.symbol.adjoint(), L.adj(self.correction))

    def to_ideal(self, tol=None):
        """This operator with a negligible symbol replaced by zero

        Raises
        ------
        ValueError :
            if a symbol coefficient exceeds ``tol``
        """
        if tol is None:
            tol = config.TOLERANCES.unitary
        worst = max((np.abs(c).max() for c in self.symbol.coeffs.values()),
                    default=0.0)
        if worst > tol:
            raise ValueError("operator is not in the ideal: symbol coefficient "
                             "of size {:.3g}".format(worst))
        return ToepOp.ideal(self.correction, self.size)

    def funcalc(self, f, tol=None):
        """Apply a functional calculus tag to a self-adjoint operator whose
        symbol is (within ``tol``) a real scalar constant ``c``

        The result is ``f(c) + (f(c + C) - f(c))`` on the corner.
        """
        if tol is None:
            tol = config.TOLERANCES.unitary
        s = self.size
        c = complex(self.symbol.coefficient(0)[0, 0])
        off = self.symbol - LaurentPoly.constant(c.real, s)
        if abs(c.imag) > tol or any(np.abs(v).max() > tol
                                    for v in off.coeffs.values()):
            raise ValueError("functional calculus needs a real scalar constant "
                             "symbol")
        fc = complex(L.herm_funcalc(np.array([[c.real]]), f)[0, 0])
        m = self.corner
        if not m:
            return ToepOp(LaurentPoly.constant(fc, s))
        corner = c.real * np.eye(m * s) + self.correction
        return ToepOp(LaurentPoly.constant(fc, s),
                      L.herm_funcalc(corner, f) - fc * np.eye(m * s))

    def __repr__(self):
        return "ToepOp({!r}, corner={})".format(self.symbol, self.corner)


def toep(symbol):
    """The canonical lift ``T(symbol)`` (zero correction)"""
    return ToepOp(symbol)


def add(a, b):
    a._check_size(b)
    m = max(a.corner, b.corner)
    return ToepOp(a.symbol + b.symbol, a.corner_matrix(m) + b.corner_matrix(m))


def mul(a, b):
    """Exact product of two Toeplitz-plus-corner operators

    The correction of ``ab - T(fg)`` lives in the first ``max(m_a, m_b) +
    band(f) + band(g)`` blocks and is read off a dense window wide enough
    that no product term is cut off.
    """
    a._check_size(b)
    f, g = a.symbol, b.symbol
    fg = f * g
    m = max(a.corner, b.corner) + f.band + g.band
    n = m + f.band + g.band
    window = a.dense(n) @ b.dense(n) - toep(fg).dense(n)
    s = a.size
    return ToepOp(fg, window[:m * s, :m * s])


def quotient_symbol(x):
    return x.symbol


def trace_ideal(x):
    """Trace of an ideal element (the sum of the correction's diagonal)

    Raises
    ------
    ValueError :
        if the symbol is nonzero
    """
    if not x.is_ideal():
        raise ValueError("trace is only defined on the ideal (zero symbol)")
    return complex(np.trace(x.correction))


###############################################################################
# Index boundary
###############################################################################

class IndexResult(NamedTuple):
    """Output of the index boundary

    ``rep`` is the G2st representation ``(h1, k1, x1)`` on the common
    corner, ``trace`` the pairing ``tr h1 - tr k1`` before rounding and
    ``index`` its nearest integer.
    """
    rep: Rep
    index: int
    trace: float
    drift: float
    lift: ToepOp
    corner: int


def psi0_index(a):
    """The ideal elements ``h1 = 1 - a*a``, ``k1 = 1 - aa*`` and ``x1 = a
    sqrt(h1)`` of a contraction ``a`` with unitary symbol"""
    one = ToepOp.identity(a.size)
    h1 = (one - a.adjoint() * a).to_ideal()
    k1 = (one - a * a.adjoint()).to_ideal()
    x1 = (a * h1.funcalc('sqrt_clamped')).to_ideal()
    return h1, k1, x1


def index_boundary(u=None, lift=None):
    """The index map on a unitary symbol

    With ``a`` the lift (``toep(u)`` unless given), forms the ideal
    elements ``h1 = 1 - a*a``, ``k1 = 1 - aa*`` and ``x1 = a sqrt(h1)``.
    The class ``round(tr h1 - tr k1)`` is the Fredholm index of ``a``, so
    the symbol ``z^w`` goes to ``-w``.

    Raises
    ------
    ValueError :
        if the symbol is not unitary on the circle
    NumericalModelError :
        if the trace pairing is further than ``index_blowup`` from an
        integer, or ``1 - a*a`` is not positive
    """
    if lift is None:
        lift = toep(u)
    if u is None:
        u = lift.symbol
    residual = u.unitary_residual()
    if residual > config.TOLERANCES.unitary:
        raise ValueError("symbol is not unitary on the circle (residual "
                         "{:.3g})".format(residual))
    if not lift.symbol.allclose(u, config.TOLERANCES.unitary):
        raise ValueError("lift does not have the given symbol")
    h1, k1, x1 = psi0_index(lift)
    trace = (trace_ideal(h1) - trace_ideal(k1)).real
    index = int(round(trace))
    drift = abs(trace - index)
    if drift > config.TOLERANCES.index_blowup:
        raise NumericalModelError("trace pairing {:.12g} is not an integer; "
                                  "the model is broken".format(trace))
    if drift > config.TOLERANCES.index_drift:
        warnings.warn("trace pairing drifts {:.3g} from {}".format(drift, index))

    m = max(h1.corner, k1.corner, x1.corner, 1)
    rep = Rep('G2st', {'h': h1.corner_matrix(m), 'k': k1.corner_matrix(m),
                       'x': x1.corner_matrix(m)})
    if config.CHECK_MODE:
        report = check_relations(rep, config.TOLERANCES.pullback)
        if not report.passed:
            raise NumericalModelError("index boundary output fails its "
                                      "relations:\n{}".format(report))
    logger.debug("index boundary: corner %d, trace %.15g", m, trace)
    return IndexResult(rep, index, trace, drift, lift, m)


def _kernel_dim(symbol, n):
    """dim ker of T(symbol) on the first n blocks, read from the rectangular
    truncation that holds every image entry"""
    s = symbol.size
    rows = n + max(symbol.degrees[1], 0)
    D = toep(symbol).dense(rows)[:, :n * s]
    return n * s - L.rank(D)


def fredholm_oracle(u, n=32, max_n=1024):
    """dim ker - dim coker of ``T(u)`` from singular value rank counts

    The counts are taken at ``n`` and ``n + band`` blocks and must agree;
    otherwise ``n`` is doubled up to ``max_n``.

    Raises
    ------
    ValueError :
        if the symbol is not unitary
    NumericalModelError :
        if the counts never stabilize
    """
    if not u.is_unitary():
        raise ValueError("fredholm oracle needs a unitary symbol")
    band = max(u.band, 1)
    star = u.adjoint()
    while True:
        counts = [(_kernel_dim(u, m), _kernel_dim(star, m)) for m in (n, n + band)]
        if counts[0] == counts[1]:
            kernel, cokernel = counts[0]
            return kernel - cokernel
        if n >= max_n:
            raise NumericalModelError("kernel counts {} did not stabilize up to "
                                      "N = {}".format(counts, n))
        logger.info("kernel counts %s differ at N = %d; doubling", counts, n)
        n = 2 * n

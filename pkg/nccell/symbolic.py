"""Exact noncommutative *-polynomials and oriented rewriting

Polynomials live in the free *-algebra over the Gaussian rationals. A
word is a tuple of letters ``(generator, adjoint_flag)``; the empty word
is the unit. Identities are proved by reducing ``lhs - rhs`` to zero with a
:class:`RewriteSystem` whose rules all decrease the (length, lexicographic)
word order, so reduction always terminates. No completion is attempted:
when a system is not confluent, a nonzero normal form is a certificate to
be checked numerically rather than a disproof.
"""
import collections
import functools
import logging
import pkgutil
import re
from fractions import Fraction
from types import MappingProxyType
from typing import NamedTuple

import numpy as np
import parsy
from sympy.polys.domains import QQ, QQ_I

from . import expr as E
from .errors import PresentationError, RewriteOrderError, SubstitutionError

logger = logging.getLogger(__name__)


class Letter(NamedTuple):
    name: str
    adjoint: bool = False

    def star(self):
        return Letter(self.name, not self.adjoint)

    def __str__(self):
        return "adj({})".format(self.name) if self.adjoint else self.name


###############################################################################
# Coefficients
###############################################################################

def _rational(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def coefficient(value):
    """Convert an int, Fraction, complex or Gaussian rational to QQ_I"""
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, complex):
        return QQ_I(_rational(value.real), _rational(value.imag))
    return QQ_I(_rational(value), QQ.zero)


def _is_zero(c):
    return not c.x and not c.y


def _conj(c):
    return QQ_I(c.x, -c.y)


def _to_fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def _to_complex(c):
    return complex(float(_to_fraction(c.x)), float(_to_fraction(c.y)))


###############################################################################
# NCPoly
###############################################################################

class NCPoly(object):
    """A noncommutative *-polynomial: a map word -> Gaussian rational

    Zero coefficients are never stored. Instances are immutable.

    Parameters
    ----------
    terms : mapping, optional
        word (tuple of Letter) -> coefficient (anything accepted by
        :func:`coefficient`)
    """
    __slots__ = ('_terms',)

    def __init__(self, terms=None):
        clean = {}
        for word, c in (terms or {}).items():
            c = coefficient(c)
            if not _is_zero(c):
                clean[tuple(Letter(*letter) for letter in word)] = c
        object.__setattr__(self, '_terms', MappingProxyType(clean))

    def __setattr__(self, item, val):
        raise AttributeError("NCPoly is immutable")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({(): 1})

    @classmethod
    def scalar(cls, value):
        return cls({(): value})

    @classmethod
    def generator(cls, name, adjoint=False):
        return cls({(Letter(name, adjoint),): 1})

    @property
    def terms(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def generators(self):
        return {letter.name for word in self._terms for letter in word}

    def constant(self):
        """The coefficient of the empty word, or None for a non-constant"""
        if set(self._terms) - {()}:
            return None
        return self._terms.get((), QQ_I.zero)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return dict(self._terms) == dict(other._terms)
        if isinstance(other, (int, Fraction, complex)):
            return self == NCPoly.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((w, (c.x, c.y)) for w, c in self._terms.items()))

    def __neg__(self):
        return NCPoly({w: -c for w, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, PolyMatrix):
            return NotImplemented
        other = _as_poly(other)
        terms = collections.defaultdict(lambda: QQ_I.zero, self._terms)
        for w, c in other._terms.items():
            terms[w] = terms[w] + c
        return NCPoly(terms)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PolyMatrix):
            return NotImplemented
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            return NotImplemented
        other = _as_poly(other)
        terms = collections.defaultdict(lambda: QQ_I.zero)
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                terms[w1 + w2] = terms[w1 + w2] + c1 * c2
        return NCPoly(terms)

    def __rmul__(self, other):
        return _as_poly(other) * self

    def adjoint(self):
        """Involution: reverse words, flip letters, conjugate coefficients"""
        return NCPoly({tuple(l.star() for l in reversed(w)): _conj(c)
                       for w, c in self._terms.items()})

    def to_expr(self, order=None):
        """Convert to a DSL expression (terms in ascending word order)"""
        order = order or RewriteSystem(())
        words = sorted(self._terms, key=order.word_key)
        result = None
        for word in words:
            c = self._terms[word]
            negative = c.y == 0 and c.x < 0
            if negative:
                c = -c
            mono = None
            for letter in word:
                factor = (E.Adj(E.Name(letter.name)) if letter.adjoint
                          else E.Name(letter.name))
                mono = factor if mono is None else E.Mul(mono, factor)
            if c == QQ_I.one:
                term = mono if mono is not None else E.UNIT
            else:
                scalar = E.Scalar(_to_fraction(c.x), _to_fraction(c.y))
                term = scalar if mono is None else E.Mul(scalar, mono)
            if result is None:
                result = E.Neg(term) if negative else term
            else:
                result = E.Sub(result, term) if negative else E.Add(result, term)
        return result if result is not None else E.ZERO

    def __str__(self):
        return E.to_source(self.to_expr())

    def __repr__(self):
        return "NCPoly({})".format(self)


def _as_poly(value):
    if isinstance(value, NCPoly):
        return value
    return NCPoly.scalar(value)


###############################################################################
# PolyMatrix
###############################################################################

class PolyMatrix(object):
    """A rectangular block of NCPoly entries (an element of M_{m,n}(A))"""
    __slots__ = ('rows',)

    def __init__(self, rows):
        rows = tuple(tuple(_as_poly(e) for e in row) for row in rows)
        if not rows or len({len(row) for row in rows}) != 1:
            raise SubstitutionError("block matrix must be rectangular")
        object.__setattr__(self, 'rows', rows)

    def __setattr__(self, item, val):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def identity(cls, n, value=1):
        return cls([[value if i == j else 0 for j in range(n)]
                    for i in range(n)])

    @classmethod
    def from_blocks(cls, grid):
        """Flatten a grid whose entries are NCPoly or PolyMatrix

        NCPoly entries sitting next to k x k blocks are read as multiples
        of the k x k identity (zero entries may be rectangular).
        """
        heights = [next((e.shape[0] for e in row if isinstance(e, PolyMatrix)), 1)
                   for row in grid]
        widths = [next((row[j].shape[1] for row in grid
                        if isinstance(row[j], PolyMatrix)), 1)
                  for j in range(len(grid[0]))]
        rows = []
        for i, row in enumerate(grid):
            blocks = []
            for j, entry in enumerate(row):
                if not isinstance(entry, PolyMatrix):
                    entry = _as_poly(entry)
                    if entry.is_zero():
                        entry = cls([[0] * widths[j]] * heights[i])
                    elif heights[i] == widths[j]:
                        entry = cls.identity(heights[i], entry)
                    else:
                        raise SubstitutionError(
                            "cannot place {} in a {}x{} block".format(
                                entry, heights[i], widths[j]))
                if entry.shape != (heights[i], widths[j]):
                    raise SubstitutionError(
                        "block shape mismatch at [{}][{}]: {} != {}".format(
                            i, j, entry.shape, (heights[i], widths[j])))
                blocks.append(entry)
            for r in range(heights[i]):
                rows.append([e for b in blocks for e in b.rows[r]])
        return cls(rows)

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]))

    def entries(self):
        return (e for row in self.rows for e in row)

    def map(self, func):
        return PolyMatrix([[func(e) for e in row] for row in self.rows])

    def is_zero(self):
        return all(e.is_zero() for e in self.entries())

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, PolyMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def _broadcast(self, other):
        if isinstance(other, PolyMatrix):
            if other.shape != self.shape:
                raise SubstitutionError("block shape mismatch: {} != {}".format(
                    self.shape, other.shape))
            return other
        if self.shape[0] != self.shape[1]:
            raise SubstitutionError("cannot add a scalar to a non-square block")
        return PolyMatrix.identity(self.shape[0], _as_poly(other))

    def __add__(self, other):
        other = self._broadcast(other)
        return PolyMatrix([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.rows, other.rows)])

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, other):
        return self + (-self._broadcast(other))

    def __rsub__(self, other):
        return self._broadcast(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolyMatrix):
            other = _as_poly(other)
            return self.map(lambda e: e * other)
        if self.shape[1] != other.shape[0]:
            raise SubstitutionError("block shape mismatch: {} times {}".format(
                self.shape, other.shape))
        cols = list(zip(*other.rows))
        return PolyMatrix([[sum((a * b for a, b in zip(row, col)), NCPoly())
                            for col in cols] for row in self.rows])

    def __rmul__(self, other):
        other = _as_poly(other)
        return self.map(lambda e: other * e)

    def adjoint(self):
        return PolyMatrix([[e.adjoint() for e in col]
                           for col in zip(*self.rows)])

    def to_expr(self, order=None):
        return E.Block(tuple(tuple(e.to_expr(order) for e in row)
                             for row in self.rows))

    def __str__(self):
        return E.to_source(self.to_expr())

    def __repr__(self):
        return "PolyMatrix({})".format(self)


def to_ncpoly(expr, lets=None):
    """Convert a StarExpr to an NCPoly (or a PolyMatrix for blocks)

    Names bound in ``lets`` are expanded; every other name is a generator.
    """
    lets = lets or {}
    cache = {}

    def _convert(node):
        if isinstance(node, E.Name):
            if node.name in lets:
                if node.name not in cache:
                    cache[node.name] = _convert(lets[node.name])
                return cache[node.name]
            return NCPoly.generator(node.name)
        elif isinstance(node, E.Unit):
            return NCPoly.one()
        elif isinstance(node, E.Scalar):
            return NCPoly.scalar(QQ_I(_rational(node.re), _rational(node.im)))
        elif isinstance(node, E.Add):
            return _convert(node.left) + _convert(node.right)
        elif isinstance(node, E.Sub):
            return _convert(node.left) - _convert(node.right)
        elif isinstance(node, E.Mul):
            return _convert(node.left) * _convert(node.right)
        elif isinstance(node, E.Neg):
            return -_convert(node.operand)
        elif isinstance(node, E.Adj):
            return _convert(node.operand).adjoint()
        elif isinstance(node, E.Block):
            grid = [[_convert(e) for e in row] for row in node.rows]
            return PolyMatrix.from_blocks(grid)
        raise TypeError("not an expression: {!r}".format(node))

    return _convert(expr)


###############################################################################
# Rewriting
###############################################################################

class Rule(NamedTuple):
    lhs: tuple
    rhs: NCPoly

    def __str__(self):
        return "{} -> {}".format(NCPoly({self.lhs: 1}), self.rhs)


class RewriteSystem(object):
    """An ordered list of oriented rules ``word -> polynomial``

    Parameters
    ----------
    rules : iterable of Rule
        the rules, tried in order at each word position (leftmost first)
    letter_order : iterable of Letter, optional
        explicit letter ranking; letters not listed rank after all listed
        ones, by name and then with the plain letter before its adjoint.
    name : string, optional
        name used by identity files and reports

    Raises
    ------
    RewriteOrderError :
        if some rule's right-hand side contains a word that is not strictly
        smaller than its left-hand side
    """
    def __init__(self, rules, letter_order=(), name=''):
        self.name = name
        self._rank = {Letter(*l): i for i, l in enumerate(letter_order)}
        self.rules = tuple(Rule(tuple(Letter(*l) for l in r.lhs), r.rhs)
                           for r in rules)
        self._by_first = collections.defaultdict(list)
        for rule in self.rules:
            if not rule.lhs:
                raise RewriteOrderError("rule with empty left-hand side")
            for word in rule.rhs.terms:
                if not self.word_key(word) < self.word_key(rule.lhs):
                    raise RewriteOrderError(
                        "rule {} does not decrease the word order "
                        "(offending word {})".format(rule, NCPoly({word: 1})))
            self._by_first[rule.lhs[0]].append(rule)

    def __repr__(self):
        return "RewriteSystem({!r}, {} rules)".format(self.name, len(self.rules))

    def letter_key(self, letter):
        if letter in self._rank:
            return (0, self._rank[letter], '', False)
        return (1, 0, letter.name, letter.adjoint)

    def word_key(self, word):
        return (len(word), tuple(self.letter_key(l) for l in word))

    def find(self, word):
        """Return ``(position, rule)`` of the leftmost match, or None"""
        for pos, letter in enumerate(word):
            for rule in self._by_first.get(letter, ()):
                if word[pos:pos + len(rule.lhs)] == rule.lhs:
                    return pos, rule
        return None

    @classmethod
    def from_strings(cls, pairs, letter_order=(), name=''):
        """Build a system from ``(lhs, rhs)`` DSL strings"""
        rules = []
        for lhs, rhs in pairs:
            lhs_poly = to_ncpoly(E.parse_expression(lhs))
            if len(lhs_poly.terms) != 1 or list(lhs_poly.terms.values())[0] != QQ_I.one:
                raise RewriteOrderError("rule lhs {!r} is not a monomial".format(lhs))
            rules.append(Rule(next(iter(lhs_poly.terms)),
                              to_ncpoly(E.parse_expression(rhs))))
        return cls(rules, letter_order, name)


def _self_adjoint_rules(names):
    return [(("adj({})".format(n)), n) for n in names]


def projection_rules(names, selfadjoint=(), name=''):
    """Rules for projections ``p*p -> p, adj(p) -> p`` and self-adjoint letters"""
    pairs = [("{0}*{0}".format(n), n) for n in names]
    pairs += _self_adjoint_rules(list(names) + list(selfadjoint))
    order = [Letter(n, flag) for n in list(names) + list(selfadjoint)
             for flag in (False, True)]
    return RewriteSystem.from_strings(pairs, order, name)


def grassmannian_rules(h='h', k='k', x='x', orthogonal=False, name=''):
    """Rules for the G2st relations on ``(h, k, x)``

    The letters are ranked ``x < adj(x) < h < k`` so that ``h*h -> h -
    adj(x)*x``, ``k*k -> k - x*adj(x)``, ``k*x -> x*h`` and its adjoint
    ``h*adj(x) -> adj(x)*k`` all decrease the word order. With
    ``orthogonal`` the qC relation ``h*k = 0`` (and its adjoint) is added.
    """
    names = dict(h=h, k=k, x=x)
    pairs = _self_adjoint_rules([h, k]) + [
        ("{h}*{h}".format(**names), "{h} - adj({x})*{x}".format(**names)),
        ("{k}*{k}".format(**names), "{k} - {x}*adj({x})".format(**names)),
        ("{k}*{x}".format(**names), "{x}*{h}".format(**names)),
        ("{h}*adj({x})".format(**names), "adj({x})*{k}".format(**names)),
    ]
    if orthogonal:
        pairs += [("{h}*{k}".format(**names), "0"),
                  ("{k}*{h}".format(**names), "0")]
    order = [Letter(x), Letter(x, True), Letter(h), Letter(h, True),
             Letter(k), Letter(k, True)]
    return RewriteSystem.from_strings(pairs, order, name)


def unital_grassmannian_rules(a='a', b='b', c='c', name=''):
    """Rules for G2nc, where ``[[a, adj(c)], [c, b]]`` is a projection

    Ranked ``c < adj(c) < a < b``: ``a*a -> a - adj(c)*c``, ``b*b -> b -
    c*adj(c)``, ``b*c -> c - c*a`` and ``a*adj(c) -> adj(c) - adj(c)*b``.
    """
    names = dict(a=a, b=b, c=c)
    pairs = _self_adjoint_rules([a, b]) + [
        ("{a}*{a}".format(**names), "{a} - adj({c})*{c}".format(**names)),
        ("{b}*{b}".format(**names), "{b} - {c}*adj({c})".format(**names)),
        ("{b}*{c}".format(**names), "{c} - {c}*{a}".format(**names)),
        ("{a}*adj({c})".format(**names),
         "adj({c}) - adj({c})*{b}".format(**names)),
    ]
    order = [Letter(c), Letter(c, True), Letter(a), Letter(a, True),
             Letter(b), Letter(b, True)]
    return RewriteSystem.from_strings(pairs, order, name)


@functools.lru_cache(maxsize=None)
def rewrite_system(name):
    """Return one of the named rule systems used by identity files

    Known names: ``free`` (no rules), ``cc01`` (projection p, self-adjoint
    l), ``cc`` (projections p0, q0), ``g2st``, ``g2nc`` and ``qc``.
    """
    if name == 'free':
        return RewriteSystem((), name='free')
    elif name == 'cc01':
        return projection_rules(['p'], selfadjoint=['l'], name='cc01')
    elif name == 'cc':
        return projection_rules(['p0', 'q0'], name='cc')
    elif name == 'g2st':
        return grassmannian_rules(name='g2st')
    elif name == 'g2nc':
        return unital_grassmannian_rules(name='g2nc')
    elif name == 'qc':
        return grassmannian_rules('h0', 'k0', 'x0', orthogonal=True, name='qc')
    raise KeyError("unknown rewrite system {!r}".format(name))


def normal_form(x, rules):
    """Reduce ``x`` (NCPoly or PolyMatrix) until no rule applies"""
    if isinstance(x, PolyMatrix):
        return x.map(lambda e: normal_form(e, rules))
    result = collections.defaultdict(lambda: QQ_I.zero)
    stack = list(_as_poly(x).terms.items())
    while stack:
        word, c = stack.pop()
        hit = rules.find(word)
        if hit is None:
            result[word] = result[word] + c
            continue
        pos, rule = hit
        prefix, suffix = word[:pos], word[pos + len(rule.lhs):]
        for w, c2 in rule.rhs.terms.items():
            stack.append((prefix + w + suffix, c * c2))
    return NCPoly(result)


class ProofResult(NamedTuple):
    holds: bool
    difference: object

    def __bool__(self):
        return self.holds


def prove_identity(lhs, rhs, rules):
    """Decide ``lhs == rhs`` by reducing the difference modulo ``rules``

    A scalar side next to a square block is read as a multiple of the
    identity block.

    Returns
    -------
    result : ProofResult
        ``holds`` is True iff the reduced difference is zero; otherwise
        ``difference`` is the nonzero reduced difference (a certificate).
    """
    difference = normal_form(lhs - rhs, rules)
    return ProofResult(difference.is_zero(), difference)


def substitute_genmap(target, images):
    """Apply a generator map to a polynomial (or block of polynomials)

    Parameters
    ----------
    target : NCPoly or PolyMatrix
        the polynomial to transform
    images : dict
        generator name -> NCPoly or square PolyMatrix; all block images
        must share one size

    Returns
    -------
    result : NCPoly or PolyMatrix
    """
    sizes = {img.shape for img in images.values() if isinstance(img, PolyMatrix)}
    if len(sizes) > 1:
        raise SubstitutionError("block images of different shapes: {}".format(
            sorted(sizes)))
    if sizes:
        (size,) = sizes
        if size[0] != size[1]:
            raise SubstitutionError("block images must be square")
        one = PolyMatrix.identity(size[0])
    else:
        one = NCPoly.one()

    images = {name: (img if isinstance(img, PolyMatrix) else _as_poly(img))
              for name, img in images.items()}
    starred = {}

    def _image(letter):
        try:
            img = images[letter.name]
        except KeyError:
            raise SubstitutionError("no image for generator {!r}".format(
                letter.name))
        if not letter.adjoint:
            return img
        if letter.name not in starred:
            starred[letter.name] = img.adjoint()
        return starred[letter.name]

    def _substitute(poly):
        total = one * 0
        for word, c in poly.terms.items():
            value = one
            for letter in word:
                value = value * _image(letter)
            total = total + value * NCPoly.scalar(c)
        return total

    if isinstance(target, PolyMatrix):
        return PolyMatrix.from_blocks([[_substitute(e) for e in row]
                                       for row in target.rows])
    return _substitute(_as_poly(target))


def evaluate_poly(poly, images, dim):
    """Evaluate an NCPoly or PolyMatrix on complex matrices"""
    if isinstance(poly, PolyMatrix):
        return np.block([[evaluate_poly(e, images, dim) for e in row]
                         for row in poly.rows])
    total = np.zeros((dim, dim), dtype=complex)
    for word, c in poly.terms.items():
        value = np.eye(dim, dtype=complex)
        for letter in word:
            img = images[letter.name]
            value = value @ (img.conj().T if letter.adjoint else img)
        total += _to_complex(c) * value
    return total


###############################################################################
# Identity files
###############################################################################

class Identity(NamedTuple):
    lhs: E.StarExpr
    rhs: E.StarExpr
    rules: str
    lets: tuple
    line: int

    @property
    def source(self):
        return "{} == {}".format(E.to_source(self.lhs), E.to_source(self.rhs))

    def prove(self):
        lets = dict(self.lets)
        return prove_identity(to_ncpoly(self.lhs, lets), to_ncpoly(self.rhs, lets),
                              rewrite_system(self.rules))


_let_line = parsy.seq(E.token('let') >> E.identifier << E.token('='),
                      E.expression)
_identity_line = parsy.seq(E.expression << E.token('=='), E.expression,
                           E.token('modulo') >> E.identifier)


def load_identities(text):
    """Parse an identity file

    Each nonblank line is ``let name = expr``, a ``#`` comment, or
    ``lhs == rhs  modulo <rules-name>``. Let-bindings apply to the lines
    that follow them.
    """
    identities = []
    lets = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split('#', 1)[0].strip()
        if not stripped:
            continue
        parser = _let_line if re.match(r'let\b', stripped) else _identity_line
        try:
            parsed = (parser << parsy.eof).parse(stripped)
        except parsy.ParseError as err:
            try:
                E.raise_parse_error(err, stripped)
            except PresentationError as exc:
                exc.line = lineno
                raise
        if parser is _let_line:
            name, value = parsed
            lets[name] = value
        else:
            lhs, rhs, rules = parsed
            identities.append(Identity(lhs, rhs, rules, tuple(lets.items()),
                                       lineno))
    return identities


def shipped_identities(name):
    """Load one of the identity files bundled with the package"""
    data = pkgutil.get_data(__name__, 'data/identities/{}.nci'.format(name))
    return load_identities(data.decode('utf-8'))

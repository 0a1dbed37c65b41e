"""Presentations of universal C*-algebras by generators and relations

A presentation file looks like::

    presentation G2st nonunital {
      meta semiprojective;
      gen h, k, x;
      let P = [[1 - h, adj(x)], [x, k]];
      rel proj(P);
    }

Constraints are ``proj(E)``, ``selfadj(E)``, ``eq(E, F)``, ``range01(E)``,
``normle(E, c)``, ``zero(E)`` and ``unitary(E)``. The unit literal ``1`` may
be used by relations of a nonunital algebra; it is then read in the
unitization (the identity matrix in numeric checks).
"""
import functools
import logging
import pkgutil
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple

import parsy
from sympy.polys.domains import QQ_I

from . import expr as E
from . import symbolic as S
from .errors import PresentationError, SubstitutionError

logger = logging.getLogger(__name__)

CONSTRAINTS = {
    # name -> number of expression operands
    'proj': 1,
    'selfadj': 1,
    'eq': 2,
    'range01': 1,
    'normle': 1,
    'zero': 1,
    'unitary': 1,
}


class Relation(NamedTuple):
    """A relation as written in a presentation"""
    kind: str
    operands: Tuple[E.StarExpr, ...]
    bound: Optional[Fraction] = None

    def __str__(self):
        args = [E.to_source(op) for op in self.operands]
        if self.bound is not None:
            args.append(_format_bound(self.bound))
        return "{}({})".format(self.kind, ', '.join(args))


class PrimitiveRelation(NamedTuple):
    """An expanded relation: ``eq`` (poly == 0), ``range01`` or ``normle``

    For ``eq`` relations ``poly`` holds the difference ``lhs - rhs`` as an
    NCPoly; the spectral kinds keep their (possibly block) expression.
    """
    kind: str
    poly: Optional[S.NCPoly] = None
    operand: Optional[E.StarExpr] = None
    bound: Optional[Fraction] = None

    def __str__(self):
        if self.kind == 'eq':
            return "{} == 0".format(self.poly)
        elif self.kind == 'normle':
            return "normle({}, {})".format(E.to_source(self.operand),
                                           _format_bound(self.bound))
        return "{}({})".format(self.kind, E.to_source(self.operand))


class Diagnostic(NamedTuple):
    path: str
    message: str

    def __str__(self):
        return "{}: {}".format(self.path, self.message)


@dataclass(frozen=True)
class Metadata(object):
    projective: bool = False
    semiprojective: bool = False
    source: str = ''
    note: str = ''


@dataclass(frozen=True)
class Presentation(object):
    """A parsed presentation

    Attributes
    ----------
    name : string
    unital : bool
    generators : tuple of string
    lets : tuple of (name, StarExpr) pairs, in declaration order
    relations : tuple of Relation
    metadata : Metadata
    """
    name: str
    unital: bool
    generators: Tuple[str, ...]
    lets: Tuple[Tuple[str, E.StarExpr], ...] = ()
    relations: Tuple[Relation, ...] = ()
    metadata: Metadata = field(default_factory=Metadata)

    @property
    def let_map(self):
        return dict(self.lets)

    def expanded_relations(self):
        return expand_relations(self)

    def __str__(self):
        return print_presentation(self)


###############################################################################
# Grammar
###############################################################################

_bound = E.lexeme(parsy.regex(r'\d+(\.\d+)?')).map(Fraction).desc('bound')
_string = E.lexeme(parsy.regex(r'"[^"\n]*"')).map(lambda s: s[1:-1])


@parsy.generate('constraint')
def _constraint():
    kind = yield E.lexeme(parsy.regex('|'.join(sorted(CONSTRAINTS, key=len,
                                                      reverse=True))))
    yield E.token('(')
    operands = [(yield E.expression)]
    for _ in range(CONSTRAINTS[kind] - 1):
        yield E.token(',')
        operands.append((yield E.expression))
    bound = None
    if kind == 'normle':
        yield E.token(',')
        bound = yield _bound
    yield E.token(')')
    return Relation(kind, tuple(operands), bound)


_gen_decl = (E.token('gen') >> E.identifier.sep_by(E.token(','), min=1)
             << E.token(';')).map(lambda names: ('gen', tuple(names)))
_let_decl = parsy.seq(E.token('let') >> E.identifier << E.token('='),
                      E.expression << E.token(';')).map(
                          lambda pair: ('let', tuple(pair)))
_rel_decl = (E.token('rel') >> _constraint << E.token(';')).map(
    lambda rel: ('rel', rel))
_meta_item = (parsy.seq(E.lexeme(parsy.regex('source|note')), _string)
              | E.lexeme(parsy.regex('projective|semiprojective')).map(
                  lambda flag: (flag, True)))
_meta_decl = (E.token('meta') >> _meta_item.sep_by(E.token(','), min=1)
              << E.token(';')).map(lambda items: ('meta', tuple(items)))


@parsy.generate('presentation')
def _presentation():
    yield E.token('presentation')
    name = yield E.identifier
    unital = yield E.lexeme(parsy.regex('unital|nonunital'))
    yield E.token('{')
    decls = yield (_gen_decl | _let_decl | _rel_decl | _meta_decl).many()
    yield E.token('}')

    generators, lets, relations, meta = [], [], [], {}
    for kind, value in decls:
        if kind == 'gen':
            generators.extend(value)
        elif kind == 'let':
            lets.append(value)
        elif kind == 'rel':
            relations.append(value)
        else:
            meta.update(value)
    return Presentation(name, unital == 'unital', tuple(generators),
                        tuple(lets), tuple(relations), Metadata(**meta))


def parse_presentation(text, validate=True):
    """Parse presentation source text

    Parameters
    ----------
    text : string
        the DSL source
    validate : boolean
        If True (default), raise when validate_presentation reports
        diagnostics.

    Returns
    -------
    presentation : Presentation

    Raises
    ------
    PresentationError :
        on a syntax error (with line and column) or failed validation
    """
    try:
        result = (E._ws >> _presentation << parsy.eof).parse(text)
    except parsy.ParseError as err:
        E.raise_parse_error(err, text)
    if validate:
        diagnostics = validate_presentation(result)
        if diagnostics:
            raise PresentationError("invalid presentation {}".format(result.name),
                                    diagnostics)
    return result


def parse_expression(text, scope=None):
    """Parse an expression, optionally checking names against ``scope``"""
    result = E.parse_expression(text)
    if scope is not None:
        unknown = sorted(E.names_in(result) - set(scope))
        if unknown:
            raise PresentationError("undeclared generator {}".format(unknown[0]))
    return result


###############################################################################
# Printer
###############################################################################

def _format_bound(bound):
    return E.to_source(E.Scalar(Fraction(bound)))


def print_presentation(p):
    """Print a presentation in canonical form"""
    lines = ["presentation {} {} {{".format(p.name,
                                            'unital' if p.unital else 'nonunital')]
    meta = p.metadata
    flags = [flag for flag in ('projective', 'semiprojective')
             if getattr(meta, flag)]
    flags += ['{} "{}"'.format(key, getattr(meta, key))
              for key in ('source', 'note') if getattr(meta, key)]
    if flags:
        lines.append("  meta {};".format(', '.join(flags)))
    if p.generators:
        lines.append("  gen {};".format(', '.join(p.generators)))
    for name, value in p.lets:
        lines.append("  let {} = {};".format(name, E.to_source(value)))
    for rel in p.relations:
        lines.append("  rel {};".format(rel))
    lines.append("}")
    return '\n'.join(lines) + '\n'


###############################################################################
# Validation
###############################################################################

def _let_cycles(lets):
    """Return the names of bindings that sit on a dependency cycle"""
    graph = {name: E.names_in(value) & set(lets) for name, value in lets.items()}
    cyclic = []
    for start in lets:
        seen, stack = set(), list(graph[start])
        while stack:
            name = stack.pop()
            if name == start:
                cyclic.append(start)
                break
            if name not in seen:
                seen.add(name)
                stack.extend(graph[name])
    return cyclic


def _lets_used_by_relations(p):
    lets = p.let_map
    used, stack = set(), [n for rel in p.relations for op in rel.operands
                          for n in E.names_in(op)]
    while stack:
        name = stack.pop()
        if name in lets and name not in used:
            used.add(name)
            stack.extend(E.names_in(lets[name]))
    return used


def validate_presentation(p):
    """Check scoping, acyclicity, unit usage and block shapes

    Returns
    -------
    diagnostics : list of Diagnostic
        empty iff the presentation is valid; each diagnostic carries the
        path of the offending subexpression.
    """
    diagnostics = []
    generators = set(p.generators)
    lets = p.let_map

    seen = set()
    for name in p.generators:
        if name in seen:
            diagnostics.append(Diagnostic('gen', "duplicate generator {}".format(name)))
        seen.add(name)
    for name in lets:
        if name in generators:
            diagnostics.append(Diagnostic('let {}'.format(name),
                                          "binding shadows generator {}".format(name)))

    scope = generators | set(lets)
    sources = [('let {}'.format(name), value) for name, value in p.lets]
    sources += [('rel[{}].{}[{}]'.format(i, rel.kind, j), op)
                for i, rel in enumerate(p.relations)
                for j, op in enumerate(rel.operands)]
    for prefix, value in sources:
        for path, node in E.walk(value):
            if isinstance(node, E.Name) and node.name not in scope:
                diagnostics.append(Diagnostic(
                    prefix + path, "undeclared generator {}".format(node.name)))

    for name in _let_cycles(lets):
        diagnostics.append(Diagnostic('let {}'.format(name),
                                      "cyclic binding {}".format(name)))

    if not p.unital:
        used = _lets_used_by_relations(p)
        for name, value in p.lets:
            if name not in used and E.contains_unit(value):
                diagnostics.append(Diagnostic(
                    'let {}'.format(name),
                    "unit literal outside a relation context in a nonunital "
                    "presentation"))

    for i, rel in enumerate(p.relations):
        if rel.bound is not None and rel.bound < 0:
            diagnostics.append(Diagnostic('rel[{}]'.format(i),
                                          "negative norm bound"))

    if not diagnostics:
        diagnostics.extend(_shape_diagnostics(p))
    return diagnostics


def _shape_diagnostics(p):
    diagnostics = []
    lets = p.let_map
    for i, rel in enumerate(p.relations):
        path = 'rel[{}].{}'.format(i, rel.kind)
        try:
            values = [S.to_ncpoly(op, lets) for op in rel.operands]
        except SubstitutionError as err:
            diagnostics.append(Diagnostic(path, str(err)))
            continue
        shapes = [v.shape if isinstance(v, S.PolyMatrix) else (1, 1)
                  for v in values]
        if len(set(shapes)) > 1:
            diagnostics.append(Diagnostic(path, "operand shapes differ: {}".format(
                ' vs '.join(str(s) for s in shapes))))
        elif rel.kind in ('proj', 'selfadj', 'unitary', 'range01') \
                and shapes[0][0] != shapes[0][1]:
            diagnostics.append(Diagnostic(path, "{} needs a square block".format(
                rel.kind)))
    return diagnostics


###############################################################################
# Relation expansion
###############################################################################

def _inverse(c):
    norm = c.x * c.x + c.y * c.y
    return QQ_I(c.x / norm, -c.y / norm)


def _dedupe_key(poly):
    """Identify polynomials equal up to a nonzero scalar and the adjoint"""
    order = S.RewriteSystem(())

    def _normalize(q):
        first = min(q.terms, key=order.word_key)
        return q * S.NCPoly.scalar(_inverse(q.terms[first]))

    return frozenset([_normalize(poly), _normalize(poly.adjoint())])


def expand_relations(p):
    """Expand proj, selfadj, unitary and zero into primitive relations

    Block equations are split entrywise; entries whose difference is zero
    are dropped and entries that agree up to a scalar multiple or an
    adjoint are kept once. ``range01`` and ``normle`` stay as written.

    Returns
    -------
    relations : tuple of PrimitiveRelation
    """
    lets = p.let_map
    result, seen = [], set()

    def _add_eq(lhs, rhs):
        diff = S.to_ncpoly(lhs, lets) - S.to_ncpoly(rhs, lets)
        entries = diff.entries() if isinstance(diff, S.PolyMatrix) else [diff]
        for entry in entries:
            if entry.is_zero():
                continue
            key = _dedupe_key(entry)
            if key not in seen:
                seen.add(key)
                result.append(PrimitiveRelation('eq', poly=entry))

    for rel in p.relations:
        ops = rel.operands
        if rel.kind == 'proj':
            _add_eq(E.Mul(ops[0], ops[0]), ops[0])
            _add_eq(E.adjoint(ops[0]), ops[0])
        elif rel.kind == 'selfadj':
            _add_eq(E.adjoint(ops[0]), ops[0])
        elif rel.kind == 'eq':
            _add_eq(ops[0], ops[1])
        elif rel.kind == 'zero':
            _add_eq(ops[0], E.ZERO)
        elif rel.kind == 'unitary':
            _add_eq(E.Mul(E.adjoint(ops[0]), ops[0]), E.UNIT)
            _add_eq(E.Mul(ops[0], E.adjoint(ops[0])), E.UNIT)
        else:
            result.append(PrimitiveRelation(rel.kind, operand=ops[0],
                                            bound=rel.bound))
    return tuple(result)


###############################################################################
# Registry
###############################################################################

_SHIPPED = {
    'G2nc': 'g2nc.ncp',
    'G2st': 'g2st.ncp',
    'qC': 'qc.ncp',
    'P': 'p.ncp',
    'C0_01': 'c0_01.ncp',
    'D': 'd.ncp',
    'CC': 'cc.ncp',
    'CC01': 'cc01.ncp',
}


def shipped_source(filename):
    """Return the text of a presentation file bundled with the package"""
    data = pkgutil.get_data(__name__, 'data/presentations/{}'.format(filename))
    return data.decode('utf-8')


def cone_source(n):
    """Source text of the cone CM_n = C_0((0,1], M_n)

    For n >= 2 the generators x2..xn satisfy ``xi*xj = 0``,
    ``adj(xi)*xj = 0`` for i != j and ``adj(xi)*xi = adj(x2)*x2``, with
    ``x2`` a contraction. For n = 1 the cone is generated by a single
    positive contraction.
    """
    if n < 1:
        raise ValueError("cone size must be positive, got {}".format(n))
    lines = ['presentation ConeM{} nonunital {{'.format(n),
             '  meta projective, note "f(t) in M_t for t <= n on the '
             'mapping telescope is not modelled";']
    if n == 1:
        lines += ['  gen h;', '  rel range01(h);']
    else:
        names = ['x{}'.format(i) for i in range(2, n + 1)]
        lines.append('  gen {};'.format(', '.join(names)))
        for xi in names:
            for xj in names:
                lines.append('  rel zero({}*{});'.format(xi, xj))
                if xi != xj:
                    lines.append('  rel zero(adj({})*{});'.format(xi, xj))
        for xi in names[1:]:
            lines.append('  rel eq(adj({0})*{0}, adj(x2)*x2);'.format(xi))
        lines.append('  rel normle(x2, 1);')
    lines.append('}')
    return '\n'.join(lines) + '\n'


def registry_names():
    return sorted(_SHIPPED) + ['ConeMn(n)']


@functools.lru_cache(maxsize=None)
def registry_get(name):
    """Return a built-in presentation by name

    Known names are G2nc, G2st, qC, P, C0_01, D, CC, CC01 and ``ConeMn(n)``
    for a positive integer n.

    Raises
    ------
    KeyError :
        if the name is unknown
    """
    match = re.fullmatch(r'ConeMn\((\d+)\)', name)
    if match:
        return parse_presentation(cone_source(int(match.group(1))))
    try:
        filename = _SHIPPED[name]
    except KeyError:
        raise KeyError("unknown presentation {!r}; known: {}".format(
            name, ', '.join(registry_names())))
    logger.debug("loading presentation %s from %s", name, filename)
    return parse_presentation(shipped_source(filename))

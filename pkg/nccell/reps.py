"""Matrix representations of presentations

A :class:`Rep` assigns a d x d complex matrix to every generator. This
module checks relations on representations, builds representations from
projections and contractions, pulls representations back along generator
maps, and realizes the homotopies between them as parameterized families.
"""
import functools
import logging
import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple, Tuple

import numpy as np

from . import config
from . import expr as E
from . import linalg as L
from . import symbolic as S
from .errors import RelationError, SubstitutionError
from .presentations import expand_relations, parse_expression, registry_get

logger = logging.getLogger(__name__)


class Rep(object):
    """An assignment of square matrices of one size to the generators

    Parameters
    ----------
    presentation : Presentation or string
        the presentation (or its registry name)
    images : dict
        generator name -> square matrix; every generator needs an image
    """
    def __init__(self, presentation, images):
        if isinstance(presentation, str):
            presentation = registry_get(presentation)
        missing = set(presentation.generators) - set(images)
        extra = set(images) - set(presentation.generators)
        if missing or extra:
            raise SubstitutionError(
                "images for {} do not match its generators (missing {}, "
                "unknown {})".format(presentation.name, sorted(missing),
                                     sorted(extra)))
        images = {name: L.as_cmat(images[name])
                  for name in presentation.generators}
        shapes = {M.shape for M in images.values()}
        if len(shapes) > 1 or any(s[0] != s[1] for s in shapes):
            raise SubstitutionError("images must be square of one size, got "
                                    "{}".format(sorted(shapes)))
        (shape,) = shapes or {(0, 0)}
        self.presentation = presentation
        self.dim = shape[0]
        self.images = MappingProxyType(images)

    @classmethod
    def zero(cls, presentation, dim):
        if isinstance(presentation, str):
            presentation = registry_get(presentation)
        return cls(presentation, {name: np.zeros((dim, dim), dtype=complex)
                                  for name in presentation.generators})

    def __getitem__(self, name):
        return self.images[name]

    def __repr__(self):
        return "Rep({}, dim={})".format(self.presentation.name, self.dim)

    def map(self, func):
        return Rep(self.presentation, {name: func(M)
                                       for name, M in self.images.items()})

    def conjugate(self, U):
        """The unitarily equivalent representation ``U * . * U^*``"""
        return self.map(lambda M: U @ M @ L.adj(U))

    def pad(self, extra=1):
        """The representation ``rep + 0`` on ``dim + extra`` dimensions"""
        def _pad(M):
            out = np.zeros((self.dim + extra, self.dim + extra), dtype=complex)
            out[:self.dim, :self.dim] = M
            return out
        return self.map(_pad)

    def direct_sum(self, other):
        if other.presentation != self.presentation:
            raise SubstitutionError("direct sum of representations of different "
                                    "presentations")
        n = self.dim + other.dim
        images = {}
        for name in self.presentation.generators:
            M = np.zeros((n, n), dtype=complex)
            M[:self.dim, :self.dim] = self[name]
            M[self.dim:, self.dim:] = other[name]
            images[name] = M
        return Rep(self.presentation, images)

    def distance(self, other):
        """Largest operator-norm distance between corresponding images"""
        return max((L.op_norm(self[name] - other[name])
                    for name in self.presentation.generators), default=0.0)

    def check(self, tol=None):
        return check_relations(self, tol)


###############################################################################
# Relation checks
###############################################################################

@dataclass(frozen=True)
class RelationReport(object):
    """Residual of every expanded relation of a representation"""
    presentation: str
    residuals: Tuple[Tuple[str, float], ...]
    tol: float

    @property
    def passed(self):
        return all(r <= self.tol for _, r in self.residuals)

    @property
    def worst(self):
        if not self.residuals:
            return None
        return max(self.residuals, key=lambda pair: pair[1])[0]

    @property
    def worst_residual(self):
        return max((r for _, r in self.residuals), default=0.0)

    def __bool__(self):
        return self.passed

    def __str__(self):
        lines = ["{} relations at tol {:.1e}: {}".format(
            self.presentation, self.tol, 'pass' if self.passed else 'FAIL')]
        lines += ["  {:<8} {:.3e}  {}".format('ok' if r <= self.tol else 'FAIL',
                                                r, rel)
                  for rel, r in self.residuals]
        return '\n'.join(lines)


_expanded = functools.lru_cache(maxsize=None)(expand_relations)


def relation_residual(relation, rep):
    """Residual of one primitive relation on ``rep``"""
    lets = rep.presentation.let_map
    if relation.kind == 'eq':
        return L.op_norm(S.evaluate_poly(relation.poly, rep.images, rep.dim))
    value = E.evaluate(relation.operand, rep.images, rep.dim, lets)
    if relation.kind == 'range01':
        return L.spectral_interval_residual(value)
    elif relation.kind == 'normle':
        return max(0.0, L.op_norm(value) - float(relation.bound))
    raise ValueError("unknown relation kind {!r}".format(relation.kind))


def check_relations(rep, tol=None):
    """Evaluate every expanded relation of the presentation on ``rep``

    Residuals: ``|lhs - rhs|`` for equations, ``max(0, -min spectrum,
    max spectrum - 1)`` (plus the non-Hermitian part) for ``range01`` and
    ``max(0, |E| - c)`` for ``normle``.

    Returns
    -------
    report : RelationReport
    """
    if tol is None:
        tol = config.TOLERANCES.factory
    residuals = tuple((str(rel), relation_residual(rel, rep))
                      for rel in _expanded(rep.presentation))
    return RelationReport(rep.presentation.name, residuals, tol)


def _checked(rep, tol=None):
    if config.CHECK_MODE:
        report = check_relations(rep, tol)
        if not report.passed:
            raise RelationError(str(report))
    return rep


###############################################################################
# Factories
###############################################################################

def qc_rep_from_projections(p, q, input_tol=None):
    """The qC representation ``h0 = p - pqp, k0 = (1-p)q(1-p), x0 = (1-p)qp``"""
    p, q = L.as_cmat(p), L.as_cmat(q)
    L.require_projection(p, 'p', input_tol)
    L.require_projection(q, 'q', input_tol)
    one = np.eye(p.shape[0])
    return _checked(Rep('qC', {'h0': p - p @ q @ p,
                               'k0': (one - p) @ q @ (one - p),
                               'x0': (one - p) @ q @ p}))


def p_rep_from_pair(p, l, input_tol=None):
    """The representation of P given by ``theta``: ``h = p - plp``,
    ``k = (1-p)l(1-p)``, ``x = (1-p)lp``"""
    p, l = L.as_cmat(p), L.as_cmat(l)
    L.require_projection(p, 'p', input_tol)
    L.require_positive_contraction(l, 'l', input_tol)
    one = np.eye(p.shape[0])
    return _checked(Rep('P', {'h': p - p @ l @ p,
                              'k': (one - p) @ l @ (one - p),
                              'x': (one - p) @ l @ p}))


def g2st_rep_from_contraction(a):
    """The G2st representation ``h = 1 - a*a, k = 1 - aa*, x = a sqrt(h)``

    Raises
    ------
    RelationError :
        if ``|a| > 1 + 1e-10``
    """
    a = L.as_cmat(a)
    norm = L.op_norm(a)
    if norm > 1 + 1e-10:
        raise RelationError("a is not a contraction (norm {:.12g})".format(norm))
    one = np.eye(a.shape[0])
    h = one - L.adj(a) @ a
    k = one - a @ L.adj(a)
    h, k = (h + L.adj(h)) / 2, (k + L.adj(k)) / 2
    return _checked(Rep('G2st', {'h': h, 'k': k,
                                 'x': a @ L.herm_funcalc(h, 'sqrt_clamped')}))


def random_qc_rep(d, seed, ranks=None):
    rng = L.as_rng(seed)
    if ranks is None:
        ranks = rng.integers(0, d + 1, size=2)
    return qc_rep_from_projections(L.random_projection(d, int(ranks[0]), rng),
                                   L.random_projection(d, int(ranks[1]), rng))


def random_p_rep(d, seed, rank=None):
    rng = L.as_rng(seed)
    if rank is None:
        rank = int(rng.integers(0, d + 1))
    return p_rep_from_pair(L.random_projection(d, rank, rng),
                           L.random_contraction(d, rng, positive=True))


def random_g2st_rep(d, seed):
    return g2st_rep_from_contraction(L.random_contraction(d, seed))


def _random_cc_rep(d, seed):
    rng = L.as_rng(seed)
    ranks = rng.integers(0, d + 1, size=2)
    return Rep('CC', {'p0': L.random_projection(d, int(ranks[0]), rng),
                      'q0': L.random_projection(d, int(ranks[1]), rng)})


def _random_cc01_rep(d, seed):
    rng = L.as_rng(seed)
    return Rep('CC01', {'p': L.random_projection(d, int(rng.integers(0, d + 1)), rng),
                        'l': L.random_contraction(d, rng, positive=True)})


def _random_g2nc_rep(d, seed):
    return apply_genmap(get_genmap('unitization'), random_g2st_rep(d, seed))


FACTORIES = {
    'G2st': random_g2st_rep,
    'G2nc': _random_g2nc_rep,
    'qC': random_qc_rep,
    'P': random_p_rep,
    'CC': _random_cc_rep,
    'CC01': _random_cc01_rep,
}


def random_rep(name, d, seed):
    """A seeded random factory representation of a registry presentation"""
    try:
        factory = FACTORIES[name]
    except KeyError:
        raise KeyError("no random factory for {!r}".format(name))
    return factory(d, seed)


###############################################################################
# Generator maps
###############################################################################

@dataclass(frozen=True)
class GenMap(object):
    """A *-homomorphism given by images of the source generators

    Images are expressions over the target generators; block images land in
    the ``block x block`` matrices over the target.
    """
    name: str
    source: str
    target: str
    images: Tuple[Tuple[str, E.StarExpr], ...]
    block: int = 1

    @property
    def source_presentation(self):
        return registry_get(self.source)

    @property
    def target_presentation(self):
        return registry_get(self.target)

    def image_polys(self):
        lets = self.target_presentation.let_map
        return {name: S.to_ncpoly(image, lets) for name, image in self.images}

    def __str__(self):
        return "{}: {} -> {}".format(self.name, self.source, self.target)


def genmap(name, source, target, **images):
    target_gens = registry_get(target).generators
    parsed = tuple((gen, parse_expression(text, scope=target_gens))
                   for gen, text in images.items())
    shapes = {img.shape for _, img in parsed if isinstance(img, E.Block)}
    block = shapes.pop()[0] if shapes else 1
    return GenMap(name, source, target, parsed, block)


def _theta(p, l):
    return dict(h='{p} - {p}*{l}*{p}'.format(p=p, l=l),
                k='(1 - {p})*{l}*(1 - {p})'.format(p=p, l=l),
                x='(1 - {p})*{l}*{p}'.format(p=p, l=l))


@functools.lru_cache(maxsize=None)
def genmap_registry():
    """All built-in generator maps, by name"""
    maps = [
        genmap('rho', 'G2st', 'qC', h='h0', k='k0', x='x0'),
        genmap('lambda', 'qC', 'G2st', h0='[[h, 0], [0, 0]]',
               k0='[[0, 0], [0, k]]', x0='[[0, 0], [x, 0]]'),
        genmap('eta', 'G2st', 'G2st', h='k', k='h', x='adj(x)'),
        genmap('theta', 'P', 'CC01', **_theta('p', 'l')),
        genmap('theta0', 'qC', 'CC', **{g + '0': img for g, img
                                        in _theta('p0', 'q0').items()}),
        genmap('eta1', 'CC01', 'CC', p='p0', l='q0'),
        genmap('eta_P', 'P', 'qC', h='h0', k='k0', x='x0'),
        genmap('unitization', 'G2nc', 'G2st', a='1 - h', b='k', c='x'),
        genmap('unitization_inverse', 'G2st', 'G2nc', h='1 - a', k='b', x='c'),
        genmap('amplify', 'G2st', 'G2st', h='[[h, 0], [0, 0]]',
               k='[[k, 0], [0, 0]]', x='[[x, 0], [0, 0]]'),
        genmap('lambda_rho_q', 'qC', 'qC', h0='[[h0, 0], [0, 0]]',
               k0='[[0, 0], [0, k0]]', x0='[[0, 0], [x0, 0]]'),
    ]
    return MappingProxyType({m.name: m for m in maps})


def get_genmap(name):
    try:
        return genmap_registry()[name]
    except KeyError:
        raise KeyError("unknown generator map {!r}; known: {}".format(
            name, ', '.join(sorted(genmap_registry()))))


# rewrite systems that decide equations in each target presentation
RULES_FOR = {'G2st': 'g2st', 'G2nc': 'g2nc', 'qC': 'qc', 'CC': 'cc',
             'CC01': 'cc01'}


def apply_genmap(m, rep, check=None):
    """Pull a representation of ``m.target`` back to one of ``m.source``

    With block images the result acts on ``m.block * rep.dim`` dimensions.
    When ``check`` (default: CHECK_MODE) is set, the pullback is required to
    pass the source relations at the pullback tolerance.
    """
    if isinstance(m, str):
        m = get_genmap(m)
    if rep.presentation.name != m.target:
        raise SubstitutionError("{} expects a {} representation, got {}".format(
            m.name, m.target, rep.presentation.name))
    lets = rep.presentation.let_map
    images = {name: E.evaluate(image, rep.images, rep.dim, lets)
              for name, image in m.images}
    shapes = {M.shape for M in images.values()}
    if len(shapes) != 1:
        raise SubstitutionError("block images of {} have shapes {}".format(
            m.name, sorted(shapes)))
    result = Rep(m.source_presentation, images)
    if config.CHECK_MODE if check is None else check:
        report = check_relations(result, config.TOLERANCES.pullback)
        if not report.passed:
            raise RelationError("pullback along {} fails:\n{}".format(m.name,
                                                                      report))
    return result


class CertifiedRelation(NamedTuple):
    relation: str
    status: str    # 'symbolic', 'numeric' or 'fail'
    residual: float


def certify_genmap(m, trials=10, seed=0, dim=4, tol=1e-8):
    """Certify that a generator map respects every source relation

    Equations are first reduced symbolically with the target's rewrite
    system; relations that do not reduce to zero (and the spectral ones)
    are checked on ``trials`` seeded factory representations of the
    target. An equation that only certifies numerically triggers a warning.

    Returns
    -------
    results : list of CertifiedRelation
    """
    if isinstance(m, str):
        m = get_genmap(m)
    images = m.image_polys()
    rules = RULES_FOR.get(m.target)
    system = S.rewrite_system(rules) if rules else None

    pulled = None
    results = []
    for rel in _expanded(m.source_presentation):
        if rel.kind == 'eq' and system is not None:
            reduced = S.normal_form(S.substitute_genmap(rel.poly, images), system)
            if not reduced:
                results.append(CertifiedRelation(str(rel), 'symbolic', 0.0))
                continue
        if pulled is None:
            with config.check_mode(False):
                pulled = [apply_genmap(m, random_rep(m.target, dim, L.make_rng(seed, i)),
                                       check=False)
                          for i in range(trials)]
        residual = max(relation_residual(rel, rep) for rep in pulled)
        status = 'numeric' if residual <= tol else 'fail'
        if rel.kind == 'eq' and status == 'numeric':
            warnings.warn("{}: relation {} certified numerically only".format(
                m.name, rel))
        results.append(CertifiedRelation(str(rel), status, residual))
    return results


###############################################################################
# Homotopies
###############################################################################

def _null_segment_one(rep, alpha):
    h, k, x = rep['h'], rep['k'], rep['x']
    beta = math.sqrt(max(0.0, 1 - alpha ** 2))
    zero = np.zeros_like(h)
    H = np.block([[h, zero], [zero, k]])
    K = np.block([[k, zero], [zero, h]])
    X = np.block([[alpha * x, -beta * L.sqrtm_psd(x @ L.adj(x))],
                  [beta * L.sqrtm_psd(L.adj(x) @ x), alpha * L.adj(x)]])
    return Rep(rep.presentation, {'h': H, 'k': K, 'x': X})


def _null_segment_two(rep, gamma):
    h, k = gamma * rep['h'], gamma * rep['k']
    zero = np.zeros_like(h)
    H = np.block([[h, zero], [zero, k]])
    K = np.block([[k, zero], [zero, h]])
    X = np.block([[zero, -L.sqrtm_psd(k - k @ k)],
                  [L.sqrtm_psd(h - h @ h), zero]])
    return Rep(rep.presentation, {'h': H, 'k': K, 'x': X})


def null_homotopy_at(rep, s):
    """Point ``s`` in [0, 2] of the null-homotopy of ``id + eta``

    On [0, 1] the off-diagonal rotation runs with ``alpha = 1 - s``; on
    [1, 2] the diagonals shrink with ``gamma = 2 - s``. At ``s = 0`` the
    images are ``diag(h, k), diag(k, h), diag(x, x*)``; at ``s = 2`` they
    vanish.

    Raises
    ------
    ValueError :
        if s is outside [0, 2]
    """
    if rep.presentation.name != 'G2st':
        raise SubstitutionError("null homotopy needs a G2st representation")
    if not 0 <= s <= 2:
        raise ValueError("homotopy parameter {} outside [0, 2]".format(s))
    if s <= 1:
        return _null_segment_one(rep, 1 - s)
    return _null_segment_two(rep, 2 - s)


def null_homotopy_junction_gap(rep):
    """Distance between the two segment formulas at the junction s = 1"""
    return _null_segment_one(rep, 0.0).distance(_null_segment_two(rep, 1.0))


def lambda_rho_homotopy_at(rep, t):
    """Point ``t`` in [0, 1] of the homotopy from the lambda-rho pullback
    to ``id (x) e11``

    With ``w = sin(pi t/2) e11 + cos(pi t/2) e21`` the images are
    ``h (x) w*w``, ``k (x) ww*`` and ``x (x) w``; ``w*w = e11`` for every t.
    Representations of qC are deformed the same way.
    """
    if not 0 <= t <= 1:
        raise ValueError("homotopy parameter {} outside [0, 1]".format(t))
    names = {'G2st': ('h', 'k', 'x'), 'qC': ('h0', 'k0', 'x0')}
    try:
        h, k, x = names[rep.presentation.name]
    except KeyError:
        raise SubstitutionError("lambda-rho homotopy needs a G2st or qC "
                                "representation")
    w = np.array([[math.sin(math.pi * t / 2), 0],
                  [math.cos(math.pi * t / 2), 0]], dtype=complex)
    return Rep(rep.presentation, {h: np.kron(L.matrix_unit(0, 0), rep[h]),
                                  k: np.kron(w @ L.adj(w), rep[k]),
                                  x: np.kron(w, rep[x])})


###############################################################################
# Exactness at P
###############################################################################

class Extension(NamedTuple):
    r: np.ndarray
    l_hat: np.ndarray
    rep: Rep
    residual: float


def reconstruct_extension(rep, tol=1e-7):
    """Extend a representation of P along theta

    ``r`` is the support projection of ``h`` and ``l_hat = r - h + x + x* +
    k``; ``p_rep_from_pair(r, l_hat)`` then reproduces ``rep``.

    Returns
    -------
    extension : Extension
        ``residual`` is the distance between ``rep`` and the reproduced
        representation

    Raises
    ------
    RelationError :
        if rep fails the P relations or l_hat leaves [-tol, 1 + tol]
    """
    if rep.presentation.name != 'P':
        raise SubstitutionError("reconstruction needs a P representation")
    report = check_relations(rep, config.TOLERANCES.factory)
    if not report.passed:
        raise RelationError(str(report))
    h, k, x = rep['h'], rep['k'], rep['x']
    r = L.support_projection(h)
    l_hat = r - h + x + L.adj(x) + k
    l_hat = (l_hat + L.adj(l_hat)) / 2
    spread = L.spectral_interval_residual(l_hat)
    if spread > tol:
        raise RelationError("reconstructed l leaves [0, 1] by {:.3g}".format(spread))
    with config.check_mode(False):
        rebuilt = p_rep_from_pair(r, l_hat, input_tol=tol)
    return Extension(r, l_hat, rebuilt, rebuilt.distance(rep))


def support_identities(rep):
    """Residuals of the support relations of a P representation

    With ``r`` and ``q`` the support projections of ``h`` and ``k``:
    ``rx = xq = 0``, ``qx = xr = x``, ``rh = hr = h``, ``qh = hq = rk = kr
    = 0`` and ``qk = kq = k``.
    """
    h, k, x = rep['h'], rep['k'], rep['x']
    r, q = L.support_projection(h), L.support_projection(k)
    checks = {
        'r*x': r @ x, 'x*q': x @ q,
        'q*x - x': q @ x - x, 'x*r - x': x @ r - x,
        'r*h - h': r @ h - h, 'h*r - h': h @ r - h,
        'q*h': q @ h, 'h*q': h @ q, 'r*k': r @ k, 'k*r': k @ r,
        'q*k - k': q @ k - k, 'k*q - k': k @ q - k,
    }
    return {name: L.op_norm(M) for name, M in checks.items()}


def quotient_generator_check(p, l):
    """Residual of ``l - p = -theta(h) + theta(x) + theta(x)* + theta(k)``"""
    rep = p_rep_from_pair(p, l)
    rhs = -rep['h'] + rep['x'] + L.adj(rep['x']) + rep['k']
    return L.op_norm((L.as_cmat(l) - L.as_cmat(p)) - rhs)

"""Grid model of cones, suspensions and the exponential boundary

Functions on [0, 1] with values in M_d are sampled at ``t_j = j / G``.
The cone ``C_0((0,1], M_d)`` is the set of such functions vanishing at 0,
the quotient map is evaluation at ``t = 1``. Classes in K_1 are read off
as winding numbers of determinant loops.
"""
import logging
import math
import warnings
from typing import Callable, NamedTuple

import numpy as np

from . import config
from . import linalg as L
from .errors import GridResolutionError, NumericalModelError, RelationError
from .reps import Rep, apply_genmap, check_relations

logger = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-10


###############################################################################
# Winding numbers
###############################################################################

def phase_total(samples):
    """Total phase change of a closed loop of nonzero complex samples, in
    turns

    Raises
    ------
    ValueError :
        if a sample vanishes or the loop is not closed within 1e-6
    GridResolutionError :
        if two consecutive samples differ in phase by pi/2 or more
    """
    z = np.asarray(samples, dtype=complex).ravel()
    if z.size < 2:
        raise ValueError("a loop needs at least two samples")
    if np.any(np.abs(z) == 0):
        raise ValueError("loop passes through zero at sample {}".format(
            int(np.argmin(np.abs(z)))))
    if abs(z[-1] - z[0]) > 1e-6 * max(1.0, abs(z[0])):
        raise ValueError("loop is not closed: {} != {}".format(z[0], z[-1]))
    phase = np.unwrap(np.angle(z))
    steps = np.abs(np.diff(phase))
    if steps.max() >= math.pi / 2:
        raise GridResolutionError(
            "phase step {:.3f} at sample {} is too large; refine the grid".format(
                steps.max(), int(np.argmax(steps))))
    return (phase[-1] - phase[0]) / (2 * math.pi)


def winding(samples):
    """Winding number of a closed loop around 0

    Raises
    ------
    NumericalModelError :
        if the total phase is more than ``winding_drift`` from an integer
    """
    total = phase_total(samples)
    n = int(round(total))
    if abs(total - n) > config.TOLERANCES.winding_drift:
        raise NumericalModelError("winding {:.9f} is not an integer".format(total))
    return n


###############################################################################
# GridFun
###############################################################################

class GridFun(object):
    """Samples of a function [0, 1] -> M_d at ``t_j = j / G``

    Parameters
    ----------
    values : array_like
        ``(G + 1, d, d)`` stack of samples
    vanish_at_0, vanish_at_1 : bool
        boundary conditions; flagged endpoints must have norm at most 1e-10
    func : callable, optional
        the sampled function, kept so that :meth:`refine` can resample
    """
    def __init__(self, values, vanish_at_0=False, vanish_at_1=False, func=None):
        values = np.asarray(values, dtype=complex)
        if values.ndim != 3 or values.shape[1] != values.shape[2] \
                or values.shape[0] < 2:
            raise ValueError("expected a (G + 1, d, d) stack, got shape "
                             "{}".format(values.shape))
        for flag, index in ((vanish_at_0, 0), (vanish_at_1, -1)):
            if flag and L.op_norm(values[index]) > ENDPOINT_TOL:
                raise ValueError("sample at t = {} does not vanish".format(
                    0 if index == 0 else 1))
        self.values = values
        self.vanish_at_0 = vanish_at_0
        self.vanish_at_1 = vanish_at_1
        self.func = func

    @classmethod
    def sample(cls, func, grid, vanish_at_0=False, vanish_at_1=False):
        t = np.arange(grid + 1) / grid
        return cls(np.array([L.as_cmat(func(tj)) for tj in t]),
                   vanish_at_0, vanish_at_1, func)

    @classmethod
    def constant(cls, M, grid):
        M = L.as_cmat(M)
        return cls.sample(lambda t: M, grid)

    @property
    def grid(self):
        return self.values.shape[0] - 1

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def t(self):
        return np.arange(self.grid + 1) / self.grid

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, j):
        return self.values[j]

    def at_one(self):
        """The quotient: evaluation at t = 1"""
        return self.values[-1]

    def refine(self):
        """Resample on the doubled grid"""
        if self.func is None:
            raise ValueError("only sampled functions can be refined")
        return GridFun.sample(self.func, 2 * self.grid, self.vanish_at_0,
                              self.vanish_at_1)

    def _check_grid(self, other):
        if other.values.shape != self.values.shape:
            raise ValueError("grid functions of shapes {} and {}".format(
                self.values.shape, other.values.shape))

    def __add__(self, other):
        if not isinstance(other, GridFun):
            other = GridFun.constant(complex(other) * np.eye(self.dim), self.grid)
        self._check_grid(other)
        return GridFun(self.values + other.values,
                       self.vanish_at_0 and other.vanish_at_0,
                       self.vanish_at_1 and other.vanish_at_1)

    __radd__ = __add__

    def __neg__(self):
        return GridFun(-self.values, self.vanish_at_0, self.vanish_at_1)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GridFun):
            return GridFun(complex(other) * self.values, self.vanish_at_0,
                           self.vanish_at_1)
        self._check_grid(other)
        return GridFun(self.values @ other.values,
                       self.vanish_at_0 or other.vanish_at_0,
                       self.vanish_at_1 or other.vanish_at_1)

    def __rmul__(self, other):
        return self * other

    def adjoint(self):
        return GridFun(np.conj(np.swapaxes(self.values, 1, 2)),
                       self.vanish_at_0, self.vanish_at_1)

    def map(self, func):
        """Apply a matrix function sample by sample"""
        return GridFun(np.array([L.as_cmat(func(M)) for M in self.values]))

    def funcalc(self, f):
        """Pointwise functional calculus of a self-adjoint grid function"""
        return self.map(lambda M: L.herm_funcalc(M, f))

    def determinants(self):
        return np.linalg.det(self.values)

    def norms(self):
        return np.linalg.norm(self.values, ord=2, axis=(1, 2))


class UnitaryLoop(object):
    """A grid function with unitary samples and ``u(0) = u(1) = 1``

    Raises
    ------
    NumericalModelError :
        if a sample is further than ``unitary_blowup`` from a unitary
    ValueError :
        if an endpoint is further than ``unitary`` from the identity
    """
    def __init__(self, u):
        one = np.eye(u.dim)
        gram = np.conj(np.swapaxes(u.values, 1, 2)) @ u.values - one
        residuals = np.linalg.norm(gram, ord=2, axis=(1, 2))
        self.residual = float(residuals.max())
        tols = config.TOLERANCES
        if self.residual > tols.unitary_blowup:
            raise NumericalModelError(
                "loop sample {} is not unitary (residual {:.3g})".format(
                    int(np.argmax(residuals)), self.residual))
        if self.residual > tols.unitary:
            warnings.warn("loop unitarity residual {:.3g} exceeds {:.1e}".format(
                self.residual, tols.unitary))
        gap = max(L.op_norm(u[0] - one), L.op_norm(u[-1] - one))
        if gap > tols.unitary:
            raise ValueError("loop does not start and end at the identity "
                             "(gap {:.3g})".format(gap))
        self.u = u

    @property
    def grid(self):
        return self.u.grid

    def determinants(self):
        return self.u.determinants()

    def phase_total(self):
        return phase_total(self.determinants())

    def winding(self):
        return winding(self.determinants())


###############################################################################
# Cone lift and exponential boundary
###############################################################################

def linear_profile(t):
    return t


class ConeLift(NamedTuple):
    """The lift ``h(t) = tau(t) h0``, ``k(t) = tau(t) k0``, ``x(t) = tau(t)
    x0`` of a qC representation into the cone over P"""
    h: GridFun
    k: GridFun
    x: GridFun
    tau: Callable

    @property
    def grid(self):
        return self.h.grid

    def rep_at(self, j):
        """The P representation at sample ``j``"""
        return Rep('P', {'h': self.h[j], 'k': self.k[j], 'x': self.x[j]})

    def projection(self):
        """``P(t) = [[1 - h(t), x(t)*], [x(t), k(t)]]``, a convex combination
        of ``diag(1, 0)`` and ``P0``"""
        d = self.h.dim
        one = np.eye(d)
        return GridFun(np.array([
            np.block([[one - h, L.adj(x)], [x, k]])
            for h, k, x in zip(self.h.values, self.k.values, self.x.values)]))

    def relation_residual(self):
        """Worst P relation residual over all samples"""
        return max(check_relations(self.rep_at(j)).worst_residual
                   for j in range(len(self.h)))

    def quotient(self):
        """Evaluation at t = 1, as a qC representation"""
        return Rep('qC', {'h0': self.h.at_one(), 'k0': self.k.at_one(),
                          'x0': self.x.at_one()})

    def refine(self):
        return ConeLift(self.h.refine(), self.k.refine(), self.x.refine(),
                        self.tau)


def cone_lift_qc(rep, grid=None, tau=None):
    """Lift a qC representation into the cone over P

    Parameters
    ----------
    rep : Rep
        representation of qC passing its relations at the factory tolerance
    grid : int, optional
        grid size G (default ``config.DEFAULT_GRID``)
    tau : callable, optional
        profile [0, 1] -> [0, 1] with ``tau(0) = 0`` and ``tau(1) = 1``;
        linear by default

    Raises
    ------
    RelationError :
        if the input fails the qC relations
    """
    if rep.presentation.name != 'qC':
        raise RelationError("cone lift needs a qC representation, got "
                            "{}".format(rep.presentation.name))
    report = check_relations(rep, config.TOLERANCES.factory)
    if not report.passed:
        raise RelationError(str(report))
    grid = grid or config.DEFAULT_GRID
    tau = tau or linear_profile
    if abs(tau(0)) > ENDPOINT_TOL or abs(tau(1) - 1) > ENDPOINT_TOL:
        raise ValueError("profile must run from 0 to 1")
    h0, k0, x0 = rep['h0'], rep['k0'], rep['x0']
    return ConeLift(GridFun.sample(lambda t: tau(t) * h0, grid, vanish_at_0=True),
                    GridFun.sample(lambda t: tau(t) * k0, grid, vanish_at_0=True),
                    GridFun.sample(lambda t: tau(t) * x0, grid, vanish_at_0=True),
                    tau)


def exp_formula(P):
    """``u = -1 + v11 + v12 + v21 + v22`` for ``v = exp(2 pi i P)``, with
    ``P`` a self-adjoint ``2d x 2d`` matrix"""
    v = L.herm_funcalc(P, 'exp2pii')
    d = v.shape[0] // 2
    return -np.eye(d) + v[:d, :d] + v[:d, d:] + v[d:, :d] + v[d:, d:]


class ExpResult(NamedTuple):
    """A boundary loop with its winding number

    ``trace`` is the unrounded phase total and ``grid`` the grid size the
    loop was finally sampled on.
    """
    loop: UnitaryLoop
    index: int
    trace: float
    grid: int
    lift: object


def _refining(make_loop, lift):
    while True:
        loop = make_loop(lift)
        try:
            total = loop.phase_total()
        except GridResolutionError:
            if lift.grid >= config.MAX_GRID:
                raise
            logger.info("phase steps too large at G = %d; doubling", lift.grid)
            lift = lift.refine()
            continue
        return ExpResult(loop, winding(loop.determinants()), total, lift.grid,
                         lift)


def _exp_loop_of_lift(lift):
    P = lift.projection()
    return UnitaryLoop(GridFun(np.array([exp_formula(M) for M in P.values])))


def exp_boundary_lift(lift):
    """The exponential boundary loop of a cone lift (see exp_boundary_u)"""
    result = _refining(_exp_loop_of_lift, lift)
    logger.debug("exponential boundary: G = %d, winding %.12f", result.grid,
                 result.trace)
    return result


def exp_boundary_u(rep, grid=None, tau=None):
    """The exponential boundary of a qC representation

    The loop ``u(t) = exp_formula(P(t))`` runs over the cone lift; its
    class is the winding number of ``det u``. The grid doubles (up to
    ``config.MAX_GRID``) while consecutive phase steps are too large.

    Returns
    -------
    result : ExpResult
    """
    return exp_boundary_lift(cone_lift_qc(rep, grid, tau))


def cone_lift_projection(p, grid=None, tau=None):
    """The cone element ``t -> tau(t) p`` (``tau`` linear by default)"""
    p = L.as_cmat(p)
    tau = tau or linear_profile
    if abs(tau(0)) > ENDPOINT_TOL or abs(tau(1) - 1) > ENDPOINT_TOL:
        raise ValueError("profile must run from 0 to 1")
    return GridFun.sample(lambda t: tau(t) * p, grid or config.DEFAULT_GRID,
                          vanish_at_0=True)


def exp_loop(p, grid=None):
    """The loop ``t -> exp(2 pi i t p)`` for a self-adjoint ``p``"""
    return _refining(lambda g: UnitaryLoop(g.funcalc('exp2pii')),
                     cone_lift_projection(p, grid))


def cone_cell_check(p, grid=256):
    """Both sides of the cone cell for a projection ``p`` in M_n

    Returns
    -------
    class_in, class_out : int
        ``rank(p)`` and the winding of ``det exp(2 pi i t p)``

    Raises
    ------
    RelationError :
        if p is not a projection
    """
    p = L.as_cmat(p)
    L.require_projection(p)
    class_in = int(round(np.trace(p).real))
    return class_in, exp_loop(p, grid).index


def eta1_generator_check(rep, grid=None):
    """Winding of the K_1 generator ``exp(2 pi i t l)`` pulled back along eta1

    ``rep`` is a CC representation; eta1 sends ``l`` to the projection
    ``q0``, so the winding equals ``rank(q0)``.

    Returns
    -------
    winding, rank : int
    """
    l = apply_genmap('eta1', rep)['l']
    return exp_loop(l, grid).index, L.rank(l)

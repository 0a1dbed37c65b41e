"""Boundary maps of cell diagrams

A cell diagram is an extension ``0 -> U -> P -> R -> 0`` with P
projective together with a map ``psi0: Q -> U``. The boundary of a class
of R is computed by lifting its representation into P, composing with
``psi0`` and reading the integer class of the resulting representation
of Q. Two concrete extension models are shipped: Toeplitz operators
(index map) and the cone grid (exponential map).
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict

import numpy as np

from . import config
from . import conegrid as C
from . import linalg as L
from . import toeplitz as T
from .errors import NumericalModelError, RelationError
from .report import Case, Report, run_case
from .reps import Rep, apply_genmap, check_relations, random_qc_rep

logger = logging.getLogger(__name__)

PERTURBATION_NORM = 0.3


###############################################################################
# Class pairings
###############################################################################

_TRACE_NAMES = {'G2st': ('h', 'k'), 'qC': ('h0', 'k0'), 'P': ('h', 'k')}


def trace_pairing(rep):
    """``tr k - tr h``: the trace of ``[P] - [diag(1, 0)]`` for a
    representation of G2st, qC or P"""
    try:
        h, k = _TRACE_NAMES[rep.presentation.name]
    except KeyError:
        raise ValueError("no trace pairing on {}".format(rep.presentation.name))
    return float(np.trace(rep[k] - rep[h]).real)


def _rounded(value, tol):
    n = int(round(value))
    if abs(value - n) > tol:
        raise NumericalModelError("class {:.12g} is not an integer".format(value))
    return n


def loop_class(reps):
    """Winding of ``det(1 + x)`` over a sampled loop of C0_01 representations"""
    dets = [np.linalg.det(np.eye(rep.dim) + rep['x']) for rep in reps]
    return C.winding(dets)


def _require_Q_rep(cell, rep):
    if rep.presentation.name != cell.ideal:
        raise ValueError("cell {} expects a {} representation, got {}".format(
            cell.name, cell.ideal, rep.presentation.name))
    if config.CHECK_MODE:
        report = check_relations(rep, config.TOLERANCES.pullback)
        if not report.passed:
            raise RelationError("not a representation of {}:\n{}".format(
                cell.ideal, report))


def class_of_Q_rep(cell, rep):
    """The integer class of a representation of the cell's Q

    Index cell: ``round(tr h - tr k)`` of a G2st representation. Cells with
    Q = C0_01: the winding of ``det(1 + x)`` over a loop, given as a
    sequence of C0_01 representations or a UnitaryLoop.

    In check mode every representation must pass the relations of Q at
    the pullback tolerance.

    Raises
    ------
    RelationError :
        if a representation fails the relations of Q
    NumericalModelError :
        if the rounding drift exceeds its tolerance
    """
    if isinstance(cell, str):
        cell = get_cell(cell)
    if cell.ideal == 'G2st':
        _require_Q_rep(cell, rep)
        return _rounded(-trace_pairing(rep), config.TOLERANCES.index_blowup)
    if isinstance(rep, C.UnitaryLoop):
        return rep.winding()
    reps = list(rep)
    for each in reps:
        _require_Q_rep(cell, each)
    return loop_class(reps)


###############################################################################
# Cell diagrams
###############################################################################

@dataclass(frozen=True)
class CellDiagram(object):
    """Descriptor of a cell ``0 -> U -> P -> R -> 0`` with ``psi0: Q -> U``

    Attributes
    ----------
    name : string
    quotient, projective, ideal : string
        registry names of R, P and Q
    parity : int
        i, so that the boundary runs K_i(R) -> K_{i+1}(Q)
    psi0 : callable
        the map into the ideal, on model elements
    xi : callable
        integer class of an R-side input
    lam : callable
        integer class of a Q-side output
    sign : int
        output class = sign * input class
    model : string
        name of the extension model the cell runs on
    convention : string
        human-readable record of the pairings and sign
    """
    name: str
    quotient: str
    projective: str
    ideal: str
    parity: int
    psi0: Callable
    xi: Callable
    lam: Callable
    sign: int
    model: str
    convention: str


def _projection_rank(p):
    return int(round(np.trace(L.as_cmat(p)).real))


CELLS = {
    'index': CellDiagram(
        'index', 'C0_01', 'D', 'G2st', 1, T.psi0_index,
        xi=lambda u: u.winding(),
        lam=lambda result: result.index,
        sign=-1, model='toeplitz',
        convention="index cell: class = tr h1 - tr k1 = Fredholm index of the "
                   "lift, so winding w maps to -w"),
    'exponential': CellDiagram(
        'exponential', 'qC', 'P', 'C0_01', 0, C.exp_formula,
        xi=lambda rep: _rounded(trace_pairing(rep), config.TOLERANCES.index_blowup),
        lam=lambda result: result.index,
        sign=1, model='cone-grid',
        convention="exponential cell: class = winding of det u, input class = "
                   "tr k0 - tr h0"),
    'cone': CellDiagram(
        'cone', 'M_n', 'ConeMn(n)', 'C0_01', 0,
        lambda M: L.herm_funcalc(M, 'exp2pii'),
        xi=_projection_rank,
        lam=lambda result: result.index,
        sign=1, model='cone-grid',
        convention="cone cell: input class = rank p, output = winding of "
                   "det exp(2 pi i t p)"),
}


def get_cell(name):
    try:
        return CELLS[name]
    except KeyError:
        raise KeyError("unknown cell {!r}; known: {}".format(
            name, ', '.join(sorted(CELLS))))


###############################################################################
# Extension models
###############################################################################

class ExtensionModel(object):
    """A concrete extension ``0 -> U -> A -> A/U -> 0``

    Subclasses provide ``lift`` (quotient element -> algebra element),
    ``quotient`` and ``ideal_residual`` (zero exactly on the ideal), plus
    the morphisms used by the invariance suite.
    """
    name = None

    def lift(self, cell, q):
        raise NotImplementedError()

    def quotient(self, a):
        raise NotImplementedError()

    def ideal_residual(self, a):
        raise NotImplementedError()

    def push(self, cell, a):
        """``psi0`` composed with a lift, valued in the ideal"""
        raise NotImplementedError()

    def contraction_lift(self, b):
        raise NotImplementedError()


class ToeplitzModel(ExtensionModel):
    """Toeplitz operators with Laurent polynomial symbols; the quotient is
    the symbol"""
    name = 'toeplitz'

    def lift(self, cell, u):
        return self.contraction_lift(T.toep(u))

    def quotient(self, a):
        return T.quotient_symbol(a)

    def ideal_residual(self, a):
        return max((float(np.abs(c).max()) for c in a.symbol.coeffs.values()),
                   default=0.0)

    def push(self, cell, a):
        return T.index_boundary(a.symbol, lift=a)

    def contraction_lift(self, b):
        """``a = b (1 + (b*b - 1)_+)^(-1/2)``

        Raises
        ------
        ValueError :
            if the symbol of ``b`` is not unitary
        """
        if not b.symbol.is_unitary():
            raise ValueError("contraction lift needs a unitary quotient")
        return b * (b.adjoint() * b).funcalc('inv_sqrt_shifted')

    def perturb(self, a, rng, norm=PERTURBATION_NORM, corner=2):
        """``a`` plus a random ideal element of the given norm"""
        n = corner * a.size
        K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return a + T.ToepOp.ideal(K * (norm / L.op_norm(K)), a.size)

    def amplify(self, u):
        """``u (+) 1`` in doubled block size"""
        return _direct_sum_symbol(u, u.size)

    def embed_corner(self, u):
        """``u (+) 1`` with one extra dimension"""
        return _direct_sum_symbol(u, 1)


def _direct_sum_symbol(u, extra):
    s = u.size + extra
    coeffs = {}
    for k, c in u.coeffs.items():
        block = np.zeros((s, s), dtype=complex)
        block[:u.size, :u.size] = c
        coeffs[k] = block
    pad = np.zeros((s, s), dtype=complex)
    pad[u.size:, u.size:] = np.eye(extra)
    coeffs[0] = coeffs.get(0, 0) + pad
    return T.LaurentPoly(coeffs, s)


class ConeGridModel(ExtensionModel):
    """Functions on the sampled interval; the quotient is evaluation at 1

    Parameters
    ----------
    grid : int, optional
        grid size G (default ``config.DEFAULT_GRID``)
    tau : callable, optional
        lift profile for the exponential cell
    """
    name = 'cone-grid'

    def __init__(self, grid=None, tau=None):
        self.grid = grid or config.DEFAULT_GRID
        self.tau = tau

    def lift(self, cell, q):
        if cell.name == 'exponential':
            return C.cone_lift_qc(q, self.grid, self.tau)
        return C.cone_lift_projection(q, self.grid, self.tau)

    def quotient(self, a):
        if isinstance(a, C.ConeLift):
            return a.quotient()
        return a.at_one()

    def ideal_residual(self, a):
        if isinstance(a, C.ConeLift):
            return max(L.op_norm(g.at_one()) for g in (a.h, a.k, a.x))
        return L.op_norm(a.at_one())

    def push(self, cell, a):
        if cell.name == 'exponential':
            return C.exp_boundary_lift(a)
        return C._refining(lambda g: C.UnitaryLoop(g.map(cell.psi0)), a)

    def contraction_lift(self, b):
        """Pointwise ``a = b (1 + (b*b - 1)_+)^(-1/2)`` of a grid function
        whose value at 1 is unitary"""
        if L.unitary_residual(b.at_one()) > config.TOLERANCES.unitary:
            raise ValueError("contraction lift needs a unitary quotient")
        return b * (b.adjoint() * b).funcalc('inv_sqrt_shifted')

    def amplify(self, q):
        """``q (x) e11``"""
        return q.pad(q.dim) if isinstance(q, Rep) else _pad(q, q.shape[0])

    def embed_corner(self, q):
        """The corner embedding ``M_d -> M_{d+1}``"""
        return q.pad(1) if isinstance(q, Rep) else _pad(q, 1)


def _pad(M, extra):
    M = L.as_cmat(M)
    n = M.shape[0]
    out = np.zeros((n + extra, n + extra), dtype=complex)
    out[:n, :n] = M
    return out


MODELS = {'toeplitz': ToeplitzModel, 'cone-grid': ConeGridModel}


###############################################################################
# Boundary map
###############################################################################

@dataclass
class BoundaryResult(object):
    """Input and output classes of one boundary computation

    ``output`` is the model's pushed element: an IndexResult (with its G2st
    representation) or an ExpResult (with its unitary loop).
    """
    cell: str
    input_class: int
    output: Any
    output_class: int
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def output_reps(self):
        """Representations of Q carried by the output"""
        if isinstance(self.output, T.IndexResult):
            return [self.output.rep]
        return [Rep('C0_01', {'x': u - np.eye(u.shape[0])})
                for u in self.output.loop.u.values]

    def relation_residual(self):
        return max(check_relations(rep).worst_residual
                   for rep in self.output_reps())

    @property
    def consistent(self):
        return self.output_class == get_cell(self.cell).sign * self.input_class


def boundary_map(cell, model, data, lift=None):
    """Boundary of an R-side input through a cell diagram

    Parameters
    ----------
    cell : CellDiagram or string
    model : ExtensionModel
    data :
        the input: a unitary LaurentPoly for the index cell, a qC
        representation for the exponential cell, a projection for the
        cone cell
    lift : optional
        a precomputed lift of ``data`` into the model

    Raises
    ------
    ValueError :
        if the model does not match the cell
    """
    if isinstance(cell, str):
        cell = get_cell(cell)
    if model.name != cell.model:
        raise ValueError("cell {} runs on the {} model, got {}".format(
            cell.name, cell.model, model.name))
    input_class = cell.xi(data)
    if lift is None:
        lift = model.lift(cell, data)
    output = model.push(cell, lift)
    output_class = cell.lam(output)
    diagnostics = {'trace': output.trace}
    if isinstance(output, T.IndexResult):
        diagnostics.update(drift=output.drift, corner=output.corner)
    else:
        diagnostics.update(grid=output.grid, unitarity=output.loop.residual,
                           ideal=model.ideal_residual(output.loop.u - 1))
    logger.debug("%s boundary: input %d, output %d", cell.name, input_class,
                 output_class)
    return BoundaryResult(cell.name, input_class, output, output_class,
                          diagnostics)


###############################################################################
# Invariance and composition
###############################################################################

def smooth_profile(t):
    """``sin^2(pi t / 2)``, an alternative cone lift profile"""
    return np.sin(np.pi * t / 2) ** 2


def _index_input(rng, trial):
    if trial % 2 == 0:
        w = int(rng.integers(-3, 4))
        phase = np.exp(2j * np.pi * rng.uniform())
        return T.LaurentPoly.monomial(w, 1, phase)
    r = int(rng.integers(1, 3))
    return T.LaurentPoly.bott(r, 2).conjugate_by(L.random_unitary(2, rng))


def _homotopic_input(cell, data, rng):
    """An input connected to ``data`` by a path of inputs"""
    if cell.name == 'index':
        V = L.random_unitary(data.size, rng)
        return data.conjugate_by(V) * np.exp(2j * np.pi * rng.uniform())
    if cell.name == 'exponential':
        return data.conjugate(L.random_unitary(data.dim, rng))
    U = L.random_unitary(data.shape[0], rng)
    return U @ data @ L.adj(U)


def _draw_input(cell, rng, trial, dim):
    if cell.name == 'index':
        return _index_input(rng, trial)
    if cell.name == 'exponential':
        return random_qc_rep(dim, rng)
    return L.random_projection(dim, int(rng.integers(0, dim + 1)), rng)


def _class_of(cell, model, data, lift=None):
    return boundary_map(cell, model, data, lift).output_class


def invariance_suite(cell, model=None, trials=50, seed=0, dim=4, grid=None):
    """Well-definedness and naturality of a cell's boundary class

    Every trial draws a seeded input and checks that the boundary class is
    unchanged by (a) a homotopic input, (b) a different lift, (c)
    amplification by ``e11`` and (d) the corner embedding ``M_d -> M_{d+1}``,
    besides the cell's sign convention on the input itself.

    Parameters
    ----------
    cell : CellDiagram or string
    model : ExtensionModel, optional
        defaults to a fresh instance of the cell's model
    trials, seed, dim : int
    grid : int, optional
        grid size for the cone-grid model

    Returns
    -------
    report : Report
    """
    if isinstance(cell, str):
        cell = get_cell(cell)
    if model is None:
        model = (ConeGridModel(grid) if cell.model == 'cone-grid'
                 else MODELS[cell.model]())
    convention = {'cell': cell.name, 'model': model.name, 'sign': cell.sign,
                  'pairing': cell.convention}
    alternative = None
    if isinstance(model, ConeGridModel):
        convention['grid'] = model.grid
        alternative = ConeGridModel(model.grid, smooth_profile)
    report = Report('invariance-' + cell.name, convention)

    for trial in range(trials):
        rng = L.make_rng(seed, trial)
        data = _draw_input(cell, rng, trial, dim)
        logger.debug("invariance trial %d of %s, seed %d", trial, cell.name, seed)
        base = {}

        def sign_check():
            result = boundary_map(cell, model, data)
            base['class'] = result.output_class
            return (abs(result.output_class - cell.sign * result.input_class),
                    'class {}'.format(result.output_class))

        def homotopy_check():
            moved = _homotopic_input(cell, data, rng)
            return abs(_class_of(cell, model, moved) - base['class'])

        def lift_check():
            if isinstance(model, ToeplitzModel):
                lift = model.contraction_lift(
                    model.perturb(model.lift(cell, data), rng))
                return abs(_class_of(cell, model, data, lift) - base['class'])
            return abs(_class_of(cell, alternative, data) - base['class'])

        def amplify_check():
            return abs(_class_of(cell, model, model.amplify(data)) - base['class'])

        def corner_check():
            return abs(_class_of(cell, model, model.embed_corner(data))
                       - base['class'])

        checks = [('sign', sign_check), ('homotopy', homotopy_check),
                  ('lift', lift_check), ('amplify', amplify_check),
                  ('corner', corner_check)]
        for label, check in checks:
            name = '{}/trial-{}/{}'.format(cell.name, trial, label)
            if label != 'sign' and 'class' not in base:
                report.add(Case(name, 'skip', seed=seed, stream=(trial,),
                                detail='sign check failed'))
                continue
            report.add(run_case(name, check, tol=0.0, seed=seed,
                                stream=(trial,)))
    return report


def composition_check(rep):
    """Classes of a G2st representation and of its lambda pullback

    Pulling back along lambda doubles the matrix size and preserves the
    trace pairing, so both integers agree.

    Returns
    -------
    class_g2st, class_qc : int
    """
    tol = config.TOLERANCES.index_blowup
    pulled = apply_genmap('lambda', rep)
    return (_rounded(trace_pairing(rep), tol),
            _rounded(trace_pairing(pulled), tol))

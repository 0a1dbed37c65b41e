"""Named verification suites

Every suite is a function ``(trials, dim, seed, grid, tol) -> Report``
registered under its command-line name with the :func:`suite` decorator.
Randomized suites draw trial ``i`` from ``make_rng(seed, i)``, so a run
is reproduced exactly by its seed; each case records the keys after the
seed (its ``stream``).
"""
import logging
import math

import numpy as np

from . import boundary as B
from . import config
from . import conegrid as C
from . import linalg as L
from . import reps as R
from . import symbolic as S
from . import toeplitz as T
from .report import Report, run_case

logger = logging.getLogger(__name__)

SUITES = {}

DEFAULTS = {'trials': 20, 'dim': 6, 'seed': 0, 'grid': config.DEFAULT_GRID}

HOMOTOPY_POINTS = 101


def suite(name, aliases=()):
    """Register a suite function under ``name`` (and any aliases)"""
    def _decorator(func):
        for key in (name,) + tuple(aliases):
            if key in SUITES:
                raise ValueError("suite {!r} is registered twice".format(key))
            SUITES[key] = func
        func.suite_name = name
        return func
    return _decorator


def suite_names():
    """Registered suite names in run order (aliases excluded)"""
    seen = []
    for func in SUITES.values():
        if func.suite_name not in seen:
            seen.append(func.suite_name)
    return seen


def run_suite(name, trials=None, dim=None, seed=None, grid=None, tol=None):
    """Run one suite, or every suite for ``name == 'all'``

    Unset options take the values in ``DEFAULTS``; ``tol`` overrides the
    suite's own tolerances.

    Raises
    ------
    KeyError :
        if the suite is unknown
    """
    options = dict(DEFAULTS)
    options.update({key: val for key, val in
                    dict(trials=trials, dim=dim, seed=seed, grid=grid).items()
                    if val is not None})
    if name == 'all':
        report = Report('all', {'seed': options['seed']})
        for each in suite_names():
            report.merge(run_suite(each, tol=tol, **options))
        return report.check()
    try:
        func = SUITES[name]
    except KeyError:
        raise KeyError("unknown suite {!r}; known: {}".format(
            name, ', '.join(suite_names() + ['all'])))
    logger.info("running suite %s with %s", name, options)
    return func(tol=tol, **options).check()


def _header(**extra):
    header = {'pairing': 'tr k - tr h', 'index_sign': -1, 'exp_sign': 1}
    header.update(extra)
    return header


def _tol(tol, default):
    return default if tol is None else tol


###############################################################################
# Symbolic suites
###############################################################################

def _identity_report(suite_name, filename, seed):
    report = Report(suite_name, {'rules': 'exact', 'source': filename})
    for identity in S.shipped_identities(filename):
        def check(identity=identity):
            result = identity.prove()
            if result:
                return 0.0
            return 1.0, 'reduces to {}'.format(result.difference)
        name = '{}:{} {}'.format(filename, identity.line, identity.source)
        report.add(run_case(name, check, tol=0.0, seed=None))
    return report


@suite('ideal-identities')
def ideal_identities(trials, dim, seed, grid, tol=None):
    """The image of theta is an ideal, and l - p lies in it"""
    return _identity_report('ideal-identities', 'ideal', seed)


@suite('block-identities')
def block_identities(trials, dim, seed, grid, tol=None):
    """The block identities behind theta, theta0 and lambda"""
    return _identity_report('block-identities', 'block', seed)


###############################################################################
# Homotopies and generator maps
###############################################################################

def _id_plus_eta(rep):
    h, k, x = rep['h'], rep['k'], rep['x']
    zero = np.zeros_like(h)
    return R.Rep('G2st', {'h': np.block([[h, zero], [zero, k]]),
                          'k': np.block([[k, zero], [zero, h]]),
                          'x': np.block([[x, zero], [zero, L.adj(x)]])})


@suite('homotopy-null')
def homotopy_null(trials, dim, seed, grid, tol=None):
    """The two-segment null-homotopy of ``id + eta`` on factory G2st reps"""
    relation_tol = _tol(tol, 1e-7 * math.sqrt(dim))
    report = Report('homotopy-null', _header(dim=dim, points=HOMOTOPY_POINTS))
    clock = np.linspace(0, 2, HOMOTOPY_POINTS)
    for i in range(trials):
        rep = R.random_g2st_rep(dim, L.make_rng(seed, i))
        prefix = 'trial-{}/'.format(i)

        def relations(rep=rep):
            return max(R.check_relations(R.null_homotopy_at(rep, s)).worst_residual
                       for s in clock)

        def start(rep=rep):
            return R.null_homotopy_at(rep, 0.0).distance(_id_plus_eta(rep))

        def end(rep=rep):
            at_end = R.null_homotopy_at(rep, 2.0)
            return at_end.distance(R.Rep.zero('G2st', at_end.dim))

        stream = (i,)
        report.add(run_case(prefix + 'relations', relations, relation_tol,
                            seed, stream))
        report.add(run_case(prefix + 'junction',
                            lambda rep=rep: R.null_homotopy_junction_gap(rep),
                            _tol(tol, 1e-8), seed, stream))
        report.add(run_case(prefix + 'start', start, _tol(tol, 1e-10), seed,
                            stream))
        report.add(run_case(prefix + 'end', end, _tol(tol, 1e-12), seed, stream))
    return report


@suite('homotopy-lambda-rho')
def homotopy_lambda_rho(trials, dim, seed, grid, tol=None):
    """``lambda rho`` is homotopic to ``id (x) e11``, on G2st and on qC"""
    report = Report('homotopy-lambda-rho',
                    _header(dim=dim, points=HOMOTOPY_POINTS,
                            path='w_t = sin(pi t/2) e11 + cos(pi t/2) e21'))
    clock = np.linspace(0, 1, HOMOTOPY_POINTS)
    for i in range(trials):
        rng = L.make_rng(seed, i)
        g2st = R.random_g2st_rep(dim, rng)
        qc = R.random_qc_rep(dim, rng)
        starts = {
            'G2st': R.apply_genmap('rho', R.apply_genmap('lambda', g2st)),
            'qC': R.apply_genmap('lambda_rho_q', qc),
        }
        ends = {'G2st': R.apply_genmap('amplify', g2st), 'qC': qc.pad(qc.dim)}
        for rep in (g2st, qc):
            key = rep.presentation.name
            prefix = 'trial-{}/{}/'.format(i, key)

            def relations(rep=rep):
                return max(R.check_relations(
                    R.lambda_rho_homotopy_at(rep, t)).worst_residual
                    for t in clock)

            report.add(run_case(prefix + 'relations', relations,
                                _tol(tol, 1e-8), seed, (i,)))
            report.add(run_case(
                prefix + 'start',
                lambda rep=rep, key=key: R.lambda_rho_homotopy_at(rep, 0.0)
                .distance(starts[key]), _tol(tol, 1e-10), seed, (i,)))
            report.add(run_case(
                prefix + 'end',
                lambda rep=rep, key=key: R.lambda_rho_homotopy_at(rep, 1.0)
                .distance(ends[key]), _tol(tol, 1e-10), seed, (i,)))
    return report


@suite('unitization-iso')
def unitization_iso(trials, dim, seed, grid, tol=None):
    """G2nc and the unitized G2st correspond through ``a = 1 - h``"""
    report = Report('unitization-iso', _header(dim=dim))
    for name in ('unitization', 'unitization_inverse'):
        for cert in R.certify_genmap(name, trials=min(trials, 10), seed=seed,
                                     dim=dim):
            report.add(run_case(
                '{}/{}'.format(name, cert.relation),
                lambda cert=cert: (cert.residual, cert.status),
                _tol(tol, 1e-8), seed))
    for i in range(trials):
        rng = L.make_rng(seed, i)
        g2st = R.random_g2st_rep(dim, rng)
        g2nc = R.random_rep('G2nc', dim, rng)

        def from_g2st(rep=g2st):
            there = R.apply_genmap('unitization', rep)
            return R.apply_genmap('unitization_inverse', there).distance(rep)

        def from_g2nc(rep=g2nc):
            there = R.apply_genmap('unitization_inverse', rep)
            return R.apply_genmap('unitization', there).distance(rep)

        report.add(run_case('trial-{}/G2st-round-trip'.format(i), from_g2st,
                            _tol(tol, 1e-12), seed, (i,)))
        report.add(run_case('trial-{}/G2nc-round-trip'.format(i), from_g2nc,
                            _tol(tol, 1e-12), seed, (i,)))
    return report


###############################################################################
# Boundary cells
###############################################################################

def _index_inputs():
    inputs = [('z^{}'.format(w), T.LaurentPoly.monomial(w)) for w in range(-3, 4)]
    inputs += [('bott({}, 2)'.format(r), T.LaurentPoly.bott(r, 2)) for r in (1, 2)]
    return inputs


@suite('index-cell')
def index_cell(trials, dim, seed, grid, tol=None):
    """The index boundary on monomials and Bott loops against the Fredholm
    oracle"""
    cell = B.get_cell('index')
    model = B.ToeplitzModel()
    report = Report('index-cell', _header(cell='index', model=model.name,
                                          convention=cell.convention))
    for label, u in _index_inputs():
        results = {}

        def sign(u=u, results=results):
            result = B.boundary_map(cell, model, u)
            results['result'] = result
            return (abs(result.output_class - cell.sign * result.input_class),
                    'class {}'.format(result.output_class))

        report.add(run_case(label + '/sign', sign, 0.0, None))
        if 'result' not in results:
            continue
        result = results['result']
        report.add(run_case(
            label + '/oracle',
            lambda u=u, result=result: abs(T.fredholm_oracle(u) - result.output_class),
            0.0, None))
        report.add(run_case(label + '/drift',
                            lambda result=result: result.output.drift,
                            _tol(tol, config.TOLERANCES.index_drift), None))
        report.add(run_case(label + '/relations',
                            lambda result=result: result.relation_residual(),
                            _tol(tol, config.TOLERANCES.pullback), None))
    return report


@suite('exp-cell')
def exp_cell(trials, dim, seed, grid, tol=None):
    """The exponential boundary of factory qC representations"""
    cell = B.get_cell('exponential')
    model = B.ConeGridModel(grid)
    report = Report('exp-cell', _header(cell='exponential', model=model.name,
                                        grid=grid, dim=dim,
                                        convention=cell.convention))
    zero = np.zeros((dim, dim), dtype=complex)
    p = L.random_projection(dim, min(2, dim), L.make_rng(seed, 0, 0))
    inputs = [('zero', R.Rep.zero('qC', dim), None, ()),
              ('rank-2', R.qc_rep_from_projections(zero, p), seed, (0, 0))]
    inputs += [('trial-{}'.format(i), R.random_qc_rep(dim, L.make_rng(seed, i)),
                seed, (i,)) for i in range(trials)]
    for label, rep, case_seed, stream in inputs:
        results = {}

        def sign(rep=rep, results=results):
            result = B.boundary_map(cell, model, rep)
            results['result'] = result
            return (abs(result.output_class - cell.sign * result.input_class),
                    'class {}'.format(result.output_class))

        report.add(run_case(label + '/sign', sign, 0.0, case_seed, stream))
        if 'result' not in results:
            continue
        out = results['result'].output
        report.add(run_case(label + '/unitarity', lambda out=out: out.loop.residual,
                            _tol(tol, config.TOLERANCES.unitary), case_seed,
                            stream))
        report.add(run_case(label + '/drift',
                            lambda out=out: abs(out.trace - out.index),
                            _tol(tol, config.TOLERANCES.winding_drift),
                            case_seed, stream))
        report.add(run_case(
            label + '/refined',
            lambda out=out: abs(C.exp_boundary_lift(out.lift.refine()).index
                                - out.index),
            0.0, case_seed, stream))
    for i in range(min(trials, 10)):
        cc = R.random_rep('CC', dim, L.make_rng(seed, i, 1))

        def eta1(cc=cc):
            winding, rank = C.eta1_generator_check(cc, grid)
            return abs(winding - rank), 'winding {}'.format(winding)

        report.add(run_case('eta1/trial-{}'.format(i), eta1, 0.0, seed,
                            (i, 1)))
    return report


@suite('cone-cell')
def cone_cell(trials, dim, seed, grid, tol=None):
    """``exp(2 pi i t p)`` winds ``rank p`` times, for every rank up to 6"""
    report = Report('cone-cell', _header(cell='cone', grid=grid))
    for n in range(1, min(dim, 6) + 1):
        for r in range(n + 1):
            rng = L.make_rng(seed, n, r)
            p = L.random_projection(n, r, rng)

            def check(p=p, r=r):
                class_in, class_out = C.cone_cell_check(p, grid)
                return (abs(class_in - r) + abs(class_out - class_in),
                        'class {}'.format(class_out))

            report.add(run_case('M_{}/rank-{}'.format(n, r), check, 0.0, seed,
                                (n, r)))
    return report


###############################################################################
# Exactness and stability
###############################################################################

@suite('exactness-reconstruction')
def exactness_reconstruction(trials, dim, seed, grid, tol=None):
    """Every P representation extends along theta"""
    report = Report('exactness-reconstruction',
                    _header(dim=dim, support_cutoff=config.TOLERANCES.support_cutoff))
    tol_ = _tol(tol, 1e-7)
    for i in range(trials):
        rng = L.make_rng(seed, i)
        rep = R.random_p_rep(dim, rng)
        p = L.random_projection(dim, int(rng.integers(0, dim + 1)), rng)
        contraction = L.random_contraction(dim, rng, positive=True)
        prefix = 'trial-{}/'.format(i)

        def round_trip(rep=rep):
            extension = R.reconstruct_extension(rep, tol_)
            return extension.residual

        def spectrum(rep=rep):
            extension = R.reconstruct_extension(rep, tol_)
            return L.spectral_interval_residual(extension.l_hat)

        stream = (i,)
        report.add(run_case(prefix + 'round-trip', round_trip, tol_, seed,
                            stream))
        report.add(run_case(prefix + 'spectrum', spectrum, tol_, seed, stream))
        report.add(run_case(
            prefix + 'support',
            lambda rep=rep: max(R.support_identities(rep).values()), tol_,
            seed, stream))
        report.add(run_case(
            prefix + 'quotient-generator',
            lambda p=p, l=contraction: R.quotient_generator_check(p, l),
            _tol(tol, 1e-9), seed, stream))
    return report


@suite('stability', aliases=('invariance',))
def stability(trials, dim, seed, grid, tol=None):
    """Invariance of every cell's boundary class, and the lambda composition"""
    report = Report('stability', _header(dim=dim, grid=grid, trials=trials))
    for name in B.CELLS:
        report.merge(B.invariance_suite(name, trials=trials, seed=seed,
                                        dim=min(dim, 4), grid=grid))
    for i in range(trials):
        rep = R.random_g2st_rep(dim, L.make_rng(seed, i, 2))

        def composition(rep=rep):
            class_g2st, class_qc = B.composition_check(rep)
            return abs(class_g2st - class_qc), 'class {}'.format(class_g2st)

        report.add(run_case('composition/trial-{}'.format(i), composition, 0.0,
                            seed, (i, 2)))
    return report

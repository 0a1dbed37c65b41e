"""The ``nccell`` command line

Exit status is 0 when every case passes, 1 when a case fails (or an input
file is rejected) and 2 on a usage error.
"""
import argparse
import logging
import sys

import numpy as np

from . import boundary as B
from . import conegrid as C
from . import linalg as L
from . import presentations
from . import reps as R
from . import symbolic as S
from . import toeplitz as T
from .errors import NCCellError
from .report import Report, run_case
from .suites import run_suite, suite_names

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """A command line that parses but cannot be run"""


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--trials', type=int, default=None,
                        help="randomized trials per suite (default 20)")
    common.add_argument('--dim', type=int, default=None,
                        help="matrix size of factory representations (default 6)")
    common.add_argument('--tol', type=float, default=None,
                        help="override the per-suite tolerances")
    common.add_argument('--grid', type=int, default=None,
                        help="cone grid size G (default 512)")
    common.add_argument('--seed', type=int, default=0,
                        help="seed of all randomized checks (default 0)")
    common.add_argument('--json', metavar='PATH', default=None,
                        help="also write the JSON report to PATH")
    common.add_argument('-v', '--verbose', action='store_true',
                        help="log at DEBUG level")
    return common


def build_parser():
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog='nccell',
        description="Presentations, identities and K-theory boundary maps "
                    "of noncommutative cells")
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    parse = commands.add_parser('parse', parents=[common],
                                help="parse a presentation file and echo it")
    parse.add_argument('path')

    registry = commands.add_parser('registry', parents=[common],
                                   help="print a built-in presentation")
    registry.add_argument('name', help=', '.join(presentations.registry_names()))

    prove = commands.add_parser('prove', parents=[common],
                                help="prove the identities of a .nci file")
    prove.add_argument('path')

    verify = commands.add_parser('verify', parents=[common],
                                 help="run a verification suite")
    verify.add_argument('suite', help=', '.join(suite_names() + ['all']))

    boundary = commands.add_parser('boundary',
                                   help="compute one boundary class")
    cells = boundary.add_subparsers(dest='cell', metavar='CELL')
    cells.required = True
    index = cells.add_parser('index', parents=[common],
                             help="index map of a unitary Laurent symbol")
    index.add_argument('--symbol', required=True,
                       help="symbol such as 'z^2' or 'bott(1, 2)'")
    exp = cells.add_parser('exp', parents=[common],
                           help="exponential map of the qC rep (0, p, 0)")
    exp.add_argument('--rank', type=int, required=True)
    cone = cells.add_parser('cone', parents=[common],
                            help="cone cell for a projection in M_n")
    cone.add_argument('--rank', type=int, required=True)
    return parser


def _read(path):
    try:
        with open(path, encoding='utf-8') as f:
            return f.read()
    except OSError as err:
        raise UsageError("cannot read {}: {}".format(path, err))


def _dim(args):
    return args.dim if args.dim is not None else 6


def cmd_parse(args):
    presentation = presentations.parse_presentation(_read(args.path))
    print(presentations.print_presentation(presentation))
    return None


def cmd_registry(args):
    try:
        presentation = presentations.registry_get(args.name)
    except (KeyError, ValueError) as err:
        raise UsageError(err.args[0])
    print(presentations.print_presentation(presentation))
    return None


def cmd_prove(args):
    identities = S.load_identities(_read(args.path))
    report = Report('prove', {'source': args.path, 'rules': 'exact'})
    for identity in identities:
        def check(identity=identity):
            result = identity.prove()
            if result:
                return 0.0
            return 1.0, 'reduces to {}'.format(result.difference)
        report.add(run_case('{}:{} {}'.format(args.path, identity.line,
                                              identity.source), check))
    return report


def cmd_verify(args):
    try:
        return run_suite(args.suite, trials=args.trials, dim=args.dim,
                         seed=args.seed, grid=args.grid, tol=args.tol)
    except KeyError as err:
        raise UsageError(err.args[0])


def _boundary_report(cell, check, extra=()):
    report = Report('boundary-' + cell.name,
                    dict({'cell': cell.name, 'sign': cell.sign,
                          'convention': cell.convention}, **dict(extra)))
    report.add(run_case('class', check))
    return report


def cmd_boundary(args):
    cell = B.get_cell({'exp': 'exponential'}.get(args.cell, args.cell))
    rng = L.make_rng(args.seed)
    if cell.name == 'index':
        try:
            u = T.parse_symbol(args.symbol)
        except NCCellError as err:
            raise UsageError(str(err))

        def check():
            result = B.boundary_map(cell, B.ToeplitzModel(), u)
            oracle = T.fredholm_oracle(u)
            return (abs(result.output_class - cell.sign * result.input_class)
                    + abs(result.output_class - oracle),
                    'class {} (winding {}, oracle {})'.format(
                        result.output_class, result.input_class, oracle))
        return _boundary_report(cell, check, {'symbol': str(u)})

    dim = _dim(args)
    if not 0 <= args.rank <= dim:
        raise UsageError("rank {} out of range for dimension {}".format(
            args.rank, dim))
    p = L.random_projection(dim, args.rank, rng)
    grid = args.grid
    if cell.name == 'exponential':
        rep = R.qc_rep_from_projections(np.zeros((dim, dim)), p)

        def check():
            result = B.boundary_map(cell, B.ConeGridModel(grid), rep)
            return (abs(result.output_class - cell.sign * result.input_class),
                    'class {} (rank {}, G = {})'.format(
                        result.output_class, args.rank, result.diagnostics['grid']))
    else:
        def check():
            class_in, class_out = C.cone_cell_check(p, grid)
            return (abs(class_out - class_in),
                    'class {} (rank {})'.format(class_out, class_in))
    return _boundary_report(cell, check, {'dim': dim, 'rank': args.rank})


COMMANDS = {'parse': cmd_parse, 'registry': cmd_registry, 'prove': cmd_prove,
            'verify': cmd_verify, 'boundary': cmd_boundary}


def configure_logging(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s',
                        stream=sys.stderr)
    logging.captureWarnings(True)


def run(argv=None):
    """Run a command line; return the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        report = COMMANDS[args.command](args)
    except UsageError as err:
        print("nccell: error: {}".format(err), file=sys.stderr)
        return EXIT_USAGE
    except NCCellError as err:
        print("nccell: {}".format(err), file=sys.stderr)
        return EXIT_FAIL
    if report is None:
        return EXIT_OK
    print(report.to_text())
    if args.json:
        with open(args.json, 'w', encoding='utf-8') as f:
            f.write(report.to_json(validate=True))
            f.write('\n')
        logger.info("wrote %s", args.json)
    return EXIT_OK if report.passed else EXIT_FAIL


def main():
    sys.exit(run())

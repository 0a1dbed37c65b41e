"""Global switches and numeric tolerances"""
import contextlib
from dataclasses import dataclass


# If CHECK_MODE is True, factory representations and reports are checked
# against their relations (or JSON schema) when they are created. This
# costs a few eigendecompositions per object, but failures then point at
# the call that produced the bad object instead of a later consumer.
CHECK_MODE = True


def enable_check_mode():
    global CHECK_MODE
    CHECK_MODE = True


def disable_check_mode():
    global CHECK_MODE
    CHECK_MODE = False


@contextlib.contextmanager
def check_mode(arg):
    global CHECK_MODE
    original = CHECK_MODE
    CHECK_MODE = arg
    try:
        yield
    finally:
        CHECK_MODE = original


@dataclass(frozen=True)
class Tolerances(object):
    """Numeric tolerances shared by the numeric modules

    Attributes
    ----------
    hermitian : float
        allowed ``|H - H*|`` (relative to ``max(1, |H|)``) before a matrix
        is refused as non-Hermitian.
    sqrt_clamp : float
        eigenvalues down to ``-sqrt_clamp`` are clamped to zero by
        ``sqrt_clamped``.
    projection : float
        residual allowed for input projections and positive contractions.
    factory : float
        relation tolerance for factory representations.
    pullback : float
        relation tolerance for pulled-back representations.
    support_cutoff : float
        relative eigenvalue cutoff for spectral support projections.
    rank_cutoff : float
        singular value cutoff used by rank counts.
    unitary : float
        unitarity residual allowed for symbols and loops.
    unitary_blowup : float
        unitarity residual that signals a misused formula.
    index_drift : float
        allowed distance of a trace pairing from the nearest integer.
    index_blowup : float
        drift that signals a broken model.
    winding_drift : float
        allowed distance of a winding number from the nearest integer.
    """
    hermitian: float = 1e-10
    sqrt_clamp: float = 1e-8
    projection: float = 1e-10
    factory: float = 1e-9
    pullback: float = 1e-7
    support_cutoff: float = 1e-8
    rank_cutoff: float = 1e-8
    unitary: float = 1e-8
    unitary_blowup: float = 1e-6
    index_drift: float = 1e-9
    index_blowup: float = 1e-6
    winding_drift: float = 1e-6


TOLERANCES = Tolerances()

DEFAULT_GRID = 512
MAX_GRID = 2 ** 15
CIRCLE_SAMPLES = 256

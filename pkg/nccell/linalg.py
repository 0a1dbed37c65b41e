"""Dense complex matrix kernel

Hermitian eigendecomposition and functional calculus, norms, rank counts
and seeded random inputs for the representation factories. Matrices are
plain complex ``numpy`` arrays; every function returns a new array.
"""
import logging
from typing import NamedTuple

import numpy as np
from scipy import linalg as sla
from scipy.stats import unitary_group

from . import config
from .errors import NumericalModelError, RelationError

logger = logging.getLogger(__name__)


def as_cmat(M):
    """Convert to a 2d complex array, refusing NaN and Inf entries"""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2:
        raise ValueError("expected a matrix, got shape {}".format(M.shape))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def adj(M):
    return M.conj().T


def matrix_unit(i, j, n=2):
    """The n x n matrix unit e_ij (0-based)"""
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def op_norm(M):
    """Operator norm (largest singular value)"""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(sla.svdvals(M)[0])


def rank(M, cutoff=None):
    """Number of singular values above ``cutoff``"""
    if cutoff is None:
        cutoff = config.TOLERANCES.rank_cutoff
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return int(np.sum(sla.svdvals(M) > cutoff))


###############################################################################
# Functional calculus
###############################################################################

class HermEig(NamedTuple):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix"""
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self, values=None):
        values = self.values if values is None else values
        return (self.vectors * values) @ adj(self.vectors)


def hermitian_residual(H):
    return op_norm(H - adj(H))


def herm_eig(H, tol=None):
    """Eigendecomposition of a (numerically) Hermitian matrix

    Raises
    ------
    ValueError :
        if ``|H - H*| > tol * max(1, |H|)``
    """
    if tol is None:
        tol = config.TOLERANCES.hermitian
    H = as_cmat(H)
    scale = max(1.0, op_norm(H))
    residual = hermitian_residual(H)
    if residual > tol * scale:
        raise ValueError("matrix is not Hermitian: |H - H*| = {:.3g}".format(
            residual))
    values, vectors = np.linalg.eigh((H + adj(H)) / 2)
    return HermEig(values, vectors)


def _sqrt_clamped(values, scale):
    floor = -config.TOLERANCES.sqrt_clamp * scale
    if values.size and values.min() < floor:
        raise NumericalModelError(
            "sqrt of a matrix with eigenvalue {:.3g} below the clamp "
            "window".format(values.min()))
    return np.sqrt(np.clip(values, 0, None))


FUNCTIONS = {
    'sqrt_clamped': _sqrt_clamped,
    'pos_part': lambda t, scale: np.clip(t, 0, None),
    'exp2pii': lambda t, scale: np.exp(2j * np.pi * t),
    'inv_sqrt_shifted': lambda t, scale: (1 + np.clip(t - 1, 0, None)) ** -0.5,
}


def herm_funcalc(H, f):
    """Apply a function to a Hermitian matrix through its eigenvalues

    Parameters
    ----------
    H : array_like
        self-adjoint matrix (within the hermitian tolerance)
    f : string or callable
        one of ``sqrt_clamped`` (eigenvalues in the clamp window below zero
        are set to zero), ``pos_part``, ``exp2pii`` (t -> exp(2 pi i t)) and
        ``inv_sqrt_shifted`` (t -> (1 + max(t - 1, 0))^(-1/2)), or a
        vectorized function of the eigenvalues

    Returns
    -------
    result : ndarray
        ``U diag(f(values)) U*``
    """
    eig = herm_eig(H)
    if callable(f):
        values = f(eig.values)
    else:
        try:
            func = FUNCTIONS[f]
        except KeyError:
            raise ValueError("unknown function tag {!r}".format(f))
        values = func(eig.values, max(1.0, np.abs(eig.values).max(initial=0)))
    return eig.reconstruct(values.astype(complex))


def sqrtm_psd(H):
    return herm_funcalc(H, 'sqrt_clamped')


def support_projection(H, cutoff=None):
    """Spectral projection of a positive matrix onto eigenvalues above
    ``cutoff * |H|``"""
    if cutoff is None:
        cutoff = config.TOLERANCES.support_cutoff
    eig = herm_eig(H)
    norm = np.abs(eig.values).max(initial=0)
    mask = eig.values > cutoff * norm if norm else np.zeros_like(eig.values, bool)
    return eig.reconstruct(mask.astype(complex))


###############################################################################
# Residuals
###############################################################################

def spectral_interval_residual(A, low=0.0, high=1.0):
    """Distance of a self-adjoint matrix from having spectrum in [low, high]

    The non-Hermitian part counts toward the residual.
    """
    A = as_cmat(A)
    herm = (A + adj(A)) / 2
    values = np.linalg.eigvalsh(herm)
    residual = max(0.0, low - values[0], values[-1] - high) if values.size else 0.0
    return max(residual, hermitian_residual(A))


def projection_residual(P):
    P = as_cmat(P)
    return max(op_norm(P @ P - P), hermitian_residual(P))


def unitary_residual(U):
    U = as_cmat(U)
    one = np.eye(U.shape[0])
    return max(op_norm(adj(U) @ U - one), op_norm(U @ adj(U) - one))


def require_projection(P, name='p', tol=None):
    if tol is None:
        tol = config.TOLERANCES.projection
    residual = projection_residual(P)
    if residual > tol:
        raise RelationError("{} is not a projection (residual {:.3g})".format(
            name, residual))


def require_positive_contraction(A, name='l', tol=None):
    if tol is None:
        tol = config.TOLERANCES.projection
    residual = spectral_interval_residual(A)
    if residual > tol:
        raise RelationError("{} is not a positive contraction (residual "
                            "{:.3g})".format(name, residual))


###############################################################################
# Seeded random inputs
###############################################################################

def make_rng(seed, *stream):
    """A counter-based generator keyed by ``seed`` and a stream path

    Streams with different paths are independent, so trial ``i`` of a
    suite can draw from ``make_rng(seed, i)`` regardless of run order.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(sequence))


def as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    logger.debug("drawing with seed %s", seed)
    return make_rng(seed)


def random_unitary(d, seed):
    rng = as_rng(seed)
    if d == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_hermitian(d, seed, scale=1.0):
    rng = as_rng(seed)
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (G + adj(G)) / 2


def random_projection(d, r, seed):
    """A projection of rank ``r`` in M_d, uniformly rotated

    Raises
    ------
    ValueError :
        if r is not in [0, d]
    """
    if not 0 <= r <= d:
        raise ValueError("rank {} out of range for dimension {}".format(r, d))
    if r == 0:
        return np.zeros((d, d), dtype=complex)
    if r == d:
        return np.eye(d, dtype=complex)
    V = random_unitary(d, seed)[:, :r]
    P = V @ adj(V)
    P = (P + adj(P)) / 2
    if config.CHECK_MODE:
        require_projection(P)
    return P


def random_contraction(d, seed, positive=False):
    """A random contraction in M_d

    With ``positive`` the result is self-adjoint with eigenvalues drawn
    uniformly from [0, 1]; otherwise a complex Gaussian matrix rescaled to
    a norm drawn uniformly from (0, 1].
    """
    if d < 1:
        raise ValueError("dimension must be positive, got {}".format(d))
    rng = as_rng(seed)
    if positive:
        U = random_unitary(d, rng)
        values = np.clip(rng.uniform(0, 1, size=d), 0, 1)
        A = (U * values) @ adj(U)
        return (A + adj(A)) / 2
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    scale = 1 - rng.uniform()
    return G * (scale / op_norm(G))

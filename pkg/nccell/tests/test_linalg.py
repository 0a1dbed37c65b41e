import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from .. import linalg as L
from ..errors import NumericalModelError, RelationError


def test_as_cmat_rejects_nonfinite():
    with pytest.raises(ValueError):
        L.as_cmat([[1, np.nan], [0, 1]])
    assert L.as_cmat(2.0).shape == (1, 1)


def test_norm_and_rank():
    M = np.diag([3.0, 1e-12, 0.5])
    assert L.op_norm(M) == pytest.approx(3.0)
    assert L.rank(M) == 2
    assert L.rank(np.zeros((0, 0))) == 0
    assert L.op_norm(np.zeros((0, 0))) == 0.0


def test_herm_eig_refuses_non_hermitian():
    with pytest.raises(ValueError):
        L.herm_eig(np.array([[0, 1], [0, 0]]))


def test_herm_eig_reconstructs():
    H = L.random_hermitian(5, 3)
    eig = L.herm_eig(H)
    assert np.all(np.diff(eig.values) >= 0)
    np.testing.assert_allclose(eig.reconstruct(), H, atol=1e-12)


def test_funcalc_tags():
    p = L.random_projection(4, 2, 0)
    np.testing.assert_allclose(L.herm_funcalc(p, 'exp2pii'), np.eye(4),
                               atol=1e-12)
    np.testing.assert_allclose(L.herm_funcalc(np.diag([-2.0, 3.0]), 'pos_part'),
                               np.diag([0.0, 3.0]))
    np.testing.assert_allclose(
        L.herm_funcalc(np.diag([0.5, 4.0]), 'inv_sqrt_shifted'),
        np.diag([1.0, 0.5]))
    np.testing.assert_allclose(L.herm_funcalc(np.diag([1.0, 4.0]), np.square),
                               np.diag([1.0, 16.0]))
    with pytest.raises(ValueError):
        L.herm_funcalc(p, 'cube')


def test_sqrt_clamp_window():
    np.testing.assert_allclose(L.sqrtm_psd(np.diag([-1e-12, 4.0])),
                               np.diag([0.0, 2.0]))
    with pytest.raises(NumericalModelError):
        L.sqrtm_psd(np.diag([-1.0, 1.0]))


def test_support_projection():
    H = np.diag([0.5, 0.0, 1e-12])
    np.testing.assert_allclose(L.support_projection(H), np.diag([1.0, 0, 0]))
    np.testing.assert_allclose(L.support_projection(np.zeros((2, 2))),
                               np.zeros((2, 2)))


def test_residuals():
    assert L.spectral_interval_residual(np.diag([-0.25, 0.5])) == pytest.approx(0.25)
    assert L.spectral_interval_residual(np.diag([0.0, 1.5])) == pytest.approx(0.5)
    assert L.projection_residual(np.diag([1.0, 0.0])) == 0.0
    assert L.unitary_residual(np.array([[0, 1j], [1, 0]])) == pytest.approx(0.0)


def test_require_checks():
    with pytest.raises(RelationError):
        L.require_projection(np.diag([0.5, 1.0]))
    with pytest.raises(RelationError):
        L.require_positive_contraction(np.diag([-0.5, 1.0]))
    L.require_positive_contraction(np.diag([0.0, 0.25, 1.0]))


def test_make_rng_streams():
    a = L.make_rng(7, 1).standard_normal(4)
    b = L.make_rng(7, 1).standard_normal(4)
    c = L.make_rng(7, 2).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    rng = L.make_rng(0)
    assert L.as_rng(rng) is rng


@pytest.mark.parametrize('d, r', [(1, 0), (1, 1), (4, 0), (4, 2), (5, 5)])
def test_random_projection(d, r):
    p = L.random_projection(d, r, 11)
    assert L.projection_residual(p) < 1e-12
    assert np.trace(p).real == pytest.approx(r)


def test_random_projection_rank_range():
    with pytest.raises(ValueError):
        L.random_projection(3, 4, 0)
    with pytest.raises(ValueError):
        L.random_projection(3, -1, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_random_inputs(d, seed):
    U = L.random_unitary(d, seed)
    assert L.unitary_residual(U) < 1e-10
    a = L.random_contraction(d, seed)
    assert L.op_norm(a) <= 1 + 1e-12
    l = L.random_contraction(d, seed, positive=True)
    assert L.spectral_interval_residual(l) < 1e-12

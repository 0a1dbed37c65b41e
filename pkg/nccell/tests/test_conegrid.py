import numpy as np
import pytest

from .. import conegrid as C
from .. import linalg as L
from .. import reps as R
from ..boundary import smooth_profile
from ..errors import GridResolutionError, RelationError


def _circle(w, samples=64):
    t = np.arange(samples + 1) / samples
    return np.exp(2j * np.pi * w * t)


@pytest.mark.parametrize('w', [-3, -1, 0, 2, 5])
def test_winding(w):
    assert C.winding(_circle(w)) == w
    assert C.phase_total(_circle(w)) == pytest.approx(w)


def test_winding_shifted_loop():
    assert C.winding(0.3 + _circle(1)) == 1
    assert C.winding(2.0 + _circle(1)) == 0


def test_phase_total_errors():
    with pytest.raises(ValueError):
        C.phase_total([1.0])
    with pytest.raises(ValueError):
        C.phase_total(_circle(1)[:-1])
    with pytest.raises(ValueError):
        C.phase_total([1.0, 0.0, 1.0])
    with pytest.raises(GridResolutionError):
        C.phase_total(_circle(20, samples=32))


def test_gridfun_sample():
    g = C.GridFun.sample(lambda t: t * np.eye(2), 8, vanish_at_0=True)
    assert g.grid == 8
    assert g.dim == 2
    assert len(g) == 9
    np.testing.assert_allclose(g.at_one(), np.eye(2))
    np.testing.assert_allclose(g.t, np.arange(9) / 8)
    refined = g.refine()
    assert refined.grid == 16
    assert refined.vanish_at_0


def test_gridfun_boundary_conditions():
    with pytest.raises(ValueError):
        C.GridFun.sample(lambda t: np.eye(2), 4, vanish_at_0=True)
    with pytest.raises(ValueError):
        C.GridFun(np.zeros((3, 2, 3)))
    with pytest.raises(ValueError):
        C.GridFun.constant(np.eye(2), 4).refine() + C.GridFun.constant(np.eye(2), 4)


def test_gridfun_algebra():
    f = C.GridFun.sample(lambda t: t * np.diag([1.0, 2.0]), 4, vanish_at_0=True)
    g = C.GridFun.sample(lambda t: np.eye(2), 4)
    product = f * g
    assert product.vanish_at_0
    np.testing.assert_allclose((f + 1).at_one(), np.diag([2.0, 3.0]))
    np.testing.assert_allclose((1 - f)[0], np.eye(2))
    np.testing.assert_allclose(f.adjoint().values, f.values)
    np.testing.assert_allclose(f.norms(), 2 * f.t)
    np.testing.assert_allclose(f.determinants(), 2 * f.t ** 2)


def test_unitary_loop():
    p = np.diag([1.0, 1.0, 0.0])
    loop = C.UnitaryLoop(C.cone_lift_projection(p, 64).funcalc('exp2pii'))
    assert loop.residual < 1e-12
    assert loop.winding() == 2
    with pytest.raises(ValueError):
        C.UnitaryLoop(C.GridFun.constant(-np.eye(2), 4))


@pytest.mark.parametrize('n, r', [(1, 0), (1, 1), (3, 2), (5, 3), (6, 6)])
def test_cone_cell_check(n, r):
    p = L.random_projection(n, r, L.make_rng(0, n, r))
    assert C.cone_cell_check(p, 64) == (r, r)


def test_cone_cell_check_needs_projection():
    with pytest.raises(RelationError):
        C.cone_cell_check(np.diag([0.5, 1.0]))


def test_exp_loop_refines_coarse_grid():
    # phase steps of 1.2 pi and 0.6 pi are too coarse; G = 20 resolves them
    result = C.exp_loop(np.eye(3), grid=5)
    assert result.index == 3
    assert result.grid == 20


def test_exp_formula_on_corner_projections():
    d = 2
    zero = np.zeros((d, d))
    one = np.eye(d)
    np.testing.assert_allclose(C.exp_formula(np.block([[one, zero], [zero, zero]])),
                               one, atol=1e-12)


def test_exp_boundary_of_zero_rep():
    result = C.exp_boundary_u(R.Rep.zero('qC', 3), grid=32)
    assert result.index == 0
    assert result.loop.residual < 1e-12


@pytest.mark.parametrize('rank', [0, 1, 2, 3])
def test_exp_boundary_of_diagonal_rep(rank):
    d = 3
    p = L.random_projection(d, rank, 7)
    rep = R.qc_rep_from_projections(np.zeros((d, d)), p)
    result = C.exp_boundary_u(rep, grid=64)
    assert result.index == rank
    assert result.trace == pytest.approx(rank, abs=1e-6)


def test_exp_boundary_with_smooth_profile():
    rep = R.random_qc_rep(3, L.make_rng(2))
    expected = int(round(np.trace(rep['k0'] - rep['h0']).real))
    assert C.exp_boundary_u(rep, grid=128).index == expected
    assert C.exp_boundary_u(rep, grid=128, tau=smooth_profile).index == expected


def test_cone_lift_qc():
    rep = R.random_qc_rep(2, L.make_rng(4))
    lift = C.cone_lift_qc(rep, 16)
    assert lift.grid == 16
    assert lift.relation_residual() < 1e-9
    assert lift.quotient().distance(rep) < 1e-12
    P = lift.projection()
    assert L.op_norm(P[0] - np.diag([1, 1, 0, 0])) < 1e-12
    with pytest.raises(RelationError):
        C.cone_lift_qc(R.random_g2st_rep(2, 0))
    with pytest.raises(ValueError):
        C.cone_lift_qc(rep, 16, tau=lambda t: 2 * t)


def test_eta1_generator_check():
    cc = R.random_rep('CC', 3, L.make_rng(1))
    winding, rank = C.eta1_generator_check(cc, 64)
    assert winding == rank

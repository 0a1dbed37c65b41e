import numpy as np
import pytest

from .. import config
from .. import linalg as L
from .. import reps as R
from ..errors import RelationError, SubstitutionError


@pytest.fixture
def g2st():
    return R.random_g2st_rep(3, L.make_rng(5))


@pytest.mark.parametrize('name', sorted(R.FACTORIES))
def test_factories_pass_relations(name):
    rep = R.random_rep(name, 4, 1)
    assert rep.dim == 4
    assert R.check_relations(rep).passed


def test_random_rep_unknown():
    with pytest.raises(KeyError):
        R.random_rep('D', 2, 0)


def test_rep_images_must_match_generators():
    with pytest.raises(SubstitutionError):
        R.Rep('G2st', {'h': np.eye(2), 'k': np.eye(2)})
    with pytest.raises(SubstitutionError):
        R.Rep('C0_01', {'x': np.zeros((2, 3))})


def test_relation_failure_is_reported():
    rep = R.Rep('G2st', {'h': np.zeros((2, 2)), 'k': np.zeros((2, 2)),
                         'x': np.eye(2)})
    report = R.check_relations(rep)
    assert not report.passed
    assert report.worst_residual == pytest.approx(1.0)
    assert 'FAIL' in str(report)


def test_zero_rep_passes():
    for name in ('G2st', 'qC', 'P', 'C0_01', 'D'):
        assert R.check_relations(R.Rep.zero(name, 3)).passed


def test_rep_operations_keep_relations(g2st):
    U = L.random_unitary(3, 0)
    assert g2st.conjugate(U).check().passed
    assert g2st.pad(2).dim == 5
    assert g2st.pad(2).check().passed
    both = g2st.direct_sum(R.Rep.zero('G2st', 1))
    assert both.dim == 4
    assert both.check().passed
    assert g2st.distance(g2st) == 0.0


def test_factory_checks_inputs():
    with pytest.raises(RelationError):
        R.qc_rep_from_projections(np.diag([0.5, 1.0]), np.eye(2))
    with pytest.raises(RelationError):
        R.g2st_rep_from_contraction(2 * np.eye(2))
    with pytest.raises(RelationError):
        R.p_rep_from_pair(np.eye(2), np.diag([1.5, 0.0]))


def test_qc_rep_from_projections():
    p = np.diag([1.0, 0.0])
    q = np.diag([0.0, 1.0])
    rep = R.qc_rep_from_projections(p, q)
    np.testing.assert_allclose(rep['h0'], p)
    np.testing.assert_allclose(rep['k0'], q)
    np.testing.assert_allclose(rep['x0'], np.zeros((2, 2)))


def test_pullbacks(g2st):
    qc = R.apply_genmap('lambda', g2st)
    assert qc.presentation.name == 'qC'
    assert qc.dim == 6
    back = R.apply_genmap('rho', qc)
    assert back.presentation.name == 'G2st'

    twice = R.apply_genmap('eta', R.apply_genmap('eta', g2st))
    assert twice.distance(g2st) == 0.0


def test_pullback_needs_target_rep(g2st):
    with pytest.raises(SubstitutionError):
        R.apply_genmap('lambda', R.random_qc_rep(2, 0))
    with pytest.raises(KeyError):
        R.get_genmap('nope')


def test_unitization_round_trip(g2st):
    g2nc = R.apply_genmap('unitization', g2st)
    np.testing.assert_allclose(g2nc['a'], np.eye(3) - g2st['h'])
    back = R.apply_genmap('unitization_inverse', g2nc)
    assert back.distance(g2st) < 1e-12


@pytest.mark.parametrize('name', sorted(R.genmap_registry()))
def test_certify_genmap(name):
    results = R.certify_genmap(name, trials=3, seed=0, dim=3)
    assert results
    assert all(cert.status in ('symbolic', 'numeric') for cert in results)


def test_certify_rho_symbolically():
    results = R.certify_genmap('rho', trials=2, dim=2)
    assert {cert.status for cert in results} == {'symbolic'}


def test_null_homotopy_endpoints(g2st):
    start = R.null_homotopy_at(g2st, 0.0)
    h, k, x = g2st['h'], g2st['k'], g2st['x']
    zero = np.zeros_like(h)
    np.testing.assert_allclose(start['h'], np.block([[h, zero], [zero, k]]),
                               atol=1e-12)
    np.testing.assert_allclose(start['x'], np.block([[x, zero], [zero, L.adj(x)]]),
                               atol=1e-12)
    end = R.null_homotopy_at(g2st, 2.0)
    assert end.distance(R.Rep.zero('G2st', 6)) < 1e-12
    assert R.null_homotopy_junction_gap(g2st) < 1e-8
    with pytest.raises(ValueError):
        R.null_homotopy_at(g2st, 2.5)


def test_null_homotopy_stays_in_g2st(g2st):
    for s in np.linspace(0, 2, 9):
        report = R.check_relations(R.null_homotopy_at(g2st, s), 1e-6)
        assert report.passed, str(report)


def test_lambda_rho_homotopy(g2st):
    start = R.apply_genmap('rho', R.apply_genmap('lambda', g2st))
    assert R.lambda_rho_homotopy_at(g2st, 0.0).distance(start) < 1e-12
    end = R.apply_genmap('amplify', g2st)
    assert R.lambda_rho_homotopy_at(g2st, 1.0).distance(end) < 1e-12
    for t in np.linspace(0, 1, 5):
        assert R.check_relations(R.lambda_rho_homotopy_at(g2st, t), 1e-8).passed


def test_lambda_rho_homotopy_qc():
    qc = R.random_qc_rep(3, 2)
    start = R.apply_genmap('lambda_rho_q', qc)
    assert R.lambda_rho_homotopy_at(qc, 0.0).distance(start) < 1e-12
    assert R.lambda_rho_homotopy_at(qc, 1.0).distance(qc.pad(3)) < 1e-12
    with pytest.raises(SubstitutionError):
        R.lambda_rho_homotopy_at(R.Rep.zero('P', 2), 0.5)


@pytest.mark.parametrize('seed', range(4))
def test_reconstruct_extension(seed):
    rep = R.random_p_rep(4, seed)
    extension = R.reconstruct_extension(rep)
    assert extension.residual < 1e-7
    assert L.projection_residual(extension.r) < 1e-10
    assert L.spectral_interval_residual(extension.l_hat) < 1e-7
    assert max(R.support_identities(rep).values()) < 1e-7


def test_reconstruct_extension_of_theta_image():
    p = np.diag([1.0, 1.0, 0.0])
    l = np.diag([0.25, 0.5, 0.75])
    rep = R.p_rep_from_pair(p, l)
    extension = R.reconstruct_extension(rep)
    np.testing.assert_allclose(extension.r, p, atol=1e-12)
    np.testing.assert_allclose(extension.l_hat, l, atol=1e-12)


def test_reconstruct_extension_rejects_bad_rep():
    rep = R.Rep('P', {'h': np.eye(2), 'k': np.eye(2), 'x': np.zeros((2, 2))})
    with pytest.raises(RelationError):
        R.reconstruct_extension(rep)


def test_quotient_generator_check():
    p = L.random_projection(4, 2, 3)
    l = L.random_contraction(4, 3, positive=True)
    assert R.quotient_generator_check(p, l) < 1e-12


def test_check_mode_skips_pullback_checks():
    # eta_P pulls qC back to P; a pair failing h0*k0 = 0 is let through
    bad = R.Rep('qC', {'h0': np.eye(2), 'k0': np.eye(2), 'x0': np.zeros((2, 2))})
    with pytest.raises(RelationError):
        R.apply_genmap('eta_P', bad)
    with config.check_mode(False):
        pulled = R.apply_genmap('eta_P', bad)
    assert not R.check_relations(pulled).passed
    assert config.CHECK_MODE


@pytest.mark.parametrize('d', [1, 2, 8])
@pytest.mark.parametrize('name', ['qC', 'P', 'G2st'])
def test_factories_pass_relations_over_seeds(name, d):
    for seed in range(100):
        report = R.check_relations(R.random_rep(name, d, seed), 1e-9)
        assert report.passed, 'seed {}:\n{}'.format(seed, report)


def test_reconstruct_extension_over_seeds():
    for seed in range(100):
        extension = R.reconstruct_extension(R.random_p_rep(4, seed))
        assert extension.residual <= 1e-7, 'seed {}'.format(seed)

import json

import jsonschema
import pytest

from .. import config
from .. import linalg as L
from .. import reps as R
from ..errors import RelationError
from ..report import Case, Report, ReportValidationError, run_case
from ..suites import run_suite, suite_names


def make_report():
    report = Report('demo', {'sign': -1, 'grid': 64})
    report.add(run_case('exact', lambda: 0.0))
    report.add(run_case('close', lambda: (1e-12, 'tiny'), tol=1e-9, seed=3))
    report.add(run_case('far', lambda: 0.5, tol=1e-9, seed=3))
    report.add(Case('later', 'skip', detail='sign check failed'))
    return report


def test_run_case():
    case = run_case('ok', lambda: (2e-10, 'detail'), tol=1e-9, seed=4)
    assert case.passed
    assert case.residual == 2e-10
    assert case.detail == 'detail'
    assert case.elapsed_ms >= 0

    def broken():
        raise RelationError("p is not a projection")

    case = run_case('broken', broken)
    assert case.status == 'fail'
    assert case.residual is None
    assert 'projection' in case.detail


def test_summary_and_status():
    report = make_report()
    assert report.summary == {'pass': 2, 'fail': 1, 'skip': 1}
    assert not report.passed
    assert not report
    assert Report('empty').passed


def test_to_dict_validates():
    dct = make_report().to_dict()
    assert dct['suite'] == 'demo'
    assert dct['summary'] == {'pass': 2, 'fail': 1, 'skip': 1}
    assert dct['cases'][1] == {'name': 'close', 'status': 'pass',
                               'residual': 1e-12, 'tol': 1e-9, 'seed': 3,
                               'elapsed_ms': dct['cases'][1]['elapsed_ms'],
                               'detail': 'tiny'}
    assert 'elapsed_ms' not in make_report().to_dict(timing=False)['cases'][0]


def test_nonfinite_residual_is_null():
    report = Report('demo', cases=[Case('nan', 'fail', float('nan'))])
    assert report.to_dict()['cases'][0]['residual'] is None


def test_json_roundtrip():
    report = make_report()
    text = report.to_json()
    assert json.loads(text)['convention'] == {'sign': -1, 'grid': 64}
    assert Report.from_json(text) == report


def test_invalid_report_raises():
    report = Report('demo', cases=[Case('negative', 'pass', 0.0, tol=-1.0)])
    with pytest.raises(ReportValidationError) as err:
        report.to_dict()
    assert 'Invalid report' in str(err.value)
    # nothing is checked without validation
    report.to_dict(validate=False)


def test_summary_tally_mismatch():
    dct = make_report().to_dict()
    dct['summary']['pass'] = 3
    with pytest.raises(jsonschema.ValidationError):
        Report.validate(dct)
    with pytest.raises(jsonschema.ValidationError):
        Report.from_dict(dct)


def test_schema_rejects_unknown_fields():
    dct = make_report().to_dict()
    dct['cases'][0]['extra'] = 1
    with pytest.raises(jsonschema.ValidationError):
        Report.validate(dct)


def test_merge():
    first = make_report()
    second = Report('more', {'grid': 128, 'dim': 4},
                    [run_case('again', lambda: 0.0)])
    first.merge(second)
    assert len(first.cases) == 5
    assert first.convention == {'sign': -1, 'grid': 64, 'dim': 4}


def test_to_text():
    text = make_report().to_text()
    lines = text.splitlines()
    assert lines[0] == 'demo (grid=64, sign=-1)'
    assert lines[-1] == '2 passed, 1 failed, 1 skipped'
    assert any(line.strip().startswith('skip') and 'later' in line
               for line in lines)


def test_check_mode():
    report = Report('demo', cases=[Case('negative', 'pass', 0.0, tol=-1.0)])
    with pytest.raises(ReportValidationError):
        report.check()
    with config.check_mode(False):
        assert report.check() is report


def test_suite_registry():
    names = suite_names()
    assert names[:2] == ['ideal-identities', 'block-identities']
    assert 'stability' in names
    assert 'invariance' not in names
    with pytest.raises(KeyError):
        run_suite('nope')


def test_ideal_identities_suite():
    report = run_suite('ideal-identities')
    assert report.passed
    assert report.summary == {'pass': 9, 'fail': 0, 'skip': 0}


@pytest.mark.parametrize('name', ['homotopy-null', 'homotopy-lambda-rho',
                                  'unitization-iso', 'exactness-reconstruction'])
def test_small_suites(name):
    report = run_suite(name, trials=2, dim=3)
    assert report.passed, report.to_text()


def test_suite_runs_are_reproducible():
    first = run_suite('exactness-reconstruction', trials=2, dim=3, seed=5)
    second = run_suite('exactness-reconstruction', trials=2, dim=3, seed=5)
    assert first == second
    assert first.to_json(timing=False) == second.to_json(timing=False)


@pytest.mark.parametrize('name', ['homotopy-null', 'exp-cell', 'index-cell',
                                  'exactness-reconstruction'])
def test_suite_json_is_deterministic(name):
    first = run_suite(name, trials=2, dim=3, grid=64, seed=5)
    second = run_suite(name, trials=2, dim=3, grid=64, seed=5)
    assert first.to_json(timing=False) == second.to_json(timing=False)


def test_case_stream_reproduces_input():
    report = run_suite('exactness-reconstruction', trials=2, dim=3, seed=5)
    case = [c for c in report.cases if c.name == 'trial-1/round-trip'][0]
    assert case.seed == 5
    assert case.to_dict()['stream'] == [1]
    rep = R.random_p_rep(3, L.make_rng(case.seed, *case.stream))
    assert R.reconstruct_extension(rep, 1e-7).residual == case.residual
    again = Report.from_json(report.to_json())
    assert [c.stream for c in again.cases] == [c.stream for c in report.cases]

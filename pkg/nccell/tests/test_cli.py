import pytest

from ..cli import run
from ..presentations import shipped_source
from ..report import Report


BAD_PRESENTATION = "presentation X nonunital { gen h; rel proj(h*y); }"

IDENTITIES = """\
# p is a projection, l is only self-adjoint
p*p*l == p*l  modulo cc01
p*l == l*p  modulo cc01
"""


def test_verify_ideal_identities(capsys):
    assert run(['verify', 'ideal-identities']) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == '9 passed, 0 failed, 0 skipped'


def test_verify_writes_json(tmp_path, capsys):
    path = tmp_path / 'report.json'
    assert run(['verify', 'block-identities', '--json', str(path)]) == 0
    report = Report.from_json(path.read_text())
    assert report.suite == 'block-identities'
    assert report.passed
    assert report.summary['pass'] == len(report.cases)


def test_verify_small_cone_cell(capsys):
    assert run(['verify', 'cone-cell', '--dim', '3', '--grid', '64']) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == '9 passed, 0 failed, 0 skipped'


def test_boundary_index(capsys):
    assert run(['boundary', 'index', '--symbol', 'z']) == 0
    assert 'class -1' in capsys.readouterr().out
    assert run(['boundary', 'index', '--symbol', 'bott(2, 2)']) == 0
    assert 'class -2' in capsys.readouterr().out


def test_boundary_exp_and_cone(capsys):
    assert run(['boundary', 'exp', '--rank', '2', '--dim', '3',
                '--grid', '64']) == 0
    assert 'class 2' in capsys.readouterr().out
    assert run(['boundary', 'cone', '--rank', '2', '--dim', '3']) == 0
    assert 'class 2' in capsys.readouterr().out


@pytest.mark.parametrize('argv', [
    [],
    ['boundary'],
    ['verify', 'nope'],
    ['registry', 'Nope'],
    ['registry', 'ConeMn(0)'],
    ['boundary', 'cone', '--rank', '4', '--dim', '3'],
    ['boundary', 'index', '--symbol', 'z^'],
    ['parse', 'does-not-exist.ncp'],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_registry(capsys):
    assert run(['registry', 'G2st']) == 0
    assert 'presentation G2st' in capsys.readouterr().out


def test_parse(tmp_path, capsys):
    good = tmp_path / 'g2st.ncp'
    good.write_text(shipped_source('g2st.ncp'))
    assert run(['parse', str(good)]) == 0
    assert 'rel proj(P);' in capsys.readouterr().out

    bad = tmp_path / 'bad.ncp'
    bad.write_text(BAD_PRESENTATION)
    assert run(['parse', str(bad)]) == 1
    assert 'undeclared generator y' in capsys.readouterr().err


def test_prove(tmp_path, capsys):
    path = tmp_path / 'check.nci'
    path.write_text(IDENTITIES)
    assert run(['prove', str(path)]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == '1 passed, 1 failed, 0 skipped'
    assert any('check.nci:2' in line and line.strip().startswith('pass')
               for line in lines)

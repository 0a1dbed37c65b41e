"""Suite reports and their JSON schema"""
import json
import math
import pkgutil
import time
from dataclasses import dataclass

import jsonschema

from . import config
from .errors import NCCellError


def load_report_schema():
    schema = pkgutil.get_data(__name__, 'data/report-schema.json')
    return json.loads(schema.decode('utf-8'))


class ReportValidationError(jsonschema.ValidationError):
    """A wrapper for jsonschema.ValidationError with friendlier traceback"""
    def __init__(self, obj, err):
        super(ReportValidationError, self).__init__(**self._get_contents(err))
        self.obj = obj

    @staticmethod
    def _get_contents(err):
        """Get a dictionary with the contents of a ValidationError"""
        return err._contents()

    def __str__(self):
        path = ['{}({!r})'.format(self.obj.__class__.__name__,
                                  getattr(self.obj, 'suite', ''))]
        path.extend(str(p) for p in self.absolute_path)
        return """Invalid report

        {}, validating {!r}

        {}
        """.format('->'.join(path), self.validator, self.message)


@dataclass(frozen=True)
class Case(object):
    """One checked case of a suite

    ``residual`` is None when the case raised instead of producing a number.
    ``stream`` holds the keys after the seed of the case's generator, so
    ``make_rng(seed, *stream)`` reproduces its input.
    """
    name: str
    status: str
    residual: object = None
    tol: float = 0.0
    seed: object = None
    elapsed_ms: float = 0.0
    detail: str = ''
    stream: tuple = ()

    @property
    def passed(self):
        return self.status == 'pass'

    def to_dict(self, timing=True):
        residual = self.residual
        if residual is not None and not math.isfinite(residual):
            residual = None
        dct = {'name': self.name, 'status': self.status,
               'residual': None if residual is None else float(residual),
               'tol': float(self.tol),
               'seed': None if self.seed is None else int(self.seed)}
        if timing:
            dct['elapsed_ms'] = round(self.elapsed_ms, 3)
        if self.stream:
            dct['stream'] = [int(s) for s in self.stream]
        if self.detail:
            dct['detail'] = self.detail
        return dct


def run_case(name, check, tol=0.0, seed=None, stream=()):
    """Time ``check()`` and turn its residual into a Case

    ``check`` returns a residual, or a ``(residual, detail)`` pair. The case
    passes when the residual is at most ``tol``; a package error or a
    numeric failure raised by ``check`` fails the case with its message as
    detail.
    """
    start = time.perf_counter()
    detail = ''
    try:
        residual = check()
        if isinstance(residual, tuple):
            residual, detail = residual
        residual = float(residual)
        status = 'pass' if residual <= tol else 'fail'
    except (NCCellError, ValueError, ArithmeticError) as err:
        residual, status, detail = None, 'fail', str(err)
    elapsed = (time.perf_counter() - start) * 1000
    return Case(name, status, residual, tol, seed, elapsed, detail,
                tuple(stream))


class Report(object):
    """The cases of one suite run, with their convention header

    Parameters
    ----------
    suite : string
    convention : dict, optional
        sign conventions, grid and corner sizes the cases were run with
    cases : list of Case, optional
    """
    _schema = load_report_schema()

    def __init__(self, suite, convention=None, cases=()):
        self.suite = suite
        self.convention = dict(convention or {})
        self.cases = list(cases)

    def add(self, case):
        self.cases.append(case)
        return case

    def merge(self, other):
        """Append the cases of another report; conventions are combined"""
        self.cases.extend(other.cases)
        for key, val in other.convention.items():
            self.convention.setdefault(key, val)
        return self

    @property
    def summary(self):
        counts = {'pass': 0, 'fail': 0, 'skip': 0}
        for case in self.cases:
            counts[case.status] += 1
        return counts

    @property
    def passed(self):
        return all(case.status != 'fail' for case in self.cases)

    def __bool__(self):
        return self.passed

    def __eq__(self, other):
        return (type(self) is type(other)
                and self.to_dict(validate=False, timing=False)
                == other.to_dict(validate=False, timing=False))

    def __repr__(self):
        return "Report({!r}, {} cases, {})".format(self.suite, len(self.cases),
                                                  self.summary)

    def to_dict(self, validate=True, timing=True):
        """Return a dictionary representation of the report

        Parameters
        ----------
        validate : boolean
            If True (default), then validate the output dictionary
            against the report schema.
        timing : boolean
            If False, leave out the elapsed time of every case.

        Raises
        ------
        ReportValidationError :
            if validate=True and the dict does not conform to the schema
        """
        result = {'suite': self.suite,
                  'convention': dict(self.convention),
                  'cases': [case.to_dict(timing) for case in self.cases],
                  'summary': self.summary}
        if validate:
            try:
                self.validate(result)
            except jsonschema.ValidationError as err:
                raise ReportValidationError(self, err)
        return result

    def to_json(self, validate=True, timing=True, indent=2, sort_keys=True,
                **kwargs):
        """Emit the JSON representation of the report as a string

        Keyword arguments beyond ``validate`` and ``timing`` are passed to
        ``json.dumps()``.
        """
        dct = self.to_dict(validate=validate, timing=timing)
        return json.dumps(dct, indent=indent, sort_keys=sort_keys, **kwargs)

    @classmethod
    def from_dict(cls, dct, validate=True):
        if validate:
            cls.validate(dct)
        cases = [Case(c['name'], c['status'], c['residual'], c['tol'], c['seed'],
                      c.get('elapsed_ms', 0.0), c.get('detail', ''),
                      tuple(c.get('stream', ())))
                 for c in dct['cases']]
        return cls(dct['suite'], dct['convention'], cases)

    @classmethod
    def from_json(cls, json_string, validate=True, **kwargs):
        return cls.from_dict(json.loads(json_string, **kwargs), validate=validate)

    @classmethod
    def validate(cls, instance):
        """Validate against the report schema; the summary must also match
        the tallies of the case list"""
        jsonschema.validate(instance, cls._schema)
        counts = {'pass': 0, 'fail': 0, 'skip': 0}
        for case in instance['cases']:
            counts[case['status']] += 1
        for key, val in instance['summary'].items():
            if counts[key] != val:
                raise jsonschema.ValidationError(
                    "summary counts {} {} cases, the case list has {}".format(
                        val, key, counts[key]),
                    validator='summary', path=['summary', key])

    def to_text(self):
        """A compact table of the cases"""
        lines = ['{} ({})'.format(self.suite, ', '.join(
            '{}={}'.format(k, v) for k, v in sorted(self.convention.items())))]
        for case in self.cases:
            residual = ('-' if case.residual is None
                        else '{:.3e}'.format(case.residual))
            lines.append('  {:<4}  {:<44} {:>10}  tol {:.1e}{}'.format(
                case.status, case.name, residual, case.tol,
                '  ' + case.detail if case.detail else ''))
        summary = self.summary
        lines.append('{pass} passed, {fail} failed, {skip} skipped'.format(
            **summary))
        return '\n'.join(lines)

    def check(self):
        """Validate in check mode; return self"""
        if config.CHECK_MODE:
            self.to_dict(validate=True)
        return self

import pytest

from models.errors import UnknownSuiteError
from models.run_config import RunConfig
from verification.suites import SUITES, run_suite


def _run(tmp_path, **overrides):
    values = dict(n=2, omega=2.0, resolution='32', M=3, trials=1, samples=5000, output_dir=str(tmp_path))
    values.update(overrides)
    return RunConfig(**values)


def _failed(report):
    return [check.name for check in report.checks if not check.passed]


def test_suite_registry():
    assert set(SUITES) == {'energy', 'inequality', 'stokes', 'uniqueness', 'nullspace', 'compat'}


def test_unknown_suite(tmp_path):
    with pytest.raises(UnknownSuiteError):
        run_suite('spectral', _run(tmp_path))


def test_inequality_suite(tmp_path):
    report = run_suite('inequality', _run(tmp_path), seed=3)
    assert report.passed, _failed(report)
    assert report.seed == 3
    assert any(check.name.startswith('boundary-chain[n=4') for check in report.checks)


def test_nullspace_suite(tmp_path):
    report = run_suite('nullspace', _run(tmp_path, refine=2))
    assert report.passed, _failed(report)
    assert len(report.checks) == 2 * 5
    assert any(check.name.startswith('m=0 bordered regular') for check in report.checks)


def test_nullspace_suite_on_ball(tmp_path):
    report = run_suite('nullspace', _run(tmp_path, n=3, resolution='16x16', M=2))
    assert report.passed, _failed(report)


@pytest.mark.parametrize('overrides', [{}, {'n': 3, 'resolution': '32x32', 'M': 2}])
def test_compat_suite(tmp_path, overrides):
    report = run_suite('compat', _run(tmp_path, **overrides))
    assert report.passed, _failed(report)


def test_uniqueness_suite(tmp_path):
    report = run_suite('uniqueness', _run(tmp_path, trials=2))
    assert report.passed, _failed(report)
    assert [check.name for check in report.checks] == ['certificate[0]', 'certificate[1]']


def test_energy_suite_writes_integrands(tmp_path):
    report = run_suite('energy', _run(tmp_path))
    assert report.passed, _failed(report)
    names = [check.name for check in report.checks]
    assert {'ibp-halving[0]', 'ibp-order[0]', 'ibp-relative[0]', 'multiplier-boundary[0]'} <= set(names)
    assert report.energy is not None
    assert report.energy.min_volume_integrand >= 0
    assert (tmp_path / 'integrands.txt').exists()


@pytest.mark.slow
def test_energy_suite_on_ball(tmp_path):
    report = run_suite('energy', _run(tmp_path, n=3, resolution='32x32', M=2))
    assert report.passed, _failed(report)


@pytest.mark.parametrize('overrides', [{}, {'n': 3, 'resolution': '16x16', 'refine': 2}])
def test_stokes_suite_checks_conormal(tmp_path, overrides):
    report = run_suite('stokes', _run(tmp_path, **overrides))
    assert report.passed, _failed(report)
    names = {check.name: check for check in report.checks}
    assert names['conormal-is-dr'].passed
    assert {'stokes-halving[0]', 'stokes-order[0]'} <= set(names)
    assert sum(name.startswith('euler-identity') for name in names) == 100


@pytest.mark.slow
@pytest.mark.parametrize('suite', ['energy', 'stokes'])
def test_suites_at_acceptance_trial_counts(tmp_path, suite):
    report = run_suite(suite, _run(tmp_path, trials=50))
    assert report.passed, _failed(report)


def test_domain_failures_are_reported(tmp_path):
    report = run_suite('nullspace', _run(tmp_path, omega=20.0, resolution='16'))
    assert not report.passed
    assert report.error.startswith('GridResolutionError')

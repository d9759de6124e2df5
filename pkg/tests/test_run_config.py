import pytest

from models.errors import ConfigError
from models.run_config import RunConfig


def test_parse_run_file():
    run = RunConfig.from_text(
        "# disk with a crossing light cylinder\n"
        "N=2\n"
        "OMEGA=2.0\n"
        "RESOLUTION=64\n"
        "PRESET=manufactured-3\n"
        "ALLOW_INCOMPATIBLE=true\n"
        "NULLSPACE_MODES=0, 1, 3\n"
    )
    assert run.n == 2 and run.omega == 2.0
    assert run.resolution_parts == (64,)
    assert run.allow_incompatible is True
    assert run.nullspace_modes == [0, 1, 3]
    assert run.helical.crosses_light_cylinder


def test_ball_resolution():
    run = RunConfig.from_text("N=3\nRESOLUTION=48x32\nSIGN=-1\n")
    assert run.resolution_parts == (48, 32)
    assert run.helical.sign == -1


def test_round_trip_through_env_text():
    run = RunConfig(n=3, omega=0.5, resolution='32x16', sign=-1, seed=7, nullspace_modes=[0, 2],
                    zero_boundary=True, certificate_rtol=1e-9)
    assert RunConfig.from_text(run.to_env_text()) == run


def test_unset_preset_survives_round_trip():
    run = RunConfig(source_file='f.txt', preset=None)
    assert 'PRESET=\n' in run.to_env_text()
    read = RunConfig.from_text(run.to_env_text())
    assert read.preset is None
    assert read == run


@pytest.mark.parametrize('text, line', [
    ("N=2\nOMEGA=-1\n", 2),
    ("N=2\n\nBOGUS=1\n", 3),
    ("N=2\nRESOLUTION=32\nthis is not a pair\n", 3),
    ("N=4\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_resolution_must_match_dimension():
    with pytest.raises(ConfigError):
        RunConfig.from_text("N=3\nRESOLUTION=64\n")


def test_overrides_revalidate():
    run = RunConfig()
    assert run.with_overrides(seed=9, suite=None).seed == 9
    assert run.with_overrides(seed=9).suite is None
    with pytest.raises(ConfigError):
        run.with_overrides(refine=0)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / 'absent.env')


def test_output_paths(tmp_path):
    run = RunConfig(output_dir=str(tmp_path), report_file='r.json')
    assert run.output('report_file') == tmp_path / 'r.json'


def test_empty_mode_list_survives_round_trip():
    run = RunConfig(nullspace_modes=[])
    assert RunConfig.from_text(run.to_env_text()).nullspace_modes == []

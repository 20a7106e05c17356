import io
import json
from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from wavekit.cli.commands import EXIT_HYPOTHESIS, EXIT_PARSE, EXIT_USAGE, cli, main
from wavekit.cli.problem_file import ProblemFile, ProblemFileError

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


@pytest.fixture
def runner():
    return CliRunner()


def problem(name: str) -> str:
    return str(PROBLEMS / f"{name}.toml")


def test_problem_file_loads_params_and_options():
    loaded = ProblemFile.load(problem("kpp"))
    assert loaded.name == "kpp"
    assert loaded.expressions == {'g': "1", 'f': "0", 'D': "d", 'rho': "u - u^2"}
    assert loaded.params == {'d': 1.0}
    assert loaded.settings().tol_c == 1e-7

    wider = loaded.with_params(["d=4"])
    assert wider.params == {'d': 4.0}
    assert loaded.params == {'d': 1.0}
    assert wider.build(wider.settings()).D(0.5) == 4.0


@pytest.mark.parametrize("override", ["d", "=1", "d=fast"])
def test_problem_file_rejects_bad_overrides(override):
    with pytest.raises(ProblemFileError):
        ProblemFile.load(problem("kpp")).with_params([override])


def test_problem_file_schema_errors(tmp_path):
    with pytest.raises(ProblemFileError):
        ProblemFile.from_mapping({'g': "1", 'f': "0", 'D': "1"})
    with pytest.raises(ProblemFileError):
        ProblemFile.from_mapping({'g': "1", 'f': "0", 'D': "1", 'rho': "u - u^2", 'params': {'k': "x"}})
    with pytest.raises(ProblemFileError):
        ProblemFile.from_mapping({'g': "1", 'f': "0", 'D': "1", 'rho': "u - u^2",
                                  'options': {'tolerance': 1}}).settings()

    broken = tmp_path / "broken.toml"
    broken.write_text('g = "1"\nf = \n')
    with pytest.raises(ProblemFileError):
        ProblemFile.load(str(broken))


def test_numbers_are_accepted_as_expressions():
    loaded = ProblemFile.from_mapping({'g': 1, 'f': 0, 'D': 1.5, 'rho': "u - u^2"}, default_name="numbers")
    assert loaded.name == "numbers"
    assert loaded.build(loaded.settings()).D(0.3) == 1.5


def test_threads_come_from_the_environment(monkeypatch):
    monkeypatch.setenv("WAVEKIT_THREADS", "2")
    assert ProblemFile.load(problem("kpp")).settings().threads == 2


def test_validate_passes(runner):
    result = runner.invoke(cli, ["validate", problem("ex1")])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['passed'] is True
    assert data['d0'] == pytest.approx([0.75])
    assert [iv[3] for iv in data['intervals']] == ['positive', 'negative']
    assert data['expressions'] == {'g': "u^2 - u + K", 'f': "0", 'D': "(3/4 - u) * sqrt(u - u^2)",
                                   'rho': "sqrt(u - u^2)"}


def test_validate_fails_with_small_K(runner):
    result = runner.invoke(cli, ["validate", problem("ex1"), "--param", "K=0.1"])
    assert result.exit_code == EXIT_HYPOTHESIS
    data = json.loads(result.stdout)
    assert 'g_integral_positive' in [check['name'] for check in data['checks'] if not check['passed']]


def test_malformed_expression_exits_with_parse_code(runner, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('g = "1 +"\nf = "0"\nD = "1"\nrho = "u - u^2"\n')
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == EXIT_PARSE
    assert "ExpressionSyntaxError" in result.stderr


def test_bad_param_override_is_a_usage_error(runner):
    result = runner.invoke(cli, ["validate", problem("kpp"), "-p", "d"])
    assert result.exit_code == EXIT_USAGE


def test_threshold_kpp(runner, tmp_path):
    events = tmp_path / "events.csv"
    result = runner.invoke(cli, ["threshold", problem("kpp"), "--events", str(events)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['c_hat'] == pytest.approx(2.0, abs=1e-4)
    assert data['bracket'] == pytest.approx([2.0, 2.0], abs=1e-6)
    assert data['speed_direction'] == 'above'
    assert pd.read_csv(events)['interval'].eq(1).all()


def test_threshold_example_3(runner):
    result = runner.invoke(cli, ["threshold", problem("ex3")])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['c_hat'] == pytest.approx(2.0, abs=1e-3)
    assert data['bracket'] == pytest.approx([2.0, 2.0], abs=1e-6)
    assert [entry['k'] for entry in data['per_interval']] == [1, 2]


def test_threshold_example_1_bracket_at_K_one(runner):
    result = runner.invoke(cli, ["threshold", problem("ex1"), "--param", "K=1"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    lower, upper = data['bracket']
    assert lower == pytest.approx(1.7321, abs=1e-3)
    assert upper == pytest.approx(2.1314, abs=1e-3)
    assert lower - 1e-3 <= data['c_hat'] <= upper + 1e-3
    assert data['corollary_at_c_hat'] == 'applies_exists'


def test_threshold_hypothesis_failure(runner):
    result = runner.invoke(cli, ["threshold", problem("ex1"), "--param", "K=0.1"])
    assert result.exit_code == EXIT_HYPOTHESIS


@pytest.fixture
def negative_g(tmp_path):
    path = tmp_path / "negative_g.toml"
    path.write_text('name = "negative_g"\ng = "-1"\nf = "0"\nD = "1"\nrho = "u - u^2"\n', encoding='utf-8')
    return str(path)


def test_threshold_negated_g(runner, negative_g):
    assert runner.invoke(cli, ["threshold", negative_g]).exit_code == EXIT_HYPOTHESIS

    result = runner.invoke(cli, ["threshold", negative_g, "--negate-g"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['speed_direction'] == 'below'
    assert data['c_hat'] == pytest.approx(-2.0, abs=1e-4)
    assert data['bracket'] == pytest.approx([-2.0, -2.0], abs=1e-6)


def test_wave_negated_g(runner, negative_g, tmp_path):
    assert runner.invoke(cli, ["wave", negative_g, "--speed", "-3", "-o", str(tmp_path)]).exit_code == EXIT_HYPOTHESIS

    result = runner.invoke(cli, ["wave", negative_g, "--speed", "-3", "--negate-g", "-o", str(tmp_path)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['c'] == pytest.approx(-3.0)
    assert data['c_hat'] == pytest.approx(-2.0, abs=1e-3)
    assert data['speed_direction'] == 'below'
    assert data['existence']['exists'] == 'yes'
    assert data['classification'] == 'classical'
    assert (tmp_path / "negative_g_wave.csv").exists()


def test_sweep_negated_g_keeps_the_file_sign(runner, negative_g):
    assert runner.invoke(cli, ["sweep", negative_g, "--from", "-3", "--to", "-1", "--steps", "5"]).exit_code \
        == EXIT_HYPOTHESIS

    result = runner.invoke(cli, ["sweep", negative_g, "--from", "-3", "--to", "-1", "--steps", "5", "--negate-g"])
    assert result.exit_code == 0
    rows = pd.read_csv(io.StringIO(result.stdout))
    assert rows['c'].tolist() == pytest.approx([-3.0, -2.5, -2.0, -1.5, -1.0])
    assert (rows.loc[rows['c'] <= -2.5, 'exists'] == 'yes').all()
    assert (rows.loc[rows['c'] >= -1.5, 'exists'] == 'no').all()


def test_wave_kpp_writes_outputs(runner, tmp_path):
    result = runner.invoke(cli, ["wave", problem("kpp"), "--speed", "3", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['classification'] == 'classical'
    assert data['existence']['exists'] == 'yes'

    # the JSON file carries the same report as stdout
    assert json.loads((tmp_path / "kpp_wave.json").read_text(encoding='utf-8')) == data

    profile = pd.read_csv(tmp_path / "kpp_wave.csv")
    assert list(profile.columns) == ['t', 'u', 'z', 'phi']
    assert profile['u'].is_monotonic_decreasing
    assert profile['u'].diff().dropna().lt(0.0).all()
    assert (tmp_path / "kpp_wave.svg").read_text().lstrip().startswith('<?xml')


def test_wave_example_1_above_threshold(runner, tmp_path):
    result = runner.invoke(cli, ["wave", problem("ex1"), "--speed-offset", "0.5", "-o", str(tmp_path)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['c'] == pytest.approx(data['c_hat'] + 0.5)
    assert data['classification'] == 'classical'


def test_wave_example_3_has_no_wave_at_the_threshold(runner, tmp_path):
    result = runner.invoke(cli, ["wave", problem("ex3"), "--speed", "2", "-o", str(tmp_path)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['existence']['exists'] == 'no'
    assert 'quotient jump at 0.5' in ' '.join(data['existence']['reasons'])
    assert 'profile' not in data
    assert not (tmp_path / "ex3_wave.csv").exists()


def test_wave_speed_options_are_exclusive(runner):
    result = runner.invoke(cli, ["wave", problem("kpp"), "--speed", "3", "--speed-offset", "1"])
    assert result.exit_code == EXIT_USAGE


def test_sweep_kpp_flips_at_two(runner, tmp_path):
    plot = tmp_path / "sweep.svg"
    result = runner.invoke(cli, ["sweep", problem("kpp"), "--from", "1", "--to", "3", "--steps", "9",
                                 "--plot", str(plot)])
    assert result.exit_code == 0
    rows = pd.read_csv(io.StringIO(result.stdout))
    assert list(rows.columns) == ['c', 'feasible_k1', 'exists']
    assert rows['c'].tolist() == pytest.approx([1.0 + 0.25 * i for i in range(9)])
    assert (rows.loc[rows['c'] <= 1.75, 'exists'] == 'no').all()
    assert (rows.loc[rows['c'] >= 2.25, 'exists'] == 'yes').all()
    flags = (rows['exists'] == 'yes').tolist()
    assert flags == sorted(flags)
    assert plot.exists()


def test_sweep_empty_range(runner):
    result = runner.invoke(cli, ["sweep", problem("kpp"), "--from", "3", "--to", "1", "--steps", "5"])
    assert result.exit_code == EXIT_USAGE


def test_main_maps_exit_codes(tmp_path, capsys):
    assert main(["validate", problem("kpp")]) == 0
    assert main(["validate", problem("ex1"), "-p", "K=0.1"]) == EXIT_HYPOTHESIS
    assert main(["validate", problem("kpp"), "--no-such-flag"]) == EXIT_USAGE
    assert main(["sweep", problem("kpp"), "--from", "1", "--to", "0", "--steps", "3"]) == EXIT_USAGE

    path = tmp_path / "bad.toml"
    path.write_text('g = "sqrt(u - 1)"\nf = "0"\nD = "1"\nrho = "u - u^2"\n')
    assert main(["validate", str(path)]) == EXIT_PARSE

import functools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple

import click
import numpy as np
import pandas as pd

from ..analysis.plots import plot_sweep, plot_wave
from ..config import SolverSettings
from ..errors import EvaluationError, ExpressionError, HypothesisError, NumericalError, PlateauError
from ..logging.event_logger import ShootingEventLogger
from ..model.decomposition import decompose
from ..model.problem import Problem, negate_g_transform
from ..model.validation import validate_hypotheses
from ..wave.gluing import compute_c_hat
from ..wave.report import prepare, sweep_row, threshold_report, wave_report
from .problem_file import ProblemFile, ProblemFileError

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_PARSE = 3
EXIT_USAGE = 4
EXIT_NUMERICAL = 5


class WavekitUsageError(click.UsageError):
    exit_code = EXIT_USAGE


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy to Python scalars, non-finite floats to null"""
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _to_json(data: Any) -> str:
    return json.dumps(_clean(data), indent=2, ensure_ascii=False)


def _fail(exc: Exception, code: int):
    click.secho(f"❌ {type(exc).__name__}: {exc}", fg='red', bold=True, err=True)
    raise click.exceptions.Exit(code)


def _exit_codes(command):
    """Map wavekit errors to the documented exit codes"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (HypothesisError, PlateauError) as exc:
            _fail(exc, EXIT_HYPOTHESIS)
        except (ExpressionError, EvaluationError, ProblemFileError) as exc:
            _fail(exc, EXIT_PARSE)
        except NumericalError as exc:
            _fail(exc, EXIT_NUMERICAL)
    return wrapper


def _problem_options(command):
    command = click.option('--events', 'events_path', type=click.Path(dir_okay=False),
                           help='Export the shooting event log to this CSV file.')(command)
    command = click.option('-p', '--param', 'params', multiple=True, metavar='NAME=VALUE',
                           help='Override a [params] entry of the problem file.')(command)
    command = click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))(command)
    return command


def _load(problem_file: str, params: Sequence[str]) -> Tuple[ProblemFile, SolverSettings, Problem]:
    source = ProblemFile.load(problem_file)
    try:
        source = source.with_params(params)
    except ProblemFileError as exc:
        raise WavekitUsageError(str(exc)) from exc
    settings = source.settings()
    logging.info(f"Loaded problem {source.name} from {problem_file} (params: {source.params})")
    return source, settings, source.build(settings)


def _export_events(events: Optional[ShootingEventLogger], events_path: Optional[str]):
    if events is not None and events_path:
        events.export_to_csv(events_path)
        click.echo(f"💾 Shooting events exported to: {events_path}", err=True)


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')
def cli(verbose):
    """Threshold speeds, profiles and sharp/classical classification of travelling waves."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


@cli.command()
@_problem_options
@_exit_codes
def validate(problem_file, params, events_path):
    """Check the hypotheses on g, D and rho"""
    source, settings, problem = _load(problem_file, params)
    d = decompose(problem, settings)
    report = validate_hypotheses(problem, d, settings)

    click.echo(_to_json({
        **report.to_dict(),
        'intervals': [[iv.k, iv.alpha, iv.beta, iv.h_sign] for iv in d.intervals],
        'd0': list(d.D0),
        'd00': list(d.D00),
        'expressions': problem.sources(),
    }))
    click.echo(report.get_dataframe()[['name', 'passed', 'k', 'violating_u', 'value']].to_string(index=False),
               err=True)
    if not report.passed:
        click.secho(f"⚠️ {len(report.failures)} hypothesis check(s) failed", fg='yellow', err=True)
        raise click.exceptions.Exit(EXIT_HYPOTHESIS)
    click.secho("✅ All hypotheses hold", fg='green', err=True)


@cli.command()
@_problem_options
@click.option('--negate-g', is_flag=True, help='Solve for -g and report the threshold for speeds below c_hat.')
@_exit_codes
def threshold(problem_file, params, events_path, negate_g):
    """Threshold speed c_hat and its analytic bracket"""
    source, settings, problem = _load(problem_file, params)
    if negate_g:
        problem = negate_g_transform(problem)
    events = ShootingEventLogger() if events_path else None

    report = threshold_report(problem, settings, events, negated_g=negate_g)
    click.echo(_to_json(report.to_dict()))
    click.echo(pd.DataFrame(report.to_dict()['per_interval']).to_string(index=False), err=True)
    _export_events(events, events_path)


@cli.command()
@_problem_options
@click.option('--speed', type=float, help='Wave speed c.')
@click.option('--speed-offset', type=float, help='Wave speed as c_hat plus this offset.')
@click.option('-o', '--out-dir', type=click.Path(file_okay=False), default='.', show_default=True,
              help='Directory for the CSV, JSON and SVG outputs.')
@click.option('--negate-g', is_flag=True, help='Solve for -g; speeds stay in the sign of the problem file.')
@_exit_codes
def wave(problem_file, params, events_path, speed, speed_offset, out_dir, negate_g):
    """Existence, classification and profile of the wave at one speed"""
    if speed is not None and speed_offset is not None:
        raise WavekitUsageError("--speed and --speed-offset are mutually exclusive")
    source, settings, problem = _load(problem_file, params)
    if negate_g:
        problem = negate_g_transform(problem)
    events = ShootingEventLogger() if events_path else None

    report = wave_report(problem, speed, speed_offset, settings, events, negated_g=negate_g)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{source.name}_wave"

    data = report.to_dict()
    if report.profile is not None:
        csv_path = out / f"{stem}.csv"
        report.profile.get_dataframe().to_csv(csv_path, index=False, lineterminator='\n')
        data['profile']['csv'] = str(csv_path)
        data['profile']['svg'] = plot_wave(report.profile, report.glued, str(out / f"{stem}.svg"),
                                           title=f"{source.name}: {report.classification.label} wave")
    else:
        click.secho(f"⚠️ No profile written (existence: {report.verdict.exists})", fg='yellow', err=True)

    text = _to_json(data)
    (out / f"{stem}.json").write_text(text + '\n', encoding='utf-8')
    click.echo(text)
    click.echo(f"📊 c = {data['c']:.6f}, c_hat = {data['c_hat']:.6f}, existence: {report.verdict.exists}, "
               f"classification: {report.classification.label}", err=True)
    _export_events(events, events_path)


@cli.command()
@_problem_options
@click.option('--from', 'c_from', type=float, required=True, help='First speed of the sweep.')
@click.option('--to', 'c_to', type=float, required=True, help='Last speed of the sweep.')
@click.option('--steps', type=int, required=True, help='Number of speeds, endpoints included.')
@click.option('--plot', 'plot_path', type=click.Path(dir_okay=False), help='Write an SVG of the verdicts.')
@click.option('--negate-g', is_flag=True, help='Solve for -g; the range stays in the sign of the problem file.')
@_exit_codes
def sweep(problem_file, params, events_path, c_from, c_to, steps, plot_path, negate_g):
    """Feasibility per interval and existence over a range of speeds"""
    if steps < 1 or c_to < c_from or (steps == 1 and c_to != c_from):
        raise WavekitUsageError(f"Empty speed range: from {c_from} to {c_to} in {steps} step(s)")
    source, settings, problem = _load(problem_file, params)
    if negate_g:
        problem = negate_g_transform(problem)
    events = ShootingEventLogger() if events_path else None

    d = prepare(problem, settings)
    c_hat, _, _ = compute_c_hat(problem, d, settings, events)
    speeds = np.linspace(c_from, c_to, steps)
    worker = functools.partial(sweep_row, problem, d, c_hat=c_hat, settings=settings, events=events,
                               negated_g=negate_g)
    with ThreadPoolExecutor(max_workers=min(settings.threads, steps)) as pool:
        rows = list(pool.map(worker, speeds.tolist()))

    df = pd.DataFrame(rows)
    if negate_g:
        c_hat = -c_hat
    click.echo(df.to_csv(index=False, lineterminator='\n'), nl=False)
    click.echo(f"📈 c_hat = {c_hat:.6f}; waves exist at {int((df['exists'] == 'yes').sum())} of {len(df)} speeds",
               err=True)
    if plot_path:
        plot_sweep(rows, plot_path, c_hat)
    _export_events(events, events_path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit code"""
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name='wavekit', standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    return code if isinstance(code, int) else EXIT_OK

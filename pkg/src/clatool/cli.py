"""CLI entry point for clatool."""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click
from dotenv import load_dotenv

# Load .env before Click parses envvar options (e.g. CLATOOL_SEED)
load_dotenv()

from clatool import __version__
from clatool.catalog import resolve_model
from clatool.cca import generate_cca
from clatool.config import ToolConfig, build_config
from clatool.distinguish import indistinguishable_pairs
from clatool.enumeration import invalid_interactions, valid_tests_or_none
from clatool.errors import CapExceededError, ClaToolError, InputError, PreconditionError, UnsatisfiableModelError
from clatool.locate import locate_faults
from clatool.model import SutModel
from clatool.parsers import load_array, load_outcomes, serialize_array
from clatool.pipeline import ClaPipeline
from clatool.reports import FORMATS, format_report, write_report
from clatool.selftest import run_selftest
from clatool.utils import write_text_atomic
from clatool.verify import minimal_cla_size, verify_cca, verify_cla, verify_la

EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)s: %(message)s",
    )


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _handle_errors(func):
    """Map library errors onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CapExceededError as e:
            _fail(str(e), EXIT_CAP)
        except (InputError, UnsatisfiableModelError, PreconditionError, OSError) as e:
            _fail(str(e), EXIT_INPUT)
        except ClaToolError as e:
            _fail(str(e), EXIT_FAILED)

    return wrapper


def _config(ctx: click.Context, **overrides) -> ToolConfig:
    """Subcommand options win over the group-level flags."""
    merged = dict(ctx.obj.get("global_options", {}))
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return build_config(ctx.obj.get("config_file"), **merged)


def _load(model_ref: str, unconstrained: bool = False) -> SutModel:
    model = resolve_model(model_ref)
    return model.without_constraints() if unconstrained else model


def _emit(text: str, output: str | None) -> None:
    if output:
        write_text_atomic(Path(output), text)
    else:
        click.echo(text, nl=False)


def _caps_options(func):
    func = click.option("--cap-tests", type=int, default=None, envvar="CLATOOL_CAP_TESTS",
                        help="Largest test space enumerated outright")(func)
    func = click.option("--cap-universe", type=int, default=None, envvar="CLATOOL_CAP_UNIVERSE",
                        help="Largest interaction-set universe built")(func)
    return func


def _format_options(func):
    func = click.option("--format", "fmt", type=click.Choice(FORMATS), default=None,
                        help="Report format")(func)
    func = click.option("--report", "report_path", type=click.Path(), default=None,
                        help="Also write the report to this file")(func)
    return func


def _shape_options(func):
    func = click.option("--d", "d", type=int, default=1, show_default=True,
                        help="Number of interactions per set")(func)
    func = click.option("--t", "t", type=int, required=True, help="Interaction strength")(func)
    func = click.option("--bar-d", is_flag=True, default=False, help="Sets of at most d interactions")(func)
    func = click.option("--bar-t", is_flag=True, default=False, help="Interactions of strength at most t")(func)
    return func


def _seed_option(func):
    return click.option("--seed", type=int, default=None, envvar="CLATOOL_SEED",
                        help="Random seed (default 0)")(func)


def _print_report(report, config: ToolConfig, report_path: str | None, err: bool = False) -> None:
    click.echo(format_report(report, config.format), nl=False, err=err)
    if report_path:
        write_report(Path(report_path), report, "json" if config.format == "text" else config.format)


@click.group()
@click.version_option(version=__version__, prog_name="clatool")
@click.option("--config", "config_file", type=click.Path(exists=True), default=None,
              envvar="CLATOOL_CONFIG", help="Path to YAML config file")
@click.option("--verbose", "-v", is_flag=True, default=False,
              help="Verbose logging")
@click.option("--seed", "global_seed", type=int, default=None, help="Random seed for every subcommand")
@click.option("--cap-tests", "global_cap_tests", type=int, default=None,
              help="Largest test space enumerated outright")
@click.option("--cap-universe", "global_cap_universe", type=int, default=None,
              help="Largest interaction-set universe built")
@click.option("--format", "global_format", type=click.Choice(FORMATS), default=None, help="Report format")
@click.pass_context
def main(ctx, config_file, verbose, global_seed, global_cap_tests, global_cap_universe, global_format):
    """Generate, verify and apply constrained locating arrays."""
    _setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["config_file"] = config_file
    ctx.obj["global_options"] = {
        "seed": global_seed,
        "cap_tests": global_cap_tests,
        "cap_universe": global_cap_universe,
        "format": global_format,
    }


@main.command()
@click.argument("model_ref", metavar="MODEL")
@click.option("--t", "t", type=int, default=2, show_default=True,
              help="Strength of the listed invalid interactions")
@_caps_options
@click.pass_context
@_handle_errors
def validate(ctx, model_ref, t, cap_tests, cap_universe):
    """Parse a model and summarize its valid tests and invalid interactions."""
    config = _config(ctx, cap_tests=cap_tests, cap_universe=cap_universe)
    model = _load(model_ref)
    click.echo(f"Model: {model.name}")
    click.echo("=" * 40)
    click.echo(f"k = {model.k}")
    for factor in model.factors:
        click.echo(f"  {factor.name}: {', '.join(factor.values)}")
    click.echo(f"domain sizes: {list(model.domain_sizes)}")
    click.echo(f"constraint lines: {len(model.constraints)}")
    tests = valid_tests_or_none(model, config.cap_tests)
    if tests is None:
        click.echo(f"valid tests: not enumerated (test space {model.space_size} exceeds cap)")
    else:
        click.echo(f"valid tests = {len(tests)}")
    t = min(t, model.k)
    invalid = invalid_interactions(model, t, config.cap_tests)
    click.echo(f"invalid {t}-way interactions: {len(invalid)}")
    for interaction in invalid:
        click.echo(f"  {model.describe(interaction)}")


@main.command("gen-cca")
@click.argument("model_ref", metavar="MODEL")
@click.option("--t", "t", type=int, required=True, help="Coverage strength")
@_seed_option
@click.option("--output", "-o", type=click.Path(), default=None, help="Array output file")
@_caps_options
@click.pass_context
@_handle_errors
def gen_cca(ctx, model_ref, t, seed, output, cap_tests, cap_universe):
    """Generate a constrained covering array of strength T."""
    config = _config(ctx, seed=seed, cap_tests=cap_tests, cap_universe=cap_universe)
    model = _load(model_ref)
    array = generate_cca(
        model, t, config.seed,
        candidates=config.candidates, retries=config.retries, cap_tests=config.cap_tests,
    )
    _emit(serialize_array(array), output)


@main.command("gen-cla")
@click.argument("model_ref", metavar="MODEL")
@click.option("--t", "t", type=int, required=True, help="Strength located")
@_seed_option
@click.option("--runs", type=int, default=None, help="Reduction runs (default 10)")
@click.option("--workers", type=int, default=None, help="Parallel reduction workers")
@click.option("--output", "-o", type=click.Path(), default=None, help="Array output file")
@_caps_options
@_format_options
@click.pass_context
@_handle_errors
def gen_cla(ctx, model_ref, t, seed, runs, workers, output, cap_tests, cap_universe, fmt, report_path):
    """Generate a (T+1)-CCA and reduce it to a CLA for one set of strength at most T."""
    config = _config(
        ctx, seed=seed, runs=runs, workers=workers,
        cap_tests=cap_tests, cap_universe=cap_universe, format=fmt,
    )
    model = _load(model_ref)
    result = ClaPipeline(model, t, config, progress=True).run()
    _emit(serialize_array(result.cla), output)
    # Report goes to stderr when the array occupies stdout
    _print_report(result.reduction, config, report_path, err=output is None)


@main.command()
@click.argument("model_ref", metavar="MODEL")
@click.argument("array_path", metavar="ARRAY", type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["cca", "cla", "la"]), default="cla", show_default=True)
@_shape_options
@click.option("--unconstrained", is_flag=True, default=False, help="Ignore the model's constraints")
@_caps_options
@_format_options
@click.pass_context
@_handle_errors
def verify(ctx, model_ref, array_path, kind, d, t, bar_d, bar_t, unconstrained,
           cap_tests, cap_universe, fmt, report_path):
    """Verify an array as a CCA, CLA or LA."""
    config = _config(ctx, cap_tests=cap_tests, cap_universe=cap_universe, format=fmt)
    model = _load(model_ref, unconstrained)
    array = load_array(Path(array_path), model)
    if kind == "cca":
        report = verify_cca(model, array, t, cap_tests=config.cap_tests, witness_limit=config.witness_limit)
    elif kind == "la":
        report = verify_la(model, array, d, t, bar_d, bar_t,
                           cap_universe=config.cap_universe, witness_limit=config.witness_limit)
    else:
        report = verify_cla(model, array, d, t, bar_d, bar_t, cap_tests=config.cap_tests,
                            cap_universe=config.cap_universe, witness_limit=config.witness_limit)
    _print_report(report, config, report_path)
    if not report.passed:
        sys.exit(EXIT_FAILED)


@main.command()
@click.argument("model_ref", metavar="MODEL")
@_shape_options
@_caps_options
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default=None, help="Output format")
@click.pass_context
@_handle_errors
def distinguish(ctx, model_ref, d, t, bar_d, bar_t, cap_tests, cap_universe, fmt):
    """List indistinguishable pairs of interaction sets."""
    config = _config(ctx, cap_tests=cap_tests, cap_universe=cap_universe, format=fmt)
    model = _load(model_ref)
    pairs = indistinguishable_pairs(
        model, d, t, bar_d, bar_t, cap_tests=config.cap_tests, cap_universe=config.cap_universe
    )
    described = [[model.describe_set(a), model.describe_set(b)] for a, b in pairs]
    if config.format == "json":
        click.echo(json.dumps({"count": len(pairs), "pairs": described}, indent=2, sort_keys=True))
        return
    for first, second in described:
        click.echo(f"{first}  ~  {second}")
    click.echo(f"{len(pairs)} indistinguishable pairs")


@main.command()
@click.argument("model_ref", metavar="MODEL")
@click.argument("array_path", metavar="ARRAY", type=click.Path(exists=True))
@click.argument("outcomes_path", metavar="OUTCOMES", type=click.Path(exists=True))
@_shape_options
@click.option("--unconstrained", is_flag=True, default=False, help="Ignore the model's constraints")
@_caps_options
@_format_options
@click.pass_context
@_handle_errors
def locate(ctx, model_ref, array_path, outcomes_path, d, t, bar_d, bar_t, unconstrained,
           cap_tests, cap_universe, fmt, report_path):
    """Identify the interaction sets that explain the failing rows."""
    config = _config(ctx, cap_tests=cap_tests, cap_universe=cap_universe, format=fmt)
    model = _load(model_ref, unconstrained)
    array = load_array(Path(array_path), model)
    outcomes = load_outcomes(Path(outcomes_path), array)
    result = locate_faults(model, array, outcomes, d, t, bar_d, bar_t,
                           cap_tests=config.cap_tests, cap_universe=config.cap_universe)
    _print_report(result, config, report_path)
    if not result.explained:
        sys.exit(EXIT_FAILED)


@main.command("min-size")
@click.argument("model_ref", metavar="MODEL")
@_shape_options
@click.option("--budget", type=int, default=None, help="Subsets the search may examine")
@click.option("--output", "-o", type=click.Path(), default=None, help="Write the witness array here")
@_caps_options
@click.pass_context
@_handle_errors
def min_size(ctx, model_ref, d, t, bar_d, bar_t, budget, output, cap_tests, cap_universe):
    """Smallest CLA size by exhaustive search over subsets of the valid tests."""
    config = _config(ctx, oracle_budget=budget, cap_tests=cap_tests, cap_universe=cap_universe)
    model = _load(model_ref)
    size, witness = minimal_cla_size(
        model, d, t, bar_d, bar_t, config.oracle_budget,
        cap_tests=config.cap_tests, cap_universe=config.cap_universe,
    )
    click.echo(f"minimal size: {size}")
    if output:
        write_text_atomic(Path(output), serialize_array(witness))


@main.command()
@click.option("--models", type=int, default=200, show_default=True, help="Random models in the corpus")
@_seed_option
@_format_options
@click.pass_context
@_handle_errors
def selftest(ctx, models, seed, fmt, report_path):
    """Run the property corpus on seeded random models."""
    config = _config(ctx, seed=seed, format=fmt)
    report = run_selftest(models, config.seed, config=config, progress=True)
    _print_report(report, config, report_path)
    if not report.passed:
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    main()

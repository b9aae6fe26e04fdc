"""CLI commands using click."""

import json
import logging
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any

import click
from pydantic import BaseModel, ValidationError

from mimodof import __version__
from mimodof.bounds.dof import analyze_profile
from mimodof.bounds.region import RegionReport, region_example_221, region_report
from mimodof.channel import ChannelDocument, generate_channel
from mimodof.config import Settings, get_settings
from mimodof.exceptions import (
    InvertibilityError,
    MimoDofError,
    NonGenericChannelError,
    ProfileError,
)
from mimodof.models import (
    AntennaProfile,
    DoFReport,
    MonteCarloReport,
    RateCurve,
    SlopeReport,
    Tolerance,
    TransformVariant,
)
from mimodof.simulate import estimate_dof_slope, monte_carlo_transform, rate_curve
from mimodof.transform.construct import TransformDocument, TransformedChannel, run_transform
from mimodof.transform.verify import VerificationReport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_NON_GENERIC = 3

SCHEMAS: dict[str, type[BaseModel]] = {
    "analyze": DoFReport,
    "channel": ChannelDocument,
    "montecarlo": MonteCarloReport,
    "rate-curve": RateCurve,
    "region": RegionReport,
    "slope": SlopeReport,
    "transform": TransformDocument,
    "verification": VerificationReport,
}


class MimoDofGroup(click.Group):
    """Group whose usage errors exit with status 1 and whose commands exit via ctx.exit."""

    def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


class ClickEchoHandler(logging.Handler):
    """Route log records through click.echo so they land on the current stderr."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def _configure_logging(level: str) -> None:
    logger = logging.getLogger("mimodof")
    logger.setLevel(level.upper())
    if not any(isinstance(h, ClickEchoHandler) for h in logger.handlers):
        handler = ClickEchoHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)


@click.group(cls=MimoDofGroup)
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Log construction steps to stderr")
@click.pass_context
def main(ctx: click.Context, verbose: bool) -> None:
    """Degrees of freedom of asymmetric MIMO interference channels."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["settings"] = get_settings()
    except Exception as e:
        ctx.obj["settings"] = None
        ctx.obj["settings_error"] = str(e)
        return
    _configure_logging("DEBUG" if verbose else ctx.obj["settings"].log_level)


def _settings(ctx: click.Context) -> Settings:
    settings: Settings | None = ctx.obj.get("settings")
    if settings is None:
        click.echo(f"Error loading settings: {ctx.obj.get('settings_error')}", err=True)
        ctx.exit(EXIT_USAGE)
    return settings


@contextmanager
def _exit_on_error(ctx: click.Context) -> Iterator[None]:
    try:
        yield
    except (NonGenericChannelError, InvertibilityError) as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_NON_GENERIC)
    except MimoDofError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)


def _parse_profile(ctx: click.Context, param: click.Parameter, value: str) -> AntennaProfile:
    try:
        profile, reordered = AntennaProfile.parse(value)
    except ProfileError as e:
        raise click.BadParameter(str(e)) from e
    if reordered:
        click.echo(f"Note: antenna counts sorted to {profile}", err=True)
    return profile


def _parse_powers(
    ctx: click.Context, param: click.Parameter, value: str | None
) -> list[float] | None:
    if value is None:
        return None
    try:
        return [float(p) for p in value.split(",") if p.strip()]
    except ValueError as e:
        raise click.BadParameter(f"Cannot parse powers from {value!r}") from e


def _parse_objective(
    ctx: click.Context, param: click.Parameter, value: str
) -> tuple[Fraction, Fraction]:
    try:
        a, b = (Fraction(part.strip()) for part in value.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise click.BadParameter(f"Expected two rationals 'a,b', got {value!r}") from e
    return a, b


def profile_option(f: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--M",
        "profile",
        required=True,
        callback=_parse_profile,
        help="Comma-separated antenna counts, e.g. 2,2,1",
    )(f)


def seed_option(f: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--seed", type=click.IntRange(min=0), help="Seed (default from settings)"
    )(f)


def tolerance_options(f: Callable[..., Any]) -> Callable[..., Any]:
    f = click.option("--rank-tol", type=float, help="Relative singular-value cutoff")(f)
    return click.option("--zero-tol", type=float, help="Relative residual for required zeros")(f)


def output_options(*formats: str, default: str = "json") -> Callable[..., Any]:
    def decorate(f: Callable[..., Any]) -> Callable[..., Any]:
        f = click.option(
            "--format",
            "fmt",
            type=click.Choice(formats),
            default=default,
            show_default=True,
            help="Output format",
        )(f)
        return click.option(
            "--out", type=click.Path(dir_okay=False, path_type=Path), help="Write to file"
        )(f)

    return decorate


def _tolerance(settings: Settings, rank_tol: float | None, zero_tol: float | None) -> Tolerance:
    overrides = {"rank_rel_tol": rank_tol, "zero_rel_tol": zero_tol}
    try:
        return settings.model_copy(
            update={name: value for name, value in overrides.items() if value is not None}
        ).tolerance()
    except ValidationError as e:
        raise click.BadParameter(e.errors()[0]["msg"], param_hint="--rank-tol/--zero-tol") from e


def _emit(text: str, out: Path | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        click.echo(f"Wrote {out}", err=True)


def _dump(document: dict[str, Any]) -> str:
    return json.dumps(document, indent=2)


@main.command()
@profile_option
@output_options("json", "text")
@click.pass_context
def analyze(ctx: click.Context, profile: AntennaProfile, fmt: str, out: Path | None) -> None:
    """Exact sum DoF of a profile with every inner and outer bound."""
    with _exit_on_error(ctx):
        report = analyze_profile(profile)

    if fmt == "json":
        _emit(report.model_dump_json(indent=2), out)
        return

    lines = [
        f"profile: {profile}",
        f"sum DoF: {report.theorem} ({report.regime.value})",
        f"inner bound: {report.inner}",
        f"decomposition bound: {report.decomposition}",
    ]
    if report.outer_coop is not None:
        witness = ",".join(str(u) for u in report.witness or [])
        tight = "tight" if report.coop_tight else "loose"
        lines.append(f"cooperation bound: {report.outer_coop} with S = {{{witness}}} ({tight})")
    if report.partition is not None:
        groups = " ".join("{" + ",".join(map(str, g)) + "}" for g in report.partition)
        lines.append(
            f"partition: {groups} sums {report.partition_sums} bound {report.outer_partition}"
        )
    _emit("\n".join(lines), out)


def _residual_table(result: TransformedChannel) -> list[str]:
    rows = ["seed,receiver,transmitter,row_block,col_block,rows,cols,residual"]
    rows += [
        f"{result.seed},{r.receiver},{r.transmitter},{r.row_block},{r.col_block},"
        f"{r.rows},{r.cols},{r.residual!r}"
        for r in result.verification.residuals
    ]
    return rows


@main.command()
@profile_option
@click.option(
    "--variant",
    type=click.Choice([v.value for v in TransformVariant]),
    default=TransformVariant.GENERAL_3USER.value,
    show_default=True,
)
@seed_option
@click.option("--retries", type=click.IntRange(min=0), default=0, help="Free-column redraws")
@tolerance_options
@output_options("json", "text", "csv")
@click.pass_context
def transform(
    ctx: click.Context,
    profile: AntennaProfile,
    variant: str,
    seed: int | None,
    retries: int,
    rank_tol: float | None,
    zero_tol: float | None,
    fmt: str,
    out: Path | None,
) -> None:
    """Build and verify a DoF-preserving transform of a random channel.

    Exits with status 2 when verification fails and 3 when the channel is
    not generic enough for the construction.
    """
    settings = _settings(ctx)
    tol = _tolerance(settings, rank_tol, zero_tol)
    seed = settings.seed if seed is None else seed

    with _exit_on_error(ctx):
        ch = generate_channel(profile, seed)
        result = run_transform(
            ch, TransformVariant(variant), tol, settings.condition_limit, retries=retries
        )

    report = result.verification
    if fmt == "json":
        _emit(result.to_document().model_dump_json(indent=2), out)
    elif fmt == "csv":
        _emit("\n".join(_residual_table(result)), out)
    else:
        lines = [
            f"profile: {profile}  variant: {variant}  seed: {seed}",
            result.pattern.render(),
            f"required zeros: {result.pattern.scalar_zero_count()}",
            f"max residual: {report.max_residual:.3e} (limit {report.zero_rel_tol:g})",
            f"max condition: {report.max_condition:.3e} (limit {report.condition_limit:g})",
            "PASS" if report.passed else "FAIL",
        ]
        _emit("\n".join(lines), out)

    ctx.exit(EXIT_OK if report.passed else EXIT_VERIFICATION)


@main.command()
@profile_option
@seed_option
@click.option("--powers", callback=_parse_powers, help="Comma-separated linear powers")
@output_options("csv", "json", "text", default="csv")
@click.pass_context
def slope(
    ctx: click.Context,
    profile: AntennaProfile,
    seed: int | None,
    powers: list[float] | None,
    fmt: str,
    out: Path | None,
) -> None:
    """Rate curve and fitted DoF slope of the dominant-user scheme."""
    settings = _settings(ctx)
    seed = settings.seed if seed is None else seed
    powers = settings.powers if powers is None else powers

    with _exit_on_error(ctx):
        curve = rate_curve(generate_channel(profile, seed), powers)
        value = estimate_dof_slope(curve)

    if fmt == "csv":
        _emit(curve.to_csv() + f"seed,{seed}\nslope,{value!r}", out)
    elif fmt == "json":
        report = SlopeReport(
            profile=list(profile.M),
            points=curve.points,
            scheme=curve.scheme,
            seed=curve.seed,
            slope=value,
        )
        _emit(report.model_dump_json(indent=2), out)
    else:
        lines = [f"{p.power:>12.4g}  {p.rate_bits:10.4f}" for p in curve.points]
        lines.append(f"slope: {value:.4f} (M1 = {profile.M1})")
        _emit("\n".join(lines), out)


@main.command()
@click.option(
    "--objective",
    default="2,1",
    show_default=True,
    callback=_parse_objective,
    help="Weights (a,b) of a*d + b*d'",
)
@output_options("json", "text", "csv")
@click.pass_context
def region(
    ctx: click.Context, objective: tuple[Fraction, Fraction], fmt: str, out: Path | None
) -> None:
    """Vertices of the (2,2,1) dimension-counting region and a linear maximum over it."""
    with _exit_on_error(ctx):
        report = region_report(region_example_221(), objective)

    if fmt == "json":
        _emit(report.model_dump_json(indent=2), out)
    elif fmt == "csv":
        rows = ["d,d_prime,upper"]
        rows += [f"{d},{dp},{int((d, dp) in report.upper_boundary)}" for d, dp in report.vertices]
        _emit("\n".join(rows), out)
    else:
        lines = ["constraints:", *(f"  {c}" for c in report.constraints), "vertices:"]
        lines += [f"  ({d}, {dp})" for d, dp in report.vertices]
        a, b = report.objective
        d, dp = report.argmax
        lines.append(f"max {a}*d + {b}*d' = {report.maximum} at ({d}, {dp})")
        _emit("\n".join(lines), out)


@main.command()
@profile_option
@click.option(
    "--variant",
    type=click.Choice([v.value for v in TransformVariant]),
    default=TransformVariant.GENERAL_3USER.value,
    show_default=True,
)
@click.option("--trials", type=click.IntRange(min=1), help="Trials (default from settings)")
@seed_option
@click.option("--workers", type=click.IntRange(min=1), help="Thread pool size")
@tolerance_options
@output_options("json", "text")
@click.pass_context
def montecarlo(
    ctx: click.Context,
    profile: AntennaProfile,
    variant: str,
    trials: int | None,
    seed: int | None,
    workers: int | None,
    rank_tol: float | None,
    zero_tol: float | None,
    fmt: str,
    out: Path | None,
) -> None:
    """Run a transform on many random channels; exits 2 unless every trial passes."""
    settings = _settings(ctx)
    tol = _tolerance(settings, rank_tol, zero_tol)

    with _exit_on_error(ctx):
        report = monte_carlo_transform(
            profile,
            TransformVariant(variant),
            trials=settings.trials if trials is None else trials,
            seed=settings.seed if seed is None else seed,
            tol=tol,
            condition_limit=settings.condition_limit,
            workers=settings.workers if workers is None else workers,
        )

    if fmt == "json":
        _emit(report.model_dump_json(indent=2), out)
    else:
        lines = [
            f"profile: {profile}  variant: {variant}  seed: {report.seed}",
            f"passed: {report.successes}/{report.trials} ({report.success_fraction:.1%})",
            f"worst residual: {report.worst_residual:.3e}",
            f"worst condition: {report.worst_condition:.3e}",
        ]
        lines += [f"  trial {f.trial} (seed {f.seed}): {f.message}" for f in report.failures]
        _emit("\n".join(lines), out)

    ctx.exit(EXIT_OK if report.successes == report.trials else EXIT_VERIFICATION)


@main.command()
@click.argument("document", type=click.Choice(sorted(SCHEMAS)))
def schema(document: str) -> None:
    """Print the JSON schema of an output document."""
    click.echo(_dump(SCHEMAS[document].model_json_schema(mode="serialization")))


if __name__ == "__main__":
    main()

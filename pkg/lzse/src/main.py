"""
lzse - command-line entry point

    compress     factorize a file and write the factor stream
    decompress   rebuild the original file from a factor stream
    stats        factorize with auditing and print the report
    verify       compare the pipelines with the brute-force oracles

Exit codes: 0 ok, 1 verification mismatch or library error, 2 usage error,
3 I/O error.
"""

import sys
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from rich.console import Console
from rich.table import Table

# Add the project root to the path so `python lzse/src/main.py` works from a checkout
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from lzse.src.models.schemas import Algorithm, AuditReport, VerificationResult
from lzse.src.services.audit_service import AuditService
from lzse.src.services.codec_service import CodecService
from lzse.src.services.factorization_service import FactorizationService
from lzse.src.utils.config import LzseSettings, get_settings, parse_epsilon
from lzse.src.utils.errors import InvalidInputError, LzseError
from lzse.src.utils.logging import configure_logging, log_error_with_context, logger

EXIT_MISMATCH = 1
EXIT_IO = 3


def _epsilon_option(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[Fraction]:
    if value is None:
        return None
    try:
        return parse_epsilon(value)
    except InvalidInputError as e:
        raise click.BadParameter(str(e), ctx=ctx, param=param) from e


def _handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Map library and I/O failures onto exit codes."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except LzseError as e:
            log_error_with_context(type(e).__name__, e.message, e.context)
            click.echo(f"error: {e}", err=True)
            sys.exit(e.exit_code)
        except OSError as e:
            log_error_with_context("io", str(e), {"filename": getattr(e, "filename", None)})
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


def algo_option(command: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--algo",
        type=click.Choice([a.value for a in Algorithm]),
        default=None,
        help="lz77, lz77c (classic) or lz78 [default from settings]",
    )(command)


def epsilon_option(command: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--epsilon",
        callback=_epsilon_option,
        default=None,
        metavar="NUM/DEN",
        help="Helper-arena fraction, 0 < epsilon <= 1 [default from settings]",
    )(command)


def u32_option(command: Callable[..., Any]) -> Callable[..., Any]:
    return click.option("--u32", is_flag=True, default=False, help="Big-endian 32-bit symbols instead of bytes")(command)


def output_option(command: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--output", "-o",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Output file [default: stdout]",
    )(command)


def _settings(ctx: click.Context) -> LzseSettings:
    return ctx.obj["settings"]


def _algorithm(settings: LzseSettings, algo: Optional[str]) -> Algorithm:
    return Algorithm(algo) if algo else settings.factorization.algorithm


def _epsilon(settings: LzseSettings, epsilon: Optional[Fraction]) -> Fraction:
    return epsilon if epsilon is not None else settings.factorization.epsilon_fraction


def _u32(settings: LzseSettings, u32: bool) -> bool:
    return u32 or settings.codec.u32


def _write(data: bytes, output: Optional[Path]) -> None:
    if output is None:
        stream = click.get_binary_stream("stdout")
        stream.write(data)
        stream.flush()
    else:
        output.write_bytes(data)


@click.group()
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]), default=None)
@click.option("--log-json", is_flag=True, default=False, help="Render log records as JSON lines")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], log_json: bool) -> None:
    """Space-efficient LZ77 and LZ78 factorization."""
    try:
        settings = get_settings()
    except ValueError as e:
        raise click.UsageError(f"invalid settings: {e}") from e
    configure_logging(
        log_level=log_level or settings.log_level.value,
        json_logs=log_json or settings.log_json,
        service_name=settings.service_name,
    )
    logger.debug("lzse starting", settings=settings.to_dict())
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@algo_option
@epsilon_option
@u32_option
@output_option
@click.pass_context
@_handle_errors
def compress(
    ctx: click.Context,
    input_path: Path,
    algo: Optional[str],
    epsilon: Optional[Fraction],
    u32: bool,
    output: Optional[Path],
) -> None:
    """Factorize INPUT_PATH and write the factor stream."""
    settings = _settings(ctx)
    algorithm = _algorithm(settings, algo)
    eps = _epsilon(settings, epsilon)

    service = FactorizationService(settings)
    text = service.load_text(input_path, _u32(settings, u32))
    audit = settings.factorization.audit
    run = service.run(text, algorithm, eps, keep_trail=audit)
    if audit:
        # Failed bounds are logged; the stream is still written.
        AuditService().report(run, algorithm)
    stream = CodecService(settings.codec).encode(run.factorization, algorithm, eps)
    _write(stream, output)
    logger.info("Compressed", path=str(input_path), algorithm=algorithm.value, z=run.factorization.z,
                stream_bytes=len(stream))


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@u32_option
@click.option(
    "--strip-sentinel/--keep-sentinel",
    default=None,
    help="Drop the trailing sentinel factor or keep it as a zero symbol",
)
@output_option
@click.pass_context
@_handle_errors
def decompress(
    ctx: click.Context,
    input_path: Path,
    u32: bool,
    strip_sentinel: Optional[bool],
    output: Optional[Path],
) -> None:
    """Rebuild the original file from the factor stream INPUT_PATH."""
    settings = _settings(ctx)
    codec = CodecService(settings.codec.model_copy(update={"u32": _u32(settings, u32)}))
    header, symbols = codec.decode(input_path.read_bytes(), strip_sentinel)
    _write(codec.symbols_to_bytes(symbols), output)
    logger.info("Decompressed", path=str(input_path), algorithm=header.algorithm.value, n=header.n)


def _print_report(report: AuditReport) -> None:
    console = Console(highlight=False)

    summary = Table(title=f"{report.algorithm.value}  n={report.n}  epsilon={report.epsilon}")
    summary.add_column("quantity")
    summary.add_column("value", justify="right")
    summary.add_row("z", str(report.z))
    for key, value in report.counts.items():
        summary.add_row(key, str(value))
    summary.add_row("arena_bits", str(report.arena_bits))
    summary.add_row("arena_budget_bits", str(report.arena_budget_bits))
    console.print(summary)

    bits = Table(title="auxiliary structures")
    bits.add_column("structure")
    bits.add_column("bits", justify="right")
    bits.add_column("bits / n", justify="right")
    for key, value in report.structure_bits.items():
        bits.add_row(key, str(value), f"{value / report.n:.2f}")
    console.print(bits)

    checks = Table(title="bounds")
    checks.add_column("check")
    checks.add_column("lhs", justify="right")
    checks.add_column("rhs", justify="right")
    checks.add_column("status")
    for check in report.checks:
        checks.add_row(check.name, f"{check.lhs:g}", f"{check.rhs:g}", "ok" if check.holds else "[red]FAIL[/red]")
    console.print(checks)

    timings = Table(title="phases")
    timings.add_column("phase")
    timings.add_column("ms", justify="right")
    for key, value in report.timings_ms.items():
        timings.add_row(key, f"{value:.3f}")
    console.print(timings)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@algo_option
@epsilon_option
@u32_option
@click.option(
    "--pipeline",
    type=click.Choice(["three_round", "extra_output"]),
    default="three_round",
    help="LZ77 pipeline to audit",
)
@click.option("--format", "fmt", type=click.Choice(["text", "kv"]), default="text")
@click.pass_context
@_handle_errors
def stats(
    ctx: click.Context,
    input_path: Path,
    algo: Optional[str],
    epsilon: Optional[Fraction],
    u32: bool,
    pipeline: str,
    fmt: str,
) -> None:
    """Factorize INPUT_PATH with auditing and print the report."""
    settings = _settings(ctx)
    algorithm = _algorithm(settings, algo)
    service = FactorizationService(settings)
    text = service.load_text(input_path, _u32(settings, u32))
    run = service.run(text, algorithm, _epsilon(settings, epsilon), pipeline, keep_trail=True)
    report = AuditService().report(run, algorithm)

    if fmt == "kv":
        for key, value in report.as_key_values().items():
            click.echo(f"{key}={value}")
    else:
        _print_report(report)
    if not report.all_hold:
        sys.exit(EXIT_MISMATCH)


def _describe(results: List[VerificationResult]) -> List[str]:
    lines = []
    for result in results:
        label = f"{result.algorithm.value} {result.pipeline} vs {result.oracle}"
        if result.matched:
            lines.append(f"ok {label} z={result.z}")
            continue
        m = result.mismatch
        lines.append(f"MISMATCH {label} at factor {m.index}")
        lines.append(f"  expected {m.expected.model_dump() if m.expected else None}")
        lines.append(f"  actual   {m.actual.model_dump() if m.actual else None}")
    return lines


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@algo_option
@epsilon_option
@u32_option
@click.option("--inject-fault", is_flag=True, default=False, hidden=True)
@click.pass_context
@_handle_errors
def verify(
    ctx: click.Context,
    input_path: Path,
    algo: Optional[str],
    epsilon: Optional[Fraction],
    u32: bool,
    inject_fault: bool,
) -> None:
    """Compare the factorization of INPUT_PATH with the oracles."""
    settings = _settings(ctx)
    service = FactorizationService(settings)
    text = service.load_text(input_path, _u32(settings, u32))
    results = service.verify(text, _algorithm(settings, algo), _epsilon(settings, epsilon), inject_fault)
    for line in _describe(results):
        click.echo(line)
    if not all(result.matched for result in results):
        sys.exit(EXIT_MISMATCH)


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()

"""
Command-line front end.

    qrainbow dict check FILE
    qrainbow table gen | table buckets
    qrainbow crack HEX
    qrainbow bench noise | bench success

Exit codes: 0 success, 1 NOT_FOUND, 2 bad input (dictionary, hex, config),
3 invalid generation or simulation parameters, 4 table/dictionary/bucket or
digest mismatch.
"""
import logging
from functools import wraps
from os import makedirs
from os.path import dirname
from time import perf_counter

import click
import polars as pl

from . import buckets as bkt
from . import grover, rainbow
from .config import RunConfig, load_config, parse_p_grid
from .dictgen import load_dictionary
from .errors import (ConfigError, ConfigurationError, DictionaryParseError, IndexRangeError, SimulationError,
                     TableMismatchError)
from .globalvars import (CSV_FLOAT_PRECISION, ENGINES, HASH_ALGORITHMS, NOISE_CSV_FILEPATH, NOISE_QUBITS,
                         NOISE_TAU, SUCCESS_CSV_FILEPATH, SUCCESS_TAUS)

logger = logging.getLogger(__name__)

EXIT_CODES = [
    (DictionaryParseError, 2),
    (ConfigError, 2),
    (ConfigurationError, 3),
    (SimulationError, 3),
    (IndexRangeError, 3),
    (TableMismatchError, 4),
]


def handle_errors(command):
    """Map library exceptions to the exit-code contract."""
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except tuple(cls for cls, _ in EXIT_CODES) as e:
            code = next(code for cls, code in EXIT_CODES if isinstance(e, cls))
            click.echo(f"error: {e}", err=True)
            raise click.exceptions.Exit(code) from e
    return wrapper


def bucket_path(table_path: str) -> str:
    return table_path + ".bkt"


def _ensure_parent(path: str) -> None:
    parent = dirname(path)
    if parent:
        makedirs(parent, exist_ok=True)


def _write_csv(rows: list[dict], path: str) -> None:
    _ensure_parent(path)
    pl.DataFrame(rows).write_csv(path, float_precision=CSV_FLOAT_PRECISION)
    logger.info("wrote %d rows to %s", len(rows), path)


def _config(ctx: click.Context, **overrides) -> RunConfig:
    base: RunConfig = ctx.obj["config"]
    return base.with_overrides(**overrides)


table_options = [
    click.option("--dict", "dict_path", type=click.Path(dir_okay=False), help="Dictionary definition file."),
    click.option("--table", type=click.Path(dir_okay=False), help="RTBL1 table file."),
]

generation_options = [
    click.option("--seed", type=int),
    click.option("--t", "t", type=int, help="Chain length."),
    click.option("--m", "m", type=int, help="Number of chains."),
    click.option("--k", "k", type=int, help="Bucket modulus (power of two)."),
    click.option("--kappa", type=int, help="Bit width of endpoint hashes."),
    click.option("--hash", "hash_algorithm", type=click.Choice(HASH_ALGORITHMS)),
]


def add_options(options):
    def decorator(f):
        for option in reversed(options):
            f = option(f)
        return f
    return decorator


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key=value file; flags override its values.")
@click.option("--verbose", is_flag=True, help="Log progress at INFO level.")
@click.pass_context
@handle_errors
def main(ctx: click.Context, config_path: str | None, verbose: bool):
    """Hybrid classical/quantum rainbow-table toolkit."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(asctime)s - %(levelname)s - %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["config"] = load_config(config_path)
    ctx.obj["verbose"] = verbose


@main.group("dict")
def dict_group():
    """Smart dictionary tools."""


@dict_group.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@handle_errors
def dict_check(path: str):
    """Parse a dictionary file and report its plaintext space."""
    dictionary = load_dictionary(path)
    click.echo(f"pattern={dictionary.pattern} N={dictionary.size}")
    for pos, (cls, size, ratio) in enumerate(dictionary.describe()):
        click.echo(f"  {pos}: class={cls} size={size} ratio={ratio}")


@main.group("table")
def table_group():
    """Rainbow table generation and indexing."""


@table_group.command("gen")
@add_options(table_options + generation_options)
@click.option("--n-jobs", type=int, help="Worker threads for chain generation.")
@click.option("--coverage", "report_coverage", is_flag=True,
              help="Replay every chain to report the covered share of the plaintext space.")
@click.pass_context
@handle_errors
def table_gen(ctx: click.Context, report_coverage: bool, **flags):
    """Generate a rainbow table over the smart dictionary."""
    config = _config(ctx, **flags)
    dictionary = load_dictionary(config.dict_path)
    params = rainbow.TableParams(dictionary, config.t, config.m, config.k, config.kappa,
                                 config.hash_algorithm, config.seed)

    started = perf_counter()
    table = rainbow.generate_table(params, n_jobs=config.n_jobs, verbose=ctx.obj["verbose"])
    elapsed = perf_counter() - started

    _ensure_parent(config.table)
    rainbow.save_table(table, config.table)
    bkt.save(bkt.build(table), bucket_path(config.table))

    summary = (f"m={params.m} t={params.t} N={params.space_size} elapsed={elapsed:.3f}s "
               f"hash_evals={table.hash_evals}")
    if report_coverage:
        summary += f" coverage={rainbow.coverage(table):.6f}"
    click.echo(summary)


@table_group.command("buckets")
@add_options(table_options)
@click.pass_context
@handle_errors
def table_buckets(ctx: click.Context, **flags):
    """Build (or validate) the bucket sidecar of a table."""
    config = _config(ctx, **flags)
    table = rainbow.load_table(config.table, load_dictionary(config.dict_path))
    bmap = bkt.load_or_build(table, bucket_path(config.table))
    click.echo(f"buckets={len(bmap.buckets)} endpoints={len(table.rows)} k={bmap.k} kappa={bmap.kappa}")


def _check_table_params(table: rainbow.RainbowTable, flags: dict) -> None:
    """Explicit generation flags must agree with the loaded table's header."""
    p = table.params
    stored = {"t": p.t, "m": p.m, "k": p.k, "kappa": p.kappa, "hash_algorithm": p.hash_algorithm, "seed": p.seed}
    for key, value in flags.items():
        if key in stored and value is not None and value != stored[key]:
            raise TableMismatchError(f"--{key} = {value} but the table was built with {stored[key]}")


@main.command("crack")
@click.argument("target_hex")
@add_options(table_options + generation_options)
@click.option("--engine", type=click.Choice(ENGINES), help="Bucket search engine.")
@click.pass_context
@handle_errors
def crack(ctx: click.Context, target_hex: str, **flags):
    """Recover a plaintext for a hex-encoded digest."""
    try:
        target = bytes.fromhex(target_hex)
    except ValueError as e:
        raise ConfigError(f"malformed hex digest {target_hex!r}") from e
    if not target:
        raise ConfigError("empty target digest")

    config = _config(ctx, **flags)
    table = rainbow.load_table(config.table, load_dictionary(config.dict_path))
    _check_table_params(table, flags)
    bmap = bkt.load_or_build(table, bucket_path(config.table))

    outcome = rainbow.search(target, table, bmap, rainbow.get_engine(config.engine))
    counters = (f"hash_evals={outcome.hash_evals} oracle_calls={outcome.oracle_calls} "
                f"chains_examined={outcome.chains_examined} false_alarms={outcome.false_alarms}")
    if not outcome.found:
        click.echo(f"NOT_FOUND {counters}")
        raise click.exceptions.Exit(1)
    click.echo(f"{outcome.result} {counters}")


@main.group("bench")
def bench_group():
    """Grover variant experiments."""


@bench_group.command("noise")
@click.option("--n", "n", type=int, help=f"Register size; defaults to the length of tau ({NOISE_QUBITS} for the default tau).")
@click.option("--tau", default=NOISE_TAU, show_default=True)
@click.option("--p-grid", help="Depolarizing grid as a:b:step.")
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--shots", type=int, help="Sample this many shots instead of exact probabilities.")
@click.option("--seed", type=int)
@click.option("--n-jobs", type=int)
@click.pass_context
@handle_errors
def bench_noise(ctx: click.Context, n: int | None, tau: str, **flags):
    """Success probability of every variant along a depolarizing sweep."""
    config = _config(ctx, **flags)
    spec = grover.TargetSpec(n or len(tau), tau)
    rows = grover.noise_sweep(spec, parse_p_grid(config.p_grid), shots=config.shots,
                              seed=config.seed, n_jobs=config.n_jobs)
    _write_csv(rows, config.out or NOISE_CSV_FILEPATH)


@bench_group.command("success")
@click.option("--tau", "taus", multiple=True, help="Target bitstring; repeatable.")
@click.option("--exhaustive", is_flag=True, help="Every tau of each register size.")
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--shots", type=int)
@click.option("--seed", type=int)
@click.option("--n-jobs", type=int)
@click.pass_context
@handle_errors
def bench_success(ctx: click.Context, taus: tuple[str, ...], exhaustive: bool, **flags):
    """Noiseless success probability of every variant for a set of targets."""
    config = _config(ctx, **flags)
    for tau in taus:
        grover.TargetSpec(len(tau), tau)
    rows = grover.success_sweep(list(taus) or SUCCESS_TAUS, exhaustive=exhaustive, shots=config.shots,
                                seed=config.seed, n_jobs=config.n_jobs)
    _write_csv(rows, config.out or SUCCESS_CSV_FILEPATH)


if __name__ == "__main__":
    main()

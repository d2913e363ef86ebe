"""
wllab CLI - Batch Refinement, Comparison and Acceptance Suites

Commands:
    wllab refine GRAPH --family wl --k 2 --out arcs.json
    wllab compare A.json B.json
    wllab suite --manifest wl_c_collapse --out report.json
    wllab generate cycle --param n=5 --out c5.ccg.json
    wllab corpus --out corpus/

Exit codes: 0 ok, 1 usage, 2 parse or shape, 3 cap exceeded,
4 similarity undecided, 5 failed PAPER expectation.
"""

import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .config import get_logging_config, override_settings
from .exceptions import (
    CapExceededError, ParseError, ShapeMismatchError, SimilarityUndecidedError, WllabError,
)
from .export import dumps, export_service
from .generators import (
    GRAPH_SUFFIX, default_corpus, encode_graph, encode_partition, graph_name, named, read_graph,
    read_partition, write_graph,
)
from .partition import compare
from .schemas import FamilyName, RunConfig, SuiteReport
from .spas import SpasId, spas_apply
from .suite import SuiteConfig, SuiteRunner, load_manifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_UNDECIDED = 4
EXIT_EXPECTATION = 5

console = Console()


def exit_code_for(error: Exception) -> int:
    """Stable exit code of a domain error"""
    if isinstance(error, (ParseError, ShapeMismatchError)):
        return EXIT_PARSE
    if isinstance(error, CapExceededError):
        return EXIT_CAP
    if isinstance(error, SimilarityUndecidedError):
        return EXIT_UNDECIDED
    return EXIT_USAGE


class WllabGroup(click.Group):
    """Maps usage errors to exit 1 and domain errors to their exit codes"""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise
        except WllabError as e:
            logger.error(str(e))
            click.echo(f"Error: {e}", err=True)
            ctx.exit(exit_code_for(e))


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = "DEBUG" if verbose else "WARNING" if quiet else None
    logging.config.dictConfig(get_logging_config(level))


def _run_config(**kwargs: Any) -> RunConfig:
    try:
        return RunConfig(**kwargs)
    except PydanticValidationError as e:
        raise click.UsageError(e.errors()[0]["msg"]) from e


def _emit(payload, out: Optional[str]) -> None:
    if out:
        export_service.write_json(out, payload)
    else:
        click.echo(dumps(payload), nl=False)


# =============================================================================
# COMMANDS
# =============================================================================

@click.group(cls=WllabGroup)
@click.version_option(__version__, prog_name="wllab")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
@click.option("-q", "--quiet", is_flag=True, help="Warnings only")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool):
    """Weisfeiler-Leman, counting and invertible-map refinement"""
    _configure_logging(verbose, quiet)
    ctx.ensure_object(dict)
    ctx.obj["verbosity"] = 1 if verbose else -1 if quiet else 0


@cli.command()
@click.argument("graph", type=click.Path(dir_okay=False))
@click.option("--family", type=click.Choice([f.value for f in FamilyName]), default="wl", show_default=True)
@click.option("--k", "k", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--r", "r", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--field", "field_name", default="q", show_default=True, help="q or gf:p")
@click.option("--cap-tuples", type=int, default=None)
@click.option("--cap-sim", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--allow-large", is_flag=True, help="Permit caps above their defaults")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def refine(ctx: click.Context, graph: str, family: str, k: int, r: int, field_name: str,
           cap_tuples: Optional[int], cap_sim: Optional[int], seed: Optional[int],
           allow_large: bool, out: Optional[str]):
    """Arc partition of GRAPH at level k of a scheme"""
    config = _run_config(
        command="refine", inputs=[graph], family=family, k=k, r=r, field=field_name,
        cap_tuples=cap_tuples, cap_sim=cap_sim, seed=seed, out=out, allow_large=allow_large,
        verbosity=ctx.obj["verbosity"],
    )
    options = [f"field={config.field}"] if family in ("im", "imt", "imr") else []
    if config.r != 1:
        options.insert(0, f"r={config.r}")
    s = SpasId.parse(",".join([config.family.value] + options))
    with override_settings(cap_tuples=config.cap_tuples, cap_sim=config.cap_sim, seed=config.seed):
        g = read_graph(graph)
        partition = spas_apply(s, g, config.k)
    iterations = int(partition.metadata.get("iterations", 0))
    doc = encode_partition(partition, iterations, {
        "graph": graph_name(g), "spas": s.label, "k": config.k,
    })
    _emit(doc, config.out)
    if config.out:
        table = Table(title=f"{s.label} level {config.k} on {graph_name(g)}")
        for column in ("n", "classes", "iterations", "output"):
            table.add_column(column)
        table.add_row(str(g.n), str(partition.class_count), str(iterations), config.out)
        console.print(table)


@cli.command(name="compare")
@click.argument("left", type=click.Path(dir_okay=False))
@click.argument("right", type=click.Path(dir_okay=False))
def compare_cmd(left: str, right: str):
    """Refinement relation between two partition files"""
    outcome = compare(read_partition(left), read_partition(right))
    click.echo(outcome.value)


def _suite_table(report: SuiteReport) -> Table:
    table = Table(title=f"suite {report.manifest}")
    for column in ("check", "tag", "graph", "outcome", "passed"):
        table.add_column(column)
    for check in report.checks:
        table.add_row(
            check.description or check.kind.value, check.tag.value, check.graph or "-",
            str(check.outcome), "yes" if check.passed else "NO",
        )
    return table


@cli.command()
@click.option("--manifest", required=True, help="Manifest path or bundled name")
@click.option("--corpus", "corpus_dir", type=click.Path(file_okay=False, exists=True), default=None,
              help="Directory of .ccg.json graphs; default corpus otherwise")
@click.option("--cap-tuples", type=int, default=None)
@click.option("--cap-sim", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--allow-large", is_flag=True)
@click.option("--extended", is_flag=True, help="Run checks marked extended")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def suite(ctx: click.Context, manifest: str, corpus_dir: Optional[str], cap_tuples: Optional[int],
          cap_sim: Optional[int], seed: Optional[int], allow_large: bool, extended: bool, out: Optional[str]):
    """Run a manifest of expectations over a corpus"""
    config = _run_config(
        command="suite", inputs=[corpus_dir] if corpus_dir else [], manifest=manifest,
        cap_tuples=cap_tuples, cap_sim=cap_sim, seed=seed, out=out, allow_large=allow_large,
        extended=extended, verbosity=ctx.obj["verbosity"],
    )
    loaded = load_manifest(config.manifest)
    if corpus_dir:
        corpus = [read_graph(p) for p in sorted(Path(corpus_dir).glob(f"*{GRAPH_SUFFIX}"))]
        corpus_id = Path(corpus_dir).name
    else:
        corpus = default_corpus()
        corpus_id = "default"
    with override_settings(cap_tuples=config.cap_tuples, cap_sim=config.cap_sim, seed=config.seed,
                           extended=config.extended or None):
        report = SuiteRunner(corpus, SuiteConfig(corpus_id=corpus_id)).run(loaded)
    _emit(report, config.out)
    if config.out:
        console.print(_suite_table(report))
    if report.failed_paper:
        click.echo(f"{report.failed_paper} PAPER expectation(s) failed", err=True)
        ctx.exit(EXIT_EXPECTATION)


def _parse_params(params: Sequence[str]) -> Dict[str, Any]:
    parsed: Dict[str, Any] = {}
    for item in params:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--param")
        parsed[key] = int(value) if value.lstrip("-").isdigit() else value
    return parsed


@cli.command()
@click.argument("name")
@click.option("--param", "params", multiple=True, help="Construction parameter key=value")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def generate(name: str, params: List[str], out: Optional[str]):
    """Write a named graph as a GraphDoc"""
    g = named(name, **_parse_params(params))
    if out:
        write_graph(g, out)
    else:
        click.echo(dumps(encode_graph(g)), nl=False)


@cli.command()
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--max-n", type=click.IntRange(min=1), default=None)
def corpus(out: str, max_n: Optional[int]):
    """Write the default corpus, one GraphDoc per graph"""
    graphs = default_corpus(max_n)
    table = Table(title="corpus")
    table.add_column("graph")
    table.add_column("n")
    for g in graphs:
        name = graph_name(g)
        write_graph(g, Path(out) / f"{name}{GRAPH_SUFFIX}")
        table.add_row(name, str(g.n))
    console.print(table)


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Console entry point"""
    cli.main(args=list(argv) if argv is not None else None, prog_name="wllab")


if __name__ == "__main__":
    main(sys.argv[1:])

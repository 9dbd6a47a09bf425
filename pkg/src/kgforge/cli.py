"""Command-line interface.

Exit codes: 0 success, 1 usage error (bad flags/arguments), 2 data error
(unreadable files, malformed CSV, analysis preconditions).  Human-readable
text goes to stdout by default; ``--json`` switches to machine-readable
output, and ``--out`` writes to a file instead.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .correlation import METHODS, correlation_matrix
from .errors import KgforgeError
from .granger import DiscoveryConfig, discover
from .ingest import ENCODING_METHODS, IMPUTATION_METHODS, PreprocessConfig, preprocess
from .kg import build_graph, to_json, to_turtle
from .synth import BUILTIN_SPECS, generate
from .table import parse_csv, write_csv


def _load_table(path: str, index_column: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv(text, index_column=index_column, source=Path(path).name)


def _preprocessed(path, index_column, impute_method, encode_method, columns):
    table = _load_table(path, index_column)
    selected = tuple(c.strip() for c in columns.split(",")) if columns else None
    config = PreprocessConfig(
        imputation=impute_method, encoding=encode_method, selected_columns=selected
    )
    return preprocess(table, config)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _shared(fn):
    for deco in (
        click.option("--columns", default=None, help="Comma-separated column subset."),
        click.option(
            "--encode",
            "encode_method",
            type=click.Choice(ENCODING_METHODS),
            default="ordinal",
            show_default=True,
            help="Categorical encoding.",
        ),
        click.option(
            "--impute",
            "impute_method",
            type=click.Choice(IMPUTATION_METHODS),
            default="mean",
            show_default=True,
            help="Missing-value strategy.",
        ),
        click.option("--index-column", default="timestamp", show_default=True),
    ):
        fn = deco(fn)
    return fn


def _discovery_options(fn):
    for deco in (
        click.option("--alpha", default=0.05, show_default=True),
        click.option("--p-max", "p_max", default=None, type=int),
        click.option(
            "--lag-policy",
            type=click.Choice(("fixed", "information_criterion", "scan_best")),
            default="scan_best",
            show_default=True,
        ),
        click.option("--fixed-p", default=1, show_default=True),
        click.option(
            "--criterion", type=click.Choice(("aic", "bic")), default="bic", show_default=True
        ),
        click.option(
            "--multiple-testing",
            type=click.Choice(("none", "benjamini_hochberg")),
            default="none",
            show_default=True,
        ),
        click.option(
            "--auto-stationarity/--no-auto-stationarity", default=True, show_default=True
        ),
        click.option("--adf-alpha", default=0.05, show_default=True),
        click.option(
            "--denominator-df",
            type=click.Choice(("horizon", "residual")),
            default="horizon",
            show_default=True,
        ),
    ):
        fn = deco(fn)
    return fn


def _discovery_config(kwargs) -> DiscoveryConfig:
    return DiscoveryConfig(
        alpha=kwargs["alpha"],
        p_max=kwargs["p_max"],
        lag_policy=kwargs["lag_policy"],
        fixed_p=kwargs["fixed_p"],
        criterion=kwargs["criterion"],
        multiple_testing=kwargs["multiple_testing"],
        auto_stationarity=kwargs["auto_stationarity"],
        adf_alpha=kwargs["adf_alpha"],
        denominator_df=kwargs["denominator_df"],
    )


@click.group()
def cli():
    """Correlation and causality discovery over sensor time series."""


@cli.command()
@click.argument("file", type=click.Path())
@click.option("--index-column", default="timestamp", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def ingest(file, index_column, as_json):
    """Validate a CSV and report its columns."""
    table = _load_table(file, index_column)
    rows = [
        {"name": c.name, "kind": c.kind, "missing_count": c.missing_count} for c in table.columns
    ]
    if as_json:
        click.echo(json.dumps({"rows": table.t, "columns": rows}, sort_keys=True))
        return
    click.echo(f"{file}: {table.t} rows, {len(rows)} columns ({table.index_kind} index)")
    for r in rows:
        missing = f", {r['missing_count']} missing" if r["missing_count"] else ""
        click.echo(f"  {r['name']}: {r['kind']}{missing}")


@cli.command()
@click.argument("file", type=click.Path())
@_shared
@click.option(
    "--method", type=click.Choice(METHODS), default="pearson", show_default=True
)
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", default=None, type=click.Path())
def correlate(file, index_column, impute_method, encode_method, columns, method, as_json, out):
    """Pairwise correlation matrix of a dataset."""
    table, _ = _preprocessed(file, index_column, impute_method, encode_method, columns)
    matrix = correlation_matrix(table, method)
    if as_json or out:
        _emit(json.dumps(matrix.to_json_dict(), sort_keys=True), out)
        return
    width = max(len(n) for n in matrix.names)
    click.echo(f"{method} correlation, {table.t} rows")
    header = " " * (width + 2) + "  ".join(f"{n:>{width}}" for n in matrix.names)
    click.echo(header)
    for name, row in zip(matrix.names, matrix.scores):
        cells = "  ".join(f"{v:>{width}.3f}" for v in row)
        click.echo(f"{name:<{width}}  {cells}")
    if matrix.degenerate:
        click.echo("degenerate (zero variance): " + ", ".join(sorted(matrix.degenerate)))


@cli.command()
@click.argument("file", type=click.Path())
@_shared
@_discovery_options
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", default=None, type=click.Path())
def granger(file, index_column, impute_method, encode_method, columns, as_json, out, **kwargs):
    """All-pairs Granger-causality sweep."""
    table, _ = _preprocessed(file, index_column, impute_method, encode_method, columns)
    outcome = discover(table, _discovery_config(kwargs))
    if as_json or out:
        _emit(json.dumps(outcome.to_json_dict(), sort_keys=True), out)
        return
    report = outcome.integration
    if report.common_order:
        click.echo(
            f"differenced {report.common_order}x (lag guard active); "
            f"{len(outcome.results)} ordered pairs"
        )
    else:
        click.echo(f"stationary as-is; {len(outcome.results)} ordered pairs")
    for r in outcome.results:
        if r.failed:
            click.echo(f"  {r.source} -> {r.target}: error: {r.error}")
            continue
        marker = "*" if r.significant else " "
        extra = f" adj={r.p_adjusted:.4g}" if r.p_adjusted is not None else ""
        click.echo(
            f" {marker}{r.source} -> {r.target} @lag {r.p}: "
            f"F={r.f_statistic:.4g} p={r.p_value:.4g}{extra}"
        )


@cli.command()
@click.argument("file", type=click.Path())
@_shared
@_discovery_options
@click.option("--method", type=click.Choice(METHODS), default="pearson", show_default=True)
@click.option("--corr-threshold", default=0.5, show_default=True)
@click.option(
    "--format", "fmt", type=click.Choice(("json", "ttl")), default="json", show_default=True
)
@click.option("--dataset-name", default=None, help="Provenance dataset id; defaults to the file stem.")
@click.option("--created-at", default=None, help="Pin the provenance timestamp (ISO 8601 UTC).")
@click.option("--out", default=None, type=click.Path())
def graph(
    file,
    index_column,
    impute_method,
    encode_method,
    columns,
    method,
    corr_threshold,
    fmt,
    dataset_name,
    created_at,
    out,
    **kwargs,
):
    """Full pipeline: correlations + causality merged into a knowledge graph."""
    table, _ = _preprocessed(file, index_column, impute_method, encode_method, columns)
    matrix = correlation_matrix(table, method)
    outcome = discover(table, _discovery_config(kwargs))
    kg = build_graph(
        matrix,
        outcome.results,
        corr_threshold=corr_threshold,
        alpha=kwargs["alpha"],
        dataset=dataset_name if dataset_name is not None else Path(file).stem,
        created_at=created_at,
        config=outcome.config.to_json_dict(),
        integration=outcome.integration.to_json_dict(),
    )
    _emit(to_turtle(kg) if fmt == "ttl" else to_json(kg), out)


@cli.command()
@click.option("--spec", "spec_name", default="builtin:electrostatic", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--length", "t", default=2000, show_default=True, help="Rows to generate.")
@click.option("--out", required=True, type=click.Path())
def synth(spec_name, seed, t, out):
    """Generate a synthetic dataset plus a ground-truth sidecar JSON."""
    if not spec_name.startswith("builtin:"):
        raise click.UsageError(f"unknown spec {spec_name!r}; try builtin:electrostatic")
    key = spec_name.split(":", 1)[1]
    if key not in BUILTIN_SPECS:
        known = ", ".join(f"builtin:{k}" for k in sorted(BUILTIN_SPECS))
        raise click.UsageError(f"unknown spec {spec_name!r}; known: {known}")
    spec = BUILTIN_SPECS[key](seed=seed, t=t)
    table = generate(spec)
    Path(out).write_text(write_csv(table), encoding="utf-8")
    sidecar = Path(out).with_suffix(Path(out).suffix + ".truth.json")
    sidecar.write_text(json.dumps(spec.ground_truth(), indent=2, sort_keys=True), encoding="utf-8")
    click.echo(f"wrote {table.t} rows to {out} (ground truth: {sidecar})")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Defaults to KGF_PORT or 8000.")
@click.option("--session-ttl", default=None, type=float, help="Seconds; default 3600.")
@click.option("--max-body", default=None, type=int, help="Upload size limit in bytes.")
@click.option("--static-dir", default=None, type=click.Path())
def serve(host, port, session_ttl, max_body, static_dir):
    """Run the HTTP service (blocking)."""
    from .service import serve as run

    run(
        host=host,
        port=port,
        ttl_seconds=session_ttl,
        max_body_bytes=max_body,
        static_dir=static_dir,
    )


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except KgforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

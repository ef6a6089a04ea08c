"""Command-line front end.

Every subcommand is a thin client of the HTTP API: file handling happens
here, computation happens behind the service surface (mounted in-process
unless --server points at a running instance).  All randomness is driven by
explicit --seed flags, so identical invocations produce identical outputs.
"""

from __future__ import annotations

import gzip
import json
import os
import sys
import tempfile

import click

from . import __version__
from .client import ServiceClient, ServiceError
from .errors import MogenError
from .reporting import (
    EVALUATE_HEADER,
    SELECT_HEADER,
    STATS_HEADER,
    evaluate_rows,
    render_csv,
    render_table,
    roc_csv,
    select_rows,
    stats_rows,
)


def _read_text(path: str) -> str:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path: str | None, text: str) -> None:
    """Write atomically (tmp + rename) so failed runs leave no partial files."""
    if path is None or path == "-":
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mogen-tmp-")
    try:
        if path.endswith(".gz"):
            with os.fdopen(fd, "wb") as raw, gzip.GzipFile(
                filename="", mode="wb", fileobj=raw, mtime=0
            ) as zh:
                zh.write(text.encode("utf-8"))
        else:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(header, rows, pretty: bool) -> str:
    return render_table(header, rows) if pretty else render_csv(header, rows)


input_option = click.option(
    "--input", "-i", "input_path", required=True, help="ngram file (optionally .gz)"
)
sep_option = click.option("--sep", default=",", show_default=True, help="token separator")
weighted_option = click.option(
    "--weighted/--unweighted",
    default=False,
    show_default=True,
    help="treat the trailing field of each line as an observation count",
)
workers_option = click.option(
    "--workers", default=1, show_default=True, type=click.IntRange(min=1)
)
seed_option = click.option("--seed", default=0, show_default=True, type=int)
out_option = click.option("--out", "-o", "out_path", default=None, help="output file (default stdout)")
pretty_option = click.option("--pretty", is_flag=True, help="aligned table instead of CSV")


class CliState:
    def __init__(self, server: str | None):
        self.server = server

    def client(self) -> ServiceClient:
        return ServiceClient(self.server)


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, help="base URL of a running service (default: in-process)")
@click.pass_context
def main(ctx: click.Context, server: str | None):
    """Multi-order generative models of paths in networks."""
    ctx.obj = CliState(server)


def _corpus(input_path: str, sep: str, weighted: bool) -> dict:
    return ServiceClient.corpus_payload(_read_text(input_path), sep, weighted)


def _run(ctx: click.Context, fn):
    state: CliState = ctx.obj
    try:
        with state.client() as client:
            return fn(client)
    except (MogenError, ServiceError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@input_option
@sep_option
@weighted_option
@out_option
@pretty_option
@click.pass_context
def stats(ctx, input_path, sep, weighted, out_path, pretty):
    """Summary statistics of a path corpus."""
    payload = _run(ctx, lambda c: c.stats(_corpus(input_path, sep, weighted)))
    _write_output(out_path, _render(STATS_HEADER, stats_rows(payload), pretty))


@main.command()
@input_option
@sep_option
@weighted_option
@click.option("--order", "-k", required=True, type=click.IntRange(min=1), help="maximum order K")
@workers_option
@click.option("--out", "-o", "out_path", required=True, help="model file to write")
@click.pass_context
def fit(ctx, input_path, sep, weighted, order, workers, out_path):
    """Fit a multi-order model and write its serialized form."""
    payload = _run(
        ctx, lambda c: c.fit(_corpus(input_path, sep, weighted), order, workers)
    )
    _write_output(out_path, json.dumps(payload["document"], separators=(",", ":")) + "\n")
    click.echo(
        f"fitted K={payload['order']}: {payload['states']} states, "
        f"{payload['transitions']} transitions, m={payload['total_observations']}",
        err=True,
    )


@main.command()
@input_option
@sep_option
@weighted_option
@click.option("--max-order", "-K", default=None, type=click.IntRange(min=1),
              help="largest order to evaluate (default: min(longest path, 6))")
@click.option("--binary-walks", is_flag=True,
              help="count reachable node pairs instead of walk multiplicities")
@workers_option
@out_option
@pretty_option
@click.pass_context
def select(ctx, input_path, sep, weighted, max_order, binary_walks, workers, out_path, pretty):
    """Pick the optimal maximum order by AIC; emits the per-order table."""
    payload = _run(
        ctx,
        lambda c: c.select(
            _corpus(input_path, sep, weighted), max_order, workers, binary_walks
        ),
    )
    _write_output(out_path, _render(SELECT_HEADER, select_rows(payload["rows"]), pretty))
    click.echo(f"selected K={payload['selected_order']}", err=True)


@main.command()
@input_option
@sep_option
@weighted_option
@click.option("--method", type=click.Choice(["mogen", "rnd", "net", "akom"]),
              default="mogen", show_default=True)
@click.option("--order", "-k", default=None, type=click.IntRange(min=1),
              help="model order (mogen default: AIC-selected; net/akom default: 1)")
@click.option("--train-frac", default=0.9, show_default=True, type=click.FloatRange(min=0, max=1, min_open=True, max_open=True))
@click.option("--max-prefix", default=6, show_default=True, type=click.IntRange(min=1))
@click.option("--no-fallback", is_flag=True, help="disable the shared fallback policy")
@seed_option
@workers_option
@out_option
@pretty_option
@click.pass_context
def evaluate(ctx, input_path, sep, weighted, method, order, train_frac, max_prefix,
             no_fallback, seed, workers, out_path, pretty):
    """Cross-entropy of next-element prediction on a held-out split."""
    payload = _run(
        ctx,
        lambda c: c.evaluate(
            _corpus(input_path, sep, weighted),
            method=method,
            order=order,
            train_fraction=train_frac,
            seed=seed,
            max_prefix=max_prefix,
            workers=workers,
            fallback=not no_fallback,
        ),
    )
    _write_output(out_path, _render(EVALUATE_HEADER, evaluate_rows(payload), pretty))


@main.command()
@click.option("--model", "-m", "model_path", required=True, help="model file from `fit`")
@click.option("--samples", "-n", required=True, type=click.IntRange(min=1))
@click.option("--max-len", default=10_000, show_default=True, type=click.IntRange(min=1))
@sep_option
@seed_option
@out_option
@click.pass_context
def generate(ctx, model_path, samples, max_len, sep, seed, out_path):
    """Sample paths from a fitted model into a weighted ngram file."""
    document = json.loads(_read_text(model_path))
    payload = _run(
        ctx, lambda c: c.generate(document, samples, seed, max_len, sep)
    )
    _write_output(out_path, payload["ngram"])
    if payload["truncated"]:
        click.echo(f"warning: {payload['truncated']} samples hit the length guard", err=True)


@main.command()
@input_option
@sep_option
@weighted_option
@click.option("--order", "-k", default=None, type=click.IntRange(min=1),
              help="model order (default: AIC-selected on the training split)")
@click.option("--train-frac", default=0.99, show_default=True, type=click.FloatRange(min=0, max=1, min_open=True, max_open=True))
@click.option("--samples", "-n", default=None, type=click.IntRange(min=1),
              help="generated sample size (default: 10x validation observations)")
@click.option("--top-fraction", default=0.10, show_default=True, type=click.FloatRange(min=0, max=1, min_open=True, max_open=True))
@seed_option
@workers_option
@out_option
@click.pass_context
def roc(ctx, input_path, sep, weighted, order, train_frac, samples, top_fraction,
        seed, workers, out_path):
    """Out-of-sample top-path prediction: ROC curve plus an AUC line."""
    payload = _run(
        ctx,
        lambda c: c.roc(
            _corpus(input_path, sep, weighted),
            order=order,
            train_fraction=train_frac,
            seed=seed,
            n_samples=samples,
            top_fraction=top_fraction,
            workers=workers,
        ),
    )
    _write_output(out_path, roc_csv(payload))
    click.echo(f"K={payload['order']} auc={payload['auc']:.4f}", err=True)


@main.command()
@click.option("--model", "-m", "model_path", required=True, help="model file from `fit`")
@click.option("--prefix", default="", help="separator-joined node labels (empty: path start)")
@sep_option
@click.option("--no-fallback", is_flag=True)
@pretty_option
@out_option
@click.pass_context
def predict(ctx, model_path, prefix, sep, no_fallback, pretty, out_path):
    """Next-element distribution for a prefix under a fitted model."""
    document = json.loads(_read_text(model_path))
    labels = [tok for tok in prefix.split(sep) if tok != ""] if prefix else []
    payload = _run(
        ctx, lambda c: c.predict_document(document, labels, not no_fallback)
    )
    rows = [
        ["<end>" if e["node"] is None else e["node"], e["probability"]]
        for e in payload["entries"]
    ]
    text = _render(("target", "probability"), rows, pretty)
    text += f"# provenance: {payload['provenance']}\n"
    _write_output(out_path, text)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("mogen.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()

"""Command-line entry point: ingest, solve, train, generate, evaluate, serve."""

from __future__ import annotations

import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import click

from . import chain as chain_mod
from . import lstm as lstm_mod
from .errors import AlignmentError, LodegenError
from .generator import GenConfig, generate_level
from .metrics import compare_sets, evaluate_level
from .paths import (
    AnnotatedLevel,
    PathSequence,
    annotated_from_json,
    annotated_to_json,
    dump_path_file,
    load_path_file,
    overlay_path,
)
from .tiles import parse_level, serialize_level
from .training import TrainConfig, train

log = logging.getLogger(__name__)


def write_atomic(path: Path, data: str | bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config_file(path: str) -> dict:
    """Flat key = value document; '#' starts a comment."""
    values: dict[str, object] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.ClickException(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        val = val.strip("\"'")
        for cast in (int, float):
            try:
                values[key] = cast(val)
                break
            except ValueError:
                continue
        else:
            if val.lower() in ("true", "false"):
                values[key] = val.lower() == "true"
            else:
                values[key] = val
    return values


def _load_levels(directory: str):
    files = sorted(Path(directory).glob("*.txt"))
    if not files:
        raise click.ClickException(f"no .txt levels in {directory}")
    return [(f.name, parse_level(f.read_text())) for f in files]


class _Group(click.Group):
    """Surfaces toolkit errors as exit-1 CLI errors instead of tracebacks."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except LodegenError as exc:
            raise click.ClickException(str(exc)) from exc


@click.group(cls=_Group)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Flat key = value config file; flags override it.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, config_path, verbose):
    """Learn player paths, generate levels around them, evaluate the results."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)
    if config_path:
        cfg = load_config_file(config_path)
        ctx.default_map = {cmd: cfg for cmd in main.commands}


@main.command()
@click.option("--levels", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", required=True, type=click.Path())
def solve(levels, output):
    """Synthesize player paths by running the agent on existing levels."""
    from .agent import solve_for_path
    from .errors import SolveError

    paths = []
    for name, grid in _load_levels(levels):
        try:
            paths.append(solve_for_path(grid))
        except SolveError as exc:
            log.warning("%s: %s (skipped)", name, exc)
    if not paths:
        raise click.ClickException("no level was solvable")
    write_atomic(Path(output), dump_path_file(paths))
    click.echo(f"solved {len(paths)} levels -> {output}")


@main.command()
@click.option("--levels", required=True, type=click.Path(exists=True))
@click.option("--paths", "paths_file", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", required=True, type=click.Path())
def ingest(levels, paths_file, output):
    """Combine levels with aligned path lines into an annotated corpus."""
    level_list = _load_levels(levels)
    paths = load_path_file(Path(paths_file).read_text())
    if len(paths) != len(level_list):
        raise click.ClickException(
            str(AlignmentError(f"{len(level_list)} levels vs {len(paths)} paths"))
        )
    docs = []
    for (name, grid), path in zip(level_list, paths):
        amap = overlay_path((grid.width, grid.height), path)
        doc = annotated_to_json(AnnotatedLevel(grid, amap))
        doc["name"] = name
        doc["path"] = {"start": list(path.start), "actions": path.actions}
        docs.append(doc)
    write_atomic(Path(output), json.dumps({"version": 1, "levels": docs},
                                          sort_keys=True, indent=1))
    click.echo(f"ingested {len(docs)} levels -> {output}")


def _load_corpus(corpus_file):
    doc = json.loads(Path(corpus_file).read_text())
    annotated, paths = [], []
    for entry in doc["levels"]:
        annotated.append(annotated_from_json(entry))
        paths.append(PathSequence(tuple(entry["path"]["start"]),
                                  entry["path"]["actions"]))
    return annotated, paths


@main.command("train-paths")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", required=True, type=click.Path())
@click.option("--epochs", default=60, show_default=True)
@click.option("--learning-rate", default=0.001, show_default=True)
@click.option("--dropout-rate", default=0.3, show_default=True)
@click.option("--clip-norm", default=5.0, show_default=True)
@click.option("--batch-size", default=16, show_default=True)
@click.option("--hidden-size", default=512, show_default=True)
@click.option("--num-layers", default=2, show_default=True)
@click.option("--chunk-len", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
def train_paths(corpus, output, **kw):
    """Train the LSTM path model on an annotated corpus."""
    _, paths = _load_corpus(corpus)
    config = TrainConfig(**kw)
    model, history = train(paths, config)
    lstm_mod.save_model(model, output)
    click.echo(f"trained {config.epochs} epochs; "
               f"loss {history[0]:.4f} -> {history[-1]:.4f}; saved {output}")


@main.command("train-chain")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", required=True, type=click.Path())
def train_chain_cmd(corpus, output):
    """Train the Markov chain, compat map and entity stats."""
    annotated, paths = _load_corpus(corpus)
    table = chain_mod.train_chain(annotated)
    compat = chain_mod.build_compat(annotated)
    stats = chain_mod.fit_entity_stats([a.grid for a in annotated], paths)
    doc = chain_mod.models_to_json(table, compat, stats)
    write_atomic(Path(output), json.dumps(doc, sort_keys=True))
    click.echo(f"chain: {len(table.full)} full keys, "
               f"{len(table.backoff)} backoff keys -> {output}")


@main.command()
@click.option("--lstm", "lstm_path", required=True, type=click.Path(exists=True))
@click.option("--chain", "chain_path", required=True, type=click.Path(exists=True))
@click.option("-o", "--outdir", required=True, type=click.Path())
@click.option("--count", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--path-length", default=103, show_default=True)
def gen(lstm_path, chain_path, outdir, count, seed, path_length):
    """Generate levels; each one gets a .txt grid and a .json sidecar."""
    model = lstm_mod.load_model(lstm_path)
    table, compat, stats = chain_mod.load_models(chain_path)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        config = GenConfig(path_length=path_length, seed=seed + i)
        level, meta = generate_level(config, model, table, compat, stats)
        stem = f"level_{i:03d}"
        write_atomic(out / f"{stem}.txt", serialize_level(level.grid))
        write_atomic(out / f"{stem}.json", json.dumps(meta, sort_keys=True, indent=1))
    click.echo(f"generated {count} levels -> {outdir}")


@main.command("eval")
@click.option("--levels", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", default=None, type=click.Path())
def eval_cmd(levels, output):
    """Evaluate every level in a directory."""
    records = []
    for name, grid in _load_levels(levels):
        m = evaluate_level(grid)
        rec = m.as_dict()
        rec["name"] = name
        records.append(rec)
        click.echo(f"{name}: gold={m.gold_total} collected={m.percent_collected:.1f}% "
                   f"nodes/gold={m.nodes_per_gold:.1f} size={m.size[0]}x{m.size[1]}")
    if output:
        write_atomic(Path(output), json.dumps({"levels": records}, sort_keys=True,
                                              indent=1))


@main.command()
@click.argument("set_a", type=click.Path(exists=True))
@click.argument("set_b", type=click.Path(exists=True))
@click.option("-o", "--output", default=None, type=click.Path())
def compare(set_a, set_b, output):
    """Compare two level directories; prints the metric table."""
    grids_a = [g for _, g in _load_levels(set_a)]
    grids_b = [g for _, g in _load_levels(set_b)]
    report = compare_sets(grids_a, grids_b, Path(set_a).name, Path(set_b).name)
    click.echo(report.as_table())
    if output:
        write_atomic(Path(output), json.dumps(report.as_dict(), sort_keys=True,
                                              indent=1))


@main.command()
@click.option("--lstm", "lstm_path", default=None, type=click.Path(exists=True))
@click.option("--chain", "chain_path", default=None, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None, type=click.Path(exists=True))
def serve(lstm_path, chain_path, port, host, static_dir):
    """Serve generation and evaluation over HTTP for the browser UI."""
    import uvicorn

    from .server import create_app

    app = create_app(lstm_path=lstm_path, chain_path=chain_path, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


def run(argv=None) -> int:
    """Programmatic entry point returning an exit status."""
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (click.ClickException, LodegenError) as exc:
        click.echo(str(exc), err=True)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(run())

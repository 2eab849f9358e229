"""Operator command line: serve, new, validate, export, replay, fuzz.

Exit codes: 0 ok, 1 validation/convergence failure, 2 usage, 3 I/O.
"""

from __future__ import annotations

import os
import sys

import click

from . import model
from .errors import SlowspaceError
from .fuzz import run_fuzz
from .model import GridSpec
from .pcg import default_catalog, load_catalog
from .server import (
    ResiduePolicy,
    ServerConfig,
    SpaceStore,
    read_op_log,
    replay_log,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _data_dir(override: str | None) -> str:
    return override or os.environ.get("SLOWSPACE_DATA", "./data")


@click.group()
def main():
    """Collaborative slow-space engine."""


@main.command()
@click.option("--addr", default=None, help="listen address host:port")
@click.option("--data-dir", default=None, type=click.Path())
@click.option("--wear-rate", default=0.001, show_default=True)
@click.option("--autosave", default=10.0, show_default=True, help="seconds")
@click.option("--catalog", "catalog_path", default=None, type=click.Path(exists=True))
@click.option("--static-dir", default=None, type=click.Path())
def serve(addr, data_dir, wear_rate, autosave, catalog_path, static_dir):
    """Run the session server."""
    import uvicorn

    from .server import create_app

    addr = addr or os.environ.get("SLOWSPACE_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    config = ServerConfig(
        data_dir=_data_dir(data_dir),
        residue=ResiduePolicy(wear_rate=wear_rate),
        autosave_interval_s=autosave,
        catalog=load_catalog(catalog_path) if catalog_path else default_catalog(),
        static_dir=static_dir,
    )
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port))


@main.command()
@click.option("--name", required=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--width", default=16, type=int, show_default=True)
@click.option("--height", default=16, type=int, show_default=True)
@click.option("--cell-size", default=2.0, type=float, show_default=True)
@click.option("--space-id", default=None)
@click.option("--data-dir", default=None, type=click.Path())
def new(name, seed, width, height, cell_size, space_id, data_dir):
    """Create a fresh space file and print its id."""
    space_id = space_id or name.lower().replace(" ", "-")
    try:
        space = model.new_space(
            space_id, name, seed, GridSpec(width, height, cell_size)
        )
    except SlowspaceError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        store = SpaceStore(_data_dir(data_dir))
        store.save(space)
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    click.echo(space.space_id)


@main.command()
@click.argument("file", type=click.Path())
def validate(file):
    """Check a space file against every model invariant."""
    try:
        with open(file, "rb") as f:
            space = model.space_from_bytes(f.read())
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    except (ValueError, KeyError, IndexError, TypeError) as e:
        click.echo(f"malformed: {e}")
        sys.exit(EXIT_FAIL)
    violations = model.validate_space(space)
    for v in violations:
        click.echo(v)
    if violations:
        sys.exit(EXIT_FAIL)
    click.echo("ok")


@main.command()
@click.argument("file", type=click.Path())
@click.option("-o", "out", required=True, type=click.Path())
@click.option("--catalog", "catalog_path", default=None, type=click.Path())
def export(file, out, catalog_path):
    """Write the scene description for a space file."""
    from .materialize import export_scene

    try:
        with open(file, "rb") as f:
            space = model.space_from_bytes(f.read())
        catalog = load_catalog(catalog_path) if catalog_path else default_catalog()
        export_scene(space, catalog, out)
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    except SlowspaceError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("log", type=click.Path())
def replay(file, log):
    """Replay an op log over a space file and print the final scene hash."""
    try:
        with open(file, "rb") as f:
            base = model.space_from_bytes(f.read())
        entries = read_op_log(log)
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    try:
        final = replay_log(base, entries)
    except SlowspaceError as e:
        click.echo(f"replay error: {e}", err=True)
        sys.exit(EXIT_FAIL)
    click.echo(model.scene_hash(final))


@main.command()
@click.option("--clients", default=3, type=int, show_default=True)
@click.option("--ops", default=1000, type=int, show_default=True)
@click.option("--seed", default=7, type=int, show_default=True)
def fuzz(clients, ops, seed):
    """Run simulated clients against an in-process server; exit 0 iff all
    replicas converge on one hash."""
    result = run_fuzz(clients=clients, ops=ops, seed=seed)
    if not result.converged:
        click.echo(f"DIVERGED: {result.detail}", err=True)
        sys.exit(EXIT_FAIL)
    click.echo(result.final_hash)


if __name__ == "__main__":
    main()

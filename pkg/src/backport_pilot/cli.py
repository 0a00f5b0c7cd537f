"""Operator CLI: a thin client of the service endpoints.

Without --server the service app runs in-process against local files, so
every subcommand works offline and without a daemon; with --server the
same requests go to a shared instance.  Exit codes: 0 success, 1 domain
error (error name on stderr), 2 usage error.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import click
import httpx

from .errors import PilotError
from .selector import WatchList
from .service.app import Settings, create_app


@dataclass
class AppContext:
    settings: Settings
    server: str
    output: str

    _client: httpx.Client | None = None

    @property
    def client(self) -> httpx.Client:
        if self._client is None:
            if self.server:
                self._client = httpx.Client(base_url=self.server.rstrip("/"), timeout=120)
            else:
                from fastapi.testclient import TestClient

                self._client = TestClient(create_app(self.settings), raise_server_exceptions=False)
        return self._client


def _call(ctx: AppContext, method: str, path: str, **kwargs) -> httpx.Response:
    try:
        response = ctx.client.request(method, path, **kwargs)
    except httpx.HTTPError as err:
        click.echo(f"NetworkError: {err}", err=True)
        raise SystemExit(1) from err
    if response.status_code >= 400:
        try:
            body = response.json()
            name = body.get("error", f"HTTP{response.status_code}")
            detail = body.get("detail", "")
        except ValueError:
            name, detail = f"HTTP{response.status_code}", response.text.strip()
        click.echo(f"{name}: {detail}", err=True)
        raise SystemExit(1)
    return response


def _emit(ctx: AppContext, text: str) -> None:
    if ctx.output and ctx.output != "-":
        with open(ctx.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        click.echo(text, nl=False)


def _fail(err: PilotError) -> None:
    click.echo(f"{err.code}: {err}", err=True)
    raise SystemExit(1)


@click.group(no_args_is_help=False)
@click.option("--config", "config_path", default="", help="Repository config file (or $BACKPORT_PILOT_CONFIG, or ./backport-pilot.conf).")
@click.option("--cache-dir", default="backport-cache", show_default=True, help="Index cache directory.")
@click.option("--ledger", "ledger_path", default="backport-ledger", show_default=True, help="Workflow ledger file.")
@click.option("--offline", is_flag=True, help="Never touch the network; use cache and local repos only.")
@click.option("--arch", "architecture", default="amd64", show_default=True, help="Binary architecture slice.")
@click.option("--calendar", "calendar_path", default="", help="Release calendar file (default: built-in).")
@click.option("--server", default="", help="URL of a running service; default is in-process.")
@click.option("-o", "--output", default="-", show_default=True, help="Output file for reports ('-' = stdout).")
@click.pass_context
def cli(ctx, config_path, cache_dir, ledger_path, offline, architecture, calendar_path, server, output):
    """Plan and track package backports into an LTS release."""
    settings = Settings(
        config_path=config_path,
        cache_dir=cache_dir,
        ledger_path=ledger_path,
        offline=offline,
        architecture=architecture,
        calendar_path=calendar_path,
    )
    ctx.obj = AppContext(settings=settings, server=server, output=output)


@cli.command()
@click.option("--parallelism", default=4, show_default=True)
@click.pass_obj
def sync(app: AppContext, parallelism):
    """Fetch all configured indices into the cache."""
    response = _call(app, "POST", "/sync", json={"parallelism": parallelism})
    lines = []
    for entry in response.json()["entries"]:
        lines.append(f"{entry['repo_id']}\t{entry['path']}\t{entry['sha256'][:12]}\t{entry['size']}")
    _emit(app, "".join(line + "\n" for line in lines))


def _read_watch(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            return sorted(WatchList.parse(handle.read()).names)
    except FileNotFoundError:
        click.echo(f"ConfigNotFound: watch list not found: {path}", err=True)
        raise SystemExit(1) from None
    except PilotError as err:
        _fail(err)


@cli.command()
@click.option("--watch", "watch_path", default="", help="Restrict the pool to the names in this file.")
@click.pass_obj
def select(app: AppContext, watch_path):
    """Decide candidate or excluded for every package in the pool."""
    watch = _read_watch(watch_path) if watch_path else None
    response = _call(app, "POST", "/select", json={"watch": watch})
    decisions = response.json()["decisions"]
    _emit(app, "".join(d["explanation"] + "\n" for d in decisions))


@cli.command()
@click.argument("name")
@click.pass_obj
def plan(app: AppContext, name):
    """Print the backport cascade and its feasibility for one package."""
    response = _call(app, "POST", "/plan", json={"package": name})
    body = response.json()
    lines = [body["decision"]["explanation"]]
    for hop in body["hops"]:
        if not hop["feasibility_known"]:
            verdict = "feasibility unknown (no source record)"
        elif hop["unsatisfied"]:
            verdict = "unsatisfied: " + "; ".join(hop["unsatisfied"])
        else:
            verdict = "predicted buildable"
        lines.append(f"  {hop['label']}: {verdict}")
    _emit(app, "".join(line + "\n" for line in lines))


@cli.command()
@click.argument("name")
@click.argument("hop")
@click.argument("state")
@click.option("--note", default="", help="Free-text note, e.g. a bug reference.")
@click.option("--actor", default="operator", show_default=True)
@click.option("--timestamp", default="", help="ISO-8601 UTC; defaults to now.")
@click.option("--version", default="", help="Package version the task concerns.")
@click.pass_obj
def record(app: AppContext, name, hop, state, note, actor, timestamp, version):
    """Append one workflow event to the ledger."""
    response = _call(
        app,
        "POST",
        "/record",
        json={
            "package": name,
            "hop": hop,
            "state": state,
            "note": note,
            "actor": actor,
            "timestamp": timestamp,
            "version": version,
        },
    )
    body = response.json()
    _emit(app, f"{body['package']} {body['hop']} -> {body['state']}\n")


@cli.command()
@click.pass_obj
def status(app: AppContext):
    """Summarize the ledger: counts per state and per-package rollup."""
    body = _call(app, "GET", "/status").json()
    lines = []
    for state, count in body["counts"].items():
        if count:
            lines.append(f"{state}: {count}")
    for rollup in body["packages"]:
        lines.append(
            f"{rollup['package']}: building={rollup['building']} uploaded={rollup['uploaded']} "
            f"backported={rollup['backported']} from={rollup['from_label'] or '-'}"
        )
    _emit(app, "".join(line + "\n" for line in lines))


@cli.command()
@click.option("--table/--announce", "table", default=True, help="Status table (default) or announcement text.")
@click.option("--watch", "watch_path", default="", help="Pool restriction for the table.")
@click.option("--round", "round_label", default="", help="Round label for the announcement.")
@click.pass_obj
def report(app: AppContext, table, watch_path, round_label):
    """Emit the status table (TSV) or the mailing-list announcement."""
    if table:
        watch = _read_watch(watch_path) if watch_path else None
        response = _call(app, "POST", "/report/table", json={"watch": watch})
    else:
        response = _call(app, "POST", "/report/announcement", json={"round_label": round_label or "unnamed"})
    _emit(app, response.text)


@cli.command()
@click.option("--target", default="", help="LTS version to plan rounds for, e.g. 14.04.")
@click.option("--next", "show_next", is_flag=True, help="Show the next import-freeze trigger instead.")
@click.option("--today", default="", help="Reference date for --next (ISO-8601).")
@click.pass_obj
def schedule(app: AppContext, target, show_next, today):
    """Print the backport rounds for a target LTS, or the next trigger."""
    if show_next:
        body = _call(app, "GET", "/schedule/next", params={"today": today}).json()
        trigger = body["trigger"]
        if trigger is None:
            _emit(app, "no upcoming import freeze\n")
        else:
            _emit(
                app,
                f"next trigger: {trigger['trigger_version']} ({trigger['trigger_codename']}) "
                f"import freeze {trigger['import_freeze']}\n",
            )
        return
    if not target:
        raise click.UsageError("either --target VERSION or --next is required")
    body = _call(app, "GET", "/schedule/rounds", params={"target": target}).json()
    lines = []
    for rnd in body["rounds"]:
        lines.append(
            f"round {rnd['ordinal']}: trigger {rnd['trigger_version']} ({rnd['trigger_codename']}) "
            f"freeze {rnd['import_freeze']} -> target {body['target']}"
        )
    _emit(app, "".join(line + "\n" for line in lines))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8453, show_default=True)
@click.pass_obj
def serve(app: AppContext, host, port):
    """Run the service for shared, multi-operator use."""
    import uvicorn

    uvicorn.run(create_app(app.settings), host=host, port=port)


def run(argv) -> int:
    """Invoke the CLI programmatically; returns the exit code."""
    try:
        cli.main(args=list(argv), standalone_mode=True)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main():
    cli()


if __name__ == "__main__":
    main()

"""Command line entry points: the HTTP server, offline admin operations on a
journal, and the aggregation benchmark report.

Admin subcommands open the same journal the server uses; run them while the
server is stopped (the journal is single-writer).
"""

from __future__ import annotations

import functools
import json

import click

from .bench import run_report
from .errors import GameError
from .service import build_platform

CONFIG_OPT = click.option(
    "--config",
    "config_path",
    default="config/game.json",
    show_default=True,
    help="Game config JSON.",
)
CONTENT_OPT = click.option(
    "--content-dir",
    default="config/content",
    show_default=True,
    help="Directory of per-language content packs.",
)
LOCALE_OPT = click.option(
    "--locale-dir",
    default="config/locales",
    show_default=True,
    help="Directory of locale bundles.",
)
JOURNAL_OPT = click.option(
    "--journal",
    default=None,
    envvar="FALLACYARENA_JOURNAL",
    show_envvar=True,
    help="Journal file path; omit for a throwaway in-memory store.",
)
SEED_OPT = click.option(
    "--seed", default=0, show_default=True, help="Gameplay RNG seed."
)


def platform_options(fn):
    for opt in (SEED_OPT, JOURNAL_OPT, LOCALE_OPT, CONTENT_OPT, CONFIG_OPT):
        fn = opt(fn)
    return fn


def store_options(fn):
    """Config and journal flags for offline admin commands (no gameplay seed)."""
    for opt in (JOURNAL_OPT, LOCALE_OPT, CONTENT_OPT, CONFIG_OPT):
        fn = opt(fn)
    return fn


def _build(config_path, content_dir, locale_dir, journal, seed=0):
    try:
        return build_platform(
            config_path, content_dir, locale_dir, journal_path=journal, rng_seed=seed
        )
    except GameError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc


def _admin_id(platform, handle):
    rows = platform.repo.scan("user", lambda e: e.data["handle"] == handle)
    if not rows:
        raise click.ClickException(f"no account named {handle!r}; run `admin ensure` first")
    return rows[0].id


def _run(fn):
    try:
        return fn()
    except GameError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc


@click.group()
def main():
    """Fallacy-spotting game platform."""


@main.command()
@platform_options
@click.option(
    "--host", default="127.0.0.1", show_default=True, help="Bind address."
)
@click.option(
    "--port",
    default=8080,
    show_default=True,
    envvar="FALLACYARENA_PORT",
    show_envvar=True,
    help="Listen port.",
)
@click.option("--admin-handle", default=None, help="Provision this admin at startup.")
@click.option("--admin-password", default=None, help="Password for --admin-handle.")
@click.option(
    "--static-dir",
    default=None,
    type=click.Path(exists=True, file_okay=False),
    help="Serve a built web client from this directory at /.",
)
def serve(config_path, content_dir, locale_dir, journal, seed, host, port,
          admin_handle, admin_password, static_dir):
    """Run the HTTP API server."""
    import uvicorn

    from .api import create_app

    platform = _build(config_path, content_dir, locale_dir, journal, seed)
    if admin_handle:
        if not admin_password:
            raise click.ClickException("--admin-handle needs --admin-password")
        _run(lambda: platform.ensure_admin(admin_handle, admin_password))
        click.echo(f"admin account ready: {admin_handle}")
    click.echo(f"serving on http://{host}:{port} (journal: {journal or 'in-memory'})")
    app = create_app(platform, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.group()
def admin():
    """Offline moderation and maintenance on a journal."""


@admin.command()
@store_options
@click.argument("handle")
@click.argument("password")
def ensure(config_path, content_dir, locale_dir, journal, handle, password):
    """Create or promote an admin account."""
    platform = _build(config_path, content_dir, locale_dir, journal)
    account = _run(lambda: platform.ensure_admin(handle, password))
    platform.close()
    click.echo(f"{account.handle} ({account.id}) has the admin role")


def admin_identity(fn):
    @click.option("--as", "as_handle", default="admin", show_default=True,
                  help="Act as this admin account.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


@admin.group()
def spam():
    """List or resolve spam reports."""


@spam.command("list")
@store_options
@admin_identity
@click.option("--state", default=None, type=click.Choice(["open", "dismissed", "upheld"]))
def spam_list(config_path, content_dir, locale_dir, journal, as_handle, state):
    platform = _build(config_path, content_dir, locale_dir, journal)
    reports = _run(
        lambda: platform.moderation.list_reports(_admin_id(platform, as_handle), state)
    )
    platform.close()
    if not reports:
        click.echo("no reports")
        return
    for r in reports:
        click.echo(
            f"{r['id']}  {r['state']:<9}  argument={r['argument_id']}  "
            f"reporter={r['reporter_id']}  reason={r['reason_text'] or '-'}"
        )


@spam.command("resolve")
@store_options
@admin_identity
@click.argument("report_id")
@click.argument("action", type=click.Choice(["dismiss", "uphold"]))
def spam_resolve(config_path, content_dir, locale_dir, journal, as_handle, report_id, action):
    platform = _build(config_path, content_dir, locale_dir, journal)
    report = _run(
        lambda: platform.moderation.resolve_report(
            _admin_id(platform, as_handle), report_id, action
        )
    )
    platform.close()
    click.echo(f"{report['id']} -> {report['state']}")


@admin.command()
@store_options
@admin_identity
@click.option("--seed", "em_seed", default=None, type=int, help="Override the EM restart seed.")
def aggregate(config_path, content_dir, locale_dir, journal, as_handle, em_seed):
    """Run label aggregation and apply the gold batch."""
    platform = _build(config_path, content_dir, locale_dir, journal)
    summary = _run(
        lambda: platform.moderation.trigger_aggregation(
            _admin_id(platform, as_handle), seed=em_seed
        )
    )
    platform.close()
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@admin.command()
@store_options
@click.option("--language", default=None, help="Restrict to one language.")
@click.option("--gold-only", is_flag=True, help="Only gold-labeled arguments.")
@click.option("--out", default="corpus.jsonl", show_default=True, help="Output file.")
def export(config_path, content_dir, locale_dir, journal, language, gold_only, out):
    """Write the research corpus (JSON lines plus manifest)."""
    platform = _build(config_path, content_dir, locale_dir, journal)
    result = _run(
        lambda: platform.moderation.export_corpus(out, language=language, gold_only=gold_only)
    )
    platform.close()
    click.echo(f"wrote {result['manifest']['record_count']} records to {result['corpus_path']}")
    click.echo(f"manifest: {result['manifest_path']}")


@admin.command()
@store_options
@admin_identity
def stats(config_path, content_dir, locale_dir, journal, as_handle):
    """Print operational counters."""
    platform = _build(config_path, content_dir, locale_dir, journal)
    counters = _run(lambda: platform.moderation.stats(_admin_id(platform, as_handle)))
    platform.close()
    click.echo(json.dumps(counters, indent=2, sort_keys=True))


@main.command()
@click.option("--out", default="report", show_default=True, help="Output directory.")
@click.option("--seeds", default=10, show_default=True, help="Number of crowd seeds.")
def report(out, seeds):
    """Benchmark aggregation on a synthetic crowd: CSV plus figures."""
    summary = run_report(out, seeds=range(seeds))
    click.echo(
        f"{summary['wins']}/{summary['seeds']} seeds favor competence weighting; "
        f"mean accuracy {summary['mace_mean_accuracy']:.4f} "
        f"vs majority {summary['majority_mean_accuracy']:.4f}"
    )
    click.echo(f"table:   {summary['csv_path']}")
    for path in summary["figure_paths"]:
        click.echo(f"figure:  {path}")


if __name__ == "__main__":
    main()

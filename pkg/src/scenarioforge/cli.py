"""Facilitator command line: a thin client for the HTTP service.

Every subcommand performs one API call against ``--base-url`` and prints
the JSON (or raw document) response. Failures print the error name on
stderr and exit nonzero.
"""

from __future__ import annotations

import json
import sys
from typing import Any, Optional

import click
import httpx

TOKEN_HEADER = "X-Session-Token"


def _client(base_url: str) -> httpx.Client:
    return httpx.Client(base_url=base_url, timeout=30.0)


def _fail(name: str, detail: str) -> None:
    click.echo(f"{name}: {detail}" if detail else name, err=True)
    sys.exit(1)


def _call(
    base_url: str,
    method: str,
    path: str,
    token: Optional[str] = None,
    json_body: Any = None,
    params: Optional[dict] = None,
) -> httpx.Response:
    headers = {TOKEN_HEADER: token} if token else {}
    try:
        with _client(base_url) as client:
            response = client.request(method, path, json=json_body, params=params, headers=headers)
    except httpx.HTTPError as exc:
        _fail("ConnectionError", str(exc))
    if response.status_code >= 400:
        try:
            body = response.json()
            _fail(body.get("error", "HTTPError"), body.get("detail", ""))
        except json.JSONDecodeError:
            _fail("HTTPError", f"status {response.status_code}")
    return response


def _echo_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


base_url_option = click.option(
    "--base-url", envvar="SCENARIOFORGE_URL", default="http://127.0.0.1:8000", show_default=True
)
token_option = click.option("--token", envvar="SCENARIOFORGE_TOKEN", default=None)


@click.group()
def main() -> None:
    """Chauffeur console for a running workshop service."""


@main.command()
@base_url_option
@click.option("--title", required=True)
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="deterministic mode seed")
def create(base_url: str, title: str, config_path: str, seed: Optional[int]) -> None:
    """Create a workshop from an agenda document and join as facilitator."""
    with open(config_path, encoding="utf-8") as fh:
        document = json.load(fh)
    body = {
        "title": title,
        "agenda": document.get("agenda", document),
        "issue_areas": document.get("issue_areas", []),
        "deterministic_seed": seed,
    }
    created = _call(base_url, "POST", "/workshops", json_body=body).json()
    joined = _call(
        base_url,
        "POST",
        f"/workshops/{created['id']}/participants",
        json_body={"role": "Facilitator"},
    ).json()
    _echo_json(
        {
            "workshop_id": created["id"],
            "facilitator_alias": joined["alias"],
            "facilitator_token": joined["token"],
        }
    )


@main.command("load-agenda")
@base_url_option
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def load_agenda(base_url: str, config_path: str) -> None:
    """Validate an agenda document and print its canonical form."""
    with open(config_path, encoding="utf-8") as fh:
        document = json.load(fh)
    body = {
        "agenda": document.get("agenda", document),
        "issue_areas": document.get("issue_areas", []),
    }
    _echo_json(_call(base_url, "POST", "/agenda/validate", json_body=body).json())


@main.command("open")
@base_url_option
@token_option
@click.argument("workshop_id")
@click.option("--kind", required=True)
def open_step(base_url: str, token: Optional[str], workshop_id: str, kind: str) -> None:
    """Open the next pending step of the given kind."""
    _echo_json(
        _call(
            base_url, "POST", f"/workshops/{workshop_id}/steps/open", token=token, json_body={"kind": kind}
        ).json()
    )


@main.command("close")
@base_url_option
@token_option
@click.argument("workshop_id")
def close_step(base_url: str, token: Optional[str], workshop_id: str) -> None:
    """Close the open step and print its result summary."""
    _echo_json(_call(base_url, "POST", f"/workshops/{workshop_id}/steps/close", token=token).json())


@main.command()
@base_url_option
@token_option
@click.argument("workshop_id")
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True, dir_okay=False))
def merge(base_url: str, token: Optional[str], workshop_id: str, plan_path: str) -> None:
    """Apply a merge plan file ({groups, singleton_areas})."""
    with open(plan_path, encoding="utf-8") as fh:
        plan = json.load(fh)
    body = {
        "groups": plan.get("groups", []),
        "singleton_areas": plan.get("singleton_areas", {}),
    }
    _echo_json(
        _call(base_url, "POST", f"/workshops/{workshop_id}/merge-plan", token=token, json_body=body).json()
    )


@main.command()
@base_url_option
@token_option
@click.argument("workshop_id")
@click.option("--n", "top_n", required=True, type=int)
def cutoff(base_url: str, token: Optional[str], workshop_id: str, top_n: int) -> None:
    """Run the hard cut-off keeping the top n items (boundary ties survive)."""
    _echo_json(
        _call(
            base_url, "POST", f"/workshops/{workshop_id}/cutoff", token=token, json_body={"n": top_n}
        ).json()
    )


@main.command()
@base_url_option
@token_option
@click.argument("workshop_id")
def gate(base_url: str, token: Optional[str], workshop_id: str) -> None:
    """Enact the round's convergence decision."""
    _echo_json(_call(base_url, "POST", f"/workshops/{workshop_id}/gate", token=token).json())


@main.command()
@base_url_option
@token_option
@click.argument("workshop_id")
def advance(base_url: str, token: Optional[str], workshop_id: str) -> None:
    """Advance the workshop to the next phase."""
    _echo_json(_call(base_url, "POST", f"/workshops/{workshop_id}/phase/advance", token=token).json())


@main.command()
@base_url_option
@token_option
@click.argument("workshop_id")
@click.option(
    "--format",
    "export_format",
    default="full-record",
    type=click.Choice(["full-record", "ratings-csv", "chat-log", "scenario-outline"]),
)
@click.option("--disclose", is_flag=True, default=False)
def export(
    base_url: str, token: Optional[str], workshop_id: str, export_format: str, disclose: bool
) -> None:
    """Print an export document to stdout."""
    response = _call(
        base_url,
        "GET",
        f"/workshops/{workshop_id}/export",
        token=token,
        params={"format": export_format, "disclose": disclose},
    )
    click.echo(response.text, nl=False)


@main.command("replay-verify")
@base_url_option
@click.argument("workshop_id")
def replay_verify(base_url: str, workshop_id: str) -> None:
    """Replay the workshop's event log and compare state hashes."""
    report = _call(base_url, "GET", f"/workshops/{workshop_id}/replay-verify").json()
    _echo_json(report)
    if not report.get("match"):
        click.echo("ReplayMismatch", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()

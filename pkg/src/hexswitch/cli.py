"""Command-line interface.

Every command is a thin client over the HTTP service: by default it
calls the FastAPI app in-process, with ``--server`` it talks to a
running instance instead.  A TOML config file (``--config`` or the
HEXSWITCH_CONFIG environment variable) supplies defaults; flags win.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click

from .client import ServiceClient, ServiceError
from .config import AppConfig, ConfigError, load_config

PRESETS: dict[str, dict[str, Any]] = {"lossless17": {"L": 17}}


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"{path} is not valid JSON: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _fail(f"cannot write {out}: {exc}") from exc
    else:
        click.echo(text, nl=False)


def _emit_json(doc: Any, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2), out)


def _client(ctx: click.Context) -> ServiceClient:
    cfg: AppConfig = ctx.obj["config"]
    server = ctx.obj["server"] or cfg.server
    return ServiceClient(server=server)


def _call(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ServiceError as exc:
        raise _fail(str(exc.detail)) from exc


def _resolve_inline_mesh(problem: dict[str, Any], problem_path: str) -> dict[str, Any]:
    """Inline a mesh file reference so the document is self-contained."""
    mesh = problem.get("mesh")
    if isinstance(mesh, str):
        mesh_path = Path(problem_path).parent / mesh
        problem = dict(problem, mesh=_load_json(str(mesh_path)))
    return problem


def _pick(flag_value, config_value, default):
    if flag_value is not None:
        return flag_value
    if config_value is not None:
        return config_value
    return default


@click.group()
@click.option("--config", "config_path", type=str, default=None, metavar="PATH",
              help="TOML config file (default: $HEXSWITCH_CONFIG).")
@click.option("--server", type=str, default=None, metavar="URL",
              help="Remote service URL; default runs the service in-process.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, server: str | None) -> None:
    """Exact routing tools for hexagonal photonic switch meshes."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        raise _fail(str(exc)) from exc
    ctx.obj = {"config": cfg, "server": server}


# -- mesh ------------------------------------------------------------------


@main.group()
def mesh() -> None:
    """Build, inspect and export mesh documents."""


@mesh.command("build")
@click.argument("height", type=click.IntRange(min=1))
@click.argument("width", type=click.IntRange(min=1))
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def mesh_build(ctx: click.Context, height: int, width: int, out: str | None) -> None:
    """Construct a HEIGHT x WIDTH mesh and print its document."""
    with _client(ctx) as client:
        doc = _call(client.mesh_build, height, width)
    _emit_json(doc, out)


@mesh.command("info")
@click.argument("mesh_file", type=str)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def mesh_info(ctx: click.Context, mesh_file: str, out: str | None) -> None:
    """Summarize a mesh document: dimensions and component counts."""
    doc = _load_json(mesh_file)
    with _client(ctx) as client:
        info = _call(client.mesh_info, doc)
    _emit_json(info, out)


def _mesh_dot(doc: dict[str, Any]) -> str:
    lines = ["digraph mesh {", "  rankdir=LR;"]
    for vertex in doc.get("vertices", []):
        lines.append(f'  "v{vertex["id"]}" [shape=point];')
    for port in doc.get("ports", []):
        lines.append(f'  "p{port["id"]}" [shape=box];')
    for arm in doc.get("arms", []):
        lines.append(
            f'  "{arm["tail"]}" -> "{arm["head"]}" [label="puc{arm["puc"]}/{arm["kind"]}"];'
        )
    lines.append("}")
    return "\n".join(lines)


@mesh.command("export")
@click.argument("mesh_file", type=str)
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json",
              show_default=True)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def mesh_export(ctx: click.Context, mesh_file: str, fmt: str, out: str | None) -> None:
    """Validate a mesh document and emit it as canonical JSON or GraphViz."""
    doc = _load_json(mesh_file)
    with _client(ctx) as client:
        status = _call(client.mesh_validate, doc)
    if not status["ok"]:
        raise _fail(f"invalid mesh ({status['invariant']}): {status['detail']}")
    if fmt == "dot":
        _emit(_mesh_dot(doc), out)
    else:
        _emit_json(doc, out)


# -- solve / verify ----------------------------------------------------------


@main.command("solve")
@click.argument("problem_file", type=str)
@click.option("--budget-ms", type=float, default=None)
@click.option("--backend", type=str, default=None)
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def solve_cmd(ctx: click.Context, problem_file: str, budget_ms: float | None,
              backend: str | None, preset: str | None, out: str | None) -> None:
    """Solve a routing problem document; infeasibility is an answer (exit 0)."""
    cfg: AppConfig = ctx.obj["config"]
    problem = _load_json(problem_file)
    if not isinstance(problem, dict):
        raise _fail(f"{problem_file} must hold a problem document (JSON object)")
    problem = _resolve_inline_mesh(problem, problem_file)
    if preset is not None:
        problem = {**problem, **PRESETS[preset]}
    with _client(ctx) as client:
        result = _call(
            client.solve,
            problem,
            budget_ms=_pick(budget_ms, cfg.budget_ms, None),
            backend=_pick(backend, cfg.backend, "search"),
        )
    _emit_json(result, out)


@main.command("verify")
@click.argument("problem_file", type=str)
@click.argument("solution_file", type=str)
@click.option("--matching-semantics", is_flag=True, default=False,
              help="Also reject routes that pass through foreign ports.")
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def verify_cmd(ctx: click.Context, problem_file: str, solution_file: str,
               matching_semantics: bool, out: str | None) -> None:
    """Check a solution document; exits nonzero iff violations were found."""
    problem = _load_json(problem_file)
    if not isinstance(problem, dict):
        raise _fail(f"{problem_file} must hold a problem document (JSON object)")
    problem = _resolve_inline_mesh(problem, problem_file)
    solution = _load_json(solution_file)
    with _client(ctx) as client:
        result = _call(client.verify, problem, solution, matching_semantics=matching_semantics)
    _emit_json({"violations": result["violations"]}, out)
    if not result["ok"]:
        sys.exit(1)


# -- rotor -------------------------------------------------------------------


def _mesh_source(mesh_file: str | None, height: int | None, width: int | None) -> dict[str, Any]:
    if mesh_file is not None:
        return {"mesh": _load_json(mesh_file)}
    if height is None or width is None:
        raise _fail("give either --mesh or both --height and --width")
    return {"height": height, "width": width}


@main.group()
def rotor() -> None:
    """Rotor switching schedules: generate and run them."""


@rotor.command("gen")
@click.option("--mesh", "mesh_file", type=str, default=None, metavar="PATH")
@click.option("--height", type=click.IntRange(min=1), default=None)
@click.option("--width", type=click.IntRange(min=1), default=None)
@click.option("--radix", type=click.IntRange(min=2), required=True,
              help="Number of attached hosts.")
@click.option("--policy", type=click.Choice(["spread", "corners"]), default=None)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def rotor_gen(ctx: click.Context, mesh_file: str | None, height: int | None,
              width: int | None, radix: int, policy: str | None, out: str | None) -> None:
    """Bind host ports and emit the full rotor matching schedule."""
    cfg: AppConfig = ctx.obj["config"]
    source = _mesh_source(mesh_file, height, width)
    with _client(ctx) as client:
        doc = _call(client.rotor_generate, radix,
                    policy=_pick(policy, cfg.policy, "spread"), **source)
    _emit_json(doc, out)


@rotor.command("run")
@click.option("--mesh", "mesh_file", type=str, default=None, metavar="PATH")
@click.option("--height", type=click.IntRange(min=1), default=None)
@click.option("--width", type=click.IntRange(min=1), default=None)
@click.option("--radix", type=click.IntRange(min=2), default=None)
@click.option("--schedule", "schedule_file", type=str, default=None, metavar="PATH",
              help="Run a previously generated schedule instead of --radix.")
@click.option("--policy", type=click.Choice(["spread", "corners"]), default=None)
@click.option("--budget-ms", type=float, default=None)
@click.option("--backend", type=str, default=None)
@click.option("--max-route-length", type=float, default=None)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def rotor_run(ctx: click.Context, mesh_file: str | None, height: int | None,
              width: int | None, radix: int | None, schedule_file: str | None,
              policy: str | None, budget_ms: float | None, backend: str | None,
              max_route_length: float | None, out: str | None) -> None:
    """Solve every matching of a rotor cycle and report per-matching results."""
    cfg: AppConfig = ctx.obj["config"]
    if radix is None and schedule_file is None:
        raise _fail("give either --radix or --schedule")
    payload: dict[str, Any] = dict(_mesh_source(mesh_file, height, width))
    if schedule_file is not None:
        payload["schedule"] = _load_json(schedule_file)
    else:
        payload["radix"] = radix
        payload["policy"] = _pick(policy, cfg.policy, "spread")
    payload["backend"] = _pick(backend, cfg.backend, "search")
    budget = _pick(budget_ms, cfg.budget_ms, None)
    if budget is not None:
        payload["budget_ms"] = budget
    if max_route_length is not None:
        payload["max_route_length"] = max_route_length
    latency = cfg.latency_params()
    if latency is not None:
        payload["latency"] = latency
    with _client(ctx) as client:
        doc = _call(client.rotor_run, **payload)
    _emit_json(doc, out)


# -- bench -------------------------------------------------------------------


def _int_list(raw: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise _fail(f"{flag} must be a comma-separated list of integers, got {raw!r}") from exc
    if not values:
        raise _fail(f"{flag} must name at least one value")
    return values


@main.group()
def bench() -> None:
    """Benchmark experiments; output is CSV."""


@bench.command("radix")
@click.option("--height", type=click.IntRange(min=1), required=True)
@click.option("--width", type=click.IntRange(min=1), required=True)
@click.option("--radices", type=str, required=True, metavar="N,N,...",
              help="Candidate host counts to probe.")
@click.option("--policy", type=click.Choice(["spread", "corners"]), default=None)
@click.option("--budget-ms", type=float, default=None)
@click.option("--backend", type=str, default=None)
@click.option("--max-route-length", type=float, default=None)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def bench_radix_cmd(ctx: click.Context, height: int, width: int, radices: str,
                    policy: str | None, budget_ms: float | None, backend: str | None,
                    max_route_length: float | None, out: str | None) -> None:
    """Probe which rotor radices a mesh supports; one CSV row per matching."""
    cfg: AppConfig = ctx.obj["config"]
    payload: dict[str, Any] = {
        "policy": _pick(policy, cfg.policy, "spread"),
        "backend": _pick(backend, cfg.backend, "search"),
    }
    budget = _pick(budget_ms, cfg.budget_ms, None)
    if budget is not None:
        payload["budget_ms"] = budget
    if max_route_length is not None:
        payload["max_route_length"] = max_route_length
    latency = cfg.latency_params()
    if latency is not None:
        payload["latency"] = latency
    with _client(ctx) as client:
        doc = _call(client.bench_radix, height, width,
                    _int_list(radices, "--radices"), **payload)
    _emit(doc["csv"], out)


@bench.command("meshscale")
@click.option("--sizes", type=str, required=True, metavar="N,N,...",
              help="Square mesh sizes (W = H).")
@click.option("--route-counts", type=str, default="1,2,4", show_default=True,
              metavar="N,N,...")
@click.option("--budget-ms", type=float, default=None)
@click.option("--backend", type=str, default=None)
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def bench_meshscale_cmd(ctx: click.Context, sizes: str, route_counts: str,
                        budget_ms: float | None, backend: str | None,
                        out: str | None) -> None:
    """Time corner-to-corner routing across square mesh sizes; CSV output."""
    cfg: AppConfig = ctx.obj["config"]
    payload: dict[str, Any] = {
        "route_counts": _int_list(route_counts, "--route-counts"),
        "backend": _pick(backend, cfg.backend, "search"),
    }
    budget = _pick(budget_ms, cfg.budget_ms, None)
    if budget is not None:
        payload["budget_ms"] = budget
    with _client(ctx) as client:
        doc = _call(client.bench_meshscale, _int_list(sizes, "--sizes"), **payload)
    _emit(doc["csv"], out)


# -- predict / serve ----------------------------------------------------------


@main.command("predict")
@click.argument("route_length", type=click.IntRange(min=1))
@click.option("--out", type=str, default=None, metavar="PATH")
@click.pass_context
def predict_cmd(ctx: click.Context, route_length: int, out: str | None) -> None:
    """Look up expected bitrate and packet loss for a route of ROUTE_LENGTH gates."""
    cfg: AppConfig = ctx.obj["config"]
    with _client(ctx) as client:
        doc = _call(client.predict, route_length, table=cfg.bitrate_table)
    _emit(f"{doc['bitrate_gbps']:g} Gb/s, {doc['loss_pct']:g}% loss", out)


@main.command("serve")
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--port", type=click.IntRange(min=1, max=65535), default=8000,
              show_default=True)
def serve_cmd(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

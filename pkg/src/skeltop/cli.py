"""Thin CLI client for the skeltop service.

Every subcommand talks to the HTTP API.  By default the FastAPI app is
mounted in-process (no server needed); --server / SKELTOP_SERVER points the
client at a remote instance instead.

Exit codes: 0 success, 1 I/O or processing error, 2 bad flags.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from . import __version__

_METHODS = ("soft", "euler", "boolean")


def _client(ctx) -> httpx.Client:
    server = ctx.obj.get("server")
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient
    from .service import create_app
    return TestClient(create_app(), raise_server_exceptions=False)


def _post(ctx, path, payload) -> dict:
    with _client(ctx) as client:
        try:
            resp = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach server: {exc}", err=True)
            sys.exit(1)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(1)
    return resp.json()


@click.group()
@click.version_option(__version__)
@click.option("--server", envvar="SKELTOP_SERVER", default=None,
              help="Base URL of a running service; default runs in-process.")
@click.option("--threads", "-j", envvar="SKELTOP_THREADS", type=int, default=1,
              show_default=True,
              help="Worker threads for thinning candidate classification.")
@click.pass_context
def main(ctx, server, threads):
    """Skeletonization, topological metrics and benchmarks for 3D volumes."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["threads"] = max(threads, 1)


@main.command()
@click.option("--method", type=click.Choice(_METHODS), default="euler",
              show_default=True)
@click.option("--iterations", type=int, default=10, show_default=True,
              help="Erosion rounds for the soft method.")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--no-endpoints", is_flag=True,
              help="Do not protect curve endpoints from deletion.")
@click.pass_context
def skeletonize(ctx, method, iterations, in_path, out_path, no_endpoints):
    """Skeletonize a volume and report runtime and Betti numbers."""
    data = _post(ctx, "/skeletonize", {
        "in_path": in_path,
        "out_path": out_path,
        "method": method,
        "iterations": iterations,
        "preserve_endpoints": not no_endpoints,
        "threads": ctx.obj["threads"],
    })
    click.echo(json.dumps({
        "runtime_ms": data["runtime_ms"],
        "input_betti": data["input_betti"],
        "output_betti": data["output_betti"],
    }))


@main.command()
@click.option("--pred", "pred_path", required=True, type=click.Path())
@click.option("--gt", "gt_path", required=True, type=click.Path())
@click.option("--skel", type=click.Choice(_METHODS), default="euler",
              show_default=True)
@click.option("--min-component", type=int, default=100, show_default=True,
              help="Remove predicted components smaller than this; 0 disables.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="json", show_default=True)
@click.pass_context
def metrics(ctx, pred_path, gt_path, skel, min_component, fmt):
    """Score a predicted segmentation against a ground truth volume."""
    data = _post(ctx, "/metrics", {
        "pred_path": pred_path,
        "gt_path": gt_path,
        "skel_method": skel,
        "min_component": min_component,
    })
    if fmt == "json":
        click.echo(json.dumps(data))
    else:
        cols = list(data.keys())
        click.echo(",".join(cols))
        click.echo(",".join("" if data[c] is None else str(data[c])
                            for c in cols))


@main.command()
@click.option("--methods", default="soft,euler,boolean", show_default=True,
              help="Comma-separated subset of soft,euler,boolean.")
@click.option("--dims", default="192,192,64", show_default=True,
              help="Patch dims nx,ny,nz.")
@click.option("--repeats", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--iterations", type=int, default=10, show_default=True)
@click.option("--radius", type=int, default=3, show_default=True)
@click.option("--branches", type=int, default=10, show_default=True)
@click.option("--input", "inputs", multiple=True, type=click.Path(),
              help="Benchmark these volumes instead of phantom patches.")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also write per-repeat results as CSV.")
@click.pass_context
def bench(ctx, methods, dims, repeats, seed, iterations, radius, branches,
          inputs, csv_path):
    """Compare skeletonization methods on vessel-tree patches."""
    method_list = [m.strip() for m in methods.split(",") if m.strip()]
    for m in method_list:
        if m not in _METHODS:
            raise click.UsageError(f"unknown method {m!r}")
    try:
        patch_dims = [int(v) for v in dims.split(",")]
        if len(patch_dims) != 3:
            raise ValueError
    except ValueError:
        raise click.UsageError("--dims wants nx,ny,nz")
    data = _post(ctx, "/bench", {
        "methods": method_list,
        "patch_dims": patch_dims,
        "repeats": repeats,
        "seed": seed,
        "soft_iterations": iterations,
        "radius": radius,
        "n_branches": branches,
        "inputs": list(inputs),
        "threads": ctx.obj["threads"],
    })
    click.echo(data["table"], nl=False)
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(data["csv"])
    else:
        click.echo(data["csv"], nl=False)


@main.command()
@click.argument("spec", nargs=-1, required=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def phantom(ctx, spec, out_path):
    """Generate a synthetic phantom from a key=value SPEC string."""
    from .phantom import KINDS
    text = " ".join(spec)
    for token in text.split():
        if token.startswith("kind=") and token.split("=", 1)[1] not in KINDS:
            raise click.UsageError(f"invalid phantom kind {token.split('=', 1)[1]!r}")
    data = _post(ctx, "/phantom", {"spec": text, "out_path": out_path})
    click.echo(json.dumps({"path": data["path"], "expected": data["expected"],
                           "foreground": data["foreground"]}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

"""Command-line front end.

Every subcommand assembles one JSON config (file first, flags override)
and posts it to the HTTP service: by default an in-process app, or a
remote instance via --server. Exit codes: 0 all checks passed, 1 a
gated check failed, 2 config or transport trouble.

Usage:
    vlasov-bridge verify --scenario example1 --a 2 --x0 0
    vlasov-bridge verify --scenario example2 --q 1 --r0 1 --out run/
    vlasov-bridge bridge --scenario example1 --roundtrip --out dumps/
    vlasov-bridge sphere --gamma-bar 1 --r0 1 --t-end 1.63 --out run/
    vlasov-bridge serve --port 8000
"""

from __future__ import annotations

import json
import logging
import os
import sys
import warnings
from pathlib import Path

import click

from . import __version__

log = logging.getLogger("vlasov_bridge.cli")

_TOL_FLAGS = (
    "tol_rec", "tol_agree", "ode_rel", "tol_schrod",
    "tol_im_u", "tol_route", "tol_com", "support_rel",
)


def _setup_logging() -> None:
    level = os.environ.get("VLASOV_BRIDGE_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


class _InProcessClient:
    """Route requests straight into the app without a socket."""

    def __init__(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)


class _RemoteClient:
    def __init__(self, base_url: str):
        import httpx

        self._client = httpx.Client(base_url=base_url, timeout=300.0)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)


def _client(server: str | None):
    try:
        return _RemoteClient(server) if server else _InProcessClient()
    except Exception as exc:
        raise click.ClickException(f"cannot reach service: {exc}")


def _load_json(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _die2(f"cannot read config {path}: {exc}")
    if not isinstance(doc, dict):
        _die2(f"config {path} must hold a JSON object")
    return doc


def _die2(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _merge_run_config(config, scenario, name, a, x0, q, r0, grid_n, grid_lo,
                      grid_hi, grid_boundary, grid_dim, alpha, beta, gamma,
                      eps, mu, times, emit, out, tols) -> dict:
    doc = _load_json(config)
    scen = dict(doc.get("scenario") or {})
    if scenario is not None:
        scen["type"] = scenario
    if name is not None:
        scen["name"] = name
    params = dict(scen.get("params") or {})
    for key, val in (("a", a), ("x0", x0), ("q", q), ("r0", r0)):
        if val is not None:
            params[key] = val
    if params:
        scen["params"] = params
    grid = dict(scen.get("grid") or {})
    for key, val in (("n", grid_n), ("lo", grid_lo), ("hi", grid_hi),
                     ("boundary", grid_boundary), ("dim", grid_dim)):
        if val is not None:
            grid[key] = val
    if grid:
        scen["grid"] = grid
    doc["scenario"] = scen
    consts = dict(doc.get("constants") or {})
    for key, val in (("alpha", alpha), ("beta", beta), ("gamma", gamma),
                     ("eps_bar", eps), ("mu_bar", mu)):
        if val is not None:
            consts[key] = val
    if consts:
        doc["constants"] = consts
    if times is not None:
        try:
            doc["times"] = [float(tok) for tok in times.split(",") if tok.strip()]
        except ValueError:
            _die2(f"bad --times value {times!r}")
    if emit:
        doc["emit"] = list(emit)
    if out is not None:
        doc["output_dir"] = out
    tol_doc = dict(doc.get("tolerances") or {})
    for key, val in tols.items():
        if val is not None:
            tol_doc[key] = val
    if tol_doc:
        doc["tolerances"] = tol_doc
    return doc


def _post(server: str | None, path: str, payload: dict) -> dict:
    client = _client(server)
    try:
        response = client.post(path, payload)
    except Exception as exc:
        _die2(f"request failed: {exc}")
    if response.status_code in (400, 422):
        detail = response.json().get("detail", response.text)
        if isinstance(detail, list):
            detail = "; ".join(
                f"{'.'.join(str(p) for p in err.get('loc', []))}: {err.get('msg', '')}"
                for err in detail
            )
        _die2(f"{detail}")
    if response.status_code != 200:
        _die2(f"service returned {response.status_code}: {response.text[:500]}")
    return response.json()


def _finish(report: dict, out: str | None, filename: str) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out is not None:
        path = Path(out) / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
        log.info("wrote %s", path)
    click.echo(text)
    if report.get("pass") is False:
        sys.exit(1)


def _run_options(fn):
    """Shared scenario/constants/grid/tolerance flags."""
    opts = [
        click.option("--config", type=click.Path(), default=None,
                     help="JSON config document; flags override its values."),
        click.option("--scenario", type=click.Choice(["example1", "example2", "sampled"]),
                     default=None, help="Scenario type."),
        click.option("--name", default=None, help="Scenario label for reports."),
        click.option("--a", type=float, default=None, help="Acceleration slope (example1)."),
        click.option("--x0", type=float, default=None, help="Initial center (example1)."),
        click.option("--q", type=float, default=None, help="Total charge (example2)."),
        click.option("--r0", type=float, default=None, help="Initial radius (example2)."),
        click.option("--grid-n", type=int, default=None, help="Nodes per axis."),
        click.option("--grid-lo", type=float, default=None, help="Domain lower edge."),
        click.option("--grid-hi", type=float, default=None, help="Domain upper edge."),
        click.option("--grid-boundary", type=click.Choice(["periodic", "decaying"]),
                     default=None, help="Boundary promise."),
        click.option("--grid-dim", type=click.Choice(["1", "3"]), default=None,
                     help="Broadcast scalar grid flags to this dimension."),
        click.option("--alpha", type=float, default=None),
        click.option("--beta", type=float, default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--eps", type=float, default=None, help="eps_bar constant."),
        click.option("--mu", type=float, default=None, help="mu_bar constant."),
        click.option("--times", default=None, help="Comma-separated evaluation times."),
        click.option("--emit", multiple=True,
                     type=click.Choice(["fields", "residuals", "com", "agreement",
                                        "sphere_trajectory"]),
                     help="Artifacts to write under --out."),
        click.option("--out", type=click.Path(), default=None, help="Output directory."),
        click.option("--server", default=None, metavar="URL",
                     help="Remote service base URL; default runs in process."),
    ]
    for name in _TOL_FLAGS:
        flag = "--" + name.replace("_", "-")
        opts.append(click.option(flag, name, type=float, default=None,
                                 help=f"Override tolerance {name}."))
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _collect(kwargs) -> tuple[dict, str | None, str | None]:
    tols = {name: kwargs.pop(name) for name in _TOL_FLAGS}
    server = kwargs.pop("server")
    out = kwargs.get("out")
    grid_dim = kwargs.pop("grid_dim")
    doc = _merge_run_config(
        config=kwargs.pop("config"),
        scenario=kwargs.pop("scenario"),
        name=kwargs.pop("name"),
        a=kwargs.pop("a"),
        x0=kwargs.pop("x0"),
        q=kwargs.pop("q"),
        r0=kwargs.pop("r0"),
        grid_n=kwargs.pop("grid_n"),
        grid_lo=kwargs.pop("grid_lo"),
        grid_hi=kwargs.pop("grid_hi"),
        grid_boundary=kwargs.pop("grid_boundary"),
        grid_dim=int(grid_dim) if grid_dim is not None else None,
        alpha=kwargs.pop("alpha"),
        beta=kwargs.pop("beta"),
        gamma=kwargs.pop("gamma"),
        eps=kwargs.pop("eps"),
        mu=kwargs.pop("mu"),
        times=kwargs.pop("times"),
        emit=kwargs.pop("emit"),
        out=kwargs.pop("out"),
        tols=tols,
    )
    return doc, server, out


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Continuity-flow to wave-mechanics bridge toolkit."""
    _setup_logging()


@main.command()
@_run_options
def verify(**kwargs):
    """Sweep times, check every gated residual, write report.json."""
    doc, server, out = _collect(kwargs)
    report = _post(server, "/verify", doc)
    _finish(report, out, "report.json")


@main.command()
@_run_options
@click.option("--direction", type=click.Choice(["forward", "inverse"]),
              default="forward", help="Map direction.")
@click.option("--roundtrip", is_flag=True, help="Run both directions, report the gap.")
def bridge(direction, roundtrip, **kwargs):
    """Emit psi/U (forward) or f/v (inverse) CSV dumps."""
    doc, server, out = _collect(kwargs)
    doc.setdefault("emit", ["fields"])
    doc["direction"] = direction
    doc["roundtrip"] = roundtrip
    report = _post(server, "/bridge", doc)
    _finish(report, out, "bridge.json")


@main.command()
@_run_options
def fields(**kwargs):
    """Dump the electromagnetic-analogue fields per time."""
    doc, server, out = _collect(kwargs)
    doc.setdefault("emit", ["fields"])
    report = _post(server, "/fields", doc)
    _finish(report, out, "fields.json")


@main.command()
@_run_options
def com(**kwargs):
    """Center-of-mass diagnostics for decaying scenarios."""
    doc, server, out = _collect(kwargs)
    report = _post(server, "/com", doc)
    _finish(report, out, "com.json")


@main.command()
@click.option("--q", type=float, default=None, help="Total charge.")
@click.option("--gamma-bar", type=float, default=None, help="Effective gravity parameter.")
@click.option("--r0", type=float, default=1.0, help="Initial radius.")
@click.option("--t-end", type=float, default=1.0, help="Integration horizon.")
@click.option("--dt", type=float, default=1e-3, help="Base step size.")
@click.option("--ode-rel", type=float, default=1e-8, help="Step-halving tolerance.")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--eps", type=float, default=None, help="eps_bar constant.")
@click.option("--mu", type=float, default=None, help="mu_bar constant.")
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
@click.option("--server", default=None, metavar="URL")
def sphere(q, gamma_bar, r0, t_end, dt, ode_rel, alpha, beta, gamma, eps, mu,
           out, server):
    """Integrate the charged-sphere expansion and tabulate the trajectory."""
    payload = {
        "q_charge": q,
        "gamma_bar": gamma_bar,
        "r0": r0,
        "t_end": t_end,
        "dt": dt,
        "rel_tol": ode_rel,
        "output_dir": out,
    }
    consts = {k: v for k, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma),
                                ("eps_bar", eps), ("mu_bar", mu)) if v is not None}
    if consts:
        payload["constants"] = consts
    report = _post(server, "/sphere", payload)
    _finish(report, out, "sphere.json")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

"""HTTP front end over the pipeline runners.

Config problems surface as 400 with a diagnostic detail string; schema
violations are FastAPI's own 422. Both map to CLI exit code 2.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..constants import DEFAULT_CONSTANTS, Constants
from ..pipeline import (
    ConfigError,
    load_config,
    run_bridge,
    run_com,
    run_fields,
    run_sphere,
    run_verify,
)
from .models import BridgeRequest, RunRequest, SphereRequest

log = logging.getLogger("vlasov_bridge.service")


def _constants_from(spec) -> Constants:
    if spec is None:
        return DEFAULT_CONSTANTS
    base = DEFAULT_CONSTANTS
    vals = spec.as_config()
    return Constants(
        alpha=vals.get("alpha", base.alpha),
        beta=vals.get("beta", base.beta),
        gamma=vals.get("gamma", base.gamma),
        eps_bar=vals.get("eps_bar", base.eps_bar),
        mu_bar=vals.get("mu_bar", base.mu_bar),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="vlasov-bridge", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        log.warning("config error on %s: %s", request.url.path, exc)
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/verify")
    def verify(body: RunRequest) -> dict:
        return run_verify(load_config(body.as_config()))

    @app.post("/bridge")
    def bridge(body: BridgeRequest) -> dict:
        cfg = load_config(body.as_config())
        return run_bridge(cfg, direction=body.direction, roundtrip=body.roundtrip)

    @app.post("/fields")
    def fields(body: RunRequest) -> dict:
        return run_fields(load_config(body.as_config()))

    @app.post("/com")
    def com(body: RunRequest) -> dict:
        return run_com(load_config(body.as_config()))

    @app.post("/sphere")
    def sphere(body: SphereRequest) -> dict:
        return run_sphere(
            q_charge=body.q_charge,
            gamma_bar=body.gamma_bar,
            r0=body.r0,
            t_end=body.t_end,
            dt=body.dt,
            c=_constants_from(body.constants),
            rel_tol=body.rel_tol,
            output_dir=body.output_dir,
        )

    return app

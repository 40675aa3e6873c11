"""Request schemas for the HTTP service.

The wire format mirrors the pipeline config documents one-to-one; every
model knows how to render itself back into the plain-dict form the
pipeline loader consumes.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: float | list[float]
    hi: float | list[float]
    n: int | list[int]
    boundary: Literal["periodic", "decaying"] = "decaying"
    dim: Literal[1, 3] | None = None

    def as_config(self) -> dict:
        out = self.model_dump()
        if out["dim"] is None:
            del out["dim"]
        return out


class ScenarioSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["example1", "example2", "sampled"]
    name: str | None = None
    params: dict = Field(default_factory=dict)
    grid: GridSpec | None = None
    derivative_mode: Literal["analytic", "finite_difference"] | None = None
    dt_fd: float | None = None

    def as_config(self) -> dict:
        out: dict = {"type": self.type, "params": dict(self.params)}
        if self.name is not None:
            out["name"] = self.name
        if self.grid is not None:
            out["grid"] = self.grid.as_config()
        if self.derivative_mode is not None:
            out["derivative_mode"] = self.derivative_mode
        if self.dt_fd is not None:
            out["dt_fd"] = self.dt_fd
        return out


class ConstantsSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    eps_bar: float | None = None
    mu_bar: float | None = None

    def as_config(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class RunRequest(BaseModel):
    """Shared body for verify / fields / com runs."""

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioSpec
    constants: ConstantsSpec | None = None
    times: list[float] | None = None
    tolerances: dict[str, float] | None = None
    output_dir: str | None = None
    emit: list[str] | None = None

    def as_config(self) -> dict:
        out: dict = {"scenario": self.scenario.as_config()}
        if self.constants is not None:
            out["constants"] = self.constants.as_config()
        if self.times is not None:
            out["times"] = list(self.times)
        if self.tolerances is not None:
            out["tolerances"] = dict(self.tolerances)
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        if self.emit is not None:
            out["emit"] = list(self.emit)
        return out


class BridgeRequest(RunRequest):
    direction: Literal["forward", "inverse"] = "forward"
    roundtrip: bool = False


class SphereRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    q_charge: float | None = None
    gamma_bar: float | None = None
    r0: float = 1.0
    t_end: float = 1.0
    dt: float = 1e-3
    rel_tol: float = 1e-8
    constants: ConstantsSpec | None = None
    output_dir: str | None = None

"""HTTP service wrapping the pipeline runners."""

from .app import create_app
from .models import (
    BridgeRequest,
    ConstantsSpec,
    GridSpec,
    RunRequest,
    ScenarioSpec,
    SphereRequest,
)

__all__ = [
    "BridgeRequest",
    "ConstantsSpec",
    "GridSpec",
    "RunRequest",
    "ScenarioSpec",
    "SphereRequest",
    "create_app",
]

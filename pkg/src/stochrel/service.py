"""HTTP service exposing the experiment runner.

POST /run executes a config document and returns the rendered artifacts;
clients (the bundled CLI included) write them to disk unchanged, which keeps
the byte-determinism guarantee end to end.  Configuration problems map to
422, numerical failures to 500, both with a structured ``detail``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, presets
from .errors import ConfigurationError, NumericalError
from .experiments import parse_config, run_experiment


class RunRequest(BaseModel):
    config_text: str
    overrides: dict[str, str] = Field(default_factory=dict)
    seed: int | None = None


class ArtifactModel(BaseModel):
    filename: str
    content: str


class RunResponse(BaseModel):
    kind: str
    artifacts: list[ArtifactModel]
    manifest: dict[str, str]
    summary: dict


class PresetInfo(BaseModel):
    name: str
    description: str


class PresetList(BaseModel):
    presets: list[PresetInfo]


class PresetBody(BaseModel):
    name: str
    config_text: str


class Health(BaseModel):
    status: str
    version: str


app = FastAPI(title="stochrel", version=__version__)


@app.get("/health", response_model=Health)
def health() -> Health:
    return Health(status="ok", version=__version__)


@app.post("/run", response_model=RunResponse)
def run(request: RunRequest) -> RunResponse:
    overrides = dict(request.overrides)
    if request.seed is not None:
        overrides["seeds"] = str(request.seed)
    try:
        config = parse_config(request.config_text, overrides)
        result = run_experiment(config)
    except (ConfigurationError, ValueError) as err:
        # core-layer invariant violations (ValueError) are configuration
        # problems from the caller's point of view
        raise HTTPException(status_code=422, detail={"error": "config", "message": str(err)})
    except NumericalError as err:
        raise HTTPException(status_code=500, detail={"error": "numerical", "message": str(err)})
    return RunResponse(
        kind=result.kind,
        artifacts=[ArtifactModel(filename=a.filename, content=a.content) for a in result.artifacts],
        manifest=result.manifest,
        summary=result.summary,
    )


@app.get("/presets", response_model=PresetList)
def preset_list() -> PresetList:
    return PresetList(
        presets=[
            PresetInfo(name=name, description=presets.preset_description(name))
            for name in presets.list_presets()
        ]
    )


@app.get("/presets/{name}", response_model=PresetBody)
def preset_body(name: str) -> PresetBody:
    try:
        text = presets.preset_text(name)
    except KeyError as err:
        raise HTTPException(status_code=404, detail=str(err))
    return PresetBody(name=name, config_text=text)

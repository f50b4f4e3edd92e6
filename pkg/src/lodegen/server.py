"""Local HTTP API for the browser UI: generate, sample, evaluate, health."""

from __future__ import annotations

import secrets
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import chain as chain_mod
from . import lstm as lstm_mod
from .errors import LodegenError, StructureError
from .generator import GenConfig, generate_level
from .lstm import sample_path
from .metrics import evaluate_level
from .paths import annotated_to_json
from .tiles import ACTIONS, TILES, TileGrid, serialize_level


class GenerateRequest(BaseModel):
    actions: str | None = None
    path_length: int | None = None
    seed: int | None = None


class EvaluateRequest(BaseModel):
    tiles: list[str]


def _fresh_seed() -> int:
    return secrets.randbits(32)


def create_app(
    lstm_path: str | None = None,
    chain_path: str | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="lodegen")
    state = {"lstm": None, "chain": None, "compat": None, "stats": None}
    if lstm_path:
        state["lstm"] = lstm_mod.load_model(lstm_path)
    if chain_path:
        state["chain"], state["compat"], state["stats"] = chain_mod.load_models(chain_path)

    def _require_chain():
        if state["chain"] is None:
            raise HTTPException(status_code=503, detail="models not loaded")

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "lstm_loaded": state["lstm"] is not None,
            "chain_loaded": state["chain"] is not None,
        }

    @app.post("/api/generate")
    def generate(req: GenerateRequest):
        _require_chain()
        if req.actions is not None:
            bad = set(req.actions) - set(ACTIONS)
            if bad:
                raise HTTPException(
                    status_code=400,
                    detail=f"invalid action characters: {sorted(bad)}",
                )
        elif state["lstm"] is None:
            raise HTTPException(status_code=503, detail="path model not loaded")
        seed = req.seed if req.seed is not None else _fresh_seed()
        config = GenConfig(
            path_length=req.path_length if req.path_length is not None else 103,
            seed=seed,
        )
        level, meta = generate_level(
            config,
            state["lstm"],
            state["chain"],
            state["compat"],
            state["stats"],
            actions=req.actions,
        )
        doc = annotated_to_json(level)
        doc["seed"] = seed
        doc["vglc"] = serialize_level(level.grid)
        doc["path"] = {"start": meta["path_start"], "actions": meta["path_actions"]}
        doc["metrics"] = evaluate_level(level.grid).as_dict()
        return doc

    @app.get("/api/path/sample")
    def path_sample(length: int = 103, seed: int | None = None):
        if state["lstm"] is None:
            raise HTTPException(status_code=503, detail="path model not loaded")
        if length < 0:
            raise HTTPException(status_code=400, detail="length must be >= 0")
        used = seed if seed is not None else _fresh_seed()
        rng = np.random.default_rng(used)
        return {"actions": sample_path(state["lstm"], length, rng), "seed": used}

    @app.post("/api/evaluate")
    def evaluate(req: EvaluateRequest):
        if not req.tiles or any(len(r) != len(req.tiles[0]) for r in req.tiles):
            raise HTTPException(status_code=400, detail="ragged or empty tile rows")
        bad = set("".join(req.tiles)) - TILES
        if bad:
            raise HTTPException(status_code=400, detail=f"unknown tiles: {sorted(bad)}")
        grid = TileGrid(len(req.tiles[0]), len(req.tiles), tuple("".join(req.tiles)))
        try:
            return evaluate_level(grid).as_dict()
        except StructureError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.exception_handler(LodegenError)
    def _lodegen_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

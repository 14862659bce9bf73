"""vpbounds FastAPI application: upload a grid, ask for circles and boundaries."""

from __future__ import annotations

import logging
import math

from fastapi import Depends, FastAPI, File, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from vpbounds.api.models import (
    CircleRequest,
    CircleResponse,
    CityBoundaryRequest,
    CityBoundaryResponse,
    GridResponse,
    ProfileRequest,
    ProfileResponse,
)
from vpbounds.api.repository import GridRepository
from vpbounds.boundary import CitySearch, boundary_geojson, city_boundary
from vpbounds.core.config import settings
from vpbounds.core.errors import VpBoundsError
from vpbounds.core.logging import configure_logging
from vpbounds.grid import DensityGrid
from vpbounds.grid.io import decode_grid
from vpbounds.solver import SearchConstraint, default_fractions, vp_circle, vp_profile

logger = logging.getLogger(__name__)

# Upload ceiling for one raster
_MAX_GRID_BYTES = 256 * 1024 * 1024

app = FastAPI(
    title="vpbounds",
    description="Valeriepieris circles, ring models and city boundaries on population grids",
    version="0.1.0",
)

# Module-level singleton; tests may replace via app.dependency_overrides.
_grid_repo = GridRepository()


def get_grid_repo() -> GridRepository:
    return _grid_repo


def _grid_or_404(grid_id: str, repo: GridRepository) -> DensityGrid:
    grid = repo.get(grid_id)
    if grid is None:
        raise HTTPException(status_code=404, detail=f"unknown grid {grid_id}")
    return grid


@app.exception_handler(VpBoundsError)
def _vpbounds_error(request: Request, exc: VpBoundsError) -> JSONResponse:
    logger.warning("%s on %s: %s", type(exc).__name__, request.url.path, exc)
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})


@app.exception_handler(ValidationError)
def _validation_error(request: Request, exc: ValidationError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"error": "ValidationError", "detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/v1/grids", response_model=GridResponse, status_code=201)
async def upload_grid(
    file: UploadFile = File(...),
    repo: GridRepository = Depends(get_grid_repo),
) -> GridResponse:
    data = await file.read()
    if len(data) > _MAX_GRID_BYTES:
        raise HTTPException(status_code=413, detail="grid exceeds the upload limit")
    grid = decode_grid(data)
    grid_id = repo.save(grid)
    s = grid.spec
    logger.info("stored grid %s: %dx%d, mass %.6g", grid_id, s.n_rows, s.n_cols, grid.total_mass)
    return GridResponse(
        grid_id=grid_id,
        lat_min=s.lat_min,
        lon_min=s.lon_min,
        cell_size=s.cell_size,
        n_rows=s.n_rows,
        n_cols=s.n_cols,
        total_mass=grid.total_mass,
    )


@app.post("/v1/grids/{grid_id}/circle", response_model=CircleResponse)
def circle(
    grid_id: str, req: CircleRequest, repo: GridRepository = Depends(get_grid_repo)
) -> CircleResponse:
    grid = _grid_or_404(grid_id, repo)
    constraint = SearchConstraint(
        center=req.center, max_distance_km=req.max_distance_km, min_cell_mass=req.min_cell_mass
    )
    c = vp_circle(
        grid, req.f, constraint, threads=settings.threads, coarse_factor=req.coarse_factor
    )
    return CircleResponse.of(c)


@app.post("/v1/grids/{grid_id}/profile", response_model=ProfileResponse)
def profile(
    grid_id: str, req: ProfileRequest, repo: GridRepository = Depends(get_grid_repo)
) -> ProfileResponse:
    grid = _grid_or_404(grid_id, repo)
    constraint = SearchConstraint(center=req.center, max_distance_km=req.max_distance_km)
    fractions = req.fractions or default_fractions(grid, req.n_fractions)
    prof = vp_profile(
        grid, fractions, constraint, threads=settings.threads, coarse_factor=req.coarse_factor
    )
    return ProfileResponse(
        total_mass=prof.total_mass, entries=[CircleResponse.of(e) for e in prof.entries]
    )


@app.post("/v1/grids/{grid_id}/city-boundary", response_model=CityBoundaryResponse)
def city(
    grid_id: str, req: CityBoundaryRequest, repo: GridRepository = Depends(get_grid_repo)
) -> CityBoundaryResponse:
    grid = _grid_or_404(grid_id, repo)
    search = CitySearch(**req.model_dump(exclude={"seed", "restarts"}))
    result = city_boundary(
        grid, search, seed=req.seed, restarts=req.restarts, threads=settings.threads
    )
    return CityBoundaryResponse(
        threshold_density=result.boundaries.threshold_density,
        principal_label=result.boundaries.principal_label,
        rings=[
            {"r_inner_km": g.r_inner_km, "r_outer_km": g.r_outer_km, "a": g.a, "c": g.c}
            for g in result.model.rings
        ],
        breakpoints_f=[math.exp(b) for b in result.fit.breakpoints_logf],
        rss=result.fit.rss,
        boundary=boundary_geojson(result.boundaries),
    )


def main() -> None:
    import uvicorn

    configure_logging(settings.log_level)
    uvicorn.run("vpbounds.api.main:app", host="0.0.0.0", port=8000, reload=False)


if __name__ == "__main__":
    main()

"""In-memory store for uploaded grids."""

from __future__ import annotations

import uuid

from vpbounds.grid import DensityGrid


class GridRepository:
    """Thread-unsafe in-memory store; grids live as long as the process."""

    def __init__(self) -> None:
        self._grids: dict[str, DensityGrid] = {}

    def save(self, grid: DensityGrid) -> str:
        grid_id = str(uuid.uuid4())
        self._grids[grid_id] = grid
        return grid_id

    def get(self, grid_id: str) -> DensityGrid | None:
        return self._grids.get(grid_id)

    def count(self) -> int:
        return len(self._grids)

"""HTTP surface over the grid, solver and boundary packages."""

"""
Light field, bounded arena and coverage raster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from PIL import Image

from ..core.constants import (
    DEFAULT_ARENA_HALF_WIDTH,
    DEFAULT_CELL_SIZE,
    DEFAULT_PEAK_INTENSITY,
    DEFAULT_SUPPORT_RADIUS,
    Profile,
)
from ..core.exceptions import ConfigError
from ..core.types import Pose


@dataclass(frozen=True)
class LightField:
    """Radially symmetric light distribution with its maximum at ``center``."""

    center: Tuple[float, float] = (0.0, 0.0)
    peak_intensity: float = DEFAULT_PEAK_INTENSITY
    radius_of_support: float = DEFAULT_SUPPORT_RADIUS
    profile: str = Profile.CONE

    def __post_init__(self):
        if self.profile not in Profile.ALL:
            raise ConfigError(f"unknown light profile '{self.profile}'")
        if self.radius_of_support <= 0 or self.peak_intensity < 0:
            raise ConfigError("light field needs radius_of_support > 0 and peak_intensity >= 0")


def sample_intensity(light: LightField, p: Tuple[float, float]) -> float:
    """
    Exact profile value at point p.

    cone:     peak * max(0, 1 - d / radius_of_support)
    gaussian: peak * exp(-d^2 / (2 radius_of_support^2))
    """
    d = math.hypot(p[0] - light.center[0], p[1] - light.center[1])
    if light.profile == Profile.CONE:
        return light.peak_intensity * max(0.0, 1.0 - d / light.radius_of_support)
    return light.peak_intensity * math.exp(-0.5 * (d / light.radius_of_support) ** 2)


@dataclass(frozen=True)
class Arena:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError(
                f"arena bounds must satisfy x_min < x_max and y_min < y_max, got {self}"
            )

    @classmethod
    def centered(cls, center: Tuple[float, float] = (0.0, 0.0),
                 half_width: float = DEFAULT_ARENA_HALF_WIDTH) -> "Arena":
        cx, cy = center
        return cls(cx - half_width, cx + half_width, cy - half_width, cy + half_width)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min


def confine(arena: Arena, pose: Pose) -> Pose:
    """Clamp the position into the arena; the heading is kept."""
    x = min(max(pose.x, arena.x_min), arena.x_max)
    y = min(max(pose.y, arena.y_min), arena.y_max)
    if x == pose.x and y == pose.y:
        return pose
    return Pose(x, y, pose.theta)


@dataclass
class CoverageGrid:
    """Boolean raster of visited cells aligned to the arena's lower-left corner."""

    arena: Arena
    cell_size: float = DEFAULT_CELL_SIZE
    visited: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ConfigError(f"cell_size must be positive, got {self.cell_size}")
        self.nx = int(math.ceil(self.arena.width / self.cell_size - 1e-9))
        self.ny = int(math.ceil(self.arena.height / self.cell_size - 1e-9))
        self.visited = np.zeros((self.ny, self.nx), dtype=bool)

    @property
    def total_cells(self) -> int:
        return self.nx * self.ny

    @property
    def visited_count(self) -> int:
        return int(np.count_nonzero(self.visited))

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Meshgrid of cell-center coordinates, each of shape (ny, nx)."""
        cx = self.arena.x_min + (np.arange(self.nx) + 0.5) * self.cell_size
        cy = self.arena.y_min + (np.arange(self.ny) + 0.5) * self.cell_size
        return np.meshgrid(cx, cy)

    def to_image(self) -> Image.Image:
        """Grayscale image, visited cells white, north up."""
        pixels = np.where(self.visited, 255, 0).astype(np.uint8)
        return Image.fromarray(np.ascontiguousarray(np.flipud(pixels)))


def mark_path(grid: CoverageGrid, xs, ys, footprint_radius: float) -> CoverageGrid:
    """Mark every cell whose center lies within footprint_radius of any given point."""
    if footprint_radius <= 0:
        raise ConfigError(f"footprint_radius must be positive, got {footprint_radius}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    cell = grid.cell_size
    span = int(math.ceil(footprint_radius / cell)) + 1
    offsets = np.arange(-span, span + 1)

    base_x = np.floor((xs - grid.arena.x_min) / cell).astype(int)
    base_y = np.floor((ys - grid.arena.y_min) / cell).astype(int)
    ix = base_x[:, None, None] + offsets[None, None, :]
    iy = base_y[:, None, None] + offsets[None, :, None]
    ix, iy = np.broadcast_arrays(ix, iy)
    cx = grid.arena.x_min + (ix + 0.5) * cell
    cy = grid.arena.y_min + (iy + 0.5) * cell
    inside = (cx - xs[:, None, None]) ** 2 + (cy - ys[:, None, None]) ** 2 <= footprint_radius**2
    inside &= (ix >= 0) & (ix < grid.nx) & (iy >= 0) & (iy < grid.ny)
    grid.visited[iy[inside], ix[inside]] = True
    return grid


def mark_coverage(grid: CoverageGrid, pose: Pose, footprint_radius: float) -> CoverageGrid:
    return mark_path(grid, pose.x, pose.y, footprint_radius)


def coverage_fraction(grid: CoverageGrid) -> float:
    return grid.visited_count / grid.total_cells


def coverage_summary(grid: CoverageGrid) -> Dict[str, float]:
    return {
        "cells_total": grid.total_cells,
        "cells_visited": grid.visited_count,
        "fraction": coverage_fraction(grid),
    }


def capsule_raster(grid: CoverageGrid, start: Tuple[float, float], end: Tuple[float, float],
                   radius: float) -> np.ndarray:
    """Cells whose center lies within ``radius`` of the segment start-end (brute force)."""
    cx, cy = grid.cell_centers()
    ax, ay = start
    bx, by = end
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0:
        t = np.zeros_like(cx)
    else:
        t = np.clip(((cx - ax) * dx + (cy - ay) * dy) / length_sq, 0.0, 1.0)
    px = ax + t * dx
    py = ay + t * dy
    return (cx - px) ** 2 + (cy - py) ** 2 <= radius**2

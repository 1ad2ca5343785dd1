"""Synthetic farmland rasters on a torus.

A landscape is a square periodic lattice of 10 m-scale cells.  Cells start
as cropland partitioned into fields by a discrete Voronoi tessellation;
hedgerows are then laid along field margins and permanent grassland replaces
whole fields, each until an exact cell budget is met.  Mean field size and
the two semi-natural-habitat shares either come straight from parameters or
from farm-size power laws fitted to European data.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .rng import stream

COVER_CROP = 0
COVER_HEDGE = 1
COVER_GRASS = 2

RASTER_MAGIC = "LSC1"


class InfeasibleShareError(ValueError):
    """Requested habitat share cannot be realized on this field pattern."""


@dataclass(frozen=True)
class ScalingLaw:
    """Power laws tying farm size L (ha) to landscape structure.

    field size S = s0 * L**a, grassland share g = g0 * L**b,
    hedgerow share h = h0 * L**c.
    """

    s0: float = 0.4
    a: float = 0.4
    g0: float = 0.1
    b: float = -0.2
    h0: float = 0.15
    c: float = -0.5

    def __post_init__(self) -> None:
        if self.s0 <= 0:
            raise ValueError("s0 must be positive")
        if not (0 < self.g0 < 1 and 0 < self.h0 < 1):
            raise ValueError("g0 and h0 must lie in (0,1)")
        if not (self.b < 0 < self.a and self.c < 0):
            raise ValueError("expected a>0 and b,c<0")


def scaling_laws(farm_size: float, law: ScalingLaw = ScalingLaw()) -> tuple[float, float, float]:
    """(mean field size, grassland share, hedgerow share) for a farm of `farm_size` ha."""
    if farm_size <= 0:
        raise ValueError(f"farm size must be positive, got {farm_size}")
    s = law.s0 * farm_size**law.a
    g = law.g0 * farm_size**law.b
    h = law.h0 * farm_size**law.c
    total = g + h
    if total >= 1.0:
        # tiny farms can push the fitted shares past unity; rescale, keep ratio
        scale = 0.999 / total
        g *= scale
        h *= scale
    return s, g, h


@dataclass(frozen=True)
class LandscapeParams:
    mean_field_size: float
    hedgerow_share: float
    grassland_share: float
    seed: int
    grid_rows: int = 200
    grid_cols: int = 200
    cell_area: float = 0.01

    def __post_init__(self) -> None:
        if self.grid_rows < 2 or self.grid_cols < 2:
            raise ValueError("grid dimensions must be >= 2")
        if self.cell_area <= 0:
            raise ValueError("cell_area must be positive")
        if self.mean_field_size < self.cell_area:
            raise ValueError("mean field size below one cell")
        if not (0 <= self.hedgerow_share < 1 and 0 <= self.grassland_share < 1):
            raise ValueError("shares must lie in [0,1)")
        if self.hedgerow_share + self.grassland_share >= 1:
            raise ValueError("grassland + hedgerow share must stay below 1")

    @property
    def total_area(self) -> float:
        return self.grid_rows * self.grid_cols * self.cell_area

    @property
    def n_cells(self) -> int:
        return self.grid_rows * self.grid_cols


@dataclass(frozen=True)
class Landscape:
    cover: np.ndarray
    field_id: np.ndarray
    params: LandscapeParams

    def __post_init__(self) -> None:
        self.cover.setflags(write=False)
        self.field_id.setflags(write=False)

    @property
    def snh_mask(self) -> np.ndarray:
        return self.cover != COVER_CROP


@dataclass(frozen=True)
class LandscapeStats:
    field_count: int
    realized_h: float
    realized_g: float
    mean_field_area: float


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def draw_seed_points(params: LandscapeParams, rng: np.random.Generator) -> np.ndarray:
    """Uniform integer seed cells for the Voronoi pattern, shape (n, 2)."""
    # tolerance keeps exact ratios like 400/0.4 from flooring to 999
    n = int(math.floor(params.total_area / params.mean_field_size + 1e-9))
    if n < 1:
        raise ValueError("mean field size exceeds the landscape; no seed points")
    rows = rng.integers(0, params.grid_rows, size=n)
    cols = rng.integers(0, params.grid_cols, size=n)
    return np.stack([rows, cols], axis=1)


def assign_fields(seed_points: np.ndarray, grid_rows: int, grid_cols: int) -> np.ndarray:
    """Nearest-seed map under toroidal Euclidean distance; ties go to the lower seed index."""
    n = len(seed_points)
    sr = seed_points[:, 0].astype(np.int64)
    sc = seed_points[:, 1].astype(np.int64)

    dc = np.abs(np.arange(grid_cols, dtype=np.int64)[:, None] - sc[None, :])
    dc = np.minimum(dc, grid_cols - dc) ** 2  # (cols, n)

    out = np.empty((grid_rows, grid_cols), dtype=np.int32)
    block = max(1, int(4_000_000 // max(1, grid_cols * n)))
    for r0 in range(0, grid_rows, block):
        r1 = min(grid_rows, r0 + block)
        dr = np.abs(np.arange(r0, r1, dtype=np.int64)[:, None] - sr[None, :])
        dr = np.minimum(dr, grid_rows - dr) ** 2  # (block, n)
        dist = dr[:, None, :] + dc[None, :, :]  # (block, cols, n)
        out[r0:r1] = np.argmin(dist, axis=2)
    return out


def generate_fields(params: LandscapeParams) -> np.ndarray:
    rng = stream(params.seed, "voronoi")
    return assign_fields(draw_seed_points(params, rng), params.grid_rows, params.grid_cols)


def _neighbor_ids(field_id: np.ndarray) -> np.ndarray:
    """Stack of the four orthogonal neighbours' field ids, shape (4, rows, cols)."""
    return np.stack(
        [
            np.roll(field_id, 1, axis=0),
            np.roll(field_id, -1, axis=0),
            np.roll(field_id, 1, axis=1),
            np.roll(field_id, -1, axis=1),
        ]
    )


def margin_cells(field_id: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    """Field margins keyed by adjacent field pair (lo, hi).

    A margin cell sits on the lower-id side of a boundary: it belongs to
    field lo, has a 4-neighbour in field hi, and sees at least two distinct
    field ids among its neighbours (so hedgerows placed on it always trace a
    genuine boundary).  Cell values are flat row-major indices, sorted.
    """
    nbs = _neighbor_ids(field_id)
    distinct = np.ones(field_id.shape, dtype=np.int8)
    sorted_nbs = np.sort(nbs, axis=0)
    distinct += (np.diff(sorted_nbs, axis=0) != 0).sum(axis=0).astype(np.int8)

    own = field_id.ravel()
    eligible = (distinct >= 2).ravel()
    pairs: dict[tuple[int, int], set[int]] = {}
    for k in range(4):
        nb = nbs[k].ravel()
        mask = (own < nb) & eligible
        idx = np.nonzero(mask)[0]
        for flat, hi in zip(idx.tolist(), nb[idx].tolist()):
            pairs.setdefault((int(own[flat]), int(hi)), set()).add(flat)
    return {key: np.array(sorted(cells), dtype=np.int64) for key, cells in sorted(pairs.items())}


def _bfs_take(
    cells: np.ndarray,
    take: int,
    shape: tuple[int, int],
    rng: np.random.Generator,
    diagonal: bool,
) -> np.ndarray:
    """Pick `take` cells from `cells` by breadth-first walk from a random start.

    Walks restart from another random unvisited cell whenever a connected
    component is exhausted, so the requested count is always met.
    """
    rows, cols = shape
    remaining = set(cells.tolist())
    order = cells.copy()
    rng.shuffle(order)
    pending = deque(order.tolist())
    if diagonal:
        deltas = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        deltas = [(-1, 0), (1, 0), (0, -1), (0, 1)]

    taken: list[int] = []
    queue: deque[int] = deque()
    while len(taken) < take:
        if not queue:
            while pending and pending[0] not in remaining:
                pending.popleft()
            queue.append(pending.popleft())
            remaining.discard(queue[0])
        flat = queue.popleft()
        taken.append(flat)
        r, c = divmod(flat, cols)
        for dr, dc in deltas:
            nb = ((r + dr) % rows) * cols + (c + dc) % cols
            if nb in remaining:
                remaining.discard(nb)
                queue.append(nb)
    return np.array(taken, dtype=np.int64)


def place_hedgerows(
    field_id: np.ndarray,
    hedgerow_share: float,
    params: LandscapeParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Cover grid with hedgerow cells on field margins, hitting the share exactly."""
    cover = np.zeros(field_id.shape, dtype=np.int8)
    budget = _round_half_up(hedgerow_share * params.n_cells)
    if budget == 0:
        return cover

    margins = margin_cells(field_id)
    available = len(set().union(*[set(c.tolist()) for c in margins.values()])) if margins else 0
    if available < budget:
        raise InfeasibleShareError(
            f"hedgerow share {hedgerow_share} needs {budget} margin cells, "
            f"only {available} exist ({budget - available} short)"
        )

    keys = list(margins.keys())
    rng.shuffle(keys)
    flat_cover = cover.ravel()
    remaining = budget
    for key in keys:
        cells = margins[key]
        cells = cells[flat_cover[cells] == COVER_CROP]
        if cells.size == 0:
            continue
        if cells.size <= remaining:
            flat_cover[cells] = COVER_HEDGE
            remaining -= cells.size
        else:
            part = _bfs_take(cells, remaining, field_id.shape, rng, diagonal=True)
            flat_cover[part] = COVER_HEDGE
            remaining = 0
        if remaining == 0:
            break
    assert remaining == 0
    return cover


def place_grassland(
    cover: np.ndarray,
    field_id: np.ndarray,
    grassland_share: float,
    params: LandscapeParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Convert whole fields (or one contiguous remnant) to grassland in place."""
    budget = _round_half_up(grassland_share * params.n_cells)
    if budget == 0:
        return cover

    flat_cover = cover.ravel()
    crop_total = int((flat_cover == COVER_CROP).sum())
    if crop_total < budget:
        raise InfeasibleShareError(
            f"grassland share {grassland_share} needs {budget} crop cells, "
            f"only {crop_total} remain ({budget - crop_total} short)"
        )

    fields = np.unique(field_id)
    rng.shuffle(fields)
    flat_field = field_id.ravel()
    remaining = budget
    for fid in fields:
        cells = np.nonzero((flat_field == fid) & (flat_cover == COVER_CROP))[0]
        if cells.size == 0:
            continue
        if cells.size <= remaining:
            flat_cover[cells] = COVER_GRASS
            remaining -= cells.size
        else:
            part = _bfs_take(cells, remaining, field_id.shape, rng, diagonal=False)
            flat_cover[part] = COVER_GRASS
            remaining = 0
        if remaining == 0:
            break
    assert remaining == 0
    return cover


def generate(params: LandscapeParams) -> Landscape:
    """Full landscape build: Voronoi fields, then hedgerows, then grassland."""
    field_id = generate_fields(params)
    cover = place_hedgerows(field_id, params.hedgerow_share, params, stream(params.seed, "hedge"))
    cover = place_grassland(cover, field_id, params.grassland_share, params, stream(params.seed, "grass"))
    return Landscape(cover=cover, field_id=field_id, params=params)


def landscape_stats(ls: Landscape) -> LandscapeStats:
    field_count = int(np.unique(ls.field_id).size)
    n = ls.params.n_cells
    return LandscapeStats(
        field_count=field_count,
        realized_h=float((ls.cover == COVER_HEDGE).sum()) / n,
        realized_g=float((ls.cover == COVER_GRASS).sum()) / n,
        mean_field_area=ls.params.total_area / field_count,
    )


def save_raster(ls: Landscape, path: str | Path) -> None:
    """Plain-text raster: header, cover rows, then field-id rows."""
    lines = [f"{RASTER_MAGIC} {ls.params.grid_rows} {ls.params.grid_cols} {ls.params.cell_area!r}"]
    for row in ls.cover:
        lines.append(" ".join(str(int(v)) for v in row))
    for row in ls.field_id:
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_raster(path: str | Path) -> Landscape:
    """Inverse of save_raster; derived params carry realized shares and seed 0."""
    text = Path(path).read_text().splitlines()
    head = text[0].split()
    if len(head) != 4 or head[0] != RASTER_MAGIC:
        raise ValueError(f"not a {RASTER_MAGIC} raster: {path}")
    rows, cols, cell_area = int(head[1]), int(head[2]), float(head[3])
    if len(text) != 1 + 2 * rows:
        raise ValueError(f"expected {2 * rows} grid lines, found {len(text) - 1}")
    cover = np.array([[int(v) for v in line.split()] for line in text[1 : 1 + rows]], dtype=np.int8)
    field_id = np.array(
        [[int(v) for v in line.split()] for line in text[1 + rows : 1 + 2 * rows]], dtype=np.int32
    )
    field_count = int(np.unique(field_id).size)
    n = rows * cols
    params = LandscapeParams(
        mean_field_size=rows * cols * cell_area / field_count,
        hedgerow_share=float((cover == COVER_HEDGE).sum()) / n,
        grassland_share=float((cover == COVER_GRASS).sum()) / n,
        seed=0,
        grid_rows=rows,
        grid_cols=cols,
        cell_area=cell_area,
    )
    return Landscape(cover=cover, field_id=field_id, params=params)


def params_for_farm(
    farm_size: float,
    seed: int,
    law: ScalingLaw = ScalingLaw(),
    grid_rows: int = 200,
    grid_cols: int = 200,
    cell_area: float = 0.01,
    mean_field_size: float | None = None,
    hedgerow_share: float | None = None,
    grassland_share: float | None = None,
) -> LandscapeParams:
    """LandscapeParams from the farm-size scaling laws, with optional explicit pins."""
    s, g, h = scaling_laws(farm_size, law)
    return LandscapeParams(
        mean_field_size=s if mean_field_size is None else mean_field_size,
        hedgerow_share=h if hedgerow_share is None else hedgerow_share,
        grassland_share=g if grassland_share is None else grassland_share,
        seed=seed,
        grid_rows=grid_rows,
        grid_cols=grid_cols,
        cell_area=cell_area,
    )


__all__ = [
    "COVER_CROP",
    "COVER_HEDGE",
    "COVER_GRASS",
    "InfeasibleShareError",
    "Landscape",
    "LandscapeParams",
    "LandscapeStats",
    "ScalingLaw",
    "assign_fields",
    "draw_seed_points",
    "generate",
    "generate_fields",
    "landscape_stats",
    "load_raster",
    "margin_cells",
    "params_for_farm",
    "place_grassland",
    "place_hedgerows",
    "save_raster",
    "scaling_laws",
]

"""Value types for tilings and necklaces."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..geometry import Region


@dataclass(frozen=True)
class Tile:
    """A symmetric closed tile: a disc meeting the axis or a mirror pair of discs."""

    region: Region
    index: int = -1
    cov: int = -1
    stage: int = 0
    role: str = "brick"

    @property
    def is_real(self) -> bool:
        return self.region.meets_real()


@dataclass(frozen=True)
class Tiling:
    """Ordered tiles.  ``deltas[s]`` bounds the component diameters of stage ``s`` tiles."""

    tiles: tuple[Tile, ...]
    deltas: dict[int, Fraction] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def delta(self) -> Fraction:
        return max(self.deltas.values()) if self.deltas else Fraction(0)

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def regions(self) -> list[Region]:
        return [t.region for t in self.tiles]

    def prefix(self, m: int) -> "Tiling":
        return Tiling(self.tiles[:m], self.deltas, self.meta)

    def delta_of(self, tile: Tile) -> Fraction:
        return self.deltas.get(tile.stage, self.delta)

    def renumbered(self) -> "Tiling":
        return Tiling(tuple(replace(t, index=i) for i, t in enumerate(self.tiles)), self.deltas, self.meta)

    def concat(self, *others: "Tiling") -> "Tiling":
        tiles = list(self.tiles)
        deltas = dict(self.deltas)
        meta = dict(self.meta)
        for o in others:
            tiles.extend(o.tiles)
            for k, v in o.deltas.items():
                deltas[k] = max(deltas.get(k, v), v)
        return Tiling(tuple(tiles), deltas, meta).renumbered()


Polyline = tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class Necklace:
    """Discs joined by arcs: ``arcs[i]`` leads into ``beads[i]``; a complete
    necklace has one more arc, from the last bead back to the outer boundary."""

    domain: Region
    beads: tuple[Region, ...]
    arcs: tuple[Polyline, ...]
    complete: bool
    symmetric: bool
    corridors: tuple[Region, ...] = ()
    bead_kinds: tuple[str, ...] = ()

"""Ordered symmetric tilings of exhaustion stages."""

from .construct import tile_domain
from .models import model_tiling
from .types import Necklace, Tile, Tiling
from .verify import exact_lattice, raster_lattice, verify_tiling

__all__ = ["Necklace", "Tile", "Tiling", "exact_lattice", "model_tiling", "raster_lattice", "tile_domain",
           "verify_tiling"]

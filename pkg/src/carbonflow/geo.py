"""Great-circle geometry on the spherical-Earth model used throughout.

Distances are statute miles (Earth radius 3958.8 mi).  Within either kernel
implementation the scalar and vectorized paths produce bit-identical values;
across the compiled and pure kernels results may differ by a few ULPs, so a
run is reproducible for the implementation it was made with.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .types import GeoPoint

EARTH_RADIUS_MILES = _kernels.EARTH_RADIUS_MILES


def great_circle_miles(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine distance between two points, in miles.

    Symmetric, zero for identical points, and never exceeds half the
    Earth's circumference.
    """
    return _kernels.haversine_miles(a.lon, a.lat, b.lon, b.lat)


def great_circle_to_many(origin: GeoPoint, lons: np.ndarray, lats: np.ndarray) -> np.ndarray:
    """Distances from one origin to each (lons[i], lats[i]), in miles."""
    return _kernels.haversine_many(origin.lon, origin.lat, lons, lats)

"""Great-circle geometry against an independent haversine."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carbonflow.geo import EARTH_RADIUS_MILES, great_circle_miles, great_circle_to_many
from helpers import gp
from oracles import haversine_reference

lons = st.floats(min_value=-180.0, max_value=180.0, allow_nan=False)
lats = st.floats(min_value=-90.0, max_value=90.0, allow_nan=False)


def test_earth_radius():
    assert EARTH_RADIUS_MILES == 3958.8


def test_zero_for_identical_points():
    assert great_circle_miles(gp(-84.3, 35.9), gp(-84.3, 35.9)) == 0.0


def test_quarter_circle():
    # 90 degrees of longitude on the equator
    expected = math.pi / 2 * 3958.8
    assert great_circle_miles(gp(0, 0), gp(90, 0)) == pytest.approx(expected, rel=1e-12)


def test_one_degree_latitude():
    expected = math.pi / 180 * 3958.8
    assert great_circle_miles(gp(0, 0), gp(0, 1)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(69.10, abs=0.01)


@given(lons, lats, lons, lats)
def test_matches_reference(lon1, lat1, lon2, lat2):
    got = great_circle_miles(gp(lon1, lat1), gp(lon2, lat2))
    want = haversine_reference(lon1, lat1, lon2, lat2)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


@given(lons, lats, lons, lats)
def test_symmetry(lon1, lat1, lon2, lat2):
    a, b = gp(lon1, lat1), gp(lon2, lat2)
    assert great_circle_miles(a, b) == great_circle_miles(b, a)


@settings(max_examples=200)
@given(lons, lats, lons, lats, lons, lats)
def test_triangle_inequality(lon1, lat1, lon2, lat2, lon3, lat3):
    a, b, c = gp(lon1, lat1), gp(lon2, lat2), gp(lon3, lat3)
    ab = great_circle_miles(a, b)
    bc = great_circle_miles(b, c)
    ac = great_circle_miles(a, c)
    assert ac <= ab + bc + 1e-9 * max(1.0, ac)


def test_never_exceeds_half_circumference():
    half = math.pi * EARTH_RADIUS_MILES
    assert great_circle_miles(gp(0, -90), gp(0, 90)) <= half * (1 + 1e-12)


def test_vector_path_matches_scalar():
    rng = np.random.default_rng(5)
    lons_arr = rng.uniform(-180, 180, 50)
    lats_arr = rng.uniform(-90, 90, 50)
    origin = gp(-100.0, 40.0)
    many = great_circle_to_many(origin, lons_arr, lats_arr)
    for i in range(50):
        single = great_circle_miles(origin, gp(lons_arr[i], lats_arr[i]))
        assert many[i] == single

#!/usr/bin/env python3
"""Offline data preparation for the bundled U.S. example datasets.

Converts the Census cartographic-boundary TopoJSON redistributed by the
`us-atlas` npm package (scripts/vendor/us-atlas-counties-10m.json, 2017
edition, 1:10m) into the GeoJSON files the engine ingests, and writes the
attribute tables and centroid overrides under data/.

Only the 48 contiguous states (and their counties) are kept; Alaska, Hawaii,
DC and the territories are dropped.

State population / land-area figures are approximate census-style values
compiled by hand. County densities are SYNTHETIC (seeded log-normal spread
around the state density, with King County, WA pinned to 1066); they exist to
exercise county-level features and are not census figures. The digital
equity percentages are likewise illustrative.

Run from the repository root:  python3 scripts/prepare_us_data.py
"""

import csv
import json
import math
import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SRC = os.path.join(ROOT, "scripts", "vendor", "us-atlas-counties-10m.json")
OUT = os.path.join(ROOT, "data")

EXCLUDED_STATES = {"02", "11", "15", "60", "66", "69", "72", "78"}

# fips, abbreviation, name, population, land area (sq mi)
STATES = [
    ("01", "AL", "Alabama", 5024279, 50645),
    ("04", "AZ", "Arizona", 7151502, 113594),
    ("05", "AR", "Arkansas", 3011524, 52035),
    ("06", "CA", "California", 39538223, 155779),
    ("08", "CO", "Colorado", 5773714, 103642),
    ("09", "CT", "Connecticut", 3605944, 4842),
    ("10", "DE", "Delaware", 989948, 1949),
    ("12", "FL", "Florida", 21538187, 53625),
    ("13", "GA", "Georgia", 10711908, 57513),
    ("16", "ID", "Idaho", 1839106, 82643),
    ("17", "IL", "Illinois", 12812508, 55519),
    ("18", "IN", "Indiana", 6785528, 35826),
    ("19", "IA", "Iowa", 3193079, 55857),
    ("20", "KS", "Kansas", 2937880, 81759),
    ("21", "KY", "Kentucky", 4505836, 39486),
    ("22", "LA", "Louisiana", 4657757, 43204),
    ("23", "ME", "Maine", 1362359, 30843),
    ("24", "MD", "Maryland", 6177224, 9707),
    ("25", "MA", "Massachusetts", 7029917, 7800),
    ("26", "MI", "Michigan", 10077331, 56539),
    ("27", "MN", "Minnesota", 5706494, 79627),
    ("28", "MS", "Mississippi", 2961279, 46923),
    ("29", "MO", "Missouri", 6154913, 68742),
    ("30", "MT", "Montana", 1084225, 145546),
    ("31", "NE", "Nebraska", 1961504, 76824),
    ("32", "NV", "Nevada", 3104614, 109781),
    ("33", "NH", "New Hampshire", 1377529, 8953),
    ("34", "NJ", "New Jersey", 9288994, 7354),
    ("35", "NM", "New Mexico", 2117522, 121298),
    ("36", "NY", "New York", 20201249, 47126),
    ("37", "NC", "North Carolina", 10439388, 48618),
    ("38", "ND", "North Dakota", 779094, 69001),
    ("39", "OH", "Ohio", 11799448, 40861),
    ("40", "OK", "Oklahoma", 3959353, 68595),
    ("41", "OR", "Oregon", 4237256, 95988),
    ("42", "PA", "Pennsylvania", 13002700, 44743),
    ("44", "RI", "Rhode Island", 1097379, 1034),
    ("45", "SC", "South Carolina", 5142750, 30061),
    ("46", "SD", "South Dakota", 886667, 75811),
    ("47", "TN", "Tennessee", 6910840, 41235),
    ("48", "TX", "Texas", 29145505, 261232),
    ("49", "UT", "Utah", 3271616, 82170),
    ("50", "VT", "Vermont", 643077, 9217),
    ("51", "VA", "Virginia", 8631393, 39490),
    ("53", "WA", "Washington", 7688549, 66456),
    ("54", "WV", "West Virginia", 1793716, 24038),
    ("55", "WI", "Wisconsin", 5892023, 54158),
    ("56", "WY", "Wyoming", 576851, 97093),
]

# Illustrative: share of population in underserved groups (%), share of
# households lacking a broadband subscription (%).
DIGITAL = {
    "AL": (86.1, 14.9), "AZ": (84.0, 10.6), "AR": (86.9, 16.2), "CA": (82.4, 8.7),
    "CO": (78.2, 7.4), "CT": (77.9, 9.1), "DE": (80.3, 9.8), "FL": (85.2, 10.9),
    "GA": (84.7, 11.6), "ID": (79.5, 9.3), "IL": (80.6, 10.2), "IN": (80.9, 11.4),
    "IA": (78.8, 11.0), "KS": (79.1, 10.5), "KY": (85.4, 13.8), "LA": (87.3, 15.3),
    "ME": (81.7, 10.8), "MD": (79.0, 8.4), "MA": (76.5, 8.1), "MI": (81.2, 11.2),
    "MN": (76.9, 8.9), "MS": (89.6, 17.8), "MO": (82.3, 12.1), "MT": (80.1, 11.5),
    "NE": (78.4, 10.4), "NV": (83.5, 9.6), "NH": (75.2, 7.2), "NJ": (78.6, 8.0),
    "NM": (90.8, 16.6), "NY": (80.9, 10.1), "NC": (84.1, 11.9), "ND": (77.3, 10.0),
    "OH": (81.8, 11.3), "OK": (86.2, 13.9), "OR": (79.8, 8.6), "PA": (80.2, 10.9),
    "RI": (79.4, 10.3), "SC": (85.8, 13.1), "SD": (79.6, 11.1), "TN": (85.0, 12.6),
    "TX": (88.4, 12.3), "UT": (76.1, 6.9), "VT": (78.7, 10.7), "VA": (80.5, 9.7),
    "WA": (77.6, 7.5), "WV": (88.9, 15.7), "WI": (78.9, 10.1), "WY": (79.9, 10.2),
}

# Non-canonical hand adjustments for regions whose area-weighted centroid
# makes arrow-key navigation feel wrong.
# DC is not part of the 48-state set, so only New York and Rhode Island ship.
CENTROID_OVERRIDES = [
    ("36", -75.80, 43.00),  # New York: upstate visual center
    ("44", -71.50, 41.68),  # Rhode Island: mainland, away from the islands
]

KING_COUNTY = "53033"
KING_DENSITY = 1066.0


def decode(topo):
    scale = topo["transform"]["scale"]
    translate = topo["transform"]["translate"]
    arcs = []
    for arc in topo["arcs"]:
        x = y = 0
        pts = []
        for dx, dy in arc:
            x += dx
            y += dy
            pts.append((round(x * scale[0] + translate[0], 6), round(y * scale[1] + translate[1], 6)))
        arcs.append(pts)
    return arcs


def ring(arcs, indices):
    out = []
    for i in indices:
        pts = arcs[i] if i >= 0 else list(reversed(arcs[~i]))
        if out:
            pts = pts[1:]
        out.extend(pts)
    return out


def shoelace(r):
    return 0.5 * sum(r[k][0] * r[k + 1][1] - r[k + 1][0] * r[k][1] for k in range(len(r) - 1))


def polygons(arcs, geom):
    if geom["type"] == "Polygon":
        raw = [geom["arcs"]]
    elif geom["type"] == "MultiPolygon":
        raw = geom["arcs"]
    else:
        return []
    polys = []
    for poly in raw:
        rings = []
        for idx in poly:
            r = ring(arcs, idx)
            if r and r[0] != r[-1]:
                # a few quantized rings miss closure by one grid step
                r.append(r[0])
            if len(r) >= 4 and abs(shoelace(r)) > 0:
                rings.append([list(p) for p in r])
        if rings:
            polys.append(rings)
    return polys


def feature(props, polys):
    return {
        "type": "Feature",
        "properties": props,
        "geometry": {"type": "MultiPolygon", "coordinates": polys},
    }


def main():
    topo = json.load(open(SRC))
    arcs = decode(topo)
    names = {s[0]: s[2] for s in STATES}

    states = []
    for g in topo["objects"]["states"]["geometries"]:
        if g["id"] in EXCLUDED_STATES:
            continue
        polys = polygons(arcs, g)
        states.append(feature({"id": g["id"], "name": g["properties"]["name"]}, polys))
    states.sort(key=lambda f: f["properties"]["id"])
    assert len(states) == 48, len(states)
    for f in states:
        assert names[f["properties"]["id"]] == f["properties"]["name"]

    counties = []
    for g in topo["objects"]["counties"]["geometries"]:
        parent = g["id"][:2]
        if parent in EXCLUDED_STATES:
            continue
        polys = polygons(arcs, g)
        if not polys:
            continue
        counties.append(feature({"id": g["id"], "name": g["properties"]["name"], "parent_id": parent}, polys))
    counties.sort(key=lambda f: f["properties"]["id"])

    os.makedirs(OUT, exist_ok=True)
    for name, feats in (("us_states.geojson", states), ("us_counties.geojson", counties)):
        with open(os.path.join(OUT, name), "w") as fh:
            json.dump({"type": "FeatureCollection", "features": feats}, fh, separators=(",", ":"))
            fh.write("\n")

    density = {}
    with open(os.path.join(OUT, "us_states_density.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "population", "land_area", "density"])
        for fips, _abbr, name, pop, area in STATES:
            d = round(pop / area, 1)
            density[fips] = d
            w.writerow([fips, name, pop, area, d])

    with open(os.path.join(OUT, "us_states_digital_equity.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "underserved_pct", "no_broadband_pct"])
        for fips, abbr, name, _pop, _area in STATES:
            u, b = DIGITAL[abbr]
            w.writerow([fips, name, u, b])

    with open(os.path.join(OUT, "us_counties_density.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "density"])
        for f in counties:
            cid = f["properties"]["id"]
            base = density[f["properties"]["parent_id"]]
            rng = random.Random(int(cid))
            factor = math.exp(max(-2.5, min(1.9, rng.gauss(-0.3, 0.9))))
            value = round(base * factor, 1)
            if cid == KING_COUNTY:
                value = KING_DENSITY
            w.writerow([cid, f["properties"]["name"], value])

    with open(os.path.join(OUT, "centroid_overrides.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "lon", "lat"])
        for row in CENTROID_OVERRIDES:
            w.writerow(row)

    print(f"{len(states)} states, {len(counties)} counties written to {OUT}")


if __name__ == "__main__":
    main()

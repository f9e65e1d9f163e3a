#!/usr/bin/env python3
"""Rebuild the bundled datasets under data/ from their upstream npm packages.

Usage:
    mkdir /tmp/src && cd /tmp/src
    npm pack vega-datasets@2 world-countries@5 country-json@2 d3-hexjson@1
    for f in *.tgz; do mkdir -p "${f%.tgz}" && tar xzf "$f" -C "${f%.tgz}"; done
    python3 data/scripts/build_datasets.py /tmp/src data/

Outputs:
    world_population.geojson     country polygons (world-countries) joined with
                                 population counts (country-json)
    americas_population.geojson  the region == "Americas" subset
    uk_constituencies.geojson    650 constituencies; polygons are SYNTHETIC
                                 (see build_uk below)
    uk_constituencies.hex.json   hex sidecar {id: {"row", "col"}} from the
                                 ODI Leeds hexjson shipped with d3-hexjson
    movies.csv                   vega-datasets movies, rating columns
    miserables.json              vega-datasets Les Miserables co-occurrence
"""
import csv
import glob
import json
import math
import os
import random
import sys

import numpy as np
from scipy.spatial import Voronoi
from shapely.geometry import MultiPolygon, Polygon, box, mapping, shape
from shapely.affinity import scale as shp_scale

POP_ALIASES = {
    "Cabo Verde": "Cape Verde",
    "Congo": "Republic of the Congo",
    "East Timor": "Timor-Leste",
    "Fiji Islands": "Fiji",
    "French Southern territories": "French Southern and Antarctic Lands",
    "Holy See (Vatican City State)": "Vatican City",
    "Macao": "Macau",
    "Micronesia, Federated States of": "Micronesia",
    "Pitcairn": "Pitcairn Islands",
    "Reunion": "Réunion",
    "Saint Helena": "Saint Helena, Ascension and Tristan da Cunha",
    "Sao Tome and Principe": "São Tomé and Príncipe",
    "The Democratic Republic of Congo": "DR Congo",
    "Turkey": "Türkiye",
    "Virgin Islands, British": "British Virgin Islands",
    "Virgin Islands, U.S.": "United States Virgin Islands",
}


def pkg(src, name):
    hits = glob.glob(os.path.join(src, name + "*", "package"))
    if not hits:
        sys.exit(f"missing unpacked package {name} under {src}")
    return hits[0]


def rounded(geom, digits=3):
    def ring(coords):
        out = [[round(x, digits), round(y, digits)] for x, y in coords]
        dedup = [out[0]]
        for p in out[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        if dedup[0] != dedup[-1]:
            dedup.append(dedup[0])
        return dedup

    polys = []
    for poly in (geom.geoms if isinstance(geom, MultiPolygon) else [geom]):
        rings = [ring(poly.exterior.coords)] + [ring(r.coords) for r in poly.interiors]
        rings = [r for r in rings if len(r) >= 4]
        if rings and len(rings[0]) >= 4:
            polys.append(rings)
    return {"type": "MultiPolygon", "coordinates": [p for p in polys]}


def build_world(src, out):
    wc = pkg(src, "world-countries")
    cj = pkg(src, "country-json")
    countries = json.load(open(os.path.join(wc, "countries.json")))
    pops = json.load(open(os.path.join(cj, "src", "country-by-population.json")))
    by_name = {}
    for p in pops:
        if p["population"]:
            by_name[POP_ALIASES.get(p["country"], p["country"])] = p["population"]

    features = []
    for c in countries:
        name = c["name"]["common"]
        pop = by_name.get(name, by_name.get(c["name"]["official"]))
        path = os.path.join(wc, "data", c["cca3"].lower() + ".geo.json")
        if pop is None or not os.path.exists(path):
            continue
        fc = json.load(open(path))
        geom = shape(fc["features"][0]["geometry"])
        # keep small islands visible: only simplify large shapes aggressively
        tol = 0.08 if geom.area > 50 else 0.01
        simple = geom.simplify(tol, preserve_topology=True)
        if simple.is_empty or simple.area == 0:
            simple = geom
        features.append({
            "type": "Feature",
            "id": c["cca3"],
            "properties": {
                "name": name,
                "population": pop,
                "continent": c["region"] or "Other",
                "subregion": c["subregion"] or "",
            },
            "geometry": rounded(simple),
        })
    features.sort(key=lambda f: f["id"])
    world = {"type": "FeatureCollection", "features": features}
    americas = {"type": "FeatureCollection",
                "features": [f for f in features if f["properties"]["continent"] == "Americas"]}
    with open(os.path.join(out, "world_population.geojson"), "w") as fh:
        json.dump(world, fh, separators=(",", ":"), ensure_ascii=False)
    with open(os.path.join(out, "americas_population.geojson"), "w") as fh:
        json.dump(americas, fh, separators=(",", ":"), ensure_ascii=False)
    print("world", len(features), "americas", len(americas["features"]))


NATION = {"SC": "Scotland", "WA": "Wales", "NI": "Northern Ireland"}


def build_uk(src, out):
    """Hex positions are real; polygons are synthetic.

    No openly licensed constituency boundary file is available offline, so
    each constituency polygon is a Voronoi cell of its hex-grid position
    (mapped into a lon/lat box over the UK), shrunk toward its seed so the
    polygon areas follow a log-uniform spread similar to real constituencies
    (a few km2 for inner-city seats to ~12,000 km2 in the Highlands).
    """
    hx = json.load(open(os.path.join(pkg(src, "d3-hexjson"), "examples", "constituencies.hexjson")))
    hexes = hx["hexes"]
    rmax = max(h["r"] for h in hexes.values())
    qmin = min(h["q"] for h in hexes.values())
    ids = sorted(hexes)
    pts = []
    for i in ids:
        h = hexes[i]
        rc = rmax - h["r"]
        x = (h["q"] - qmin) + (0.5 if rc % 2 == 1 else 0.0)
        y = h["r"] * math.sqrt(3) / 2
        pts.append((x, y))
    pts = np.array(pts)
    # hex units -> km (one hex ~ 24 km) -> degrees around 54.5N
    km = 24.0
    lat0, lon0 = 49.95, -8.1
    kx = km / (111.32 * math.cos(math.radians(54.5)))
    ky = km / 110.57
    ll = np.column_stack([lon0 + (pts[:, 0] - pts[:, 0].min()) * kx,
                          lat0 + (pts[:, 1] - pts[:, 1].min()) * ky])
    pad = 0.6
    frame = box(ll[:, 0].min() - kx * pad, ll[:, 1].min() - ky * pad,
                ll[:, 0].max() + kx * pad, ll[:, 1].max() + ky * pad)
    far = np.array([[-1000, -1000], [1000, -1000], [1000, 1000], [-1000, 1000]])
    vor = Voronoi(np.vstack([ll, far]))

    rng = random.Random(2019)
    features = []
    sidecar = {}
    for k, i in enumerate(ids):
        h = hexes[i]
        region = vor.regions[vor.point_region[k]]
        cell = Polygon([vor.vertices[v] for v in region if v >= 0]).intersection(frame)
        cell_km2 = cell.area * 111.32 * math.cos(math.radians(54.5)) * 110.57
        a = h["a"]
        if a == "LO":
            lo, hi = 7.0, 60.0
        elif a == "SC":
            lo, hi = 40.0, 12000.0
        elif a in ("WA", "NI"):
            lo, hi = 60.0, 4000.0
        else:
            lo, hi = 20.0, 2500.0
        target = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        f = min(1.0, math.sqrt(target / cell_km2))
        c = cell.centroid
        poly = shp_scale(cell, xfact=f, yfact=f, origin=c)
        features.append({
            "type": "Feature",
            "id": i,
            "properties": {
                "name": h["n"],
                "region": a,
                "nation": NATION.get(a, "England"),
                "electorate": h.get("p", 0),
            },
            "geometry": rounded(poly, 4),
        })
        sidecar[i] = {"row": h["r"], "col": h["q"]}
    with open(os.path.join(out, "uk_constituencies.geojson"), "w") as fh:
        json.dump({"type": "FeatureCollection", "features": features}, fh,
                  separators=(",", ":"), ensure_ascii=False)
    with open(os.path.join(out, "uk_constituencies.hex.json"), "w") as fh:
        json.dump(sidecar, fh, separators=(",", ":"), sort_keys=True)
    print("uk", len(features))


def build_movies(src, out):
    movies = json.load(open(os.path.join(pkg(src, "vega-datasets"), "data", "movies.json")))
    cols = ["Title", "IMDB Rating", "Rotten Tomatoes Rating", "IMDB Votes", "Major Genre"]
    with open(os.path.join(out, "movies.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for m in movies:
            w.writerow(["" if m.get(c) is None else m.get(c) for c in cols])
    print("movies", len(movies))


def build_miserables(src, out):
    mis = json.load(open(os.path.join(pkg(src, "vega-datasets"), "data", "miserables.json")))
    nodes = [{"id": f"n{n['index']}", "label": n["name"], "group": n["group"]} for n in mis["nodes"]]
    links = [{"source": f"n{l['source']}", "target": f"n{l['target']}", "weight": l["value"]}
             for l in mis["links"]]
    with open(os.path.join(out, "miserables.json"), "w") as fh:
        json.dump({"nodes": nodes, "links": links}, fh, indent=1)
    print("miserables", len(nodes), len(links))


if __name__ == "__main__":
    src, out = sys.argv[1], sys.argv[2]
    build_world(src, out)
    build_uk(src, out)
    build_movies(src, out)
    build_miserables(src, out)

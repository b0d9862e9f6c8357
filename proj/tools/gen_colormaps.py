#!/usr/bin/env python3
"""Regenerates the built-in colormap tables in data/colormaps/.

The sequential and diverging maps are sampled in CIELAB with lightness varying
linearly, so equal value steps give equal lightness steps. The categorical
palette is Paul Tol's "muted" qualitative scheme.
"""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "colormaps"
STOPS = 64

WHITE = (0.95047, 1.0, 1.08883)


def lab_to_srgb(L, a, b):
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0

    def finv(t):
        return t ** 3 if t ** 3 > 0.008856 else (t - 16.0 / 116.0) / 7.787

    X, Y, Z = (WHITE[0] * finv(fx), WHITE[1] * finv(fy), WHITE[2] * finv(fz))
    r = 3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z
    g = -0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z
    bl = 0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z

    def gamma(c):
        c = min(max(c, 0.0), 1.0)
        return 12.92 * c if c <= 0.0031308 else 1.055 * c ** (1 / 2.4) - 0.055

    return tuple(int(round(255 * gamma(c))) for c in (r, g, bl))


def sequential():
    # Dark blue through teal to pale yellow, lightness 15 -> 95.
    rows = []
    for i in range(STOPS):
        t = i / (STOPS - 1)
        L = 15 + 80 * t
        hue = math.radians(290 - 190 * t)
        chroma = 38 * math.sin(math.pi * (0.15 + 0.7 * t)) + 8
        rows.append(lab_to_srgb(L, chroma * math.cos(hue), chroma * math.sin(hue)))
    return rows


def diverging():
    # Blue -> near white -> red, symmetric lightness 35 -> 96 -> 35.
    rows = []
    for i in range(STOPS):
        t = i / (STOPS - 1)
        s = abs(2 * t - 1)
        L = 96 - 61 * s
        chroma = 55 * s
        hue = math.radians(285 if t < 0.5 else 40)
        rows.append(lab_to_srgb(L, chroma * math.cos(hue), chroma * math.sin(hue)))
    return rows


CATEGORICAL = [
    "#CC6677", "#332288", "#DDCC77", "#117733", "#88CCEE",
    "#882255", "#44AA99", "#999933", "#AA4499", "#DDDDDD",
]


def categorical():
    return [tuple(int(h[i:i + 2], 16) for i in (1, 3, 5)) for h in CATEGORICAL]


def write(name, rows):
    with open(OUT / f"{name}.csv", "w", newline="\n") as f:
        f.write("# r,g,b\n")
        for r, g, b in rows:
            f.write(f"{r},{g},{b}\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("sequential", sequential())
    write("diverging", diverging())
    write("categorical", categorical())

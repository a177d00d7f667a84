#!/usr/bin/env python3
"""Write the bundled hexagonal constellations to data/hqam/.

Each constellation is the M-point subset of the unit triangular lattice with
the smallest average energy, taken around the best of three centres (a
lattice point, an edge midpoint or a triangle centroid), shifted to zero mean
and scaled to unit average energy.
"""
import argparse
import itertools
import math
import os

SIZES = (4, 8, 16, 32, 64)
CENTRES = ((0.0, 0.0), (0.5, 0.0), (0.5, math.sqrt(3) / 6))


def lattice(radius):
    n = int(radius) + 2
    for i in range(-2 * n, 2 * n + 1):
        for j in range(-2 * n, 2 * n + 1):
            x = i + 0.5 * j
            y = j * math.sqrt(3) / 2
            if x * x + y * y <= (radius + 2) ** 2:
                yield (x, y)


def subset(m, centre):
    cx, cy = centre
    pts = sorted(lattice(math.sqrt(m) + 2),
                 key=lambda p: (round((p[0] - cx) ** 2 + (p[1] - cy) ** 2, 9),
                                round(math.atan2(p[1] - cy, p[0] - cx), 9)))
    chosen = pts[:m]
    mx = sum(p[0] for p in chosen) / m
    my = sum(p[1] for p in chosen) / m
    chosen = [(x - mx, y - my) for x, y in chosen]
    energy = sum(x * x + y * y for x, y in chosen) / m
    return energy, chosen


def stats(points):
    def unit(p, q):
        return abs(math.dist(p, q) - 1.0) < 1e-9
    edges = sum(1 for p, q in itertools.combinations(points, 2) if unit(p, q))
    tri = sum(1 for p, q, r in itertools.combinations(points, 3)
              if unit(p, q) and unit(q, r) and unit(p, r))
    return edges, tri


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "hqam"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for m in SIZES:
        energy, pts = min((subset(m, c) for c in CENTRES), key=lambda t: t[0])
        edges, tri = stats(pts)
        scale = 1.0 / math.sqrt(energy)
        path = os.path.join(args.out, f"hqam_{m}.txt")
        with open(path, "w") as fh:
            fh.write(f"# {m}-point hexagonal constellation, unit average energy\n")
            fh.write(f"# lattice constant {scale:.17g}\n")
            fh.write(f"# nearest-neighbour pairs {edges}, unit triangles {tri}\n")
            for x, y in pts:
                fh.write(f"{x * scale:.17g} {y * scale:.17g}\n")
        print(f"M={m}: E={energy:.6f} edges={edges} triangles={tri} "
              f"B={2 * edges / m:.6g} Bc={3 * tri / m:.6g} alpha_h={scale * scale / 2:.17g} "
              f"check={(edges - tri) / m:.6f} vs {(m - 1) / m:.6f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate the unstructured fixture meshes under tests/data/.

The solver ships two built-in structured generators; quasi-uniform
unstructured meshes are ingested through the native format instead.
This script produces them deterministically (fixed RNG seed) so the
fixtures can be regenerated byte-identically.

  square_tri_<n>.txt   Delaunay triangulation of a jittered n x n lattice
                       on the unit square
  mixed_<n>.txt        jittered n x n grid, alternate squares split into
                       triangles (mixed quad/triangle mesh)
"""

import os

import numpy as np
from scipy.spatial import Delaunay

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data")


def write_native(path, verts, cells):
    with open(path, "w") as f:
        f.write(f"{len(verts)} {len(cells)}\n")
        for x, y in verts:
            f.write(f"{x:.17g} {y:.17g}\n")
        for loop in cells:
            f.write(str(len(loop)) + " " + " ".join(str(int(v)) for v in loop) + "\n")


def jittered_lattice(n, rng, amp):
    """(n+1)^2 lattice on the unit square; interior points jittered in both
    directions, boundary points tangentially, corners fixed."""
    h = 1.0 / n
    pts = np.zeros(((n + 1) * (n + 1), 2))
    k = 0
    for j in range(n + 1):
        for i in range(n + 1):
            x, y = i * h, j * h
            dx, dy = rng.uniform(-amp * h, amp * h, 2)
            on_x = i in (0, n)
            on_y = j in (0, n)
            if not on_x and not on_y:
                x += dx
                y += dy
            elif on_x and not on_y:
                y += dy
            elif on_y and not on_x:
                x += dx
            pts[k] = (x, y)
            k += 1
    return pts


def square_tri(n, rng):
    pts = jittered_lattice(n, rng, amp=0.25)
    tri = Delaunay(pts)
    cells = [list(s) for s in tri.simplices]
    return pts, cells


def mixed(n, rng):
    pts = jittered_lattice(n, rng, amp=0.15)
    vid = lambda i, j: j * (n + 1) + i
    cells = []
    for j in range(n):
        for i in range(n):
            v = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
            if (i + j) % 2 == 0:
                cells.append(v)
            elif (i * 7 + j * 3) % 2 == 0:
                cells.append([v[0], v[1], v[2]])
                cells.append([v[0], v[2], v[3]])
            else:
                cells.append([v[0], v[1], v[3]])
                cells.append([v[1], v[2], v[3]])
    return pts, cells


def main():
    os.makedirs(OUT, exist_ok=True)
    for n in (10, 20, 40, 80):
        rng = np.random.RandomState(7 * n + 1)
        verts, cells = square_tri(n, rng)
        write_native(os.path.join(OUT, f"square_tri_{n}.txt"), verts, cells)
        print(f"square_tri_{n}: {len(verts)} vertices, {len(cells)} cells")
    for n in (10, 20, 40):
        rng = np.random.RandomState(13 * n + 5)
        verts, cells = mixed(n, rng)
        write_native(os.path.join(OUT, f"mixed_{n}.txt"), verts, cells)
        print(f"mixed_{n}: {len(verts)} vertices, {len(cells)} cells")


if __name__ == "__main__":
    main()

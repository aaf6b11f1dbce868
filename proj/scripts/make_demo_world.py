#!/usr/bin/env python3
"""Builds the bundled office world: a 371x302-cell floor plan at 0.05 m/cell
(~280 m^2) with ten annotated object classes, two translation-identical rooms
(A and C) for the ambiguity scenario, and the default waypoint tours.

Outputs (under data/): office.pgm, office.json, waypoints_tour.json,
waypoints_ambiguity.json.
"""

import json
import math
import os

W, H = 371, 302
RES = 0.05
FREE, UNKNOWN, OCCUPIED = 255, 128, 0

# room A spans columns [2, 120); room C is its exact translate by +247
SHIFT = 247

grid = [[FREE] * W for _ in range(H)]


def fill(x0, y0, x1, y1, value):
    for y in range(max(0, y0), min(H, y1)):
        for x in range(max(0, x0), min(W, x1)):
            grid[y][x] = value


# outer border, 2 cells thick
fill(0, 0, W, 2, OCCUPIED)
fill(0, H - 2, W, H, OCCUPIED)
fill(0, 0, 2, H, OCCUPIED)
fill(W - 2, 0, W, H, OCCUPIED)

# corridor walls (free band rows 136..165)
fill(2, 134, W - 2, 136, OCCUPIED)   # top corridor wall
fill(2, 166, W - 2, 168, OCCUPIED)   # bottom corridor wall

# top room dividers: A | B | C (C gets an extra right wall so A and C match)
fill(120, 2, 122, 136, OCCUPIED)
fill(247, 2, 249, 136, OCCUPIED)
fill(367, 2, 369, 136, OCCUPIED)

# bottom room divider: D | E
fill(185, 166, 187, H - 2, OCCUPIED)

# doorways (1 m wide gaps)
DOOR_A = (50, 70)
DOOR_B = (170, 190)
DOOR_C = (DOOR_A[0] + SHIFT, DOOR_A[1] + SHIFT)   # 297..317
DOOR_D = (80, 100)
DOOR_E = (DOOR_D[0] + SHIFT, DOOR_D[1] + SHIFT)   # 327..347
for x0, x1 in (DOOR_A, DOOR_B, DOOR_C):
    fill(x0, 134, x1, 136, FREE)
for x0, x1 in (DOOR_D, DOOR_E):
    fill(x0, 166, x1, 168, FREE)

# annotations: [class, x0, y0, x1, y1] in cells, [min, max)
room_a = [
    ["sofa", 4, 30, 14, 70],
    ["cabinet", 30, 0, 60, 10],
    ["table", 55, 70, 75, 90],
    ["door", 46, 128, 74, 142],
]
objects = []
for cls, x0, y0, x1, y1 in room_a:
    objects.append([cls, x0, y0, x1, y1])
    objects.append([cls, x0 + SHIFT, y0, x1 + SHIFT, y1])  # room C twin

objects += [
    # room B (kitchen)
    ["fridge", 150, 0, 166, 18],
    ["sink", 225, 2, 241, 12],
    ["board", 122, 40, 128, 80],
    ["door", 168, 128, 192, 142],
    # room D (office)
    ["board", 2, 200, 8, 260],
    ["table", 60, 210, 90, 240],
    ["drawers", 10, 288, 30, 300],
    ["door", 76, 160, 104, 174],
    # room E (large, mostly empty)
    ["plant", 350, 280, 362, 294],
    ["extinguisher", 361, 172, 368, 184],
    ["door", 323, 160, 351, 174],
    # corridor
    ["plant", 4, 140, 14, 156],
    ["extinguisher", 195, 130, 201, 140],
]

CLASSES = ["sink", "door", "fridge", "board", "table",
           "plant", "drawers", "sofa", "cabinet", "extinguisher"]

# ---------------------------------------------------------------- validation

def cell(x, y):
    return grid[y][x]


def is_free_m(xm, ym):
    cx, cy = int(xm / RES), int(ym / RES)
    return 0 <= cx < W and 0 <= cy < H and cell(cx, cy) == FREE


def segment_clear(a, b):
    dist = math.hypot(b[0] - a[0], b[1] - a[1])
    steps = max(2, int(dist / 0.01))
    for k in range(steps + 1):
        t = k / steps
        if not is_free_m(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])):
            return False
    return True


def check_tour(name, wps):
    for p in wps:
        assert is_free_m(*p), f"{name}: waypoint {p} not free"
    for a, b in zip(wps, wps[1:]):
        assert segment_clear(a, b), f"{name}: segment {a} -> {b} blocked"


# rooms A and C must be exact translates, including their walls
bits = {}
for cls, x0, y0, x1, y1 in objects:
    for y in range(y0, min(y1, H)):
        for x in range(x0, min(x1, W)):
            bits.setdefault((x, y), set()).add(cls)
for y in range(0, 136):
    for x in range(0, 122):
        tx = x + SHIFT
        assert cell(x, y) == cell(tx, y), f"occupancy asymmetry at {(x, y)}"
        assert bits.get((x, y), set()) == bits.get((tx, y), set()), \
            f"semantic asymmetry at {(x, y)}"

tour = [
    [9.0, 1.2], [7.0, 1.2], [11.5, 2.5], [9.0, 4.5], [9.0, 7.5],
    [3.0, 7.5], [13.0, 7.5], [16.85, 7.5], [16.85, 9.5],
    [13.5, 12.5], [16.0, 14.0],
]
ambiguity = [
    [1.2, 1.2], [4.5, 1.2], [4.5, 5.0], [1.2, 5.0],
    [1.2, 1.2], [4.5, 1.2], [4.5, 5.0], [1.2, 5.0], [1.2, 1.2],
]
check_tour("tour", tour)
check_tour("ambiguity", ambiguity)

used = sorted({o[0] for o in objects})
assert used == sorted(CLASSES), f"class mismatch: {used}"

# --------------------------------------------------------------------- emit

out_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
os.makedirs(out_dir, exist_ok=True)

with open(os.path.join(out_dir, "office.pgm"), "wb") as f:
    f.write(f"P5\n{W} {H}\n255\n".encode())
    f.write(bytes(v for row in grid for v in row))

with open(os.path.join(out_dir, "office.json"), "w") as f:
    json.dump({
        "resolution": RES,
        "origin": [0.0, 0.0],
        "classes": CLASSES,
        "objects": [{"class": c, "box": [x0, y0, x1, y1]}
                    for c, x0, y0, x1, y1 in objects],
    }, f, indent=2)
    f.write("\n")

for name, wps, speed in (("waypoints_tour", tour, 0.5),
                         ("waypoints_ambiguity", ambiguity, 0.5)):
    with open(os.path.join(out_dir, f"{name}.json"), "w") as f:
        json.dump({"speed": speed, "turn_rate": 1.2, "waypoints": wps}, f, indent=2)
        f.write("\n")

free = sum(1 for row in grid for v in row if v == FREE)
path_len = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(tour, tour[1:]))
print(f"map {W}x{H} @ {RES} m/cell, {W * H * RES * RES:.1f} m^2, free cells {free}")
print(f"classes: {len(CLASSES)}, objects: {len(objects)}")
print(f"tour length {path_len:.1f} m (~{path_len / 0.5:.0f} s at 0.5 m/s)")

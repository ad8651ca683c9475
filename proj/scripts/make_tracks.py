#!/usr/bin/env python3
"""Regenerates the JSON track files under tracks/.

Tracks are built from a centerline description (straights and tangent arcs)
offset by half the corridor width on each side. Run from the repo root:

    python3 scripts/make_tracks.py
"""

import json
import math
import os

HALF_WIDTH = 1.1  # corridor half width, meters
ARC_STEP = math.radians(6.0)

OUT_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "tracks")


def rnd(v):
    return round(v, 6)


class Turtle:
    """Walks a centerline and collects it with left normals."""

    def __init__(self, x=0.0, y=0.0, heading=0.0):
        self.x, self.y, self.heading = x, y, heading
        self.points = []   # (x, y, left normal angle)
        self._emit()

    def _emit(self):
        self.points.append((self.x, self.y, self.heading + math.pi / 2.0))

    def straight(self, length):
        self.x += length * math.cos(self.heading)
        self.y += length * math.sin(self.heading)
        self._emit()

    def arc(self, radius, angle):
        """Positive angle turns left. The arc center sits on the turning side."""
        side = 1.0 if angle > 0 else -1.0
        cx = self.x + side * radius * math.cos(self.heading + math.pi / 2.0)
        cy = self.y + side * radius * math.sin(self.heading + math.pi / 2.0)
        start = math.atan2(self.y - cy, self.x - cx)
        steps = max(2, int(abs(angle) / ARC_STEP))
        for k in range(1, steps + 1):
            a = start + angle * k / steps
            self.x = cx + radius * math.cos(a)
            self.y = cy + radius * math.sin(a)
            self.heading += angle / steps
            self._emit()

    def offsets(self, d):
        return [(rnd(x + d * math.cos(na)), rnd(y + d * math.sin(na)))
                for (x, y, na) in self.points]


def write_track(name, doc):
    path = os.path.join(OUT_DIR, name + ".json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print("wrote", path)


def corridor():
    # Straight test corridor, outer boundary only.
    outer = [[-2.0, -HALF_WIDTH], [60.0, -HALF_WIDTH], [60.0, HALF_WIDTH], [-2.0, HALF_WIDTH]]
    return {
        "name": "corridor",
        "outer": outer,
        "inner": [],
        "obstacles": [],
        "start_pose": {"x": 0.0, "y": 0.0, "theta": 0.0},
        "finish_line": {"a": [50.0, HALF_WIDTH], "b": [50.0, -HALF_WIDTH]},
        "trap_regions": [],
    }


def oval():
    # Stadium: straights of 16 m joined by 180-degree arcs of radius 3.
    t = Turtle(0.0, 0.0, 0.0)
    t.straight(16.0)
    t.arc(3.0, math.pi)
    t.straight(16.0)
    t.arc(3.0, math.pi)
    inner = t.offsets(HALF_WIDTH)[:-1]   # drop the duplicated closing vertex
    outer = t.offsets(-HALF_WIDTH)[:-1]
    return {
        "name": "oval",
        "outer": outer,
        "inner": inner,
        "obstacles": [],
        "start_pose": {"x": 4.0, "y": 0.0, "theta": 0.0},
        "finish_line": {"a": [8.0, HALF_WIDTH], "b": [8.0, -HALF_WIDTH]},
        "trap_regions": [],
    }


def trap():
    # Square circuit with a dead-end pocket extending the first straight past
    # the first corner. The pocket end cap is within sensor range from the
    # start pose, so its boundary scans as one wall segment.
    outer = [[-1.1, -1.1], [15.0, -1.1], [15.0, 1.1], [11.1, 1.1],
             [11.1, 11.1], [-1.1, 11.1]]
    inner = [[1.1, 1.1], [8.9, 1.1], [8.9, 8.9], [1.1, 8.9]]
    return {
        "name": "trap",
        "outer": outer,
        "inner": inner,
        "obstacles": [],
        "start_pose": {"x": 5.5, "y": 0.0, "theta": 0.0},
        "finish_line": {"a": [8.0, 1.1], "b": [8.0, -1.1]},
        "trap_regions": [[[12.2, -1.1], [15.0, -1.1], [15.0, 1.1], [12.2, 1.1]]],
    }


def gp():
    # Mixed-curvature circuit: eight corners of varying radius, two of them
    # right-handers, all joined by axis-aligned straights. Closes exactly.
    t = Turtle(0.0, 0.0, 0.0)
    q = math.pi / 2.0
    t.straight(16.0)
    t.arc(3.0, q)      # L, fast
    t.straight(4.0)
    t.arc(2.2, q)      # L
    t.straight(3.0)
    t.arc(1.8, -q)     # R, chicane
    t.straight(6.0)
    t.arc(2.6, q)      # L
    t.straight(8.0)
    t.arc(3.4, q)      # L, sweeper
    t.straight(5.0)
    t.arc(1.8, -q)     # R
    t.straight(4.0)
    t.arc(2.4, q)      # L
    t.straight(4.0)
    t.arc(3.0, q)      # L onto the main straight
    t.straight(7.2)
    end = t.points[-1]
    assert abs(end[0]) < 1e-6 and abs(end[1]) < 1e-6, "gp centerline must close"
    inner = t.offsets(HALF_WIDTH)[:-1]   # drop the duplicated closing vertex
    outer = t.offsets(-HALF_WIDTH)[:-1]
    return {
        "name": "gp",
        "outer": outer,
        "inner": inner,
        "obstacles": [],
        "start_pose": {"x": 0.0, "y": 0.0, "theta": 0.0},
        "finish_line": {"a": [4.0, HALF_WIDTH], "b": [4.0, -HALF_WIDTH]},
        "trap_regions": [],
    }


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    write_track("corridor", corridor())
    write_track("oval", oval())
    write_track("trap", trap())
    write_track("gp", gp())


if __name__ == "__main__":
    main()

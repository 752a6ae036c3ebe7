#!/usr/bin/env python3
"""Regenerates data/reference_catalog.json.

The 36 terminal blocks span two connection technologies, three wire sizes,
three connection-point counts and one or two levels. Dimensions are synthetic
stand-ins chosen to be plausible for DIN-rail terminal blocks; they are not
manufacturer data. The grid deliberately contains families that differ only in
size (same shape, larger wire gauge) so that scale confusion between similar
classes is representable.
"""

import json
import sys
from pathlib import Path

WIRE_SIZES = ["1.5", "2.5", "4", "6"]
TWIN_WIRES = ["2.5", "4"]
WIDTH_BY_WIRE = {"1.5": 4.2, "2.5": 5.2, "4": 6.2, "6": 8.2}
HEIGHT_BY_WIRE = {"s": {"1.5": 44.0, "2.5": 47.0, "4": 50.0, "6": 54.0},
                  "p": {"1.5": 48.0, "2.5": 51.0, "4": 55.0, "6": 59.0}}
DEPTH_BY_POINTS = {"s": {2: 48.0, 3: 53.0, 4: 58.0},
                   "p": {2: 52.0, 3: 57.0, 4: 62.0}}
TWIN_EXTRA_HEIGHT = 13.0
TECH_LABEL = {"s": "screw", "p": "push-in"}


def make_blocks():
    blocks = []
    class_id = 0
    for tech in ("s", "p"):
        for wire in WIRE_SIZES:
            for points in (2, 3, 4):
                for twin in (False, True):
                    if twin and wire not in TWIN_WIRES:
                        continue
                    width = WIDTH_BY_WIRE[wire]
                    height = HEIGHT_BY_WIRE[tech][wire] + (TWIN_EXTRA_HEIGHT if twin else 0.0)
                    depth = DEPTH_BY_POINTS[tech][points]
                    shafts = [{"shaft_index": 0,
                               "bridgeable": not (tech == "p" and wire == "6"),
                               "position_mm": [round(width / 2, 3), 15.0]}]
                    if twin:
                        shafts.append({"shaft_index": 1,
                                       "bridgeable": tech == "s",
                                       "position_mm": [round(width / 2, 3), 41.0]})
                    part_id = f"tb-{tech}{wire}-{points}p" + ("-tw" if twin else "")
                    label = (f"{TECH_LABEL[tech]} terminal {wire}mm2 {points}-pt"
                             + (" twin" if twin else ""))
                    blocks.append({
                        "part_id": part_id,
                        "label": label,
                        "width_mm": width,
                        "height_mm": height,
                        "depth_mm": depth,
                        "shafts": shafts,
                        "marking_points": 2 if twin else 1,
                        "open_sided": True,
                        "compatible_end_cover": "ec-std",
                        "class_id": class_id,
                    })
                    class_id += 1
    return blocks


def main(out_path):
    blocks = make_blocks()
    assert len(blocks) == 36

    catalog = {
        "schema_version": 1,
        "materials": [
            {"name": "gray", "rgb": [0.55, 0.56, 0.58], "roughness": 0.55,
             "specular": 0.4, "metallic": 0.0, "selection_weight": 0.8},
            {"name": "blue", "rgb": [0.08, 0.22, 0.55], "roughness": 0.5,
             "specular": 0.45, "metallic": 0.0, "selection_weight": 0.05},
            {"name": "yellow", "rgb": [0.85, 0.75, 0.10], "roughness": 0.5,
             "specular": 0.45, "metallic": 0.0, "selection_weight": 0.05},
            {"name": "green", "rgb": [0.10, 0.45, 0.20], "roughness": 0.5,
             "specular": 0.45, "metallic": 0.0, "selection_weight": 0.05},
            {"name": "red", "rgb": [0.70, 0.10, 0.10], "roughness": 0.5,
             "specular": 0.45, "metallic": 0.0, "selection_weight": 0.05},
        ],
        "terminal_blocks": blocks,
        "end_covers": [
            {"part_id": "ec-std", "label": "end cover", "width_mm": 2.2,
             "height_mm": 64.0, "depth_mm": 58.0, "shafts": [],
             "marking_points": 0, "open_sided": False, "class_id": 36},
        ],
        "end_clamps": [
            {"part_id": "clamp-std", "label": "end clamp", "width_mm": 9.5,
             "height_mm": 40.0, "depth_mm": 42.0, "shafts": [],
             "marking_points": 0, "open_sided": False, "class_id": 37},
        ],
        "plug_in_bridges": [
            {"part_id": "bridge-std", "label": "plug-in bridge (per-pole unit)",
             "width_mm": 5.0, "height_mm": 13.0, "depth_mm": 8.0, "shafts": [],
             "marking_points": 0, "open_sided": False, "class_id": 38},
        ],
        "test_adapters": [
            {"part_id": "adapter-std", "label": "test adapter", "width_mm": 4.4,
             "height_mm": 7.0, "depth_mm": 26.0, "shafts": [],
             "marking_points": 0, "open_sided": False, "class_id": 39},
        ],
        "markings": [
            {"part_id": "mark-small", "label": "marking tag", "width_mm": 5.2,
             "height_mm": 9.0, "depth_mm": 2.5, "shafts": [],
             "marking_points": 0, "open_sided": False},
            {"part_id": "mark-wide", "label": "marking tag wide", "width_mm": 8.2,
             "height_mm": 9.0, "depth_mm": 2.5, "shafts": [],
             "marking_points": 0, "open_sided": False},
        ],
        "din_rails": [
            {"part_id": "rail-ns35", "label": "DIN rail 35mm", "width_mm": 1000.0,
             "height_mm": 35.0, "depth_mm": 7.5, "shafts": [],
             "marking_points": 0, "open_sided": False},
        ],
    }

    Path(out_path).write_text(json.dumps(catalog, indent=2) + "\n")
    print(f"wrote {out_path}: {len(blocks)} terminal blocks, 40 classes")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/reference_catalog.json")

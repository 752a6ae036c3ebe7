#!/usr/bin/env python3
"""Stand-in detector for the scale-opt adapter protocol.

Reads one JSON object {"image": path, "scale": s} on stdin and emits a JSON
array of detections on stdout. Detection quality peaks at --s-star: the
fraction of ground-truth boxes reproduced (and the false positives added)
follow q = exp(-log^2(s/s*) / (2 w^2)), so the per-image F1 is roughly q.

The image's ground truth is looked up in --gt (a COCO file) by the trailing
integer in the image file name (scene_000042.png -> image_id 43).
"""

import argparse
import json
import math
import re
import sys


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--gt", required=True, help="COCO ground-truth file")
    parser.add_argument("--s-star", type=float, default=1.5)
    parser.add_argument("--width", type=float, default=0.35)
    args = parser.parse_args()

    request = json.load(sys.stdin)
    scale = float(request["scale"])
    match = re.search(r"(\d+)\D*$", request["image"])
    if not match:
        print("image name carries no index", file=sys.stderr)
        return 1
    image_id = int(match.group(1)) + 1

    with open(args.gt) as f:
        gt = json.load(f)
    boxes = [a for a in gt["annotations"] if a["image_id"] == image_id]

    q = math.exp(-math.log(scale / args.s_star) ** 2 / (2 * args.width**2))
    tp = round(q * len(boxes))
    fp = round(tp * (1 / q - 1)) if q > 0 else 0

    detections = []
    for a in boxes[:tp]:
        detections.append(
            {
                "image_id": image_id,
                "category_id": a["category_id"],
                "bbox": a["bbox"],
                "score": 0.9,
            }
        )
    for i in range(fp):
        detections.append(
            {
                "image_id": image_id,
                "category_id": boxes[0]["category_id"] if boxes else 1,
                "bbox": [1e5 + 20 * i, 1e5, 10, 10],
                "score": 0.9,
            }
        )
    json.dump(detections, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())

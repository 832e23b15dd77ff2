"""Digital images end to end: PNG in, minimal DOT out.

Pixels become points, 8-neighbour (orthodiagonal) adjacency becomes a
symmetric edge relation, and colours become atoms named "#rrggbb".  The
same pipeline is scriptable through the command line:

    spatialmin minimize --image --input img.png --output min.dot --json min.json
    spatialmin check    --input model.json --formula 'near("#0000ff")' --output sat.json
    spatialmin equiv    --input model.json --points 0_0,2_2

This script drives the CLI entry point in-process.
"""

import json
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from spatialmin.cli import main

workdir = Path(tempfile.mkdtemp(prefix="spatialmin_demo_"))

# a 9x9 image: blue frame, red interior, blue centre dot
px = np.zeros((9, 9, 3), dtype=np.uint8)
px[:, :] = (255, 0, 0)
px[0, :] = px[-1, :] = (0, 0, 255)
px[:, 0] = px[:, -1] = (0, 0, 255)
px[4, 4] = (0, 0, 255)
img = workdir / "frame.png"
Image.fromarray(px, "RGB").save(img, "PNG")

out_dot = workdir / "min.dot"
out_json = workdir / "min.json"
code = main([
    "minimize", "--image", "--input", str(img),
    "--output", str(out_dot), "--json", str(out_json),
])
assert code == 0

doc = json.loads(out_json.read_text())
print(f"\n{doc['blocks']} blocks; projection of a few pixels:")
for pid in ["0_0", "1_1", "4_4", "4_3"]:
    print(f"  {pid} -> {doc['projection'][pid]}")

print("\nminimal model DOT:")
print(out_dot.read_text())

# the quotient can be checked like any model: write it out and query it
model_doc = workdir / "quotient.json"
model_doc.write_text(json.dumps(doc["model"]))
sat_file = workdir / "sat.json"
code = main([
    "check", "--input", str(model_doc),
    "--formula", 'near("#0000ff") & "#ff0000"',
    "--output", str(sat_file),
])
assert code == 0
print("red blocks touching blue:", json.loads(sat_file.read_text())["sat"])

print(f"\nartifacts written under {workdir}")

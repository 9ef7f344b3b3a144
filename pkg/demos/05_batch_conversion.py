"""
Converting a directory tree with a manifest
===========================================

The batch runner walks an input tree for OBJ files, converts each one
independently, mirrors the tree structure under the output directory,
and writes a ``manifest.json`` at its root.  A file that fails to
convert gets a failed manifest entry naming the stage; the rest of the
batch is unaffected.
"""

import json
import tempfile
from pathlib import Path

from meshsampler import PipelineConfig, generate_fixture, process_batch

root = Path(tempfile.mkdtemp(prefix="batch_"))
in_dir, out_dir = root / "meshes", root / "clouds"

# a small dataset: two scenes at the top, one in a subdirectory, and
# one deliberately broken file
generate_fixture("doubled_cube", in_dir)
generate_fixture("nested_cubes", in_dir)
generate_fixture("textured_quad", in_dir / "props")
(in_dir / "broken.obj").write_text("f 1 2 3\n")

cfg = PipelineConfig(input=str(in_dir), output=str(out_dir),
                     n_points=20_000, resolution=64, jobs=2)
entries = process_batch(cfg)

print(f"{sum(e.status == 'ok' for e in entries)} converted, "
      f"{sum(e.status != 'ok' for e in entries)} failed\n")

manifest = json.loads((out_dir / "manifest.json").read_text())
for e in manifest:
    if e["status"] == "ok":
        print(f"  ok      {e['input']:25s} -> {e['output']} "
              f"({e['voxel_count']} voxels)")
    else:
        print(f"  failed  {e['input']:25s}    {e['error']}")

print("\noutput tree:")
for p in sorted(out_dir.rglob("*")):
    print(" ", p.relative_to(out_dir))

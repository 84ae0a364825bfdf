"""Build a fundamental piece of the surface and write it as OBJ.

The mesh covers a log-polar annulus in the z-plane.  Crossing the seam
shifts X by the period (0, +-pi, 0); copies translated by that vector
tile the full surface.
"""
# %%
import sys
from pathlib import Path

from catenoid_ends import GridSpec, build_mesh, export_obj, legendre_config

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("legendre2.obj")

# %%
c = legendre_config(2)
mesh = build_mesh(c, GridSpec.default_for(c))
print("vertices:", len(mesh.vertices), "faces:", len(mesh.faces))
print("seam offset:", mesh.seam_offset, "defect:", f"{mesh.seam_defect:.1e}")
print("closure defect:", f"{mesh.closure_defect:.1e}")
print("puncture loops:", {k: f"{v:.1e}" for k, v in mesh.puncture_loop_defects.items()})

# %%
with out.open("wb") as fh:
    nbytes = export_obj(mesh, fh)
print(f"wrote {nbytes} bytes to {out}")

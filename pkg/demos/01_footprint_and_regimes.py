"""How large is the beam on the IRS, and where does the far field start?

A narrow beam hitting the surface at a shallow angle leaves an elongated
footprint. The footprint, not the surface, then decides how far away a
receiver must be before the reflected beam looks like a plane-wave Gaussian.
"""
import math

from irsfso.beam import BeamParams, effective_extents, incident_frame, regime_distances
from irsfso.geometry import OrientedNode

LAM = 1550e-9

print("incidence  w_x [m]  w_y [m]  d_n [m]   d_f [km]")
for theta in (math.pi / 8, math.pi / 4, math.pi / 3, math.pi / 2):
    beam = BeamParams(LAM, 2.5e-3, 60e3)
    fr = incident_frame(beam, OrientedNode(1000.0, theta))
    rep = regime_distances(*effective_extents(0.5, 0.5, fr), LAM)
    print(f"{theta:8.4f}  {fr.w_x:7.3f}  {fr.w_y:7.3f}  {rep.d_n:7.1f}  {rep.d_f / 1e3:8.2f}")

# a 0.5 m tile already clips the footprint, so the far-field distance stays
# in the tens of kilometres: typical FSO receivers sit in the intermediate zone

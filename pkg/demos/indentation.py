"""
Indenting a conical sheet
=========================

A random closed curve on the unit sphere above the plane u3 = 1/4 relaxes
under the penalized bending flow.  Local maxima merge until one fold is
left and the rest of the curve rests on the obstacle.
"""

# %%
import numpy as np

from curveflow import BoundaryCondition, FlowConfig, random_periodic_admissible, run, sphere
from curveflow.plots import write_energy_svg, write_profile_svg

from _common import demo_dir

J, delta = 80, 0.25
h = 2 * np.pi / J
u0 = random_periodic_admissible(1, J, delta)
cfg = FlowConfig("indentation", tau=h, eps=h * h, delta=delta, max_steps=3000, snapshot_stride=50)
u, trace, snaps = run(cfg, u0, sphere(), BoundaryCondition("periodic"))
print(f"{trace.steps} steps ({trace.termination}), energy {trace.energies[0]:.1f} -> "
      f"{trace.energies[-1]:.3f}")


# %%
# Count the local maxima of the height along the curve at a few snapshots.
def folds(curve):
    _, pts = curve.sample(8)
    z = pts[:, 2]
    return int(np.sum((z > np.roll(z, 1)) & (z >= np.roll(z, -1)) & (z > delta + 1e-3)))


shown = dict(snaps[:: max(1, len(snaps) // 6)] + [snaps[-1]])
for k, snap in shown.items():
    print(f"step {k:5d}: local maxima above the obstacle {folds(snap)}")

# %%
out = demo_dir("indentation")
write_energy_svg(out / "energy.svg", [("J=80", trace.energies)])
x, pts = u.sample(16)
write_profile_svg(out / "profile.svg", x, pts[:, 2], delta)
print("wrote", out)

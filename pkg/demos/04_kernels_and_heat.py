"""Kernels of spectral multipliers: heat diffusion and finite propagation.

The heat kernel p_t has unit mass and Gaussian-looking decay in the word
metric; cos(s sqrt L) delta_e stays essentially inside a ball whose radius
grows linearly in s.  Writes two SVG charts next to this script.

    python demos/04_kernels_and_heat.py
"""

import os

import numpy as np

from lpbesov import GroupSpec, build_group, build_sublaplacian, heat_kernel, word_metric
from lpbesov.estimates import check_gaussian_bound, wave_decay
from lpbesov.svg import line_chart

here = os.path.dirname(os.path.abspath(__file__))
g = build_group(GroupSpec("torus", 128))
metric = word_metric(g)
L = build_sublaplacian(g)

series = {}
for t in (1, 4, 16):
    p = heat_kernel(t, L)
    prof = np.bincount(metric.dist, weights=p)[:40]
    series[f"t={t}"] = (list(range(40)), prof.tolist())
    print(f"t={t:2d}: mass={p.sum():.15f}, p_t(e)={p[0]:.4f}")
line_chart(os.path.join(here, "heat_profiles.svg"), series, "heat kernel mass by distance",
           "|x|", "mass", log=True)

rep = check_gaussian_bound([0.25, 1, 4, 16], L, metric)
print("fitted Gaussian constants C(t):", [round(r["C"], 2) for r in rep.rows])

w = wave_decay([1, 2, 4], L, metric)
for r in w.rows:
    print(f"s={r['s']:g}: mass beyond |x| > {r['radius']} is {r['outside_mass']:.2e}")
line_chart(os.path.join(here, "wave_profiles.svg"),
           {f"s={r['s']:g}": (list(range(20)), r["mass_by_distance"][:20]) for r in w.rows},
           "|cos(s sqrt L) delta_e| by distance", "|x|", "mass", log=True)

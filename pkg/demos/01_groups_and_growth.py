"""Word metrics and volume growth on the two group families.

Tori grow like r^d at every scale.  The Heisenberg group over Z_N looks
two-dimensional near the identity (two generators) but its commutator
direction is reached in about r^2 steps, so large balls grow like r^4.

    python demos/01_groups_and_growth.py
"""

import warnings

from lpbesov import GroupSpec, build_group, growth_profile, word_metric

for spec in (GroupSpec("torus", 128), GroupSpec("torus", 64, 2), GroupSpec("heisenberg", 16)):
    g = build_group(spec)
    metric = word_metric(g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prof = growth_profile(metric)
    print(f"{spec.label:16s} |G|={g.size:5d} diameter={metric.r_max:3d} "
          f"d_loc={prof.d_loc:.2f} D_glob={prof.D_glob:.2f} K_hat={prof.K_hat:.2f} "
          f"N_mult={prof.N_mult}")
    print("    V(r) for r=0..8:", metric.volumes[:9].tolist())

# The commutator x y x^-1 y^-1 is the central element (0, 0, 1): four letters.
g = build_group(GroupSpec("heisenberg", 16))
(x, xi), (y, yi) = g.generators
c = g.mul(g.mul(x, y), g.mul(xi, yi))
print("commutator coordinates:", tuple(int(v) for v in g.coords[c]),
      "word length:", int(word_metric(g).dist[c]))

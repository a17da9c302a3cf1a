"""Split a signal into dyadic spectral blocks and put it back together.

S_0 u = phi(L) u keeps the low frequencies, Delta_j u = psi(4^-j L) u the
band around 4^j.  The blocks telescope, so their sum returns u up to the
filter tolerance, and the square function (sum |Delta_j u|^2)^(1/2)
measures u in every l^p with constants that do not depend on u.

    python demos/02_dyadic_decomposition.py
"""

import numpy as np

from lpbesov import (
    GroupSpec,
    build_group,
    build_sublaplacian,
    decompose,
    lp_equivalence_stats,
    make_ensemble,
    make_filter_bank,
    telescope_check,
    word_metric,
)

print("telescoping error, N=12:", telescope_check(12))

g = build_group(GroupSpec("heisenberg", 8))
L = build_sublaplacian(g)
bank = make_filter_bank(L, method="chebyshev")
print(f"{g.spec.label}: lambda_max={L.lambda_max}, scales j=0..{bank.J}")

u = np.random.default_rng(0).standard_normal(g.size)
dec = decompose(bank, u)
print("relative reconstruction error:", dec.reconstruction_error)
for j, b in enumerate(dec.blocks):
    print(f"    ||Delta_{j} u||_2 = {np.linalg.norm(b):.3f}   "
          f"Chebyshev degree {bank.filter('D', j).info.degree}")

ens = make_ensemble(L, 50, seed=1, metric=word_metric(g))
for p in (1.5, 2.0, 4.0):
    st = lp_equivalence_stats(bank, ens, p)
    print(f"p={p}: ratio range [{st.ratios.min():.3f}, {st.ratios.max():.3f}], "
          f"empirical C_p={st.empirical_Cp:.3f}")

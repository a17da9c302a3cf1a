import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpbesov.estimates import (
    bernstein_ratio,
    bernstein_sweep,
    check_gaussian_bound,
    check_kernel_estimates,
    conjugate_inverse,
    default_order,
    log_slope,
    schwartz_decay_profile,
    sj_convergence_check,
    uniform_block_l1,
    wave_decay,
    weighted_kernel_norm,
)
from lpbesov.functional_calculus import delta, heat_kernel
from lpbesov.group_lattice import growth_profile
from lpbesov.littlewood_paley import FilterBank, make_ensemble
from lpbesov.multipliers import builtin_family, cutoff_phi

from conftest import model


def test_conjugate_inverse():
    assert conjugate_inverse(1) == 0
    assert conjugate_inverse(2) == 0.5
    assert conjugate_inverse(math.inf) == 1
    assert conjugate_inverse(4) == pytest.approx(0.75)


def test_weighted_norm_unit_mass(torus64):
    _, m, L = torus64
    for t in (0.1, 1.0, 5.0):
        assert weighted_kernel_norm(heat_kernel(t, L), m, 0, (), 1, L) == pytest.approx(1.0)
    # derivative of a constant-mass kernel sums to zero but its l1 norm is positive
    assert weighted_kernel_norm(heat_kernel(1.0, L), m, 0, (1,), 1, L) > 0
    # weights: delta at distance r scores (1+r)^alpha
    f = delta(L, 5)
    assert weighted_kernel_norm(f, m, 2, (), 2, L) == pytest.approx(36.0)


def test_kernel_estimates_constant_one(torus64):
    _, m, L = torus64
    prof = growth_profile(m)
    rep = check_kernel_estimates(builtin_family("one"), [0.25, 1.0, 4.0], [0], [()], [1], L, m, prof)
    assert all(r["lhs"] == pytest.approx(1.0) for r in rep.rows)
    assert rep.passed and math.isfinite(rep.fitted_constant)
    assert rep.extra["n"] == default_order(prof, 0)


def test_kernel_estimates_rows_and_aggiunta_range(torus64):
    _, m, L = torus64
    prof = growth_profile(m)
    rep = check_kernel_estimates(builtin_family("psi"), [1 / 16, 1, 4], [0, 2], [(), (1,)],
                                 [1, 2, math.inf], L, m, prof, n=3)
    agg = [r for r in rep.rows if r["estimate"] == "aggiunta"]
    assert agg and all(r["t"] <= 1 for r in agg)
    for r in rep.rows:
        assert {"t", "alpha", "I", "p", "lhs", "envelope", "ratio"} <= set(r)
    assert rep.notes[0] == "multiplier order n = 3"


def test_gaussian_bound(torus64):
    _, m, L = torus64
    rep = check_gaussian_bound([0.25, 1, 4], L, m)
    for row, t in zip(rep.rows, [0.25, 1, 4]):
        # the bound at x = e alone forces C >= p_t(e) V(sqrt t)
        assert row["C"] >= row["at_identity"] * (1 - 1e-12)
    assert rep.extra["span"] < 4
    d = check_gaussian_bound([0.25, 1], L, m, I=(1,), d=1.0)
    assert all(r["C"] > 0 for r in d.rows)
    with pytest.raises(ValueError):
        check_gaussian_bound([1], L, m, I=(1,))


def test_bernstein_trivial_and_eigenvector():
    _, m, L = model("torus", 64)
    bank = FilterBank(L, "exact")
    u = np.random.default_rng(0).standard_normal(64)
    for j in bank.scales:
        assert bernstein_ratio(bank, u, (), 0, 2, 2, j, 1.0) == pytest.approx(1.0)
    spec = L.spectrum()
    for i in (20, 40, 63):
        v, lam = spec.eigenvectors[:, i], spec.eigenvalues[i]
        for j in bank.scales:
            if bank.psi(4.0**-j * lam) < 1e-6:  # off (or on the edge of) the block's support
                assert 4.0 ** -j * lam <= 0.3 or 4.0 ** -j * lam >= 3.9
                continue
            for sigma in (-1.0, 1.0, 2.0):
                r = bernstein_ratio(bank, v, (), sigma, 2, 2, j, 1.0)
                assert r == pytest.approx((math.sqrt(lam) / 2**j) ** sigma, rel=1e-9)
                assert 2.0 ** -abs(sigma) <= r <= 2.0 ** abs(sigma)


def test_bernstein_guards():
    _, _, L = model("torus", 64)
    bank = FilterBank(L, "exact")
    with pytest.raises(ValueError):
        bernstein_ratio(bank, np.ones(64), (), 0, 2, 1, 0, 1.0)
    with pytest.raises(ValueError):
        bernstein_ratio(bank, np.ones(64), (), -1, 2, 2, 0, 1.0, variant="S")
    # constants have no dyadic content: the row is skipped
    assert bernstein_ratio(bank, np.ones(64), (), 0, 2, 2, 0, 1.0) is None


def test_bernstein_sweep_structure():
    _, _, L = model("torus", 64)
    bank = FilterBank(L)
    ens = make_ensemble(L, 5, seed=0, structured=False)
    rep = bernstein_sweep(bank, ens, (1,), 0, 1, 2, 1.0)
    assert set(rep.extra["max_ratio_per_j"]) == {"0", "1"}
    assert math.isfinite(rep.extra["slope"])
    assert len(rep.rows) == 10


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 10))
def test_log_slope_oracle(rate, c):
    js = np.arange(5)
    assert log_slope(js, c * np.exp(rate * js)) == pytest.approx(rate, abs=1e-9)


def test_schwartz_profiles(torus64):
    _, m, L = torus64
    np.testing.assert_allclose(schwartz_decay_profile(delta(L), m, range(7)), 1.0)
    prof = schwartz_decay_profile(heat_kernel(1.0, L), m, range(7))
    assert np.all(np.isfinite(prof)) and prof[0] == heat_kernel(1.0, L).max()


def test_sj_convergence(torus64):
    _, m, L = torus64
    bank = FilterBank(L, "exact")
    f = np.random.default_rng(0).standard_normal(64)
    seq = sj_convergence_check(bank, f, m, 2, ())
    assert len(seq) == bank.J + 2
    assert seq[-1] <= 1e-10
    assert np.all(np.diff(seq) <= 1e-12)
    spec = L.spectrum()
    v, lam = spec.eigenvectors[:, 30], spec.eigenvalues[30]
    base = schwartz_decay_profile(v, m, [1])[0]
    seq = sj_convergence_check(bank, v, m, 1, ())
    phi = cutoff_phi()
    np.testing.assert_allclose(seq, [(1 - phi(4.0**-j * lam)) * base for j in range(len(seq))],
                               atol=1e-12)


def test_uniform_block_l1_flat(torus64):
    _, _, L = torus64
    rep = uniform_block_l1(FilterBank(L))
    assert rep.extra["max_over_median"] <= 2


def test_wave_decay(torus64):
    _, m, L = torus64
    rep = wave_decay([1, 2, 4], L, m)
    assert rep.fitted_constant <= 1e-6
    for r in rep.rows:
        assert sum(r["mass_by_distance"]) >= 1 - 1e-9  # cos(s sqrt L) delta has l1 mass >= 1

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpbesov.besov import (
    BesovParams,
    besov_dyadic_norm,
    besov_equivalence_report,
    besov_heat_norm,
    default_t_grid,
    dyadic_block_sequence,
)
from lpbesov.littlewood_paley import FilterBank, lp_norm, make_ensemble

from conftest import model


def test_params_problems():
    assert "heat characterization requires m > s" in BesovParams(2, 2, 2, 2).problems()
    assert BesovParams(1, 0.5, 2, 2).problems()
    assert BesovParams(-1, 2, 2, 1).problems() == []
    with pytest.raises(ValueError):
        BesovParams(1, 2, 2, 0.5).validate()
    assert BesovParams(1, math.inf, 2, 2).as_dict()["p"] == "inf"


def test_default_grid():
    _, _, L = model("torus", 64)  # lambda_max = 4, J = 1, t_min = 1/16
    g = default_t_grid(L)
    np.testing.assert_allclose(g, [1 / 16, 1 / 8, 1 / 4, 1 / 2, 1])
    assert default_t_grid(L, extend=True)[-1] == 64


def _heat_integral(lam, s, m, t0, t1):
    # int_{t0}^{t1} (t^{-s/2} (t lam)^{m/2} e^{-t lam})^2 dt/t for s = 1, m = 2
    assert (s, m) == (1, 2)
    return lam * (math.exp(-2 * lam * t0) - math.exp(-2 * lam * t1)) / 2


def test_heat_norm_eigenvector_against_closed_form():
    _, _, L = model("torus", 64)
    spec = L.spectrum()
    prm = BesovParams(1, 2, 2, 2)
    t_min = 1 / 16
    fine = 2.0 ** -np.arange(0, 4.0 + 1e-9, 1 / 8)  # ratio 2^(-1/8) from 1 down to t_min
    for i in (3, 20, 40, 63):
        v = spec.eigenvectors[:, i]
        lam = spec.eigenvalues[i]
        got = besov_heat_norm(v, L, prm, fine)
        exact = math.exp(-lam) + math.sqrt(_heat_integral(lam, 1, 2, t_min, 1.0))
        assert got == pytest.approx(exact, rel=1e-3)


def test_dyadic_norm_eigenvector():
    _, _, L = model("torus", 64)
    bank = FilterBank(L, "exact")
    spec = L.spectrum()
    v = spec.eigenvectors[:, 50]
    lam = spec.eigenvalues[50]
    low, seq = dyadic_block_sequence(bank, v, 1.0, 2)
    expected = [2.0**j * abs(bank.psi(4.0**-j * lam)) for j in bank.scales]
    np.testing.assert_allclose(seq, expected, atol=1e-12)
    assert low == pytest.approx(abs(bank.phi(lam)), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-3))
def test_homogeneity(c):
    _, _, L = model("heisenberg", 4)
    bank = FilterBank(L)
    u = np.random.default_rng(0).standard_normal(L.size)
    for prm in (BesovParams(1, 2, 2, 2), BesovParams(0.5, 1, math.inf, 1)):
        a = besov_dyadic_norm(bank, c * u, prm)
        assert a == pytest.approx(abs(c) * besov_dyadic_norm(bank, u, prm), rel=1e-10)
        b = besov_heat_norm(c * u, L, prm)
        assert b == pytest.approx(abs(c) * besov_heat_norm(u, L, prm), rel=1e-10)
    assert besov_dyadic_norm(bank, 0 * u, BesovParams(1, 2, 2, 2)) == 0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(0, 2))
def test_q_monotone_and_lp_embedding(seed, s):
    _, _, L = model("torus", 64)
    bank = FilterBank(L)
    u = np.random.default_rng(seed).standard_normal(64)
    norms = [besov_dyadic_norm(bank, u, BesovParams(s, 2, q, s + 1)) for q in (1, 2, 4, math.inf)]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))
    # ||u||_p <= ||S_0 u||_p + sum_j ||Delta_j u||_p <= the q = 1 norm
    for p in (1, 2, math.inf):
        assert lp_norm(u, p) <= besov_dyadic_norm(bank, u, BesovParams(s, p, 1, s + 1)) + 1e-12


def test_s0_dyadic_equivalent_to_l2():
    _, _, L = model("heisenberg", 4)
    bank = FilterBank(L)
    U = make_ensemble(L, 30, seed=1).signals
    r = besov_dyadic_norm(bank, U, BesovParams(0, 2, 2, 1)) / lp_norm(U, 2)
    assert np.all(r >= 1 / math.sqrt(6)) and np.all(r <= math.sqrt(2) + 1)


def test_report(tmp_path):
    _, _, L = model("torus", 32)
    bank = FilterBank(L)
    ens = make_ensemble(L, 10, seed=3, structured=False)
    params = [BesovParams(1, 2, 2, 2), BesovParams(-1, 2, 2, 1), BesovParams(1, math.inf, math.inf, 2)]
    rep = besov_equivalence_report(bank, L, ens, params)
    assert len(rep.spreads()) == 3 and all(1 <= s <= 10 for s in rep.spreads())
    assert rep.notes  # tail estimates for finite q
    rep.to_json(tmp_path / "r.json")
    rep.to_csv(tmp_path / "r.csv")
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 1 + 3 * 10
    with pytest.raises(ValueError):
        besov_equivalence_report(bank, L, ens, [])

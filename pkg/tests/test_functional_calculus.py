import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpbesov.functional_calculus import (
    DegreeCapError,
    SpectralFilter,
    apply_multiplier,
    chebyshev_coefficients,
    convolve,
    delta,
    heat_kernel,
    kernel_of,
    spectral_power_apply,
    wave_cosine,
)
from lpbesov.multipliers import builtin_family, heat

from conftest import model


def dft_apply(m, t, f):
    """Oracle on Z_N: m(tL) is a Fourier multiplier with symbol 2 - 2cos(2 pi k/N)."""
    N = f.shape[0]
    sym = m(t * (2 - 2 * np.cos(2 * np.pi * np.arange(N) / N)))
    return np.fft.ifft(np.fft.fft(f) * sym).real


def test_two_point_heat_kernel():
    # Z_2: L = [[2, -2], [-2, 2]], eigenvalues 0 and 4
    _, _, L = model("torus", 2)
    for t in (0.1, 1.0, 3.0):
        p = heat_kernel(t, L, "exact")
        np.testing.assert_allclose(p, [(1 + math.exp(-4 * t)) / 2, (1 - math.exp(-4 * t)) / 2],
                                   atol=1e-15)


@pytest.mark.parametrize("name", ["phi", "psi", "heat", "heat_power(2)", "wave(2)"])
@pytest.mark.parametrize("method", ["exact", "chebyshev"])
def test_torus_matches_dft(name, method):
    _, _, L = model("torus", 64)
    f = np.random.default_rng(3).standard_normal(64)
    m = builtin_family(name)
    out, info = apply_multiplier(m, 0.5, L, f, method, full_output=True)
    err = np.linalg.norm(out - dft_apply(m, 0.5, f)) / np.linalg.norm(f)
    assert err <= max(info.certified_error, 1e-12)


@settings(max_examples=25, deadline=None)
@given(t=st.floats(1e-3, 8.0), name=st.sampled_from(["phi", "psi", "heat", "heat_power(2)"]))
def test_chebyshev_within_certificate(t, name):
    _, _, L = model("heisenberg", 4)
    F = np.random.default_rng(0).standard_normal((L.size, 3))
    m = builtin_family(name)
    ex = SpectralFilter(m, t, L, "exact")
    ch = SpectralFilter(m, t, L, "chebyshev")
    disc = np.max(np.linalg.norm(ex(F) - ch(F), axis=0) / np.linalg.norm(F, axis=0))
    assert disc <= ch.info.certified_error + ex.info.certified_error
    assert ch.info.certified_error <= 1e-8


def test_chebyshev_coefficients_of_polynomial():
    # x^2 on [0, 2]: x = 1 + y, x^2 = 1.5 T0 + 2 T1 + 0.5 T2
    c = chebyshev_coefficients(lambda x: x**2, 0.0, 2.0, 64)
    np.testing.assert_allclose(c[:3], [1.5, 2.0, 0.5], atol=1e-14)
    np.testing.assert_allclose(c[3:], 0.0, atol=1e-14)


def test_degree_cap():
    _, _, L = model("torus", 64)
    with pytest.raises(DegreeCapError) as exc:
        SpectralFilter(builtin_family("psi"), 1.0, L, "chebyshev", max_degree=5)
    assert exc.value.tail_bound > 1e-8


def test_input_validation(torus64):
    _, _, L = torus64
    with pytest.raises(ValueError):
        SpectralFilter(heat(), 0.0, L)
    with pytest.raises(ValueError):
        SpectralFilter(heat(), 1.0, L, "lanczos")
    with pytest.raises(ValueError):
        apply_multiplier("heat", 1.0, L, np.ones(10))


def test_auto_method_choice():
    _, _, L = model("torus", 64)
    assert SpectralFilter(heat(), 1.0, L).method == "exact"
    _, _, big = model("torus", 64, 2)
    assert SpectralFilter(heat(), 1.0, big).method == "chebyshev"


def test_convolve_matches_circular_convolution():
    g, _, _ = model("torus", 32)
    rng = np.random.default_rng(5)
    f, h = rng.standard_normal((2, 32))
    brute = np.array([sum(f[y] * h[(x - y) % 32] for y in range(32)) for x in range(32)])
    np.testing.assert_allclose(convolve(f, h, g), brute, atol=1e-12)


def test_multiplier_is_right_convolution_on_heisenberg(heis4):
    # left-invariant operators act as f -> f * M_t
    g, _, L = heis4
    f = np.random.default_rng(2).standard_normal(L.size)
    for name in ("heat", "psi"):
        K = kernel_of(name, 0.7, L, "exact")
        np.testing.assert_allclose(apply_multiplier(name, 0.7, L, f, "exact"),
                                   convolve(f, K, g), atol=1e-12)


def test_convolve_validation(heis4):
    g, _, _ = heis4
    with pytest.raises(ValueError):
        convolve(np.ones((g.size, 2)), np.ones(g.size), g)
    with pytest.raises(ValueError):
        convolve(np.ones(3), np.ones(g.size), g)


def test_heat_kernel_mass_and_semigroup(heis4):
    g, _, L = heis4
    for t in (0.5, 2.0):
        p = heat_kernel(t, L)
        assert abs(p.sum() - 1) < 1e-12 and p.min() > -1e-12
    lhs = heat_kernel(1.5, L)
    rhs = convolve(heat_kernel(0.5, L), heat_kernel(1.0, L), g)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_wave_cosine(torus64):
    _, _, L = torus64
    f = np.random.default_rng(1).standard_normal(64)
    out = wave_cosine(0.0, L, f)
    np.testing.assert_array_equal(out, f)
    assert out is not f
    expected = dft_apply(lambda lam: np.cos(3.0 * np.sqrt(lam)), 1.0, f)
    np.testing.assert_allclose(wave_cosine(3.0, L, f), expected, atol=1e-10)


def test_spectral_power(heis4):
    _, _, L = heis4
    f = np.random.default_rng(4).standard_normal(L.size)
    f0 = f - f.mean()  # no component in the constants
    np.testing.assert_allclose(spectral_power_apply(2, L, f), L @ f, atol=1e-10)
    np.testing.assert_allclose(spectral_power_apply(0, L, f), f, atol=1e-12)
    half = spectral_power_apply(1, L, spectral_power_apply(1, L, f))
    np.testing.assert_allclose(half, L @ f, atol=1e-10)
    inv = spectral_power_apply(-2, L, L @ f0)
    np.testing.assert_allclose(inv, f0, atol=1e-9)
    # the constants are sent to zero for sigma != 0
    np.testing.assert_allclose(spectral_power_apply(-1, L, np.ones(L.size)), 0, atol=1e-12)


def test_delta():
    e = delta(5, 2)
    assert e.tolist() == [0, 0, 1, 0, 0]

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from majorana_qd.bath import (
    MINUS,
    PLUS,
    BathParams,
    MemoryCoefficients,
    QuadratureError,
    advance_memory,
    correlation,
    correlation_quadrature,
    dissipation_rate_estimate,
    fermi,
    hurwitz_zeta,
    memory_reference,
    spectral_density,
)
from majorana_qd.fock import ModelParams, build_hamiltonian, diagonalize

ZERO_T = BathParams(0.05, 1.0, 10.0)
BETA1 = BathParams(0.05, 1.0, 10.0, 1.0)


@pytest.fixture(scope="module")
def spectrum():
    return diagonalize(build_hamiltonian(ModelParams.majorana(0.5, 0.5, 0.1, 0.2)))


def advance_to(mc, spectrum, t, h, b, panels):
    for _ in range(int(round((t - mc.t) / h))):
        mc = advance_memory(mc, spectrum, h, b, panels=panels)
    return mc


class TestParams:
    @pytest.mark.parametrize(
        "kw",
        [dict(gamma=-1), dict(s=0), dict(omega_c=0), dict(beta=0), dict(gamma=math.nan)],
    )
    def test_invalid(self, kw):
        args = dict(gamma=0.05, s=1.0, omega_c=10.0, beta=math.inf) | kw
        with pytest.raises(ValueError):
            BathParams(**args)

    def test_zero_temperature_flag(self):
        assert ZERO_T.zero_temperature and not BETA1.zero_temperature


class TestSpectralDensity:
    def test_value(self):
        assert spectral_density(10.0, ZERO_T) == pytest.approx(0.1839397, abs=5e-8)

    def test_zero(self):
        assert spectral_density(0.0, BathParams(0.05, 0.5, 10.0)) == 0.0

    def test_peak_at_cutoff(self):
        w = np.linspace(0, 40, 400001)
        assert w[np.argmax(spectral_density(w, ZERO_T))] == pytest.approx(10.0, abs=1e-4)

    def test_negative(self):
        with pytest.raises(ValueError):
            spectral_density(-1.0, ZERO_T)

    def test_fermi(self):
        assert fermi(0.3, math.inf) == 0.0
        assert fermi(-0.3, math.inf) == 1.0
        assert fermi(0.0, 2.0) == 0.5


class TestHurwitz:
    def test_zeta2(self):
        assert hurwitz_zeta(2, 1.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)

    def test_zeta2_half(self):
        assert hurwitz_zeta(2, 0.5) == pytest.approx(math.pi**2 / 2, rel=1e-14)

    def test_brute_force_series(self):
        z = 0.55 + 0.5j
        n = 10**7
        k = np.arange(n, dtype=float)
        head = np.sum((z + k) ** -2.0)
        # leading Euler-Maclaurin terms of the remainder, error ~ n^-5
        w = z + n
        tail = 1 / w + 0.5 / w**2 + 1 / (6 * w**3)
        assert abs(hurwitz_zeta(2, z) - (head + tail)) <= 1e-12 * abs(head)

    @pytest.mark.parametrize("order", [1.5, 2.0, 3.0, 3.7])
    @pytest.mark.parametrize(
        "z", [0.55 + 0.5j, 0.75 - 3.0j, 2.0 + 40.0j, 0.5 + 0j, 30.0 - 0.1j, 1.3 - 250.0j]
    )
    def test_against_mpmath(self, order, z):
        want = complex(mpmath.zeta(order, mpmath.mpc(z.real, z.imag)))
        assert abs(hurwitz_zeta(order, z) - want) <= 1e-12 * abs(want)

    def test_vectorized(self):
        z = np.array([0.55 + 0.5j, 20.0 + 1j, 0.6 - 7j])
        got = hurwitz_zeta(2.0, z)
        assert got.shape == (3,)
        for zi, gi in zip(z, got):
            assert gi == hurwitz_zeta(2.0, zi)

    def test_domain(self):
        with pytest.raises(ValueError):
            hurwitz_zeta(2.0, -0.5 + 1j)
        with pytest.raises(ValueError):
            hurwitz_zeta(1.0, 1.0)


class TestCorrelation:
    def test_zero_t_plus(self):
        t = np.linspace(0, 10, 11)
        assert np.all(correlation(PLUS, t, ZERO_T) == 0)

    def test_zero_t_minus_at_origin(self):
        assert correlation(MINUS, 0.0, ZERO_T) == 5.0 + 0j

    def test_quadrature_agreement(self):
        for sign in (PLUS, MINUS):
            a = correlation(sign, 0.7, BETA1)
            q = correlation_quadrature(sign, 0.7, BETA1)
            assert abs(a - q) <= 1e-6 * abs(q)

    def test_minus_minus_plus_star(self):
        t = np.linspace(0, 10, 101)
        for s in (0.5, 1.0, 2.0):
            b = BathParams(0.05, s, 10.0, 4.0)
            diff = correlation(MINUS, t, b) - np.conj(correlation(PLUS, t, b))
            vac = 0.05 * 100 * math.gamma(1 + s) / (1 + 10j * t) ** (1 + s)
            assert np.abs(diff - vac).max() <= 1e-13 * np.abs(vac).max()

    def test_low_temperature_continuity(self):
        b = BathParams(0.05, 1.0, 10.0, 1e4)
        t = np.linspace(0, 10, 51)
        assert np.all(np.abs(correlation(PLUS, t, b)) <= 1e-3 * np.abs(correlation(MINUS, t, b)))

    def test_quadrature_plus_zero_t(self):
        assert correlation_quadrature(PLUS, 1.3, ZERO_T) == 0

    def test_quadrature_minus_at_origin(self):
        q = correlation_quadrature(MINUS, 0.0, BETA1)
        want = integrate.quad(lambda w: spectral_density(w, BETA1) * (fermi(w, 1.0) + 1), 0, 400)[0]
        assert q.imag == 0 and q.real > 0
        assert q.real == pytest.approx(want, rel=1e-10)

    def test_quadrature_conjugation(self):
        t = 0.9

        def f(w, part):
            v = spectral_density(w, BETA1) * fermi(w, 1.0) * np.exp(-1j * w * t)
            return v.real if part == 0 else v.imag

        direct = complex(
            integrate.quad(f, 0, 400, args=(0,), limit=2000)[0],
            integrate.quad(f, 0, 400, args=(1,), limit=2000)[0],
        )
        assert abs(np.conj(correlation_quadrature(PLUS, t, BETA1)) - direct) <= 1e-9

    def test_quadrature_tolerance_error(self):
        with pytest.raises(QuadratureError) as info:
            correlation_quadrature(MINUS, 3.0, BETA1, tol=1e-30)
        assert info.value.estimate != 0

    def test_rate_estimate(self):
        # zero T, s = 1: |int_0^inf gamma wc^2 / (1 + i wc u)^2 du| = gamma wc
        assert dissipation_rate_estimate(ZERO_T) == pytest.approx(0.5, rel=1e-6)


class TestMemory:
    def test_zero_start(self, spectrum):
        mc = MemoryCoefficients.zero(spectrum)
        assert mc.t == 0 and not mc.g_plus.any() and not mc.g_minus.any()

    def test_zero_advance(self, spectrum):
        mc = MemoryCoefficients.zero(spectrum)
        assert advance_memory(mc, spectrum, 0.0, ZERO_T) is mc

    def test_negative_step(self, spectrum):
        with pytest.raises(ValueError):
            advance_memory(MemoryCoefficients.zero(spectrum), spectrum, -0.1, ZERO_T)

    def test_spectrum_mismatch(self, spectrum):
        other = diagonalize(build_hamiltonian(ModelParams.regular(0.5, 0.5, 0.1, 0.2)))
        with pytest.raises(ValueError, match="different spectrum"):
            advance_memory(MemoryCoefficients.zero(spectrum), other, 0.1, ZERO_T)

    def test_constant_kernel(self, spectrum):
        c = 0.3 - 0.2j
        mc = MemoryCoefficients.zero(spectrum)
        for _ in range(7):
            mc = advance_memory(mc, spectrum, 0.13, ZERO_T, kernel=lambda u: (c, 2 * c))
        diag = np.diag_indices(8)
        assert np.abs(mc.g_plus[diag] - c * mc.t).max() <= 1e-14
        assert np.abs(mc.g_minus[diag] - 2 * c * mc.t).max() <= 1e-14

    def test_split_steps(self, spectrum):
        mc0 = MemoryCoefficients.zero(spectrum)
        once = advance_memory(mc0, spectrum, 0.02, BETA1, panels=4)
        twice = advance_memory(advance_memory(mc0, spectrum, 0.01, BETA1), spectrum, 0.01, BETA1)
        assert np.abs(once.g_minus - twice.g_minus).max() <= 1e-13
        assert once.t == pytest.approx(twice.t)

    @pytest.mark.parametrize(
        "b,h,panels",
        [(ZERO_T, 0.005, 4), (BETA1, 0.005, 4), (BathParams(0.05, 1.0, 50.0, 1.0), 0.005, 10)],
        ids=["wc10-T0", "wc10-beta1", "wc50-beta1"],
    )
    def test_against_reference(self, spectrum, b, h, panels):
        mc = MemoryCoefficients.zero(spectrum)
        for t in (1.0, 5.0, 20.0):
            mc = advance_to(mc, spectrum, t, h, b, panels)
            for sign, g in ((PLUS, mc.g_plus), (MINUS, mc.g_minus)):
                assert np.abs(g - memory_reference(sign, t, spectrum, b)).max() <= 1e-8

    def test_fourth_order(self, spectrum):
        ref = memory_reference(MINUS, 5.0, spectrum, BETA1)
        errs = []
        for h in (0.02, 0.01):
            mc = advance_to(MemoryCoefficients.zero(spectrum), spectrum, 5.0, h, BETA1, panels=2)
            errs.append(np.abs(mc.g_minus - ref).max())
        assert math.log2(errs[0] / errs[1]) == pytest.approx(4.0, abs=0.25)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.0, 10.0),
    st.sampled_from([0.5, 1.0, 2.0]),
    st.sampled_from([1.0, 4.0]),
    st.sampled_from([10.0, 50.0]),
)
def test_property_kernel_oracle(t, s, beta, wc):
    b = BathParams(0.05, s, wc, beta)
    for sign in (PLUS, MINUS):
        a, q = correlation(sign, t, b), correlation_quadrature(sign, t, b)
        assert abs(a - q) <= 1e-6 * abs(q)

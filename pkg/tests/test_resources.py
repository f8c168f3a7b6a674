import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majorana_qd.experiments import preset_initial_state
from majorana_qd.fock import DIM, number_operator
from majorana_qd.resources import (
    PAIRS,
    TwoBodyState,
    concurrence,
    l1_coherence,
    occupations,
    pair_resources,
    partial_trace_pair,
)

from .conftest import random_density

Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(Y, Y)


def wootters_reference(s):
    """Textbook route: eigenvalues of the non-Hermitian product, via numpy.eig."""
    m = s @ YY @ s.conj() @ YY
    lam = np.sort(np.clip(np.linalg.eigvals(m).real, 0, None))[::-1]
    r = np.sqrt(lam)
    return max(0.0, r[0] - r[1] - r[2] - r[3])


def proj(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def mode_trace_reference(rho, pair):
    """Explicit loop over occupations: sum over equal occupation of the third mode."""
    keep = {"12": (0, 1), "1d": (0, 2), "2d": (1, 2)}[pair]
    out = np.zeros((4, 4), dtype=complex)
    for a, b in itertools.product(range(DIM), repeat=2):
        occ_a = [(a >> k) & 1 for k in range(3)]
        occ_b = [(b >> k) & 1 for k in range(3)]
        (other,) = set(range(3)) - set(keep)
        if occ_a[other] != occ_b[other]:
            continue
        i = 2 * occ_a[keep[0]] + occ_a[keep[1]]
        j = 2 * occ_b[keep[0]] + occ_b[keep[1]]
        out[i, j] += rho[a, b]
    return out


class TestPartialTrace:
    def test_one_gives_vacuum_pair(self):
        s = partial_trace_pair(preset_initial_state("one"), "12")
        want = np.zeros((4, 4))
        want[0, 0] = 1
        assert np.array_equal(s.entries, want)

    def test_w_state(self):
        s = partial_trace_pair(preset_initial_state("w"), "12")
        psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
        want = np.diag([1 / 3, 0, 0, 0]) + (2 / 3) * proj(psi)
        assert np.abs(s.entries - want).max() <= 1e-15

    @pytest.mark.parametrize("pair", PAIRS)
    def test_matches_loop_reference(self, rng, pair):
        rho = random_density(rng)
        got = partial_trace_pair(rho, pair).entries
        assert np.abs(got - mode_trace_reference(rho, pair)).max() <= 1e-15
        assert abs(np.trace(got) - 1) <= 1e-12

    def test_tuple_pair_and_bad_pair(self):
        rho = preset_initial_state("w")
        assert np.array_equal(
            partial_trace_pair(rho, ("1", "d")).entries, partial_trace_pair(rho, "1d").entries
        )
        with pytest.raises(ValueError, match="unknown pair"):
            partial_trace_pair(rho, "11")

    def test_two_body_shape(self):
        with pytest.raises(ValueError):
            TwoBodyState(np.eye(3), "12")


class TestOccupations:
    def test_w(self):
        assert np.allclose(occupations(preset_initial_state("w")), (1 / 3,) * 3, atol=1e-15)

    def test_phi(self):
        assert np.allclose(occupations(preset_initial_state("phi")), (0.5, 0.5, 0.0), atol=1e-15)

    def test_matches_number_operators(self, rng):
        rho = random_density(rng)
        got = occupations(rho)
        for value, mode in zip(got, ("f1", "f2", "d")):
            assert value == pytest.approx(np.trace(number_operator(mode) @ rho).real, abs=1e-14)


class TestConcurrence:
    def test_bell(self):
        s = proj(np.array([1, 0, 0, 1]) / math.sqrt(2))
        assert concurrence(s) == pytest.approx(1.0, abs=1e-12)

    def test_product(self):
        s = proj([0, 1, 0, 0])
        assert concurrence(s) == pytest.approx(0.0, abs=1e-12)

    def test_w_marginal(self):
        s = partial_trace_pair(preset_initial_state("w"), "12")
        assert concurrence(s) == pytest.approx(2 / 3, abs=1e-12)
        assert wootters_reference(s.entries) == pytest.approx(2 / 3, abs=1e-10)

    def test_maximally_mixed(self):
        assert concurrence(np.eye(4) / 4) == 0.0

    def test_rejects_negative_state(self):
        s = np.diag([0.5, 0.5 + 1e-4, 0.0, -1e-4])
        with pytest.raises(ValueError):
            concurrence(s)

    def test_degradation_error(self):
        # within the accepted spectrum floor, but M = sigma sigma~ has a -5e-8 eigenvalue
        s = np.diag([0.5, 0.5 + 1e-7, 0.0, -1e-7])
        with pytest.raises(ArithmeticError, match="degradation"):
            concurrence(s)

    def test_slightly_indefinite_uses_product_route(self):
        bell = proj(np.array([1, 0, 0, 1]) / math.sqrt(2))
        s = bell + np.diag([0, 1e-12, -1e-12, 0])
        assert concurrence(s) == pytest.approx(1.0, abs=1e-9)

    def test_against_reference(self, rng):
        for _ in range(200):
            s = random_density(rng, 4, rank=int(rng.integers(1, 5)))
            assert concurrence(s) == pytest.approx(wootters_reference(s), abs=1e-7)

    def test_global_phase(self, rng):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        a, b = proj(psi), proj(np.exp(0.7j) * psi)
        assert concurrence(a) == pytest.approx(concurrence(b), abs=1e-12)
        assert l1_coherence(a) == pytest.approx(l1_coherence(b), abs=1e-12)


class TestL1:
    def test_diagonal(self):
        assert l1_coherence(np.diag([0.1, 0.2, 0.3, 0.4])) == 0.0

    def test_bell(self):
        assert l1_coherence(proj(np.array([1, 0, 0, 1]) / math.sqrt(2))) == pytest.approx(1.0)

    def test_maximal(self):
        assert l1_coherence(proj(np.full(4, 0.5))) == pytest.approx(3.0)


def test_pair_resources_keys():
    res = pair_resources(preset_initial_state("w"))
    assert set(res) == set(PAIRS)
    for c, l1 in res.values():
        assert c == pytest.approx(2 / 3, abs=1e-12)
        assert l1 == pytest.approx(2 / 3, abs=1e-12)


def test_local_phase_invariance(rng):
    rho = random_density(rng)
    for mode in ("f1", "f2", "d"):
        u = np.diag(np.exp(1j * 0.9 * np.diag(number_operator(mode)).real))
        rot = u @ rho @ u.conj().T
        for pair in PAIRS:
            a = concurrence(partial_trace_pair(rho, pair))
            b = concurrence(partial_trace_pair(rot, pair))
            assert a == pytest.approx(b, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
    st.floats(0, 1), st.floats(0, 2 * math.pi),
)
def test_property_x_state(a, b, c, frac, phase):
    # populations p00, p01, p10 with zero |11>, coherence inside the positivity bound
    total = a + b + c
    if total < 1e-6:
        return
    p00, p01, p10 = a / total, b / total, c / total
    z = frac * math.sqrt(p01 * p10) * np.exp(1j * phase)
    s = np.diag([p00, p01, p10, 0.0]).astype(complex)
    s[1, 2], s[2, 1] = z, np.conj(z)
    assert concurrence(s) == pytest.approx(2 * abs(z), abs=1e-12)
    assert l1_coherence(s) == pytest.approx(2 * abs(z), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_property_resource_bounds(seed):
    rho = random_density(np.random.default_rng(seed), rank=int(seed % 8) + 1)
    for c, l1 in pair_resources(rho).values():
        assert -1e-12 <= c <= 1 + 1e-12
        assert -1e-12 <= l1 <= 3 + 1e-12

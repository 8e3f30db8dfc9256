import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symdyn.errors import DomainError, InputError, PreconditionError, ResourceError
from symdyn.linearization import (
    analyze,
    eigenvalues,
    l1_ball_size,
    l_r_membership,
    resonance_free,
    smoothness_budget,
    snapped_floor,
)

D2 = np.diag([2.0, 0.5])
D3 = np.diag([4.0, 2.0, 0.5])


def brute_witnesses(ev, r, tol=1e-9):
    out = set()
    for l in product(range(-r, r + 1), repeat=len(ev)):
        if not 2 <= sum(map(abs, l)) <= r:
            continue
        denom = 1
        for z, k in zip(ev, l):
            denom *= z ** k
        for z in ev:
            if abs(abs(z / denom) - 1) <= tol:
                out.add((complex(z), l))
    return out


def saddle_diag():
    # moduli kept away from 1 so the spreads stay well conditioned
    big = st.floats(1.5, 6.0)
    small = st.floats(0.15, 0.67)
    return st.tuples(st.lists(big, min_size=1, max_size=2), st.lists(small, min_size=1, max_size=2)).map(
        lambda t: np.diag(t[0] + t[1]))


class TestAnalyze:
    def test_diag_two_half(self):
        rep = analyze(D2)
        assert rep.rho_plus == 1 and rep.rho_minus == 1
        assert rep.k_r[2] == 1 and rep.r_p == 9 and rep.saddle

    def test_diag_three(self):
        rep = analyze(D3)
        assert rep.rho_plus == 2 and rep.rho_minus == 1 and rep.k_r[3] == 1

    def test_positive_only_budget(self):
        assert smoothness_budget(3, 2, 1, positive_only=True) == 1
        assert smoothness_budget(5, 1, 4) == 1 and smoothness_budget(9, 1, 2) == 3
        assert smoothness_budget(1, 1, 1, positive_only=True) == 0

    def test_snapping(self):
        assert snapped_floor(2.9999999999) == 3 and snapped_floor(2.99) == 2

    def test_non_hyperbolic(self):
        with pytest.raises(DomainError):
            analyze(np.diag([1.0, 3.0]))
        with pytest.raises(DomainError):
            analyze(np.array([[0.0, -1.0], [1.0, 0.0]]))

    def test_singular(self):
        with pytest.raises(DomainError):
            analyze(np.diag([0.0, 3.0]))

    def test_not_square(self):
        with pytest.raises(InputError):
            analyze(np.ones((2, 3)))

    def test_expanding_only(self):
        rep = analyze([[2, -1], [1, 2]])
        assert not rep.saddle and rep.rho_minus is None and rep.r_p is None

    def test_cat_map(self):
        rep = analyze([[2, 1], [1, 1]])
        assert abs(rep.rho_plus - 1) < 1e-12 and abs(rep.rho_minus - 1) < 1e-12 and rep.r_p == 9

    @given(saddle_diag())
    def test_square_invariant(self, T):
        a, b = analyze(T), analyze(T @ T)
        assert math.isclose(a.rho_plus, b.rho_plus, rel_tol=1e-9)
        assert math.isclose(a.rho_minus, b.rho_minus, rel_tol=1e-9)

    @given(saddle_diag(), st.integers(0, 2 ** 32 - 1))
    def test_continuity(self, T, seed):
        E = np.random.default_rng(seed).uniform(-1e-6, 1e-6, T.shape)
        a, b = analyze(T), analyze(T + E)
        assert abs(a.rho_plus - b.rho_plus) <= 1e-4 and abs(a.rho_minus - b.rho_minus) <= 1e-4

    @given(saddle_diag())
    def test_budget_monotone(self, T):
        rep = analyze(T)
        vals = [rep.k_r[r] for r in sorted(rep.k_r)]
        assert all(x <= y for x, y in zip(vals, vals[1:]))
        assert all(rep.k_r_positive[r] <= rep.k_r[r] for r in rep.k_r)

    @given(saddle_diag())
    def test_r_p_and_margin(self, T):
        rep = analyze(T)
        x = 3 * (rep.rho_plus + rep.rho_minus + 1)
        assert rep.r_p == math.floor(x + 1e-9)
        assert 0 <= rep.r_p_margin <= 1 and rep.r_p >= 9

    @given(saddle_diag(), st.integers(0, 2 ** 32 - 1))
    def test_r_p_under_perturbation(self, T, seed):
        E = np.diag(np.random.default_rng(seed).uniform(-1e-6, 1e-6, len(T)))
        a, b = analyze(T), analyze(T + E)
        x = 3 * (b.rho_plus + b.rho_minus + 1) - 3 * (a.rho_plus + a.rho_minus + 1)
        if x < a.r_p_margin:
            assert a.r_p - 1 <= b.r_p <= a.r_p

    def test_eigenvalue_order(self):
        assert eigenvalues(np.diag([0.5, 4.0, -2.0])) == (4, -2, 0.5)


class TestResonance:
    def test_order_three_witness(self):
        free, witnesses = resonance_free(D2, 3)
        assert not free
        assert (2, (2, 1)) in witnesses and (0.5, (1, 2)) in witnesses

    def test_free_at_order_two(self):
        assert resonance_free(np.diag([3.0, 0.5]), 2).free

    def test_ball_size(self):
        for d in range(1, 4):
            for r in range(5):
                brute = sum(1 for l in product(range(-r, r + 1), repeat=d) if sum(map(abs, l)) <= r)
                assert l1_ball_size(d, r) == brute

    @given(st.lists(st.sampled_from([0.25, 0.5, 2.0, 3.0, 4.0, 1 / 3, 5.0]), min_size=2, max_size=3),
           st.integers(2, 4))
    def test_against_brute_force(self, diag, r):
        rep = resonance_free(np.diag(diag), r)
        ev = eigenvalues(np.diag(diag))
        assert set(rep.witnesses) == brute_witnesses(ev, r)
        assert rep.free == (not rep.witnesses)

    @given(st.lists(st.sampled_from([0.25, 0.5, 2.0, 3.0, 1 / 3, 1.7, 0.3]), min_size=2, max_size=3),
           st.integers(3, 6))
    def test_monotone_in_order(self, diag, r):
        if resonance_free(np.diag(diag), r).free:
            assert all(resonance_free(np.diag(diag), q).free for q in range(2, r))

    def test_order_one_rejected(self):
        with pytest.raises(PreconditionError):
            resonance_free(D2, 1)

    def test_resource_limits(self):
        with pytest.raises(ResourceError):
            resonance_free(np.diag([2.0] * 7), 2)
        with pytest.raises(ResourceError):
            resonance_free(np.diag([2.0, 3.0, 0.5, 0.2, 5.0, 0.3]), 60)


class TestMembership:
    def test_resonant_diag(self):
        rep = l_r_membership(D2, 30)
        assert rep.r_p == 9 and not rep.condition1 and rep.condition2 and not rep.member

    def test_order_too_small(self):
        rep = l_r_membership(D2, 27)
        assert not rep.condition2 and not rep.member

    def test_non_resonant_member(self):
        T = np.diag([math.e, 1 / math.pi])
        rep = l_r_membership(T, 100)
        assert rep.condition1 and rep.condition2 and rep.member

    def test_not_saddle(self):
        with pytest.raises(PreconditionError):
            l_r_membership(np.diag([2.0, 3.0]), 40)

    @given(saddle_diag(), st.integers(10, 60))
    def test_definition(self, T, r):
        rep = analyze(T)
        if rep.r_p > 14:
            return
        m = l_r_membership(T, r)
        assert m.member == (resonance_free(T, rep.r_p).free and 3 * rep.r_p < r)

import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import admissible_words, sfts
from symdyn.construction import (
    gluing_table,
    h_a,
    h_tilde,
    holonomy_decomposition_check,
    j0_of,
    sequence_avoids,
    verify_prop34,
)
from symdyn.errors import DomainError, InputError, PreconditionError
from symdyn.sequences import EventuallyPeriodicSequence as Seq, is_admissible_sequence, splice
from symdyn.sft import from_pairs, full_shift, is_admissible
from symdyn.spectra import indicator, locally_constant, lyndon_cycles

A = (2, 2, 2, 2, 1, 2, 2, 2, 2)
ONES = Seq((1,))


def h_a_oracle(theta, a, e, f, i):
    n = len(a) // 2
    if i <= -n - len(e) - 1:
        return theta.symbol_at(i + n + len(e) + 1)
    if i <= n + len(f):
        return (e + a + f)[i + n + len(e)]
    return theta.symbol_at(i - n - len(f))


class TestHa:
    def test_full_shift(self, full2):
        h = h_a(full2, gluing_table(full2), (2, 2, 1), ONES)
        assert h.window(-4, 4) == (1, 1, 1, 2, 2, 1, 1, 1, 1)

    def test_golden_connectors(self, golden):
        theta = Seq.periodic((0, 1))
        a = (1, 0, 1)
        h = h_a(golden, gluing_table(golden), a, theta)
        # theta0=0 glues straight to 1; a ends in 1 and theta1=1 so a 0 is inserted
        assert h.window(-3, 4) == (1, 0, 1, 0, 1, 0, 1, 0)
        assert all(h.symbol_at(i) == h_a_oracle(theta, a, (), (0,), i) for i in range(-30, 30))
        assert is_admissible_sequence(golden, h)

    @given(st.data())
    def test_pointwise(self, data):
        s = data.draw(sfts(min_size=2, max_size=4, mixing=True))
        assume(s.essential.all())
        table = gluing_table(s)
        n = data.draw(st.integers(0, 3))
        a = data.draw(admissible_words(s, 2 * n + 1, 2 * n + 1))
        cyc = data.draw(st.sampled_from([w for L in (1, 2, 3) for w in lyndon_cycles(s, L)]))
        theta = Seq.periodic(cyc, data.draw(st.integers(-3, 3)))
        h = h_a(s, table, a, theta)
        e = table[theta.symbol_at(0), a[0]]
        f = table[a[-1], theta.symbol_at(1)]
        assert all(h.symbol_at(i) == h_a_oracle(theta, a, e, f, i) for i in range(-25, 26))
        assert h.window(-n, n) == a
        assert is_admissible_sequence(s, h)

    def test_even_length(self, full2):
        with pytest.raises(InputError):
            h_a(full2, gluing_table(full2), (1, 2), ONES)


class TestHolonomy:
    def setup_method(self):
        self.s = full_shift((1, 2, 3))
        self.xi = Seq((3,), (1, 2), (3,), 0)
        self.theta = Seq((2,), (1, 2), (3,), 0)

    def test_identity_needs_extra_step(self):
        chk = holonomy_decomposition_check(self.s, gluing_table(self.s), (2, 3, 1), (1, 2), self.xi, self.theta)
        assert chk.passed and chk.holonomy_defined
        assert chk.k == chk.k_stated + 1 and not chk.passed_stated

    def test_nontrivial_connectors(self):
        s = from_pairs((0, 1, 2), [(0, 1), (1, 2), (2, 0), (2, 2), (1, 1)])
        table = gluing_table(s)
        xi = Seq((2,), (0, 1), (1,), 0)
        theta = Seq((0, 1, 1, 2), (0, 1), (1,), 0)
        assert is_admissible_sequence(s, xi) and is_admissible_sequence(s, theta)
        chk = holonomy_decomposition_check(s, table, (2, 2, 0), (0, 1), xi, theta)
        assert chk.passed and not chk.passed_stated

    def test_longer_connector_breaks_identity(self):
        table = gluing_table(self.s).replace((1, 2), (3,))
        chk = holonomy_decomposition_check(self.s, table, (2, 3, 1), (1, 2), self.xi, self.theta)
        assert not chk.passed and chk.first_mismatch is not None

    def test_domain_checks(self):
        t = gluing_table(self.s)
        with pytest.raises(DomainError):
            holonomy_decomposition_check(self.s, t, (2, 3, 1), (1, 3), self.xi, self.theta)
        with pytest.raises(DomainError):
            holonomy_decomposition_check(self.s, t, (2, 3, 1), (1, 2), self.xi, Seq((2,), (1, 2), (1,), 0))


class TestBlockSequence:
    def test_layout_tiles(self, full2):
        H, lay = h_tilde(full2, gluing_table(full2), A, ONES, horizon=50)
        assert lay.tiles(50)
        assert all(H.window(lay.l_of(k) - 4, lay.l_of(k) + 4) == A for k in range(51))

    def test_middle_independent_of_k(self, full2):
        _, lay = h_tilde(full2, gluing_table(full2), A, ONES, horizon=20)
        assert lay.middle_of(5) == lay.middle_of(15) == lay.middle

    def test_long_prefix_admissible(self):
        s = from_pairs((0, 1, 2), [(0, 1), (1, 2), (2, 0), (2, 2), (1, 1), (0, 0)])
        table = gluing_table(s)
        a = (0,) * 6 + (1,) + (2,) * 6
        assert is_admissible(s, a)
        theta = Seq.periodic((0, 1, 2))
        H, lay = h_tilde(s, table, a, theta, horizon=30)
        assert is_admissible(s, H.window(-5000, 5000))

    def test_theta_with_factor_rejected(self, full2):
        with pytest.raises(PreconditionError):
            h_tilde(full2, gluing_table(full2), A, Seq((2,)))

    def test_short_word_rejected(self, full2):
        with pytest.raises(PreconditionError):
            h_tilde(full2, gluing_table(full2), (2, 1, 2), ONES)

    def test_sequence_avoids(self):
        ok, where = sequence_avoids(Seq((1,), (2, 2), (1,), 5), [(2, 2)])
        assert not ok and where == 5
        assert sequence_avoids(ONES, [(2,)]) == (True, None)


class TestLimsup:
    def test_passes(self, full2):
        p = indicator(full2, -4, A)
        rep = verify_prop34(full2, gluing_table(full2), A, p, ONES, k_max=50)
        assert rep.passed and rep.limsup == 1 and rep.j0 == 0
        assert all(row["in_middle"] for row in rep.per_k)

    def test_stabilization(self, full2):
        p = indicator(full2, -4, A)
        rep = verify_prop34(full2, gluing_table(full2), A, p, ONES, k_max=40)
        assert rep.stabilized
        assert all(row["matches_limit"] for row in rep.per_k if row["k"] >= rep.threshold)

    def test_no_gap(self, full2):
        with pytest.raises(PreconditionError):
            verify_prop34(full2, gluing_table(full2), A, locally_constant(0, {}, 1), ONES)

    def test_k_max_too_small(self, full2):
        with pytest.raises(InputError):
            verify_prop34(full2, gluing_table(full2), A, indicator(full2, -4, A), ONES, k_max=16)

    def test_graded_potential(self):
        s = full_shift((1, 2, 3))
        a = (3, 3, 3, 2, 1, 2, 3, 3, 3)
        rng = random.Random(4)
        table = {tuple(rng.choice((1, 2, 3)) for _ in range(9)): rng.randint(0, 9) for _ in range(3000)}
        table[a] = 10
        p = locally_constant(4, table, 0)
        theta = Seq.periodic((1, 1, 2))
        rep = verify_prop34(s, gluing_table(s), a, p, theta, k_max=45)
        assert rep.passed and rep.limsup == 10

    def test_j0_depends_on_certificate_window(self, full2):
        p = indicator(full2, -4, A)
        table = gluing_table(full2)
        rng = random.Random(8)
        lo, hi = verify_prop34(full2, table, A, p, ONES).certificate_window
        assert (lo, hi) == (-7, 8)
        for _ in range(50):
            base = Seq(tuple(rng.choice((1, 2)) for _ in range(3)), tuple(rng.choice((1, 2)) for _ in range(12)),
                       tuple(rng.choice((1, 2)) for _ in range(3)), -6)
            other = Seq(tuple(rng.choice((1, 2)) for _ in range(2)), (), tuple(rng.choice((1, 2)) for _ in range(2)))
            mixed = splice(splice(other, lo, base), hi + 1, other)
            assert mixed.window(lo, hi) == base.window(lo, hi)
            assert j0_of(full2, table, A, p, base) == j0_of(full2, table, A, p, mixed)

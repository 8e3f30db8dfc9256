import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf, sqrt

from conftest import sequences
from symdyn import cf
from symdyn.errors import DomainError, InputError, PreconditionError
from symdyn.sequences import EventuallyPeriodicSequence as Seq, shift
from symdyn.sft import from_pairs, full_shift, is_admissible
from symdyn.spectra import (
    cf_product,
    cf_sum,
    check_sdh2,
    enumerate_spectrum,
    indicator,
    lagrange_value,
    locally_constant,
    lyndon_cycles,
    markov_value,
    max_gluing_length,
)

with cf.precision(300):
    SQRT5 = sqrt(5)
    PHI = (1 + SQRT5) / 2
    SILVER = 1 + sqrt(2)
    MARKOV_FIVE = sqrt(221) / 5


@pytest.fixture(autouse=True)
def wide_precision():
    # comparisons below happen at 300 bits so rounding does not hide a miss
    with cf.precision(300):
        yield


def trunc(digits):
    return cf.truncated_value(list(digits), 256)


def cf_sum_oracle(fwd, bwd, terms=10_000):
    """Deep-truncation value of [fwd...] + [0; bwd...] from infinite digit generators."""
    f = [next(fwd) for _ in range(terms)]
    b = [next(bwd) for _ in range(terms)]
    return trunc(f) + 1 / trunc(b)


def cycle(word):
    while True:
        yield from word


class TestEvaluate:
    def test_all_ones(self):
        e = cf_sum().evaluate(Seq((1,)))
        assert e.contains(SQRT5) and e.width < mpf(10) ** -35

    def test_all_twos(self):
        e = cf_sum().evaluate(Seq((2,)))
        assert e.contains(2 * SILVER - 2)

    def test_indicator_on_cylinder(self, full01):
        p = indicator(full01, 0, (0, 1))
        assert p.evaluate(Seq((1,), (0, 1), (1,), 0)).exact == 1
        assert p.evaluate(Seq((1,), (1, 1), (1,), 0)).exact == 0

    def test_dirichlet_product(self):
        with cf.precision(300):
            assert cf_product().evaluate(Seq((1,))).contains(PHI * PHI)
            assert cf_product().evaluate(Seq((2,))).contains(SILVER * SILVER)

    def test_nonpositive_digit(self):
        with pytest.raises(DomainError):
            cf_sum().evaluate(Seq((1,), (0,), (1,), 0))

    def test_table_word_length(self):
        with pytest.raises(InputError):
            locally_constant(1, {(0, 1): 1})


class TestMarkovValue:
    def test_constant_orbit(self):
        assert markov_value(cf_sum(), Seq((1,))).contains(SQRT5)

    def test_single_two(self):
        seq = Seq((1,), (2,), (1,), 0)
        v = markov_value(cf_sum(), seq)
        oracle = cf_sum_oracle(iter([2] + [1] * 10_000), cycle((1,)))
        assert abs(oracle - (1 + SQRT5)) < mpf(10) ** -30
        assert v.contains(1 + SQRT5) and v.width < mpf(10) ** -25

    def test_indicator_visited_once(self, full01):
        a = (1, 0, 0, 1, 1)
        p = indicator(full01, -2, a)
        seq = Seq((0,), (1, 0, 0, 1, 1), (0,), -2)
        assert markov_value(p, seq).exact == 1
        assert lagrange_value(p, seq).exact == 0

    def test_tolerance_unreachable(self):
        with pytest.raises(PreconditionError):
            markov_value(cf_sum(), Seq((1,), (2,), (1,), 0), tol=0)

    @given(sequences(), st.integers(-10, 10))
    def test_shift_invariant(self, seq, j):
        a = markov_value(cf_sum(), seq)
        b = markov_value(cf_sum(), shift(seq, j))
        assert (a.lo, a.hi) == (b.lo, b.hi)

    @given(sequences())
    def test_lagrange_below_markov(self, seq):
        assert lagrange_value(cf_sum(), seq).lo <= markov_value(cf_sum(), seq).hi


class TestLagrangeValue:
    def test_right_tail_ones(self):
        assert lagrange_value(cf_sum(), Seq((2,), (2, 1, 2), (1,), 3)).contains(SQRT5)

    def test_right_tail_one_two(self):
        v = lagrange_value(cf_sum(), Seq((2,), (2, 2), (1, 2), 0))
        a = cf_sum_oracle(cycle((1, 2)), cycle((2, 1)), 2000)
        b = cf_sum_oracle(cycle((2, 1)), cycle((1, 2)), 2000)
        assert v.contains(max(a, b)) or abs(v.mid - max(a, b)) < mpf(10) ** -30

    def test_locally_constant_support_missed(self, full01):
        p = indicator(full01, 0, (1, 1), value=5, default=Fraction(1, 2))
        assert lagrange_value(p, Seq((1,), (1, 1), (0,), 0)).exact == Fraction(1, 2)


class TestVariationBound:
    @pytest.mark.parametrize("pot", [cf_sum(), cf_product(digit_cap=9)], ids=["sum", "product"])
    def test_random_pairs(self, pot):
        rng = random.Random(11)
        digits = lambda k: tuple(rng.randint(1, 9) for _ in range(k))
        for _ in range(1000):
            n = rng.randint(0, 30)
            w = digits(2 * n + 1)
            seqs = []
            for _ in range(2):
                left, right = digits(rng.randint(1, 3)), digits(rng.randint(1, 3))
                cl, cr = digits(rng.randint(0, 3)), digits(rng.randint(0, 3))
                seqs.append(Seq(left, cl + w + cr, right, -n - len(cl)))
            x, y = (pot.evaluate(s) for s in seqs)
            bound = pot.var_bound(n)
            if bound == float("inf"):
                continue
            diff = max(x.hi - y.lo, y.hi - x.lo)
            assert diff <= mpf(bound.numerator) / bound.denominator + mpf(10) ** -30

    def test_monotone_to_zero(self):
        vals = [cf_sum().var_bound(n) for n in range(40)]
        assert all(a >= b for a, b in zip(vals, vals[1:])) and vals[-1] < Fraction(1, 10 ** 15)

    def test_locally_constant(self):
        p = locally_constant(1, {(1, 2, 1): 3}, default=1)
        assert p.var_bound(0) == 2 and p.var_bound(1) == 0


def mobius(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def lyndon_count(k, n):
    return sum(mobius(d) * k ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


def brute_cycles(sft, n):
    out = set()
    for w in product(sft.alphabet, repeat=n):
        cyc = w + w[:1]
        if not is_admissible(sft, cyc):
            continue
        rots = [w[i:] + w[:i] for i in range(n)]
        if len(set(rots)) == n:
            out.add(min(rots, key=lambda r: [sft.index(x) for x in r]))
    return out


class TestEnumeration:
    @pytest.mark.parametrize("k,n", [(2, 6), (3, 4), (2, 10)])
    def test_necklace_counts(self, k, n):
        assert len(lyndon_cycles(full_shift(k), n)) == lyndon_count(k, n)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_against_brute_force(self, golden, n):
        assert set(lyndon_cycles(golden, n)) == brute_cycles(golden, n)

    def test_cycle_sft(self):
        s = from_pairs((0, 1, 2), [(0, 1), (1, 2), (2, 0)])
        assert lyndon_cycles(s, 3) == [(0, 1, 2)] and lyndon_cycles(s, 2) == []

    def test_fixed_points(self, full2):
        vals = enumerate_spectrum(full2, cf_sum(), 1).values()
        assert len(vals) == 2
        assert vals[0].contains(SQRT5) and vals[1].contains(2 * SILVER - 2)

    def test_markov_number_five(self, full2):
        sample = enumerate_spectrum(full2, cf_sum(), 4)
        target = MARKOV_FIVE
        hits = [o for o, e in sample.entries if e.contains(target)]
        assert hits == [(1, 1, 2, 2)]

    def test_golden_zero_potential(self, golden):
        vals = enumerate_spectrum(golden, locally_constant(0, {}, 0), 5).values()
        assert len(vals) == 1 and vals[0].exact == 0

    def test_not_transitive(self):
        s = from_pairs((0, 1), [(0, 0), (1, 1)])
        with pytest.raises(PreconditionError):
            enumerate_spectrum(s, locally_constant(0, {}, 0), 2)

    @pytest.mark.parametrize("P", [2, 4, 6])
    def test_monotone_in_period(self, full2, P):
        small = enumerate_spectrum(full2, cf_sum(), P).values()
        big = enumerate_spectrum(full2, cf_sum(), P + 1).values()
        for v in small:
            assert any(v.overlaps(w, 1e-12) for w in big)

    def test_threads_do_not_change_result(self, full2):
        a = enumerate_spectrum(full2, cf_sum(), 6)
        b = enumerate_spectrum(full2, cf_sum(), 6, threads=3)
        assert [(o, e.lo, e.hi) for o, e in a.entries] == [(o, e.lo, e.hi) for o, e in b.entries]

    def test_surd_against_truncation(self, full2):
        for L in range(1, 7):
            for w in lyndon_cycles(full2, L):
                v = markov_value(cf_sum(), Seq.periodic(w))
                best = max(
                    cf_sum_oracle(cycle(w[j:] + w[:j]), cycle(tuple(reversed(w[:j])) + tuple(reversed(w[j:]))), 1000)
                    for j in range(L)
                )
                assert abs(v.mid - best) < mpf(10) ** -20 and v.lo <= best + mpf(10) ** -20


class TestSdh2:
    def test_indicator_gap(self, full01):
        a = (0, 1, 1, 1, 0)
        rep = check_sdh2(full01, indicator(full01, -2, a), a)
        assert (rep.sup_off, rep.inf_on, rep.holds, rep.side_condition) == (0, 1, True, True)

    def test_constant_potential_has_no_gap(self, full01):
        a = (0, 1, 1, 1, 0)
        assert not check_sdh2(full01, locally_constant(0, {}, 1), a).holds

    def test_golden_side_condition(self, golden):
        assert max_gluing_length(golden) == 1
        a4 = (0, 1, 0, 0, 0, 0, 0, 1, 0)
        a5 = (0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0)
        assert not check_sdh2(golden, indicator(golden, -4, a4), a4).side_condition
        assert check_sdh2(golden, indicator(golden, -5, a5), a5).side_condition

    def test_radius_too_large(self, full01):
        p = locally_constant(3, {}, 0)
        with pytest.raises(PreconditionError):
            check_sdh2(full01, p, (0, 1, 0))

    def test_fixed_point_word(self, full01):
        a = (1, 1, 1)
        assert not check_sdh2(full01, indicator(full01, -1, a), a).fixed_point_avoided

    def test_brute_force_sides(self, golden):
        rng = random.Random(2)
        a = (0, 1, 0, 0, 1)
        words = [w for w in product((0, 1), repeat=5) if is_admissible(golden, w)]
        table = {w: Fraction(rng.randint(0, 5)) for w in product((0, 1), repeat=3) if is_admissible(golden, w)}
        p = locally_constant(1, table, 0)
        rep = check_sdh2(golden, p, a)
        off = [p.window_value(w[1:4]) for w in words if w != a]
        assert rep.sup_off == max(off) and rep.inf_on == p.window_value(a[1:4])

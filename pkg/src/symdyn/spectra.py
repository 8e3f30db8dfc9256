"""Potentials on sequences, Markov and Lagrange values, and periodic-orbit spectrum samples."""
import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from mpmath import iv, mp, mpf

from . import cf
from .errors import DomainError, InputError, PreconditionError
from .sequences import EventuallyPeriodicSequence, shift
from .sft import Sft, count_words, enumerate_words, is_admissible, is_transitive, shortest_gluing_word

MARGIN_CAP = 10_000


@dataclass(frozen=True)
class ValueEnclosure:
    """``lo <= value <= hi``; ``exact`` is set when the value is a known rational."""

    lo: mpf
    hi: mpf
    exact: Fraction = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def point(cls, value, **meta):
        value = Fraction(value)
        x = mpf(value.numerator) / value.denominator
        return cls(x, x, value, meta)

    @classmethod
    def from_interval(cls, x, **meta):
        lo, hi = cf.endpoints(x)
        return cls(lo, hi, None, meta)

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other, tol=0) -> bool:
        return self.lo <= other.hi + tol and other.lo <= self.hi + tol

    def __repr__(self):
        if self.exact is not None:
            return f"ValueEnclosure(exact={self.exact})"
        return f"ValueEnclosure([{mp.nstr(self.lo, 25)}, {mp.nstr(self.hi, 25)}])"


def _fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# -- digit streams -----------------------------------------------------------

def forward_digits(seq, start):
    """``(prefix, period)`` with ``seq[start], seq[start+1], ... = prefix + period**inf``."""
    if start >= seq.core_end:
        R = len(seq.right_period)
        k = (start - seq.core_end) % R
        return (), seq.right_period[k:] + seq.right_period[:k]
    return seq.window(start, seq.core_end - 1), seq.right_period


def backward_digits(seq, start):
    """``(prefix, period)`` with ``seq[start], seq[start-1], ... = prefix + period**inf``."""
    L = len(seq.left_period)
    rev = lambda s: tuple(seq.left_period[(s - seq.origin - t) % L] for t in range(L))
    if start < seq.origin:
        return (), rev(start)
    prefix = tuple(seq.symbol_at(i) for i in range(start, seq.origin - 1, -1))
    return prefix, rev(seq.origin - 1)


@lru_cache(maxsize=1 << 16)
def _ep(prefix, period):
    return cf.eventually_periodic(prefix, period)


# -- potentials --------------------------------------------------------------

class Potential:
    """A real function on sequences with a certified oscillation bound on centered cylinders.

    kinds: ``locally_constant`` (depends on indices ``-radius..radius`` through
    ``table`` with a fallback ``default``), ``cf_sum`` and ``cf_product``.
    """

    KINDS = ("locally_constant", "cf_sum", "cf_product")

    def __init__(self, kind, radius=None, table=None, default=0, digit_cap=None):
        if kind not in self.KINDS:
            raise InputError(f"unknown potential kind {kind!r}")
        self.kind = kind
        self.digit_cap = digit_cap
        if kind == "locally_constant":
            if radius is None or radius < 0:
                raise InputError("locally constant potential needs radius >= 0")
            self.radius = int(radius)
            table = dict(table or {})
            self.table = {}
            for w, v in table.items():
                w = tuple(w)
                if len(w) != 2 * self.radius + 1:
                    raise InputError(f"table word {w!r} has length {len(w)}, expected {2 * self.radius + 1}")
                self.table[w] = Fraction(v)
            self.default = Fraction(default)
        else:
            self.radius = None
            self.table = None
            self.default = None

    def __repr__(self):
        if self.kind == "locally_constant":
            return f"Potential(locally_constant, radius={self.radius}, entries={len(self.table)})"
        return f"Potential({self.kind})"

    @property
    def is_locally_constant(self):
        return self.kind == "locally_constant"

    def values(self):
        return set(self.table.values()) | {self.default}

    def window_value(self, window) -> Fraction:
        return self.table.get(tuple(window), self.default)

    def var_bound(self, n, digit_cap=None):
        """Bound on ``|p(x) - p(y)|`` when ``x, y`` agree on indices ``-n..n``."""
        if n < 0:
            raise InputError("n must be >= 0")
        if self.kind == "locally_constant":
            if n >= self.radius:
                return Fraction(0)
            vals = self.values()
            return max(vals) - min(vals)
        if self.kind == "cf_sum":
            return Fraction(2, _fib(n + 1) * _fib(n + 2))
        cap = digit_cap if digit_cap is not None else self.digit_cap
        if cap is None:
            raise InputError("cf_product variation bound needs a digit cap")
        if n == 0:
            return float("inf")
        return (cap + 1) * (Fraction(1, _fib(n + 1) * _fib(n + 2)) + Fraction(1, _fib(n) * _fib(n + 1)))

    # exact / enclosed evaluation at the origin
    def _interval(self, seq, j):
        """mpmath interval for the value at ``shift(seq, j)``, computed in the current precision."""
        fwd = _ep(*forward_digits(seq, j))
        bwd = _ep(*backward_digits(seq, j - 1))
        if self.kind == "cf_sum":
            return fwd.interval() + 1 / bwd.interval()
        return fwd.interval() * bwd.interval()

    def _exact(self, seq, j):
        r = self.radius
        return self.window_value(seq.window(j - r, j + r))

    def _check(self, seq):
        if self.kind != "locally_constant":
            cf.check_digits(seq.symbols())

    def evaluate(self, seq, prec=cf.DEFAULT_PRECISION) -> ValueEnclosure:
        return self.evaluate_at(seq, 0, prec)

    def evaluate_at(self, seq, j, prec=cf.DEFAULT_PRECISION) -> ValueEnclosure:
        """Value of the potential at ``shift(seq, j)``."""
        self._check(seq)
        with cf.precision(prec):
            if self.kind == "locally_constant":
                return ValueEnclosure.point(self._exact(seq, j))
            return ValueEnclosure.from_interval(self._interval(seq, j), prec=prec)


def locally_constant(radius, table, default=0) -> Potential:
    return Potential("locally_constant", radius, table, default)


def cf_sum() -> Potential:
    """``[x0; x1, x2, ...] + [0; x-1, x-2, ...]``."""
    return Potential("cf_sum")


def cf_product(digit_cap=None) -> Potential:
    """``[x0; x1, x2, ...] * [x-1; x-2, x-3, ...]``."""
    return Potential("cf_product", digit_cap=digit_cap)


def indicator(sft: Sft, start: int, word, value=1, default=0) -> Potential:
    """``value`` on the cylinder ``C_start(word)`` and ``default`` elsewhere."""
    word = tuple(word)
    r = max(-start, start + len(word) - 1, 0)
    lo = start + r  # position of word inside the (2r+1)-window
    table = {}
    if lo == 0 and len(word) == 2 * r + 1:
        table[word] = value
    else:
        for w in enumerate_words(sft, 2 * r + 1):
            if w[lo:lo + len(word)] == word:
                table[w] = value
    return locally_constant(r, table, default)


# -- Markov and Lagrange values ---------------------------------------------

def _orbit_positions(seq):
    """Positions covering one full period of a purely periodic sequence."""
    p = len(seq.right_period)
    return range(seq.origin, seq.origin + p)


def _max_enclosure(encs):
    lo = max(e.lo for e in encs)
    hi = max(e.hi for e in encs)
    exact = None
    if all(e.exact is not None for e in encs):
        exact = max(e.exact for e in encs)
    return lo, hi, exact


def _periodic_max(p, word, prec):
    seq = EventuallyPeriodicSequence.periodic(word)
    return _max_enclosure([p.evaluate_at(seq, j, prec) for j in _orbit_positions(seq)])


def markov_value(p: Potential, seq, tol=1e-30, prec=cf.DEFAULT_PRECISION) -> ValueEnclosure:
    """``sup_j p(shift(seq, j))``.

    The sup is taken exactly over a window tied to the sequence's structure
    (so the answer is shift invariant), and the two periodic tails are handled
    by their orbit maxima plus the variation bound at the window margin.
    """
    p._check(seq)
    with cf.precision(prec):
        if seq.is_periodic:
            lo, hi, exact = _periodic_max(p, seq.right_period, prec)
            return ValueEnclosure(lo, hi, exact, {"periodic": True, "prec": prec})
        tails = [_periodic_max(p, seq.left_period, prec), _periodic_max(p, seq.right_period, prec)]
        t_lo = max(t[0] for t in tails)
        t_hi = max(t[1] for t in tails)
        if p.is_locally_constant:
            margin = p.radius
            var = Fraction(0)
        else:
            digit_cap = max(seq.symbols())
            margin = next(
                (n for n in range(1, MARGIN_CAP + 1) if p.var_bound(n, digit_cap) < Fraction(tol) / 2),
                None,
            )
            if margin is None:
                raise PreconditionError(f"tolerance {tol} unreachable within margin {MARGIN_CAP}; raise the tolerance")
            var = p.var_bound(margin, digit_cap)
        lo_j = seq.origin - len(seq.left_period) - margin
        hi_j = seq.core_end + len(seq.right_period) + margin
        w_lo, w_hi, w_exact = _max_enclosure([p.evaluate_at(seq, j, prec) for j in range(lo_j, hi_j + 1)])
        meta = {"window": (lo_j, hi_j), "margin": margin, "var_bound": var, "prec": prec}
        if p.is_locally_constant:
            value = max(w_exact, max(t[2] for t in tails))
            return ValueEnclosure.point(value, **meta)
        var_mp = mpf(var.numerator) / var.denominator
        lo = max(w_lo, t_lo)
        hi = max(w_hi, t_hi + var_mp)
        return ValueEnclosure(lo, hi, None, meta)


def lagrange_value(p: Potential, seq, prec=cf.DEFAULT_PRECISION) -> ValueEnclosure:
    """``limsup_{j -> +inf} p(shift(seq, j))``: the maximum over the right tail's periodic orbit."""
    p._check(seq)
    with cf.precision(prec):
        lo, hi, exact = _periodic_max(p, seq.right_period, prec)
    return ValueEnclosure(lo, hi, exact, {"orbit": seq.right_period, "prec": prec})


# -- periodic orbit enumeration ---------------------------------------------

def lyndon_cycles(sft: Sft, length: int):
    """Primitive cycles of the transition graph of exactly ``length``, as least rotations.

    Lyndon words over the canonical symbol order, pruned on non-admissible
    prefixes, kept when the wrap-around pair is admissible too.
    """
    t = sft.transitions
    k = sft.size
    a = [0] * (length + 1)
    out = []

    def gen(pos, per):
        if pos > length:
            if per == length and t[a[length], a[1]]:
                out.append(tuple(sft.alphabet[i] for i in a[1:]))
            return
        start = a[pos - per] if pos > 1 else 0
        for j in range(start, k):
            if pos > 1 and not t[a[pos - 1], j]:
                continue
            a[pos] = j
            gen(pos + 1, per if j == a[pos - per] and pos > 1 else pos)

    gen(1, 1)
    return out


@dataclass(frozen=True)
class SpectrumSample:
    entries: tuple  # (orbit, ValueEnclosure), sorted by midpoint
    dedup_tol: float = 1e-12

    def distinct(self):
        """Merged values: list of ``(representative_orbit, ValueEnclosure)``; overlapping enclosures merge."""
        groups = []
        for orbit, enc in self.entries:
            if groups and groups[-1][1].overlaps(enc, self.dedup_tol):
                rep, g = groups[-1]
                groups[-1] = (rep, ValueEnclosure(min(g.lo, enc.lo), max(g.hi, enc.hi), g.exact if g.exact == enc.exact else None))
            else:
                groups.append((orbit, enc))
        return groups

    def values(self):
        return [enc for _, enc in self.distinct()]


def _orbit_value(p, prec, w):
    return markov_value(p, EventuallyPeriodicSequence.periodic(w), prec=prec)


def enumerate_spectrum(sft: Sft, p: Potential, max_period: int, dedup_tol=1e-12,
                       prec=cf.DEFAULT_PRECISION, threads=1) -> SpectrumSample:
    """Markov values of all periodic orbits of period ``<= max_period``."""
    if max_period < 1:
        raise InputError("max_period must be >= 1")
    if not is_transitive(sft):
        raise PreconditionError("enumerate_spectrum expects a transitive SFT")
    orbits = [w for L in range(1, max_period + 1) for w in lyndon_cycles(sft, L)]

    value = functools.partial(_orbit_value, p, prec)
    if threads and threads > 1:
        # mpmath precision is process-global, so workers are processes rather than threads
        with ProcessPoolExecutor(threads) as ex:
            vals = list(ex.map(value, orbits, chunksize=max(1, len(orbits) // (4 * threads))))
    else:
        vals = [value(w) for w in orbits]
    entries = sorted(zip(orbits, vals), key=lambda e: (e[1].mid, len(e[0]), e[0]))
    return SpectrumSample(tuple(entries), dedup_tol)


# -- the gap hypothesis -------------------------------------------------------

@dataclass(frozen=True)
class Sdh2Report:
    sup_off: Fraction
    inf_on: Fraction
    holds: bool
    n: int
    max_gluing: int
    side_condition: bool
    fixed_point_avoided: bool

    @property
    def all_hold(self):
        return self.holds and self.side_condition and self.fixed_point_avoided


def _essential_sft(sft):
    import numpy as np

    idx = np.flatnonzero(sft.essential)
    return Sft([sft.alphabet[i] for i in idx], sft.transitions[np.ix_(idx, idx)])


def max_gluing_length(sft: Sft) -> int:
    return max(len(shortest_gluing_word(sft, a, b)) for a in sft.alphabet for b in sft.alphabet)


def check_sdh2(sft: Sft, p: Potential, a, fixed_symbol=None) -> Sdh2Report:
    """Exact sup of ``p`` off ``C_{-n}(a)`` against its value on it, plus the side conditions.

    Only bi-infinitely extendable windows count, so the word counts run on the
    essential part. ``fixed_symbol=None`` checks ``a`` against every constant
    word of a fixed point.
    """
    a = tuple(a)
    if len(a) % 2 != 1:
        raise InputError("a must have odd length 2n+1")
    if not is_admissible(sft, a):
        raise InputError(f"a={a!r} is not admissible")
    if not p.is_locally_constant:
        raise PreconditionError("exact gap check needs a locally constant potential")
    n = len(a) // 2
    r = p.radius
    if r > n:
        raise PreconditionError(f"potential radius {r} exceeds n={n}; the gap cannot be certified exactly")
    ess = _essential_sft(sft)
    if any(s not in ess._index for s in a):
        raise PreconditionError("a uses inessential symbols")
    center = a[n - r:n + r + 1]
    inf_on = p.window_value(center)

    def extensions(w):
        # admissible (2n+1)-words in the essential part whose centre window is w
        if not all(s in ess._index for s in w) or not is_admissible(ess, w):
            return 0
        left = count_words(ess, n - r + 1, end=w[0])
        right = count_words(ess, n - r + 1, start=w[-1])
        return left * right

    off_values = []
    covered = 0
    for w, v in p.table.items():
        cnt = extensions(w)
        covered += cnt
        if cnt - (1 if w == center else 0) > 0:
            off_values.append(v)
    total = count_words(ess, 2 * n + 1)
    default_count = total - covered - (0 if center in p.table else 1)
    if default_count > 0:
        off_values.append(p.default)
    sup_off = max(off_values) if off_values else None
    holds = sup_off is None or sup_off < inf_on
    mg = max_gluing_length(sft)
    if fixed_symbol is None:
        fixed = [s for s in sft.alphabet if sft.allowed(s, s)]
    else:
        fixed = [fixed_symbol]
    avoided = all(a != (s,) * len(a) for s in fixed)
    return Sdh2Report(sup_off, inf_on, holds, n, mg, n > 3 * mg + 1, avoided)

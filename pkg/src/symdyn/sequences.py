"""Eventually periodic bi-infinite sequences, cylinders, brackets and holonomies.

A sequence is stored as ``(left_period, core, right_period, origin)``: the core
occupies indices ``origin .. origin+len(core)-1``, the right period repeats from
the end of the core towards +infinity and the left period repeats towards
-infinity ending at index ``origin-1``.  Sequences are normalized on
construction, so equality is structural.
"""
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import DomainError, InputError
from .sft import Sft, is_admissible


def _primitive_root(w: tuple) -> tuple:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


def _least_rotation(w: tuple) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm)."""
    s = w + w
    n = len(s)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        i = f[j - k - 1]
        while i != -1 and s[j] != s[k + i + 1]:
            if s[j] < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if i == -1 and s[j] != s[k + i + 1]:
            if s[j] < s[k + i + 1]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True, init=False)
class EventuallyPeriodicSequence:
    left_period: tuple
    core: tuple
    right_period: tuple
    origin: int

    def __init__(self, left_period, core=(), right_period=None, origin=0):
        left = tuple(left_period)
        right = tuple(left if right_period is None else right_period)
        core = tuple(core)
        if not left or not right:
            raise InputError("periods must be nonempty")
        left, core, right, origin = _normalize(left, core, right, int(origin))
        object.__setattr__(self, "left_period", left)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "right_period", right)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def periodic(cls, word, origin=0):
        """The purely periodic sequence with ``word`` starting at index ``origin``."""
        word = tuple(word)
        return cls(word, (), word, origin)

    @property
    def core_end(self) -> int:
        """First index of the right periodic tail."""
        return self.origin + len(self.core)

    @property
    def is_periodic(self) -> bool:
        return not self.core and self.left_period == self.right_period

    def symbol_at(self, i: int):
        if i < self.origin:
            return self.left_period[(i - self.origin) % len(self.left_period)]
        if i < self.core_end:
            return self.core[i - self.origin]
        return self.right_period[(i - self.core_end) % len(self.right_period)]

    def window(self, lo: int, hi: int) -> tuple:
        """Symbols at indices ``lo..hi`` inclusive."""
        return tuple(self.symbol_at(i) for i in range(lo, hi + 1))

    def __getitem__(self, i):
        if isinstance(i, slice):
            if i.start is None or i.stop is None:
                raise InputError("slices of a bi-infinite sequence need both ends")
            return self.window(i.start, i.stop - 1)
        return self.symbol_at(i)

    def span(self, margin=0):
        """Finite index range outside of which the sequence is purely periodic on each side."""
        return self.origin - len(self.left_period) - margin, self.core_end + len(self.right_period) + margin

    def symbols(self) -> set:
        return set(self.left_period) | set(self.core) | set(self.right_period)

    def __repr__(self):
        return (
            f"EventuallyPeriodicSequence(left={self.left_period!r}, core={self.core!r}, "
            f"right={self.right_period!r}, origin={self.origin})"
        )


def _normalize(left, core, right, origin):
    left = _primitive_root(left)
    right = _primitive_root(right)
    # absorb the core's tail into the right period
    while core and core[-1] == right[-1]:
        right = (core[-1],) + right[:-1]
        core = core[:-1]
    # absorb the core's head into the left period
    while core and core[0] == left[0]:
        left = left[1:] + (core[0],)
        core = core[1:]
        origin += 1
    if core:
        return left, core, right, origin
    # empty core: push the boundary right while the left pattern continues
    limit = _lcm(len(left), len(right)) + len(left) + len(right)
    steps = 0
    while right[0] == left[0]:
        left = left[1:] + (left[0],)
        right = right[1:] + (right[0],)
        origin += 1
        steps += 1
        if steps > limit:
            # purely periodic: canonical rotation, origin reduced mod period
            p = len(left)
            k = _least_rotation(left)
            word = left[k:] + left[:k]
            return word, (), word, (origin + k) % p
    return left, core, right, origin


def from_word_periodic(word, origin=0) -> EventuallyPeriodicSequence:
    return EventuallyPeriodicSequence.periodic(word, origin)


def splice(left_seq, cut: int, right_seq) -> EventuallyPeriodicSequence:
    """Sequence equal to ``left_seq`` on indices ``< cut`` and ``right_seq`` on ``>= cut``."""
    start = min(left_seq.origin, cut)
    end = max(right_seq.core_end, cut)
    L = len(left_seq.left_period)
    R = len(right_seq.right_period)
    left = left_seq.window(start - L, start - 1)
    core = tuple(
        left_seq.symbol_at(i) if i < cut else right_seq.symbol_at(i) for i in range(start, end)
    )
    right = right_seq.window(end, end + R - 1)
    return EventuallyPeriodicSequence(left, core, right, start)


def insert_word(seq, cut: int, word, offset: int, tail_shift: int = 0) -> EventuallyPeriodicSequence:
    """Sequence reading ``seq`` left of the insertion, then ``word``, then ``seq`` again.

    Result: indices ``< offset`` show ``seq[i - offset + cut]`` (so ``seq[cut-1]``
    sits at ``offset-1``), ``word`` occupies ``offset .. offset+len(word)-1`` and
    afterwards ``seq`` resumes at index ``cut + tail_shift``.
    """
    word = tuple(word)
    left_part = shift(seq, cut - offset)
    after = offset + len(word)
    right_part = shift(seq, cut + tail_shift - after)
    start = min(left_part.origin, offset)
    end = max(right_part.core_end, after)
    L = len(left_part.left_period)
    R = len(right_part.right_period)

    def sym(i):
        if i < offset:
            return left_part.symbol_at(i)
        if i < after:
            return word[i - offset]
        return right_part.symbol_at(i)

    left = tuple(left_part.symbol_at(i) for i in range(start - L, start))
    core = tuple(sym(i) for i in range(start, end))
    right = tuple(right_part.symbol_at(i) for i in range(end, end + R))
    return EventuallyPeriodicSequence(left, core, right, start)


def shift(seq: EventuallyPeriodicSequence, j: int) -> EventuallyPeriodicSequence:
    """``sigma**j``: the output at ``i`` is the input at ``i + j``."""
    return EventuallyPeriodicSequence(seq.left_period, seq.core, seq.right_period, seq.origin - j)


def is_admissible_sequence(sft: Sft, seq: EventuallyPeriodicSequence) -> bool:
    lo, hi = seq.span(margin=1)
    return is_admissible(sft, seq.window(lo, hi))


def first_disagreement(s, t, lo=None, hi=None):
    """First index in ``[lo, hi]`` (None = infinite) where ``s`` and ``t`` differ, or None.

    Infinite ends reduce to finite windows: beyond both spans each sequence is
    periodic, so one common period of agreement settles the whole half-line.
    """
    a0, a1 = s.span()
    b0, b1 = t.span()
    Lp = _lcm(len(s.left_period), len(t.left_period))
    Rp = _lcm(len(s.right_period), len(t.right_period))
    if lo is None:
        lo_eff = min(a0, b0, a1 if hi is None else hi) - Lp
    else:
        lo_eff = lo
    if hi is None:
        hi_eff = max(a1, b1, b0 if lo is None else lo) + Rp
    else:
        hi_eff = hi
    for i in range(lo_eff, hi_eff + 1):
        if s.symbol_at(i) != t.symbol_at(i):
            return i
    return None


def agree(s, t, lo=None, hi=None) -> bool:
    return first_disagreement(s, t, lo, hi) is None


@dataclass(frozen=True)
class Cylinder:
    """``C_start(word) = {theta : theta[start + i] == word[i]}``."""

    start: int
    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        if not self.word:
            raise InputError("cylinder word must be nonempty")

    def __contains__(self, seq) -> bool:
        return seq.window(self.start, self.start + len(self.word) - 1) == self.word

    @classmethod
    def centered(cls, word):
        """``C_{-n}(a)`` for a word of odd length ``2n+1``."""
        word = tuple(word)
        if len(word) % 2 != 1:
            raise InputError("centered cylinder needs an odd-length word")
        return cls(-(len(word) // 2), word)


def bracket(zeta: EventuallyPeriodicSequence, theta: EventuallyPeriodicSequence):
    """``[zeta, theta]``: the past (indices <= 0) of ``theta`` and the future of ``zeta``."""
    if zeta.symbol_at(0) != theta.symbol_at(0):
        raise DomainError(
            f"bracket needs equal zeroth symbols, got {zeta.symbol_at(0)!r} and {theta.symbol_at(0)!r}"
        )
    return splice(theta, 1, zeta)


def in_local_stable(xi, theta) -> bool:
    """``xi`` in W^s_loc(theta): same symbols at all indices >= 0."""
    return agree(xi, theta, 0, None)


def in_local_unstable(zeta, theta) -> bool:
    """``zeta`` in W^u_loc(theta): same symbols at all indices <= 0."""
    return agree(zeta, theta, None, 0)


def unstable_holonomy(theta, zeta, xi):
    """``h^u_{theta, zeta}(xi) = [zeta, xi]`` for ``zeta`` in W^u_loc(theta), ``xi`` in W^s_loc(theta)."""
    bad = first_disagreement(zeta, theta, None, 0)
    if bad is not None:
        raise DomainError(f"zeta is not in W^u_loc(theta): differs at index {bad}")
    bad = first_disagreement(xi, theta, 0, None)
    if bad is not None:
        raise DomainError(f"xi is not in W^s_loc(theta): differs at index {bad}")
    return bracket(zeta, xi)


def parse_word(seq: Sequence) -> tuple:
    return tuple(seq)

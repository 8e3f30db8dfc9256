"""Subshifts of finite type given by a 0/1 transition matrix.

Words are plain tuples of alphabet symbols. Symbols are opaque hashable
values; their canonical order is the order in which the alphabet is given.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import _graph
from .errors import InputError, PreconditionError

Symbol = Hashable
Word = tuple


class Sft:
    """Alphabet plus transition matrix ``B`` with ``B[a, b]`` true iff ``(a, b)`` is admissible."""

    def __init__(self, alphabet: Iterable[Symbol], transitions):
        alphabet = tuple(alphabet)
        mat = np.array(transitions, dtype=bool)
        if len(set(alphabet)) != len(alphabet):
            raise InputError("alphabet contains repeated symbols")
        if mat.shape != (len(alphabet), len(alphabet)):
            raise InputError(
                f"transition matrix has shape {mat.shape}, expected {(len(alphabet),) * 2}"
            )
        mat.setflags(write=False)
        self.alphabet = alphabet
        self.transitions = mat
        self._index = {s: i for i, s in enumerate(alphabet)}

    # -- basic access -------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.alphabet)

    def index(self, symbol) -> int:
        try:
            return self._index[symbol]
        except (KeyError, TypeError):
            raise InputError(f"unknown symbol {symbol!r}") from None

    def indices(self, word: Sequence[Symbol]) -> np.ndarray:
        return np.fromiter((self.index(s) for s in word), dtype=np.int64, count=len(word))

    def allowed(self, a, b) -> bool:
        return bool(self.transitions[self.index(a), self.index(b)])

    def successors(self, symbol) -> tuple:
        row = self.transitions[self.index(symbol)]
        return tuple(self.alphabet[j] for j in np.flatnonzero(row))

    @cached_property
    def essential(self) -> np.ndarray:
        """Boolean mask of symbols admitting a bi-infinite admissible extension."""
        return _graph.essential_mask(self.transitions)

    @property
    def inessential_symbols(self) -> tuple:
        return tuple(s for s, ok in zip(self.alphabet, self.essential) if not ok)

    def __eq__(self, other):
        if not isinstance(other, Sft):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.transitions, other.transitions)

    def __hash__(self):
        return hash((self.alphabet, self.transitions.tobytes()))

    def __repr__(self):
        return f"Sft(alphabet={list(self.alphabet)!r}, pairs={int(self.transitions.sum())})"

    def pairs(self) -> list:
        return [(self.alphabet[i], self.alphabet[j]) for i, j in zip(*np.nonzero(self.transitions))]


# -- constructors -------------------------------------------------------------

def full_shift(symbols) -> Sft:
    if isinstance(symbols, int):
        symbols = range(symbols)
    symbols = tuple(symbols)
    return Sft(symbols, np.ones((len(symbols),) * 2, dtype=bool))


def from_forbidden_pairs(alphabet, forbidden) -> Sft:
    alphabet = tuple(alphabet)
    idx = {s: i for i, s in enumerate(alphabet)}
    mat = np.ones((len(alphabet),) * 2, dtype=bool)
    for a, b in forbidden:
        mat[idx[a], idx[b]] = False
    return Sft(alphabet, mat)


def from_pairs(alphabet, pairs) -> Sft:
    alphabet = tuple(alphabet)
    idx = {s: i for i, s in enumerate(alphabet)}
    mat = np.zeros((len(alphabet),) * 2, dtype=bool)
    for a, b in pairs:
        mat[idx[a], idx[b]] = True
    return Sft(alphabet, mat)


def golden_mean(symbols=(0, 1)) -> Sft:
    """Two symbols, the second may not follow itself."""
    return from_forbidden_pairs(symbols, [(symbols[1], symbols[1])])


# -- word predicates ----------------------------------------------------------

def is_admissible(sft: Sft, word: Sequence[Symbol]) -> bool:
    """True iff every consecutive pair of ``word`` is admissible."""
    if len(word) == 0:
        raise InputError("empty word")
    idx = sft.indices(word)
    if len(idx) == 1:
        return True
    return bool(sft.transitions[idx[:-1], idx[1:]].all())


def enumerate_words(sft: Sft, n: int, start=None) -> list:
    """All admissible words of length ``n`` in canonical lexicographic order."""
    if n < 1:
        raise InputError("word length must be >= 1")
    succ = [np.flatnonzero(row) for row in sft.transitions]
    firsts = range(sft.size) if start is None else [sft.index(start)]
    out = []
    stack = [(i,) for i in reversed(list(firsts))]
    while stack:
        w = stack.pop()
        if len(w) == n:
            out.append(tuple(sft.alphabet[i] for i in w))
            continue
        for j in reversed(succ[w[-1]]):
            stack.append(w + (int(j),))
    return out


def count_words(sft: Sft, n: int, start=None, end=None) -> int:
    """Exact number of admissible words of length ``n``.

    Optional ``start``/``end`` restrict the first/last symbol. Arbitrary
    precision throughout (object-dtype matrix powers).
    """
    if n < 1:
        raise InputError("word length must be >= 1")
    b = sft.transitions.astype(np.int64).astype(object)
    p = np.identity(sft.size, dtype=np.int64).astype(object)
    e = n - 1
    while e:
        if e & 1:
            p = p.dot(b)
        b = b.dot(b)
        e >>= 1
    rows = slice(None) if start is None else [sft.index(start)]
    cols = slice(None) if end is None else [sft.index(end)]
    return int(p[rows][:, cols].sum())


# -- graph structure ----------------------------------------------------------

@dataclass(frozen=True)
class TransitivityReport:
    transitive: bool
    essential: tuple
    flagged: tuple = ()
    diagnostic: str = ""


def transitivity_report(sft: Sft) -> TransitivityReport:
    mask = sft.essential
    ess = tuple(s for s, ok in zip(sft.alphabet, mask) if ok)
    flagged = sft.inessential_symbols
    if not ess:
        return TransitivityReport(False, ess, flagged, "essential part is empty")
    ok = _graph.is_strongly_connected(sft.transitions, mask)
    diag = "" if ok else "essential graph is not strongly connected"
    if flagged:
        diag = (diag + "; " if diag else "") + f"inessential symbols ignored: {list(flagged)!r}"
    return TransitivityReport(ok, ess, flagged, diag)


def is_transitive(sft: Sft) -> bool:
    return transitivity_report(sft).transitive


def period(sft: Sft) -> int:
    """gcd of cycle lengths of the essential part (0 if not transitive)."""
    if not is_transitive(sft):
        return 0
    return _graph.period(sft.transitions, sft.essential)


def is_mixing(sft: Sft) -> bool:
    """Transitive and aperiodic, decided by the gcd of cycle lengths."""
    return period(sft) == 1


def primitive_exponent(sft: Sft, max_power=None):
    """Smallest ``m`` with ``B**m`` entrywise positive, or None.

    Searches up to Wielandt's bound ``(n-1)**2 + 1`` unless ``max_power``
    is given.
    """
    n = sft.size
    if n == 0:
        return None
    limit = (n - 1) ** 2 + 1 if max_power is None else max_power
    b = sft.transitions.astype(np.int64)
    p = b.copy()
    for m in range(1, limit + 1):
        if p.all():
            return m
        p = ((p @ b) > 0).astype(np.int64)
    return None


def is_mixing_by_powers(sft: Sft, max_power=None) -> bool:
    """Positive-power criterion on the essential part; cross-check for ``is_mixing``."""
    mask = sft.essential
    if not mask.any():
        return False
    idx = np.flatnonzero(mask)
    sub = Sft([sft.alphabet[i] for i in idx], sft.transitions[np.ix_(idx, idx)])
    return primitive_exponent(sub, max_power) is not None


def shortest_gluing_word(sft: Sft, a, b) -> Word:
    """Shortest ``c`` with ``(a, *c, b)`` admissible; lexicographically least among ties.

    BFS expanding successors in canonical symbol order; the queue order at each
    level is then the lexicographic order of the least paths.
    """
    ia, ib = sft.index(a), sft.index(b)
    t = sft.transitions
    if t[ia, ib]:
        return ()
    parent = {ia: None}
    frontier = [ia]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(t[u]):
                v = int(v)
                if v not in parent:
                    parent[v] = u
                    nxt.append(v)
        for v in nxt:
            if t[v, ib]:
                path = []
                while v != ia:
                    path.append(v)
                    v = parent[v]
                return tuple(sft.alphabet[i] for i in reversed(path))
        frontier = nxt
    raise PreconditionError(f"no admissible connection from {a!r} to {b!r}")


def gluing_lengths(sft: Sft) -> dict:
    return {
        (a, b): len(shortest_gluing_word(sft, a, b))
        for a in sft.alphabet
        for b in sft.alphabet
    }

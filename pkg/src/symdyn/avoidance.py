"""Subshifts avoiding a finite set of factors, and the one-third factor sets of a word."""
from dataclasses import dataclass, field
from functools import cached_property
from math import ceil

import numpy as np
from scipy import sparse

from . import _graph
from .errors import InputError, PreconditionError, ResourceError
from .kernels import debruijn_edges
from .sft import Sft, is_admissible, is_mixing, primitive_exponent
from .towers import Tower, TowerPresentation

MAX_STATES = 20_000_000


def factors(word, min_len=1, max_len=None):
    word = tuple(word)
    n = len(word)
    max_len = n if max_len is None else min(max_len, n)
    return {word[i:i + L] for L in range(min_len, max_len + 1) for i in range(n - L + 1)}


def contains_factor(word, other) -> bool:
    L = len(other)
    return any(word[i:i + L] == other for i in range(len(word) - L + 1))


@dataclass(frozen=True)
class ForbiddenSet:
    words: frozenset
    minimal: bool = False
    core: frozenset = None  # for one-third sets: the factors of the threshold length

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(tuple(w) for w in self.words))
        if any(len(w) == 0 for w in self.words):
            raise InputError("forbidden words must be nonempty")

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words, key=lambda w: (len(w), repr(w))))

    def minimize(self) -> "ForbiddenSet":
        """Drop every word that contains another forbidden word as a factor."""
        if self.minimal:
            return self
        by_len = sorted(self.words, key=len)
        kept = []
        for w in by_len:
            if not any(contains_factor(w, u) for u in kept if len(u) <= len(w)):
                kept.append(w)
        return ForbiddenSet(frozenset(kept), True, self.core)

    @property
    def min_length(self):
        return min((len(w) for w in self.words), default=0)

    @property
    def max_length(self):
        return max((len(w) for w in self.words), default=0)


def threshold(a) -> int:
    return len(a) // 3


def w_one_third(a, sft: Sft = None) -> ForbiddenSet:
    """Factors of ``a`` of length at least ``floor(|a|/3)``; ``core`` holds those of exactly that length."""
    a = tuple(a)
    if len(a) < 3:
        raise InputError(f"|a| must be >= 3, got {len(a)}")
    if sft is not None and not is_admissible(sft, a):
        raise InputError(f"a={a!r} is not admissible")
    L = threshold(a)
    return ForbiddenSet(frozenset(factors(a, L)), False, frozenset(factors(a, L, L)))


def one_third_core(a) -> ForbiddenSet:
    """The minimal forbidden set equivalent to ``w_one_third(a)``."""
    w = w_one_third(a)
    return ForbiddenSet(w.core, True, w.core)


# -- the presentation ---------------------------------------------------------

def _encode(idx, A):
    c = 0
    for i in idx:
        c = c * A + int(i)
    return c


@dataclass(frozen=True, eq=False)
class AvoidanceSft:
    """Overlap-graph presentation: states are admissible words of length ``state_length``.

    A path ``u0 -> u1 -> ...`` reads the ambient sequence ``u0[0], u1[0], ...``.
    """

    source: Sft
    forbidden: ForbiddenSet
    state_length: int
    state_codes: np.ndarray  # sorted codes, base ``source.size``
    adjacency: sparse.csr_matrix
    diagnostic: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n_states(self):
        return int(self.state_codes.shape[0])

    @cached_property
    def state_symbols(self) -> np.ndarray:
        """``(n_states, state_length)`` array of ambient symbol indices."""
        A, s = self.source.size, self.state_length
        out = np.empty((self.n_states, s), dtype=np.int64)
        c = self.state_codes.copy()
        for i in range(s - 1, -1, -1):
            out[:, i] = c % A
            c //= A
        return out

    def state_word(self, i):
        return tuple(self.source.alphabet[j] for j in self.state_symbols[i])

    def projection(self, i):
        """Ambient symbol read when a path passes state ``i``."""
        return self.source.alphabet[self.state_symbols[i, 0]]

    @cached_property
    def essential(self) -> np.ndarray:
        if self.n_states == 0:
            return np.zeros(0, dtype=bool)
        return _graph.essential_mask(self.adjacency)

    @property
    def is_empty(self) -> bool:
        return not self.essential.any()

    @cached_property
    def transitive(self) -> bool:
        if self.is_empty:
            return False
        return _graph.is_strongly_connected(self.adjacency, self.essential)

    @cached_property
    def period(self) -> int:
        if not self.transitive:
            return 0
        return _graph.period(self.adjacency, self.essential)

    def presentation(self) -> Sft:
        """The presentation as a dense ``Sft`` over state words (small instances only)."""
        if self.n_states > 4096:
            raise ResourceError(f"{self.n_states} states is too many for a dense presentation")
        alphabet = [self.state_word(i) for i in range(self.n_states)]
        return Sft(alphabet, self.adjacency.toarray())

    def _words(self, L, essential_only):
        """Ambient codes of all words of length L read along paths."""
        A, s = self.source.size, self.state_length
        syms = self.state_symbols
        mask = self.essential if essential_only else np.ones(self.n_states, dtype=bool)
        if L <= s:
            rows = syms[mask]
            out = []
            for off in range(s - L + 1):
                c = np.zeros(rows.shape[0], dtype=np.int64)
                for t in range(L):
                    c = c * A + rows[:, off + t]
                out.append(c)
            return np.unique(np.concatenate(out)) if out else np.zeros(0, dtype=np.int64)
        adj = self.adjacency
        if essential_only:
            idx = np.flatnonzero(mask)
            keep = np.zeros(self.n_states, dtype=bool)
            keep[idx] = True
            adj = sparse.diags(keep.astype(np.int8)) @ adj @ sparse.diags(keep.astype(np.int8))
            adj = sparse.csr_matrix(adj)
            adj.eliminate_zeros()
        cur_state = np.flatnonzero(mask)
        cur_code = self.state_codes[cur_state].copy()
        for _ in range(L - s):
            starts, ends = adj.indptr[cur_state], adj.indptr[cur_state + 1]
            counts = ends - starts
            rep = np.repeat(np.arange(cur_state.shape[0]), counts)
            nxt = adj.indices[np.concatenate([np.arange(a, b) for a, b in zip(starts, ends)])] if rep.size else np.zeros(0, dtype=np.int64)
            cur_code = cur_code[rep] * A + syms[nxt, -1]
            cur_state = nxt
            pair = np.unique(np.stack([cur_code, cur_state]), axis=1)
            cur_code, cur_state = pair[0], pair[1]
        return np.unique(cur_code)

    def language(self, L, essential_only=False) -> set:
        """Ambient words of length ``L`` read along (finite or, with ``essential_only``, bi-infinite) paths."""
        if L < 1:
            raise InputError("word length must be >= 1")
        A = self.source.size
        out = set()
        for c in self._words(L, essential_only):
            w = []
            c = int(c)
            for _ in range(L):
                w.append(self.source.alphabet[c % A])
                c //= A
            out.add(tuple(reversed(w)))
        return out

    def occurs(self, word, essential_only=True) -> bool:
        """Whether ``word`` is read along some path (bi-infinite by default)."""
        word = tuple(word)
        A = self.source.size
        try:
            code = _encode(self.source.indices(word), A)
        except InputError:
            return False
        return bool(np.isin(code, self._words(len(word), essential_only)))


def _words_of_length(sft: Sft, L, forb_by_len, A):
    """Sorted codes of admissible L-words containing no forbidden factor."""
    t = sft.transitions
    codes = np.arange(A, dtype=np.int64)
    bad = forb_by_len.get(1)
    if bad is not None:
        codes = codes[~np.isin(codes, bad)]
    for length in range(2, L + 1):
        last = codes % A
        src = np.repeat(np.arange(codes.shape[0]), A)
        x = np.tile(np.arange(A, dtype=np.int64), codes.shape[0])
        ok = t[last[src], x]
        codes = codes[src[ok]] * A + x[ok]
        for ell, fc in forb_by_len.items():
            if 1 < ell <= length:
                codes = codes[~np.isin(codes % (A ** ell), fc)]
        if codes.shape[0] > MAX_STATES:
            raise ResourceError(f"more than {MAX_STATES} admissible words of length {length}")
    return np.sort(codes)


def build_avoidance_sft(sft: Sft, forbidden) -> AvoidanceSft:
    """Presentation of the sequences of ``sft`` with no factor in ``forbidden``.

    Forbidden sets are minimized first. States are words of length
    ``max(M-1, 1)`` for the longest forbidden length ``M``.
    """
    if not isinstance(forbidden, ForbiddenSet):
        forbidden = ForbiddenSet(frozenset(tuple(w) for w in forbidden))
    forbidden = forbidden.minimize()
    A = sft.size
    M = forbidden.max_length
    s = max(M - 1, 1)
    if A ** (s + 1) >= 2 ** 62:
        raise ResourceError(f"word codes of length {s + 1} over {A} symbols overflow 64 bits")
    forb_by_len = {}
    for w in forbidden.words:
        if any(x not in sft._index for x in w):
            raise InputError(f"forbidden word {w!r} uses unknown symbols")
        forb_by_len.setdefault(len(w), []).append(_encode(sft.indices(w), A))
    forb_by_len = {k: np.sort(np.array(v, dtype=np.int64)) for k, v in forb_by_len.items()}
    states = _words_of_length(sft, s, forb_by_len, A)
    long_forb = forb_by_len.get(s + 1, np.zeros(0, dtype=np.int64))
    src, dst = debruijn_edges(states, states % A, sft.transitions, long_forb, A, A ** s)
    n = states.shape[0]
    adj = sparse.csr_matrix((np.ones(src.shape[0], dtype=bool), (src, dst)), shape=(n, n))
    result = AvoidanceSft(sft, forbidden, s, states, adj)
    if result.is_empty:
        object.__setattr__(result, "diagnostic", _empty_diagnostic(sft, forbidden))
    return result


def _empty_diagnostic(sft, forbidden):
    """Name the forbidden word whose addition (in canonical order) empties the subshift."""
    words = list(forbidden)
    if len(words) > 256:
        return f"avoidance subshift is empty ({len(words)} forbidden words)"
    if not sft.essential.any():
        return "avoidance subshift is empty; the ambient SFT has no bi-infinite path"
    lo, hi = 0, len(words)  # invariant: prefix lo nonempty, prefix hi empty
    while hi - lo > 1:
        mid = (lo + hi) // 2
        sub = build_avoidance_sft(sft, ForbiddenSet(frozenset(words[:mid]), True))
        if sub.is_empty:
            hi = mid
        else:
            lo = mid
    return f"avoidance subshift is empty; forbidding {words[hi - 1]!r} removed the last bi-infinite path"


# -- transitivity criteria ----------------------------------------------------

@dataclass(frozen=True)
class Prop31Report:
    condition_holds: bool
    m: int
    k: int
    length_adjusted: bool
    alphabet_size: int
    lhs: int  # (#A)^(k-1)
    rhs: int  # 6 (mk)^2
    forbidden_count: int
    forbidden_minimal_count: int
    states: int
    transitive: bool
    diagnostic: str = ""

    @property
    def implication_ok(self) -> bool:
        return self.transitive or not self.condition_holds

    def to_json(self):
        return {
            "condition_holds": self.condition_holds,
            "m": self.m,
            "k": self.k,
            "forbidden_minimal_count": self.forbidden_minimal_count,
            "states": self.states,
            "transitive": self.transitive,
            "length_adjusted": self.length_adjusted,
            "inequality": f"{self.alphabet_size}^{self.k - 1} > 6*({self.m}*{self.k})^2",
        }


def _essential_sub(sft):
    idx = np.flatnonzero(sft.essential)
    return Sft([sft.alphabet[i] for i in idx], sft.transitions[np.ix_(idx, idx)])


def connector_condition(alphabet_size, m, length):
    """``k = ceil(|a| / 3m)`` and whether ``(#A)^(k-1) > 6 (mk)^2``."""
    k = ceil(length / (3 * m))
    lhs = alphabet_size ** (k - 1)
    rhs = 6 * (m * k) ** 2
    return k, lhs, rhs, lhs > rhs


def check_prop31(sft: Sft, a) -> Prop31Report:
    """Constructive connector-count condition against the actual transitivity of the one-third avoidance subshift."""
    a = tuple(a)
    if not is_mixing(sft):
        raise PreconditionError("the ambient SFT must be mixing")
    if not is_admissible(sft, a):
        raise InputError(f"a={a!r} is not admissible")
    ess = _essential_sub(sft)
    m = primitive_exponent(ess)
    k, lhs, rhs, cond = connector_condition(ess.size, m, len(a))
    w = w_one_third(a)
    core = one_third_core(a)
    av = build_avoidance_sft(sft, core)
    return Prop31Report(
        cond, m, k, len(a) != 3 * m * k, ess.size, lhs, rhs,
        len(w), len(core), av.n_states, av.transitive, av.diagnostic,
    )


@dataclass(frozen=True)
class Prop32Report:
    k: int
    base_word: tuple
    base: Prop31Report
    tower_transitive: bool
    tower_states: int
    decomposition_holds: bool  # no lifted base core word survives in the tower avoidance subshift
    converse_holds: bool  # no tower core word survives in the lifted base avoidance subshift
    violations: tuple = ()

    def to_json(self):
        return {
            "k": self.k,
            "base": self.base.to_json(),
            "transitive": self.tower_transitive,
            "states": self.tower_states,
            "decomposition_holds": self.decomposition_holds,
            "converse_holds": self.converse_holds,
        }


def _base_cover(pres: TowerPresentation, word):
    """Base word whose lift contains the tower word at a phase-forced offset, or None."""
    k = pres.k
    phase = word[0][0]
    blocks = []
    for i, (j, sym) in enumerate(word):
        if j != (phase + i) % k:
            return None
        if (phase + i) % k == 0 or i == 0:
            blocks.append(sym)
        elif sym != blocks[-1]:
            return None
    return tuple(blocks)


def check_prop32(tower: Tower, a) -> Prop32Report:
    """Tower version: reduce to the base word, compare both avoidance subshifts."""
    pres = tower.presentation
    k = pres.k
    a = tuple(a)
    if len(a) % k:
        raise InputError(f"|a|={len(a)} is not divisible by the tower height {k}")
    if (len(a) // k) % 2 != 1:
        raise InputError(f"|a|/k={len(a) // k} must be odd (a = k(2n+1) symbols)")
    if not is_admissible(tower.sft, a):
        raise InputError("a is not admissible in the tower")
    b = pres.parse(a)
    if b is None:
        raise InputError("a does not split into tower blocks starting at level 0")
    base_report = check_prop31(pres.base, b)
    if k == 1:
        return Prop32Report(1, b, base_report, base_report.transitive, base_report.states, True, True)
    tower_av = build_avoidance_sft(tower.sft, one_third_core(a))
    base_av = build_avoidance_sft(pres.base, one_third_core(b))
    violations = []
    for w in sorted(one_third_core(b).words):
        if tower_av.occurs(pres.lift(w)):
            violations.append(("lifted base word survives", w))
    converse = True
    for w in sorted(one_third_core(a).words, key=repr):
        u = _base_cover(pres, w)
        if u is not None and base_av.occurs(u):
            converse = False
            violations.append(("tower word survives in the lifted base", w))
    decomposition = not any(v[0] == "lifted base word survives" for v in violations)
    return Prop32Report(
        k, b, base_report, tower_av.transitive, tower_av.n_states,
        decomposition, converse, tuple(violations[:10]),
    )

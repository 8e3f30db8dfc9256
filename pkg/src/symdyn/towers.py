"""Concatenation subshifts Sigma(F), symbolic towers and return-word presentations."""
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError
from .sft import Sft, enumerate_words, is_admissible


@dataclass(frozen=True)
class TowerPresentation:
    """``base`` is the SFT on the super-alphabet F; ``embedding`` maps each F-symbol to its ambient word."""

    base: Sft
    ambient: Sft
    embedding: dict
    k: int = None  # common word length when all of F has one length

    def lift(self, word) -> tuple:
        """Ambient word obtained by concatenating the embeddings of a base word."""
        out = []
        for s in word:
            out.extend(self.embedding[s])
        return tuple(out)

    def parse(self, word, offset=0):
        """Split an ambient word into consecutive F-words, or None if impossible.

        Only defined for equal-length F; ``offset`` symbols are skipped first.
        """
        if self.k is None:
            raise InputError("parse needs a presentation with equal-length words")
        word = tuple(word)[offset:]
        if len(word) % self.k:
            return None
        inverse = {w: s for s, w in self.embedding.items()}
        out = []
        for i in range(0, len(word), self.k):
            s = inverse.get(word[i:i + self.k])
            if s is None:
                return None
            out.append(s)
        return tuple(out)


def higher_block_recode(sft: Sft, words) -> TowerPresentation:
    """Sigma(F): F-pair ``(a, b)`` admissible iff the concatenation ``a + b`` is admissible."""
    words = [tuple(w) for w in words]
    if not words:
        raise InputError("F must be nonempty")
    words = list(dict.fromkeys(words))
    for w in words:
        if not w:
            raise InputError("F contains an empty word")
        if not is_admissible(sft, w):
            raise InputError(f"word {w!r} is not admissible")
    last = np.array([sft.index(w[-1]) for w in words])
    first = np.array([sft.index(w[0]) for w in words])
    mat = sft.transitions[np.ix_(last, first)]
    lengths = {len(w) for w in words}
    k = lengths.pop() if len(lengths) == 1 else None
    base = Sft(words, mat)
    return TowerPresentation(base, sft, {w: w for w in words}, k)


def block_presentation(sft: Sft, k: int) -> TowerPresentation:
    """F = all admissible k-words; sigma(F) acts as sigma**k."""
    return higher_block_recode(sft, enumerate_words(sft, k))


@dataclass(frozen=True)
class Tower:
    sft: Sft
    presentation: TowerPresentation


def build_tower(base: Sft, k: int) -> Tower:
    """Tower of height k: symbols ``(j, a)``; ``(j,a)->(j+1,a)`` for ``j<k-1`` and ``(k-1,a)->(0,b)`` when ``a->b``."""
    if k < 1:
        raise InputError("tower height must be >= 1")
    n = base.size
    alphabet = [(j, a) for j in range(k) for a in base.alphabet]
    mat = np.zeros((k * n, k * n), dtype=bool)
    for j in range(k - 1):
        for i in range(n):
            mat[j * n + i, (j + 1) * n + i] = True
    mat[(k - 1) * n:, :n] = base.transitions
    sft = Sft(alphabet, mat)
    embedding = {a: tuple((j, a) for j in range(k)) for a in base.alphabet}
    return Tower(sft, TowerPresentation(base, sft, embedding, k))


@dataclass(frozen=True)
class ReturnWords:
    words: tuple  # the admissible b of length l - 2m + 1
    presentation: TowerPresentation  # Sigma(F) with F = {0^(2m-1) b}


def return_word_presentation(sft: Sft, m: int, l: int, zero=None) -> ReturnWords:
    """Words ``b`` with ``0^(2m-1) b 0^(2m-1)`` admissible, and Sigma(F) for ``F = {0^(2m-1) b}``."""
    if m < 1:
        raise InputError("m must be >= 1")
    if l <= 2 * m:
        raise InputError(f"need l > 2m, got l={l}, m={m}")
    zero = sft.alphabet[0] if zero is None else zero
    if not sft.allowed(zero, zero):
        raise PreconditionError(f"symbol {zero!r} has no admissible self-loop")
    block = (zero,) * (2 * m - 1)
    blen = l - 2 * m + 1
    bs = tuple(
        b for b in enumerate_words(sft, blen)
        if sft.allowed(zero, b[0]) and sft.allowed(b[-1], zero)
    )
    if not bs:
        raise PreconditionError("no admissible return words")
    pres = higher_block_recode(sft, [block + b for b in bs])
    return ReturnWords(bs, pres)

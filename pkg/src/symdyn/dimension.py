"""Regular Cantor sets from expanding interval branches, and certified dimension brackets.

Two branch families are supported: affine maps on explicit intervals, and
inverse Gauss branches ``t -> 1/(digit + t)`` on a finite digit set,
optionally restricted by an SFT on digits.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp

from . import cf
from .errors import InputError, PreconditionError
from .kernels import perron_bounds
from .sft import Sft, enumerate_words, full_shift, is_mixing

SAFETY = 1e-12  # relative margin covering float error in the Perron bounds


@dataclass(frozen=True)
class AffineBranch:
    interval: tuple  # (lo, hi) as Fractions
    slope: Fraction
    offset: Fraction
    covers: tuple  # indices of the intervals the image covers

    def image(self):
        a = self.slope * self.interval[0] + self.offset
        b = self.slope * self.interval[1] + self.offset
        return (min(a, b), max(a, b))

    def inverse(self, t):
        return (t - self.offset) / self.slope


class BranchSystem:
    """Either ``affine`` branches or ``gauss`` inverse branches over a digit SFT."""

    def __init__(self, kind, branches=None, digits=None, digit_sft=None):
        if kind not in ("affine", "gauss"):
            raise InputError(f"unknown branch system kind {kind!r}")
        self.kind = kind
        if kind == "affine":
            if not branches:
                raise InputError("affine system needs branches")
            self.branches = tuple(branches)
            k = len(self.branches)
            mat = np.zeros((k, k), dtype=bool)
            for i, b in enumerate(self.branches):
                for j in b.covers:
                    if not 0 <= j < k:
                        raise InputError(f"branch {i} covers unknown interval {j}")
                    mat[i, j] = True
            self.markov = Sft(range(k), mat)
        else:
            digits = tuple(sorted(set(int(d) for d in digits)))
            if not digits or digits[0] < 1:
                raise InputError("Gauss digits must be positive integers")
            if digit_sft is None:
                digit_sft = full_shift(digits)
            elif set(digit_sft.alphabet) != set(digits):
                raise InputError("digit SFT alphabet must equal the digit set")
            self.digits = digits
            self.markov = digit_sft

    @classmethod
    def affine(cls, specs):
        """``specs``: iterable of ``(interval, slope, offset, covers)``."""
        out = []
        for interval, slope, offset, covers in specs:
            lo, hi = (Fraction(x) for x in interval)
            if not lo < hi:
                raise InputError(f"empty interval {interval!r}")
            out.append(AffineBranch((lo, hi), Fraction(slope), Fraction(offset), tuple(covers)))
        return cls("affine", out)

    @classmethod
    def gauss(cls, digits, digit_sft=None):
        return cls("gauss", digits=digits, digit_sft=digit_sft)

    def __repr__(self):
        if self.kind == "affine":
            return f"BranchSystem(affine, {len(self.branches)} branches)"
        return f"BranchSystem(gauss, digits={self.digits})"


def middle_thirds() -> BranchSystem:
    return BranchSystem.affine([
        ((0, Fraction(1, 3)), 3, 0, (0, 1)),
        ((Fraction(2, 3), 1), 3, -2, (0, 1)),
    ])


# -- Gauss cylinder hulls -----------------------------------------------------

def _extremal_tail(sft: Sft, first_choices, maximize_first):
    """Digits of the alternating-lex extremal infinite path, as ``(prefix, period)``.

    ``[0; z1, z2, ...]`` decreases in ``z1``, increases in ``z2`` and so on,
    so the extreme is greedy: at each step take the smallest or largest
    admissible digit, alternating. The walk is over (digit, parity) states,
    hence eventually periodic.
    """
    ess = sft.essential
    seen = {}
    path = []
    choices = [d for d in first_choices if ess[sft.index(d)]]
    big = maximize_first
    state = None
    while True:
        z = max(choices) if big else min(choices)
        state = (z, big)
        if state in seen:
            start = seen[state]
            return tuple(path[:start]), tuple(path[start:])
        seen[state] = len(path)
        path.append(z)
        choices = [d for d in sft.successors(z) if ess[sft.index(d)]]
        big = not big


@lru_cache(maxsize=None)
def _tails(sft: Sft, last):
    """Tail digit streams giving the smallest and largest ``[0; tail]`` after digit ``last``."""
    first = sft.successors(last) if last is not None else sft.alphabet
    small = _extremal_tail(sft, first, True)
    large = _extremal_tail(sft, first, False)
    return small, large


def gauss_cylinder(sys: BranchSystem, word):
    """Exact surd endpoints ``(lo, hi)`` of the hull of the Cantor set inside the cylinder of ``word``."""
    ends = []
    for prefix, period in _tails(sys.markov, word[-1]):
        ends.append(cf.eventually_periodic((0,) + tuple(word) + prefix, period))
    with cf.precision(cf.DEFAULT_PRECISION):
        a, b = ends[0].interval(), ends[1].interval()
        if a.b <= b.a:
            return ends[0], ends[1]
        return ends[1], ends[0]


def _gauss_enclosure(word, sys):
    """Outward mpf enclosure ``(lo, hi)`` of a Gauss cylinder hull."""
    lo, hi = gauss_cylinder(sys, word)
    with cf.precision(cf.DEFAULT_PRECISION):
        return cf.endpoints(lo.interval())[0], cf.endpoints(hi.interval())[1]


def cylinder_intervals(sys: BranchSystem, n: int):
    """Depth-``n`` cylinders as ``(word, (lo, hi))``, sorted by left endpoint.

    Affine endpoints are exact Fractions; Gauss endpoints are outward-rounded
    mpf bounds of exact quadratic surds.
    """
    if n < 1:
        raise InputError("depth must be >= 1")
    out = []
    for w in enumerate_words(sys.markov, n):
        if sys.kind == "affine":
            lo, hi = sys.branches[w[-1]].interval
            for i in reversed(w[:-1]):
                b = sys.branches[i]
                x, y = b.inverse(lo), b.inverse(hi)
                lo, hi = min(x, y), max(x, y)
            out.append((w, (lo, hi)))
        else:
            if not all(sys.markov.essential[sys.markov.index(d)] for d in w):
                continue
            out.append((w, _gauss_enclosure(w, sys)))
    out.sort(key=lambda e: e[1][0])
    return out


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class RegularityReport:
    covering: bool
    expansion: bool
    mixing: bool
    disjoint: bool
    nondegenerate: bool
    diagnostics: tuple = ()

    @property
    def ok(self):
        return self.covering and self.expansion and self.mixing and self.disjoint and self.nondegenerate


def validate_regular(sys: BranchSystem) -> RegularityReport:
    diag = []
    mixing = is_mixing(sys.markov)
    if not mixing:
        diag.append("Markov structure is not mixing")
    if sys.kind == "affine":
        ivs = [b.interval for b in sys.branches]
        covering = True
        covered = set()
        for i, b in enumerate(sys.branches):
            lo, hi = b.image()
            for j in b.covers:
                if not (lo <= ivs[j][0] and ivs[j][1] <= hi):
                    covering = False
                    diag.append(f"branch {i} image [{lo}, {hi}] does not contain interval {j}")
                covered.add(j)
        missing = set(range(len(ivs))) - covered
        if missing:
            covering = False
            diag.append(f"intervals {sorted(missing)} are not covered by any branch")
        expansion = all(abs(b.slope) > 1 for b in sys.branches)
        if not expansion:
            diag.append("some branch has |slope| <= 1")
        order = sorted(ivs)
        disjoint = all(order[i][1] < order[i + 1][0] for i in range(len(order) - 1))
    else:
        ess = sys.markov.essential
        covering = bool(ess.all())
        if not covering:
            diag.append(f"digits {list(sys.markov.inessential_symbols)} are never reached")
        ivs = [(d, _gauss_enclosure((d,), sys)) for d in sys.digits if ess[sys.markov.index(d)]]
        # |tau'(x)| = 1/x^2 > 1 iff the hull stays below 1
        expansion = all(hi < 1 for _, (lo, hi) in ivs)
        if not expansion:
            diag.append("a digit hull reaches 1, where the Gauss map has derivative 1")
        order = sorted(iv for _, iv in ivs)
        disjoint = all(order[i][1] < order[i + 1][0] for i in range(len(order) - 1))
    if not disjoint:
        diag.append("intervals overlap")
    nondegenerate = sys.markov.size >= 2 and mixing
    if sys.markov.size < 2:
        diag.append("fewer than two branches: the limit set is a point")
    return RegularityReport(covering, expansion, mixing, disjoint, nondegenerate, tuple(diag))


# -- dimension ----------------------------------------------------------------

@dataclass(frozen=True)
class DimensionEnclosure:
    lo: float
    hi: float
    depth: int
    residual: float
    meta: dict = field(default_factory=dict, compare=False)

    def contains(self, other) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _transfer_graph(sys: BranchSystem, n: int):
    """Edges ``v -> x v[:-1]`` with log-weight bounds of ``|psi_x'|`` over the cylinder of ``v``."""
    if sys.kind == "affine":
        k = len(sys.branches)
        src, dst, lw = [], [], []
        for v in range(k):
            for x in range(k):
                if sys.markov.transitions[x, v]:
                    src.append(v)
                    dst.append(x)
                    slope = abs(sys.branches[x].slope)
                    lw.append(-float(mp.log(slope.numerator) - mp.log(slope.denominator)))
        lw = np.array(lw)
        return np.array(src), np.array(dst), lw, lw, k
    words = [w for w in enumerate_words(sys.markov, n) if all(sys.markov.essential[sys.markov.index(d)] for d in w)]
    index = {w: i for i, w in enumerate(words)}
    src, dst, lo_w, hi_w = [], [], [], []
    with cf.precision(cf.DEFAULT_PRECISION):
        for v in words:
            lo, hi = _gauss_enclosure(v, sys)
            for x in sys.markov.alphabet:
                u = (x,) + v[:-1]
                if u not in index or not sys.markov.allowed(x, v[0]):
                    continue
                # |psi_x'(t)| = (x + t)^-2 is decreasing in t
                src.append(index[v])
                dst.append(index[u])
                lo_w.append(float(-2 * mp.log(x + hi)))
                hi_w.append(float(-2 * mp.log(x + lo)))
    lo_w = np.nextafter(np.array(lo_w), -np.inf)
    hi_w = np.nextafter(np.array(hi_w), np.inf)
    return np.array(src), np.array(dst), lo_w, hi_w, len(words)


def _certified(src, dst, logw, n, s):
    lo, hi = perron_bounds(src, dst, np.exp(s * logw), n)
    return lo * (1 - SAFETY), hi * (1 + SAFETY)


def _bisect(pred, iters=60, tol=1e-15):
    """Largest dyadic ``s`` in [0, 1] with ``pred(s)``, assuming ``pred`` holds at 0 and is monotone."""
    lo, hi = 0.0, 1.0
    if pred(hi):
        return hi, 0.0
    for _ in range(iters):
        if hi - lo < tol:
            break
        mid = (lo + hi) / 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi - lo


def dimension_enclosure(sys: BranchSystem, n: int) -> DimensionEnclosure:
    """Bracket ``[lo, hi]`` containing the Hausdorff dimension of the limit set.

    ``lo`` is a point where the Perron root with the smallest derivative
    bounds is certified above 1, ``hi`` one where the root with the largest
    bounds is certified below 1. Affine weights are exact, so the depth only
    matters for Gauss systems.
    """
    if n < 1:
        raise InputError("depth must be >= 1")
    report = validate_regular(sys)
    if not report.ok:
        raise PreconditionError("not a regular Cantor set: " + "; ".join(report.diagnostics))
    src, dst, lw_lo, lw_hi, size = _transfer_graph(sys, n)
    s_lo, res_lo = _bisect(lambda s: _certified(src, dst, lw_lo, size, s)[0] > 1)
    s_up, res_hi = _bisect(lambda s: not (_certified(src, dst, lw_hi, size, s)[1] < 1))
    s_hi = min(s_up + res_hi, 1.0)
    return DimensionEnclosure(s_lo, s_hi, n, s_hi - s_lo, {"states": size, "bisection_residual": max(res_lo, res_hi)})

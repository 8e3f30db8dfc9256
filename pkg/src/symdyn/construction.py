"""Inserting a word into a sequence, the block sequence built from growing windows, and the limsup verifier."""
import threading
from bisect import bisect_right
from dataclasses import dataclass, field

from .avoidance import one_third_core
from .errors import DomainError, InputError, PreconditionError
from .sequences import EventuallyPeriodicSequence, first_disagreement, insert_word, is_admissible_sequence, splice
from .sft import Sft, is_admissible, shortest_gluing_word
from .spectra import Potential, check_sdh2, lagrange_value


@dataclass(frozen=True)
class GluingTable:
    """Fixed connector ``c[(alpha, beta)]`` for every ordered pair of symbols."""

    sft: Sft
    words: dict

    @property
    def max_len(self) -> int:
        return max(len(w) for w in self.words.values())

    def __getitem__(self, pair):
        return self.words[pair]

    def validate(self):
        for (x, y), c in self.words.items():
            if not is_admissible(self.sft, (x, *c, y)):
                raise InputError(f"connector {c!r} does not glue {x!r} to {y!r}")

    def is_minimal(self) -> bool:
        return all(
            len(c) == len(shortest_gluing_word(self.sft, x, y)) for (x, y), c in self.words.items()
        )

    def replace(self, pair, word) -> "GluingTable":
        words = dict(self.words)
        words[pair] = tuple(word)
        t = GluingTable(self.sft, words)
        t.validate()
        return t


def gluing_table(sft: Sft) -> GluingTable:
    return GluingTable(sft, {(x, y): shortest_gluing_word(sft, x, y) for x in sft.alphabet for y in sft.alphabet})


def _check_word(sft, a):
    a = tuple(a)
    if len(a) % 2 != 1:
        raise InputError(f"a must have odd length 2n+1, got {len(a)}")
    if not is_admissible(sft, a):
        raise InputError(f"a={a!r} is not admissible")
    return a, len(a) // 2


def h_a(sft: Sft, table: GluingTable, a, theta) -> EventuallyPeriodicSequence:
    """``theta`` up to index 0, then ``c(theta0, a[0]) a c(a[-1], theta1)``, then ``theta`` from index 1; ``a``'s centre at 0."""
    a, n = _check_word(sft, a)
    if not is_admissible_sequence(sft, theta):
        raise InputError("theta is not admissible")
    e = table[theta.symbol_at(0), a[0]]
    f = table[a[-1], theta.symbol_at(1)]
    return insert_word(theta, 1, e + a + f, -n - len(e))


@dataclass(frozen=True)
class HolonomyCheck:
    k: int
    passed: bool
    first_mismatch: int
    k_stated: int
    passed_stated: bool
    first_mismatch_stated: int
    holonomy_defined: bool  # the auxiliary sequence lies in W^u_loc(xi) for the used k
    window: int


def _in_cylinder(seq, d):
    return seq.window(0, len(d) - 1) == tuple(d)


def holonomy_decomposition_check(sft, table, a, d, xi, theta, window=50) -> HolonomyCheck:
    """Compare ``H_a(theta)`` with ``shift^k [shift^-k H_a(xi), theta]`` on ``[-window, window]``.

    ``k`` comes from the minimal connector length ``|c(d0, a[0])|``, so a
    table with a longer connector shows up as a mismatch whenever the extra
    symbols actually change the left half of ``H_a(theta)``. Both ``|e|+n+1``
    (the value making the identity hold) and ``|e|+n`` are evaluated.
    """
    a, n = _check_word(sft, a)
    d = tuple(d)
    if len(d) != 2 or not is_admissible(sft, d):
        raise DomainError(f"d={d!r} must be an admissible pair")
    for name, s in (("xi", xi), ("theta", theta)):
        if not _in_cylinder(s, d):
            raise DomainError(f"{name} is not in C_0(d)")
    bad = first_disagreement(theta, xi, 0, None)
    if bad is not None:
        raise DomainError(f"theta is not in W^s_loc(xi): differs at index {bad}")
    lhs = h_a(sft, table, a, theta)
    h_xi = h_a(sft, table, a, xi)
    e_min = len(shortest_gluing_word(sft, d[0], a[0]))

    def run(k):
        zeta = EventuallyPeriodicSequence(h_xi.left_period, h_xi.core, h_xi.right_period, h_xi.origin + k)
        defined = first_disagreement(zeta, xi, None, 0) is None
        rhs = splice(theta, 1, zeta)  # (theta^{-*}, zeta^+)
        rhs = EventuallyPeriodicSequence(rhs.left_period, rhs.core, rhs.right_period, rhs.origin - k)
        return first_disagreement(lhs, rhs, -window, window), defined

    k = e_min + n + 1
    k_stated = e_min + n
    bad, defined = run(k)
    bad_s, _ = run(k_stated)
    return HolonomyCheck(k, bad is None, bad, k_stated, bad_s is None, bad_s, defined, window)


# -- the block sequence -------------------------------------------------------

@dataclass(frozen=True)
class BlockLayout:
    """Index bookkeeping of the block sequence.

    ``l`` and ``m`` are the two connector lengths around ``a``; ``connectors[k]``
    is ``|c_k|`` (index 0 unused). Windows are relative to the centre
    position ``l_of(k)`` of the copy of ``a`` inside block ``k``.
    """

    n: int
    l: int
    m: int
    connectors: tuple

    def l_of(self, k):
        pos = 0
        for j in range(k):
            pos += 2 * self.n + self.l + self.m + 2 * j + 4 + self.connectors[j + 1]
        return pos

    def window(self, k):
        return (-(self.n + self.l) - k - 1, self.n + self.m + k + 1 + self.connectors[k + 1])

    def minus(self, k):
        return (-(self.n + self.l) - k - 1, -(self.n + self.l) - self.n - 1)

    def plus(self, k):
        return (self.n + self.m + self.n + 1, self.n + self.m + k + 1 + self.connectors[k + 1])

    @property
    def middle(self):
        return (-2 * self.n - self.l, 2 * self.n + self.m)

    def middle_of(self, k):
        lo, hi = self.window(k)
        mlo, mhi = self.minus(k)
        plo, phi = self.plus(k)
        rest = [j for j in range(lo, hi + 1) if not (mlo <= j <= mhi or plo <= j <= phi)]
        return (rest[0], rest[-1]) if rest and rest == list(range(rest[0], rest[-1] + 1)) else tuple(rest)

    def tiles(self, k_max):
        """Whether the windows ``l(k) + I_k``, ``k = 1..k_max``, are consecutive and disjoint."""
        prev_end = None
        for k in range(1, k_max + 1):
            lo, hi = self.window(k)
            start, end = self.l_of(k) + lo, self.l_of(k) + hi
            if prev_end is not None and start != prev_end + 1:
                return False
            prev_end = end
        return True


class HTildeSequence:
    """``theta`` up to index -1, then the blocks ``tau_0, c_1, tau_1, c_2, ...`` generated on demand.

    ``tau_k = theta[-k..0] + e + a + f + theta[1..k+1]`` and ``c_k`` connects
    ``theta[k]`` to ``theta[-k]``. The first symbol of ``tau_0`` is ``theta[0]``
    and the centre of its ``a`` sits at index 0.
    """

    def __init__(self, sft, table, a, theta):
        self.sft = sft
        self.table = table
        self.a, self.n = tuple(a), len(a) // 2
        self.theta = theta
        self.e = table[theta.symbol_at(0), self.a[0]]
        self.f = table[self.a[-1], theta.symbol_at(1)]
        self.start = -self.n - len(self.e) - 1  # index of tau_0's first symbol
        self._starts = []
        self._blocks = []
        self._kinds = []
        self._connectors = [0]
        self._lock = threading.Lock()
        self._end = self.start

    def tau(self, k):
        th = self.theta
        return (
            th.window(-k, 0) + self.e + self.a + self.f + th.window(1, k + 1)
        )

    def connector(self, k):
        return self.table[self.theta.symbol_at(k), self.theta.symbol_at(-k)]

    def _extend(self, index):
        with self._lock:
            while self._end <= index:
                k = len(self._blocks) // 2
                if len(self._blocks) % 2 == 0:
                    word, kind = self.tau(k), ("tau", k)
                else:
                    word, kind = self.connector(k + 1), ("c", k + 1)
                    self._connectors.append(len(word))
                self._starts.append(self._end)
                self._blocks.append(word)
                self._kinds.append(kind)
                self._end += len(word)

    def symbol_at(self, i):
        if i < self.start:
            return self.theta.symbol_at(i - self.start)
        self._extend(i)
        b = bisect_right(self._starts, i) - 1
        while not self._blocks[b]:
            b -= 1
        return self._blocks[b][i - self._starts[b]]

    def window(self, lo, hi):
        return tuple(self.symbol_at(i) for i in range(lo, hi + 1))

    def block_start(self, kind, k):
        """Start index of ``tau_k`` (``kind='tau'``) or ``c_k`` (``kind='c'``)."""
        target = (kind, k)
        while target not in self._kinds:
            self._extend(self._end)
        return self._starts[self._kinds.index(target)]

    def centre(self, k):
        """Position of the centre of ``a`` inside ``tau_k``."""
        return self.block_start("tau", k) + (k + 1) + len(self.e) + self.n

    def layout(self, k_max) -> BlockLayout:
        self.block_start("c", k_max + 2)
        return BlockLayout(self.n, len(self.e), len(self.f), tuple(self._connectors[: k_max + 3]))


def sequence_avoids(seq, words) -> tuple:
    """``(True, None)`` if no word of the set occurs in ``seq``, else ``(False, start_index)``."""
    words = set(words)
    if not words:
        return True, None
    L = max(len(w) for w in words)
    lo, hi = seq.span()
    lo -= len(seq.left_period) + L
    hi += len(seq.right_period) + L
    for i in range(lo, hi + 1):
        for w in words:
            if seq.window(i, i + len(w) - 1) == w:
                return False, i
    return True, None


def h_tilde(sft, table, a, theta, horizon=50):
    """Block sequence and its layout after checking the preconditions exactly."""
    a, n = _check_word(sft, a)
    if n <= 3 * table.max_len + 1:
        raise PreconditionError(f"need n > 3*max|c| + 1 = {3 * table.max_len + 1}, got n={n}")
    if not is_admissible_sequence(sft, theta):
        raise PreconditionError("theta is not admissible")
    ok, where = sequence_avoids(theta, one_third_core(a).words)
    if not ok:
        L = len(a) // 3
        raise PreconditionError(
            f"theta contains the factor {theta.window(where, where + L - 1)!r} of a at index {where}"
        )
    H = HTildeSequence(sft, table, a, theta)
    lay = H.layout(horizon)
    for k in range(horizon + 1):
        if H.centre(k) != lay.l_of(k):
            raise AssertionError(f"layout recurrence disagrees with block positions at k={k}")
        c = H.centre(k)
        if H.window(c - n, c + n) != a:
            raise AssertionError(f"no copy of a centred at l({k})={c}")
    if not lay.tiles(horizon):
        raise AssertionError("layout windows do not tile")
    return H, lay


# -- the limsup mechanism -----------------------------------------------------

@dataclass(frozen=True)
class Prop34Report:
    passed: bool
    j0: int
    limsup: object
    cylinder_member: bool
    argmax_ok: bool
    stabilized: bool
    witness_matches: bool
    threshold: int
    witness: tuple
    certificate_window: tuple
    per_k: list = field(default_factory=list)

    def to_json(self):
        return {
            "pass": self.passed,
            "j0": self.j0,
            "limsup": str(self.limsup),
            "cylinder_member": self.cylinder_member,
            "argmax_ok": self.argmax_ok,
            "stabilized": self.stabilized,
            "witness_matches": self.witness_matches,
            "stabilization_threshold": self.threshold,
            "certificate_window": list(self.certificate_window),
            "per_k": self.per_k,
        }


def middle_argmax(p: Potential, seq, lay: BlockLayout):
    """First ``j`` in the middle window maximizing ``p(shift(seq, j))`` and that maximum."""
    r = p.radius
    lo, hi = lay.middle
    vals = [(p.window_value(seq.window(j - r, j + r)), j) for j in range(lo, hi + 1)]
    best = max(v for v, _ in vals)
    return next(j for v, j in vals if v == best), best


def verify_prop34(sft, table, a, p: Potential, theta, k_max=50) -> Prop34Report:
    """Check the three limsup claims on the block sequence of ``theta`` for ``k <= k_max``.

    (A) on every window ``l(k) + I_k`` with ``k > 4n`` the maximum sits strictly
    inside the middle part; (B) from the computed threshold on, the middle
    values equal those of ``H_a(theta)``; (C) the maximizing shift ``j0`` puts
    ``a`` at the centre. The limsup is then matched against the Lagrange
    value of an explicit periodic witness.
    """
    a, n = _check_word(sft, a)
    if not p.is_locally_constant:
        raise PreconditionError("verification needs a locally constant potential")
    gap = check_sdh2(sft, p, a)
    if not gap.holds:
        raise PreconditionError(f"gap hypothesis fails: sup off = {gap.sup_off}, value on = {gap.inf_on}")
    if k_max <= 4 * n:
        raise InputError(f"k_max={k_max} leaves no k > 4n={4 * n}")
    H, lay = h_tilde(sft, table, a, theta, horizon=k_max)
    r = p.radius
    g = lambda seq, i: p.window_value(seq.window(i - r, i + r))
    ha = h_a(sft, table, a, theta)
    j0, limsup = middle_argmax(p, ha, lay)
    mid_lo, mid_hi = lay.middle
    target = {j: g(ha, j) for j in range(mid_lo, mid_hi + 1)}
    threshold = max(n + r - 1, 1)

    per_k = []
    argmax_ok = True
    stabilized = True
    for k in range(1, k_max + 1):
        c = lay.l_of(k)
        lo, hi = lay.window(k)
        vals = {j: g(H, c + j) for j in range(lo, hi + 1)}
        # for k < n - 1 the window is shorter than the middle part
        mid = [j for j in range(mid_lo, mid_hi + 1) if j in vals]
        mid_max = max(vals[j] for j in mid)
        off = [vals[j] for j in vals if not (mid_lo <= j <= mid_hi)]
        off_max = max(off) if off else None
        best = max(vals.values())
        arg = next(j for j in range(lo, hi + 1) if vals[j] == best)
        in_middle = off_max is None or off_max < mid_max
        asserted = k > 4 * n
        if asserted and not in_middle:
            argmax_ok = False
        stable = len(mid) == mid_hi - mid_lo + 1 and all(vals[j] == target[j] for j in mid)
        if k >= threshold and not stable:
            stabilized = False
        per_k.append({"k": k, "argmax_offset": arg, "in_middle": in_middle, "asserted": asserted,
                      "matches_limit": stable})

    cyl = ha.window(j0 - n, j0 + n) == a
    K = max(threshold, 4 * n + 1)
    period = H.tau(K) + table[theta.symbol_at(K + 1), theta.symbol_at(-K)]
    witness = EventuallyPeriodicSequence.periodic(period)
    wit_ok = is_admissible_sequence(sft, witness) and lagrange_value(p, witness).exact == limsup
    cert = (-n - r + 1, n + r)
    passed = argmax_ok and stabilized and cyl and wit_ok
    return Prop34Report(passed, j0, limsup, cyl, argmax_ok, stabilized, wit_ok, threshold, period, cert, per_k)


def j0_of(sft, table, a, p: Potential, theta):
    """``j0`` for ``theta``; depends only on ``theta`` over the certificate window."""
    a, n = _check_word(sft, a)
    ha = h_a(sft, table, a, theta)
    e = table[theta.symbol_at(0), a[0]]
    f = table[a[-1], theta.symbol_at(1)]
    lay = BlockLayout(n, len(e), len(f), (0, 0))
    return middle_argmax(p, ha, lay)

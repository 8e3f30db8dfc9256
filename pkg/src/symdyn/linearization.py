"""Hyperbolic linear maps: spectral spreading, smoothness budget and resonance checks.

Conventions: ``|l|`` is the l1 norm over signed integer vectors, and the
maximization defining the smoothness budget allows ``m`` or ``n`` to be 0.
The strictly positive variant is reported alongside.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, PreconditionError, ResourceError

DEFAULT_TOL = 1e-9
SNAP = 1e-9  # floors within this of an integer snap up to it
MAX_COMBINATIONS = 5_000_000
MAX_DIM = 6


def snapped_floor(x: float) -> int:
    return math.floor(x + SNAP)


def smoothness_budget(r: int, rho_plus: float, rho_minus: float, positive_only=False) -> int:
    """``floor(max over m+n=r of min(m/rho_plus, n/rho_minus))``."""
    lo = 1 if positive_only else 0
    if r - lo < lo:
        return 0
    best = max(min(m / rho_plus, (r - m) / rho_minus) for m in range(lo, r - lo + 1))
    return snapped_floor(best)


@dataclass(frozen=True)
class HyperbolicMatrixReport:
    eigenvalues: tuple
    spec_plus: tuple
    spec_minus: tuple
    rho_plus: float | None
    rho_minus: float | None
    k_r: dict
    k_r_positive: dict
    r_p: int | None
    saddle: bool
    r_p_margin: float | None = None
    conventions: dict = field(default_factory=lambda: {
        "l_norm": "l1 over signed integers",
        "k_r_range": "m, n >= 0 (k_r_positive: m, n >= 1)",
    })

    def to_json(self):
        def c(z):
            return [repr(float(z.real)), repr(float(z.imag))]
        return {
            "eigenvalues": [c(z) for z in self.eigenvalues],
            "rho_plus": None if self.rho_plus is None else repr(self.rho_plus),
            "rho_minus": None if self.rho_minus is None else repr(self.rho_minus),
            "k_r": {str(k): v for k, v in self.k_r.items()},
            "k_r_positive": {str(k): v for k, v in self.k_r_positive.items()},
            "r_p": self.r_p,
            "r_p_margin": None if self.r_p_margin is None else repr(self.r_p_margin),
            "saddle": self.saddle,
            "conventions": self.conventions,
        }


def _matrix(T):
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise InputError(f"expected a nonempty square matrix, got shape {T.shape}")
    if not np.all(np.isfinite(T)):
        raise InputError("matrix has non-finite entries")
    return T


def eigenvalues(T):
    """Eigenvalues sorted by decreasing modulus, then by argument."""
    ev = np.linalg.eigvals(_matrix(T))
    return tuple(complex(z) for z in sorted(ev.astype(complex), key=lambda z: (-abs(z), np.angle(z))))


def _spread(logs):
    return max(logs) / min(logs) if logs else None


def analyze(T, tol=DEFAULT_TOL, max_r=12) -> HyperbolicMatrixReport:
    ev = eigenvalues(T)
    if any(abs(z) == 0 for z in ev):
        raise DomainError("matrix is singular")
    near = [z for z in ev if abs(abs(z) - 1) <= tol]
    if near:
        raise DomainError(f"not hyperbolic: eigenvalue {near[0]} within {tol} of the unit circle")
    plus = tuple(z for z in ev if abs(z) > 1)
    minus = tuple(z for z in ev if abs(z) < 1)
    rho_p = _spread([abs(math.log(abs(z))) for z in plus])
    rho_m = _spread([abs(math.log(abs(z))) for z in minus])
    saddle = bool(plus) and bool(minus)
    k_r, k_pos, r_p, margin = {}, {}, None, None
    if saddle:
        for r in range(1, max_r + 1):
            k_r[r] = smoothness_budget(r, rho_p, rho_m)
            k_pos[r] = smoothness_budget(r, rho_p, rho_m, positive_only=True)
        x = 3 * (rho_p + rho_m + 1)
        r_p = snapped_floor(x)
        # how far x may rise before r_p jumps
        margin = max(r_p + 1 - x, 0.0)
    return HyperbolicMatrixReport(ev, plus, minus, rho_p, rho_m, k_r, k_pos, r_p, saddle, margin)


def l1_ball_size(d: int, r: int) -> int:
    """Number of integer vectors in ``Z^d`` with l1 norm at most ``r``."""
    return sum(2 ** k * math.comb(d, k) * math.comb(r, k) for k in range(min(d, r) + 1))


def _l1_ball(d, r):
    pts = np.zeros((1, 0), dtype=np.int16)
    norms = np.zeros(1, dtype=np.int64)
    for _ in range(d):
        parts_p, parts_n = [], []
        for v in range(-r, r + 1):
            ok = norms + abs(v) <= r
            parts_p.append(np.hstack([pts[ok], np.full((ok.sum(), 1), v, dtype=np.int16)]))
            parts_n.append(norms[ok] + abs(v))
        pts, norms = np.vstack(parts_p), np.concatenate(parts_n)
    return pts, norms


@dataclass(frozen=True)
class ResonanceReport:
    free: bool
    order: int
    witnesses: tuple  # (eigenvalue, l) pairs with |mu| within tol of 1
    checked: int
    convention: str = "l1 over signed integers"

    def __iter__(self):
        return iter((self.free, list(self.witnesses)))


def resonance_free(T, r: int, tol=DEFAULT_TOL) -> ResonanceReport:
    """Check ``||mu(lambda, l)| - 1| > tol`` for all eigenvalues and ``2 <= |l| <= r``.

    ``mu(lambda, l) = lambda / prod lambda_i^l_i`` over the eigenvalues with
    multiplicity.
    """
    if r < 2:
        raise PreconditionError("resonance order must be at least 2")
    ev = eigenvalues(T)
    d = len(ev)
    if d > MAX_DIM:
        raise ResourceError(f"dimension {d} exceeds {MAX_DIM}")
    total = l1_ball_size(d, r)
    if total > MAX_COMBINATIONS:
        raise ResourceError(f"{total} exponent vectors at order {r} exceed {MAX_COMBINATIONS}")
    if any(abs(z) == 0 for z in ev):
        raise DomainError("matrix is singular")
    logs = np.array([math.log(abs(z)) for z in ev])
    pts, norms = _l1_ball(d, r)
    keep = norms >= 2
    pts = pts[keep]
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    s = pts.astype(float) @ logs
    witnesses = []
    for i, z in enumerate(ev):
        gap = np.abs(np.exp(logs[i] - s) - 1)
        for row in np.nonzero(gap <= tol)[0]:
            witnesses.append((complex(z), tuple(int(x) for x in pts[row])))
    return ResonanceReport(not witnesses, r, tuple(witnesses), len(pts) * d)


@dataclass(frozen=True)
class MembershipReport:
    condition1: bool  # resonance free at order r_p
    condition2: bool  # r_p < r / 3
    member: bool
    r_p: int
    r: int
    witnesses: tuple = ()


def l_r_membership(T, r: int, tol=DEFAULT_TOL) -> MembershipReport:
    rep = analyze(T, tol)
    if not rep.saddle:
        raise PreconditionError("membership needs a saddle: both expanding and contracting eigenvalues")
    res = resonance_free(T, rep.r_p, tol)
    c2 = 3 * rep.r_p < r
    return MembershipReport(res.free, c2, res.free and c2, rep.r_p, r, res.witnesses)

"""Hot loops, each with a jitted loop form and a vectorized numpy form.

The public names dispatch on ``_accel.HAVE_NUMBA``; both forms are always
importable so tests and the benchmark can compare them.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit


# -- de Bruijn edges of an avoidance presentation -----------------------------

def _edges_loop(state_codes, last, trans, forbidden, A, mod):
    n = state_codes.shape[0]
    src = np.empty(n * A, dtype=np.int64)
    dst = np.empty(n * A, dtype=np.int64)
    m = 0
    nf = forbidden.shape[0]
    for i in range(n):
        c = state_codes[i]
        for x in range(A):
            if not trans[last[i], x]:
                continue
            w = c * A + x
            if nf > 0:
                k = np.searchsorted(forbidden, w)
                if k < nf and forbidden[k] == w:
                    continue
            v = w % mod
            j = np.searchsorted(state_codes, v)
            if j < n and state_codes[j] == v:
                src[m] = i
                dst[m] = j
                m += 1
    return src[:m], dst[:m]


_edges_jit = njit(cache=True)(_edges_loop) if HAVE_NUMBA else None


def edges_numpy(state_codes, last, trans, forbidden, A, mod):
    n = state_codes.shape[0]
    src = np.repeat(np.arange(n, dtype=np.int64), A)
    x = np.tile(np.arange(A, dtype=np.int64), n)
    ok = trans[last[src], x]
    src, x = src[ok], x[ok]
    w = state_codes[src] * A + x
    if forbidden.size:
        ok = ~np.isin(w, forbidden)
        src, w = src[ok], w[ok]
    v = w % mod
    j = np.searchsorted(state_codes, v)
    j = np.minimum(j, n - 1)
    ok = state_codes[j] == v
    return src[ok], j[ok]


def edges_numba(state_codes, last, trans, forbidden, A, mod):
    fn = _edges_jit if _edges_jit is not None else _edges_loop
    return fn(state_codes, last, trans, forbidden, A, mod)


def debruijn_edges(state_codes, last, trans, forbidden, A, mod):
    """Edges ``u -> v`` of the overlap graph on sorted state codes.

    ``u`` (a word code) extends by symbol ``x`` when ``trans[last(u), x]``,
    the merged code ``u*A + x`` is not in the sorted ``forbidden`` codes, and
    its suffix ``(u*A + x) % mod`` is a state.
    """
    args = (
        np.ascontiguousarray(state_codes, dtype=np.int64),
        np.ascontiguousarray(last, dtype=np.int64),
        np.ascontiguousarray(trans, dtype=np.bool_),
        np.ascontiguousarray(forbidden, dtype=np.int64),
        int(A),
        int(mod),
    )
    if HAVE_NUMBA:
        return edges_numba(*args)
    return edges_numpy(*args)


# -- Perron root bounds on a weighted sparse graph ----------------------------

def _cw_loop(src, dst, w, n, iters, rtol):
    v = np.ones(n)
    lo = 0.0
    hi = np.inf
    for _ in range(iters):
        y = np.zeros(n)
        for e in range(src.shape[0]):
            y[src[e]] += w[e] * v[dst[e]]
        lo = np.inf
        hi = 0.0
        for i in range(n):
            r = y[i] / v[i]
            if r < lo:
                lo = r
            if r > hi:
                hi = r
        s = 0.0
        for i in range(n):
            s += y[i]
        for i in range(n):
            v[i] = y[i] / s
            if v[i] <= 0.0:
                return 0.0, np.inf
        if hi - lo <= rtol * hi:
            break
    return lo, hi


_cw_jit = njit(cache=True)(_cw_loop) if HAVE_NUMBA else None


def cw_numpy(src, dst, w, n, iters, rtol):
    v = np.ones(n)
    lo, hi = 0.0, np.inf
    for _ in range(iters):
        y = np.bincount(src, weights=w * v[dst], minlength=n)
        if np.any(y <= 0):
            return 0.0, np.inf
        ratio = y / v
        lo, hi = ratio.min(), ratio.max()
        v = y / y.sum()
        if hi - lo <= rtol * hi:
            break
    return lo, hi


def cw_numba(src, dst, w, n, iters, rtol):
    fn = _cw_jit if _cw_jit is not None else _cw_loop
    return fn(src, dst, w, n, iters, rtol)


def perron_bounds(src, dst, w, n, iters=5000, rtol=1e-15):
    """Collatz-Wielandt bounds ``lo <= rho <= hi`` for the matrix ``M[src, dst] += w``.

    Valid for any positive iterate ``v``: ``min (Mv)/v <= rho <= max (Mv)/v``
    when M is irreducible. Power iteration tightens them.
    """
    args = (
        np.ascontiguousarray(src, dtype=np.int64),
        np.ascontiguousarray(dst, dtype=np.int64),
        np.ascontiguousarray(w, dtype=np.float64),
        int(n),
        int(iters),
        float(rtol),
    )
    if HAVE_NUMBA:
        return cw_numba(*args)
    return cw_numpy(*args)


# -- truncated continued fractions in floating point -------------------------

def _cf_loop(digits):
    out = np.empty(digits.shape[0])
    for r in range(digits.shape[0]):
        x = float(digits[r, -1])
        for i in range(digits.shape[1] - 2, -1, -1):
            x = digits[r, i] + 1.0 / x
        out[r] = x
    return out


_cf_jit = njit(cache=True)(_cf_loop) if HAVE_NUMBA else None


def cf_numpy(digits):
    x = digits[:, -1].astype(np.float64)
    for i in range(digits.shape[1] - 2, -1, -1):
        x = digits[:, i] + 1.0 / x
    return x


def cf_numba(digits):
    fn = _cf_jit if _cf_jit is not None else _cf_loop
    return fn(digits)


def truncated_cf(digits):
    """Row-wise float value of ``[d0; d1, ..., dk]`` for a 2-d array of digit rows."""
    digits = np.ascontiguousarray(np.atleast_2d(digits), dtype=np.int64)
    if HAVE_NUMBA:
        return cf_numba(digits)
    return cf_numpy(digits)

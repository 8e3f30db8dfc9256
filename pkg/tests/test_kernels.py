import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from symdyn import _accel, kernels


def random_graph(rng, n, density):
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, True)
    mask[np.arange(n), (np.arange(n) + 1) % n] = True  # a cycle keeps it irreducible
    src, dst = np.nonzero(mask)
    return src, dst, rng.uniform(0.1, 2.0, src.size)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 40), st.floats(0.05, 0.6))
def test_perron_backends_agree(seed, n, density):
    src, dst, w = random_graph(np.random.default_rng(seed), n, density)
    a = kernels.cw_numba(src, dst, w, n, 5000, 1e-15)
    b = kernels.cw_numpy(src, dst, w, n, 5000, 1e-15)
    assert np.allclose(a, b, rtol=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 25))
def test_perron_brackets_spectral_radius(seed, n):
    src, dst, w = random_graph(np.random.default_rng(seed), n, 0.3)
    m = np.zeros((n, n))
    np.add.at(m, (src, dst), w)
    rho = max(abs(np.linalg.eigvals(m)))
    lo, hi = kernels.perron_bounds(src, dst, w, n)
    assert lo * (1 - 1e-12) <= rho <= hi * (1 + 1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4), st.integers(1, 4))
def test_edge_backends_agree(seed, A, L):
    rng = np.random.default_rng(seed)
    mod = A ** L
    states = np.unique(rng.integers(0, mod, size=rng.integers(1, mod + 1)))
    trans = rng.random((A, A)) < 0.7
    last = states % A
    forbidden = np.unique(rng.integers(0, mod * A, size=rng.integers(0, 5)))
    a = kernels.edges_numba(states, last, trans, forbidden, A, mod)
    b = kernels.edges_numpy(states, last, trans, forbidden, A, mod)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_edges_by_hand():
    # states are all words of length 1 over {0, 1}; the word 11 is forbidden
    src, dst = kernels.debruijn_edges([0, 1], [0, 1], np.ones((2, 2), bool), [3], 2, 2)
    assert sorted(zip(src.tolist(), dst.tolist())) == [(0, 0), (0, 1), (1, 0)]


@given(st.lists(st.lists(st.integers(1, 9), min_size=6, max_size=6), min_size=1, max_size=20))
def test_cf_backends_and_exact(rows):
    d = np.array(rows)
    a, b = kernels.cf_numba(d), kernels.cf_numpy(d)
    assert np.allclose(a, b, rtol=1e-14)
    for row, v in zip(rows, a):
        x = Fraction(row[-1])
        for q in reversed(row[:-1]):
            x = q + 1 / x
        assert abs(v - float(x)) <= 1e-14 * float(x)


def test_disable_flag_selects_numpy():
    code = (
        "from symdyn import _accel, kernels;"
        "import numpy as np;"
        "print(_accel.backend(), kernels.perron_bounds([0, 0, 1], [0, 1, 0], [1.0, 1.0, 1.0], 2)[1])"
    )
    env = dict(os.environ, SYMDYN_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, hi = out.stdout.split()
    assert name == "numpy" and abs(float(hi) - (1 + 5 ** 0.5) / 2) < 1e-12


def test_backend_name():
    assert _accel.backend() in ("numba", "numpy")

"""Directed-graph helpers shared by small dense SFTs and large sparse presentations."""
from math import gcd

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


def as_csr(adj):
    if sparse.issparse(adj):
        return sparse.csr_matrix(adj, dtype=bool)
    return sparse.csr_matrix(np.asarray(adj, dtype=bool))


def essential_mask(adj):
    """Vertices lying on some bi-infinite path.

    Repeatedly strips vertices with no successor or no predecessor inside the
    surviving set.
    """
    a = as_csr(adj).astype(np.int32)
    n = a.shape[0]
    alive = np.ones(n, dtype=bool)
    at = a.T.tocsr()
    while True:
        v = alive.astype(np.int32)
        out_deg = a @ v
        in_deg = at @ v
        keep = alive & (out_deg > 0) & (in_deg > 0)
        if keep.sum() == alive.sum():
            return keep
        alive = keep


def _restrict(adj, mask):
    idx = np.flatnonzero(mask)
    a = as_csr(adj)
    return a[idx][:, idx], idx


def is_strongly_connected(adj, mask=None):
    a = as_csr(adj)
    if mask is not None:
        a, _ = _restrict(a, mask)
    if a.shape[0] == 0:
        return False
    ncomp, _ = csgraph.connected_components(a, directed=True, connection="strong")
    return ncomp == 1


def period(adj, mask=None):
    """gcd of cycle lengths of a strongly connected (sub)graph.

    Uses BFS levels: the period is the gcd of ``level[u] + 1 - level[v]`` over
    all edges ``u -> v``.
    """
    a = as_csr(adj)
    if mask is not None:
        a, _ = _restrict(a, mask)
    if a.shape[0] == 0:
        return 0
    dist = csgraph.shortest_path(a, directed=True, unweighted=True, indices=0)
    if not np.all(np.isfinite(dist)):
        raise ValueError("period() needs a strongly connected graph")
    dist = dist.astype(np.int64)
    coo = a.tocoo()
    diffs = np.abs(dist[coo.row] + 1 - dist[coo.col])
    g = 0
    for d in np.unique(diffs):
        g = gcd(g, int(d))
        if g == 1:
            break
    return g


def reachable_from(adj, source):
    a = as_csr(adj)
    order = csgraph.breadth_first_order(a, source, directed=True, return_predecessors=False)
    out = np.zeros(a.shape[0], dtype=bool)
    out[order] = True
    return out

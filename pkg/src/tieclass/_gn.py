"""Compiled kernels for Girvan-Newman dendrogram construction."""

import numpy as np
from numba import njit


@njit(cache=True)
def _csr_alive(n_nodes, edges, alive):
    deg = np.zeros(n_nodes, dtype=np.int64)
    n_alive = 0
    for e in range(edges.shape[0]):
        if alive[e]:
            deg[edges[e, 0]] += 1
            deg[edges[e, 1]] += 1
            n_alive += 1
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    for v in range(n_nodes):
        indptr[v + 1] = indptr[v] + deg[v]
    indices = np.empty(2 * n_alive, dtype=np.int64)
    eids = np.empty(2 * n_alive, dtype=np.int64)
    fill = indptr[:n_nodes].copy()
    for e in range(edges.shape[0]):
        if alive[e]:
            u, v = edges[e, 0], edges[e, 1]
            indices[fill[u]] = v
            eids[fill[u]] = e
            fill[u] += 1
            indices[fill[v]] = u
            eids[fill[v]] = e
            fill[v] += 1
    return indptr, indices, eids


@njit(cache=True)
def _brandes_edge(n_nodes, indptr, indices, eids, bet):
    """Exact unweighted shortest-path edge betweenness, unordered pairs counted once."""
    dist = np.empty(n_nodes, dtype=np.int64)
    sigma = np.empty(n_nodes, dtype=np.float64)
    delta = np.empty(n_nodes, dtype=np.float64)
    queue = np.empty(n_nodes, dtype=np.int64)
    order = np.empty(n_nodes, dtype=np.int64)
    for s in range(n_nodes):
        for v in range(n_nodes):
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        qh, qt, cnt = 0, 0, 0
        queue[qt] = s
        qt += 1
        while qh < qt:
            v = queue[qh]
            qh += 1
            order[cnt] = v
            cnt += 1
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[qt] = w
                    qt += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(cnt - 1, 0, -1):
            w = order[i]
            for ei in range(indptr[w], indptr[w + 1]):
                v = indices[ei]
                if dist[v] == dist[w] - 1:
                    c = sigma[v] / sigma[w] * (1.0 + delta[w])
                    bet[eids[ei]] += c
                    delta[v] += c
    for e in range(bet.shape[0]):
        if bet[e] > 0.0:
            bet[e] *= 0.5


@njit(cache=True)
def _components(n_nodes, indptr, indices, labels):
    """Label connected components 0..K-1 in ascending order of smallest node."""
    for v in range(n_nodes):
        labels[v] = -1
    queue = np.empty(n_nodes, dtype=np.int64)
    lab = 0
    for s in range(n_nodes):
        if labels[s] >= 0:
            continue
        labels[s] = lab
        qh, qt = 0, 0
        queue[qt] = s
        qt += 1
        while qh < qt:
            v = queue[qh]
            qh += 1
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if labels[w] < 0:
                    labels[w] = lab
                    queue[qt] = w
                    qt += 1
        lab += 1
    return lab


@njit(cache=True)
def _modularity(n_nodes, edges, deg0, labels, n_labels):
    m = edges.shape[0]
    if m == 0:
        return 0.0
    e_c = np.zeros(n_labels, dtype=np.float64)
    d_c = np.zeros(n_labels, dtype=np.float64)
    for e in range(m):
        if labels[edges[e, 0]] == labels[edges[e, 1]]:
            e_c[labels[edges[e, 0]]] += 1.0
    for v in range(n_nodes):
        d_c[labels[v]] += deg0[v]
    q = 0.0
    fm = float(m)
    for c in range(n_labels):
        q += e_c[c] / fm - (d_c[c] / (2.0 * fm)) ** 2
    return q


@njit(cache=True)
def gn_dendrogram_kernel(n_nodes, edges, recompute_every):
    """Run the full divisive loop on a small graph with local ids.

    edges must be canonical (u < v) and lexicographically sorted; ties in
    betweenness resolve to the first qualifying edge, i.e. the canonically
    smallest one.  Returns component labels and modularity for the intact
    graph plus one snapshot per removed edge.
    """
    n_edges = edges.shape[0]
    alive = np.ones(n_edges, dtype=np.bool_)
    deg0 = np.zeros(n_nodes, dtype=np.int64)
    for e in range(n_edges):
        deg0[edges[e, 0]] += 1
        deg0[edges[e, 1]] += 1

    labels_steps = np.empty((n_edges + 1, n_nodes), dtype=np.int64)
    q_steps = np.empty(n_edges + 1, dtype=np.float64)
    removed = np.empty((n_edges, 2), dtype=np.int64)

    indptr, indices, eids = _csr_alive(n_nodes, edges, alive)
    k = _components(n_nodes, indptr, indices, labels_steps[0])
    q_steps[0] = _modularity(n_nodes, edges, deg0, labels_steps[0], k)

    bet = np.zeros(n_edges, dtype=np.float64)
    stale = recompute_every
    for step in range(n_edges):
        if stale >= recompute_every:
            indptr, indices, eids = _csr_alive(n_nodes, edges, alive)
            for e in range(n_edges):
                bet[e] = -1.0 if not alive[e] else 0.0
            _brandes_edge(n_nodes, indptr, indices, eids, bet)
            stale = 0
        stale += 1

        bmax = -1.0
        for e in range(n_edges):
            if alive[e] and bet[e] > bmax:
                bmax = bet[e]
        tol = 1e-9 * (bmax if bmax > 1.0 else 1.0)
        pick = -1
        for e in range(n_edges):
            if alive[e] and bet[e] >= bmax - tol:
                pick = e
                break
        alive[pick] = False
        bet[pick] = -1.0
        removed[step, 0] = edges[pick, 0]
        removed[step, 1] = edges[pick, 1]

        indptr2, indices2, _ = _csr_alive(n_nodes, edges, alive)
        k = _components(n_nodes, indptr2, indices2, labels_steps[step + 1])
        q_steps[step + 1] = _modularity(n_nodes, edges, deg0, labels_steps[step + 1], k)

    return labels_steps, q_steps, removed


@njit(cache=True)
def edge_betweenness_kernel(n_nodes, edges):
    alive = np.ones(edges.shape[0], dtype=np.bool_)
    indptr, indices, eids = _csr_alive(n_nodes, edges, alive)
    bet = np.zeros(edges.shape[0], dtype=np.float64)
    _brandes_edge(n_nodes, indptr, indices, eids, bet)
    return bet

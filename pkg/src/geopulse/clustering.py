"""Hierarchical density clustering with cluster-stability extraction.

Mutual-reachability distances (core distance = distance to the
min_samples-th nearest neighbor, self included) feed a minimum spanning
tree; the single-linkage hierarchy is condensed at min_cluster_size and
flat clusters are extracted by excess-of-mass stability. Points outside
every selected cluster are labeled -1. The whole path is deterministic:
ties break on point indexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewPoints


def _pairwise(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    D = np.sqrt(d2)
    return (D + D.T) / 2.0


def _mst_prim(W: np.ndarray) -> list[tuple[float, int, int]]:
    """Deterministic Prim MST over a dense weight matrix, rooted at 0."""
    n = W.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = W[0].copy()
    parent = np.zeros(n, dtype=int)
    in_tree[0] = True
    best[0] = np.inf
    edges = []
    for _ in range(n - 1):
        nxt = int(np.argmin(best))  # ties -> lowest index
        edges.append((float(best[nxt]), int(parent[nxt]), nxt))
        in_tree[nxt] = True
        best[nxt] = np.inf
        improve = W[nxt] < best
        improve &= ~in_tree
        parent[improve] = nxt
        best[improve] = W[nxt][improve]
    return edges


@dataclass
class _Condensed:
    birth: float
    size: int = 0
    children: list = field(default_factory=list)          # cluster ids
    point_exits: list = field(default_factory=list)       # (point, lambda)


def _single_linkage(edges, n):
    """Union-find pass turning sorted MST edges into merge nodes.

    Returns (merges, children) where merges[j] = (left_node, right_node,
    dist, size) and node ids >= n are internal.
    """
    parent = list(range(2 * n - 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    size = [1] * n + [0] * (n - 1)
    current = list(range(2 * n - 1))  # component root -> dendrogram node id
    merges = []
    nxt = n
    for dist, u, v in edges:
        ru, rv = find(u), find(v)
        left, right = current[ru], current[rv]
        merges.append((left, right, dist, size[left] + size[right]))
        size[nxt] = size[left] + size[right]
        parent[ru] = nxt
        parent[rv] = nxt
        current[nxt] = nxt
        nxt += 1
    return merges


def _leaf_points(node, merges, n):
    out = []
    stack = [node]
    while stack:
        node = stack.pop()
        if node < n:
            out.append(node)
        else:
            left, right, _, _ = merges[node - n]
            stack.append(left)
            stack.append(right)
    return out


def _condense(merges, n, min_cluster_size):
    """Collapse the dendrogram into stability clusters."""
    clusters = {0: _Condensed(birth=0.0, size=n)}
    next_id = 1
    root_node = n + len(merges) - 1
    stack = [(root_node, 0)]
    exit_cluster = np.zeros(n, dtype=int)
    while stack:
        node, cid = stack.pop()
        left, right, dist, _ = merges[node - n]
        lam = (1.0 / dist) if dist > 0.0 else np.inf
        lsize = 1 if left < n else merges[left - n][3]
        rsize = 1 if right < n else merges[right - n][3]
        if lsize >= min_cluster_size and rsize >= min_cluster_size:
            for child, csize in ((left, lsize), (right, rsize)):
                child_id = next_id
                next_id += 1
                clusters[child_id] = _Condensed(birth=lam, size=csize)
                clusters[cid].children.append(child_id)
                stack.append((child, child_id))
        else:
            for child, csize in ((left, lsize), (right, rsize)):
                if csize >= min_cluster_size:
                    stack.append((child, cid))
                else:
                    for point in _leaf_points(child, merges, n):
                        clusters[cid].point_exits.append((point, lam))
                        exit_cluster[point] = cid
    return clusters, exit_cluster


def _stability(clusters):
    stab = {}
    for cid, c in clusters.items():
        total = 0.0
        for _, lam in c.point_exits:
            total += lam - c.birth
        for child in c.children:
            total += (clusters[child].birth - c.birth) * clusters[child].size
        stab[cid] = total
    return stab


def _select_eom(clusters, stab):
    """Excess-of-mass selection over non-root clusters."""
    selected = set()
    value = {}
    order = sorted(clusters, reverse=True)  # children have larger ids than parents
    for cid in order:
        c = clusters[cid]
        child_sum = sum(value[ch] for ch in c.children)
        if cid == 0:
            value[cid] = child_sum
            continue
        if not c.children or stab[cid] >= child_sum:
            value[cid] = stab[cid]
            selected.add(cid)
            # unselect all descendants
            stack = list(c.children)
            while stack:
                d = stack.pop()
                selected.discard(d)
                stack.extend(clusters[d].children)
        else:
            value[cid] = child_sum
    return selected


def cluster(vectors: np.ndarray, min_cluster_size: int, min_samples: int | None = None) -> np.ndarray:
    """Density-based topic assignment; -1 marks noise.

    min_cluster_size must be at least 2; min_samples defaults to
    min_cluster_size (clamped to the point count).
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if min_cluster_size < 2:
        raise ValueError("min_cluster_size must be >= 2")
    if n < min_cluster_size:
        raise TooFewPoints(f"{n} points < min_cluster_size {min_cluster_size}")
    if min_samples is None:
        min_samples = min_cluster_size
    min_samples = max(1, min(min_samples, n))

    D = _pairwise(X)
    core = np.sort(D, axis=1)[:, min_samples - 1]
    mutual = np.maximum(np.maximum(core[:, None], core[None, :]), D)
    edges = _mst_prim(mutual)
    edges.sort(key=lambda e: (e[0], min(e[1], e[2]), max(e[1], e[2])))
    merges = _single_linkage(edges, n)
    clusters, exit_cluster = _condense(merges, n, min_cluster_size)
    stab = _stability(clusters)
    selected = _select_eom(clusters, stab)

    labels = np.full(n, -1, dtype=int)
    if not selected:
        # hierarchy never split into two viable clusters: everything is one topic
        labels[:] = 0
        return labels

    # map each point's exit cluster to the nearest selected ancestor
    parent_of = {}
    for cid, c in clusters.items():
        for child in c.children:
            parent_of[child] = cid
    resolve_cache: dict[int, int] = {}

    def resolve(cid: int) -> int:
        if cid in resolve_cache:
            return resolve_cache[cid]
        cur = cid
        while cur != 0 and cur not in selected:
            cur = parent_of[cur]
        hit = cur if cur in selected else -1
        resolve_cache[cid] = hit
        return hit

    member_sets: dict[int, list[int]] = {}
    for point in range(n):
        hit = resolve(int(exit_cluster[point]))
        if hit != -1:
            member_sets.setdefault(hit, []).append(point)

    ordered = sorted(member_sets.items(), key=lambda kv: (-len(kv[1]), min(kv[1])))
    for topic, (_, members) in enumerate(ordered):
        labels[members] = topic
    return labels

"""Agglomerative hierarchical clustering and dendrograms.

Used for the 400 membrane points (value + uncertainty features) and the 35
parameters (spatial sensitivity signatures).  Euclidean metric with
average, single or complete linkage via Lance-Williams updates; ties merge
the pair with the lexicographically smallest (min id, max id).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINKAGES = ("average", "single", "complete")


@dataclass
class Dendrogram:
    """Binary merge tree: leaves 0..n-1, internal nodes n..2n-2."""

    n_leaves: int
    merges: list  # (left id, right id, height), n-1 entries in merge order

    def __post_init__(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError("a dendrogram over n leaves needs exactly n-1 merges")

    def to_dict(self) -> dict:
        """Nested-tree structure with node ids and heights (service schema)."""
        nodes = {i: {"id": i, "height": 0.0} for i in range(self.n_leaves)}
        for k, (left, right, height) in enumerate(self.merges):
            node_id = self.n_leaves + k
            nodes[node_id] = {
                "id": node_id,
                "height": float(height),
                "children": [nodes.pop(left), nodes.pop(right)],
            }
        (root,) = nodes.values()
        return root

    def leaves_under(self) -> dict:
        """Node id -> sorted leaf ids below it (leaves map to themselves)."""
        below = {i: [i] for i in range(self.n_leaves)}
        for k, (left, right, _) in enumerate(self.merges):
            below[self.n_leaves + k] = sorted(below[left] + below[right])
        return below


def hcluster(points, linkage: str = "average") -> Dendrogram:
    """Agglomerative clustering over Euclidean distances."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) < 2:
        raise ValueError("need at least 2 points of equal dimension")
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    n = len(points)
    diff = points[:, None, :] - points[None, :, :]
    work = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(work, np.inf)

    row_node = np.arange(n)  # working row -> current node id (-1 when retired)
    sizes = np.ones(n)
    alive = np.ones(n, dtype=bool)
    merges = []
    for step in range(n - 1):
        d_min = work.min()
        cand = np.argwhere(work == d_min)
        cand = cand[cand[:, 0] < cand[:, 1]]
        pairs = np.sort(row_node[cand], axis=1)
        ra, rb = cand[np.lexsort((pairs[:, 1], pairs[:, 0]))[0]]
        a, b = sorted((int(row_node[ra]), int(row_node[rb])))

        others = alive.copy()
        others[[ra, rb]] = False
        if linkage == "single":
            d_new = np.minimum(work[ra, others], work[rb, others])
        elif linkage == "complete":
            d_new = np.maximum(work[ra, others], work[rb, others])
        else:
            sa, sb = sizes[ra], sizes[rb]
            d_new = (sa * work[ra, others] + sb * work[rb, others]) / (sa + sb)
        work[ra, others] = d_new
        work[others, ra] = d_new
        work[rb, :] = np.inf
        work[:, rb] = np.inf
        sizes[ra] += sizes[rb]
        alive[rb] = False
        row_node[ra] = n + step
        row_node[rb] = -1
        merges.append((a, b, float(d_min)))
    return Dendrogram(n, merges)


def cut(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Labels after undoing the last k-1 merges; label order follows the
    ascending smallest leaf id of each cluster."""
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    parent = list(range(2 * n - 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for idx, (left, right, _) in enumerate(dendrogram.merges[: n - k]):
        parent[find(left)] = n + idx
        parent[find(right)] = n + idx

    first_leaf = {}
    for leaf in range(n):
        first_leaf.setdefault(find(leaf), leaf)
    label_of = {root: lbl for lbl, root in enumerate(sorted(first_leaf, key=first_leaf.get))}
    return np.array([label_of[find(leaf)] for leaf in range(n)])


def spatial_clusters(profile, uncertainty_std=None, weights=(1.0, 1.0),
                     linkage: str = "average") -> Dendrogram:
    """Cluster the 400 points on (normalized value, normalized std) features.

    Feature weights (1,0) / (0,1) give the value-only and uncertainty-only
    trees; degenerate ranges map to an all-zero feature.
    """
    profile = np.asarray(profile, dtype=float)
    std = np.zeros_like(profile) if uncertainty_std is None else np.asarray(uncertainty_std, float)
    if profile.shape != std.shape:
        raise ValueError("profile and uncertainty lengths differ")
    spread = profile.max() - profile.min()
    value_feat = profile / spread if spread > 0 else np.zeros_like(profile)
    max_std = std.max()
    std_feat = std / max_std if max_std > 0 else np.zeros_like(std)
    features = np.stack([weights[0] * value_feat, weights[1] * std_feat], axis=1)
    return hcluster(features, linkage)


def parameter_clusters(sens_map, linkage: str = "average") -> Dendrogram:
    """Cluster the 35 parameters on their max-normalized sensitivity columns."""
    sens_map = np.asarray(sens_map, dtype=float)
    peak = sens_map.max()
    if peak <= 0:
        raise ValueError("sensitivity map is all zero")
    return hcluster(sens_map.T / peak, linkage)

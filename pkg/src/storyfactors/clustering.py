"""Agglomerative clustering of factor-space point clouds.

Two criteria: Ward minimum variance (unconstrained), whose merge height
is the inertia increase dI = (m_a m_b / (m_a + m_b)) ||c_a - c_b||^2, and
chronology-constrained complete link, where only clusters adjacent in
the sequence may merge and the height is the maximum pairwise Euclidean
distance.  Both use Lance-Williams cost updates on a full matrix and are
monotone.  Nodes are numbered like scipy: leaves 0..n-1 in chronological
order, merge t creates node n+t.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class PointCloud:
    labels: tuple[str, ...]
    coords: np.ndarray  # n x d
    masses: np.ndarray | None = None  # default unit masses

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[0] != len(self.labels):
            raise ValueError(f"coords shape {coords.shape} does not fit {len(self.labels)} labels")
        masses = self.masses
        if masses is None:
            masses = np.ones(len(self.labels))
        else:
            masses = np.asarray(masses, dtype=float)
            if masses.shape != (len(self.labels),) or (masses <= 0).any():
                raise ValueError("masses must be positive, one per point")
        coords.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return len(self.labels)

    def inertia(self) -> float:
        """Mass-weighted sum of squared distances to the centroid."""
        centroid = self.masses @ self.coords / self.masses.sum()
        return float(np.sum(self.masses * np.sum((self.coords - centroid) ** 2, axis=1)))


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree: (left_node, right_node, height, new_node_size) per step."""

    merges: tuple[tuple[int, int, float, int], ...]
    n_leaves: int
    criterion: str  # "ward" or "constrained_complete"
    labels: tuple[str, ...]  # leaf labels in chronological order

    def __post_init__(self) -> None:
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError(f"{len(self.merges)} merges for {self.n_leaves} leaves")
        if len(self.labels) != self.n_leaves:
            raise ValueError("one label per leaf required")
        seen: set[int] = set()
        for left, right, _height, _size in self.merges:
            for child in (left, right):
                if child in seen:
                    raise ValueError(f"node {child} merged twice")
                seen.add(child)

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(m[2] for m in self.merges)


@dataclass(frozen=True)
class Partition:
    """Assignment label -> cluster id 1..k, ids ordered by earliest member."""

    k: int
    assignment: dict[str, int]
    degenerate: bool = False

    def members(self, cluster_id: int) -> list[str]:
        return [label for label, cid in self.assignment.items() if cid == cluster_id]


def _pair_costs_ward(coords: np.ndarray, masses: np.ndarray) -> np.ndarray:
    sq = np.sum(coords**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * coords @ coords.T
    d2 = (d2 + d2.T) * 0.5  # gemm output is not bitwise symmetric
    np.clip(d2, 0.0, None, out=d2)
    weight = masses[:, None] * masses[None, :] / (masses[:, None] + masses[None, :])
    return weight * d2


def ward_cluster(cloud: PointCloud) -> Dendrogram:
    """Agglomerate by minimum inertia increase; heights are the increases.

    Ties go to the pair whose (earliest-member, earliest-member) positions
    are lexicographically smallest.
    """
    n = len(cloud)
    if n < 2:
        raise ValueError("clustering needs at least 2 points")
    cost = _pair_costs_ward(cloud.coords, cloud.masses)
    np.fill_diagonal(cost, np.inf)
    masses = cloud.masses.copy()
    active = np.ones(n, dtype=bool)
    node_id = list(range(n))
    first = list(range(n))  # earliest leaf position per slot
    sizes = [1] * n
    merges: list[tuple[int, int, float, int]] = []

    for step in range(n - 1):
        masked = np.where(active[:, None] & active[None, :], cost, np.inf)
        best = masked.min()
        ii, jj = np.nonzero(masked == best)
        best_key = None
        for a_, b_ in zip(ii.tolist(), jj.tolist()):
            a_, b_ = (a_, b_) if a_ < b_ else (b_, a_)
            key = (first[a_], first[b_]) if first[a_] < first[b_] else (first[b_], first[a_])
            if best_key is None or key < best_key:
                pair, best_key = (a_, b_), key
        a, b = pair
        ma, mb = masses[a], masses[b]
        merges.append((min(node_id[a], node_id[b]), max(node_id[a], node_id[b]), float(best), sizes[a] + sizes[b]))
        # Lance-Williams update for Ward costs, written into slot a.
        other = active.copy()
        other[[a, b]] = False
        mo = masses[other]
        cost[a, other] = (
            (ma + mo) * cost[a, other] + (mb + mo) * cost[b, other] - mo * best
        ) / (ma + mb + mo)
        cost[other, a] = cost[a, other]
        active[b] = False
        masses[a] = ma + mb
        sizes[a] += sizes[b]
        first[a] = min(first[a], first[b])
        node_id[a] = n + step
    return Dendrogram(tuple(merges), n, "ward", cloud.labels)


def constrained_complete_link(
    cloud: PointCloud, order: Sequence[str] | None = None
) -> Dendrogram:
    """Complete-link agglomeration restricted to chronologically adjacent pairs.

    ``order`` permutes the labels into chronological sequence (identity by
    default).  Every cluster at every stage is an interval of the sequence.
    Ties go to the leftmost adjacent pair.
    """
    n = len(cloud)
    if n < 2:
        raise ValueError("clustering needs at least 2 points")
    if order is None:
        perm = list(range(n))
    else:
        if sorted(order) != sorted(cloud.labels):
            raise ValueError("order must be a permutation of the cloud labels")
        position = {label: i for i, label in enumerate(cloud.labels)}
        perm = [position[label] for label in order]
    coords = cloud.coords[perm]
    labels = tuple(cloud.labels[i] for i in perm)

    diff = coords[:, None, :] - coords[None, :, :]
    cost = np.sqrt(np.sum(diff**2, axis=2))
    np.fill_diagonal(cost, np.inf)
    # ``chain`` holds the active clusters left to right as slot indices.
    chain = list(range(n))
    node_id = list(range(n))
    sizes = [1] * n
    merges: list[tuple[int, int, float, int]] = []

    for step in range(n - 1):
        adjacent = [(chain[t], chain[t + 1]) for t in range(len(chain) - 1)]
        costs = np.array([cost[a, b] for a, b in adjacent])
        t = int(np.argmin(costs))  # argmin returns the leftmost tie
        a, b = adjacent[t]
        height = float(costs[t])
        merges.append((min(node_id[a], node_id[b]), max(node_id[a], node_id[b]), height, sizes[a] + sizes[b]))
        others = [s for s in chain if s not in (a, b)]
        if others:
            cost[a, others] = np.maximum(cost[a, others], cost[b, others])
            cost[others, a] = cost[a, others]
        chain.pop(t + 1)
        sizes[a] += sizes[b]
        node_id[a] = n + step
    return Dendrogram(tuple(merges), n, "constrained_complete", labels)


def _components(dendrogram: Dendrogram, n_merges: int) -> list[list[int]]:
    """Leaf index sets of the forest after applying the first ``n_merges`` merges."""
    n = dendrogram.n_leaves
    nodes: dict[int, list[int]] = {i: [i] for i in range(n)}
    for step in range(n_merges):
        left, right, _height, _size = dendrogram.merges[step]
        nodes[n + step] = nodes.pop(left) + nodes.pop(right)
    return sorted(nodes.values(), key=min)


def cut_k(dendrogram: Dendrogram, k: int, degenerate: bool = False) -> Partition:
    """Partition into ``k`` clusters by undoing the last ``k - 1`` merges.

    Cluster ids follow the chronological position of each cluster's
    earliest member.
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    components = _components(dendrogram, n - k)
    cluster_of = {}
    for cid, component in enumerate(components, start=1):
        for leaf in component:
            cluster_of[leaf] = cid
    assignment = {dendrogram.labels[i]: cluster_of[i] for i in range(n)}
    return Partition(k, assignment, degenerate)


def cut_max_gap(dendrogram: Dendrogram) -> Partition:
    """Cut where successive merge heights jump the most.

    k maximizes height[n-k+1] - height[n-k] over k = 2..n-1, ties taking
    the smaller k; if all heights are equal the partition is returned at
    k = 2 with the ``degenerate`` flag set.
    """
    n = dendrogram.n_leaves
    if n < 3:
        raise ValueError("max-gap cut needs at least 3 leaves")
    heights = dendrogram.heights
    best_k, best_gap = 2, -np.inf
    for k in range(2, n):
        gap = heights[n - k] - heights[n - k - 1]
        if gap > best_gap:
            best_k, best_gap = k, gap
    if best_gap == 0.0:
        return cut_k(dendrogram, 2, degenerate=True)
    return cut_k(dendrogram, best_k)


def dendrogram_to_text(dendrogram: Dendrogram) -> str:
    """Replayable text form: header, leaf list, then one merge per line."""
    out = io.StringIO()
    out.write(f"criterion {dendrogram.criterion}\n")
    out.write(f"leaves {dendrogram.n_leaves}\n")
    for i, label in enumerate(dendrogram.labels):
        out.write(f"leaf {i} {label}\n")
    for left, right, height, size in dendrogram.merges:
        out.write(f"merge {left} {right} {height!r} {size}\n")
    return out.getvalue()


def dendrogram_from_text(text: str) -> Dendrogram:
    """Parse :func:`dendrogram_to_text` output; exact round-trip."""
    criterion = ""
    n = 0
    labels: list[str] = []
    merges: list[tuple[int, int, float, int]] = []
    for line in text.splitlines():
        kind, _, rest = line.partition(" ")
        if kind == "criterion":
            criterion = rest
        elif kind == "leaves":
            n = int(rest)
        elif kind == "leaf":
            _idx, _, label = rest.partition(" ")
            labels.append(label)
        elif kind == "merge":
            left, right, height, size = rest.split()
            merges.append((int(left), int(right), float(height), int(size)))
        elif line.strip():
            raise ValueError(f"unrecognized dendrogram line: {line!r}")
    return Dendrogram(tuple(merges), n, criterion, tuple(labels))


def partition_to_csv(partition: Partition) -> str:
    """CSV ``label,cluster`` in assignment (chronological) order."""
    lines = ["label,cluster"]
    lines += [f"{label},{cid}" for label, cid in partition.assignment.items()]
    return "\n".join(lines) + "\n"

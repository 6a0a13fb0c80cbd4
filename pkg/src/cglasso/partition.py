"""Partitions of feature indices and the union-find used to build them."""
import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DimensionMismatch


class DisjointSet:
    """Union-find over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i):
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return True

    def groups(self):
        out = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


@dataclass(frozen=True)
class Partition:
    """Disjoint clusters covering ``0..p-1``.

    Clusters are stored canonically: each sorted, and the list sorted by
    smallest member, so two partitions compare equal iff they are the same
    set of sets.
    """

    p: int
    clusters: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        clusters = tuple(sorted(tuple(sorted(int(i) for i in c)) for c in self.clusters))
        seen = [i for c in clusters for i in c]
        if any(len(c) == 0 for c in clusters):
            raise ValueError("empty cluster")
        if sorted(seen) != list(range(self.p)):
            raise ValueError("clusters must be disjoint and cover 0..p-1")
        object.__setattr__(self, "clusters", clusters)

    @classmethod
    def from_labels(cls, labels):
        labels = np.asarray(labels)
        groups = {}
        for i, lab in enumerate(labels.tolist()):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(groups.values()))

    @classmethod
    def singletons(cls, p):
        return cls(p, tuple((i,) for i in range(p)))

    @property
    def k(self):
        return len(self.clusters)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def labels(self):
        """Cluster index of every feature, numbered in canonical order."""
        out = np.empty(self.p, dtype=int)
        for k, c in enumerate(self.clusters):
            out[list(c)] = k
        return out

    def sizes(self):
        return [len(c) for c in self.clusters]

    def to_json(self):
        return json.dumps([list(c) for c in self.clusters])

    @classmethod
    def from_json(cls, text):
        clusters = json.loads(text)
        return cls(sum(len(c) for c in clusters), tuple(tuple(c) for c in clusters))


def components_of_graph(adjacency):
    """Connected components of the graph with boolean ``adjacency``."""
    adjacency = np.asarray(adjacency, dtype=bool)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise DimensionMismatch("adjacency must be square")
    p = adjacency.shape[0]
    ds = DisjointSet(p)
    rows, cols = np.nonzero(np.triu(adjacency, 1) | np.triu(adjacency.T, 1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        ds.union(i, j)
    return Partition(p, tuple(tuple(g) for g in ds.groups()))

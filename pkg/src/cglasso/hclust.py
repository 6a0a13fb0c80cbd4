"""Agglomerative clustering on a similarity matrix.

Heights are similarities, so a dendrogram's merge heights decrease as
clusters grow. Cutting at ``lam`` keeps the merges whose height is strictly
greater than ``lam``; for single linkage this reproduces the connected
components of the graph ``{(i, j): sim[i, j] > lam}``.
"""
import enum
import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .covariance import check_symmetric
from .errors import InvalidK, SingleLeaf
from .partition import DisjointSet, Partition


class LinkageMethod(str, enum.Enum):
    SINGLE = "single"
    AVERAGE = "average"
    COMPLETE = "complete"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"slc": "single", "alc": "average", "clc": "complete"}
        key = str(value).lower()
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class Dendrogram:
    """Merge history over ``p`` leaves.

    Leaves have ids ``0..p-1``; merge ``k`` creates id ``p + k``. Each merge
    is ``(left, right, height)`` with ``left < right``.
    """

    p: int
    merges: Tuple[Tuple[int, int, float], ...]

    def __post_init__(self):
        merges = tuple((int(a), int(b), float(h)) for a, b, h in self.merges)
        if self.p < 1 or len(merges) != self.p - 1:
            raise ValueError(f"{len(merges)} merges for {self.p} leaves")
        used = set()
        for k, (a, b, _) in enumerate(merges):
            for c in (a, b):
                if c in used or not 0 <= c < self.p + k:
                    raise ValueError(f"merge {k} uses invalid or repeated id {c}")
                used.add(c)
        object.__setattr__(self, "merges", merges)

    @property
    def heights(self):
        return np.array([h for _, _, h in self.merges])

    def to_json(self):
        return json.dumps({
            "p": self.p,
            "merges": [{"left": a, "right": b, "height": h} for a, b, h in self.merges],
        })

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(obj["p"], tuple((m["left"], m["right"], m["height"]) for m in obj["merges"]))


def agglomerate(sim, method="single"):
    """Build the dendrogram by repeatedly merging the most similar pair.

    Inter-cluster similarity is the max (single), mean (average) or min
    (complete) of the pairwise entries. Ties go to the pair whose sorted
    cluster-id tuple is lexicographically smallest.
    """
    method = LinkageMethod.parse(method)
    sim = check_symmetric(sim)
    p = sim.shape[0]
    d = sim.copy()
    np.fill_diagonal(d, -np.inf)
    ids = np.arange(p)
    sizes = np.ones(p)
    active = np.ones(p, dtype=bool)
    merges = []
    for k in range(p - 1):
        masked = np.where(active[:, None] & active[None, :], d, -np.inf)
        best = masked.max()
        rows, cols = np.nonzero(masked == best)
        keep = rows < cols
        rows, cols = rows[keep], cols[keep]
        pairs = np.sort(np.stack([ids[rows], ids[cols]], axis=1), axis=1)
        pick = np.lexsort((pairs[:, 1], pairs[:, 0]))[0]
        a, b = rows[pick], cols[pick]
        merges.append((int(pairs[pick, 0]), int(pairs[pick, 1]), float(best)))

        if method is LinkageMethod.SINGLE:
            row = np.maximum(d[a], d[b])
        elif method is LinkageMethod.COMPLETE:
            row = np.minimum(d[a], d[b])
        else:
            row = (sizes[a] * d[a] + sizes[b] * d[b]) / (sizes[a] + sizes[b])
        d[a, :] = row
        d[:, a] = row
        d[a, a] = -np.inf
        active[b] = False
        sizes[a] += sizes[b]
        ids[a] = p + k
    return Dendrogram(p, tuple(merges))


def _apply_merges(d, merges):
    ds = DisjointSet(2 * d.p - 1)
    for k, (a, b, _) in merges:
        ds.union(a, d.p + k)
        ds.union(b, d.p + k)
    groups = {}
    for leaf in range(d.p):
        groups.setdefault(ds.find(leaf), []).append(leaf)
    return Partition(d.p, tuple(tuple(g) for g in groups.values()))


def cut_height(d, lam):
    """Clusters joined by merges with height strictly above ``lam``."""
    return _apply_merges(d, [(k, m) for k, m in enumerate(d.merges) if m[2] > lam])


def cut_k(d, k):
    """Undo the last ``k - 1`` merges, leaving exactly ``k`` clusters."""
    if not 1 <= int(k) <= d.p:
        raise InvalidK(f"k={k} outside [1, {d.p}]")
    return _apply_merges(d, list(enumerate(d.merges))[: d.p - int(k)])


def lambda_bar(d):
    """Height of the final merge: the smallest cut that splits the root."""
    if d.p < 2:
        raise SingleLeaf("a single leaf has no merge")
    return d.merges[-1][2]

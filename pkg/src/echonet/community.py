"""Community detection on weighted page graphs.

Four algorithms: greedy modularity agglomeration, multi-level local moving,
random-walk agglomeration, and label propagation. All operate on weighted
graphs (weights are common-user counts) and return total partitions with
contiguous community ids. The agglomerative algorithms also return the merge
dendrogram with the modularity-optimal cut marked.
"""

from __future__ import annotations

import csv
import heapq
import io
import random
import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import Partition, ProjectionGraph

MAX_LP_SWEEPS = 1000


class ConvergenceWarning(UserWarning):
    """Emitted when an iterative algorithm hits its sweep limit."""


def modularity(g: ProjectionGraph, p: Partition) -> float:
    """Newman modularity Q of a partition of a weighted graph.

    Q = sum_c (w_c / m - (s_c / 2m)^2) with w_c the within-community edge
    weight, s_c the community strength and m the total edge weight.
    """
    if set(p.nodes) != set(g.nodes):
        raise ValueError("partition does not cover the graph's node set")
    m = g.total_weight
    if m == 0:
        raise ValueError("modularity undefined for a graph with zero total weight")
    com = p.as_dict()
    within = [0] * p.n_communities
    strength = [0] * p.n_communities
    for i, node in enumerate(g.nodes):
        strength[com[node]] += int(g.strengths[i])
    for i, j, w in g.edges():
        if com[g.nodes[i]] == com[g.nodes[j]]:
            within[com[g.nodes[i]]] += w
    two_m = 2.0 * m
    return sum(wc / m - (sc / two_m) ** 2 for wc, sc in zip(within, strength))


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history; merge t joins two live ids into id n + t."""

    merges: tuple[tuple[int, int, float], ...]
    leaf_count: int
    best_step: int
    best_score: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "comm_a", "comm_b", "score"])
        for step, (a, b, score) in enumerate(self.merges, start=1):
            w.writerow([step, a, b, repr(score)])
        return buf.getvalue()


class _Agglomeration:
    """Bookkeeping shared by the agglomerative algorithms.

    Tracks per-community size, strength, internal weight, between-community
    weights, a representative min page id for deterministic tie-breaks, the
    incremental modularity after each merge, and the merge list for replay.
    """

    def __init__(self, g: ProjectionGraph):
        n = g.n_nodes
        self.g = g
        self.m = float(g.total_weight)
        self.size = [1] * n
        self.minid = list(g.nodes)
        self.strength = [float(s) for s in g.strengths]
        self.internal = [0.0] * n
        self.between: list[dict[int, float]] = [dict() for _ in range(n)]
        for i, j, w in g.edges():
            self.between[i][j] = float(w)
            self.between[j][i] = float(w)
        self.alive = set(range(n))
        self.merges: list[tuple[int, int, float]] = []
        self.parent_pairs: list[tuple[int, int]] = []
        two_m = 2.0 * self.m
        self.q = -sum((s / two_m) ** 2 for s in self.strength)
        self.best_q = self.q
        self.best_step = 0

    def pair_key(self, a: int, b: int):
        ida, idb = self.minid[a], self.minid[b]
        return (ida, idb) if ida <= idb else (idb, ida)

    def delta_q(self, a: int, b: int) -> float:
        w_ab = self.between[a].get(b, 0.0)
        return w_ab / self.m - self.strength[a] * self.strength[b] / (2.0 * self.m ** 2)

    def merge(self, a: int, b: int) -> int:
        new = len(self.size)
        w_ab = self.between[a].get(b, 0.0)
        self.q += self.delta_q(a, b)
        self.size.append(self.size[a] + self.size[b])
        self.minid.append(min(self.minid[a], self.minid[b]))
        self.strength.append(self.strength[a] + self.strength[b])
        self.internal.append(self.internal[a] + self.internal[b] + w_ab)
        nb: dict[int, float] = {}
        for old in (a, b):
            for c, w in self.between[old].items():
                if c in (a, b) or c not in self.alive:
                    continue
                nb[c] = nb.get(c, 0.0) + w
        self.between.append(nb)
        for c, w in nb.items():
            self.between[c][new] = w
        self.alive.discard(a)
        self.alive.discard(b)
        self.alive.add(new)
        self.merges.append((a, b, self.q))
        self.parent_pairs.append((a, b))
        if self.q >= self.best_q:  # ties prefer the later (merged) cut
            self.best_q = self.q
            self.best_step = len(self.merges)
        return new

    def partition_at(self, step: int) -> Partition:
        n = self.g.n_nodes
        parent = list(range(n + step))
        for t in range(step):
            a, b = self.parent_pairs[t]
            parent[a] = n + t
            parent[b] = n + t
        labels = []
        for v in range(n):
            r = v
            while parent[r] != r:
                r = parent[r]
            labels.append(r)
        return Partition.from_labels(self.g.nodes, labels)

    def dendrogram(self, best_score: float) -> Dendrogram:
        return Dendrogram(tuple(self.merges), self.g.n_nodes, self.best_step, best_score)


def _require_weight(g: ProjectionGraph) -> None:
    if g.n_nodes == 0:
        raise ValueError("graph is empty")
    if g.total_weight <= 0:
        raise ValueError("graph has zero total weight")


def fastgreedy(g: ProjectionGraph) -> tuple[Partition, Dendrogram]:
    """Greedy modularity agglomeration.

    Starts from singleton communities and repeatedly merges the adjacent pair
    with the largest modularity gain (ties: lowest min-page-id pair, then the
    other page id); the returned partition is the dendrogram cut with maximum
    modularity. Communities in different components are never merged.
    """
    _require_weight(g)
    agg = _Agglomeration(g)
    heap: list = []
    for i, j, _w in g.edges():
        key = agg.pair_key(i, j)
        heapq.heappush(heap, (-agg.delta_q(i, j), key[0], key[1], i, j))
    while heap:
        _negdq, _k0, _k1, a, b = heapq.heappop(heap)
        if a not in agg.alive or b not in agg.alive:
            continue
        new = agg.merge(a, b)
        for c in agg.between[new]:
            key = agg.pair_key(new, c)
            heapq.heappush(heap, (-agg.delta_q(new, c), key[0], key[1], new, c))
    part = agg.partition_at(agg.best_step)
    return part, agg.dendrogram(modularity(g, part))


def louvain(g: ProjectionGraph, seed: int = 0) -> Partition:
    """Multi-level modularity optimization (local moves + aggregation).

    Each pass visits nodes in a seed-shuffled order and moves a node to the
    neighboring community with the largest positive modularity gain; when a
    full pass moves nothing, communities are collapsed into supernodes and the
    procedure repeats on the aggregated graph.
    """
    _require_weight(g)
    rng = random.Random(seed)
    m = float(g.total_weight)

    # level-local adjacency: neighbor weights plus self-loop internal weight
    adj: list[dict[int, float]] = [
        {j: float(w) for j, w in nb.items()} for nb in g.adj]
    loops = [0.0] * g.n_nodes
    assignment = list(range(g.n_nodes))  # original node -> current supernode

    while True:
        n = len(adj)
        strength = [sum(nb.values()) + 2.0 * loops[v] for v, nb in enumerate(adj)]
        com = list(range(n))
        com_tot = strength[:]
        moved_any = False
        while True:
            moved = False
            order = list(range(n))
            rng.shuffle(order)
            for v in order:
                cv = com[v]
                w_to: dict[int, float] = {cv: 0.0}
                for u, w in adj[v].items():
                    w_to[com[u]] = w_to.get(com[u], 0.0) + w
                com_tot[cv] -= strength[v]
                best_c, best_gain = cv, w_to[cv] - com_tot[cv] * strength[v] / (2.0 * m)
                for c in sorted(w_to):
                    if c == cv:
                        continue
                    gain = w_to[c] - com_tot[c] * strength[v] / (2.0 * m)
                    if gain > best_gain:
                        best_gain, best_c = gain, c
                com_tot[best_c] += strength[v]
                com[v] = best_c
                if best_c != cv:
                    moved = True
                    moved_any = True
            if not moved:
                break
        if not moved_any:
            break
        # aggregate communities into supernodes, ordered by first occurrence
        remap: dict[int, int] = {}
        for v in range(n):
            if com[v] not in remap:
                remap[com[v]] = len(remap)
        k = len(remap)
        new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
        new_loops = [0.0] * k
        for v in range(n):
            cv = remap[com[v]]
            new_loops[cv] += loops[v]
            for u, w in adj[v].items():
                cu = remap[com[u]]
                if cu == cv:
                    if u > v:
                        new_loops[cv] += w
                else:
                    new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
        assignment = [remap[com[s]] for s in assignment]
        adj, loops = new_adj, new_loops
        if len(adj) == n:
            break
    return Partition.from_labels(g.nodes, assignment)


def walktrap(g: ProjectionGraph, steps: int = 4) -> tuple[Partition, Dendrogram]:
    """Random-walk agglomeration.

    Each node gets the probability vector of a ``steps``-length random walk
    (transition w_ij / s_i); adjacent communities are merged Ward-style by the
    minimal increase in mean squared walk distance, and the returned partition
    is the dendrogram cut with maximum modularity. Isolated nodes stay
    singletons.
    """
    if steps <= 0:
        raise ValueError(f"steps must be positive, got {steps}")
    _require_weight(g)
    n = g.n_nodes
    W = np.zeros((n, n))
    for i, j, w in g.edges():
        W[i, j] = w
        W[j, i] = w
    s = np.asarray(g.strengths, dtype=float)
    P = np.where(s[:, None] > 0, W / np.where(s[:, None] > 0, s[:, None], 1.0), 0.0)
    for v in np.flatnonzero(s == 0):
        P[v, v] = 1.0
    Pt = np.linalg.matrix_power(P, steps)
    inv_d = np.where(s > 0, 1.0 / np.where(s > 0, s, 1.0), 0.0)

    agg = _Agglomeration(g)
    vec_sum = {v: Pt[v].copy() for v in range(n)}

    def ward_dist(a: int, b: int) -> float:
        diff = vec_sum[a] / agg.size[a] - vec_sum[b] / agg.size[b]
        factor = agg.size[a] * agg.size[b] / (agg.size[a] + agg.size[b]) / n
        return factor * float(np.dot(diff * diff, inv_d))

    dsigma: dict[tuple[int, int], float] = {}
    heap: list = []

    def push(a: int, b: int, ds: float) -> None:
        dsigma[(a, b) if a < b else (b, a)] = ds
        key = agg.pair_key(a, b)
        heapq.heappush(heap, (ds, key[0], key[1], a, b))

    for i, j, _w in g.edges():
        push(i, j, ward_dist(i, j))

    while heap:
        ds_ab, _k0, _k1, a, b = heapq.heappop(heap)
        if a not in agg.alive or b not in agg.alive:
            continue
        neighbors_a = set(agg.between[a]) & agg.alive
        neighbors_b = set(agg.between[b]) & agg.alive
        new = agg.merge(a, b)
        vec_sum[new] = vec_sum.pop(a) + vec_sum.pop(b)
        for c in sorted(agg.between[new]):
            if c in neighbors_a and c in neighbors_b:
                ka = (a, c) if a < c else (c, a)
                kb = (b, c) if b < c else (c, b)
                ds = ((agg.size[a] + agg.size[c]) * dsigma[ka]
                      + (agg.size[b] + agg.size[c]) * dsigma[kb]
                      - agg.size[c] * ds_ab) / (agg.size[new] + agg.size[c])
            else:
                ds = ward_dist(new, c)
            push(new, c, ds)
    part = agg.partition_at(agg.best_step)
    return part, agg.dendrogram(modularity(g, part))


def label_propagation(g: ProjectionGraph, seed: int = 0) -> Partition:
    """Asynchronous weighted label propagation.

    Every node starts with a unique label; nodes are visited in a seed-shuffled
    order each sweep and adopt the label with the largest total incident edge
    weight among their neighbors (keeping their own when it ties; other ties
    broken uniformly at random by the seed). Stops when every node's label is
    one of its weighted-majority labels; after 1,000 sweeps the current labels
    are returned and the result flagged.
    """
    if g.n_nodes == 0:
        raise ValueError("graph is empty")
    rng = random.Random(seed)
    n = g.n_nodes
    labels = list(range(n))
    flags: tuple[str, ...] = ()
    for _sweep in range(MAX_LP_SWEEPS):
        order = list(range(n))
        rng.shuffle(order)
        changed = False
        for v in order:
            if not g.adj[v]:
                continue
            weight_by_label: dict[int, int] = {}
            for u, w in g.adj[v].items():
                weight_by_label[labels[u]] = weight_by_label.get(labels[u], 0) + w
            best = max(weight_by_label.values())
            tied = sorted(lab for lab, w in weight_by_label.items() if w == best)
            if labels[v] in tied:
                continue
            labels[v] = tied[rng.randrange(len(tied))] if len(tied) > 1 else tied[0]
            changed = True
        if not changed:
            break
    else:
        warnings.warn("label propagation did not converge within "
                      f"{MAX_LP_SWEEPS} sweeps", ConvergenceWarning)
        flags = ("not_converged",)
    return Partition.from_labels(g.nodes, labels, flags)


ALGORITHMS = {
    "fastgreedy": lambda g, seed: fastgreedy(g)[0],
    "walktrap": lambda g, seed: walktrap(g)[0],
    "multilevel": lambda g, seed: louvain(g, seed),
    "labelprop": lambda g, seed: label_propagation(g, seed),
}

"""Bipartite user-page graphs, weighted one-mode projection and components.

A bipartite edge links a user and a page when the user performed the selected
action on that page at least once (multiplicity collapsed). Projecting onto
pages yields a weighted undirected graph whose edge weights count the common
users of each page pair.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .ingest import Dataset


def _compact(values) -> tuple[np.ndarray, int]:
    """Map arbitrary hashable labels to contiguous ids, first occurrence first."""
    seen: dict = {}
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if v not in seen:
            seen[v] = len(seen)
        out[i] = seen[v]
    return out, len(seen)


@dataclass(frozen=True)
class Partition:
    """Total assignment of nodes to 0-based contiguous community ids."""

    nodes: tuple[str, ...]
    labels: tuple[int, ...]
    n_communities: int
    flags: tuple[str, ...] = ()

    @classmethod
    def from_labels(cls, nodes, labels, flags=()) -> "Partition":
        compacted, k = _compact(list(labels))
        return cls(tuple(nodes), tuple(int(x) for x in compacted), k, tuple(flags))

    @classmethod
    def from_mapping(cls, mapping: dict[str, object], nodes=None) -> "Partition":
        node_order = tuple(nodes) if nodes is not None else tuple(sorted(mapping))
        return cls.from_labels(node_order, [mapping[n] for n in node_order])

    def __post_init__(self):
        if len(self.nodes) != len(self.labels):
            raise ValueError("labels must cover every node exactly once")
        if self.labels:
            uniq = set(self.labels)
            if uniq != set(range(self.n_communities)):
                raise ValueError("community ids must be contiguous from 0")

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.nodes, self.labels))

    def communities(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.n_communities)]
        for node, lab in zip(self.nodes, self.labels):
            out[lab].append(node)
        return out

    def sizes(self) -> list[int]:
        counts = [0] * self.n_communities
        for lab in self.labels:
            counts[lab] += 1
        return counts

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["page_id", "community"])
        for node, lab in sorted(zip(self.nodes, self.labels)):
            w.writerow([node, lab])
        return buf.getvalue()


class BipartiteGraph:
    """User-page incidence for one action kind, optionally time-windowed."""

    def __init__(self, pages, users, edges, action: str, window=None):
        self.pages: tuple[str, ...] = tuple(pages)
        self.users: tuple[str, ...] = tuple(users)
        self.action = action
        self.window = window
        self.page_index = {p: i for i, p in enumerate(self.pages)}
        self.user_index = {u: i for i, u in enumerate(self.users)}
        page_users: list[set[int]] = [set() for _ in self.pages]
        user_pages: list[set[int]] = [set() for _ in self.users]
        for u, p in edges:
            page_users[p].add(u)
            user_pages[u].add(p)
        self.page_users = [np.array(sorted(s), dtype=np.int64) for s in page_users]
        self.user_pages = [np.array(sorted(s), dtype=np.int64) for s in user_pages]

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.page_users)

    def page_degree(self, page: str) -> int:
        return len(self.page_users[self.page_index[page]])


def build_bipartite(d: Dataset, action: str, window=None) -> BipartiteGraph:
    """Collapse records of one kind into distinct (user, page) edges.

    ``window`` is an inclusive (epoch_lo, epoch_hi) pair; the whole dataset is
    used when absent. Page nodes cover every page in the dataset; user nodes
    cover users with at least one edge.
    """
    if action not in ("like", "comment"):
        raise ValueError(f"action must be like or comment, got {action!r}")
    pages = sorted(d.by_page)
    lo, hi = window if window is not None else (None, None)
    pairs = set()
    for r in d.records:
        if r.action != action:
            continue
        if window is not None and not (lo <= r.ts <= hi):
            continue
        pairs.add((r.user, r.page))
    users = sorted({u for u, _ in pairs})
    uidx = {u: i for i, u in enumerate(users)}
    pidx = {p: i for i, p in enumerate(pages)}
    edges = [(uidx[u], pidx[p]) for u, p in pairs]
    return BipartiteGraph(pages, users, edges, action, window)


class ProjectionGraph:
    """Weighted undirected page graph; weight = number of common users."""

    def __init__(self, nodes, edges):
        """``edges``: iterable of (i, j, weight) with dense indices i != j."""
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.index = {n: i for i, n in enumerate(self.nodes)}
        self.adj: list[dict[int, int]] = [dict() for _ in self.nodes]
        for i, j, w in edges:
            if i == j:
                raise ValueError(f"self-loop on {self.nodes[i]!r}")
            if w <= 0:
                raise ValueError("zero-weight pairs must be absent")
            self.adj[i][j] = self.adj[i].get(j, 0) + int(w)
            self.adj[j][i] = self.adj[j].get(i, 0) + int(w)
        self.strengths = np.array([sum(nb.values()) for nb in self.adj], dtype=np.int64)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adj) // 2

    @property
    def total_weight(self) -> int:
        return int(self.strengths.sum()) // 2

    def edges(self):
        """Yield (i, j, weight) once per unordered pair, i < j, sorted."""
        for i in range(len(self.nodes)):
            for j in sorted(self.adj[i]):
                if i < j:
                    yield i, j, self.adj[i][j]

    def weight(self, a: str, b: str) -> int:
        return self.adj[self.index[a]].get(self.index[b], 0)

    def to_csv(self) -> str:
        rows = []
        for i, j, w in self.edges():
            a, b = self.nodes[i], self.nodes[j]
            if b < a:
                a, b = b, a
            rows.append((a, b, w))
        rows.sort()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["page_a", "page_b", "weight"])
        w.writerows(rows)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, stream) -> "ProjectionGraph":
        if isinstance(stream, str):
            stream = io.StringIO(stream)
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != ["page_a", "page_b", "weight"]:
            raise ValueError("expected header page_a,page_b,weight")
        raw = [(a, b, int(w)) for a, b, w in reader]
        nodes = sorted({a for a, _, _ in raw} | {b for _, b, _ in raw})
        index = {n: i for i, n in enumerate(nodes)}
        return cls(nodes, [(index[a], index[b], w) for a, b, w in raw])


def project(b: BipartiteGraph) -> ProjectionGraph:
    """One-mode projection onto pages.

    Computed as the sparse incidence product, i.e. by iterating users and
    accumulating their page pairs (cost ~ sum of squared user degrees), never
    by all-pairs set intersection.
    """
    n_pages = len(b.pages)
    n_users = len(b.users)
    if n_users == 0 or n_pages == 0:
        return ProjectionGraph(b.pages, [])
    rows = np.concatenate([np.full(len(ps), u, dtype=np.int64)
                           for u, ps in enumerate(b.user_pages)] or [np.empty(0, np.int64)])
    cols = (np.concatenate(b.user_pages)
            if any(len(p) for p in b.user_pages) else np.empty(0, np.int64))
    inc = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n_users, n_pages))
    co = (inc.T @ inc).tocoo()
    edges = [(int(i), int(j), int(w))
             for i, j, w in zip(co.row, co.col, co.data) if i < j]
    edges.sort()
    return ProjectionGraph(b.pages, edges)


def induced_subgraph(g: ProjectionGraph, keep) -> ProjectionGraph:
    """Restrict to ``keep`` nodes; edges with both endpoints kept, weights unchanged."""
    keep = list(keep)
    missing = [p for p in keep if p not in g.index]
    if missing:
        raise ValueError(f"pages not in graph: {sorted(missing)}")
    keep_set = set(keep)
    nodes = [n for n in g.nodes if n in keep_set]
    new_index = {n: i for i, n in enumerate(nodes)}
    edges = []
    for i, j, w in g.edges():
        a, b = g.nodes[i], g.nodes[j]
        if a in new_index and b in new_index:
            edges.append((new_index[a], new_index[b], w))
    return ProjectionGraph(nodes, edges)


def connected_components(g: ProjectionGraph) -> Partition:
    """Components of the positive-weight edge relation.

    Component ids are assigned in decreasing size order, breaking ties by the
    smallest page id contained.
    """
    n = g.n_nodes
    comp = [-1] * n
    comps: list[list[int]] = []
    for start in range(n):
        if comp[start] >= 0:
            continue
        cid = len(comps)
        stack = [start]
        comp[start] = cid
        members = [start]
        while stack:
            v = stack.pop()
            for nb in g.adj[v]:
                if comp[nb] < 0:
                    comp[nb] = cid
                    members.append(nb)
                    stack.append(nb)
        comps.append(members)
    order = sorted(range(len(comps)),
                   key=lambda c: (-len(comps[c]), min(g.nodes[v] for v in comps[c])))
    rank = {c: i for i, c in enumerate(order)}
    return Partition(g.nodes, tuple(rank[comp[v]] for v in range(n)), len(comps))


def largest_component_size(g: ProjectionGraph) -> int:
    if g.n_nodes == 0:
        return 0
    return max(connected_components(g).sizes())

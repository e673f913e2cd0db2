import numpy as np
import pytest

from echonet.graphs import Partition, ProjectionGraph
from echonet.ingest import Dataset, InteractionRecord
from echonet.timebins import parse_timestamp


def rec(user, page, action="like", ts="2014-03-01T00:00:00Z", post=None):
    if len(ts) == 10:  # bare date
        ts = ts + "T12:00:00Z"
    return InteractionRecord(user, page, post or f"{page}_s0", action,
                             parse_timestamp(ts))


def dataset(*records) -> Dataset:
    return Dataset(records)


def two_block_graph(n=40, p_in=0.9, p_out=0.05, seed=0):
    """Planted 2-block unit-weight graph plus its ground-truth partition."""
    rng = np.random.default_rng(seed)
    half = n // 2
    truth_labels = [0] * half + [1] * (n - half)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if truth_labels[i] == truth_labels[j] else p_out
            if rng.random() < p:
                edges.append((i, j, 1))
    nodes = [f"n{i:03d}" for i in range(n)]
    return ProjectionGraph(nodes, edges), Partition.from_labels(nodes, truth_labels)


def random_weighted_graph(n, p, seed, max_w=9, connected=False):
    """Erdos-Renyi graph with uniform integer weights; optionally forced connected."""
    rng = np.random.default_rng(seed)
    nodes = [f"n{i:02d}" for i in range(n)]
    while True:
        edges = [(i, j, int(rng.integers(1, max_w + 1)))
                 for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        if not connected:
            break
        g = ProjectionGraph(nodes, edges)
        from echonet.graphs import connected_components
        if edges and connected_components(g).n_communities == 1:
            return g
        continue
    return ProjectionGraph(nodes, edges)


def random_dataset(n_records, seed, n_users=30, n_pages=8,
                   ts_range=("2012-01-01T00:00:00Z", "2016-12-31T23:59:59Z")):
    rng = np.random.default_rng(seed)
    lo, hi = parse_timestamp(ts_range[0]), parse_timestamp(ts_range[1])
    records = []
    for k in range(n_records):
        action = ("like", "comment", "post")[rng.integers(0, 3)]
        page = f"p{rng.integers(0, n_pages):02d}"
        user = page if action == "post" else f"u{rng.integers(0, n_users):03d}"
        records.append(InteractionRecord(
            user, page, f"{page}_s{rng.integers(0, 5)}", action,
            int(rng.integers(lo, hi + 1))))
    return Dataset(records)


@pytest.fixture(scope="session")
def acceptance_corpus():
    """The synthetic corpus shared by the Table-1 and bimodality criteria."""
    from echonet.synth import SynthConfig, generate

    cfg = SynthConfig(users_per_side=(5000, 5000), pages_per_side=(145, 98),
                      p_out=0.02, actions_per_user=("fixed", 60),
                      comment_fraction=0.2, posts_per_page=50, seed=7)
    return generate(cfg)

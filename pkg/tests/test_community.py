import numpy as np
import pytest

from echonet.community import (
    fastgreedy,
    label_propagation,
    louvain,
    modularity,
    walktrap,
)
from echonet.compare import rand_index
from echonet.graphs import Partition, ProjectionGraph

from conftest import random_weighted_graph, two_block_graph


def two_cliques():
    nodes = list("abcdef")
    edges = [(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 1), (3, 5, 1), (4, 5, 1)]
    g = ProjectionGraph(nodes, edges)
    truth = Partition.from_labels(nodes, [0, 0, 0, 1, 1, 1])
    return g, truth


def complete_graph(n, w=1):
    return ProjectionGraph([f"n{i}" for i in range(n)],
                           [(i, j, w) for i in range(n) for j in range(i + 1, n)])


def modularity_dense_oracle(g, p):
    """Direct evaluation of (1/2m) sum_ij [w_ij - s_i s_j / 2m] delta(c_i, c_j)."""
    n = g.n_nodes
    W = np.zeros((n, n))
    for i, j, w in g.edges():
        W[i, j] = W[j, i] = w
    s = W.sum(axis=1)
    two_m = s.sum()
    com = p.as_dict()
    labels = np.array([com[node] for node in g.nodes])
    delta = labels[:, None] == labels[None, :]
    return float(((W - np.outer(s, s) / two_m) * delta).sum() / two_m)


def set_partitions(n):
    """All partitions of range(n) as restricted-growth label tuples."""
    def rec(prefix, k):
        i = len(prefix)
        if i == n:
            yield tuple(prefix)
            return
        for lab in range(k + 1):
            yield from rec(prefix + [lab], max(k, lab + 1))
    yield from rec([], 0)


def brute_force_max_modularity(g):
    best = -2.0
    for labels in set_partitions(g.n_nodes):
        q = modularity(g, Partition.from_labels(g.nodes, labels))
        best = max(best, q)
    return best


def connected_atlas_graphs(max_nodes=6):
    """All connected graphs on 1..max_nodes nodes, from the Atlas enumeration."""
    import networkx as nx

    out = []
    for ag in nx.graph_atlas_g():
        n = ag.number_of_nodes()
        if not 1 <= n <= max_nodes or ag.number_of_edges() == 0:
            continue
        if not nx.is_connected(ag):
            continue
        nodes = [f"n{i}" for i in range(n)]
        out.append(ProjectionGraph(nodes, [(i, j, 1) for i, j in ag.edges()]))
    return out


# ----------------------------------------------------------------- modularity


def test_modularity_single_community_is_zero():
    g = random_weighted_graph(9, 0.5, seed=1)
    p = Partition.from_labels(g.nodes, [0] * 9)
    assert modularity(g, p) == pytest.approx(0.0, abs=1e-15)


def test_modularity_two_cliques_half():
    g, truth = two_cliques()
    assert modularity(g, truth) == pytest.approx(0.5, abs=1e-15)


def test_modularity_scale_invariant():
    g, truth = two_cliques()
    scaled = ProjectionGraph(g.nodes, [(i, j, w * 10) for i, j, w in g.edges()])
    assert modularity(scaled, truth) == pytest.approx(modularity(g, truth), abs=1e-12)


def test_modularity_zero_weight_errors():
    g = ProjectionGraph(["a", "b"], [])
    with pytest.raises(ValueError):
        modularity(g, Partition.from_labels(["a", "b"], [0, 1]))


def test_modularity_node_mismatch_errors():
    g, _ = two_cliques()
    with pytest.raises(ValueError):
        modularity(g, Partition.from_labels(["a", "b"], [0, 1]))


def test_modularity_matches_dense_oracle():
    rng = np.random.default_rng(4)
    for seed in range(20):
        g = random_weighted_graph(8, 0.5, seed=100 + seed)
        if g.total_weight == 0:
            continue
        labels = rng.integers(0, 3, size=8).tolist()
        p = Partition.from_labels(g.nodes, labels)
        assert modularity(g, p) == pytest.approx(modularity_dense_oracle(g, p),
                                                 abs=1e-12)


def test_modularity_bounds():
    for seed in range(10):
        g = random_weighted_graph(7, 0.6, seed=seed)
        if g.total_weight == 0:
            continue
        for labels in [[0] * 7, list(range(7)), [0, 1] * 3 + [0]]:
            q = modularity(g, Partition.from_labels(g.nodes, labels))
            assert -0.5 - 1e-12 <= q <= 1.0 + 1e-12


# ----------------------------------------------------------------- fastgreedy


def test_fastgreedy_two_cliques():
    g, truth = two_cliques()
    part, dendro = fastgreedy(g)
    assert rand_index(part, truth) == 1.0
    assert dendro.best_score == pytest.approx(0.5, abs=1e-12)


def test_fastgreedy_single_edge_prefers_merge():
    g = ProjectionGraph(["a", "b"], [(0, 1, 1)])
    part, dendro = fastgreedy(g)
    assert part.n_communities == 1
    assert dendro.best_score == pytest.approx(0.0, abs=1e-15)


def test_fastgreedy_reported_score_is_reevaluated():
    for seed in range(10):
        g = random_weighted_graph(10, 0.4, seed=seed, connected=True)
        part, dendro = fastgreedy(g)
        assert dendro.best_score == modularity(g, part)
        if dendro.best_step > 0:
            # incremental score at the chosen cut matches the recomputation
            assert dendro.merges[dendro.best_step - 1][2] == pytest.approx(
                dendro.best_score, abs=1e-9)


def test_fastgreedy_dendrogram_fully_agglomerates_connected():
    g = random_weighted_graph(9, 0.5, seed=2, connected=True)
    _part, dendro = fastgreedy(g)
    assert len(dendro.merges) == g.n_nodes - 1
    assert dendro.leaf_count == g.n_nodes
    merged = [m for a, b, _s in dendro.merges for m in (a, b)]
    assert len(merged) == len(set(merged))  # each id merged at most once


def test_fastgreedy_never_merges_components():
    g, _ = two_cliques()  # disconnected
    _part, dendro = fastgreedy(g)
    assert len(dendro.merges) == 4  # 2 merges per clique, none across


def test_fastgreedy_bounded_by_brute_force():
    graphs = connected_atlas_graphs(5)
    rng = np.random.default_rng(9)
    for seed in range(20):
        graphs.append(random_weighted_graph(8, 0.45, seed=300 + seed, connected=True))
    assert len(graphs) > 30
    for g in graphs:
        part, dendro = fastgreedy(g)
        best = brute_force_max_modularity(g)
        assert dendro.best_score <= best + 1e-12
        assert dendro.best_score == modularity(g, part)


def test_fastgreedy_deterministic():
    g = random_weighted_graph(20, 0.3, seed=5)
    assert fastgreedy(g)[0] == fastgreedy(g)[0]


def test_fastgreedy_empty_or_weightless_errors():
    with pytest.raises(ValueError):
        fastgreedy(ProjectionGraph([], []))
    with pytest.raises(ValueError):
        fastgreedy(ProjectionGraph(["a", "b"], []))


# -------------------------------------------------------------------- louvain


def test_louvain_two_cliques_any_seed():
    g, truth = two_cliques()
    for seed in range(8):
        assert rand_index(louvain(g, seed), truth) == 1.0


def test_louvain_complete_graph_single_community():
    g = complete_graph(6)
    for seed in range(5):
        assert louvain(g, seed).n_communities == 1


def test_louvain_improves_on_singletons():
    for seed in range(6):
        g = random_weighted_graph(12, 0.3, seed=40 + seed, connected=True)
        part = louvain(g, seed)
        singles = Partition.from_labels(g.nodes, list(range(g.n_nodes)))
        assert modularity(g, part) >= modularity(g, singles)


# ------------------------------------------------------------------- walktrap


def test_walktrap_two_cliques():
    g, truth = two_cliques()
    part, dendro = walktrap(g)
    assert rand_index(part, truth) == 1.0
    assert dendro.best_score == pytest.approx(0.5, abs=1e-12)
    # the chosen cut hits the brute-force optimum here
    assert dendro.best_score == pytest.approx(brute_force_max_modularity(g), abs=1e-12)


def test_walktrap_two_nodes_one_edge():
    g = ProjectionGraph(["a", "b"], [(0, 1, 3)])
    part, _ = walktrap(g)
    assert part.n_communities == 1


def test_walktrap_zero_steps_errors():
    g, _ = two_cliques()
    with pytest.raises(ValueError):
        walktrap(g, steps=0)


def test_walktrap_isolated_node_stays_singleton():
    g = ProjectionGraph(["a", "b", "c"], [(0, 1, 2)])
    part, _ = walktrap(g)
    d = part.as_dict()
    assert d["a"] == d["b"] and d["c"] != d["a"]


def test_walktrap_reported_score_is_reevaluated():
    for seed in range(8):
        g = random_weighted_graph(10, 0.4, seed=60 + seed, connected=True)
        part, dendro = walktrap(g)
        assert dendro.best_score == modularity(g, part)
        if dendro.best_step > 0:
            assert dendro.merges[dendro.best_step - 1][2] == pytest.approx(
                dendro.best_score, abs=1e-9)


def test_walktrap_deterministic():
    g = random_weighted_graph(20, 0.3, seed=30)
    assert walktrap(g)[0] == walktrap(g)[0]


# ---------------------------------------------------------- label propagation


def test_label_propagation_two_triangles():
    g, truth = two_cliques()
    for seed in range(8):
        assert rand_index(label_propagation(g, seed), truth) == 1.0


def test_label_propagation_single_node():
    g = ProjectionGraph(["only"], [])
    part = label_propagation(g, 0)
    assert part.n_communities == 1 and not part.flags


def test_label_propagation_deterministic_per_seed():
    g = random_weighted_graph(25, 0.2, seed=12)
    assert label_propagation(g, 7) == label_propagation(g, 7)


# ------------------------------------------------------------------ recovery


@pytest.mark.parametrize("algo", ["fastgreedy", "louvain", "walktrap"])
def test_planted_two_block_recovery(algo):
    scores = []
    for seed in range(5):
        g, truth = two_block_graph(40, 0.9, 0.05, seed=seed)
        if algo == "fastgreedy":
            part = fastgreedy(g)[0]
        elif algo == "louvain":
            part = louvain(g, seed)
        else:
            part = walktrap(g)[0]
        scores.append(rand_index(part, truth))
    assert float(np.mean(scores)) >= 0.95


def test_planted_two_block_label_propagation():
    scores = []
    for seed in range(7):
        g, truth = two_block_graph(40, 0.9, 0.05, seed=seed)
        scores.append(rand_index(label_propagation(g, seed), truth))
    assert float(np.median(scores)) >= 0.90


# ----------------------------------------------------------------- properties


def test_all_algorithms_return_total_contiguous_partitions():
    for seed in range(5):
        g = random_weighted_graph(15, 0.25, seed=80 + seed)
        if g.total_weight == 0:
            continue
        outs = [fastgreedy(g)[0], louvain(g, seed), walktrap(g)[0],
                label_propagation(g, seed)]
        for part in outs:
            assert set(part.nodes) == set(g.nodes)
            assert set(part.labels) == set(range(part.n_communities))
            singles = Partition.from_labels(g.nodes, list(range(g.n_nodes)))
            assert modularity(g, part) >= modularity(g, singles) - 1e-12


def test_weight_scaling_leaves_partitions_unchanged():
    # powers of two scale float arithmetic exactly, so even tie-breaks agree
    for seed in range(4):
        g = random_weighted_graph(14, 0.3, seed=90 + seed, connected=True)
        scaled = ProjectionGraph(g.nodes, [(i, j, w * 8) for i, j, w in g.edges()])
        assert fastgreedy(g)[0] == fastgreedy(scaled)[0]
        assert louvain(g, seed) == louvain(scaled, seed)
        assert walktrap(g)[0] == walktrap(scaled)[0]
        assert label_propagation(g, seed) == label_propagation(scaled, seed)

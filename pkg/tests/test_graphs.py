import itertools

import numpy as np
import pytest

from echonet.graphs import (
    Partition,
    ProjectionGraph,
    build_bipartite,
    connected_components,
    induced_subgraph,
    largest_component_size,
    project,
)

from conftest import dataset, random_dataset, random_weighted_graph, rec


def test_multiplicity_collapsed():
    d = dataset(rec("u1", "p1", "like", "2014-01-01"),
                rec("u1", "p1", "like", "2014-02-01"))
    b = build_bipartite(d, "like")
    assert b.n_edges == 1
    assert b.page_degree("p1") == 1


def test_kind_filter_empty_edges():
    d = dataset(rec("u1", "p1", "like"), rec("u2", "p2", "like"))
    b = build_bipartite(d, "comment")
    assert b.pages == ("p1", "p2")
    assert b.n_edges == 0 and not b.users


def test_window_restricts_edges():
    d = dataset(rec("u1", "p1", "like", "2014-01-15"),
                rec("u2", "p1", "like", "2015-01-15"))
    lo = rec("x", "x", ts="2014-01-01").ts
    hi = rec("x", "x", ts="2014-12-31").ts
    b = build_bipartite(d, "like", window=(lo, hi))
    assert b.n_edges == 1 and b.users == ("u1",)


def test_bipartite_edges_match_brute_force():
    d = random_dataset(50, seed=17)
    for kind in ("like", "comment"):
        b = build_bipartite(d, kind)
        expected = {(r.user, r.page) for r in d.records if r.action == kind}
        got = {(b.users[u], b.pages[p])
               for p, us in enumerate(b.page_users) for u in us}
        assert got == expected
        # symmetric user->pages index agrees
        got_u = {(b.users[u], b.pages[p])
                 for u, ps in enumerate(b.user_pages) for p in ps}
        assert got_u == expected


def test_project_minimal_overlap():
    d = dataset(rec("u1", "p1"), rec("u1", "p2"))
    g = project(build_bipartite(d, "like"))
    assert g.n_edges == 1 and g.weight("p1", "p2") == 1


def test_project_disjoint_no_edge():
    d = dataset(rec("u1", "p1"), rec("u2", "p2"))
    g = project(build_bipartite(d, "like"))
    assert g.n_edges == 0


def test_project_weights_match_brute_force():
    rng = np.random.default_rng(8)
    users = [f"u{i}" for i in range(20)]
    pages = [f"p{i}" for i in range(8)]
    records = [rec(u, p) for u in users for p in pages if rng.random() < 0.4]
    b = build_bipartite(dataset(*records), "like")
    g = project(b)
    liked = {p: {r.user for r in records if r.page == p} for p in pages}
    for a, bb in itertools.combinations(pages, 2):
        assert g.weight(a, bb) == len(liked[a] & liked[bb])
    # weight bound and strength cache
    for i, j, w in g.edges():
        assert w <= min(len(liked[g.nodes[i]]), len(liked[g.nodes[j]]))
    assert list(g.strengths) == [sum(nb.values()) for nb in g.adj]


def test_projection_weight_sum_identity():
    for seed in range(5):
        d = random_dataset(300, seed=seed)
        b = build_bipartite(d, "like")
        g = project(b)
        expected = sum(len(ps) * (len(ps) - 1) // 2 for ps in b.user_pages)
        assert sum(w for _i, _j, w in g.edges()) == expected


def test_projection_rejects_self_loops_and_zero_weights():
    with pytest.raises(ValueError):
        ProjectionGraph(["a"], [(0, 0, 1)])
    with pytest.raises(ValueError):
        ProjectionGraph(["a", "b"], [(0, 1, 0)])


def test_induced_identity():
    g = random_weighted_graph(12, 0.4, seed=2)
    sub = induced_subgraph(g, g.nodes)
    assert sub.nodes == g.nodes
    assert list(sub.edges()) == list(g.edges())


def test_induced_singleton():
    g = random_weighted_graph(6, 0.8, seed=3)
    sub = induced_subgraph(g, [g.nodes[0]])
    assert sub.nodes == (g.nodes[0],) and sub.n_edges == 0


def test_induced_triangle_to_edge():
    g = ProjectionGraph(["a", "b", "c"], [(0, 1, 3), (0, 2, 5), (1, 2, 7)])
    sub = induced_subgraph(g, ["a", "c"])
    assert sub.n_edges == 1 and sub.weight("a", "c") == 5


def test_induced_unknown_page_errors():
    g = ProjectionGraph(["a", "b"], [(0, 1, 1)])
    with pytest.raises(ValueError, match="zz"):
        induced_subgraph(g, ["a", "zz"])


def test_components_two_disjoint_edges():
    g = ProjectionGraph(["a", "b", "c", "d"], [(0, 1, 2), (2, 3, 1)])
    p = connected_components(g)
    assert p.n_communities == 2
    assert sorted(p.sizes()) == [2, 2]
    # tie on size: component containing the smallest page id comes first
    assert p.as_dict()["a"] == 0


def test_components_isolated_pages():
    g = ProjectionGraph([f"p{i}" for i in range(5)], [])
    p = connected_components(g)
    assert p.n_communities == 5 and p.sizes() == [1] * 5


def test_components_size_ordering():
    g = ProjectionGraph(["a", "b", "c", "d", "e"],
                        [(2, 3, 1), (3, 4, 1)])  # component {c,d,e} and {a},{b}
    p = connected_components(g)
    d = p.as_dict()
    assert d["c"] == d["d"] == d["e"] == 0
    assert d["a"] == 1 and d["b"] == 2


def test_components_match_closure_oracle():
    g = random_weighted_graph(200, 0.008, seed=5)
    p = connected_components(g)
    n = g.n_nodes
    reach = np.eye(n, dtype=bool)
    for i, j, _w in g.edges():
        reach[i, j] = reach[j, i] = True
    # boolean transitive closure by repeated squaring
    for _ in range(9):
        reach = reach | (reach @ reach)
    labels = p.labels
    for i in range(n):
        for j in range(i + 1, n):
            assert (labels[i] == labels[j]) == reach[i, j]


def test_components_invariant_under_weight_rescaling():
    g = random_weighted_graph(30, 0.08, seed=6)
    scaled = ProjectionGraph(g.nodes, [(i, j, w * 17) for i, j, w in g.edges()])
    assert connected_components(g) == connected_components(scaled)


def test_largest_component_size():
    g = ProjectionGraph(["a", "b", "c", "d", "e"], [(0, 1, 1), (1, 2, 1)])
    assert largest_component_size(g) == 3
    assert largest_component_size(ProjectionGraph([], [])) == 0


def test_projection_csv_round_trip():
    g = random_weighted_graph(10, 0.5, seed=7)
    text = g.to_csv()
    assert text.splitlines()[0] == "page_a,page_b,weight"
    g2 = ProjectionGraph.from_csv(text)
    assert g2.to_csv() == text


def test_partition_contiguity_enforced():
    with pytest.raises(ValueError):
        Partition(("a", "b"), (0, 2), 2)
    p = Partition.from_labels(("a", "b", "c"), ["x", "y", "x"])
    assert p.labels == (0, 1, 0) and p.n_communities == 2

import pytest

from qldpc_lab.graphs import (
    adjacency_graph,
    brute_force_cluster_extensions,
    clusters_of,
    count_cluster_extensions,
    cycle_graph,
    extension_bound,
    path_graph,
    syndrome_adjacency_graph,
)


def test_basic_shapes():
    g = path_graph(5)
    assert g.num_edges == 4 and g.max_degree == 2
    c = cycle_graph(6)
    assert c.num_edges == 6 and all(c.degree(v) == 2 for v in range(6))


def test_adjacency_degree_bound(code13):
    g = adjacency_graph(code13)
    assert len(g) == 13
    assert g.max_degree <= g.meta["z_bound"]


def test_syndrome_graph_layers(code13):
    g = syndrome_adjacency_graph(code13, 3)
    assert len(g) == 13 * 4 + 12 * 3
    # every check node touches its support in two consecutive layers
    assert g.degree(("b", 0, 1)) == 2 * len(code13.generator_supports()[0])
    with pytest.raises(ValueError):
        syndrome_adjacency_graph(code13, 0)


def test_clusters_and_spans():
    g = path_graph(6)
    cl = clusters_of([0, 1, 3, 5, 4], g, errors=[1, 4])
    assert sorted(c.size for c in cl) == [2, 3]
    assert sorted(c.errors for c in cl) == [1, 1]


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_extension_count_matches_brute_force(s):
    g = cycle_graph(8)
    for S in ([0], [0, 1], [0, 4]):
        assert count_cluster_extensions(g, S, s) == brute_force_cluster_extensions(g, S, s)


def test_path_counts_by_hand():
    # connected sets of size s containing the end of a path: exactly one
    g = path_graph(10)
    assert [count_cluster_extensions(g, [0], s) for s in range(1, 6)] == [1, 1, 1, 1, 1]
    # interior vertex: s choices of offset
    assert [count_cluster_extensions(g, [5], s) for s in range(1, 5)] == [1, 2, 3, 4]
    assert extension_bound(2, 1, 1) == 1.0

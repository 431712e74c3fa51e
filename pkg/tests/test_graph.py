import numpy as np
import pytest

from conftest import complete, undirected
from graphcrawl.evaluation import fit_power_law_exponent
from graphcrawl.graph import (EdgeListParseError, Graph, GraphError, LabelTable, degree_labels,
                              generate_directed_power_law, generate_synthetic, largest_connected_component,
                              load_edge_list, load_labels)


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_p3(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2\n"), directed=False)
    assert g.node_count == 3
    assert g.degree.tolist() == [1, 2, 1]


def test_self_loop_and_duplicate_dropped(tmp_path):
    g = load_edge_list(write(tmp_path, "0 0\n0 1\n0 1\n"), directed=False)
    assert g.edge_count_undirected == 1
    assert g.load_report["self_loops_dropped"] + g.load_report["duplicates_dropped"] == 2


def test_comments_and_id_compaction(tmp_path):
    g = load_edge_list(write(tmp_path, "# header\n10 30\n30 20\n"), directed=True)
    assert g.original_ids.tolist() == [10, 20, 30]
    assert g.out_neighbors(0).tolist() == [2]
    assert g.in_neighbors(2).tolist() == [0]
    assert g.neighbors(2).tolist() == [0, 1]


def test_parse_error_names_line(tmp_path):
    with pytest.raises(EdgeListParseError, match=":2"):
        load_edge_list(write(tmp_path, "0 1\nfoo bar\n"), directed=False)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_edge_list(tmp_path / "none.txt", directed=False)


def test_directed_views():
    g = Graph.from_edges(3, [0, 1, 1], [1, 0, 2], directed=True)
    assert g.edge_count_directed == 3
    assert g.edge_count_undirected == 2
    assert g.in_degree.tolist() == [1, 1, 1]
    assert g.out_degree.tolist() == [1, 2, 0]
    assert g.degree.tolist() == [1, 2, 1]
    assert g.has_edge(0, 1) and g.has_edge(1, 2) and not g.has_edge(2, 1)


def test_lcc_picks_largest_then_smallest_id():
    # two triangles plus an isolated edge
    g = undirected(8, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7)])
    lcc = largest_connected_component(g)
    assert lcc.node_count == 3
    assert lcc.original_ids.tolist() == [0, 1, 2]


def test_lcc_identity_on_connected():
    g = complete(5)
    lcc = largest_connected_component(g)
    assert lcc.node_count == 5
    assert lcc.edge_count_undirected == 10


def test_erdos_renyi_p1_is_complete():
    g = generate_synthetic("erdos-renyi", 100, 1.0, seed=1)
    assert set(g.degree.tolist()) == {99}


def test_power_law_tail_exponent():
    g = generate_synthetic("configuration-power-law", 5000, 2.5, seed=7)
    assert abs(fit_power_law_exponent(g.degree, 2) - 2.5) <= 0.3
    assert 0 < g.load_report["lcc_fraction"] <= 1


@pytest.mark.parametrize("kind,param", [("erdos-renyi", 0.01), ("configuration-power-law", 2.2)])
def test_generator_determinism(kind, param):
    a = generate_synthetic(kind, 500, param, seed=3)
    b = generate_synthetic(kind, 500, param, seed=3)
    for x, y in zip(a.edges(), b.edges()):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("kind,param", [("erdos-renyi", 0.0), ("configuration-power-law", 1.5), ("lattice", 1)])
def test_generator_rejects_bad_inputs(kind, param):
    with pytest.raises(GraphError):
        generate_synthetic(kind, 100, param, seed=1)


def test_directed_generator_is_simple():
    g = generate_directed_power_law(2000, 3.0, seed=5)
    src, dst = g.edges(directed=True)
    assert np.all(src != dst)
    assert np.unique(src * g.node_count + dst).size == src.size


def test_label_file(tmp_path):
    g = load_edge_list(write(tmp_path, "5 7\n7 9\n"), directed=False)
    p = write(tmp_path, "5 M\n7 F\n9 M\n11 U\n", "labels.txt")
    lab = load_labels(p, g)
    assert [lab.label_names[i] for i in lab.node_labels] == ["M", "F", "M"]


def test_label_file_missing_node(tmp_path):
    g = load_edge_list(write(tmp_path, "5 7\n7 9\n"), directed=False)
    with pytest.raises(GraphError, match="no label"):
        load_labels(write(tmp_path, "5 M\n", "labels.txt"), g)


def test_degree_labels_sorted():
    lab = degree_labels(undirected(4, [(0, 1), (0, 2), (0, 3)]))
    assert lab.label_names == (1, 3)
    assert lab.node_labels.tolist() == [1, 0, 0, 0]


def test_label_table_rejects_sparse_ids():
    with pytest.raises(GraphError):
        LabelTable(np.array([0, 2]), ("a", "b"))

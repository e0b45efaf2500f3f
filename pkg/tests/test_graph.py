import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphmark.graph import (
    EdgeListError,
    Graph,
    SubgraphSelection,
    adjacency,
    average_entry,
    density,
    edge_flip_attack,
    edit_distance_percent,
    induced_subgraph,
    load_edge_list,
    splice_subgraph,
    top_degree_selection,
    topk_degree_spearman,
    total_pairs,
    unrank_pairs,
    write_edge_list,
)

P3 = Graph.from_edges(3, [(0, 1), (1, 2)])
K3 = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
STAR4 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def _write(tmp_path, text):
    p = tmp_path / "g.txt"
    p.write_text(text)
    return p


class TestLoad:
    def test_basic(self, tmp_path):
        g = load_edge_list(_write(tmp_path, "0 1\n1 2\n"))
        assert g.n == 3 and g.edge_set() == {(0, 1), (1, 2)}

    def test_dedup_and_comments(self, tmp_path):
        g = load_edge_list(_write(tmp_path, "0 1\n1 0\n# c\n"))
        assert g.n == 2 and g.edge_set() == {(0, 1)}

    def test_self_loop_dropped_and_counted(self, tmp_path):
        g, rep = load_edge_list(_write(tmp_path, "5 5\n0 5\n"), with_report=True)
        assert g.n == 6 and g.edge_set() == {(0, 5)}
        assert rep.self_loops == 1

    def test_parse_error_has_line_number(self, tmp_path):
        with pytest.raises(EdgeListError, match=":2:"):
            load_edge_list(_write(tmp_path, "0 1\nx y\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(EdgeListError):
            load_edge_list(_write(tmp_path, "# nothing\n"))

    def test_header_pins_vertex_count(self, tmp_path):
        g = load_edge_list(_write(tmp_path, "% n=10\n0 1\n"))
        assert g.n == 10

    def test_header_smaller_than_ids(self, tmp_path):
        with pytest.raises(EdgeListError):
            load_edge_list(_write(tmp_path, "% n=2\n0 5\n"))

    @settings(max_examples=40, deadline=None)
    @given(graphs())
    def test_write_read_round_trip(self, tmp_path_factory, g):
        p = tmp_path_factory.mktemp("rt") / "g.txt"
        write_edge_list(g, p)
        assert load_edge_list(p) == g


class TestAdjacency:
    def test_path(self):
        assert adjacency(P3).tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]

    def test_empty(self):
        assert adjacency(Graph.from_edges(2, [])).tolist() == [[0, 0], [0, 0]]

    def test_complete(self):
        assert (adjacency(K3) == 1 - np.eye(3, dtype=np.uint8)).all()

    @settings(max_examples=60, deadline=None)
    @given(graphs())
    def test_round_trip_and_symmetry(self, g):
        a = adjacency(g)
        assert (a == a.T).all() and not a.diagonal().any()
        assert Graph.from_adjacency(a) == g

    def test_average_entry(self):
        assert average_entry(adjacency(K3)) == pytest.approx(6 / 9)
        assert average_entry(adjacency(P3)) == pytest.approx(4 / 9)
        assert average_entry(adjacency(Graph.from_edges(4, []))) == 0.0

    def test_density(self):
        assert density(K3) == 1.0
        assert density(Graph.from_edges(5, [])) == 0.0


class TestSelection:
    def test_star(self):
        assert top_degree_selection(STAR4, 1).kept.tolist() == [0]

    def test_tie_by_label(self):
        assert top_degree_selection(K3, 2).kept.tolist() == [0, 1]

    def test_clamp(self):
        assert top_degree_selection(P3, 5).kept.tolist() == [1, 0, 2]

    def test_bad_n0(self):
        with pytest.raises(ValueError):
            top_degree_selection(P3, 0)

    @settings(max_examples=60, deadline=None)
    @given(graphs(), st.integers(1, 15))
    def test_invariants(self, g, n0):
        kept = top_degree_selection(g, n0).kept
        deg = g.degrees()[kept]
        assert kept.size == min(n0, g.n)
        assert np.unique(kept).size == kept.size
        assert (np.diff(deg) <= 0).all()
        # matches a full stable sort by (degree desc, label asc)
        ref = sorted(range(g.n), key=lambda v: (-g.degrees()[v], v))[: kept.size]
        assert kept.tolist() == ref


class TestInduceSplice:
    def test_induced_examples(self):
        sel = SubgraphSelection(np.array([0, 1]), 3)
        assert induced_subgraph(K3, sel).edge_set() == {(0, 1)}
        star = induced_subgraph(STAR4, SubgraphSelection(np.array([0]), 4))
        assert star.n == 1 and star.num_edges == 0
        assert induced_subgraph(P3, top_degree_selection(P3, 5)).edge_set() == {(0, 1), (0, 2)}

    def test_splice_examples(self):
        sel = SubgraphSelection(np.array([0, 1]), 3)
        out = splice_subgraph(K3, sel, Graph.from_edges(2, []))
        assert out.edge_set() == {(0, 2), (1, 2)}
        out = splice_subgraph(Graph.from_edges(3, []), sel, Graph.from_edges(2, [(0, 1)]))
        assert out.edge_set() == {(0, 1)}

    def test_splice_size_mismatch(self):
        sel = SubgraphSelection(np.array([0, 1]), 3)
        with pytest.raises(ValueError):
            splice_subgraph(K3, sel, K3)

    @settings(max_examples=60, deadline=None)
    @given(graphs(), st.integers(1, 15))
    def test_round_trip(self, g, n0):
        sel = top_degree_selection(g, n0)
        assert splice_subgraph(g, sel, induced_subgraph(g, sel)) == g

    @settings(max_examples=40, deadline=None)
    @given(graphs(), st.integers(1, 15), st.integers(0, 2**31))
    def test_splice_only_touches_kept_pairs(self, g, n0, seed):
        sel = top_degree_selection(g, n0)
        sub = induced_subgraph(g, sel)
        other = edge_flip_attack(sub, 50.0, seed) if sub.num_edges else sub
        out = splice_subgraph(g, sel, other)
        kept = set(sel.kept.tolist())
        for i, j in out.edge_set() ^ g.edge_set():
            assert i in kept and j in kept


class TestEditDistance:
    def test_examples(self):
        assert edit_distance_percent(P3, P3) == 0.0
        assert edit_distance_percent(P3, Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])) == 50.0

    def test_can_exceed_100(self):
        g1 = Graph.from_edges(8, [(0, 1)])
        g2 = Graph.from_edges(8, [(2, 3), (4, 5), (6, 7)])
        assert edit_distance_percent(g1, g2) == 400.0

    def test_errors(self):
        with pytest.raises(ValueError):
            edit_distance_percent(Graph.from_edges(3, []), P3)
        with pytest.raises(ValueError):
            edit_distance_percent(P3, Graph.from_edges(4, [(0, 1)]))

    @settings(max_examples=60, deadline=None)
    @given(graphs(), graphs())
    def test_zero_iff_equal(self, a, b):
        if a.n != b.n or a.num_edges == 0:
            return
        ed = edit_distance_percent(a, b)
        assert ed >= 0 and (ed == 0) == (a == b)


class TestAttack:
    def test_zero_is_identity(self):
        assert edge_flip_attack(K3, 0.0, 1) == K3

    def test_2000_edges_10_percent(self):
        rng = np.random.default_rng(0)
        pairs = rng.choice(total_pairs(300), 2000, replace=False)
        g = Graph.from_edges(300, np.column_stack(unrank_pairs(pairs)))
        assert g.num_edges == 2000
        out = edge_flip_attack(g, 10.0, 5)
        assert edit_distance_percent(g, out) == 10.0
        assert np.setxor1d(g.codes, out.codes).size == 200

    def test_k3_all_pairs(self):
        # 100% of 3 edges is every pair of K3
        for seed in range(10):
            assert edge_flip_attack(K3, 100.0, seed).num_edges == 0

    def test_too_many_pairs(self):
        with pytest.raises(ValueError):
            edge_flip_attack(K3, 200.0, 0)

    def test_negative(self):
        with pytest.raises(ValueError):
            edge_flip_attack(K3, -1.0, 0)

    def test_unrank_is_bijective(self):
        n = 60
        i, j = unrank_pairs(np.arange(total_pairs(n)))
        assert (i < j).all() and (j < n).all()
        assert np.unique(i * n + j).size == total_pairs(n)

    def test_unrank_large_ranks(self):
        j = np.array([10**6, 3 * 10**6 + 7], dtype=np.int64)
        i = np.array([0, 12345], dtype=np.int64)
        ri, rj = unrank_pairs(j * (j - 1) // 2 + i)
        assert ri.tolist() == i.tolist() and rj.tolist() == j.tolist()

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.floats(0, 80))
    def test_realized_ed_matches_request(self, seed, p):
        g = Graph.from_edges(40, np.column_stack(unrank_pairs(np.arange(0, 780, 3))))
        k = round(p / 100 * g.num_edges)
        out = edge_flip_attack(g, p, seed)
        assert edit_distance_percent(g, out) == pytest.approx(100 * k / g.num_edges)
        assert abs(edit_distance_percent(g, out) - p) <= 100 / g.num_edges

    def test_seeded(self):
        assert edge_flip_attack(P3, 100.0, 3) == edge_flip_attack(P3, 100.0, 3)


class TestSpearman:
    def test_identity(self):
        g = Graph.from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (4, 5)])
        assert topk_degree_spearman(g, g, 4) == pytest.approx(1.0)

    def test_reversal(self):
        # degrees 3,2,1 on vertices 0,1,2 become 1,2,3; leaves have degree 1
        g1 = Graph.from_edges(9, [(0, 3), (0, 4), (0, 5), (1, 6), (1, 7), (2, 8)])
        g2 = Graph.from_edges(9, [(2, 3), (2, 4), (2, 5), (1, 6), (1, 7), (0, 8)])
        assert topk_degree_spearman(g1, g2, 3) == pytest.approx(-1.0)

    def test_errors(self):
        with pytest.raises(ValueError):
            topk_degree_spearman(P3, P3, 4)
        with pytest.raises(ValueError):
            topk_degree_spearman(P3, Graph.from_edges(4, []), 2)

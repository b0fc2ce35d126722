import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gnpgames.graphs import (
    GnpParams,
    Graph,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    edge,
    edges_between,
    edges_from_vertex,
    edges_within,
    empty_graph,
    external_neighborhood,
    graph_from_text,
    graph_to_text,
    path_graph,
    sample_gnp,
)
from gnpgames.rng import pair_uniforms


def random_graph_strategy(max_n=9):
    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=1, max_value=max_n))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        return Graph(n, (p for p, keep in zip(pairs, mask) if keep))

    return build()


def test_edge_canonicalization():
    assert edge(3, 1) == (1, 3)
    assert edge(0, 7) == (0, 7)
    with pytest.raises(ValueError):
        edge(2, 2)
    with pytest.raises(ValueError):
        edge(-1, 2)


def test_graph_rejects_out_of_range_edges():
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])


def test_graph_dedupes_and_canonicalizes():
    g = Graph(4, [(1, 0), (0, 1), (2, 3)])
    assert g.edge_list == ((0, 1), (2, 3))
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)


@given(random_graph_strategy())
def test_degree_sum_is_twice_edges(g):
    assert sum(g.degrees()) == 2 * g.num_edges


@given(random_graph_strategy(), st.data())
def test_edge_count_partition_identity(g, data):
    U = set(data.draw(st.lists(st.integers(0, g.n - 1), max_size=g.n)))
    comp = set(range(g.n)) - U
    assert edges_within(g, U) + edges_between(g, U, comp) + edges_within(g, comp) == g.num_edges


@given(random_graph_strategy(), st.data())
def test_external_neighborhood_disjoint_and_bounded(g, data):
    U = set(data.draw(st.lists(st.integers(0, g.n - 1), max_size=g.n)))
    N = external_neighborhood(g, U)
    assert not (N & U)
    assert len(N) <= g.n - len(U)


def test_external_neighborhood_examples():
    c4 = cycle_graph(4)
    assert external_neighborhood(c4, {0}) == {1, 3}
    assert external_neighborhood(c4, set(range(4))) == set()
    assert external_neighborhood(complete_graph(5), {0, 1}) == {2, 3, 4}
    # equality on complete graphs with nonempty U
    k6 = complete_graph(6)
    assert len(external_neighborhood(k6, {2, 4})) == 6 - 2
    with pytest.raises(ValueError):
        external_neighborhood(c4, {7})


def test_edge_count_examples():
    k4 = complete_graph(4)
    assert edges_within(k4, {0, 1, 2}) == 3
    assert edges_between(k4, {0, 1}, {2, 3}) == 4
    p3 = path_graph(3)
    assert edges_from_vertex(p3, 1, {0, 2}) == 2
    with pytest.raises(ValueError):
        edges_between(k4, {0, 1}, {1, 2})


def test_gnp_params_validation_and_f():
    with pytest.raises(ValueError):
        GnpParams(n=5, p=1.2, seed=0)
    with pytest.raises(ValueError):
        GnpParams(n=0, p=0.5, seed=0)
    params = GnpParams(n=100, p=0.25, seed=1)
    assert params.f == pytest.approx(100 * 0.25 / math.log(100))
    with pytest.raises(ValueError):
        _ = GnpParams(n=1, p=0.5, seed=0).f


def test_sample_gnp_extremes():
    g = sample_gnp(GnpParams(n=2, p=1.0, seed=123))
    assert g.edge_list == ((0, 1),)
    g = sample_gnp(GnpParams(n=5, p=0.0, seed=9))
    assert g.num_edges == 0


def test_sample_gnp_deterministic_and_seed_sensitive():
    a = sample_gnp(GnpParams(n=30, p=0.5, seed=42))
    b = sample_gnp(GnpParams(n=30, p=0.5, seed=42))
    c = sample_gnp(GnpParams(n=30, p=0.5, seed=43))
    assert a == b
    assert a != c


def test_sample_gnp_pair_stream_indexing():
    # pair i uses draw i of the seed's stream: check against the raw stream
    n, p, seed = 12, 0.37, 777
    u = pair_uniforms(seed, n * (n - 1) // 2)
    rows, cols = np.triu_indices(n, k=1)
    expect = {(int(a), int(b)) for a, b, x in zip(rows, cols, u) if x < p}
    assert sample_gnp(GnpParams(n=n, p=p, seed=seed)).edges == frozenset(expect)


def test_sample_gnp_mean_edge_count():
    # Bin(4950, 0.5): mean 2475, sd 35.178; 3 standard errors over 1000 seeds
    n, p = 100, 0.5
    counts = [sample_gnp(GnpParams(n=n, p=p, seed=s)).num_edges for s in range(1000)]
    se = math.sqrt(4950 * 0.25) / math.sqrt(1000)
    assert abs(np.mean(counts) - 2475) < 3 * se


@given(random_graph_strategy())
def test_graph_text_round_trip(g):
    assert graph_from_text(graph_to_text(g)) == g


def test_graph_text_format():
    g = Graph(3, [(0, 2), (0, 1)])
    assert graph_to_text(g) == "n 3\n0 1\n0 2\n"
    with pytest.raises(ValueError):
        graph_from_text("0 1\n")


def test_constructors():
    assert complete_graph(5).num_edges == 10
    assert cycle_graph(4).num_edges == 4
    assert path_graph(4).num_edges == 3
    assert complete_bipartite_graph(2, 3).num_edges == 6
    assert empty_graph(3).num_edges == 0

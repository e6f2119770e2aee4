import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tubespec import graphspec as gs


@pytest.mark.parametrize("graph, spectrum", [
    (gs.path_graph(3), [0.0, 1.0, 2.0]),
    (gs.star_graph(3), [0.0, 1.0, 1.0, 2.0]),
    (gs.cycle_graph(4), [0.0, 1.0, 1.0, 2.0]),
    (gs.complete_graph(4), [0.0, 4 / 3, 4 / 3, 4 / 3]),
])
def test_small_spectra(graph, spectrum):
    assert np.allclose(gs.graph_spectrum(graph), spectrum, atol=1e-12)


def test_k4_vertex_count_variant_fails():
    w = gs.k4_witness()
    assert w["h_vertex"] == 2.0 and w["h_volume"] == pytest.approx(2 / 3)
    assert w["margin_vertex"] == pytest.approx(4 / 3 - 2.0)
    assert w["vertex_variant_fails"] and w["margin_volume"] > 0


def test_atlas_counts():
    atlas = gs.atlas_graphs(2, 6)
    assert len(atlas) == 142 and sum(g.n == 6 for g in atlas) == 112


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_random_graph_identities(seed):
    r = gs.cheeger_check(gs.random_connected_graph(seed, 10))
    assert r["ok"]
    assert r["sum_identity_error"] <= 1e-8
    assert r["margin_volume"] >= -1e-12


def test_cheeger_matches_brute_force():
    g = gs.random_connected_graph(7, 8)
    deg = g.degrees
    best = np.inf
    for mask in range(1, 2**g.n - 1):
        side = [(mask >> i) & 1 for i in range(g.n)]
        cut = sum(side[u] != side[v] for u, v in g.edges)
        vol = sum(d for d, s in zip(deg, side) if s)
        best = min(best, cut / min(vol, deg.sum() - vol))
    assert gs.cheeger_constant(g).value == pytest.approx(best)


def test_parse_edge_list():
    g = gs.parse_edge_list("# triangle\n0 1\n1 2\n\n2 0\n")
    assert g.n == 3 and len(g.edges) == 3
    assert gs.parse_edge_list(gs.edge_list_text(g)) == g
    for bad in ("0 1 2\n", "a b\n", "", "0 0\n", "0 1\n2 3\n"):
        with pytest.raises(ValueError):
            gs.parse_edge_list(bad)


def test_graph_bound_chain_terms():
    r = gs.graph_bound_chain(gs.cycle_graph(6), vol_M=6.0)
    assert r["h_floor_ok"] and r["cheeger_ok"]
    assert r["chain"] == min(r["volume_term"], r["thick_bound"] / 3)
    with pytest.raises(ValueError):
        gs.graph_bound_chain(gs.cycle_graph(6), vol_M=0.0)


def test_networkx_roundtrip():
    g = gs.cycle_graph(5)
    assert gs.WeightedGraph.from_networkx(g.to_networkx()) == g

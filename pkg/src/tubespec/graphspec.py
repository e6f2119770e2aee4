"""Normalized-Laplacian spectra and exact Cheeger constants of small graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import networkx as nx
import numpy as np

from .numerics import symmetric_eigs

MAX_EXHAUSTIVE = 22
VERTEX_COUNT = "vertex-count"
DEGREE_VOLUME = "degree-volume"


@dataclass(frozen=True)
class WeightedGraph:
    """Simple, undirected, connected graph on vertices ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("graph needs at least two vertices")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))
        if not nx.is_connected(self.to_networkx()):
            raise ValueError("graph must be connected")

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "WeightedGraph":
        g = nx.convert_node_labels_to_integers(g, ordering="sorted")
        return cls(g.number_of_nodes(), tuple(g.edges()))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())


def parse_edge_list(text: str) -> WeightedGraph:
    """Parse ``u v`` lines (0-indexed); blank lines and ``#`` comments are ignored."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: vertices must be integers") from exc
    if not edges:
        raise ValueError("edge list is empty")
    n = 1 + max(max(e) for e in edges)
    if min(min(e) for e in edges) < 0:
        raise ValueError("vertex indices must be nonnegative")
    return WeightedGraph(n, tuple(edges))


def normalized_laplacian(g: WeightedGraph) -> np.ndarray:
    d = 1.0 / np.sqrt(g.degrees)
    lap = np.eye(g.n) - d[:, None] * g.adjacency * d[None, :]
    return 0.5 * (lap + lap.T)


def graph_spectrum(g: WeightedGraph) -> np.ndarray:
    w, _ = symmetric_eigs(normalized_laplacian(g))
    w[0] = 0.0 if abs(w[0]) < 1e-12 else w[0]
    return w


@dataclass(frozen=True)
class CheegerCut:
    value: float
    side: tuple[int, ...]
    cut_edges: int


def cheeger_constant(g: WeightedGraph, variant: str = DEGREE_VOLUME) -> CheegerCut:
    """Exact Cheeger constant by enumerating all ``2^(n-1) - 1`` cuts."""
    if variant not in (VERTEX_COUNT, DEGREE_VOLUME):
        raise ValueError(f"unknown Cheeger variant {variant!r}")
    n = g.n
    if n > MAX_EXHAUSTIVE:
        raise ValueError(f"exhaustive Cheeger search limited to {MAX_EXHAUSTIVE} vertices")
    # vertex n-1 is always on the complement side, so each cut is visited once
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n - 1)) & 1).astype(np.int8)
    bits = np.concatenate([bits, np.zeros((bits.shape[0], 1), dtype=np.int8)], axis=1)
    e = np.array(g.edges)
    cut = (bits[:, e[:, 0]] != bits[:, e[:, 1]]).sum(axis=1)
    if variant == VERTEX_COUNT:
        size = bits.sum(axis=1)
        small = np.minimum(size, n - size)
    else:
        deg = g.degrees
        vol = bits @ deg
        small = np.minimum(vol, deg.sum() - vol)
    ratio = cut / small
    best = int(np.argmin(ratio))  # first minimizer: deterministic
    side = tuple(int(i) for i in np.flatnonzero(bits[best]))
    return CheegerCut(float(ratio[best]), side, int(cut[best]))


def cheeger_check(g: WeightedGraph) -> dict[str, Any]:
    """Spectral identities plus both Cheeger margins ``lambda_1 - h^2 / 2``.

    Only the degree-volume margin is asserted; the vertex-count margin is
    reported, and may be negative (K4 is the smallest witness).
    """
    lam = graph_spectrum(g)
    hv = cheeger_constant(g, DEGREE_VOLUME)
    hc = cheeger_constant(g, VERTEX_COUNT)
    out = {
        "n": g.n,
        "edges": len(g.edges),
        "spectrum": lam.tolist(),
        "sum_identity_error": float(abs(lam.sum() - g.n)),
        "top_eigenvalue": float(lam[-1]),
        "lambda1": float(lam[1]),
        "h_volume": hv.value,
        "h_vertex": hc.value,
        "margin_volume": float(lam[1] - hv.value**2 / 2),
        "margin_vertex": float(lam[1] - hc.value**2 / 2),
        "comparable": hc.value / g.max_degree <= hv.value + 1e-12 and hv.value <= hc.value + 1e-12,
    }
    out["ok"] = bool(out["sum_identity_error"] <= 1e-8 and out["top_eigenvalue"] >= 1 - 1e-9
                     and out["margin_volume"] >= -1e-12 and out["comparable"] and lam[1] > 1e-12)
    out["vertex_variant_fails"] = out["margin_vertex"] < 0
    return out


def atlas_graphs(min_n: int = 2, max_n: int = 6) -> list[WeightedGraph]:
    """All connected graphs on ``min_n..max_n`` vertices (up to isomorphism)."""
    out = []
    for g in nx.graph_atlas_g():
        if min_n <= g.number_of_nodes() <= max_n and nx.is_connected(g):
            out.append(WeightedGraph.from_networkx(g))
    return out


def random_connected_graph(seed: int, max_n: int = 12) -> WeightedGraph:
    """Random spanning tree plus random extra edges, seeded."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    perm = rng.permutation(n)
    edges = [(int(perm[i]), int(perm[rng.integers(0, i)])) for i in range(1, n)]
    p = rng.uniform(0.0, 0.6)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.uniform() < p:
                edges.append((u, v))
    return WeightedGraph(n, tuple(edges))


def complete_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_networkx(nx.complete_graph(n))


def path_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_networkx(nx.path_graph(n))


def cycle_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_networkx(nx.cycle_graph(n))


def star_graph(leaves: int) -> WeightedGraph:
    return WeightedGraph.from_networkx(nx.star_graph(leaves))


def graph_bound_chain(g: WeightedGraph, vol_M: float, n: int = 3, a: float = 1.0, comparability: float = 1.0) -> dict[str, Any]:
    """Itemized lower bound for ``lambda_1`` of a manifold modelled by ``g``.

    The chain is: Cheeger constant of a connected graph is at least
    ``1/|G|``; then ``lambda_1(G) >= h^2/2``; the thick part inherits
    ``lambda_1 >= comparability * h^2 / 2``; and the eigenvalue comparison
    caps at ``(n-2)^2/12``. With ``|G| = vol_M / a`` the first term reads
    ``a^2 (n-2)^2 / (12 vol_M^2)``.
    """
    if vol_M <= 0:
        raise ValueError("volume must be positive")
    h = cheeger_constant(g, DEGREE_VOLUME).value
    h_floor = 1.0 / g.n
    lam1 = float(graph_spectrum(g)[1])
    thick = comparability * h**2 / 2.0
    threshold = (n - 2) ** 2 / 12.0
    first = a**2 * threshold / vol_M**2
    chain = min(first, thick / 3.0)
    return {
        "h": h,
        "h_floor": h_floor,
        "h_floor_ok": h >= h_floor - 1e-12,
        "lambda1_graph": lam1,
        "cheeger_ok": lam1 >= h**2 / 2 - 1e-12,
        "thick_bound": thick,
        "volume_term": first,
        "threshold": threshold,
        "chain": chain,
    }


def edge_list_text(g: WeightedGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)


def iter_checks(graphs: Iterable[WeightedGraph]) -> list[dict[str, Any]]:
    return [cheeger_check(g) for g in graphs]


def k4_witness() -> dict[str, Any]:
    """K4: the vertex-count variant violates ``lambda_1 >= h^2/2``."""
    rep = cheeger_check(complete_graph(4))
    return {"graph": "K4", "lambda1": rep["lambda1"], "h_vertex": rep["h_vertex"], "h_volume": rep["h_volume"],
            "margin_vertex": rep["margin_vertex"], "margin_volume": rep["margin_volume"],
            "vertex_variant_fails": rep["vertex_variant_fails"]}



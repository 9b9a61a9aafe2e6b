"""One-tailed enrichment tests of a partition against its host graph.

Each community is tested for overenrichment of internal links and each
community pair for underenrichment of cross links, under a hypergeometric
null parameterized by total degrees. Raw mid-p-values are adjusted with
Benjamini-Hochberg across the whole family of tests at once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .graph import Graph, Partition, observed_links, out_in_degree, total_degree
from .stats import HypergeomParams, bh_adjust, lower_mid_p, upper_mid_p

WITHIN_OVER = "within-over"
BETWEEN_UNDER = "between-under"

# Mid-p of a point-mass null: no draws or no successes can never reject.
DEGENERATE_P = 0.5


@dataclass(frozen=True)
class EnrichmentResult:
    """Outcome of one enrichment test between communities ``r`` and ``s``."""

    r: int
    s: int
    direction: str
    n_obs: int
    mu0: float
    raw_p: float
    adj_p: float | None = None
    degenerate: bool = False

    def __post_init__(self) -> None:
        if (self.r == self.s) != (self.direction == WITHIN_OVER):
            raise ValueError("direction inconsistent with community pair")
        if self.adj_p is not None and self.adj_p < self.raw_p - 1e-15:
            raise ValueError("adjusted p-value below raw p-value")

    def rejected(self, alpha: float) -> bool:
        """Whether this test rejects its null at level ``alpha``.

        Degenerate tests never reject regardless of their p-value.
        """
        if self.adj_p is None:
            raise ValueError("family adjustment has not been applied")
        return not self.degenerate and self.adj_p <= alpha


@dataclass(eq=False)
class EnrichmentMatrix:
    """All within and between tests for one (graph, partition) pair."""

    results: tuple[EnrichmentResult, ...]
    q: int
    directed: bool

    def __post_init__(self) -> None:
        expect = self.q * self.q if self.directed else self.q * (self.q + 1) // 2
        if len(self.results) != expect:
            raise ValueError(f"expected {expect} results, got {len(self.results)}")

    @cached_property
    def _by_pair(self) -> dict[tuple[int, int], EnrichmentResult]:
        return {(res.r, res.s): res for res in self.results}

    def result(self, r: int, s: int) -> EnrichmentResult:
        """Lookup by community pair; undirected between pairs accept either order."""
        key = (r, s)
        if not self.directed and r > s:
            key = (s, r)
        return self._by_pair[key]


def _community_nodes(partition: Partition, r: int) -> np.ndarray:
    if not 0 <= r < partition.q:
        raise ValueError(f"community id {r} out of range")
    return np.flatnonzero(partition.assignment == r)


def _check_pair(graph: Graph, partition: Partition) -> None:
    if partition.n_nodes != graph.n_nodes:
        raise ValueError("partition does not match graph size")


def test_within(graph: Graph, partition: Partition, r: int) -> EnrichmentResult:
    """Overenrichment test of community ``r`` against the hypergeometric null."""
    _check_pair(graph, partition)
    nodes = _community_nodes(partition, r)
    if graph.directed:
        n_total = graph.n_edges
        out_r, in_r = out_in_degree(graph, nodes)
        params = HypergeomParams(n_total, in_r, out_r)
        degenerate = bool(out_r == 0 or in_r == 0)
    else:
        d_r = total_degree(graph, nodes)
        params = HypergeomParams(2 * graph.n_edges, d_r, d_r)
        degenerate = d_r == 0
    n_obs = observed_links(graph, nodes, nodes) if nodes.size else 0
    if degenerate:
        warnings.warn(f"community {r} has no usable stubs; test flagged degenerate",
                      stacklevel=2)
        raw = DEGENERATE_P
    else:
        raw = upper_mid_p(n_obs, params)
    return EnrichmentResult(r, r, WITHIN_OVER, n_obs, params.mean, raw,
                            degenerate=degenerate)


def test_between(graph: Graph, partition: Partition, r: int, s: int) -> EnrichmentResult:
    """Underenrichment test of the links from community ``r`` to ``s``."""
    _check_pair(graph, partition)
    if r == s:
        raise ValueError("between test requires distinct communities")
    nodes_r = _community_nodes(partition, r)
    nodes_s = _community_nodes(partition, s)
    if graph.directed:
        out_r, _ = out_in_degree(graph, nodes_r)
        _, in_s = out_in_degree(graph, nodes_s)
        params = HypergeomParams(graph.n_edges, in_s, out_r)
        degenerate = bool(out_r == 0 or in_s == 0)
    else:
        d_r = total_degree(graph, nodes_r)
        d_s = total_degree(graph, nodes_s)
        params = HypergeomParams(2 * graph.n_edges, d_s, d_r)
        degenerate = bool(d_r == 0 or d_s == 0)
    n_obs = observed_links(graph, nodes_r, nodes_s) if nodes_r.size and nodes_s.size else 0
    if degenerate:
        warnings.warn(f"pair ({r}, {s}) has no usable stubs; test flagged degenerate",
                      stacklevel=2)
        raw = DEGENERATE_P
    else:
        raw = lower_mid_p(n_obs, params)
    return EnrichmentResult(r, s, BETWEEN_UNDER, n_obs, params.mean, raw,
                            degenerate=degenerate)


def _block_counts(graph: Graph, partition: Partition) -> np.ndarray:
    """q x q observed-link counts: stubs on the diagonal (undirected), arrows
    per orientation (directed)."""
    q = partition.q
    asg = partition.assignment
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    flat = asg[u] * q + asg[v]
    if not graph.directed:
        flat = np.concatenate([flat, asg[v] * q + asg[u]])
    return np.bincount(flat, minlength=q * q).reshape(q, q)


def enrichment_matrix(graph: Graph, partition: Partition) -> EnrichmentMatrix:
    """Run the full test family and attach BH-adjusted p-values.

    Ordering is deterministic: within tests by community id, then between
    tests lexicographically (undirected keeps r < s; directed keeps both
    orientations).
    """
    _check_pair(graph, partition)
    q = partition.q
    counts = _block_counts(graph, partition)
    if graph.directed:
        asg = partition.assignment
        outs = np.bincount(asg, weights=graph.out_degrees, minlength=q).astype(np.int64)
        ins = np.bincount(asg, weights=graph.in_degrees, minlength=q).astype(np.int64)
        n_total = graph.n_edges
        pairs = [(r, s) for r in range(q) for s in range(q) if r != s]
    else:
        degs = np.bincount(partition.assignment, weights=graph.degrees,
                           minlength=q).astype(np.int64)
        n_total = 2 * graph.n_edges
        pairs = [(r, s) for r in range(q) for s in range(r + 1, q)]

    bare: list[EnrichmentResult] = []
    n_degenerate = 0
    for r in range(q):
        if graph.directed:
            params = HypergeomParams(n_total, int(ins[r]), int(outs[r]))
            degenerate = bool(outs[r] == 0 or ins[r] == 0)
        else:
            params = HypergeomParams(n_total, int(degs[r]), int(degs[r]))
            degenerate = bool(degs[r] == 0)
        n_obs = int(counts[r, r])
        raw = DEGENERATE_P if degenerate else upper_mid_p(n_obs, params)
        n_degenerate += degenerate
        bare.append(EnrichmentResult(r, r, WITHIN_OVER, n_obs, params.mean, raw,
                                     degenerate=degenerate))
    for r, s in pairs:
        if graph.directed:
            params = HypergeomParams(n_total, int(ins[s]), int(outs[r]))
            degenerate = bool(outs[r] == 0 or ins[s] == 0)
        else:
            params = HypergeomParams(n_total, int(degs[s]), int(degs[r]))
            degenerate = bool(degs[r] == 0 or degs[s] == 0)
        n_obs = int(counts[r, s])
        raw = DEGENERATE_P if degenerate else lower_mid_p(n_obs, params)
        n_degenerate += degenerate
        bare.append(EnrichmentResult(r, s, BETWEEN_UNDER, n_obs, params.mean, raw,
                                     degenerate=degenerate))
    if n_degenerate:
        warnings.warn(f"{n_degenerate} of {len(bare)} tests degenerate "
                      "(zero-degree community)", stacklevel=2)
    adjusted = bh_adjust([res.raw_p for res in bare])
    results = tuple(replace(res, adj_p=float(adj)) for res, adj in zip(bare, adjusted))
    return EnrichmentMatrix(results, q, graph.directed)

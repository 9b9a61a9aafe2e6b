"""Two-network and N-network comparison via relative CSV indices.

Each graph pair is reduced to its common nodes, partitioned with Louvain,
filtered to communities above a minimum size, and cross-scored: R holds the
relative indices, S = (R + Rᵀ)/2, and D = 1 − S feeds complete linkage.
Per-pair random streams are derived from the graph names, so results do not
depend on input order.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np

from ._parallel import run_tasks
from ._rng import derive_rng
from .clustering import Dendrogram, DistanceMatrix, complete_linkage, louvain
from .graph import Graph, Partition, induced_subgraph
from .indices import csv_report


def filter_small_communities(partition: Partition,
                             min_size: int) -> tuple[np.ndarray, Partition]:
    """Drop communities of size <= min_size.

    Returns the indices of surviving nodes (ascending) and the re-indexed
    partition over them; community ids densify in ascending old-id order.
    """
    if min_size < 1:
        raise ValueError("min_size must be at least 1")
    sizes = np.bincount(partition.assignment, minlength=partition.q)
    survivors = np.flatnonzero(sizes > min_size)
    if survivors.size == 0:
        raise ValueError("no communities survive the size filter")
    new_id = np.full(partition.q, -1, dtype=np.int64)
    new_id[survivors] = np.arange(survivors.size)
    keep = np.flatnonzero(new_id[partition.assignment] >= 0)
    filtered = Partition(new_id[partition.assignment[keep]], int(survivors.size))
    return keep, filtered


def _index_of(report, use_wcsv: bool) -> float:
    return report.wcsv if use_wcsv else report.ucsv


_UNDEFINED_MSG = "relative index undefined: partition scores 0 on its own graph"


def _align_partition(p: Partition, from_labels, to_labels) -> Partition:
    """Re-index a partition given per-node labels onto another label order."""
    by_label = {lab: int(c) for lab, c in zip(from_labels, p.assignment)}
    return Partition(np.array([by_label[lab] for lab in to_labels]), p.q)


def relative_ucsv(p: Partition, g_own: Graph, g_other: Graph,
                  alpha: float = 0.05, use_wcsv: bool = False) -> float:
    """Index of p on g_other divided by its index on g_own.

    Both graphs must cover the same node set; p follows g_own's node order
    and is realigned by label for g_other. A zero denominator means the
    partition failed on its own graph; the result is recorded as 0 with a
    warning.
    """
    if set(g_own.node_labels) != set(g_other.node_labels):
        raise ValueError("graphs must share an identical node set")
    own = _index_of(csv_report(g_own, p, alpha=alpha), use_wcsv)
    p_other = _align_partition(p, g_own.node_labels, g_other.node_labels)
    other = _index_of(csv_report(g_other, p_other, alpha=alpha), use_wcsv)
    if own == 0.0:
        warnings.warn(_UNDEFINED_MSG, UserWarning, stacklevel=2)
        return 0.0
    return other / own


@dataclass(eq=False)
class PairComparison:
    """Cross-scores for one unordered graph pair."""

    name_i: str
    name_j: str
    n_common: int
    r_ij: float
    r_ji: float
    defined_ij: bool
    defined_ji: bool
    own_index_i: float
    own_index_j: float
    q_i: int
    q_j: int
    error: str | None = None


@dataclass(eq=False)
class ComparisonResult:
    names: tuple[str, ...]
    r_matrix: np.ndarray
    defined: np.ndarray
    s_matrix: np.ndarray
    d_matrix: DistanceMatrix
    per_pair: tuple[PairComparison, ...]

    def dendrogram(self) -> Dendrogram:
        return complete_linkage(self.d_matrix)


def _name_key(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _cross_score(p: Partition, keep: np.ndarray, g_own: Graph, g_other: Graph,
                 alpha: float, use_wcsv: bool) -> tuple[float, float, bool]:
    """(own-graph index, relative index, defined) for a filtered partition."""
    labels = [g_own.node_labels[i] for i in keep]
    own_sub = induced_subgraph(g_own, labels)
    other_sub = induced_subgraph(g_other, labels)
    own = _index_of(csv_report(own_sub, p, alpha=alpha), use_wcsv)
    p_other = _align_partition(p, own_sub.node_labels, other_sub.node_labels)
    other = _index_of(csv_report(other_sub, p_other, alpha=alpha), use_wcsv)
    if own == 0.0:
        return 0.0, 0.0, False
    return own, other / own, True


def _pair_detail(g1: Graph, g2: Graph, alpha: float, min_size: int, seed,
                 use_wcsv: bool, names: tuple[str, str]) -> PairComparison:
    common = sorted(set(g1.node_labels) & set(g2.node_labels))
    if not common:
        raise ValueError("graphs share no node labels")
    g1c = induced_subgraph(g1, common)
    g2c = induced_subgraph(g2, common)
    h1, h2 = _name_key(names[0]), _name_key(names[1])
    lo, hi = min(h1, h2), max(h1, h2)
    p1 = louvain(g1c, derive_rng(seed, lo, hi, h1))
    p2 = louvain(g2c, derive_rng(seed, lo, hi, h2))
    keep1, p1f = filter_small_communities(p1, min_size)
    keep2, p2f = filter_small_communities(p2, min_size)
    own1, r12, def12 = _cross_score(p1f, keep1, g1c, g2c, alpha, use_wcsv)
    own2, r21, def21 = _cross_score(p2f, keep2, g2c, g1c, alpha, use_wcsv)
    if not (def12 and def21):
        warnings.warn(_UNDEFINED_MSG, UserWarning, stacklevel=3)
    return PairComparison(names[0], names[1], len(common), r12, r21,
                          def12, def21, own1, own2, p1f.q, p2f.q)


def compare_pair(g1: Graph, g2: Graph, alpha: float = 0.05, min_size: int = 5,
                 seed=0, use_wcsv: bool = False,
                 names: tuple[str, str] = ("g1", "g2")) -> tuple[float, float]:
    """Cross-apply Louvain partitions of two graphs over their common nodes.

    Returns (R(P1|G2), R(P2|G1)). The optional names feed the per-graph
    random streams, keeping batch comparisons order-independent.
    """
    detail = _pair_detail(g1, g2, alpha, min_size, seed, use_wcsv,
                          (str(names[0]), str(names[1])))
    return detail.r_ij, detail.r_ji


def compare_all(graphs, alpha: float = 0.05, min_size: int = 5, seed=0,
                use_wcsv: bool = False,
                threads: int | None = None) -> ComparisonResult:
    """Pairwise relative indices for named graphs, plus S and D matrices.

    Pair failures (no common nodes, no surviving communities, edgeless
    overlap) are recorded on the pair and leave zero, undefined entries.
    Pairs evaluate independently, so thread count never changes the result.
    """
    items = [(str(name), g) for name, g in graphs]
    names = tuple(name for name, _ in items)
    if len(items) < 2:
        raise ValueError("need at least two graphs to compare")
    if len(set(names)) != len(names):
        raise ValueError("graph names must be unique")
    n = len(items)

    def one_pair(i: int, j: int) -> PairComparison:
        name_i, g_i = items[i]
        name_j, g_j = items[j]
        try:
            return _pair_detail(g_i, g_j, alpha, min_size, seed,
                                use_wcsv, (name_i, name_j))
        except ValueError as exc:
            return PairComparison(name_i, name_j, 0, 0.0, 0.0, False,
                                  False, 0.0, 0.0, 0, 0, error=str(exc))

    index_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        details = run_tasks([lambda i=i, j=j: one_pair(i, j)
                             for i, j in index_pairs], threads)
    r = np.eye(n)
    defined = np.eye(n, dtype=bool)
    for (i, j), detail in zip(index_pairs, details):
        r[i, j], r[j, i] = detail.r_ij, detail.r_ji
        defined[i, j], defined[j, i] = detail.defined_ij, detail.defined_ji
    s = (r + r.T) / 2.0
    d = np.clip(1.0 - s, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    result = ComparisonResult(names, r, defined, s,
                              DistanceMatrix(names, d), tuple(details))
    result.r_matrix.setflags(write=False)
    result.defined.setflags(write=False)
    result.s_matrix.setflags(write=False)
    return result


def matrix_tsv(labels, values: np.ndarray) -> str:
    """Square labeled matrix as TSV with a header row and row names."""
    labels = [str(x) for x in labels]
    lines = ["name\t" + "\t".join(labels)]
    for label, row in zip(labels, np.asarray(values)):
        lines.append(label + "\t" + "\t".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"

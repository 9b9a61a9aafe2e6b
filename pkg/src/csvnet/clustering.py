"""Community detection and hierarchical clustering.

Louvain and the CNM fast-greedy agglomeration are implemented directly over
weighted adjacency maps so aggregated passes can carry self-loop weight.
Complete linkage operates on labeled distance matrices and exports Newick.
All tie-breaks are lexicographic on ids, making every routine deterministic
for a fixed seed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ._rng import derive_rng
from .graph import Graph, Partition

_GAIN_EPS = 1e-12


def modularity(graph: Graph, partition: Partition) -> float:
    """Newman-Girvan Q: within-edge fraction minus its degree-model expectation."""
    if graph.directed:
        raise ValueError("modularity is defined here for undirected graphs")
    m = graph.n_edges
    if m == 0:
        raise ValueError("modularity needs at least one edge")
    if partition.n_nodes != graph.n_nodes:
        raise ValueError("partition does not match graph size")
    asg = partition.assignment
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    same = asg[u] == asg[v]
    internal = np.bincount(asg[u][same], minlength=partition.q)
    stubs = np.bincount(asg, weights=graph.degrees, minlength=partition.q)
    e_rr = internal / m
    a_r = stubs / (2.0 * m)
    return float(np.sum(e_rr - a_r * a_r))


# --- Louvain -----------------------------------------------------------------


def _weighted_adjacency(graph: Graph) -> list[dict[int, float]]:
    adj: list[dict[int, float]] = [{} for _ in range(graph.n_nodes)]
    for u, v in graph.edges:
        adj[u][v] = adj[u].get(v, 0.0) + 1.0
        adj[v][u] = adj[v].get(u, 0.0) + 1.0
    return adj


def _level_q(adj: list[dict[int, float]], loop: np.ndarray,
             comm: list[int], two_w: float) -> float:
    n_comm = max(comm) + 1
    inside = np.zeros(n_comm)
    tot = np.zeros(n_comm)
    for i, ci in enumerate(comm):
        k_i = sum(adj[i].values()) + loop[i]
        tot[ci] += k_i
        inside[ci] += loop[i]
        for j, w in adj[i].items():
            if j > i and comm[j] == ci:
                inside[ci] += 2.0 * w
    return float(np.sum(inside / two_w - (tot / two_w) ** 2))


def _local_pass(adj: list[dict[int, float]], loop: np.ndarray,
                two_w: float, rng: np.random.Generator) -> tuple[list[int], bool]:
    """One level of greedy node moves; returns (community ids, any move made)."""
    n = len(adj)
    k = np.array([sum(d.values()) for d in adj]) + loop
    comm = list(range(n))
    tot = k.astype(np.float64).copy()
    improved = False
    while True:
        moves = 0
        for i in rng.permutation(n):
            i = int(i)
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= k[i]
            stay = links.get(ci, 0.0) - k[i] * tot[ci] / two_w
            best_c, best_gain = ci, stay
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] - k[i] * tot[c] / two_w
                if gain > best_gain + _GAIN_EPS:
                    best_gain, best_c = gain, c
            tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                moves += 1
        if moves == 0:
            break
        improved = True
    return comm, improved


def _densify(comm: list[int]) -> tuple[list[int], int]:
    ids: dict[int, int] = {}
    out = []
    for c in comm:
        if c not in ids:
            ids[c] = len(ids)
        out.append(ids[c])
    return out, len(ids)


def _aggregate(adj: list[dict[int, float]], loop: np.ndarray,
               comm: list[int], n_comm: int) -> tuple[list[dict[int, float]], np.ndarray]:
    new_adj: list[dict[int, float]] = [{} for _ in range(n_comm)]
    new_loop = np.zeros(n_comm)
    for i, ci in enumerate(comm):
        new_loop[ci] += loop[i]
        for j, w in adj[i].items():
            if j < i:
                continue
            cj = comm[j]
            if ci == cj:
                new_loop[ci] += 2.0 * w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
    return new_adj, new_loop


def louvain_with_history(graph: Graph, seed) -> tuple[Partition, list[float]]:
    """Louvain detection plus the modularity reached after each pass."""
    if graph.directed:
        raise ValueError("louvain operates on undirected graphs")
    if graph.n_edges == 0:
        raise ValueError("louvain needs at least one edge")
    rng = derive_rng(seed)
    adj = _weighted_adjacency(graph)
    loop = np.zeros(graph.n_nodes)
    two_w = 2.0 * graph.n_edges
    node_map = np.arange(graph.n_nodes)
    history: list[float] = []
    while True:
        comm, improved = _local_pass(adj, loop, two_w, rng)
        dense, n_comm = _densify(comm)
        history.append(_level_q(adj, loop, dense, two_w))
        node_map = np.asarray(dense)[node_map]
        if not improved or n_comm == len(adj):
            break
        adj, loop = _aggregate(adj, loop, dense, n_comm)
    final, q = _densify(node_map.tolist())
    return Partition(np.asarray(final), q), history


def louvain(graph: Graph, seed=0) -> Partition:
    """Greedy modularity optimization; the seed drives node visit order."""
    return louvain_with_history(graph, seed)[0]


# --- CNM fast greedy ----------------------------------------------------------


def fast_greedy(graph: Graph) -> Partition:
    """CNM agglomeration from singletons, cut at the first modularity maximum.

    Merge candidates are connected community pairs; ties break on the
    smallest (id, id) pair, and a merged community keeps the smaller id.
    """
    if graph.directed:
        raise ValueError("fast_greedy operates on undirected graphs")
    m = graph.n_edges
    if m == 0:
        raise ValueError("fast_greedy needs at least one edge")
    n = graph.n_nodes
    deg = {i: float(graph.degrees[i]) for i in range(n)}
    links: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    for u, v in graph.edges:
        u, v = int(u), int(v)
        links[u][v] = links[u].get(v, 0.0) + 1.0
        links[v][u] = links[v].get(u, 0.0) + 1.0

    def delta_q(a: int, b: int) -> float:
        return links[a][b] / m - deg[a] * deg[b] / (2.0 * m * m)

    stamp = dict.fromkeys(range(n), 0)
    heap: list[tuple[float, int, int, int, int]] = []
    for a in range(n):
        for b in links[a]:
            if a < b:
                heap.append((-delta_q(a, b), a, b, 0, 0))
    heapq.heapify(heap)

    alive = set(range(n))
    q_now = -float(np.sum((graph.degrees / (2.0 * m)) ** 2))
    best_q, best_step = q_now, 0
    merges: list[tuple[int, int]] = []
    while heap:
        neg_dq, a, b, sa, sb = heapq.heappop(heap)
        if a not in alive or b not in alive or stamp[a] != sa or stamp[b] != sb:
            continue
        merges.append((a, b))
        q_now -= neg_dq
        if q_now > best_q + 1e-15:
            best_q, best_step = q_now, len(merges)
        alive.discard(b)
        deg[a] += deg.pop(b)
        stamp[a] += 1
        moved = links.pop(b)
        links[a].pop(b, None)
        moved.pop(a, None)
        for x, w in moved.items():
            links[a][x] = links[a].get(x, 0.0) + w
            links[x].pop(b, None)
            links[x][a] = links[a][x]
        for x in links[a]:
            lo, hi = (a, x) if a < x else (x, a)
            heapq.heappush(heap, (-delta_q(a, x), lo, hi, stamp[lo], stamp[hi]))

    owner = list(range(n))

    def find(x: int) -> int:
        while owner[x] != x:
            owner[x] = owner[owner[x]]
            x = owner[x]
        return x

    for a, b in merges[:best_step]:
        owner[find(b)] = find(a)
    dense, q = _densify([find(i) for i in range(n)])
    return Partition(np.asarray(dense), q)


# --- hierarchical clustering ----------------------------------------------------


@dataclass(eq=False)
class DistanceMatrix:
    """Labeled symmetric distances with a zero diagonal."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        self.labels = tuple(str(x) for x in self.labels)
        vals = np.asarray(self.values, dtype=np.float64)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if vals.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix")
        if not np.allclose(vals, vals.T, atol=1e-12, rtol=0.0):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(vals) != 0.0):
            raise ValueError("diagonal must be zero")
        if vals.min() < 0.0:
            raise ValueError("distances must be nonnegative")
        vals = (vals + vals.T) / 2.0
        vals.setflags(write=False)
        self.values = vals


@dataclass(eq=False)
class Dendrogram:
    """Binary merge tree; ids 0..n-1 are leaves, n+i is the i-th merge."""

    merges: tuple[tuple[int, int, float], ...]
    leaf_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        self.leaf_labels = tuple(str(x) for x in self.leaf_labels)
        self.merges = tuple((int(a), int(b), float(h)) for a, b, h in self.merges)
        if len(self.merges) != len(self.leaf_labels) - 1:
            raise ValueError("a binary dendrogram needs exactly n - 1 merges")

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_labels)

    def height_of(self, ref: int) -> float:
        n = self.n_leaves
        return 0.0 if ref < n else self.merges[ref - n][2]


def complete_linkage(dist: DistanceMatrix) -> Dendrogram:
    """Agglomerate by minimal maximum pairwise distance.

    The pair with the smallest (distance, id, id) triple merges first, so
    equal distances resolve deterministically.
    """
    n = len(dist.labels)
    if n < 2:
        raise ValueError("need at least two labels to cluster")
    d: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            d[(i, j)] = float(dist.values[i, j])
    active = list(range(n))
    merges: list[tuple[int, int, float]] = []
    for step in range(n - 1):
        best = min((dist_ij, i, j) for (i, j), dist_ij in d.items())
        h, i, j = best
        new = n + step
        merges.append((i, j, h))
        active.remove(i)
        active.remove(j)
        for k in active:
            d_ik = d.pop((min(i, k), max(i, k)))
            d_jk = d.pop((min(j, k), max(j, k)))
            d[(k, new)] = max(d_ik, d_jk)
        del d[(i, j)]
        active.append(new)
    return Dendrogram(tuple(merges), dist.labels)


def cut_dendrogram(dend: Dendrogram, k: int) -> dict[str, int]:
    """Drop the k - 1 highest merges and map each label to its cluster id."""
    n = dend.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    owner = list(range(n + len(dend.merges)))

    def find(x: int) -> int:
        while owner[x] != x:
            owner[x] = owner[owner[x]]
            x = owner[x]
        return x

    for idx, (a, b, _) in enumerate(dend.merges[:n - k]):
        root = n + idx
        owner[find(a)] = root
        owner[find(b)] = root
    ids: dict[int, int] = {}
    out: dict[str, int] = {}
    for leaf, label in enumerate(dend.leaf_labels):
        root = find(leaf)
        if root not in ids:
            ids[root] = len(ids)
        out[label] = ids[root]
    return out


def _fmt(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


_NEWICK_UNSAFE = set("(),:;\t\n ")


def to_newick(dend: Dendrogram) -> str:
    """Serialize with branch lengths equal to merge-height differences.

    Children print with the subtree containing the smallest leaf index first.
    """
    for label in dend.leaf_labels:
        if set(label) & _NEWICK_UNSAFE:
            raise ValueError(f"label {label!r} contains newick delimiters")
    n = dend.n_leaves
    min_leaf = list(range(n)) + [0] * len(dend.merges)
    for idx, (a, b, _) in enumerate(dend.merges):
        min_leaf[n + idx] = min(min_leaf[a], min_leaf[b])

    def render(ref: int, parent_height: float) -> str:
        if ref < n:
            body = dend.leaf_labels[ref]
            height = 0.0
        else:
            a, b, height = dend.merges[ref - n]
            if min_leaf[b] < min_leaf[a]:
                a, b = b, a
            body = f"({render(a, height)},{render(b, height)})"
        return f"{body}:{_fmt(parent_height - height)}"

    if not dend.merges:
        return f"{dend.leaf_labels[0]}:0;"
    a, b, height = dend.merges[-1]
    if min_leaf[b] < min_leaf[a]:
        a, b = b, a
    return f"({render(a, height)},{render(b, height)});"


def from_newick(text: str) -> Dendrogram:
    """Parse a binary Newick tree produced by :func:`to_newick`."""
    s = text.strip()
    if not s.endswith(";"):
        raise ValueError("newick text must end with ';'")
    s = s[:-1]
    pos = 0

    def parse_node() -> tuple:
        nonlocal pos
        if pos < len(s) and s[pos] == "(":
            pos += 1
            left = parse_node()
            if s[pos] != ",":
                raise ValueError(f"expected ',' at {pos}")
            pos += 1
            right = parse_node()
            if s[pos] != ")":
                raise ValueError(f"expected ')' at {pos}")
            pos += 1
            node: tuple = (left, right)
        else:
            start = pos
            while pos < len(s) and s[pos] not in ":,()":
                pos += 1
            node = (s[start:pos],)
        branch = 0.0
        if pos < len(s) and s[pos] == ":":
            pos += 1
            start = pos
            while pos < len(s) and s[pos] not in ",()":
                pos += 1
            branch = float(s[start:pos])
        return node + (branch,)

    tree = parse_node()
    if pos != len(s):
        raise ValueError(f"trailing newick content at {pos}")

    leaves: list[str] = []
    internals: list[tuple] = []

    def walk(node: tuple) -> tuple[int, float]:
        """Post-order; returns (kind-tagged index, height)."""
        if len(node) == 2:
            leaves.append(node[0])
            return len(leaves) - 1, 0.0
        (left, right, _) = node
        l_ref, l_height = walk(left)
        r_ref, r_height = walk(right)
        height = max(l_height + left[-1], r_height + right[-1])
        internals.append((l_ref, r_ref, height))
        return -len(internals), height

    walk(tree)
    if len(leaves) < 2:
        raise ValueError("newick tree must contain at least two leaves")
    n = len(leaves)
    order = sorted(range(len(internals)), key=lambda i: (internals[i][2], i))
    position = {-(i + 1): n + rank for rank, i in enumerate(order)}

    def resolve(ref: int) -> int:
        return ref if ref >= 0 else position[ref]

    merges = tuple((resolve(a), resolve(b), h)
                   for a, b, h in (internals[i] for i in order))
    return Dendrogram(merges, tuple(leaves))

"""Adjacency graphs, layered space-time graphs, clusters and cluster counting."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, e, exp
from typing import Hashable, Iterable, Sequence

from .stabilizer import StabilizerCode

__all__ = [
    "Cluster",
    "Graph",
    "adjacency_graph",
    "brute_force_cluster_extensions",
    "clusters_of",
    "count_cluster_extensions",
    "cycle_graph",
    "extension_bound",
    "path_graph",
    "syndrome_adjacency_graph",
]

MAX_EXTENSION_NODES = 40
MAX_EXTENSION_SIZE = 8


class Graph:
    """Undirected graph over hashable node labels, stored as adjacency sets."""

    def __init__(self, labels: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]] = ()):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate node labels")
        self.adj: list[set[int]] = [set() for _ in self.labels]
        for a, b in edges:
            self.add_edge(a, b)
        self.meta: dict = {}

    def add_edge(self, a, b) -> None:
        i, j = self.index[a], self.index[b]
        if i != j:
            self.adj[i].add(j)
            self.adj[j].add(i)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.index

    def neighbors(self, label) -> list:
        return [self.labels[j] for j in sorted(self.adj[self.index[label]])]

    def degree(self, label) -> int:
        return len(self.adj[self.index[label]])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edges(self) -> list[tuple]:
        return [(self.labels[i], self.labels[j]) for i, a in enumerate(self.adj) for j in sorted(a) if i < j]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def to_edge_list(self) -> str:
        """One ``u v`` line per edge; tuple labels are joined with ':'."""

        def fmt(lab):
            return ":".join(map(str, lab)) if isinstance(lab, tuple) else str(lab)

        return "".join(f"{fmt(a)} {fmt(b)}\n" for a, b in self.edges())


def path_graph(n: int) -> Graph:
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def adjacency_graph(code: StabilizerCode) -> Graph:
    """Qubit graph with an edge wherever two qubits share a generator."""
    g = Graph(range(code.n))
    for supp in code.generator_supports():
        for a, b in combinations(supp, 2):
            g.add_edge(a, b)
    r, c = code.ldpc_params
    g.meta["z_bound"] = (r - 1) * c
    if g.max_degree > g.meta["z_bound"]:
        raise AssertionError("adjacency degree exceeds (r-1)c")
    return g


def syndrome_adjacency_graph(code: StabilizerCode, T: int) -> Graph:
    """Layered graph with qubit nodes ``('q', x, t)`` for t in 1..T+1 and
    check nodes ``('b', b, t)`` for t in 1..T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    n, m = code.n, code.num_checks
    labels = [("q", x, t) for t in range(1, T + 2) for x in range(n)]
    labels += [("b", b, t) for t in range(1, T + 1) for b in range(m)]
    g = Graph(labels)
    supports = code.generator_supports()
    for t in range(1, T + 2):
        for supp in supports:
            for a, b in combinations(supp, 2):
                g.add_edge(("q", a, t), ("q", b, t))
    for t in range(1, T + 1):
        for b, supp in enumerate(supports):
            for x in supp:
                g.add_edge(("b", b, t), ("q", x, t))
                g.add_edge(("b", b, t), ("q", x, t + 1))
    r, c = code.ldpc_params
    z = (r - 1) * c
    g.meta.update(T=T, z_bound=z + 2 * c, check_bound=2 * r)
    return g


@dataclass(frozen=True)
class Cluster:
    nodes: frozenset
    errors: int = 0

    @property
    def size(self) -> int:
        return len(self.nodes)

    def times(self) -> list[int]:
        return sorted({lab[2] for lab in self.nodes if isinstance(lab, tuple) and len(lab) == 3})

    def spans(self, first: int, last: int) -> bool:
        ts = self.times()
        return bool(ts) and ts[0] <= first and ts[-1] >= last


def clusters_of(marked: Iterable, graph: Graph, errors: Iterable = ()) -> list[Cluster]:
    """Connected components of the subgraph induced on ``marked``.

    ``errors`` (a subset of nodes) is tallied per cluster.  Clusters are
    ordered by their smallest node index.
    """
    idx = sorted({graph.index[m] for m in marked})
    inside = set(idx)
    err = {graph.index[x] for x in errors if x in graph.index}
    seen: set[int] = set()
    out = []
    for start in idx:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in graph.adj[u]:
                if v in inside and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        out.append(Cluster(frozenset(graph.labels[i] for i in comp), sum(1 for i in comp if i in err)))
    return out


def extension_bound(z: float, t: int, s: int) -> float:
    """e^(t-1) (z e)^(s-t): upper bound on the cluster-extension count."""
    return exp(t - 1) * (z * e) ** (s - t)


def count_cluster_extensions(graph: Graph, S: Iterable, s: int) -> int:
    """Number of node sets of size ``s`` that contain ``S`` and whose every
    connected component meets ``S``.

    Contracting ``S`` to one vertex turns this into counting connected sets
    through that vertex; each set is produced once by branching on the
    smallest frontier vertex (take it, or forbid it for the rest of the branch).
    """
    if len(graph) > MAX_EXTENSION_NODES or s > MAX_EXTENSION_SIZE:
        raise ValueError(
            f"exhaustive extension count limited to {MAX_EXTENSION_NODES} nodes and s <= {MAX_EXTENSION_SIZE}"
        )
    base = {graph.index[x] for x in S}
    if not base:
        raise ValueError("S must be non-empty")
    if s < len(base):
        return 0
    adj = graph.adj

    def rec(rem: int, current: frozenset, frontier: frozenset, banned: frozenset) -> int:
        if rem == 0:
            return 1
        if len(frontier) < 1:
            return 0
        v = min(frontier)
        rest = frontier - {v}
        taken = current | {v}
        grown = (rest | adj[v]) - taken - banned
        return rec(rem - 1, taken, frozenset(grown), banned) + rec(rem, current, rest, banned | {v})

    cur = frozenset(base)
    front = frozenset(set().union(*(adj[i] for i in base)) - base)
    return rec(s - len(base), cur, front, frozenset())


def brute_force_cluster_extensions(graph: Graph, S: Iterable, s: int) -> int:
    """Reference count by checking every superset of ``S`` of size ``s``."""
    base = {graph.index[x] for x in S}
    others = [i for i in range(len(graph)) if i not in base]
    need = s - len(base)
    if need < 0:
        return 0
    if comb(len(others), need) > 5_000_000:
        raise ValueError("too many subsets for brute force")
    total = 0
    for extra in combinations(others, need):
        members = base | set(extra)
        labels = [graph.labels[i] for i in members]
        ok = True
        for cl in clusters_of(labels, graph):
            if not any(graph.index[x] in base for x in cl.nodes):
                ok = False
                break
        total += ok
    return total

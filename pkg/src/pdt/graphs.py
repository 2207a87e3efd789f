"""Finite simple graphs used as zero patterns of symmetric matrices.

Vertices are labelled 1..n throughout (including the edge-list file format);
edges are stored as ordered pairs ``(i, j)`` with ``i < j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .linalg import SymMatrix, cholesky_pd, lambda_min
from .rng import SplitMix64


def _norm_edge(i: int, j: int, n: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if i == j:
        raise InputError(f"self-loop at vertex {i}")
    if not (1 <= i <= n and 1 <= j <= n):
        raise InputError(f"edge ({i}, {j}) has an endpoint outside 1..{n}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class SparsityGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError("a graph needs at least one vertex")
        normed = frozenset(_norm_edge(i, j, self.n) for i, j in self.edges)
        object.__setattr__(self, "edges", normed)

    @classmethod
    def from_edges(cls, n: int, edges) -> "SparsityGraph":
        """Build from an edge iterable, rejecting duplicates (in either orientation)."""
        seen = set()
        for i, j in edges:
            e = _norm_edge(i, j, n)
            if e in seen:
                raise InputError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(seen))

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self) -> dict[int, set[int]]:
        adj = {v: set() for v in range(1, self.n + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def without_edge(self, e) -> "SparsityGraph":
        return SparsityGraph(self.n, self.edges - {_norm_edge(*e, self.n)})

    def is_subgraph_of(self, other: "SparsityGraph") -> bool:
        return self.n == other.n and self.edges <= other.edges


def complete_graph(n: int) -> SparsityGraph:
    return SparsityGraph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


def path_graph(n: int) -> SparsityGraph:
    return SparsityGraph(n, frozenset((i, i + 1) for i in range(1, n)))


def star_graph(n: int) -> SparsityGraph:
    return SparsityGraph(n, frozenset((1, j) for j in range(2, n + 1)))


def cycle_graph(n: int) -> SparsityGraph:
    if n < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return SparsityGraph(n, frozenset((i, i + 1) for i in range(1, n)) | {(1, n)})


def connected_components(G: SparsityGraph) -> list[frozenset[int]]:
    adj = G.neighbors()
    seen: set[int] = set()
    comps = []
    for s in range(1, G.n + 1):
        if s in seen:
            continue
        stack, comp = [s], {s}
        seen.add(s)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected(G: SparsityGraph) -> bool:
    return len(connected_components(G)) == 1


def is_tree(G: SparsityGraph) -> bool:
    return G.m == G.n - 1 and is_connected(G)


def max_degree(G: SparsityGraph) -> int:
    adj = G.neighbors()
    return max((len(s) for s in adj.values()), default=0)


def induced_edges(G: SparsityGraph, vertices) -> frozenset:
    vs = set(vertices)
    return frozenset(e for e in G.edges if e[0] in vs and e[1] in vs)


def is_disconnected_complete_union(G: SparsityGraph) -> bool:
    """True iff every connected component of ``G`` is a complete graph."""
    for comp in connected_components(G):
        k = len(comp)
        if len(induced_edges(G, comp)) != k * (k - 1) // 2:
            return False
    return True


def is_union_disconnected_induced(H: SparsityGraph, G: SparsityGraph) -> bool:
    """True iff ``H`` is a disjoint union of induced subgraphs of ``G``.

    Equivalently every connected component of ``H`` spans exactly the edges of
    ``G`` between its own vertices, so thresholding to ``H`` yields a block
    diagonal matrix of principal submatrices.
    """
    if H.n != G.n:
        raise InputError("graphs must share the vertex set")
    if not H.edges <= G.edges:
        raise InputError("H is not a subgraph of G")
    return all(induced_edges(H, c) == induced_edges(G, c) for c in connected_components(H))


def pattern_of(A: SymMatrix, tol: float = 0.0) -> SparsityGraph:
    """Graph with an edge wherever ``|a_ij| > tol`` off the diagonal."""
    if tol < 0:
        raise InputError("tol must be nonnegative")
    a = A.array
    n = A.n
    iu, ju = np.triu_indices(n, 1)
    mask = np.abs(a[iu, ju]) > tol
    return SparsityGraph(n, frozenset((int(i) + 1, int(j) + 1) for i, j in zip(iu[mask], ju[mask])))


def default_pattern_tol(A: SymMatrix) -> float:
    """Zero tolerance for ingested matrices: ``1e-12 * max|a_ij|``."""
    return 1e-12 * float(np.max(np.abs(A.array)))


def is_member_pg(A: SymMatrix, G: SparsityGraph, tol: float = 0.0, pd_tol: float = 1e-10) -> bool:
    """Membership in the cone of PD matrices with zeros on the non-edges of ``G``."""
    if A.n != G.n:
        raise InputError(f"dimension mismatch: matrix {A.n}, graph {G.n}")
    if not pattern_of(A, tol).edges <= G.edges:
        return False
    return cholesky_pd(A, pd_tol).is_pd


def random_tree(n: int, seed: int) -> SparsityGraph:
    """Uniform labelled tree on ``n`` vertices, decoded from a random Pruefer sequence."""
    if n < 1:
        raise InputError("n must be >= 1")
    if n == 1:
        return SparsityGraph(1)
    if n == 2:
        return SparsityGraph(2, frozenset({(1, 2)}))
    rng = SplitMix64(seed)
    seq = [rng.randbelow(n) + 1 for _ in range(n - 2)]
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = next(u for u in range(1, n + 1) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (x for x in range(1, n + 1) if degree[x] == 1)
    edges.append((u, w))
    return SparsityGraph.from_edges(n, edges)


def random_pg_matrix(G: SparsityGraph, seed: int, scale: float = 1.0) -> SymMatrix:
    """Diagonally dominant member of P_G^+.

    Edge entries are uniform in ``[-scale, scale]``; each diagonal entry is its
    row's absolute sum plus a uniform draw from ``(0, scale]``.
    """
    if not scale > 0:
        raise InputError("scale must be positive")
    rng = SplitMix64(seed)
    a = np.zeros((G.n, G.n))
    for i, j in G.sorted_edges():
        a[i - 1, j - 1] = a[j - 1, i - 1] = rng.uniform(-scale, scale)
    for i in range(G.n):
        a[i, i] = float(np.sum(np.abs(a[i]))) + scale * (1.0 - rng.random())
    return SymMatrix(a)


def tight_pg_matrix(G: SparsityGraph, seed: int, scale: float = 1.0, margin: float = 1e-3) -> SymMatrix:
    """Member of P_G^+ pushed close to the boundary of the cone.

    Starts from :func:`random_pg_matrix` and shifts the diagonal so that the
    smallest eigenvalue becomes ``margin * scale``. Diagonally dominant samples
    survive almost any entrywise shrinkage; these do not, so they make
    preservation tests meaningful.
    """
    base = random_pg_matrix(G, seed, scale)
    shift = lambda_min(base) - margin * scale
    return SymMatrix(base.array - shift * np.eye(G.n))


def write_edge_list(G: SparsityGraph, path) -> None:
    lines = [f"{G.n} {G.m}"] + [f"{i} {j}" for i, j in G.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_edge_list(text: str) -> SparsityGraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputError("empty edge list")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise InputError(f"malformed edge list: {exc}") from None
    if len(edges) != m:
        raise InputError(f"header announces {m} edges, found {len(edges)}")
    return SparsityGraph.from_edges(n, edges)


def read_edge_list(path) -> SparsityGraph:
    return parse_edge_list(Path(path).read_text())

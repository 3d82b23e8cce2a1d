"""Finite weighted graphs and the difference operators on them.

Vertex functions are plain sequences indexed like ``graph.vertices``:
a list of ``Fraction`` for exact work, or a float ``numpy`` array.  The two
kinds are never mixed inside one computation.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import GraphError, InternalInconsistency, ModeMismatch, NotAnEdge, SupportTouchesBoundary
from .lattice import GeneratingSet

INF = float("inf")


def parse_weight(token: str) -> Fraction:
    """Parse a decimal or rational literal exactly."""
    try:
        w = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise GraphError(f"cannot parse weight {token!r}") from exc
    return w


class WeightedGraph:
    """A simple undirected graph with positive symmetric edge weights.

    ``mu[i]`` is the weighted degree of vertex ``i``.  ``boundary`` marks
    vertices whose neighbourhood was cut off when the graph was carved out
    of a larger one (e.g. a lattice box); it is empty for closed graphs.
    """

    def __init__(
        self,
        edges: Iterable[tuple[Hashable, Hashable, object]],
        vertices: Sequence[Hashable] | None = None,
        boundary: Iterable[Hashable] = (),
        embedding: dict | None = None,
    ):
        labels: list = list(vertices) if vertices is not None else []
        index: dict = {v: i for i, v in enumerate(labels)}
        if len(index) != len(labels):
            raise GraphError("duplicate vertex labels")
        adj: list[dict[int, Fraction]] = [{} for _ in labels]
        for x, y, w in edges:
            w = Fraction(w) if not isinstance(w, str) else parse_weight(w)
            if w <= 0:
                raise GraphError(f"edge {x}-{y} has non-positive weight {w}")
            if x == y:
                raise GraphError(f"loop at {x}")
            for v in (x, y):
                if v not in index:
                    if vertices is not None:
                        raise GraphError(f"edge uses unknown vertex {v!r}")
                    index[v] = len(labels)
                    labels.append(v)
                    adj.append({})
            i, j = index[x], index[y]
            if j in adj[i]:
                raise GraphError(f"multi-edge {x}-{y}")
            adj[i][j] = w
            adj[j][i] = w
        self.vertices = tuple(labels)
        self.index = index
        self.adj = tuple(adj)
        self.mu = tuple(sum(a.values(), Fraction(0)) for a in adj)
        for v, m in zip(labels, self.mu):
            if m <= 0:
                raise GraphError(f"vertex {v!r} is isolated")
        self.boundary = frozenset(index[v] for v in boundary)
        self.embedding = embedding
        self._float = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"WeightedGraph(|V|={len(self)}, |E|={self.edge_count})"

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self):
        for i, a in enumerate(self.adj):
            for j, w in a.items():
                if i < j:
                    yield i, j, w

    def weight(self, i: int, j: int) -> Fraction:
        return self.adj[i].get(j, Fraction(0))

    def vertex(self, label) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise GraphError(f"unknown vertex {label!r}") from None

    def measure(self, indices: Iterable[int]) -> Fraction:
        return sum((self.mu[i] for i in indices), Fraction(0))

    def distances(self, source: int) -> list[float]:
        """Combinatorial distance from ``source``; weights are ignored."""
        dist = [INF] * len(self)
        dist[source] = 0
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in self.adj[x]:
                if dist[y] == INF:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def ball(self, center: int, radius) -> list[int]:
        dist = self.distances(center)
        return [i for i, d in enumerate(dist) if d <= radius]

    def components(self) -> list[list[int]]:
        seen = [False] * len(self)
        comps = []
        for s in range(len(self)):
            if seen[s]:
                continue
            comp = []
            queue = deque([s])
            seen[s] = True
            while queue:
                x = queue.popleft()
                comp.append(x)
                for y in self.adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def float_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense weight matrix and measure as float arrays."""
        if self._float is None:
            W = np.zeros((len(self), len(self)))
            for i, j, w in self.edges():
                W[i, j] = W[j, i] = float(w)
            self._float = (W, W.sum(axis=1))
        return self._float

    def to_text(self) -> str:
        return "".join(f"{self.vertices[i]} {self.vertices[j]} {w}\n" for i, j, w in self.edges())


# construction


def parse_graph(text: str) -> WeightedGraph:
    """Parse ``u v w`` lines.  A pair may appear twice only with equal weights."""
    seen: dict[frozenset, Fraction] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'u v w', got {raw!r}")
        x, y, w = parts[0], parts[1], parse_weight(parts[2])
        key = frozenset((x, y))
        if key in seen:
            if seen[key] != w:
                raise GraphError(f"line {lineno}: asymmetric weight for {x}-{y}")
            continue
        seen[key] = w
        edges.append((x, y, w))
    if not edges:
        raise GraphError("graph has no edges")
    return WeightedGraph(edges)


def load_graph(path: str | Path) -> WeightedGraph:
    return parse_graph(Path(path).read_text())


def path_graph(size: int, weights: Sequence | None = None) -> WeightedGraph:
    ws = list(weights) if weights is not None else [1] * (size - 1)
    return WeightedGraph(((i, i + 1, ws[i]) for i in range(size - 1)), vertices=range(size))


def centered_path(radius: int) -> WeightedGraph:
    """Path on the integers -radius..radius."""
    return WeightedGraph(((i, i + 1, 1) for i in range(-radius, radius)), vertices=range(-radius, radius + 1))


def grid_graph(rows: int, cols: int) -> WeightedGraph:
    verts = list(product(range(rows), range(cols)))
    edges = []
    for r, c in verts:
        if r + 1 < rows:
            edges.append(((r, c), (r + 1, c), 1))
        if c + 1 < cols:
            edges.append(((r, c), (r, c + 1), 1))
    return WeightedGraph(edges, vertices=verts)


def star_graph(leaves: int) -> WeightedGraph:
    return WeightedGraph(((0, i, 1) for i in range(1, leaves + 1)), vertices=range(leaves + 1))


def _random_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 9), rng.randint(1, 9))


def random_tree(size: int, rng: random.Random, weighted: bool = True) -> WeightedGraph:
    edges = []
    for v in range(1, size):
        edges.append((rng.randrange(v), v, _random_weight(rng) if weighted else 1))
    return WeightedGraph(edges, vertices=range(size))


def random_graph(size: int, p: float, rng: random.Random) -> WeightedGraph:
    """Erdos-Renyi graph with rational weights; isolated vertices get one random edge."""
    pairs = {}
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < p:
                pairs[(i, j)] = _random_weight(rng)
    touched = {v for e in pairs for v in e}
    for v in range(size):
        if v not in touched:
            u = rng.choice([x for x in range(size) if x != v])
            pairs[(min(u, v), max(u, v))] = _random_weight(rng)
            touched.update((u, v))
    return WeightedGraph(((i, j, w) for (i, j), w in pairs.items()), vertices=range(size))


def lattice_box(S: GeneratingSet, radius: int) -> WeightedGraph:
    """The part of the Cayley graph (Z^n, S) inside the box |x_i| <= radius.

    Vertices are labelled by their lattice coordinates; vertices missing
    some S-neighbour are recorded as boundary.
    """
    pts = list(product(range(-radius, radius + 1), repeat=S.n))
    inside = set(pts)
    edges = []
    boundary = []
    for x in pts:
        full = True
        for s in S.generators:
            y = tuple(a + b for a, b in zip(x, s))
            if y in inside:
                if x < y:
                    edges.append((x, y, 1))
            else:
                full = False
        if not full:
            boundary.append(x)
    return WeightedGraph(edges, vertices=pts, boundary=boundary, embedding={x: x for x in pts})


# vertex functions


def is_float_function(f) -> bool:
    return isinstance(f, np.ndarray) and f.dtype.kind == "f"


def _mode(*fs) -> bool:
    kinds = {is_float_function(f) for f in fs}
    if len(kinds) > 1:
        raise ModeMismatch("exact and floating-point vertex functions were mixed")
    return kinds.pop()


def _check_len(G: WeightedGraph, f) -> None:
    if len(f) != len(G):
        raise ValueError(f"vertex function has {len(f)} values, graph has {len(G)} vertices")


def graph_laplacian(G: WeightedGraph, f):
    """(Delta f)(x) = sum_y (w_xy / mu_x) (f(y) - f(x))."""
    _check_len(G, f)
    if _mode(f):
        W, mu = G.float_arrays()
        return W @ f / mu - f
    f = [Fraction(v) for v in f]
    return [
        sum((w * (f[j] - f[i]) for j, w in a.items()), Fraction(0)) / G.mu[i]
        for i, a in enumerate(G.adj)
    ]


def gamma(G: WeightedGraph, f):
    """Carre du champ: Gamma(f)(x) = 1/2 sum_y (w_xy / mu_x) (f(y) - f(x))^2."""
    _check_len(G, f)
    if _mode(f):
        W, mu = G.float_arrays()
        diff = f[None, :] - f[:, None]
        return 0.5 * (W * diff**2).sum(axis=1) / mu
    f = [Fraction(v) for v in f]
    return [
        sum((w * (f[j] - f[i]) ** 2 for j, w in a.items()), Fraction(0)) / (2 * G.mu[i])
        for i, a in enumerate(G.adj)
    ]


def green_identity_residual(G: WeightedGraph, f, g):
    """1/2 sum_{x,y} w_xy (grad f)(grad g) + sum_x (Delta f)(x) g(x) mu_x."""
    _check_len(G, f)
    _check_len(G, g)
    floating = _mode(f, g)
    for i in G.boundary:
        if g[i]:
            raise SupportTouchesBoundary(f"g is nonzero at boundary vertex {G.vertices[i]!r}")
    if floating:
        W, mu = G.float_arrays()
        df = f[None, :] - f[:, None]
        dg = g[None, :] - g[:, None]
        return 0.5 * (W * df * dg).sum() + (graph_laplacian(G, f) * g * mu).sum()
    f = [Fraction(v) for v in f]
    g = [Fraction(v) for v in g]
    energy = Fraction(0)
    for i, a in enumerate(G.adj):
        for j, w in a.items():
            energy += w * (f[j] - f[i]) * (g[j] - g[i])
    lap = graph_laplacian(G, f)
    return energy / 2 + sum((lap[i] * g[i] * G.mu[i] for i in range(len(G))), Fraction(0))


def product_rule_residual(G: WeightedGraph, f, g, x: int, y: int):
    """grad_xy(fg) - f(x) grad_xy g - g(y) grad_xy f on the edge (x, y)."""
    if y not in G.adj[x]:
        raise NotAnEdge(f"{G.vertices[x]!r} and {G.vertices[y]!r} are not adjacent")
    _mode(f, g)
    return (f[y] * g[y] - f[x] * g[x]) - f[x] * (g[y] - g[x]) - g[y] * (f[y] - f[x])


def divergence_residual(G: WeightedGraph, f):
    """sum_x (Delta f)(x) mu_x, which vanishes on a closed finite graph."""
    lap = graph_laplacian(G, f)
    if is_float_function(f):
        return float((lap * G.float_arrays()[1]).sum())
    return sum((v * m for v, m in zip(lap, G.mu)), Fraction(0))


def cutoff(G: WeightedGraph, center: int, R) -> list[Fraction]:
    """eta(x) = 0 v (2 - d(x, x0)/R) ^ 1; equals 1 on B_R and 0 off B_2R."""
    R = Fraction(R)
    if R < 1:
        raise ValueError(f"radius must be at least 1, got {R}")
    dist = G.distances(center)
    eta = []
    for d in dist:
        if d == INF:
            eta.append(Fraction(0))
        else:
            eta.append(max(Fraction(0), min(Fraction(1), 2 - Fraction(int(d)) / R)))
    for i, d in enumerate(dist):
        if d <= R and eta[i] != 1:
            raise InternalInconsistency("cutoff must equal 1 on B_R")
        if d > 2 * R and eta[i] != 0:
            raise InternalInconsistency("cutoff must vanish outside B_2R")
    for i, j, _ in G.edges():
        if abs(eta[i] - eta[j]) > 2 / R:
            raise InternalInconsistency("cutoff increments exceed 2/R")
    return eta


def random_exact_function(G: WeightedGraph, rng: random.Random, support: Iterable[int] | None = None) -> list[Fraction]:
    allowed = set(range(len(G))) if support is None else set(support)
    return [
        Fraction(rng.randint(-20, 20), rng.randint(1, 12)) if i in allowed else Fraction(0)
        for i in range(len(G))
    ]

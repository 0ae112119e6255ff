"""Quantum decomposition of a rooted graph and its vacuum moments."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import NotBidirectional, NotStratifiable, NotSymmetric
from .graphs import JacobiOperator, WeightedGraph
from .ifs import parse_word
from .numerics import lanczos, mat_power_apply


@dataclass(frozen=True, eq=False)
class Stratification:
    layers: Tuple[Tuple[int, ...], ...]
    unreachable: Tuple[int, ...]
    n: int

    @property
    def sizes(self) -> List[int]:
        return [len(layer) for layer in self.layers]

    def layer_of(self) -> np.ndarray:
        """Layer index per vertex, -1 when unreachable."""
        out = np.full(self.n, -1, dtype=int)
        for k, layer in enumerate(self.layers):
            out[list(layer)] = k
        return out

    def phi(self, k: int) -> np.ndarray:
        vec = np.zeros(self.n)
        layer = self.layers[k]
        vec[list(layer)] = 1.0 / math.sqrt(len(layer))
        return vec


def stratify(g: WeightedGraph) -> Stratification:
    """Distance partition from the root over the undirected support."""
    nbrs = g.neighbors()
    dist = [-1] * g.n
    dist[g.root] = 0
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for u in nbrs[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    depth = max(dist) + 1
    layers = [[] for _ in range(depth)]
    for v, k in enumerate(dist):
        if k >= 0:
            layers[k].append(v)
    unreachable = tuple(v for v, k in enumerate(dist) if k < 0)
    return Stratification(tuple(tuple(x) for x in layers), unreachable, g.n)


@dataclass(frozen=True, eq=False)
class QuantumComponents:
    """``A = a_plus + a_minus + a_zero`` as CSR arrays."""

    a_plus: sp.csr_array
    a_minus: sp.csr_array
    a_zero: sp.csr_array

    def get(self, letter: str) -> sp.csr_array:
        return {"+": self.a_plus, "-": self.a_minus, "o": self.a_zero}[letter]


def quantum_components(g: WeightedGraph, s: Optional[Stratification] = None) -> QuantumComponents:
    """Split each entry ``A[i, j]`` by ``layer(i) - layer(j)``.

    +1 raises (column in layer n, row in layer n+1), -1 lowers, 0 preserves.
    Entries touching unreachable vertices cannot occur: those vertices have
    no support edges to the root's component.
    """
    s = s or stratify(g)
    layer = s.layer_of()
    parts: Dict[int, List[Tuple[int, int, float]]] = {1: [], -1: [], 0: []}
    for i, j, w in g.edges:
        if layer[i] < 0 or layer[j] < 0:
            continue
        diff = int(layer[i] - layer[j])
        if diff not in parts:
            raise NotStratifiable(f"edge ({i}, {j}) jumps {diff} layers")
        parts[diff].append((i, j, w))

    def build(entries):
        if not entries:
            return sp.csr_array((g.n, g.n))
        rows, cols, vals = zip(*entries)
        return sp.csr_array((vals, (rows, cols)), shape=(g.n, g.n))

    return QuantumComponents(build(parts[1]), build(parts[-1]), build(parts[0]))


@dataclass(frozen=True, eq=False)
class GaugedJacobi:
    """Jacobi coefficients ω̄_n, ᾱ_n (0-based arrays: ``omega[0]`` is ω̄_1).

    ``gauge`` and ``signs`` give the diagonal similarity ``D = diag(signs*gauge)``
    that turns a bidirectional tridiagonal ``J`` into ``D^{-1} J D`` with
    positive symmetric off-diagonal; both are all ones for symmetric input.
    """

    omega: np.ndarray
    alpha: np.ndarray
    gauge: np.ndarray
    signs: np.ndarray

    @property
    def offdiag(self) -> np.ndarray:
        return np.sqrt(self.omega)

    def symmetric_matrix(self) -> np.ndarray:
        n = self.alpha.size
        out = np.diag(self.alpha)
        if n > 1:
            off = self.offdiag[: n - 1]
            out += np.diag(off, 1) + np.diag(off, -1)
        return out

    def scaled(self, kappa: float) -> Tuple[np.ndarray, np.ndarray]:
        """``(ω̄/κ, ᾱ/√κ)``, matching operators scaled by ``1/√κ``."""
        return self.omega / kappa, self.alpha / math.sqrt(kappa)


def symmetrize(j: JacobiOperator) -> GaugedJacobi:
    prod = j.lower * j.upper
    if np.any(prod <= 0):
        k = int(np.argmax(prod <= 0))
        raise NotBidirectional(f"lower*upper = {prod[k]:g} at position {k}")
    ratio = np.sqrt(j.lower / j.upper)
    gauge = np.concatenate([[1.0], np.cumprod(ratio)])
    signs = np.concatenate([[1.0], np.cumprod(np.sign(j.upper))])
    return GaugedJacobi(prod.copy(), j.diag.copy(), gauge, signs)


def extract_jacobi(g: WeightedGraph, depth: Optional[int] = None) -> GaugedJacobi:
    """Jacobi coefficients of the adjacency seen from the root.

    Symmetric graphs go through Lanczos from ``δ_root``; a non-symmetric
    graph is accepted when it is a bidirectional tridiagonal rooted at 0,
    where the diagonal gauge gives the coefficients directly.
    """
    if g.is_symmetric():
        depth = g.n if depth is None else min(depth, g.n)
        start = np.zeros(g.n)
        start[g.root] = 1.0
        alpha, beta = lanczos(g.operator(), start, depth)
        ones = np.ones(alpha.size)
        return GaugedJacobi(beta ** 2, alpha, ones, ones.copy())
    tri = g.jacobi()
    if tri is None or g.root != 0:
        raise NotSymmetric("non-symmetric graph is not a tridiagonal rooted at vertex 0")
    gj = symmetrize(tri)
    if depth is not None and depth < gj.alpha.size:
        gj = GaugedJacobi(gj.omega[: depth - 1], gj.alpha[:depth], gj.gauge[:depth], gj.signs[:depth])
    return gj


def kappa_power(kappa: float, m: int) -> float:
    """``√κ^m`` as ``κ^(m//2)`` times one ``√κ`` for odd m, exact for even m."""
    out = float(kappa) ** (m // 2)
    return out * math.sqrt(kappa) if m % 2 else out


def vacuum_moment(g: WeightedGraph, m: int, scale: float = 1.0) -> float:
    """``<δ_root, (A/scale)^m δ_root>``."""
    start = np.zeros(g.n)
    start[g.root] = 1.0
    return float(mat_power_apply(g.operator(), start, m)[g.root]) / scale ** m


def vacuum_moments(g: WeightedGraph, count: int, scale: float = 1.0) -> np.ndarray:
    """``vacuum_moment`` for orders ``0..count-1`` in one pass."""
    op = g.operator()
    vec = np.zeros(g.n)
    vec[g.root] = 1.0
    out = np.empty(count)
    for k in range(count):
        out[k] = vec[g.root] / scale ** k
        vec = op @ vec
    return out


def mixed_moment(g: WeightedGraph, word, kappa: float,
                 components: Optional[QuantumComponents] = None) -> float:
    """``<Φ0, (A^{ε_m}/√κ) ... (A^{ε_1}/√κ) Φ0>``; the rightmost letter acts first."""
    letters = parse_word(word)
    comps = components or quantum_components(g)
    vec = np.zeros(g.n)
    vec[g.root] = 1.0
    root = g.root
    for ch in reversed(letters):
        vec = comps.get(ch) @ vec
    return float(vec[root]) / kappa_power(kappa, len(letters))


def all_words(length: int) -> List[str]:
    from itertools import product

    return ["".join(w) for w in product("+-o", repeat=length)]


def mixed_moments_all(g: WeightedGraph, length: int, kappa: float,
                      components: Optional[QuantumComponents] = None) -> Dict[str, float]:
    """Mixed moments of every word of the given length, sharing prefixes."""
    comps = components or quantum_components(g)
    start = np.zeros(g.n)
    start[g.root] = 1.0
    norm = kappa_power(kappa, length)
    out: Dict[str, float] = {}

    def walk(suffix: str, vec: np.ndarray):
        if len(suffix) == length:
            out[suffix] = float(vec[g.root]) / norm
            return
        for ch in "+-o":
            walk(ch + suffix, comps.get(ch) @ vec)

    walk("", start)
    return out

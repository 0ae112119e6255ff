"""Graph families: the triadic p-Laplacian lattice, substitution fractals
built from centro-symmetric Jacobi blocks, Krawtchouk blocks and a few
named reference graphs.

Edge ``(s, t, w)`` means matrix entry ``A[s, t] = w``; a row of ``A`` lists
the weights leaving one vertex, exactly as a row of the Laplacian lists the
coefficients of ``(Δf)(x)``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInput, ReducibleBlock, SizeLimit

MAX_VERTICES = 200_000
MAX_HYPERCUBE_DIM = 14
MAX_SHIFT = 4.0

Edge = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Finite directed weighted graph with a distinguished root vertex."""

    n: int
    edges: Tuple[Edge, ...]
    root: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("graph needs at least one vertex")
        if not 0 <= self.root < self.n:
            raise InvalidInput(f"root {self.root} outside [0, {self.n})")
        if self.n > MAX_VERTICES:
            raise SizeLimit(f"{self.n} vertices exceeds the cap of {MAX_VERTICES}")
        clean = []
        for s, t, w in self.edges:
            s, t, w = int(s), int(t), float(w)
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise InvalidInput(f"edge ({s}, {t}) out of range")
            if not np.isfinite(w) or w == 0.0:
                raise InvalidInput(f"edge ({s}, {t}) has invalid weight {w!r}")
            clean.append((s, t, w))
        clean.sort(key=lambda e: (e[0], e[1]))
        for e0, e1 in zip(clean, clean[1:]):
            if e0[:2] == e1[:2]:
                raise InvalidInput(f"duplicate edge {e0[:2]}")
        object.__setattr__(self, "edges", tuple(clean))

    @cached_property
    def _coo(self):
        if not self.edges:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        src, dst, w = zip(*self.edges)
        return np.asarray(src), np.asarray(dst), np.asarray(w, dtype=float)

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        src, dst, w = self._coo
        out[src, dst] = w
        return out

    def sparse(self) -> sp.csr_array:
        src, dst, w = self._coo
        return sp.csr_array((w, (src, dst)), shape=(self.n, self.n))

    def operator(self):
        """Dense matrix for small graphs, CSR otherwise."""
        return self.matrix() if self.n <= 1024 else self.sparse()

    def is_symmetric(self) -> bool:
        lookup = {(s, t): w for s, t, w in self.edges}
        return all(lookup.get((t, s)) == w for s, t, w in self.edges)

    def neighbors(self) -> List[List[int]]:
        """Undirected support, self-loops dropped."""
        nbrs: List[set] = [set() for _ in range(self.n)]
        for s, t, _ in self.edges:
            if s != t:
                nbrs[s].add(t)
                nbrs[t].add(s)
        return [sorted(x) for x in nbrs]

    def jacobi(self) -> Optional["JacobiOperator"]:
        """Tridiagonal view in vertex order, or None if some edge skips a vertex."""
        diag = np.zeros(self.n)
        lower = np.zeros(self.n - 1)
        upper = np.zeros(self.n - 1)
        for s, t, w in self.edges:
            if s == t:
                diag[s] = w
            elif t == s + 1:
                upper[s] = w
            elif t == s - 1:
                lower[t] = w
            else:
                return None
        return JacobiOperator(diag, lower, upper)

    def with_root(self, root: int) -> "WeightedGraph":
        return WeightedGraph(self.n, self.edges, root)

    def to_json(self) -> str:
        edges = ",".join(f"[{s},{t},{_fmt(w)}]" for s, t, w in self.edges)
        return f'{{"n": {self.n}, "root": {self.root}, "edges": [{edges}]}}'

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        try:
            data = json.loads(text)
            return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), int(data.get("root", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed graph JSON: {exc}") from exc


def _fmt(w: float) -> str:
    text = f"{w:.17g}"
    if not any(ch in text for ch in ".eEn"):
        text += ".0"
    return text


@dataclass(frozen=True, eq=False)
class JacobiOperator:
    """Tridiagonal operator: ``lower[k] = J[k+1, k]``, ``upper[k] = J[k, k+1]``."""

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).ravel()
        lo = np.asarray(self.lower, dtype=float).ravel()
        up = np.asarray(self.upper, dtype=float).ravel()
        if d.size < 1 or lo.size != d.size - 1 or up.size != d.size - 1:
            raise InvalidInput("inconsistent tridiagonal lengths")
        if not all(np.all(np.isfinite(x)) for x in (d, lo, up)):
            raise InvalidInput("non-finite tridiagonal entry")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def n(self) -> int:
        return self.diag.size

    def is_bidirectional(self) -> bool:
        return bool(np.all(self.lower * self.upper > 0))

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.n > 1:
            out += np.diag(self.upper, 1) + np.diag(self.lower, -1)
        return out

    def to_graph(self, root: int = 0) -> WeightedGraph:
        edges = [(k, k, w) for k, w in enumerate(self.diag) if w != 0.0]
        edges += [(k, k + 1, w) for k, w in enumerate(self.upper) if w != 0.0]
        edges += [(k + 1, k, w) for k, w in enumerate(self.lower) if w != 0.0]
        return WeightedGraph(self.n, tuple(edges), root)


# --- the triadic p-Laplacian -------------------------------------------------

def triadic_valuation(x: int) -> int:
    """Largest ``m`` with ``3**m`` dividing ``x``."""
    if int(x) != x or x < 1:
        raise InvalidInput(f"triadic valuation needs a positive integer, got {x!r}")
    x = int(x)
    m = 0
    while x % 3 == 0:
        x //= 3
        m += 1
    return m


def row_type(x: int) -> int:
    """1 or 2: the residue of ``x / 3**m(x)`` modulo 3."""
    return (x // 3 ** triadic_valuation(x)) % 3


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidInput(f"p must lie in (0, 1), got {p}")
    return p


def p_laplacian(n: int, p: float) -> JacobiOperator:
    """Truncation of the self-similar Laplacian to vertices ``0..n-1``.

    The last row keeps its lower entry and loses the superdiagonal one.
    """
    p = _check_p(p)
    if n < 2:
        raise InvalidInput("p-Laplacian truncation needs n >= 2")
    diag = np.ones(n)
    lower = np.empty(n - 1)
    upper = np.empty(n - 1)
    upper[0] = -1.0
    for x in range(1, n):
        back, fwd = (p - 1, -p) if row_type(x) == 1 else (-p, p - 1)
        lower[x - 1] = back
        if x < n - 1:
            upper[x] = fwd
    return JacobiOperator(diag, lower, upper)


def transition_graph(lap: JacobiOperator, root: int = 0) -> WeightedGraph:
    """Random-walk graph ``I - Δ`` of a probabilistic Laplacian."""
    return JacobiOperator(1.0 - lap.diag, -lap.lower, -lap.upper).to_graph(root)


# --- centro-symmetric blocks -------------------------------------------------

@dataclass(frozen=True)
class CentroBlock:
    """Centro-symmetric Jacobi building block.

    ``a`` holds ``a(1)..a(n0)``, ``b`` holds ``b(0), b(1), ...``; the diagonal at
    row ``k`` is ``b(min(k, n0 - k)) + shift`` and every entry is multiplied by
    ``scale``.
    """

    a: Tuple[float, ...]
    b: Tuple[float, ...]
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not a:
            raise InvalidInput("block needs at least one off-diagonal weight")
        if any(x == 0.0 for x in a):
            raise ReducibleBlock("a zero off-diagonal weight makes the block reducible")
        if not all(np.isfinite(a + b)):
            raise InvalidInput("non-finite block entry")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise InvalidInput(f"scale must be positive, got {self.scale}")
        if abs(self.shift) >= MAX_SHIFT:
            raise InvalidInput(f"diagonal shift must satisfy |c| < {MAX_SHIFT:g}")
        if len(b) < self.n0 // 2 + 1:
            raise InvalidInput(f"need b(0)..b({self.n0 // 2}), got {len(b)} values")

    @property
    def n0(self) -> int:
        return len(self.a)

    def b_at(self, k: int) -> float:
        """Unscaled diagonal value of row ``k`` (centro-symmetric extension)."""
        return self.b[min(k, self.n0 - k)] + self.shift

    def a_at(self, k: int) -> float:
        """``a(k)`` with the 1-based indexing of the recurrence."""
        return self.a[k - 1]

    def jacobi(self) -> JacobiOperator:
        n0 = self.n0
        diag = np.array([self.b_at(k) for k in range(n0 + 1)])
        upper = np.array(self.a)
        lower = np.array(self.a[::-1])
        return JacobiOperator(diag * self.scale, lower * self.scale, upper * self.scale)

    def to_dict(self) -> Dict[str, Any]:
        return {"a": list(self.a), "b": list(self.b), "scale": self.scale, "shift": self.shift}


def centro_block(a: Sequence[float], b: Sequence[float], scale: float = 1.0,
                 shift: float = 0.0) -> Tuple[CentroBlock, JacobiOperator]:
    block = CentroBlock(tuple(a), tuple(b), scale, shift)
    return block, block.jacobi()


def is_centrosymmetric(m: np.ndarray) -> bool:
    return bool(np.array_equal(m, m[::-1, ::-1]))


def p_unit_block(p: float) -> CentroBlock:
    """Four-vertex transition block of the p-Laplacian lattice."""
    p = _check_p(p)
    return CentroBlock((1.0, p, 1.0 - p), (0.0, 0.0))


def krawtchouk_block(d: int, scale: float = 1.0) -> Tuple[JacobiOperator, JacobiOperator]:
    """Leonard pair ``(A, B)`` of Krawtchouk type; B is diagonal."""
    if int(d) != d or d < 1:
        raise InvalidInput(f"d must be a positive integer, got {d!r}")
    if not scale > 0:
        raise InvalidInput("scale must be positive")
    d = int(d)
    upper = np.arange(d, 0, -1, dtype=float) * scale
    lower = np.arange(1, d + 1, dtype=float) * scale
    a = JacobiOperator(np.zeros(d + 1), lower, upper)
    b = JacobiOperator(np.arange(d, -d - 1, -2, dtype=float) * scale, np.zeros(d), np.zeros(d))
    return a, b


def block_charpoly(block: CentroBlock, k: int, x: float) -> float:
    """``P^D_k(x)`` of the block's interior, from the unscaled ``a`` and ``b``."""
    n0 = block.n0
    if not 0 <= k <= n0 - 1:
        raise InvalidInput(f"degree {k} outside [0, {n0 - 1}]")
    prev, cur = 0.0, 1.0
    for j in range(1, k + 1):
        coupling = block.a_at(j) * block.a_at(n0 + 1 - j) if j >= 2 else 0.0
        prev, cur = cur, (x - block.b_at(j)) * cur - coupling * prev
    return cur


# --- substitution rule -------------------------------------------------------

@dataclass(frozen=True)
class Protograph:
    """Directed junction weights of the four-vertex outer lattice m0..m3.

    ``forward[i]`` replaces the first edge (0 -> 1) of copy ``i``;
    ``backward[i]`` replaces the last edge (L -> L-1) of copy ``i``, i.e. the
    edge leaving junction ``m_{i+1}`` towards the origin.
    """

    forward: Tuple[float, float, float]
    backward: Tuple[float, float, float]

    def __post_init__(self):
        fw = tuple(float(x) for x in self.forward)
        bw = tuple(float(x) for x in self.backward)
        if len(fw) != 3 or len(bw) != 3:
            raise InvalidInput("protograph needs three forward and three backward weights")
        if any(x == 0.0 or not np.isfinite(x) for x in fw + bw):
            raise InvalidInput("protograph weights must be finite and nonzero")
        object.__setattr__(self, "forward", fw)
        object.__setattr__(self, "backward", bw)

    @classmethod
    def from_block(cls, block: CentroBlock) -> "Protograph":
        fwd = block.a[0] * block.scale
        back = block.a[-1] * block.scale
        return cls((fwd,) * 3, (back,) * 3)

    @classmethod
    def p_laplacian(cls, p: float) -> "Protograph":
        p = _check_p(p)
        return cls((1.0, p, 1.0 - p), (1.0 - p, p, 1.0 - p))

    def to_dict(self) -> Dict[str, Any]:
        return {"forward": list(self.forward), "backward": list(self.backward)}


def substitution_size(n0: int, levels: int) -> int:
    return 3 ** levels * n0 + 1


def substitute_jacobi(block: CentroBlock, levels: int,
                      protograph: Optional[Protograph] = None) -> JacobiOperator:
    if int(levels) != levels or levels < 0:
        raise InvalidInput(f"levels must be a nonnegative integer, got {levels!r}")
    size = substitution_size(block.n0, int(levels))
    if size > MAX_VERTICES:
        raise SizeLimit(f"level {levels} would produce {size} vertices (cap {MAX_VERTICES})")
    proto = protograph or Protograph.from_block(block)
    cur = block.jacobi()
    for _ in range(int(levels)):
        span = cur.n - 1
        diag = np.concatenate([cur.diag[:-1]] * 3 + [cur.diag[-1:]])
        lower = np.tile(cur.lower, 3)
        upper = np.tile(cur.upper, 3)
        for i in range(3):
            upper[i * span] = proto.forward[i]
            lower[i * span + span - 1] = proto.backward[i]
        cur = JacobiOperator(diag, lower, upper)
    return cur


def substitute(block: CentroBlock, levels: int,
               protograph: Optional[Protograph] = None) -> WeightedGraph:
    """Level-``levels`` substitution graph rooted at vertex 0."""
    return substitute_jacobi(block, levels, protograph).to_graph(root=0)


# --- named graphs ------------------------------------------------------------

class Family(str, enum.Enum):
    PLAPLACIAN = "plap"
    FRACTAL = "fractal"
    CYCLE = "cycle"
    PATH = "path"
    HYPERCUBE = "hypercube"


@dataclass(frozen=True)
class FamilySpec:
    """A graph family and its parameters.

    ``level`` semantics per kind: cycle -> N (graph C_{2N+1}), path -> vertex
    count, hypercube -> dimension, plap -> the Laplacian matrix truncated at
    ``3**level + 1`` vertices, fractal -> substitution depth.
    """

    kind: Family
    p: Optional[float] = None
    block: Optional[CentroBlock] = None
    protograph: Optional[Protograph] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Family(self.kind))
        if self.kind is Family.PLAPLACIAN:
            if self.p is None:
                raise InvalidInput("plap family needs p")
            _check_p(self.p)
        if self.kind is Family.FRACTAL and self.block is None:
            if self.p is None:
                raise InvalidInput("fractal family needs a block or p")
            object.__setattr__(self, "block", p_unit_block(self.p))
            if self.protograph is None:
                object.__setattr__(self, "protograph", Protograph.p_laplacian(self.p))

    def build(self, level: int) -> WeightedGraph:
        if self.kind is Family.CYCLE:
            return cycle_graph(level)
        if self.kind is Family.PATH:
            return path_graph(level)
        if self.kind is Family.HYPERCUBE:
            return hypercube_graph(level)
        if self.kind is Family.PLAPLACIAN:
            size = 3 ** level + 1
            if size > MAX_VERTICES:
                raise SizeLimit(f"lattice level {level} exceeds the vertex cap")
            return p_laplacian(size, self.p).to_graph()
        return substitute(self.block, level, self.protograph)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind.value}
        if self.p is not None:
            out["p"] = self.p
        if self.block is not None:
            out["block"] = self.block.to_dict()
        if self.protograph is not None:
            out["protograph"] = self.protograph.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FamilySpec":
        block = data.get("block")
        proto = data.get("protograph")
        return cls(
            Family(data["kind"]),
            p=data.get("p"),
            block=block_from_dict(block) if block else None,
            protograph=Protograph(tuple(proto["forward"]), tuple(proto["backward"])) if proto else None,
        )


def block_from_dict(data: Dict[str, Any]) -> CentroBlock:
    """Block JSON: ``{"a": [...], "b": [...], "scale": s, "shift": c}`` or
    ``{"krawtchouk": d, "scale": s}``."""
    if "krawtchouk" in data:
        d = int(data["krawtchouk"])
        return CentroBlock(tuple(range(d, 0, -1)), (0.0,) * (d // 2 + 1),
                           float(data.get("scale", 1.0)), float(data.get("shift", 0.0)))
    try:
        return CentroBlock(tuple(data["a"]), tuple(data["b"]),
                           float(data.get("scale", 1.0)), float(data.get("shift", 0.0)))
    except KeyError as exc:
        raise InvalidInput(f"block JSON missing {exc}") from exc


def cycle_graph(N: int) -> WeightedGraph:
    """The odd cycle C_{2N+1}, root 0."""
    if N < 1:
        raise InvalidInput("cycle needs N >= 1")
    n = 2 * N + 1
    if n > MAX_VERTICES:
        raise SizeLimit("cycle exceeds the vertex cap")
    edges = [(v, (v + 1) % n, 1.0) for v in range(n)] + [((v + 1) % n, v, 1.0) for v in range(n)]
    return WeightedGraph(n, tuple(edges), 0)


def path_graph(n: int) -> WeightedGraph:
    """Path on ``n`` vertices, root at the end vertex 0."""
    if n < 1:
        raise InvalidInput("path needs n >= 1")
    if n > MAX_VERTICES:
        raise SizeLimit("path exceeds the vertex cap")
    edges = [(v, v + 1, 1.0) for v in range(n - 1)] + [(v + 1, v, 1.0) for v in range(n - 1)]
    return WeightedGraph(n, tuple(edges), 0)


def hypercube_graph(d: int) -> WeightedGraph:
    """The d-cube H(d, 2); vertex ``v`` is a bit mask, root is 0."""
    if d < 1:
        raise InvalidInput("hypercube needs d >= 1")
    if d > MAX_HYPERCUBE_DIM:
        raise SizeLimit(f"hypercube dimension {d} exceeds the cap of {MAX_HYPERCUBE_DIM}")
    n = 1 << d
    edges = [(v, v ^ (1 << i), 1.0) for v in range(n) for i in range(d)]
    return WeightedGraph(n, tuple(edges), 0)


def named_graph(spec: FamilySpec, level: int) -> WeightedGraph:
    if spec.kind not in (Family.CYCLE, Family.PATH, Family.HYPERCUBE):
        raise InvalidInput(f"{spec.kind.value} is not a named graph family")
    return spec.build(level)


def complete_scheme_graph(n: int) -> WeightedGraph:
    edges = [(i, j, 1.0) for i, j in itertools.permutations(range(n), 2)]
    return WeightedGraph(n, tuple(edges), 0)


def random_tree(n: int, rng: np.random.Generator) -> WeightedGraph:
    """Uniform random recursive tree: vertex v attaches to a random earlier vertex."""
    edges: List[Edge] = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges += [(u, v, 1.0), (v, u, 1.0)]
    return WeightedGraph(n, tuple(edges), 0)

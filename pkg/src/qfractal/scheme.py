"""Association schemes from distance-regular graphs: axioms, intersection
numbers, primitive idempotents, Krein parameters, self-duality and
Terwilliger-algebra thinness."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (ClosureOverflow, InvalidInput, NotAScheme, NotCommutative,
                     NotConnected, NumericalFailure)
from .graphs import WeightedGraph
from .numerics import sym_eigen
from .qdecomp import stratify

INT_TOL = 1e-9
KREIN_RESIDUAL = 1e-8
DUALITY_TOL = 1e-8
MAX_THIN_N = 256
THIN_SEED = 0


def distance_matrices(g: WeightedGraph) -> List[np.ndarray]:
    """``A_i[x, y] = 1`` iff the support distance between x and y is ``i``."""
    nbrs = g.neighbors()
    n = g.n
    dist = np.full((n, n), -1, dtype=int)
    for src in range(n):
        dist[src, src] = 0
        frontier = [src]
        k = 0
        while frontier:
            k += 1
            nxt = []
            for v in frontier:
                for u in nbrs[v]:
                    if dist[src, u] < 0:
                        dist[src, u] = k
                        nxt.append(u)
            frontier = nxt
    if np.any(dist < 0):
        raise NotConnected("graph is disconnected")
    diameter = int(dist.max())
    return [(dist == i).astype(float) for i in range(diameter + 1)]


@dataclass
class AxiomReport:
    identity: bool
    partition: bool
    transpose_closed: bool
    product_closed: bool
    commutative: bool
    failures: List[str] = field(default_factory=list)

    @property
    def is_scheme(self) -> bool:
        return self.identity and self.partition and self.transpose_closed and self.product_closed

    def to_dict(self) -> Dict[str, object]:
        return {
            "axiom1_identity": self.identity,
            "axiom2_partition": self.partition,
            "axiom3_transpose": self.transpose_closed,
            "axiom4_products": self.product_closed,
            "axiom5_commutative": self.commutative,
            "failures": list(self.failures),
        }


def _as_classes(classes) -> List[np.ndarray]:
    mats = [np.asarray(a, dtype=float) for a in classes]
    if not mats:
        raise InvalidInput("empty class list")
    n = mats[0].shape[0]
    for a in mats:
        if a.shape != (n, n):
            raise InvalidInput("classes must be square matrices of equal size")
        if not np.all((a == 0) | (a == 1)):
            raise InvalidInput("classes must be 0/1 matrices")
    return mats


def _span_coefficients(prod: np.ndarray, mats: Sequence[np.ndarray]) -> Tuple[np.ndarray, float]:
    # the classes have disjoint supports, so the least-squares coefficient of
    # A_k is the mean of the product over the support of A_k
    coefs = np.array([prod[a == 1].mean() if a.any() else 0.0 for a in mats])
    resid = prod - sum(c * a for c, a in zip(coefs, mats))
    return coefs, float(np.max(np.abs(resid)))


def verify_scheme(classes) -> AxiomReport:
    mats = _as_classes(classes)
    n = mats[0].shape[0]
    failures = []
    identity = bool(np.array_equal(mats[0], np.eye(n)))
    if not identity:
        failures.append("A_0 is not the identity")
    partition = bool(np.array_equal(sum(mats), np.ones((n, n))))
    if not partition:
        failures.append("classes do not partition X x X")
    transpose_closed = True
    for i, a in enumerate(mats):
        if not any(np.array_equal(a.T, b) for b in mats):
            transpose_closed = False
            failures.append(f"A_{i}^T is not a class")
    product_closed = True
    for i, j in itertools.product(range(len(mats)), repeat=2):
        coefs, resid = _span_coefficients(mats[i] @ mats[j], mats)
        integral = np.max(np.abs(coefs - np.round(coefs))) < INT_TOL
        if resid >= INT_TOL or not integral:
            product_closed = False
            failures.append(f"A_{i} A_{j} is not in the span (residual {resid:.3g})")
    commutative = all(
        np.array_equal(mats[i] @ mats[j], mats[j] @ mats[i])
        for i, j in itertools.combinations(range(len(mats)), 2)
    )
    if not commutative:
        failures.append("classes do not commute")
    return AxiomReport(identity, partition, transpose_closed, product_closed, commutative, failures)


def intersection_numbers(classes) -> np.ndarray:
    """``p[k, i, j]`` with ``A_i A_j = sum_k p^k_ij A_k``."""
    mats = _as_classes(classes)
    d1 = len(mats)
    p = np.zeros((d1, d1, d1))
    for i, j in itertools.product(range(d1), repeat=2):
        prod = mats[i] @ mats[j]
        for k, a in enumerate(mats):
            vals = prod[a == 1]
            if vals.size == 0:
                continue
            if np.ptp(vals) > INT_TOL:
                raise NotAScheme(f"(A_{i} A_{j}) is not constant on class {k}")
            p[k, i, j] = np.round(vals[0]) if abs(vals[0] - np.round(vals[0])) < INT_TOL else vals[0]
    return p


def primitive_idempotents(classes, tol: float = 1e-8) -> Tuple[List[np.ndarray], List[int], List[float]]:
    """Projections onto the maximal common eigenspaces of the classes.

    Ordered by descending eigenvalue of ``A_1`` (ties broken by the later
    classes).  Returns ``(E, ranks, A_1 eigenvalues)``.
    """
    mats = _as_classes(classes)
    for i, j in itertools.combinations(range(len(mats)), 2):
        if not np.allclose(mats[i] @ mats[j], mats[j] @ mats[i], atol=1e-12):
            raise NotCommutative(f"A_{i} and A_{j} do not commute")
    n = mats[0].shape[0]
    gens = mats[1:] if len(mats) > 1 else [mats[0]]
    spaces = [(np.eye(n), ())]
    for a in gens:
        refined = []
        for basis, key in spaces:
            sub = basis.T @ a @ basis
            vals, vecs = sym_eigen((sub + sub.T) / 2)
            groups = _group(vals, tol * max(1.0, float(np.max(np.abs(vals)))))
            for idx in groups:
                refined.append((basis @ vecs[:, idx], key + (float(np.mean(vals[idx])),)))
        spaces = refined
    spaces.sort(key=lambda item: tuple(-x for x in item[1]))
    idems = [basis @ basis.T for basis, _ in spaces]
    ranks = [int(round(float(np.trace(e)))) for e in idems]
    theta = [key[0] for _, key in spaces]
    return idems, ranks, theta


def _group(vals: np.ndarray, tol: float) -> List[List[int]]:
    groups: List[List[int]] = []
    for i, v in enumerate(vals):
        if groups and abs(v - vals[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def krein_parameters(idempotents: Sequence[np.ndarray]) -> np.ndarray:
    """``q[k, i, j]`` with ``E_i ∘ E_j = (1/|X|) sum_k q^k_ij E_k``."""
    es = [np.asarray(e, dtype=float) for e in idempotents]
    n = es[0].shape[0]
    d1 = len(es)
    ranks = [float(np.trace(e)) for e in es]
    q = np.zeros((d1, d1, d1))
    worst = 0.0
    for i, j in itertools.product(range(d1), repeat=2):
        had = es[i] * es[j]
        for k in range(d1):
            q[k, i, j] = n * float(np.sum(had * es[k])) / ranks[k]
        resid = had - sum(q[k, i, j] * es[k] for k in range(d1)) / n
        worst = max(worst, float(np.max(np.abs(resid))))
    if worst > KREIN_RESIDUAL:
        raise NumericalFailure(f"Krein expansion residual {worst:.3g}")
    return q


@dataclass
class SchemeData:
    classes: List[np.ndarray]
    axioms: AxiomReport
    p_numbers: np.ndarray
    idempotents: List[np.ndarray]
    ranks: List[int]
    eigenvalues: List[float]
    q_numbers: np.ndarray

    @property
    def n(self) -> int:
        return self.classes[0].shape[0]

    @property
    def d(self) -> int:
        return len(self.classes) - 1

    def krein_nonnegative(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.q_numbers >= -tol))

    def hypergroup_coefficients(self) -> np.ndarray:
        """Structure constants of ``e_j = E_j / m_j`` under ``∘``, times |X|."""
        m = np.asarray(self.ranks, dtype=float)
        return self.q_numbers * m[:, None, None] / (m[None, :, None] * m[None, None, :])


def build_scheme(g: WeightedGraph) -> SchemeData:
    classes = distance_matrices(g)
    axioms = verify_scheme(classes)
    if not axioms.is_scheme:
        raise NotAScheme("; ".join(axioms.failures))
    p = intersection_numbers(classes)
    idems, ranks, theta = primitive_idempotents(classes)
    if len(idems) != len(classes):
        raise NotAScheme(f"{len(idems)} common eigenspaces for {len(classes)} classes")
    q = krein_parameters(idems)
    return SchemeData(classes, axioms, p, idems, ranks, theta, q)


def duality_check(scheme: SchemeData, tol: float = DUALITY_TOL) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Search for σ fixing 0 with ``q^{σk}_{σi,σj} = p^k_ij``.

    Backtracking in lexicographic order, so the witness returned is the
    lexicographically first one.
    """
    p, q = scheme.p_numbers, scheme.q_numbers
    d = scheme.d
    if d > 12:
        raise InvalidInput("duality search is limited to d <= 12")

    def consistent(sigma: List[int]) -> bool:
        top = len(sigma) - 1
        for i, j, k in itertools.product(range(top + 1), repeat=3):
            if top not in (i, j, k):
                continue
            if abs(q[sigma[k], sigma[i], sigma[j]] - p[k, i, j]) > tol:
                return False
        return True

    def extend(sigma: List[int]) -> Optional[List[int]]:
        if len(sigma) == d + 1:
            return sigma
        for cand in range(1, d + 1):
            if cand in sigma:
                continue
            sigma.append(cand)
            if consistent(sigma):
                found = extend(sigma)
                if found is not None:
                    return found
            sigma.pop()
        return None

    if not consistent([0]):
        return False, None
    witness = extend([0])
    return (witness is not None), (tuple(witness) if witness else None)


@dataclass
class TAlgebraReport:
    dim_t: int
    modules: List[Tuple[int, ...]]
    module_dims: List[Tuple[int, Tuple[int, ...]]]
    primary_profile: Tuple[int, ...]
    thin: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "dim_T": self.dim_t,
            "module_dims": [[mult, list(prof)] for mult, prof in self.module_dims],
            "primary_profile": list(self.primary_profile),
            "thin": self.thin,
        }


def _orth_extend(basis: np.ndarray, vec: np.ndarray, tol: float) -> Optional[np.ndarray]:
    v = vec - basis @ (basis.T @ vec) if basis.size else vec.copy()
    if basis.size:
        v -= basis @ (basis.T @ v)
    norm = float(np.linalg.norm(v))
    if norm <= tol:
        return None
    return v / norm


def _algebra_basis(gens: Sequence[np.ndarray], cap: int, tol: float = 1e-9) -> List[np.ndarray]:
    n = gens[0].shape[0]
    flat = np.zeros((n * n, 0))
    elems: List[np.ndarray] = []

    def add(mat: np.ndarray) -> bool:
        nonlocal flat
        v = _orth_extend(flat, mat.ravel(), tol * max(1.0, float(np.linalg.norm(mat))))
        if v is None:
            return False
        if flat.shape[1] >= cap:
            raise ClosureOverflow(f"T-algebra closure exceeds the cap of {cap}")
        flat = np.column_stack([flat, v])
        elems.append(mat)
        return True

    add(np.eye(n))
    for gmat in gens:
        add(gmat)
    frontier = list(elems)
    while frontier:
        new = []
        for x in frontier:
            for gmat in gens:
                prod = gmat @ x
                if add(prod):
                    new.append(prod)
        frontier = new
    return elems


def t_algebra_thin_check(g: WeightedGraph, root: Optional[int] = None,
                         cap: Optional[int] = None, seed: int = THIN_SEED) -> TAlgebraReport:
    """Decompose the standard module of T(root) into irreducible modules.

    T is generated by the adjacency and the stratum indicators E*_i.  It is
    closed under transposition, so the complement of a submodule is again a
    submodule.  Repeatedly: take an eigenvector of a fixed random symmetric
    element of T restricted to the unexplored complement and close it under
    T; for a generic element that cyclic module is irreducible.
    """
    if root is not None:
        g = g.with_root(root)
    if g.n > MAX_THIN_N:
        raise InvalidInput(f"thinness check is limited to n <= {MAX_THIN_N}")
    n = g.n
    adj = (g.matrix() != 0).astype(float)
    np.fill_diagonal(adj, 0.0)
    adj = np.maximum(adj, adj.T)
    strata = stratify(g)
    if strata.unreachable:
        raise NotConnected("graph is disconnected")
    duals = []
    for layer in strata.layers:
        e = np.zeros((n, n))
        e[list(layer), list(layer)] = 1.0
        duals.append(e)
    basis = _algebra_basis([adj] + duals, cap or n * n)

    rng = np.random.default_rng(seed)
    coefs = rng.normal(size=len(basis))
    x = sum(c * b for c, b in zip(coefs, basis))
    x = (x + x.T) / 2

    complement = np.eye(n)
    modules: List[np.ndarray] = []
    while complement.shape[1] > 0:
        sub = complement.T @ x @ complement
        _, vecs = sym_eigen((sub + sub.T) / 2)
        v = complement @ vecs[:, 0]
        span = np.column_stack([b @ v for b in basis])
        u, svals, _ = np.linalg.svd(span, full_matrices=False)
        rank = int(np.sum(svals > 1e-9 * svals[0]))
        w = u[:, :rank]
        modules.append(w)
        proj = complement - w @ (w.T @ complement)
        u2, s2, _ = np.linalg.svd(proj, full_matrices=False)
        complement = u2[:, : int(np.sum(s2 > 1e-6))]

    profiles = []
    for w in modules:
        prof = tuple(int(np.linalg.matrix_rank(e @ w, tol=1e-8)) for e in duals)
        profiles.append(prof)
    root_vec = np.zeros(n)
    root_vec[g.root] = 1.0
    primary = max(range(len(modules)), key=lambda k: float(np.linalg.norm(modules[k].T @ root_vec)))
    grouped: Dict[Tuple[int, ...], int] = {}
    for prof in profiles:
        grouped[prof] = grouped.get(prof, 0) + 1
    module_dims = sorted(((mult, prof) for prof, mult in grouped.items()), key=lambda t: (-sum(t[1]), t[1]))
    thin = all(max(prof) <= 1 for prof in profiles)
    return TAlgebraReport(len(basis), profiles, module_dims, profiles[primary], thin)


def scheme_report(g: WeightedGraph, thin: bool = True) -> Dict[str, object]:
    """JSON-ready summary; a non-scheme graph still reports its axioms."""
    classes = distance_matrices(g)
    axioms = verify_scheme(classes)
    out: Dict[str, object] = {"n": g.n, "diameter": len(classes) - 1, "axioms": axioms.to_dict()}
    if axioms.is_scheme and axioms.commutative:
        data = build_scheme(g)
        self_dual, witness = duality_check(data)
        out.update({
            "p_numbers": data.p_numbers.tolist(),
            "q_numbers": data.q_numbers.tolist(),
            "ranks": data.ranks,
            "eigenvalues": data.eigenvalues,
            "krein_nonnegative": data.krein_nonnegative(),
            "hypergroup": data.hypergroup_coefficients().tolist(),
            "self_dual": self_dual,
            "duality_witness": list(witness) if witness else None,
        })
    if thin and g.n <= MAX_THIN_N:
        out["thinness"] = t_algebra_thin_check(g).to_dict()
    return out

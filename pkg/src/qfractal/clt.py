"""Growing-family runs: scaled mixed moments per level, their distance to an
interacting-Fock-space limit, and root spectral measures."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidInput, NumericalFailure
from .graphs import Family, FamilySpec, WeightedGraph
from .ifs import IFSSpec, ifs_moment, ladder_moment, parse_word
from .numerics import householder_tridiagonalize, sym_tridiag_eigen, SymTridiag
from .qdecomp import (kappa_power, mixed_moment, quantum_components,
                      symmetrize, vacuum_moments)

MAX_FRACTAL_LEVEL = 8
MAX_WORD = 12
SPECTRAL_MOMENTS = 8
# implicit QL in pure Python is O(n^2); beyond this size spectra use LAPACK
QL_SIZE_LIMIT = 512

Key = Union[int, str]


def family(spec: FamilySpec, levels: Iterable[int]) -> Iterator[WeightedGraph]:
    levels = sorted(set(int(x) for x in levels))
    if not levels:
        raise InvalidInput("level range is empty")
    if spec.kind is Family.FRACTAL and levels[-1] > MAX_FRACTAL_LEVEL:
        raise InvalidInput(f"fractal levels are capped at {MAX_FRACTAL_LEVEL}")
    for level in levels:
        yield spec.build(level)


def kappa_of(g: WeightedGraph, rule: str = "degree") -> float:
    """``"degree"``: unweighted root degree of the support; ``"fixed:c"`` or a number: c."""
    if isinstance(rule, (int, float)):
        c = float(rule)
    elif rule == "degree":
        return float(len(g.neighbors()[g.root]))
    elif isinstance(rule, str) and rule.startswith("fixed:"):
        try:
            c = float(rule.split(":", 1)[1])
        except ValueError as exc:
            raise InvalidInput(f"bad kappa rule {rule!r}") from exc
    else:
        raise InvalidInput(f"unknown kappa rule {rule!r}")
    if not c > 0:
        raise InvalidInput("fixed kappa must be positive")
    return c


def parse_key(key) -> Key:
    if isinstance(key, (int, np.integer)):
        return int(key)
    text = str(key).strip()
    if text.isdigit():
        return int(text)
    return parse_word(text)


@dataclass
class Row:
    key: Key
    values: List[float]
    limit: Optional[float]
    errors: Optional[List[float]]
    increments: List[float]

    @property
    def increments_nonincreasing(self) -> bool:
        inc = self.increments
        return all(b <= a for a, b in zip(inc, inc[1:]))

    @property
    def monotone_from(self) -> Optional[int]:
        """First index from which the increments never grow, None if they are empty."""
        inc = self.increments
        if not inc:
            return None
        start = len(inc) - 1
        while start > 0 and inc[start] <= inc[start - 1]:
            start -= 1
        return start


@dataclass
class ConvergenceReport:
    levels: List[int]
    n_vertices: List[int]
    kappa: List[float]
    rows: List[Row]

    def csv_rows(self) -> List[Dict[str, object]]:
        out = []
        for row in self.rows:
            for idx, level in enumerate(self.levels):
                out.append({
                    "level": level,
                    "n_vertices": self.n_vertices[idx],
                    "kappa": self.kappa[idx],
                    "key": row.key,
                    "graph_value": row.values[idx],
                    "limit_value": "" if row.limit is None else row.limit,
                    "abs_error": "" if row.errors is None else row.errors[idx],
                    "increment": "" if idx == 0 else row.increments[idx - 1],
                })
        return out


def _level_values(g: WeightedGraph, keys: Sequence[Key], kappa: float) -> List[float]:
    orders = [k for k in keys if isinstance(k, int)]
    words = [k for k in keys if isinstance(k, str)]
    values: Dict[Key, float] = {}
    if orders:
        moms = vacuum_moments(g, max(orders) + 1)
        values.update({k: float(moms[k]) / kappa_power(kappa, k) for k in orders})
    if words:
        comps = quantum_components(g)
        for w in words:
            values[w] = mixed_moment(g, w, kappa, comps)
    return [values[k] for k in keys]


def convergence_table(spec: FamilySpec, levels: Iterable[int], keys: Sequence,
                      kappa_rule: str = "degree", limit_ifs: Optional[IFSSpec] = None,
                      workers: int = 1) -> ConvergenceReport:
    """Scaled moments per level, optionally against an IFS limit.

    ``keys`` mixes integer orders (vacuum moments) and ladder words
    (mixed moments).
    """
    keys = [parse_key(k) for k in keys]
    for k in keys:
        size = k if isinstance(k, int) else len(k)
        if size > MAX_WORD:
            raise InvalidInput(f"words and orders are limited to length {MAX_WORD}")
    graphs = list(family(spec, levels))
    kappas = [kappa_of(g, kappa_rule) for g in graphs]
    jobs = list(zip(graphs, kappas))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_level = list(pool.map(lambda job: _level_values(job[0], keys, job[1]), jobs))
    else:
        per_level = [_level_values(g, keys, kap) for g, kap in jobs]

    rows = []
    for idx, key in enumerate(keys):
        values = [lv[idx] for lv in per_level]
        limit = errors = None
        if limit_ifs is not None:
            limit = ifs_moment(limit_ifs, key) if isinstance(key, int) else ladder_moment(limit_ifs, key)
            errors = [abs(v - limit) for v in values]
        increments = [abs(b - a) for a, b in zip(values, values[1:])]
        rows.append(Row(key, values, limit, errors, increments))
    return ConvergenceReport(sorted(set(int(x) for x in levels)), [g.n for g in graphs], kappas, rows)


@dataclass
class SpectralHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    moments: np.ndarray
    eigenvalues: np.ndarray
    weights: np.ndarray

    def atoms(self, threshold: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues carrying root mass, with coincident ones merged."""
        keep = self.weights > threshold
        vals = self.eigenvalues[keep]
        wts = self.weights[keep]
        out_v: List[float] = []
        out_w: List[float] = []
        scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
        for v, w in zip(vals, wts):
            if out_v and abs(v - out_v[-1]) <= 1e-9 * scale:
                out_w[-1] += w
            else:
                out_v.append(float(v))
                out_w.append(float(w))
        return np.asarray(out_v), np.asarray(out_w)

    def to_dict(self) -> Dict[str, object]:
        atoms, masses = self.atoms()
        return {
            "bin_edges": self.bin_edges.tolist(),
            "masses": self.masses.tolist(),
            "moments": self.moments.tolist(),
            "atoms": atoms.tolist(),
            "atom_masses": masses.tolist(),
        }


def _root_spectrum(g: WeightedGraph) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of A and squared first components w.r.t. ``δ_root``."""
    if g.is_symmetric():
        if g.jacobi() is not None and g.root == 0:
            tri = g.jacobi()
            diag, off = tri.diag, tri.upper
        else:
            order = [g.root] + [v for v in range(g.n) if v != g.root]
            a = g.matrix()[np.ix_(order, order)]
            diag, off = householder_tridiagonalize(a)
    else:
        tri = g.jacobi()
        if tri is None or g.root != 0:
            raise InvalidInput("non-symmetric graph must be a tridiagonal rooted at 0")
        gj = symmetrize(tri)
        diag, off = gj.alpha, np.sqrt(gj.omega)
    if diag.size > QL_SIZE_LIMIT:
        from scipy.linalg import eigh_tridiagonal

        vals, vecs = eigh_tridiagonal(diag, off)
        return vals, vecs[0] ** 2
    vals, first = sym_tridiag_eigen(SymTridiag(diag, off))
    return vals, first ** 2


def spectral_histogram(g: WeightedGraph, kappa: float, bins: int = 20,
                       check_tol: float = 1e-9) -> SpectralHistogram:
    if bins < 1:
        raise InvalidInput("bins must be >= 1")
    if not kappa > 0:
        raise InvalidInput("kappa must be positive")
    vals, weights = _root_spectrum(g)
    atoms = vals / math.sqrt(kappa)
    lo, hi = float(atoms.min()), float(atoms.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    idx = np.clip(np.searchsorted(edges, atoms, side="right") - 1, 0, bins - 1)
    masses = np.bincount(idx, weights=weights, minlength=bins)
    masses = masses / masses.sum()
    moments = np.array([float(np.sum(weights * atoms ** k)) for k in range(SPECTRAL_MOMENTS + 1)])

    walks = vacuum_moments(g, SPECTRAL_MOMENTS + 1, math.sqrt(kappa))
    err = np.abs(moments - walks) / np.maximum(1.0, np.abs(walks))
    if float(err.max()) > check_tol:
        raise NumericalFailure(f"spectral moments disagree with closed walks by {err.max():.3g}")
    return SpectralHistogram(edges, masses, moments, atoms, weights)

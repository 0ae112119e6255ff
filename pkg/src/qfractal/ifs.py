"""One-mode interacting Fock spaces given by Jacobi sequences.

Indices follow the usual 1-based convention: ``omega(n)`` is ω_n and
``alpha(n)`` is α_n for ``n >= 1``.
"""

from __future__ import annotations

import enum
import json
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from .errors import InvalidInput

LETTERS = "+-o"


class Kind(str, enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"
    FREE = "free"
    QDEFORMED = "qdeformed"
    CUSTOM = "custom"


def parse_word(word) -> str:
    """Normalize a ladder word to a string over ``+ - o``.

    Words read like operator products: the rightmost letter acts first.
    """
    if isinstance(word, str):
        text = word.replace(",", "").replace(" ", "").replace("0", "o")
    else:
        text = "".join("o" if str(x) in ("o", "0") else str(x) for x in word)
    if not text or any(ch not in LETTERS for ch in text):
        raise InvalidInput(f"invalid ladder word {word!r}")
    return text


class IFSSpec:
    """Jacobi sequences ``{ω_n}``, ``{α_n}`` of a one-mode interacting Fock space."""

    def __init__(self, omega: Callable[[int], float], alpha: Callable[[int], float],
                 kind: Kind = Kind.CUSTOM, q: Optional[float] = None,
                 data: Optional[Dict[str, Any]] = None):
        self.kind = Kind(kind)
        self.q = q
        self._data = data
        self.omega = lru_cache(maxsize=None)(omega)
        self.alpha = lru_cache(maxsize=None)(alpha)

    def __repr__(self) -> str:
        extra = f", q={self.q}" if self.q is not None else ""
        return f"IFSSpec({self.kind.value}{extra})"

    def omegas(self, count: int) -> np.ndarray:
        return np.array([self.omega(n) for n in range(1, count + 1)], dtype=float)

    def alphas(self, count: int) -> np.ndarray:
        return np.array([self.alpha(n) for n in range(1, count + 1)], dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is Kind.CUSTOM:
            return dict(self._data or {}, kind="custom")
        out: Dict[str, Any] = {"kind": self.kind.value}
        if self.q is not None:
            out["q"] = self.q
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IFSSpec":
        kind = Kind(str(data.get("kind", "")).lower())
        if kind is Kind.CUSTOM:
            return custom_ifs(data.get("omega", []), data.get("alpha"))
        if kind is Kind.QDEFORMED:
            return ifs_catalog(kind, q=data.get("q"))
        return ifs_catalog(kind)

    @classmethod
    def from_json(cls, text: str) -> "IFSSpec":
        try:
            return cls.from_dict(json.loads(text))
        except (ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed IFS JSON: {exc}") from exc


def _zero(n: int) -> float:
    return 0.0


def ifs_catalog(kind, q: Optional[float] = None) -> IFSSpec:
    kind = Kind(kind)
    if kind is Kind.BOSON:
        return IFSSpec(float, _zero, kind)
    if kind is Kind.FERMION:
        return IFSSpec(lambda n: 1.0 if n == 1 else 0.0, _zero, kind)
    if kind is Kind.FREE:
        return IFSSpec(lambda n: 1.0, _zero, kind)
    if kind is Kind.QDEFORMED:
        if q is None:
            raise InvalidInput("q-deformed IFS needs q")
        q = float(q)
        if q < -1:
            raise InvalidInput(f"q must be >= -1, got {q}")
        if q == -1:
            return IFSSpec(lambda n: 1.0 if n <= 1 else 0.0, _zero, kind, q)
        return IFSSpec(lambda n: float(sum(q ** k for k in range(n))), _zero, kind, q)
    raise InvalidInput("custom IFS must be built with custom_ifs")


def custom_ifs(omega: Sequence[float], alpha: Optional[Sequence[float]] = None) -> IFSSpec:
    """IFS from finite prefixes.

    A trailing zero in ``omega`` extends it by zeros; otherwise reading past
    the prefix raises.  ``alpha`` defaults to zeros.
    """
    om = [float(x) for x in omega]
    al = None if alpha is None else [float(x) for x in alpha]
    if any(x < 0 or not np.isfinite(x) for x in om):
        raise InvalidInput("omega entries must be finite and nonnegative")
    if al is not None and not all(np.isfinite(al)):
        raise InvalidInput("alpha entries must be finite")
    for m, w in enumerate(om):
        if w == 0.0 and any(x != 0.0 for x in om[m:]):
            raise InvalidInput(f"omega_{m + 1} = 0 but a later omega is nonzero")
    terminated = bool(om) and om[-1] == 0.0

    def omega_fn(n: int) -> float:
        if n <= len(om):
            return om[n - 1]
        if terminated:
            return 0.0
        raise InvalidInput(f"omega_{n} requested beyond the given prefix of {len(om)}")

    def alpha_fn(n: int) -> float:
        if al is None:
            return 0.0
        if n <= len(al):
            return al[n - 1]
        raise InvalidInput(f"alpha_{n} requested beyond the given prefix of {len(al)}")

    data = {"omega": om}
    if al is not None:
        data["alpha"] = al
    return IFSSpec(omega_fn, alpha_fn, Kind.CUSTOM, data=data)


def ladder_moment(ifs: IFSSpec, word) -> float:
    """``<Ψ0, B^{ε_m} ... B^{ε_1} Ψ0>`` by tracking the particle number.

    On a closed excursion every raise n -> n+1 is undone by a lowering
    n+1 -> n, so the two √ω_{n+1} factors are booked together as ω_{n+1}
    on the way down; integer sequences then give exact integer moments.
    """
    letters = parse_word(word)
    level = 0
    coef = 1.0
    for ch in reversed(letters):
        if ch == "+":
            level += 1
        elif ch == "-":
            if level == 0:
                return 0.0
            coef *= ifs.omega(level)
            level -= 1
        else:
            coef *= ifs.alpha(level + 1)
        if coef == 0.0:
            return 0.0
    return coef if level == 0 else 0.0


def _word_sum(ifs: IFSSpec, m: int) -> float:
    # Depth-first over all 3**m words; branches that can no longer return to
    # level 0, or that lower the vacuum, contribute exactly zero and are cut.
    def walk(remaining: int, level: int) -> float:
        if remaining == 0:
            return 1.0 if level == 0 else 0.0
        total = 0.0
        if level + 1 <= remaining - 1:
            total += walk(remaining - 1, level + 1)
        if level > 0:
            w = ifs.omega(level)
            if w != 0.0:
                total += w * walk(remaining - 1, level - 1)
        a = ifs.alpha(level + 1)
        if a != 0.0 and level <= remaining - 1:
            total += a * walk(remaining - 1, level)
        return total

    return walk(m, 0)


def _tridiagonal_power(ifs: IFSSpec, m: int) -> float:
    # Monic gauge (upper 1, lower ω): similar to the symmetric √ω matrix by a
    # diagonal that fixes e_0, so <e_0, T^m e_0> is unchanged.
    size = m + 1
    alpha = ifs.alphas(size)
    omega = ifs.omegas(size - 1)
    vec = np.zeros(size)
    vec[0] = 1.0
    for _ in range(m):
        nxt = alpha * vec
        nxt[:-1] += vec[1:]
        nxt[1:] += omega * vec[:-1]
        vec = nxt
    return float(vec[0])


def ifs_moment(ifs: IFSSpec, m: int, method: str = "words") -> float:
    """``m``-th vacuum moment of the field ``B+ + B- + B°``.

    ``method`` is ``"words"`` (sum of ladder moments over all words) or
    ``"matrix"`` (power of the truncated Jacobi matrix).
    """
    if m < 0:
        raise InvalidInput("moment order must be nonnegative")
    if method == "words":
        return _word_sum(ifs, m)
    if method == "matrix":
        return _tridiagonal_power(ifs, m)
    raise InvalidInput(f"unknown method {method!r}")


def orthopoly_eval(ifs: IFSSpec, n: int, x: float) -> float:
    """Monic orthogonal polynomial ``P_n(x)`` of the IFS."""
    if n < 0:
        raise InvalidInput("degree must be nonnegative")
    prev, cur = 0.0, 1.0
    for k in range(n):
        coupling = ifs.omega(k) if k >= 1 else 0.0
        prev, cur = cur, (x - ifs.alpha(k + 1)) * cur - coupling * prev
    return cur

"""Polynomial symbols in the variables (z*, z) over ``d`` modes.

A symbol is a finite sum of monomials ``c * z*^beta z^alpha`` where ``beta`` and
``alpha`` are multi-indices (tuples of non-negative ints of length ``d``).
Mode indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from .errors import DimensionError

MultiIndex = tuple[int, ...]
Key = tuple[MultiIndex, MultiIndex]  # (beta for z*, alpha for z)


def check_multi_index(alpha, d: int) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d:
        raise DimensionError(f"multi-index {alpha} has length {len(alpha)}, expected {d}")
    if any(a < 0 for a in alpha):
        raise DimensionError(f"multi-index {alpha} has negative entries")
    return alpha


def grlex_key(alpha: MultiIndex) -> tuple:
    """Sort key: total degree first, then lexicographic with mode 0 most significant."""
    return (sum(alpha),) + tuple(-a for a in alpha)


def multi_indices(d: int, max_degree: int) -> list[MultiIndex]:
    """All multi-indices of length ``d`` with total degree <= ``max_degree``, in grlex order."""
    out = []
    for deg in range(max_degree + 1):
        out.extend(_compositions(deg, d))
    return out


def _compositions(n: int, d: int) -> Iterator[MultiIndex]:
    # mode 0 descending, so the largest first entry comes first
    if d == 0:
        if n == 0:
            yield ()
        return
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def multi_factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def unit(i: int, d: int) -> MultiIndex:
    return tuple(1 if k == i else 0 for k in range(d))


def _add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _term_key(key: Key) -> tuple:
    beta, alpha = key
    return (sum(beta) + sum(alpha),) + grlex_key(beta) + grlex_key(alpha)


@dataclass(frozen=True, eq=False)
class PolySymbol:
    """Complex polynomial in (z*, z); immutable, canonical (no zero coefficients)."""

    d: int
    terms: Mapping[Key, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise DimensionError("mode count must be positive")
        clean = {}
        for (beta, alpha), c in self.terms.items():
            key = (check_multi_index(beta, self.d), check_multi_index(alpha, self.d))
            c = complex(c)
            if c != 0:
                clean[key] = clean.get(key, 0) + c
                if clean[key] == 0:
                    del clean[key]
        ordered = dict(sorted(clean.items(), key=lambda kv: _term_key(kv[0])))
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    # constructors

    @classmethod
    def constant(cls, c, d: int) -> PolySymbol:
        zero = (0,) * d
        return cls(d, {(zero, zero): c})

    @classmethod
    def monomial(cls, beta, alpha, c=1.0) -> PolySymbol:
        return cls(len(beta), {(tuple(beta), tuple(alpha)): c})

    @classmethod
    def z(cls, i: int, d: int) -> PolySymbol:
        return cls.monomial((0,) * d, unit(i, d))

    @classmethod
    def zs(cls, i: int, d: int) -> PolySymbol:
        return cls.monomial(unit(i, d), (0,) * d)

    # structure

    @property
    def degree(self) -> int:
        """Total degree in z and z* together; -1 for the zero polynomial."""
        return max((sum(b) + sum(a) for b, a in self.terms), default=-1)

    @property
    def degree_pair(self) -> tuple[int, int]:
        """Maximal degrees (in z*, in z) over all terms."""
        if not self.terms:
            return (0, 0)
        return (max(sum(b) for b, _ in self.terms), max(sum(a) for _, a in self.terms))

    def constant_term(self) -> complex:
        zero = (0,) * self.d
        return self.terms.get((zero, zero), 0j)

    def is_zero(self) -> bool:
        return not self.terms

    def conjugate(self) -> PolySymbol:
        return PolySymbol(self.d, {(a, b): np.conj(c) for (b, a), c in self.terms.items()})

    def is_real(self, tol: float = 0.0) -> bool:
        """True when the symbol is conjugation invariant (real on the diagonal z* = conj z)."""
        return self.allclose(self.conjugate(), atol=tol)

    def allclose(self, other: PolySymbol, atol: float = 1e-12) -> bool:
        _check_same_d(self, other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    def max_abs_diff(self, other: PolySymbol) -> float:
        _check_same_d(self, other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys), default=0.0)

    def chop(self, tol: float = 1e-14) -> PolySymbol:
        return PolySymbol(self.d, {k: c for k, c in self.terms.items() if abs(c) > tol})

    # arithmetic

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return self.d == other.d and dict(self.terms) == dict(other.terms)

    __hash__ = None

    def __add__(self, other):
        other = self._coerce(other)
        _check_same_d(self, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolySymbol(self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol(self.d, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PolySymbol(self.d, {k: c * other for k, c in self.terms.items()})
        _check_same_d(self, other)
        out: dict[Key, complex] = {}
        for (b1, a1), c1 in self.terms.items():
            for (b2, a2), c2 in other.terms.items():
                k = (_add(b1, b2), _add(a1, a2))
                out[k] = out.get(k, 0) + c1 * c2
        return PolySymbol(self.d, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = PolySymbol.constant(1, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _coerce(self, other) -> PolySymbol:
        if isinstance(other, PolySymbol):
            return other
        return PolySymbol.constant(other, self.d)

    # calculus

    def derivative(self, mode: int, wrt: str = "z") -> PolySymbol:
        return directional_derivative(self, mode, wrt)

    def laplacian(self) -> PolySymbol:
        """Sum over modes of d/dz*_i d/dz_i."""
        out = PolySymbol(self.d)
        for i in range(self.d):
            out = out + self.derivative(i, "z").derivative(i, "zs")
        return out

    def heat(self, s: float) -> PolySymbol:
        return heat_transform(self, s)

    def __call__(self, z, zstar=None) -> complex:
        return evaluate(self, z, zstar)

    def __repr__(self):
        from .cli import format_symbol

        return f"PolySymbol(d={self.d}, '{format_symbol(self)}')"


def _check_same_d(p: PolySymbol, q: PolySymbol):
    if p.d != q.d:
        raise DimensionError(f"mode-count mismatch: {p.d} vs {q.d}")


def poly_arith(p: PolySymbol, q: PolySymbol, op: str) -> PolySymbol:
    if p.d != q.d:
        raise DimensionError(f"mode-count mismatch: {p.d} vs {q.d}")
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def directional_derivative(p: PolySymbol, mode: int, wrt: str = "z") -> PolySymbol:
    """Formal partial derivative in ``z_mode`` (``wrt='z'``) or ``z*_mode`` (``wrt='zs'``)."""
    if not 0 <= mode < p.d:
        raise DimensionError(f"mode {mode} out of range for d={p.d}")
    if wrt not in ("z", "zs"):
        raise ValueError("wrt must be 'z' or 'zs'")
    out = {}
    for (beta, alpha), c in p.terms.items():
        exps = alpha if wrt == "z" else beta
        n = exps[mode]
        if n == 0:
            continue
        lowered = exps[:mode] + (n - 1,) + exps[mode + 1:]
        key = (beta, lowered) if wrt == "z" else (lowered, alpha)
        out[key] = c * n
    return PolySymbol(p.d, out)


def heat_transform(p: PolySymbol, s: float) -> PolySymbol:
    """Apply exp(s * sum_i d/dz*_i d/dz_i) to ``p``.

    Evaluated mode by mode in closed form: on ``z*^b z^a`` one mode contributes
    ``sum_m s^m/m! * b!/(b-m)! * a!/(a-m)! * z*^(b-m) z^(a-m)``.
    """
    out: dict[Key, complex] = {}
    for (beta, alpha), c in p.terms.items():
        per_mode = []
        for b, a in zip(beta, alpha):
            per_mode.append(
                [(m, s**m * math.perm(b, m) * math.perm(a, m) / math.factorial(m)) for m in range(min(a, b) + 1)]
            )
        for choice in itertools.product(*per_mode):
            weight = c
            mus = []
            for m, w in choice:
                weight = weight * w
                mus.append(m)
            key = (tuple(b - m for b, m in zip(beta, mus)), tuple(a - m for a, m in zip(alpha, mus)))
            out[key] = out.get(key, 0) + weight
    return PolySymbol(p.d, out)


def gaussian_moment(alpha, beta) -> complex:
    """Integral of z^alpha conj(z)^beta against prod_i pi^-1 exp(-|z_i|^2)."""
    if len(alpha) != len(beta):
        raise DimensionError(f"length mismatch: {len(alpha)} vs {len(beta)}")
    if tuple(alpha) != tuple(beta):
        return 0.0
    return float(multi_factorial(tuple(alpha)))


def evaluate(p: PolySymbol, z, zstar=None) -> complex:
    """Evaluate at independent points ``z`` and ``zstar``; ``zstar`` defaults to conj(z)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zstar = np.conj(z) if zstar is None else np.atleast_1d(np.asarray(zstar, dtype=complex))
    if z.shape != (p.d,) or zstar.shape != (p.d,):
        raise DimensionError(f"evaluation points must have length {p.d}")
    total = 0j
    for (beta, alpha), c in p.terms.items():
        total += c * np.prod(zstar ** np.array(beta)) * np.prod(z ** np.array(alpha))
    return complex(total)


def evaluate_many(p: PolySymbol, z: np.ndarray, zstar: np.ndarray | None = None) -> np.ndarray:
    """Vectorized evaluation over points stacked along the first axis, shape ``(n, d)``."""
    z = np.asarray(z, dtype=complex)
    zstar = np.conj(z) if zstar is None else np.asarray(zstar, dtype=complex)
    if z.ndim != 2 or z.shape[1] != p.d or zstar.shape != z.shape:
        raise DimensionError(f"points must have shape (n, {p.d})")
    out = np.zeros(z.shape[0], dtype=complex)
    for (beta, alpha), c in p.terms.items():
        out += c * np.prod(zstar ** np.array(beta), axis=1) * np.prod(z ** np.array(alpha), axis=1)
    return out


def gaussian_average_modes(p: PolySymbol, modes) -> PolySymbol:
    """Integrate the listed modes out against the normalized Gaussian measure.

    The result still has ``p.d`` modes but no dependence on ``modes``.
    """
    modes = set(modes)
    out: dict[Key, complex] = {}
    for (beta, alpha), c in p.terms.items():
        if any(beta[i] != alpha[i] for i in modes):
            continue
        w = c * math.prod(math.factorial(alpha[i]) for i in modes)
        key = (
            tuple(0 if i in modes else b for i, b in enumerate(beta)),
            tuple(0 if i in modes else a for i, a in enumerate(alpha)),
        )
        out[key] = out.get(key, 0) + w
    return PolySymbol(p.d, out)


def restrict_modes(p: PolySymbol, n: int) -> PolySymbol:
    """Re-express a symbol that only involves the first ``n`` modes on ``n`` modes."""
    if not 1 <= n <= p.d:
        raise DimensionError(f"cannot restrict {p.d} modes to {n}")
    out = {}
    for (beta, alpha), c in p.terms.items():
        if any(beta[n:]) or any(alpha[n:]):
            raise DimensionError(f"term {(beta, alpha)} involves modes beyond {n}")
        out[(beta[:n], alpha[:n])] = c
    return PolySymbol(n, out)

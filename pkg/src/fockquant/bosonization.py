"""Fermion -> hard-core boson correspondence on ``d`` one-particle modes.

An antisymmetric n-particle amplitude is determined by its values on strictly
increasing index tuples; the bosonization map keeps those values and places
them on the symmetric (hard-core) Fock state with the same occupied modes.
The exterior (Grassmann) algebra provides the independent fermionic side:
left/right derivatives and left multiplications realize the CAR exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import DimensionError, DomainError
from .fock import FockVector, fock_basis, ladder_matrix
from .quantization import OperatorMatrix

Subset = tuple[int, ...]


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (0 if an entry repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=32)
def fermion_basis(d: int, max_grade: int | None = None) -> tuple[Subset, ...]:
    """Subsets of range(d) ordered by size, then lexicographically."""
    top = d if max_grade is None else min(d, max_grade)
    return tuple(s for n in range(top + 1) for s in itertools.combinations(range(d), n))


def _check_subset(s, d: int) -> Subset:
    s = tuple(int(i) for i in s)
    if any(b <= a for a, b in zip(s, s[1:])):
        raise DomainError(f"{s} is not strictly increasing")
    if s and not (0 <= s[0] and s[-1] < d):
        raise DimensionError(f"{s} out of range for d={d}")
    return s


@dataclass(frozen=True, eq=False)
class FermionVector:
    """Mixed-grade fermionic state; keys are strictly increasing mode tuples."""

    d: int
    coeffs: Mapping[Subset, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, c in self.coeffs.items():
            s = _check_subset(s, self.d)
            if c != 0:
                clean[s] = complex(c)
        ordered = dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])))
        object.__setattr__(self, "coeffs", MappingProxyType(ordered))

    @classmethod
    def from_table(cls, d: int, table: Mapping[tuple, complex]) -> FermionVector:
        """Build from values on arbitrary ordered tuples of an antisymmetric function.

        Each tuple is mapped to its sorted representative with the sign of the
        sorting permutation; inconsistent duplicate entries raise.
        """
        out: dict[Subset, complex] = {}
        for key, v in table.items():
            sign = permutation_sign(key)
            if sign == 0:
                if v != 0:
                    raise DomainError(f"antisymmetric function must vanish on {key}")
                continue
            s = tuple(sorted(key))
            val = sign * complex(v)
            if s in out and not np.isclose(out[s], val):
                raise DomainError(f"table is not antisymmetric at {key}")
            out[s] = val
        return cls(d, out)

    def value(self, xs) -> complex:
        """Antisymmetric extension: f(x_1..x_n) = sign(sort) * f(sorted)."""
        sign = permutation_sign(xs)
        if sign == 0:
            return 0j
        return sign * self.coeffs.get(tuple(sorted(xs)), 0j)

    def to_array(self, max_grade: int | None = None) -> np.ndarray:
        basis = fermion_basis(self.d, max_grade)
        index = {s: k for k, s in enumerate(basis)}
        out = np.zeros(len(basis), dtype=complex)
        for s, c in self.coeffs.items():
            if s not in index:
                raise DimensionError(f"grade of {s} exceeds {max_grade}")
            out[index[s]] = c
        return out

    @classmethod
    def from_array(cls, d: int, arr, max_grade: int | None = None) -> FermionVector:
        return cls(d, dict(zip(fermion_basis(d, max_grade), np.asarray(arr, dtype=complex))))

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values())))

    @property
    def max_grade(self) -> int:
        return max((len(s) for s in self.coeffs), default=0)


def fermion_inner(f: FermionVector, g: FermionVector) -> complex:
    if f.d != g.d:
        raise DimensionError("mode-count mismatch")
    return complex(sum(np.conj(c) * g.coeffs.get(s, 0) for s, c in f.coeffs.items()))


def occupation(s: Subset, d: int) -> tuple[int, ...]:
    return tuple(1 if i in s else 0 for i in range(d))


def hard_core_indices(d: int, M: int) -> list[int]:
    """Fock-basis positions of the states with every occupation <= 1."""
    return [k for k, a in enumerate(fock_basis(d, M).labels) if max(a) <= 1]


def is_hard_core(psi: FockVector, tol: float = 0.0) -> bool:
    return all(abs(c) <= tol for a, c in zip(psi.basis.labels, psi.coeffs) if max(a) > 1)


@lru_cache(maxsize=32)
def _embedding(d: int, M: int) -> np.ndarray:
    """Isometry from the subset basis (grades <= M) into the Fock basis."""
    b = fock_basis(d, M)
    subsets = fermion_basis(d, M)
    w = np.zeros((b.dim, len(subsets)))
    for k, s in enumerate(subsets):
        w[b.index[occupation(s, d)], k] = 1.0
    w.setflags(write=False)
    return w


def bosonize(f: FermionVector, M: int) -> FockVector:
    """Carry each increasing tuple's coefficient to the hard-core state with those modes occupied."""
    if f.max_grade > M:
        raise DimensionError(f"cutoff {M} below fermion grade {f.max_grade}")
    b = fock_basis(f.d, M)
    c = np.zeros(b.dim, dtype=complex)
    for s, v in f.coeffs.items():
        c[b.index[occupation(s, f.d)]] = v
    return FockVector(f.d, M, c)


def debosonize(psi: FockVector) -> FermionVector:
    """Inverse of :func:`bosonize` on the hard-core subspace."""
    out = {}
    for alpha, v in zip(psi.basis.labels, psi.coeffs):
        if v == 0:
            continue
        if max(alpha) > 1:
            raise DomainError(f"state has support on {alpha}, outside the hard-core subspace")
        out[tuple(i for i, a in enumerate(alpha) if a)] = v
    return FermionVector(psi.d, out)


def conjugate_operator(a: OperatorMatrix) -> np.ndarray:
    """W^dagger A W: the hard-core compression of A written in the subset basis."""
    if a.M < a.d:
        raise DimensionError(f"cutoff {a.M} must be at least the mode count {a.d}")
    w = _embedding(a.d, a.M)
    return w.T @ a.data @ w


# Grassmann algebra


def _merge_sign(s: Subset, t: Subset) -> int:
    """Sign of xi_S xi_T -> xi_{S u T}; 0 when S and T overlap."""
    if set(s) & set(t):
        return 0
    crossings = sum(1 for a in s for b in t if a > b)
    return -1 if crossings % 2 else 1


@dataclass(frozen=True, eq=False)
class GrassmannPoly:
    d: int
    coeffs: Mapping[Subset, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, c in self.coeffs.items():
            s = _check_subset(s, self.d)
            if c != 0:
                clean[s] = clean.get(s, 0) + complex(c)
        object.__setattr__(
            self, "coeffs", MappingProxyType({s: c for s, c in sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])) if c != 0})
        )

    @classmethod
    def generator(cls, i: int, d: int) -> GrassmannPoly:
        return cls(d, {(i,): 1.0})

    @classmethod
    def one(cls, d: int) -> GrassmannPoly:
        return cls(d, {(): 1.0})

    def __eq__(self, other):
        if not isinstance(other, GrassmannPoly):
            return NotImplemented
        return self.d == other.d and dict(self.coeffs) == dict(other.coeffs)

    __hash__ = None

    def __add__(self, other: GrassmannPoly) -> GrassmannPoly:
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return GrassmannPoly(self.d, out)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return GrassmannPoly(self.d, {s: c * other for s, c in self.coeffs.items()})
        if other.d != self.d:
            raise DimensionError("mode-count mismatch")
        out: dict[Subset, complex] = {}
        for s, a in self.coeffs.items():
            for t, b in other.coeffs.items():
                sign = _merge_sign(s, t)
                if sign:
                    u = tuple(sorted(s + t))
                    out[u] = out.get(u, 0) + sign * a * b
        return GrassmannPoly(self.d, out)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def grassmann_derivative(g: GrassmannPoly, i: int, side: str = "left") -> GrassmannPoly:
    """Left or right derivative with respect to the generator ``i``."""
    if not 0 <= i < g.d:
        raise DimensionError(f"generator {i} out of range for d={g.d}")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    out = {}
    for s, c in g.coeffs.items():
        if i not in s:
            continue
        pos = s.index(i)
        moves = pos if side == "left" else len(s) - 1 - pos
        out[tuple(x for x in s if x != i)] = c * (-1) ** moves
    return GrassmannPoly(g.d, out)


def _operator_matrix(d: int, action) -> np.ndarray:
    basis = fermion_basis(d)
    index = {s: k for k, s in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for k, s in enumerate(basis):
        for t, c in action(GrassmannPoly(d, {s: 1.0})).coeffs.items():
            mat[index[t], k] = c
    return mat


def grassmann_ladder(d: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """(annihilators, creators): left derivatives and left multiplications by the generators."""
    ann = [_operator_matrix(d, lambda g, i=i: grassmann_derivative(g, i, "left")) for i in range(d)]
    cre = [_operator_matrix(d, lambda g, i=i: GrassmannPoly.generator(i, d) * g) for i in range(d)]
    return ann, cre


def bosonized_ladder(d: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Hard-core compressions of the bosonic ladder operators in the subset basis."""
    M = d
    ann = [conjugate_operator(OperatorMatrix(d, M, ladder_matrix(i, "annihilate", d, M))) for i in range(d)]
    cre = [conjugate_operator(OperatorMatrix(d, M, ladder_matrix(i, "create", d, M))) for i in range(d)]
    return ann, cre


def jordan_wigner_ladder(d: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Bosonized ladder operators dressed with the parity string of the lower modes."""
    basis = fermion_basis(d)
    ann, _ = bosonized_ladder(d)
    out = []
    for i in range(d):
        string = np.diag([(-1) ** sum(1 for x in s if x < i) for s in basis]).astype(complex)
        out.append(string @ ann[i])
    return out, [c.conj().T for c in out]


def car_residual(ann, cre, d: int, max_grade: int | None = None) -> float:
    """max_{i,j} |{c_i, c_j^dagger} - delta_ij I| on the block of grades <= max_grade."""
    basis = fermion_basis(d)
    keep = [k for k, s in enumerate(basis) if max_grade is None or len(s) <= max_grade]
    eye = np.eye(len(basis))
    worst = 0.0
    for i in range(d):
        for j in range(d):
            anti = ann[i] @ cre[j] + cre[j] @ ann[i] - (eye if i == j else 0)
            worst = max(worst, float(np.max(np.abs(anti[np.ix_(keep, keep)]))))
            # {c_i, c_j} must vanish as well
            anti2 = ann[i] @ ann[j] + ann[j] @ ann[i]
            worst = max(worst, float(np.max(np.abs(anti2[np.ix_(keep, keep)]))))
    return worst


def super_ccr_residual(d: int, n_max: int | None = None) -> dict[str, float]:
    """CAR residuals of the Grassmann, plain bosonized, and Jordan-Wigner realizations."""
    if d < 2:
        raise DimensionError("need at least two modes")
    return {
        "grassmann": car_residual(*grassmann_ladder(d), d, n_max),
        "bosonized": car_residual(*bosonized_ladder(d), d, n_max),
        "jordan_wigner": car_residual(*jordan_wigner_ladder(d), d, n_max),
    }

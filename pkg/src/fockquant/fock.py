"""Truncated Bargmann-Fock space over ``d`` modes with total-degree cutoff ``M``.

States are holomorphic polynomials in z* expanded in the orthonormal basis
``phi_alpha = z*^alpha / sqrt(alpha!)``, ordered by :func:`multi_indices`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammainc

from .errors import DimensionError
from .quadrature import complex_gauss_hermite
from .symbols import MultiIndex, check_multi_index, multi_factorial, multi_indices


@dataclass(frozen=True)
class FockBasis:
    d: int
    M: int
    labels: tuple[MultiIndex, ...]
    index: dict

    @property
    def dim(self) -> int:
        return len(self.labels)


@lru_cache(maxsize=64)
def fock_basis(d: int, M: int) -> FockBasis:
    if d < 1 or M < 0:
        raise DimensionError(f"invalid space d={d}, M={M}")
    labels = tuple(multi_indices(d, M))
    return FockBasis(d, M, labels, {a: k for k, a in enumerate(labels)})


def fock_dim(d: int, M: int) -> int:
    return math.comb(M + d, d)


@dataclass(frozen=True, eq=False)
class FockVector:
    d: int
    M: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (fock_dim(self.d, self.M),):
            raise DimensionError(f"expected {fock_dim(self.d, self.M)} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def basis(self) -> FockBasis:
        return fock_basis(self.d, self.M)

    @classmethod
    def zeros(cls, d: int, M: int) -> FockVector:
        return cls(d, M, np.zeros(fock_dim(d, M), dtype=complex))

    @classmethod
    def basis_vector(cls, alpha, M: int) -> FockVector:
        alpha = check_multi_index(alpha, len(alpha))
        if sum(alpha) > M:
            raise DimensionError(f"{alpha} exceeds cutoff {M}")
        b = fock_basis(len(alpha), M)
        c = np.zeros(b.dim, dtype=complex)
        c[b.index[alpha]] = 1.0
        return cls(len(alpha), M, c)

    @classmethod
    def vacuum(cls, d: int, M: int) -> FockVector:
        return cls.basis_vector((0,) * d, M)

    @classmethod
    def from_dict(cls, d: int, M: int, coeffs: dict) -> FockVector:
        b = fock_basis(d, M)
        c = np.zeros(b.dim, dtype=complex)
        for alpha, v in coeffs.items():
            alpha = check_multi_index(alpha, d)
            if sum(alpha) > M:
                raise DimensionError(f"{alpha} exceeds cutoff {M}")
            c[b.index[alpha]] += v
        return cls(d, M, c)

    def as_dict(self, tol: float = 0.0) -> dict:
        return {a: complex(v) for a, v in zip(self.basis.labels, self.coeffs) if abs(v) > tol}

    def __getitem__(self, alpha) -> complex:
        return complex(self.coeffs[self.basis.index[tuple(alpha)]])

    def __add__(self, other: FockVector) -> FockVector:
        _check_shape(self, other)
        return FockVector(self.d, self.M, self.coeffs + other.coeffs)

    def __sub__(self, other: FockVector) -> FockVector:
        _check_shape(self, other)
        return FockVector(self.d, self.M, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> FockVector:
        return FockVector(self.d, self.M, self.coeffs * scalar)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return max((sum(self.basis.labels[k]) for k in nz), default=-1)

    def evaluate(self, zstar) -> complex:
        """Value of the holomorphic function Psi at the point ``zstar``."""
        zstar = np.atleast_1d(np.asarray(zstar, dtype=complex))
        if zstar.shape != (self.d,):
            raise DimensionError(f"point must have length {self.d}")
        return complex(np.dot(self.coeffs, _monomials(zstar, self.d, self.M)))

    def resize(self, M: int) -> tuple[FockVector, float]:
        """Embed into (or project onto) cutoff ``M``; returns the vector and the dropped squared mass."""
        b_new = fock_basis(self.d, M)
        c = np.zeros(b_new.dim, dtype=complex)
        lost = 0.0
        for alpha, v in zip(self.basis.labels, self.coeffs):
            k = b_new.index.get(alpha)
            if k is None:
                lost += abs(v) ** 2
            else:
                c[k] = v
        return FockVector(self.d, M, c), lost


def _check_shape(a: FockVector, b: FockVector):
    if (a.d, a.M) != (b.d, b.M):
        raise DimensionError(f"shape mismatch: (d={a.d}, M={a.M}) vs (d={b.d}, M={b.M})")


def _monomials(z: np.ndarray, d: int, M: int) -> np.ndarray:
    """Vector of z^alpha / sqrt(alpha!) over the basis; ``z`` may have leading batch axes."""
    labels = np.array(fock_basis(d, M).labels)
    norms = np.sqrt(np.array([multi_factorial(tuple(a)) for a in labels], dtype=float))
    z = np.asarray(z, dtype=complex)
    powers = np.prod(z[..., None, :] ** labels, axis=-1)
    return powers / norms


def inner_product(psi: FockVector, phi: FockVector) -> complex:
    """Antilinear in the first argument."""
    _check_shape(psi, phi)
    return complex(np.vdot(psi.coeffs, phi.coeffs))


@dataclass(frozen=True, eq=False)
class CoherentState:
    z: np.ndarray
    realized: FockVector
    truncation_mass: float


def coherent_tail_mass(z, M: int) -> float:
    """Squared norm of exp(z* . z) carried by degrees above ``M``."""
    r = float(np.sum(np.abs(np.asarray(z, dtype=complex)) ** 2))
    if r == 0.0:
        return 0.0
    # sum_{k>M} r^k/k! = e^r * P(M+1, r)
    return float(np.exp(r) * gammainc(M + 1, r))


def coherent_state(z, M: int) -> CoherentState:
    """Truncated exponential state with coefficients z^alpha / sqrt(alpha!)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    vec = FockVector(z.size, M, _monomials(z, z.size, M))
    return CoherentState(z, vec, coherent_tail_mass(z, M))


@lru_cache(maxsize=256)
def _ladder_matrix_cached(mode: int, kind: str, d: int, M: int) -> np.ndarray:
    b = fock_basis(d, M)
    mat = np.zeros((b.dim, b.dim))
    for k, alpha in enumerate(b.labels):
        if sum(alpha) == M:
            continue
        raised = alpha[:mode] + (alpha[mode] + 1,) + alpha[mode + 1:]
        mat[b.index[raised], k] = math.sqrt(alpha[mode] + 1)
    if kind == "annihilate":
        mat = mat.T.copy()
    mat.setflags(write=False)
    return mat


def ladder_matrix(mode: int, kind: str, d: int, M: int) -> np.ndarray:
    """Truncated matrix of the creation (``'create'``) or annihilation operator of ``mode``."""
    if not 0 <= mode < d:
        raise DimensionError(f"mode {mode} out of range for d={d}")
    if kind not in ("create", "annihilate"):
        raise ValueError("kind must be 'create' or 'annihilate'")
    return _ladder_matrix_cached(mode, kind, d, M)


def apply_ladder(mode: int, kind: str, psi: FockVector) -> tuple[FockVector, float]:
    """Apply a ladder operator; creation reports the squared mass pushed past the cutoff."""
    mat = ladder_matrix(mode, kind, psi.d, psi.M)
    lost = 0.0
    if kind == "create":
        b = psi.basis
        for alpha, v in zip(b.labels, psi.coeffs):
            if sum(alpha) == psi.M:
                lost += (alpha[mode] + 1) * abs(v) ** 2
    return FockVector(psi.d, psi.M, mat @ psi.coeffs), lost


def _shift_headroom(w: np.ndarray) -> int:
    r = float(np.sum(np.abs(w) ** 2))
    return int(math.ceil(math.e**2 * r)) + 30


def apply_shift(kind: str, w, psi: FockVector) -> tuple[FockVector, float]:
    """Exponential groups on the Fock space.

    ``translate``: Psi(zeta*) -> Psi(zeta* + w), exact on polynomials.
    ``mult_exp``:  Psi(zeta*) -> exp(zeta* . w) Psi(zeta*), truncated at degree M;
    the squared mass above the cutoff is returned as ``lost``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if w.shape != (psi.d,):
        raise DimensionError(f"shift must have length {psi.d}")
    if kind == "translate":
        gen = sum(w[i] * ladder_matrix(i, "annihilate", psi.d, psi.M) for i in range(psi.d))
        return FockVector(psi.d, psi.M, _exp_series(gen, psi.coeffs, psi.M + 1)), 0.0
    if kind == "mult_exp":
        big = psi.M + _shift_headroom(w)
        src, _ = psi.resize(big)
        gen = sum(w[i] * ladder_matrix(i, "create", psi.d, big) for i in range(psi.d))
        full = FockVector(psi.d, big, _exp_series(gen, src.coeffs, big + 1))
        return full.resize(psi.M)
    raise ValueError("kind must be 'translate' or 'mult_exp'")


def _exp_series(gen, v: np.ndarray, max_terms: int) -> np.ndarray:
    """exp(gen) v for a nilpotent (on the truncated space) generator."""
    out = v.copy()
    term = v.copy()
    for k in range(1, max_terms + 1):
        term = gen @ term / k
        if not np.any(term):
            break
        out = out + term
    return out


def resolution_of_identity_residual(M: int, q: int, d: int = 1) -> float:
    """max |sum_k w_k |e_k><e_k| - I| over the truncated basis, by Gauss-Hermite quadrature."""
    nodes, weights = complex_gauss_hermite(d, q)
    vecs = _monomials(nodes, d, M)
    gram = (vecs.T * weights) @ vecs.conj()
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

"""Symbol <-> operator dictionary on the truncated Fock space.

z* is quantized to the creation operator and z to the annihilation operator.
Normal order puts creations left of annihilations; anti-normal order is the
Berezin (diagonal) quantization ``A = int dmu(zeta) P(zeta*, zeta) |e_zeta><e_zeta|``.
Both constructions return the exact compression of the untruncated operator
to the span of basis states with total degree <= M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .fock import fock_basis
from .symbols import PolySymbol, heat_transform, multi_factorial

# exp(+HEAT_CONSTANT * Laplacian) maps anti-normal symbols to normal symbols.
# Fixed by the Gaussian-moment computation antinormal(z*z) = N + 1.
HEAT_CONSTANT = 1.0


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    d: int
    M: int
    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=complex)
        n = fock_basis(self.d, self.M).dim
        if a.shape != (n, n):
            raise DimensionError(f"expected a {n}x{n} matrix, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def basis(self):
        return fock_basis(self.d, self.M)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def identity(cls, d: int, M: int) -> OperatorMatrix:
        return cls(d, M, np.eye(fock_basis(d, M).dim))

    def dagger(self) -> OperatorMatrix:
        return OperatorMatrix(self.d, self.M, self.data.conj().T)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T), initial=0.0))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_defect() <= tol

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.d, self.M, self.data @ other.data)
        return self.data @ other

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.d, self.M, self.data + other.data)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.d, self.M, self.data - other.data)

    def __mul__(self, scalar) -> OperatorMatrix:
        return OperatorMatrix(self.d, self.M, self.data * scalar)

    __rmul__ = __mul__

    def headroom_block(self, degree: int) -> np.ndarray:
        """Sub-block on basis states with total degree <= M - degree."""
        idx = [k for k, a in enumerate(self.basis.labels) if sum(a) <= self.M - degree]
        return self.data[np.ix_(idx, idx)]

    def compress_to_modes(self, n: int) -> OperatorMatrix:
        """Restrict to basis states with zero occupation in modes >= n, as an n-mode operator."""
        if not 1 <= n <= self.d:
            raise DimensionError(f"cannot compress {self.d} modes to {n}")
        idx = [k for k, a in enumerate(self.basis.labels) if not any(a[n:])]
        return OperatorMatrix(n, self.M, self.data[np.ix_(idx, idx)])


def _falling(top: tuple, bottom: tuple) -> int:
    """prod_i top_i! / bottom_i! for bottom <= top."""
    return math.prod(math.perm(t, t - b) for t, b in zip(top, bottom))


def _sqrt_prod(a: int, b: int) -> float:
    # one rounding when the product fits, so perfect squares come out exact
    p = a * b
    if p.bit_length() < 1000:
        return math.sqrt(p)
    return math.sqrt(a) * math.sqrt(b)


def normal_quantize(p: PolySymbol, M: int) -> OperatorMatrix:
    """sum of c (a^dagger)^beta a^alpha over the terms c z*^beta z^alpha."""
    basis = fock_basis(p.d, M)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for (beta, alpha), c in p.terms.items():
        for col, delta in enumerate(basis.labels):
            mu = tuple(x - y for x, y in zip(delta, alpha))
            if min(mu) < 0:
                continue
            gamma = tuple(x + y for x, y in zip(mu, beta))
            row = basis.index.get(gamma)
            if row is None:
                continue
            out[row, col] += c * _sqrt_prod(_falling(delta, mu), _falling(gamma, mu))
    return OperatorMatrix(p.d, M, out)


def antinormal_quantize(p: PolySymbol, M: int) -> OperatorMatrix:
    """Matrix elements <phi_g| A |phi_d> = sum c * moment(alpha + g, beta + d) / sqrt(g! d!)."""
    basis = fock_basis(p.d, M)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for (beta, alpha), c in p.terms.items():
        for col, delta in enumerate(basis.labels):
            gamma = tuple(x + b - a for x, b, a in zip(delta, beta, alpha))
            if min(gamma) < 0:
                continue
            row = basis.index.get(gamma)
            if row is None:
                continue
            top = tuple(a + g for a, g in zip(alpha, gamma))
            # moment(top, top) / sqrt(g! d!) == sqrt(top!/g!) * sqrt(top!/d!), kept in integers
            out[row, col] += c * _sqrt_prod(_falling(top, gamma), _falling(top, delta))
    return OperatorMatrix(p.d, M, out)


def normal_symbol_of(a: OperatorMatrix, degree: int, return_residual: bool = False, tol: float = 1e-12):
    """Normal symbol of total degree <= ``degree`` reproducing ``a``.

    Uses <e_z|A|e_w> = Theta(z*, w) exp(z* . w): the Taylor coefficients of the
    coherent matrix element are A[g, d] / sqrt(g! d!), and multiplying by the
    series of exp(-z* . w) leaves the normal symbol. With ``return_residual``
    also returns max |normal_quantize(symbol) - A|, which is nonzero when A
    carries content above ``degree``.
    """
    if degree > a.M:
        raise DimensionError(f"degree {degree} exceeds cutoff {a.M}")
    basis = a.basis
    labels = [x for x in basis.labels if sum(x) <= degree]
    scale = {x: math.sqrt(multi_factorial(x)) for x in labels}
    terms = {}
    for beta in labels:
        for alpha in labels:
            if sum(beta) + sum(alpha) > degree:
                continue
            acc = 0j
            for mu in labels:
                if any(m > b or m > x for m, b, x in zip(mu, beta, alpha)):
                    continue
                g = tuple(b - m for b, m in zip(beta, mu))
                dd = tuple(x - m for x, m in zip(alpha, mu))
                k = a.data[basis.index[g], basis.index[dd]] / (scale[g] * scale[dd])
                acc += (-1) ** sum(mu) / multi_factorial(mu) * k
            terms[(beta, alpha)] = acc
    sym = PolySymbol(a.d, terms)
    big = max((abs(c) for c in sym.terms.values()), default=0.0)
    sym = sym.chop(tol * max(big, 1.0))
    if return_residual:
        residual = float(np.max(np.abs(normal_quantize(sym, a.M).data - a.data), initial=0.0))
        return sym, residual
    return sym


def antinormal_symbol_of(p_normal: PolySymbol) -> PolySymbol:
    """Anti-normal symbol with the given normal symbol."""
    return heat_transform(p_normal, -HEAT_CONSTANT)


def normal_symbol_from_antinormal(p: PolySymbol) -> PolySymbol:
    return heat_transform(p, HEAT_CONSTANT)


@dataclass(frozen=True)
class DiagonalKernel:
    """K(z, z*) = P(z, z*) exp(z . z*)."""

    symbol: PolySymbol

    def __call__(self, z, zstar=None) -> complex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zstar = np.conj(z) if zstar is None else np.atleast_1d(np.asarray(zstar, dtype=complex))
        return self.symbol(z, zstar) * complex(np.exp(np.dot(z, zstar)))


def kernel_diag(p: PolySymbol) -> DiagonalKernel:
    return DiagonalKernel(p)

"""Tensor-product Gauss-Hermite rules for the normalized complex Gaussian measure.

Each mode variable is written as ``x + iy`` with weight ``pi^-1 exp(-x^2 - y^2)``,
so a rule with ``q`` nodes per real axis is exact for polynomials of degree
``<= 2q - 1`` in each of x and y.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _axis_rule(q: int):
    x, w = np.polynomial.hermite.hermgauss(q)
    return x, w / np.sqrt(np.pi)


def complex_gauss_hermite(d: int, q: int):
    """Nodes (shape ``(q**(2d), d)``, complex) and weights summing to 1."""
    if q < 1:
        raise ValueError("need at least one node per axis")
    x, w = _axis_rule(q)
    # one complex node per (x, y) pair
    zeta = (x[:, None] + 1j * x[None, :]).ravel()
    w2 = (w[:, None] * w[None, :]).ravel()
    if d == 1:
        return zeta[:, None], w2
    grids = np.meshgrid(*([np.arange(zeta.size)] * d), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    nodes = zeta[idx]
    weights = np.prod(w2[idx], axis=1)
    return nodes, weights


def integrate(f, d: int, q: int) -> complex:
    """Integrate a vectorized ``f(nodes) -> values`` against the normalized measure."""
    nodes, weights = complex_gauss_hermite(d, q)
    return complex(np.sum(weights * f(nodes)))

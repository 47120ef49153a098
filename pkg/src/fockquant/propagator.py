"""Time-sliced anti-normal propagator and its exact counterpart.

A slice operator is the anti-normal quantization of exp(-i tau Theta).
The Chernoff product (A_{t/N})^N converges to exp(-i t H) with
H = antinormal_quantize(Theta); amplitudes are taken between truncated
coherent states.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, NonRealSymbolError, QuadratureMismatchError
from .fock import _monomials, coherent_state
from .quadrature import complex_gauss_hermite
from .quantization import OperatorMatrix, antinormal_quantize
from .symbols import PolySymbol, evaluate_many

REALNESS_TOL = 1e-12


class SeriesRemainderWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SliceConfig:
    symbol: PolySymbol
    t: float
    N: int
    M: int
    backend: str = "series"
    series_degree: int = 24
    quad_nodes: int = 64

    def __post_init__(self):
        if self.series_degree < 1 or self.quad_nodes < 1:
            raise ValueError("series_degree and quad_nodes must be positive")
        if self.N < 1:
            raise ValueError("slice count N must be >= 1")
        if not math.isfinite(self.t):
            raise ValueError("total time must be finite")
        if self.M < 0:
            raise ValueError("cutoff must be non-negative")
        if self.backend not in ("series", "quadrature", "auto"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if not self.symbol.is_real(REALNESS_TOL):
            raise NonRealSymbolError("symbol is not conjugation invariant")

    @property
    def d(self) -> int:
        return self.symbol.d


@dataclass
class AmplitudeReport:
    z0: np.ndarray
    z1: np.ndarray
    N: int
    amplitude: complex
    exact: complex | None
    abs_error: float | None
    truncation_loss: float
    wall_time: float
    n: int | None = None


def project_modes(p: PolySymbol, n: int) -> PolySymbol:
    """Theta(p_n z*, p_n z): drop every term touching a mode >= n; result lives on n modes."""
    if not 1 <= n <= p.d:
        raise DimensionError(f"cannot project {p.d} modes onto {n}")
    kept = {
        (beta[:n], alpha[:n]): c
        for (beta, alpha), c in p.terms.items()
        if not any(beta[n:]) and not any(alpha[n:])
    }
    return PolySymbol(n, kept)


def _split_constant(p: PolySymbol) -> tuple[float, PolySymbol]:
    c0 = p.constant_term()
    return float(c0.real), p - c0


def _support_bound(p: PolySymbol, q: int) -> float:
    nodes, _ = complex_gauss_hermite(p.d, q)
    return float(np.max(np.abs(evaluate_many(p, nodes)), initial=0.0))


def series_remainder_bound(p: PolySymbol, tau: float, order: int, q: int) -> float:
    """(tau B)^(K+1) / (K+1)! with B = max |Theta| over the quadrature support."""
    x = tau * _support_bound(p, q)
    return float(math.exp((order + 1) * math.log(x) - math.lgamma(order + 2))) if x > 0 else 0.0


def _series_slice(p: PolySymbol, tau: float, M: int, order: int) -> np.ndarray:
    poly = PolySymbol.constant(1, p.d)
    term = PolySymbol.constant(1, p.d)
    for k in range(1, order + 1):
        term = term * p * (-1j * tau / k)
        poly = poly + term
    return antinormal_quantize(poly, M).data


def _quadrature_slice(p: PolySymbol, tau: float, M: int, q: int) -> np.ndarray:
    nodes, weights = complex_gauss_hermite(p.d, q)
    phase = np.exp(-1j * tau * evaluate_many(p, nodes).real)
    vecs = _monomials(nodes, p.d, M)
    return (vecs.T * (weights * phase)) @ vecs.conj()


def slice_operator(cfg: SliceConfig, tau: float, cross_check: bool = False, tol: float = 1e-8) -> OperatorMatrix:
    """Anti-normal quantization of exp(-i tau Theta) on the truncated space.

    The constant part of Theta is factored out as an exact phase. The series
    backend warns with :class:`SeriesRemainderWarning` when the remainder bound
    exceeds ``tol``; ``auto`` uses the series when the bound is below ``tol``
    and quadrature otherwise. With ``cross_check`` the quadrature backend is
    re-run with more nodes and a disagreement above ``tol`` raises.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    c0, rest = _split_constant(cfg.symbol)
    backend = cfg.backend
    bound = None
    if backend == "auto":
        bound = series_remainder_bound(rest, tau, cfg.series_degree, cfg.quad_nodes)
        backend = "series" if bound <= tol else "quadrature"
    if backend == "series":
        if bound is None:
            bound = series_remainder_bound(rest, tau, cfg.series_degree, cfg.quad_nodes)
        if bound > tol:
            warnings.warn(
                f"series remainder bound {bound:.3g} exceeds {tol:g} at tau={tau:g}",
                SeriesRemainderWarning,
                stacklevel=2,
            )
        data = _series_slice(rest, tau, cfg.M, cfg.series_degree)
    else:
        data = _quadrature_slice(rest, tau, cfg.M, cfg.quad_nodes)
        if cross_check:
            finer = _quadrature_slice(rest, tau, cfg.M, cfg.quad_nodes + max(8, cfg.quad_nodes // 2))
            err = float(np.max(np.abs(finer - data)))
            if err > tol:
                raise QuadratureMismatchError(
                    f"quadrature with {cfg.quad_nodes} nodes differs from refined rule by {err:.3g}"
                )
    return OperatorMatrix(cfg.d, cfg.M, np.exp(-1j * tau * c0) * data)


def hamiltonian(cfg: SliceConfig) -> OperatorMatrix:
    h = antinormal_quantize(cfg.symbol, cfg.M)
    if not h.is_hermitian(REALNESS_TOL * max(1.0, float(np.max(np.abs(h.data), initial=0.0)))):
        raise NonRealSymbolError("quantized symbol is not Hermitian")
    return h


def exact_propagator(cfg: SliceConfig) -> np.ndarray:
    """exp(-i t H) from the spectral decomposition of the Hermitian H."""
    h = hamiltonian(cfg).data
    h = 0.5 * (h + h.conj().T)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * cfg.t * evals)) @ evecs.conj().T


def _endpoints(cfg: SliceConfig, z0, z1):
    s0 = coherent_state(z0, cfg.M)
    s1 = coherent_state(z1, cfg.M)
    if s0.z.size != cfg.d or s1.z.size != cfg.d:
        raise DimensionError(f"endpoints must have length {cfg.d}")
    return s0, s1


def exact_amplitude(cfg: SliceConfig, z0, z1) -> complex:
    """<e_z1| exp(-i t H) |e_z0> on the truncated space."""
    s0, s1 = _endpoints(cfg, z0, z1)
    return complex(np.vdot(s1.realized.coeffs, exact_propagator(cfg) @ s0.realized.coeffs))


def chernoff_amplitude(cfg: SliceConfig, z0, z1, with_exact: bool = True) -> AmplitudeReport:
    """<e_z1| (A_{t/N})^N |e_z0> with the slice operators of ``cfg``."""
    start = time.perf_counter()
    s0, s1 = _endpoints(cfg, z0, z1)
    a = slice_operator(cfg, cfg.t / cfg.N).data
    v = s0.realized.coeffs
    for _ in range(cfg.N):
        v = a @ v
    amp = complex(np.vdot(s1.realized.coeffs, v))
    exact = exact_amplitude(cfg, z0, z1) if with_exact else None
    err = abs(amp - exact) if exact is not None else None
    return AmplitudeReport(
        z0=s0.z,
        z1=s1.z,
        N=cfg.N,
        amplitude=amp,
        exact=exact,
        abs_error=err,
        truncation_loss=s0.truncation_mass + s1.truncation_mass,
        wall_time=time.perf_counter() - start,
        n=cfg.d,
    )


@dataclass
class Sweep:
    reports: list[AmplitudeReport]
    monotone: dict[int, bool] = field(default_factory=dict)

    def column(self, n: int) -> list[AmplitudeReport]:
        return [r for r in self.reports if r.n == n]


def convergence_sweep(cfg: SliceConfig, N_list, n_list, z0, z1) -> Sweep:
    """Chernoff amplitudes on the grid of slice counts and mode projections.

    ``monotone[n]`` records whether abs_error strictly decreases with N in column n.
    """
    if not N_list or not n_list:
        raise ValueError("N_list and n_list must be nonempty")
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    reports = []
    for n in sorted(set(n_list)):
        sym = project_modes(cfg.symbol, n)
        for N in sorted(set(N_list)):
            cell = replace(cfg, symbol=sym, N=N)
            reports.append(chernoff_amplitude(cell, z0[:n], z1[:n]))
    sweep = Sweep(sorted(reports, key=lambda r: (r.N, r.n)))
    for n in sorted(set(n_list)):
        errs = [r.abs_error for r in sweep.column(n)]
        sweep.monotone[n] = all(b < a for a, b in zip(errs, errs[1:]))
    return sweep

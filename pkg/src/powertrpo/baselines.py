"""Reference allocators: max-power, random, WMMSE and FP (quadratic transform).

The iterative solvers work on channel magnitudes ``a = |h|`` only, since the
sum-rate depends on ``|h|^2``.  Both are initialized at full power and stop
once the sum-rate changes by less than ``tol`` bits/s/Hz between iterates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import netmodel
from .exceptions import NumericalError

DEFAULT_MAX_ITERS = 500
DEFAULT_TOL = 1e-4


@dataclass
class SolverTrace:
    powers: list = field(default_factory=list)       # PowerMatrix per iterate
    sum_rates: list = field(default_factory=list)    # bits/s per iterate
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.sum_rates) - 1

    @property
    def final_powers(self) -> np.ndarray:
        return self.powers[-1]

    @property
    def final_rate(self) -> float:
        return self.sum_rates[-1]

    def rows(self):
        return [{"iterate": i, "sum_rate_mbps": r / 1e6} for i, r in enumerate(self.sum_rates)]


def max_power(cfg: netmodel.NetworkConfig) -> np.ndarray:
    return np.full(cfg.shape, cfg.pmax_watts)


def random_power(cfg: netmodel.NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, cfg.pmax_watts, size=cfg.shape)


def _magnitudes(H):
    A = np.abs(np.asarray(H))
    direct = np.swapaxes(np.diagonal(A, axis1=0, axis2=1), 0, 1)   # a[b, b, k] as (B, K)
    return A, direct


def _run(update, p0, H, cfg, max_iters, tol, name):
    z = netmodel.noise_power(cfg)
    trace = SolverTrace()
    p = p0
    se = netmodel.spectral_efficiency(H, p, z)
    trace.powers.append(p.copy())
    trace.sum_rates.append(cfg.bandwidth * se)
    for _ in range(max_iters):
        p = update(p)
        if not np.all(np.isfinite(p)):
            raise NumericalError(f"{name} produced a non-finite iterate", partial=trace)
        se_new = netmodel.spectral_efficiency(H, p, z)
        trace.powers.append(p.copy())
        trace.sum_rates.append(cfg.bandwidth * se_new)
        if abs(se_new - se) < tol:
            trace.converged = True
            break
        se = se_new
    return trace


def wmmse(H, cfg: netmodel.NetworkConfig, max_iters: int = DEFAULT_MAX_ITERS,
          tol: float = DEFAULT_TOL) -> SolverTrace:
    """SISO WMMSE over transmit amplitudes ``v = sqrt(p)``."""
    A, direct = _magnitudes(H)
    G = A ** 2
    z = netmodel.noise_power(cfg)
    vmax = np.sqrt(cfg.pmax_watts)

    def update(p):
        v = np.sqrt(p)
        u = direct * v / (netmodel.received_power(G, p) + z)
        w = 1.0 / (1.0 - u * direct * v)
        # sum over receivers (b', k') of w u^2 a^2 from BS b
        denom = np.einsum("bck,ck->b", G, w * u ** 2)[:, None]
        v_new = w * u * direct / denom
        # clamp in the power domain so a saturated link sits at exactly Pmax
        return np.where(v_new >= vmax, cfg.pmax_watts, np.maximum(v_new, 0.0) ** 2)

    return _run(update, max_power(cfg), H, cfg, max_iters, tol, "WMMSE")


def fp(H, cfg: netmodel.NetworkConfig, max_iters: int = DEFAULT_MAX_ITERS,
       tol: float = DEFAULT_TOL) -> SolverTrace:
    """Quadratic-transform fractional programming with closed-form power updates."""
    A, direct = _magnitudes(H)
    G = A ** 2
    z = netmodel.noise_power(cfg)
    pmax = cfg.pmax_watts

    def update(p):
        gamma = netmodel.sinr_matrix(H, p, z)
        y = np.sqrt((1.0 + gamma) * p) * direct / (netmodel.received_power(G, p) + z)
        denom = np.einsum("bck,ck->b", G, y ** 2)[:, None]
        return np.minimum(pmax, (y * np.sqrt(1.0 + gamma) * direct / denom) ** 2)

    return _run(update, max_power(cfg), H, cfg, max_iters, tol, "FP")

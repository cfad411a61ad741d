"""Multi-cell downlink network model.

Geometry, Rayleigh/pathloss channels, SINR and sum-rate for single-antenna
base stations serving ``K`` users each on a shared band.  Arrays follow a
fixed index convention:

* channel tensor ``H[b_tx, b_cell, k]`` is the gain from BS ``b_tx`` to user
  ``k`` served by BS ``b_cell``;
* power matrix ``P[b, k]`` is the power BS ``b`` spends on its user ``k``.

Every function accepts leading batch dimensions on ``H``/``P``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import ConfigError

LAYOUTS = ("line3", "hex7_wraparound")
POWER_MODES = ("per_user", "sum_power")


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0


@dataclass(frozen=True)
class NetworkConfig:
    num_cells: int = 3
    users_per_cell: int = 2
    bandwidth: float = 20e6
    pmax_dbm: float = 43.0
    noise_psd_dbm_hz: float = -150.0
    noise_figure_db: float = 9.0
    ref_distance: float = 0.3920
    cell_radius: float = 1000.0
    pathloss_exponent: float = 3.76
    layout: str = "line3"

    def __post_init__(self):
        if self.num_cells < 1 or self.users_per_cell < 1:
            raise ConfigError("num_cells and users_per_cell must be >= 1")
        for name in ("bandwidth", "cell_radius", "ref_distance", "pathloss_exponent"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.layout not in LAYOUTS:
            raise ConfigError(f"unknown layout {self.layout!r}; expected one of {LAYOUTS}")
        if self.layout == "hex7_wraparound" and self.num_cells != 7:
            raise ConfigError("hex7_wraparound layout requires num_cells == 7")

    @classmethod
    def three_cell(cls, **overrides) -> "NetworkConfig":
        return cls(**overrides)

    @classmethod
    def seven_cell(cls, **overrides) -> "NetworkConfig":
        params = dict(num_cells=7, users_per_cell=8, pathloss_exponent=4.0,
                      layout="hex7_wraparound")
        params.update(overrides)
        return cls(**params)

    @property
    def pmax_watts(self) -> float:
        return float(dbm_to_watts(self.pmax_dbm))

    @property
    def shape(self) -> tuple[int, int]:
        return self.num_cells, self.users_per_cell

    def replace(self, **changes) -> "NetworkConfig":
        params = asdict(self)
        params.update(changes)
        return NetworkConfig(**params)


@dataclass(frozen=True)
class Geometry:
    bs_positions: np.ndarray    # (B, 2)
    user_positions: np.ndarray  # (B, K, 2), indexed by serving BS

    @property
    def num_cells(self) -> int:
        return self.bs_positions.shape[0]


def site_spacing(cell_radius: float) -> float:
    """Distance between adjacent hexagon centres (2 R cos 30 deg)."""
    return 2.0 * cell_radius * np.cos(np.pi / 6)


def bs_positions(cfg: NetworkConfig) -> np.ndarray:
    d = site_spacing(cfg.cell_radius)
    if cfg.layout == "line3":
        xs = d * np.arange(cfg.num_cells)
        return np.column_stack([xs, np.zeros_like(xs)])
    # hex7: centre plus the first ring of a pointy-top hexagonal lattice
    angles = np.arange(6) * np.pi / 3
    ring = d * np.column_stack([np.cos(angles), np.sin(angles)])
    return np.vstack([np.zeros((1, 2)), ring])


def wraparound_shifts(cfg: NetworkConfig) -> np.ndarray:
    """Translations (including zero) used for minimum-image distances."""
    if cfg.layout != "hex7_wraparound":
        return np.zeros((1, 2))
    d = site_spacing(cfg.cell_radius)
    # 7-cell cluster repeats along 2*a1 + a2 and its 60-degree rotations
    base = d * np.array([2.5, np.sqrt(3) / 2])
    out = [np.zeros(2)]
    for i in range(6):
        c, s = np.cos(i * np.pi / 3), np.sin(i * np.pi / 3)
        out.append(np.array([[c, -s], [s, c]]) @ base)
    return np.array(out)


def in_hexagon(points, radius: float) -> np.ndarray:
    """Membership test for a pointy-top hexagon of circumradius ``radius`` at the origin."""
    x = np.abs(points[..., 0])
    y = np.abs(points[..., 1])
    half_width = radius * np.sqrt(3) / 2
    return (x <= half_width) & (y <= radius - x / np.sqrt(3))


def sample_in_hexagon(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in the hexagon by rejection from its bounding box."""
    half_width = radius * np.sqrt(3) / 2
    out = np.empty((0, 2))
    while out.shape[0] < n:
        m = max(2 * (n - out.shape[0]), 8)
        cand = rng.uniform([-half_width, -radius], [half_width, radius], size=(m, 2))
        out = np.vstack([out, cand[in_hexagon(cand, radius)]])
    return out[:n]


def sample_geometry(cfg: NetworkConfig, rng: np.random.Generator) -> Geometry:
    bs = bs_positions(cfg)
    B, K = cfg.shape
    offsets = sample_in_hexagon(B * K, cfg.cell_radius, rng).reshape(B, K, 2)
    return Geometry(bs_positions=bs, user_positions=bs[:, None, :] + offsets)


def distances(geom: Geometry, cfg: NetworkConfig) -> np.ndarray:
    """``D[b_tx, b_cell, k]``; minimum-image distance under wraparound."""
    diff = geom.user_positions[None, :, :, :] - geom.bs_positions[:, None, None, :]
    shifts = wraparound_shifts(cfg)
    d = np.linalg.norm(diff[..., None, :] + shifts, axis=-1)
    return d.min(axis=-1)


def pathloss(d, d0: float, alpha: float):
    """Large-scale gain ``(1 + d/d0)^-alpha``."""
    return (1.0 + np.asarray(d, dtype=float) / d0) ** (-alpha)


def sample_fading(shape, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) draws."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def sample_channels(geom: Geometry, cfg: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    beta = pathloss(distances(geom, cfg), cfg.ref_distance, cfg.pathloss_exponent)
    return sample_fading(beta.shape, rng) * np.sqrt(beta)


def sample_realization(cfg: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    """One time slot: fresh user drop followed by fresh fading."""
    return sample_channels(sample_geometry(cfg, rng), cfg, rng)


def noise_power(cfg: NetworkConfig) -> float:
    z_dbm = cfg.noise_psd_dbm_hz + 10.0 * np.log10(cfg.bandwidth) + cfg.noise_figure_db
    return float(dbm_to_watts(z_dbm))


def channel_gains(H) -> np.ndarray:
    H = np.asarray(H)
    return H.real ** 2 + H.imag ** 2 if np.iscomplexobj(H) else H ** 2


def received_power(G, P) -> np.ndarray:
    """Total power at every user: ``sum_b' G[b', b, k] * sum_k' P[b', k']``."""
    return np.einsum("...ick,...i->...ck", G, P.sum(axis=-1))


def sinr_matrix(H, P, z: float) -> np.ndarray:
    """SINR of every link; interference covers all other (BS, user) streams."""
    G = channel_gains(H)
    P = np.asarray(P, dtype=float)
    own = np.diagonal(G, axis1=-3, axis2=-2)          # (..., K, B)
    own = np.swapaxes(own, -1, -2)                    # (..., B, K)
    signal = P * own
    interference = received_power(G, P) - signal
    # cancellation can leave tiny negative residue
    interference = np.maximum(interference, 0.0)
    return signal / (interference + z)


def sinr(H, P, z: float, link: tuple[int, int]) -> float:
    b, k = link
    return float(sinr_matrix(H, P, z)[..., b, k])


def spectral_efficiency(H, P, z: float) -> np.ndarray:
    """Sum over links of ``log2(1 + SINR)``, in bits/s/Hz."""
    return np.log2(1.0 + sinr_matrix(H, P, z)).sum(axis=(-2, -1))


def sum_rate(H, P, z: float, bandwidth: float):
    """Network sum-rate in bits/s."""
    out = bandwidth * spectral_efficiency(H, P, z)
    return float(out) if np.ndim(out) == 0 else out


def project_powers(P, pmax: float, mode: str = "per_user") -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if mode == "per_user":
        return np.clip(P, 0.0, pmax)
    if mode != "sum_power":
        raise ConfigError(f"unknown power mode {mode!r}")
    P = np.maximum(P, 0.0)
    total = P.sum(axis=-1, keepdims=True)
    over = total > pmax
    scale = np.divide(pmax, total, out=np.ones_like(total), where=over)
    return P * scale


def is_feasible(P, pmax: float, mode: str = "per_user", atol: float = 1e-12) -> bool:
    P = np.asarray(P)
    if np.any(P < -atol):
        return False
    if mode == "per_user":
        return bool(np.all(P <= pmax + atol))
    return bool(np.all(P.sum(axis=-1) <= pmax * (1 + 1e-12) + atol))

"""Coupling parameters, single-photon dispersion and the free two-photon continuum.

Energies are measured in units of the total decay rate, so configurations
always satisfy gamma_r + gamma_l = 1. Wavenumbers are dimensionless (emitter
spacing set to one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChiralNoGap, PoleAtK

TWO_PI = 2.0 * math.pi

# |k -+ k0| below this counts as sitting on a superradiant singularity
POLE_TOL = 1e-9

# uniform q samples over one relative-momentum period
DEFAULT_Q_GRID = 4001


def wrap_momentum(k: float) -> float:
    """Wrap a wavenumber into the Brillouin zone (-pi, pi]."""
    kw = math.remainder(k, TWO_PI)
    if kw <= -math.pi:
        kw += TWO_PI
    return kw


@dataclass(frozen=True)
class CouplingConfig:
    """Decay rates into right/left movers plus the resonant wavenumber.

    gamma_r and gamma_l are fractions of the total rate (they must sum to 1);
    k0 lies strictly inside (0, pi). The chirality is gamma_r, with 0 or 1
    marking the fully chiral limits.
    """

    gamma_r: float
    gamma_l: float
    k0: float

    def __post_init__(self):
        if self.gamma_r < 0.0 or self.gamma_l < 0.0:
            raise ValueError("decay rates must be non-negative")
        if abs(self.gamma_r + self.gamma_l - 1.0) > 1e-12:
            raise ValueError("rates must satisfy gamma_r + gamma_l = 1")
        if not 0.0 < self.k0 < math.pi:
            raise ValueError("k0 must lie strictly inside (0, pi)")

    @classmethod
    def from_chirality(cls, chi: float, k0: float) -> "CouplingConfig":
        if not 0.0 <= chi <= 1.0:
            raise ValueError("chirality must lie in [0, 1]")
        return cls(gamma_r=chi, gamma_l=1.0 - chi, k0=k0)

    @property
    def chirality(self) -> float:
        return self.gamma_r

    @property
    def is_chiral(self) -> bool:
        return self.gamma_r == 0.0 or self.gamma_l == 0.0


@dataclass(frozen=True)
class BandInterval:
    """Energy interval covered by one branch combination of the free continuum."""

    lower: float
    upper: float
    branch_tag: str  # "upper-upper" | "lower-lower" | "mixed"
    lower_unbounded: bool = False
    upper_unbounded: bool = False

    def contains(self, energy: float) -> bool:
        lo = -math.inf if self.lower_unbounded else self.lower
        hi = math.inf if self.upper_unbounded else self.upper
        return lo <= energy <= hi


@dataclass(frozen=True)
class DosHistogram:
    """Normalized histogram of free pair energies at fixed K."""

    k_momentum: float
    bin_edges: np.ndarray
    counts: np.ndarray


def _pole_distance(k: float, pole: float) -> float:
    return abs(math.remainder(k - pole, TWO_PI))


def _check_pole(kw: float, cfg: CouplingConfig) -> None:
    if cfg.gamma_r > 0.0 and _pole_distance(kw, cfg.k0) < POLE_TOL:
        raise PoleAtK(f"k = {kw!r} sits on the k0 singularity")
    if cfg.gamma_l > 0.0 and _pole_distance(kw, -cfg.k0) < POLE_TOL:
        raise PoleAtK(f"k = {kw!r} sits on the -k0 singularity")


def single_photon_energy(k: float, cfg: CouplingConfig) -> float:
    """Bloch-state energy at wavenumber k.

    Raises PoleAtK within POLE_TOL of a superradiant singularity. Terms with
    zero rate are dropped, so a chiral coupling only has one singular point.
    """
    kw = wrap_momentum(k)
    _check_pole(kw, cfg)
    energy = 0.0
    if cfg.gamma_r > 0.0:
        energy += 0.5 * cfg.gamma_r / math.tan(0.5 * (cfg.k0 - kw))
    if cfg.gamma_l > 0.0:
        energy += 0.5 * cfg.gamma_l / math.tan(0.5 * (cfg.k0 + kw))
    return energy


def free_pair_energy(K: float, q: float, cfg: CouplingConfig) -> float:
    """Energy of two free photons with per-photon momentum K and relative momentum q."""
    return single_photon_energy(K + 0.5 * q, cfg) + single_photon_energy(K - 0.5 * q, cfg)


def band_label(k: float, cfg: CouplingConfig) -> str:
    """Single-photon band of k: the arc of (-pi, pi] between the singularities.

    The arc through k = 0 diverges upward at both singular ends and is the
    upper band; the outer arcs form the lower band.
    """
    kw = wrap_momentum(k)
    return "upper" if -cfg.k0 < kw < cfg.k0 else "lower"


def _branch_tag(k1: float, k2: float, cfg: CouplingConfig) -> str:
    a, b = band_label(k1, cfg), band_label(k2, cfg)
    if a == b:
        return f"{a}-{a}"
    return "mixed"


def _fold_q(q: float) -> float:
    """Fold a q value into the fundamental domain [0, 2pi] (4pi period, even)."""
    qf = q % (2.0 * TWO_PI)
    if qf > TWO_PI:
        qf = 2.0 * TWO_PI - qf
    return qf


def _arc_edges_q(K: float, k0: float) -> list[float]:
    """q values in [0, 2pi] where a constituent momentum crosses +-k0."""
    out = set()
    for q in (2.0 * (k0 - K), 2.0 * (K - k0), 2.0 * (-k0 - K), 2.0 * (K + k0)):
        out.add(_fold_q(q))
    return sorted(out)


def _pole_positions_q(K: float, cfg: CouplingConfig) -> list[float]:
    """q values in [0, 2pi] where a constituent momentum hits a singularity."""
    poles = []
    if cfg.gamma_r > 0.0:
        poles += [2.0 * (cfg.k0 - K), 2.0 * (K - cfg.k0)]    # k1 or k2 = +k0
    if cfg.gamma_l > 0.0:
        poles += [2.0 * (-cfg.k0 - K), 2.0 * (K + cfg.k0)]   # k1 or k2 = -k0
    return sorted({_fold_q(q) for q in poles})


def _segment_edges(K: float, cfg: CouplingConfig) -> list[float]:
    edges = [0.0, TWO_PI]
    for q in _arc_edges_q(K, cfg.k0):
        if 1e-12 < q < TWO_PI - 1e-12:
            edges.append(q)
    edges = sorted(edges)
    merged = [edges[0]]
    for e in edges[1:]:
        if e - merged[-1] > 1e-10:
            merged.append(e)
    return merged


def _is_pole_edge(q: float, poles: list[float]) -> bool:
    return any(abs(q - p) < 1e-9 for p in poles)


def continuum_bands(K: float, cfg: CouplingConfig, grid_size: int = DEFAULT_Q_GRID) -> list[BandInterval]:
    """Energy intervals covered by the free two-photon continuum at fixed K.

    The relative momentum runs over [0, 2pi] (the spectrum is even in q and
    4pi-periodic, so this covers one full period). The q axis is split at the
    singular points of either constituent; each smooth segment contributes one
    interval tagged by the band membership of the two photons, with a flag on
    any edge that diverges at a singularity.
    """
    if grid_size < 101:
        raise ValueError("grid_size must be at least 101")
    poles = _pole_positions_q(K, cfg)
    edges = _segment_edges(K, cfg)
    raw: list[BandInterval] = []
    for a, b in zip(edges[:-1], edges[1:]):
        npt = max(33, int(round(grid_size * (b - a) / TWO_PI)))
        q = np.linspace(a, b, npt + 2)[1:-1]
        # hug pole edges to catch divergences; sample smooth edges exactly
        pad = (b - a) * 1e-7
        q[0] = a + pad if _is_pole_edge(a, poles) else a
        q[-1] = b - pad if _is_pole_edge(b, poles) else b
        k1 = 0.5 * q + K
        k2 = K - 0.5 * q
        omega = _pair_energy_grid(k1, k2, cfg)
        finite = np.isfinite(omega)
        if not finite.any():
            continue
        vals = omega[finite]
        tag = _branch_tag(float(k1[len(k1) // 2]), float(k2[len(k2) // 2]), cfg)
        lo_unb = hi_unb = False
        for edge, sample in ((a, omega[0]), (b, omega[-1])):
            if _is_pole_edge(edge, poles) and np.isfinite(sample):
                lo_unb |= sample < 0.0
                hi_unb |= sample > 0.0
        raw.append(BandInterval(
            lower=-math.inf if lo_unb else float(vals.min()),
            upper=math.inf if hi_unb else float(vals.max()),
            branch_tag=tag,
            lower_unbounded=lo_unb,
            upper_unbounded=hi_unb,
        ))
    return _merge_intervals(raw)


def _pair_energy_grid(k1: np.ndarray, k2: np.ndarray, cfg: CouplingConfig) -> np.ndarray:
    """Vectorized pair energy; samples on a singularity come back as +-inf/nan."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.zeros_like(k1)
        for k in (k1, k2):
            kw = np.remainder(k + math.pi, TWO_PI) - math.pi
            term = np.zeros_like(kw)
            if cfg.gamma_r > 0.0:
                term = term + 0.5 * cfg.gamma_r / np.tan(0.5 * (cfg.k0 - kw))
            if cfg.gamma_l > 0.0:
                term = term + 0.5 * cfg.gamma_l / np.tan(0.5 * (cfg.k0 + kw))
            out = out + term
    return out


def _merge_intervals(intervals: list[BandInterval]) -> list[BandInterval]:
    merged: list[BandInterval] = []
    for tag in ("upper-upper", "lower-lower", "mixed"):
        group = sorted((iv for iv in intervals if iv.branch_tag == tag),
                       key=lambda iv: (iv.lower, iv.upper))
        acc: BandInterval | None = None
        for iv in group:
            if acc is None:
                acc = iv
            elif iv.lower <= acc.upper + 1e-9:
                acc = BandInterval(
                    lower=acc.lower,
                    upper=max(acc.upper, iv.upper),
                    branch_tag=tag,
                    lower_unbounded=acc.lower_unbounded,
                    upper_unbounded=acc.upper_unbounded or iv.upper_unbounded,
                )
            else:
                merged.append(acc)
                acc = iv
        if acc is not None:
            merged.append(acc)
    return merged


def uncovered_windows(K: float, cfg: CouplingConfig, grid_size: int = DEFAULT_Q_GRID) -> list[tuple[float, float]]:
    """Finite energy holes left open by the continuum at fixed K."""
    bands = continuum_bands(K, cfg, grid_size)
    spans = sorted((iv.lower, iv.upper) for iv in bands)
    holes: list[tuple[float, float]] = []
    hi = spans[0][1]
    for lo, up in spans[1:]:
        if lo > hi + 1e-12:
            holes.append((hi, lo))
        hi = max(hi, up)
    return holes


@dataclass(frozen=True)
class GapRegion:
    """K interval hosting the two-photon gap, with per-K energy windows."""

    k_lower: float
    k_upper: float
    cfg: CouplingConfig

    def contains(self, K: float) -> bool:
        return self.k_lower < K < self.k_upper

    def energy_window(self, K: float, grid_size: int = DEFAULT_Q_GRID) -> tuple[float, float] | None:
        """Widest uncovered energy interval at K, or None if the continuum is gapless."""
        holes = uncovered_windows(K, self.cfg, grid_size)
        if not holes:
            return None
        return max(holes, key=lambda h: h[1] - h[0])


def gap_region(cfg: CouplingConfig) -> GapRegion:
    """K range where the free continuum leaves an energy gap.

    (k0, pi - k0) for k0 below pi/2, mirrored above; empty at exactly pi/2.
    Fully chiral couplings have no gap at any K.
    """
    if cfg.is_chiral:
        raise ChiralNoGap("fully chiral coupling has a gapless continuum")
    lo, hi = sorted((cfg.k0, math.pi - cfg.k0))
    return GapRegion(k_lower=lo, k_upper=hi, cfg=cfg)


def pair_density_of_states(
    K: float,
    cfg: CouplingConfig,
    grid_size: int = DEFAULT_Q_GRID,
    bins: int = 200,
    energy_range: tuple[float, float] | None = None,
) -> DosHistogram:
    """Histogram of free pair energies over the uniform q grid.

    Counts are masses normalized to the finite samples inside the binned
    range, so they sum to one. Without an explicit energy_range the bins span
    all finite samples.
    """
    if bins < 10:
        raise ValueError("bins must be at least 10")
    q = np.linspace(0.0, TWO_PI, grid_size)
    omega = _pair_energy_grid(0.5 * q + K, K - 0.5 * q, cfg)
    vals = omega[np.isfinite(omega)]
    if energy_range is None:
        lo, hi = float(vals.min()), float(vals.max())
    else:
        lo, hi = energy_range
        vals = vals[(vals >= lo) & (vals <= hi)]
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    total = counts.sum()
    mass = counts / total if total > 0 else counts.astype(float)
    return DosHistogram(k_momentum=K, bin_edges=edges, counts=mass)

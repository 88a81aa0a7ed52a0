"""Geometric-ansatz image, bound-state search and closed-form special cases.

The ansatz is the relative-coordinate state with amplitude z^D at separation
D >= 1. Applying the fixed-K Hamiltonian maps it onto itself plus two
z-independent leak states, with rational coefficients evaluated here. True
bound states are two-component superpositions whose leak amplitudes cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateOmega,
    NoBoundState,
    NoConvergence,
    NotBoundCandidate,
    NotChiral,
    NotInGap,
    NotRealizable,
    PoleAtZ,
)
from .model import DEFAULT_Q_GRID, CouplingConfig, gap_region
from . import quartic
from .quartic import RootSet, classify_roots, solve_reciprocal_quartic
from .table import Column, ScanTable

CONSTRAINT_TOL = 1e-8
REALNESS_TOL = 1e-9


@dataclass(frozen=True)
class AnsatzImage:
    """Coefficients of H|z>: pair energy plus the two leak amplitudes."""

    omega_z: complex
    g_plus: complex
    g_minus: complex


@dataclass(frozen=True)
class BoundState:
    """Localized two-photon eigenstate  amp_a |z1> + amp_b |z2>, unit norm."""

    k_momentum: float
    energy: float
    z1: complex
    z2: complex
    amp_a: complex
    amp_b: complex
    degenerate: bool = False


@dataclass(frozen=True)
class BoundSearch:
    """Knobs for the determinant-bracketing bound-state finder."""

    prescan_points: int = 512
    d_tol: float = 1e-10
    omega_tol: float = 1e-12
    grid_size: int = DEFAULT_Q_GRID
    max_refine: int = 3
    window: tuple[float, float] | None = None


def ansatz_image(z: complex, K: float, cfg: CouplingConfig) -> AnsatzImage:
    """Evaluate the three rational functions at z.

    Terms with zero rate are dropped entirely, so only denominators attached
    to an active coupling can raise PoleAtZ.
    """
    z = complex(z)
    omega = 0.0j
    g_plus = 0.0j
    g_minus = 0.0j
    if cfg.gamma_l > 0.0:
        cp, sp = math.cos(cfg.k0 + K), math.sin(cfg.k0 + K)
        denom = 1.0 + z * z - 2.0 * z * cp
        if abs(denom) < 1e-12:
            raise PoleAtZ(f"z = {z!r} hits the k0+K denominator zero")
        omega += 2.0 * z * cfg.gamma_l * sp / denom
        g_plus = 2.0 * z * cfg.gamma_l * (z - cp) / denom
    if cfg.gamma_r > 0.0:
        cm, sm = math.cos(cfg.k0 - K), math.sin(cfg.k0 - K)
        denom = 1.0 + z * z - 2.0 * z * cm
        if abs(denom) < 1e-12:
            raise PoleAtZ(f"z = {z!r} hits the k0-K denominator zero")
        omega += 2.0 * z * cfg.gamma_r * sm / denom
        g_minus = 2.0 * z * cfg.gamma_r * (z - cm) / denom
    return AnsatzImage(omega_z=omega, g_plus=g_plus, g_minus=g_minus)


def pair_energy_of_z(z: complex, K: float, cfg: CouplingConfig) -> complex:
    return ansatz_image(z, K, cfg).omega_z


def unit_edge_energies(K: float, cfg: CouplingConfig) -> tuple[float, float]:
    """Pair energies at z = -1 and z = +1, bounding the resonance-candidate range."""
    lo = ansatz_image(-1.0, K, cfg).omega_z.real
    hi = ansatz_image(1.0, K, cfg).omega_z.real
    return lo, hi


def _inside_roots(rs: RootSet) -> list[complex]:
    return [z for z, m in zip(rs.roots, rs.magnitudes) if m < 1.0 - quartic.UNIT_CIRCLE_TOL]


def bound_determinant(omega: float, K: float, cfg: CouplingConfig,
                      root_set: RootSet | None = None) -> float:
    """Cancellation determinant over the two inside roots, negative root first.

    Real by construction for the real inside roots of the gap window; returns
    NaN when the inside pair is complex (no usable sign there).
    """
    rs = root_set if root_set is not None else solve_reciprocal_quartic(K, omega, cfg)
    state = classify_roots(rs)
    if state.kind != "BoundCandidate":
        raise NotBoundCandidate(f"(K={K}, omega={omega}) classifies as {state.kind}")
    ins = _inside_roots(rs)
    if max(abs(z.imag) for z in ins) > REALNESS_TOL:
        return math.nan
    z1, z2 = sorted(z.real for z in ins)
    img1 = ansatz_image(z1, K, cfg)
    img2 = ansatz_image(z2, K, cfg)
    det = img1.g_minus * img2.g_plus - img1.g_plus * img2.g_minus
    return det.real


def _overlap(zi: complex, zj: complex) -> complex:
    # <z_i|z_j> summed in closed form over D >= 1
    w = zi.conjugate() * zj
    return w / (1.0 - w)


def _pair_state(K: float, omega: float, z1: complex, z2: complex,
                cfg: CouplingConfig) -> BoundState:
    """Null-space coefficients of the two leak constraints, normalized."""
    img1 = ansatz_image(z1, K, cfg)
    img2 = ansatz_image(z2, K, cfg)
    rows = [(img1.g_plus, img2.g_plus), (img1.g_minus, img2.g_minus)]
    row = max(rows, key=lambda r: abs(r[0]) + abs(r[1]))
    a, b = row[1], -row[0]
    if abs(a) + abs(b) == 0.0:
        a, b = 1.0 + 0.0j, 0.0j
    norm2 = (
        (a.conjugate() * a * _overlap(z1, z1)).real
        + (b.conjugate() * b * _overlap(z2, z2)).real
        + 2.0 * (a.conjugate() * b * _overlap(z1, z2)).real
    )
    if norm2 <= 0.0:
        raise NoConvergence("pair state has non-positive norm")
    scale = 1.0 / math.sqrt(norm2)
    a, b = a * scale, b * scale
    lead = a if abs(a) >= abs(b) else b
    phase = lead / abs(lead)
    a, b = a / phase, b / phase
    return BoundState(k_momentum=K, energy=omega, z1=z1, z2=z2, amp_a=a, amp_b=b)


def constraint_residual(bs: BoundState, cfg: CouplingConfig) -> float:
    """Largest leak amplitude of the superposition; ~0 for a true eigenstate."""
    img1 = ansatz_image(bs.z1, bs.k_momentum, cfg)
    img2 = ansatz_image(bs.z2, bs.k_momentum, cfg)
    res_p = abs(bs.amp_a * img1.g_plus + bs.amp_b * img2.g_plus)
    res_m = abs(bs.amp_a * img1.g_minus + bs.amp_b * img2.g_minus)
    return max(res_p, res_m)


def _determinant_or_nan(omega: float, K: float, cfg: CouplingConfig) -> float:
    try:
        return bound_determinant(omega, K, cfg)
    except (NotBoundCandidate, DegenerateOmega, NoConvergence):
        return math.nan


def find_bound_state(K: float, cfg: CouplingConfig,
                     search: BoundSearch | None = None) -> BoundState:
    """Bracket and bisect the determinant across the gap window at K.

    Pre-scans the window, brackets sign changes between bound-candidate
    samples, bisects each to the requested tolerance and returns the lowest
    valid state. The pre-scan density is refined a few times before giving up
    with NoBoundState.
    """
    opts = search or BoundSearch()
    region = gap_region(cfg)
    if not region.contains(K):
        raise NotInGap(f"K = {K} outside ({region.k_lower}, {region.k_upper})")
    window = opts.window or region.energy_window(K, opts.grid_size)
    if window is None:
        raise NoBoundState(f"no uncovered energy window at K = {K}")
    span = window[1] - window[0]
    lo, hi = window[0] + 1e-6 * span, window[1] - 1e-6 * span

    points = opts.prescan_points
    brackets: list[tuple[float, float]] = []
    for _ in range(opts.max_refine + 1):
        grid = np.linspace(lo, hi, points)
        vals = np.array([_determinant_or_nan(w, K, cfg) for w in grid])
        ok = np.isfinite(vals)
        idx = np.where(ok[:-1] & ok[1:] & (vals[:-1] * vals[1:] < 0.0))[0]
        brackets = [(float(grid[i]), float(grid[i + 1])) for i in idx]
        if brackets:
            break
        points *= 4
    if not brackets:
        raise NoBoundState(f"no determinant sign change in the gap window at K = {K}")

    found: list[BoundState] = []
    for a, b in brackets:
        state = _bisect_bound(a, b, K, cfg, opts)
        if state is not None:
            found.append(state)
    if not found:
        raise NoBoundState(f"brackets at K = {K} did not converge to a valid state")
    return min(found, key=lambda s: s.energy)


def _bisect_bound(a: float, b: float, K: float, cfg: CouplingConfig,
                  opts: BoundSearch) -> BoundState | None:
    fa = _determinant_or_nan(a, K, cfg)
    fb = _determinant_or_nan(b, K, cfg)
    if not (math.isfinite(fa) and math.isfinite(fb)) or fa * fb > 0.0:
        return None
    mid, fm = 0.5 * (a + b), math.nan
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = _determinant_or_nan(mid, K, cfg)
        if not math.isfinite(fm):
            return None
        if abs(fm) < opts.d_tol or (b - a) < opts.omega_tol:
            break
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    rs = solve_reciprocal_quartic(K, mid, cfg)
    ins = _inside_roots(rs)
    if len(ins) != 2 or max(abs(z.imag) for z in ins) > REALNESS_TOL:
        return None
    z_neg, z_pos = sorted(z.real for z in ins)
    state = _pair_state(K, mid, complex(z_neg), complex(z_pos), cfg)
    if constraint_residual(state, cfg) > CONSTRAINT_TOL:
        return None
    if not cfg.is_chiral and z_neg * z_pos >= 0.0:
        return None
    return state


def bound_dispersion(cfg: CouplingConfig, k_grid, search: BoundSearch | None = None) -> ScanTable:
    """Bound-state records over a K grid; points with no state become holes.

    Fully chiral couplings have the single-component closed form at every K,
    so the grid need not sit inside a gap regime there.
    """
    table = ScanTable(
        metadata={},
        columns=[Column("K"), Column("omega"), Column("z1"), Column("z2"),
                 Column("amp_a"), Column("amp_b")],
    )
    for K in sorted(float(k) for k in k_grid):
        try:
            bs = chiral_bound(K, cfg) if cfg.is_chiral else find_bound_state(K, cfg, search)
        except (NoBoundState, NotInGap):
            table.rows.append((K, None, None, None, None, None))
            continue
        table.rows.append((K, bs.energy, bs.z1.real, bs.z2.real,
                           bs.amp_a.real, bs.amp_b.real))
    return table


def bound_wavefunction(bs: BoundState, delta_max: int) -> np.ndarray:
    """Relative-coordinate amplitudes for D = 1..delta_max, phase-fixed real.

    The global phase is rotated so the largest-magnitude entry is real and
    positive; leftover imaginary parts above tolerance raise NotRealizable.
    """
    if delta_max < 1:
        raise ValueError("delta_max must be at least 1")
    d = np.arange(1, delta_max + 1)
    psi = bs.amp_a * np.power(complex(bs.z1), d) + bs.amp_b * np.power(complex(bs.z2), d)
    lead = psi[np.argmax(np.abs(psi))]
    if abs(lead) > 0.0:
        psi = psi * (abs(lead) / lead)
    worst = float(np.max(np.abs(psi.imag)))
    if worst > REALNESS_TOL:
        raise NotRealizable(f"imaginary residue {worst:.2e} after phase fixing")
    return psi.real.copy()


def _single_state(K: float, z: float, cfg: CouplingConfig) -> BoundState:
    if 1.0 - z * z < 1e-12:
        raise NoBoundState(f"single-component state at z = {z} is delocalized")
    img = ansatz_image(z, K, cfg)
    norm2 = _overlap(z, z).real
    amp = 1.0 / math.sqrt(norm2) if norm2 > 0.0 else 0.0
    return BoundState(
        k_momentum=K,
        energy=img.omega_z.real,
        z1=complex(z),
        z2=0.0j,
        amp_a=complex(amp),
        amp_b=0.0j,
        degenerate=abs(z) < 1e-9,
    )


def special_bound_k0(cfg: CouplingConfig) -> BoundState:
    """Zero-momentum bound state at z = cos(k0), where both leak functions vanish.

    Exists because the free-pair density of states vanishes there; at
    k0 = pi/2 it collapses onto the nearest-neighbor separation and is flagged
    degenerate.
    """
    z = math.cos(cfg.k0)
    bs = _single_state(0.0, z, cfg)
    img = ansatz_image(z, 0.0, cfg)
    if max(abs(img.g_plus), abs(img.g_minus)) > 1e-12:
        raise NoConvergence("leak functions fail to vanish at z = cos(k0)")
    return bs


def chiral_bound(K: float, cfg: CouplingConfig) -> BoundState:
    """Closed-form single-component bound state of a fully chiral coupling."""
    if not cfg.is_chiral:
        raise NotChiral("chiral closed form needs gamma_r = 0 or gamma_l = 0")
    z = math.cos(cfg.k0 + K) if cfg.gamma_r == 0.0 else math.cos(cfg.k0 - K)
    bs = _single_state(K, z, cfg)
    img = ansatz_image(z, K, cfg)
    surviving = img.g_plus if cfg.gamma_r == 0.0 else img.g_minus
    if abs(surviving) > 1e-12:
        raise NoConvergence("surviving leak function fails to vanish")
    return bs

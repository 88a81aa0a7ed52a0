"""Resonance states: localized weight, phase shift, peak shapes and branches.

A resonance candidate has one decaying root z_b plus a propagating pair
e^{+-iq}. The two leak-cancellation constraints fix the localized weight C and
the outgoing phase phi; scanning the weight over energy produces the peak
profiles whose positions and widths trace the resonance branches.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateOmega,
    EmptyRange,
    NoConvergence,
    NotResonanceCandidate,
    SingularSystem,
    UnitarityViolation,
)
from .model import CouplingConfig, gap_region
from . import quartic
from .quartic import classify_roots, solve_reciprocal_quartic
from .spectrum import ansatz_image
from .table import Column, ScanTable

UNITARITY_TOL = 1e-8

# a local maximum only counts as a peak when it tops the larger of its two
# flanking minima by this factor; measuring against flanking minima instead of
# the scan endpoints keeps the non-binding edge divergences of the weight from
# drowning the broad peaks near the crossover momenta
PEAK_PROMINENCE = 1.25

# fraction trimmed off each end of a scan before peak detection, cutting the
# non-binding edge divergences of the localized weight
EDGE_TRIM = 0.01

DEFAULT_WINDOW_POINTS = 2001
PEAK_REFINE_FACTOR = 10

# peaks at adjacent K values continue the same branch when closer than this
BRANCH_JUMP_TOL = 0.25


@dataclass(frozen=True)
class ResonanceSolution:
    """Three-component eigenstate: C |z_b>_N + |e^{iq}> + e^{i phi} |e^{-iq}>."""

    k_momentum: float
    energy: float
    z_b: complex
    q: float
    weight_c: complex
    phase_phi: float


@dataclass(frozen=True)
class ResonanceProfile:
    """Localized weight and unwrapped phase over an energy grid (holes are NaN)."""

    k_momentum: float
    omega_grid: np.ndarray
    c_squared: np.ndarray
    phi_unwrapped: np.ndarray
    z_b_magnitude: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class PeakReport:
    omega_peak: float
    fwhm: float
    quality: str  # "Sharp" | "Broad" | "NoPeak"
    c_squared_peak: float


def solve_resonance(K: float, omega: float, cfg: CouplingConfig) -> ResonanceSolution:
    """Solve the 2x2 leak-cancellation system for C and the outgoing phase.

    The propagating-pair coefficient must come out unit modulus; that is a
    physics check (flux conservation), asserted rather than imposed.
    """
    rs = solve_reciprocal_quartic(K, omega, cfg)
    state = classify_roots(rs)
    if state.kind != "ResonanceCandidate":
        raise NotResonanceCandidate(f"(K={K}, omega={omega}) classifies as {state.kind}")
    tol = quartic.UNIT_CIRCLE_TOL
    z_b = next(z for z, m in zip(rs.roots, rs.magnitudes) if m < 1.0 - tol)
    units = [z for z, m in zip(rs.roots, rs.magnitudes) if abs(m - 1.0) <= tol]
    z_out = max(units, key=lambda z: z.imag)
    q = cmath.phase(z_out)
    if q <= 0.0:
        raise NotResonanceCandidate("propagating pair has no positive-q member")

    nb = math.sqrt(abs(z_b) ** -2 - 1.0)
    img_b = ansatz_image(z_b, K, cfg)
    img_p = ansatz_image(cmath.exp(1j * q), K, cfg)
    img_m = ansatz_image(cmath.exp(-1j * q), K, cfg)
    m00, m01 = nb * img_b.g_plus, img_m.g_plus
    m10, m11 = nb * img_b.g_minus, img_m.g_minus
    det = m00 * m11 - m01 * m10
    scale = max(abs(m00), abs(m01), abs(m10), abs(m11))
    if scale == 0.0 or abs(det) < 1e-14 * scale * scale:
        cond = math.inf if det == 0.0 else scale * scale / abs(det)
        raise SingularSystem(f"constraint system rank deficient (cond ~ {cond:.2e})")
    r0, r1 = -img_p.g_plus, -img_p.g_minus
    c = (r0 * m11 - r1 * m01) / det
    beta = (m00 * r1 - m10 * r0) / det
    if abs(abs(beta) - 1.0) > UNITARITY_TOL:
        raise UnitarityViolation(f"|beta| = {abs(beta)!r} at (K={K}, omega={omega})")
    return ResonanceSolution(k_momentum=K, energy=omega, z_b=z_b, q=q,
                             weight_c=c, phase_phi=cmath.phase(beta))


def resonance_scan(K: float, omega_lo: float, omega_hi: float, points: int,
                   cfg: CouplingConfig) -> ResonanceProfile:
    """Per-point resonance solutions over a uniform energy grid.

    Non-candidate points become NaN holes; the phase is unwrapped by
    continuity within each contiguous valid run. Raises EmptyRange when
    nothing in the range is a resonance candidate.
    """
    if points < 32:
        raise ValueError("points must be at least 32")
    grid = np.linspace(omega_lo, omega_hi, points)
    c2 = np.full(points, np.nan)
    phi = np.full(points, np.nan)
    zb = np.full(points, np.nan)
    qv = np.full(points, np.nan)
    for i, w in enumerate(grid):
        try:
            sol = solve_resonance(K, float(w), cfg)
        except (NotResonanceCandidate, DegenerateOmega, NoConvergence,
                SingularSystem, UnitarityViolation):
            continue
        c2[i] = abs(sol.weight_c) ** 2
        phi[i] = sol.phase_phi
        zb[i] = abs(sol.z_b)
        qv[i] = sol.q
    if not np.isfinite(c2).any():
        raise EmptyRange(f"no resonance candidate in [{omega_lo}, {omega_hi}] at K = {K}")
    phi = _unwrap_runs(phi)
    return ResonanceProfile(k_momentum=K, omega_grid=grid, c_squared=c2,
                            phi_unwrapped=phi, z_b_magnitude=zb, q=qv)


def _unwrap_runs(phi: np.ndarray) -> np.ndarray:
    out = phi.copy()
    valid = np.isfinite(phi)
    i = 0
    n = len(phi)
    while i < n:
        if not valid[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and valid[j + 1]:
            j += 1
        out[i:j + 1] = np.unwrap(phi[i:j + 1])
        i = j + 1
    return out


def _interp_bisect(x: np.ndarray, y: np.ndarray, level: float,
                   a: float, b: float) -> float:
    """Bisect the linearly interpolated profile for y(x) = level on [a, b]."""
    fa = float(np.interp(a, x, y)) - level
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = float(np.interp(mid, x, y)) - level
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def locate_peak(profile: ResonanceProfile) -> PeakReport:
    """Largest interior local maximum of the weight, with its half-height width.

    One percent of each end of the scan is discarded first (edge divergences
    of the weight do not signify binding). The peak must be a strict local
    maximum clearing the larger of its flanking minima by the prominence
    factor; the width is measured where the profile crosses halfway between
    peak and that baseline, falling back to quality Broad when a crossing runs
    into a hole or off the scan.
    """
    grid = profile.omega_grid
    c2 = profile.c_squared
    n = len(grid)
    trim = max(1, int(round(EDGE_TRIM * n)))
    lo, hi = trim, n - trim
    idx = [i for i in range(lo, hi) if math.isfinite(c2[i])]
    if not idx:
        return PeakReport(math.nan, math.nan, "NoPeak", math.nan)
    local = [i for i in idx
             if 0 < i < n - 1
             and math.isfinite(c2[i - 1]) and math.isfinite(c2[i + 1])
             and c2[i] > c2[i - 1] and c2[i] > c2[i + 1]]
    if not local:
        top = max(idx, key=lambda i: c2[i])
        return PeakReport(float(grid[top]), math.nan, "NoPeak", float(c2[top]))
    peak = max(local, key=lambda i: c2[i])
    c2_peak = float(c2[peak])
    left_base = min((float(c2[i]) for i in idx if i < peak), default=c2_peak)
    right_base = min((float(c2[i]) for i in idx if i > peak), default=c2_peak)
    base = max(left_base, right_base)
    if not c2_peak >= PEAK_PROMINENCE * base:
        return PeakReport(float(grid[peak]), math.nan, "NoPeak", c2_peak)

    omega_peak = _parabolic_vertex(grid, c2, peak)
    level = 0.5 * (c2_peak + base)
    left = _walk_to_half(grid, c2, peak, -1, level)
    right = _walk_to_half(grid, c2, peak, +1, level)
    quality = "Sharp"
    if left is None or right is None:
        quality = "Broad"
        left = left if left is not None else float(grid[idx[0]])
        right = right if right is not None else float(grid[idx[-1]])
    return PeakReport(omega_peak=omega_peak, fwhm=right - left,
                      quality=quality, c_squared_peak=c2_peak)


def phase_winding(profile: ResonanceProfile) -> float:
    """Total unwrapped phase change, summed over contiguous valid runs.

    Splitting per run makes the sum insensitive to the arbitrary phase offset
    on either side of a hole, so a full-range scan measures the winding across
    the resonance even when the candidate region is interrupted.
    """
    phi = profile.phi_unwrapped
    valid = np.isfinite(phi)
    total = 0.0
    i, n = 0, len(phi)
    while i < n:
        if not valid[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and valid[j + 1]:
            j += 1
        total += float(phi[j] - phi[i])
        i = j + 1
    return total


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int) -> float:
    """Vertex of the parabola through the peak sample and its two neighbors."""
    h = float(x[i + 1] - x[i])
    y0, y1, y2 = float(y[i - 1]), float(y[i]), float(y[i + 1])
    if not (math.isfinite(y0) and math.isfinite(y2)):
        return float(x[i])
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:
        return float(x[i])
    return float(x[i]) + 0.5 * h * (y0 - y2) / denom


def _walk_to_half(grid: np.ndarray, c2: np.ndarray, peak: int, step: int,
                  half: float) -> float | None:
    i = peak
    while True:
        j = i + step
        if j < 0 or j >= len(grid) or not math.isfinite(c2[j]):
            return None
        if c2[j] < half:
            a, b = (float(grid[j]), float(grid[i])) if step < 0 else (float(grid[i]), float(grid[j]))
            x = grid[min(i, j):max(i, j) + 2]
            y = c2[min(i, j):max(i, j) + 2]
            return _interp_bisect(np.asarray(x, dtype=float), np.asarray(y, dtype=float), half, a, b)
        i = j


def candidate_windows(K: float, cfg: CouplingConfig, probe_points: int = 1601) -> list[tuple[float, float]]:
    """Maximal energy intervals classifying as resonance candidates at K.

    The decaying root is real, and the pair energy restricted to real z in
    (-1, 1) has no poles, so all candidate energies lie in the (finite) range
    of that restriction. That range is probed on a uniform grid and contiguous
    candidate runs are returned.
    """
    zs = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, 801)
    vals = np.array([ansatz_image(float(z), K, cfg).omega_z.real for z in zs])
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo
    grid = np.linspace(lo + 1e-9 * span, hi - 1e-9 * span, probe_points)
    good = np.zeros(len(grid), dtype=bool)
    for i, w in enumerate(grid):
        try:
            rs = solve_reciprocal_quartic(K, float(w), cfg)
            good[i] = classify_roots(rs).kind == "ResonanceCandidate"
        except (DegenerateOmega, NoConvergence):
            continue
    windows: list[tuple[float, float]] = []
    i = 0
    while i < len(grid):
        if not good[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(grid) and good[j + 1]:
            j += 1
        if j > i:
            windows.append((float(grid[i]), float(grid[j])))
        i = j + 1
    return windows


def refined_peak(K: float, window: tuple[float, float], cfg: CouplingConfig,
                 points: int = DEFAULT_WINDOW_POINTS,
                 max_zoom: int = 4) -> tuple[PeakReport, ResonanceProfile]:
    """Scan a window, then zoom onto any detected peak until its width resolves.

    Each zoom re-scans a few widths around the current peak at ten times the
    local density, stopping once the width spans plenty of grid steps. Narrow
    resonances near the branch endpoints need two or three rounds.
    """
    profile = resonance_scan(K, window[0], window[1], points, cfg)
    report = locate_peak(profile)
    for _ in range(max_zoom):
        if report.quality != "Sharp" or not math.isfinite(report.fwhm):
            break
        spacing = float(profile.omega_grid[1] - profile.omega_grid[0])
        if report.fwhm >= 50.0 * spacing:
            break
        pad = max(3.0 * report.fwhm, 2.0 * spacing)
        lo = max(window[0], report.omega_peak - pad)
        hi = min(window[1], report.omega_peak + pad)
        if hi - lo <= 10.0 * spacing / PEAK_REFINE_FACTOR:
            break
        fine = resonance_scan(K, lo, hi, max(201, points // 2), cfg)
        fine_report = locate_peak(fine)
        if fine_report.quality == "NoPeak":
            break
        profile, report = fine, fine_report
    return report, profile


def track_branch_peak(K: float, target_omega: float, cfg: CouplingConfig,
                      points: int = DEFAULT_WINDOW_POINTS) -> tuple[PeakReport, ResonanceProfile]:
    """Refined peak inside the candidate window nearest a target energy.

    Used to follow one branch across K: feed it the previous peak position
    (or the zero-momentum bound energy to pick up the branch that connects
    there).
    """
    windows = candidate_windows(K, cfg)
    if not windows:
        raise EmptyRange(f"no resonance-candidate window at K = {K}")

    def distance(w):
        lo, hi = w
        if lo <= target_omega <= hi:
            return 0.0
        return min(abs(target_omega - lo), abs(target_omega - hi))

    window = min(windows, key=distance)
    return refined_peak(K, window, cfg, points)


def resonance_branches(cfg: CouplingConfig, k_grid,
                       points: int = DEFAULT_WINDOW_POINTS,
                       jump_tol: float = BRANCH_JUMP_TOL) -> ScanTable:
    """Peak positions and widths over K, tagged with continuation branch ids.

    Branch identity is nearest-neighbor continuation in energy across the K
    grid; that is a convention of this scanner, not physics. K values inside
    the gap regime are skipped (bound states live there, not resonances).
    """
    try:
        region = gap_region(cfg)
        in_gap = region.contains
    except Exception:
        in_gap = lambda K: False  # noqa: E731 - chiral couplings have no gap regime
    table = ScanTable(
        metadata={},
        columns=[Column("K"), Column("omega_peak"), Column("fwhm"),
                 Column("quality", "str"), Column("branch_id", "int"),
                 Column("c_squared_peak"), Column("z_b")],
    )
    branches: list[float] = []  # last seen peak energy per branch id
    for K in sorted(float(k) for k in k_grid):
        if in_gap(K):
            continue
        peaks: list[tuple[PeakReport, float]] = []
        for window in candidate_windows(K, cfg):
            report, profile = refined_peak(K, window, cfg, points)
            if report.quality == "NoPeak":
                table.rows.append((K, None, None, "NoPeak", -1,
                                   None if not math.isfinite(report.c_squared_peak)
                                   else report.c_squared_peak, None))
                continue
            i = int(np.nanargmin(np.abs(profile.omega_grid - report.omega_peak)))
            zb = float(profile.z_b_magnitude[i]) if math.isfinite(profile.z_b_magnitude[i]) else None
            peaks.append((report, zb if zb is not None else math.nan))
        for report, zb in sorted(peaks, key=lambda p: p[0].omega_peak):
            best, dist = -1, math.inf
            for bid, last in enumerate(branches):
                d = abs(report.omega_peak - last)
                if d < dist:
                    best, dist = bid, d
            if best >= 0 and dist <= jump_tol:
                branches[best] = report.omega_peak
                bid = best
            else:
                branches.append(report.omega_peak)
                bid = len(branches) - 1
            table.rows.append((K, report.omega_peak, report.fwhm, report.quality,
                               bid, report.c_squared_peak,
                               None if math.isnan(zb) else zb))
    return table

"""Reciprocal-quartic reduction of the pair-energy equation and root classification.

Clearing the two denominators of the pair energy turns it into a palindromic
quartic in z, so roots come in (z, 1/z) pairs and the u = z + 1/z substitution
reduces everything to two quadratics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateOmega, NoConvergence
from .model import CouplingConfig

# |  |z| - 1  | below this counts as a unit-modulus root
UNIT_CIRCLE_TOL = 1e-7

# quartic roots this close to a denominator zero are rejected as spurious
POLE_REJECT_TOL = 1e-9

OMEGA_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class QuarticCoefficients:
    """Descending coefficients of the cleared-denominator quartic (c4 = c0, c3 = c1)."""

    c4: complex
    c3: complex
    c2: complex
    c1: complex
    c0: complex

    def evaluate(self, z: complex) -> complex:
        return (((self.c4 * z + self.c3) * z + self.c2) * z + self.c1) * z + self.c0

    def derivative(self, z: complex) -> complex:
        return ((4.0 * self.c4 * z + 3.0 * self.c3) * z + 2.0 * self.c2) * z + self.c1


@dataclass(frozen=True)
class RootSet:
    """Four quartic roots with their reciprocal pairing, sorted by (|z|, phase)."""

    roots: tuple[complex, complex, complex, complex]
    pairing: tuple[tuple[int, int], tuple[int, int]]
    magnitudes: tuple[float, float, float, float]


@dataclass(frozen=True)
class StateClass:
    """Eigenstate family implied by how many roots sit inside/on the unit circle."""

    kind: str  # "Scattering" | "BoundCandidate" | "ResonanceCandidate" | "Degenerate"
    inside_count: int
    unit_count: int


def quartic_coefficients(K: float, omega: float, cfg: CouplingConfig) -> QuarticCoefficients:
    """Palindromic coefficients; c4 = c0 and c3 = c1 hold exactly by construction."""
    sp, sm = math.sin(cfg.k0 + K), math.sin(cfg.k0 - K)
    cp, cm = math.cos(cfg.k0 + K), math.cos(cfg.k0 - K)
    c3 = -2.0 * (omega * (cp + cm) + cfg.gamma_l * sp + cfg.gamma_r * sm)
    c2 = 2.0 * (omega * (1.0 + 2.0 * cp * cm) + 2.0 * (cfg.gamma_l * sp * cm + cfg.gamma_r * sm * cp))
    return QuarticCoefficients(c4=complex(omega), c3=complex(c3), c2=complex(c2),
                               c1=complex(c3), c0=complex(omega))


def _stable_quadratic(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of x^2 + b x + c = 0, avoiding cancellation in the larger root."""
    disc = cmath.sqrt(b * b - 4.0 * c)
    if abs(b + disc) >= abs(b - disc):
        big = -0.5 * (b + disc)
    else:
        big = -0.5 * (b - disc)
    if big == 0.0:
        return 0.0j, -b
    return big, c / big


def _unit_pair(u: complex) -> tuple[complex, complex]:
    """Solve z^2 - u z + 1 = 0; the pair multiplies to exactly one."""
    r = cmath.sqrt(u * u - 4.0)
    zmax = 0.5 * (u + r) if abs(u + r) >= abs(u - r) else 0.5 * (u - r)
    return zmax, 1.0 / zmax


def _polish(z: complex, co: QuarticCoefficients) -> complex:
    # two guarded Newton steps; skipped near stationary points or when the
    # step is large (near-double roots, where the closed form is kept as is)
    for _ in range(2):
        dp = co.derivative(z)
        if abs(dp) < 1e-14:
            break
        step = co.evaluate(z) / dp
        if abs(step) > 1e-3 * max(1.0, abs(z)):
            break
        z = z - step
    return z


def _pole_points(K: float, cfg: CouplingConfig) -> list[complex]:
    poles = []
    if cfg.gamma_l > 0.0:
        poles += [cmath.exp(1j * (cfg.k0 + K)), cmath.exp(-1j * (cfg.k0 + K))]
    if cfg.gamma_r > 0.0:
        poles += [cmath.exp(1j * (cfg.k0 - K)), cmath.exp(-1j * (cfg.k0 - K))]
    return poles


def solve_reciprocal_quartic(K: float, omega: float, cfg: CouplingConfig,
                             polish: bool = True) -> RootSet:
    """All four roots of the pair-energy quartic at (K, omega).

    Solves u^2 + (c3/w) u + (c2/w - 2) = 0 for u = z + 1/z, then splits each u
    into its reciprocal z pair, with two Newton steps of polishing on the
    quartic. Raises DegenerateOmega near omega = 0 (use solve_zero_energy) and
    NoConvergence when a root fails the residual check or lands on a
    denominator zero.
    """
    if abs(omega) < OMEGA_DEGENERATE_TOL:
        raise DegenerateOmega("quartic reduction divides by omega; use solve_zero_energy")
    co = quartic_coefficients(K, omega, cfg)
    b = co.c3 / omega
    c = co.c2 / omega - 2.0
    u1, u2 = _stable_quadratic(b, c)
    roots = []
    for u in (u1, u2):
        za, zb = _unit_pair(u)
        roots += [za, zb]
    if polish:
        roots = [_polish(z, co) for z in roots]

    scale = 1e-9 * max(1.0, abs(omega))
    for z in roots:
        if abs(co.evaluate(z)) > scale:
            raise NoConvergence(f"root {z!r} residual {abs(co.evaluate(z)):.2e} exceeds {scale:.2e}")
    for z in roots:
        for p in _pole_points(K, cfg):
            if abs(z - p) < POLE_REJECT_TOL:
                raise NoConvergence(f"root {z!r} sits on a denominator zero")

    order = sorted(range(4), key=lambda i: (abs(roots[i]), cmath.phase(roots[i])))
    sorted_roots = [roots[i] for i in order]
    pairing = _pair_reciprocals(sorted_roots)
    return RootSet(
        roots=tuple(sorted_roots),
        pairing=pairing,
        magnitudes=tuple(abs(z) for z in sorted_roots),
    )


def _pair_reciprocals(roots: list[complex]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Perfect matching minimizing |z_i z_j - 1| greedily from the first root."""
    first = min(range(1, 4), key=lambda j: abs(roots[0] * roots[j] - 1.0))
    rest = [j for j in range(1, 4) if j != first]
    pairs = ((0, first), (rest[0], rest[1]))
    for i, j in pairs:
        if abs(roots[i] * roots[j] - 1.0) > 1e-8:
            raise NoConvergence("reciprocal pairing failed beyond tolerance")
    return pairs


def solve_zero_energy(K: float, cfg: CouplingConfig) -> tuple[complex, complex, complex]:
    """Roots of the omega = 0 equation: z = 0 plus a reciprocal quadratic pair.

    At zero energy the quartic degenerates; the cleared-numerator equation is
    z (c3 z^2 + c2 z + c3) = 0 with the omega-free parts of the coefficients.
    """
    co = quartic_coefficients(K, 0.0, cfg)
    if abs(co.c3) < 1e-300:
        raise NoConvergence("zero-energy equation degenerates (sin terms vanish)")
    za, zb = _stable_quadratic(co.c2 / co.c3, complex(1.0))
    return 0.0j, za, zb


def classify_roots(rs: RootSet, tol: float = UNIT_CIRCLE_TOL) -> StateClass:
    """Group a root set by magnitudes against the unit circle.

    All four on the circle: scattering. Two strictly inside: bound candidate.
    One inside plus a unit pair: resonance candidate. Anything else, including
    band-edge double roots, is reported as degenerate.
    """
    inside = sum(1 for m in rs.magnitudes if m < 1.0 - tol)
    unit = sum(1 for m in rs.magnitudes if abs(m - 1.0) <= tol)
    if unit == 4:
        kind = "Scattering"
    elif inside == 2 and unit == 0:
        kind = "BoundCandidate"
    elif inside == 1 and unit == 2:
        kind = "ResonanceCandidate"
    else:
        kind = "Degenerate"
    return StateClass(kind=kind, inside_count=inside, unit_count=unit)

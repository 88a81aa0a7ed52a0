import cmath
import math

import numpy as np
import pytest

from biphoton import (
    CouplingConfig,
    NoBoundState,
    NotBoundCandidate,
    NotChiral,
    NotInGap,
    PoleAtZ,
    ansatz_image,
    bound_determinant,
    bound_dispersion,
    bound_wavefunction,
    chiral_bound,
    constraint_residual,
    continuum_bands,
    find_bound_state,
    gap_region,
    special_bound_k0,
    unit_edge_energies,
)


def random_z(rng, rmax=3.0):
    r = rng.uniform(0.05, rmax)
    return r * cmath.exp(1j * rng.uniform(-math.pi, math.pi))


class TestAnsatzImage:
    def test_all_zero_at_origin(self, cfg_half):
        img = ansatz_image(0.0, 0.7, cfg_half)
        assert img.omega_z == 0 and img.g_plus == 0 and img.g_minus == 0

    def test_real_for_real_argument(self, cfg_half, rng):
        for _ in range(100):
            z = rng.uniform(-0.99, 0.99)
            img = ansatz_image(z, 0.4, cfg_half)
            assert img.omega_z.imag == 0
            assert img.g_plus.imag == 0
            assert img.g_minus.imag == 0

    def test_reciprocal_invariance(self, cfg_half, rng):
        for _ in range(1000):
            z = random_z(rng)
            K = rng.uniform(0, math.pi)
            try:
                a = ansatz_image(z, K, cfg_half).omega_z
                b = ansatz_image(1.0 / z, K, cfg_half).omega_z
            except PoleAtZ:
                continue
            assert abs(a - b) < 1e-10 * max(1.0, abs(a))

    def test_swap_symmetry(self, rng):
        cfg = CouplingConfig(gamma_r=0.3, gamma_l=0.7, k0=1.1)
        swapped = CouplingConfig(gamma_r=0.7, gamma_l=0.3, k0=1.1)
        for _ in range(100):
            z, K = random_z(rng, 0.95), rng.uniform(0, math.pi)
            a = ansatz_image(z, K, cfg)
            b = ansatz_image(z, -K, swapped)
            assert abs(a.omega_z - b.omega_z) < 1e-12 * max(1, abs(a.omega_z))
            assert abs(a.g_plus - b.g_minus) < 1e-12 * max(1, abs(a.g_plus))
            assert abs(a.g_minus - b.g_plus) < 1e-12 * max(1, abs(a.g_minus))

    def test_g_minus_zero_at_cos_root(self, cfg_half):
        K = 0.4
        z = math.cos(1.2 - K)
        assert ansatz_image(z, K, cfg_half).g_minus == 0

    def test_pole_raises(self, cfg_half):
        z = cmath.exp(1j * (1.2 + 0.4))
        with pytest.raises(PoleAtZ):
            ansatz_image(z, 0.4, cfg_half)

    def test_chiral_skips_inactive_pole(self, cfg_right):
        # the k0+K denominator zero is harmless without left movers
        z = cmath.exp(1j * (1.2 + 0.4))
        img = ansatz_image(z, 0.4, cfg_right)
        assert img.g_plus == 0

    def test_unit_edges_closed_form(self, cfg_half):
        K = 0.3
        lo, hi = unit_edge_energies(K, cfg_half)
        expect_hi = 0.5 / math.tan((1.2 + K) / 2) + 0.5 / math.tan((1.2 - K) / 2)
        expect_lo = -0.5 * math.tan((1.2 + K) / 2) - 0.5 * math.tan((1.2 - K) / 2)
        assert hi == pytest.approx(expect_hi, abs=1e-12)
        assert lo == pytest.approx(expect_lo, abs=1e-12)


class TestBoundDeterminant:
    def test_requires_bound_candidate(self, cfg_half):
        with pytest.raises(NotBoundCandidate):
            bound_determinant(1.0, 0.2, cfg_half)

    def test_sign_change_brackets_state(self, cfg_half):
        # determinant flips sign across the bound energy (bracketing works);
        # near the upper window edge the inside pair turns complex and the
        # determinant reports NaN instead of a fake sign
        a = bound_determinant(-2.05, 1.5, cfg_half)
        b = bound_determinant(-1.80, 1.5, cfg_half)
        assert a * b < 0
        window = gap_region(cfg_half).energy_window(1.5)
        near_edge = bound_determinant(window[1] - 0.05, 1.5, cfg_half)
        assert math.isnan(near_edge)

    def test_vanishes_at_bound_energy(self, cfg_half):
        bs = find_bound_state(1.5, cfg_half)
        assert abs(bound_determinant(bs.energy, 1.5, cfg_half)) < 1e-9

    def test_identically_zero_without_right_movers(self, cfg_left, rng):
        # g_minus carries the right-mover rate, so the cancellation
        # determinant vanishes for any two ansatz arguments
        for _ in range(50):
            z1, z2 = rng.uniform(-0.9, 0.9, 2)
            i1 = ansatz_image(z1, 0.8, cfg_left)
            i2 = ansatz_image(z2, 0.8, cfg_left)
            assert i1.g_minus * i2.g_plus - i1.g_plus * i2.g_minus == 0


class TestFindBoundState:
    def test_gap_state_frozen(self, cfg_half):
        bs = find_bound_state(1.5, cfg_half)
        assert bs.energy == pytest.approx(-1.93532231904151, abs=1e-8)
        assert bs.z1.real == pytest.approx(-0.866045958, abs=1e-6)
        assert bs.z2.real == pytest.approx(0.791180471, abs=1e-6)

    def test_state_is_localized_real_opposite(self, cfg_half):
        bs = find_bound_state(1.5, cfg_half)
        assert abs(bs.z1) < 1 and abs(bs.z2) < 1
        assert bs.z1.imag == 0 and bs.z2.imag == 0
        assert bs.z1.real * bs.z2.real < 0
        assert constraint_residual(bs, cfg_half) < 1e-8

    def test_energy_inside_window(self, cfg_half):
        window = gap_region(cfg_half).energy_window(1.5)
        bs = find_bound_state(1.5, cfg_half)
        assert window[0] < bs.energy < window[1]

    def test_unit_norm(self, cfg_half):
        bs = find_bound_state(1.6, cfg_half)
        z1, z2 = bs.z1, bs.z2
        a, b = bs.amp_a, bs.amp_b

        def overlap(x, y):
            return (x.conjugate() * y) / (1 - x.conjugate() * y)

        norm = (abs(a) ** 2 * overlap(z1, z1) + abs(b) ** 2 * overlap(z2, z2)
                + 2 * (a.conjugate() * b * overlap(z1, z2)).real)
        assert norm.real == pytest.approx(1.0, abs=1e-10)

    def test_outside_regime_raises(self, cfg_half):
        with pytest.raises(NotInGap):
            find_bound_state(0.5, cfg_half)
        with pytest.raises(NotInGap):
            find_bound_state(2.5, cfg_half)

    def test_edge_delocalization(self, cfg_half):
        bs = find_bound_state(1.2 + 1e-4, cfg_half)
        assert max(abs(bs.z1), abs(bs.z2)) > 0.99


class TestBoundDispersion:
    def test_gap_exclusivity(self, cfg_half):
        grid = np.linspace(1.3, 1.8, 8)
        table = bound_dispersion(cfg_half, grid)
        assert len(table.rows) == 8
        for row in table.rows:
            K, omega = row[0], row[1]
            assert omega is not None
            for iv in continuum_bands(K, cfg_half):
                assert not iv.contains(omega)

    def test_rows_sorted_and_continuous(self, cfg_half):
        grid = np.linspace(1.31, 1.51, 9)
        table = bound_dispersion(cfg_half, grid)
        ks = [r[0] for r in table.rows]
        assert ks == sorted(ks)
        omegas = [r[1] for r in table.rows]
        steps = np.abs(np.diff(omegas))
        assert steps.max() < 10 * max(np.median(steps), 1e-6)

    def test_empty_grid(self, cfg_half):
        assert bound_dispersion(cfg_half, []).rows == []


class TestBoundWavefunction:
    def test_exponential_envelope(self, cfg_half):
        bs = find_bound_state(1.5, cfg_half)
        psi = bound_wavefunction(bs, 40)
        top = max(abs(bs.z1), abs(bs.z2))
        bound = (abs(bs.amp_a) + abs(bs.amp_b)) * top ** np.arange(1, 41)
        assert np.all(np.abs(psi) <= bound * (1 + 1e-9))

    def test_single_step_is_definition(self, cfg_half):
        bs = find_bound_state(1.5, cfg_half)
        psi = bound_wavefunction(bs, 1)
        direct = bs.amp_a * bs.z1 + bs.amp_b * bs.z2
        assert psi[0] == pytest.approx(abs(direct), abs=1e-12)

    def test_leading_entry_positive(self, cfg_half):
        psi = bound_wavefunction(find_bound_state(1.4, cfg_half), 30)
        assert psi[np.argmax(np.abs(psi))] > 0

    def test_delta_max_validation(self, cfg_half):
        with pytest.raises(ValueError):
            bound_wavefunction(find_bound_state(1.5, cfg_half), 0)


class TestSpecialBoundK0:
    def test_argument_and_energy(self, cfg_half):
        bs = special_bound_k0(cfg_half)
        assert bs.z1.real == pytest.approx(math.cos(1.2), abs=1e-15)
        assert bs.energy == pytest.approx(2.0 / math.tan(1.2), abs=1e-13)
        assert bs.k_momentum == 0.0

    def test_leak_functions_vanish(self, cfg_half):
        bs = special_bound_k0(cfg_half)
        img = ansatz_image(bs.z1, 0.0, cfg_half)
        assert abs(img.g_plus) < 1e-12 and abs(img.g_minus) < 1e-12

    def test_energy_matches_image(self, cfg_half):
        bs = special_bound_k0(cfg_half)
        assert ansatz_image(bs.z1, 0.0, cfg_half).omega_z.real == pytest.approx(bs.energy)

    def test_half_pi_degenerate_flag(self):
        cfg = CouplingConfig.from_chirality(0.5, math.pi / 2)
        bs = special_bound_k0(cfg)
        assert bs.degenerate
        # the normalized state collapses onto the nearest-neighbor separation
        psi = bound_wavefunction(bs, 4)
        assert psi[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(psi[1:]) < 1e-15)

    def test_works_for_any_chirality(self, cfg_quarter):
        # both leak functions carry the same (z - cos k0) factor at K = 0
        bs = special_bound_k0(cfg_quarter)
        img = ansatz_image(bs.z1, 0.0, cfg_quarter)
        assert abs(img.g_plus) < 1e-12 and abs(img.g_minus) < 1e-12


class TestChiralBound:
    def test_left_coupled_closed_form(self, cfg_left):
        bs = chiral_bound(0.3, cfg_left)
        assert bs.z1.real == pytest.approx(math.cos(1.5), abs=1e-15)
        assert bs.energy == pytest.approx(2.0 / math.tan(1.5), abs=1e-13)

    def test_right_coupled_closed_form(self, cfg_right):
        bs = chiral_bound(0.3, cfg_right)
        assert bs.z1.real == pytest.approx(math.cos(1.2 - 0.3), abs=1e-15)

    def test_zero_momentum_agrees_with_special_state(self, cfg_left):
        assert chiral_bound(0.0, cfg_left).z1.real == pytest.approx(math.cos(1.2), abs=1e-15)

    def test_not_chiral_raises(self, cfg_half):
        with pytest.raises(NotChiral):
            chiral_bound(0.3, cfg_half)

    def test_delocalized_edge_rejected(self, cfg_left):
        with pytest.raises(NoBoundState):
            chiral_bound(math.pi - 1.2, cfg_left)  # z = cos(pi) = -1

    def test_surviving_leak_vanishes(self, cfg_left):
        bs = chiral_bound(0.7, cfg_left)
        img = ansatz_image(bs.z1, 0.7, cfg_left)
        assert img.g_plus == 0 and img.g_minus == 0

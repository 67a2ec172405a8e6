import math

import numpy as np
import pytest

from _oracles import gamma_log_psi
from fockzero.errors import DomainPole
from fockzero.lattice import LatticeSpec, distance_grid
from fockzero.verify import (RatioReport, ScanGrid, check_hadamard_correction,
                             check_modified_sigma_distance, check_psi_claim,
                             check_reduction_identity, check_sigma_distance,
                             median_drift, standard_annuli)

SMALL_GRID = ScanGrid(annuli=((1.0, 2.0), (2.0, 5.0), (5.0, 10.0)),
                      points_per_annulus=60, exclusion_radius=0.05, seed=7)


class TestScanGrid:
    def test_annuli_must_increase(self):
        with pytest.raises(ValueError):
            ScanGrid(annuli=((1.0, 3.0), (2.0, 4.0)))

    def test_placement_is_deterministic_and_nested(self):
        coarse = SMALL_GRID
        fine = ScanGrid(annuli=coarse.annuli, points_per_annulus=120,
                        exclusion_radius=0.05, seed=7)
        p_coarse = coarse.points(1)
        p_fine = fine.points(1)
        np.testing.assert_array_equal(p_coarse, p_fine[:60])

    def test_points_land_in_their_annulus(self):
        for i, (r0, r1) in enumerate(SMALL_GRID.annuli):
            r = np.abs(SMALL_GRID.points(i))
            assert np.all((r >= r0) & (r <= r1))

    def test_seeds_give_different_points(self):
        other = ScanGrid(annuli=SMALL_GRID.annuli, points_per_annulus=60,
                         exclusion_radius=0.05, seed=8)
        assert not np.allclose(SMALL_GRID.points(0), other.points(0))

    def test_exclusion_radius_cap(self, unit_spec):
        bad = ScanGrid(annuli=((1.0, 2.0), (2.0, 5.0), (5.0, 10.0)),
                       points_per_annulus=10, exclusion_radius=0.6, seed=1)
        with pytest.raises(ValueError):
            check_sigma_distance(unit_spec, bad)


class TestReports:
    def test_determinism(self, unit_spec):
        a = check_sigma_distance(unit_spec, SMALL_GRID)
        b = check_sigma_distance(unit_spec, SMALL_GRID)
        assert a == b

    def test_exclusion_bookkeeping(self, unit_spec):
        rep = check_sigma_distance(unit_spec, SMALL_GRID)
        expect_excluded = 0
        for i in range(len(SMALL_GRID.annuli)):
            z = SMALL_GRID.points(i)
            d = distance_grid(z, unit_spec, False)
            expect_excluded += int(np.sum(d <= SMALL_GRID.exclusion_radius))
        assert rep.n_points_excluded == expect_excluded
        assert rep.n_points_used + rep.n_points_excluded \
            == 3 * SMALL_GRID.points_per_annulus

    def test_refinement_widens_extremes(self, unit_spec):
        fine_grid = ScanGrid(annuli=SMALL_GRID.annuli, points_per_annulus=120,
                             exclusion_radius=0.05, seed=7)
        coarse = check_sigma_distance(unit_spec, SMALL_GRID)
        fine = check_sigma_distance(unit_spec, fine_grid)
        assert fine.global_max >= coarse.global_max
        assert fine.global_min <= coarse.global_min

    def test_report_invariants(self):
        with pytest.raises(ValueError):
            RatioReport(global_min=0.0, global_max=1.0, per_annulus=(),
                        n_points_used=0, n_points_excluded=0, samples=())
        with pytest.raises(ValueError):
            RatioReport(global_min=1.0, global_max=2.0,
                        per_annulus=((0.0, 1.0, 1.0, 3.0, 4.0),),
                        n_points_used=1, n_points_excluded=0, samples=())

    def test_median_drift_symmetric(self):
        rep = RatioReport(global_min=1.0, global_max=4.0,
                          per_annulus=((0.0, 1.0, 1.0, 2.0, 3.0),
                                       (1.0, 2.0, 1.5, 4.0, 4.0)),
                          n_points_used=4, n_points_excluded=0, samples=())
        assert median_drift(rep, (0.0, 1.0), (1.0, 2.0)) == 2.0
        assert median_drift(rep, (1.0, 2.0), (0.0, 1.0)) == 2.0


class TestModifiedEstimateDrift:
    def test_growth_factor_removal_is_detected(self, unit_spec):
        grid = ScanGrid(annuli=((2.0, 5.0), (5.0, 10.0), (20.0, 25.0)),
                        points_per_annulus=120, exclusion_radius=0.05, seed=7)
        good = check_modified_sigma_distance(unit_spec, grid)
        broken = check_modified_sigma_distance(unit_spec, grid, omit_growth_factor=True)
        span = (20.0, 25.0)
        assert median_drift(good, (5.0, 10.0), span) < 2.0
        assert median_drift(broken, (5.0, 10.0), span) \
            >= (21.0 / 7.5) ** (2 * unit_spec.r_shift) / 3.0


class TestPsiClaim:
    def test_bounded_on_small_scan(self):
        grid = ScanGrid(annuli=((2.0, 8.0), (8.0, 32.0)),
                        points_per_annulus=80, exclusion_radius=0.05, seed=3)
        rep = check_psi_claim(0.5, grid)
        assert rep.global_max / rep.global_min < 100.0


class TestReductionIdentity:
    def test_interior_point(self):
        assert check_reduction_identity(1.6, [-2.3 + 0j]) < 1e-6

    def test_integer_shift_degenerate_tail(self):
        # beta = 0 collapses the shifted factor to the finite product
        assert check_reduction_identity(2.0, [-2.3 + 1.1j, 4.4 + 3.3j]) < 1e-6

    def test_r_equal_one_telescopes(self, tight_policy):
        from fockzero.sigma import psi
        assert check_reduction_identity(1.0, [-1.0 + 0j]) < 1e-6
        assert math.exp(psi(1.0, -1.0, tight_policy).log_mag) \
            == pytest.approx(0.5, abs=1e-9)

    def test_pole_guard(self):
        with pytest.raises(DomainPole):
            check_reduction_identity(1.6, [1.0 + 1e-8j])

    def test_matches_gamma_form(self):
        # both sides also agree with the closed form, independently
        z = -3.7 + 2.2j
        from fockzero.sigma import psi
        v = psi(1.6, z)
        assert v.log_mag == pytest.approx(gamma_log_psi(1.6, z), abs=1e-7)


class TestHadamardCorrection:
    @pytest.mark.parametrize("r_shift", [0.5, 1.0, 1.5, 2.0])
    def test_unit_pitch(self, r_shift):
        spec = LatticeSpec(alpha=math.pi, r_shift=r_shift)
        assert check_hadamard_correction(spec) < 1e-5

    def test_pitch_scaling_is_exact(self):
        m = np.arange(1, 10_001, dtype=np.float64)

        def partial(a, R):
            return 2.0 * float(np.sum(1.0 / (2.0 * (a * (m + R)) ** 2)
                                      - 1.0 / (2.0 * (a * m) ** 2)))

        assert partial(2.0, 0.75) == partial(1.0, 0.75) / 4.0


class TestStandardAnnuli:
    def test_cover_and_scale(self):
        ann = standard_annuli(2.0)
        assert ann[0] == (1.0, 2.0)
        assert ann[-1] == (40.0, 50.0)
        for (a0, a1), (b0, b1) in zip(ann, ann[1:]):
            assert a1 == b0

import math

import numpy as np
import pytest

from fockzero.density import (DensityReport, density_profile,
                              uniform_density_estimate)
from fockzero.errors import InsufficientRadii
from fockzero.lattice import LatticeSpec


@pytest.fixture(scope="module")
def lattice_report(unit_spec):
    return density_profile(unit_spec, False, (8.0, 16.0, 32.0))


class TestDensityProfile:
    def test_boundary_error_band_at_rho_10(self, unit_spec):
        rep = density_profile(unit_spec, False, (10.0,), grid_extent=2.0,
                              grid_step=0.25)
        assert 0.6 <= rep.inf_ratio[0] <= rep.sup_ratio[0] <= 1.4

    def test_two_sets_differ_by_removed_points(self, unit_spec_r1):
        # the R=1 set is the lattice minus two points, so per-center counts
        # differ by at most 2
        rho = 10.0
        plain = density_profile(unit_spec_r1, False, (rho,))
        mod = density_profile(unit_spec_r1, True, (rho,))
        slack = 2.0 / (math.pi * rho * rho)
        assert abs(plain.sup_ratio[0] - mod.sup_ratio[0]) <= slack
        assert abs(plain.inf_ratio[0] - mod.inf_ratio[0]) <= slack

    def test_deviation_shrinks_along_ladder(self, lattice_report):
        dev = [max(abs(s - 1.0), abs(i - 1.0))
               for s, i in zip(lattice_report.sup_ratio,
                               lattice_report.inf_ratio)]
        assert dev[0] > dev[1] > dev[2]

    def test_radius_floor(self, unit_spec):
        with pytest.raises(ValueError):
            density_profile(unit_spec, False, (1.0,))

    def test_grid_step_cap(self, unit_spec):
        with pytest.raises(ValueError):
            density_profile(unit_spec, False, (8.0,), grid_step=1.5)

    def test_lattice_periodicity_of_extremes(self, unit_spec):
        # for the unperturbed lattice the center grid can be folded into one
        # cell without changing the extremes at all
        full = density_profile(unit_spec, False, (8.0,), grid_extent=2.0,
                               grid_step=0.25)
        cell = density_profile(unit_spec, False, (8.0,), grid_extent=0.5,
                               grid_step=0.25)
        assert full.sup_ratio[0] == pytest.approx(cell.sup_ratio[0], abs=1e-12)
        assert full.inf_ratio[0] == pytest.approx(cell.inf_ratio[0], abs=1e-12)


class TestUniformDensityEstimate:
    def test_unit_lattice(self, lattice_report):
        d_plus, d_minus = uniform_density_estimate(lattice_report)
        assert d_plus == pytest.approx(1.0, abs=0.05)
        assert d_minus == pytest.approx(1.0, abs=0.05)
        assert d_plus >= d_minus

    def test_modified_set_keeps_density(self, unit_spec):
        rep = density_profile(unit_spec, True, (8.0, 16.0, 32.0))
        d_plus, d_minus = uniform_density_estimate(rep)
        assert d_plus == pytest.approx(1.0, abs=0.05)
        assert d_minus == pytest.approx(1.0, abs=0.05)

    def test_scaled_lattice_quarter_density(self):
        spec = LatticeSpec.from_pitch(2.0, 0.75)
        a = spec.a
        rep = density_profile(spec, False, (8.0 * a, 16.0 * a, 32.0 * a))
        d_plus, d_minus = uniform_density_estimate(rep)
        assert d_plus == pytest.approx(0.25, abs=0.02)
        assert d_minus == pytest.approx(0.25, abs=0.02)

    def test_needs_three_radii(self, unit_spec):
        rep = density_profile(unit_spec, False, (8.0, 16.0))
        with pytest.raises(InsufficientRadii):
            uniform_density_estimate(rep)


class TestReportValidation:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            DensityReport(rho_ladder=(8.0,), sup_ratio=(0.9,), inf_ratio=(1.1,),
                          center_grid_extent=4.0, center_grid_step=0.25,
                          modified=False)
        with pytest.raises(ValueError):
            DensityReport(rho_ladder=(8.0, 8.0), sup_ratio=(1.0, 1.0),
                          inf_ratio=(1.0, 1.0), center_grid_extent=4.0,
                          center_grid_step=0.25, modified=False)

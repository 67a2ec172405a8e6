import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockzero.errors import InsufficientAnnuli
from fockzero.fock_norm import (NormTrace, QUAD_POLICY, QuadratureSpec,
                                annulus_mass, annulus_mass_checked,
                                dyadic_ladder, growth_exponent, norm_trace,
                                norm_traces, verdict, weighted_integrand)
from fockzero.lattice import LatticeSpec, distance_grid
from fockzero.sigma import weighted_sigma_cell_grid


@pytest.fixture(scope="module")
def dichotomy_traces(unit_spec_r1):
    """One shared quadrature pass for the three textbook exponents."""
    return norm_traces(unit_spec_r1, [2.0, 0.5, 1.0], 32.0)


def annulus_masses(trace):
    return {(r0, r1): m for (r0, r1, m) in trace.annuli}


class TestWeightedIntegrand:
    def test_vanishes_on_modified_set(self, unit_spec_r1):
        assert weighted_integrand(unit_spec_r1, 2.0, 2.0 + 0j) == 0.0
        assert weighted_integrand(unit_spec_r1, 2.0, 3.0 + 1j) == 0.0

    def test_symmetries(self, unit_spec):
        z = 1.3 + 0.7j
        v = weighted_integrand(unit_spec, 2.0, z)
        assert weighted_integrand(unit_spec, 2.0, -z) == v
        assert weighted_integrand(unit_spec, 2.0, z.conjugate()) == v

    def test_positive_p_required(self, unit_spec):
        with pytest.raises(ValueError):
            weighted_integrand(unit_spec, 0.0, 1.5 + 0.5j)

    def test_upper_envelope_from_scan(self, unit_spec_r1):
        # calibrate the two-sided constant on [5, 25], then check z = 10.5
        from fockzero.sigma import weighted_modified_sigma_grid
        rng = np.random.default_rng(2)
        zs = rng.uniform(5, 25, 400) * np.exp(2j * np.pi * rng.uniform(size=400))
        zs = zs[distance_grid(zs, unit_spec_r1, True) > 0.05]
        logw, _, _ = weighted_modified_sigma_grid(unit_spec_r1, zs, QUAD_POLICY)
        vals = np.exp(2.0 * logw)
        envelope = (distance_grid(zs, unit_spec_r1, True) ** 2
                    / (1.0 + np.abs(zs)) ** 4)
        c_max = float(np.max(vals / envelope))
        z = 10.5 + 0.0j
        lhs = weighted_integrand(unit_spec_r1, 2.0, z)
        d = float(distance_grid([z], unit_spec_r1, True)[0])
        assert lhs <= c_max * d ** 2 / (1.0 + abs(z)) ** 4 * (1.0 + 1e-9)


class TestAnnulusMass:
    def test_empty_annulus(self, unit_spec):
        assert annulus_mass(unit_spec, 2.0, 3.0, 3.0) == 0.0

    def test_additivity_under_repartition(self, unit_spec_r1):
        quad = QuadratureSpec()
        total = annulus_mass(unit_spec_r1, 2.0, 0.0, 4.0, quad)
        # radial splits at panel-commensurate points reuse the same nodes
        split = (annulus_mass(unit_spec_r1, 2.0, 0.0, 1.5, quad)
                 + annulus_mass(unit_spec_r1, 2.0, 1.5, 4.0, quad))
        assert split == pytest.approx(total, rel=1e-10)

    def test_self_convergence_on_4_8(self, unit_spec_r1):
        mass, refined, flag = annulus_mass_checked(unit_spec_r1, 2.0, 4.0, 8.0)
        assert abs(mass - refined) / refined < 0.01
        assert not flag

    def test_angular_offset_independence(self, unit_spec_r1):
        base = annulus_mass(unit_spec_r1, 2.0, 2.0, 4.0)
        rot = annulus_mass(unit_spec_r1, 2.0, 2.0, 4.0, theta_offset=0.811)
        assert abs(rot - base) / base < 0.02

    def test_quadrature_spec_resolution_floor(self):
        with pytest.raises(ValueError):
            QuadratureSpec(radial_step=0.2)
        with pytest.raises(ValueError):
            QuadratureSpec(angular_step=0.126)


class TestNormTrace:
    def test_ladder_shape(self, unit_spec):
        ladder = dyadic_ladder(unit_spec, 32.0)
        assert ladder == [(0.0, 1.0), (1.0, 2.0), (2.0, 4.0), (4.0, 8.0),
                          (8.0, 16.0), (16.0, 32.0)]

    def test_rho_max_floor(self, unit_spec):
        with pytest.raises(ValueError):
            norm_trace(unit_spec, 2.0, 2.0)

    def test_cumulative_is_running_sum(self, dichotomy_traces):
        tr = dichotomy_traces[2.0]
        masses = [m for (_, _, m) in tr.annuli]
        np.testing.assert_allclose(tr.cumulative, np.cumsum(masses))

    def test_convergent_case_ratio(self, dichotomy_traces):
        m = annulus_masses(dichotomy_traces[2.0])
        ratio = m[(16.0, 32.0)] / m[(8.0, 16.0)]
        assert abs(ratio - 0.25) <= 0.1
        tail = [m[(4.0, 8.0)], m[(8.0, 16.0)], m[(16.0, 32.0)]]
        assert tail == sorted(tail, reverse=True)

    def test_divergent_case_ratio(self, dichotomy_traces):
        m = annulus_masses(dichotomy_traces[0.5])
        ratio = m[(16.0, 32.0)] / m[(8.0, 16.0)]
        assert abs(ratio - 2.0) <= 0.4
        tail = [m[(4.0, 8.0)], m[(8.0, 16.0)], m[(16.0, 32.0)]]
        assert tail == sorted(tail)

    def test_borderline_case_ratio(self, dichotomy_traces):
        m = annulus_masses(dichotomy_traces[1.0])
        ratio = m[(16.0, 32.0)] / m[(8.0, 16.0)]
        assert abs(ratio - 1.0) <= 0.2

    def test_single_p_matches_multi(self, unit_spec_r1):
        # the shared-integrand multi-p pass must reproduce the single-p path
        multi = norm_traces(unit_spec_r1, [2.0, 0.5], 8.0)
        solo = norm_trace(unit_spec_r1, 2.0, 8.0)
        assert solo.annuli == multi[2.0].annuli

    def test_trace_validation(self):
        with pytest.raises(ValueError):
            NormTrace(p=2.0, annuli=((0.0, 1.0, -1.0),), cumulative=(-1.0,))
        with pytest.raises(ValueError):
            NormTrace(p=2.0, annuli=((0.0, 1.0, 1.0), (2.0, 4.0, 1.0)),
                      cumulative=(1.0, 2.0))


class TestGrowthExponent:
    def test_dichotomy_slopes(self, dichotomy_traces):
        assert growth_exponent(dichotomy_traces[2.0]) \
            == pytest.approx(-2.0, abs=0.3)
        assert growth_exponent(dichotomy_traces[0.5]) \
            == pytest.approx(1.0, abs=0.3)
        assert abs(growth_exponent(dichotomy_traces[1.0])) < 0.3

    def test_exact_power_law(self):
        annuli = []
        r = 1.0
        while r < 64.0:
            rg = math.sqrt(r * 2.0 * r)
            annuli.append((r, 2.0 * r, rg ** -3.0))
            r *= 2.0
        trace = NormTrace(p=2.0, annuli=tuple(annuli),
                          cumulative=tuple(np.cumsum([a[2] for a in annuli])))
        assert growth_exponent(trace, fit_radius=4.0) \
            == pytest.approx(-3.0, abs=1e-9)

    @given(exponent=st.floats(-4.0, 4.0), scale=st.floats(0.1, 10.0))
    @settings(max_examples=25, deadline=None)
    def test_scaling_leaves_exponent_alone(self, exponent, scale):
        annuli = []
        r = 1.0
        while r < 128.0:
            rg = math.sqrt(2.0) * r
            annuli.append((r, 2.0 * r, rg ** exponent))
            r *= 2.0
        def build(c):
            rows = tuple((r0, r1, c * m) for (r0, r1, m) in annuli)
            return NormTrace(p=1.0, annuli=rows,
                             cumulative=tuple(np.cumsum([m for _, _, m in rows])))
        base = growth_exponent(build(1.0), fit_radius=4.0)
        scaled = growth_exponent(build(scale), fit_radius=4.0)
        assert scaled == pytest.approx(base, abs=1e-9)
        assert base == pytest.approx(exponent, abs=1e-9)

    def test_insufficient_annuli(self, unit_spec):
        trace = NormTrace(p=2.0, annuli=((0.0, 1.0, 1.0), (1.0, 2.0, 1.0)),
                          cumulative=(1.0, 2.0))
        with pytest.raises(InsufficientAnnuli):
            growth_exponent(trace, fit_radius=4.0)

    def test_verdict_bands(self):
        assert verdict(-2.0) == "convergent"
        assert verdict(1.0) == "divergent"
        assert verdict(0.1) == "borderline"
        assert verdict(-0.29) == "borderline"


class TestIntegrandConsistency:
    def test_quadrature_polices_agree_with_scan_policy(self, unit_spec_r1):
        # the loose quadrature truncation stays within its error budget
        rng = np.random.default_rng(9)
        zs = rng.uniform(1, 30, 64) * np.exp(2j * np.pi * rng.uniform(size=64))
        coarse, cerr, _ = weighted_sigma_cell_grid(unit_spec_r1, zs, QUAD_POLICY)
        from fockzero.sigma import TruncationPolicy
        fine, _, _ = weighted_sigma_cell_grid(unit_spec_r1, zs,
                                              TruncationPolicy(16, 1e-10, 12))
        assert np.max(np.abs(coarse - fine) - cerr) <= 0.0

"""Named acceptance checks: one registry drives `verify` and the test suite.

Each group runs a family of related assertions at pinned tolerances and
returns per-assertion results plus the tabular data behind them (one CSV
table per scan or trace).  Groups whose statement pins its own parameters
(the membership dichotomy at R=1, the identity ladder, the R=1 zero
placement) ignore the configured row shift; the R-parametric scans use it.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .density import density_profile, uniform_density_estimate
from .fock_norm import QUAD_POLICY, growth_exponent, norm_traces
from .lattice import (LatticeSpec, counting_function, distance_grid,
                      lattice_point, points_in_disk)
from .sigma import (TruncationPolicy, log_modified_sigma_direct,
                    log_modified_sigma_direct_grid, log_modified_sigma_ratio,
                    log_sigma, log_sigma_grid, log_weighted_sigma,
                    m_r_constant, psi, ratio_log_product_grid,
                    weighted_modified_sigma_grid, weighted_sigma_cell_grid)
from .verify import (SCAN_POLICY, ScanGrid, check_hadamard_correction,
                     check_modified_sigma_distance, check_psi_claim, check_ratio_product,
                     check_reduction_identity, check_sigma_distance,
                     median_drift, standard_annuli)

__all__ = ["CheckResult", "GroupOutput", "GROUPS", "run_group", "run_all"]

POL_DIRECT = TruncationPolicy(m_min=16, tol=1e-5, max_doublings=12)
POL_PERIOD = TruncationPolicy(m_min=16, tol=2e-6, max_doublings=12)
POL_TIGHT = TruncationPolicy(m_min=16, tol=1e-8, max_doublings=12)
POL_COARSE = TruncationPolicy(m_min=8, tol=1e-3, max_doublings=12)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: str
    passed: bool


@dataclass(frozen=True)
class GroupOutput:
    name: str
    results: tuple
    tables: dict
    elapsed: float


def _result(name, value, bound, passed):
    return CheckResult(name=name, value=float(value), bound=bound,
                       passed=bool(passed))


def _scan_table(report):
    header = ("r_in", "r_out", "z_re", "z_im", "ratio")
    return header, list(report.samples)


def _scan_grid(spec, seed, points=300):
    return ScanGrid(annuli=standard_annuli(spec.a), points_per_annulus=points,
                    exclusion_radius=0.05 * spec.a, seed=seed)


# --------------------------------------------------------------------------
# criterion 1: membership dichotomy at desk scale
# --------------------------------------------------------------------------

def run_norm_dichotomy(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = LatticeSpec(alpha=config.alpha, r_shift=1.0)
    rho_max = 32.0 * spec.a
    traces = norm_traces(spec, [2.0, 0.5], rho_max, config.quadrature_spec(),
                         config.policy(QUAD_POLICY))
    slope_p2 = growth_exponent(traces[2.0])
    slope_q = growth_exponent(traces[0.5])
    elapsed = time.time() - t0

    rows = []
    for p, tr in sorted(traces.items()):
        for (r0, r1, m), c in zip(tr.annuli, tr.cumulative):
            rows.append((p, r0, r1, m, float(c)))
    results = (
        _result("dichotomy_exponent_p2", slope_p2, "in [-2.3, -1.7]",
                -2.3 <= slope_p2 <= -1.7),
        _result("dichotomy_exponent_q0.5", slope_q, "in [0.7, 1.3]",
                0.7 <= slope_q <= 1.3),
        _result("dichotomy_runtime_s", elapsed, "< 120", elapsed < 120.0),
    )
    tables = {"norm_dichotomy": (("p", "r_in", "r_out", "mass", "cumulative"),
                                 rows)}
    return GroupOutput("norm_dichotomy", results, tables, elapsed)


# --------------------------------------------------------------------------
# criteria 2 and 3: the two-sided estimates, with negative control
# --------------------------------------------------------------------------

def run_modified_sigma_distance(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    a = spec.a
    grid = _scan_grid(spec, config.seed)
    rep = check_modified_sigma_distance(spec, grid, SCAN_POLICY)
    neg = check_modified_sigma_distance(spec, grid, SCAN_POLICY, omit_growth_factor=True)
    elapsed = time.time() - t0

    spread = rep.global_max / rep.global_min
    drift = median_drift(rep, (5.0 * a, 10.0 * a), (20.0 * a, 25.0 * a))
    neg_drift = median_drift(neg, (5.0 * a, 10.0 * a), (20.0 * a, 25.0 * a))
    results = (
        _result("modified_sigma_distance_points_used", rep.n_points_used, ">= 2000",
                rep.n_points_used >= 2000),
        _result("modified_sigma_distance_spread", spread, "<= 1e3", spread <= 1e3),
        _result("modified_sigma_distance_median_drift", drift, "<= 3", drift <= 3.0),
        _result("modified_sigma_distance_negative_control_drift", neg_drift, ">= 3",
                neg_drift >= 3.0),
        _result("modified_sigma_distance_runtime_s", elapsed, "< 60", elapsed < 60.0),
    )
    tables = {"modified_sigma_distance": _scan_table(rep),
              "modified_sigma_distance_negative_control": _scan_table(neg)}
    return GroupOutput("modified_sigma_distance", results, tables, elapsed)


def run_sigma_distance(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    a = spec.a
    rep = check_sigma_distance(spec, _scan_grid(spec, config.seed), SCAN_POLICY)
    elapsed = time.time() - t0
    spread = rep.global_max / rep.global_min
    drift = median_drift(rep, (5.0 * a, 10.0 * a), (20.0 * a, 25.0 * a))
    results = (
        _result("sigma_distance_spread", spread, "<= 50", spread <= 50.0),
        _result("sigma_distance_median_drift", drift, "<= 2", drift <= 2.0),
    )
    return GroupOutput("sigma_distance", results,
                       {"sigma_distance": _scan_table(rep)}, elapsed)


def run_ratio_product(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    grid = _scan_grid(spec, config.seed)
    rep = check_ratio_product(spec, grid, SCAN_POLICY)
    spread = rep.global_max / rep.global_min

    # cross identity: the three certified log-ratios cancel pointwise
    zs = np.concatenate([grid.points(i) for i in range(len(grid.annuli))])
    keep = (np.minimum(distance_grid(zs, spec, False),
                       distance_grid(zs, spec, True))
            > grid.exclusion_radius)
    zs = zs[keep]
    wsig, _, _ = weighted_sigma_cell_grid(spec, zs, SCAN_POLICY)
    wmod, _, _ = weighted_modified_sigma_grid(spec, zs, SCAN_POLICY)
    prod, _, _, _ = ratio_log_product_grid(spec, zs, SCAN_POLICY)
    d0 = np.log(distance_grid(zs, spec, False))
    d1 = np.log(distance_grid(zs, spec, True))
    grow = 2.0 * spec.r_shift * np.log1p(np.abs(zs))
    lhs = wmod + grow - d1
    rhs = (wsig - d0) + (prod - d1 + d0 + grow)
    cross = float(np.max(np.abs(lhs - rhs)))
    elapsed = time.time() - t0

    results = (
        _result("ratio_product_spread", spread, "<= 1e3", spread <= 1e3),
        _result("ratio_product_cross_identity", cross, "<= 1e-6",
                cross <= 1e-6),
    )
    return GroupOutput("ratio_product", results,
                       {"ratio_product": _scan_table(rep)}, elapsed)


def run_psi_claim(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    r_shift = 0.5
    grid = ScanGrid(annuli=((2.0, 4.0), (4.0, 8.0), (8.0, 16.0),
                            (16.0, 32.0), (32.0, 64.0)),
                    points_per_annulus=300, exclusion_radius=0.05,
                    seed=config.seed)
    rep = check_psi_claim(r_shift, grid, SCAN_POLICY)
    spread = rep.global_max / rep.global_min

    def axis_ratio(zs):
        zs = np.asarray(zs, dtype=np.complex128)
        from .sigma import psi_log_grid
        val, _ = psi_log_grid(r_shift, zs, SCAN_POLICY)
        m_plus = np.maximum(np.round(zs.real), 0.0)
        d_plus = np.abs(zs - m_plus)
        m_r = np.maximum(np.round(zs.real - r_shift), 0.0)
        d_r = np.abs(zs - (m_r + r_shift))
        return np.exp(val - (np.log(d_r) - np.log(d_plus)
                             - r_shift * np.log1p(np.abs(zs))))

    neg = axis_ratio([-4.0, -8.0, -16.0])
    imag = axis_ratio([4.0j, 8.0j, 16.0j])
    flat_neg = float(np.max(neg) / np.min(neg))
    flat_imag = float(np.max(imag) / np.min(imag))
    elapsed = time.time() - t0

    results = (
        _result("psi_claim_spread", spread, "<= 1e2", spread <= 100.0),
        _result("psi_claim_negative_axis_flat", flat_neg, "<= 1.5",
                flat_neg <= 1.5),
        _result("psi_claim_imaginary_axis_flat", flat_imag, "<= 1.5",
                flat_imag <= 1.5),
    )
    return GroupOutput("psi_claim", results,
                       {"psi_claim": _scan_table(rep)}, elapsed)


# --------------------------------------------------------------------------
# criterion 4: two-method equivalence
# --------------------------------------------------------------------------

def _seeded_disk_points(seed, n, radius, min_axis_distance, a):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        if abs(z) > radius:
            continue
        if np.hypot(z.real - a * round(z.real / a), z.imag) <= min_axis_distance:
            continue
        out.append(z)
    return np.array(out)


def run_two_method(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    zs = _seeded_disk_points(config.seed, 100, 10.0 * spec.a,
                             0.01 * spec.a, spec.a)
    direct, derr, _ = log_modified_sigma_direct_grid(spec, zs, POL_DIRECT)
    base, berr, _ = log_sigma_grid(spec, zs, SCAN_POLICY)
    prod, perr, _, _ = ratio_log_product_grid(spec, zs, SCAN_POLICY)
    ratio = base + prod
    rerr = berr + perr
    excess = np.abs(direct - ratio) - (derr + rerr)
    worst = float(np.max(excess))
    elapsed = time.time() - t0

    rows = [(z.real, z.imag, float(d), float(r), float(abs(d - r)),
             float(e1 + e2))
            for z, d, r, e1, e2 in zip(zs, direct, ratio, derr, rerr)]
    results = (
        _result("two_method_max_excess", worst, "<= 1e-6", worst <= 1e-6),
    )
    tables = {"two_method": (("z_re", "z_im", "log_direct", "log_ratio",
                              "abs_diff", "err_sum"), rows)}
    return GroupOutput("two_method", results, tables, elapsed)


# --------------------------------------------------------------------------
# criterion 5: exact identities
# --------------------------------------------------------------------------

def run_identities(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    rows = []

    psi_zero = max(abs(psi(r, 0.0, POL_TIGHT).log_mag)
                   for r in (0.25, 0.5, 0.9, 1.0))
    rows.append(("psi_at_zero_max_abs_log", psi_zero))

    psi_m1 = 0.0
    for r in (0.25, 0.5, 0.9, 1.0):
        got = math.exp(psi(r, -1.0, POL_TIGHT).log_mag)
        psi_m1 = max(psi_m1, abs(got - 1.0 / (1.0 + r)))
        rows.append((f"psi_at_minus_one_R{r}", got))

    rng = np.random.default_rng(config.seed + 1)
    pts = []
    while len(pts) < 20:
        z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        if min(abs(z - k) for k in range(1, 19)) > 1e-3:
            pts.append(z)
    red = check_reduction_identity(1.6, np.array(pts), POL_TIGHT)
    rows.append(("reduction_identity_R1.6_max_log_err", red))

    m1 = abs(m_r_constant(1.0, 1e-10) - 1.0)
    m2 = abs(m_r_constant(2.0, 1e-10) - 1.25)
    rows.append(("m_r_1_abs_err", m1))
    rows.append(("m_r_2_abs_err", m2))

    ladder = [m_r_constant(0.25 * k, 1e-10) for k in range(1, 17)]
    mono = min(b - a for a, b in zip(ladder, ladder[1:]))

    had = 0.0
    for r in (0.5, 1.0, 1.5, 2.0):
        e = check_hadamard_correction(LatticeSpec(alpha=config.alpha, r_shift=r))
        had = max(had, e)
        rows.append((f"hadamard_R{r}_abs_err", e))
    elapsed = time.time() - t0

    results = (
        _result("psi_at_zero_exact", psi_zero, "= 0", psi_zero == 0.0),
        _result("psi_at_minus_one_max_err", psi_m1, "<= 1e-6", psi_m1 <= 1e-6),
        _result("reduction_identity_max_err", red, "<= 1e-6", red <= 1e-6),
        _result("m_r_telescoping_max_err", max(m1, m2), "<= 1e-9",
                max(m1, m2) <= 1e-9),
        _result("m_r_strictly_increasing_min_gap", mono, "> 0", mono > 0),
        _result("hadamard_partial_sum_max_err", had, "<= 1e-5", had <= 1e-5),
    )
    tables = {"identities": (("name", "value"), rows)}
    return GroupOutput("identities", results, tables, elapsed)


# --------------------------------------------------------------------------
# criterion 6: symmetries
# --------------------------------------------------------------------------

def run_symmetries(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    a = spec.a
    pol = TruncationPolicy(m_min=16, tol=1e-6, max_doublings=12)

    zs = _seeded_disk_points(config.seed + 2, 12, 6.0 * a, 0.05 * a, a)
    mismatches = 0
    conj_dev = 0.0
    for z in zs:
        for fn in (log_sigma, log_modified_sigma_direct,
                   log_modified_sigma_ratio):
            v = fn(spec, z, pol).log_mag
            if v != fn(spec, -z, pol).log_mag:
                mismatches += 1
            conj_dev = max(conj_dev,
                           abs(v - fn(spec, z.conjugate(), pol).log_mag))

    zp = _seeded_disk_points(config.seed + 3, 50, 10.0 * a, 0.0, a)
    per_dev = 0.0
    rows = []
    for z in zp:
        w0 = log_weighted_sigma(spec, z, POL_PERIOD)
        w1 = log_weighted_sigma(spec, z + a, POL_PERIOD)
        d = abs(w0.log_mag - w1.log_mag)
        per_dev = max(per_dev, d)
        rows.append((z.real, z.imag, w0.log_mag, w1.log_mag, d))
    elapsed = time.time() - t0

    results = (
        _result("negation_bitwise_mismatches", mismatches, "= 0",
                mismatches == 0),
        _result("conjugation_max_dev", conj_dev, "<= 1e-12",
                conj_dev <= 1e-12),
        _result("periodicity_max_dev", per_dev, "<= 1e-6", per_dev <= 1e-6),
    )
    tables = {"symmetries": (("z_re", "z_im", "log_w_at_z", "log_w_at_z_plus_a",
                              "abs_diff"), rows)}
    return GroupOutput("symmetries", results, tables, elapsed)


# --------------------------------------------------------------------------
# criterion 7: density condition
# --------------------------------------------------------------------------

def run_density(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    alpha = config.alpha
    target = alpha / math.pi
    rows = []
    results = []
    estimates = {}
    for label, r_shift, modified in (("lattice", 0.75, False),
                                     ("modified_R0.75", 0.75, True),
                                     ("modified_R1", 1.0, True)):
        spec = LatticeSpec(alpha=alpha, r_shift=r_shift)
        a = spec.a
        rep = density_profile(spec, modified, (8.0 * a, 16.0 * a, 32.0 * a))
        dp, dm = uniform_density_estimate(rep)
        estimates[label] = (dp, dm)
        extreme_ok = True
        for rho, s, i in zip(rep.rho_ladder, rep.sup_ratio, rep.inf_ratio):
            bound = target * 4.0 * a / rho
            extreme_ok &= abs(s - target) <= bound and abs(i - target) <= bound
            rows.append((label, rho, s, i))
        rel = max(abs(dp / target - 1.0), abs(dm / target - 1.0))
        results.append(_result(f"density_{label}_rel_err", rel, "<= 0.05",
                               rel <= 0.05))
        results.append(_result(f"density_{label}_extremes", float(extreme_ok),
                               "|ratio-a/pi| <= 4a/rho", extreme_ok))
    base = estimates["lattice"]
    pert = max(abs(estimates["modified_R0.75"][k] - base[k]) for k in (0, 1))
    results.append(_result("density_perturbation_invariance", pert, "<= 0.02",
                           pert <= 0.02))
    elapsed = time.time() - t0
    tables = {"density": (("set", "rho", "sup_ratio", "inf_ratio"), rows)}
    return GroupOutput("density", results=tuple(results), tables=tables,
                       elapsed=elapsed)


# --------------------------------------------------------------------------
# criterion 8: counting exactness
# --------------------------------------------------------------------------

def _brute_count(spec, center, rho, modified):
    half = math.ceil((abs(center) + rho) / spec.a) + math.ceil(spec.r_shift) + 3
    n = 0
    for m in range(-half, half + 1):
        for k in range(-half, half + 1):
            if abs(lattice_point(spec, (m, k), modified) - center) < rho:
                n += 1
    return n


def run_counting(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = config.lattice_spec()
    rng = np.random.default_rng(config.seed + 4)
    mismatches = 0
    rows = []
    for i in range(100):
        center = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        rho = float(rng.uniform(0.3, 20.0)) * spec.a
        modified = bool(i % 2)
        got = counting_function(spec, center, rho, modified)
        want = _brute_count(spec, center, rho, modified)
        mismatches += int(got != want)
        rows.append((center.real, center.imag, rho, int(modified), got, want))
    elapsed = time.time() - t0
    results = (
        _result("counting_mismatches", mismatches, "= 0", mismatches == 0),
    )
    tables = {"counting": (("c_re", "c_im", "rho", "modified", "counted",
                            "brute"), rows)}
    return GroupOutput("counting", results, tables, elapsed)


# --------------------------------------------------------------------------
# criterion 9: zero-set placement for the removed-points case
# --------------------------------------------------------------------------

def run_zero_placement(config: RunConfig) -> GroupOutput:
    t0 = time.time()
    spec = LatticeSpec(alpha=config.alpha, r_shift=1.0)
    a = spec.a
    offset = 1e-9 * a * (1.0 + 1.0j) / math.sqrt(2.0)
    zeros = points_in_disk(spec, 0.0, 5.0 * a + 1e-9, modified=True).points

    near = np.array([z + offset for z in zeros])
    vals, _, _ = log_modified_sigma_direct_grid(spec, near, POL_COARSE)
    wnear = vals - 0.5 * spec.alpha * np.abs(near) ** 2
    worst_near = float(np.max(wnear))

    rng = np.random.default_rng(config.seed + 5)
    far = []
    while len(far) < 60:
        z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5)) * a
        if abs(z) <= 5.0 * a and distance_grid([z], spec, True)[0] >= 0.3 * a:
            far.append(z)
    far = np.array(far)
    wfar, _, _ = weighted_modified_sigma_grid(spec, far, POL_COARSE)
    worst_far = float(np.min(wfar))

    at_one = log_modified_sigma_direct(spec, 1.0 * a, POL_COARSE)
    at_two = log_modified_sigma_direct(spec, 2.0 * a, POL_COARSE)
    elapsed = time.time() - t0

    rows = ([("near_zero", z.real, z.imag, float(w)) for z, w in zip(near, wnear)]
            + [("far", z.real, z.imag, float(w)) for z, w in zip(far, wfar)])
    results = (
        _result("zero_placement_near_max_log", worst_near, "< -20",
                worst_near < -20.0),
        _result("zero_placement_far_min_log", worst_far, "> -5",
                worst_far > -5.0),
        _result("zero_placement_finite_at_1", float(not at_one.at_zero),
                "finite", not at_one.at_zero),
        _result("zero_placement_zero_at_2", float(at_two.at_zero), "at_zero",
                at_two.at_zero),
    )
    tables = {"zero_placement": (("kind", "z_re", "z_im", "weighted_log"),
                                 rows)}
    return GroupOutput("zero_placement", results, tables, elapsed)


GROUPS = (
    ("counting", run_counting),
    ("identities", run_identities),
    ("sigma_distance", run_sigma_distance),
    ("modified_sigma_distance", run_modified_sigma_distance),
    ("ratio_product", run_ratio_product),
    ("psi_claim", run_psi_claim),
    ("two_method", run_two_method),
    ("symmetries", run_symmetries),
    ("density", run_density),
    ("zero_placement", run_zero_placement),
    ("norm_dichotomy", run_norm_dichotomy),
)


def run_group(name: str, config: RunConfig) -> GroupOutput:
    for gname, fn in GROUPS:
        if gname == name:
            return fn(config)
    raise KeyError(f"unknown check group {name!r}")


def run_all(config: RunConfig, names=None):
    """Run the selected groups (all by default) in registry order."""
    selected = [g for g, _ in GROUPS] if names is None else list(names)
    return [run_group(g, config) for g in selected]

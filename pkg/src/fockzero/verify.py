"""Ratio scans certifying the two-sided estimates and exact identities.

A comparability claim between two positive quantities is certified here at
finite scale by two statistics over a quasi-random annulus scan: bounded
global spread of the pointwise ratio, and no monotone drift of per-annulus
medians.  Boundedness alone cannot separate a true two-sided bound from a
slow power drift at finite range, which is why every scan reports both and
why the harness includes a deliberately broken variant (growth factor
omitted) as a negative control for the drift statistic.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainPole
from .lattice import LatticeSpec, distance_grid
from ._util import annulus_points, map_ordered
from .sigma import (TruncationPolicy, DEFAULT_POLICY, m_r_constant,
                    psi_log_grid, ratio_log_product_grid,
                    weighted_modified_sigma_grid, weighted_sigma_cell_grid)

__all__ = [
    "ScanGrid",
    "RatioReport",
    "standard_annuli",
    "check_sigma_distance",
    "check_modified_sigma_distance",
    "check_psi_claim",
    "check_ratio_product",
    "check_reduction_identity",
    "check_hadamard_correction",
    "median_drift",
    "SCAN_POLICY",
]

SCAN_POLICY = TruncationPolicy(m_min=8, tol=1e-6, max_doublings=12)


def standard_annuli(scale: float = 1.0):
    """Default scan ladder covering [0.5, 25] pitch units."""
    edges = [0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0]
    return tuple((scale * a, scale * b) for a, b in zip(edges, edges[1:]))


@dataclass(frozen=True)
class ScanGrid:
    """Quasi-random scan layout: annuli, points per annulus, exclusion, seed.

    Placement is a seeded R2 low-discrepancy sequence per annulus (area
    uniform), so scans are deterministic and refinements are supersets.
    """

    annuli: tuple
    points_per_annulus: int = 300
    exclusion_radius: float = 0.05
    seed: int = 7

    def __post_init__(self):
        if self.points_per_annulus < 1:
            raise ValueError("points_per_annulus must be >= 1")
        if self.exclusion_radius < 0:
            raise ValueError("exclusion_radius must be >= 0")
        last = 0.0
        for (r0, r1) in self.annuli:
            if not (r0 >= last and r0 < r1):
                raise ValueError("annuli must be disjoint and increasing")
            last = r1

    def points(self, annulus_index: int) -> np.ndarray:
        r0, r1 = self.annuli[annulus_index]
        return annulus_points(r0, r1, self.points_per_annulus,
                              self.seed, annulus_index)


@dataclass(frozen=True)
class RatioReport:
    """Spread statistics of a positive pointwise ratio across the scan."""

    global_min: float
    global_max: float
    per_annulus: tuple     # ((r_in, r_out, min, median, max), ...)
    n_points_used: int
    n_points_excluded: int
    samples: tuple         # ((r_in, r_out, z_re, z_im, ratio), ...)

    def __post_init__(self):
        if not self.global_min > 0:
            raise ValueError("ratios must be strictly positive")
        for (_, _, lo, med, hi) in self.per_annulus:
            if not (self.global_min <= med <= self.global_max and lo <= med <= hi):
                raise ValueError("per-annulus medians must sit inside the spread")


def _build_report(grid: ScanGrid, kept_masks, log_ratios) -> RatioReport:
    per = []
    samples = []
    used = 0
    excluded = 0
    gmin = math.inf
    gmax = -math.inf
    for i, (r0, r1) in enumerate(grid.annuli):
        keep = kept_masks[i]
        z = grid.points(i)[keep]
        ratios = np.exp(log_ratios[i])
        used += int(keep.sum())
        excluded += int((~keep).sum())
        if ratios.size == 0:
            continue
        lo = float(np.min(ratios))
        hi = float(np.max(ratios))
        med = float(np.median(ratios))
        per.append((r0, r1, lo, med, hi))
        gmin = min(gmin, lo)
        gmax = max(gmax, hi)
        for zz, rr in zip(z, ratios):
            samples.append((r0, r1, float(zz.real), float(zz.imag), float(rr)))
    return RatioReport(global_min=gmin, global_max=gmax, per_annulus=tuple(per),
                       n_points_used=used, n_points_excluded=excluded,
                       samples=tuple(samples))


def _scan(grid: ScanGrid, exclusion_distance, log_ratio_fn,
          pitch: float = 1.0) -> RatioReport:
    """Run one ratio scan: place points, exclude, evaluate, reduce."""
    if not grid.exclusion_radius < pitch / 2.0:
        raise ValueError("exclusion_radius must stay below half the pitch")

    def one(i):
        z = grid.points(i)
        keep = exclusion_distance(z) > grid.exclusion_radius
        return keep, log_ratio_fn(z[keep])

    rows = map_ordered(one, range(len(grid.annuli)))
    return _build_report(grid, [r[0] for r in rows], [r[1] for r in rows])


def check_sigma_distance(spec: LatticeSpec, grid: ScanGrid,
                         policy: TruncationPolicy = SCAN_POLICY) -> RatioReport:
    """Weighted unperturbed magnitude against distance to the lattice."""
    def log_ratio(z):
        val, _, _ = weighted_sigma_cell_grid(spec, z, policy)
        return val - np.log(distance_grid(z, spec, False))

    return _scan(grid, lambda z: distance_grid(z, spec, False), log_ratio,
                 pitch=spec.a)


def check_modified_sigma_distance(spec: LatticeSpec, grid: ScanGrid,
                 policy: TruncationPolicy = SCAN_POLICY,
                 omit_growth_factor: bool = False) -> RatioReport:
    """Weighted modified magnitude against d(z, modified set)/(1+|z|)^(2R).

    With omit_growth_factor the (1+|z|)^(2R) normalization is dropped; the
    resulting median drift across annuli is the negative control for the
    drift detector.
    """
    def log_ratio(z):
        val, _, _ = weighted_modified_sigma_grid(spec, z, policy)
        out = val - np.log(distance_grid(z, spec, True))
        if not omit_growth_factor:
            out = out + 2.0 * spec.r_shift * np.log1p(np.abs(z))
        return out

    return _scan(grid, lambda z: distance_grid(z, spec, True), log_ratio,
                 pitch=spec.a)


def check_ratio_product(spec: LatticeSpec, grid: ScanGrid,
                        policy: TruncationPolicy = SCAN_POLICY) -> RatioReport:
    """Row-comparison product against d(z,L_R)/(d(z,L)(1+|z|)^(2R)).

    Points must stay away from a*Z, where the product has poles; the
    exclusion therefore uses the distance to the union of both row sets.
    """
    def excl(z):
        # both sides vanish on the respective sets; stay clear of their union
        return np.minimum(distance_grid(z, spec, False),
                          distance_grid(z, spec, True))

    def log_ratio(z):
        prod, _, _, pole = ratio_log_product_grid(spec, z, policy)
        if np.any(pole):
            raise DomainPole("scan point inside the a*Z pole guard")
        rhs = (np.log(distance_grid(z, spec, True))
               - np.log(distance_grid(z, spec, False))
               - 2.0 * spec.r_shift * np.log1p(np.abs(z)))
        return prod - rhs

    return _scan(grid, excl, log_ratio, pitch=spec.a)


def _dist_to_nonneg_integers(z: np.ndarray, shift: float) -> np.ndarray:
    """Distance to {m + shift : m = 0, 1, 2, ...} by bracketing Re z."""
    m = np.maximum(np.round(z.real - shift), 0.0)
    return np.abs(z - (m + shift))


def check_psi_claim(r_shift: float, grid: ScanGrid,
                    policy: TruncationPolicy = SCAN_POLICY) -> RatioReport:
    """Half-row product against d(z,Z+_R)/(d(z,Z+)(1+|z|)^R).

    Z+ includes 0 and Z+_R = {m + R : m in Z+}; over scan annuli bounded
    away from the origin the inclusion of 0 only moves the ratio by a
    bounded factor.
    """
    def excl(z):
        return np.minimum(_dist_to_nonneg_integers(z, 0.0),
                          _dist_to_nonneg_integers(z, r_shift))

    def log_ratio(z):
        val, _ = psi_log_grid(r_shift, z, policy)
        rhs = (np.log(_dist_to_nonneg_integers(z, r_shift))
               - np.log(_dist_to_nonneg_integers(z, 0.0))
               - r_shift * np.log1p(np.abs(z)))
        return val - rhs

    return _scan(grid, excl, log_ratio)


def check_reduction_identity(r_shift: float, sample_points,
                             policy: TruncationPolicy = SCAN_POLICY) -> float:
    """Integer-part factorization of the half-row product, as a max log error.

    psi_R(z) = psi_beta(z - [R]) * prod_{m=1..[R]} (m + beta)/|m - z| with
    beta = R - [R]; exact, so the returned maximum is truncation noise.
    """
    if not r_shift >= 1.0:
        raise ValueError("reduction identity applies for R >= 1")
    z = np.atleast_1d(np.asarray(sample_points, dtype=np.complex128))
    whole = int(math.floor(r_shift))
    beta = r_shift - whole
    for k in list(range(1, whole + 1)):
        if np.any(np.abs(z - k) < 1e-6):
            raise DomainPole(f"sample point within 1e-6 of {k}")
    k_max = 2 * int(np.max(np.abs(z))) + 2
    for k in range(1, k_max + 1):
        if np.any(np.abs(z - k) < 1e-6):
            raise DomainPole(f"sample point within 1e-6 of the pole at {k}")

    lhs, _ = psi_log_grid(r_shift, z, policy)
    rhs, _ = psi_log_grid(beta, z - whole, policy)
    for m in range(1, whole + 1):
        rhs = rhs + math.log(m + beta) - np.log(np.abs(z - m))
    return float(np.max(np.abs(lhs - rhs)))


def check_hadamard_correction(spec: LatticeSpec,
                              m_terms: int = 10_000,
                              tol: float = 1e-12) -> float:
    """Row-curvature partial sum against -M_R/a^2, as an absolute error.

    Sum over 0 < |m| <= m_terms of (1/(2 w_m^2) - 1/(2 z_m^2)) converges to
    -M_R/a^2; returns |partial + M_R/a^2| at the requested cutoff.
    """
    a = spec.a
    R = spec.r_shift
    m = np.arange(1, m_terms + 1, dtype=np.float64)
    # both signs of m contribute equally (squares), hence the factor 2
    partial = 2.0 * float(np.sum(1.0 / (2.0 * (a * (m + R)) ** 2)
                                 - 1.0 / (2.0 * (a * m) ** 2)))
    return abs(partial + m_r_constant(R, tol) / a ** 2)


def median_drift(report: RatioReport, inner: tuple, outer: tuple) -> float:
    """Ratio (>= 1) between the medians of two named annuli."""
    med = {(r0, r1): m for (r0, r1, _, m, _) in report.per_annulus}
    a = med[inner]
    b = med[outer]
    return max(a / b, b / a)

"""Norm mass of the modified product over dyadic annuli, and the growth fit.

The p-th power norm is the integral of |f|^p against the Gaussian measure
(p*alpha/2/pi) exp(-(p*alpha/2)|z|^2) dA.  Restricted to an annulus this is
a smooth positive integrand (continuous zeros at the shifted lattice), so a
midpoint product rule in polar coordinates resolves it once the panels are
finer than the lattice-cell oscillation.  Whether the total converges as
the outer radius grows is decided by fitting a power law to the dyadic
annulus masses: negative slope means a convergent tail (the zero set is
accepted), positive means divergence.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientAnnuli, QuadratureUnderResolved
from .lattice import LatticeSpec
from ._util import map_ordered
from .sigma import TruncationPolicy, weighted_modified_sigma_grid

__all__ = [
    "QuadratureSpec",
    "NormTrace",
    "weighted_integrand",
    "annulus_mass",
    "annulus_mass_checked",
    "norm_trace",
    "norm_traces",
    "growth_exponent",
    "verdict",
    "QUAD_POLICY",
]

# quadrature accuracy is limited by panel size, not truncation; keep the
# per-node product truncation well below the panel error
QUAD_POLICY = TruncationPolicy(m_min=8, tol=1e-4, max_doublings=12)

FIT_RADIUS_FACTOR = 4.0   # fit only annuli with r_in >= 4a (empirical onset)
VERDICT_BAND = 0.3        # |slope| below this is reported as borderline


@dataclass(frozen=True)
class QuadratureSpec:
    """Polar midpoint-rule panel targets, in units of the lattice pitch.

    Both steps must be at most 1/8 of the pitch so the lattice-cell
    oscillation of the distance factor is resolved by >= 8 panels.
    """

    radial_step: float = 0.125
    angular_step: float = 0.125

    def __post_init__(self):
        for name, v in (("radial_step", self.radial_step),
                        ("angular_step", self.angular_step)):
            if not 0 < v <= 0.125 + 1e-12:
                raise ValueError(f"{name} must be in (0, 1/8] of the pitch, got {v}")


@dataclass(frozen=True)
class NormTrace:
    """Annulus masses of the p-norm integral plus running totals."""

    p: float
    annuli: tuple          # ((r_in, r_out, mass), ...)
    cumulative: tuple
    under_resolved: tuple = None  # advisory flags, present when checked

    def __post_init__(self):
        for (r0, r1, m) in self.annuli:
            if m < 0:
                raise ValueError("annulus masses must be nonnegative")
            if not r0 < r1:
                raise ValueError("annuli must have r_in < r_out")
        for k in range(1, len(self.annuli)):
            if self.annuli[k][0] != self.annuli[k - 1][1]:
                raise ValueError("annulus ladder must be contiguous")


def weighted_integrand(spec: LatticeSpec, p: float, z: complex,
                       policy: TruncationPolicy = QUAD_POLICY) -> float:
    """|sigma_{a,R}(z)|^p e^{-p alpha |z|^2 / 2}, formed in log space."""
    if not p > 0:
        raise ValueError("p must be > 0")
    val, _, _ = weighted_modified_sigma_grid(spec, [z], policy)
    return float(np.exp(p * val[0]))


def _annulus_nodes(spec: LatticeSpec, r_in: float, r_out: float,
                   quad: QuadratureSpec, theta_offset: float):
    """Midpoint nodes and area weights (r dr dtheta) covering the annulus."""
    a = spec.a
    n_r = max(1, math.ceil((r_out - r_in) / (quad.radial_step * a)))
    n_t = max(8, math.ceil(2.0 * math.pi * r_out / (quad.angular_step * a)))
    dr = (r_out - r_in) / n_r
    dt = 2.0 * math.pi / n_t
    r = r_in + (np.arange(n_r) + 0.5) * dr
    t = theta_offset + (np.arange(n_t) + 0.5) * dt
    z = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    w = (r[:, None] * dr * dt + np.zeros((1, n_t))).ravel()
    return z, w


def annulus_mass(spec: LatticeSpec, p: float, r_in: float, r_out: float,
                 quad: QuadratureSpec = QuadratureSpec(),
                 policy: TruncationPolicy = QUAD_POLICY,
                 theta_offset: float = 0.0) -> float:
    """Midpoint-rule mass of the p-norm integral over the annulus."""
    if not p > 0:
        raise ValueError("p must be > 0")
    if not 0 <= r_in <= r_out:
        raise ValueError("need 0 <= r_in <= r_out")
    if r_in == r_out:
        return 0.0
    z, w = _annulus_nodes(spec, r_in, r_out, quad, theta_offset)
    logw, _, _ = weighted_modified_sigma_grid(spec, z, policy)
    pref = p * spec.alpha / (2.0 * math.pi)
    return float(pref * np.sum(np.exp(p * logw) * w))


def annulus_mass_checked(spec, p, r_in, r_out, quad=QuadratureSpec(),
                         policy=QUAD_POLICY):
    """Mass plus a resolution advisory from a 2x-refined comparison run.

    Returns (mass, refined_mass, under_resolved); the advisory trips when
    refinement moves the result by more than 5 percent.  Advisory only,
    never fatal.
    """
    mass = annulus_mass(spec, p, r_in, r_out, quad, policy)
    fine = QuadratureSpec(radial_step=quad.radial_step / 2.0,
                          angular_step=quad.angular_step / 2.0)
    refined = annulus_mass(spec, p, r_in, r_out, fine, policy)
    scale = max(abs(refined), np.finfo(float).tiny)
    flagged = bool(abs(mass - refined) / scale > 0.05)
    if flagged:
        warnings.warn(
            f"annulus [{r_in:g}, {r_out:g}] moved by "
            f"{abs(mass - refined) / scale:.1%} under 2x refinement",
            QuadratureUnderResolved, stacklevel=2)
    return mass, refined, flagged


def dyadic_ladder(spec: LatticeSpec, rho_max: float):
    """Core disk [0, a] then doubling annuli [a,2a], [2a,4a], ... up to rho_max."""
    a = spec.a
    ladder = [(0.0, a)]
    r = a
    while 2.0 * r <= rho_max * (1.0 + 1e-12):
        ladder.append((r, 2.0 * r))
        r *= 2.0
    return ladder


def norm_traces(spec: LatticeSpec, p_list, rho_max: float,
                quad: QuadratureSpec = QuadratureSpec(),
                policy: TruncationPolicy = QUAD_POLICY,
                check_resolution: bool = False) -> dict:
    """Traces for several exponents sharing one integrand evaluation pass.

    The expensive part (the weighted log-magnitude at each quadrature node)
    does not depend on p, so all requested exponents reuse it.
    """
    p_list = [float(p) for p in p_list]
    if not p_list:
        raise ValueError("need at least one exponent")
    for p in p_list:
        if not p > 0:
            raise ValueError("exponents must be > 0")
    if not rho_max >= 4.0 * spec.a:
        raise ValueError("rho_max must be at least 4a")
    ladder = dyadic_ladder(spec, rho_max)

    def one_annulus(ring):
        r_in, r_out = ring
        z, w = _annulus_nodes(spec, r_in, r_out, quad, 0.0)
        logw, _, _ = weighted_modified_sigma_grid(spec, z, policy)
        masses = []
        for p in p_list:
            pref = p * spec.alpha / (2.0 * math.pi)
            masses.append(float(pref * np.sum(np.exp(p * logw) * w)))
        flags = None
        if check_resolution:
            flags = []
            fine = QuadratureSpec(radial_step=quad.radial_step / 2.0,
                                  angular_step=quad.angular_step / 2.0)
            zf, wf = _annulus_nodes(spec, r_in, r_out, fine, 0.0)
            logf, _, _ = weighted_modified_sigma_grid(spec, zf, policy)
            for p, mass in zip(p_list, masses):
                pref = p * spec.alpha / (2.0 * math.pi)
                refined = float(pref * np.sum(np.exp(p * logf) * wf))
                scale = max(abs(refined), np.finfo(float).tiny)
                flag = abs(mass - refined) / scale > 0.05
                if flag:
                    warnings.warn(
                        f"p={p:g} annulus [{r_in:g}, {r_out:g}] moved by "
                        f"{abs(mass - refined) / scale:.1%} under 2x refinement",
                        QuadratureUnderResolved, stacklevel=2)
                flags.append(flag)
        return masses, flags

    rows = map_ordered(one_annulus, ladder)
    out = {}
    for i, p in enumerate(p_list):
        annuli = tuple((r0, r1, rows[k][0][i]) for k, (r0, r1) in enumerate(ladder))
        cum = tuple(np.cumsum([m for (_, _, m) in annuli]))
        flags = None
        if check_resolution:
            flags = tuple(rows[k][1][i] for k in range(len(ladder)))
        out[p] = NormTrace(p=p, annuli=annuli, cumulative=cum,
                           under_resolved=flags)
    return out


def norm_trace(spec: LatticeSpec, p: float, rho_max: float,
               quad: QuadratureSpec = QuadratureSpec(),
               policy: TruncationPolicy = QUAD_POLICY,
               check_resolution: bool = False) -> NormTrace:
    """Dyadic-ladder masses and cumulative sums for a single exponent."""
    return norm_traces(spec, [p], rho_max, quad, policy, check_resolution)[float(p)]


def growth_exponent(trace: NormTrace, fit_radius: float = None) -> float:
    """Least-squares slope of log(mass) against log(geometric mean radius).

    Only annuli beyond the fit radius (default 4a, in trace units the
    ladder is already pitch-scaled) enter the fit; at least three are
    required.
    """
    if fit_radius is None:
        r1 = trace.annuli[1][1] - trace.annuli[1][0] if len(trace.annuli) > 1 else 1.0
        # ladder step [a, 2a] has width a; recover the pitch from it
        fit_radius = FIT_RADIUS_FACTOR * r1
    pts = [(math.sqrt(r0 * r1), m) for (r0, r1, m) in trace.annuli
           if r0 >= fit_radius * (1.0 - 1e-12) and r0 > 0]
    if len(pts) < 3:
        raise InsufficientAnnuli(
            f"need >= 3 annuli beyond radius {fit_radius:g}, have {len(pts)}")
    lr = np.log([r for r, _ in pts])
    lm = np.log([m for _, m in pts])
    return float(np.polyfit(lr, lm, 1)[0])


def verdict(exponent: float, band: float = VERDICT_BAND) -> str:
    """Convergent / divergent / borderline classification of the fitted slope."""
    if exponent <= -band:
        return "convergent"
    if exponent >= band:
        return "divergent"
    return "borderline"

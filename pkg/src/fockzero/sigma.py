"""Log-space evaluation of the lattice Weierstrass-type products.

Everything here returns log-magnitudes: the Gaussian weight alone
overflows doubles near |z| ~ 27 (alpha = pi), so no evaluator ever forms
|product| directly.

Truncation strategy, shared by all evaluators: partial sums over
concentric square index boxes (or index prefixes, for the one-dimensional
products) are taken at doubling checkpoints m_min, m_min*2, m_min*4, ...
and Richardson-extrapolated.  Over the symmetric boxes used here all odd
powers of z/w cancel exactly and the partial-sum error is c(z)/M^2, so a
single extrapolation step leaves O(1/M^3); the one-dimensional products
carry 1/M and 1/M^2 tails and get two steps.  Convergence is declared when
the extrapolated value moves less than the policy tolerance between
checkpoints; err_est is that last movement plus a small analytic cap on
the next-order tail.

Index terms are grouped into sign-symmetric quadruples before summation,
so value(z) == value(-z) and value(conj z) == value(z) hold bit-for-bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainPole, TruncationNotConverged
from .lattice import LatticeSpec, distance_grid
from ._util import kahan_add, map_ordered

__all__ = [
    "TruncationPolicy",
    "WeightedLogValue",
    "log_sigma",
    "log_weighted_sigma",
    "log_modified_sigma_direct",
    "log_modified_sigma_ratio",
    "psi",
    "m_r_constant",
    "DEFAULT_POLICY",
]

_CHUNK = 1 << 21   # max elements per (points x indices) working array
_ZCHUNK = 4096     # max points processed per inner batch


@dataclass(frozen=True)
class TruncationPolicy:
    """Adaptive-truncation control for the infinite products."""

    m_min: int = 16
    tol: float = 1e-8
    max_doublings: int = 10

    def __post_init__(self):
        if self.m_min < 8:
            raise ValueError("m_min must be >= 8")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not 1 <= self.max_doublings <= 16:
            raise ValueError("max_doublings must be in 1..16")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class WeightedLogValue:
    """A log-magnitude with truncation-error estimate; -inf marks a zero."""

    log_mag: float
    err_est: float
    at_zero: bool

    def __post_init__(self):
        neg_inf = math.isinf(self.log_mag) and self.log_mag < 0
        if self.at_zero != neg_inf:
            raise ValueError("at_zero must hold exactly when log_mag = -inf")
        if not self.at_zero and not math.isfinite(self.err_est):
            raise ValueError("err_est must be finite off the zero set")

    @classmethod
    def zero(cls) -> "WeightedLogValue":
        return cls(log_mag=-math.inf, err_est=0.0, at_zero=True)


def _map_z_chunks(fn, z, n_out):
    """Apply fn to <=_ZCHUNK slices of z and concatenate the output arrays.

    Chunk boundaries are fixed by position, so results do not depend on
    the worker count.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if z.size <= _ZCHUNK:
        return fn(z)
    chunks = [z[i:i + _ZCHUNK] for i in range(0, z.size, _ZCHUNK)]
    outs = map_ordered(fn, chunks)
    return tuple(np.concatenate([o[k] for o in outs]) for k in range(n_out))


# ---------------------------------------------------------------------------
# box-sum kernels
# ---------------------------------------------------------------------------

def _pair_log_abs(ur, ui):
    """log(|1-u| * |1+u|) from one fused log1p per pair.

    |1-u|^2 |1+u|^2 = (1+|u|^2)^2 - 4 (Re u)^2; the argument is even in
    both components, so the value is bitwise invariant under u -> -u and
    u -> conj(u).  The fused form loses everything once one factor drops
    below ~1e-4; there the direct differences 1 -+ ur are exact (Sterbenz)
    and hypot recovers the value.
    """
    ur2 = ur * ur
    uu = ur2 + ui * ui
    arg = (2.0 * uu + uu * uu) - 4.0 * ur2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 0.5 * np.log1p(arg)
    near = arg < -1.0 + 1e-8
    if np.any(near):
        with np.errstate(divide="ignore"):
            out = np.where(
                near,
                np.log(np.hypot(1.0 - ur, ui) * np.hypot(1.0 + ur, ui)),
                out)
    return out


def _pair_logs(ur, ui):
    """Log-magnitude of the (u, -u) factor pair, genus-2 normalized.

    log|1-u| + log|1+u| + Re(u^2); the linear exponent terms of the pair
    cancel identically and are never formed.
    """
    return _pair_log_abs(ur, ui) + (ur * ur - ui * ui)


def _quad_terms(x, y, a, m, n):
    """Summed terms of the index quadruple {(m,n),(-m,-n),(m,-n),(-m,n)}.

    x, y have shape (nz, 1); m, n shape (nq,).  Grouping the four points
    keeps the result bitwise invariant under z -> -z and z -> conj(z).
    """
    inv = 1.0 / (a * (m * m + n * n))
    xm = x * (m * inv)
    yn = y * (n * inv)
    ym = y * (m * inv)
    xn = x * (n * inv)
    return _pair_logs(xm + yn, ym - xn) + _pair_logs(xm - yn, ym + xn)


def _axis_terms(x, y, a, k, r_shift=None):
    """Real-row and imaginary-row pair terms for representatives k >= 1.

    With r_shift set, the real-row linear factors sit at a(k+r_shift) while
    the quadratic normalization keeps the unshifted a*k.
    """
    inv = 1.0 / (a * k)
    if r_shift is None:
        real_row = _pair_logs(x * inv, y * inv)
    else:
        invw = 1.0 / (a * (k + r_shift))
        xq = x * inv
        yq = y * inv
        real_row = (_pair_log_abs(x * invw, y * invw)
                    + (xq * xq - yq * yq))
    imag_row = _pair_logs(y * inv, x * inv)
    return real_row + imag_row


def _rect_sum(x, y, a, m_lo, m_hi, n_lo, n_hi, out, comp):
    """Kahan-accumulate quad terms for m in [m_lo,m_hi], n in [n_lo,n_hi]."""
    nz = x.shape[0]
    n_count = n_hi - n_lo + 1
    if n_count <= 0 or m_hi < m_lo:
        return
    rows = max(1, _CHUNK // max(1, nz * n_count))
    n_idx = np.arange(n_lo, n_hi + 1, dtype=np.float64)
    for m0 in range(m_lo, m_hi + 1, rows):
        m1 = min(m0 + rows - 1, m_hi)
        mm, nn = np.meshgrid(np.arange(m0, m1 + 1, dtype=np.float64),
                             n_idx, indexing="ij")
        terms = _quad_terms(x, y, a, mm.ravel(), nn.ravel())
        kahan_add(out, comp, terms.sum(axis=1))


def _block_sum(x, y, a, k_lo, k_hi, r_shift=None):
    """Sum of all product-term logs over box rings k_lo < max(|m|,|n|) <= k_hi."""
    x = x[:, None]
    y = y[:, None]
    out = np.zeros(x.shape[0])
    comp = np.zeros(x.shape[0])
    # two rectangles of quadruple representatives cover the ring range
    _rect_sum(x, y, a, k_lo + 1, k_hi, 1, k_hi, out, comp)
    _rect_sum(x, y, a, 1, k_lo, k_lo + 1, k_hi, out, comp)
    ks = np.arange(k_lo + 1, k_hi + 1, dtype=np.float64)
    kahan_add(out, comp, _axis_terms(x, y, a, ks, r_shift).sum(axis=1))
    return out


def _box_log_magnitude(spec: LatticeSpec, z: np.ndarray, modified: bool,
                       policy: TruncationPolicy):
    """Accelerated box sums of log|product| for z not on the zero set.

    Returns (value, err_est, m_final) arrays; value includes the leading
    log|z| factor.
    """
    z = np.asarray(z, dtype=np.complex128)
    nz = z.size
    a = spec.a
    row = spec.r_shift if modified else None
    x = np.ascontiguousarray(z.real)
    y = np.ascontiguousarray(z.imag)

    totals = np.zeros(nz)
    comps = np.zeros(nz)
    s_last = np.zeros(nz)
    a_last = np.zeros(nz)
    val = np.full(nz, np.nan)
    err = np.full(nz, np.nan)
    m_fin = np.zeros(nz, dtype=np.int64)

    active = np.arange(nz)
    k_prev = 0
    for j in range(policy.max_doublings + 1):
        k_now = policy.m_min << j
        block = _block_sum(x[active], y[active], a, k_prev, k_now, row)
        t = totals[active]
        c = comps[active]
        kahan_add(t, c, block)
        totals[active] = t
        comps[active] = c
        s_now = totals[active]
        a_now = s_now if j == 0 else s_now + (s_now - s_last[active]) / 3.0
        if j >= 2:
            delta = np.abs(a_now - a_last[active])
            done = delta < policy.tol
            idx = active[done]
            val[idx] = a_now[done]
            err[idx] = delta[done] + (np.abs(z[idx]) / a) ** 4 / float(k_now) ** 3
            m_fin[idx] = k_now
            s_last[active] = s_now
            a_last[active] = a_now
            active = active[~done]
        else:
            s_last[active] = s_now
            a_last[active] = a_now
        k_prev = k_now
        if active.size == 0:
            break

    if active.size:
        worst = float(np.max(np.abs(z[active])))
        raise TruncationNotConverged(
            f"{active.size} point(s) above tol={policy.tol:g} after "
            f"{policy.max_doublings} doublings (max |z| = {worst:g})",
            tol=policy.tol, m_final=k_prev)

    return val + np.log(np.abs(z)), err, m_fin


def _batch_with_zero_mask(spec, z, modified, policy):
    def run(zc):
        zero = distance_grid(zc, spec, modified) == 0.0
        val = np.full(zc.shape, -np.inf)
        err = np.zeros(zc.shape)
        if np.any(~zero):
            v, e, _ = _box_log_magnitude(spec, zc[~zero], modified, policy)
            val[~zero] = v
            err[~zero] = e
        return val, err, zero

    return _map_z_chunks(run, z, 3)


def log_sigma_grid(spec: LatticeSpec, z, policy: TruncationPolicy = DEFAULT_POLICY):
    """Vectorized log|sigma_a|; returns (log_mag, err_est, at_zero) arrays."""
    return _batch_with_zero_mask(spec, z, False, policy)


def log_modified_sigma_direct_grid(spec: LatticeSpec, z,
                                   policy: TruncationPolicy = DEFAULT_POLICY):
    """Vectorized direct box sums of log|sigma_{a,R}|."""
    return _batch_with_zero_mask(spec, z, True, policy)


# ---------------------------------------------------------------------------
# fundamental-cell fast path for the weighted unperturbed function
# ---------------------------------------------------------------------------

def reduce_to_cell(spec: LatticeSpec, z):
    """Translate each z by its nearest lattice point into the central cell."""
    z = np.asarray(z, dtype=np.complex128)
    a = spec.a
    return ((z.real - a * np.round(z.real / a))
            + 1j * (z.imag - a * np.round(z.imag / a)))


def weighted_sigma_cell_grid(spec: LatticeSpec, z,
                             policy: TruncationPolicy = DEFAULT_POLICY):
    """log|sigma_a(z)| - (alpha/2)|z|^2 via exact lattice periodicity.

    The weighted magnitude is invariant under translation by lattice points
    (the pitch a = sqrt(pi/alpha) makes the quasi-period factors cancel the
    Gaussian exactly), so the box sum only ever sees cell-sized arguments.
    Agreement with direct summation is itself a tested invariant.
    """
    def run(zc):
        z0 = reduce_to_cell(spec, zc)
        zero = z0 == 0.0
        val = np.full(zc.shape, -np.inf)
        err = np.zeros(zc.shape)
        if np.any(~zero):
            v, e, _ = _box_log_magnitude(spec, z0[~zero], False, policy)
            val[~zero] = v - 0.5 * spec.alpha * np.abs(z0[~zero]) ** 2
            err[~zero] = e
        return val, err, zero

    return _map_z_chunks(run, z, 3)


# ---------------------------------------------------------------------------
# one-dimensional products
# ---------------------------------------------------------------------------

def _next_pow2(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(1.0, n))))


def _guard_neg_inf(arr, template):
    mask = np.isneginf(template)
    if np.any(mask):
        arr = np.where(mask, -np.inf, arr)
    return arr


def _accelerated_1d(term_sum, m_start, policy, order_one_tail):
    """Shared driver for the adaptive one-dimensional products.

    term_sum(m_lo, m_hi) returns per-point sums of terms m_lo..m_hi (1-based,
    inclusive).  With order_one_tail the tail is c1/M + c2/M^2 and two
    extrapolation steps are applied; otherwise c/M^2 and one step.  Points
    that land exactly on a zero of the product go to -inf and count as
    converged.  Returns (value, last_change, m_final).
    """
    raw = []
    first = []
    second = []
    m_prev = 0
    for j in range(policy.max_doublings + 1):
        m_now = m_start << j
        inc = term_sum(m_prev + 1, m_now)
        raw.append(inc if j == 0 else raw[-1] + inc)
        m_prev = m_now
        with np.errstate(invalid="ignore"):
            if j >= 1:
                step = (2.0 * raw[j] - raw[j - 1]) if order_one_tail else \
                    raw[j] + (raw[j] - raw[j - 1]) / 3.0
                first.append(_guard_neg_inf(step, raw[j]))
            if len(first) >= 2:
                step2 = first[-1] + (first[-1] - first[-2]) / 3.0
                second.append(_guard_neg_inf(step2, first[-1]))
        final = second if order_one_tail else first
        if len(final) >= 2 and j >= 2:
            with np.errstate(invalid="ignore"):
                delta = np.abs(final[-1] - final[-2])
            both = np.isneginf(final[-1]) & np.isneginf(final[-2])
            delta = np.where(both, 0.0, delta)
            if bool(np.all(delta < policy.tol)):
                return final[-1], delta, m_now
    raise TruncationNotConverged(
        f"1-d product above tol={policy.tol:g} after {policy.max_doublings} "
        f"doublings (M = {m_prev})", tol=policy.tol, m_final=m_prev)


def _near_row_pole(spec: LatticeSpec, z: np.ndarray) -> np.ndarray:
    """Points within 1e-9*a of a*Z \\ {0}, where the ratio factors blow up."""
    k = np.round(z.real / spec.a)
    return (k != 0.0) & (np.abs(z - spec.a * k) < 1e-9 * spec.a)


def ratio_log_product_grid(spec: LatticeSpec, z,
                           policy: TruncationPolicy = DEFAULT_POLICY):
    """Log of the symmetric row-comparison product relating the two functions.

    Sum over m >= 1 of log|(1 - (z/a(m+R))^2) / (1 - (z/am)^2)|.  Returns
    (log_mag, err_est, at_zero, pole): at_zero marks z exactly on a shifted
    row point, pole marks the 1e-9*a guard zone of a*Z \\ {0} (NaN there).
    """
    def run(zc):
        a = spec.a
        R = spec.r_shift
        pole = _near_row_pole(spec, zc)
        val = np.full(zc.shape, np.nan)
        err = np.full(zc.shape, np.nan)
        at_zero = np.zeros(zc.shape, dtype=bool)
        ok = ~pole
        if not np.any(ok):
            return val, err, at_zero, pole

        zr = zc[ok]
        cr = (zr.real * zr.real - zr.imag * zr.imag)[:, None]
        ci = (2.0 * zr.real * zr.imag)[:, None]
        zmax = float(np.max(np.abs(zr)))
        m_start = _next_pow2(max(64, policy.m_min, 2.0 * (zmax / a + R + 2.0)))

        def term_sum(m_lo, m_hi):
            # |1 - z^2/d| via hypot keeps full accuracy arbitrarily close
            # to the row zeros
            out = np.zeros(cr.shape[0])
            comp = np.zeros_like(out)
            step = max(1, _CHUNK // max(1, cr.shape[0]))
            for m0 in range(m_lo, m_hi + 1, step):
                m = np.arange(m0, min(m0 + step - 1, m_hi) + 1, dtype=np.float64)
                dz = (a * m) ** 2
                dw = (a * (m + R)) ** 2
                with np.errstate(divide="ignore"):
                    g = np.log(np.hypot(1.0 - cr / dw, ci / dw)
                               / np.hypot(1.0 - cr / dz, ci / dz))
                kahan_add(out, comp, g.sum(axis=1))
            return out

        v, delta, m_fin = _accelerated_1d(term_sum, m_start, policy,
                                          order_one_tail=False)
        e = delta + R * (np.abs(zr) / a) ** 2 / float(m_fin) ** 3
        hit = np.isneginf(v)
        e[hit] = 0.0
        val[ok] = v
        err[ok] = e
        at_zero[ok] = hit
        return val, err, at_zero, pole

    return _map_z_chunks(run, z, 4)


def psi_log_grid(r_shift: float, z, policy: TruncationPolicy = DEFAULT_POLICY):
    """Vectorized log of the half-row shift product.

    psi_R(z) = prod_{m>=1} |(m+R-z)/(m-z)| * m/(m+R); the caller is
    responsible for excluding the poles at positive integers.  Each factor
    is evaluated as a single quotient, so psi_R(0) = 1 holds exactly.
    """
    if not r_shift >= 0:
        raise ValueError("r_shift must be >= 0")
    R = r_shift

    def run(zc):
        if R == 0.0:
            return np.zeros(zc.shape), np.zeros(zc.shape)
        x = zc.real[:, None]
        y2 = (zc.imag * zc.imag)[:, None]
        zmax = float(np.max(np.abs(zc)))
        m_start = _next_pow2(max(64, policy.m_min, 4.0 * (zmax + R + 2.0)))

        def term_sum(m_lo, m_hi):
            out = np.zeros(x.shape[0])
            comp = np.zeros_like(out)
            step = max(1, _CHUNK // max(1, x.shape[0]))
            for m0 in range(m_lo, m_hi + 1, step):
                m = np.arange(m0, min(m0 + step - 1, m_hi) + 1, dtype=np.float64)
                num = ((m + R - x) ** 2 + y2) * (m * m)
                den = ((m - x) ** 2 + y2) * ((m + R) ** 2)
                with np.errstate(divide="ignore"):
                    kahan_add(out, comp, 0.5 * np.log(num / den).sum(axis=1))
            return out

        v, delta, m_fin = _accelerated_1d(term_sum, m_start, policy,
                                          order_one_tail=True)
        e = delta + (1.0 + np.abs(zc)) * R / float(m_fin) ** 2
        e[np.isneginf(v)] = 0.0
        return v, e

    return _map_z_chunks(run, z, 2)


# ---------------------------------------------------------------------------
# composite fast path for the weighted modified function
# ---------------------------------------------------------------------------

def weighted_modified_sigma_grid(spec: LatticeSpec, z,
                                 policy: TruncationPolicy = DEFAULT_POLICY):
    """log|sigma_{a,R}(z)| - (alpha/2)|z|^2, vectorized production path.

    Cell-reduced weighted sigma plus the row-comparison product.  Points in
    the 1e-9*a pole guard of a*Z (where sigma_a vanishes but the composite
    stays regular) fall back to the direct box sums.
    """
    def run(zc):
        at_zero = distance_grid(zc, spec, True) == 0.0
        pole = _near_row_pole(spec, zc) & ~at_zero
        val = np.full(zc.shape, -np.inf)
        err = np.zeros(zc.shape)
        regular = ~at_zero & ~pole
        if np.any(regular):
            base, base_err, _ = weighted_sigma_cell_grid(spec, zc[regular], policy)
            prod, prod_err, _, _ = ratio_log_product_grid(spec, zc[regular], policy)
            val[regular] = base + prod
            err[regular] = base_err + prod_err
        if np.any(pole):
            v, e, _ = log_modified_sigma_direct_grid(spec, zc[pole], policy)
            val[pole] = v - 0.5 * spec.alpha * np.abs(zc[pole]) ** 2
            err[pole] = e
        return val, err, at_zero

    return _map_z_chunks(run, z, 3)


# ---------------------------------------------------------------------------
# scalar API
# ---------------------------------------------------------------------------

def _scalar(val, err, zero) -> WeightedLogValue:
    if bool(zero[0]):
        return WeightedLogValue.zero()
    return WeightedLogValue(float(val[0]), float(err[0]), False)


def log_sigma(spec: LatticeSpec, z: complex,
              policy: TruncationPolicy = DEFAULT_POLICY) -> WeightedLogValue:
    """log|sigma_a(z)| by adaptive symmetric box summation."""
    return _scalar(*log_sigma_grid(spec, [z], policy))


def log_weighted_sigma(spec: LatticeSpec, z: complex,
                       policy: TruncationPolicy = DEFAULT_POLICY) -> WeightedLogValue:
    """log|sigma_a(z)| - (alpha/2)|z|^2, subtracted in log space.

    Direct summation at z itself; the cell-reduced fast path used by the
    scan and quadrature layers is weighted_sigma_cell_grid.
    """
    v = log_sigma(spec, z, policy)
    if v.at_zero:
        return v
    return WeightedLogValue(v.log_mag - 0.5 * spec.alpha * abs(z) ** 2,
                            v.err_est, False)


def log_modified_sigma_direct(spec: LatticeSpec, z: complex,
                              policy: TruncationPolicy = DEFAULT_POLICY) -> WeightedLogValue:
    """log|sigma_{a,R}(z)| by direct box summation over the shifted points.

    Linear factors use the shifted row; the quadratic exponent keeps the
    unshifted lattice normalization.
    """
    return _scalar(*log_modified_sigma_direct_grid(spec, [z], policy))


def log_modified_sigma_ratio(spec: LatticeSpec, z: complex,
                             policy: TruncationPolicy = DEFAULT_POLICY) -> WeightedLogValue:
    """log|sigma_{a,R}(z)| as log|sigma_a(z)| plus the row-comparison product.

    Raises DomainPole within 1e-9*a of a*Z \\ {0}; the composite value there
    is available from the direct method instead.
    """
    prod, perr, pzero, pole = ratio_log_product_grid(spec, [z], policy)
    if bool(pole[0]):
        raise DomainPole(f"z={z} is within 1e-9*a of a nonzero point of a*Z")
    base = log_sigma(spec, z, policy)
    if base.at_zero or bool(pzero[0]):
        return WeightedLogValue.zero()
    return WeightedLogValue(base.log_mag + float(prod[0]),
                            base.err_est + float(perr[0]), False)


def psi(r_shift: float, z: complex,
        policy: TruncationPolicy = DEFAULT_POLICY) -> WeightedLogValue:
    """log psi_R(z) for the half-row shift product; poles at 1, 2, 3, ..."""
    zc = complex(z)
    k_max = int(2 * abs(zc) + 2)
    k = round(zc.real)
    if 1 <= k <= k_max and abs(zc - k) < 1e-9:
        raise DomainPole(f"z={z} is within 1e-9 of the pole at {k}")
    val, err = psi_log_grid(r_shift, [zc], policy)
    if np.isneginf(val[0]):
        return WeightedLogValue.zero()
    return WeightedLogValue(float(val[0]), float(err[0]), False)


def m_r_constant(r_shift: float, tol: float = 1e-10) -> float:
    """Sum of 1/m^2 - 1/(m+R)^2 over m >= 1, to absolute accuracy tol.

    Partial sum plus a midpoint-rule tail completion; the completion error
    is below R/(4 M^4), so M is chosen to land under tol with margin.
    """
    if not r_shift > 0:
        raise ValueError("r_shift must be > 0")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    m_cut = int(math.ceil((r_shift / (2.0 * tol)) ** 0.25)) + 16
    m = np.arange(1, m_cut + 1, dtype=np.float64)
    s = float(np.sum(1.0 / (m * m) - 1.0 / ((m + r_shift) ** 2)))
    s += 1.0 / (m_cut + 0.5) - 1.0 / (m_cut + 0.5 + r_shift)
    return s

"""Square lattice a(Z + iZ) and its outward-shifted real row.

The modified point set keeps every off-axis point and pushes each nonzero
real-axis point a*m outward to a*(m + R*sign(m)).  For integer R this is
the same as deleting {+-a, ..., +-a*R} from the lattice.  For every R > 0
the modified set still has simple (duplicate-free) points.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeSpec",
    "PointSet",
    "lattice_point",
    "points_in_disk",
    "counting_function",
    "distance_to_lattice",
    "distance_grid",
]

# Index pairs are plain (m, n) integer tuples; no constraints beyond integrality.
LatticeIndex = tuple


@dataclass(frozen=True)
class LatticeSpec:
    """Weight parameter alpha, pitch a = sqrt(pi/alpha), and row shift R.

    The pitch is stored but re-derivable; a relative mismatch beyond 1e-12
    is treated as a construction error.
    """

    alpha: float
    r_shift: float
    a: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.r_shift > 0:
            raise ValueError(f"invariant violated: r_shift > 0 (got {self.r_shift})")
        expected = math.sqrt(math.pi / self.alpha)
        if self.a is None:
            object.__setattr__(self, "a", expected)
        elif not abs(self.a - expected) <= 1e-12 * expected:
            raise ValueError(
                f"pitch a={self.a!r} inconsistent with sqrt(pi/alpha)={expected!r}")

    @classmethod
    def from_pitch(cls, a: float, r_shift: float) -> "LatticeSpec":
        if not a > 0:
            raise ValueError(f"pitch must be > 0, got {a}")
        return cls(alpha=math.pi / (a * a), r_shift=r_shift, a=a)


@dataclass(frozen=True)
class PointSet:
    """Finite list of points strictly inside an open disk."""

    points: tuple
    modified: bool
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        pts = self.points
        for p in pts:
            if not abs(p - self.center) < self.radius:
                raise ValueError(f"point {p} not strictly inside the disk")
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points in PointSet")

    def __len__(self):
        return len(self.points)


def lattice_point(spec: LatticeSpec, idx: LatticeIndex, modified: bool = False) -> complex:
    """Point a(m+in), with the nonzero real row shifted outward when modified."""
    m, n = idx
    if modified and n == 0 and m != 0:
        shift = spec.r_shift if m > 0 else -spec.r_shift
        return complex(spec.a * (m + shift), 0.0)
    return spec.a * complex(m, n)


def _scan_half_width(spec: LatticeSpec, center: complex, rho: float) -> int:
    # ceil(R)+1 margin guards against shifted row points entering from outside
    # the naive index box.
    return (math.ceil((abs(center) + rho) / spec.a)
            + math.ceil(spec.r_shift) + 1)


def points_in_disk(spec: LatticeSpec, center: complex, rho: float,
                   modified: bool = False) -> PointSet:
    """Every (possibly shifted) lattice point with |point - center| < rho."""
    if not rho > 0:
        raise ValueError("rho must be > 0")
    half = _scan_half_width(spec, center, rho)
    idx = np.arange(-half, half + 1)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    mm = mm.ravel()
    nn = nn.ravel()
    re = spec.a * mm.astype(np.float64)
    im = spec.a * nn.astype(np.float64)
    if modified:
        on_row = (nn == 0) & (mm != 0)
        re = np.where(on_row, spec.a * (mm + spec.r_shift * np.sign(mm)), re)
    pts = re + 1j * im
    keep = np.abs(pts - center) < rho
    return PointSet(points=tuple(pts[keep]), modified=modified,
                    center=center, radius=rho)


def counting_function(spec: LatticeSpec, center: complex, rho: float,
                      modified: bool = False) -> int:
    """Disk counting function: size of the points_in_disk output."""
    return len(points_in_disk(spec, center, rho, modified))


def distance_grid(z, spec: LatticeSpec, modified: bool = False) -> np.ndarray:
    """Euclidean distance from each z to the (possibly modified) lattice.

    Exact up to float rounding: the unmodified case is coordinate rounding;
    the modified case takes the minimum over a constant-size candidate set
    (off-axis rounded rows, the origin, and the shifted points bracketing
    Re z on both half-rows), which is sufficient because the perturbation
    is confined to the real axis.
    """
    z = np.asarray(z, dtype=np.complex128)
    a = spec.a
    x = z.real
    y = z.imag
    if not modified:
        dx = x - a * np.round(x / a)
        dy = y - a * np.round(y / a)
        return np.hypot(dx, dy)

    R = spec.r_shift
    best = np.abs(z)  # the origin stays put

    # off-axis rows: nearest nonzero row index, plus rows +-1 for safety
    dx = np.abs(x - a * np.round(x / a))
    n0 = np.round(y / a)
    n0 = np.where(n0 == 0.0, np.where(y >= 0.0, 1.0, -1.0), n0)
    for ycand in (a * n0, np.full_like(y, a), np.full_like(y, -a)):
        best = np.minimum(best, np.hypot(dx, y - ycand))

    # shifted half-rows {+-a(k+R): k >= 1}: bracket Re z by three candidates
    for s in (1.0, -1.0):
        k0 = np.round(s * x / a - R)
        for dk in (-1.0, 0.0, 1.0):
            k = np.maximum(k0 + dk, 1.0)
            best = np.minimum(best, np.hypot(x - s * a * (k + R), y))
    return best


def distance_to_lattice(spec: LatticeSpec, z: complex, modified: bool = False) -> float:
    """Scalar wrapper around distance_grid."""
    return float(distance_grid(np.asarray([z]), spec, modified)[0])

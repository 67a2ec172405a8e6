"""Run configuration shared by the CLI commands and the check registry."""

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .lattice import LatticeSpec
from .fock_norm import QuadratureSpec
from .sigma import TruncationPolicy

__all__ = ["RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    """Batch-run parameters; defaults make every documented example reproducible.

    alpha defaults to pi so the pitch is exactly 1.
    """

    alpha: float = math.pi
    r_shift: float = 0.75
    p_exponents: tuple = (2.0, 0.5)
    rho_max: float = 32.0
    output_dir: str = "fockzero_out"
    seed: int = 7
    figures: bool = True
    # truncation / quadrature overrides (None keeps the per-task defaults)
    trunc_tol: float = None
    trunc_m_min: int = None
    trunc_max_doublings: int = None
    radial_step: float = 0.125
    angular_step: float = 0.125

    def __post_init__(self):
        try:
            self.lattice_spec()
            self.quadrature_spec()
            if not self.p_exponents:
                raise ValueError("need at least one exponent in p_exponents")
            for p in self.p_exponents:
                if not p > 0:
                    raise ValueError(f"exponents must be > 0, got {p}")
            if not self.rho_max >= 4.0 * self.lattice_spec().a:
                raise ValueError("rho_max must be at least 4a")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def lattice_spec(self) -> LatticeSpec:
        return LatticeSpec(alpha=self.alpha, r_shift=self.r_shift)

    def quadrature_spec(self) -> QuadratureSpec:
        return QuadratureSpec(radial_step=self.radial_step,
                              angular_step=self.angular_step)

    def policy(self, base: TruncationPolicy) -> TruncationPolicy:
        """Apply the config's truncation overrides to a task default."""
        kwargs = {}
        if self.trunc_tol is not None:
            kwargs["tol"] = self.trunc_tol
        if self.trunc_m_min is not None:
            kwargs["m_min"] = self.trunc_m_min
        if self.trunc_max_doublings is not None:
            kwargs["max_doublings"] = self.trunc_max_doublings
        return replace(base, **kwargs) if kwargs else base

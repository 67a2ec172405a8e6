"""Perturbed square-lattice Weierstrass products in log space.

Builds the square lattice a(Z+iZ) and its outward-shifted real row,
evaluates the associated genus-2 products as log-magnitudes with
controlled truncation error, integrates their Gaussian-weighted powers
over dyadic annuli to decide norm convergence, estimates counting
densities, and certifies every two-sided estimate behind those claims by
quasi-random ratio scans.
"""

from .errors import (ConfigError, DomainPole, FockzeroError,
                     InsufficientAnnuli, InsufficientRadii,
                     TruncationNotConverged)
from .lattice import (LatticeSpec, PointSet, counting_function,
                      distance_to_lattice, lattice_point, points_in_disk)
from .sigma import (DEFAULT_POLICY, TruncationPolicy, WeightedLogValue,
                    log_modified_sigma_direct, log_modified_sigma_ratio,
                    log_sigma, log_weighted_sigma, m_r_constant, psi)
from .fock_norm import (NormTrace, QuadratureSpec, annulus_mass,
                        growth_exponent, norm_trace, norm_traces, verdict,
                        weighted_integrand)
from .density import DensityReport, density_profile, uniform_density_estimate
from .verify import (RatioReport, ScanGrid, check_hadamard_correction,
                     check_modified_sigma_distance, check_psi_claim, check_ratio_product,
                     check_reduction_identity, check_sigma_distance,
                     median_drift, standard_annuli)
from .config import RunConfig

__version__ = "0.1.0"

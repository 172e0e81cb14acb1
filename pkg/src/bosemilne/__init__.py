"""Half-space temperature-jump problem for a massless Bose gas.

Analytic solution of the Milne-type boundary-value problem for the model
transport equation with power-law collision frequency w^alpha: eigenfunction
expansion, Riemann-Hilbert factorisation, the jump coefficient V1(alpha), the
saddle-point approximation, and an independent discrete-ordinates solver for
cross-validation.
"""

from .errors import (AccuracyError, BoseMilneError, ConfigurationError,
                     ConsistencyError, ConvergenceError, DivergenceError,
                     DomainError, ExtractionError, RangeError, ResolutionError)
from .quadrature import PvIntegrand, QuadConfig, QuadratureRule, gauss_rule, integrate, pv_integral
from .special import (AlphaModel, PhysicalScales, einstein, moment_l0,
                      physical_jump, xi_alpha)
from .dispersion import (DispersionSample, DispersionTable, build_theta_table,
                         index_kappa, lambda_boundary, lambda_case,
                         lambda_case_boundary, lambda_general)
from .factorization import (FactorizationData, SpectrumCoefficient, V1Estimate,
                            build_factorization, n_coefficient, v1_coefficient,
                            v_cut, v_transform, x_boundary, x_factor)
from .saddle import (SaddleSummary, lambda_surrogate, saddle_root,
                     saddle_root_approx, surrogate_theta_table, v1_saddle)
from .field import (MilneSolution, boundary_residual, discrete_modes, evaluate,
                    mode_equation_residual, solve_milne)
from .dom import DomGrid, DomResult, extract_k0, freq_rule, mode_sweep_residual
from .dom import solve as solve_transport

__version__ = "0.1.0"

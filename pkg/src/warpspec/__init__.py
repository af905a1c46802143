"""First Dirichlet eigenvalues of geodesic balls in warped and diagonal metrics,
mean-curvature comparison certificates, and fundamental-tone bounds."""

from .bounds import (BoundCertificate, TestFunction, barta_bracket, barta_quotient,
                     cone_tone_bound, divergence_identity_check, log_derivative_field,
                     product_tone_bounds, vector_field_bound)
from .comparison import (ComparisonReport, OrderingVerdict, check_mean_curvature_ordering,
                         compare_eigenvalues, dimension_detect, hypothesis_grid,
                         ricci_from_mean_curvature)
from .errors import (BracketError, ConstructionError, DomainError, FitError, GridError,
                     HypothesisViolation, IntegrationError, TheoremViolation, WarpspecError)
from .radial_ode import (EigenSolution, RadialCoefficient, eigenfunction_log_derivative, shoot,
                         solve_first_eigenvalue)
from .spaceform import SpaceForm, c_kappa, cosine_kappa, cot_kappa, s_kappa, sine_kappa
from .warped_metric import (DiagonalMetric, PsiProfile, RadialMap, WarpingProfile,
                            example43_metric, nonisometry_witness, profile_from_psi,
                            psi_exponential, radial_coefficient, spaceform_profile)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Bergman kernels, weight constants, Poincare series and Laplace-type
asymptotics on the complex hyperbolic ball."""

__version__ = "0.1.0"

from .constants import WeightConstant, c_ball, c_ball_integral_check, c_ball_stirling
from .errors import (ConvergenceError, DegeneratePhaseError, DomainError, NumericalError,
                     PreconditionError, RepresentationError, SingularMapError,
                     TruncationOverflowError)
from .geometry import (BallAutomorphism, KernelContext, apply_automorphism, bergman_kernel,
                       build_elliptic, build_rotation, build_translation, cr_structure_check,
                       hyperbolic_distance, jacobian, kernel_transform_residual, metric_tensor,
                       pairing)
from .laplace import LaplaceProblem, hessian_fd, laplace_error_order, laplace_leading
from .poincare import (GroupSpec, GroupTruncation, UnitaryRep, automorphy_residual,
                       enumerate_group, reproducing_check, theta_scalar, theta_vector)
from .quadrature import QuadratureConfig
from .submanifolds import (AsymptoticLaw, PairingResult, ParamSubmanifold, i1_cr_ball, i1_pairing,
                           ratio_to_law, separated_decay, tangent_hessian_check)

__all__ = [
    "AsymptoticLaw", "BallAutomorphism", "ConvergenceError", "DegeneratePhaseError", "DomainError",
    "GroupSpec", "GroupTruncation", "KernelContext", "LaplaceProblem", "NumericalError",
    "PairingResult", "ParamSubmanifold", "PreconditionError", "QuadratureConfig",
    "RepresentationError", "SingularMapError", "TruncationOverflowError", "UnitaryRep",
    "WeightConstant", "apply_automorphism", "automorphy_residual", "bergman_kernel", "build_elliptic",
    "build_rotation", "build_translation", "c_ball", "c_ball_integral_check", "c_ball_stirling",
    "cr_structure_check", "enumerate_group", "hessian_fd", "hyperbolic_distance", "i1_cr_ball",
    "i1_pairing", "jacobian", "kernel_transform_residual", "laplace_error_order", "laplace_leading",
    "metric_tensor", "pairing", "ratio_to_law", "reproducing_check", "separated_decay",
    "tangent_hessian_check", "theta_scalar", "theta_vector",
]

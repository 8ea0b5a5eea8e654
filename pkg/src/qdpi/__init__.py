"""Finite-dimensional quantum information toolkit with randomized checks of
operator monotonicity, Uhlmann monotonicity, data processing and the Holevo
bound. All entropic quantities are in nats.
"""
__version__ = "0.1.0"

from .channels import (ChoiMatrix, KrausChannel, StinespringDilation, apply, choi_matrix,
                       compose, dual, measurement_channel, random_channel, random_povm,
                       stinespring, validate_povm)
from .errors import QDPError
from .linalg import Domain, HermitianEigensystem, eigh, matrix_function
from .pick import PickFunctionSpec, evaluate_pick, sqrt_pick_spec
from .report import VerificationReport
from .states import (DensityOperator, relative_entropy, relative_entropy_via_limit,
                     von_neumann_entropy)
from .verify import (check_divergence_monotonicity, check_dpi, check_holevo,
                     check_uhlmann_lemma, mutual_information)

__all__ = [
    "ChoiMatrix", "DensityOperator", "Domain", "HermitianEigensystem", "KrausChannel",
    "PickFunctionSpec", "QDPError", "StinespringDilation", "VerificationReport", "apply",
    "check_divergence_monotonicity", "check_dpi", "check_holevo", "check_uhlmann_lemma",
    "choi_matrix", "compose", "dual", "eigh", "evaluate_pick", "matrix_function",
    "measurement_channel", "mutual_information", "random_channel", "random_povm",
    "relative_entropy", "relative_entropy_via_limit", "sqrt_pick_spec", "stinespring",
    "validate_povm", "von_neumann_entropy",
]

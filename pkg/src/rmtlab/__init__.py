"""Random-matrix universality laboratory.

Samplers for Wigner, GOE/GUE and shell-restricted ensembles, a symmetric
eigensolver, the reference laws (semicircle, Tracy-Widom, sine kernel),
the estimators that compare the two, independent numerical oracles, and an
experiment harness with a command line front end.

Matrices follow ``A = (xi_ij / sqrt(n))`` with ``Var xi = 1/4``, so the
spectrum fills ``[-1, 1]``.
"""
__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DomainError,
    EdgeRegimeError,
    NumericError,
    OracleError,
    RmtLabError,
    SamplingError,
)
from .matrices import SymmetricMatrix, TridiagonalMatrix
from .ensembles import (
    EntryDistribution,
    ShellSpec,
    parse_dist,
    replicate_seed,
    sample_beta_tridiagonal,
    sample_goe,
    sample_gue_embedded,
    sample_shell,
    sample_wigner,
)
from .spectra import Spectrum, charpoly_oracle, eigenvalues, merge_pairs, tridiagonalize

__all__ = [
    "__version__",
    "ConfigurationError",
    "DomainError",
    "EdgeRegimeError",
    "NumericError",
    "OracleError",
    "RmtLabError",
    "SamplingError",
    "SymmetricMatrix",
    "TridiagonalMatrix",
    "EntryDistribution",
    "ShellSpec",
    "parse_dist",
    "replicate_seed",
    "sample_beta_tridiagonal",
    "sample_goe",
    "sample_gue_embedded",
    "sample_shell",
    "sample_wigner",
    "Spectrum",
    "charpoly_oracle",
    "eigenvalues",
    "merge_pairs",
    "tridiagonalize",
]

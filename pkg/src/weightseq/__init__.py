"""Weight sequences in log domain: growth conditions, growth indices, formal and
integral Laplace/Borel transforms, uniform asymptotic checks and the
classification of surjectivity intervals."""

__version__ = "0.1.0"

from .sequence import (KnownIndex, QuotientView, WeightSequence, check_equivalence, combine, factorial_lift,
                       factorial_unlift, gamma_scale, gamma_sequence, gamma_unscale, log_identity_check,
                       make_sequence)
from .verdict import ConditionVerdict, NumericalFailure, TailBoundError, TrendProtocol, Verdict
from .catalog import CATALOG, build, expected_profile
from .indices import IndexEstimate, estimate_gamma, estimate_matuszewska, estimate_omega, index_chain
from .series import FormalSeries, WeightedNorm, formal_borel, formal_laplace, norm
from .kernels import (BorelPath, GrowthHint, SampledFunction, Sector, borel_transform, kernel_e, kernel_moment,
                      laplace_transform, mittag_leffler)
from .asymptotics import AsymptoticClaim, GridSpec, fit_constants, verify_uniform_expansion
from .surjectivity import SurjectivityReport, check_interval_chain, classify, classify_extension_operators

"""isl-lab: rank-based training of implicit generative models.

Core objects: analytic targets (distributions), the rank statistic and
its discrepancy (rank), the differentiable surrogate loss (surrogate),
a minimal autodiff engine and MLP generator (autodiff, nn), training
loops (training), Bernstein-basis density estimation (bernstein), the
sliced multivariate extension (slicing), and evaluation metrics.
"""

from .autodiff import Value
from .bernstein import (DualBasis, bernstein_eval, bernstein_vector,
                        density_estimate, density_limit_check, dual_basis_eval,
                        expected_pmf,
                        gram_matrix, sup_deviation_bound_check, truncated_ratio)
from .distributions import (Cauchy, CircleOfGaussians, Density1D, Density2D,
                            DualMoon, Gaussian2D, Mixture, Normal, Pareto,
                            TwoRings, Uniform, parse_density)
from .metrics import MetricReport, accdf_error, grid_kl, ks_distance
from .nn import Generator, OptimizerState
from .rank import (RankPmf, discrepancy, empirical_pmf, exact_pmf,
                   histogram_pmf, rank_statistic)
from .rng import make_rng
from .slicing import (ProjectionSet, project, sliced_bound_check,
                      sliced_density_estimate, sliced_discrepancy)
from .surrogate import (SurrogateConfig, soft_count, soft_indicator,
                        soft_one_hot, surrogate_loss)
from .training import (DivergenceError, TrainConfig, TrainReport,
                       monotonicity_penalty, train_classical_isl,
                       train_dual_isl, train_monotone_ot,
                       train_sliced_dual_isl)

__version__ = "0.1.0"

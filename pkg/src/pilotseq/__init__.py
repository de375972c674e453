"""Design and evaluation of non-orthogonal pilot sets for multi-cell networks."""

from .bounds import (BClass, BoundReport, bound_report, extended_welch_bound_two_cell,
                     is_positive_definite, new_extended_welch_bound, welch_bound)
from .construct import optimal_multicell, pooled_wbe, random_set, replicated_wbe, wbe_truncated_dft
from .metrics import (GramBlocks, etsc, extended_gram, interference_split, papr, papr_per_user,
                      sum_mse_analytic, tsc)
from .mm import OptimizerTrace, solve
from .model import (Acceleration, ChannelModel, Constraint, DesignProblem, InterferenceMatrix,
                    OptimizerSettings, SequenceSet, ValidationReport, validate)
from .sim import SimulationConfig, SimulationReport, run_monte_carlo

__version__ = "0.1.0"

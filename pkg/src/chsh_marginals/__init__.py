"""When do pair marginals of four +/-1 variables come from one joint distribution?

The answer (the CHSH inequalities) is checked, realized by explicit
constructions, cross-checked by an in-house LP oracle, simulated with a
classical spin model and probed from the quantum side.
"""

from .construct import (BellJoint, FeasibleIntervals, construct_from_marginals,
                        construct_joint_bell, construct_joint_chsh, feasible_intervals)
from .errors import (ConsistencyError, DomainError, InfeasibleError, MarginalError, NumericError,
                     UnsupportedError, ValidationError)
from .inequalities import (angle_chsh_report, bell_report, chsh_report, marginal_positivity_report,
                           single_inequality)
from .lp_oracle import LpResult, lp_feasible, lp_feasible_bell
from .maxent import MaxEntSolution, solve_maxent
from .moments import (JointDist4, MomentVector, PairMarginals, joint_to_moments, marginalize_pair,
                      moments_to_joint)
from .peres import (AngleSet, VectorQuad, angle_from_corr, angles_of, corr_from_angle, fit_vectors,
                    joint_from_vectors_mc)
from .quantum import (MeasurementSetup, TwoQubitState, eprb_marginals, maximally_mixed, pair_probs,
                      singlet, zero_mean_rotation)

__all__ = [
    "AngleSet", "BellJoint", "ConsistencyError", "DomainError", "FeasibleIntervals",
    "InfeasibleError", "JointDist4", "LpResult", "MarginalError", "MaxEntSolution",
    "MeasurementSetup", "MomentVector", "NumericError", "PairMarginals", "TwoQubitState",
    "UnsupportedError", "ValidationError", "VectorQuad", "angle_chsh_report", "angle_from_corr",
    "angles_of", "bell_report", "chsh_report", "construct_from_marginals", "construct_joint_bell",
    "construct_joint_chsh", "corr_from_angle", "eprb_marginals", "feasible_intervals",
    "fit_vectors", "joint_from_vectors_mc", "joint_to_moments", "lp_feasible", "lp_feasible_bell",
    "marginal_positivity_report", "marginalize_pair", "maximally_mixed", "moments_to_joint",
    "pair_probs", "single_inequality", "singlet", "solve_maxent", "zero_mean_rotation",
]

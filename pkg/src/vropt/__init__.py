"""Variance-reduced stochastic optimization: ASVRG and its baselines."""
from .data import (LibsvmParseError, SparseDataset, SparseRow, load_libsvm, normalize_rows,
                   parse_libsvm, serialize_libsvm)
from .estimator import (OracleCounter, Snapshot, exact_variance, take_snapshot, tau, vr_grad,
                        vr_grad_batch)
from .objective import (ComponentLoss, CompositeProblem, Regularizer, component_grad,
                        component_value, full_grad, lipschitz_constants, make_problem,
                        moreau_grad, moreau_value, objective_value, reg_prox, reg_value)
from .sampling import SamplingDist, build_dist, make_rng, sample, sample_batch
from .solvers import SolverConfig, solve

__version__ = "0.1.0"

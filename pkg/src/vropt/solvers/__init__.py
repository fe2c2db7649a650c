"""ASVRG variants, their parameter rules, baselines and stage-wise reductions."""
from .asvrg import asvrg_nsc, asvrg_plain, asvrg_sc, epoch_lengths, sc_parameters
from .baselines import katyusha, prox_sgd, saga, svrg
from .config import METHODS, SolverConfig, Trace, TraceRecord
from .params import (ConfigError, contraction_factor, max_admissible_eta, omega_bound,
                     omega_next, omega_optimal, option1_range, restart_period, table_preset)
from .reductions import adapt_reg, adapt_smooth, augment

SOLVERS = {
    "asvrg_sc": asvrg_sc,
    "asvrg_nsc": asvrg_nsc,
    "asvrg_plain": asvrg_plain,
    "svrg": svrg,
    "prox_sgd": prox_sgd,
    "saga": saga,
    "katyusha": katyusha,
}


def solve(problem, cfg: SolverConfig, **kw):
    """Dispatch on ``cfg.method``; returns (solution, trace)."""
    return SOLVERS[cfg.method](problem, cfg, **kw)

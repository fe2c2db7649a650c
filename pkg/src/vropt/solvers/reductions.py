"""Stage-wise reductions: adaptive regularization (non-SC g) and adaptive
smoothing (hinge losses). Each stage is a warm-started asvrg_sc run."""
from __future__ import annotations

import numpy as np

from ..objective import CompositeProblem, Regularizer, smoothed_hinge
from .asvrg import _start, asvrg_sc
from .config import SolverConfig, Trace, TraceRecord
from .params import ConfigError


def augment(p: CompositeProblem, sigma: float, center=None) -> CompositeProblem:
    """p with (sigma/2)||x - center||^2 added to g; mu grows by sigma.

    The two quadratics merge into one centred at sigma*center/(mu_g + sigma),
    which changes g only by a constant.
    """
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    reg = p.reg
    mu_g = reg.mu_g + sigma
    c_old = np.zeros(p.dim) if reg.center is None else reg.center
    c_new = np.zeros(p.dim) if center is None else np.asarray(center, dtype=np.float64)
    merged = (reg.mu_g * c_old + sigma * c_new) / mu_g
    kind = "elastic_net" if reg.lam else "l2"
    new_reg = Regularizer(kind, mu_g=mu_g, lam=reg.lam, center=merged if np.any(merged) else None)
    return p.with_reg(new_reg, mu=p.mu + sigma)


class _StageLog:
    def __init__(self):
        self.trace = Trace()
        self.calls = 0
        self.time = 0.0
        self.epoch = 0

    def absorb(self, stage: Trace, first: bool, **info):
        recs = stage.records if first else stage.records[1:]
        for r in recs:
            self.trace.records.append(TraceRecord(
                self.epoch + r.epoch, self.calls + r.oracle_calls, self.time + r.elapsed_s,
                r.objective, r.gap))
        last = stage.records[-1]
        self.epoch += last.epoch
        self.calls += last.oracle_calls
        self.time += last.elapsed_s
        self.trace.params.setdefault("stages", []).append(dict(info, **stage.params))

    def done(self, cfg: SolverConfig) -> bool:
        gap = self.trace.records[-1].gap
        return gap is not None and cfg.tol is not None and gap <= cfg.tol


def adapt_reg(p: CompositeProblem, cfg: SolverConfig, sigma0: float | None = None,
              stages: int = 10, x0=None, f_star=None, callback=None):
    """Solve F + (sigma_s/2)||x - x0||^2 for sigma_s = sigma0 / 2^s, warm-starting each stage.

    ``cfg.epochs`` is the epoch budget per stage. Traces report the original F.
    """
    x = _start(p, x0)
    center = x.copy()
    sigma = sigma0 if sigma0 is not None else p.l_tilde() / p.n
    log = _StageLog()
    for s in range(stages):
        stage_p = augment(p, sigma, center)
        x, tr = asvrg_sc(stage_p, cfg.with_(seed=cfg.seed + s), x0=x, f_star=f_star, report=p,
                             callback=callback)
        log.absorb(tr, s == 0, sigma=sigma)
        if log.done(cfg):
            break
        sigma /= 2.0
    return x, log.trace


def adapt_smooth(p: CompositeProblem, cfg: SolverConfig, delta0: float | None = None,
                 stages: int = 10, x0=None, f_star=None, eps0: float = 1.0,
                 sigma0: float | None = None, callback=None):
    """Solve the delta_s-smoothed hinge problem for delta_s = delta0 * 2^s.

    With mu > 0 each stage runs asvrg_sc; otherwise each stage also adds
    (sigma_s/2)||x - x0||^2 with sigma_s halving. delta0 defaults to G^2/eps0.
    """
    if p.loss.kind not in ("hinge", "smoothed_hinge"):
        raise ConfigError("adapt_smooth needs a hinge loss")
    x = _start(p, x0)
    center = x.copy()
    G = p.g_lipschitz
    delta = delta0 if delta0 is not None else max(G * G, 1e-12) / eps0
    sigma = None
    if p.mu <= 0:
        sigma = sigma0 if sigma0 is not None else delta / p.n
    log = _StageLog()
    for s in range(stages):
        stage_p = p.with_loss(smoothed_hinge(delta))
        if sigma is not None:
            stage_p = augment(stage_p, sigma, center)
        x, tr = asvrg_sc(stage_p, cfg.with_(seed=cfg.seed + s), x0=x, f_star=f_star, report=p,
                             callback=callback)
        log.absorb(tr, s == 0, delta=delta, sigma=sigma)
        if log.done(cfg):
            break
        delta *= 2.0
        if sigma is not None:
            sigma /= 2.0
    return x, log.trace

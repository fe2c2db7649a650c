"""Baselines: Prox-SVRG, proximal SGD, SAGA and Katyusha."""
from __future__ import annotations

import math

import numpy as np

from ..estimator import OracleCounter, take_snapshot
from ..objective import CompositeProblem, component_grad, reg_prox
from ..sampling import build_dist, make_rng, sample_many
from .asvrg import _Sampler, _start, default_m, epoch_lengths
from .config import Recorder, SolverConfig


def svrg(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
         report=None):
    """Prox-SVRG: x_t = prox(x_{t-1} - eta * estimator); snapshot and restart at the last iterate."""
    sampler = _Sampler(p, cfg)
    l_tilde = sampler.dist.l_tilde
    eta = cfg.eta if cfg.eta is not None else 1.0 / (10.0 * l_tilde)
    m = default_m(cfg, p.n)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, m=m, l_tilde=l_tilde)

    x = _start(p, x0)
    if rec.record(0, x):
        return x, rec.trace
    lengths = epoch_lengths(cfg, p.n, m)
    for s in range(1, cfg.epochs + 1):
        steps = sampler.steps(next(lengths))
        snap = take_snapshot(p, x, counter)
        for i in sampler.draw(steps):
            g = sampler.estimate(p, snap, i, x, counter)
            x = reg_prox(p.reg, x - eta * g, eta)
        if rec.record(s, x):
            break
    return x, rec.trace


def prox_sgd(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
             report=None):
    """Proximal SGD with eta_t = eta / sqrt(t) and uniform sampling.

    An "epoch" is m_s steps so traces line up with the other methods.
    """
    n = p.n
    eta = cfg.eta if cfg.eta is not None else 1.0 / p.l_tilde()
    m = default_m(cfg, n)
    rng = make_rng(cfg.seed)
    uniform = build_dist(p.lipschitz, "uniform")
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, m=m)

    x = _start(p, x0)
    if rec.record(0, x):
        return x, rec.trace
    t = 0
    lengths = epoch_lengths(cfg, n, m)
    for s in range(1, cfg.epochs + 1):
        for i in sample_many(uniform, rng, next(lengths)).tolist():
            t += 1
            eta_t = eta / math.sqrt(t)
            counter.charge(1)
            x = reg_prox(p.reg, x - eta_t * component_grad(p, i, x), eta_t)
        if rec.record(s, x):
            break
    return x, rec.trace


class SagaTable:
    """Stored component gradients and their running mean."""

    def __init__(self, p: CompositeProblem, x: np.ndarray, counter: OracleCounter):
        self.grads = np.stack([component_grad(p, i, x) for i in range(p.n)])
        counter.charge(p.n)
        self.mean = self.grads.mean(axis=0)

    def replace(self, i: int, g: np.ndarray) -> np.ndarray:
        old = self.grads[i].copy()
        self.mean += (g - old) / self.grads.shape[0]
        self.grads[i] = g
        return old


def saga(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
         report=None, table_out: list | None = None):
    """SAGA with weighted sampling: g = (grad f_j(x) - table_j)/(n p_j) + mean(table)."""
    n = p.n
    dist = build_dist(p.lipschitz, cfg.sampling)
    eta = cfg.eta if cfg.eta is not None else 1.0 / (3.0 * dist.l_tilde)
    m = default_m(cfg, n)
    rng = make_rng(cfg.seed)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, m=m, l_tilde=dist.l_tilde)

    x = _start(p, x0)
    table = SagaTable(p, x, counter)
    if table_out is not None:
        table_out.append(table)
    if rec.record(0, x):
        return x, rec.trace
    lengths = epoch_lengths(cfg, n, m)
    for s in range(1, cfg.epochs + 1):
        for j in sample_many(dist, rng, next(lengths)).tolist():
            gj = component_grad(p, j, x)
            counter.charge(1)
            mean_before = table.mean.copy()
            old = table.replace(j, gj)
            g = (gj - old) / (n * dist.probs[j]) + mean_before
            x = reg_prox(p.reg, x - eta * g, eta)
        if rec.record(s, x):
            break
    return x, rec.trace


def katyusha_omega1(m: int, mu: float, l_tilde: float) -> float:
    if mu <= 0:
        return 0.5
    return min(math.sqrt(m * mu / (3.0 * l_tilde)), 0.5)


def katyusha(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
             report=None):
    """Katyusha with the two momentum weights omega1 and omega2 (default 0.5).

    x_t = y + omega1 (z - y) + omega2 (x_tilde - y); y_t is a 1/(3L) prox step
    from x_t; z_t a prox step of length eta = 1/(3 omega1 L). The snapshot is
    the mean of the epoch's y_t.
    """
    sampler = _Sampler(p, cfg)
    L = sampler.dist.l_tilde
    m = default_m(cfg, p.n)
    w1 = cfg.katyusha_omega1 if cfg.katyusha_omega1 is not None else katyusha_omega1(m, p.mu, L)
    w2 = cfg.katyusha_omega2
    eta = 1.0 / (3.0 * w1 * L)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, omega1=w1, omega2=w2, m=m, l_tilde=L)

    x_tilde = _start(p, x0)
    y, z = x_tilde.copy(), x_tilde.copy()
    if rec.record(0, x_tilde):
        return x_tilde, rec.trace
    lengths = epoch_lengths(cfg, p.n, m)
    step_y = 1.0 / (3.0 * L)
    for s in range(1, cfg.epochs + 1):
        steps = sampler.steps(next(lengths))
        snap = take_snapshot(p, x_tilde, counter)
        ysum = np.zeros(p.dim)
        for i in sampler.draw(steps):
            x = y + w1 * (z - y) + w2 * (x_tilde - y)
            g = sampler.estimate(p, snap, i, x, counter)
            y = reg_prox(p.reg, x - step_y * g, step_y)
            z = reg_prox(p.reg, z - eta * g, eta)
            ysum += y
        x_tilde = ysum / steps
        if rec.record(s, x_tilde):
            break
    return x_tilde, rec.trace

"""ASVRG: constant momentum for strongly convex problems, decreasing momentum
for non-strongly convex ones, and the momentum-free variant with omega = 1."""
from __future__ import annotations

import math

import numpy as np

from ..estimator import OracleCounter, take_snapshot, vr_grad, vr_grad_batch
from ..objective import CompositeProblem, reg_grad, reg_prox
from ..sampling import build_dist, floyd_subset, make_rng, sample_many
from .config import Recorder, SolverConfig
from .params import (ConfigError, batch_tau, check_omega, omega_bound, omega_next,
                     omega_optimal, restart_period, table_preset)


def epoch_lengths(cfg: SolverConfig, n: int, m: int):
    """m_1, m_2, ... with m_{s+1} = min(floor(rho m_s), m)."""
    ms = min(cfg.m1 if cfg.m1 is not None else max(1, n // 4), m)
    while True:
        yield ms
        ms = min(int(math.floor(cfg.rho_growth * ms)), m)


def default_m(cfg: SolverConfig, n: int) -> int:
    return cfg.m if cfg.m is not None else 2 * n


class _Sampler:
    """Per-run index source; single draws and batches consume the stream alike."""

    def __init__(self, problem: CompositeProblem, cfg: SolverConfig):
        self.n = problem.n
        self.b = cfg.batch
        self.dist = build_dist(problem.lipschitz, cfg.sampling)
        self.rng = make_rng(cfg.seed)
        self.use_batch = cfg.minibatch_path if cfg.minibatch_path is not None else cfg.batch > 1
        if self.use_batch and not self.dist.is_uniform:
            raise ConfigError("mini-batches are drawn uniformly; use sampling='uniform'")
        self.tau = batch_tau(self.n, self.b)

    def steps(self, ms: int) -> int:
        return max(1, ms // self.b) if self.use_batch else ms

    def draw(self, steps: int):
        if not self.use_batch:
            return sample_many(self.dist, self.rng, steps).tolist()
        u = self.rng.random(steps * self.b).reshape(steps, self.b)
        return [floyd_subset(self.n, self.b, row) for row in u]

    def estimate(self, p, snap, i, x, counter):
        if self.use_batch:
            return vr_grad_batch(p, self.dist, snap, i, x, counter)
        return vr_grad(p, self.dist, snap, i, x, counter)


def _momentum_epoch(p, sampler, snap, x, y, omega, eta, steps, counter, check):
    """Inner loop shared by Algorithms 1 and 2; returns (x, y, mean of x_t)."""
    xt = snap.anchor
    gamma = eta / omega
    reg = p.reg
    xsum = np.zeros(p.dim)
    for i in sampler.draw(steps):
        g = sampler.estimate(p, snap, i, x, counter)
        y = reg_prox(reg, y - gamma * g, gamma)
        x = xt + omega * (y - xt)
        if check and np.any(x != xt + omega * (y - xt)):
            raise AssertionError("x lost its coupling to y and the snapshot")
        xsum += x
    return x, y, xsum / steps


def _start(p, x0):
    x = np.zeros(p.dim) if x0 is None else np.array(x0, dtype=np.float64, copy=True)
    if x.shape != (p.dim,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({p.dim},)")
    return x


def sc_parameters(p: CompositeProblem, cfg: SolverConfig, l_tilde: float, tau_b: float = 1.0):
    """Resolve (eta, omega, m, restart period) for constant-momentum ASVRG."""
    m = default_m(cfg, p.n)
    restart = cfg.restart
    if cfg.omega_rule == "table_preset":
        pre = table_preset(cfg.option, m, p.mu, l_tilde)
        eta, omega = pre.eta, pre.omega
        m = pre.m or m
        if restart == "auto":
            restart = pre.restart if pre.restart is not None else restart_period(omega, eta, m, p.mu)
    elif cfg.omega_rule == "prop1_optimal":
        if cfg.eta is None:
            raise ConfigError("prop1_optimal needs eta")
        eta = cfg.eta
        omega = omega_optimal(m, p.mu, eta)
    elif cfg.omega_rule == "fixed":
        if cfg.eta is None or cfg.omega is None:
            raise ConfigError("a fixed momentum rule needs eta and omega")
        eta, omega = cfg.eta, cfg.omega
    else:
        raise ConfigError("asvrg_sc keeps omega constant; 'recursion' belongs to asvrg_nsc")
    if cfg.enforce_omega_bound:
        check_omega(omega, l_tilde, eta, tau_b)
    elif not omega > 0:
        raise ConfigError("omega must be > 0")
    if restart == "auto":
        restart = restart_period(omega, eta, m, p.mu)
    return eta, omega, m, restart


def asvrg_sc(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
             report=None):
    """Constant momentum, snapshot = mean of the inner x iterates.

    Returns (final snapshot, trace).
    """
    if not p.mu > 0:
        raise ConfigError("asvrg_sc needs mu > 0; use asvrg_nsc for non-strongly convex problems")
    sampler = _Sampler(p, cfg)
    l_tilde = sampler.dist.l_tilde
    eta, omega, m, restart = sc_parameters(p, cfg, l_tilde, sampler.tau)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, omega=omega, m=m, restart=restart, l_tilde=l_tilde)

    x_tilde = _start(p, x0)
    y_last = None
    recent = []
    if rec.record(0, x_tilde):
        return x_tilde, rec.trace
    lengths = epoch_lengths(cfg, p.n, m)
    for s in range(1, cfg.epochs + 1):
        ms = next(lengths)
        steps = sampler.steps(ms)
        snap = take_snapshot(p, x_tilde, counter)
        if cfg.option == "I" or y_last is None:
            x, y = x_tilde.copy(), x_tilde.copy()
        else:
            x, y = (1.0 - omega) * x_tilde + omega * y_last, y_last
        x, y, x_tilde = _momentum_epoch(p, sampler, snap, x, y, omega, eta, steps, counter,
                                        cfg.check_coupling)
        y_last = y
        recent.append(x_tilde)
        if restart and s % restart == 0:
            x_tilde = np.mean(recent[-restart:], axis=0)
            y_last = None
            recent = []
        if rec.record(s, x_tilde):
            break
    return x_tilde, rec.trace


def nsc_initial_omega(l_tilde: float, eta: float, tau_b: float = 1.0) -> float:
    w = omega_bound(l_tilde, eta, tau_b)
    if not w > 0:
        raise ConfigError(
            f"eta = {eta:g} gives omega_0 = {w:g} <= 0; need eta < 1/((1 + tau) L_tilde)")
    return w


def asvrg_nsc(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
              report=None):
    """Decreasing momentum from omega_0 = 1 - tau L eta/(1 - L eta)."""
    sampler = _Sampler(p, cfg)
    l_tilde = sampler.dist.l_tilde
    eta = cfg.eta if cfg.eta is not None else 1.0 / (3.0 * l_tilde)
    omega = nsc_initial_omega(l_tilde, eta, sampler.tau)
    if cfg.omega is not None:
        if cfg.enforce_omega_bound:
            check_omega(cfg.omega, l_tilde, eta, sampler.tau)
        omega = cfg.omega
    m = default_m(cfg, p.n)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, omega0=omega, m=m, l_tilde=l_tilde)
    rec.trace.omegas.append(omega)

    x_tilde = _start(p, x0)
    y_tilde = x_tilde.copy()
    if rec.record(0, x_tilde):
        return x_tilde, rec.trace
    lengths = epoch_lengths(cfg, p.n, m)
    for s in range(1, cfg.epochs + 1):
        steps = sampler.steps(next(lengths))
        snap = take_snapshot(p, x_tilde, counter)
        x = (1.0 - omega) * x_tilde + omega * y_tilde
        x, y_tilde, x_tilde = _momentum_epoch(p, sampler, snap, x, y_tilde.copy(), omega, eta,
                                              steps, counter, cfg.check_coupling)
        omega = omega_next(omega)
        rec.trace.omegas.append(omega)
        if rec.record(s, x_tilde):
            break
    return x_tilde, rec.trace


def asvrg_plain(p: CompositeProblem, cfg: SolverConfig, x0=None, f_star=None, callback=None,
                report=None):
    """Momentum-free variant (omega = 1): plain gradient steps on f + g, smooth g only.

    The next epoch starts from the last inner iterate; the snapshot is the
    inner mean, or the last iterate with ``snapshot_rule='last'``.
    """
    if not p.reg.smooth:
        raise ConfigError("asvrg_plain needs a smooth regularizer")
    sampler = _Sampler(p, cfg)
    l_tilde = sampler.dist.l_tilde
    eta = cfg.eta if cfg.eta is not None else 1.0 / (3.0 * l_tilde)
    m = default_m(cfg, p.n)
    counter = OracleCounter()
    rec = Recorder(p, cfg, counter, f_star, callback, report)
    rec.trace.params = dict(eta=eta, m=m, l_tilde=l_tilde)

    x_tilde = _start(p, x0)
    x = x_tilde.copy()
    if rec.record(0, x_tilde):
        return x_tilde, rec.trace
    lengths = epoch_lengths(cfg, p.n, m)
    has_g = p.reg.mu_g != 0
    for s in range(1, cfg.epochs + 1):
        steps = sampler.steps(next(lengths))
        snap = take_snapshot(p, x_tilde, counter)
        xsum = np.zeros(p.dim)
        for i in sampler.draw(steps):
            g = sampler.estimate(p, snap, i, x, counter)
            if has_g:
                g = g + reg_grad(p.reg, x)
            x = x - eta * g
            xsum += x
        x_tilde = xsum / steps if cfg.snapshot_rule == "average" else x.copy()
        if rec.record(s, x_tilde):
            break
    return x_tilde, rec.trace

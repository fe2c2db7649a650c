"""Quick invariant checks behind ``vropt check``.

Each check builds a tiny seeded problem and compares the library against an
independent computation (finite differences, exact enumeration, closed forms).
"""
from __future__ import annotations

import itertools

import numpy as np

from .data import SparseDataset, normalize_rows
from .estimator import bregman_gap, exact_variance, take_snapshot, tau, vr_grad, vr_grad_batch
from .objective import (Regularizer, component_grad, component_value, full_grad, hinge, logistic,
                        make_problem, moreau_grad, moreau_value, reg_prox, reg_value,
                        smoothed_hinge, squared)
from .sampling import build_dist, make_rng
from .solvers.params import omega_next


def _toy(rng, n=12, d=5, loss=None):
    A = rng.standard_normal((n, d))
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    ds = normalize_rows(SparseDataset.from_dense(A, y))
    return make_problem(ds, loss or logistic(0.01))


def check_gradients(rng):
    worst = 0.0
    for loss in (logistic(0.1), squared(0.1), smoothed_hinge(0.7)):
        p = _toy(rng, loss=loss)
        for _ in range(10):
            x = rng.standard_normal(p.dim)
            i = int(rng.integers(p.n))
            g = component_grad(p, i, x)
            h = 1e-5
            fd = np.array([(component_value(p, i, x + h * e) - component_value(p, i, x - h * e))
                           / (2 * h) for e in np.eye(p.dim)])
            worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
    return worst < 1e-6, f"max relative FD error {worst:.2e}"


def check_moreau(rng):
    p = _toy(rng, loss=hinge())
    bad, worst = 0, 0.0
    G = p.g_lipschitz
    for delta in (0.1, 1.0, 10.0):
        for _ in range(50):
            x = 2 * rng.standard_normal(p.dim)
            i = int(rng.integers(p.n))
            f = component_value(p, i, x)
            fe = moreau_value(p, i, x, delta)
            bad += not (fe <= f + 1e-12 and f <= fe + G * G / (2 * delta) + 1e-12)
            h = 1e-6
            fd = np.array([(moreau_value(p, i, x + h * e, delta) - moreau_value(p, i, x - h * e, delta))
                           / (2 * h) for e in np.eye(p.dim)])
            g = moreau_grad(p, i, x, delta)
            worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
    return bad == 0 and worst < 1e-5, f"{bad} sandwich violations, FD error {worst:.2e}"


def check_unbiased(rng):
    worst = 0.0
    for kind in ("uniform", "lipschitz"):
        p = _toy(rng)
        p = make_problem(p.data, p.loss)
        dist = build_dist(p.lipschitz * rng.uniform(0.5, 2.0, p.n), kind)
        for _ in range(5):
            x, xt = rng.standard_normal(p.dim), rng.standard_normal(p.dim)
            snap = take_snapshot(p, xt)
            mean = sum(dist.probs[i] * vr_grad(p, dist, snap, i, x) for i in range(p.n))
            worst = max(worst, np.linalg.norm(mean - full_grad(p, x)))
    return worst < 1e-12, f"max bias {worst:.2e}"


def check_variance(rng):
    bad = 0
    for kind in ("uniform", "lipschitz"):
        p = _toy(rng)
        dist = build_dist(p.lipschitz, kind)
        for _ in range(10):
            x, xt = rng.standard_normal(p.dim), rng.standard_normal(p.dim)
            snap = take_snapshot(p, xt)
            bad += exact_variance(p, dist, snap, x) > 2 * dist.l_tilde * bregman_gap(p, snap, x) + 1e-12
    return bad == 0, f"{bad} bound violations"


def check_minibatch(rng):
    p = _toy(rng, n=6)
    dist = build_dist(p.lipschitz)
    x, xt = rng.standard_normal(p.dim), rng.standard_normal(p.dim)
    snap = take_snapshot(p, xt)
    g = full_grad(p, x)
    bound = 2 * dist.l_tilde * bregman_gap(p, snap, x)
    bad = 0
    for b in range(1, p.n + 1):
        subsets = list(itertools.combinations(range(p.n), b))
        var = np.mean([np.sum((vr_grad_batch(p, dist, snap, s, x) - g) ** 2) for s in subsets])
        bad += var > tau(p.n, b) * bound + 1e-12
    return bad == 0, f"{bad} batch sizes over the bound"


def check_omega(rng):
    worst = 0.0
    ok = True
    for w0 in (0.3, 0.618, 0.9):
        w = w0
        for s in range(1, 51):
            wn = omega_next(w)
            worst = max(worst, abs((1 - wn) / wn ** 2 - 1 / w ** 2))
            ok &= wn <= 2 / (s + 2) + 1e-15
            w = wn
    return ok and worst < 1e-10, f"max recursion residual {worst:.2e}"


def check_prox(rng):
    worst = 0.0
    for reg in (Regularizer.l1(0.3), Regularizer.elastic_net(0.5, 0.2), Regularizer.l2(2.0)):
        for _ in range(20):
            v = rng.standard_normal(4)
            gam = float(rng.uniform(0.1, 2))
            z = reg_prox(reg, v, gam)
            base = reg_value(reg, z) + np.sum((z - v) ** 2) / (2 * gam)
            for _ in range(20):
                w = z + 1e-3 * rng.standard_normal(4)
                worst = max(worst, base - reg_value(reg, w) - np.sum((w - v) ** 2) / (2 * gam))
    return worst <= 1e-12, f"max improvement found near prox {worst:.2e}"


def check_alias(rng):
    L = rng.uniform(0.1, 3.0, 17)
    dist = build_dist(L, "lipschitz")
    err = float(np.max(np.abs(dist.table_probs() - L / L.sum())))
    return err < 1e-12, f"table vs target max error {err:.2e}"


CHECKS = {
    "component gradients": check_gradients,
    "Moreau envelope": check_moreau,
    "estimator unbiased": check_unbiased,
    "variance bound": check_variance,
    "mini-batch variance": check_minibatch,
    "momentum recursion": check_omega,
    "prox optimality": check_prox,
    "alias sampling": check_alias,
}


def run_checks(seed: int = 0):
    """Yield (name, passed, detail) for every diagnostic."""
    for name, fn in CHECKS.items():
        rng = make_rng(seed)
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail

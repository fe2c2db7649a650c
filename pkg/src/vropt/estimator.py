"""SVRG-type gradient estimators built around a snapshot point."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import CompositeProblem, full_grad, smooth_value
from .sampling import SamplingDist


class OracleCounter:
    """Counts component-gradient evaluations (one call = one grad f_i)."""

    def __init__(self):
        self.calls = 0

    def charge(self, k: int) -> None:
        self.calls += int(k)


@dataclass(frozen=True)
class Snapshot:
    anchor: np.ndarray
    full_gradient: np.ndarray
    anchor_value: float


def take_snapshot(p: CompositeProblem, x_anchor, counter: OracleCounter | None = None) -> Snapshot:
    """Anchor point with its full gradient; charges n oracle calls."""
    x = np.array(x_anchor, dtype=np.float64, copy=True)
    g = full_grad(p, x)
    if counter is not None:
        counter.charge(p.n)
    x.setflags(write=False)
    g.setflags(write=False)
    return Snapshot(x, g, smooth_value(p, x))


def vr_grad(p: CompositeProblem, dist: SamplingDist, snap: Snapshot, i: int, x,
            counter: OracleCounter | None = None) -> np.ndarray:
    """[grad f_i(x) - grad f_i(anchor)] / (n p_i) + full gradient at anchor."""
    if counter is not None:
        counter.charge(2)
    out = p.grad_diff(i, x, snap.anchor, 1.0 / (p.n * dist.probs[i]))
    out += snap.full_gradient
    return out


def vr_grad_batch(p: CompositeProblem, dist: SamplingDist, snap: Snapshot, batch, x,
                  counter: OracleCounter | None = None) -> np.ndarray:
    """Mini-batch estimator: mean over the batch of the reweighted differences."""
    batch = np.asarray(batch, dtype=np.int64)
    b = batch.size
    if counter is not None:
        counter.charge(2 * b)
    out = np.zeros(p.dim)
    for i in batch:
        out += p.grad_diff(int(i), x, snap.anchor, 1.0 / (p.n * dist.probs[i]))
    if b > 1:
        out /= b
    out += snap.full_gradient
    return out


def tau(n: int, b: int) -> float:
    """(n - b) / (b (n - 1)); taken as 0 when n = 1."""
    if not 1 <= b <= n:
        raise ValueError(f"batch size {b} outside [1, {n}]")
    if n == 1:
        return 0.0
    return (n - b) / (b * (n - 1))


def exact_variance(p: CompositeProblem, dist: SamplingDist, snap: Snapshot, x) -> float:
    """E_i ||vr_grad(i) - grad f(x)||^2 summed exactly over i (O(n d), diagnostics only)."""
    x = np.asarray(x, dtype=np.float64)
    g = full_grad(p, x)
    total = 0.0
    for i in range(p.n):
        e = vr_grad(p, dist, snap, i, x) - g
        total += dist.probs[i] * float(e @ e)
    return total


def bregman_gap(p: CompositeProblem, snap: Snapshot, x) -> float:
    """f(anchor) - f(x) - <grad f(x), anchor - x>, the right-hand factor of the variance bounds."""
    x = np.asarray(x, dtype=np.float64)
    return snap.anchor_value - smooth_value(p, x) + float(full_grad(p, x) @ (x - snap.anchor))

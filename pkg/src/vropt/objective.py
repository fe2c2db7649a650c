"""Composite objectives F(x) = (1/n) sum_i f_i(x) + g(x) over a linear model.

Every component has the form f_i(x) = phi(a_i^T x; b_i) + (lam1/2)||x||^2,
so gradients are phi'(a_i^T x) a_i + lam1 x. The scalar loss phi is logistic,
squared, hinge, or the Moreau envelope of hinge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import expit

from .data import SparseDataset

LOSS_KINDS = ("logistic", "squared", "hinge", "smoothed_hinge")
REG_KINDS = ("zero", "l2", "l1", "elastic_net")


class UnsupportedOperation(TypeError):
    pass


@dataclass(frozen=True)
class ComponentLoss:
    kind: str
    embedded_l2: float = 0.0
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if not (self.embedded_l2 >= 0 and math.isfinite(self.embedded_l2)):
            raise ValueError("embedded_l2 must be finite and >= 0")
        if self.kind == "smoothed_hinge":
            if self.delta is None or not self.delta > 0:
                raise ValueError("smoothed_hinge requires delta > 0")
        if self.kind in ("hinge", "smoothed_hinge") and self.embedded_l2 != 0:
            raise ValueError("put the l2 term of an SVM in the regularizer")

    @property
    def smooth(self) -> bool:
        return self.kind != "hinge"


def logistic(lam1: float = 0.0) -> ComponentLoss:
    return ComponentLoss("logistic", lam1)


def squared(lam1: float = 0.0) -> ComponentLoss:
    return ComponentLoss("squared", lam1)


def hinge() -> ComponentLoss:
    return ComponentLoss("hinge")


def smoothed_hinge(delta: float) -> ComponentLoss:
    return ComponentLoss("smoothed_hinge", 0.0, delta)


@dataclass(frozen=True)
class Regularizer:
    """g(x) = (mu_g/2)||x - center||^2 + lam||x||_1.

    ``center`` is only used by the adaptive-regularization reduction; it
    defaults to the origin.
    """

    kind: str = "zero"
    mu_g: float = 0.0
    lam: float = 0.0
    center: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in REG_KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        for v in (self.mu_g, self.lam):
            if not (math.isfinite(v) and v >= 0):
                raise ValueError("regularizer coefficients must be finite and >= 0")
        if self.kind in ("zero", "l1") and self.mu_g:
            raise ValueError(f"{self.kind} regularizer takes no mu_g")
        if self.kind in ("zero", "l2") and self.lam:
            raise ValueError(f"{self.kind} regularizer takes no lam")

    @property
    def smooth(self) -> bool:
        return self.lam == 0.0

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def l2(cls, mu_g: float):
        return cls("l2", mu_g=mu_g)

    @classmethod
    def l1(cls, lam: float):
        return cls("l1", lam=lam)

    @classmethod
    def elastic_net(cls, mu_g: float, lam: float):
        return cls("elastic_net", mu_g=mu_g, lam=lam)


def soft_threshold(v: np.ndarray, thresh: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def reg_value(reg: Regularizer, x: np.ndarray) -> float:
    val = 0.0
    if reg.mu_g:
        diff = x if reg.center is None else x - reg.center
        val += 0.5 * reg.mu_g * float(diff @ diff)
    if reg.lam:
        val += reg.lam * float(np.abs(x).sum())
    return val


def reg_grad(reg: Regularizer, x: np.ndarray) -> np.ndarray:
    if not reg.smooth:
        raise UnsupportedOperation("l1 term has no gradient")
    if not reg.mu_g:
        return np.zeros_like(x)
    return reg.mu_g * (x if reg.center is None else x - reg.center)


def reg_prox(reg: Regularizer, v: np.ndarray, gamma: float) -> np.ndarray:
    """argmin_y (1/(2 gamma))||y - v||^2 + g(y)."""
    if not gamma > 0:
        raise ValueError("prox step gamma must be > 0")
    if reg.kind == "zero":
        return np.array(v, dtype=np.float64, copy=True)
    if reg.mu_g and reg.center is not None:
        v = v + gamma * reg.mu_g * reg.center
    out = soft_threshold(v, gamma * reg.lam) if reg.lam else np.array(v, dtype=np.float64)
    if reg.mu_g:
        out /= 1.0 + gamma * reg.mu_g
    return out


# scalar losses phi(z; b) and their z-derivatives ------------------------------

def _hinge_env_scalar(m: float, c: float):
    """Envelope of t -> max(0, 1 - t) with quadratic weight c/2, at margin m.

    Returns (value, prox point t*).
    """
    if m >= 1.0:
        return 0.0, m
    if m <= 1.0 - 1.0 / c:
        return 1.0 - m - 0.5 / c, m + 1.0 / c
    return 0.5 * c * (1.0 - m) ** 2, 1.0


def _phi_value(loss: ComponentLoss, z, b, sqn):
    """Vectorised scalar loss value; z = a^T x."""
    if loss.kind == "logistic":
        return np.logaddexp(0.0, -b * z)
    if loss.kind == "squared":
        return 0.5 * (z - b) ** 2
    m = b * z
    if loss.kind == "hinge":
        return np.maximum(0.0, 1.0 - m)
    c = _env_weight(loss.delta, sqn)
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = 0.5 * c * (1.0 - m) ** 2
        low = 1.0 - m - 0.5 / c
    return np.where(m >= 1.0, 0.0, np.where(m <= 1.0 - 1.0 / c, low, mid))


def _phi_deriv(loss: ComponentLoss, z, b, sqn):
    if loss.kind == "logistic":
        return -b * expit(-b * z)
    if loss.kind == "squared":
        return z - b
    if loss.kind == "hinge":
        raise UnsupportedOperation("raw hinge loss has no gradient; smooth it first")
    m = b * z
    c = _env_weight(loss.delta, sqn)
    # d/dm of the envelope is -c (t* - m), clipped to [-1, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        d = -np.clip(c * (1.0 - m), 0.0, 1.0)
    return b * np.where(m >= 1.0, 0.0, d)


def _env_weight(delta, sqn):
    # envelope in x with weight delta/2 acts on the margin with weight delta/||a||^2
    with np.errstate(divide="ignore"):
        return np.where(sqn > 0, delta / np.where(sqn > 0, sqn, 1.0), np.inf)


def _phi_deriv_scalar(loss: ComponentLoss, z: float, b: float, sqn: float) -> float:
    kind = loss.kind
    if kind == "logistic":
        t = -b * z
        if t >= 0:
            e = math.exp(-t)
            return -b / (1.0 + e)
        e = math.exp(t)
        return -b * e / (1.0 + e)
    if kind == "squared":
        return z - b
    if kind == "hinge":
        raise UnsupportedOperation("raw hinge loss has no gradient; smooth it first")
    if sqn == 0.0:
        return 0.0
    m = b * z
    if m >= 1.0:
        return 0.0
    c = loss.delta / sqn
    return -b * min(c * (1.0 - m), 1.0)


@dataclass(frozen=True)
class CompositeProblem:
    """Data, component loss, regularizer, and the constants solvers need."""

    data: SparseDataset
    loss: ComponentLoss
    reg: Regularizer
    mu: float
    lipschitz: np.ndarray
    g_lipschitz: float

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def dim(self) -> int:
        return self.data.dim

    def l_tilde(self, probs: Optional[np.ndarray] = None) -> float:
        """max_j L_j / (n p_j); uniform sampling when ``probs`` is None."""
        if probs is None:
            return float(self.lipschitz.max())
        return float(np.max(self.lipschitz / (self.n * np.asarray(probs))))

    def with_loss(self, loss: ComponentLoss) -> "CompositeProblem":
        return make_problem(self.data, loss, self.reg, mu=self.mu)

    def with_reg(self, reg: Regularizer, mu: Optional[float] = None) -> "CompositeProblem":
        return replace(self, reg=reg, mu=self.mu if mu is None else mu)

    # fused helpers used by the estimators and solvers -----------------------

    def margin(self, i: int, x: np.ndarray) -> float:
        s, e = self.data.indptr[i], self.data.indptr[i + 1]
        return float(self.data.values[s:e] @ x[self.data.indices[s:e]])

    def scalar_deriv(self, i: int, z: float) -> float:
        return _phi_deriv_scalar(self.loss, z, self.data.labels[i], self.data.squared_norms[i])

    def grad_diff(self, i: int, x: np.ndarray, x_ref: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """scale * (grad f_i(x) - grad f_i(x_ref)), dense."""
        s, e = self.data.indptr[i], self.data.indptr[i + 1]
        idx, val = self.data.indices[s:e], self.data.values[s:e]
        b, sqn = self.data.labels[i], self.data.squared_norms[i]
        d = (_phi_deriv_scalar(self.loss, float(val @ x[idx]), b, sqn)
             - _phi_deriv_scalar(self.loss, float(val @ x_ref[idx]), b, sqn))
        lam1 = self.loss.embedded_l2
        out = (scale * lam1) * (x - x_ref) if lam1 else np.zeros(x.shape[0])
        out[idx] += (scale * d) * val
        return out


def lipschitz_constants(data: SparseDataset, loss: ComponentLoss) -> np.ndarray:
    """Per-component gradient Lipschitz constants L_i."""
    sqn = data.squared_norms
    lam1 = loss.embedded_l2
    if loss.kind == "logistic":
        L = sqn / 4.0 + lam1
    elif loss.kind == "squared":
        L = sqn + lam1
    elif loss.kind == "smoothed_hinge":
        # the envelope taken in x is delta-smooth whatever ||a_i|| is; zero rows are constant
        L = np.where(sqn > 0, loss.delta, 0.0)
    else:
        raise UnsupportedOperation("raw hinge loss is not smooth")
    # sampling needs L_i > 0; a component with zero curvature gets a tiny floor
    return np.maximum(L, np.finfo(float).tiny * 1e10)


def make_problem(data: SparseDataset, loss: ComponentLoss, reg: Regularizer | None = None,
                 mu: Optional[float] = None) -> CompositeProblem:
    """Build a problem; the strong-convexity constant defaults to lam1 + mu_g."""
    reg = reg or Regularizer.zero()
    if data.dim == 0:
        raise ValueError("dataset has no features")
    if loss.kind in ("hinge", "smoothed_hinge") and not np.all(np.abs(data.labels) == 1):
        raise ValueError("hinge losses need +/-1 labels")
    if mu is None:
        mu = loss.embedded_l2 + reg.mu_g
    if loss.kind == "hinge":
        L = np.full(data.n, np.inf)
    else:
        L = lipschitz_constants(data, loss)
    G = float(np.sqrt(data.squared_norms.max())) if loss.kind in ("hinge", "smoothed_hinge") else 0.0
    L.setflags(write=False)
    return CompositeProblem(data, loss, reg, float(mu), L, G)


def _check_x(p: CompositeProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.dim,):
        raise ValueError(f"x has shape {x.shape}, expected ({p.dim},)")
    return x


def component_value(p: CompositeProblem, i: int, x) -> float:
    x = _check_x(p, x)
    if not 0 <= i < p.n:
        raise IndexError(i)
    z = p.margin(i, x)
    val = float(_phi_value(p.loss, z, p.data.labels[i], p.data.squared_norms[i]))
    if p.loss.embedded_l2:
        val += 0.5 * p.loss.embedded_l2 * float(x @ x)
    return val


def component_grad(p: CompositeProblem, i: int, x) -> np.ndarray:
    x = _check_x(p, x)
    if not 0 <= i < p.n:
        raise IndexError(i)
    idx, val = p.data.row(i)
    d = p.scalar_deriv(i, float(val @ x[idx]))
    out = p.loss.embedded_l2 * x if p.loss.embedded_l2 else np.zeros(p.dim)
    out[idx] += d * val
    return out


def full_grad(p: CompositeProblem, x) -> np.ndarray:
    """(1/n) sum_i grad f_i(x); sparse products sum rows in index order."""
    x = _check_x(p, x)
    A = p.data.to_csr()
    d = _phi_deriv(p.loss, A @ x, p.data.labels, p.data.squared_norms)
    g = (A.T @ d) / p.n
    if p.loss.embedded_l2:
        g = g + p.loss.embedded_l2 * x
    return g


def smooth_value(p: CompositeProblem, x) -> float:
    """f(x) = (1/n) sum_i f_i(x), without the regularizer."""
    x = _check_x(p, x)
    z = p.data.to_csr() @ x
    val = float(np.sum(_phi_value(p.loss, z, p.data.labels, p.data.squared_norms))) / p.n
    if p.loss.embedded_l2:
        val += 0.5 * p.loss.embedded_l2 * float(x @ x)
    return val


def objective_value(p: CompositeProblem, x) -> float:
    return smooth_value(p, x) + reg_value(p.reg, _check_x(p, x))


# Moreau envelope of the hinge component -----------------------------------------

def _hinge_row(p: CompositeProblem, i: int, x, delta: float):
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if p.loss.kind not in ("hinge", "smoothed_hinge"):
        raise UnsupportedOperation("Moreau smoothing is defined here for hinge losses")
    x = _check_x(p, x)
    idx, val = p.data.row(i)
    return x, idx, val, float(p.data.labels[i]), float(p.data.squared_norms[i])


def moreau_prox(p: CompositeProblem, i: int, x, delta: float) -> np.ndarray:
    """argmin_y f_i(y) + (delta/2)||x - y||^2 for the hinge component f_i."""
    x, idx, val, b, sqn = _hinge_row(p, i, x, delta)
    y = np.array(x, dtype=np.float64, copy=True)
    if sqn == 0.0:
        return y
    m = b * float(val @ x[idx])
    _, t = _hinge_env_scalar(m, delta / sqn)
    # the minimiser moves x along a_i until the margin reaches t
    y[idx] += (b * (t - m) / sqn) * val
    return y


def moreau_value(p: CompositeProblem, i: int, x, delta: float) -> float:
    x, idx, val, b, sqn = _hinge_row(p, i, x, delta)
    m = b * float(val @ x[idx])
    if sqn == 0.0:
        return max(0.0, 1.0 - m)
    return _hinge_env_scalar(m, delta / sqn)[0]


def moreau_grad(p: CompositeProblem, i: int, x, delta: float) -> np.ndarray:
    """delta * (x - prox(x)), the gradient of the envelope."""
    x = _check_x(p, x)
    return delta * (x - moreau_prox(p, i, x, delta))

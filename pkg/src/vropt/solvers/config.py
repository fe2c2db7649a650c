from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional, Union

import numpy as np

from .params import ConfigError

METHODS = ("asvrg_sc", "asvrg_nsc", "asvrg_plain", "svrg", "prox_sgd", "saga", "katyusha")
OMEGA_RULES = ("fixed", "prop1_optimal", "table_preset", "recursion")


@dataclass(frozen=True)
class SolverConfig:
    """Everything a single solver run needs besides the problem.

    ``m`` and ``m1`` default to 2n and n/4; ``restart`` is None, "auto", or a
    positive epoch count. ``enforce_omega_bound=False`` lets ASVRG run outside
    the admissible momentum region (used to compare omega = 1 against
    the momentum-free variant).
    """

    method: str = "asvrg_sc"
    eta: Optional[float] = None
    omega: Optional[float] = None
    omega_rule: str = "table_preset"
    option: str = "I"
    restart: Union[None, str, int] = None
    epochs: int = 20
    m: Optional[int] = None
    m1: Optional[int] = None
    rho_growth: float = 2.0
    batch: int = 1
    minibatch_path: Optional[bool] = None
    sampling: str = "uniform"
    seed: int = 0
    tol: Optional[float] = None
    snapshot_rule: str = "average"
    katyusha_omega1: Optional[float] = None
    katyusha_omega2: float = 0.5
    enforce_omega_bound: bool = True
    check_coupling: bool = False
    name: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.omega_rule not in OMEGA_RULES:
            raise ConfigError(f"unknown omega rule {self.omega_rule!r}")
        if self.option not in ("I", "II"):
            raise ConfigError("option must be 'I' or 'II'")
        if self.eta is not None and not (self.eta > 0 and math.isfinite(self.eta)):
            raise ConfigError("eta must be a positive finite number")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.batch < 1:
            raise ConfigError("batch size must be >= 1")
        if self.rho_growth < 1:
            raise ConfigError("rho_growth must be >= 1")
        for k in ("m", "m1"):
            v = getattr(self, k)
            if v is not None and v < 1:
                raise ConfigError(f"{k} must be >= 1")
        if self.restart not in (None, "auto") and not (isinstance(self.restart, int) and self.restart >= 1):
            raise ConfigError("restart must be None, 'auto', or a positive integer")
        if self.snapshot_rule not in ("average", "last"):
            raise ConfigError("snapshot_rule must be 'average' or 'last'")
        if self.sampling not in ("uniform", "lipschitz"):
            raise ConfigError(f"unknown sampling {self.sampling!r}")
        if self.batch > 1 and self.sampling != "uniform":
            raise ConfigError("mini-batches are drawn uniformly; use sampling='uniform'")

    @property
    def label(self) -> str:
        return self.name or self.method

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class TraceRecord:
    epoch: int
    oracle_calls: int
    elapsed_s: float
    objective: float
    gap: Optional[float] = None


@dataclass
class Trace:
    records: list = field(default_factory=list)
    omegas: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, k):
        return self.records[k]

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def gaps(self) -> np.ndarray:
        return np.array([np.nan if r.gap is None else r.gap for r in self.records])

    @property
    def oracle_calls(self) -> np.ndarray:
        return np.array([r.oracle_calls for r in self.records])


Callback = Callable[[int, np.ndarray, float], Optional[bool]]


class Recorder:
    """Appends one TraceRecord per epoch and decides on early stopping."""

    def __init__(self, problem, cfg: SolverConfig, counter, f_star=None, callback=None,
                 report=None):
        from ..objective import objective_value

        self._value = objective_value
        self.problem = report if report is not None else problem
        self.cfg = cfg
        self.counter = counter
        self.f_star = f_star
        self.callback = callback
        self.trace = Trace()
        self.t0 = time.perf_counter()

    def record(self, epoch: int, x: np.ndarray) -> bool:
        """Log epoch ``epoch`` at snapshot ``x``; True means stop."""
        F = self._value(self.problem, x)
        gap = None if self.f_star is None else F - self.f_star
        self.trace.records.append(TraceRecord(
            epoch, self.counter.calls, time.perf_counter() - self.t0, F, gap))
        stop = False
        if self.callback is not None and self.callback(epoch, x, F):
            stop = True
        if gap is not None and self.cfg.tol is not None and gap <= self.cfg.tol:
            stop = True
        return stop

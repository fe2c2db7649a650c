"""Experiment harness: synthetic data, reference optima, solver suites, CSV traces."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .data import SparseDataset, load_libsvm, normalize_rows
from .objective import ComponentLoss, CompositeProblem, Regularizer, make_problem, objective_value
from .sampling import make_rng
from .solvers import ConfigError, SolverConfig, solve
from .solvers.asvrg import asvrg_nsc, asvrg_sc
from .solvers.reductions import adapt_smooth

log = logging.getLogger(__name__)

CSV_COLUMNS = ("epoch", "oracle_calls", "effective_passes", "elapsed_s", "objective", "gap")
GAP_THRESHOLDS = (1e-2, 1e-4, 1e-6)


# synthetic data -------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 1000
    d: int = 20
    density: float = 1.0
    noise: float = 0.1
    normalize: bool = True
    feature_decay: float = 1.0

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown synthetic keys: {sorted(unknown)}")
        spec = cls(**d)
        if spec.n < 1 or spec.d < 1:
            raise ValueError("synthetic n and d must be >= 1")
        if not 0 < spec.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if not 0 < spec.feature_decay <= 1:
            raise ValueError("feature_decay must lie in (0, 1]")
        return spec


def gen_synthetic(spec: SyntheticSpec | dict, seed: int) -> SparseDataset:
    """Gaussian rows, optionally sparsified to ``density`` and unit-normalized;
    labels are sign(a^T w* + noise) for a planted Gaussian w*.

    ``feature_decay`` < 1 scales column j by decay**j before normalizing,
    which spreads the Hessian spectrum (an ill-conditioned stand-in for
    sparse text data).
    """
    if isinstance(spec, dict):
        spec = SyntheticSpec.from_dict(spec)
    rng = make_rng(seed)
    A = rng.standard_normal((spec.n, spec.d))
    if spec.feature_decay < 1:
        A *= spec.feature_decay ** np.arange(spec.d)
    if spec.density < 1:
        A *= rng.random((spec.n, spec.d)) < spec.density
    w_star = rng.standard_normal(spec.d)
    if spec.normalize:
        norms = np.linalg.norm(A, axis=1)
        nz = norms > 0
        A[nz] /= norms[nz, None]
    resp = A @ w_star + spec.noise * rng.standard_normal(spec.n)
    return SparseDataset.from_dense(A, np.where(resp >= 0, 1.0, -1.0))


# reference optimum ----------------------------------------------------------------

@dataclass
class ReferenceOptimum:
    x_star: np.ndarray
    f_star: float
    tol: float
    method: str
    oracle_calls: int

    def to_json(self) -> str:
        return json.dumps(dict(x_star=self.x_star.tolist(), f_star=self.f_star, tol=self.tol,
                               method=self.method, oracle_calls=self.oracle_calls), indent=1)

    @classmethod
    def from_json(cls, text: str, problem: CompositeProblem | None = None) -> "ReferenceOptimum":
        d = json.loads(text)
        ref = cls(np.asarray(d["x_star"], dtype=np.float64), float(d["f_star"]),
                  float(d["tol"]), d["method"], int(d["oracle_calls"]))
        if problem is not None:
            F = objective_value(problem, ref.x_star)
            if abs(F - ref.f_star) > 1e-12 * max(1.0, abs(F)):
                raise ValueError(f"stored f_star {ref.f_star!r} does not match F(x_star) = {F!r}")
        return ref


class _Tracker:
    """Stops once both F and x settle. F alone saturates near the optimum
    (it is flat to second order), so x must stop moving too."""

    def __init__(self, tol: float, min_epochs: int = 3):
        self.tol = tol
        self.xtol = max(tol, 100 * np.finfo(float).eps)
        self.min_epochs = min_epochs
        self.best_F = math.inf
        self.prev = None
        self.prev_x = None
        self.change = math.inf
        self.x_change = math.inf
        self.count = 0

    def __call__(self, epoch, x, F):
        self.count += 1
        self.best_F = min(self.best_F, F)
        if self.prev is not None:
            self.change = abs(self.prev - F)
            self.x_change = float(np.linalg.norm(x - self.prev_x))
        self.prev, self.prev_x = F, np.array(x, copy=True)
        return (self.count > self.min_epochs
                and self.change < self.tol * max(1.0, abs(F))
                and self.x_change <= self.xtol * max(1.0, float(np.linalg.norm(x))))


def compute_reference(p: CompositeProblem, tol: float = 1e-12, max_epochs: int = 400,
                      cfg: SolverConfig | None = None, x0=None) -> ReferenceOptimum:
    """High-accuracy optimum by running ASVRG until the epoch-to-epoch change
    in F drops below tol * max(1, |F|) and the snapshot moves by at most
    max(tol, 100 eps) relative. F_star is the best value seen."""
    track = _Tracker(tol)
    if p.loss.kind == "hinge":
        base = cfg or SolverConfig(omega_rule="table_preset", option="II", restart="auto",
                                   m=p.n, epochs=max(1, max_epochs // 20), seed=0)
        _, tr = adapt_smooth(p, base, stages=20, x0=x0, callback=track)
        method = "adapt_smooth"
    elif p.mu > 0:
        base = cfg or SolverConfig(omega_rule="table_preset", option="II", restart="auto",
                                   m=2 * p.n, m1=2 * p.n, epochs=max_epochs, seed=0)
        _, tr = asvrg_sc(p, base.with_(epochs=max_epochs), x0=x0, callback=track)
        method = "asvrg_sc"
    else:
        base = cfg or SolverConfig(method="asvrg_nsc", m=2 * p.n, m1=2 * p.n, seed=0)
        _, tr = asvrg_nsc(p, base.with_(epochs=max_epochs), x0=x0, callback=track)
        method = "asvrg_nsc"
    # F has flattened to rounding noise by now; the last snapshot is the most accurate x
    x_star = track.prev_x
    f_star = min(objective_value(p, x_star), track.best_F)
    return ReferenceOptimum(x_star, f_star, track.change, method, int(tr.records[-1].oracle_calls))


# experiment configs ---------------------------------------------------------------

@dataclass
class ExperimentConfig:
    problem: dict
    solvers: list
    data_path: Optional[str] = None
    synthetic: Optional[dict] = None
    normalize: bool = True
    reference: dict = field(default_factory=lambda: {"policy": "compute", "tol": 1e-12})
    output_dir: str = "vropt_out"
    seed: int = 0
    record_wall_time: bool = True
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, d: dict, base_dir=".") -> "ExperimentConfig":
        d = dict(d)
        data = d.pop("data", {})
        if not isinstance(data, dict):
            raise ConfigError("[data] must be a table")
        solvers = d.pop("solvers", [])
        known = {"problem", "reference", "output_dir", "seed", "record_wall_time"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
        if ("path" in data) == ("synthetic" in data):
            raise ConfigError("[data] needs exactly one of 'path' or [data.synthetic]")
        cfg = cls(problem=d.get("problem", {}), solvers=list(solvers),
                  data_path=data.get("path"), synthetic=data.get("synthetic"),
                  normalize=data.get("normalize", True),
                  reference=d.get("reference", {"policy": "compute", "tol": 1e-12}),
                  output_dir=d.get("output_dir", "vropt_out"), seed=int(d.get("seed", 0)),
                  record_wall_time=bool(d.get("record_wall_time", True)), base_dir=Path(base_dir))
        cfg.solver_configs()  # fail early on bad solver tables
        if cfg.synthetic is not None:
            SyntheticSpec.from_dict(cfg.synthetic)
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(load_toml(path), base_dir=path.parent)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def solver_configs(self) -> list[SolverConfig]:
        out = []
        for k, s in enumerate(self.solvers):
            s = dict(s)
            s.setdefault("seed", self.seed)
            try:
                out.append(SolverConfig.from_dict(s))
            except TypeError as exc:
                raise ConfigError(f"solver #{k}: {exc}") from None
        return out

    def dataset(self) -> SparseDataset:
        if self.synthetic is not None:
            return gen_synthetic(self.synthetic, self.seed)
        ds = load_libsvm(self.resolve(self.data_path))
        return normalize_rows(ds) if self.normalize else ds

    def build_problem(self, ds: SparseDataset | None = None) -> CompositeProblem:
        return problem_from_spec(ds if ds is not None else self.dataset(), self.problem)


def load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def problem_from_spec(ds: SparseDataset, spec: dict) -> CompositeProblem:
    """Problem from a {loss, lambda1, lambda2, mu_g, delta, mu} table."""
    spec = dict(spec)
    kind = spec.pop("loss", "logistic")
    lam1 = float(spec.pop("lambda1", 0.0))
    lam2 = float(spec.pop("lambda2", 0.0))
    mu_g = float(spec.pop("mu_g", 0.0))
    delta = spec.pop("delta", None)
    mu = spec.pop("mu", None)
    if spec:
        raise ConfigError(f"unknown problem keys: {sorted(spec)}")
    loss = ComponentLoss(kind, lam1, delta)
    if lam2 and mu_g:
        reg = Regularizer.elastic_net(mu_g, lam2)
    elif lam2:
        reg = Regularizer.l1(lam2)
    elif mu_g:
        reg = Regularizer.l2(mu_g)
    else:
        reg = Regularizer.zero()
    return make_problem(ds, loss, reg, mu=None if mu is None else float(mu))


# traces and summaries -------------------------------------------------------------

def trace_rows(trace, n: int, f_star: float | None, wall_time: bool = True):
    """CSV rows; gap uses the best objective so far and clamps tiny negatives."""
    best = math.inf
    for r in trace.records:
        best = min(best, r.objective)
        gap = ""
        if f_star is not None:
            g = best - f_star
            if g < 0:
                if g < -1e-10:
                    log.warning("objective %.17g below reference %.17g", best, f_star)
                else:
                    log.info("clamping gap %.3g to 0", g)
                    g = 0.0
            gap = repr(float(g))
        yield (r.epoch, r.oracle_calls, repr(r.oracle_calls / n),
               repr(float(r.elapsed_s)) if wall_time else "0.0", repr(float(r.objective)), gap)


def write_trace_csv(path, trace, n: int, f_star=None, wall_time: bool = True) -> list:
    """Write one run's CSV; returns the rows written."""
    rows = list(trace_rows(trace, n, f_star, wall_time))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)
    return rows


def first_crossing(calls, gaps, threshold: float):
    """Oracle calls at the first record with gap <= threshold (no interpolation)."""
    for c, g in zip(calls, gaps):
        if g is not None and not math.isnan(g) and g <= threshold:
            return int(c)
    return None


@dataclass
class RunResult:
    label: str
    csv_path: Path
    x: np.ndarray
    trace: object
    gaps: list


@dataclass
class SuiteResult:
    runs: list
    reference: Optional[ReferenceOptimum]
    summary_path: Path
    n: int

    def summary_rows(self):
        for r in self.runs:
            calls = [rec.oracle_calls for rec in r.trace.records]
            for t in GAP_THRESHOLDS:
                c = first_crossing(calls, r.gaps, t)
                yield (r.label, t, c, None if c is None else c / self.n)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("VROPT_THREADS", "1")))
    except ValueError:
        return 1


def load_or_compute_reference(cfg: ExperimentConfig, p: CompositeProblem) -> ReferenceOptimum | None:
    ref = cfg.reference or {}
    policy = ref.get("policy", "compute")
    if policy == "none":
        return None
    if policy == "file":
        return ReferenceOptimum.from_json(cfg.resolve(ref["path"]).read_text(), p)
    if policy == "compute":
        kw = {k: ref[k] for k in ("max_epochs",) if k in ref}
        return compute_reference(p, float(ref.get("tol", 1e-12)), **kw)
    raise ConfigError(f"unknown reference policy {policy!r}")


def run_suite(cfg: ExperimentConfig) -> SuiteResult:
    """Run every configured solver and write one CSV per run plus summary.csv."""
    solver_cfgs = cfg.solver_configs()
    ds = cfg.dataset()
    p = cfg.build_problem(ds)
    for sc in solver_cfgs:
        solve(p, sc.with_(epochs=0))  # parameter checks happen before anything is written
    out = cfg.resolve(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    ref = load_or_compute_reference(cfg, p) if solver_cfgs else None
    f_star = None if ref is None else ref.f_star

    def run(k_sc):
        k, sc = k_sc
        x, tr = solve(p, sc, f_star=f_star)
        path = out / f"{k:02d}_{sc.label}.csv"
        rows = write_trace_csv(path, tr, p.n, f_star, cfg.record_wall_time)
        gaps = [float(g) if g != "" else None for *_, g in rows]
        return RunResult(sc.label, path, x, tr, gaps)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        runs = list(pool.map(run, enumerate(solver_cfgs)))

    summary = out / "summary.csv"
    res = SuiteResult(runs, ref, summary, p.n)
    with open(summary, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("solver", "gap_threshold", "oracle_calls", "effective_passes"))
        for label, t, c, passes in res.summary_rows():
            w.writerow((label, repr(t), "" if c is None else c,
                        "" if passes is None else repr(passes)))
    if ref is not None:
        (out / "reference.json").write_text(ref.to_json())
    return res

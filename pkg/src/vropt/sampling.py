"""Index sampling: uniform or Lipschitz-proportional single draws, uniform subsets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SAMPLING_KINDS = ("uniform", "lipschitz", "custom")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; identical seeds give identical draws on every platform."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose's alias table: cell j keeps j with probability prob[j], else alias[j]."""
    n = probs.size
    scaled = probs * n
    prob = np.zeros(n)
    alias = np.arange(n)
    small = [j for j in range(n) if scaled[j] < 1.0]
    large = [j for j in range(n) if scaled[j] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    # leftovers are 1 up to rounding
    for j in large + small:
        prob[j] = 1.0
        alias[j] = j
    return prob, alias


@dataclass(frozen=True)
class SamplingDist:
    probs: np.ndarray
    prob_row: np.ndarray
    alias_row: np.ndarray
    kind: str
    l_tilde: float

    @property
    def n(self) -> int:
        return self.probs.size

    @property
    def is_uniform(self) -> bool:
        return self.kind == "uniform"

    def table_probs(self) -> np.ndarray:
        """Exact probability of each index implied by the alias table."""
        n = self.n
        out = self.prob_row / n
        np.add.at(out, self.alias_row, (1.0 - self.prob_row) / n)
        return out


def build_dist(lipschitz, kind: str = "uniform", probs=None) -> SamplingDist:
    """Sampling distribution plus L_tilde = max_j L_j / (n p_j).

    ``kind='custom'`` takes explicit ``probs``.
    """
    L = np.asarray(lipschitz, dtype=np.float64)
    if L.ndim != 1 or L.size < 1:
        raise ValueError("need a non-empty 1-D sequence of Lipschitz constants")
    if np.any(~(L > 0)) or np.any(~np.isfinite(L)):
        raise ValueError("Lipschitz constants must be finite and > 0")
    n = L.size
    if kind == "uniform":
        p = np.full(n, 1.0 / n)
        l_tilde = float(L.max())
    elif kind == "lipschitz":
        p = L / L.sum()
        l_tilde = float(L.mean())
    elif kind == "custom":
        if probs is None:
            raise ValueError("custom sampling needs probs")
        p = np.asarray(probs, dtype=np.float64)
        if p.shape != L.shape:
            raise ValueError("probs must match lipschitz in length")
        if np.any(~(p > 0)):
            raise ValueError("every probability must be > 0")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        l_tilde = float(np.max(L / (n * p)))
    else:
        raise ValueError(f"unknown sampling kind {kind!r}")
    if kind == "uniform":
        prob_row, alias_row = np.ones(n), np.arange(n)
    else:
        prob_row, alias_row = alias_table(p)
    for arr in (p, prob_row, alias_row):
        arr.setflags(write=False)
    return SamplingDist(p, prob_row, alias_row, kind, l_tilde)


def _alias_lookup(dist: SamplingDist, u):
    scaled = u * dist.n
    col = np.minimum(np.floor(scaled).astype(np.int64), dist.n - 1)
    keep = (scaled - col) < dist.prob_row[col]
    return np.where(keep, col, dist.alias_row[col])


def sample(dist: SamplingDist, rng: np.random.Generator) -> int:
    return int(_alias_lookup(dist, rng.random()))


def sample_many(dist: SamplingDist, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent draws; consumes the stream exactly like repeated ``sample``."""
    return _alias_lookup(dist, rng.random(size))


def floyd_subset(n: int, b: int, u: np.ndarray) -> np.ndarray:
    """Floyd's algorithm driven by ``b`` uniforms; sorted output."""
    chosen: set[int] = set()
    for k, j in enumerate(range(n - b, n)):
        t = min(int(u[k] * (j + 1)), j)
        chosen.add(j if t in chosen else t)
    return np.array(sorted(chosen), dtype=np.int64)


def sample_batch(n: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """b distinct indices, uniform over all C(n, b) subsets."""
    if not 1 <= b <= n:
        raise ValueError(f"batch size {b} outside [1, {n}]")
    return floyd_subset(n, b, rng.random(b))

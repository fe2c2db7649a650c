"""LIBSVM-format datasets held as row-sparse arrays."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import sparse


class LibsvmParseError(ValueError):
    """Raised when a LIBSVM text stream cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SparseRow:
    """One example: strictly increasing 0-based indices and nonzero values."""

    indices: np.ndarray
    values: np.ndarray
    squared_norm: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0):
            raise ValueError("indices must be non-negative and strictly increasing")
        if np.any(val == 0.0):
            raise ValueError("explicit zero values are not stored")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "squared_norm", float(val @ val))

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        out[self.indices] = self.values
        return out


class SparseDataset:
    """Row-sparse design matrix with one target per row.

    Rows are stored once in CSR form; ``rows`` gives :class:`SparseRow` views.
    Targets are arbitrary reals here (regression toys need them); the LIBSVM
    parser always produces +/-1 labels.
    """

    def __init__(self, rows: Sequence[SparseRow], labels: Iterable[float], dim: int):
        rows = list(rows)
        labels = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels,
                            dtype=np.float64)
        if len(rows) < 1:
            raise ValueError("a dataset needs at least one row")
        if labels.shape != (len(rows),):
            raise ValueError("labels must have one entry per row")
        if not np.all(np.isfinite(labels)):
            raise ValueError("labels must be finite")
        dim = int(dim)
        for i, r in enumerate(rows):
            if r.nnz and r.indices[-1] >= dim:
                raise ValueError(f"row {i} has index {r.indices[-1]} >= dim {dim}")
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.nnz for r in rows])
        indices = np.concatenate([r.indices for r in rows]) if indptr[-1] else np.zeros(0, np.int64)
        values = np.concatenate([r.values for r in rows]) if indptr[-1] else np.zeros(0)
        self._rows = tuple(rows)
        self.labels = labels
        self.labels.setflags(write=False)
        self.dim = dim
        self.indptr = indptr
        self.indices = indices
        self.values = values
        self.squared_norms = np.array([r.squared_norm for r in rows])
        for arr in (self.indptr, self.indices, self.values, self.squared_norms):
            arr.setflags(write=False)
        self._csr = None

    @classmethod
    def from_dense(cls, matrix, labels) -> "SparseDataset":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        rows = []
        for r in matrix:
            nz = np.flatnonzero(r)
            rows.append(SparseRow(nz, r[nz]))
        return cls(rows, labels, matrix.shape[1])

    @property
    def rows(self) -> tuple[SparseRow, ...]:
        return self._rows

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.indptr[i], self.indptr[i + 1]
        return self.indices[s:e], self.values[s:e]

    def to_csr(self) -> sparse.csr_matrix:
        if self._csr is None:
            self._csr = sparse.csr_matrix(
                (self.values, self.indices, self.indptr), shape=(self.n, self.dim))
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseDataset):
            return NotImplemented
        return (self.dim == other.dim
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"SparseDataset(n={self.n}, dim={self.dim}, nnz={self.nnz})"


def _map_label(raw: float) -> float:
    return 1.0 if raw > 0 else -1.0


def parse_libsvm(text: str | TextIO, dim: int | None = None) -> SparseDataset:
    """Parse LIBSVM text (``<label> <idx>:<val> ...``, 1-based indices).

    Labels are mapped to +1 when positive and -1 otherwise. ``dim`` is the
    largest index seen, or ``dim`` if that is larger. Lines starting with
    ``#`` are skipped.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    rows, labels = [], []
    max_index = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(f"bad label {tokens[0]!r}", lineno) from None
        idx, val = [], []
        prev = 0
        for tok in tokens[1:]:
            key, sep, value = tok.partition(":")
            if not sep:
                raise LibsvmParseError(f"malformed token {tok!r}", lineno)
            try:
                j = int(key)
                v = float(value)
            except ValueError:
                raise LibsvmParseError(f"malformed token {tok!r}", lineno) from None
            if j < 1:
                raise LibsvmParseError(f"index {j} < 1", lineno)
            if j <= prev:
                raise LibsvmParseError(f"indices not increasing at {tok!r}", lineno)
            prev = j
            if v != 0.0:
                idx.append(j - 1)
                val.append(v)
        max_index = max(max_index, prev)
        rows.append(SparseRow(np.array(idx, dtype=np.int64), np.array(val)))
        labels.append(_map_label(label))
    if not rows:
        raise LibsvmParseError("empty dataset")
    return SparseDataset(rows, labels, max(max_index, dim or 0))


def load_libsvm(path, dim: int | None = None) -> SparseDataset:
    with open(path) as fh:
        return parse_libsvm(fh, dim=dim)


def serialize_libsvm(ds: SparseDataset) -> str:
    """Write ``ds`` back out in LIBSVM text form (1-based indices)."""
    out = []
    for label, r in zip(ds.labels, ds.rows):
        feats = " ".join(f"{j + 1}:{v!r}" for j, v in zip(r.indices.tolist(), r.values.tolist()))
        lab = f"{label:+g}" if label in (1.0, -1.0) else repr(float(label))
        out.append(f"{lab} {feats}".rstrip())
    return "\n".join(out) + "\n"


def normalize_rows(ds: SparseDataset) -> SparseDataset:
    """Scale every nonzero row to unit Euclidean norm; zero rows are left alone."""
    rows = []
    for r in ds.rows:
        if r.nnz == 0:
            rows.append(r)
            continue
        rows.append(SparseRow(r.indices, r.values / np.sqrt(r.squared_norm)))
    return SparseDataset(rows, ds.labels, ds.dim)

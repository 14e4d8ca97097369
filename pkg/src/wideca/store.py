"""Storage, validation, and text I/O for nonnegative data matrices.

Matrices are immutable after construction and come in two storage forms:

* dense: a C-contiguous float64 array, row-major;
* sparse: column-compressed (CSC) triplets, the natural layout here because
  every analysis pass walks the matrix column by column.

Two interchange formats are supported:

* ``dense-csv``: comma-separated reals, one matrix row per line, no header;
* ``triplet``: a header line ``%<n_rows> <n_cols> <nnz>`` followed by nnz
  lines ``<row> <col> <value>`` with 0-based indices, sorted by column then
  row.

Values are written with 17 significant digits so a save/load round trip is
bit-exact for float64.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from .errors import ParseError, ValidationError

DENSE_CSV = "dense-csv"
TRIPLET = "triplet"
FORMATS = (DENSE_CSV, TRIPLET)

# Column blocks are sized so one dense block stays around ~24 MB of float64.
_BLOCK_ELEMS = 3_000_000


class CountMatrix:
    """Validated nonnegative matrix with dense or column-grouped sparse storage.

    Construction enforces the invariants all downstream analysis relies on:
    finite nonnegative values, a positive grand total, in-range indices, and
    (for sparse storage) unique (row, col) pairs grouped by column. Zero
    columns and zero rows are retained but their indices are exposed so
    profile-based computations can exclude them.
    """

    def __init__(self, dense: np.ndarray | None = None,
                 sparse: sp.csc_matrix | None = None):
        if (dense is None) == (sparse is None):
            raise ValidationError("exactly one of dense/sparse storage required")
        self._dense = dense
        self._sparse = sparse
        if dense is not None:
            self.n_rows, self.n_cols = dense.shape
        else:
            self.n_rows, self.n_cols = sparse.shape
        self._row_sums: np.ndarray | None = None
        self._col_sums: np.ndarray | None = None
        self._validate()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dense(cls, values) -> "CountMatrix":
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"dense matrix must be 2-D, got {arr.ndim}-D")
        return cls(dense=arr)

    @classmethod
    def from_triplets(cls, n_rows: int, n_cols: int, rows, cols, values) -> "CountMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if not (rows.shape == cols.shape == values.shape):
            raise ValidationError("triplet arrays must have identical length")
        if n_rows <= 0 or n_cols <= 0:
            raise ValidationError("matrix dimensions must be positive")
        if rows.size:
            if rows.min() < 0 or rows.max() >= n_rows:
                raise ValidationError("triplet row index out of range")
            if cols.min() < 0 or cols.max() >= n_cols:
                raise ValidationError("triplet column index out of range")
        order = np.lexsort((rows, cols))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size > 1:
            dup = (np.diff(cols) == 0) & (np.diff(rows) == 0)
            if dup.any():
                j = int(np.flatnonzero(dup)[0])
                raise ValidationError(
                    f"duplicate triplet for (row={rows[j]}, col={cols[j]})")
        mat = sp.csc_matrix((values, (rows, cols)), shape=(n_rows, n_cols))
        return cls(sparse=mat)

    def _validate(self) -> None:
        if self.n_rows <= 0 or self.n_cols <= 0:
            raise ValidationError("matrix dimensions must be positive")
        vals = self._dense if self._dense is not None else self._sparse.data
        if not np.isfinite(vals).all():
            raise ValidationError("matrix contains NaN or infinite values")
        if vals.size and vals.min() < 0:
            if self._dense is not None:
                i, j = np.unravel_index(int(np.argmin(self._dense)), self._dense.shape)
            else:
                nz = int(np.argmin(self._sparse.data))
                coo = self._sparse.tocoo()
                i, j = int(coo.row[nz]), int(coo.col[nz])
            raise ValidationError(f"negative value at (row={i}, col={j})")
        if self.grand_total <= 0:
            raise ValidationError("matrix grand total must be positive")

    # -- basic accessors ----------------------------------------------------

    @property
    def is_sparse(self) -> bool:
        return self._sparse is not None

    @property
    def nnz(self) -> int:
        if self.is_sparse:
            return int(self._sparse.nnz)
        return int(np.count_nonzero(self._dense))

    @property
    def dense(self) -> np.ndarray:
        if self._dense is None:
            raise ValidationError("matrix uses sparse storage")
        return self._dense

    @property
    def sparse(self) -> sp.csc_matrix:
        if self._sparse is None:
            raise ValidationError("matrix uses dense storage")
        return self._sparse

    def row_sums(self) -> np.ndarray:
        if self._row_sums is None:
            if self.is_sparse:
                self._row_sums = np.asarray(self._sparse.sum(axis=1)).ravel()
            else:
                self._row_sums = self._dense.sum(axis=1)
        return self._row_sums

    @property
    def grand_total(self) -> float:
        return float(self.row_sums().sum())

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self._sparse.toarray()
        return self._dense

    def column_block(self, j0: int, j1: int) -> np.ndarray:
        """Dense (n_rows, j1-j0) slice of columns [j0, j1)."""
        if self.is_sparse:
            return self._sparse[:, j0:j1].toarray()
        return self._dense[:, j0:j1]

    def column_entries(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero entries of column ``j`` as (row indices, values)."""
        if self.is_sparse:
            m = self._sparse
            lo, hi = m.indptr[j], m.indptr[j + 1]
            return m.indices[lo:hi].astype(np.int64), m.data[lo:hi]
        col = self._dense[:, j]
        rows = np.flatnonzero(col)
        return rows, col[rows]


@dataclass(frozen=True)
class SignalSeries:
    """Ordered sequence of signal samples with no missing values."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise ValidationError("signal must be a nonempty 1-D sequence")
        if not np.isfinite(vals).all():
            raise ValidationError("signal contains NaN or infinite values")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return int(self.values.size)


# -- operations --------------------------------------------------------------

def column_sums(m: CountMatrix) -> np.ndarray:
    """Per-column totals; their sum equals the grand total.

    Sparse columns are summed through dense blocks so the reduction tree per
    column matches the dense representation bit for bit.
    """
    if m._col_sums is None:
        if m.is_sparse:
            sums = np.empty(m.n_cols)
            for j0, j1 in column_blocks(m.n_rows, m.n_cols):
                sums[j0:j1] = m.column_block(j0, j1).sum(axis=0)
            m._col_sums = sums
        else:
            m._col_sums = m.dense.sum(axis=0)
    return m._col_sums


def zero_columns(m: CountMatrix) -> np.ndarray:
    return np.flatnonzero(column_sums(m) == 0.0)


def zero_rows(m: CountMatrix) -> np.ndarray:
    return np.flatnonzero(m.row_sums() == 0.0)


def stream_columns(m: CountMatrix, visitor: Callable[[int, np.ndarray, np.ndarray], None]) -> None:
    """Invoke ``visitor(j, rows, values)`` once per column, in ascending order.

    Columns with no entries are still visited, with empty arrays.
    """
    for j0, j1 in column_blocks(m.n_rows, m.n_cols):
        if m.is_sparse:
            blk = m.sparse[:, j0:j1]
            for j in range(j0, j1):
                lo, hi = blk.indptr[j - j0], blk.indptr[j - j0 + 1]
                visitor(j, blk.indices[lo:hi].astype(np.int64), blk.data[lo:hi])
        else:
            for j in range(j0, j1):
                col = m.dense[:, j]
                rows = np.flatnonzero(col)
                visitor(j, rows, col[rows])


def column_blocks(n_rows: int, n_cols: int) -> Iterator[tuple[int, int]]:
    """Fixed column-range grid used by every streaming pass.

    The grid depends only on the matrix shape, never on the worker count, so
    chunked reductions merge identically no matter how work is scheduled.
    """
    width = max(1, min(n_cols, _BLOCK_ELEMS // max(1, n_rows)))
    for j0 in range(0, n_cols, width):
        yield j0, min(j0 + width, n_cols)


def ordered_block_map(fn: Callable, blocks: Iterable[tuple[int, int]],
                      workers: int = 1) -> Iterator:
    """Apply ``fn(j0, j1)`` over blocks, yielding results in block order.

    With ``workers > 1`` blocks run on a thread pool (numpy releases the GIL
    in the heavy kernels) with a prefetch window of ``workers`` blocks, so at
    most that many results exist at a time. Results always come back in block
    order and the caller reduces them sequentially, which makes every
    reduction bit-identical for any worker count.
    """
    blocks = list(blocks)
    if workers <= 1 or len(blocks) <= 1:
        for j0, j1 in blocks:
            yield fn(j0, j1)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        it = iter(blocks)
        for b in islice(it, workers):
            pending.append(pool.submit(fn, *b))
        while pending:
            result = pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(fn, *nxt))
            yield result


# -- file I/O -----------------------------------------------------------------

def load_matrix(path: str, fmt: str = DENSE_CSV) -> CountMatrix:
    """Read a matrix file in the declared format, validating as it goes."""
    if fmt == DENSE_CSV:
        return _load_dense_csv(path)
    if fmt == TRIPLET:
        return _load_triplet(path)
    raise ValidationError(f"unknown matrix format {fmt!r}")


def save_matrix(m: CountMatrix, path: str, fmt: str = DENSE_CSV) -> None:
    if fmt == DENSE_CSV:
        dense = m.to_dense()
        with open(path, "w", encoding="utf-8") as fh:
            for i in range(m.n_rows):
                fh.write(",".join("%.17g" % v for v in dense[i]))
                fh.write("\n")
        return
    if fmt == TRIPLET:
        coo = (m.sparse if m.is_sparse else sp.csc_matrix(m.dense)).tocoo()
        order = np.lexsort((coo.row, coo.col))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"%{m.n_rows} {m.n_cols} {coo.nnz}\n")
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write("%d %d %.17g\n" % (r, c, v))
        return
    raise ValidationError(f"unknown matrix format {fmt!r}")


def _load_dense_csv(path: str) -> CountMatrix:
    rows: list[np.ndarray] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = np.array(line.split(","), dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"bad numeric field ({exc})", line=lineno) from None
            if width is None:
                width = row.size
            elif row.size != width:
                raise ParseError(
                    f"expected {width} fields, found {row.size}", line=lineno)
            rows.append(row)
    if not rows:
        raise ParseError("empty matrix file")
    return CountMatrix.from_dense(np.vstack(rows))


def _load_triplet(path: str) -> CountMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("%"):
            raise ParseError("expected header '%<n_rows> <n_cols> <nnz>'", line=1)
        try:
            n_rows, n_cols, nnz = (int(tok) for tok in header[1:].split())
        except ValueError:
            raise ParseError("malformed header", line=1) from None
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        for i in range(nnz):
            lineno = i + 2
            line = fh.readline()
            if not line:
                raise ParseError(f"expected {nnz} triplets, file ended", line=lineno)
            parts = line.split()
            if len(parts) != 3:
                raise ParseError("expected '<row> <col> <value>'", line=lineno)
            try:
                rows[i], cols[i] = int(parts[0]), int(parts[1])
                vals[i] = float(parts[2])
            except ValueError as exc:
                raise ParseError(f"bad field ({exc})", line=lineno) from None
            if i:
                prev = (cols[i - 1], rows[i - 1])
                cur = (cols[i], rows[i])
                if cur == prev:
                    raise ParseError(f"duplicate triplet for (row={rows[i]}, "
                                     f"col={cols[i]})", line=lineno)
                if cur < prev:
                    raise ParseError("triplets must be sorted by column then row",
                                     line=lineno)
    if nnz == 0:
        raise ParseError("empty matrix: no triplets")
    return CountMatrix.from_triplets(n_rows, n_cols, rows, cols, vals)


def load_signal(path: str) -> SignalSeries:
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(f"bad signal value {line!r}", line=lineno) from None
    if not values:
        raise ParseError("empty signal file")
    return SignalSeries(np.array(values))


def save_signal(sig: SignalSeries, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in sig.values:
            fh.write("%.17g\n" % v)

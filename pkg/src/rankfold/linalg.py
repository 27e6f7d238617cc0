"""Exact dense linear algebra over pluggable fields.

A field handle must expose `zero`, `one` and `coerce`; entries must
support +, -, *, / and truth testing.  Rationals, multiquadratic towers
and the finite fields in this package all qualify.  Elimination uses
naive Gaussian steps with a deterministic pivot rule (first row with a
nonzero entry in the current column), so results are reproducible and
there is no numerical-stability concern: arithmetic is exact.

Matrices are immutable; all operations return fresh objects.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import DimensionMismatch, LengthMismatch, NoSolution, NotUnique


class ExactMatrix:
    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, entries: Sequence[Sequence], _raw: bool = False):
        if _raw:
            self.entries = entries
        else:
            self.entries = tuple(tuple(field.coerce(e) for e in row) for row in entries)
        self.field = field
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged rows")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zeros(field, rows: int, cols: int) -> "ExactMatrix":
        z = field.zero
        return ExactMatrix(field, tuple((z,) * cols for _ in range(rows)), _raw=True)

    @staticmethod
    def identity(field, n: int) -> "ExactMatrix":
        z, o = field.zero, field.one
        return ExactMatrix(field, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), _raw=True)

    @staticmethod
    def from_rows(field, rows: Sequence[Sequence]) -> "ExactMatrix":
        return ExactMatrix(field, rows)

    @staticmethod
    def column(field, entries: Sequence) -> "ExactMatrix":
        return ExactMatrix(field, [[e] for e in entries])

    # -- access ----------------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def rows_list(self) -> list[list]:
        return [list(row) for row in self.entries]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.entries)

    # -- arithmetic --------------------------------------------------------------

    def _same_shape(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(
            self.field,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
            _raw=True,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(
            self.field,
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
            _raw=True,
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.field, tuple(tuple(-a for a in row) for row in self.entries), _raw=True)

    def scale(self, c) -> "ExactMatrix":
        c = self.field.coerce(c)
        return ExactMatrix(self.field, tuple(tuple(c * a for a in row) for row in self.entries), _raw=True)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        zero = self.field.zero
        out = []
        for row in self.entries:
            nz = [(k, a) for k, a in enumerate(row) if a]
            acc_row = []
            for j in range(other.cols):
                acc = zero
                for k, a in nz:
                    b = other.entries[k][j]
                    if b:
                        acc = acc + a * b
                acc_row.append(acc)
            out.append(tuple(acc_row))
        return ExactMatrix(self.field, tuple(out), _raw=True)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, tuple(zip(*self.entries)) if self.entries else (), _raw=True)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and all(a == b for r1, r2 in zip(self.entries, other.entries) for a, b in zip(r1, r2))
        )

    def map_entries(self, fn: Callable, field=None) -> "ExactMatrix":
        """Apply fn entry-wise, optionally moving to another field."""
        return ExactMatrix(field or self.field, tuple(tuple(fn(a) for a in row) for row in self.entries), _raw=True)

    # -- block structure ---------------------------------------------------------

    @staticmethod
    def block(grid: Sequence[Sequence["ExactMatrix"]]) -> "ExactMatrix":
        """Assemble a matrix from a grid of blocks (row heights and column
        widths must agree along each band)."""
        field = grid[0][0].field
        out_rows = []
        for band in grid:
            height = band[0].rows
            for blk in band:
                if blk.rows != height:
                    raise DimensionMismatch("block heights differ within a band")
            for i in range(height):
                row: tuple = ()
                for blk in band:
                    row += blk.entries[i]
                out_rows.append(row)
        width = len(out_rows[0]) if out_rows else 0
        for row in out_rows:
            if len(row) != width:
                raise DimensionMismatch("block widths differ between bands")
        return ExactMatrix(field, tuple(out_rows), _raw=True)

    def split_blocks(self, row_split: int, col_split: int):
        """Cut into a 2x2 grid at the given indices; returns (tl, tr, bl, br)."""
        tl = ExactMatrix(self.field, tuple(row[:col_split] for row in self.entries[:row_split]), _raw=True)
        tr = ExactMatrix(self.field, tuple(row[col_split:] for row in self.entries[:row_split]), _raw=True)
        bl = ExactMatrix(self.field, tuple(row[:col_split] for row in self.entries[row_split:]), _raw=True)
        br = ExactMatrix(self.field, tuple(row[col_split:] for row in self.entries[row_split:]), _raw=True)
        return tl, tr, bl, br

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return ExactMatrix(self.field, tuple(r1 + r2 for r1, r2 in zip(self.entries, other.entries)), _raw=True)

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("column counts differ")
        return ExactMatrix(self.field, self.entries + other.entries, _raw=True)

    # -- elimination ---------------------------------------------------------------

    def rref(self) -> tuple["ExactMatrix", tuple[int, ...], int]:
        """Reduced row echelon form.

        Returns (R, pivot_columns, rank).  Pivot selection is the first row
        with a nonzero entry in the current column.
        """
        rows = [list(r) for r in self.entries]
        pivots = []
        pr = 0
        for c in range(self.cols):
            pivot_row = None
            for r in range(pr, self.rows):
                if rows[r][c]:
                    pivot_row = r
                    break
            if pivot_row is None:
                continue
            rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
            inv = self.field.one / rows[pr][c]
            rows[pr] = [inv * e for e in rows[pr]]
            for r in range(self.rows):
                if r != pr and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [e - f * p for e, p in zip(rows[r], rows[pr])]
            pivots.append(c)
            pr += 1
            if pr == self.rows:
                break
        R = ExactMatrix(self.field, tuple(tuple(r) for r in rows), _raw=True)
        return R, tuple(pivots), len(pivots)

    def rank(self) -> int:
        return self.rref()[2]

    def rank_over(self, field, embed: Callable) -> int:
        """Rank after mapping entries through `embed` into another field."""
        return self.map_entries(embed, field).rank()

    def row_space_basis(self) -> "ExactMatrix":
        """Echelon basis of the row space (possibly with zero rows dropped)."""
        R, _, rank = self.rref()
        return ExactMatrix(self.field, R.entries[:rank], _raw=True)

    def kernel_basis(self) -> list[list]:
        """Basis of the right kernel, one vector per free column."""
        R, pivots, rank = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        zero, one = self.field.zero, self.field.one
        basis = []
        for f in free:
            v = [zero] * self.cols
            v[f] = one
            for r, c in enumerate(pivots):
                v[c] = -R.entries[r][f]
            basis.append(v)
        return basis

    def solve(self, b: Sequence) -> list:
        """Solve A x = b for the unique x.

        Raises NoSolution if the system is inconsistent and NotUnique (with a
        nonzero kernel vector as witness) if it is underdetermined.
        """
        if isinstance(b, ExactMatrix):
            if b.cols != 1:
                raise DimensionMismatch("right-hand side must be a column")
            b = [row[0] for row in b.entries]
        if len(b) != self.rows:
            raise LengthMismatch(f"need {self.rows} right-hand entries, got {len(b)}")
        aug = ExactMatrix(
            self.field,
            tuple(row + (self.field.coerce(v),) for row, v in zip(self.entries, b)),
            _raw=True,
        )
        R, pivots, rank = aug.rref()
        if pivots and pivots[-1] == self.cols:
            raise NoSolution("inconsistent system")
        if rank < self.cols:
            witness = self.kernel_basis()[0]
            raise NotUnique(witness)
        x = [self.field.zero] * self.cols
        for r, c in enumerate(pivots):
            x[c] = R.entries[r][self.cols]
        return x

    # -- serialization -----------------------------------------------------------------

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "field": self.field.to_json(),
            "entries": [[self.field.element_to_json(e) for e in row] for row in self.entries],
        }

    @staticmethod
    def from_json(data, field=None) -> "ExactMatrix":
        if field is None:
            from .serial import field_from_json

            field = field_from_json(data["field"])
        entries = [[field.element_from_json(e) for e in row] for row in data["entries"]]
        mat = ExactMatrix(field, entries)
        if mat.shape != (data["rows"], data["cols"]):
            raise DimensionMismatch("declared shape does not match entries")
        return mat

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols} over {self.field!r})"


def random_rank_matrix(field, rng, rows, cols, rank) -> ExactMatrix:
    """Random matrix of rank exactly `rank`, as a product of full-rank
    factors (resampled until both are), so row and column spaces are
    uniform subspaces of the right dimension."""
    if rank == 0:
        return ExactMatrix.zeros(field, rows, cols)
    if rank > min(rows, cols):
        raise DimensionMismatch(f"rank {rank} impossible for {rows}x{cols}")
    while True:
        X = ExactMatrix(field, [[field.random_element(rng) for _ in range(rank)] for _ in range(rows)])
        Z = ExactMatrix(field, [[field.random_element(rng) for _ in range(cols)] for _ in range(rank)])
        E = X @ Z
        if E.rank() == rank:
            return E

"""Sparse matrices over Q(q) and exact Gauss-Jordan elimination."""

from __future__ import annotations

from typing import Iterable, Iterator

from .qfield import ONE, ZERO, RatFunc, as_ratfunc

__all__ = ["SingularMatrixError", "SMat", "rref", "solve_rows"]


class SingularMatrixError(ArithmeticError):
    def __init__(self, msg: str, what: str = ""):
        super().__init__(msg)
        self.what = what


class SMat:
    """Sparse matrix stored as ``{row: {col: value}}`` without explicit zeros."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: dict[int, dict[int, RatFunc]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    @classmethod
    def identity(cls, n: int) -> "SMat":
        return cls(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int, object]]) -> "SMat":
        m = cls(nrows, ncols)
        for i, j, v in entries:
            m.add_to(i, j, as_ratfunc(v))
        return m

    @classmethod
    def from_dense(cls, dense) -> "SMat":
        nr = len(dense)
        nc = len(dense[0]) if nr else 0
        return cls.from_entries(nr, nc, ((i, j, v) for i, row in enumerate(dense) for j, v in enumerate(row)))

    def copy(self) -> "SMat":
        return SMat(self.nrows, self.ncols, {i: dict(r) for i, r in self.rows.items()})

    def __getitem__(self, ij) -> RatFunc:
        i, j = ij
        return self.rows.get(i, {}).get(j, ZERO)

    def add_to(self, i: int, j: int, v: RatFunc) -> None:
        if v.is_zero():
            return
        row = self.rows.setdefault(i, {})
        s = row.get(j)
        s = v if s is None else s + v
        if s.is_zero():
            del row[j]
            if not row:
                del self.rows[i]
        else:
            row[j] = s

    def items(self) -> Iterator[tuple[int, int, RatFunc]]:
        for i, row in self.rows.items():
            for j, v in row.items():
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, SMat):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __matmul__(self, other: "SMat") -> "SMat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out: dict[int, dict[int, RatFunc]] = {}
        orows = other.rows
        for i, row in self.rows.items():
            acc: dict[int, RatFunc] = {}
            for k, a in row.items():
                brow = orows.get(k)
                if not brow:
                    continue
                for j, b in brow.items():
                    p = a * b
                    s = acc.get(j)
                    acc[j] = p if s is None else s + p
            acc = {j: v for j, v in acc.items() if not v.is_zero()}
            if acc:
                out[i] = acc
        return SMat(self.nrows, other.ncols, out)

    def __add__(self, other: "SMat") -> "SMat":
        m = self.copy()
        for i, j, v in other.items():
            m.add_to(i, j, v)
        return m

    def __neg__(self) -> "SMat":
        return SMat(self.nrows, self.ncols, {i: {j: -v for j, v in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other: "SMat") -> "SMat":
        return self + (-other)

    def scale(self, c) -> "SMat":
        c = as_ratfunc(c)
        if c.is_zero():
            return SMat(self.nrows, self.ncols)
        return SMat(self.nrows, self.ncols, {i: {j: c * v for j, v in r.items()} for i, r in self.rows.items()})

    def transpose(self) -> "SMat":
        m = SMat(self.ncols, self.nrows)
        for i, j, v in self.items():
            m.rows.setdefault(j, {})[i] = v
        return m

    def kron(self, other: "SMat") -> "SMat":
        out: dict[int, dict[int, RatFunc]] = {}
        for i, ra in self.rows.items():
            for k, rb in other.rows.items():
                row = out.setdefault(i * other.nrows + k, {})
                for j, a in ra.items():
                    for l, b in rb.items():
                        row[j * other.ncols + l] = a * b
        return SMat(self.nrows * other.nrows, self.ncols * other.ncols, out)

    def map(self, fn) -> "SMat":
        return SMat.from_entries(self.nrows, self.ncols, ((i, j, fn(v)) for i, j, v in self.items()))

    def inverse(self, what: str = "matrix") -> "SMat":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = [dict(self.rows.get(i, {})) for i in range(n)]
        for i in range(n):
            aug[i][n + i] = ONE
        reduced, pivots = rref(aug, list(range(2 * n)))
        if pivots[:n] != list(range(n)):
            raise SingularMatrixError(f"{what} is singular", what)
        inv = SMat(n, n)
        for r, p in zip(reduced, pivots):
            row = {c - n: v for c, v in r.items() if c >= n}
            if row:
                inv.rows[p] = row
        return inv

    def __repr__(self):
        return f"SMat({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def rref(rows: list[dict], col_order: list) -> tuple[list[dict], list]:
    """Reduced row echelon form of sparse rows.

    ``col_order`` ranks the columns: pivots are chosen as the earliest column in that
    order, so listing columns from "largest" to "smallest" makes every pivot the leading
    term of its row.  Returns the nonzero reduced rows (pivot coefficient 1) and their
    pivot columns, both sorted by pivot rank.
    """
    rank = {c: k for k, c in enumerate(col_order)}
    work = [{c: v for c, v in r.items() if not v.is_zero()} for r in rows]
    work = [r for r in work if r]
    done: list[tuple[object, dict]] = []
    while work:
        # pick the row whose leading column comes first
        best = None
        for idx, r in enumerate(work):
            lead = min(r, key=rank.__getitem__)
            if best is None or rank[lead] < rank[best[1]]:
                best = (idx, lead)
        idx, piv = best
        prow = work.pop(idx)
        inv = prow[piv].inverse()
        prow = {c: v * inv for c, v in prow.items()}
        nxt = []
        for r in work:
            f = r.get(piv)
            if f is not None:
                r = dict(r)
                for c, v in prow.items():
                    s = r.get(c, ZERO) - f * v
                    if s.is_zero():
                        r.pop(c, None)
                    else:
                        r[c] = s
            if r:
                nxt.append(r)
        work = nxt
        for k, (p, r) in enumerate(done):
            f = r.get(piv)
            if f is not None:
                r = dict(r)
                for c, v in prow.items():
                    s = r.get(c, ZERO) - f * v
                    if s.is_zero():
                        r.pop(c, None)
                    else:
                        r[c] = s
                done[k] = (p, r)
        done.append((piv, prow))
    done.sort(key=lambda pr: rank[pr[0]])
    return [r for _, r in done], [p for p, _ in done]


def solve_rows(rows: list[dict], col_order: list) -> dict:
    """Express each pivot column in terms of the free columns.

    Returns ``{pivot: {free_col: coeff}}`` meaning ``pivot = sum(coeff * free_col)``.
    """
    reduced, pivots = rref(rows, col_order)
    out = {}
    for r, p in zip(reduced, pivots):
        out[p] = {c: -v for c, v in r.items() if c != p}
    return out

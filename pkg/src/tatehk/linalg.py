"""Precision-certified linear algebra over K with valuation pivoting.

Rows are sparse dicts of KElements; an absent entry is an exact zero.
Pivots are chosen with minimal pi-adic valuation (best numerical
quality) and every certificate states the precision floor it holds at.
Rank questions that the working precision cannot decide raise
AmbiguousPivot / AmbiguousSolve instead of guessing.

A separate exact integer elimination is provided for matrices with
integer entries, where rank over Q equals rank over Q_p and no
precision bookkeeping is needed.
"""

from __future__ import annotations

from math import gcd

from .errors import AmbiguousPivot, AmbiguousSolve
from .field import FieldDescriptor, KElement


class PrecMatrix:
    """Sparse matrix over K with explicit precision semantics."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: FieldDescriptor, nrows: int, ncols: int, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = [dict() for _ in range(nrows)] if rows is None else rows

    @classmethod
    def from_rows(cls, field: FieldDescriptor, data) -> "PrecMatrix":
        """Dense list-of-lists input; entries are KElements, ints or Fractions."""
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        m = cls(field, nrows, ncols)
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if not isinstance(v, KElement):
                    v = field.from_rational(v)
                if not (v.is_zero() and v.cert_prec_pi() >= field.e * field.ctx.prec):
                    m.rows[i][j] = v
        return m

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int) -> "PrecMatrix":
        m = cls(field, n, n)
        one = field.one()
        for i in range(n):
            m.rows[i][i] = one
        return m

    def entry(self, i: int, j: int) -> KElement:
        v = self.rows[i].get(j)
        return v if v is not None else self.field.zero()

    def set_entry(self, i: int, j: int, v: KElement):
        if v.is_zero() and v.cert_prec_pi() >= self.field.e * self.field.ctx.prec:
            self.rows[i].pop(j, None)
        else:
            self.rows[i][j] = v

    def copy(self) -> "PrecMatrix":
        return PrecMatrix(self.field, self.nrows, self.ncols,
                          [dict(r) for r in self.rows])

    def to_lists(self):
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def transpose(self) -> "PrecMatrix":
        m = PrecMatrix(self.field, self.ncols, self.nrows)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                m.rows[j][i] = v
        return m

    def matmul(self, other: "PrecMatrix") -> "PrecMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = PrecMatrix(self.field, self.nrows, other.ncols)
        for i, row in enumerate(self.rows):
            acc: dict = {}
            for k, a in row.items():
                for j, b in other.rows[k].items():
                    prev = acc.get(j)
                    acc[j] = a * b if prev is None else prev + a * b
            out.rows[i] = acc
        return out

    def add(self, other: "PrecMatrix") -> "PrecMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        out = self.copy()
        for i, row in enumerate(other.rows):
            for j, v in row.items():
                out.set_entry(i, j, out.entry(i, j) + v)
        return out

    def scale(self, c) -> "PrecMatrix":
        out = PrecMatrix(self.field, self.nrows, self.ncols)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out.rows[i][j] = v * c if isinstance(c, KElement) else v.scale(c)
        return out

    def apply_to(self, vec: dict) -> dict:
        """Matrix times sparse column vector (dict col -> KElement)."""
        out: dict = {}
        for i, row in enumerate(self.rows):
            acc = None
            for j, a in row.items():
                b = vec.get(j)
                if b is None:
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            if acc is not None:
                out[i] = acc
        return out


class EchelonResult:
    """Reduced echelon data: pivots is a list of (row, col); ambiguity maps a
    pivotless column to the worst precision of a skipped numerically-zero entry."""

    __slots__ = ("echelon", "pivots", "ambiguity")

    def __init__(self, echelon, pivots, ambiguity):
        self.echelon = echelon
        self.pivots = pivots
        self.ambiguity = ambiguity

    def rank_at(self, floor_pi: int) -> int:
        """Rank certified at the given pi-adic floor."""
        for col, prec in self.ambiguity.items():
            if prec < floor_pi:
                raise AmbiguousPivot(
                    f"column {col}: all pivot candidates are zero at O(pi^{prec}), "
                    f"below the requested floor {floor_pi}")
        return len(self.pivots)


def row_reduce(a: PrecMatrix, max_cols: int | None = None) -> EchelonResult:
    """Gauss-Jordan with minimal-valuation pivoting over the first max_cols columns.

    Entries indistinguishable from zero never become pivots; the precision
    at which they were skipped is recorded per column so callers can decide
    whether rank statements are certified at their floor.
    """
    work = a.copy()
    ncols = a.ncols if max_cols is None else max_cols
    pivots = []
    ambiguity = {}
    pivot_rows = set()
    for col in range(ncols):
        best = None
        worst_zero_prec = None
        for i in range(work.nrows):
            if i in pivot_rows:
                continue
            v = work.rows[i].get(col)
            if v is None:
                continue
            ordv = v.ord_pi_or_none()
            if ordv is None:
                p = v.cert_prec_pi()
                if worst_zero_prec is None or p < worst_zero_prec:
                    worst_zero_prec = p
                continue
            if best is None or (ordv, i) < best[0]:
                best = ((ordv, i), v)
        if best is None:
            if worst_zero_prec is not None:
                ambiguity[col] = worst_zero_prec
            continue
        (_, pi_row), pivot_val = best
        pivots.append((pi_row, col))
        pivot_rows.add(pi_row)
        prow = work.rows[pi_row]
        inv = pivot_val.inverse()
        # scale pivot row to a leading 1 for reduced form
        work.rows[pi_row] = {j: v * inv for j, v in prow.items()}
        prow = work.rows[pi_row]
        for i in range(work.nrows):
            if i == pi_row:
                continue
            v = work.rows[i].get(col)
            if v is None:
                continue
            if v.is_zero() and v.cert_prec_pi() >= a.field.e * a.field.ctx.prec:
                del work.rows[i][col]
                continue
            row = work.rows[i]
            for j, pv in prow.items():
                cur = row.get(j)
                nxt = (cur - v * pv) if cur is not None else -(v * pv)
                if nxt.is_zero() and nxt.cert_prec_pi() >= a.field.e * a.field.ctx.prec:
                    row.pop(j, None)
                else:
                    row[j] = nxt
            row.pop(col, None)  # eliminated exactly by construction
    return EchelonResult(work, pivots, ambiguity)


def solve(a: PrecMatrix, b: dict, floor_pi: int):
    """One solution of A x = b as a sparse dict, or None when certified unsolvable.

    b is a sparse dict row-index -> KElement. Consistency is decided at the
    pi-adic floor; an undecidable residual raises AmbiguousSolve.
    """
    aug = PrecMatrix(a.field, a.nrows, a.ncols + 1,
                     [dict(r) for r in a.rows])
    for i, v in b.items():
        if not (v.is_zero() and v.cert_prec_pi() >= a.field.e * a.field.ctx.prec):
            aug.rows[i][a.ncols] = v
    res = row_reduce(aug, max_cols=a.ncols)
    pivot_rows = {r for r, _ in res.pivots}
    for i in range(aug.nrows):
        if i in pivot_rows:
            continue
        v = res.echelon.rows[i].get(a.ncols)
        if v is None:
            continue
        if v.is_zero_at(floor_pi):
            continue
        if v.ord_pi_or_none() is not None:
            return None  # certified obstruction: residual valuation below floor
        raise AmbiguousSolve(
            f"residual zero only at O(pi^{v.cert_prec_pi()}) < floor {floor_pi}")
    x: dict = {}
    for i, col in res.pivots:
        v = res.echelon.rows[i].get(a.ncols)
        if v is not None:
            x[col] = v  # pivot is scaled to 1, free variables set to zero
    return x


def kernel_basis(a: PrecMatrix, floor_pi: int) -> list:
    """Basis of ker(A) certified at the floor: substituting back gives entries
    of valuation >= floor_pi."""
    res = row_reduce(a)
    res.rank_at(floor_pi)
    pivot_cols = {c for _, c in res.pivots}
    col_of_row = {r: c for r, c in res.pivots}
    basis = []
    for f in range(a.ncols):
        if f in pivot_cols:
            continue
        vec = {f: a.field.one()}
        for i, c in res.pivots:
            v = res.echelon.rows[i].get(f)
            if v is not None:
                vec[c] = -v
        residual = a.apply_to(vec)
        for v in residual.values():
            if not v.is_zero_at(floor_pi):
                raise AmbiguousSolve("kernel vector residual exceeds the floor")
        basis.append(vec)
    return basis


def rank_at(a: PrecMatrix, floor_pi: int) -> int:
    return row_reduce(a).rank_at(floor_pi)


# -- exact integer path ---------------------------------------------------------


def int_kernel_sparse(rows: list, ncols: int) -> list:
    """Exact kernel basis over Q of a sparse integer matrix, scaled to
    integer vectors (list of dicts col -> int, one per free column)."""
    from fractions import Fraction

    work = []
    for r in rows:
        row = {j: Fraction(v) for j, v in r.items() if v}
        if row:
            work.append(row)
    pivots = {}
    for col in range(ncols):
        pidx = None
        for idx, row in enumerate(work):
            if row.get(col):
                pidx = idx
                break
        if pidx is None:
            continue
        prow = work.pop(pidx)
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        for ridx, row in enumerate(work):
            v = row.get(col)
            if not v:
                continue
            merged = dict(row)
            for j, w in prow.items():
                nv = merged.get(j, 0) - w * v
                if nv:
                    merged[j] = nv
                else:
                    merged.pop(j, None)
            work[ridx] = merged
        for orow in pivots.values():
            v = orow.get(col)
            if v:
                for j, w in prow.items():
                    nv = orow.get(j, 0) - w * v
                    if nv:
                        orow[j] = nv
                    else:
                        orow.pop(j, None)
        work = [r for r in work if r]
        pivots[col] = prow
    basis = []
    for col in range(ncols):
        if col in pivots:
            continue
        vec = {col: Fraction(1)}
        for pc, prow in pivots.items():
            v = prow.get(col)
            if v:
                vec[pc] = -v
        denom = 1
        for v in vec.values():
            denom = denom * v.denominator // gcd(denom, v.denominator)
        ivec = {j: int(v * denom) for j, v in vec.items()}
        g = 0
        for v in ivec.values():
            g = gcd(g, abs(v))
        if g > 1:
            ivec = {j: v // g for j, v in ivec.items()}
        basis.append(ivec)
    return basis


def int_rank_sparse(rows: list, ncols: int) -> int:
    """Exact rank over Q of a sparse integer matrix (list of dicts col -> int).

    Fraction-free elimination with gcd stripping; deterministic pivoting by
    (|value| minimal, row index). Rank over Q equals rank over Q_p, so this
    needs no precision floor.
    """
    work = [{j: v for j, v in r.items() if v} for r in rows]
    work = [r for r in work if r]
    rank = 0
    for col in range(ncols):
        best = None
        for idx, row in enumerate(work):
            v = row.get(col)
            if v:
                key = (abs(v), idx)
                if best is None or key < best[0]:
                    best = (key, idx)
        if best is None:
            continue
        _, pidx = best
        prow = work.pop(pidx)
        pval = prow[col]
        rank += 1
        nxt = []
        for row in work:
            v = row.get(col)
            if not v:
                nxt.append(row)
                continue
            g = gcd(abs(v), abs(pval))
            mult_r, mult_p = pval // g, v // g
            merged = {}
            for j, w in row.items():
                merged[j] = w * mult_r
            for j, w in prow.items():
                nv = merged.get(j, 0) - w * mult_p
                if nv:
                    merged[j] = nv
                else:
                    merged.pop(j, None)
            merged.pop(col, None)
            if merged:
                g2 = 0
                for w in merged.values():
                    g2 = gcd(g2, abs(w))
                    if g2 == 1:
                        break
                if g2 > 1:
                    merged = {j: w // g2 for j, w in merged.items()}
                nxt.append(merged)
        work = nxt
    return rank

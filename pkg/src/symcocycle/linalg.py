"""Exact integer linear algebra on sparse matrices.

Everything here is over arbitrary-precision integers (or residues mod a
prime); there is no floating point anywhere.  Matrix row/column indices are
0-based, including in the text exchange format.

The Smith normal form routine runs sparse integer elimination with
Markowitz-style pivoting (prefer unit entries, minimize fill, ties broken by
(row, col) order) and an interleaved gcd dance that keeps coefficient growth
contained.  When transforms are not requested, large inputs are first
compressed by a unimodular row-lattice reduction, which preserves the
invariant factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import ParseError, ResourceLimitError


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g = x*a + y*b."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class SparseIntMatrix:
    """Immutable sparse integer matrix stored as per-row (col, value) tuples."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, row_entries: list[tuple[tuple[int, int], ...]]):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        if len(row_entries) != rows:
            raise ValueError(f"expected {rows} row tuples, got {len(row_entries)}")
        self.rows = rows
        self.cols = cols
        self._rows = row_entries

    @classmethod
    def from_row_dicts(cls, rows: int, cols: int, dicts: list[dict[int, int]]) -> "SparseIntMatrix":
        data = []
        for d in dicts:
            items = tuple(sorted((c, v) for c, v in d.items() if v))
            for c, _ in items:
                if not 0 <= c < cols:
                    raise ValueError(f"column index {c} out of range 0..{cols - 1}")
            data.append(items)
        while len(data) < rows:
            data.append(())
        return cls(rows, cols, data)

    @classmethod
    def from_dense(cls, dense: list[list[int]]) -> "SparseIntMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        data = []
        for row in dense:
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            data.append(tuple((c, v) for c, v in enumerate(row) if v))
        return cls(rows, cols, data)

    @classmethod
    def from_entries(
        cls, rows: int, cols: int, entries: list[tuple[int, int, int]]
    ) -> "SparseIntMatrix":
        dicts: list[dict[int, int]] = [dict() for _ in range(rows)]
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r}, {c}) out of range")
            if v:
                dicts[r][c] = dicts[r][c] + v if c in dicts[r] else v
                if dicts[r][c] == 0:
                    del dicts[r][c]
        return cls.from_row_dicts(rows, cols, dicts)

    def row_items(self, r: int) -> tuple[tuple[int, int], ...]:
        return self._rows[r]

    def iter_rows(self):
        return iter(self._rows)

    def get(self, r: int, c: int) -> int:
        for cc, v in self._rows[r]:
            if cc == c:
                return v
            if cc > c:
                break
        return 0

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows)

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for r, row in enumerate(self._rows):
            for c, v in row:
                dense[r][c] = v
        return dense

    def transpose(self) -> "SparseIntMatrix":
        dicts: list[dict[int, int]] = [dict() for _ in range(self.cols)]
        for r, row in enumerate(self._rows):
            for c, v in row:
                dicts[c][r] = v
        return SparseIntMatrix.from_row_dicts(self.cols, self.rows, dicts)

    def mul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        dicts: list[dict[int, int]] = []
        for row in self._rows:
            acc: dict[int, int] = {}
            for c, v in row:
                for cc, w in other._rows[c]:
                    acc[cc] = acc.get(cc, 0) + v * w
            dicts.append(acc)
        return SparseIntMatrix.from_row_dicts(self.rows, other.cols, dicts)

    def is_zero(self) -> bool:
        return all(not row for row in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (
            self.rows == other.rows and self.cols == other.cols and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self._rows)))

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def dump(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        for r, row in enumerate(self._rows):
            for c, v in row:
                lines.append(f"{r} {c} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "SparseIntMatrix":
        toks = text.split()
        if len(toks) < 3:
            raise ParseError("matrix header 'rows cols nnz' missing")
        try:
            rows, cols, nnz = int(toks[0]), int(toks[1]), int(toks[2])
            body = [int(t) for t in toks[3:]]
        except ValueError as exc:
            raise ParseError(f"non-integer token in matrix file: {exc}") from None
        if len(body) != 3 * nnz:
            raise ParseError(f"expected {3 * nnz} entry tokens, got {len(body)}")
        entries = [(body[3 * i], body[3 * i + 1], body[3 * i + 2]) for i in range(nnz)]
        return cls.from_entries(rows, cols, entries)


@dataclass(frozen=True)
class SmithResult:
    """Invariant factors d_1 | d_2 | ... of a matrix, with optional transforms."""

    invariant_factors: tuple[int, ...]
    rank: int
    nullity: int
    U: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None


def row_lattice_echelon(M: SparseIntMatrix) -> SparseIntMatrix:
    """Unimodular row reduction to an echelon basis of the row lattice.

    The output has one row per lattice basis vector, with strictly increasing
    leading columns, positive leading entries, and entries above each pivot
    reduced mod the pivot.  The row lattice (hence the Smith normal form
    diagonal) is exactly preserved.
    """
    pivots: dict[int, dict[int, int]] = {}
    seen: set[tuple[tuple[int, int], ...]] = set()
    for row in M.iter_rows():
        if not row:
            continue
        # Duplicate rows (up to sign) contribute nothing to the lattice.
        key = row if row[0][1] > 0 else tuple((c, -v) for c, v in row)
        if key in seen:
            continue
        seen.add(key)
        vec = dict(key)
        while vec:
            j = min(vec)
            if j not in pivots:
                if vec[j] < 0:
                    vec = {c: -v for c, v in vec.items()}
                pivots[j] = vec
                break
            piv = pivots[j]
            a, b = piv[j], vec[j]
            if b % a == 0:
                q = b // a
                for c, v in piv.items():
                    w = vec.get(c, 0) - q * v
                    if w:
                        vec[c] = w
                    elif c in vec:
                        del vec[c]
            else:
                g, x, y = xgcd(a, b)
                ag, bg = a // g, b // g
                comb: dict[int, int] = {}
                rest: dict[int, int] = {}
                for c in set(piv) | set(vec):
                    pv, vv = piv.get(c, 0), vec.get(c, 0)
                    w1 = x * pv + y * vv
                    w2 = -bg * pv + ag * vv
                    if w1:
                        comb[c] = w1
                    if w2:
                        rest[c] = w2
                pivots[j] = comb
                vec = rest
    # Back-reduce entries sitting above deeper pivots.
    leads = sorted(pivots)
    for j in reversed(leads):
        piv = pivots[j]
        d = piv[j]
        for i in leads:
            if i >= j:
                break
            row = pivots[i]
            v = row.get(j, 0)
            q = v // d
            if q:
                for c, w in piv.items():
                    u = row.get(c, 0) - q * w
                    if u:
                        row[c] = u
                    elif c in row:
                        del row[c]
    data = [pivots[j] for j in leads]
    return SparseIntMatrix.from_row_dicts(len(data), M.cols, data)


class _Eliminator:
    """Mutable state for the Smith normal form elimination."""

    def __init__(self, M: SparseIntMatrix, want_transforms: bool, digit_cap: int | None):
        self.nrows = M.rows
        self.ncols = M.cols
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}
        for r in range(M.rows):
            items = M.row_items(r)
            if items:
                self.rows[r] = dict(items)
                for c, _ in items:
                    self.cols.setdefault(c, set()).add(r)
        self.U: dict[int, dict[int, int]] | None = None
        self.Vc: dict[int, dict[int, int]] | None = None
        if want_transforms:
            self.U = {r: {r: 1} for r in range(M.rows)}
            self.Vc = {c: {c: 1} for c in range(M.cols)}
        self.bit_cap = digit_cap * 4 if digit_cap else None
        self.retired: list[tuple[int, int, int]] = []  # (row, col, d)

    def _check_cap(self, v: int) -> None:
        if self.bit_cap is not None and v.bit_length() > self.bit_cap:
            raise ResourceLimitError("entry magnitude cap exceeded during elimination")

    def row_op(self, dst: int, src: int, q: int) -> None:
        """row[dst] += q * row[src]."""
        if q == 0:
            return
        dst_row = self.rows.setdefault(dst, {})
        for c, v in self.rows.get(src, {}).items():
            w = dst_row.get(c, 0) + q * v
            if w:
                self._check_cap(w)
                dst_row[c] = w
                self.cols.setdefault(c, set()).add(dst)
            elif c in dst_row:
                del dst_row[c]
                self.cols[c].discard(dst)
        if not dst_row:
            del self.rows[dst]
        if self.U is not None:
            urow = self.U[dst]
            for c, v in self.U[src].items():
                w = urow.get(c, 0) + q * v
                if w:
                    urow[c] = w
                elif c in urow:
                    del urow[c]

    def col_op(self, dst: int, src: int, q: int) -> None:
        """col[dst] += q * col[src]."""
        if q == 0:
            return
        for r in list(self.cols.get(src, ())):
            v = self.rows[r][src]
            row = self.rows[r]
            w = row.get(dst, 0) + q * v
            if w:
                self._check_cap(w)
                row[dst] = w
                self.cols.setdefault(dst, set()).add(r)
            elif dst in row:
                del row[dst]
                self.cols[dst].discard(r)
        if self.Vc is not None:
            vcol = self.Vc[dst]
            for r, v in self.Vc[src].items():
                w = vcol.get(r, 0) + q * v
                if w:
                    vcol[r] = w
                elif r in vcol:
                    del vcol[r]

    def negate_row(self, r: int) -> None:
        row = self.rows.get(r)
        if row:
            for c in row:
                row[c] = -row[c]
        if self.U is not None:
            urow = self.U[r]
            for c in urow:
                urow[c] = -urow[c]

    def pick_pivot(self) -> tuple[int, int] | None:
        if not self.rows:
            return None
        # Scan a handful of the sparsest rows; prefer unit entries, then low
        # Markowitz cost, then small magnitude, then (row, col) order.
        candidates = sorted(self.rows, key=lambda r: (len(self.rows[r]), r))[:8]
        best = None
        best_key = None
        for r in candidates:
            rn = len(self.rows[r])
            for c, v in sorted(self.rows[r].items()):
                key = (abs(v) != 1, (rn - 1) * (len(self.cols[c]) - 1), abs(v), r, c)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (r, c)
        return best

    def clear_pivot(self, r0: int, c0: int) -> tuple[int, int, int]:
        """Clear row r0 / column c0, shrinking the pivot by gcd steps as needed."""
        while True:
            if self.rows[r0][c0] < 0:
                self.negate_row(r0)
            # Column sweep: reduce every other entry in column c0 mod the pivot.
            while True:
                p = self.rows[r0][c0]
                offenders = sorted(x for x in self.cols[c0] if x != r0)
                for r in offenders:
                    q = self.rows[r][c0] // p
                    self.row_op(r, r0, -q)
                rem = sorted(x for x in self.cols[c0] if x != r0)
                if not rem:
                    break
                r0 = min(rem, key=lambda x: (self.rows[x][c0], x))
            # Row sweep via column operations (cannot dirty column c0).
            p = self.rows[r0][c0]
            row_rest = sorted(c for c in self.rows[r0] if c != c0)
            for c in row_rest:
                q = self.rows[r0][c] // p
                self.col_op(c, c0, -q)
            rem_cols = sorted(c for c in self.rows[r0] if c != c0)
            if rem_cols:
                c0 = min(rem_cols, key=lambda c: (self.rows[r0][c], c))
                continue
            # Divisibility sweep: the pivot must divide everything left.
            p = self.rows[r0][c0]
            bad = None
            for r in sorted(self.rows):
                if r == r0:
                    continue
                for c, v in sorted(self.rows[r].items()):
                    if v % p:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                return r0, c0, p
            self.row_op(r0, bad, 1)

    def retire(self, r0: int, c0: int, d: int) -> None:
        del self.rows[r0]
        self.cols[c0].discard(r0)
        if not self.cols[c0]:
            del self.cols[c0]
        self.retired.append((r0, c0, d))

    def run(self) -> None:
        while True:
            piv = self.pick_pivot()
            if piv is None:
                return
            r0, c0, d = self.clear_pivot(*piv)
            self.retire(r0, c0, d)

    def transforms(self) -> tuple[SparseIntMatrix, SparseIntMatrix]:
        assert self.U is not None and self.Vc is not None
        row_order = [r for r, _, _ in self.retired]
        row_order += sorted(set(range(self.nrows)) - set(row_order))
        col_order = [c for _, c, _ in self.retired]
        col_order += sorted(set(range(self.ncols)) - set(col_order))
        u_rows = [tuple(sorted(self.U[r].items())) for r in row_order]
        U = SparseIntMatrix(self.nrows, self.nrows, u_rows)
        v_dicts: list[dict[int, int]] = [dict() for _ in range(self.ncols)]
        for new_c, old_c in enumerate(col_order):
            for r, v in self.Vc[old_c].items():
                v_dicts[r][new_c] = v
        V = SparseIntMatrix.from_row_dicts(self.ncols, self.ncols, v_dicts)
        return U, V


def smith_normal_form(
    M: SparseIntMatrix,
    want_transforms: bool = False,
    *,
    entry_digit_cap: int | None = None,
    modular_check: bool = True,
) -> SmithResult:
    """Smith normal form of an integer matrix.

    Returns the positive invariant factors d_1 | d_2 | ... | d_r.  With
    want_transforms=True, also returns unimodular U (rows x rows) and
    V (cols x cols) with U*M*V equal to the diagonal of the d_i.

    A modular pre-pass computes the ranks mod 2 and mod 3 and checks them
    against the factor list afterwards (rank mod p counts the factors not
    divisible by p), so a broken elimination cannot return silently.

    Raises ResourceLimitError if entries outgrow entry_digit_cap decimal
    digits, signalling the caller to fall back to modular methods.
    """
    work = M
    if not want_transforms and M.rows > M.cols:
        work = row_lattice_echelon(M)
    mod_ranks = {p: rank_mod_p(work, p) for p in (2, 3)} if modular_check else {}
    elim = _Eliminator(work, want_transforms, entry_digit_cap)
    elim.run()
    factors = tuple(d for _, _, d in elim.retired)
    for a, b in zip(factors, factors[1:]):
        if b % a:
            raise AssertionError(f"divisibility chain broken: {a} !| {b}")
    for p, rp in mod_ranks.items():
        expected = sum(1 for d in factors if d % p)
        if rp != expected:
            raise AssertionError(
                f"modular cross-check failed: rank mod {p} is {rp}, "
                f"but {expected} invariant factors are prime to {p}"
            )
    result_rank = len(factors)
    if want_transforms:
        U, V = elim.transforms()
        return SmithResult(factors, result_rank, M.cols - result_rank, U, V)
    return SmithResult(factors, result_rank, M.cols - result_rank)


# -- modular elimination -----------------------------------------------------


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")


def rref_rows_mod_p(row_dicts, p: int) -> dict[int, dict[int, int]]:
    """Reduced row echelon form mod p of an iterable of sparse rows.

    Returns {pivot_col: row} where each row is a dict with a 1 at its pivot
    column and support only on non-pivot columns otherwise.
    """
    pivots: dict[int, dict[int, int]] = {}
    for raw in row_dicts:
        vec = {c: v % p for c, v in raw.items() if v % p}
        while vec:
            j = min(vec)
            if j not in pivots:
                inv = pow(vec[j], p - 2, p) if p > 2 else 1
                vec = {c: (v * inv) % p for c, v in vec.items()}
                # Clear any other pivot columns from the new row.
                for c in [c for c in vec if c != j and c in pivots]:
                    f = vec[c]
                    for cc, v in pivots[c].items():
                        w = (vec.get(cc, 0) - f * v) % p
                        if w:
                            vec[cc] = w
                        elif cc in vec:
                            del vec[cc]
                # Reduce existing rows by the new pivot.
                for other in pivots.values():
                    f = other.get(j, 0)
                    if f:
                        for c, v in vec.items():
                            w = (other.get(c, 0) - f * v) % p
                            if w:
                                other[c] = w
                            elif c in other:
                                del other[c]
                pivots[j] = vec
                break
            piv = pivots[j]
            f = vec[j]
            for c, v in piv.items():
                w = (vec.get(c, 0) - f * v) % p
                if w:
                    vec[c] = w
                elif c in vec:
                    del vec[c]
    return pivots


def _echelon_mod_p(M: SparseIntMatrix, p: int) -> dict[int, dict[int, int]]:
    return rref_rows_mod_p((dict(row) for row in M.iter_rows()), p)


def _rank_mod_2_bitset(M: SparseIntMatrix) -> int:
    pivots: dict[int, int] = {}
    for row in M.iter_rows():
        bits = 0
        for c, v in row:
            if v & 1:
                bits ^= 1 << c
        while bits:
            j = (bits & -bits).bit_length() - 1
            if j not in pivots:
                pivots[j] = bits
                break
            bits ^= pivots[j]
    return len(pivots)


def rank_mod_p(M: SparseIntMatrix, p: int) -> int:
    """Rank of M over the field with p elements."""
    _require_prime(p)
    if p == 2:
        return _rank_mod_2_bitset(M)
    return len(_echelon_mod_p(M, p))


def nullspace_mod_p(M: SparseIntMatrix, p: int) -> list[tuple[int, ...]]:
    """Echelonized basis of the right nullspace of M over F_p."""
    _require_prime(p)
    pivots = _echelon_mod_p(M, p)
    free_cols = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free_cols:
        vec = [0] * M.cols
        vec[f] = 1
        for j, row in pivots.items():
            coeff = row.get(f, 0)
            if coeff:
                vec[j] = (-coeff) % p
        basis.append(tuple(vec))
    return basis


def qz_solution_group(M: SparseIntMatrix, B: SparseIntMatrix) -> tuple[int, ...]:
    """Invariant factors of {x in (Q/Z)^c : M x integral} / image(B).

    Requires M*B = 0 over the integers.  In the transformed coordinates of
    the Smith form of M, the kernel condition splits into finite cyclic
    blocks C_{d_i} plus a divisible part of dimension nullity(M); since
    M*B = 0 pushes the image of B entirely into that divisible part, the
    quotient is finite exactly when rank(B) equals nullity(M), in which case
    the divisible part cancels and the nontrivial d_i survive unchanged.
    """
    if M.cols != B.rows:
        raise ValueError(f"shape mismatch: M has {M.cols} columns, B has {B.rows} rows")
    if not M.mul(B).is_zero():
        raise ValueError("M*B is not the zero matrix")
    res = smith_normal_form(M)
    rank_b = row_lattice_echelon(B).rows
    if rank_b != res.nullity:
        raise ValueError(
            f"quotient is not finite: rank(B) = {rank_b} but nullity(M) = {res.nullity}"
        )
    return tuple(d for d in res.invariant_factors if d > 1)

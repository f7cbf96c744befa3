"""Symmetric second cohomology of a finite group over Q/Z, by exact linear algebra.

A symmetric 2-cochain assigns a rational value in [0, 1) to every unordered
pair {g, h} of group elements (coinciding pairs included); a value q stands
for the circle-group element e^(2*pi*i*q).  The coboundary operator is
d(alpha)(g, h, k) = alpha(h, k) - alpha(gh, k) + alpha(g, hk) - alpha(g, h),
and alpha is a cocycle when every such combination is an integer.

Coboundaries of 1-cochains are symmetric exactly when the 1-cochain is a
class function (d(f)(g,h) - d(f)(h,g) = f(hg) - f(gh)), so the coboundary
matrix B has one column per conjugacy class rather than one per element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import ParseError, ValidationError
from .groups import FiniteGroup, conjugacy_classes
from .linalg import (
    SparseIntMatrix,
    qz_solution_group,
    row_lattice_echelon,
    smith_normal_form,
)

DEFAULT_ORACLE_CAP = 64


def pair_columns(n: int) -> dict[tuple[int, int], int]:
    """Column index for each unordered pair (g, h), g <= h, in lex order."""
    cols = {}
    idx = 0
    for g in range(1, n + 1):
        for h in range(g, n + 1):
            cols[(g, h)] = idx
            idx += 1
    return cols


def _pair_lookup(n: int) -> list[int]:
    """Flat ordered-pair -> unordered-pair-column table: entry (g-1)*n + (h-1)."""
    cols = pair_columns(n)
    flat = [0] * (n * n)
    for g in range(1, n + 1):
        for h in range(1, n + 1):
            flat[(g - 1) * n + (h - 1)] = cols[(g, h) if g <= h else (h, g)]
    return flat


@dataclass(frozen=True)
class CohomologyGroup:
    """Finite abelian group as a divisibility chain of invariant factors."""

    invariant_factors: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def order(self) -> int:
        r = 1
        for d in self.invariant_factors:
            r *= d
        return r

    def __str__(self) -> str:
        if self.is_trivial:
            return "trivial"
        return " x ".join(f"C{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class SymmetricCochain:
    """Sparse symmetric 2-cochain; pairs not listed carry the value 0."""

    n: int
    values: dict[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (g, h), v in self.values.items():
            if not (1 <= g <= self.n and 1 <= h <= self.n):
                raise ValidationError(f"pair ({g}, {h}) outside 1..{self.n}")
            if g > h:
                g, h = h, g
            v = v % 1
            if v:
                clean[(g, h)] = v
        object.__setattr__(self, "values", clean)

    def get(self, g: int, h: int) -> Fraction:
        if g > h:
            g, h = h, g
        if not (1 <= g and h <= self.n):
            raise ValidationError(f"pair ({g}, {h}) outside 1..{self.n}")
        return self.values.get((g, h), Fraction(0))

    def denominator(self) -> int:
        return lcm(1, *(v.denominator for v in self.values.values()))

    def dump(self) -> str:
        lines = [f"# symmetric 2-cochain on a group of order {self.n}", str(self.n)]
        for (g, h), v in sorted(self.values.items()):
            lines.append(f"{g} {h} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "SymmetricCochain":
        lines = [
            ln for ln in (s.strip() for s in text.splitlines()) if ln and not ln.startswith("#")
        ]
        if not lines:
            raise ParseError("empty cochain file")
        try:
            n = int(lines[0])
        except ValueError:
            raise ParseError(f"expected group order, got {lines[0]!r}") from None
        values = {}
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ParseError(f"expected 'g h num/den', got {ln!r}")
            try:
                g, h = int(parts[0]), int(parts[1])
                v = Fraction(parts[2])
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad cochain line {ln!r}: {exc}") from None
            values[(g, h)] = v
        return cls(n, values)


def coboundary_matrix(G: FiniteGroup) -> SparseIntMatrix:
    """Class-function coboundary matrix: pairs x classes, d(f)(g,h) = f(g)+f(h)-f(gh)."""
    n = G.order
    part = conjugacy_classes(G)
    cls_of = part.class_of
    b_rows = []
    for g in range(1, n + 1):
        for h in range(g, n + 1):
            acc: dict[int, int] = {}
            for cls, sgn in (
                (cls_of[g], 1),
                (cls_of[h], 1),
                (cls_of[G.mul(g, h)], -1),
            ):
                c = cls - 1
                acc[c] = acc.get(c, 0) + sgn
            b_rows.append(tuple(sorted((c, v) for c, v in acc.items() if v)))
    return SparseIntMatrix(n * (n + 1) // 2, part.class_count, b_rows)


def symmetric_cocycle_system(G: FiniteGroup) -> tuple[SparseIntMatrix, SparseIntMatrix]:
    """The cocycle matrix M (n^3 rows) and the class-coboundary matrix B.

    Row (g, h, k) of M encodes d(alpha)(g, h, k) with its four terms folded
    onto unordered-pair columns, so entries stay within [-2, 2].
    M*B = 0 holds exactly.
    """
    n = G.order
    flat = _pair_lookup(n)
    ncols = n * (n + 1) // 2
    rows: list[tuple[tuple[int, int], ...]] = []
    mul = G.mul
    for g in range(1, n + 1):
        g_off = (g - 1) * n
        for h in range(1, n + 1):
            gh = mul(g, h)
            gh_off = (gh - 1) * n
            h_off = (h - 1) * n
            c_gh = flat[g_off + (h - 1)]
            for k in range(1, n + 1):
                hk = mul(h, k)
                acc: dict[int, int] = {}
                for c, sgn in (
                    (flat[h_off + (k - 1)], 1),
                    (flat[gh_off + (k - 1)], -1),
                    (flat[g_off + (hk - 1)], 1),
                    (c_gh, -1),
                ):
                    acc[c] = acc.get(c, 0) + sgn
                rows.append(tuple(sorted((c, v) for c, v in acc.items() if v)))
    M = SparseIntMatrix(n * n * n, ncols, rows)
    return M, coboundary_matrix(G)


def symmetric_h2(G: FiniteGroup, *, cap: int = DEFAULT_ORACLE_CAP) -> CohomologyGroup:
    """Invariant factors of {symmetric cocycles over Q/Z} / {class coboundaries}."""
    if G.order > cap:
        raise ValueError(f"group order {G.order} exceeds the oracle cap {cap}")
    M, B = symmetric_cocycle_system(G)
    return CohomologyGroup(qz_solution_group(M, B))


def extract_nontrivial_cocycle(
    G: FiniteGroup, *, cap: int = DEFAULT_ORACLE_CAP, normalize: bool = False
) -> SymmetricCochain | None:
    """A symmetric cocycle that is not a class-function coboundary, or None.

    The returned cochain generates a maximal-order cyclic summand of the
    symmetric cohomology group, so its denominators divide the largest
    invariant factor.  It is verified internally against both the cocycle
    identity and the coboundary solve before being returned.
    """
    if G.order > cap:
        raise ValueError(f"group order {G.order} exceeds the oracle cap {cap}")
    M, _ = symmetric_cocycle_system(G)
    R = row_lattice_echelon(M)
    res = smith_normal_form(R, want_transforms=True)
    if not res.invariant_factors or res.invariant_factors[-1] == 1:
        return None
    d = res.invariant_factors[-1]
    col = res.rank - 1
    values = {}
    for (g, h), c in pair_columns(G.order).items():
        v = res.V.get(c, col) % d
        if v:
            values[(g, h)] = Fraction(v, d)
    alpha = SymmetricCochain(G.order, values)
    if normalize:
        c0 = alpha.get(1, 1)
        if c0:
            alpha = SymmetricCochain(
                G.order,
                {pair: alpha.get(*pair) - c0 for pair in pair_columns(G.order)},
            )
    ok, witness = verify_cocycle(G, alpha)
    if not ok:
        raise ValidationError(f"internal error: extracted cochain fails at {witness}")
    if solve_class_coboundary(G, alpha) is not None:
        raise ValidationError("internal error: extracted cochain is a coboundary")
    return alpha


def verify_cocycle(
    G: FiniteGroup, alpha: SymmetricCochain
) -> tuple[bool, tuple[int, int, int] | None]:
    """Check d(alpha)(g,h,k) is integral for all n^3 triples, in exact arithmetic.

    Returns (True, None) or (False, first_failing_triple).
    """
    n = G.order
    if alpha.n != n:
        raise ValidationError(f"cochain is on order {alpha.n}, group has order {n}")
    D = alpha.denominator()
    cols = pair_columns(n)
    vals = [0] * len(cols)
    for pair, c in cols.items():
        v = alpha.values.get(pair)
        if v is not None:
            vals[c] = int(v * D) % D
    flat = _pair_lookup(n)
    mul = G.mul
    for g in range(1, n + 1):
        g_off = (g - 1) * n
        for h in range(1, n + 1):
            gh = mul(g, h)
            gh_off = (gh - 1) * n
            h_off = (h - 1) * n
            a_gh = vals[flat[g_off + (h - 1)]]
            for k in range(1, n + 1):
                hk = mul(h, k)
                t = (
                    vals[flat[h_off + (k - 1)]]
                    - vals[flat[gh_off + (k - 1)]]
                    + vals[flat[g_off + (hk - 1)]]
                    - a_gh
                )
                if t % D:
                    return False, (g, h, k)
    return True, None


def solve_class_coboundary(
    G: FiniteGroup, alpha: SymmetricCochain
) -> tuple[Fraction, ...] | None:
    """Find a class function f with d(f) = alpha mod 1, or None if none exists."""
    n = G.order
    if alpha.n != n:
        raise ValidationError(f"cochain is on order {alpha.n}, group has order {n}")
    B = coboundary_matrix(G)
    res = smith_normal_form(B, want_transforms=True)
    cols = pair_columns(n)
    x = [Fraction(0)] * len(cols)
    for pair, c in cols.items():
        v = alpha.values.get(pair)
        if v is not None:
            x[c] = v
    # In the Smith coordinates w = U*x the system B*f = x mod 1 splits into
    # d_i * y_i = w_i (always solvable over Q) plus integrality of the tail.
    w = [Fraction(0)] * B.rows
    for r in range(B.rows):
        acc = Fraction(0)
        for c, u in res.U.row_items(r):
            if x[c]:
                acc += u * x[c]
        w[r] = acc
    for r in range(res.rank, B.rows):
        if w[r].denominator != 1:
            return None
    y = [Fraction(0)] * B.cols
    for i, d in enumerate(res.invariant_factors):
        y[i] = w[i] / d
    f = [Fraction(0)] * B.cols
    for r in range(B.cols):
        acc = Fraction(0)
        for c, v in res.V.row_items(r):
            if y[c]:
                acc += v * y[c]
        f[r] = acc % 1
    return tuple(f)

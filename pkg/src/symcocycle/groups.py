"""Finite groups as 1-based Cayley tables, plus the basic structure computations.

Element indices are 1-based everywhere in the public API and in the file
formats; element 1 is always the identity.  Lines starting with '#' are
treated as comments in both file formats.

.mtab format: first token is the order n, followed by n*n tokens giving the
multiplication table row by row (entry (i, j) = index of g_i * g_j).

.perm format: first two tokens are "d m" (degree, generator count), followed
by m image lists of length d, each a permutation of 1..d.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParseError, ResourceLimitError, ValidationError

# Exhaustive associativity checking is cubic; above this order fall back to
# random sampling of 10*n^2 triples.
EXHAUSTIVE_ASSOC_LIMIT = 256

DEFAULT_CLOSURE_CAP = 10_000


class FiniteGroup:
    """A finite group given by its full multiplication table.

    Immutable after construction; all methods are pure reads.
    """

    __slots__ = ("order", "_table", "_inv")

    def __init__(self, table: list[list[int]], *, validate: bool = True):
        n = len(table)
        if n == 0:
            raise ValidationError("group order must be positive")
        self.order = n
        # Pad with a dummy 0 row/column so the table is indexed 1-based.
        self._table = tuple(
            (0,) * (n + 1) if i == 0 else (0,) + tuple(table[i - 1]) for i in range(n + 1)
        )
        if validate:
            self._validate()
        inv = [0] * (n + 1)
        for i in range(1, n + 1):
            row = self._table[i]
            for k in range(1, n + 1):
                if row[k] == 1:
                    inv[i] = k
                    break
            else:
                raise ValidationError(f"element {i} has no inverse")
        self._inv = tuple(inv)

    def _validate(self) -> None:
        n = self.order
        t = self._table
        for i in range(1, n + 1):
            if len(t[i]) != n + 1:
                raise ValidationError(f"row {i} has {len(t[i]) - 1} entries, expected {n}")
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                v = t[i][j]
                if not 1 <= v <= n:
                    raise ValidationError(
                        f"entry out of range: table[{i}][{j}] = {v}, expected 1..{n}"
                    )
        for j in range(1, n + 1):
            if t[1][j] != j:
                raise ValidationError(
                    f"identity axiom violated: table[1][{j}] = {t[1][j]}, expected {j}"
                )
            if t[j][1] != j:
                raise ValidationError(
                    f"identity axiom violated: table[{j}][1] = {t[j][1]}, expected {j}"
                )
        for i in range(1, n + 1):
            if len(set(t[i][1:])) != n:
                raise ValidationError(f"Latin square violated: row {i} repeats an entry")
        for j in range(1, n + 1):
            col = set(t[i][j] for i in range(1, n + 1))
            if len(col) != n:
                raise ValidationError(f"Latin square violated: column {j} repeats an entry")
        if n <= EXHAUSTIVE_ASSOC_LIMIT:
            triples = (
                (i, j, k)
                for i in range(1, n + 1)
                for j in range(1, n + 1)
                for k in range(1, n + 1)
            )
        else:
            rng = random.Random(0)
            triples = (
                (rng.randint(1, n), rng.randint(1, n), rng.randint(1, n))
                for _ in range(10 * n * n)
            )
        for i, j, k in triples:
            if t[t[i][j]][k] != t[i][t[j][k]]:
                raise ValidationError(
                    f"associativity violated at triple ({i}, {j}, {k}):"
                    f" ({i}*{j})*{k} = {t[t[i][j]][k]} but {i}*({j}*{k}) = {t[i][t[j][k]]}"
                )

    # -- element arithmetic ------------------------------------------------

    def mul(self, i: int, j: int) -> int:
        if not (1 <= i <= self.order and 1 <= j <= self.order):
            raise ValueError(f"element index out of range: ({i}, {j}), order {self.order}")
        return self._table[i][j]

    def inv(self, i: int) -> int:
        if not 1 <= i <= self.order:
            raise ValueError(f"element index out of range: {i}, order {self.order}")
        return self._inv[i]

    def conjugate(self, g: int, h: int) -> int:
        """g * h * g^-1."""
        t = self._table
        return t[t[g][h]][self._inv[g]]

    def commutator(self, g: int, h: int) -> int:
        """g * h * g^-1 * h^-1."""
        return self._table[self.conjugate(g, h)][self._inv[h]]

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 1:
            x = self._table[x][i]
            k += 1
        return k

    def order_histogram(self) -> dict[int, int]:
        """Map element order -> number of elements of that order."""
        hist: dict[int, int] = {}
        for i in range(1, self.order + 1):
            o = self.element_order(i)
            hist[o] = hist.get(o, 0) + 1
        return hist

    def is_abelian(self) -> bool:
        t = self._table
        n = self.order
        return all(t[i][j] == t[j][i] for i in range(1, n + 1) for j in range(i + 1, n + 1))

    def elements(self) -> range:
        return range(1, self.order + 1)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_permutations(
        cls,
        degree: int,
        generators: list[list[int]],
        *,
        cap: int = DEFAULT_CLOSURE_CAP,
    ) -> "FiniteGroup":
        """Close a set of permutations of 1..degree under composition.

        Elements are numbered breadth-first from the identity, taking the
        generators in input order, so the numbering is deterministic.
        Composition is (a*b)(x) = a(b(x)).
        """
        if degree < 1:
            raise ValueError(f"degree must be positive, got {degree}")
        gens = []
        for g in generators:
            if sorted(g) != list(range(1, degree + 1)):
                raise ValidationError(f"not a permutation of 1..{degree}: {g}")
            gens.append(tuple(x - 1 for x in g))
        ident = tuple(range(degree))
        elems = [ident]
        index = {ident: 0}
        head = 0
        while head < len(elems):
            e = elems[head]
            head += 1
            for g in gens:
                w = tuple(e[g[x]] for x in range(degree))
                if w not in index:
                    if len(elems) >= cap:
                        raise ResourceLimitError(
                            f"permutation closure exceeded cap of {cap} elements"
                        )
                    index[w] = len(elems)
                    elems.append(w)
        n = len(elems)
        table = [[0] * n for _ in range(n)]
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i][j] = index[tuple(a[b[x]] for x in range(degree))] + 1
        return cls(table)


@dataclass(frozen=True)
class ElementSet:
    """A subset of the elements of a parent group, kept sorted."""

    members: tuple[int, ...]
    parent_order: int

    def __post_init__(self):
        if tuple(sorted(set(self.members))) != self.members:
            object.__setattr__(self, "members", tuple(sorted(set(self.members))))
        for m in self.members:
            if not 1 <= m <= self.parent_order:
                raise ValidationError(f"member {m} outside 1..{self.parent_order}")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members


@dataclass(frozen=True)
class ConjugacyPartition:
    """Partition of 1..n into conjugacy classes.

    class_of is 1-based (index 0 is a dummy); classes are numbered 1..c in
    order of their smallest member, so representatives[k-1] is the least
    element of class k.
    """

    class_of: tuple[int, ...]
    class_count: int
    representatives: tuple[int, ...]


def conjugacy_classes(G: FiniteGroup) -> ConjugacyPartition:
    """Orbits of the conjugation action h -> g*h*g^-1, by brute force."""
    n = G.order
    class_of = [0] * (n + 1)
    reps = []
    c = 0
    for h in range(1, n + 1):
        if class_of[h]:
            continue
        c += 1
        reps.append(h)
        stack = [h]
        class_of[h] = c
        while stack:
            x = stack.pop()
            for g in range(1, n + 1):
                y = G.conjugate(g, x)
                if not class_of[y]:
                    class_of[y] = c
                    stack.append(y)
    return ConjugacyPartition(tuple(class_of), c, tuple(reps))


def subgroup_closure(G: FiniteGroup, seeds: list[int] | tuple[int, ...]) -> ElementSet:
    """Smallest subgroup containing the seeds, by worklist closure."""
    for s in seeds:
        if not 1 <= s <= G.order:
            raise ValueError(f"seed {s} outside 1..{G.order}")
    members = {1}
    work = [1]
    for s in seeds:
        if s not in members:
            members.add(s)
            work.append(s)
    while work:
        x = work.pop()
        y = G.inv(x)
        if y not in members:
            members.add(y)
            work.append(y)
        for z in list(members):
            for w in (G.mul(x, z), G.mul(z, x)):
                if w not in members:
                    members.add(w)
                    work.append(w)
    return ElementSet(tuple(sorted(members)), G.order)


def derived_subgroup(G: FiniteGroup) -> ElementSet:
    """Subgroup generated by all commutators g*h*g^-1*h^-1."""
    seeds = set()
    for g in range(1, G.order + 1):
        for h in range(1, G.order + 1):
            seeds.add(G.commutator(g, h))
    return subgroup_closure(G, sorted(seeds))


# -- file formats ----------------------------------------------------------


def _tokens(text: str) -> list[str]:
    toks = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks.extend(line.split())
    return toks


def parse_mtab(text: str) -> FiniteGroup:
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty .mtab file")
    try:
        n = int(toks[0])
    except ValueError:
        raise ParseError(f"expected group order, got {toks[0]!r}") from None
    if n < 1:
        raise ParseError(f"group order must be positive, got {n}")
    body = toks[1:]
    if len(body) != n * n:
        raise ParseError(f"expected {n * n} table entries, got {len(body)}")
    try:
        vals = [int(t) for t in body]
    except ValueError as exc:
        raise ParseError(f"non-integer table entry: {exc}") from None
    table = [vals[i * n : (i + 1) * n] for i in range(n)]
    return FiniteGroup(table)


def dump_mtab(G: FiniteGroup, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.append(str(G.order))
    for i in range(1, G.order + 1):
        lines.append(" ".join(str(G.mul(i, j)) for j in range(1, G.order + 1)))
    return "\n".join(lines) + "\n"


def parse_perm(text: str, *, cap: int = DEFAULT_CLOSURE_CAP) -> FiniteGroup:
    toks = _tokens(text)
    if len(toks) < 2:
        raise ParseError("expected 'd m' header in .perm file")
    try:
        d, m = int(toks[0]), int(toks[1])
    except ValueError:
        raise ParseError(f"malformed .perm header: {toks[:2]}") from None
    body = toks[2:]
    if len(body) != d * m:
        raise ParseError(f"expected {d * m} image entries, got {len(body)}")
    try:
        vals = [int(t) for t in body]
    except ValueError as exc:
        raise ParseError(f"non-integer image entry: {exc}") from None
    gens = [vals[i * d : (i + 1) * d] for i in range(m)]
    return FiniteGroup.from_permutations(d, gens, cap=cap)


def load_group_file(path: str) -> FiniteGroup:
    """Load a group from a .mtab or .perm file, dispatching on extension."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".perm"):
        return parse_perm(text)
    return parse_mtab(text)

"""Finitely presented groups and the conjugation-envelope construction.

A word over free generators 1..r is a tuple of nonzero signed integers:
+g is the generator g, -g its inverse.  Relators are stored freely reduced,
with empty words and exact duplicates dropped.

The .fpres text format is one header line with the generator count followed
by one line per relator, each a space-separated list of signed integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .groups import FiniteGroup
from .linalg import SparseIntMatrix

Word = tuple[int, ...]


def free_reduce(word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[int] = []
    for x in word:
        if x == 0:
            raise ValueError("0 is not a valid letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word) -> Word:
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class Presentation:
    """Finitely presented group: generator count plus freely reduced relators."""

    ngens: int
    relators: tuple[Word, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.ngens < 0:
            raise ValidationError("generator count must be nonnegative")
        seen: set[Word] = set()
        cleaned: list[Word] = []
        for rel in self.relators:
            red = free_reduce(rel)
            if not red or red in seen:
                continue
            for x in red:
                if abs(x) > self.ngens:
                    raise ValidationError(
                        f"relator letter {x} exceeds generator count {self.ngens}"
                    )
            seen.add(red)
            cleaned.append(red)
        object.__setattr__(self, "relators", tuple(cleaned))


def envelope_presentation(G: FiniteGroup) -> Presentation:
    """Presentation on one generator per group element, with the relators
    e_i e_j e_i^-1 e_k^-1 where g_k = g_i g_j g_i^-1 (one per ordered pair).

    The raw relator count is n^2; relators with i = j reduce to the empty
    word and commuting pairs collapse to commutators, so fewer survive.
    """
    n = G.order
    rels = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            k = G.conjugate(i, j)
            rels.append((i, j, -i, -k))
    return Presentation(n, tuple(rels))


def abelianized_relation_matrix(P: Presentation) -> SparseIntMatrix:
    """One row per relator, one column per generator; entries are exponent sums."""
    dicts = []
    for rel in P.relators:
        acc: dict[int, int] = {}
        for x in rel:
            c = abs(x) - 1
            acc[c] = acc.get(c, 0) + (1 if x > 0 else -1)
        dicts.append({c: v for c, v in acc.items() if v})
    return SparseIntMatrix.from_row_dicts(len(P.relators), P.ngens, dicts)


def dump_fpres(P: Presentation) -> str:
    lines = [str(P.ngens)]
    for rel in P.relators:
        lines.append(" ".join(str(x) for x in rel))
    return "\n".join(lines) + "\n"


def parse_fpres(text: str) -> Presentation:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty .fpres file")
    try:
        ngens = int(lines[0])
    except ValueError:
        raise ParseError(f"expected generator count, got {lines[0]!r}") from None
    rels = []
    for ln in lines[1:]:
        try:
            rels.append(tuple(int(t) for t in ln.split()))
        except ValueError as exc:
            raise ParseError(f"bad relator line {ln!r}: {exc}") from None
    return Presentation(ngens, tuple(rels))

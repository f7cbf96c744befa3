"""Maximal p-quotients of finitely presented groups, as weighted pc presentations.

A PcGroup holds generators a_0 < a_1 < ... < a_{k-1} (0-based indices), each
of weight >= 1, with power relations a_i^p = tail and commutator relations
a_j a_i = a_i a_j * tail for j > i; tails are words in generators of strictly
higher index, stored as exponent vectors.  Every element has a unique normal
form a_0^{x_0} ... a_{k-1}^{x_{k-1}} with 0 <= x_i < p once the presentation
is consistent.

The quotient construction is the classical iterative lift: the class-1 layer
comes from the mod-p abelianization; each later layer adds one central tail
generator per non-defining relation (and per non-defining generator image),
derives linear equations over F_p from the standard consistency overlaps and
from the images of the original relators, and eliminates the dead tails.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimitError, ValidationError
from .linalg import is_prime, rref_rows_mod_p
from .presentation import Presentation, Word, abelianized_relation_matrix

Vector = tuple[int, ...]

DEFAULT_COLLECT_CAP = 1_000_000
DEFAULT_MAX_GENS = 2048

# A generator's definition: ("image", x) for the image of source generator x,
# ("power", i) for the relation a_i^p, ("comm", j, i) for [a_j, a_i].
Definition = tuple


def _letters(vec: Vector) -> list[tuple[int, int]]:
    return [(i, e) for i, e in enumerate(vec) if e]


class PcGroup:
    """Finite p-group given by a consistent weighted pc presentation."""

    __slots__ = (
        "p",
        "ngens",
        "weights",
        "powers",
        "comms",
        "definitions",
        "collect_cap",
        "_central",
        "_noncentral_template",
        "_power_letters",
        "_comm_letters",
        "_identity",
    )

    def __init__(
        self,
        p: int,
        weights: tuple[int, ...],
        powers: tuple[Vector, ...],
        comms: dict[tuple[int, int], Vector],
        definitions: tuple[Definition, ...],
        *,
        collect_cap: int = DEFAULT_COLLECT_CAP,
    ):
        k = len(weights)
        self.p = p
        self.ngens = k
        self.weights = tuple(weights)
        self.powers = tuple(tuple(v) for v in powers)
        self.comms = {key: tuple(v) for key, v in comms.items() if any(v)}
        self.definitions = tuple(definitions)
        self.collect_cap = collect_cap
        if len(self.powers) != k or len(self.definitions) != k:
            raise ValidationError("powers/definitions length mismatch")
        for i, tail in enumerate(self.powers):
            if len(tail) != k:
                raise ValidationError(f"power tail {i} has wrong length")
            if any(tail[:i + 1]):
                raise ValidationError(f"power tail of a_{i} touches index <= {i}")
        for (j, i), tail in self.comms.items():
            if not 0 <= i < j < k:
                raise ValidationError(f"bad commutator key ({j}, {i})")
            if len(tail) != k or any(tail[:j + 1]):
                raise ValidationError(f"commutator tail ({j}, {i}) touches index <= {j}")
        involved = set()
        for j, i in self.comms:
            involved.add(j)
            involved.add(i)
        self._central = tuple(g not in involved for g in range(k))
        mask = 0
        for g in range(k):
            if not self._central[g]:
                mask |= 1 << g
        self._noncentral_template = mask
        self._power_letters = tuple(_letters(v) for v in self.powers)
        self._comm_letters = {key: _letters(v) for key, v in self.comms.items()}
        self._identity = (0,) * k

    @property
    def order(self) -> int:
        return self.p ** self.ngens

    @property
    def p_class(self) -> int:
        return max(self.weights, default=0)

    def identity(self) -> Vector:
        return self._identity

    def generator(self, i: int) -> Vector:
        vec = [0] * self.ngens
        vec[i] = 1
        return tuple(vec)

    # -- collection --------------------------------------------------------

    def collect(self, items) -> Vector:
        """Normal form of a product of (generator, exponent) letters.

        Collection from the left with an explicit work stack: the leftmost
        pending letter is repeatedly merged into the collected prefix, using
        the commutator rule a_j a_g = a_g a_j [a_j, a_g] to move letters past
        higher-index non-central generators and the power relations to fold
        exponent overflow.
        """
        p = self.p
        ex = [0] * self.ngens
        nc_occupied = 0  # bitmask of occupied non-central slots
        nc_template = self._noncentral_template
        central = self._central
        powers = self._power_letters
        comms = self._comm_letters
        stack = [(g, e) for g, e in reversed(list(items)) if e]
        steps = 0
        cap = self.collect_cap
        while stack:
            steps += 1
            if steps > cap:
                raise ResourceLimitError(f"collection exceeded {cap} steps")
            g, e = stack.pop()
            if e < 0:
                # a^-1 = a^(p-1) * (a^p)^-1, recursing into higher weights.
                if e < -1:
                    stack.append((g, e + 1))
                for h, c in powers[g]:
                    stack.append((h, -c))
                stack.append((g, p - 1))
                continue
            above = nc_occupied >> (g + 1)
            if not above:
                tot = ex[g] + e
                ex[g] = tot % p
                if not central[g]:
                    if ex[g]:
                        nc_occupied |= 1 << g
                    else:
                        nc_occupied &= ~(1 << g)
                q = tot // p
                if q:
                    tail = powers[g]
                    for _ in range(q):
                        for h, c in reversed(tail):
                            stack.append((h, c))
                continue
            # Peel one copy of the highest occupied non-central generator.
            j = above.bit_length() + g
            ex[j] -= 1
            if ex[j] == 0:
                nc_occupied &= ~(1 << j)
            if e > 1:
                stack.append((g, e - 1))
            cl = comms.get((j, g))
            if cl:
                for h, c in reversed(cl):
                    stack.append((h, c))
            stack.append((j, 1))
            stack.append((g, 1))
        return tuple(ex)

    def mul(self, u: Vector, v: Vector) -> Vector:
        return self.collect(_letters(u) + _letters(v))

    def pow(self, u: Vector, e: int) -> Vector:
        if e < 0:
            return self.pow(self.inv(u), -e)
        return self.collect(_letters(u) * e)

    def inv(self, u: Vector) -> Vector:
        """The unique v with u * v = identity."""
        return self.collect([(i, -e) for i, e in reversed(_letters(u))])

    def comm(self, u: Vector, v: Vector) -> Vector:
        """[u, v] = u^-1 v^-1 u v."""
        return self.collect(
            _letters(self.inv(u)) + _letters(self.inv(v)) + _letters(u) + _letters(v)
        )

    def conj(self, g: Vector, u: Vector) -> Vector:
        """g * u * g^-1."""
        return self.collect(_letters(g) + _letters(u) + _letters(self.inv(g)))

    def evaluate_word(self, word: Word, images: tuple[Vector, ...]) -> Vector:
        """Collect a relator word through generator images (1-based letters)."""
        items: list[tuple[int, int]] = []
        inv_cache: dict[int, Vector] = {}
        for x in word:
            g = abs(x) - 1
            if x > 0:
                items.extend(_letters(images[g]))
            else:
                if g not in inv_cache:
                    inv_cache[g] = self.inv(images[g])
                items.extend(_letters(inv_cache[g]))
        return self.collect(items)

    def __repr__(self) -> str:
        return f"PcGroup(p={self.p}, ngens={self.ngens}, class={self.p_class})"


@dataclass(frozen=True)
class Epimorphism:
    """Images of the source presentation's generators in a PcGroup."""

    images: tuple[Vector, ...]

    def check(self, P: Presentation, G: PcGroup) -> bool:
        """Every source relator must collect to the identity."""
        ident = G.identity()
        return all(G.evaluate_word(rel, self.images) == ident for rel in P.relators)


# -- consistency test words --------------------------------------------------


def _overlap_tests(G: PcGroup, bound: int):
    """Yield (label, lhs_vector, rhs_vector) for the standard overlap words.

    Covers a_k(a_j a_i) = (a_k a_j)a_i for k > j > i, the two power overlaps
    for j > i, and a_i^p a_i = a_i a_i^p, restricted by weight sums <= bound.
    """
    p = G.p
    w = G.weights  # nondecreasing: layers are appended in class order
    k = G.ngens
    gens = [G.generator(i) for i in range(k)]
    for i in range(k):
        if 2 * w[i] > bound:
            break
        lhs = G.collect(_letters(G.powers[i]) + [(i, 1)])
        rhs = G.collect([(i, 1)] + _letters(G.powers[i]))
        yield (f"a{i}^p.a{i}", lhs, rhs)
    for j in range(1, k):
        if w[j] + w[0] > bound:
            break
        for i in range(j):
            if w[j] + w[i] > bound:
                break
            # Each pair compares the power rule applied first (via the stored
            # tail) against the swap rule applied first; handing the flat word
            # to the collector would follow one route twice and test nothing.
            ji = G.collect([(j, 1), (i, 1)])
            lhs = G.collect(_letters(G.powers[j]) + [(i, 1)])
            rhs = G.collect([(j, p - 1)] + _letters(ji))
            yield (f"a{j}^p.a{i}", lhs, rhs)
            lhs = G.collect([(j, 1)] + _letters(G.powers[i]))
            rhs = G.collect(_letters(ji) + [(i, p - 1)])
            yield (f"a{j}.a{i}^p", lhs, rhs)
    for c in range(k):
        if 3 * w[c] > bound:
            break
        for b in range(c + 1, k):
            if w[c] + 2 * w[b] > bound:
                break
            for a in range(b + 1, k):
                if w[c] + w[b] + w[a] > bound:
                    break
                inner = G.mul(gens[b], gens[c])
                lhs = G.mul(gens[a], inner)
                rhs = G.mul(G.mul(gens[a], gens[b]), gens[c])
                yield (f"a{a}(a{b}a{c})", lhs, rhs)


def consistency_violations(G: PcGroup) -> list[tuple[str, Vector, Vector]]:
    """Overlap test words that collect differently; empty iff consistent."""
    bound = G.p_class + 1
    bad = []
    for label, lhs, rhs in _overlap_tests(G, bound):
        if lhs != rhs:
            bad.append((label, lhs, rhs))
    return bad


# -- the quotient construction ------------------------------------------------


def _class_one(P: Presentation, p: int, collect_cap: int):
    A = abelianized_relation_matrix(P)
    pivots = rref_rows_mod_p((dict(row) for row in A.iter_rows()), p)
    free_cols = [c for c in range(P.ngens) if c not in pivots]
    d1 = len(free_cols)
    pos = {f: t for t, f in enumerate(free_cols)}
    images = []
    for x in range(P.ngens):
        vec = [0] * d1
        if x in pos:
            vec[pos[x]] = 1
        else:
            row = pivots[x]
            for f, coeff in row.items():
                if f != x:
                    vec[pos[f]] = (-coeff) % p
        images.append(tuple(vec))
    G = PcGroup(
        p,
        (1,) * d1,
        ((0,) * d1,) * d1,
        {},
        tuple(("image", f) for f in free_cols),
        collect_cap=collect_cap,
    )
    return G, tuple(images)


def _lift_once(
    P: Presentation,
    G: PcGroup,
    images: tuple[Vector, ...],
    target_class: int,
    max_gens: int,
):
    """One layer of the lift: returns (new_group, new_images) or None if stable."""
    p = G.p
    k = G.ngens
    w = G.weights
    defined = set(G.definitions)
    new_tags: list[Definition] = []
    for i in range(k):
        if ("power", i) not in defined:
            new_tags.append(("power", i))
    for j in range(1, k):
        for i in range(j):
            if ("comm", j, i) in defined:
                continue
            if w[j] + w[i] <= target_class:
                new_tags.append(("comm", j, i))
    for x in range(P.ngens):
        if ("image", x) not in defined:
            new_tags.append(("image", x))
    m = len(new_tags)
    if k + m > max_gens:
        raise ResourceLimitError(f"pc generator cap exceeded: {k} + {m} > {max_gens}")
    slot = {tag: k + idx for idx, tag in enumerate(new_tags)}

    def pad(vec: Vector, bump: Definition | None = None) -> Vector:
        out = list(vec) + [0] * m
        if bump is not None and bump in slot:
            out[slot[bump]] = 1
        return tuple(out)

    powers = [pad(G.powers[i], ("power", i)) for i in range(k)]
    powers += [(0,) * (k + m)] * m
    comms = {}
    for j in range(1, k):
        for i in range(j):
            old = G.comms.get((j, i), (0,) * k)
            vec = pad(old, ("comm", j, i))
            if any(vec):
                comms[(j, i)] = vec
    E = PcGroup(
        p,
        tuple(w) + (target_class,) * m,
        tuple(powers),
        comms,
        G.definitions + tuple(new_tags),
        collect_cap=G.collect_cap,
    )
    eimages = tuple(pad(images[x], ("image", x)) for x in range(P.ngens))

    equations: list[dict[int, int]] = []

    def add_equation(lhs: Vector, rhs: Vector, label: str) -> None:
        if lhs[:k] != rhs[:k]:
            raise ValidationError(
                f"inconsistent base presentation detected at {label}: "
                f"{lhs[:k]} != {rhs[:k]}"
            )
        eq = {}
        for s in range(k, k + m):
            d = (lhs[s] - rhs[s]) % p
            if d:
                eq[s - k] = d
        if eq:
            equations.append(eq)

    zero = (0,) * (k + m)
    for label, lhs, rhs in _overlap_tests(E, target_class):
        add_equation(lhs, rhs, label)
    for rel in P.relators:
        val = E.evaluate_word(rel, eimages)
        add_equation(val, zero, f"relator {rel}")

    pivots = rref_rows_mod_p(iter(equations), p)
    survivors = [s for s in range(m) if s not in pivots]
    m2 = len(survivors)
    if m2 == 0:
        return None
    spos = {s: k + idx for idx, s in enumerate(survivors)}

    def rewrite(vec: Vector) -> Vector:
        out = list(vec[:k]) + [0] * m2
        for s in range(m):
            e = vec[k + s]
            if not e:
                continue
            if s in spos:
                out[spos[s]] = (out[spos[s]] + e) % p
            else:
                row = pivots[s]
                for f, coeff in row.items():
                    if f != s:
                        out[spos[f]] = (out[spos[f]] - e * coeff) % p
        return tuple(out)

    powers2 = [rewrite(powers[i]) for i in range(k)]
    powers2 += [(0,) * (k + m2)] * m2
    comms2 = {}
    for key, vec in comms.items():
        new_vec = rewrite(vec)
        if any(new_vec):
            comms2[key] = new_vec
    G2 = PcGroup(
        p,
        tuple(w) + (target_class,) * m2,
        tuple(powers2),
        comms2,
        G.definitions + tuple(new_tags[s] for s in survivors),
        collect_cap=G.collect_cap,
    )
    images2 = tuple(rewrite(v) for v in eimages)
    return G2, images2


def p_quotient(
    P: Presentation,
    p: int,
    maxclass: int,
    *,
    collect_cap: int = DEFAULT_COLLECT_CAP,
    max_gens: int = DEFAULT_MAX_GENS,
) -> tuple[PcGroup, Epimorphism]:
    """Maximal quotient of P that is a finite p-group of p-class <= maxclass."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if maxclass < 1:
        raise ValueError("maxclass must be >= 1")
    G, images = _class_one(P, p, collect_cap)
    if G.ngens == 0:
        return G, Epimorphism(images)
    for target in range(2, maxclass + 1):
        lifted = _lift_once(P, G, images, target, max_gens)
        if lifted is None:
            break
        G, images = lifted
    epi = Epimorphism(images)
    if not epi.check(P, G):
        raise ValidationError("internal error: relators do not vanish in the quotient")
    return G, epi


# -- subgroups ----------------------------------------------------------------


def pc_subgroup_order(
    G: PcGroup,
    seeds,
    *,
    normal_closure: bool = False,
) -> int:
    """Order of the subgroup generated by the seed vectors.

    Builds an induced generating sequence in echelon form (distinct leading
    indices), sifting every new candidate and closing under p-th powers and
    mutual commutators; with normal_closure=True also closes under
    conjugation by the ambient pc generators.
    """
    p = G.p
    basis: dict[int, Vector] = {}
    inv_pow: dict[int, list[Vector]] = {}  # lead -> [u^-1, u^-2, ...]
    work = [tuple(s) for s in seeds]
    amb = [G.generator(i) for i in range(G.ngens)] if normal_closure else []
    while work:
        v = work.pop()
        while any(v):
            lead = next(i for i, e in enumerate(v) if e)
            if lead not in basis:
                basis[lead] = v
                u_inv = G.inv(v)
                powers = [u_inv]
                for _ in range(p - 2):
                    powers.append(G.mul(powers[-1], u_inv))
                inv_pow[lead] = powers
                work.append(G.pow(v, p))
                for u in basis.values():
                    if u is not v:
                        work.append(G.comm(u, v))
                        work.append(G.comm(v, u))
                for g in amb:
                    work.append(G.conj(g, v))
                break
            u = basis[lead]
            x = (v[lead] * pow(u[lead], p - 2, p)) % p if p > 2 else v[lead]
            v = G.mul(inv_pow[lead][x - 1], v)
    return p ** len(basis)


def pc_derived_order(G: PcGroup) -> int:
    """Order of the derived subgroup [G, G].

    The pairwise generator commutators are exactly the stored commutator
    tails, so the seeds can be read off the presentation.
    """
    seeds = [v for v in G.comms.values() if any(v)]
    return pc_subgroup_order(G, seeds, normal_closure=True)


def pc_dump(G: PcGroup) -> str:
    """Debug dump of the pc presentation (1-based generator numbers)."""
    lines = [f"{G.p} {G.ngens}"]
    lines.append("weights " + " ".join(str(x) for x in G.weights))
    for i in range(G.ngens):
        tail = " ".join(str(e) for e in G.powers[i])
        lines.append(f"{i + 1}^{G.p} = {tail}")
    for (j, i), vec in sorted(G.comms.items()):
        tail = " ".join(str(e) for e in vec)
        lines.append(f"[{j + 1},{i + 1}] = {tail}")
    return "\n".join(lines) + "\n"

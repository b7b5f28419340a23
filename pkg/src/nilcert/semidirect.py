"""Arithmetic and subgroup computations in groups Z^n x|_A Z.

The group law is ``(v, t) * (w, s) = (v + A^t w, t + s)`` for a holonomy
matrix A in GL(n, Z).  Subgroups are restricted to the box shape
``L x| mZ`` with L a full-rank A-invariant sublattice: every subgroup in the
Sol3 tower construction has this shape, and shapes outside the family are
rejected with an explicit error.

Includes the Sol3 lattice family (holonomy [[5, 2], [2, 1]]) and the
length-k tower certificate built from normalizer and quotient computations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .certificates import (
    KIND_SOL3,
    ChainLevel,
    SeriesCertificate,
    length_lower_bound,
)
from .errors import (
    DimensionMismatch,
    InvalidParameters,
    NotASubgroup,
    NotNormal,
    NotAbelianQuotient,
    QuotientTooLarge,
    UnsupportedSubgroupShape,
)
from .linalg import (
    AbelianStructure,
    IntMatrix,
    Lattice,
    lattice_index,
    preimage_lattice,
    quotient_structure,
    quotient_with_generators,
)

Vec = tuple[int, ...]


class SemidirectGroup:
    """The ambient group Z^n x|_A Z for a fixed unimodular holonomy A."""

    __slots__ = ("n", "A", "_powers")

    def __init__(self, A: IntMatrix):
        if A.rows != A.cols:
            raise DimensionMismatch("holonomy matrix must be square")
        if abs(A.det()) != 1:
            raise InvalidParameters("holonomy matrix must lie in GL(n, Z)")
        self.n = A.rows
        self.A = A
        self._powers: dict[int, IntMatrix] = {0: IntMatrix.identity(self.n), 1: A}

    def power(self, t: int) -> IntMatrix:
        """A^t with negative exponents via the exact integer inverse."""
        if t not in self._powers:
            self._powers[t] = self.A.power(t)
        return self._powers[t]

    def element(self, v, t: int) -> "SemidirectElement":
        v = tuple(int(x) for x in v)
        if len(v) != self.n:
            raise DimensionMismatch("vector length %d != rank %d" % (len(v), self.n))
        return SemidirectElement(self, v, int(t))

    def identity(self) -> "SemidirectElement":
        return SemidirectElement(self, (0,) * self.n, 0)

    def is_sol3_type(self) -> bool:
        """Trace condition for lattices of Sol3 (trace of the holonomy > 2)."""
        return self.n == 2 and sum(self.A.data[i][i] for i in range(2)) > 2

    def holonomy_order(self):
        """Multiplicative order of A, or None when infinite.

        A finite cyclic subgroup of GL(n, Z) has order dividing the Minkowski
        bound, so only that many powers need checking.  Finite order forces
        every power trace into [-n, n] (a sum of n roots of unity), which
        bails out fast on hyperbolic holonomies before entries blow up.
        """
        from .invariants import minkowski_bound

        cap = minkowski_bound(self.n) if self.n >= 1 else 1
        acc = IntMatrix.identity(self.n)
        for k in range(1, cap + 1):
            acc = acc * self.A
            if acc.is_identity():
                return k
            trace = sum(acc.data[i][i] for i in range(self.n))
            if abs(trace) > self.n:
                return None
        return None

    def __eq__(self, other):
        return isinstance(other, SemidirectGroup) and self.A == other.A

    def __hash__(self):
        return hash(self.A)

    def __repr__(self):
        return "SemidirectGroup(%r)" % (self.A,)


@dataclass(frozen=True)
class SemidirectElement:
    """Group element (v, t) in normal-form coordinates."""

    group: SemidirectGroup
    v: Vec
    t: int

    def is_identity(self) -> bool:
        return self.t == 0 and all(x == 0 for x in self.v)


def _same_parent(g: SemidirectElement, h: SemidirectElement) -> SemidirectGroup:
    if g.group != h.group:
        raise DimensionMismatch("elements of different semidirect groups")
    return g.group


def mul(g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    """(v, t)(w, s) = (v + A^t w, t + s)."""
    G = _same_parent(g, h)
    w = G.power(g.t).apply(h.v)
    return SemidirectElement(G, tuple(a + b for a, b in zip(g.v, w)), g.t + h.t)


def inv(g: SemidirectElement) -> SemidirectElement:
    """(v, t)^-1 = (-A^-t v, -t)."""
    G = g.group
    w = G.power(-g.t).apply(g.v)
    return SemidirectElement(G, tuple(-x for x in w), -g.t)


def conj(g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    """g h g^-1 = ((Id - A^s) v + A^t w, s) by the closed formula."""
    G = _same_parent(g, h)
    s = h.t
    left = (IntMatrix.identity(G.n) - G.power(s)).apply(g.v)
    right = G.power(g.t).apply(h.v)
    result = SemidirectElement(G, tuple(a + b for a, b in zip(left, right)), s)
    assert result == mul(mul(g, h), inv(g))
    return result


def commutator(g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    return mul(conj(g, h), inv(h))


class SemidirectLattice:
    """Subgroup of the box shape L x| mZ with L full rank and A-invariant."""

    __slots__ = ("parent", "L", "m")

    def __init__(self, parent: SemidirectGroup, L: Lattice, m: int):
        if L.ambient_dim != parent.n:
            raise DimensionMismatch("sublattice ambient dimension mismatch")
        if not L.is_full_rank():
            raise UnsupportedSubgroupShape("fiber sublattice must be full rank")
        if m < 1:
            raise InvalidParameters("translation index m must be >= 1")
        image = Lattice.from_rows(
            parent.n, [parent.A.apply(row) for row in L.basis.data]
        )
        if image != L:
            raise UnsupportedSubgroupShape("fiber sublattice is not A-invariant")
        self.parent = parent
        self.L = L
        self.m = m

    def __eq__(self, other):
        return (
            isinstance(other, SemidirectLattice)
            and self.parent == other.parent
            and self.L == other.L
            and self.m == other.m
        )

    def __hash__(self):
        return hash((self.parent, self.L, self.m))

    def __repr__(self):
        return "SemidirectLattice(L=%r, m=%d)" % (self.L, self.m)

    def generators(self) -> list[SemidirectElement]:
        gens = [self.parent.element(row, 0) for row in self.L.basis.data]
        gens.append(self.parent.element((0,) * self.parent.n, self.m))
        return gens

    def contains(self, g: SemidirectElement) -> bool:
        if g.group != self.parent:
            raise DimensionMismatch("element of a different parent group")
        return g.t % self.m == 0 and self.L.contains(g.v)

    def is_subgroup_of(self, other: "SemidirectLattice") -> bool:
        if self.parent != other.parent:
            raise DimensionMismatch("different parent groups")
        return self.m % other.m == 0 and self.L.is_sublattice_of(other.L)

    def to_json(self) -> dict:
        return {
            "type": "semidirect",
            "n": self.parent.n,
            "matrix": self.parent.A.to_json(),
            "sublattice": self.L.to_json(),
            "m": self.m,
        }

    @staticmethod
    def from_json(obj: dict) -> "SemidirectLattice":
        if obj.get("type") != "semidirect":
            raise InvalidParameters("not a semidirect group description")
        n = int(obj["n"])
        group = SemidirectGroup(IntMatrix.from_json(obj["matrix"]))
        if group.n != n:
            raise DimensionMismatch("matrix size does not match declared rank")
        L = Lattice.from_json(n, obj.get("sublattice") or IntMatrix.identity(n).to_json())
        return SemidirectLattice(group, L, int(obj.get("m", 1)))


def contains(S: SemidirectLattice, g: SemidirectElement) -> bool:
    return S.contains(g)


def group_index(G: SemidirectLattice, S: SemidirectLattice):
    """[G : S], or None when infinite (never here: both fibers full rank)."""
    if not S.is_subgroup_of(G):
        raise NotASubgroup("S is not contained in G")
    fiber = lattice_index(G.L, S.L)
    return None if fiber is None else fiber * (S.m // G.m)


def normalizer(G: SemidirectLattice, S: SemidirectLattice) -> SemidirectLattice:
    """N_G(S) = {(v, t) in G : (Id - A) v in S.L} x| Z.

    The "for all s" condition collapses to s = 1 because S.L is A-invariant:
    Id - A^s factors as (Id + A + ... + A^(s-1))(Id - A), and negative s
    follow by multiplying with the unimodular A^s.
    """
    if G.parent != S.parent:
        raise DimensionMismatch("different parent groups")
    if G.m != 1 or S.m != 1:
        raise InvalidParameters("normalizer requires full translation parts (m = 1)")
    if not S.is_subgroup_of(G):
        raise NotASubgroup("S is not contained in G")
    A = G.parent.A
    condition = preimage_lattice(IntMatrix.identity(G.parent.n) - A, S.L)
    LN = condition.intersect(G.L)
    result = SemidirectLattice(G.parent, LN, 1)
    # S must be normal in the result (generator conjugation, both directions).
    for g in result.generators():
        for s in S.generators():
            assert S.contains(conj(g, s)) and S.contains(conj(inv(g), s))
    return result


def _check_normal(G: SemidirectLattice, S: SemidirectLattice) -> None:
    if not S.is_subgroup_of(G):
        raise NotASubgroup("S is not contained in G")
    for g in G.generators():
        for s in S.generators():
            if not (S.contains(conj(g, s)) and S.contains(conj(inv(g), s))):
                raise NotNormal("conjugate of a generator of S leaves S")


def quotient(G: SemidirectLattice, S: SemidirectLattice) -> AbelianStructure:
    """Invariant factors of the abelian quotient G/S.

    Normality is verified by conjugating S's generators by G's generators;
    abelianness by checking commutators of G's generators land in S.  The
    structure then comes from the coordinate kernel: an element (v, t) of G
    maps to (coords of v in G.L, t/m) and S's image is the relation lattice.
    """
    _check_normal(G, S)
    gens = G.generators()
    for a, b in itertools.combinations(gens, 2):
        if not S.contains(commutator(a, b)):
            raise NotAbelianQuotient("commutator of generators of G is not in S")
    return _quotient_structure_unchecked(G, S)


def _quotient_structure_unchecked(G: SemidirectLattice, S: SemidirectLattice) -> AbelianStructure:
    n = G.parent.n
    rows = []
    for row in S.L.basis.data:
        coords = G.L.coords_of(row)
        if coords is None:
            raise NotASubgroup("fiber of S is not inside fiber of G")
        rows.append(list(coords) + [0])
    rows.append([0] * n + [S.m // G.m])
    return quotient_structure(Lattice.standard(n + 1), Lattice.from_rows(n + 1, rows))


def intermediates(
    G: SemidirectLattice, S: SemidirectLattice, max_quotient: int = 10**4
) -> list[SemidirectLattice]:
    """All subgroups strictly between S and G (S normal, G/S finite).

    Subgroups of the finite quotient are enumerated by closing unions of
    cyclic subgroups, then pulled back; a pullback that is not of the box
    shape L x| mZ raises :class:`UnsupportedSubgroupShape`.
    """
    _check_normal(G, S)
    index = group_index(G, S)
    if index is None:
        raise QuotientTooLarge("quotient is infinite")
    if index > max_quotient:
        raise QuotientTooLarge("quotient order %d exceeds guard %d" % (index, max_quotient))

    parent = G.parent
    _, fiber_gens = quotient_with_generators(G.L, S.L)
    reps = set()
    ranges = [range(d) for d, _ in fiber_gens if d > 0]
    vecs = [vec for d, vec in fiber_gens if d > 0]
    for combo in itertools.product(*ranges):
        v = [0] * parent.n
        for c, vec in zip(combo, vecs):
            for i in range(parent.n):
                v[i] += c * vec[i]
        reps.add(S.L.reduce(v))
    t_reps = list(range(0, S.m, G.m))
    elements = [(v, t) for v in sorted(reps) for t in t_reps]
    assert len(elements) == index
    lookup = {e: i for i, e in enumerate(elements)}

    def emul(i, j):
        v, t = elements[i]
        w, s = elements[j]
        moved = parent.power(t).apply(w)
        nv = S.L.reduce(tuple(a + b for a, b in zip(v, moved)))
        return lookup[(nv, (t + s) % S.m)]

    table = [[emul(i, j) for j in range(index)] for i in range(index)]
    e0 = lookup[(S.L.reduce((0,) * parent.n), 0)]

    def closure(seed: frozenset) -> frozenset:
        out = set(seed)
        frontier = list(seed)
        while frontier:
            x = frontier.pop()
            for y in list(out):
                for z in (table[x][y], table[y][x]):
                    if z not in out:
                        out.add(z)
                        frontier.append(z)
        return frozenset(out)

    subgroups = {frozenset([e0])}
    frontier = [frozenset([e0])]
    while frontier:
        P = frontier.pop()
        for x in range(index):
            if x in P:
                continue
            Q = closure(P | {x})
            if Q not in subgroups:
                subgroups.add(Q)
                frontier.append(Q)

    proper = [H for H in subgroups if 1 < len(H) < index]
    results = []
    for H in proper:
        t_parts = [elements[i][1] for i in H]
        m_H = math.gcd(S.m, *t_parts)
        fiber_rows = [elements[i][0] for i in H if elements[i][1] == 0]
        L_H = S.L.sum(Lattice.from_rows(parent.n, fiber_rows))
        try:
            candidate = SemidirectLattice(parent, L_H, m_H)
        except UnsupportedSubgroupShape:
            raise UnsupportedSubgroupShape(
                "intermediate subgroup is not of the shape L x| mZ"
            )
        # The pullback equals the box candidate only if the candidate has
        # exactly |H| cosets of S and every H coset lies inside it; diagonal
        # subgroups of a mixed fiber/translation quotient fail here.
        if group_index(candidate, S) != len(H) or not all(
            candidate.L.contains(elements[i][0]) for i in H
        ):
            raise UnsupportedSubgroupShape(
                "intermediate subgroup is not of the shape L x| mZ"
            )
        results.append(candidate)
    results.sort(key=lambda sl: (sl.m, sl.L.basis.data))
    return results


def center_rank(G: SemidirectLattice) -> tuple[int, AbelianStructure]:
    """Rank and structure of the center of L x| mZ.

    (v, t) is central iff A^t = Id (so t ranges over a subgroup of mZ that
    is nonzero only for finite holonomy order) and A^m v = v.
    """
    parent = G.parent
    n = parent.n
    fixed = preimage_lattice(parent.power(G.m) - IntMatrix.identity(n), Lattice.zero(n))
    fixed_in_L = fixed.intersect(G.L)
    rank = fixed_in_L.rank
    if parent.holonomy_order() is not None:
        rank += 1
    return rank, AbelianStructure(rank, ())


# ---------------------------------------------------------------------------
# The Sol3 family
# ---------------------------------------------------------------------------

SOL3_MATRIX = IntMatrix([[5, 2], [2, 1]])


def sol3_group() -> SemidirectGroup:
    return SemidirectGroup(SOL3_MATRIX)


def sol3_gamma(k: int, group: SemidirectGroup | None = None) -> SemidirectLattice:
    """Gamma_k = 2^k Z^2 x| Z inside the Sol3 lattice."""
    if k < 0:
        raise InvalidParameters("k must be >= 0")
    group = group or sol3_group()
    return SemidirectLattice(group, Lattice.scaled(2, 2**k), 1)


def sol3_intermediate_forms(k: int, group: SemidirectGroup | None = None) -> list[SemidirectLattice]:
    """The three displayed index-2 overlattices of Gamma_k inside Gamma_{k-1}."""
    if k < 1:
        raise InvalidParameters("k must be >= 1")
    group = group or sol3_group()
    h = 2 ** (k - 1)
    forms = [
        Lattice.from_rows(2, [[2 * h, 0], [0, h]]),
        Lattice.from_rows(2, [[h, 0], [0, 2 * h]]),
        Lattice.from_rows(2, [[h, h], [0, 2 * h]]),
    ]
    return [SemidirectLattice(group, L, 1) for L in forms]


def sol3_tower(k: int) -> SeriesCertificate:
    """Certificate for the length-k Sol3 tower Gamma >= Gamma_1 >= ... >= Gamma_k.

    Verifies N_Gamma(Gamma_j) = Gamma_{j-1} and Gamma_{j-1}/Gamma_j of type
    [2, 2] at every level.  Since each level's normalizer has index 4 over it,
    any subnormal series from Gamma_k to Gamma has quotients of order at most
    4, hence length at least k.
    """
    if k < 0:
        raise InvalidParameters("k must be >= 0")
    group = sol3_group()
    gamma = sol3_gamma(0, group)
    levels = []
    total = 1
    prev = gamma
    for j in range(1, k + 1):
        sub = sol3_gamma(j, group)
        norm = normalizer(gamma, sub)
        if norm != prev:
            raise NotNormal("normalizer chain broke at level %d" % j)
        q = quotient(prev, sub)
        idx = q.order()
        total *= idx
        levels.append(
            ChainLevel(
                subgroup=sub.to_json(),
                quotient=q,
                index=idx,
                normality_verified=True,
                central=None,
            )
        )
        prev = sub
    max_q = max((level.index for level in levels), default=1)
    cert = SeriesCertificate(
        kind=KIND_SOL3,
        group_ref=dict(gamma.to_json(), k=k),
        chain=tuple(levels),
        total_index=total,
        min_length=length_lower_bound(total, max_q) if k else 0,
        max_quotient_order=max_q,
    )
    assert cert.structural_ok()
    return cert


def scaling_map_check(c: int, target: SemidirectLattice) -> bool:
    """Does (v, t) |-> (c v, t) define an isomorphism Gamma -> target?

    Checks the homomorphism property on generator pairs, injectivity, and
    surjectivity (image lattice equals the target lattice, HNF equality).
    """
    parent = target.parent
    full = SemidirectLattice(parent, Lattice.standard(parent.n), 1)

    def f(g: SemidirectElement) -> SemidirectElement:
        return parent.element(tuple(c * x for x in g.v), g.t)

    gens = full.generators()
    for g, h in itertools.product(gens, repeat=2):
        if f(mul(g, h)) != mul(f(g), f(h)):
            return False
    if c == 0:
        return False
    image = Lattice.from_rows(parent.n, [[c * x for x in row] for row in Lattice.standard(parent.n).basis.data])
    return image == target.L and target.m == 1


def scaling_iso_check(k: int) -> bool:
    """Verify f_k(v, t) = (2^k v, t) is an isomorphism Gamma -> Gamma_k."""
    if k < 0:
        raise InvalidParameters("k must be >= 0")
    return scaling_map_check(2**k, sol3_gamma(k))

"""Two-step nilpotent lattices presented by commutator forms.

A lattice is given by ranks (f, b) and alternating b x b forms C_1..C_f:
basis commutators satisfy [x_i, x_j] = prod_l z_l^(C_l[i,j]) with the z_l
central.  Normal-form coordinates use the collection tables T_l (the strict
upper parts of C_l), which turn multiplication into the closed polynomial

    (u, w)(u', w') = (u + u', w + w' + beta(u, u')),  beta(u, u')_l = u^T T_l u'.

Subgroups are restricted to box shapes U x W (closed exactly when
beta(U, U) is contained in W); every series layer produced here has that
shape after the basis choice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .certificates import (
    KIND_TWO_STEP,
    KIND_WITNESS,
    ChainLevel,
    SeriesCertificate,
)
from .errors import (
    ClosureViolation,
    DimensionMismatch,
    InfiniteOrder,
    InvalidParameters,
    NotAbelianQuotient,
    NotAnAutomorphism,
    NotASubgroup,
    NotFiniteIndex,
    NotNormal,
    QuotientTooLarge,
)
from .linalg import (
    AbelianStructure,
    IntMatrix,
    Lattice,
    hstack,
    lattice_index,
    left_kernel,
    quotient_structure,
    saturate,
)

Vec = tuple[int, ...]


def _strict_upper(C: IntMatrix) -> IntMatrix:
    return IntMatrix(
        [[C.data[i][j] if j > i else 0 for j in range(C.cols)] for i in range(C.rows)],
        cols=C.cols,
    )


class TwoStepLattice:
    """A finitely generated torsion-free 2-step nilpotent group."""

    __slots__ = ("f", "b", "forms", "tables")

    def __init__(self, f: int, b: int, forms):
        forms = tuple(forms)
        if len(forms) != f:
            raise DimensionMismatch("expected %d forms, got %d" % (f, len(forms)))
        for C in forms:
            if C.rows != b or C.cols != b:
                raise DimensionMismatch("forms must be %d x %d" % (b, b))
            if C.transpose() != -C:
                raise InvalidParameters("commutator forms must be alternating")
        self.f = f
        self.b = b
        self.forms = forms
        self.tables = tuple(_strict_upper(C) for C in forms)

    @staticmethod
    def heisenberg(k: int) -> "TwoStepLattice":
        """The lattice <x, y, z | [x, y] = z^k, z central> for k >= 1."""
        if k < 1:
            raise InvalidParameters("heisenberg parameter k must be >= 1")
        return TwoStepLattice(1, 2, [IntMatrix([[0, k], [-k, 0]])])

    @staticmethod
    def free_abelian(f: int, b: int = 0) -> "TwoStepLattice":
        return TwoStepLattice(f, b, [IntMatrix.zeros(b, b) for _ in range(f)])

    def element(self, u, w) -> "NilElement":
        u = tuple(int(x) for x in u)
        w = tuple(int(x) for x in w)
        if len(u) != self.b or len(w) != self.f:
            raise DimensionMismatch("coordinate lengths must be (b, f) = (%d, %d)" % (self.b, self.f))
        return NilElement(self, u, w)

    def identity(self) -> "NilElement":
        return NilElement(self, (0,) * self.b, (0,) * self.f)

    def beta(self, u: Vec, up: Vec) -> Vec:
        """Collection bilinear form, one value per central coordinate."""
        out = []
        for T in self.tables:
            acc = 0
            for i, ui in enumerate(u):
                if ui:
                    row = T.data[i]
                    acc += ui * sum(r * x for r, x in zip(row, up))
            out.append(acc)
        return tuple(out)

    def cvalue(self, u: Vec, up: Vec) -> Vec:
        """Commutator pairing C(u, u') = beta(u, u') - beta(u', u)."""
        a = self.beta(u, up)
        bb = self.beta(up, u)
        return tuple(x - y for x, y in zip(a, bb))

    def __eq__(self, other):
        return (
            isinstance(other, TwoStepLattice)
            and self.f == other.f
            and self.b == other.b
            and self.forms == other.forms
        )

    def __hash__(self):
        return hash((self.f, self.b, self.forms))

    def __repr__(self):
        return "TwoStepLattice(f=%d, b=%d)" % (self.f, self.b)

    def to_json(self) -> dict:
        return {
            "type": "twostep",
            "f": self.f,
            "b": self.b,
            "forms": [C.to_json() for C in self.forms],
        }

    @staticmethod
    def from_json(obj: dict) -> "TwoStepLattice":
        if obj.get("type") != "twostep":
            raise InvalidParameters("not a twostep group description")
        return TwoStepLattice(
            int(obj["f"]),
            int(obj["b"]),
            [IntMatrix.from_json(C) for C in obj["forms"]],
        )


@dataclass(frozen=True)
class NilElement:
    """Normal-form coordinates (u, w) in Z^b x Z^f."""

    group: TwoStepLattice
    u: Vec
    w: Vec

    def is_identity(self) -> bool:
        return all(x == 0 for x in self.u) and all(x == 0 for x in self.w)


def _same_parent(g: NilElement, h: NilElement) -> TwoStepLattice:
    if g.group != h.group:
        raise DimensionMismatch("elements of different two-step lattices")
    return g.group


def nil_mul(g: NilElement, h: NilElement) -> NilElement:
    G = _same_parent(g, h)
    corr = G.beta(g.u, h.u)
    return NilElement(
        G,
        tuple(a + b for a, b in zip(g.u, h.u)),
        tuple(a + b + c for a, b, c in zip(g.w, h.w, corr)),
    )


def nil_inv(g: NilElement) -> NilElement:
    G = g.group
    corr = G.beta(g.u, g.u)
    return NilElement(G, tuple(-x for x in g.u), tuple(c - x for x, c in zip(g.w, corr)))


def nil_power(g: NilElement, x: int) -> NilElement:
    """(u, w)^x = (x u, x w + x(x-1)/2 beta(u, u)); valid for all integer x."""
    G = g.group
    half = x * (x - 1) // 2
    corr = G.beta(g.u, g.u)
    return NilElement(
        G, tuple(x * a for a in g.u), tuple(x * a + half * c for a, c in zip(g.w, corr))
    )


def nil_commutator(g: NilElement, h: NilElement) -> NilElement:
    """[g, h] = (0, C(u_g, u_h)): every commutator is central."""
    G = _same_parent(g, h)
    closed = NilElement(G, (0,) * G.b, G.cvalue(g.u, h.u))
    assert closed == nil_mul(nil_mul(nil_mul(g, h), nil_inv(g)), nil_inv(h))
    return closed


# ---------------------------------------------------------------------------
# Invariants of the presentation
# ---------------------------------------------------------------------------


def center(G: TwoStepLattice) -> tuple[int, Lattice]:
    """Center rank and the saturated kernel of the forms inside Z^b.

    The center is {(u, w) : C_l u = 0 for all l}; the w part is all of Z^f.
    """
    if G.f == 0 or G.b == 0:
        return G.f + G.b, Lattice.standard(G.b)
    kernel = left_kernel(hstack(list(G.forms)))
    klattice = Lattice.from_rows(G.b, kernel.data)
    return G.f + klattice.rank, klattice


def isolator(G: TwoStepLattice) -> tuple[Lattice, int]:
    """The isolator of the commutator subgroup inside Z^f, and the rank l
    of its complement in the center.

    The commutator lattice is spanned by the vectors (C_l[i, j])_l; its
    saturation is exactly the set of central elements with a power in
    [Gamma, Gamma], and the center splits as the isolator plus Z^l.
    """
    rows = [
        tuple(C.data[i][j] for C in G.forms)
        for i in range(G.b)
        for j in range(i + 1, G.b)
    ]
    sqrt = saturate(Lattice.from_rows(G.f, rows))
    rank, _ = center(G)
    return sqrt, rank - sqrt.rank


def commutator_image_matrix(G: TwoStepLattice) -> IntMatrix:
    """Rows are the images of the basis of Z^b in Hom(Z^b, Z^f) = Z^(b f)."""
    rows = []
    for i in range(G.b):
        row = []
        for C in G.forms:
            row.extend(C.data[i])
        rows.append(row)
    return IntMatrix(rows, cols=G.b * G.f)


def hbar1(G: TwoStepLattice) -> AbelianStructure:
    """Outer classes trivial on both ends of the central extension.

    Computed as Hom(Z^b, Z^f) = Z^(b f) modulo the image of the commutator
    map u |-> C(u, -).
    """
    image = commutator_image_matrix(G)
    return quotient_structure(
        Lattice.standard(G.b * G.f), Lattice.from_rows(G.b * G.f, image.data)
    )


# ---------------------------------------------------------------------------
# Box subgroups and their quotients
# ---------------------------------------------------------------------------


class NilSublattice:
    """Box subgroup U x W; closed under the law iff beta(U, U) lies in W."""

    __slots__ = ("parent", "U", "W")

    def __init__(self, parent: TwoStepLattice, U: Lattice, W: Lattice):
        if U.ambient_dim != parent.b or W.ambient_dim != parent.f:
            raise DimensionMismatch("box data must live in Z^b x Z^f")
        for ru in U.basis.data:
            for rv in U.basis.data:
                if not W.contains(parent.beta(ru, rv)):
                    raise ClosureViolation("beta(U, U) is not contained in W")
        self.parent = parent
        self.U = U
        self.W = W

    @staticmethod
    def full(parent: TwoStepLattice) -> "NilSublattice":
        return NilSublattice(parent, Lattice.standard(parent.b), Lattice.standard(parent.f))

    def contains(self, g: NilElement) -> bool:
        if g.group != self.parent:
            raise DimensionMismatch("element of a different parent group")
        return self.U.contains(g.u) and self.W.contains(g.w)

    def is_subgroup_of(self, other: "NilSublattice") -> bool:
        return self.U.is_sublattice_of(other.U) and self.W.is_sublattice_of(other.W)

    def index_in_full(self):
        iu = lattice_index(Lattice.standard(self.parent.b), self.U)
        iw = lattice_index(Lattice.standard(self.parent.f), self.W)
        return None if iu is None or iw is None else iu * iw

    def __eq__(self, other):
        return (
            isinstance(other, NilSublattice)
            and self.parent == other.parent
            and self.U == other.U
            and self.W == other.W
        )

    def __hash__(self):
        return hash((self.parent, self.U, self.W))

    def __repr__(self):
        return "NilSublattice(U=%r, W=%r)" % (self.U, self.W)

    def to_json(self) -> dict:
        return {"type": "nilsub", "U": self.U.to_json(), "W": self.W.to_json()}

    @staticmethod
    def from_json(parent: TwoStepLattice, obj: dict) -> "NilSublattice":
        return NilSublattice(
            parent,
            Lattice.from_json(parent.b, obj["U"]),
            Lattice.from_json(parent.f, obj["W"]),
        )


def box_normal_in(Q: NilSublattice, P: NilSublattice) -> bool:
    """Q normal in P iff all pairings C(U_P, U_Q) land in W_Q."""
    G = P.parent
    return all(
        Q.W.contains(G.cvalue(rp, rq))
        for rp in P.U.basis.data
        for rq in Q.U.basis.data
    )


def box_quotient(P: NilSublattice, Q: NilSublattice) -> AbelianStructure:
    """Structure of the abelian quotient P/Q of two box subgroups.

    The abelianization of P is Z^(rank U_P + rank W_P) modulo the commutator
    values; Q's generators are rewritten in those coordinates by actually
    multiplying out the u part, which accounts for the collection
    corrections.
    """
    G = P.parent
    if G != Q.parent:
        raise DimensionMismatch("different parent groups")
    if not Q.is_subgroup_of(P):
        raise NotASubgroup("Q is not contained in P")
    if not box_normal_in(Q, P):
        raise NotNormal("Q is not normal in P")
    for ri, rj in itertools.combinations(P.U.basis.data, 2):
        if not Q.W.contains(G.cvalue(ri, rj)):
            raise NotAbelianQuotient("commutators of P do not land in Q")

    r = P.U.rank
    s = P.W.rank
    relations = []

    def w_coords(wvec) -> list[int]:
        y = P.W.coords_of(wvec)
        if y is None:
            raise NotASubgroup("w-part escapes the box")
        return list(y)

    for ri, rj in itertools.combinations(P.U.basis.data, 2):
        relations.append([0] * r + w_coords(G.cvalue(ri, rj)))
    ugens = [G.element(row, (0,) * G.f) for row in P.U.basis.data]
    for qu in Q.U.basis.data:
        x = P.U.coords_of(qu)
        if x is None:
            raise NotASubgroup("Q fiber escapes P fiber")
        acc = G.identity()
        for gen, e in zip(ugens, x):
            acc = nil_mul(acc, nil_power(gen, e))
        delta = tuple(-c for c in acc.w)
        relations.append(list(x) + w_coords(delta))
    for qw in Q.W.basis.data:
        relations.append([0] * r + w_coords(qw))

    return quotient_structure(
        Lattice.standard(r + s), Lattice.from_rows(r + s, relations)
    )


def central_layer(upper: NilSublattice, lower: NilSublattice) -> bool:
    """Is upper generated over lower by central elements of the ambient group?"""
    G = upper.parent
    _, kernel = center(G)
    grown = lower.U.sum(kernel)
    return upper.U.is_sublattice_of(grown)


def subnormal_series(
    L: TwoStepLattice, sub: NilSublattice, max_index: int | None = None
) -> SeriesCertificate:
    """Two-layer subnormal chain Gamma <| Lambda_1 <| Lambda for finite index.

    Lambda_1 is the preimage in Lambda of Gamma's image modulo the center,
    which is again a box subgroup.  The first quotient is a quotient of the
    center (rank <= rank of the center) and the second is a quotient of Z^b
    modulo the kernel directions (rank <= b).
    """
    if sub.parent != L:
        raise DimensionMismatch("sublattice belongs to another group")
    index = sub.index_in_full()
    if index is None:
        raise NotFiniteIndex("box subgroup does not have finite index")
    if max_index is not None and index > max_index:
        raise QuotientTooLarge("index %d exceeds guard %d" % (index, max_index))

    crank, kernel = center(L)
    b1 = crank
    b2 = L.b - kernel.rank
    lam1 = NilSublattice(L, sub.U.sum(kernel), Lattice.standard(L.f))
    full = NilSublattice.full(L)

    a1 = box_quotient(lam1, sub)
    a2 = box_quotient(full, lam1)
    if a1.rank() > b1 or a2.rank() > b2:
        raise NotAbelianQuotient("layer rank exceeds the upper central series bound")

    chain = []
    if not a1.is_trivial:
        chain.append(
            ChainLevel(
                subgroup=sub.to_json(),
                quotient=a1,
                index=a1.order(),
                normality_verified=True,
                central=central_layer(lam1, sub),
            )
        )
    if not a2.is_trivial:
        chain.append(
            ChainLevel(
                subgroup=lam1.to_json(),
                quotient=a2,
                index=a2.order(),
                normality_verified=True,
                central=central_layer(full, lam1),
            )
        )
    max_q = max((l.index for l in chain), default=1)
    cert = SeriesCertificate(
        kind=KIND_TWO_STEP,
        group_ref=dict(L.to_json(), gamma=sub.to_json()),
        chain=tuple(chain),
        total_index=index,
        min_length=1 if index > 1 else 0,
        max_quotient_order=max_q,
    )
    assert cert.structural_ok()
    return cert


# ---------------------------------------------------------------------------
# Rational overlattices and the Heisenberg witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalScale:
    """Axis-wise denominators describing an overlattice in the rational hull.

    The overlattice is generated by x_i^(1/du[i]) and z_l^(1/dw[l]); its
    commutator forms are C_l[i, j] * dw[l] / (du[i] du[j]), which must stay
    integral.
    """

    du: Vec
    dw: Vec

    def __post_init__(self):
        if any(d < 1 for d in self.du) or any(d < 1 for d in self.dw):
            raise InvalidParameters("denominators must be positive")

    def apply(self, G: TwoStepLattice) -> TwoStepLattice:
        if len(self.du) != G.b or len(self.dw) != G.f:
            raise DimensionMismatch("denominator counts must match (b, f)")
        forms = []
        for l, C in enumerate(G.forms):
            rows = []
            for i in range(G.b):
                row = []
                for j in range(G.b):
                    num = C.data[i][j] * self.dw[l]
                    den = self.du[i] * self.du[j]
                    if num % den != 0:
                        raise InvalidParameters(
                            "overlattice form entry %d/%d is not integral" % (num, den)
                        )
                    row.append(num // den)
                rows.append(row)
            forms.append(IntMatrix(rows, cols=G.b))
        return TwoStepLattice(G.f, G.b, forms)

    def embedded_sublattice(self, ambient: TwoStepLattice) -> NilSublattice:
        """The original lattice written in the overlattice's coordinates."""
        U = Lattice.from_rows(
            ambient.b,
            [[self.du[i] if i == j else 0 for j in range(ambient.b)] for i in range(ambient.b)],
        )
        W = Lattice.from_rows(
            ambient.f,
            [[self.dw[l] if l == m else 0 for m in range(ambient.f)] for l in range(ambient.f)],
        )
        return NilSublattice(ambient, U, W)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def heisenberg_witness(k: int, p: int, a: int) -> SeriesCertificate:
    """Overlattice chain Gamma < Lambda < Lambda' realizing the (1, 2) profile.

    Lambda divides the central direction by p^a, Lambda' divides both base
    directions by p; the second-layer forms have entries k p^(a-2), so a >= 2
    is forced by integrality.  Quotients: Lambda/Gamma = Z/p^a (central) and
    Lambda'/Lambda = (Z/p)^2.
    """
    if k < 1:
        raise InvalidParameters("k must be >= 1")
    if not _is_prime(p):
        raise InvalidParameters("p must be prime")
    if a < 2:
        raise InvalidParameters("a must be >= 2 (second-layer forms k*p^(a-2))")

    base = TwoStepLattice.heisenberg(k)
    scale_full = RationalScale((p, p), (p**a,))
    ambient = scale_full.apply(base)

    gamma = scale_full.embedded_sublattice(ambient)
    lam = NilSublattice(ambient, gamma.U, Lattice.standard(1))
    lam_prime = NilSublattice.full(ambient)

    a1 = box_quotient(lam, gamma)
    a2 = box_quotient(lam_prime, lam)
    expected1 = AbelianStructure(0, (p**a,))
    expected2 = AbelianStructure(0, (p, p))
    if a1 != expected1 or a2 != expected2:
        raise InvalidParameters("witness quotients did not verify")

    chain = (
        ChainLevel(
            subgroup=gamma.to_json(),
            quotient=a1,
            index=p**a,
            normality_verified=True,
            central=central_layer(lam, gamma),
        ),
        ChainLevel(
            subgroup=lam.to_json(),
            quotient=a2,
            index=p**2,
            normality_verified=True,
            central=central_layer(lam_prime, lam),
        ),
    )
    cert = SeriesCertificate(
        kind=KIND_WITNESS,
        group_ref=dict(
            ambient.to_json(),
            witness={"k": k, "p": p, "a": a, "profile": [1, 2]},
        ),
        chain=chain,
        total_index=p ** (a + 2),
        min_length=1,
        max_quotient_order=max(p**a, p**2),
    )
    assert cert.structural_ok()
    return cert


# ---------------------------------------------------------------------------
# Nilpotency criterion for finite extensions
# ---------------------------------------------------------------------------


def nilpotency_check(G: TwoStepLattice, P: IntMatrix, Q: IntMatrix, order: int) -> bool:
    """Would the extension of G by the automorphism (P, Q) be nilpotent?

    True iff the induced action on G modulo the isolator of the commutator
    subgroup is the identity: P = Id on Z^b and Q = Id on Z^f modulo the
    isolator lattice.
    """
    if P.rows != G.b or P.cols != G.b or Q.rows != G.f or Q.cols != G.f:
        raise DimensionMismatch("automorphism blocks must be b x b and f x f")
    if abs(P.det()) != 1 or abs(Q.det()) != 1:
        raise NotAnAutomorphism("blocks must be unimodular")
    for l in range(G.f):
        lhs = P.transpose() * G.forms[l] * P
        rhs = IntMatrix.zeros(G.b, G.b)
        for m2 in range(G.f):
            rhs = rhs + G.forms[m2].scale(Q.data[l][m2])
        if lhs != rhs:
            raise NotAnAutomorphism("pair does not preserve the commutator forms")
    if order < 1:
        raise InvalidParameters("order must be a positive integer")
    if not (P.power(order).is_identity() and Q.power(order).is_identity()):
        raise InfiniteOrder("claimed finite order %d does not hold" % order)

    sqrt, _ = isolator(G)
    if not P.is_identity():
        return False
    diff = Q - IntMatrix.identity(G.f)
    return all(
        sqrt.contains(tuple(diff.data[i][j] for i in range(G.f)))
        for j in range(G.f)
    )

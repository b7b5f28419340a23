"""Exact integer matrix algebra: normal forms, kernels, lattice operations.

Everything here is arbitrary-precision (plain Python ints), pure and
immutable.  Matrices act on column vectors; lattices are stored as row bases
in canonical row Hermite normal form, which makes lattice equality a plain
``==`` on the basis.  The two normal forms carry their unimodular transforms
so every downstream claim can be re-verified by multiplying back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, NotASublattice

Row = tuple[int, ...]


def _as_int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise TypeError("matrix entries must be plain ints, got %r" % (x,))
    return x


class IntMatrix:
    """Dense matrix of arbitrary-precision integers (row-major)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable[int]], cols: Optional[int] = None):
        rows = tuple(tuple(_as_int(x) for x in row) for row in data)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise DimensionMismatch("ragged rows")
        else:
            ncols = 0 if cols is None else cols
        if cols is not None and rows and cols != ncols:
            raise DimensionMismatch("cols=%d but rows have length %d" % (cols, ncols))
        self.rows = len(rows)
        self.cols = ncols
        self.data = rows

    # -- constructors -----------------------------------------------------

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix([[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def from_json(obj) -> "IntMatrix":
        return IntMatrix([[int(x) for x in row] for row in obj])

    # -- basic queries -----------------------------------------------------

    @property
    def entries(self) -> tuple[int, ...]:
        """Row-major flattened entries."""
        return tuple(x for row in self.data for x in row)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return "IntMatrix(%r)" % (list(map(list, self.data)),)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == (1 if i == j else 0)
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return IntMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
            cols=self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return IntMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
            cols=self.cols,
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.data], cols=self.cols)

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(
                "cannot multiply %dx%d by %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )
        bt = list(zip(*other.data)) if other.data else [()] * other.cols
        out = []
        for ra in self.data:
            out.append([sum(a * b for a, b in zip(ra, col)) for col in bt])
        return IntMatrix(out, cols=other.cols)

    def transpose(self) -> "IntMatrix":
        if not self.data:
            return IntMatrix([[] for _ in range(self.cols)], cols=0)
        return IntMatrix(list(zip(*self.data)), cols=self.rows)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * x for x in row] for row in self.data], cols=self.cols)

    def apply(self, v: Sequence[int]) -> Row:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise DimensionMismatch("vector length %d != cols %d" % (len(v), self.cols))
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.data)

    def power(self, t: int) -> "IntMatrix":
        """Integer power; negative exponents require a unimodular matrix."""
        if self.rows != self.cols:
            raise DimensionMismatch("power of a non-square matrix")
        base = self if t >= 0 else unimodular_inverse(self)
        t = abs(t)
        result = IntMatrix.identity(self.rows)
        while t:
            if t & 1:
                result = result * base
            base = base * base
            t >>= 1
        return result

    def det(self) -> int:
        """Exact determinant via fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(row) for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            pivot = m[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = pivot
        return sign * m[n - 1][n - 1]

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.data]


def hstack(mats: Sequence[IntMatrix]) -> IntMatrix:
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise DimensionMismatch("hstack row mismatch")
    return IntMatrix(
        [sum((list(m.data[i]) for m in mats), []) for i in range(rows)],
        cols=sum(m.cols for m in mats),
    )


def vstack(mats: Sequence[IntMatrix]) -> IntMatrix:
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise DimensionMismatch("vstack column mismatch")
    data: list[Sequence[int]] = []
    for m in mats:
        data.extend(m.data)
    return IntMatrix(data, cols=cols)


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermiteForm:
    """Canonical row HNF ``H`` with unimodular ``U`` satisfying ``U*A = H``."""

    H: IntMatrix
    U: IntMatrix


def hnf(A: IntMatrix) -> HermiteForm:
    """Canonical row Hermite normal form.

    Pivots are positive, entries above each pivot are reduced into
    ``[0, pivot)`` and zero rows sink to the bottom, so the output is the
    unique representative of the row span.  ``U`` records every row
    operation; it is unimodular by construction (swaps, negations and
    integer row additions only).
    """
    m, n = A.rows, A.cols
    w = [list(row) for row in A.data]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    r = 0
    for j in range(n):
        if r >= m:
            break
        # Shrink column j below row r until a single nonzero entry remains.
        while True:
            nz = [i for i in range(r, m) if w[i][j] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(w[i][j]))
            if i0 != r:
                w[r], w[i0] = w[i0], w[r]
                u[r], u[i0] = u[i0], u[r]
            p = w[r][j]
            done = True
            for i in range(r + 1, m):
                if w[i][j] == 0:
                    continue
                q = w[i][j] // p
                if q:
                    wi, wr = w[i], w[r]
                    for col in range(j, n):
                        wi[col] -= q * wr[col]
                    ui, ur = u[i], u[r]
                    for col in range(m):
                        ui[col] -= q * ur[col]
                if w[i][j] != 0:
                    done = False
            if done:
                break
        if w[r][j] == 0:
            continue
        if w[r][j] < 0:
            w[r] = [-x for x in w[r]]
            u[r] = [-x for x in u[r]]
        p = w[r][j]
        for i in range(r):
            q = w[i][j] // p
            if q:
                wi, wr = w[i], w[r]
                for col in range(j, n):
                    wi[col] -= q * wr[col]
                ui, ur = u[i], u[r]
                for col in range(m):
                    ui[col] -= q * ur[col]
        r += 1
    return HermiteForm(IntMatrix(w, cols=n), IntMatrix(u, cols=m))


def unimodular_inverse(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix (HNF of it is the identity)."""
    form = hnf(M)
    if not form.H.is_identity():
        raise DimensionMismatch("matrix is not unimodular")
    return form.U


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """Diagonal ``S`` with unimodular ``U``, ``V`` satisfying ``U*A*V = S``.

    ``factors`` lists the positive diagonal entries d1 | d2 | ... with zeros
    dropped (they remain visible as zero rows/columns of ``S``).
    """

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    factors: tuple[int, ...]


def snf(A: IntMatrix) -> SmithForm:
    """Smith normal form with minimal-absolute-value pivoting.

    Pivoting on the smallest nonzero entry bounds coefficient growth; the
    divisibility sweep after each pivot guarantees d_i | d_{i+1}.
    """
    m, n = A.rows, A.cols
    s = [list(row) for row in A.data]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_sub(i, q, k):
        si, sk = s[i], s[k]
        for col in range(n):
            si[col] -= q * sk[col]
        ui, uk = u[i], u[k]
        for col in range(m):
            ui[col] -= q * uk[col]

    def col_sub(j, q, k):
        for row in s:
            row[j] -= q * row[k]
        for row in v:
            row[j] -= q * row[k]

    t = 0
    while t < min(m, n):
        # Locate the minimal-absolute-value nonzero entry of the tail block.
        best = None
        for i in range(t, m):
            si = s[i]
            for j in range(t, n):
                x = si[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            s[t], s[pi] = s[pi], s[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in s:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]
        p = s[t][t]
        dirty = False
        for i in range(t + 1, m):
            if s[i][t] != 0:
                q = s[i][t] // p
                if q:
                    row_sub(i, q, t)
                if s[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if s[t][j] != 0:
                q = s[t][j] // p
                if q:
                    col_sub(j, q, t)
                if s[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # Row and column are clear; force the divisibility chain.
        p = s[t][t]
        fix = None
        for i in range(t + 1, m):
            si = s[i]
            for j in range(t + 1, n):
                if si[j] % p != 0:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            row_sub(t, -1, fix)
            continue
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    factors = tuple(s[i][i] for i in range(min(m, n)) if s[i][i] != 0)
    return SmithForm(IntMatrix(s, cols=n), IntMatrix(u, cols=m), IntMatrix(v, cols=n), factors)


# ---------------------------------------------------------------------------
# Kernels and integer solving
# ---------------------------------------------------------------------------


def left_kernel(A: IntMatrix) -> IntMatrix:
    """Basis (rows) of ``{v : v*A = 0}``; always a saturated lattice."""
    form = hnf(A)
    zero_rows = [i for i in range(A.rows) if all(x == 0 for x in form.H.data[i])]
    return IntMatrix([form.U.data[i] for i in zero_rows], cols=A.rows)


def solve_row_combination(R: IntMatrix, target: Sequence[int]) -> Optional[Row]:
    """Integer coefficients ``c`` with ``c*R = target``, or None.

    Works for an arbitrary generating set: the target is reduced against
    ``hnf(R)`` and the transform maps the reduction back to the given rows.
    """
    if len(target) != R.cols:
        raise DimensionMismatch("target length %d != cols %d" % (len(target), R.cols))
    form = hnf(R)
    h = form.H.data
    v = list(target)
    coeff = [0] * R.rows
    for i in range(R.rows):
        row = h[i]
        j = next((k for k, x in enumerate(row) if x != 0), None)
        if j is None:
            break
        if v[j] % row[j] != 0:
            return None
        q = v[j] // row[j]
        if q:
            for k in range(j, R.cols):
                v[k] -= q * row[k]
            urow = form.U.data[i]
            for k in range(R.rows):
                coeff[k] += q * urow[k]
    if any(x != 0 for x in v):
        return None
    return tuple(coeff)


# ---------------------------------------------------------------------------
# Finitely generated abelian structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianStructure:
    """Invariant-factor decomposition: free rank plus torsion d1 | d2 | ..."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion factors must form a divisibility chain")
        if any(d <= 1 for d in self.torsion):
            raise ValueError("torsion factors must exceed 1")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def rank(self) -> int:
        """Minimal number of generators."""
        return self.free_rank + len(self.torsion)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": [str(d) for d in self.torsion]}

    @staticmethod
    def from_json(obj) -> "AbelianStructure":
        return AbelianStructure(int(obj["free_rank"]), tuple(int(d) for d in obj["torsion"]))


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


class Lattice:
    """Sublattice of Z^n stored as a canonical row-HNF basis (no zero rows).

    Canonicality makes equality of lattices a byte-wise comparison of the
    basis matrices.  Saturation is always explicit, never implied.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: IntMatrix):
        if basis.cols != ambient_dim:
            raise DimensionMismatch("basis width != ambient dimension")
        self.ambient_dim = ambient_dim
        self.basis = basis

    @staticmethod
    def from_rows(ambient_dim: int, rows: Iterable[Sequence[int]]) -> "Lattice":
        mat = IntMatrix(rows, cols=ambient_dim)
        h = hnf(mat).H
        kept = [row for row in h.data if any(x != 0 for x in row)]
        return Lattice(ambient_dim, IntMatrix(kept, cols=ambient_dim))

    @staticmethod
    def standard(n: int) -> "Lattice":
        return Lattice(n, IntMatrix.identity(n))

    @staticmethod
    def scaled(n: int, c: int) -> "Lattice":
        if c == 0:
            return Lattice.zero(n)
        return Lattice.from_rows(n, [[c if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(n: int) -> "Lattice":
        return Lattice(n, IntMatrix([], cols=n))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lattice)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return "Lattice(%d, %r)" % (self.ambient_dim, list(map(list, self.basis.data)))

    def _pivots(self) -> list[int]:
        return [
            next(k for k, x in enumerate(row) if x != 0)
            for row in self.basis.data
        ]

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords_of(v) is not None

    def coords_of(self, v: Sequence[int]) -> Optional[Row]:
        """Integer coordinates of ``v`` in the HNF basis, or None."""
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length mismatch")
        w = list(v)
        coords = []
        for row, j in zip(self.basis.data, self._pivots()):
            if w[j] % row[j] != 0:
                return None
            q = w[j] // row[j]
            coords.append(q)
            if q:
                for k in range(j, self.ambient_dim):
                    w[k] -= q * row[k]
        if any(x != 0 for x in w):
            return None
        return tuple(coords)

    def reduce(self, v: Sequence[int]) -> Row:
        """Canonical coset representative of ``v`` modulo this lattice."""
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length mismatch")
        w = list(v)
        for row, j in zip(self.basis.data, self._pivots()):
            q = w[j] // row[j]
            if q:
                for k in range(j, self.ambient_dim):
                    w[k] -= q * row[k]
        return tuple(w)

    def is_sublattice_of(self, other: "Lattice") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return all(other.contains(row) for row in self.basis.data)

    def sum(self, other: "Lattice") -> "Lattice":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return Lattice.from_rows(self.ambient_dim, list(self.basis.data) + list(other.basis.data))

    def intersect(self, other: "Lattice") -> "Lattice":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        if self.rank == 0 or other.rank == 0:
            return Lattice.zero(self.ambient_dim)
        stacked = vstack([self.basis, -other.basis])
        ker = left_kernel(stacked)
        rows = [
            IntMatrix([k[: self.rank]], cols=self.rank) * self.basis
            for k in ker.data
        ]
        return Lattice.from_rows(self.ambient_dim, [r.data[0] for r in rows])

    def to_json(self) -> list[list[str]]:
        return self.basis.to_json()

    @staticmethod
    def from_json(ambient_dim: int, obj) -> "Lattice":
        return Lattice.from_rows(ambient_dim, [[int(x) for x in row] for row in obj])


def saturate(L: Lattice) -> Lattice:
    """Smallest overlattice of equal rank with torsion-free quotient.

    Computed by a double orthogonal complement: both kernels are saturated,
    so the result is too.
    """
    n = L.ambient_dim
    if L.rank == 0:
        return Lattice.zero(n)
    comp = left_kernel(L.basis.transpose())
    if comp.rows == 0:
        return Lattice.standard(n)
    return Lattice.from_rows(n, left_kernel(comp.transpose()).data)


def preimage_lattice(M: IntMatrix, L: Lattice) -> Lattice:
    """The lattice ``{v in Z^n : M*v in L}`` for a k x n matrix ``M``."""
    if M.rows != L.ambient_dim:
        raise DimensionMismatch("M maps into Z^%d but L lives in Z^%d" % (M.rows, L.ambient_dim))
    n = M.cols
    mt = M.transpose()
    if L.rank == 0:
        return Lattice.from_rows(n, left_kernel(mt).data)
    stacked = vstack([mt, -L.basis])
    ker = left_kernel(stacked)
    return Lattice.from_rows(n, [row[:n] for row in ker.data])


def quotient_structure(sup: Lattice, sub: Lattice) -> AbelianStructure:
    """Invariant factors of ``sup / sub`` (requires ``sub`` inside ``sup``)."""
    return quotient_with_generators(sup, sub)[0]


def quotient_with_generators(
    sup: Lattice, sub: Lattice
) -> tuple[AbelianStructure, list[tuple[int, Row]]]:
    """Structure of ``sup/sub`` plus ambient lifts of its generators.

    Each generator comes as ``(order, vector)`` with order 0 for a free
    generator; trivial factors are dropped.
    """
    if sup.ambient_dim != sub.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    coord_rows = []
    for row in sub.basis.data:
        c = sup.coords_of(row)
        if c is None:
            raise NotASublattice("basis vector %r is not in the ambient lattice" % (row,))
        coord_rows.append(c)
    r_sup = sup.rank
    C = IntMatrix(coord_rows, cols=r_sup)
    form = snf(C)
    vinv = unimodular_inverse(form.V)
    gens: list[tuple[int, Row]] = []
    torsion = []
    for i in range(r_sup):
        d = form.S.data[i][i] if i < C.rows else 0
        if d == 1:
            continue
        lift = IntMatrix([vinv.data[i]], cols=r_sup) * sup.basis
        if d == 0:
            gens.append((0, lift.data[0]))
        else:
            torsion.append(d)
            gens.append((d, lift.data[0]))
    free = r_sup - len(form.factors)
    structure = AbelianStructure(free, tuple(sorted(torsion)))
    # Emit torsion generators first (in factor order), free ones last.
    gens.sort(key=lambda g: (g[0] == 0, g[0]))
    return structure, gens


def lattice_index(sup: Lattice, sub: Lattice) -> Optional[int]:
    """Index [sup : sub], or None if infinite."""
    return quotient_structure(sup, sub).order()

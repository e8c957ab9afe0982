"""Exact linear algebra over the scalar fields of :mod:`dahalink.exactfield`.

Matrices act on column vectors: for a matrix ``M`` representing an operator
``A`` in a basis ``v_0..v_{n}``, the image of a basis vector sits in a
*column*, ``A v_s = sum_r M[r][s] v_r``.  Everything here is exact: Gaussian
elimination with the first nonzero pivot, no pivoting heuristics, no
normalization beyond reduced column echelon form for subspaces.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

from .exactfield import FieldContext, FieldElement, QQ

__all__ = [
    "ExactMatrix",
    "Subspace",
    "SingularMatrixError",
    "NotInvariantError",
    "Vector",
    "solve",
    "kernel_basis",
    "eigenspace",
    "rank",
    "char_poly",
    "change_of_basis",
    "restrict",
    "restrict_to_basis",
    "is_diagonal",
    "is_tridiagonal",
    "is_irreducible_tridiagonal",
    "is_upper_bidiagonal",
    "is_lower_bidiagonal",
    "is_upper_tridiagonal",
    "is_lower_tridiagonal",
]

Vector = tuple[FieldElement, ...]


class SingularMatrixError(ZeroDivisionError):
    """Raised when inverting a matrix without full rank."""


class NotInvariantError(ValueError):
    """Raised when restricting an operator to a subspace it does not preserve."""


def _coerce(ctx: FieldContext, x) -> FieldElement:
    if isinstance(x, FieldElement):
        if x.ctx == ctx or x.irr == 0:
            return FieldElement(ctx, x.rat, x.irr) if x.irr == 0 else x
        raise ValueError("entry context does not match matrix context")
    return ctx.element(x)


class ExactMatrix:
    """An immutable dense matrix of :class:`FieldElement` entries.

    >>> m = ExactMatrix.from_rows(QQ, [[1, 2], [3, 4]])
    >>> (m * m.inverse()) == ExactMatrix.identity(QQ, 2)
    True
    """

    __slots__ = ("ctx", "nrows", "ncols", "rows")

    def __init__(self, ctx: FieldContext, rows: Sequence[Sequence[FieldElement]]) -> None:
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        frozen = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            frozen.append(tuple(_coerce(ctx, x) for x in row))
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rows(cls, ctx: FieldContext, rows: Sequence[Sequence]) -> "ExactMatrix":
        return cls(ctx, [[_coerce(ctx, x) for x in row] for row in rows])

    @classmethod
    def from_cols(cls, ctx: FieldContext, cols: Sequence[Sequence]) -> "ExactMatrix":
        n = len(cols[0])
        for c in cols:
            if len(c) != n:
                raise ValueError("ragged columns")
        return cls(ctx, [[_coerce(ctx, cols[j][i]) for j in range(len(cols))] for i in range(n)])

    @classmethod
    def zeros(cls, ctx: FieldContext, nrows: int, ncols: Optional[int] = None) -> "ExactMatrix":
        ncols = nrows if ncols is None else ncols
        z = ctx.zero()
        return cls(ctx, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, ctx: FieldContext, n: int) -> "ExactMatrix":
        z, o = ctx.zero(), ctx.one()
        return cls(ctx, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, ctx: FieldContext, entries: Sequence) -> "ExactMatrix":
        n = len(entries)
        z = ctx.zero()
        return cls(ctx, [[_coerce(ctx, entries[i]) if i == j else z for j in range(n)]
                         for i in range(n)])

    # -- access ----------------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> Vector:
        return tuple(self.rows[i][j] for i in range(self.nrows))

    def cols(self) -> list[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other, same=True)
        return ExactMatrix(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other, same=True)
        return ExactMatrix(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.ctx, [[-a for a in row] for row in self.rows])

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        ocols = [other.col(j) for j in range(other.ncols)]
        out = []
        for row in self.rows:
            out.append([_dot(row, c) for c in ocols])
        return ExactMatrix(self.ctx, out)

    def scale(self, c) -> "ExactMatrix":
        c = _coerce(self.ctx, c)
        return ExactMatrix(self.ctx, [[c * a for a in row] for row in self.rows])

    def apply(self, vec: Sequence[FieldElement]) -> Vector:
        """Matrix-vector product (vector as a column)."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(_dot(row, vec) for row in self.rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ctx, [[self.rows[i][j] for i in range(self.nrows)]
                                      for j in range(self.ncols)])

    def trace(self) -> FieldElement:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        t = self.ctx.zero()
        for i in range(self.nrows):
            t = t + self.rows[i][i]
        return t

    def inverse(self) -> "ExactMatrix":
        """Gauss-Jordan inverse with the first nonzero pivot in each column."""
        if not self.is_square:
            raise SingularMatrixError("only square matrices invert")
        n = self.nrows
        work = [list(row) + list(ident_row) for row, ident_row
                in zip(self.rows, ExactMatrix.identity(self.ctx, n).rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if work[r][col]), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            work[col], work[piv] = work[piv], work[col]
            inv_p = work[col][col].inv()
            work[col] = [inv_p * x for x in work[col]]
            for r in range(n):
                if r != col and work[r][col]:
                    f = work[r][col]
                    work[r] = [a - f * b for a, b in zip(work[r], work[col])]
        return ExactMatrix(self.ctx, [row[n:] for row in work])

    # -- comparison / io -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def _check_shape(self, other: "ExactMatrix", same: bool = False) -> None:
        if same and self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(_short(e) for e in row) for row in self.rows)
        return f"ExactMatrix[{body}]"

    def to_json(self) -> dict:
        return {"nrows": self.nrows, "ncols": self.ncols,
                "entries": [[e.to_json() for e in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict, ctx: Optional[FieldContext] = None) -> "ExactMatrix":
        entries = [[FieldElement.from_json(e, ctx) for e in row] for row in data["entries"]]
        if ctx is None:
            ctx = next((e.ctx for row in entries for e in row if e.ctx.disc != 1), QQ)
        return cls.from_rows(ctx, entries)


def _dot(u: Sequence[FieldElement], v: Sequence[FieldElement]) -> FieldElement:
    acc = None
    for a, b in zip(u, v):
        term = a * b
        acc = term if acc is None else acc + term
    if acc is None:
        raise ValueError("dot product of empty vectors")
    return acc


def _short(e: FieldElement) -> str:
    if e.irr == 0:
        return str(e.rat)
    return f"({e.rat}+{e.irr}r{e.ctx.disc})"


# ---------------------------------------------------------------------------
# Row reduction and derived operations
# ---------------------------------------------------------------------------


def _row_reduce(rows: list[list[FieldElement]]) -> tuple[list[list[FieldElement]], list[int]]:
    """In-place RREF with first-nonzero pivots; returns (rows, pivot_cols)."""
    if not rows:
        return rows, []
    nrows, ncols = len(rows), len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv_p = rows[r][c].inv()
        rows[r] = [inv_p * x for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(m: ExactMatrix) -> int:
    _, pivots = _row_reduce([list(row) for row in m.rows])
    return len(pivots)


def solve(m: ExactMatrix, b: Sequence[FieldElement]) -> Optional[Vector]:
    """One solution of ``M x = b`` (free variables set to zero), or None."""
    if len(b) != m.nrows:
        raise ValueError("rhs length mismatch")
    aug = [list(row) + [bb] for row, bb in zip(m.rows, b)]
    red, pivots = _row_reduce(aug)
    n = m.ncols
    for i, row in enumerate(red):
        if not any(row[:n]) and row[n]:
            return None
    x = [m.ctx.zero()] * n
    for i, c in enumerate(pivots):
        if c < n:
            x[c] = red[i][n]
        elif red[i][n]:
            return None
    return tuple(x)


def kernel_basis(m: ExactMatrix) -> "Subspace":
    """The null space of ``M`` as a subspace of the column space."""
    red, pivots = _row_reduce([list(row) for row in m.rows])
    n = m.ncols
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [m.ctx.zero()] * n
        v[f] = m.ctx.one()
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        basis.append(tuple(v))
    return Subspace(m.ctx, n, basis)


def eigenspace(m: ExactMatrix, mu: FieldElement) -> "Subspace":
    if not m.is_square:
        raise ValueError("eigenspace of a non-square matrix")
    shifted = m - ExactMatrix.identity(m.ctx, m.nrows).scale(mu)
    return kernel_basis(shifted)


def char_poly(m: ExactMatrix) -> list[FieldElement]:
    """Coefficients ``[c_0, .., c_{n-1}, 1]`` of det(xI - M), ascending.

    Faddeev–LeVerrier: exact, division only by integers.
    """
    if not m.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    ctx = m.ctx
    coeffs = [ctx.one()]          # leading coefficient, will be reversed
    N = ExactMatrix.identity(ctx, n)
    for k in range(1, n + 1):
        MN = m * N
        a = -(MN.trace() / k)
        coeffs.append(a)
        N = MN + ExactMatrix.identity(ctx, n).scale(a)
    coeffs.reverse()              # now ascending: c_0 .. c_{n-1}, 1
    return coeffs


class Subspace:
    """A subspace of column space, stored by its reduced-column-echelon basis.

    The input vectors must be linearly independent (``ValueError`` if not);
    the stored basis is canonical, so two subspaces compare equal iff they
    are the same subspace.
    """

    __slots__ = ("ctx", "ambient_dim", "basis")

    def __init__(self, ctx: FieldContext, ambient_dim: int,
                 vectors: Iterable[Sequence[FieldElement]]) -> None:
        vecs = [list(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("vector length does not match ambient dimension")
        reduced, pivots = _row_reduce([list(v) for v in vecs])
        if len(pivots) != len(vecs):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", tuple(tuple(row) for row in reduced[:len(pivots)]))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[FieldElement]) -> bool:
        if len(v) != self.ambient_dim:
            return False
        stacked = [list(b) for b in self.basis] + [list(v)]
        _, pivots = _row_reduce(stacked)
        return len(pivots) == self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.basis == other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


# ---------------------------------------------------------------------------
# Base change and restriction
# ---------------------------------------------------------------------------


def change_of_basis(m: ExactMatrix, p: ExactMatrix) -> ExactMatrix:
    """The matrix of the same operator in the basis given by the columns of
    ``P``: returns ``P^{-1} M P``."""
    return p.inverse() * m * p


def restrict_to_basis(m: ExactMatrix, vectors: Sequence[Sequence[FieldElement]]) -> ExactMatrix:
    """The matrix of ``M`` restricted to the span of ``vectors``, in exactly
    that (ordered) basis.  Raises :class:`NotInvariantError` if any image
    leaves the span."""
    if not vectors:
        raise ValueError("empty basis")
    ctx = m.ctx
    Subspace(ctx, m.ncols, vectors)          # validates independence
    # Solve B y = M v_j where B has the basis vectors as columns.
    bmat = ExactMatrix.from_cols(ctx, vectors)
    cols = []
    for v in vectors:
        y = solve(bmat, m.apply(v))
        if y is None:
            raise NotInvariantError("subspace is not invariant under the operator")
        cols.append(y)
    return ExactMatrix.from_cols(ctx, cols)


def restrict(m: ExactMatrix, w: Subspace) -> ExactMatrix:
    """Restriction of ``M`` to an invariant subspace, in its canonical basis."""
    return restrict_to_basis(m, [list(b) for b in w.basis])


# ---------------------------------------------------------------------------
# Shape predicates
# ---------------------------------------------------------------------------


def _all_entries(m: ExactMatrix, keep: Callable[[int, int], bool]) -> bool:
    """True iff every entry outside the kept region vanishes."""
    return all(not m.rows[i][j]
               for i in range(m.nrows) for j in range(m.ncols) if not keep(i, j))


def is_diagonal(m: ExactMatrix) -> bool:
    return m.is_square and _all_entries(m, lambda i, j: i == j)


def is_tridiagonal(m: ExactMatrix) -> bool:
    return m.is_square and _all_entries(m, lambda i, j: abs(i - j) <= 1)


def is_irreducible_tridiagonal(m: ExactMatrix) -> bool:
    """Tridiagonal with every entry on the sub- and superdiagonal nonzero."""
    if not is_tridiagonal(m):
        return False
    n = m.nrows
    return all(m.rows[i + 1][i] and m.rows[i][i + 1] for i in range(n - 1))


def is_lower_bidiagonal(m: ExactMatrix) -> bool:
    return m.is_square and _all_entries(m, lambda i, j: j <= i <= j + 1)


def is_upper_bidiagonal(m: ExactMatrix) -> bool:
    return m.is_square and _all_entries(m, lambda i, j: i <= j <= i + 1)


def is_upper_tridiagonal(m: ExactMatrix) -> bool:
    """Nonzero entries confined to ``i <= j <= i + 2``."""
    return m.is_square and _all_entries(m, lambda i, j: i <= j <= i + 2)


def is_lower_tridiagonal(m: ExactMatrix) -> bool:
    """Nonzero entries confined to ``j <= i <= j + 2``."""
    return m.is_square and _all_entries(m, lambda i, j: j <= i <= j + 2)

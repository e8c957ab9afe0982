"""Leonard pairs of q-Racah type: recognition, split sequences, parameter
arrays, Huang data, and the Askey-Wilson third element.

A Leonard pair on V is a pair of diagonalizable operators A, A* such that in
some A-eigenbasis A* is irreducible tridiagonal and in some A*-eigenbasis A
is irreducible tridiagonal.  The diameter is d = dim V - 1.  A standard
eigenvalue ordering is one exhibiting the tridiagonal shape; it is unique up
to reversal.

For the q-Racah class the eigenvalues take the form

    theta_r      = a q^{2r-d} + a^{-1} q^{d-2r},
    theta*_r     = b q^{2r-d} + b^{-1} q^{d-2r},

and the first split sequence is

    phi_r = a^{-1} b^{-1} q^{d+1} (q^r - q^{-r}) (q^{r-d-1} - q^{d-r+1})
            (q^{-r} - a b c q^{r-d-1}) (q^{-r} - a b c^{-1} q^{r-d-1}),

which pins down a third scalar c.  The triple (a, b, c) together with d is
the Huang data of the pair; it determines the pair up to isomorphism and is
itself determined up to inverting a, b, c independently (c arbitrary when
d = 0; we normalize c = 1 there).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactfield import (
    ExtensionRequiredError,
    FieldContext,
    FieldElement,
    QQ,
    int_pow,
    is_valid_q,
    sqrt_element,
    square_free_decomposition,
)
from .exactlinalg import (
    ExactMatrix,
    Vector,
    change_of_basis,
    char_poly,
    eigenspace,
    is_irreducible_tridiagonal,
    is_lower_bidiagonal,
    is_upper_bidiagonal,
)

__all__ = [
    "LeonardPair",
    "ParameterArray",
    "HuangData",
    "NotStandardOrderingError",
    "VerificationError",
    "recognize_leonard_pair",
    "split_sequence",
    "parameter_arrays",
    "qracah_parameter",
    "huang_data_from_array",
    "check_huang_admissible",
    "huang_equivalent",
    "build_pair_from_huang",
    "askey_wilson_third",
    "common_context",
]


class NotStandardOrderingError(ValueError):
    """The supplied eigenvalue orderings do not admit a split basis."""


class VerificationError(RuntimeError):
    """An internal exact identity that must hold failed to hold."""


def common_context(*elems: FieldElement) -> FieldContext:
    """The shared field context of the given elements.

    Rational elements fit in any context; two distinct nontrivial
    discriminants are an error.
    """
    ctx = QQ
    for e in elems:
        if e.irr != 0 or e.ctx.disc != 1:
            if ctx.disc != 1 and e.ctx.disc != ctx.disc:
                raise ValueError("elements live in incompatible quadratic extensions")
            ctx = e.ctx
    return ctx


def _promote(e: FieldElement, ctx: FieldContext) -> FieldElement:
    if e.ctx == ctx:
        return e
    if e.irr != 0:
        raise ValueError("cannot promote an irrational element across contexts")
    return FieldElement(ctx, e.rat)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeonardPair:
    """A candidate Leonard pair: two square matrices of equal size.

    Construction checks only shapes; call :func:`recognize_leonard_pair`
    for the certificate.  ``diameter`` is dim V - 1.
    """

    A: ExactMatrix
    Astar: ExactMatrix

    def __post_init__(self) -> None:
        if not (self.A.is_square and self.Astar.is_square):
            raise ValueError("Leonard pair matrices must be square")
        if self.A.shape != self.Astar.shape:
            raise ValueError("Leonard pair matrices must have equal size")

    @property
    def diameter(self) -> int:
        return self.A.nrows - 1


@dataclass(frozen=True)
class ParameterArray:
    """(theta, theta*, phi, phi2) with the usual nondegeneracy conditions:
    theta and theta* each mutually distinct, every phi_r and phi2_r nonzero."""

    theta: tuple[FieldElement, ...]
    theta_star: tuple[FieldElement, ...]
    phi: tuple[FieldElement, ...]
    phi2: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        d = len(self.theta) - 1
        if len(self.theta_star) != d + 1 or len(self.phi) != d or len(self.phi2) != d:
            raise ValueError("parameter array length mismatch")
        if len(set(self.theta)) != d + 1 or len(set(self.theta_star)) != d + 1:
            raise ValueError("eigenvalues in a parameter array must be distinct")
        if any(not x for x in self.phi) or any(not x for x in self.phi2):
            raise ValueError("split sequences must be nonzero")

    @property
    def diameter(self) -> int:
        return len(self.theta) - 1

    def to_json(self) -> dict:
        return {
            "theta": [x.to_json() for x in self.theta],
            "theta_star": [x.to_json() for x in self.theta_star],
            "phi": [x.to_json() for x in self.phi],
            "phi2": [x.to_json() for x in self.phi2],
        }

    @classmethod
    def from_json(cls, data: dict, ctx: Optional[FieldContext] = None) -> "ParameterArray":
        grab = lambda key: tuple(FieldElement.from_json(x, ctx) for x in data[key])
        return cls(grab("theta"), grab("theta_star"), grab("phi"), grab("phi2"))


@dataclass(frozen=True)
class HuangData:
    """The scalars (a, b, c) and diameter d parametrizing a q-Racah pair."""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: int

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError("diameter must be nonnegative")
        if not (self.a and self.b and self.c):
            raise ValueError("Huang scalars must be nonzero")
        ctx = common_context(self.a, self.b, self.c)
        object.__setattr__(self, "a", _promote(self.a, ctx))
        object.__setattr__(self, "b", _promote(self.b, ctx))
        object.__setattr__(self, "c", _promote(self.c, ctx))

    @property
    def ctx(self) -> FieldContext:
        return self.a.ctx

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(),
                "c": self.c.to_json(), "d": self.d}

    @classmethod
    def from_json(cls, data: dict, ctx: Optional[FieldContext] = None) -> "HuangData":
        return cls(
            FieldElement.from_json(data["a"], ctx),
            FieldElement.from_json(data["b"], ctx),
            FieldElement.from_json(data["c"], ctx),
            int(data["d"]),
        )


# ---------------------------------------------------------------------------
# Polynomial root extraction (rational roots + quadratic completion)
# ---------------------------------------------------------------------------


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic Miller-Rabin for anything these polynomials can produce
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"cannot factor {n}")


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if _is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return []
    divs = [1]
    for p, e in _factorize(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _rational_root_candidates(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Candidate nonzero rational roots of a polynomial with the given
    rational coefficients (ascending): the rational root theorem, pruned by
    the P(1)/P(-1) divisibility filter.

    A root u/v in lowest terms has (vx - u) dividing the integer polynomial,
    so (v - u) | P(1) and (v + u) | P(-1); this cuts the divisor lattice to
    a handful of survivors before any full evaluation.
    """
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in coeffs]
    while ints and ints[0] == 0:
        ints = ints[1:]          # nonzero roots only; x^k factors drop out
    c0, cn = ints[0], ints[-1]
    p_at_1 = sum(ints)
    p_at_m1 = sum(v if i % 2 == 0 else -v for i, v in enumerate(ints))
    cands: list[Fraction] = []
    for s in _divisors(cn):
        for p in _divisors(c0):
            if math.gcd(p, s) != 1:
                continue
            for num in (p, -p):
                dv = s - num
                if dv == 0:
                    if p_at_1 != 0:
                        continue
                elif p_at_1 % dv:
                    continue
                dw = s + num
                if dw == 0:
                    if p_at_m1 != 0:
                        continue
                elif p_at_m1 % dw:
                    continue
                cands.append(Fraction(num, s))
    return sorted(set(cands))


def _poly_eval(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _deflate(coeffs: list[FieldElement], r: FieldElement) -> list[FieldElement]:
    """Synthetic division of a monic polynomial by (x - r)."""
    out = [coeffs[-1]]
    for c in reversed(coeffs[1:-1]):
        out.append(c + r * out[-1])
    out.reverse()
    return out


def _field_roots(coeffs: Sequence[FieldElement]) -> Optional[list[FieldElement]]:
    """All roots (with multiplicity) of a monic polynomial, provided the
    polynomial splits after rational-root extraction plus one quadratic
    completion; otherwise None.

    Rational roots are found by the rational root theorem (applied to the
    rational parts, filtered by full evaluation when coefficients are
    irrational); what remains must have degree <= 2.
    """
    ctx = coeffs[-1].ctx
    work = list(coeffs)
    if work[-1] != 1:
        lead_inv = work[-1].inv()
        work = [lead_inv * c for c in work]
    roots: list[FieldElement] = []
    while len(work) - 1 > 2:
        # zero roots first
        if not work[0]:
            roots.append(ctx.zero())
            work = work[1:]
            continue
        rat_part = [c.rat for c in work]
        irr_part = [c.irr for c in work]
        base = rat_part if any(rat_part) else irr_part
        found = None
        for cand in _rational_root_candidates(base):
            x = ctx.from_fraction(cand)
            if not _poly_eval(work, x):
                found = x
                break
        if found is None:
            return None
        roots.append(found)
        work = _deflate(work, found)
    deg = len(work) - 1
    if deg == 1:
        roots.append(-work[0])
    elif deg == 2:
        disc = work[1] * work[1] - 4 * work[0]
        s = sqrt_element(disc)
        if s is None:
            return None
        half = FieldElement(ctx, Fraction(1, 2))
        roots.append((-work[1] + s) * half)
        roots.append((-work[1] - s) * half)
    return roots


# ---------------------------------------------------------------------------
# Recognition
# ---------------------------------------------------------------------------


def _distinct_eigenvalues(m: ExactMatrix,
                          candidates: Optional[Sequence[FieldElement]]) -> Optional[list[FieldElement]]:
    """The full multiplicity-free spectrum of ``m``, or None.

    With candidates given, verifies they are distinct, exhaust the
    dimension, and each has a 1-dimensional eigenspace.  Without, extracts
    characteristic-polynomial roots within the field.
    """
    n = m.nrows
    if candidates is not None:
        evs = list(candidates)
        if len(evs) != n or len(set(evs)) != n:
            return None
    else:
        roots = _field_roots(char_poly(m))
        if roots is None:
            return None
        evs = sorted(set(roots), key=lambda e: e.canonical_str())
        if len(evs) != n:
            return None
    for mu in evs:
        if eigenspace(m, mu).dim != 1:
            return None
    return evs


def _support_path_order(m: ExactMatrix) -> Optional[list[int]]:
    """Order the indices so the off-diagonal support of ``m`` is walked as a
    path; None when the support graph is not a path."""
    n = m.nrows
    if n == 1:
        return [0]
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and (m.rows[i][j] or m.rows[j][i]):
                adj[i].add(j)
                adj[j].add(i)
    degs = [len(a) for a in adj]
    ends = [i for i in range(n) if degs[i] == 1]
    if max(degs) > 2 or len(ends) != 2:
        return None
    if sum(degs) != 2 * (n - 1):       # exactly n-1 undirected edges
        return None
    order = [min(ends)]
    prev = -1
    while len(order) < n:
        nxt = [j for j in adj[order[-1]] if j != prev]
        if len(nxt) != 1:
            return None
        prev = order[-1]
        order.append(nxt[0])
    return order if len(set(order)) == n else None


def _ordering_via_eigenbasis(m: ExactMatrix, diag: ExactMatrix,
                             evs: Sequence[FieldElement]) -> Optional[list[FieldElement]]:
    """Standard ordering of ``diag``'s eigenvalues making ``m`` irreducible
    tridiagonal in a ``diag``-eigenbasis, or None."""
    vecs = []
    for mu in evs:
        es = eigenspace(diag, mu)
        if es.dim != 1:
            return None
        vecs.append(list(es.basis[0]))
    p = ExactMatrix.from_cols(m.ctx, vecs)
    rep = change_of_basis(m, p)
    order = _support_path_order(rep)
    if order is None:
        return None
    perm = ExactMatrix.from_cols(m.ctx, [[m.ctx.one() if i == o else m.ctx.zero()
                                          for i in range(len(evs))] for o in order])
    if not is_irreducible_tridiagonal(change_of_basis(rep, perm)):
        return None
    return [evs[i] for i in order]


def _lex_smaller(seq: Sequence[FieldElement]) -> list[FieldElement]:
    fwd = list(seq)
    rev = fwd[::-1]
    key = lambda s: json.dumps([x.to_json() for x in s], sort_keys=True)
    return fwd if key(fwd) <= key(rev) else rev


def recognize_leonard_pair(
    A: ExactMatrix,
    Astar: ExactMatrix,
    candidates: Optional[Sequence[FieldElement]] = None,
    candidates_star: Optional[Sequence[FieldElement]] = None,
) -> Optional[tuple[tuple[FieldElement, ...], tuple[FieldElement, ...]]]:
    """Certify (A, A*) as a Leonard pair.

    Returns a pair (standard ordering of the A-eigenvalues, standard
    ordering of the A*-eigenvalues), each the lexicographically smaller of
    its two directions, or None when any condition fails.  Optional
    candidate eigenvalue lists short-circuit root extraction (needed when
    the spectrum is known but the characteristic polynomial does not yield
    to rational/quadratic root search).
    """
    if not (A.is_square and Astar.is_square and A.shape == Astar.shape):
        raise ValueError("matrices must be square and of equal size")
    evs = _distinct_eigenvalues(A, candidates)
    evs_star = _distinct_eigenvalues(Astar, candidates_star)
    if evs is None or evs_star is None:
        return None
    # A irreducible tridiagonal in an A*-eigenbasis fixes the theta* order;
    # A* in an A-eigenbasis fixes the theta order.
    theta_star = _ordering_via_eigenbasis(A, Astar, evs_star)
    theta = _ordering_via_eigenbasis(Astar, A, evs)
    if theta is None or theta_star is None:
        return None
    return tuple(_lex_smaller(theta)), tuple(_lex_smaller(theta_star))


# ---------------------------------------------------------------------------
# Split sequences and parameter arrays
# ---------------------------------------------------------------------------


def _proportionality(w: Vector, v: Vector) -> FieldElement:
    """The scalar f with w = f v (v nonzero); VerificationError otherwise."""
    pivot = next((i for i, x in enumerate(v) if x), None)
    if pivot is None:
        raise VerificationError("proportionality against the zero vector")
    f = w[pivot] * v[pivot].inv()
    if any(w[i] != f * v[i] for i in range(len(v))):
        raise VerificationError("vectors are not proportional")
    return f


def split_sequence(
    P: LeonardPair,
    theta_order: Sequence[FieldElement],
    theta_star_order: Sequence[FieldElement],
) -> list[FieldElement]:
    """The split sequence phi_1..phi_d attached to a pair of standard
    orderings.

    Builds the split basis: v_0 spans the A*-eigenspace of theta*_0, then
    v_{r+1} = (A - theta_r) v_r; in this basis A is lower bidiagonal with
    diagonal theta_r and subdiagonal 1, and A* is upper bidiagonal with
    diagonal theta*_r and superdiagonal phi_r, both verified exactly.
    Raises :class:`NotStandardOrderingError` when the orderings are not
    standard.
    """
    A, S = P.A, P.Astar
    ctx = A.ctx
    n = A.nrows
    d = n - 1
    if len(theta_order) != n or len(theta_star_order) != n:
        raise ValueError("ordering length must match the pair size")
    ident = ExactMatrix.identity(ctx, n)
    es = eigenspace(S, theta_star_order[0])
    if es.dim != 1:
        raise NotStandardOrderingError("theta*_0 eigenspace is not a line")
    vecs: list[Vector] = [es.basis[0]]
    for r in range(d):
        nxt = (A - ident.scale(theta_order[r])).apply(vecs[r])
        if not any(nxt):
            raise NotStandardOrderingError(f"split chain dies at step {r}")
        vecs.append(nxt)
    tail = (A - ident.scale(theta_order[d])).apply(vecs[d])
    if any(tail):
        raise NotStandardOrderingError("split chain does not terminate")
    phi: list[FieldElement] = []
    for r in range(1, n):
        w = (S - ident.scale(theta_star_order[r])).apply(vecs[r])
        f = _proportionality(w, vecs[r - 1])
        if not f:
            raise NotStandardOrderingError(f"phi_{r} vanishes")
        phi.append(f)
    # exact shape check in the split basis
    p = ExactMatrix.from_cols(ctx, [list(v) for v in vecs])
    rep_a = change_of_basis(A, p)
    rep_s = change_of_basis(S, p)
    ok = is_lower_bidiagonal(rep_a) and is_upper_bidiagonal(rep_s)
    ok = ok and all(rep_a.rows[r][r] == theta_order[r] for r in range(n))
    ok = ok and all(rep_a.rows[r + 1][r] == 1 for r in range(d))
    ok = ok and all(rep_s.rows[r][r] == theta_star_order[r] for r in range(n))
    ok = ok and all(rep_s.rows[r - 1][r] == phi[r - 1] for r in range(1, n))
    if not ok:
        raise VerificationError("split-basis representation has the wrong shape")
    return phi


def parameter_arrays(
    P: LeonardPair,
    orderings: Optional[tuple[Sequence[FieldElement], Sequence[FieldElement]]] = None,
) -> list[ParameterArray]:
    """The four parameter arrays of a Leonard pair.

    With (theta, theta*) a fixed pair of standard orderings, phi the first
    and varphi the second split sequence, the arrays are::

        (theta_r,     theta*_r,     phi_r,             varphi_r)
        (theta_r,     theta*_{d-r}, varphi_{d-r+1},    phi_{d-r+1})
        (theta_{d-r}, theta*_r,     varphi_r,          phi_r)
        (theta_{d-r}, theta*_{d-r}, phi_{d-r+1},       varphi_{d-r+1})

    Every slot is verified against a freshly computed split sequence under
    that array's own orderings.
    """
    if orderings is None:
        rec = recognize_leonard_pair(P.A, P.Astar)
        if rec is None:
            raise ValueError("not a recognizable Leonard pair over this field")
        theta, theta_star = list(rec[0]), list(rec[1])
    else:
        theta, theta_star = list(orderings[0]), list(orderings[1])
    theta_rev = theta[::-1]
    theta_star_rev = theta_star[::-1]
    phi = split_sequence(P, theta, theta_star)
    varphi = split_sequence(P, theta_rev, theta_star)
    # table symmetries, each one a fresh split computation
    if split_sequence(P, theta, theta_star_rev) != varphi[::-1]:
        raise VerificationError("second/first split sequence symmetry fails")
    if split_sequence(P, theta_rev, theta_star_rev) != phi[::-1]:
        raise VerificationError("reversed split sequence symmetry fails")
    mk = lambda th, ts, p1, p2: ParameterArray(tuple(th), tuple(ts), tuple(p1), tuple(p2))
    return [
        mk(theta, theta_star, phi, varphi),
        mk(theta, theta_star_rev, varphi[::-1], phi[::-1]),
        mk(theta_rev, theta_star, varphi, phi),
        mk(theta_rev, theta_star_rev, phi[::-1], varphi[::-1]),
    ]


# ---------------------------------------------------------------------------
# q-Racah parametrization and Huang data
# ---------------------------------------------------------------------------


def qracah_parameter(theta: Sequence[FieldElement], q: FieldElement) -> Optional[FieldElement]:
    """The scalar alpha with theta_r = alpha q^{2r-d} + alpha^{-1} q^{d-2r},
    or None.

    For d >= 1 the first two entries determine alpha linearly and the rest
    verify it; for d = 0 alpha solves a quadratic and is determined only up
    to inverse (one deterministic root is returned when it exists in the
    field).
    """
    if not is_valid_q(q):
        raise ValueError("q must be rational, nonzero, and not a root of unity")
    d = len(theta) - 1
    if d < 0:
        raise ValueError("empty eigenvalue list")
    ctx = common_context(q, *theta)
    th = [_promote(x, ctx) for x in theta]
    qq = _promote(q, ctx)
    if d == 0:
        disc = th[0] * th[0] - 4
        s = sqrt_element(disc)
        if s is None:
            return None
        alpha = (th[0] + s) * FieldElement(ctx, Fraction(1, 2))
        return alpha if alpha else None
    # theta_r = u q^{2r} + w q^{-2r} with u = alpha q^{-d}, w = alpha^{-1} q^{d}
    q2 = qq * qq
    q2i = q2.inv()
    denom = q2 - q2i
    u = (th[1] - th[0] * q2i) * denom.inv()
    w = th[0] - u
    if not u or not w or u * w != 1:
        return None
    for r in range(2, d + 1):
        if th[r] != u * int_pow(qq, 2 * r) + w * int_pow(qq, -2 * r):
            return None
    return u * int_pow(qq, d)


def _phi_formula(a: FieldElement, b: FieldElement, c: FieldElement,
                 d: int, q: FieldElement, r: int) -> FieldElement:
    """First split sequence entry phi_r of the q-Racah pair with Huang data
    (a, b, c, d)."""
    ai, bi, ci = a.inv(), b.inv(), c.inv()
    qe = lambda e: int_pow(q, e)
    return (ai * bi * qe(d + 1)
            * (qe(r) - qe(-r))
            * (qe(r - d - 1) - qe(d - r + 1))
            * (qe(-r) - a * b * c * qe(r - d - 1))
            * (qe(-r) - a * b * ci * qe(r - d - 1)))


def _phi2_formula(a: FieldElement, b: FieldElement, c: FieldElement,
                  d: int, q: FieldElement, r: int) -> FieldElement:
    """Second split sequence entry varphi_r for Huang data (a, b, c, d)."""
    ai, bi, ci = a.inv(), b.inv(), c.inv()
    qe = lambda e: int_pow(q, e)
    return (a * bi * qe(d + 1)
            * (qe(r) - qe(-r))
            * (qe(r - d - 1) - qe(d - r + 1))
            * (qe(-r) - ai * b * c * qe(r - d - 1))
            * (qe(-r) - ai * b * ci * qe(r - d - 1)))


def huang_data_from_array(pa: ParameterArray, q: FieldElement) -> Optional[HuangData]:
    """Huang data of a q-Racah parameter array, or None.

    a and b come from the two eigenvalue ladders; c + c^{-1} is solved
    linearly from phi_1, then c from its quadratic — extending the field by
    one square root when necessary (:class:`ExtensionRequiredError` when the
    context already carries a different extension).  All phi_r and varphi_r
    values are then verified; any mismatch yields None.
    """
    a = qracah_parameter(pa.theta, q)
    b = qracah_parameter(pa.theta_star, q)
    if a is None or b is None:
        return None
    d = pa.diameter
    ctx = common_context(a, b, q, *pa.phi, *pa.phi2)
    a, b, qq = _promote(a, ctx), _promote(b, ctx), _promote(q, ctx)
    if d == 0:
        return HuangData(a, b, ctx.one(), 0)
    qe = lambda e: int_pow(qq, e)
    # phi_1 = K (q^{-2} - a b q^{-d-1} s + a^2 b^2 q^{-2d}),  s = c + c^{-1}
    K = a.inv() * b.inv() * qe(d + 1) * (qq - qe(-1)) * (qe(-d) - qe(d))
    phi1 = pa.phi[0] if pa.phi[0].irr != 0 else _promote(pa.phi[0], ctx)
    s = (qe(-2) + a * a * b * b * qe(-2 * d) - phi1 * K.inv()) * (a * b * qe(-d - 1)).inv()
    disc = s * s - 4
    root = sqrt_element(disc)
    if root is None:
        if ctx.disc != 1:
            raise ExtensionRequiredError(
                "solving for c needs a second quadratic extension")
        scale, fresh = square_free_decomposition(disc.rat)
        ctx = FieldContext(fresh)
        a, b, qq, s = (FieldElement(ctx, x.rat) for x in (a, b, qq, s))
        root = FieldElement(ctx, Fraction(0), scale)
    c = (s + root) * FieldElement(ctx, Fraction(1, 2))
    if not c:
        return None
    for r in range(1, d + 1):
        if _phi_formula(a, b, c, d, qq, r) != pa.phi[r - 1]:
            return None
        if _phi2_formula(a, b, c, d, qq, r) != pa.phi2[r - 1]:
            return None
    return HuangData(a, b, c, d)


def check_huang_admissible(h: HuangData, q: FieldElement) -> bool:
    """The nondegeneracy conditions making Huang data realizable:

    (i)  a^2, b^2 avoid q^{2d-2}, q^{2d-4}, ..., q^{2-2d};
    (ii) abc, a^{-1}bc, ab^{-1}c, abc^{-1} avoid q^{d-1}, q^{d-3}, ..., q^{1-d}.

    Both lists are empty when d = 0.
    """
    if not is_valid_q(q):
        raise ValueError("q must be rational, nonzero, and not a root of unity")
    d = h.d
    if d == 0:
        return True
    squares = {int_pow(q, e) for e in range(2 - 2 * d, 2 * d - 1, 2)}
    if h.a * h.a in squares or h.b * h.b in squares:
        return False
    line = {int_pow(q, e) for e in range(1 - d, d, 2)}
    prods = (h.a * h.b * h.c, h.a.inv() * h.b * h.c,
             h.a * h.b.inv() * h.c, h.a * h.b * h.c.inv())
    return not any(p in line for p in prods)


def huang_equivalent(h1: HuangData, h2: HuangData) -> bool:
    """Whether two Huang data describe isomorphic pairs: equal diameter and
    (a, b, c) matching up to independently inverting each scalar, with c
    ignored entirely at d = 0."""
    if h1.d != h2.d:
        return False
    same = lambda x, y: y == x or y == x.inv()
    if not (same(h1.a, h2.a) and same(h1.b, h2.b)):
        return False
    return h1.d == 0 or same(h1.c, h2.c)


def build_pair_from_huang(h: HuangData, q: FieldElement) -> LeonardPair:
    """The canonical split-form realization of admissible Huang data:
    A lower bidiagonal with diagonal theta_r and subdiagonal 1, A* upper
    bidiagonal with diagonal theta*_r and superdiagonal phi_r.

    Verified by recognition and by a Huang-data round trip.
    """
    if not check_huang_admissible(h, q):
        raise ValueError("inadmissible Huang data")
    ctx = common_context(h.a, h.b, h.c, q)
    a, b, c, qq = (_promote(x, ctx) for x in (h.a, h.b, h.c, q))
    d = h.d
    qe = lambda e: int_pow(qq, e)
    theta = [a * qe(2 * r - d) + a.inv() * qe(d - 2 * r) for r in range(d + 1)]
    theta_star = [b * qe(2 * r - d) + b.inv() * qe(d - 2 * r) for r in range(d + 1)]
    phi = [_phi_formula(a, b, c, d, qq, r) for r in range(1, d + 1)]
    z = ctx.zero()
    A_rows = [[z] * (d + 1) for _ in range(d + 1)]
    S_rows = [[z] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        A_rows[r][r] = theta[r]
        S_rows[r][r] = theta_star[r]
    for r in range(1, d + 1):
        A_rows[r][r - 1] = ctx.one()
        S_rows[r - 1][r] = phi[r - 1]
    pair = LeonardPair(ExactMatrix(ctx, A_rows), ExactMatrix(ctx, S_rows))
    rec = recognize_leonard_pair(pair.A, pair.Astar, theta, theta_star)
    if rec is None:
        raise VerificationError("constructed pair failed recognition")
    back = huang_data_from_array(parameter_arrays(pair, (theta, theta_star))[0], qq)
    if back is None or not huang_equivalent(back, h):
        raise VerificationError("Huang data round trip failed")
    return pair


# ---------------------------------------------------------------------------
# Askey-Wilson relations
# ---------------------------------------------------------------------------


def _aw_scalar(x: FieldElement, y: FieldElement, z: FieldElement,
               d: int, q: FieldElement) -> FieldElement:
    """(q^{d+1} + q^{-d-1})(x + x^{-1}) + (y + y^{-1})(z + z^{-1}), all over
    q + q^{-1}."""
    num = ((int_pow(q, d + 1) + int_pow(q, -d - 1)) * (x + x.inv())
           + (y + y.inv()) * (z + z.inv()))
    return num * (q + q.inv()).inv()


def askey_wilson_third(P: LeonardPair, h: HuangData, q: FieldElement) -> ExactMatrix:
    """The third Askey-Wilson element A^e of a q-Racah pair.

    Defined by  A^e = gamma_c I - (q A A* - q^{-1} A* A)/(q^2 - q^{-2})
    with gamma_c the Huang-data scalar; the other two relations

        A  + (q A* A^e - q^{-1} A^e A*)/(q^2 - q^{-2}) = gamma_a I
        A* + (q A^e A - q^{-1} A A^e)/(q^2 - q^{-2})   = gamma_b I

    are then verified exactly (:class:`VerificationError` on failure).  The
    result does not change when any of a, b, c is inverted.
    """
    ctx = common_context(h.a, h.b, h.c, q, P.A.ctx.one())
    a, b, c, qq = (_promote(x, ctx) for x in (h.a, h.b, h.c, q))
    A, S = P.A, P.Astar
    n = A.nrows
    ident = ExactMatrix.identity(ctx, n)
    denom_inv = (qq * qq - (qq * qq).inv()).inv()
    comm = lambda M, N: (M * N).scale(qq) - (N * M).scale(qq.inv())
    gamma_a = _aw_scalar(a, b, c, h.d, qq)
    gamma_b = _aw_scalar(b, c, a, h.d, qq)
    gamma_c = _aw_scalar(c, a, b, h.d, qq)
    Ae = ident.scale(gamma_c) - comm(A, S).scale(denom_inv)
    if A + comm(S, Ae).scale(denom_inv) != ident.scale(gamma_a):
        raise VerificationError("first Askey-Wilson relation fails")
    if S + comm(Ae, A).scale(denom_inv) != ident.scale(gamma_b):
        raise VerificationError("second Askey-Wilson relation fails")
    return Ae

"""Exponents of rank-2 multiarrangements and Euler multiplicities.

A rank-2 multiarrangement is always free; its exponent pair {d1, d2}
with d1 <= d2 and d1 + d2 = |mu| is computed exactly: d1 is the smallest
degree admitting a nonzero derivation theta = f1 d/dx + f2 d/dy with
alpha^mu(H) dividing theta(alpha) for every line alpha = ker H, found by
solving the divisibility conditions as an exact linear system for
ascending degrees.  Witnesses are verified with an independent
polynomial-division check.

The Euler multiplicity of a restriction is computed by the common-value
rule: for a rank-2 localization, mu*(Y) is the unique common nonzero
exponent of (A_Y, mu_Y) and of its deletion at H0.  Closed-form
shortcuts for special shapes are provided separately
(:func:`euler_value_shortcut`) so tests can cross-check the two routes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from . import linalg
from .arrangement import MultiArrangement, hyperplane_flat, multi, restriction
from .scalars import Scalar, one, zero

__all__ = [
    "Rank2Derivation",
    "Rank2Result",
    "derivation_satisfies",
    "euler_deletion",
    "euler_multiplicity",
    "euler_value_shortcut",
    "plane_exponent_pair",
    "plane_exponents",
    "rank2_exponents",
    "reduce_to_plane",
    "triple",
    "verify_witness",
]

# a plane system: ((a, b), multiplicity) per line, in 2 coordinates
Plane = tuple[tuple[tuple[Scalar, Scalar], int], ...]


@dataclass(frozen=True, slots=True)
class Rank2Derivation:
    """theta = f1 d/dx + f2 d/dy, homogeneous of the given degree.

    ``f1[j]`` is the coefficient of x^(degree-j) y^j.
    """

    degree: int
    f1: tuple[Scalar, ...]
    f2: tuple[Scalar, ...]


@dataclass(frozen=True, slots=True)
class Rank2Result:
    """Sorted exponent pair, witness, and the plane system it refers to.

    ``witness`` is None for inputs of rank < 2, where the exponents are
    {0, |mu|} and there is nothing to certify.
    """

    exponents: tuple[int, int]
    witness: Rank2Derivation | None
    plane: Plane


def reduce_to_plane(m: MultiArrangement) -> Plane:
    """Express a rank-2 multiarrangement in two canonical coordinates.

    The coordinates are the pivot columns of the RREF of the forms, so
    the reduction is deterministic; each output form is normalized.
    """
    arr = m.arrangement
    red, pivots = linalg.rref([f.coeffs for f in arr.hyperplanes], arr.dim)
    if len(pivots) != 2:
        raise ValueError(f"expected rank 2, got rank {len(pivots)}")
    p1, p2 = pivots
    out = []
    for f, mu in zip(arr.hyperplanes, m.mult):
        # f = f[p1] * row1 + f[p2] * row2 since the RREF rows have an
        # identity pattern in the pivot columns
        a, b = f.coeffs[p1], f.coeffs[p2]
        if a:
            b = b * a.inverse()
            a = one(arr.zeta_order)
        else:
            b = one(arr.zeta_order)
        out.append(((a, b), mu))
    return tuple(out)


def _binomial_rows(line: tuple[Scalar, Scalar], mult: int, degree: int, order: int) -> list[list[Scalar]]:
    """Linear conditions on (f1, f2) for alpha^mult | a*f1 + b*f2.

    Writing g = a*f1 + b*f2 = sum_j g_j x^(d-j) y^j and substituting
    x = alpha - t*y (for alpha = x + t*y), divisibility by alpha^mult
    says the coefficients of alpha^s y^(d-s) vanish for s < mult.
    """
    a, b = line
    d = degree
    z = zero(order)
    rows: list[list[Scalar]] = []
    if not a:
        # alpha = y: the coefficients g_j with j < mult must vanish
        for j in range(min(mult, d + 1)):
            row = [z] * (2 * (d + 1))
            row[d + 1 + j] = one(order)
            rows.append(row)
        return rows
    t = b
    powers = [one(order)]
    for _ in range(d):
        powers.append(powers[-1] * -t)
    for s in range(min(mult, d + 1)):
        row = [z] * (2 * (d + 1))
        for j in range(d - s + 1):
            w = math.comb(d - j, s) * powers[d - j - s]
            row[j] = w
            row[d + 1 + j] = w * t
        rows.append(row)
    return rows


def _kernel(plane: Plane, degree: int, order: int) -> list[tuple[Scalar, ...]]:
    rows: list[list[Scalar]] = []
    for line, mult in plane:
        rows.extend(_binomial_rows(line, mult, degree, order))
    return linalg.nullspace(rows, 2 * (degree + 1), order)


def _pair_by_dimension(plane: Plane, order: int) -> tuple[int, int]:
    """Exponent pair from one kernel dimension, no minimal-degree scan.

    A rank-2 multiarrangement is free, so the derivations of degree d
    form a space of dimension max(0, d - d1 + 1) + max(0, d - d2 + 1).
    At d = ceil(|mu|/2) - 1, which is >= d1 unless the pair is the even
    balanced one and always < d2, the dimension alone determines d1.
    """
    total = sum(mult for _, mult in plane)
    dstar = (total + 1) // 2 - 1
    rows: list[list[Scalar]] = []
    for line, mult in plane:
        rows.extend(_binomial_rows(line, mult, dstar, order))
    dim = 2 * (dstar + 1) - len(linalg.rref(rows, 2 * (dstar + 1))[1])
    if dim == 0:
        assert total % 2 == 0, "zero kernel below ceil(|mu|/2) forces an even split"
        return (total // 2, total // 2)
    d1 = dstar - dim + 1
    return (d1, total - d1)


def _divide_once(g: list[Scalar], line: tuple[Scalar, Scalar]) -> list[Scalar] | None:
    """Divide the homogeneous bivariate g by a*x + b*y; None if inexact.

    ``g[j]`` is the coefficient of x^(D-j) y^j.
    """
    a, b = line
    if not a:
        if g[0]:
            return None
        binv = b.inverse()
        return [c * binv for c in g[1:]]
    q: list[Scalar] = []
    ainv = a.inverse()
    for j in range(len(g) - 1):
        num = g[j] - b * q[j - 1] if j else g[j]
        q.append(num * ainv)
    rem = g[-1] - (b * q[-1] if q else zero(a.order))
    if rem:
        return None
    return q


def derivation_satisfies(plane: Plane, theta: Rank2Derivation) -> bool:
    """Independent witness check: alpha^mult | theta(alpha) for each line.

    Uses repeated exact polynomial division, not the linear system that
    produced the witness.
    """
    if not any(theta.f1) and not any(theta.f2):
        return False
    for line, mult in plane:
        a, b = line
        g = [a * c1 + b * c2 for c1, c2 in zip(theta.f1, theta.f2)]
        for _ in range(mult):
            if all(not c for c in g):
                break
            nxt = _divide_once(g, line)
            if nxt is None:
                return False
            g = nxt
    return True


def verify_witness(result: Rank2Result, order: int) -> bool:
    """Full re-validation of a solver result, from the definitions.

    Checks exact divisibility of the witness on every line, that its
    degree matches the smaller exponent, that the exponents sum to the
    multiplicity total, and that no nonzero derivation exists in any
    degree below the witness (minimality).
    """
    pair = result.exponents
    if result.witness is None:
        # only rank < 2 inputs go witnessless: {0, |mu|} and no plane
        return result.plane == () and pair[0] == 0
    theta = result.witness
    if theta.degree != pair[0] or pair[0] + pair[1] != sum(m for _, m in result.plane):
        return False
    if not derivation_satisfies(result.plane, theta):
        return False
    return all(not _kernel(result.plane, d, order) for d in range(pair[0]))


def _two_line_witness(plane: Plane, order: int) -> Rank2Derivation:
    """Explicit witness for two lines: theta(alpha1) = alpha1^m1,
    theta(alpha2) = 0, of degree m1 = min(m1, m2)."""
    (l1, m1), (l2, m2) = plane
    if m2 < m1:
        (l1, m1), (l2, m2) = (l2, m2), (l1, m1)
    a1, b1 = l1
    a2, b2 = l2
    inv_det = (a1 * b2 - a2 * b1).inverse()
    g = [math.comb(m1, j) * a1 ** (m1 - j) * b1**j for j in range(m1 + 1)]
    f1 = tuple(b2 * inv_det * c for c in g)
    f2 = tuple(-a2 * inv_det * c for c in g)
    return Rank2Derivation(m1, f1, f2)


@functools.lru_cache(maxsize=None)
def plane_exponents(plane: Plane, order: int) -> tuple[tuple[int, int], Rank2Derivation]:
    """Exponents and minimal-degree witness for a plane system.

    Needs at least two distinct lines.  The ascending-degree loop
    certifies minimality: every degree below the returned one had a zero
    kernel.  The witness is always re-verified by polynomial division.
    """
    total = sum(mult for _, mult in plane)
    if len(plane) < 2:
        raise ValueError("plane system needs at least two lines")
    if len(plane) == 2:
        m1, m2 = plane[0][1], plane[1][1]
        witness = _two_line_witness(plane, order)
        if not derivation_satisfies(plane, witness):
            raise ArithmeticError("two-line witness failed verification")
        return (min(m1, m2), max(m1, m2)), witness
    degree = 0
    while degree <= total // 2:
        basis = _kernel(plane, degree, order)
        if basis:
            v = basis[0]
            witness = Rank2Derivation(degree, v[: degree + 1], v[degree + 1 :])
            if not derivation_satisfies(plane, witness):
                raise ArithmeticError("solver produced an invalid witness")
            return (degree, total - degree), witness
        degree += 1
    raise ArithmeticError("no derivation found at degree <= |mu|/2; input not of rank 2?")


@functools.lru_cache(maxsize=None)
def plane_exponent_pair(plane: Plane, order: int) -> tuple[int, int]:
    """Exponent pair of a plane system, by closed form where one exists.

    Four shapes have geometry-independent exponents and skip the solver:

    - two lines: {m1, m2};
    - all multiplicities 1: {1, k - 1} (the simple case);
    - one line carrying at least half the total: {|mu| - max, max},
      since below degree max the heavy coordinate of a derivation is
      forced to zero and the rest must be divisible by every other line;
    - three lines: {floor(|mu|/2), ceil(|mu|/2)} in the remaining
      balanced case (any three distinct concurrent lines are linearly
      equivalent, so only the multiplicities matter).

    Everything else goes to the exact minimal-degree solver.  Tests
    cross-check every shortcut against the solver on random systems.

    >>> from .scalars import one, rational
    >>> o = one(1)
    >>> lines = ((o, rational(0)), (rational(0), o), (o, o), (o, rational(-1)))
    >>> plane_exponent_pair(tuple((l, 1) for l in lines), 1)
    (1, 3)
    >>> plane_exponent_pair(tuple((l, m) for l, m in zip(lines, (5, 1, 2, 1))), 1)
    (4, 5)
    """
    k = len(plane)
    if k < 2:
        raise ValueError("plane system needs at least two lines")
    mults = [m for _, m in plane]
    total = sum(mults)
    if k == 2:
        return (min(mults), max(mults))
    heavy = max(mults)
    if all(m == 1 for m in mults):
        return (1, k - 1)
    if 2 * heavy >= total:
        return (total - heavy, heavy)
    if k == 3:
        return (total // 2, total - total // 2)
    return _pair_by_dimension(plane, order)


@functools.lru_cache(maxsize=None)
def rank2_exponents(m: MultiArrangement) -> Rank2Result:
    """Exponent pair {d1, d2}, d1 <= d2, of a multiarrangement of rank <= 2.

    Rank 0 gives {0, 0}; a single hyperplane of multiplicity k gives
    {0, k}; genuine rank-2 inputs also return a verified minimal-degree
    witness over canonical plane coordinates.
    """
    arr = m.arrangement
    if arr.n == 0:
        return Rank2Result((0, 0), None, ())
    rk = linalg.rank([f.coeffs for f in arr.hyperplanes], arr.dim)
    if rk == 1:
        return Rank2Result((0, m.total), None, ())
    plane = reduce_to_plane(m)
    canonical = tuple(sorted(plane, key=lambda p: (tuple(c.sort_key() for c in p[0]), p[1])))
    pair, witness = plane_exponents(canonical, arr.zeta_order)
    return Rank2Result(pair, witness, canonical)


def euler_value_shortcut(m0: int, others: tuple[int, ...]) -> int | None:
    """Closed-form Euler multiplicity for special local shapes.

    ``m0`` is the multiplicity of the distinguished hyperplane, ``others``
    those of the remaining hyperplanes through the same rank-2 flat.
    Returns None when no shortcut applies.  Used as an independent
    cross-check of (and fast path for) the common-value rule.
    """
    k = len(others) + 1
    if k == 2:
        return others[0]
    total = m0 + sum(others)
    if total <= 2 * k - 1 and m0 > 1:
        return k - 1
    if m0 == 2 and all(o == 2 for o in others):
        return k
    return None


def _pair_for(lines: Plane, order: int) -> tuple[int, int]:
    """Exponent pair of a plane system that may have rank < 2."""
    active = tuple((l, m) for l, m in lines if m > 0)
    if not active:
        return (0, 0)
    if len(active) == 1:
        return (0, active[0][1])
    return plane_exponent_pair(tuple(sorted(active, key=lambda p: (tuple(c.sort_key() for c in p[0]), p[1]))), order)


def common_value(h0_line: tuple[Scalar, Scalar], m0: int, others: Plane, order: int) -> int:
    """mu*(Y) by the common-value rule, everything in plane coordinates.

    The unique common nonzero exponent of (A_Y, mu_Y) and of its
    deletion at the distinguished line; its existence and uniqueness is
    a theorem, so a violation signals corrupted input (or a bug) and
    raises rather than guessing.
    """
    full = _pair_for(others + ((h0_line, m0),), order)
    deleted = _pair_for(others + ((h0_line, m0 - 1),), order)
    s1 = {e for e in full if e}
    s2 = {e for e in deleted if e}
    shared = s1 & s2
    if len(shared) != 1:
        raise ArithmeticError(f"no unique common nonzero exponent: {full} vs {deleted}")
    return shared.pop()


@functools.lru_cache(maxsize=None)
def euler_multiplicity(m: MultiArrangement, h0: int) -> MultiArrangement:
    """The Euler restriction (A'', mu*) of (A, mu) at hyperplane index h0.

    For every Y in A'' the localization (A_Y, mu_Y) is rank 2; mu*(Y) is
    its common-value Euler multiplicity (with the closed-form shortcut
    taken where it provably applies).
    """
    arr = m.arrangement
    res = restriction(arr, hyperplane_flat(arr, h0))
    groups: list[list[int]] = [[] for _ in range(res.arrangement.n)]
    for parent, target in enumerate(res.trace):
        if target is not None:
            groups[target].append(parent)
    values: list[int] = []
    m0 = m.mult[h0]
    h0_form = arr.hyperplanes[h0]
    for members in groups:
        other_mults = tuple(m.mult[p] for p in members)
        value = euler_value_shortcut(m0, other_mults)
        if value is None:
            # localize at the rank-2 flat spanned by h0 and the group
            loc_forms = [arr.hyperplanes[p] for p in members]
            red, pivots = linalg.rref([f.coeffs for f in loc_forms + [h0_form]], arr.dim)
            assert len(pivots) == 2
            p1, p2 = pivots

            def to_plane(f) -> tuple[Scalar, Scalar]:
                a, b = f.coeffs[p1], f.coeffs[p2]
                if a:
                    b = b * a.inverse()
                    a = one(arr.zeta_order)
                else:
                    b = one(arr.zeta_order)
                return (a, b)

            others = tuple((to_plane(f), mu) for f, mu in zip(loc_forms, other_mults))
            value = common_value(to_plane(h0_form), m0, others, arr.zeta_order)
        values.append(value)
    return MultiArrangement(res.arrangement, tuple(values))


def euler_deletion(m: MultiArrangement, h0: int) -> MultiArrangement:
    """(A', mu'): multiplicity of h0 lowered by one (dropped at zero)."""
    if m.mult[h0] < 1:
        raise ValueError("cannot delete a hyperplane of multiplicity 0")
    lowered = list(m.mult)
    lowered[h0] -= 1
    return multi(m.arrangement, lowered)


def triple(m: MultiArrangement, h0: int) -> tuple[MultiArrangement, MultiArrangement]:
    """The (deletion, Euler restriction) pair of (A, mu) at h0."""
    return euler_deletion(m, h0), euler_multiplicity(m, h0)

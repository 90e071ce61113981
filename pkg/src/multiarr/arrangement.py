"""Hyperplane arrangements and multiarrangements over Q(zeta_r).

Conventions used throughout the package:

- a hyperplane is the kernel of a nonzero linear form; forms are stored
  normalized (first nonzero coefficient equals 1), so equal hyperplanes
  have equal forms;
- an :class:`Arrangement` is an ordered tuple of pairwise distinct
  hyperplanes together with parallel labels; the order is significant
  (labels like ``a5`` refer to positions) but all mathematical results
  are independent of it;
- a :class:`MultiArrangement` pairs an arrangement with positive integer
  multiplicities; multiplicity-0 hyperplanes are dropped from the
  support on construction;
- a :class:`Flat` is an intersection of hyperplanes, recorded by its
  closed index set, its rank, canonical defining equations (reduced row
  echelon basis of the span of its forms) and a canonical spanning basis
  of the subspace itself.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from . import linalg
from .scalars import Scalar, one, zero

__all__ = [
    "Arrangement",
    "Flat",
    "LinearForm",
    "MultiArrangement",
    "Restriction",
    "arrangement",
    "characteristic_polynomial",
    "concentrated_multiplicity",
    "essentialize",
    "free_exponents_from_charpoly",
    "hyperplane_flat",
    "intersection_lattice",
    "linear_form",
    "localization",
    "localize_multi",
    "multi",
    "product",
    "rank_of",
    "restriction",
    "simple_multi",
    "ziegler_multiplicity",
]


@dataclass(frozen=True, slots=True)
class LinearForm:
    """A normalized linear form; the hyperplane is its kernel."""

    coeffs: tuple[Scalar, ...]

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def sort_key(self) -> tuple:
        return tuple(c.sort_key() for c in self.coeffs)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def linear_form(coeffs: tuple[Scalar, ...] | list[Scalar]) -> LinearForm:
    """Normalize so the first nonzero coefficient is 1."""
    lead = next((c for c in coeffs if c), None)
    if lead is None:
        raise ValueError("zero linear form does not define a hyperplane")
    if lead.is_one():
        return LinearForm(tuple(coeffs))
    inv = lead.inverse()
    return LinearForm(tuple(c * inv for c in coeffs))


@dataclass(frozen=True, slots=True)
class Arrangement:
    """An ordered, labelled, duplicate-free tuple of hyperplanes."""

    dim: int
    zeta_order: int
    hyperplanes: tuple[LinearForm, ...]
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.hyperplanes)

    def index_of_form(self, form: LinearForm) -> int:
        return _form_index(self)[form]

    def index_of_label(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no hyperplane labelled {label!r}") from None


@functools.lru_cache(maxsize=None)
def _form_index(arr: Arrangement) -> dict[LinearForm, int]:
    return {f: i for i, f in enumerate(arr.hyperplanes)}


def arrangement(
    dim: int,
    zeta_order: int,
    forms: list[tuple[Scalar, ...] | list[Scalar] | LinearForm],
    labels: list[str] | None = None,
) -> Arrangement:
    normalized = tuple(f if isinstance(f, LinearForm) else linear_form(f) for f in forms)
    for f in normalized:
        if f.dim != dim:
            raise ValueError(f"form {f} does not have {dim} coefficients")
        for c in f.coeffs:
            if c.order != zeta_order:
                raise ValueError(f"form {f} is not over Q(zeta_{zeta_order})")
    if len(set(normalized)) != len(normalized):
        seen: dict[LinearForm, int] = {}
        for i, f in enumerate(normalized):
            if f in seen:
                raise ValueError(f"hyperplanes {seen[f]} and {i} coincide: {f}")
            seen[f] = i
    if labels is None:
        labels = [f"a{i + 1}" for i in range(len(normalized))]
    if len(labels) != len(normalized) or len(set(labels)) != len(labels):
        raise ValueError("labels must be unique and parallel to the hyperplanes")
    return Arrangement(dim, zeta_order, normalized, tuple(labels))


@dataclass(frozen=True, slots=True)
class Flat:
    """An element of the intersection lattice."""

    closed: tuple[int, ...]
    rank: int
    equations: tuple[tuple[Scalar, ...], ...]
    pivots: tuple[int, ...]
    basis: tuple[tuple[Scalar, ...], ...]


def _standard_basis(dim: int, order: int) -> tuple[tuple[Scalar, ...], ...]:
    o, z = one(order), zero(order)
    return tuple(tuple(o if i == j else z for j in range(dim)) for i in range(dim))


def hyperplane_flat(arr: Arrangement, index: int) -> Flat:
    form = arr.hyperplanes[index]
    equations = (form.coeffs,)
    pivots = (next(j for j, c in enumerate(form.coeffs) if c),)
    basis = tuple(linalg.nullspace([form.coeffs], arr.dim, arr.zeta_order))
    return Flat((index,), 1, equations, pivots, basis)


@functools.lru_cache(maxsize=None)
def intersection_lattice(arr: Arrangement, max_rank: int | None = None) -> tuple[Flat, ...]:
    """All flats of rank <= max_rank, sorted by (rank, closed set).

    Built layer by layer: the layer of rank k+1 consists of the distinct
    subspaces X cap H for X of rank k and H not containing X; canonical
    RREF equations are used as dedup keys, so the output is
    deterministic.
    """
    n = arr.n
    limit = arr.dim if max_rank is None else min(max_rank, arr.dim)
    top = Flat((), 0, (), (), _standard_basis(arr.dim, arr.zeta_order))
    flats: list[Flat] = [top]
    if limit == 0 or n == 0:
        return tuple(flats)

    layer: list[Flat] = []
    for i, form in enumerate(arr.hyperplanes):
        layer.append(hyperplane_flat(arr, i))
    flats.extend(layer)

    rk = 1
    while rk < limit and layer:
        seen: dict[tuple, Flat] = {}
        for flat in layer:
            closed_set = set(flat.closed)
            for j in range(n):
                if j in closed_set:
                    continue
                extended = linalg.extend_echelon(flat.equations, flat.pivots, arr.hyperplanes[j].coeffs)
                assert extended is not None, "closed sets must be closed"
                eqs, pivs = extended
                if eqs in seen:
                    continue
                closed = tuple(
                    i
                    for i in range(n)
                    if not any(linalg.reduce_against(arr.hyperplanes[i].coeffs, eqs, pivs))
                )
                basis = tuple(linalg.nullspace(eqs, arr.dim, arr.zeta_order))
                seen[eqs] = Flat(closed, rk + 1, eqs, pivs, basis)
        layer = sorted(seen.values(), key=lambda f: f.closed)
        flats.extend(layer)
        rk += 1
    flats.sort(key=lambda f: (f.rank, f.closed))
    return tuple(flats)


@functools.lru_cache(maxsize=None)
def rank_of(arr: Arrangement) -> int:
    return linalg.rank([f.coeffs for f in arr.hyperplanes], arr.dim)


def localization(arr: Arrangement, flat: Flat) -> Arrangement:
    """The subarrangement of hyperplanes containing the flat (same ambient)."""
    return Arrangement(
        arr.dim,
        arr.zeta_order,
        tuple(arr.hyperplanes[i] for i in flat.closed),
        tuple(arr.labels[i] for i in flat.closed),
    )


@dataclass(frozen=True, slots=True)
class Restriction:
    """A restricted arrangement plus the parent-to-restricted index map.

    ``trace[i]`` is the index of the image of parent hyperplane i, or
    None when parent i contains the flat (and hence does not restrict).
    """

    arrangement: Arrangement
    trace: tuple[int | None, ...]

    def group(self, restricted_index: int) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.trace) if t == restricted_index)


def restriction(arr: Arrangement, flat: Flat) -> Restriction:
    """Restrict to a flat; coordinates come from the flat's canonical basis."""
    closed = set(flat.closed)
    sub_dim = len(flat.basis)
    forms: list[LinearForm] = []
    labels: list[str] = []
    index: dict[LinearForm, int] = {}
    trace: list[int | None] = []
    for i, h in enumerate(arr.hyperplanes):
        if i in closed:
            trace.append(None)
            continue
        restricted = linear_form([linalg.dot(h.coeffs, b) for b in flat.basis])
        found = index.get(restricted)
        if found is None:
            found = len(forms)
            index[restricted] = found
            forms.append(restricted)
            labels.append(arr.labels[i])
        trace.append(found)
    sub = Arrangement(sub_dim, arr.zeta_order, tuple(forms), tuple(labels))
    return Restriction(sub, tuple(trace))


@dataclass(frozen=True, slots=True)
class MultiArrangement:
    """An arrangement with positive integer multiplicities."""

    arrangement: Arrangement
    mult: tuple[int, ...]

    @property
    def total(self) -> int:
        """|mu|, the sum of all multiplicities."""
        return sum(self.mult)

    def multiplicity_of(self, index: int) -> int:
        return self.mult[index]

    def key(self) -> tuple:
        """Canonical content key: sorted (form, multiplicity) pairs."""
        pairs = sorted(
            ((f.sort_key(), m) for f, m in zip(self.arrangement.hyperplanes, self.mult)),
        )
        return (self.arrangement.dim, self.arrangement.zeta_order, tuple(pairs))


def multi(arr: Arrangement, mult: list[int] | tuple[int, ...]) -> MultiArrangement:
    """Pair an arrangement with multiplicities, dropping the 0 entries."""
    if len(mult) != arr.n:
        raise ValueError(f"{len(mult)} multiplicities for {arr.n} hyperplanes")
    if any(m < 0 for m in mult):
        raise ValueError("multiplicities must be >= 0")
    if all(mult):
        return MultiArrangement(arr, tuple(mult))
    keep = [i for i, m in enumerate(mult) if m]
    sub = Arrangement(
        arr.dim,
        arr.zeta_order,
        tuple(arr.hyperplanes[i] for i in keep),
        tuple(arr.labels[i] for i in keep),
    )
    return MultiArrangement(sub, tuple(mult[i] for i in keep))


def simple_multi(arr: Arrangement) -> MultiArrangement:
    return MultiArrangement(arr, (1,) * arr.n)


def localize_multi(m: MultiArrangement, flat: Flat) -> MultiArrangement:
    """(A_X, mu_X): hyperplanes through the flat keep their multiplicity."""
    return MultiArrangement(
        localization(m.arrangement, flat),
        tuple(m.mult[i] for i in flat.closed),
    )


def essentialize(m: MultiArrangement) -> MultiArrangement:
    """Rewrite in coordinates on the span of the forms; dim becomes rank.

    Localizations of higher-rank arrangements are non-essential; this
    maps each form to its values at the pivot columns of the form-span
    echelon basis, an invertible change on the span, so multiplicities
    and labels carry over unchanged.
    """
    arr = m.arrangement
    _, pivots = linalg.rref([f.coeffs for f in arr.hyperplanes], arr.dim)
    if len(pivots) == arr.dim:
        return m
    coords = [tuple(f.coeffs[p] for p in pivots) for f in arr.hyperplanes]
    ess = arrangement(len(pivots), arr.zeta_order, coords, list(arr.labels))
    return MultiArrangement(ess, m.mult)


def ziegler_multiplicity(arr: Arrangement, h0: int) -> MultiArrangement:
    """The Ziegler restriction (A'', kappa) at hyperplane h0.

    kappa(Y) counts the parent hyperplanes other than H0 containing Y,
    so sum(kappa) = |A| - 1.
    """
    res = restriction(arr, hyperplane_flat(arr, h0))
    counts = [0] * res.arrangement.n
    for t in res.trace:
        if t is not None:
            counts[t] += 1
    return MultiArrangement(res.arrangement, tuple(counts))


def concentrated_multiplicity(arr: Arrangement, h0: int, m0: int) -> MultiArrangement:
    """delta_{H0,m0}: multiplicity m0 on H0 and 1 elsewhere."""
    if m0 < 1:
        raise ValueError("concentrated multiplicity needs m0 >= 1")
    return MultiArrangement(arr, tuple(m0 if i == h0 else 1 for i in range(arr.n)))


def product(m1: MultiArrangement, m2: MultiArrangement) -> MultiArrangement:
    """The product multiarrangement in the direct sum of the ambients."""
    a1, a2 = m1.arrangement, m2.arrangement
    if a1.zeta_order != a2.zeta_order:
        raise ValueError("product factors must live over the same field")
    z1 = [zero(a1.zeta_order)] * a1.dim
    z2 = [zero(a1.zeta_order)] * a2.dim
    forms = [LinearForm(tuple(f.coeffs) + tuple(z2)) for f in a1.hyperplanes]
    forms += [LinearForm(tuple(z1) + tuple(f.coeffs)) for f in a2.hyperplanes]
    labels = tuple(f"L.{s}" for s in a1.labels) + tuple(f"R.{s}" for s in a2.labels)
    arr = Arrangement(a1.dim + a2.dim, a1.zeta_order, tuple(forms), labels)
    return MultiArrangement(arr, tuple(m1.mult) + tuple(m2.mult))


@functools.lru_cache(maxsize=None)
def characteristic_polynomial(arr: Arrangement) -> tuple[int, ...]:
    """chi(A, t) as integer coefficients, index = power of t.

    Computed by Moebius recursion over the intersection lattice ordered
    by reverse inclusion of subspaces.
    """
    flats = intersection_lattice(arr)
    closed_sets = [frozenset(f.closed) for f in flats]
    mu: list[int] = []
    for i, f in enumerate(flats):
        if f.rank == 0:
            mu.append(1)
            continue
        acc = 0
        for j in range(len(flats)):
            if flats[j].rank < f.rank and closed_sets[j] < closed_sets[i]:
                acc += mu[j]
        mu.append(-acc)
    coeffs = [0] * (arr.dim + 1)
    for f, m in zip(flats, mu):
        coeffs[arr.dim - f.rank] += m
    return tuple(coeffs)


def free_exponents_from_charpoly(arr: Arrangement) -> tuple[int, ...] | None:
    """Integer root multiset of chi(A, t), or None if it does not split.

    When chi factors as prod (t - e_i) over the integers, the sorted e_i
    are returned (including zeros for a non-essential arrangement); a
    single non-integer root makes the result None.
    """
    coeffs = list(characteristic_polynomial(arr))
    exponents: list[int] = []
    # chi is monic of degree dim; its integer roots lie in [0, n].
    for root in range(arr.n + 1):
        while len(coeffs) > 1:
            # synthetic division by (t - root), descending coefficients
            desc = coeffs[::-1]
            out = [desc[0]]
            for c in desc[1:]:
                out.append(c + root * out[-1])
            if out[-1] != 0:
                break
            exponents.append(root)
            coeffs = out[:-1][::-1]
    if len(coeffs) > 1:
        return None
    return tuple(sorted(exponents))

"""Generated arrangement families, fixture files, and isomorphism search.

The intermediate family A^k_l(r) has defining polynomial
x_1 ... x_k * prod_{i<j, 0<=n<r} (x_i - zeta^n x_j), interpolating
between the full monomial reflection arrangement (k = l) and its
index-r subgroup's arrangement (k = 0).  Closed-form exponents and the
behaviour of restrictions within the family are provided alongside the
generator so they can be checked against the generic machinery.

Fixture files are line-oriented: `dim <l>`, `zeta <r>`, then one
`form (<scalar>, ...) mult <n>` line per hyperplane; `#` starts a
comment.  Hyperplanes keep file order and receive labels a1, a2, ...
by position.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from importlib import resources
from itertools import combinations

from . import linalg
from .arrangement import (
    Arrangement,
    LinearForm,
    MultiArrangement,
    arrangement,
    characteristic_polynomial,
    intersection_lattice,
    linear_form,
    multi,
)
from .scalars import Scalar, ScalarParseError, one, parse_scalar, zero, zeta

__all__ = [
    "FixtureError",
    "IntermediateSpec",
    "expected_exponents",
    "find_linear_isomorphism",
    "fingerprint",
    "format_fixture",
    "intermediate",
    "load_fixture",
    "parse_fixture",
    "parse_spec_string",
    "restriction_type",
    "shipped_fixture",
    "shipped_fixture_names",
    "shipped_table",
    "shipped_table_names",
]


@dataclass(frozen=True, slots=True)
class IntermediateSpec:
    """Parameters (r, l, k) of A^k_l(r); 0 <= k <= l, r >= 2, l >= 2."""

    r: int
    ell: int
    k: int

    def __post_init__(self) -> None:
        if self.r < 2:
            raise ValueError(f"need r >= 2, got {self.r}")
        if self.ell < 2:
            raise ValueError(f"need l >= 2, got {self.ell}")
        if not 0 <= self.k <= self.ell:
            raise ValueError(f"need 0 <= k <= {self.ell}, got {self.k}")

    @property
    def zeta_order(self) -> int:
        # r = 2 only needs the sign -1, which lives in plain Q
        return 1 if self.r == 2 else self.r

    @property
    def count(self) -> int:
        return self.k + self.r * self.ell * (self.ell - 1) // 2

    def __str__(self) -> str:
        return f"A:{self.r}:{self.ell}:{self.k}"


def parse_spec_string(text: str) -> IntermediateSpec:
    """Parse "A:r:l:k" (as used by the command line)."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] != "A":
        raise ValueError(f"expected A:r:l:k, got {text!r}")
    try:
        r, ell, k = (int(p) for p in parts[1:])
    except ValueError:
        raise ValueError(f"expected integers in A:r:l:k, got {text!r}") from None
    return IntermediateSpec(r, ell, k)


def _root_of_unity(spec: IntermediateSpec, n: int) -> Scalar:
    if spec.r == 2:
        return one(1) if n % 2 == 0 else -one(1)
    return zeta(spec.r, n)


@functools.lru_cache(maxsize=None)
def intermediate(spec: IntermediateSpec) -> Arrangement:
    """The arrangement A^k_l(r), coordinate forms first, labelled.

    Labels follow the H_i / H_{i,j}(z^n) naming, with the root of unity
    rendered through the scalar grammar, e.g. H_{1,2}(z^2).

    >>> intermediate(IntermediateSpec(3, 3, 0)).n
    9
    >>> intermediate(IntermediateSpec(3, 4, 1)).n
    19
    >>> intermediate(IntermediateSpec(3, 3, 3)).labels[:4]
    ('H_1', 'H_2', 'H_3', 'H_{1,2}(1)')
    """
    order = spec.zeta_order
    ell = spec.ell
    z, o = zero(order), one(order)
    forms: list[tuple[Scalar, ...]] = []
    labels: list[str] = []
    for i in range(spec.k):
        forms.append(tuple(o if j == i else z for j in range(ell)))
        labels.append(f"H_{i + 1}")
    for i, j in combinations(range(ell), 2):
        for n in range(spec.r):
            root = _root_of_unity(spec, n)
            forms.append(tuple(o if a == i else -root if a == j else z for a in range(ell)))
            labels.append(f"H_{{{i + 1},{j + 1}}}({root})")
    return arrangement(ell, order, forms, labels)


def expected_exponents(spec: IntermediateSpec) -> tuple[int, ...]:
    """Closed-form exponent multiset of A^k_l(r); sums to the count.

    >>> expected_exponents(IntermediateSpec(3, 4, 1))
    (1, 4, 7, 7)
    >>> expected_exponents(IntermediateSpec(3, 3, 0))
    (1, 4, 4)
    """
    r, ell, k = spec.r, spec.ell, spec.k
    exps = [1] + [i * r + 1 for i in range(1, ell - 1)] + [(ell - 1) * r - ell + k + 1]
    out = tuple(sorted(exps))
    assert sum(out) == spec.count
    return out


def restriction_type(spec: IntermediateSpec, h: int | str) -> IntermediateSpec:
    """The family member isomorphic to the restriction of A^k_l(r) at h.

    ``h`` is an index or label of :func:`intermediate`'s output.  The
    classification depends only on where the form sits relative to k:

    - k = 0: every restriction is A^1_{l-1}(r)
    - coordinate form, or k = l: A^{l-1}_{l-1}(r)
    - H_{i,j} with j <= k: A^{k-1}_{l-1}(r)
    - H_{i,j} with i <= k < j: A^k_{l-1}(r)
    - H_{i,j} with k < i < j: A^{k+1}_{l-1}(r)
    """
    arr = intermediate(spec)
    idx = arr.index_of_label(h) if isinstance(h, str) else h
    if not 0 <= idx < arr.n:
        raise IndexError(f"hyperplane {idx} not in {spec}")
    ell, k = spec.ell, spec.k
    if idx < k:
        return IntermediateSpec(spec.r, ell - 1, ell - 1)
    if k == 0:
        return IntermediateSpec(spec.r, ell - 1, 1)
    if k == ell:
        return IntermediateSpec(spec.r, ell - 1, ell - 1)
    pair = (idx - k) // spec.r
    i, j = list(combinations(range(1, ell + 1), 2))[pair]
    if j <= k:
        new_k = k - 1
    elif i <= k:
        new_k = k
    else:
        new_k = k + 1
    return IntermediateSpec(spec.r, ell - 1, new_k)


class FixtureError(ValueError):
    """A fixture file failed to parse; carries the offending line number."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_fixture(text: str) -> MultiArrangement:
    """Parse the line-oriented fixture format into a multiarrangement."""
    dim: int | None = None
    order: int | None = None
    forms: list[LinearForm] = []
    mults: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        keyword = fields[0]
        rest = fields[1] if len(fields) > 1 else ""
        if keyword == "dim":
            if dim is not None:
                raise FixtureError(lineno, "duplicate dim header")
            dim = _positive_int(rest, lineno, "dim")
        elif keyword == "zeta":
            if order is not None:
                raise FixtureError(lineno, "duplicate zeta header")
            order = _positive_int(rest, lineno, "zeta")
        elif keyword == "form":
            if dim is None or order is None:
                raise FixtureError(lineno, "form before dim/zeta headers")
            form, mult = _parse_form_line(rest, lineno, dim, order)
            forms.append(form)
            mults.append(mult)
        else:
            raise FixtureError(lineno, f"unknown keyword {keyword!r}")
    if dim is None or order is None:
        raise FixtureError(0, "missing dim or zeta header")
    if not forms:
        raise FixtureError(0, "no hyperplanes")
    try:
        arr = arrangement(dim, order, forms)
        return multi(arr, mults)
    except ValueError as exc:
        raise FixtureError(0, str(exc)) from exc


def _positive_int(text: str, lineno: int, what: str) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise FixtureError(lineno, f"{what} needs an integer, got {text!r}") from None
    if value < 1:
        raise FixtureError(lineno, f"{what} must be positive")
    return value


def _split_top_level(body: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError("unbalanced parentheses")
    parts.append("".join(cur))
    return parts


def _parse_form_line(rest: str, lineno: int, dim: int, order: int) -> tuple[LinearForm, int]:
    rest = rest.strip()
    if not rest.startswith("("):
        raise FixtureError(lineno, "expected form (<scalar>, ...)")
    close = rest.rfind(")")
    if close < 0:
        raise FixtureError(lineno, "unterminated coefficient tuple")
    body, tail = rest[1:close], rest[close + 1 :].strip()
    if not tail.startswith("mult"):
        raise FixtureError(lineno, "expected trailing 'mult <n>'")
    mult = _positive_int(tail[4:], lineno, "mult")
    try:
        pieces = _split_top_level(body)
    except ValueError as exc:
        raise FixtureError(lineno, str(exc)) from exc
    if len(pieces) != dim:
        raise FixtureError(lineno, f"expected {dim} coefficients, got {len(pieces)}")
    coeffs = []
    for piece in pieces:
        try:
            coeffs.append(parse_scalar(piece, order))
        except ScalarParseError as exc:
            raise FixtureError(lineno, f"bad scalar {piece.strip()!r}: {exc}") from exc
    try:
        return linear_form(coeffs), mult
    except ValueError as exc:
        raise FixtureError(lineno, str(exc)) from exc


def format_fixture(m: MultiArrangement, header: str | None = None) -> str:
    """Serialize a multiarrangement in the fixture format (round-trips)."""
    arr = m.arrangement
    lines = []
    if header:
        lines.extend(f"# {h}".rstrip() for h in header.splitlines())
    lines.append(f"dim {arr.dim}")
    lines.append(f"zeta {arr.zeta_order}")
    for form, mu in zip(arr.hyperplanes, m.mult):
        coeffs = ", ".join(str(c) for c in form.coeffs)
        lines.append(f"form ({coeffs}) mult {mu}")
    return "\n".join(lines) + "\n"


def load_fixture(path) -> MultiArrangement:
    """Load a fixture file from a filesystem path."""
    with open(path, encoding="utf-8") as fh:
        return parse_fixture(fh.read())


def shipped_fixture_names() -> tuple[str, ...]:
    files = resources.files(__package__) / "fixtures"
    return tuple(sorted(p.name[: -len(".arr")] for p in files.iterdir() if p.name.endswith(".arr")))


@functools.lru_cache(maxsize=None)
def shipped_fixture(name: str) -> MultiArrangement:
    """Load one of the fixtures shipped with the package, by stem name."""
    path = resources.files(__package__) / "fixtures" / f"{name}.arr"
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no shipped fixture {name!r}; have {shipped_fixture_names()}") from None
    return parse_fixture(text)


def shipped_table_names() -> tuple[str, ...]:
    files = resources.files(__package__) / "tables"
    return tuple(sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json")))


@functools.lru_cache(maxsize=None)
def shipped_table(name: str) -> dict:
    """Load one of the frozen addition tables shipped with the package.

    The payload carries the fixture stem it certifies, the exponents of
    the starting multiarrangement, the expected final exponents, and the
    rows as [exponents-before, hyperplane label, restriction-exponents].
    """
    path = resources.files(__package__) / "tables" / f"{name}.json"
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise KeyError(f"no shipped table {name!r}; have {shipped_table_names()}") from None
    missing = {"fixture", "start_exponents", "final_exponents", "rows"} - payload.keys()
    if missing:
        raise ValueError(f"table {name!r} lacks keys {sorted(missing)}")
    return payload


def fingerprint(m: MultiArrangement) -> tuple:
    """Cheap isomorphism invariants: size, charpoly, rank-2 local data.

    Two multiarrangements related by an invertible linear map share this
    fingerprint; unequal fingerprints certify non-isomorphism.
    """
    arr = m.arrangement
    profile = sorted(
        tuple(sorted(m.mult[i] for i in flat.closed))
        for flat in intersection_lattice(arr, 2)
        if flat.rank == 2
    )
    return (arr.n, m.total, characteristic_polynomial(arr), tuple(profile))


def _in_mult_classes(m: MultiArrangement) -> dict[int, list[int]]:
    classes: dict[int, list[int]] = {}
    for i, mu in enumerate(m.mult):
        classes.setdefault(mu, []).append(i)
    return classes


def find_linear_isomorphism(src: MultiArrangement, dst: MultiArrangement):
    """A matrix T with {src_i . T} = {dst_j} up to scalars, or None.

    T acts on coefficient rows; multiplicities must correspond.  The
    search anchors a projective frame (dim independent forms plus one in
    general position) in src and tries images in dst from matching
    multiplicity classes.  Returns T as a tuple of row tuples.
    """
    arr_s, arr_d = src.arrangement, dst.arrangement
    if (arr_s.dim, arr_s.zeta_order, arr_s.n, sorted(src.mult)) != (
        arr_d.dim,
        arr_d.zeta_order,
        arr_d.n,
        sorted(dst.mult),
    ):
        return None
    d = arr_s.dim
    order = arr_s.zeta_order
    rows_s = [f.coeffs for f in arr_s.hyperplanes]
    rows_d = [f.coeffs for f in arr_d.hyperplanes]

    frame = _projective_frame(rows_s, d)
    if frame is None:
        return None
    base, extra, coords = frame
    dst_classes = _in_mult_classes(dst)
    target = {arr_d.hyperplanes[i]: dst.mult[i] for i in range(arr_d.n)}

    def candidates(slot: int) -> list[int]:
        mu = src.mult[extra] if slot == d else src.mult[base[slot]]
        return dst_classes.get(mu, [])

    chosen: list[int] = []

    def place(slot: int) -> tuple | None:
        if slot == d:
            for w in candidates(d):
                if w in chosen:
                    continue
                t = _solve_frame(rows_s, rows_d, base, extra, coords, chosen, w, d, order)
                if t is not None and _maps_onto(src, target, t):
                    return t
            return None
        for c in candidates(slot):
            if c in chosen:
                continue
            picked = [rows_d[i] for i in chosen] + [rows_d[c]]
            if linalg.rank(picked, d) != slot + 1:
                continue
            chosen.append(c)
            t = place(slot + 1)
            if t is not None:
                return t
            chosen.pop()
        return None

    return place(0)


def _projective_frame(rows: list[tuple[Scalar, ...]], d: int):
    """Indices of d independent rows plus one with all-nonzero coordinates."""
    base: list[int] = []
    echelon: list = []
    pivots: list[int] = []
    for i, row in enumerate(rows):
        ext = linalg.extend_echelon(echelon, pivots, list(row))
        if ext is not None:
            echelon, pivots = ext
            base.append(i)
            if len(base) == d:
                break
    if len(base) < d:
        return None
    mat = [list(rows[i]) for i in base]
    for i, row in enumerate(rows):
        if i in base:
            continue
        coords = linalg.solve_rows(mat, list(row), d)
        if coords is not None and all(coords):
            return base, i, coords
    return None


def _solve_frame(rows_s, rows_d, base, extra, coords, chosen, w, d, order):
    """T = S^-1 . diag(lambda) . D from frame images; None if degenerate."""
    dmat = [list(rows_d[i]) for i in chosen]
    e = linalg.solve_rows(dmat, list(rows_d[w]), d)
    if e is None or not all(e):
        return None
    lam = [e[a] * coords[a].inverse() for a in range(d)]
    smat = [list(rows_s[i]) for i in base]
    inv = linalg.invert(smat, d, order)
    if inv is None:
        return None
    scaled = [[lam[a] * dmat[a][j] for j in range(d)] for a in range(d)]
    cols = list(zip(*scaled))
    return tuple(tuple(linalg.dot(inv[i], col) for col in cols) for i in range(d))


def _maps_onto(src: MultiArrangement, target: dict, t: tuple) -> bool:
    cols = list(zip(*t))
    seen: dict = {}
    for form, mu in zip(src.arrangement.hyperplanes, src.mult):
        image_coeffs = [linalg.dot(form.coeffs, col) for col in cols]
        if not any(image_coeffs):
            return False
        image = linear_form(image_coeffs)
        if target.get(image) != mu or image in seen:
            return False
        seen[image] = mu
    return len(seen) == len(target)

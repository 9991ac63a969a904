"""Fixed-vertex counting on the rank-one lattice tree and the orbital
sums built from it.

Vertices are homothety classes of rank-two lattices, stored as canonical
Hermite-form bases: rows (w^a, b), (0, w^c) with b reduced modulo w^c and
the class normalized so the determinant valuation a + c is 0 or 1.  The
determinant-valuation-zero vertices realize the quotient of the
unimodular group by the standard-lattice stabilizer; an element fixes a
vertex exactly when conjugating its basis matrix lands in the integral
group.

Counting an elliptic class walks the fixed set by breadth-first search
from one fixed vertex.  The fixed-point set of an isometry of a tree is
convex, hence connected, so the first layer that contributes no new
fixed vertex certifies the count is complete; no analytic bound is
involved.  Split classes are counted inside one fundamental window of
the apartment-translation action of the centralizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import DomainError, PrecisionError
from .local_field import (
    FieldElement,
    LocalField,
    QuadExtElement,
    fmat_inv,
    fmat_mul,
    fmat_nullspace,
    hilbert_symbol,
    is_square_unit,
    sqrt_unit,
)

_DESCENT_GUARD = 64


# -- exact values with half-integer exponents of q -----------------------------

@dataclass(frozen=True)
class ExactQ:
    """mantissa * q^(half_exponent / 2), with the mantissa kept prime to q."""

    q: int
    mantissa: Fraction
    half_exponent: int = 0

    def __post_init__(self):
        m = Fraction(self.mantissa)
        h = self.half_exponent
        if m == 0:
            h = 0
        else:
            num, den = m.numerator, m.denominator
            while num % self.q == 0:
                num //= self.q
                h += 2
            while den % self.q == 0:
                den //= self.q
                h -= 2
            m = Fraction(num, den)
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "half_exponent", h)

    def __eq__(self, other):
        if isinstance(other, ExactQ):
            return (self.q, self.mantissa, self.half_exponent) == (
                other.q,
                other.mantissa,
                other.half_exponent,
            )
        if isinstance(other, (int, Fraction)):
            return self == ExactQ(self.q, Fraction(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.mantissa, self.half_exponent))

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def to_json(self) -> dict:
        return {
            "mantissa": f"{self.mantissa.numerator}/{self.mantissa.denominator}",
            "q_half_exponent": self.half_exponent,
        }


# -- canonical lattice vertices ------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    a: int
    c: int
    b_val: int | None
    b_digits: tuple[int, ...]

    @property
    def det_valuation(self) -> int:
        return self.a + self.c

    @property
    def is_even(self) -> bool:
        return self.det_valuation == 0

    def rows(self, field: LocalField):
        b = field.zero() if self.b_val is None else field.from_digits(self.b_val, self.b_digits)
        return (
            (field.uniformizer(self.a), b),
            (field.zero(), field.uniformizer(self.c)),
        )


def standard_vertex() -> Vertex:
    return Vertex(0, 0, None, ())


def _second_column_generator(rows):
    tail = [r[1] for r in rows if not r[1].is_zero_at_precision]
    if not tail:
        raise DomainError("rows do not span a lattice")
    return min(tail, key=lambda e: e.valuation())


def canonical_vertex(rows, field: LocalField) -> Vertex:
    """Canonical Hermite form of the lattice spanned by the given rows,
    homothety-normalized to determinant valuation 0 or 1."""
    rows = list(rows)
    with_first = [r for r in rows if not r[0].is_zero_at_precision]
    if not with_first:
        raise DomainError("rows do not span a lattice")
    pivot = min(with_first, key=lambda r: r[0].valuation())
    reduced = []
    for r in rows:
        if r is pivot or r[0].is_zero_at_precision:
            if r is not pivot:
                reduced.append(r)
            continue
        factor = r[0] * pivot[0].inverse()
        reduced.append((r[0] - factor * pivot[0], r[1] - factor * pivot[1]))
    bottom = _second_column_generator(reduced) if reduced else None
    if bottom is None:
        raise DomainError("rows do not span a lattice")
    a = pivot[0].valuation()
    c = bottom.valuation()
    shift = -((a + c) // 2)
    a += shift
    c += shift
    # scale the pivot row so its first entry is exactly a uniformizer power,
    # then read off the off-diagonal digits below position c
    unit = pivot[0].shifted(-pivot[0].valuation())
    b = (pivot[1] * unit.inverse()).shifted(shift)
    if b.is_zero_at_precision or b.valuation() >= c:
        return Vertex(a, c, None, ())
    if c > b.abs_prec:
        raise PrecisionError("precision exhausted while canonicalizing a lattice")
    return Vertex(a, c, b.valuation(), b.digits_in_range(b.valuation(), c))


def apply_to_vertex(matrix, vertex: Vertex, field: LocalField) -> Vertex:
    rows = vertex.rows(field)
    moved = [
        (
            r[0] * matrix[0][0] + r[1] * matrix[1][0],
            r[0] * matrix[0][1] + r[1] * matrix[1][1],
        )
        for r in rows
    ]
    return canonical_vertex(moved, field)


def neighbors(vertex: Vertex, field: LocalField) -> list[Vertex]:
    """The q + 1 adjacent vertices: classes of the index-q sublattices."""
    r1, r2 = vertex.rows(field)
    scaled = [(r1[0].shifted(1), r1[1].shifted(1)), (r2[0].shifted(1), r2[1].shifted(1))]
    out = []
    for code in range(field.q):
        lift = field.from_int(code) if field.kind == "mixed" else field.from_residue(code)
        line = (r1[0] + lift * r2[0], r1[1] + lift * r2[1])
        out.append(canonical_vertex([line, *scaled], field))
    out.append(canonical_vertex([r2, *scaled], field))
    return out


def tree_distance(v1: Vertex, v2: Vertex, field: LocalField) -> int:
    """Distance between homothety classes via elementary-divisor valuations
    of the transition matrix (invariant under rescaling either basis)."""
    m1 = v1.rows(field)
    m2 = v2.rows(field)
    trans = fmat_mul(m1, fmat_inv(m2))
    det = trans[0][0] * trans[1][1] - trans[0][1] * trans[1][0]
    vals = [e.valuation() for row in trans for e in row if not e.is_zero_at_precision]
    if not vals:
        raise DomainError("degenerate transition matrix")
    return det.valuation() - 2 * min(vals)


def is_fixed_vertex(matrix, vertex: Vertex, field: LocalField) -> bool:
    return apply_to_vertex(matrix, vertex, field) == vertex


def _descend_to_fixed(matrix, field: LocalField) -> Vertex:
    """Walk from the standard vertex down the displacement function to a
    fixed vertex.  For an elliptic isometry each step toward the fixed set
    lowers the displacement, so a local minimum is global."""
    current = standard_vertex()
    disp = tree_distance(current, apply_to_vertex(matrix, current, field), field)
    for _ in range(_DESCENT_GUARD):
        if disp == 0:
            return current
        for nb in neighbors(current, field):
            nb_disp = tree_distance(nb, apply_to_vertex(matrix, nb, field), field)
            if nb_disp < disp:
                current, disp = nb, nb_disp
                break
        else:
            raise DomainError("displacement descent stalled; the element fixes no vertex")
    raise DomainError("displacement descent did not terminate")


def count_fixed_elliptic(matrix, field: LocalField, max_radius: int | None = None,
                         overshoot: int = 0) -> tuple[int, int]:
    """Number of fixed determinant-valuation-zero vertices of an elliptic
    element, with the breadth-first radius actually explored.

    ``overshoot`` additionally expands that many layers beyond the fixed
    set and verifies no fixed vertex hides there (a soundness re-check of
    the convexity stop; it can never change the count).
    """
    seed = _descend_to_fixed(matrix, field)
    visited = {seed}
    frontier = [seed]
    radius = 0
    while frontier:
        if max_radius is not None and radius >= max_radius:
            break
        layer = []
        for v in frontier:
            for nb in neighbors(v, field):
                if nb in visited:
                    continue
                if is_fixed_vertex(matrix, nb, field):
                    visited.add(nb)
                    layer.append(nb)
        frontier = layer
        radius += 1
    if overshoot > 0:
        shell = set(visited)
        boundary = list(visited)
        for _ in range(overshoot):
            nxt = []
            for v in boundary:
                for nb in neighbors(v, field):
                    if nb in shell:
                        continue
                    shell.add(nb)
                    nxt.append(nb)
                    if is_fixed_vertex(matrix, nb, field):
                        raise DomainError("convexity stop unsound: fixed vertex beyond an empty frontier")
            boundary = nxt
    return sum(1 for v in visited if v.is_even), radius


def count_fixed_split_window(eigenvalue: FieldElement, field: LocalField,
                             max_depth: int | None = None) -> tuple[int, int]:
    """Fixed vertices of diag(lam, 1/lam) with apartment coordinate in one
    fundamental window of the centralizer translation.

    The window is the fiber of lattices (w^0, b), (0, w^0); the translation
    by the coset generator shifts that fiber bijectively onto the next one.
    Levels are enumerated by the depth of b; fixedness at depth r forces
    fixedness at all shallower depths, so the first empty level is final.
    """
    if eigenvalue.is_zero_at_precision or eigenvalue.valuation() != 0:
        raise DomainError("the window count needs a unit eigenvalue")
    matrix = (
        (eigenvalue, field.zero()),
        (field.zero(), eigenvalue.inverse()),
    )
    count = 1 if is_fixed_vertex(matrix, standard_vertex(), field) else 0
    depth = 0
    codes = range(field.q)
    while True:
        depth += 1
        if max_depth is not None and depth > max_depth:
            depth -= 1
            break
        if depth > field.precision - 6:
            raise PrecisionError("window enumeration exhausted the precision budget")
        level = 0
        for digits in product(codes, repeat=depth):
            if digits[0] == 0:
                continue
            vertex = Vertex(0, 0, -depth, digits)
            if is_fixed_vertex(matrix, vertex, field):
                level += 1
        count += level
        if level == 0 and max_depth is None:
            break
    return count, depth


# -- regular elements and conjugacy --------------------------------------------

class RegularElement:
    """A determinant-one two-by-two matrix that is strongly regular at the
    tracked precision (nonvanishing discriminant)."""

    __slots__ = ("matrix", "field", "trace", "det", "disc")

    def __init__(self, matrix, field: LocalField):
        if len(matrix) != 2 or any(len(row) != 2 for row in matrix):
            raise DomainError("regular elements are two-by-two matrices")
        self.matrix = tuple(tuple(row) for row in matrix)
        self.field = field
        m = self.matrix
        self.det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        if not (self.det - field.one()).is_zero_at_precision:
            raise DomainError("determinant is not 1 at precision")
        self.trace = m[0][0] + m[1][1]
        self.disc = self.trace * self.trace - field.from_int(4)
        if self.disc.is_zero_at_precision:
            raise DomainError("not strongly regular at this precision")

    @property
    def centralizer_kind(self) -> str:
        return classify_centralizer(self)

    def conjugated_by_diag_uniformizer(self) -> "RegularElement":
        m = self.matrix
        moved = (
            (m[0][0], m[0][1].shifted(1)),
            (m[1][0].shifted(-1), m[1][1]),
        )
        return RegularElement(moved, self.field)

    def to_json(self) -> dict:
        return {"matrix": [[e.to_json() for e in row] for row in self.matrix]}


def match_element(gamma: QuadExtElement, field: LocalField) -> RegularElement:
    """The regular-representation matrix of a norm-one element of the
    quadratic extension on the integral basis {1, sqrt(u)}."""
    if not (gamma.norm() - field.one()).is_zero_at_precision:
        raise DomainError("norm != 1 at precision")
    if gamma.is_central_unit_at_precision():
        raise DomainError("not strongly G-regular: the element is central at precision")
    a, b = gamma.a, gamma.b
    matrix = (
        (a, field.u * b),
        (b, a),
    )
    return RegularElement(matrix, field)


def classify_centralizer(g: RegularElement) -> str:
    """split / unramified_elliptic / ramified_elliptic by the square class
    of the discriminant."""
    disc = g.disc
    v = disc.valuation()
    if v % 2:
        return "ramified_elliptic"
    return "split" if is_square_unit(disc.shifted(-v), g.field) else "unramified_elliptic"


def are_stably_conjugate(g1: RegularElement, g2: RegularElement) -> bool:
    """Equality of characteristic polynomials at the working precision."""
    return (g1.trace - g2.trace).is_zero_at_precision


def _intertwiner_determinant(g1: RegularElement, g2: RegularElement) -> FieldElement:
    """Determinant of an invertible solution of g1 h = h g2; its square
    class against the discriminant decides rational conjugacy."""
    field = g1.field
    zero = field.zero()
    a, b = g1.matrix, g2.matrix
    rows = []
    for i in range(2):
        for j in range(2):
            coeff = [zero, zero, zero, zero]
            for k in range(2):
                coeff[2 * k + j] = coeff[2 * k + j] + a[i][k]
                coeff[2 * i + k] = coeff[2 * i + k] - b[k][j]
            rows.append(tuple(coeff))
    basis = fmat_nullspace(rows)
    if not basis:
        raise DomainError("elements are not conjugate over any extension")
    candidates = list(basis)
    if len(basis) >= 2:
        h1, h2 = basis[0], basis[1]
        two = field.from_int(2)
        candidates.append(tuple(x + y for x, y in zip(h1, h2)))
        candidates.append(tuple(x - y for x, y in zip(h1, h2)))
        candidates.append(tuple(x + two * y for x, y in zip(h1, h2)))
    for h in candidates:
        det = h[0] * h[3] - h[1] * h[2]
        if not det.is_zero_at_precision:
            return det
    raise PrecisionError("no invertible intertwiner found at this precision")


def are_conjugate(g1: RegularElement, g2: RegularElement, field: LocalField | None = None) -> bool:
    """Rational conjugacy inside the determinant-one group: stably
    conjugate with an intertwiner determinant that is a norm from the
    centralizer algebra."""
    if not are_stably_conjugate(g1, g2):
        return False
    if classify_centralizer(g1) == "split":
        return True
    det = _intertwiner_determinant(g1, g2)
    return hilbert_symbol(det, g1.disc, g1.field) == 1


# -- eigenvalues and the normalization depth -----------------------------------

def _eigenvalue(g: RegularElement):
    """An eigenvalue of g: a field element (split) or an element of the
    unramified quadratic extension (unramified elliptic)."""
    field = g.field
    half = field.from_int(2).inverse()
    kind = classify_centralizer(g)
    if kind == "split":
        root = sqrt_unit(g.disc, field)
        return (g.trace + root) * half, kind
    if kind == "unramified_elliptic":
        v = g.disc.valuation()
        ratio = g.disc.shifted(-v) * field.u.inverse()
        s0 = sqrt_unit(ratio, field)  # sqrt(disc) = w^(v/2) * s0 * sqrt(u)
        lam = QuadExtElement(g.trace * half, s0.shifted(v // 2) * half)
        return lam, kind
    raise DomainError("ramified classes have no eigenvalue in the unramified extension")


def root_value_depth(g: RegularElement) -> int:
    """Valuation of alpha(g) - 1, where alpha(g) is the ratio of the two
    eigenvalues (computed in the extension that contains them)."""
    lam, kind = _eigenvalue(g)
    if kind == "split":
        alpha = lam * lam  # the other eigenvalue is 1/lam since det = 1
        return (alpha - g.field.one()).valuation()
    alpha = lam * lam
    one = QuadExtElement(g.field.one(), g.field.zero())
    return (alpha - one).valuation()


# -- stable classes, kappa signs, and the orbital sums --------------------------

def stable_class_reps(g0: RegularElement) -> list[tuple[RegularElement, int]]:
    """Representatives of the rational classes inside the stable class,
    paired with their kappa signs.

    Split classes are singletons.  Unramified elliptic classes split in
    two, distinguished by the parity of the intertwiner valuation against
    the regular-representation matrix of the eigenvalue.  The sign
    convention pins the normalized kappa sum to the matching stable sum:
    the regular-representation class carries +1 when the depth d is even
    and -1 when d is odd (swapping the base point as the depth moves
    through a non-norm; validated end to end by the identity checks).
    """
    kind = classify_centralizer(g0)
    if kind == "ramified_elliptic":
        raise DomainError("no unramified endoscopic matching for a ramified class")
    if kind == "split":
        return [(g0, 1)]
    field = g0.field
    d = root_value_depth(g0)
    lam, _ = _eigenvalue(g0)
    base = RegularElement(((lam.a, field.u * lam.b), (lam.b, lam.a)), field)
    in_base_class = are_conjugate(g0, base)
    kappa0 = 1 if (d % 2 == 0) == in_base_class else -1
    return [(g0, kappa0), (g0.conjugated_by_diag_uniformizer(), -kappa0)]


@dataclass(frozen=True)
class ClassCount:
    element: RegularElement
    kappa: int
    fixed_count: int
    search_radius: int

    def to_json(self) -> dict:
        return {
            "matrix": self.element.to_json()["matrix"],
            "kappa": self.kappa,
            "fixed_count": self.fixed_count,
            "search_radius": self.search_radius,
        }


@dataclass(frozen=True)
class OrbitalReport:
    classes: tuple[ClassCount, ...]
    d: int
    value: ExactQ

    def to_json(self) -> dict:
        return {
            "classes": [c.to_json() for c in self.classes],
            "d": self.d,
            "value": self.value.to_json(),
        }


def _is_noncompact(g: RegularElement) -> bool:
    # det 1 with non-integral trace forces a non-unit eigenvalue
    return not g.trace.is_zero_at_precision and g.trace.valuation() < 0


def fixed_vertex_count(g: RegularElement, max_radius: int | None = None) -> int:
    """Fixed vertices of one element: the exact count for elliptic classes,
    the one-window count for split classes."""
    field = g.field
    if _is_noncompact(g):
        return 0
    if classify_centralizer(g) == "split":
        lam, _ = _eigenvalue(g)
        return count_fixed_split_window(lam, field, max_depth=max_radius)[0]
    return count_fixed_elliptic(g.matrix, field, max_radius=max_radius)[0]


def kappa_orbital(g0: RegularElement, trivial_kappa: bool = False,
                  max_radius: int | None = None) -> OrbitalReport:
    """The normalized signed sum of fixed-vertex counts over the stable
    class of g0, at measure normalization giving both compact groups
    volume one.  With ``trivial_kappa`` all signs are suppressed, which
    yields the stable sum on the ambient group."""
    field = g0.field
    kind = classify_centralizer(g0)
    if kind == "ramified_elliptic":
        raise DomainError("no unramified endoscopic matching for a ramified class")
    d = root_value_depth(g0)
    if kind == "split":
        if _is_noncompact(g0):
            classes = (ClassCount(g0, 1, 0, 0),)
        else:
            lam, _ = _eigenvalue(g0)
            count, depth = count_fixed_split_window(lam, field, max_depth=max_radius)
            classes = (ClassCount(g0, 1, count, depth),)
    else:
        reps = stable_class_reps(g0)
        if trivial_kappa:
            reps = [(rep, 1) for rep, _ in reps]
        counted = []
        for rep, sign in reps:
            if _is_noncompact(rep):
                counted.append(ClassCount(rep, sign, 0, 0))
                continue
            count, radius = count_fixed_elliptic(rep.matrix, field, max_radius=max_radius)
            counted.append(ClassCount(rep, sign, count, radius))
        classes = tuple(counted)
    signed = sum(c.kappa * c.fixed_count for c in classes)
    value = ExactQ(field.q, Fraction(signed), -2 * d)
    return OrbitalReport(classes=classes, d=d, value=value)


def stable_orbital_H(gamma, h_kind: str, field: LocalField) -> ExactQ:
    """The matching stable sum on the torus side: both supported groups
    are tori, so the sum degenerates to the characteristic function of
    the maximal compact subgroup."""
    kind = h_kind.strip().lower()
    if kind in ("ue1", "u_e(1)", "ue(1)"):
        if not isinstance(gamma, QuadExtElement):
            raise DomainError("the one-dimensional unitary torus takes extension elements")
        if not (gamma.norm() - field.one()).is_zero_at_precision:
            raise DomainError("norm != 1 at precision")
        return ExactQ(field.q, Fraction(1 if gamma.valuation() == 0 else 0))
    if kind in ("gm", "g_m"):
        if isinstance(gamma, QuadExtElement):
            raise DomainError("the multiplicative torus takes base-field elements")
        if gamma.is_zero_at_precision:
            raise PrecisionError("zero at precision is not a torus element")
        return ExactQ(field.q, Fraction(1 if gamma.valuation() == 0 else 0))
    raise DomainError(f"unsupported endoscopic kind {h_kind!r}")


@dataclass(frozen=True)
class FlResult:
    lhs: OrbitalReport
    rhs: ExactQ
    equal: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(), "equal": self.equal}


def _coerce_gamma(gamma, h_kind: str):
    """Collapse an extension element with vanishing extension part to its
    base-field component for the split and trivial comparisons."""
    kind = h_kind.strip().lower()
    if kind != "g" and not kind.startswith("u"):
        if isinstance(gamma, QuadExtElement):
            if not gamma.b.is_zero_at_precision:
                raise DomainError("the multiplicative torus takes base-field elements")
            gamma = gamma.a
    return gamma


def _matched_regular(gamma, field: LocalField) -> RegularElement:
    if isinstance(gamma, QuadExtElement):
        if gamma.b.is_zero_at_precision:
            gamma = gamma.a
        else:
            return match_element(gamma, field)
    if gamma.is_zero_at_precision:
        raise PrecisionError("zero at precision is not a group element")
    one = field.one()
    if (gamma - one).is_zero_at_precision or (gamma + one).is_zero_at_precision:
        raise DomainError("not strongly G-regular: the element is central at precision")
    matrix = ((gamma, field.zero()), (field.zero(), gamma.inverse()))
    return RegularElement(matrix, field)


def fl_check(gamma, h_kind: str, field: LocalField,
             max_radius: int | None = None) -> FlResult:
    """Compute both sides of the matching identity and compare exactly.

    ``h_kind`` is UE1 (elliptic torus; gamma is a norm-one extension
    element), Gm (split torus; gamma is a base-field element), or G
    (the trivial comparison of the group with itself, with all signs
    suppressed)."""
    kind = h_kind.strip().lower()
    gamma = _coerce_gamma(gamma, h_kind)
    if kind == "g":
        g0 = _matched_regular(gamma, field)
        lhs = kappa_orbital(g0, trivial_kappa=True, max_radius=max_radius)
        return FlResult(lhs=lhs, rhs=lhs.value, equal=True)
    g0 = _matched_regular(gamma, field)
    lhs = kappa_orbital(g0, max_radius=max_radius)
    rhs = stable_orbital_H(gamma, h_kind, field)
    return FlResult(lhs=lhs, rhs=rhs, equal=lhs.value == rhs)

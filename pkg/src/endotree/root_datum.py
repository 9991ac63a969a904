"""Root data for rank <= 4 unramified groups and their Weyl groups.

The character and cocharacter lattices are both identified with the
standard integer lattice Z^rank, and the pairing between them is the dot
product.  A finite-order integer matrix ``twist`` acts on the character
side; the induced action on the cocharacter side is its inverse
transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import linalg
from .errors import DomainError
from .linalg import Mat, Vec

TWIST_ORDER_BOUND = 24
WEYL_BOUND = 10_000


@dataclass(frozen=True)
class RootDatum:
    rank: int
    roots: tuple[Vec, ...]
    coroots: tuple[Vec, ...]
    twist: Mat
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(tuple(map(int, v)) for v in self.roots))
        object.__setattr__(self, "coroots", tuple(tuple(map(int, v)) for v in self.coroots))
        object.__setattr__(self, "twist", tuple(tuple(map(int, row)) for row in self.twist))

    @property
    def aligned_pairs(self) -> tuple[tuple[Vec, Vec], ...]:
        return tuple(zip(self.roots, self.coroots))

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "roots": [list(v) for v in self.roots],
            "coroots": [list(v) for v in self.coroots],
            "twist": [list(row) for row in self.twist],
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RootDatum":
        try:
            return cls(
                rank=int(data["rank"]),
                roots=tuple(tuple(v) for v in data["roots"]),
                coroots=tuple(tuple(v) for v in data["coroots"]),
                twist=tuple(tuple(row) for row in data["twist"]),
                name=data.get("name"),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed root-datum document: {exc}") from exc


@dataclass(frozen=True)
class WeylGroup:
    elements: tuple[Mat, ...]
    generators: tuple[int, ...]  # indices into `elements` of the simple reflections

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, m) -> bool:
        return tuple(map(tuple, m)) in set(self.elements)


def reflection(root: Vec, coroot: Vec) -> Mat:
    """Matrix of x -> x - <x, coroot> root on the character lattice."""
    n = len(root)
    return tuple(
        tuple(int(i == j) - root[i] * coroot[j] for j in range(n)) for i in range(n)
    )


def coreflection(root: Vec, coroot: Vec) -> Mat:
    """The dual reflection y -> y - <root, y> coroot on cocharacters."""
    n = len(root)
    return tuple(
        tuple(int(i == j) - coroot[i] * root[j] for j in range(n)) for i in range(n)
    )


def validate_root_datum(candidate: RootDatum, twist_order_bound: int = TWIST_ORDER_BOUND) -> list[str]:
    """Every violated invariant, each naming the offending vector or matrix.

    Violations are data, not errors: an empty list means the datum is valid.
    """
    d = candidate
    issues: list[str] = []
    if d.rank < 0:
        return [f"rank {d.rank} is negative"]
    if len(d.roots) != len(d.coroots):
        return [f"{len(d.roots)} roots but {len(d.coroots)} coroots"]
    for v in d.roots + d.coroots:
        if len(v) != d.rank:
            issues.append(f"vector {v} does not have length {d.rank}")
    if len(d.twist) != d.rank or any(len(row) != d.rank for row in d.twist):
        issues.append(f"twist {d.twist} is not {d.rank}x{d.rank}")
    if issues:
        return issues

    root_set = set(d.roots)
    if len(root_set) != len(d.roots):
        issues.append("duplicate root vectors present")
    for alpha in d.roots:
        if linalg.vec_neg(alpha) not in root_set:
            issues.append(f"root {alpha} has no negative in the root set")

    for alpha, covec in d.aligned_pairs:
        if linalg.vec_dot(alpha, covec) != 2:
            issues.append(f"pairing of aligned pair ({alpha}, {covec}) != 2")

    coroot_set = set(d.coroots)
    for alpha, covec in d.aligned_pairs:
        s = reflection(alpha, covec)
        if {linalg.mat_vec(s, beta) for beta in d.roots} != root_set:
            issues.append(f"reflection for root {alpha} does not permute the roots")
        sv = coreflection(alpha, covec)
        if {linalg.mat_vec(sv, beta) for beta in d.coroots} != coroot_set:
            issues.append(f"coreflection for coroot {covec} does not permute the coroots")

    if linalg.mat_det(d.twist) ** 2 != 1:
        issues.append(f"twist {d.twist} is not unimodular")
        return issues
    if linalg.mat_order(d.twist, twist_order_bound) is None:
        issues.append(f"twist {d.twist} has order exceeding {twist_order_bound}")
        return issues

    if {linalg.mat_vec(d.twist, alpha) for alpha in d.roots} != root_set:
        issues.append("twist does not permute the roots")
    twist_co = linalg.inverse_transpose(d.twist)
    if {linalg.mat_vec(twist_co, covec) for covec in d.coroots} != coroot_set:
        issues.append("inverse-transpose of twist does not permute the coroots")
    if issues:
        return issues

    try:
        delta = simple_system(d)
    except DomainError as exc:
        return issues + [str(exc)]
    if {linalg.mat_vec(d.twist, alpha) for alpha in delta} != set(delta):
        issues.append("twist does not map the canonical simple system to itself")
    return issues


def _height_weights(rank: int) -> Vec:
    # fixed generic functional: lexicographically decreasing powers of two
    return tuple(2 ** (rank - 1 - i) for i in range(rank))


@lru_cache(maxsize=None)
def simple_system(datum: RootDatum) -> tuple[Vec, ...]:
    """The base cut out by the fixed positivity functional, in root order.

    Raises DomainError when the roots fail to decompose integrally with a
    single sign over the base (i.e. are not a crystallographic system).
    """
    if not datum.roots:
        return ()
    weights = _height_weights(datum.rank)
    heights = {alpha: linalg.vec_dot(weights, alpha) for alpha in datum.roots}
    if any(h == 0 for h in heights.values()):
        raise DomainError("positivity functional vanishes on a root")
    positive = [alpha for alpha in datum.roots if heights[alpha] > 0]
    pos_set = set(positive)
    simple = []
    for alpha in positive:
        decomposable = any(
            tuple(a - b for a, b in zip(alpha, beta)) in pos_set
            for beta in positive
            if beta != alpha and heights[beta] < heights[alpha]
        )
        if not decomposable:
            simple.append(alpha)
    base = tuple(sorted(simple, key=datum.roots.index))
    matrix = linalg.transpose(base)  # columns are simple roots
    for alpha in datum.roots:
        coeffs = linalg.frac_solve(matrix, alpha)
        if coeffs is None or any(c.denominator != 1 for c in coeffs):
            raise DomainError(f"root {alpha} does not decompose integrally over the base")
        if not (all(c >= 0 for c in coeffs) or all(c <= 0 for c in coeffs)):
            raise DomainError(f"root {alpha} decomposes with mixed signs over the base")
    return base


@lru_cache(maxsize=None)
def weyl_group(datum: RootDatum, bound: int = WEYL_BOUND) -> WeylGroup:
    """Closure of the simple reflections, breadth-first from the identity
    with a lexicographic tie-break inside each layer."""
    base = simple_system(datum)
    pair_of = dict(zip(datum.roots, datum.coroots))
    gens = [reflection(alpha, pair_of[alpha]) for alpha in base]
    eye = linalg.identity(datum.rank)
    elements = [eye]
    seen = {eye}
    frontier = [eye]
    while frontier:
        layer = set()
        for w in frontier:
            for g in gens:
                nxt = linalg.mat_mul(g, w)
                if nxt not in seen:
                    layer.add(nxt)
        frontier = sorted(layer)
        for w in frontier:
            seen.add(w)
            elements.append(w)
        if len(elements) > bound:
            raise DomainError(f"Weyl group exceeds the bound {bound}")
    gen_indices = tuple(elements.index(g) for g in gens)
    return WeylGroup(elements=tuple(elements), generators=gen_indices)


def dual_datum(datum: RootDatum) -> RootDatum:
    """Swap roots with coroots and twist the dual side; involutive."""
    return RootDatum(
        rank=datum.rank,
        roots=datum.coroots,
        coroots=datum.roots,
        twist=linalg.inverse_transpose(datum.twist),
        name=f"dual({datum.name})" if datum.name else None,
    )


def builtin_datum(family: str, n: int | None = None) -> RootDatum:
    """Built-in data: SL2, PGL2, GL(n), and the quasi-split unitary U(n)."""
    key = family.strip().lower()
    if key == "sl2":
        return RootDatum(1, ((2,), (-2,)), ((1,), (-1,)), ((1,),), name="SL2")
    if key == "pgl2":
        return RootDatum(1, ((1,), (-1,)), ((2,), (-2,)), ((1,),), name="PGL2")
    if key in ("gl", "gln"):
        if n is None or n < 1:
            raise DomainError("GL(n) requires n >= 1")
        roots = _gl_roots(n)
        return RootDatum(n, roots, roots, linalg.identity(n), name=f"GL{n}")
    if key in ("u", "un"):
        if n is None or n < 1:
            raise DomainError("U(n) requires n >= 1")
        roots = _gl_roots(n)
        twist = tuple(
            tuple(-1 if j == n - 1 - i else 0 for j in range(n)) for i in range(n)
        )
        return RootDatum(n, roots, roots, twist, name=f"U{n}")
    raise DomainError(f"unknown family {family!r}")


def _gl_roots(n: int) -> tuple[Vec, ...]:
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                out.append(tuple(int(k == i) - int(k == j) for k in range(n)))
    return tuple(out)


def datum_by_name(name: str) -> RootDatum:
    """Resolve compact names like ``sl2``, ``pgl2``, ``gl3``, ``u2``."""
    key = name.strip().lower()
    if key == "sl2":
        return builtin_datum("SL2")
    if key == "pgl2":
        return builtin_datum("PGL2")
    for prefix, family in (("gl", "GL"), ("u", "U")):
        if key.startswith(prefix) and key[len(prefix):].isdigit():
            return builtin_datum(family, int(key[len(prefix):]))
    raise DomainError(f"unknown datum name {name!r}")

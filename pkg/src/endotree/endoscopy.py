"""Unramified endoscopic data: construction, testing, and enumeration.

A candidate is a pair (s, w): a finite-order character of the cocharacter
lattice together with a Weyl element.  The derived group datum keeps the
coroots killed by s and twists by w composed with the ambient twist.
Torsion characters are stored as vectors of rationals in [0, 1); the
character they encode sends a cocharacter ``v`` to ``exp(2*pi*i*(values . v))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from . import linalg
from .errors import DomainError
from .linalg import Mat, Vec
from .root_datum import RootDatum, reflection, simple_system, validate_root_datum, weyl_group

ORDER_BOUND_DEFAULT = 4
MAX_TORSION_ORDER = 64
MAX_ENUM_RANK = 4


@dataclass(frozen=True)
class TorsionCharacter:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        norm = tuple(Fraction(v) % 1 for v in self.values)
        if any(v.denominator > MAX_TORSION_ORDER for v in norm):
            raise DomainError(f"character order exceeds the bound {MAX_TORSION_ORDER}")
        object.__setattr__(self, "values", norm)

    @property
    def rank(self) -> int:
        return len(self.values)

    @property
    def order(self) -> int:
        return lcm(1, *(v.denominator for v in self.values))

    def rotation(self, vec) -> Fraction:
        """values . vec mod 1; the character value is exp(2*pi*i * rotation)."""
        return sum((v * x for v, x in zip(self.values, vec, strict=True)), Fraction(0)) % 1

    def is_one_on(self, vec) -> bool:
        return self.rotation(vec) == 0

    @classmethod
    def from_strings(cls, parts) -> "TorsionCharacter":
        try:
            return cls(tuple(Fraction(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"malformed character entry: {exc}") from exc

    def to_strings(self) -> list[str]:
        return [f"{v.numerator}/{v.denominator}" for v in self.values]


@dataclass(frozen=True)
class EndoscopicDatum:
    s: TorsionCharacter
    w: Mat
    roots_H: tuple[Vec, ...]
    coroots_H: tuple[Vec, ...]
    twist_H: Mat
    datum_H: RootDatum


def coroot_kernel(s: TorsionCharacter, datum: RootDatum) -> tuple[Vec, ...]:
    """The coroots on which s evaluates to 1, in coroot order."""
    if s.rank != datum.rank:
        raise DomainError(f"character rank {s.rank} != datum rank {datum.rank}")
    return tuple(cv for cv in datum.coroots if s.is_one_on(cv))


def _twist_fixes_character(twist_h: Mat, s: TorsionCharacter) -> bool:
    # invariance of s under the twisted action amounts to
    # twist_h . values = values  (mod 1) on the character side
    moved = linalg.mat_vec(twist_h, s.values)
    return all((m - v) % 1 == 0 for m, v in zip(moved, s.values))


def _sub_datum(datum: RootDatum, s: TorsionCharacter, twist_h: Mat) -> RootDatum:
    kept = [i for i, cv in enumerate(datum.coroots) if s.is_one_on(cv)]
    return RootDatum(
        rank=datum.rank,
        roots=tuple(datum.roots[i] for i in kept),
        coroots=tuple(datum.coroots[i] for i in kept),
        twist=twist_h,
    )


def _fixes_some_simple_system(datum_h: RootDatum) -> bool:
    """True when the twist maps some base of the sub-root-system to itself.

    All bases are Weyl translates of the canonical one, so the canonical
    base is tried first and the translates after it.
    """
    if not datum_h.roots:
        return True
    try:
        delta = simple_system(datum_h)
    except DomainError:
        return False
    twist = datum_h.twist
    canonical = set(delta)
    if {linalg.mat_vec(twist, a) for a in canonical} == canonical:
        return True
    for w in weyl_group(datum_h).elements:
        moved = {linalg.mat_vec(w, a) for a in canonical}
        if {linalg.mat_vec(twist, a) for a in moved} == moved:
            return True
    return False


def check_endoscopic(s: TorsionCharacter, w: Mat, datum: RootDatum) -> EndoscopicDatum | str:
    """Build the derived datum for (s, w), or return the first failed
    condition as a rejection reason string."""
    group = weyl_group(datum)
    w = tuple(tuple(map(int, row)) for row in w)
    if w not in group:
        raise DomainError(f"{w} is not a Weyl element of the datum")
    twist_h = linalg.mat_mul(w, datum.twist)
    if not _twist_fixes_character(twist_h, s):
        return "sigma_H does not fix s"
    datum_h = _sub_datum(datum, s, twist_h)
    if not _fixes_some_simple_system(datum_h):
        return "sigma_H fixes no simple system"
    issues = validate_root_datum(datum_h)
    if issues:
        return f"derived datum invalid: {issues[0]}"
    return EndoscopicDatum(
        s=s,
        w=w,
        roots_H=datum_h.roots,
        coroots_H=datum_h.coroots,
        twist_H=twist_h,
        datum_H=datum_h,
    )


def _iso_key(e: EndoscopicDatum):
    """Canonical form of the derived datum under the finite search family
    of lattice automorphisms (signed permutations; these fix the dot-product
    pairing, so roots and coroots transform by the same matrix)."""
    best = None
    for g in linalg.signed_permutations(e.datum_H.rank):
        pairs = tuple(sorted(
            (linalg.mat_vec(g, r), linalg.mat_vec(g, c))
            for r, c in zip(e.roots_H, e.coroots_H)
        ))
        twist = linalg.mat_mul(linalg.mat_mul(g, e.twist_H), linalg.transpose(g))
        key = (pairs, twist)
        if best is None or key < best:
            best = key
    return best


def _character_grid(rank: int, order_bound: int):
    steps = [Fraction(k, order_bound) for k in range(order_bound)]
    for values in product(steps, repeat=rank):
        yield TorsionCharacter(values)


def enumerate_endoscopic(datum: RootDatum, order_bound: int = ORDER_BOUND_DEFAULT) -> list[EndoscopicDatum]:
    """All classes of (s, w) data with s of order dividing `order_bound`,
    deduplicated by isomorphism of the derived datum.

    The output is deterministic: classes are sorted by descending root count
    and then by twist; the representative of each class is the first valid
    candidate in (s, w) grid order.
    """
    if datum.rank > MAX_ENUM_RANK:
        raise DomainError(f"enumeration is limited to rank <= {MAX_ENUM_RANK}")
    if order_bound < 1:
        raise DomainError("order bound must be positive")
    group = weyl_group(datum)
    classes: dict[object, EndoscopicDatum] = {}
    for s in _character_grid(datum.rank, order_bound):
        for w in group.elements:
            result = check_endoscopic(s, w, datum)
            if isinstance(result, str):
                continue
            key = _iso_key(result)
            if key not in classes:
                classes[key] = result
    return sorted(
        classes.values(),
        key=lambda e: (-len(e.roots_H), e.twist_H, _iso_key(e)),
    )


def is_elliptic(e: EndoscopicDatum, datum: RootDatum) -> bool:
    """Whether the span of the ambient roots has no vector fixed by both
    the derived Weyl group and the derived twist."""
    span_idx = linalg.independent_columns(datum.roots)
    if not span_idx:
        return True
    basis = linalg.transpose([datum.roots[i] for i in span_idx])  # columns span the roots
    generators = [reflection(r, c) for r, c in zip(e.roots_H, e.coroots_H)]
    generators.append(e.twist_H)
    stacked = []
    for g in generators:
        gb = linalg.mat_mul(g, basis)
        stacked.extend(
            tuple(gb[i][j] - basis[i][j] for j in range(len(span_idx)))
            for i in range(datum.rank)
        )
    return not linalg.frac_nullspace(stacked)


def describe_class(e: EndoscopicDatum) -> str | None:
    """Conventional label for the rank-one classics, else None."""
    if e.datum_H.rank != 1:
        return None
    roots = set(e.roots_H)
    if roots == {(2,), (-2,)}:
        return "SL2"
    if roots == {(1,), (-1,)}:
        return "PGL2"
    if not roots:
        return "UE1" if e.twist_H == ((-1,),) else "Gm"
    return None


def unitary_elliptic(n: int) -> list[tuple[tuple[int, int], TorsionCharacter]]:
    """Elliptic classes of the quasi-split U(n) as unordered partitions
    n = n1 + n2, with the sign pattern of a representative character.

    The enumeration route is cross-checked internally against a direct
    sweep of all order-two characters; a mismatch raises.
    """
    if not 1 <= n <= 4:
        raise DomainError("unitary enumeration supports 1 <= n <= 4")
    from .root_datum import builtin_datum

    datum = builtin_datum("U", n)
    results = []
    for e in enumerate_endoscopic(datum, order_bound=2):
        if not is_elliptic(e, datum):
            continue
        if any(v not in (Fraction(0), Fraction(1, 2)) for v in e.s.values):
            raise DomainError(f"elliptic class with unexpected character {e.s.values}")
        ones = sum(1 for v in e.s.values if v == 0)
        partition = tuple(sorted((ones, n - ones), reverse=True))
        results.append((partition, e.s))

    # independent sweep: no deduplication, partitions read off each raw pair
    sweep = set()
    group = weyl_group(datum)
    for s in _character_grid(n, 2):
        for w in group.elements:
            result = check_endoscopic(s, w, datum)
            if isinstance(result, str) or not is_elliptic(result, datum):
                continue
            ones = sum(1 for v in s.values if v == 0)
            sweep.add(tuple(sorted((ones, n - ones), reverse=True)))
    if {p for p, _ in results} != sweep:
        raise DomainError(
            f"enumeration partitions {sorted(p for p, _ in results)} disagree with sweep {sorted(sweep)}"
        )
    return sorted(results, reverse=True)

"""Lattices with finite group action, their H^1, and induced characters.

H^1 is presented through the norm map: the numerator is the integer
kernel of u -> sum over the group of tau(u), the denominator is the span
of tau(v) - v over group elements tau and basis vectors v, and the
quotient is put into invariant-factor form by integer normal-form
reduction.  Enough change-of-basis data is kept to map any norm-zero
vector to its coordinates in that presentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import DomainError
from .linalg import Mat, Vec
from .root_datum import RootDatum, weyl_group

GROUP_BOUND = 48


@dataclass(frozen=True)
class GaloisLattice:
    rank: int
    generators: tuple[Mat, ...]
    group_elements: tuple[Mat, ...] = field(default=(), compare=False)

    def __post_init__(self):
        gens = tuple(tuple(tuple(map(int, row)) for row in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if len(g) != self.rank or any(len(row) != self.rank for row in g):
                raise DomainError(f"generator {g} is not {self.rank}x{self.rank}")
            if linalg.mat_det(g) ** 2 != 1:
                raise DomainError(f"generator {g} is not invertible over the integers")
        if not self.group_elements:
            object.__setattr__(self, "group_elements", _closure(gens, self.rank))

    def to_dict(self) -> dict:
        return {"rank": self.rank, "generators": [[list(r) for r in g] for g in self.generators]}

    @classmethod
    def from_dict(cls, data: dict) -> "GaloisLattice":
        try:
            return cls(rank=int(data["rank"]),
                       generators=tuple(tuple(tuple(r) for r in g) for g in data["generators"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed lattice document: {exc}") from exc


def _closure(generators, rank: int, bound: int = GROUP_BOUND) -> tuple[Mat, ...]:
    eye = linalg.identity(rank)
    seen = {eye}
    order = [eye]
    frontier = [eye]
    while frontier:
        layer = []
        for m in frontier:
            for g in generators:
                nxt = linalg.mat_mul(g, m)
                if nxt not in seen:
                    seen.add(nxt)
                    layer.append(nxt)
        layer.sort()
        order.extend(layer)
        frontier = layer
        if len(order) > bound:
            raise DomainError(f"group closure exceeds the bound {bound}")
    return tuple(order)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]
    generator_reps: tuple[Vec, ...]
    kernel_basis: tuple[Vec, ...] = field(compare=False)
    row_transform: Mat = field(compare=False)      # S of the normal form, on kernel coordinates
    factor_indices: tuple[int, ...] = field(compare=False)
    all_factors: tuple[int, ...] = field(compare=False)

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def to_dict(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "generators": [list(v) for v in self.generator_reps],
        }


def norm_matrix(lattice: GaloisLattice) -> Mat:
    n = lattice.rank
    return tuple(
        tuple(sum(g[i][j] for g in lattice.group_elements) for j in range(n))
        for i in range(n)
    )


def boundary_generators(lattice: GaloisLattice) -> list[Vec]:
    """tau(v) - v over all group elements tau and basis vectors v; these
    span the same sublattice as the differences over arbitrary v."""
    n = lattice.rank
    out = []
    for g in lattice.group_elements:
        for j in range(n):
            vec = tuple(g[i][j] - int(i == j) for i in range(n))
            if any(vec):
                out.append(vec)
    return out


def h1(lattice: GaloisLattice) -> FiniteAbelianGroup:
    """Invariant-factor presentation of (norm kernel) / (boundary span)."""
    n = lattice.rank
    kernel = linalg.integer_kernel_basis(norm_matrix(lattice))
    r = len(kernel)
    if r == 0:
        return FiniteAbelianGroup((), (), (), (), (), ())
    kernel_cols = linalg.transpose(kernel)  # n x r, columns form the kernel basis
    coords = []
    for b in boundary_generators(lattice):
        x = linalg.frac_solve(kernel_cols, b)
        if x is None or any(c.denominator != 1 for c in x):
            raise DomainError(f"boundary vector {b} is not in the norm kernel")
        coords.append(tuple(int(c) for c in x))
    if not coords:
        raise DomainError("boundary span is trivial while the norm kernel is not; quotient is infinite")
    relation = linalg.transpose(coords)  # r x m, columns are boundary vectors in kernel coordinates
    d, s, _ = linalg.smith_normal_form(relation)
    ncols = len(d[0]) if d else 0
    diag = [d[i][i] if i < ncols else 0 for i in range(r)]
    if any(x == 0 for x in diag):
        raise DomainError("quotient is infinite; the group action does not give a finite H^1")
    s_inv = linalg.mat_inverse_unimodular(s)
    factor_indices = tuple(i for i, x in enumerate(diag) if x >= 2)
    reps = tuple(
        tuple(linalg.mat_vec(kernel_cols, tuple(s_inv[i][j] for i in range(r))))
        for j in factor_indices
    )
    return FiniteAbelianGroup(
        invariant_factors=tuple(diag[i] for i in factor_indices),
        generator_reps=reps,
        kernel_basis=tuple(kernel),
        row_transform=s,
        factor_indices=factor_indices,
        all_factors=tuple(diag),
    )


def class_of(u, lattice: GaloisLattice, group: FiniteAbelianGroup) -> tuple[int, ...]:
    """Coordinates of the class of a norm-zero vector, one entry per
    invariant factor."""
    u = tuple(map(int, u))
    if linalg.mat_vec(norm_matrix(lattice), u) != tuple([0] * lattice.rank):
        raise DomainError(f"{u} is not norm-zero")
    if not group.invariant_factors:
        return ()
    kernel_cols = linalg.transpose(group.kernel_basis)
    x = linalg.frac_solve(kernel_cols, u)
    if x is None or any(c.denominator != 1 for c in x):
        raise DomainError(f"{u} is not in the norm-kernel lattice")
    y = linalg.mat_vec(group.row_transform, tuple(int(c) for c in x))
    return tuple(
        y[i] % group.all_factors[i] for i in group.factor_indices
    )


@dataclass(frozen=True)
class KappaEntry:
    generator: Vec
    order: int
    rotation: Fraction  # the character value is exp(2*pi*i * rotation)

    @property
    def is_trivial(self) -> bool:
        return self.rotation == 0


def kappa_character(s, lattice: GaloisLattice) -> tuple[KappaEntry, ...]:
    """The character induced on H^1 by a torsion character of the lattice.

    The character must vanish on every boundary vector; this is checked,
    and a violation reports the mismatch rather than assuming it away.
    """
    if len(s.values) != lattice.rank:
        raise DomainError(f"character rank {len(s.values)} != lattice rank {lattice.rank}")
    for b in boundary_generators(lattice):
        if not s.is_one_on(b):
            raise DomainError("s not sigma_H-invariant on boundaries")
    group = h1(lattice)
    return tuple(
        KappaEntry(generator=rep, order=order, rotation=s.rotation(rep))
        for rep, order in zip(group.generator_reps, group.invariant_factors)
    )


def embeds_as_cartan(theta, datum: RootDatum, search_automorphisms: bool = False) -> bool:
    """Whether a finite-order lattice automorphism lands in the Weyl coset
    over the ambient twist (the unramified embedding criterion under the
    identity identification of the two lattices).

    With ``search_automorphisms`` the test is repeated across signed
    permutation conjugates of theta (rank <= 3 only).
    """
    theta = tuple(tuple(map(int, row)) for row in theta)
    if len(theta) != datum.rank or any(len(row) != datum.rank for row in theta):
        raise DomainError(f"matrix is not {datum.rank}x{datum.rank}")
    if linalg.mat_det(theta) ** 2 != 1:
        raise DomainError("matrix is not invertible over the integers")
    if linalg.mat_order(theta) is None:
        raise DomainError("matrix does not have finite order")
    coset = {linalg.mat_mul(w, datum.twist) for w in weyl_group(datum).elements}
    if theta in coset:
        return True
    if not search_automorphisms:
        return False
    if datum.rank > 3:
        raise DomainError("automorphism search supports rank <= 3")
    for phi in linalg.signed_permutations(datum.rank):
        conj = linalg.mat_mul(linalg.mat_mul(phi, theta), linalg.transpose(phi))
        if conj in coset:
            return True
    return False

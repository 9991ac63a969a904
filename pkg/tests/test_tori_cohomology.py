from fractions import Fraction

import pytest

from endotree.endoscopy import TorsionCharacter
from endotree.errors import DomainError
from endotree.oracles import coset_order
from endotree.root_datum import builtin_datum, weyl_group
from endotree.tori_cohomology import (
    GaloisLattice,
    class_of,
    embeds_as_cartan,
    h1,
    kappa_character,
)
from endotree import linalg

UE1 = GaloisLattice(rank=1, generators=(((-1,),),))
TRIVIAL = GaloisLattice(rank=1, generators=(((1,),),))
SWAP = GaloisLattice(rank=2, generators=(((0, 1), (1, 0)),))
ROT4 = GaloisLattice(rank=2, generators=(((0, -1), (1, 0)),))
MINUS2 = GaloisLattice(rank=2, generators=(((-1, 0), (0, -1)),))
CYCLE3 = GaloisLattice(rank=3, generators=(((0, 0, 1), (1, 0, 0), (0, 1, 0)),))
MINUS3 = GaloisLattice(rank=3, generators=(((-1, 0, 0), (0, -1, 0), (0, 0, -1)),))


def test_closure_is_a_group():
    assert len(UE1.group_elements) == 2
    assert len(SWAP.group_elements) == 2
    assert len(ROT4.group_elements) == 4
    assert len(CYCLE3.group_elements) == 3


def test_rejects_non_invertible_generator():
    with pytest.raises(DomainError):
        GaloisLattice(rank=1, generators=(((2,),),))


@pytest.mark.parametrize(
    "lattice,factors",
    [(UE1, (2,)), (TRIVIAL, ()), (SWAP, ()), (ROT4, (2,)), (MINUS2, (2, 2)),
     (CYCLE3, ()), (MINUS3, (2, 2, 2))],
)
def test_h1_invariant_factors(lattice, factors):
    assert h1(lattice).invariant_factors == factors


@pytest.mark.parametrize("lattice", [UE1, TRIVIAL, SWAP, ROT4, MINUS2, CYCLE3, MINUS3])
def test_h1_order_matches_coset_enumeration_oracle(lattice):
    assert h1(lattice).order == coset_order(lattice)


def test_class_of_ue1():
    group = h1(UE1)
    assert class_of((1,), UE1, group) == (1,)
    assert class_of((2,), UE1, group) == (0,)
    # depends only on the vector modulo two, exhaustively in a window
    for u in range(-10, 11):
        assert class_of((u,), UE1, group) == (u % 2,)


def test_class_of_boundaries_vanish():
    from endotree.tori_cohomology import boundary_generators

    for lattice in (UE1, ROT4, MINUS2):
        group = h1(lattice)
        for b in boundary_generators(lattice):
            assert class_of(b, lattice, group) == (0,) * len(group.invariant_factors)


def test_class_of_is_boundary_shift_invariant():
    from endotree.tori_cohomology import boundary_generators

    group = h1(MINUS2)
    for u in ((1, 0), (0, 1), (3, -2)):
        base = class_of(u, MINUS2, group)
        for b in boundary_generators(MINUS2):
            shifted = tuple(x + y for x, y in zip(u, b))
            assert class_of(shifted, MINUS2, group) == base


def test_class_of_rejects_non_norm_zero():
    swap_group = h1(SWAP)
    with pytest.raises(DomainError):
        class_of((1, 0), SWAP, swap_group)


def test_kappa_character_ue1():
    table = kappa_character(TorsionCharacter((Fraction(1, 2),)), UE1)
    assert len(table) == 1
    assert table[0].order == 2
    assert table[0].rotation == Fraction(1, 2)
    assert not table[0].is_trivial


def test_kappa_character_trivial_s():
    table = kappa_character(TorsionCharacter((Fraction(0),)), UE1)
    assert table[0].is_trivial


def test_kappa_character_trivial_group():
    assert kappa_character(TorsionCharacter((Fraction(0), Fraction(0))), SWAP) == ()


def test_kappa_character_rejects_bad_s():
    with pytest.raises(DomainError, match="boundaries"):
        kappa_character(TorsionCharacter((Fraction(1, 4),)), UE1)


def test_kappa_well_defined_on_quotient():
    s = TorsionCharacter((Fraction(1, 2), Fraction(1, 2)))
    table = kappa_character(s, MINUS2)
    for entry in table:
        assert (entry.rotation * entry.order) % 1 == 0


def test_embeds_as_cartan_sl2():
    sl2 = builtin_datum("SL2")
    assert embeds_as_cartan(((-1,),), sl2)
    assert embeds_as_cartan(((1,),), sl2)


def test_embeds_as_cartan_rotation_fails_for_gl2():
    gl2 = builtin_datum("GL", 2)
    assert not embeds_as_cartan(((0, -1), (1, 0)), gl2)
    assert not embeds_as_cartan(((0, -1), (1, 0)), gl2, search_automorphisms=True)


def test_embeds_closure_round_trip():
    for name in ("sl2", "gl2", "u2"):
        from endotree.root_datum import datum_by_name

        datum = datum_by_name(name)
        for w in weyl_group(datum).elements:
            theta = linalg.mat_mul(w, datum.twist)
            assert embeds_as_cartan(theta, datum)


def test_embeds_rejects_infinite_order():
    with pytest.raises(DomainError):
        embeds_as_cartan(((1, 1), (0, 1)), builtin_datum("GL", 2))


def test_lattice_json_round_trip():
    doc = ROT4.to_dict()
    assert GaloisLattice.from_dict(doc) == ROT4

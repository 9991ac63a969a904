from fractions import Fraction

import pytest

from endotree.endoscopy import (
    TorsionCharacter,
    _iso_key,
    check_endoscopic,
    coroot_kernel,
    describe_class,
    enumerate_endoscopic,
    is_elliptic,
    unitary_elliptic,
)
from endotree.errors import DomainError
from endotree.root_datum import builtin_datum, weyl_group

SL2 = builtin_datum("SL2")
PGL2 = builtin_datum("PGL2")
W_NONTRIVIAL = ((-1,),)
HALF = TorsionCharacter((Fraction(1, 2),))
ONE = TorsionCharacter((Fraction(0),))


def test_coroot_kernel_sl2():
    assert coroot_kernel(HALF, SL2) == ()
    assert coroot_kernel(ONE, SL2) == SL2.coroots


def test_coroot_kernel_pgl2_full_for_minus_one():
    # the coroots are +-2, which an order-two character cannot see
    assert coroot_kernel(HALF, PGL2) == PGL2.coroots


def test_check_endoscopic_sl2_nontrivial_w():
    result = check_endoscopic(HALF, W_NONTRIVIAL, SL2)
    assert not isinstance(result, str)
    assert result.roots_H == ()
    assert result.twist_H == ((-1,),)
    assert describe_class(result) == "UE1"


def test_check_endoscopic_rejections():
    assert check_endoscopic(ONE, W_NONTRIVIAL, SL2) == "sigma_H fixes no simple system"
    for s in (ONE, HALF):
        assert check_endoscopic(s, W_NONTRIVIAL, PGL2) == "sigma_H fixes no simple system"
    quarter = TorsionCharacter((Fraction(1, 4),))
    assert check_endoscopic(quarter, W_NONTRIVIAL, SL2) == "sigma_H does not fix s"


def test_check_endoscopic_rejects_foreign_weyl_element():
    with pytest.raises(DomainError):
        check_endoscopic(HALF, ((2,),), SL2)


def test_enumerate_sl2():
    classes = enumerate_endoscopic(SL2)
    labels = [describe_class(e) for e in classes]
    assert sorted(labels) == ["Gm", "SL2", "UE1"]
    flags = {describe_class(e): is_elliptic(e, SL2) for e in classes}
    assert flags == {"SL2": True, "UE1": True, "Gm": False}


def test_enumerate_pgl2():
    classes = enumerate_endoscopic(PGL2)
    assert sorted(describe_class(e) for e in classes) == ["Gm", "PGL2"]


def test_enumerate_round_trips_through_check():
    for datum in (SL2, PGL2, builtin_datum("U", 2)):
        for e in enumerate_endoscopic(datum):
            again = check_endoscopic(e.s, e.w, datum)
            assert not isinstance(again, str)
            assert again.datum_H == e.datum_H


def test_enumerate_torus_returns_itself():
    from endotree.root_datum import RootDatum

    torus = RootDatum(1, (), (), ((1,),))
    classes = enumerate_endoscopic(torus)
    assert len(classes) == 1
    assert classes[0].roots_H == ()


def test_enumeration_is_deterministic():
    for datum in (SL2, builtin_datum("U", 3)):
        first = enumerate_endoscopic(datum)
        second = enumerate_endoscopic(datum)
        assert first == second
        # sorted by descending root count, per the published ordering
        sizes = [len(e.roots_H) for e in first]
        assert sizes == sorted(sizes, reverse=True)


def test_enumeration_stable_under_larger_order_bound():
    for datum in (SL2, PGL2, builtin_datum("U", 2), builtin_datum("U", 3)):
        four = {_iso_key(e) for e in enumerate_endoscopic(datum, order_bound=4)}
        six = {_iso_key(e) for e in enumerate_endoscopic(datum, order_bound=6)}
        assert four == six


def test_is_elliptic_matches_direct_fixed_space():
    # when H is the datum itself, ellipticity must agree with a direct
    # fixed-space computation over the full closure of the Weyl group
    # together with the twist (not just the generators)
    from endotree import linalg
    from endotree.root_datum import datum_by_name

    for name in ("sl2", "pgl2", "gl2", "gl3", "u2", "u3"):
        datum = datum_by_name(name)
        full = check_endoscopic(
            TorsionCharacter((Fraction(0),) * datum.rank),
            weyl_group(datum).elements[0],
            datum,
        )
        assert not isinstance(full, str)
        closure = {w for w in weyl_group(datum).elements}
        frontier = set(closure)
        while frontier:
            new = set()
            for g in frontier:
                for h in (datum.twist,):
                    for prod in (linalg.mat_mul(g, h), linalg.mat_mul(h, g)):
                        if prod not in closure:
                            closure.add(prod)
                            new.add(prod)
            frontier = new
        span_idx = linalg.independent_columns(datum.roots)
        basis = linalg.transpose([datum.roots[i] for i in span_idx]) if span_idx else ()
        stacked = []
        for g in closure:
            gb = linalg.mat_mul(g, basis) if span_idx else ()
            stacked.extend(
                tuple(gb[i][j] - basis[i][j] for j in range(len(span_idx)))
                for i in range(datum.rank)
            )
        direct = not span_idx or not linalg.frac_nullspace(stacked)
        assert is_elliptic(full, datum) is direct


@pytest.mark.parametrize(
    "n,expected",
    [
        (1, [((1, 0),)]),
        (2, [((2, 0),), ((1, 1),)]),
        (3, [((3, 0),), ((2, 1),)]),
        (4, [((4, 0),), ((3, 1),), ((2, 2),)]),
    ],
)
def test_unitary_elliptic_partitions(n, expected):
    got = unitary_elliptic(n)
    assert sorted(p for p, _ in got) == sorted(p[0] for p in expected)
    for _, s in got:
        assert all(v in (Fraction(0), Fraction(1, 2)) for v in s.values)


def test_unitary_elliptic_rejects_out_of_range():
    with pytest.raises(DomainError):
        unitary_elliptic(5)


def test_torsion_character_normalization():
    s = TorsionCharacter((Fraction(3, 2), Fraction(-1, 4)))
    assert s.values == (Fraction(1, 2), Fraction(3, 4))
    assert s.order == 4
    assert s.rotation((2, 0)) == 0
    assert s.is_one_on((2, 4))

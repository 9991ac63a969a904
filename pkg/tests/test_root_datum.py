import json
from itertools import permutations

import pytest

from endotree import linalg
from endotree.errors import DomainError
from endotree.root_datum import (
    RootDatum,
    builtin_datum,
    datum_by_name,
    dual_datum,
    simple_system,
    validate_root_datum,
    weyl_group,
)


def test_builtin_sl2_pgl2():
    sl2 = builtin_datum("SL2")
    assert set(sl2.roots) == {(2,), (-2,)}
    assert set(sl2.coroots) == {(1,), (-1,)}
    assert sl2.twist == ((1,),)
    pgl2 = builtin_datum("PGL2")
    assert set(pgl2.roots) == {(1,), (-1,)}
    assert set(pgl2.coroots) == {(2,), (-2,)}


def test_builtin_un():
    u3 = builtin_datum("U", 3)
    assert len(u3.roots) == 6
    assert all(sum(r) == 0 for r in u3.roots)
    # the twist negates and reverses coordinates
    assert linalg.mat_vec(u3.twist, (1, 2, 3)) == (-3, -2, -1)


def test_unknown_family():
    with pytest.raises(DomainError):
        builtin_datum("E8")


@pytest.mark.parametrize("name", ["sl2", "pgl2", "gl2", "gl3", "u2", "u3", "u4"])
def test_builtins_validate(name):
    assert validate_root_datum(datum_by_name(name)) == []


def test_validator_reports_bad_pairing():
    bad = RootDatum(1, ((2,), (-2,)), ((2,), (-2,)), ((1,),))
    issues = validate_root_datum(bad)
    assert any("!= 2" in msg for msg in issues)


def test_validator_reports_missing_negative():
    bad = RootDatum(2, ((1, -1),), ((1, -1),), linalg.identity(2))
    issues = validate_root_datum(bad)
    assert any("no negative" in msg for msg in issues)


def test_simple_system_sl2_and_gl3():
    assert simple_system(builtin_datum("SL2")) == ((2,),)
    gl3 = builtin_datum("GL", 3)
    delta = simple_system(gl3)
    assert set(delta) == {(1, -1, 0), (0, 1, -1)}
    # oracle: every root is a one-signed integer combination of the base
    cols = linalg.transpose(delta)
    for root in gl3.roots:
        coeffs = linalg.frac_solve(cols, root)
        assert coeffs is not None
        assert all(c.denominator == 1 for c in coeffs)
        assert all(c >= 0 for c in coeffs) or all(c <= 0 for c in coeffs)


def test_simple_system_preserved_by_unitary_twist():
    u3 = builtin_datum("U", 3)
    delta = set(simple_system(u3))
    assert {linalg.mat_vec(u3.twist, a) for a in delta} == delta


def test_weyl_group_sl2():
    group = weyl_group(builtin_datum("SL2"))
    assert set(group.elements) == {((1,),), ((-1,),)}


def test_weyl_group_gl3_is_all_permutation_matrices():
    group = weyl_group(builtin_datum("GL", 3))
    perm_mats = {
        tuple(tuple(int(perm[i] == j) for j in range(3)) for i in range(3))
        for perm in permutations(range(3))
    }
    assert set(group.elements) == perm_mats


def test_weyl_group_empty_roots():
    torus = RootDatum(1, (), (), ((1,),))
    assert weyl_group(torus).elements == (((1,),),)


def test_weyl_group_closed_with_identity():
    for name in ("gl3", "u3"):
        group = weyl_group(datum_by_name(name))
        elements = set(group.elements)
        assert linalg.identity(3) in elements
        for a in elements:
            for b in elements:
                assert linalg.mat_mul(a, b) in elements


def test_weyl_elements_permute_roots():
    for name in ("gl2", "gl3", "u3", "u4"):
        datum = datum_by_name(name)
        roots = set(datum.roots)
        coroots = set(datum.coroots)
        for w in weyl_group(datum).elements:
            assert {linalg.mat_vec(w, a) for a in roots} == roots
            w_co = linalg.inverse_transpose(w)
            assert {linalg.mat_vec(w_co, a) for a in coroots} == coroots


def test_dual_datum():
    assert dual_datum(builtin_datum("SL2")) == builtin_datum("PGL2")
    assert dual_datum(builtin_datum("PGL2")) == builtin_datum("SL2")
    gl2 = builtin_datum("GL", 2)
    assert dual_datum(gl2) == gl2


@pytest.mark.parametrize("name", ["sl2", "pgl2", "gl2", "gl3", "u2", "u3", "u4"])
def test_dual_is_an_involution(name):
    datum = datum_by_name(name)
    assert dual_datum(dual_datum(datum)) == datum


@pytest.mark.parametrize("name", ["sl2", "pgl2", "gl2", "gl3", "gl4", "u2", "u3", "u4"])
def test_simple_system_cardinality_is_span_rank(name):
    datum = datum_by_name(name)
    delta = simple_system(datum)
    assert len(delta) == len(linalg.independent_columns(datum.roots))


def test_json_round_trip(tmp_path):
    for name in ("sl2", "u3"):
        datum = datum_by_name(name)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(datum.to_dict()))
        assert RootDatum.from_dict(json.loads(path.read_text())) == datum


def test_datum_by_name_rejects_unknown():
    with pytest.raises(DomainError):
        datum_by_name("so5")

import random
from fractions import Fraction

import pytest

from conftest import norm_one_gamma
from endotree.building_orbital import (
    ExactQ,
    RegularElement,
    Vertex,
    apply_to_vertex,
    are_conjugate,
    are_stably_conjugate,
    classify_centralizer,
    count_fixed_elliptic,
    count_fixed_split_window,
    fl_check,
    fixed_vertex_count,
    kappa_orbital,
    match_element,
    neighbors,
    root_value_depth,
    stable_class_reps,
    standard_vertex,
    stable_orbital_H,
    tree_distance,
)
from endotree.errors import DomainError
from endotree.local_field import QuadExtElement, eval_expr, parse_matrix, sqrt_unit
from endotree.oracles import (
    conjugation_spot_check,
    oracle_class_counts,
    oracle_count_split_window,
    random_integral_conjugate,
)


# -- the tree itself -------------------------------------------------------------

def test_neighbor_structure(q3_mixed):
    v0 = standard_vertex()
    nbs = neighbors(v0, q3_mixed)
    assert len(nbs) == q3_mixed.q + 1
    assert len(set(nbs)) == q3_mixed.q + 1
    assert all(tree_distance(v0, nb, q3_mixed) == 1 for nb in nbs)
    assert all(not nb.is_even for nb in nbs)
    # moving on from a neighbor: one step back, q steps out
    second = neighbors(nbs[0], q3_mixed)
    dists = sorted(tree_distance(v0, w, q3_mixed) for w in second)
    assert dists == [0] + [2] * q3_mixed.q


def test_apply_is_an_action(q3_mixed):
    g = parse_matrix("[[1,1],[0,1]]", q3_mixed)
    h = parse_matrix("[[1,0],[p,1]]", q3_mixed)
    from endotree.local_field import fmat_mul

    v = neighbors(standard_vertex(), q3_mixed)[2]
    one_step = apply_to_vertex(fmat_mul(g, h), v, q3_mixed)
    two_step = apply_to_vertex(h, apply_to_vertex(g, v, q3_mixed), q3_mixed)
    assert one_step == two_step


# -- matching and classification ---------------------------------------------------

def test_match_element_rejects_central(q3_mixed):
    one = QuadExtElement(q3_mixed.one(), q3_mixed.zero())
    with pytest.raises(DomainError, match="central"):
        match_element(one, q3_mixed)
    with pytest.raises(DomainError, match="central"):
        match_element(-one, q3_mixed)
    bad = QuadExtElement(q3_mixed.from_int(2), q3_mixed.zero())
    with pytest.raises(DomainError, match="norm"):
        match_element(bad, q3_mixed)


def test_match_element_example(q3_mixed):
    field = q3_mixed
    b = field.uniformizer()
    a = sqrt_unit(field.one() + field.u * b * b, field)
    gamma = QuadExtElement(a, b)
    g = match_element(gamma, field)
    assert (g.trace - (a + a)).is_zero_at_precision
    assert (g.det - field.one()).is_zero_at_precision
    assert g.disc.valuation() == 2
    four_u_b2 = field.from_int(4) * field.u * b * b
    assert (g.disc - four_u_b2).is_zero_at_precision
    assert classify_centralizer(g) == "unramified_elliptic"


def test_classify_split(q3_mixed):
    g = RegularElement(parse_matrix("[[2,0],[0,2^-1]]", q3_mixed), q3_mixed)
    assert classify_centralizer(g) == "split"


def test_classify_ramified(q3_mixed):
    g = RegularElement(parse_matrix("[[1+p,1],[2*p+p^2,1+p]]", q3_mixed), q3_mixed)
    assert classify_centralizer(g) == "ramified_elliptic"
    assert g.disc.valuation() == 1


# -- conjugacy ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5])
def test_ramified_pair_stably_but_not_rationally_conjugate(p):
    from endotree.local_field import LocalField

    field = LocalField(p, kind="mixed")
    g1 = RegularElement(parse_matrix("[[1+p,1],[2*p+p^2,1+p]]", field), field)
    g2 = RegularElement(parse_matrix("[[1+p,u^-1],[(2*p+p^2)*u,1+p]]", field), field)
    assert are_stably_conjugate(g1, g2)
    assert not are_conjugate(g1, g2)
    assert are_stably_conjugate(g1, g1) and are_conjugate(g1, g1)


def test_split_classes_always_conjugate(q3_mixed):
    g1 = RegularElement(parse_matrix("[[2,0],[0,2^-1]]", q3_mixed), q3_mixed)
    g2 = RegularElement(parse_matrix("[[2,1],[0,2^-1]]", q3_mixed), q3_mixed)
    assert are_stably_conjugate(g1, g2)
    assert are_conjugate(g1, g2)


def test_stable_class_reps_structure(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    reps = stable_class_reps(g0)
    assert len(reps) == 2
    assert sorted(sign for _, sign in reps) == [-1, 1]
    (r1, _), (r2, _) = reps
    assert are_stably_conjugate(r1, r2)
    assert not are_conjugate(r1, r2)


def test_stable_class_reps_split_singleton(q3_mixed):
    g = RegularElement(parse_matrix("[[2,0],[0,2^-1]]", q3_mixed), q3_mixed)
    assert stable_class_reps(g) == [(g, 1)]


def test_stable_class_reps_rejects_ramified(q3_mixed):
    g = RegularElement(parse_matrix("[[1+p,1],[2*p+p^2,1+p]]", q3_mixed), q3_mixed)
    with pytest.raises(DomainError, match="ramified"):
        stable_class_reps(g)


# -- counting ----------------------------------------------------------------------

def test_counts_match_oracle_small(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    report = oracle_class_counts(g0, bound=4)
    assert report["matches_search"]
    counts = {entry["kappa"]: entry["oracle_count"] for entry in report["classes"]}
    assert sorted(counts.values()) == [1, 4]


def test_count_conjugation_invariance(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    rng = random.Random(11)
    reference = count_fixed_elliptic(g0.matrix, q3_mixed)[0]
    for _ in range(3):
        moved = random_integral_conjugate(g0, rng)
        assert count_fixed_elliptic(moved.matrix, q3_mixed)[0] == reference
    assert conjugation_spot_check(g0, seed=7, trials=2)


def test_convexity_stop_with_overshoot(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 2), q3_mixed)
    plain, radius = count_fixed_elliptic(g0.matrix, q3_mixed)
    checked, _ = count_fixed_elliptic(g0.matrix, q3_mixed, overshoot=2)
    assert plain == checked
    capped, _ = count_fixed_elliptic(g0.matrix, q3_mixed, max_radius=radius + 2)
    assert capped == plain


def test_split_window_count_matches_oracle(q3_mixed):
    lam = q3_mixed.from_int(2)
    count, depth = count_fixed_split_window(lam, q3_mixed)
    assert count == oracle_count_split_window(lam, q3_mixed, bound=depth + 3)
    forced, _ = count_fixed_split_window(lam, q3_mixed, max_depth=depth + 2)
    assert forced == count


def test_fixed_vertex_count_noncompact_is_zero(q3_mixed):
    g = RegularElement(parse_matrix("[[p,0],[0,p^-1]]", q3_mixed), q3_mixed)
    assert fixed_vertex_count(g) == 0


def test_counts_agree_across_field_kinds(q3_mixed, q3_equal):
    for depth in (1, 2):
        counts = []
        for field in (q3_mixed, q3_equal):
            g0 = match_element(norm_one_gamma(field, depth), field)
            report = kappa_orbital(g0)
            counts.append(sorted(c.fixed_count for c in report.classes))
        assert counts[0] == counts[1]


# -- the orbital sums --------------------------------------------------------------

def test_root_value_depth(q3_mixed):
    for depth in (1, 2, 3):
        g0 = match_element(norm_one_gamma(q3_mixed, depth), q3_mixed)
        assert root_value_depth(g0) == depth


def test_kappa_orbital_value_one(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    report = kappa_orbital(g0)
    assert report.value == 1
    assert report.d == 1


def test_kappa_orbital_precision_stability():
    from endotree.local_field import LocalField

    counts = set()
    for precision in (10, 16, 24):
        field = LocalField(3, kind="mixed", precision=precision)
        g0 = match_element(norm_one_gamma(field, 2), field)
        report = kappa_orbital(g0)
        counts.add((report.d, report.value.mantissa, report.value.half_exponent,
                    tuple(sorted(c.fixed_count for c in report.classes))))
    assert len(counts) == 1


def test_trivial_kappa_matches_stable_sum(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    signed = kappa_orbital(g0)
    stable = kappa_orbital(g0, trivial_kappa=True)
    assert all(c.kappa == 1 for c in stable.classes)
    assert sorted(c.fixed_count for c in stable.classes) == sorted(
        c.fixed_count for c in signed.classes
    )


def test_stable_orbital_h_values(q3_mixed):
    gamma = norm_one_gamma(q3_mixed, 1)
    assert stable_orbital_H(gamma, "UE1", q3_mixed) == 1
    assert stable_orbital_H(q3_mixed.from_int(2), "Gm", q3_mixed) == 1
    assert stable_orbital_H(q3_mixed.uniformizer(), "Gm", q3_mixed) == 0
    with pytest.raises(DomainError):
        stable_orbital_H(q3_mixed.one(), "SO5", q3_mixed)


def test_fl_check_elliptic(q3_mixed):
    result = fl_check(norm_one_gamma(q3_mixed, 1), "UE1", q3_mixed)
    assert result.equal
    assert result.lhs.value == 1 and result.rhs == 1


def test_fl_check_elliptic_depth_zero(q3_mixed):
    result = fl_check(norm_one_gamma(q3_mixed, 0), "UE1", q3_mixed)
    assert result.equal and result.lhs.d == 0
    assert sorted(c.fixed_count for c in result.lhs.classes) == [0, 1]


def test_fl_check_residue_degree_two(q9_equal):
    result = fl_check(norm_one_gamma(q9_equal, 1), "UE1", q9_equal)
    assert result.equal and result.lhs.value == 1
    assert sorted(c.fixed_count for c in result.lhs.classes) == [1, q9_equal.q + 1]


def test_fl_check_independent_of_chosen_nonsquare():
    from endotree.local_field import LocalField

    field = LocalField(3, kind="mixed", u_expr="2+3*p")
    for depth in (1, 2):
        result = fl_check(norm_one_gamma(field, depth), "UE1", field)
        assert result.equal and result.lhs.value == 1


def test_fl_check_split(q3_mixed):
    result = fl_check(q3_mixed.from_int(2), "Gm", q3_mixed)
    assert result.equal and result.lhs.value == 1


def test_fl_check_trivial_vanishing(q3_mixed):
    result = fl_check(q3_mixed.uniformizer(), "Gm", q3_mixed)
    assert result.equal
    assert result.lhs.value == 0 and result.rhs == 0


def test_fl_check_group_case(q3_mixed):
    result = fl_check(norm_one_gamma(q3_mixed, 1), "G", q3_mixed)
    assert result.equal
    assert all(c.kappa == 1 for c in result.lhs.classes)


def test_fl_check_rejects_central(q3_mixed):
    one = QuadExtElement(q3_mixed.one(), q3_mixed.zero())
    with pytest.raises(DomainError):
        fl_check(one, "UE1", q3_mixed)


def test_descent_identity_trivial_direction(q3_mixed):
    # gamma with central finite-order part: the sum for gamma equals the
    # sum for its topologically unipotent part
    gamma_u = norm_one_gamma(q3_mixed, 1)
    gamma = -gamma_u
    lhs = fl_check(gamma, "UE1", q3_mixed)
    rhs = fl_check(gamma_u, "UE1", q3_mixed)
    assert lhs.lhs.value == rhs.lhs.value
    assert sorted(c.fixed_count for c in lhs.lhs.classes) == sorted(
        c.fixed_count for c in rhs.lhs.classes
    )
    # the matched matrix of gamma has central finite-order part -1
    from endotree.local_field import jordan_decompose

    m = match_element(gamma, q3_mixed).matrix
    m_s, _ = jordan_decompose(m, q3_mixed)
    assert (m_s[0][0] + q3_mixed.one()).is_zero_at_precision
    assert m_s[0][1].is_zero_at_precision and m_s[1][0].is_zero_at_precision


def test_swapping_kappa_signs_negates_the_sum(q3_mixed):
    g0 = match_element(norm_one_gamma(q3_mixed, 1), q3_mixed)
    report = kappa_orbital(g0)
    signed = sum(c.kappa * c.fixed_count for c in report.classes)
    swapped = sum(-c.kappa * c.fixed_count for c in report.classes)
    assert swapped == -signed
    assert signed == q3_mixed.q ** report.d


# -- exact values ------------------------------------------------------------------

def test_exactq_normalization():
    v = ExactQ(3, Fraction(9), -4)
    assert v.mantissa == 1 and v.half_exponent == 0
    assert v == 1
    w = ExactQ(3, Fraction(2, 3), 0)
    assert w.mantissa == 2 and w.half_exponent == -2
    zero = ExactQ(3, Fraction(0), 5)
    assert zero.half_exponent == 0 and zero == 0
    assert ExactQ(3, Fraction(5), -2) != 1

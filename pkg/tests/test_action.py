import pytest

from saxl.gf import make_field
from saxl.projgroup import (GroupLevel, group_ctx, dihedral_plus,
                            dihedral_minus, borel, subfield, SubgroupSpec,
                            IDENT_MAT)
from saxl.action import (coset_action, projective_line_action,
                         two_subset_action, action_from_perm_gens,
                         restrict_action, NotSubgroup, UnfaithfulAction,
                         TooManyPoints, MisalignedActions, ActionError)


def test_coset_action_psl25_d6():
    f = make_field(5)
    A = coset_action(f, GroupLevel("T"), dihedral_plus(f))
    assert A.n_points == 10
    dec = A.suborbits()
    assert dec.lengths == [1, 3, 6]
    assert dec.regular_count == 1 and len(dec.gamma) == 6


def test_coset_action_psl27_subfield():
    f = make_field(3, 3)
    A = coset_action(f, GroupLevel("T"), subfield(f, 1))
    assert A.n_points == 819


def test_coset_action_borel_matches_projective_line():
    f = make_field(13)
    A = coset_action(f, GroupLevel("T"), borel(f))
    P = projective_line_action(f)
    assert A.n_points == P.n_points == 14
    assert A.suborbits().lengths == P.suborbits().lengths == [1, 13]


def test_projective_line_two_transitive_and_stabilizer():
    f = make_field(5)
    P = projective_line_action(f)
    assert P.n_points == 6
    assert len(P.suborbits().suborbits) == 2
    G = group_ctx(f)
    assert all(G.act(m, G.INF) == G.INF for m in P.stab_sorted)


def test_two_subset_action_q13():
    f = make_field(13)
    TS = two_subset_action(f)
    assert TS.n_points == 91  # C(14, 2)
    G = group_ctx(f)
    v = G.mat(0, -1 % 13, 1, 0)
    assert TS.act_fn(v, 0) == 0  # v swaps 0 and INF, fixing the base pair
    CA = coset_action(f, GroupLevel("T"), dihedral_minus(f))
    assert TS.suborbits().lengths == CA.suborbits().lengths


def test_two_subset_matches_coset_model_q27():
    f = make_field(3, 3)
    TS = two_subset_action(f)
    CA = coset_action(f, GroupLevel("T"), dihedral_minus(f))
    assert TS.suborbits().lengths == CA.suborbits().lengths


def test_orbit_stabilizer_consistency():
    f = make_field(3, 2)
    for A in (coset_action(f, GroupLevel("T"), dihedral_plus(f)),
              two_subset_action(f),
              projective_line_action(f)):
        dec = A.suborbits()
        assert sum(s.length for s in dec.suborbits) == A.n_points
        for s in dec.suborbits:
            assert s.length * s.stab_order == A.stab_order
            assert s.regular == (s.length == A.stab_order)
            # recompute the stabilizer order at the representative
            assert len(A.point_stabilizer(s.rep)) == s.stab_order


def test_fixed_points():
    f = make_field(3, 3)
    G = group_ctx(f)
    M = subfield(f, 1)
    A = coset_action(f, GroupLevel("T"), M)
    assert len(A.fixed_points([G.identity])) == A.n_points
    u = next(m for m in M.sorted_elements()
             if m != G.identity and G.order(m) == 3)
    assert len(A.fixed_points([u])) == 9  # p^(n-m) = 3^2


def test_fixed_points_frobenius_subgroup():
    # <f> on [PSigmaL(2,27) : D28.Z3] fixes p^(n/r) (p^(n/r)-1)/2 = 3 points
    f = make_field(3, 3)
    M = dihedral_plus(f, GroupLevel("PSigmaL"))
    A = coset_action(f, GroupLevel("PSigmaL"), M)
    assert len(A.fixed_points([(IDENT_MAT, 1)])) == 3


def test_transitivity_check_catches_generator_defect():
    # feeding a PGL-only subgroup into a T-level action must fail fast
    f = make_field(13)
    M = dihedral_plus(f, GroupLevel("PGL"))
    with pytest.raises(NotSubgroup):
        coset_action(f, GroupLevel("T"), M)


def test_point_ceiling():
    f = make_field(3, 3)
    with pytest.raises(TooManyPoints):
        coset_action(f, GroupLevel("T"), subfield(f, 1), ceiling=100)


def test_unfaithful_action_rejected():
    f = make_field(5)
    G = group_ctx(f)
    fake = SubgroupSpec(family="custom", params={}, level=GroupLevel("T"),
                        generators=G.level_generators(GroupLevel("T")),
                        elements=frozenset(G.t_elements()),
                        order=G.psl_order())
    with pytest.raises(UnfaithfulAction):
        coset_action(f, GroupLevel("PGL"), fake)


def test_action_from_perm_gens_frobenius():
    tr = tuple((i + 1) % 5 for i in range(5))
    mu = tuple((2 * i) % 5 for i in range(5))
    A = action_from_perm_gens([tr, mu])
    assert A.group_order == 20 and A.stab_order == 4
    assert A.suborbits().lengths == [1, 4]


def test_action_from_perm_gens_requires_transitive():
    with pytest.raises(ActionError):
        action_from_perm_gens([(0, 1, 3, 2)])


def test_restrict_action_alignment():
    f = make_field(5, 2)
    M = dihedral_plus(f, GroupLevel("PSigmaL"))
    A = coset_action(f, GroupLevel("PSigmaL"), M)
    B = restrict_action(A, GroupLevel("T"), f)
    assert B.points is A.points
    assert B.stab_order == 26 and B.n_points == A.n_points == 300


def test_restrict_action_rejects_intransitive():
    # [PGL(2,13) : D12] with D12 <= T: the socle has two orbits
    f = make_field(13)
    M = dihedral_minus(f)  # inside T
    A = coset_action(f, GroupLevel("PGL"), M)
    assert A.n_points == 182
    with pytest.raises(MisalignedActions):
        restrict_action(A, GroupLevel("T"), f)


def test_base_point_is_always_index_zero():
    f = make_field(5)
    A = coset_action(f, GroupLevel("T"), dihedral_plus(f))
    assert A.base_point == 0
    assert A.suborbits().suborbits[0].points == [0]

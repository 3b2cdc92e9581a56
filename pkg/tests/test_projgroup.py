import random

import pytest

from saxl.gf import make_field, factorize
from saxl.projgroup import (GroupLevel, parse_level, group_ctx, mulclose,
                            dihedral_plus, dihedral_minus, borel, subfield,
                            pgl_subfield, exceptional,
                            dihedral_plus_presentation,
                            subgroup_conjugacy_classes, IDENT_MAT,
                            GroupError, NoUnitDetLift, ConditionsNotMet,
                            BadSubfieldDegree)


def all_points(G):
    return list(range(G.q)) + [G.INF]


# -- element algebra ---------------------------------------------------------

def random_semilinear(G, rng):
    t = rng.choice(G.t_elements())
    return G.mul(t, G.coset_rep((rng.randrange(G.d), rng.randrange(G.n))))


@pytest.mark.parametrize("p,n", [(3, 2), (2, 3), (3, 3)])
def test_action_homomorphism_exhaustive_points(p, n):
    f = make_field(p, n)
    G = group_ctx(f)
    rng = random.Random(100 * p + n)
    for _ in range(60):
        g = random_semilinear(G, rng)
        h = random_semilinear(G, rng)
        gh = G.mul(g, h)
        for z in all_points(G):
            assert G.act(gh, z) == G.act(h, G.act(g, z))


def test_group_axioms_and_inverse():
    f = make_field(5, 2)
    G = group_ctx(f)
    rng = random.Random(52)
    for _ in range(200):
        g, h, k = (random_semilinear(G, rng) for _ in range(3))
        assert G.mul(G.mul(g, h), k) == G.mul(g, G.mul(h, k))
        assert G.mul(g, G.inv(g)) == G.identity
        assert G.mul(g, G.identity) == g


def test_orders():
    f = make_field(3, 3)
    G = group_ctx(f)
    assert G.order(G.mat(1, 1, 0, 1)) == 3           # unipotent
    assert G.order((IDENT_MAT, 1)) == 3              # pure field automorphism
    assert G.order(G.identity) == 1


def test_trace_class():
    G = group_ctx(make_field(13))
    assert G.trace_class(G.mat(0, -1 % 13, 1, 0)) == "involution-in-PSL"
    assert G.trace_class(G.mat(1, 1, 0, 1)) == "generic"
    g3 = G.mat(0, -1 % 13, 1, -1 % 13)
    assert G.trace_class(g3) == "order3-class"
    assert G.mul(g3, G.mul(g3, g3)) == G.identity
    with pytest.raises(NoUnitDetLift):
        G.trace_class(G.mat(1, 0, 0, G.f.theta))  # det a nonsquare


def test_element_signature_homomorphism():
    f = make_field(3, 2)
    G = group_ctx(f)
    rng = random.Random(9)
    for _ in range(200):
        g = random_semilinear(G, rng)
        h = random_semilinear(G, rng)
        sg, sh = G.element_signature(g), G.element_signature(h)
        sgh = G.element_signature(G.mul(g, h))
        assert sgh == ((sg[0] + sh[0]) % G.d, (sg[1] + sh[1]) % G.n)
    for t in G.t_elements()[:50]:
        assert G.element_signature(t) == (0, 0)
    assert G.element_signature(G.coset_rep((1, 0))) == (1, 0)
    assert G.element_signature(G.coset_rep((1, 1))) == (1, 1)


def test_t_enumeration_counts():
    for (p, n) in [(5, 1), (3, 2), (2, 4), (7, 1)]:
        f = make_field(p, n)
        G = group_ctx(f)
        q = f.q
        d = 2 if p != 2 else 1
        els = G.t_elements()
        assert len(els) == q * (q * q - 1) // d
        assert len(set(els)) == len(els)


def test_level_orders_and_parse():
    f = make_field(3, 2)
    G = group_ctx(f)
    t_order = G.psl_order()
    assert G.level_order(GroupLevel("T")) == t_order
    assert G.level_order(GroupLevel("PGL")) == 2 * t_order
    assert G.level_order(GroupLevel("PSigmaL")) == 2 * t_order
    assert G.level_order(GroupLevel("PGammaL")) == 4 * t_order
    assert parse_level("T:df^3") == GroupLevel("T:df^i", 3)
    assert parse_level("T:f^2") == GroupLevel("T:f^i", 2)
    with pytest.raises(GroupError):
        parse_level("Q8")


def test_level_generators_generate():
    # closure of the published generators must be the whole level group
    f = make_field(3, 2)
    G = group_ctx(f)
    for tag in ("T", "PGL", "PSigmaL", "PGammaL"):
        lv = GroupLevel(tag)
        got = mulclose(G.level_generators(lv), G.mul,
                       maxsize=G.level_order(lv) + 1)
        assert len(got) == G.level_order(lv)


# -- subgroup families -------------------------------------------------------

def spec_is_closed(G, spec):
    els = spec.elements
    sample = sorted(els)[: min(len(els), 20)]
    for a in sample:
        for b in sample:
            assert G.mul(a, b) in els
        assert G.inv(a) in els
    assert len(mulclose(spec.generators, G.mul, maxsize=len(els) + 1)) == len(els)


@pytest.mark.parametrize("p,n,order", [(5, 1, 6), (13, 1, 14), (3, 2, 10),
                                       (2, 3, 18), (2, 4, 34)])
def test_dihedral_plus_orders(p, n, order):
    f = make_field(p, n)
    spec = dihedral_plus(f)
    assert spec.order == order
    spec_is_closed(group_ctx(f), spec)


def test_dihedral_plus_maximality_warnings():
    assert not dihedral_plus(make_field(7)).maximal
    assert not dihedral_plus(make_field(3, 2)).maximal
    assert dihedral_plus(make_field(13)).maximal


def test_dihedral_plus_psigmal_q9():
    f = make_field(3, 2)
    spec = dihedral_plus(f, GroupLevel("PSigmaL"))
    assert spec.order == 20  # D10.Z2


def test_dihedral_plus_pgl_level():
    f = make_field(13)
    spec = dihedral_plus(f, GroupLevel("PGL"))
    assert spec.order == 28  # D_2(q+1)
    spec_is_closed(group_ctx(f), spec)


@pytest.mark.parametrize("p,n", [(5, 2), (3, 3), (7, 2), (3, 4)])
def test_lemma_m_relations(p, n):
    """a^c = a^p, c^n = t, and c^(n/r) = f^(n/r) t for odd primes r | n."""
    f = make_field(p, n)
    G = group_ctx(f)
    d = dihedral_plus_presentation(f)
    a, b, c, t, fe = d["a"], d["b"], d["c"], d["t"], d["f"]
    assert len(mulclose([a, b], G.mul, maxsize=f.q + 2)) == f.q + 1
    assert G.conj(a, c) == G.power(a, p)
    assert G.power(c, n) == t
    for r in set(factorize(n)) - {2}:
        assert G.power(c, n // r) == G.mul(G.power(fe, n // r), t)
        assert G.power(c, 2 * n // r) == G.power(fe, 2 * n // r)


def test_dihedral_minus():
    f = make_field(13)
    G = group_ctx(f)
    spec = dihedral_minus(f)
    assert spec.order == 12
    s = G.mat(1, 0, 0, f.pow(f.theta, 2))
    v = G.mat(0, -1 % 13, 1, 0)
    assert {G.act(s, 0), G.act(s, G.INF)} == {0, G.INF}
    assert (G.act(v, 0), G.act(v, G.INF)) == (G.INF, 0)
    # every element of the spec stabilizes {0, INF}
    for g in spec.elements:
        assert {G.act(g, 0), G.act(g, G.INF)} == {0, G.INF}


def test_borel():
    f = make_field(13)
    spec = borel(f)
    assert spec.order == 78
    G = group_ctx(f)
    assert all(G.act(g, G.INF) == G.INF for g in spec.elements)


@pytest.mark.parametrize("p,n,m,order", [(2, 4, 2, 60), (3, 3, 1, 12),
                                         (5, 3, 1, 60)])
def test_subfield_orders(p, n, m, order):
    f = make_field(p, n)
    spec = subfield(f, m)
    assert spec.order == order
    spec_is_closed(group_ctx(f), spec)


def test_subfield_rejects_bad_degree():
    with pytest.raises(BadSubfieldDegree):
        subfield(make_field(5, 2), 1)  # n/m = 2, p odd: not this family
    with pytest.raises(BadSubfieldDegree):
        subfield(make_field(3, 3), 2)


def test_pgl_subfield():
    f = make_field(5, 2)
    spec = pgl_subfield(f, 1)
    assert spec.order == 120  # PGL(2,5)
    G = group_ctx(f)
    assert all(G.element_signature(g) == (0, 0) for g in spec.generators)
    with pytest.raises(BadSubfieldDegree):
        pgl_subfield(make_field(2, 4), 2)


def test_exceptional_class_counts():
    assert len(exceptional(make_field(11), "A5")) == 2
    assert len(exceptional(make_field(17), "S4")) == 2
    a4 = exceptional(make_field(13), "A4")
    assert len(a4) == 1 and a4[0].maximal
    a4_11 = exceptional(make_field(11), "A4")
    assert len(a4_11) == 1 and not a4_11[0].maximal


def test_exceptional_orders_and_conditions():
    assert exceptional(make_field(29), "A5")[0].order == 60
    assert exceptional(make_field(17), "S4")[0].order == 24
    assert exceptional(make_field(13), "A4")[0].order == 12
    with pytest.raises(ConditionsNotMet):
        exceptional(make_field(13), "A5")  # 13 = 3 mod 5
    with pytest.raises(ConditionsNotMet):
        exceptional(make_field(11), "S4")  # 11 = 3 mod 8


def test_exceptional_classes_not_t_conjugate():
    f = make_field(11)
    G = group_ctx(f)
    k1, k2 = (spec.elements for spec in exceptional(f, "A5"))
    gens1 = exceptional(f, "A5")[0].generators
    assert not any(all(G.conj(g, t) in k2 for g in gens1)
                   for t in G.t_elements())


# -- normalizer / centralizer ------------------------------------------------

def test_centralizer_of_involution():
    # C_T(x) = D_(q-1) for q = 1 mod 4, D_(q+1) for q = 3 mod 4
    for q, expect in [(13, 12), (11, 12), (17, 16), (19, 20)]:
        f = make_field(q)
        G = group_ctx(f)
        x = next(g for g in G.t_elements()
                 if g != G.identity and G.mul(g, g) == G.identity)
        cent = G.centralizer(frozenset([G.identity, x]), GroupLevel("T"))
        assert len(cent) == expect


def test_normalizer_of_maximal_is_itself():
    f = make_field(13)
    G = group_ctx(f)
    M = dihedral_plus(f)
    assert G.normalizer(M.elements, GroupLevel("T")) == M.elements


def test_normalizer_of_a4_in_pgl11_is_s4():
    f = make_field(11)
    G = group_ctx(f)
    a4 = exceptional(f, "A4")[0]
    norm = G.normalizer(a4.elements, GroupLevel("PGL"))
    assert len(norm) == 24


def test_subgroup_conjugacy_classes():
    f = make_field(7)
    G = group_ctx(f)
    B = borel(f)
    # Sylow-p of PSL(2,p) inside the Borel: normal, single class
    u = G.mat(1, 1, 0, 1)
    P = frozenset(mulclose([u], G.mul))
    assert len(subgroup_conjugacy_classes(G, P, B.elements)) == 1
    # K = H: the single class {H}
    assert subgroup_conjugacy_classes(G, B.elements, B.elements) == [B.elements]


def test_d4_classes_in_s4_of_psl17():
    # two PSL(2,17)-classes of Klein subgroups meet S4 (17 = 1 mod 8)
    f = make_field(17)
    G = group_ctx(f)
    s4 = exceptional(f, "S4")[0]
    els = sorted(s4.elements)
    invs = [g for g in els if g != G.identity and G.mul(g, g) == G.identity]
    v4 = None
    for a in invs:
        for b in invs:
            if a < b and G.mul(a, b) == G.mul(b, a) and G.mul(a, b) != G.identity:
                v4 = frozenset([G.identity, a, b, G.mul(a, b)])
                break
        if v4:
            break
    classes = subgroup_conjugacy_classes(G, v4, s4.elements,
                                         within=G.t_elements())
    assert len(classes) == 2

"""Primitive permutation actions [G:M] and their suborbit structure.

Three constructions: the generic right-coset action (canonical representative
= minimum of the coset under the element tuple order), the projective-line
model, and the 2-subset model.  All three produce the same CosetAction shape,
so the Saxl layer never cares which model it is working over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .gf import FieldCtx
from .projgroup import (GroupCtx, GroupLevel, SubgroupSpec, group_ctx,
                        mulclose, subgroup_generators)


POINT_CEILING = 10 ** 6


class ActionError(Exception):
    pass


class NotSubgroup(ActionError):
    pass


class UnfaithfulAction(ActionError):
    pass


class TooManyPoints(ActionError):
    pass


class MisalignedActions(ActionError):
    pass


@dataclass
class Suborbit:
    rep: int
    length: int
    stab_order: int
    regular: bool
    points: list


@dataclass
class SuborbitDecomposition:
    suborbits: list
    gamma: list          # sorted union of the regular suborbits
    orbit_of: list       # point id -> suborbit index

    @property
    def lengths(self):
        return sorted(s.length for s in self.suborbits)

    @property
    def regular_count(self):
        return sum(1 for s in self.suborbits if s.regular)

    def to_json(self):
        return {
            "lengths": self.lengths,
            "regular_count": self.regular_count,
            "gamma_size": len(self.gamma),
        }


class CosetAction:
    """A finite transitive action with an explicit point-stabilizer list.

    `mul` is the group operation on whatever the elements are (semilinear
    tuples or raw permutation tuples); `act_fn(g, pid) -> pid` evaluates the
    action point-wise.  Generator permutation images are precomputed.
    """

    def __init__(self, *, mul, identity, gens, act_fn, points, base,
                 stab_sorted, group_order, meta=None, gen_perms=None):
        self.mul = mul
        self.identity = identity
        self.gens = gens
        self.act_fn = act_fn
        self.points = points
        self.n_points = len(points)
        self.base_point = base
        self.stab_sorted = stab_sorted
        self.stab_order = len(stab_sorted)
        self.group_order = group_order
        self.meta = meta or {}
        self.perms = gen_perms if gen_perms is not None else \
            [self.perm_of(g) for g in gens]
        self._suborbits = None
        self._check_invariants()

    def _check_invariants(self):
        assert self.group_order == self.n_points * self.stab_order, \
            (self.group_order, self.n_points, self.stab_order)
        for m in self.stab_sorted:
            if self.act_fn(m, self.base_point) != self.base_point:
                raise NotSubgroup("stabilizer element moves the base point")
        # faithfulness: the kernel lies inside the point stabilizer
        n = self.n_points
        for m in self.stab_sorted:
            if m == self.identity:
                continue
            if all(self.act_fn(m, pid) == pid for pid in range(n)):
                raise UnfaithfulAction("nontrivial kernel element found")

    def perm_of(self, g):
        act = self.act_fn
        return [act(g, pid) for pid in range(self.n_points)]

    def suborbits(self) -> SuborbitDecomposition:
        if self._suborbits is not None:
            return self._suborbits
        stab_gens = self.meta.get("stab_gens")
        if stab_gens is None:
            stab_gens = _generic_generators(self.mul, self.identity,
                                            self.stab_sorted)
        gen_perms = [self.perm_of(g) for g in stab_gens]
        n = self.n_points
        orbit_of = [-1] * n
        subs = []
        for start in range(n):
            if orbit_of[start] >= 0:
                continue
            idx = len(subs)
            orbit = [start]
            orbit_of[start] = idx
            frontier = [start]
            while frontier:
                x = frontier.pop()
                for p in gen_perms:
                    y = p[x]
                    if orbit_of[y] < 0:
                        orbit_of[y] = idx
                        orbit.append(y)
                        frontier.append(y)
            length = len(orbit)
            assert self.stab_order % length == 0
            subs.append(Suborbit(rep=start, length=length,
                                 stab_order=self.stab_order // length,
                                 regular=(length == self.stab_order),
                                 points=sorted(orbit)))
        assert sum(s.length for s in subs) == n
        assert subs[0].length == 1 and subs[0].rep == self.base_point
        gamma = sorted(p for s in subs if s.regular for p in s.points)
        self._suborbits = SuborbitDecomposition(subs, gamma, orbit_of)
        return self._suborbits

    def point_stabilizer(self, beta: int):
        """Elements of the base-point stabilizer fixing beta as well."""
        return [m for m in self.stab_sorted if self.act_fn(m, beta) == beta]

    def fixed_points(self, K) -> list:
        """Points fixed by every element of K (generators suffice)."""
        fixed = range(self.n_points)
        for k in K:
            fixed = [pid for pid in fixed if self.act_fn(k, pid) == pid]
        return list(fixed)

    def vertex_reps_perms(self):
        """For every point v a permutation image of some g_v with
        base^(g_v) = v, built by composing generator permutations along a
        BFS tree.  Rows come back as plain lists."""
        try:
            import numpy as np
        except ImportError:  # pragma: no cover
            np = None
        n = self.n_points
        perms = [None] * n
        if np is not None:
            gperms = [np.array(p, dtype=np.int32) for p in self.perms]
            perms[self.base_point] = np.arange(n, dtype=np.int32)
        else:  # pragma: no cover
            gperms = self.perms
            perms[self.base_point] = list(range(n))
        frontier = [self.base_point]
        while frontier:
            nxt = []
            for v in frontier:
                pv = perms[v]
                for gi, gp in enumerate(gperms):
                    w = self.perms[gi][v]
                    if perms[w] is None:
                        perms[w] = gp[pv]
                        nxt.append(w)
            frontier = nxt
        assert all(p is not None for p in perms), "action not transitive"
        return perms


def _generic_generators(mul, identity, elements_sorted):
    gens = []
    span = {identity}
    target = len(elements_sorted)
    for g in elements_sorted:
        if g in span:
            continue
        gens.append(g)
        span = mulclose(gens, mul, maxsize=target)
        if len(span) == target:
            break
    return gens


# ---------------------------------------------------------------------------
# the generic coset model

def coset_action(f: FieldCtx, level: GroupLevel, M: SubgroupSpec,
                 ceiling: int = POINT_CEILING) -> CosetAction:
    """Right-multiplication action of the level group on [G:M].

    Points are canonical coset representatives: the minimum element of
    {m g : m in M} under the plain tuple order, so point ids are stable
    across runs.
    """
    G = group_ctx(f)
    sig_set = level.signature_set(G.d, G.n)
    for g in M.generators:
        if G.element_signature(g) not in sig_set:
            raise NotSubgroup(f"subgroup generator {g} lies outside level {level}")
    group_order = G.level_order(level)
    if group_order % M.order:
        raise NotSubgroup("subgroup order does not divide group order")
    expected = group_order // M.order
    if expected > ceiling:
        raise TooManyPoints(f"|Omega| = {expected} exceeds ceiling {ceiling}")
    # faithfulness for socle-type groups: the kernel would contain T
    t_gen = G.mat(1, 1, 0, 1)
    if M.order >= G.psl_order() and t_gen in M.elements:
        raise UnfaithfulAction("stabilizer contains the socle")

    mlist = M.sorted_elements()
    mul = G.mul

    def canon(x):
        return min(mul(m, x) for m in mlist)

    gens = G.level_generators(level)
    alpha = canon(G.identity)
    points = [alpha]
    index = {alpha: 0}
    gen_perms = [[] for _ in gens]
    pid = 0
    while pid < len(points):
        rep = points[pid]
        for gi, g in enumerate(gens):
            y = canon(mul(rep, g))
            yid = index.get(y)
            if yid is None:
                yid = len(points)
                index[y] = yid
                points.append(y)
                if yid >= expected:
                    raise ActionError("coset enumeration overflow: "
                                      "generators exceed the level group")
            gen_perms[gi].append(yid)
        pid += 1
    if len(points) != expected:
        raise ActionError(
            f"coset enumeration found {len(points)} points, expected {expected}"
            " (generators do not generate the level group)")

    def act_fn(g, pid):
        return index[canon(mul(points[pid], g))]

    return CosetAction(mul=mul, identity=G.identity, gens=gens, act_fn=act_fn,
                       points=points, base=0, stab_sorted=mlist,
                       group_order=group_order, gen_perms=gen_perms,
                       meta={"model": "coset", "family": M.family,
                             "level": str(level), "stab_gens": M.generators,
                             "subgroup": M, "field": f.header()})


# ---------------------------------------------------------------------------
# specialized models

def projective_line_action(f: FieldCtx, level: GroupLevel = GroupLevel("T")) -> CosetAction:
    """The natural action on PG(1,q) = F_q + {INF}; base point INF, whose
    stabilizer is the Borel subgroup."""
    from .projgroup import borel
    G = group_ctx(f)
    B = borel(f, level)
    points = [G.INF] + list(range(f.q))
    index = {z: i for i, z in enumerate(points)}

    def act_fn(g, pid):
        return index[G.act(g, points[pid])]

    return CosetAction(mul=G.mul, identity=G.identity,
                       gens=G.level_generators(level), act_fn=act_fn,
                       points=points, base=0, stab_sorted=B.sorted_elements(),
                       group_order=G.level_order(level),
                       meta={"model": "projective-line", "family": "borel",
                             "level": str(level), "stab_gens": B.generators,
                             "subgroup": B, "field": f.header()})


def two_subset_action(f: FieldCtx, level: GroupLevel = GroupLevel("T")) -> CosetAction:
    """The action on unordered 2-subsets of PG(1,q); base point {0, INF},
    whose stabilizer is the dihedral-minus family."""
    from .projgroup import dihedral_minus
    G = group_ctx(f)
    D = dihedral_minus(f, level)
    base_pair = (0, G.INF)
    pairs = [base_pair]
    for u in range(f.q + 1):
        for w in range(u + 1, f.q + 1):
            if (u, w) != base_pair:
                pairs.append((u, w))
    index = {pr: i for i, pr in enumerate(pairs)}

    def act_fn(g, pid):
        u, w = pairs[pid]
        iu, iw = G.act(g, u), G.act(g, w)
        return index[(iu, iw) if iu < iw else (iw, iu)]

    return CosetAction(mul=G.mul, identity=G.identity,
                       gens=G.level_generators(level), act_fn=act_fn,
                       points=pairs, base=0, stab_sorted=D.sorted_elements(),
                       group_order=G.level_order(level),
                       meta={"model": "2-subset", "family": "d-minus",
                             "level": str(level), "stab_gens": D.generators,
                             "subgroup": D, "field": f.header()})


def action_from_perm_gens(perm_gens) -> CosetAction:
    """A transitive action given by explicit permutation generators (tuples
    of images).  Used for synthetic checks; the group is closed exhaustively."""
    n = len(perm_gens[0])
    identity = tuple(range(n))

    def mul(g, h):
        return tuple(h[g[i]] for i in range(n))

    elements = sorted(mulclose([tuple(g) for g in perm_gens], mul))
    stab = [g for g in elements if g[0] == 0]
    orbit = {g[0] for g in elements}
    if len(orbit) != n:
        raise ActionError("permutation generators are not transitive")

    def act_fn(g, pid):
        return g[pid]

    return CosetAction(mul=mul, identity=identity,
                       gens=[tuple(g) for g in perm_gens], act_fn=act_fn,
                       points=list(range(n)), base=0, stab_sorted=stab,
                       group_order=len(elements),
                       meta={"model": "perm", "family": "synthetic"})


def restrict_action(A: CosetAction, level1: GroupLevel, f: FieldCtx) -> CosetAction:
    """The action of a smaller level group on the same point set (points are
    aligned by construction).  Raises if the subgroup is not transitive."""
    G = group_ctx(f)
    sig1 = level1.signature_set(G.d, G.n)
    group_order1 = G.level_order(level1)
    stab1 = [m for m in A.stab_sorted if G.element_signature(m) in sig1]
    if group_order1 % len(stab1) or group_order1 // len(stab1) != A.n_points:
        raise MisalignedActions(
            f"restricted group has order {group_order1} but stabilizer "
            f"{len(stab1)} on {A.n_points} points")
    gens1 = G.level_generators(level1)
    B = CosetAction(mul=A.mul, identity=A.identity, gens=gens1,
                    act_fn=A.act_fn, points=A.points, base=A.base_point,
                    stab_sorted=stab1, group_order=group_order1,
                    meta={**A.meta, "level": str(level1), "stab_gens": None,
                          "restricted_from": A.meta.get("level")})
    reach = {A.base_point}
    frontier = [A.base_point]
    while frontier:
        nxt = []
        for v in frontier:
            for p in B.perms:
                w = p[v]
                if w not in reach:
                    reach.add(w)
                    nxt.append(w)
        frontier = nxt
    if len(reach) != A.n_points:
        raise MisalignedActions("restricted group is not transitive")
    return B

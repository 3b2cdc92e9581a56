"""Elements of PGammaL(2,q) and the maximal-subgroup catalog.

An element is a plain tuple ((a, b, c, d), e): a projective 2x2 matrix in
normal form (the first nonzero entry in scan order a, b, c, d equals 1)
together with a Frobenius exponent e in [0, n).  Points of the projective
line are ints 0..q-1 plus INF (= q), identified with y/x as usual.

Composition convention (fixed once, property-tested, never re-derived):
points are acted on the right, x^(gh) = (x^g)^h, where ((A, e)) acts by
z |-> sigma^e(moebius_A(z)) and moebius_A(z) = (b + d z) / (a + c z).
That forces (A, e) * (B, k) = (A . sigma^{-e}(B), e + k mod n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .gf import FieldCtx, make_field, factorize


class GroupError(Exception):
    pass


class NoUnitDetLift(GroupError):
    pass


class UnsupportedCase(GroupError):
    pass


class ConditionsNotMet(GroupError):
    pass


class SearchExhausted(GroupError):
    pass


class NotSubset(GroupError):
    pass


class BadSubfieldDegree(GroupError):
    pass


# q = 7, 9 lose maximality of the dihedral families; D_{q-1} also at 5, 11.
# N_PGL(A4) = S4 is maximal in PGL(2,p) for p = +-11, 19 mod 40 even though
# A4 is not maximal in PSL(2,p).  Consulted by the CLI when reporting.
def maximality_exception(family: str, q: int) -> str | None:
    if family == "d-plus" and q in (7, 9):
        return f"D_(q+1) is not maximal in PSL(2,{q})"
    if family == "d-minus" and q in (5, 7, 9, 11):
        return f"D_(q-1) is not maximal in PSL(2,{q})"
    if family == "a4" and q % 40 not in (3, 13, 27, 37):
        return f"A4 is not maximal in PSL(2,{q}) (novelty: S4 max in PGL only)"
    return None


IDENT_MAT = (1, 0, 0, 1)


@dataclass(frozen=True)
class GroupLevel:
    """A group T <= G <= PGammaL(2,q), recorded as T plus the subgroup of
    PGammaL/T = Z_d x Z_n generated by the listed (det-class, frob) pairs."""

    tag: str          # T, PGL, PSigmaL, PGammaL, T:f^i, T:df^i
    i: int = 0        # exponent for the f^i / delta f^i shapes

    def signature_generators(self, d: int, n: int):
        if self.tag == "T":
            return []
        if self.tag == "PGL":
            return [(1 % d, 0)]
        if self.tag == "PSigmaL":
            return [(0, 1 % n)]
        if self.tag == "PGammaL":
            return [(1 % d, 0), (0, 1 % n)]
        if self.tag == "T:f^i":
            return [(0, self.i % n)]
        if self.tag == "T:df^i":
            return [(1 % d, self.i % n)]
        raise GroupError(f"unknown level tag {self.tag}")

    def signature_set(self, d: int, n: int) -> frozenset:
        gens = self.signature_generators(d, n)
        seen = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            s, e = frontier.pop()
            for gs, ge in gens:
                nxt = ((s + gs) % d, (e + ge) % n)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return frozenset(seen)

    def __str__(self):
        if self.tag == "T:f^i":
            return f"T:f^{self.i}"
        if self.tag == "T:df^i":
            return f"T:df^{self.i}"
        return self.tag


def parse_level(text: str) -> GroupLevel:
    t = text.strip()
    if t in ("T", "PGL", "PSigmaL", "PGammaL"):
        return GroupLevel(t)
    for prefix, tag in (("T:df^", "T:df^i"), ("T:f^", "T:f^i")):
        if t.startswith(prefix):
            return GroupLevel(tag, int(t[len(prefix):]))
    raise GroupError(f"cannot parse level {text!r}")


@dataclass
class SubgroupSpec:
    """A concrete maximal-subgroup family instance: generators plus the full
    element set (desk scale), with family metadata for reports."""

    family: str
    params: dict
    level: GroupLevel
    generators: list
    elements: frozenset
    order: int
    maximal: bool = True
    warnings: tuple = ()

    def sorted_elements(self):
        return sorted(self.elements)

    def to_json(self):
        return {
            "family": self.family,
            "params": self.params,
            "level": str(self.level),
            "order": self.order,
            "maximal": self.maximal,
            "warnings": list(self.warnings),
            "generators": [[list(m), e] for (m, e) in self.generators],
        }


def mulclose(gens, mul, maxsize=None):
    """Closure of gens under mul (identity is reached as g * g^-1 powers)."""
    els = set(gens)
    frontier = list(els)
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                x = mul(h, g)
                if x not in els:
                    els.add(x)
                    new.append(x)
                    if maxsize is not None and len(els) > maxsize:
                        return els
        frontier = new
    return els


class GroupCtx:
    """Semilinear-element algebra over one field context, plus cached
    enumerations (T, level cosets, involutions) and normalizer scans."""

    def __init__(self, f: FieldCtx):
        self.f = f
        self.n = f.n
        self.q = f.q
        self.d = math.gcd(2, f.q - 1)
        self.INF = f.q
        self.identity = (IDENT_MAT, 0)
        self._frob = f._frob
        self._norm_cache = {}
        self._cent_cache = {}
        self._t_list = None
        self._sq_sorted = None

    # -- element algebra ----------------------------------------------------

    def normalize(self, a, b, c, d):
        f = self.f
        if a:
            if a == 1:
                return (a, b, c, d)
            iv = f.inv(a)
            return (1, f.mul(iv, b), f.mul(iv, c), f.mul(iv, d))
        if b:
            if b == 1:
                return (a, b, c, d)
            iv = f.inv(b)
            return (0, 1, f.mul(iv, c), f.mul(iv, d))
        raise GroupError("matrix with zero first row is singular")

    def mat(self, a, b, c, d, e=0):
        """Build a normalized element, checking invertibility."""
        f = self.f
        if f.sub(f.mul(a, d), f.mul(b, c)) == 0:
            raise GroupError("singular matrix")
        return (self.normalize(a, b, c, d), e % self.n)

    def mul(self, g, h):
        (a, b, c, d), e = g
        (a2, b2, c2, d2), k = h
        f = self.f
        if e:
            tw = self._frob[self.n - e]
            a2 = tw[a2]
            b2 = tw[b2]
            c2 = tw[c2]
            d2 = tw[d2]
        fm = f.mul
        fa = f.add
        na = fa(fm(a, a2), fm(b, c2))
        nb = fa(fm(a, b2), fm(b, d2))
        nc = fa(fm(c, a2), fm(d, c2))
        nd = fa(fm(c, b2), fm(d, d2))
        ne = e + k
        if ne >= self.n:
            ne -= self.n
        return (self.normalize(na, nb, nc, nd), ne)

    def inv(self, g):
        (a, b, c, d), e = g
        f = self.f
        mat = self.normalize(d, f.neg(b), f.neg(c), a)
        if e:
            tw = self._frob[e]
            mat = (tw[mat[0]], tw[mat[1]], tw[mat[2]], tw[mat[3]])
        return (mat, (self.n - e) % self.n)

    def conj(self, g, x):
        return self.mul(self.inv(x), self.mul(g, x))

    def order(self, g):
        k = 1
        h = g
        bound = self.q * (self.q * self.q - 1) * self.n
        while h != self.identity:
            h = self.mul(h, g)
            k += 1
            if k > bound:
                raise GroupError("order iteration exceeded |PGammaL|")
        return k

    def power(self, g, k):
        if k < 0:
            g = self.inv(g)
            k = -k
        r = self.identity
        h = g
        while k:
            if k & 1:
                r = self.mul(r, h)
            h = self.mul(h, h)
            k >>= 1
        return r

    def act(self, g, z):
        (a, b, c, d), e = g
        f = self.f
        if z == self.INF:
            w = self.INF if c == 0 else f.div(d, c)
        else:
            den = f.add(a, f.mul(c, z))
            if den == 0:
                w = self.INF
            else:
                w = f.div(f.add(b, f.mul(d, z)), den)
        if e and w != self.INF:
            w = self._frob[e][w]
        return w

    def det(self, g):
        (a, b, c, d), _ = g
        return self.f.sub(self.f.mul(a, d), self.f.mul(b, c))

    def element_signature(self, g):
        """(det-square-class, frobenius exponent): a homomorphism onto
        PGammaL/T = Z_d x Z_n.  The square class of the normal form is well
        defined because rescaling multiplies the determinant by a square."""
        sq = 0 if self.f.is_square(self.det(g)) else 1
        return (sq, g[1])

    def in_level(self, g, sig_set) -> bool:
        return self.element_signature(g) in sig_set

    def trace_class(self, g):
        """Classify by the trace of the determinant-1 lift: trace 0 means
        the square is central, trace +-1 means the cube is central."""
        if g[1] != 0:
            raise NoUnitDetLift("classification applies to matrix parts only")
        det = self.det(g)
        f = self.f
        if not f.is_square(det):
            raise NoUnitDetLift("determinant is not a square: no SL lift")
        lam = f.inv(f.sqrt(det))
        (a, _, _, d) = g[0]
        tr = f.mul(lam, f.add(a, d))
        if tr == 0:
            return "involution-in-PSL"
        if tr == 1 or tr == f.neg(1):
            return "order3-class"
        return "generic"

    # -- enumeration --------------------------------------------------------

    def squares_sorted(self):
        if self._sq_sorted is None:
            self._sq_sorted = sorted(self.f.squares_set())
        return self._sq_sorted

    def psl_order(self) -> int:
        q = self.q
        return q * (q * q - 1) // self.d

    def t_elements(self):
        """All of T = PSL(2,q), in the fixed parameterization order."""
        if self._t_list is None:
            self._t_list = list(self._iter_projective(self.squares_sorted()))
            assert len(self._t_list) == self.psl_order()
        return self._t_list

    def _iter_projective(self, det_values):
        """Normalized matrices with determinant in det_values, as e=0 elements."""
        f = self.f
        q = self.q
        for b in range(q):
            for c in range(q):
                bc = f.mul(b, c)
                for s in det_values:
                    yield ((1, b, c, f.add(bc, s)), 0)
        for s in det_values:
            c = f.neg(s)
            for d in range(q):
                yield ((0, 1, c, d), 0)

    def coset_rep(self, sig):
        """delta^s f^e for a signature pair."""
        s, e = sig
        mat = IDENT_MAT if s == 0 else (1, 0, 0, self.f.theta)
        return (mat, e)

    def level_order(self, level: GroupLevel) -> int:
        return self.psl_order() * len(level.signature_set(self.d, self.n))

    def level_elements(self, level: GroupLevel):
        """Full element list of the level group (desk scale)."""
        out = []
        for sig in sorted(level.signature_set(self.d, self.n)):
            rep = self.coset_rep(sig)
            if rep == self.identity:
                out.extend(self.t_elements())
            else:
                out.extend(self.mul(t, rep) for t in self.t_elements())
        return out

    def level_generators(self, level: GroupLevel):
        """Generators: the full upper root group basis plus the Weyl element
        for T, then one coset representative per signature generator."""
        f = self.f
        gens = [((1, f.pow(f.theta, j), 0, 1), 0) for j in range(self.n)]
        gens.append(self.mat(0, f.neg(1), 1, 0))
        for sig in level.signature_generators(self.d, self.n):
            gens.append(self.coset_rep(sig))
        return gens

    def involutions_in_t(self):
        return [g for g in self.t_elements() if g != self.identity
                and self.mul(g, g) == self.identity]

    # -- normalizers and friends --------------------------------------------

    def normalizer_in(self, K_gens, K_set, ambient_iter, expected=None):
        """Exact normalizer scan: elements g with K^g = K."""
        out = []
        for g in ambient_iter:
            if all(self.conj(k, g) in K_set for k in K_gens):
                out.append(g)
                if expected is not None and len(out) == expected:
                    break
        return out

    def normalizer(self, K: frozenset, level: GroupLevel) -> frozenset:
        key = (K, level.tag, level.i % self.n)
        hit = self._norm_cache.get(key)
        if hit is not None:
            return hit
        gens = subgroup_generators(self, K)
        res = frozenset(self.normalizer_in(gens, K, self.level_elements(level)))
        self._norm_cache[key] = res
        return res

    def centralizer(self, K: frozenset, level: GroupLevel) -> frozenset:
        key = (K, level.tag, level.i % self.n)
        hit = self._cent_cache.get(key)
        if hit is not None:
            return hit
        gens = subgroup_generators(self, K)
        res = frozenset(g for g in self.level_elements(level)
                        if all(self.mul(k, g) == self.mul(g, k) for k in gens))
        self._cent_cache[key] = res
        return res


_GROUP_CTX = {}


def group_ctx(f: FieldCtx) -> GroupCtx:
    ctx = _GROUP_CTX.get(id(f))
    if ctx is None:
        ctx = GroupCtx(f)
        _GROUP_CTX[id(f)] = ctx
    return ctx


def subgroup_generators(G: GroupCtx, elements: frozenset):
    """A small deterministic generating set for a subgroup given as a set."""
    els = sorted(elements)
    gens = []
    span = {G.identity}
    for g in els:
        if g in span:
            continue
        gens.append(g)
        span = mulclose(gens, G.mul, maxsize=len(elements))
        if len(span) == len(elements):
            break
    return gens


# ---------------------------------------------------------------------------
# quadratic extension GF(q^2) = GF(q)(alpha), used to build the dihedral
# families: alpha^2 = theta0 (odd q, theta0 the nonsquare of 2-power order
# from the paper's setup) or alpha^2 = alpha + theta0 (even q, theta0 of
# absolute trace 1).

class QuadExt:
    def __init__(self, G: GroupCtx):
        f = G.f
        self.G = G
        self.f = f
        q = f.q
        if f.p == 2:
            one_trace = None
            for x in range(1, q):
                t = 0
                y = x
                for _ in range(f.n):
                    t = f.add(t, y)
                    y = f.mul(y, y)
                if t == 1:
                    one_trace = x
                    break
            assert one_trace is not None
            self.theta0 = one_trace
            self.even = True
        else:
            k = q - 1
            while k % 2 == 0:
                k //= 2
            self.theta0 = f.pow(f.theta, k)  # |theta0| = 2^l, a nonsquare
            self.even = False

    def mul(self, z1, z2):
        f = self.f
        x1, y1 = z1
        x2, y2 = z2
        yy = f.mul(y1, y2)
        x = f.add(f.mul(x1, x2), f.mul(yy, self.theta0))
        y = f.add(f.mul(x1, y2), f.mul(y1, x2))
        if self.even:
            y = f.add(y, yy)
        return (x, y)

    def pow(self, z, e):
        r = (1, 0)
        while e:
            if e & 1:
                r = self.mul(r, z)
            z = self.mul(z, z)
            e >>= 1
        return r

    def generator(self):
        """First (x, y) in lexicographic order generating GF(q^2)*."""
        q = self.f.q
        primes = factorize(q * q - 1)
        for x in range(q):
            for y in range(1, q):
                z = (x, y)
                if all(self.pow(z, (q * q - 1) // r) != (1, 0) for r in primes):
                    return z
        raise SearchExhausted("no generator of GF(q^2)* found")  # unreachable

    def phi(self, z):
        """The embedding GF(q^2)*/GF(q)* -> PGL(2,q) as a group element."""
        x, y = z
        f = self.f
        if self.even:
            return self.G.mat(x, f.mul(y, self.theta0), y, f.add(x, y))
        return self.G.mat(x, f.mul(y, self.theta0), y, x)

    def conj_involution(self):
        """The projective image J of the q-power map on GF(q^2): an
        involution with J phi(z) J = phi(z^q), so J inverts every phi(z)."""
        f = self.f
        if self.even:
            return self.G.mat(1, 1, 0, 1)
        return self.G.mat(1, 0, 0, f.neg(1))


# ---------------------------------------------------------------------------
# family constructors

def _finish_spec(G: GroupCtx, family, params, level, m0_gens, m0_set,
                 expected_m0_order, maximal_warning=None, explicit_ext=None):
    """Extend M0 <= T by one normalizing coset representative per level
    signature generator, close, and package the SubgroupSpec."""
    assert len(m0_set) == expected_m0_order, \
        f"{family}: |M0| = {len(m0_set)}, expected {expected_m0_order}"
    sig_set = level.signature_set(G.d, G.n)
    gens = list(m0_gens)
    if len(sig_set) > 1:
        ext = explicit_ext if explicit_ext is not None else \
            _normalizing_coset_reps(G, m0_gens, m0_set, level)
        gens.extend(ext)
        elements = frozenset(mulclose(gens, G.mul))
    else:
        elements = frozenset(m0_set)
    order = expected_m0_order * len(sig_set)
    assert len(elements) == order, \
        f"{family}: closed to {len(elements)} elements, expected {order}"
    warnings = (maximal_warning,) if maximal_warning else ()
    return SubgroupSpec(family=family, params=params, level=level,
                        generators=gens, elements=elements, order=order,
                        maximal=maximal_warning is None, warnings=warnings)


def _normalizing_coset_reps(G: GroupCtx, m0_gens, m0_set, level: GroupLevel):
    """For each signature generator of the level, the first element of the
    corresponding T-coset (in enumeration order) normalizing M0."""
    reps = []
    for sig in level.signature_generators(G.d, G.n):
        rep = G.coset_rep(sig)
        found = None
        for t in G.t_elements():
            x = G.mul(t, rep)
            if all(G.conj(g, x) in m0_set for g in m0_gens):
                found = x
                break
        if found is None:
            raise ConditionsNotMet(
                f"no element of signature {sig} normalizes M0 (class not stable)")
        reps.append(found)
    return reps


def dihedral_plus(f: FieldCtx, level: GroupLevel = GroupLevel("T")) -> SubgroupSpec:
    """The D_(2(q+1)/d) family: M0 = <s^2, b> for odd q (order q+1) or
    <s, J> for even q (order 2(q+1)), s the image of a generator of
    GF(q^2)* and J the projective q-power map."""
    G = group_ctx(f)
    ext = QuadExt(G)
    s = ext.phi(ext.generator())
    t = ext.conj_involution()
    q = f.q
    if f.p == 2:
        m0_gens = [s, t]
        m0_order = 2 * (q + 1)
    else:
        a = G.mul(s, s)
        b = t if f.is_square(f.neg(1)) else G.mul(s, t)
        m0_gens = [a, b]
        m0_order = q + 1
    m0_set = mulclose(m0_gens, G.mul, maxsize=2 * (q + 1) + 1)
    warning = maximality_exception("d-plus", q)
    explicit = None
    if level.tag == "PGL" and f.p != 2:
        explicit = [s]  # s has nonsquare determinant and normalizes M0
    return _finish_spec(G, "d-plus", {"q": q}, level, m0_gens, m0_set,
                        m0_order, warning, explicit)


def dihedral_minus(f: FieldCtx, level: GroupLevel = GroupLevel("T")) -> SubgroupSpec:
    """The D_(2(q-1)/d) family: the setwise stabilizer of {0, INF}, with
    M0 = <diag(1,theta^2), [[0,-1],[1,0]]> of order q-1 for odd q."""
    G = group_ctx(f)
    q = f.q
    s = G.mat(1, 0, 0, f.pow(f.theta, 2))
    v = G.mat(0, f.neg(1), 1, 0)
    m0_gens = [s, v]
    m0_order = q - 1 if f.p != 2 else 2 * (q - 1)
    if f.p == 2:
        m0_gens = [G.mat(1, 0, 0, f.theta), v]
    m0_set = mulclose(m0_gens, G.mul, maxsize=2 * (q - 1) + 1)
    warning = maximality_exception("d-minus", q)
    # delta and f both stabilize {0, INF}, so explicit reps always exist
    explicit = [G.coset_rep(sig) for sig in level.signature_generators(G.d, G.n)]
    return _finish_spec(G, "d-minus", {"q": q}, level, m0_gens, m0_set,
                        m0_order, warning, explicit)


def borel(f: FieldCtx, level: GroupLevel = GroupLevel("T")) -> SubgroupSpec:
    """The point stabilizer Z_p^n : Z_((q-1)/d) of INF (upper triangulars)."""
    G = group_ctx(f)
    q = f.q
    gens = [((1, f.pow(f.theta, j), 0, 1), 0) for j in range(f.n)]
    if q > 3:
        gens.append(G.mat(1, 0, 0, f.pow(f.theta, G.d)))
    m0_set = mulclose(gens, G.mul, maxsize=q * (q - 1) + 1)
    m0_order = q * (q - 1) // G.d
    explicit = [G.coset_rep(sig) for sig in level.signature_generators(G.d, G.n)]
    return _finish_spec(G, "borel", {"q": q}, level, gens, m0_set,
                        m0_order, None, explicit)


def _subfield_matrices(G: GroupCtx, m: int, pgl_form: bool):
    f = G.f
    sub = f.subfield(m)
    sub_units = sorted(sub - {0})
    if pgl_form or f.p == 2:
        dets = sub_units
    else:
        # squares of GF(p^m)*: even powers of a subfield generator
        theta_m = next(x for x in sub_units if
                       f.element_order(x) == f.p ** m - 1)
        half = (f.p ** m - 1) // 2
        dets = sorted({f.pow(theta_m, 2 * j) for j in range(half)})
    out = []
    for b in sub:
        for c in sub:
            bc = f.mul(b, c)
            for s in dets:
                out.append(((1, b, c, f.add(bc, s)), 0))
    for s in dets:
        cneg = f.neg(s)
        for d in sub:
            out.append(((0, 1, cneg, d), 0))
    return out


def subfield(f: FieldCtx, m: int, level: GroupLevel = GroupLevel("T")) -> SubgroupSpec:
    """M0 = PSL(2,p^m) embedded via subfield entries; n/m an odd prime, or
    p = 2 and n = 2m."""
    G = group_ctx(f)
    n, p = f.n, f.p
    if n % m != 0:
        raise BadSubfieldDegree(f"{m} does not divide {n}")
    ratio = n // m
    if not (_is_odd_prime(ratio) or (p == 2 and n == 2 * m)):
        raise BadSubfieldDegree(
            f"n/m = {ratio} must be an odd prime (or p=2 with n=2m)")
    pm = p ** m
    m0_list = _subfield_matrices(G, m, pgl_form=False)
    m0_order = pm * (pm * pm - 1) // math.gcd(2, pm - 1)
    m0_set = frozenset(m0_list)
    gens = subgroup_generators(G, m0_set)
    # delta_m = diag(1, theta_m) and f normalize the subfield copy
    sub_units = sorted(f.subfield(m) - {0})
    theta_m = next(x for x in sub_units if f.element_order(x) == pm - 1)
    # delta_m = diag(1, theta_m) has nonsquare determinant in GF(q) because
    # the index of the subfield unit group is odd here; f fixes the subfield
    # entrywise.  Both normalize M0, giving explicit coset representatives.
    explicit = []
    for s, e in level.signature_generators(G.d, G.n):
        if s and p != 2 and f.is_square(theta_m):
            raise ConditionsNotMet("subfield delta representative lies in T")
        mat = IDENT_MAT if s == 0 else (1, 0, 0, theta_m)
        explicit.append((mat, e))
    return _finish_spec(G, "subfield", {"q": f.q, "m": m}, level, gens,
                        m0_set, m0_order, None, explicit)


def pgl_subfield(f: FieldCtx, m: int, level: GroupLevel = GroupLevel("T")) -> SubgroupSpec:
    """M0 = PGL(2,p^m) <= PSL(2,p^(2m)), p odd, n = 2m."""
    G = group_ctx(f)
    if f.p == 2:
        raise BadSubfieldDegree("PGL-subfield family needs odd p")
    if f.n != 2 * m:
        raise BadSubfieldDegree(f"need n = 2m, got n = {f.n}, m = {m}")
    pm = f.p ** m
    m0_list = _subfield_matrices(G, m, pgl_form=True)
    m0_set = frozenset(m0_list)
    assert all(f.is_square(G.det(g)) for g in m0_list[:8])
    m0_order = pm * (pm * pm - 1)
    gens = subgroup_generators(G, m0_set)
    return _finish_spec(G, "pgl-subfield", {"q": f.q, "m": m}, level, gens,
                        m0_set, m0_order, None, None)


def _is_odd_prime(r):
    if r < 3 or r % 2 == 0:
        return False
    return all(r % d for d in range(3, math.isqrt(r) + 1, 2))


_EXC_TARGET = {"A4": (3, 12), "S4": (4, 24), "A5": (5, 60)}


def exceptional(f: FieldCtx, typ: str, level: GroupLevel = GroupLevel("T")):
    """A4 / S4 / A5 subgroups of T, one SubgroupSpec per T-conjugacy class.

    Found by deterministic search for (x, y) with |x| = 2, |y| = 3 and
    |xy| = 3, 4, 5 respectively (those presentations pin the groups), then
    closed.  Class count decided by testing whether the delta-twist is
    T-conjugate back.
    """
    G = group_ctx(f)
    if typ not in _EXC_TARGET:
        raise GroupError(f"unknown exceptional type {typ}")
    target_xy, target_order = _EXC_TARGET[typ]
    _check_exceptional_conditions(f, typ)
    x0 = next(g for g in G.t_elements()
              if g != G.identity and G.mul(g, g) == G.identity)
    first = None
    for y in G.t_elements():
        yy = G.mul(y, y)
        if y == G.identity or G.mul(yy, y) != G.identity:
            continue
        xy = G.mul(x0, y)
        k = 1
        h = xy
        while h != G.identity and k <= target_xy:
            h = G.mul(h, xy)
            k += 1
        if k != target_xy:
            continue
        cand = mulclose([x0, y], G.mul, maxsize=target_order + 1)
        if len(cand) == target_order:
            first = ([x0, y], frozenset(cand))
            break
    if first is None:
        raise SearchExhausted(f"no {typ} found in PSL(2,{f.q})")
    gens, k1 = first
    classes = [(gens, k1)]
    if G.d == 2:
        delta = G.coset_rep((1, 0))
        k2_gens = [G.conj(g, delta) for g in gens]
        k2 = frozenset(G.conj(g, delta) for g in k1)
        if not _t_conjugate(G, gens, k1, k2):
            classes.append((k2_gens, k2))
    warning = maximality_exception(typ.lower(), f.q) if typ == "A4" else None
    out = []
    for cgens, cset in classes:
        out.append(_finish_spec(G, typ.lower(), {"q": f.q}, level, cgens, cset,
                                target_order, warning, None))
    return out


def _check_exceptional_conditions(f: FieldCtx, typ: str):
    q, p, n = f.q, f.p, f.n
    if typ == "A4":
        ok = (p == 2 and n % 2 == 0) or q % 2 == 1
    elif typ == "S4":
        ok = q % 8 in (1, 7)
    else:  # A5
        ok = (q % 5 in (1, 4)) and (n == 1 or (n == 2 and p % 5 in (2, 3) and p != 2))
    if not ok:
        raise ConditionsNotMet(f"{typ} does not arise as a subgroup family at q = {q}")


def _t_conjugate(G: GroupCtx, k1_gens, k1_set, k2_set) -> bool:
    if k1_set == k2_set:
        return True
    for t in G.t_elements():
        if all(G.conj(g, t) in k2_set for g in k1_gens):
            return True
    return False


def dihedral_plus_presentation(f: FieldCtx) -> dict:
    """The explicit D_(q+1).Z_n data for odd q: a = s^2, b, c with the case
    split on (p mod 4, parity of n), plus the raw s, t, w pieces.

    b and c are chosen so that M0 = <a, b> = D_(q+1) and c normalizes M0
    with a^c = a^p, c^n = t, and c^(n/r) = f^(n/r) t for odd primes r | n.
    """
    G = group_ctx(f)
    if f.p == 2:
        raise UnsupportedCase("presentation is for odd q")
    ext = QuadExt(G)
    s = ext.phi(ext.generator())
    t = ext.conj_involution()          # diag(1, -1)
    w = G.mat(1, 0, 0, f.pow(ext.theta0, (1 - f.p) // 2))
    fe = (IDENT_MAT, 1 % G.n)
    if f.p % 4 == 3 and f.n % 2 == 1:
        case, b, c = "i", G.mul(s, t), G.mul(fe, w)
    elif f.p % 4 == 1:
        case, b, c = "ii", t, G.mul(fe, w)
    else:
        case = "iii"
        b = t
        c = G.mul(G.mul(fe, w), G.power(s, (f.q + 1) // 2))
    return {"case": case, "s": s, "t": t, "w": w, "f": fe,
            "a": G.mul(s, s), "b": b, "c": c, "theta0": ext.theta0}


def subgroup_conjugacy_classes(G: GroupCtx, K: frozenset, H: frozenset,
                               within=None):
    """H-conjugacy classes of the conjugates of K (under `within`, default H)
    that lie inside H.  Returns one representative frozenset per class."""
    if within is None:
        within = H
    if not K <= H and within is H:
        raise NotSubset("K must lie in H when conjugating within H")
    k_sorted = sorted(K)
    conjs = set()
    for g in within:
        img = frozenset(G.conj(k, g) for k in k_sorted)
        if img <= H:
            conjs.add(img)
    h_sorted = sorted(H)
    classes = []
    seen = set()
    for c in sorted(conjs, key=sorted):
        if c in seen:
            continue
        orbit = {c}
        frontier = [c]
        while frontier:
            cur = frontier.pop()
            for h in h_sorted:
                img = frozenset(G.conj(k, h) for k in cur)
                if img not in orbit:
                    orbit.add(img)
                    frontier.append(img)
        seen |= orbit
        classes.append(min(orbit, key=sorted))
    return classes

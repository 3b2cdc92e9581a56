"""Exact arithmetic in GF(p^n), quadratic characters, and Galois subroutines.

Elements are stored as plain ints in [0, q): the integer c0 + c1*p + ... +
c_{n-1}*p^{n-1} encodes the polynomial representative c0 + c1*x + ... over
GF(p).  All field operations go through log/antilog tables plus a Zech
logarithm table for addition, so every operation is O(1) after the context
is built.  `FieldElement` is a thin wrapper used at API boundaries; the
group-theory layers work on the raw ints via the `FieldCtx` methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


DESK_CEILING = 2 ** 20  # largest field order the constructor will accept
EAGER_TABLE_LIMIT = 2 ** 16  # log/Zech tables built eagerly up to this q


class FieldError(Exception):
    pass


class NotPrime(FieldError):
    pass


class Reducible(FieldError):
    pass


class TooLarge(FieldError):
    pass


class DivisionByZero(FieldError):
    pass


class EvenCharacteristic(FieldError):
    pass


class NotSubfieldDegree(FieldError):
    pass


class NonzeroTrace(FieldError):
    pass


class NonUnitNorm(FieldError):
    pass


class BadT(FieldError):
    pass


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for d in range(2, math.isqrt(m) + 1):
        if m % d == 0:
            return False
    return True


def factorize(m: int) -> list[int]:
    """Distinct prime factors of m, ascending."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# raw polynomial arithmetic over GF(p), used only during context construction

def _poly_degree(f):
    for i in range(len(f) - 1, -1, -1):
        if f[i]:
            return i
    return -1


def _poly_mod(f, g, p):
    """Remainder of f by g over GF(p); g monic."""
    f = list(f)
    dg = _poly_degree(g)
    df = _poly_degree(f)
    while df >= dg:
        c = f[df]
        if c:
            shift = df - dg
            for i in range(dg + 1):
                f[i + shift] = (f[i + shift] - c * g[i]) % p
        df -= 1
    return f[:dg]


def _poly_mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return out


def _is_irreducible(f, p):
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    n = _poly_degree(f)
    if n < 1:
        return False
    if f[0] == 0:  # divisible by x
        return n == 1
    for d in range(1, n // 2 + 1):
        for code in range(p ** d):
            g = _decode_poly(code, p, d) + [1]
            if _poly_degree(_poly_mod(f, g, p)) < 0:
                return False
    return True


def _decode_poly(code, p, length):
    out = []
    for _ in range(length):
        out.append(code % p)
        code //= p
    return out


def _encode_poly(coeffs, p):
    out = 0
    for c in reversed(coeffs):
        out = out * p + c
    return out


class FieldCtx:
    """Arithmetic context for GF(p^n).

    Immutable after construction; all methods are pure, so a context may be
    shared freely across threads.
    """

    def __init__(self, p: int, n: int, modulus=None, ceiling: int = DESK_CEILING):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if n < 1:
            raise FieldError(f"extension degree must be >= 1, got {n}")
        q = p ** n
        if q > ceiling:
            raise TooLarge(f"q = {q} exceeds ceiling {ceiling}")
        self.p = p
        self.n = n
        self.q = q
        if modulus is None:
            modulus = self._smallest_irreducible(p, n)
        else:
            modulus = list(modulus)
            if len(modulus) != n + 1 or modulus[n] != 1:
                raise Reducible(f"modulus must be monic of degree {n}")
            modulus = [c % p for c in modulus]
            if n > 1 and not _is_irreducible(modulus, p):
                raise Reducible(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = tuple(modulus)
        self._build_tables()
        # frobenius lookup: _frob[k][x] = x^(p^k)
        self._frob = [list(range(q))]
        for _ in range(1, n):
            prev = self._frob[-1]
            self._frob.append([self.pow(x, p) for x in prev])

    @staticmethod
    def _smallest_irreducible(p, n):
        if n == 1:
            return [0, 1]  # x itself; reduction is plain mod p
        for code in range(p ** n):
            f = _decode_poly(code, p, n) + [1]
            if _is_irreducible(f, p):
                return f
        raise Reducible(f"no irreducible of degree {n} over GF({p})")  # unreachable

    def _mul_raw(self, a: int, b: int) -> int:
        """Polynomial product with reduction, table-free (construction only)."""
        p, n = self.p, self.n
        prod = _poly_mul(_decode_poly(a, p, n), _decode_poly(b, p, n), p)
        red = _poly_mod(prod, list(self.modulus), p)
        red += [0] * (n - len(red))
        return _encode_poly(red, p)

    def _order_raw(self, x: int, mul) -> int:
        k, y = 1, x
        while y != 1:
            y = mul(y, x)
            k += 1
        return k

    def _build_tables(self):
        p, n, q = self.p, self.n, self.q
        # find theta: smallest element (int encoding order) of multiplicative
        # order q-1
        primes = factorize(q - 1) if q > 2 else []

        def raw_pow(x, e):
            r = 1
            while e:
                if e & 1:
                    r = self._mul_raw(r, x)
                x = self._mul_raw(x, x)
                e >>= 1
            return r

        theta = None
        for cand in range(1, q):
            if q == 2:
                theta = 1
                break
            if all(raw_pow(cand, (q - 1) // r) != 1 for r in primes):
                theta = cand
                break
        assert theta is not None
        self.theta = theta

        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        acc = 1
        for k in range(q - 1):
            exp[k] = acc
            exp[k + q - 1] = acc
            log[acc] = k
            acc = self._mul_raw(acc, theta)
        assert acc == 1, "theta does not have order q-1"
        self._exp = exp
        self._log = log

        # zech[k] = log(1 + theta^k), or -1 when 1 + theta^k = 0
        one_plus = [0] * (q - 1)
        if p == 2:
            for k in range(q - 1):
                one_plus[k] = exp[k] ^ 1
        else:
            for k in range(q - 1):
                x = exp[k]
                c0 = (x + 1) % p
                one_plus[k] = x - (x % p) + c0
        self._zech = [log[v] if v else -1 for v in one_plus]

    # -- scalar ops on int-encoded elements --------------------------------

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        d = lb - la
        if d < 0:
            d += self.q - 1
        z = self._zech[d]
        if z < 0:
            return 0
        return self._exp[la + z]

    def neg(self, a: int) -> int:
        if a == 0 or self.p == 2:
            return a
        return self._exp[self._log[a] + (self.q - 1) // 2]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return self._exp[(self.q - 1) - self._log[a]] if self._log[a] else 1

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise DivisionByZero("division by 0")
        if a == 0:
            return 0
        d = self._log[a] - self._log[b]
        if d < 0:
            d += self.q - 1
        return self._exp[d]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("0 to a negative power")
            return 0 if e else 1
        k = (self._log[a] * e) % (self.q - 1)
        return self._exp[k]

    def frob(self, a: int, k: int = 1) -> int:
        return self._frob[k % self.n][a]

    def element_order(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no multiplicative order")
        return (self.q - 1) // math.gcd(self._log[a], self.q - 1)

    def eta(self, a: int) -> int:
        """Quadratic character: +1 on squares of F_q*, -1 on nonsquares, 0 at 0."""
        if self.p == 2:
            raise EvenCharacteristic("eta is defined for odd q only")
        if a == 0:
            return 0
        return -1 if self._log[a] & 1 else 1

    def is_square(self, a: int) -> bool:
        if self.p == 2:
            return True
        return a == 0 or self._log[a] % 2 == 0

    def sqrt(self, a: int) -> int:
        """A square root of a; raises if a is a nonsquare."""
        if a == 0:
            return 0
        la = self._log[a]
        if self.p == 2:
            # squaring is a bijection; root = a^(q/2)
            return self.pow(a, self.q // 2)
        if la & 1:
            raise FieldError(f"{a} is not a square")
        return self._exp[la // 2]

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(_decode_poly(a, self.p, self.n))

    def from_coeffs(self, coeffs) -> int:
        return _encode_poly([c % self.p for c in coeffs], self.p)

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def squares_set(self) -> frozenset:
        """S* = squares of F_q* (all of F_q* when p = 2)."""
        if self.p == 2:
            return frozenset(range(1, self.q))
        return frozenset(self._exp[2 * k] for k in range((self.q - 1) // 2))

    def nonsquares_set(self) -> frozenset:
        if self.p == 2:
            return frozenset()
        return frozenset(range(1, self.q)) - self.squares_set()

    def subfield(self, m: int) -> frozenset:
        """The subfield GF(p^m) inside this field, as a set of elements."""
        if self.n % m != 0:
            raise NotSubfieldDegree(f"{m} does not divide {self.n}")
        frob_m = self._frob[m % self.n] if m < self.n else list(range(self.q))
        return frozenset(x for x in range(self.q) if frob_m[x] == x)

    def header(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "q": self.q,
            "modulus": list(self.modulus),
            "theta": self.theta,
        }

    def __repr__(self):
        return f"FieldCtx(GF({self.p}^{self.n}), modulus={list(self.modulus)}, theta={self.theta})"

    def __call__(self, v) -> "FieldElement":
        if isinstance(v, FieldElement):
            return v
        return FieldElement(self, v % self.q if isinstance(v, int) else self.from_coeffs(v))


@lru_cache(maxsize=None)
def make_field(p: int, n: int = 1, modulus=None) -> FieldCtx:
    """Build (and memoize) a GF(p^n) context.

    With modulus omitted the lexicographically smallest monic irreducible
    (coefficients compared low-degree-first) is chosen, so results are
    reproducible across runs.
    """
    return FieldCtx(p, n, modulus)


@dataclass(frozen=True)
class FieldElement:
    """A field element as (context, int code); supports the usual operators."""

    ctx: FieldCtx
    val: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.val)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx:
                raise FieldError("elements from different field contexts")
            return other.val
        return other % self.ctx.q if isinstance(other, int) else NotImplemented

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.val, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.val, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._coerce(other), self.val))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.val, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.val, self._coerce(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self._coerce(other), self.val))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.val, e))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.val))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.ctx is other.ctx and self.val == other.val
        if isinstance(other, int):
            return self.val == other % self.ctx.q
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.val))

    def __int__(self):
        return self.val

    def __repr__(self):
        return f"FieldElement({self.val} in GF({self.ctx.p}^{self.ctx.n}))"


def _val(x) -> int:
    return x.val if isinstance(x, FieldElement) else x


def field_arith(a, b, op: str):
    """Single dispatch point for the binary field operations.

    `op` is one of add, sub, mul, div, pow, inv (inv ignores b).  Inputs may
    be FieldElements or raw ints; the context is taken from whichever input
    carries one.
    """
    ctx = a.ctx if isinstance(a, FieldElement) else b.ctx
    av = _val(a)
    if op == "inv":
        return FieldElement(ctx, ctx.inv(av))
    if op == "pow":
        return FieldElement(ctx, ctx.pow(av, b if isinstance(b, int) else _val(b)))
    bv = _val(b)
    fn = {"add": ctx.add, "sub": ctx.sub, "mul": ctx.mul, "div": ctx.div}[op]
    return FieldElement(ctx, fn(av, bv))


def eta(x) -> int:
    if not isinstance(x, FieldElement):
        raise FieldError("eta needs a FieldElement (context required)")
    return x.ctx.eta(x.val)


def frobenius(x: FieldElement, k: int) -> FieldElement:
    return FieldElement(x.ctx, x.ctx.frob(x.val, k))


def trace_norm_rel(x: FieldElement, m: int) -> tuple[FieldElement, FieldElement]:
    """Trace and norm of x relative to the subfield GF(p^m).

    trace = sum of x^(p^(m*j)), norm = product, j = 0 .. n/m - 1; both land
    in GF(p^m).
    """
    ctx = x.ctx
    if ctx.n % m != 0:
        raise NotSubfieldDegree(f"{m} does not divide {ctx.n}")
    t, nm = 0, 1
    for j in range(ctx.n // m):
        conj = ctx.frob(x.val, (m * j) % ctx.n)
        t = ctx.add(t, conj)
        nm = ctx.mul(nm, conj)
    return FieldElement(ctx, t), FieldElement(ctx, nm)


# ---------------------------------------------------------------------------
# Hilbert 90 solvers

def _gf_p_solve(rows, rhs, p):
    """Solve M c = rhs over GF(p) by Gaussian elimination.

    rows is a list of n rows of length n (column-major application:
    (M c)_i = sum_j rows[i][j] c_j).  Returns the solution with every free
    variable set to 0 (the canonical coset representative), or None.
    """
    n = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if aug[i][col] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][col], -1, p)
        aug[r] = [(v * inv) % p for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, n):
        if aug[i][n] % p:
            return None
    sol = [0] * n
    for i, col in enumerate(pivots):
        sol[col] = aug[i][n]
    return sol


def hilbert90_additive(d: FieldElement, m: int) -> FieldElement:
    """Solve c - c^(sigma^m) = d, given the relative trace of d is zero.

    The map L(c) = c - c^(p^m) is GF(p)-linear with kernel GF(p^m); the
    returned solution is the canonical coset representative obtained by
    zeroing every free coordinate in the Gaussian elimination.
    """
    ctx = d.ctx
    if ctx.n % m != 0:
        raise NotSubfieldDegree(f"{m} does not divide {ctx.n}")
    tr, _ = trace_norm_rel(d, m)
    if tr.val != 0:
        raise NonzeroTrace(f"relative trace of {d.val} is {tr.val}, not 0")
    n, p = ctx.n, ctx.p
    basis = [ctx.from_coeffs([1 if i == j else 0 for i in range(n)]) for j in range(n)]
    cols = [ctx.coeffs(ctx.sub(b, ctx.frob(b, m))) for b in basis]
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    sol = _gf_p_solve(rows, list(ctx.coeffs(d.val)), p)
    assert sol is not None, "trace-zero element outside the image of c - c^sigma^m"
    c = ctx.from_coeffs(sol)
    return FieldElement(ctx, c)


def hilbert90_multiplicative(d: FieldElement, m: int) -> FieldElement:
    """Solve c * (c^(sigma^m))^-1 = d, given the relative norm of d is 1.

    Solved on discrete logs: with d = theta^k we need j(1 - p^m) = k mod q-1;
    the smallest non-negative j is returned, so the answer is deterministic.
    """
    ctx = d.ctx
    if ctx.n % m != 0:
        raise NotSubfieldDegree(f"{m} does not divide {ctx.n}")
    if d.val == 0:
        raise NonUnitNorm("norm of 0 is not 1")
    _, nm = trace_norm_rel(d, m)
    if nm.val != 1:
        raise NonUnitNorm(f"relative norm of {d.val} is {nm.val}, not 1")
    qm1 = ctx.q - 1
    k = ctx._log[d.val]
    a = (1 - ctx.p ** m) % qm1
    g = math.gcd(a, qm1)
    assert k % g == 0, "norm-one element with unsolvable log congruence"
    a_, k_, n_ = a // g, k // g, qm1 // g
    j = (k_ * pow(a_, -1, n_)) % n_
    return FieldElement(ctx, ctx._exp[j])


# ---------------------------------------------------------------------------
# character sums

def char_sum_cubic(t) -> int:
    """m = sum over x in F_q of eta(x (x-1) (x-t)); |m| <= 2 sqrt(q)."""
    ctx = t.ctx if isinstance(t, FieldElement) else None
    if ctx is None:
        raise FieldError("char_sum_cubic needs a FieldElement")
    if ctx.p == 2:
        raise EvenCharacteristic("character sums need odd q")
    tv = t.val
    total = 0
    one = 1
    for x in range(ctx.q):
        v = ctx.mul(ctx.mul(x, ctx.sub(x, one)), ctx.sub(x, tv))
        total += ctx.eta(v)
    assert total * total <= 4 * ctx.q, "Weil bound violated (transcription bug)"
    return total


def feng_count(t) -> int:
    """|(1+N) ∩ (t+N) ∩ S*|: the count of x in S* with x-1 and x-t nonsquares."""
    ctx = t.ctx if isinstance(t, FieldElement) else None
    if ctx is None:
        raise FieldError("feng_count needs a FieldElement")
    if ctx.p == 2:
        raise EvenCharacteristic("feng_count needs odd q")
    tv = t.val
    if tv in (0, 1):
        raise BadT("t must avoid 0 and 1")
    count = 0
    for x in range(1, ctx.q):
        if ctx.eta(x) == 1 and ctx.eta(ctx.sub(x, 1)) == -1 and ctx.eta(ctx.sub(x, tv)) == -1:
            count += 1
    return count


def feng_w_formula(t) -> int:
    """The closed form (1/8)[q - 3 + m + l] for feng_count, m the cubic
    character sum and l the two-branch correction keyed on eta(-1)."""
    ctx = t.ctx
    tv = t.val
    m = char_sum_cubic(t)
    e = ctx.eta
    t2t = ctx.sub(ctx.mul(tv, tv), tv)  # t^2 - t
    if e(ctx.neg(1)) == 1:
        l = 3 * e(ctx.sub(tv, 1)) + e(t2t) + 1 - e(tv)
    else:
        l = e(ctx.sub(1, tv)) + e(t2t) - 3 * e(tv) - 1
    assert abs(l) <= 4
    num = ctx.q - 3 + m + l
    assert num % 8 == 0, "W-formula numerator not divisible by 8"
    return num // 8

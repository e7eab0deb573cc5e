"""Exact base arithmetic: p-adic valuations of rationals, cyclotomic field
elements, and valuations at a chosen prime above p in Q(zeta_f).

Rationals are plain ``fractions.Fraction`` (arbitrary precision, always in
lowest terms with positive denominator, zero is 0/1).

An element of Q(zeta_f) is stored as the coefficient vector of its unique
representative of degree < phi(f) modulo the f-th cyclotomic polynomial.
Conductors are capped at MAX_CONDUCTOR to bound polynomial degrees.

A ``PadicContext`` fixes a prime above p in Q(zeta_f) for p not dividing f:
it factors the f-th cyclotomic polynomial mod p (all factors share degree
d = ord of p in (Z/f)^*), Hensel-lifts every factor to mod p^s, and selects
the lexicographically smallest one (ascending coefficient sequence, entries
normalized into [0, p)).  The extension is unramified, so e = 1 and the
pi-adic valuation of an element equals the minimum p-valuation of its
coordinates in the degree-d unramified quotient Z[x]/(p^s, g(x)).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import (
    ConductorTooLargeError,
    IndeterminateValuationError,
    ParameterError,
    RamifiedPrimeError,
)

INF = float("inf")

MAX_CONDUCTOR = 512


# ---------------------------------------------------------------------------
# elementary number theory
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@functools.lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, e), ...) with p ascending."""
    if n < 1:
        raise ParameterError(f"cannot factor {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def mult_order(a: int, n: int) -> int:
    """Multiplicative order of a modulo n (a coprime to n); order 1 for n = 1."""
    if n == 1:
        return 1
    a %= n
    if gcd(a, n) != 1:
        raise ParameterError(f"{a} is not a unit mod {n}")
    o, x = 1, a
    while x != 1:
        x = x * a % n
        o += 1
    return o


def valp_int(n: int, p: int):
    """p-adic valuation of an integer; INF for zero."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valp_rational(x: Fraction, p: int):
    """p-adic valuation of a rational number; INF for zero.

    Returns t with x = p^t * (p-unit).
    """
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        return INF
    return valp_int(x.numerator, p) - valp_int(x.denominator, p)


def teichmuller(a: int, p: int, s: int) -> int:
    """Teichmuller representative of a mod p^s: the unique w with
    w = a mod p and w^(p-1) = 1 mod p^s, computed as a^(p^(s-1)) mod p^s."""
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if s < 1:
        raise ParameterError("precision must be >= 1")
    if a % p == 0:
        raise ParameterError(f"{a} is divisible by {p}")
    return pow(a, p ** (s - 1), p**s)


# ---------------------------------------------------------------------------
# polynomial helpers (ascending coefficient lists)
# ---------------------------------------------------------------------------

def _poly_divmod_q(num: list[Fraction], den: list[Fraction]):
    """Quotient and remainder of Fraction polynomials, den monic."""
    num = list(num)
    dd = len(den) - 1
    q = [Fraction(0)] * max(len(num) - dd, 0)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    while num and num[-1] == 0:
        num.pop()
    return q, num


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(f: int) -> tuple[int, ...]:
    """Coefficients of the f-th cyclotomic polynomial, ascending, degree phi(f)."""
    if f < 1:
        raise ParameterError("conductor must be positive")
    if f > MAX_CONDUCTOR:
        raise ConductorTooLargeError(f"conductor {f} exceeds guard {MAX_CONDUCTOR}")
    num = [Fraction(-1)] + [Fraction(0)] * (f - 1) + [Fraction(1)]
    for d in range(1, f):
        if f % d == 0:
            num, rem = _poly_divmod_q(num, [Fraction(c) for c in cyclotomic_poly(d)])
            if rem:
                raise AssertionError("cyclotomic division left a remainder")
    return tuple(int(c) for c in num)


def _trim_mod(a: list[int], m: int) -> list[int]:
    a = [c % m for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul_mod(a: list[int], b: list[int], m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % m
    return _trim_mod(out, m)


def _psub_mod(a: list[int], b: list[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _pdivmod_mod(a: list[int], b: list[int], m: int):
    """Division with remainder mod m; leading coefficient of b must be a unit."""
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, m)
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % m
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % m
    return _trim_mod(q, m), _trim_mod(a[:db], m)


def _pgcd_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim_mod(list(a), p), _trim_mod(list(b), p)
    while b:
        _, r = _pdivmod_mod(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _pxgcd_mod(a: list[int], b: list[int], p: int):
    """Extended gcd over F_p: returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = _trim_mod(list(a), p), _trim_mod(list(b), p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _pdivmod_mod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _psub_mod(s0, _pmul_mod(q, s1, p), p)
        t0, t1 = t1, _psub_mod(t0, _pmul_mod(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0])


def _ppow_mod(a: list[int], e: int, mod_poly: list[int], p: int) -> list[int]:
    r = [1]
    a = _pdivmod_mod(a, mod_poly, p)[1]
    while e:
        if e & 1:
            r = _pdivmod_mod(_pmul_mod(r, a, p), mod_poly, p)[1]
        a = _pdivmod_mod(_pmul_mod(a, a, p), mod_poly, p)[1]
        e >>= 1
    return r


def _equal_degree_split(F: list[int], d: int, p: int) -> list[list[int]]:
    """Split a squarefree product of degree-d irreducibles over F_p.

    Cantor-Zassenhaus with a deterministic candidate sequence (x + c, then
    x^2 + c, ...) so repeated runs factor identically.
    """
    if len(F) - 1 == d:
        return [F]
    if p == 2:
        raise ParameterError("p = 2 splitting not supported")
    candidates = ([[c, 1] for c in range(p)] + [[c, 0, 1] for c in range(p)]
                  + [[c, 1, 0, 1] for c in range(p)])
    exp = (p**d - 1) // 2
    for r in candidates:
        w = _psub_mod(_ppow_mod(r, exp, F, p), [1], p)
        g = _pgcd_mod(F, w, p)
        if 0 < len(g) - 1 < len(F) - 1:
            q, rem = _pdivmod_mod(F, g, p)
            if rem:
                raise AssertionError("split factor does not divide")
            return _equal_degree_split(g, d, p) + _equal_degree_split(q, d, p)
    raise AssertionError("equal-degree splitting exhausted its candidates")


def _hensel_lift_factor(full: list[int], g0: list[int], p: int, s: int) -> list[int]:
    """Lift a factor g0 of ``full`` mod p to a factor mod p^s (g0 monic,
    coprime to its cofactor mod p). Returns the lifted factor."""
    h0, rem = _pdivmod_mod([c % p for c in full], g0, p)
    if rem:
        raise AssertionError("g0 does not divide mod p")
    one, a, b = _pxgcd_mod(g0, h0, p)
    if one != [1]:
        raise AssertionError("factor and cofactor are not coprime mod p")
    g, h = list(g0), list(h0)
    mod = p
    target = p**s
    while mod < target:
        newmod = min(mod * p, target)
        gh = _pmul_mod(g, h, newmod)
        n = max(len(full), len(gh))
        e = [((full[i] if i < len(full) else 0) - (gh[i] if i < len(gh) else 0)) % newmod
             for i in range(n)]
        e = [(c // mod) % p for c in e]
        while e and e[-1] == 0:
            e.pop()
        be = _pmul_mod(b, e, p)
        qq, u = _pdivmod_mod(be, g0, p) if be else ([], [])
        ae = _pmul_mod(a, e, p)
        qh = _pmul_mod(qq, h0, p)
        nw = max(len(ae), len(qh))
        w = [((ae[i] if i < len(ae) else 0) + (qh[i] if i < len(qh) else 0)) % p for i in range(nw)]
        g = [(gi + mod * (u[i] if i < len(u) else 0)) % newmod for i, gi in enumerate(g)]
        h = [(hi + mod * (w[i] if i < len(w) else 0)) % newmod for i, hi in enumerate(h)]
        mod = newmod
    return g


# ---------------------------------------------------------------------------
# cyclotomic field elements
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _reduction_rows(f: int) -> tuple[tuple[Fraction, ...], ...]:
    """Representatives of x^j mod Phi_f for j = phi(f) .. 2*phi(f) - 2 + f."""
    deg = euler_phi(f)
    phi = [Fraction(c) for c in cyclotomic_poly(f)]
    rows = []
    cur = [-c for c in phi[:deg]]  # x^deg mod Phi_f (Phi_f monic)
    rows.append(tuple(cur))
    for _ in range(deg - 2 + f):
        shifted = [Fraction(0)] + list(cur)
        top = shifted.pop()
        if top:
            base = rows[0]
            cur = [shifted[i] + top * base[i] for i in range(deg)]
        else:
            cur = shifted
        rows.append(tuple(cur))
    return tuple(rows)


def _reduce_coeffs(coeffs, f: int) -> tuple[Fraction, ...]:
    deg = euler_phi(f)
    out = [Fraction(c) for c in coeffs[:deg]] + [Fraction(0)] * max(0, deg - len(coeffs))
    if len(coeffs) > deg:
        rows = _reduction_rows(f)
        for j in range(deg, len(coeffs)):
            c = coeffs[j]
            if c:
                row = rows[j - deg]
                for i in range(deg):
                    out[i] += c * row[i]
    return tuple(out)


@dataclass(frozen=True)
class CycElem:
    """An element of Q(zeta_f), reduced mod the f-th cyclotomic polynomial.

    ``coeffs`` has length phi(f); entry i is the coefficient of zeta_f^i.
    Arithmetic between two CycElems requires equal conductors; use
    :func:`lift_common` (or ``lift``) to move into a common field first.
    Scalars (int/Fraction) mix freely.
    """

    conductor: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.conductor < 1 or self.conductor > MAX_CONDUCTOR:
            raise ConductorTooLargeError(f"conductor {self.conductor} out of range")
        if len(self.coeffs) != euler_phi(self.conductor):
            raise ParameterError("coefficient vector has wrong length")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(x, conductor: int = 1) -> "CycElem":
        x = Fraction(x)
        deg = euler_phi(conductor)
        return CycElem(conductor, (x,) + (Fraction(0),) * (deg - 1))

    @staticmethod
    def zeta(f: int, power: int = 1) -> "CycElem":
        """zeta_f^power as an element of Q(zeta_f)."""
        power %= f
        return CycElem(f, _reduce_coeffs([Fraction(0)] * power + [Fraction(1)], f))

    @staticmethod
    def zero(conductor: int = 1) -> "CycElem":
        return CycElem.from_rational(0, conductor)

    @staticmethod
    def one(conductor: int = 1) -> "CycElem":
        return CycElem.from_rational(1, conductor)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ParameterError("element is not rational")
        return self.coeffs[0]

    def lift(self, conductor: int) -> "CycElem":
        """Image under the canonical embedding Q(zeta_f) -> Q(zeta_F), f | F."""
        f, F = self.conductor, conductor
        if F == f:
            return self
        if F % f != 0:
            raise ParameterError(f"no canonical embedding of Q(zeta_{f}) into Q(zeta_{F})")
        e = F // f
        deg = euler_phi(F)
        acc = [Fraction(0)] * deg
        for j, c in enumerate(self.coeffs):
            if c:
                z = CycElem.zeta(F, j * e)
                for i in range(deg):
                    acc[i] += c * z.coeffs[i]
        return CycElem(F, tuple(acc))

    def galois_conjugate(self, a: int) -> "CycElem":
        """Image under zeta_f -> zeta_f^a, for a coprime to the conductor."""
        f = self.conductor
        if gcd(a, f) != 1:
            raise ParameterError(f"{a} is not a unit mod {f}")
        deg = euler_phi(f)
        acc = [Fraction(0)] * deg
        for j, c in enumerate(self.coeffs):
            if c:
                z = CycElem.zeta(f, j * a)
                for i in range(deg):
                    acc[i] += c * z.coeffs[i]
        return CycElem(f, tuple(acc))

    def norm(self) -> Fraction:
        """Field norm to Q: product over all Galois conjugates."""
        f = self.conductor
        out = CycElem.one(f)
        for a in range(1, f + 1):
            if gcd(a, f) == 1:
                out = out * self.galois_conjugate(a)
        return out.as_rational()

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other: "CycElem"):
        if self.conductor != other.conductor:
            raise ParameterError(
                f"conductor mismatch: {self.conductor} vs {other.conductor}; lift first")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElem.from_rational(other, self.conductor)
        if not isinstance(other, CycElem):
            return NotImplemented
        self._check_same(other)
        return CycElem(self.conductor, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.conductor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElem.from_rational(other, self.conductor)
        if not isinstance(other, CycElem):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.conductor, tuple(c * other for c in self.coeffs))
        if not isinstance(other, CycElem):
            return NotImplemented
        self._check_same(other)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] += ai * bj
        return CycElem(self.conductor, _reduce_coeffs(out, self.conductor))

    __rmul__ = __mul__

    def inverse(self) -> "CycElem":
        """Multiplicative inverse via the extended Euclidean algorithm in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycElem.from_rational(1 / self.coeffs[0], self.conductor)
        f = self.conductor
        phi = [Fraction(c) for c in cyclotomic_poly(f)]
        r0, r1 = phi, list(self.coeffs)
        while r1 and r1[-1] == 0:
            r1.pop()
        t0, t1 = [], [Fraction(1)]
        while r1:
            lead = r1[-1]
            r1m = [c / lead for c in r1]
            q, r = _poly_divmod_q(r0, r1m)
            q = [c / lead for c in q]
            r0, r1 = [c for c in r1], r
            # t_next = t0 - q*t1
            qt = [Fraction(0)] * (len(q) + len(t1) - 1) if q and t1 else []
            for i, qi in enumerate(q):
                if qi:
                    for j, tj in enumerate(t1):
                        qt[i + j] += qi * tj
            n = max(len(t0), len(qt))
            t0, t1 = t1, [
                (t0[i] if i < len(t0) else Fraction(0)) - (qt[i] if i < len(qt) else Fraction(0))
                for i in range(n)]
        # r0 is a nonzero constant gcd
        c = r0[0]
        inv_coeffs = [t / c for t in t0]
        return CycElem(f, _reduce_coeffs(inv_coeffs, f))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, CycElem):
            return NotImplemented
        self._check_same(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CycElem.one(self.conductor)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- presentation ------------------------------------------------------

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        return "cyc{}:{}".format(self.conductor, ",".join(str(c) for c in self.coeffs))

    def __repr__(self):
        return f"CycElem({self})"


def lift_common(a: CycElem, b: CycElem) -> tuple[CycElem, CycElem]:
    """Lift two cyclotomic elements into Q(zeta_lcm) for shared arithmetic."""
    f = lcm(a.conductor, b.conductor)
    return a.lift(f), b.lift(f)


def cyc_arith(a: CycElem, b: CycElem, op: str) -> CycElem:
    """Add or multiply two elements sharing a conductor (op in {"add", "mul"})."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ParameterError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# p-adic contexts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PadicContext:
    """A fixed prime above p in Q(zeta_f) (p coprime to f), with working
    precision p^s.

    ``prime_poly`` is the Hensel lift mod p^s of the selected irreducible
    factor of the f-th cyclotomic polynomial mod p; the quotient
    Z[x]/(p^s, prime_poly) is the length-s truncation of the unramified
    extension of Z_p of degree ``residue_degree``.  Ramification index e = 1.
    """

    p: int
    f: int
    s: int
    prime_poly: tuple[int, ...]
    residue_degree: int
    all_factors: tuple[tuple[int, ...], ...]
    e: int = 1

    def factor_mod_p(self) -> tuple[int, ...]:
        return tuple(c % self.p for c in self.prime_poly)


@functools.lru_cache(maxsize=None)
def padic_context(p: int, f: int, s: int) -> PadicContext:
    """Build the deterministic PadicContext for (p, f, s).

    The prime is chosen as the lexicographically smallest irreducible factor
    of Phi_f mod p (comparing ascending coefficient sequences with entries
    in [0, p)).
    """
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if s < 1:
        raise ParameterError("precision s must be >= 1")
    if f < 1 or f > MAX_CONDUCTOR:
        raise ConductorTooLargeError(f"conductor {f} out of range")
    if f % p == 0:
        raise RamifiedPrimeError(
            f"p = {p} divides the conductor {f}; ramified primes are unsupported")
    d = mult_order(p, f)
    phi_int = list(cyclotomic_poly(f))
    F = _trim_mod([c % p for c in phi_int], p)
    inv = pow(F[-1], -1, p)
    F = [c * inv % p for c in F]
    if len(F) - 1 == 0:
        raise AssertionError("cyclotomic polynomial vanished mod p")
    factors = _equal_degree_split(F, d, p) if p > 2 else [F]
    if p == 2 and len(F) - 1 != d:
        raise ParameterError("p = 2 with a split cyclotomic polynomial is unsupported")
    factors.sort(key=tuple)
    lifted = tuple(tuple(_hensel_lift_factor(phi_int, g0, p, s)) for g0 in factors)
    return PadicContext(p=p, f=f, s=s, prime_poly=lifted[0],
                        residue_degree=d, all_factors=lifted)


def _context_with_factor(ctx: PadicContext, index: int) -> PadicContext:
    """Variant of ctx selecting the index-th lifted factor (testing aid)."""
    return PadicContext(p=ctx.p, f=ctx.f, s=ctx.s, prime_poly=ctx.all_factors[index],
                        residue_degree=ctx.residue_degree, all_factors=ctx.all_factors)


def valp_cyc(x: CycElem, ctx: PadicContext):
    """Valuation of x at the context's chosen prime; INF for zero.

    Since e = 1 this equals the p-adic valuation of the image of x in the
    unramified extension of degree ``residue_degree``.  Denominators are
    handled by clearing them and subtracting their p-valuation.  Raises
    IndeterminateValuationError when the (nonzero) image vanishes mod p^s.
    """
    if x.conductor != ctx.f:
        raise ParameterError(
            f"element conductor {x.conductor} does not match context conductor {ctx.f}")
    if x.is_zero():
        return INF
    den = 1
    for c in x.coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in x.coeffs]
    shift = valp_int(den, ctx.p)
    mod = ctx.p**ctx.s
    _, r = _pdivmod_mod([c % mod for c in ints], [c % mod for c in ctx.prime_poly], mod)
    v = min((valp_int(c, ctx.p) for c in r if c), default=INF)
    if v == INF or v >= ctx.s:
        raise IndeterminateValuationError(
            f"image vanishes mod {ctx.p}^{ctx.s}; rerun with a larger precision s",
            precision=ctx.s)
    return int(v) - shift

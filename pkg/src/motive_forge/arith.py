"""Exact arithmetic kernel: finite fields, cyclotomic integers, integer polynomials.

Everything here is exact.  Floating point appears only in
:meth:`CyclotomicInteger.embed` and :meth:`IntPolynomial.roots`, which exist for
sanity checks (absolute values, Riemann hypothesis) and never feed results.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

FIELD_TABLE_LIMIT = 10**6


# ---------------------------------------------------------------------------
# small integer helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p - 1)
    return r


def units_mod(m: int) -> list[int]:
    return [t for t in range(1, m) if math.gcd(t, m) == 1] if m > 1 else [0]


def padic_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# finite fields


class FiniteField:
    """The field F_q, q = p^r, with log/exp tables.

    Elements are encoded as integers 0..q-1: the base-p digits are the
    coefficients (lowest degree first) of a polynomial modulo the defining
    polynomial.  For r = 1 the encoding is the usual residue.
    """

    def __init__(self, p: int, r: int = 1):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if r < 1:
            raise ValueError("extension degree must be >= 1")
        q = p**r
        if q > FIELD_TABLE_LIMIT:
            raise ValueError(f"q={q} exceeds the table budget {FIELD_TABLE_LIMIT}")
        self.p, self.r, self.q = p, r, q
        self.modulus = _smallest_irreducible(p, r) if r > 1 else (0, 1)
        self._digits = np.array(
            [[(x // p**i) % p for i in range(r)] for x in range(q)], dtype=np.int64
        )
        self._weights = np.array([p**i for i in range(r)], dtype=np.int64)
        self.generator = self._find_generator()
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            exp[k] = x
            log[x] = k
            x = self._slow_mul(x, self.generator)
        if x != 1 or (log[1:] < 0).any():
            raise ArithmeticError("generator does not span the unit group")
        self.exp_table = exp
        self.log_table = log
        self.exp_table.setflags(write=False)
        self.log_table.setflags(write=False)

    def __repr__(self):
        return f"FiniteField(p={self.p}, r={self.r})"

    # polynomial arithmetic used only while building tables
    def _slow_mul(self, x: int, y: int) -> int:
        p, r = self.p, self.r
        if r == 1:
            return x * y % p
        a = [(x // p**i) % p for i in range(r)]
        b = [(y // p**i) % p for i in range(r)]
        prod = [0] * (2 * r - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        f = self.modulus
        for d in range(2 * r - 2, r - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(r + 1):
                    prod[d - r + i] -= c * f[i]
        return sum((prod[i] % p) * p**i for i in range(r))

    def _slow_pow(self, x: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, x)
            x = self._slow_mul(x, x)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        n = self.q - 1
        ells = prime_factors(n)
        for g in range(2 if self.q > 2 else 1, self.q):
            if all(self._slow_pow(g, n // ell) != 1 for ell in ells):
                return g
        raise ArithmeticError("no generator found")

    # public element operations
    def elements(self) -> range:
        return range(self.q)

    def add(self, x, y):
        d = (self._digits[x] + self._digits[y]) % self.p
        return d @ self._weights

    def neg(self, x):
        return ((-self._digits[x]) % self.p) @ self._weights

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp_table[(self.log_table[x] + self.log_table[y]) % (self.q - 1)])

    def power(self, x: int, e: int) -> int:
        if x == 0:
            return 0 if e else 1
        return int(self.exp_table[(self.log_table[x] * e) % (self.q - 1)])

    def log(self, x: int) -> int:
        if x == 0:
            raise ValueError("log of zero")
        return int(self.log_table[x])

    def addition_table(self) -> np.ndarray:
        """q x q table of encoded sums (numpy, vectorised)."""
        d = (self._digits[:, None, :] + self._digits[None, :, :]) % self.p
        return d @ self._weights

    def negation(self) -> np.ndarray:
        return ((-self._digits) % self.p) @ self._weights

    def traces(self) -> np.ndarray:
        """Absolute trace to F_p of every element, as integers in [0, p)."""
        q, p, r = self.q, self.p, self.r
        out = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        logs = self.log_table[nz]
        acc = np.zeros((q - 1, r), dtype=np.int64)
        for i in range(r):
            conj = self.exp_table[(logs * p**i) % (q - 1)]
            acc = (acc + self._digits[conj]) % p
        if (acc[:, 1:] != 0).any():
            raise ArithmeticError("trace left the prime field")
        out[nz] = acc[:, 0]
        return out

    def char_value(self, m: int, x: int, a: int = 1) -> "CyclotomicInteger":
        """chi(x)^a for the order-m character chi(g) = zeta_m."""
        if (self.q - 1) % m:
            raise ValueError(f"m={m} does not divide q-1={self.q - 1}")
        if x == 0:
            raise ValueError("character evaluated at zero")
        return CyclotomicInteger.zeta_power(m, a * self.log(x))


def build_field(p: int, r: int = 1) -> FiniteField:
    return _cached_field(p, r)


@lru_cache(maxsize=None)
def _cached_field(p, r):
    return FiniteField(p, r)


def _smallest_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree r over F_p.

    Candidates are ordered by the integer with base-p digits c_0..c_{r-1}
    read from the top coefficient down, i.e. lexicographically on
    (c_{r-1}, ..., c_0).  Returns ascending coefficients including the
    leading 1.
    """
    for code in range(p**r):
        low = [(code // p**i) % p for i in range(r)]
        f = tuple(low) + (1,)
        if low[0] != 0 and _is_irreducible(f, p):
            return f
    raise ArithmeticError("no irreducible polynomial found")


def _is_irreducible(f, p) -> bool:
    r = len(f) - 1
    # no factor of degree <= r//2: brute force over monic candidates
    for d in range(1, r // 2 + 1):
        for code in range(p**d):
            g = [(code // p**i) % p for i in range(d)] + [1]
            if _poly_divides(g, list(f), p):
                return False
    return True


def _poly_divides(g, f, p) -> bool:
    f = f[:]
    dg = len(g) - 1
    for d in range(len(f) - 1, dg - 1, -1):
        c = f[d] % p
        if c:
            for i in range(dg + 1):
                f[d - dg + i] = (f[d - dg + i] - c * g[i]) % p
    return all(c % p == 0 for c in f[:dg])


# ---------------------------------------------------------------------------
# cyclotomic integers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Phi_n with ascending integer coefficients."""
    if n == 1:
        return (-1, 1)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _exact_div(num, den):
    num = num[:]
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k] // den[-1]
        out[k - dd] = c
        if c:
            for i in range(dd + 1):
                num[k - dd + i] -= c * den[i]
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _power_basis_images(m: int) -> tuple[tuple[int, ...], ...]:
    """zeta^k reduced mod Phi_m for k = 0..m-1, as coefficient tuples."""
    phi = euler_phi(m)
    f = cyclotomic_polynomial(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by zeta: shift, then replace zeta^phi
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * f[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _reduction_matrix(m: int) -> np.ndarray:
    return np.array(_power_basis_images(m), dtype=object)


class CyclotomicInteger:
    """Element of Z[zeta_m] in the power basis 1, zeta, ..., zeta^(phi(m)-1)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        phi = euler_phi(m)
        c = [int(x) for x in coeffs]
        if len(c) > phi:
            c = _reduce_long(m, c)
        self.m = m
        self.coeffs = tuple(c + [0] * (phi - len(c)))

    # constructors
    @classmethod
    def zero(cls, m):
        return cls(m, [])

    @classmethod
    def one(cls, m):
        return cls(m, [1])

    @classmethod
    def integer(cls, m, n: int):
        return cls(m, [n])

    @classmethod
    def zeta_power(cls, m, k: int):
        return cls(m, _power_basis_images(m)[k % m])

    @classmethod
    def from_power_counts(cls, m, counts):
        """sum_k counts[k] zeta^k, with counts indexed by k mod m."""
        counts = np.asarray(counts, dtype=object)
        if len(counts) != m:
            raise ValueError("need exactly m power counts")
        return cls(m, list(counts.dot(_reduction_matrix(m))))

    # helpers
    def _check(self, other):
        if isinstance(other, int):
            return CyclotomicInteger.integer(self.m, other)
        if not isinstance(other, CyclotomicInteger):
            return NotImplemented
        if other.m != self.m:
            raise ValueError(f"conductor mismatch {self.m} vs {other.m}")
        return other

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CyclotomicInteger):
            return NotImplemented
        return self.m == other.m and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*z^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return f"Cyc{self.m}(" + (" + ".join(terms) or "0") + ")"

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInteger(self.m, [a * other for a in self.coeffs])
        other = self._check(other)
        if other is NotImplemented:
            return other
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = CyclotomicInteger.one(self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def exact_div(self, n: int) -> "CyclotomicInteger":
        if any(c % n for c in self.coeffs):
            raise ArithmeticError(f"{self!r} not divisible by {n}")
        return CyclotomicInteger(self.m, [c // n for c in self.coeffs])

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ArithmeticError(f"{self!r} is not a rational integer")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def galois(self, t: int) -> "CyclotomicInteger":
        """sigma_t: zeta -> zeta^t."""
        if math.gcd(t, self.m) != 1:
            raise ValueError("galois index must be a unit")
        counts = [0] * self.m
        for i, c in enumerate(self.coeffs):
            counts[(i * t) % self.m] += c
        return CyclotomicInteger.from_power_counts(self.m, counts)

    def conj(self) -> "CyclotomicInteger":
        return self.galois(-1 % self.m if self.m > 1 else 1)

    def embed(self, t: int = 1) -> complex:
        if math.gcd(t, self.m) != 1:
            raise ValueError("embedding index must be coprime to m")
        z = cmath.exp(2j * math.pi * t / self.m)
        return sum(c * z**i for i, c in enumerate(self.coeffs))

    def lift(self, n: int) -> "CyclotomicInteger":
        """Image in Z[zeta_n] for m | n (zeta_m -> zeta_n^(n/m))."""
        if n % self.m:
            raise ValueError("target conductor must be a multiple")
        s = n // self.m
        counts = [0] * n
        for i, c in enumerate(self.coeffs):
            counts[i * s] += c
        return CyclotomicInteger.from_power_counts(n, counts)


def _reduce_long(m, c):
    phi = euler_phi(m)
    f = cyclotomic_polynomial(m)
    c = c[:]
    for d in range(len(c) - 1, phi - 1, -1):
        top = c[d]
        if top:
            for i in range(phi + 1):
                c[d - phi + i] -= top * f[i]
    return c[:phi]


def cyclo_mul(u: CyclotomicInteger, v: CyclotomicInteger) -> CyclotomicInteger:
    if u.m != v.m:
        raise ValueError(f"conductor mismatch {u.m} vs {v.m}")
    a = np.array(u.coeffs, dtype=object)
    b = np.array(v.coeffs, dtype=object)
    if not a.any() or not b.any():
        return CyclotomicInteger.zero(u.m)
    return CyclotomicInteger(u.m, list(np.convolve(a, b)))


# ---------------------------------------------------------------------------
# integer polynomials


class IntPolynomial:
    """Polynomial with integer coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def one(cls):
        return cls([1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if mono and abs(c) == 1:
                term = mono
            else:
                term = f"{abs(c)}{'*' if mono else ''}{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, term))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            s += f" {sign} {term}"
        return s

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial([self[k] + other[k] for k in range(n)])

    def __neg__(self):
        return IntPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = IntPolynomial.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def roots(self) -> np.ndarray:
        """Numeric roots (for sanity checks only)."""
        return np.roots([float(c) for c in reversed(self.coeffs)])

    def reciprocal_roots(self) -> np.ndarray:
        return 1.0 / self.roots()

    def newton_slopes(self, p: int, r: int = 1) -> list[Fraction]:
        """Slopes of the Newton polygon at p, normalised by ord_p(q) = r.

        The multiset has one entry per reciprocal root; it is read off the
        lower convex hull of the points (k, v_p(c_k)).
        """
        pts = [(k, padic_valuation(c, p)) for k, c in enumerate(self.coeffs) if c]
        if not pts or pts[0][0] != 0:
            raise ValueError("newton slopes need a nonzero constant term")
        hull = []
        for pt in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        slopes = []
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            slopes.extend([Fraction(y2 - y1, (x2 - x1) * r)] * (x2 - x1))
        return slopes


def poly_from_roots(roots: list[CyclotomicInteger]) -> IntPolynomial:
    """prod (1 - alpha t) with all coefficients asserted to be rational integers."""
    if not roots:
        return IntPolynomial.one()
    m = roots[0].m
    coeffs = [CyclotomicInteger.one(m)]
    for alpha in roots:
        nxt = coeffs + [CyclotomicInteger.zero(m)]
        for k in range(len(coeffs)):
            nxt[k + 1] = nxt[k + 1] - alpha * coeffs[k]
        coeffs = nxt
    out = []
    for k, c in enumerate(coeffs):
        if not c.is_rational():
            raise ArithmeticError(f"coefficient of t^{k} is not rational: {c!r}")
        out.append(c.to_int())
    return IntPolynomial(out)


# ---------------------------------------------------------------------------
# group ring of the unweighted Fermat group


class GroupRingElement:
    """Element of K[G] for G = (mu_m)^5 / diagonal.

    Keys are exponent 5-tuples normalised to have first entry 0; values are
    CyclotomicIntegers in Z[zeta_m] and the element carries a common
    denominator, so coefficients live in Z[1/m][zeta_m].
    """

    def __init__(self, m: int, coeffs: dict | None = None, denom: int = 1):
        self.m = m
        self.denom = denom
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            key = self.normalize(k, m)
            if isinstance(v, int):
                v = CyclotomicInteger.integer(m, v)
            cur = self.coeffs.get(key)
            v = v if cur is None else cur + v
            if v.is_zero():
                self.coeffs.pop(key, None)
            else:
                self.coeffs[key] = v

    @staticmethod
    def normalize(g, m):
        g0 = g[0]
        return tuple((x - g0) % m for x in g)

    @classmethod
    def identity(cls, m):
        return cls(m, {(0,) * 5: 1})

    @staticmethod
    def group(m):
        return [(0,) + t for t in itertools.product(range(m), repeat=4)]

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        if other.m != self.m:
            raise ValueError("conductor mismatch")
        m = self.m
        out: dict = {}
        for g, a in self.coeffs.items():
            for h, b in other.coeffs.items():
                key = tuple((x + y) % m for x, y in zip(g, h))
                out[key] = out[key] + a * b if key in out else a * b
        return GroupRingElement(m, out, self.denom * other.denom)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        d = math.lcm(self.denom, other.denom)
        out = {k: v * (d // self.denom) for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            v = v * (d // other.denom)
            out[k] = out[k] + v if k in out else v
        return GroupRingElement(self.m, out, d)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement) or other.m != self.m:
            return NotImplemented
        return {k: v * other.denom for k, v in self.coeffs.items()} == {
            k: v * self.denom for k, v in other.coeffs.items()
        }

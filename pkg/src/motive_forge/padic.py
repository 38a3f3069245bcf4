"""p-adic checks: Teichmuller lifts, Morita's Gamma, Dwork's character and Gross-Koblitz.

Elements of Z_p are residues mod p^K.  The Eisenstein ring Z_p[pi] with
pi^(p-1) = -p is stored as coefficient vectors on 1, pi, ..., pi^(p-2).
Nothing here feeds the point counts; it only cross-checks them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import is_prime, padic_valuation


class PrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PadicInt:
    p: int
    K: int
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p**self.K)

    @property
    def modulus(self):
        return self.p**self.K

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise ValueError("prime mismatch")
            return other.value, min(self.K, other.K)
        return int(other), self.K

    def __add__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.p, K, self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.p, K, self.value - v)

    def __neg__(self):
        return PadicInt(self.p, self.K, -self.value)

    def __mul__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.p, K, self.value * v)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return PadicInt(self.p, self.K, pow(self.value, e, self.modulus))

    def inverse(self):
        if self.value % self.p == 0:
            raise ZeroDivisionError("not a unit")
        return PadicInt(self.p, self.K, pow(self.value, -1, self.modulus))

    def valuation(self) -> int:
        return self.K if self.value == 0 else padic_valuation(self.value, self.p)

    def __eq__(self, other):
        if isinstance(other, PadicInt):
            K = min(self.K, other.K)
            return self.p == other.p and (self.value - other.value) % self.p**K == 0
        if isinstance(other, int):
            return (self.value - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.K, self.value))

    def signed(self) -> int:
        """Representative in (-p^K/2, p^K/2]."""
        v = self.value
        return v - self.modulus if v > self.modulus // 2 else v


def teichmuller(x: int, p: int, K: int) -> PadicInt:
    """(p-1)-th root of unity congruent to x, by iterating y -> y^p."""
    if x % p == 0:
        raise ValueError("Teichmuller lift of 0 mod p")
    mod = p**K
    y = x % mod
    for _ in range(K + 1):
        z = pow(y, p, mod)
        if z == y:
            return PadicInt(p, K, y)
        y = z
    raise PrecisionError("Teichmuller iteration did not stabilise")


def _gamma_int(n: int, p: int, K: int) -> int:
    mod = p**K
    acc = 1
    for i in range(1, n):
        if i % p:
            acc = acc * i % mod
    return (-1) ** n * acc % mod


def gamma_p(arg, p: int, K: int) -> PadicInt:
    """Gamma_p(n) = (-1)^n prod_{1 <= i < n, p does not divide i} i.

    A rational argument is replaced by a positive integer congruent to it
    mod p^K; continuity of Gamma_p makes the result correct mod p^K.
    """
    arg = Fraction(arg)
    if arg.denominator % p == 0:
        raise ValueError(f"{arg} is not a p-adic integer")
    mod = p**K
    if arg.denominator == 1 and arg > 0:
        n = int(arg)
    else:
        n = arg.numerator * pow(arg.denominator, -1, mod) % mod
        if n == 0:
            n = mod
    return PadicInt(p, K, _gamma_int(n, p, K))


@dataclass(frozen=True)
class EisensteinElement:
    """sum_i c_i pi^i (0 <= i < p-1), c_i in Z/p^K, with pi^(p-1) = -p."""

    p: int
    K: int
    coeffs: tuple

    @classmethod
    def from_terms(cls, p, K, terms):
        """Build from (exponent, integer) pairs, reducing pi powers."""
        c = [0] * (p - 1)
        mod = p**K
        for e, v in terms:
            q, r = divmod(e, p - 1)
            c[r] = (c[r] + v * (-p) ** q) % mod
        return cls(p, K, tuple(c))

    @classmethod
    def zero(cls, p, K):
        return cls(p, K, (0,) * (p - 1))

    @classmethod
    def scalar(cls, p, K, v):
        return cls.from_terms(p, K, [(0, int(v))])

    def __add__(self, other):
        mod = self.p**self.K
        return EisensteinElement(self.p, self.K,
                                 tuple((a + b) % mod for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        mod = self.p**self.K
        return EisensteinElement(self.p, self.K, tuple(-a % mod for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt)):
            v = other.value if isinstance(other, PadicInt) else other
            mod = self.p**self.K
            return EisensteinElement(self.p, self.K, tuple(a * v % mod for a in self.coeffs))
        terms = []
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        terms.append((i + j, a * b))
        return EisensteinElement.from_terms(self.p, self.K, terms)

    __rmul__ = __mul__

    def valuation(self) -> int:
        """pi-adic valuation, capped at the working precision (p-1)K."""
        best = (self.p - 1) * self.K
        for i, c in enumerate(self.coeffs):
            if c:
                best = min(best, i + (self.p - 1) * padic_valuation(c, self.p))
        return best

    def agrees(self, other, M: int) -> bool:
        """self = other mod pi^M."""
        if M > (self.p - 1) * self.K:
            raise PrecisionError(f"pi-precision {M} exceeds working precision")
        return (self - other).valuation() >= M


def working_digits(p: int, M: int) -> int:
    """p-adic digits needed to resolve pi^M, plus a guard digit."""
    return -(-M // (p - 1)) + 1


@lru_cache(maxsize=None)
def dwork_series(p: int, K: int, terms: int) -> tuple:
    """Coefficients of F(pi t) = exp(pi t + (pi t)^p / p) as pi-reduced pairs.

    F(X) = sum a_k X^k has non-integral a_k, but a_k pi^k is integral.
    Writing pi^k = (-p)^(k // (p-1)) pi^(k % (p-1)) gives entry k as
    (k % (p-1), a_k (-p)^(k // (p-1)) mod p^K).
    """
    mod = p**K
    out = []
    for k in range(terms):
        a = Fraction(0)
        for j in range(k // p + 1):
            a += Fraction(1, p**j * math.factorial(j) * math.factorial(k - p * j))
        c = a * Fraction((-p) ** (k // (p - 1)))
        if c.denominator % p == 0:
            raise ArithmeticError(f"term {k} of the Dwork series is not integral")
        out.append((k % (p - 1), c.numerator * pow(c.denominator, -1, mod) % mod))
    return tuple(out)


def dwork_character(x: int, p: int, M: int) -> EisensteinElement:
    """Theta(x) = F(pi * omega(x)), truncated after M(p-1) series terms."""
    K = working_digits(p, M)
    if x % p == 0:
        return EisensteinElement.scalar(p, K, 1)
    mod = p**K
    w = teichmuller(x, p, K).value
    c = [0] * (p - 1)
    for k, (r, ck) in enumerate(dwork_series(p, K, M * (p - 1))):
        c[r] = (c[r] + ck * pow(w, k, mod)) % mod
    return EisensteinElement(p, K, tuple(c))


def dwork_gauss(n: int, p: int, M: int) -> EisensteinElement:
    """G_n = sum_{x in F_p^*} omega(x)^n Theta(x)."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    K = working_digits(p, M)
    acc = EisensteinElement.zero(p, K)
    for x in range(1, p):
        w = teichmuller(x, p, K)
        acc = acc + dwork_character(x, p, M) * (w ** (n % (p - 1)))
    return acc


def gk_rhs(n: int, p: int, M: int) -> EisensteinElement:
    """p * pi^{-S(n)} * Gamma_p(1 - <n/(p-1)>) for 1 <= n <= p-2.

    With p = -pi^(p-1) this is -pi^(p-1-n) * Gamma_p(1 - n/(p-1)).
    """
    if not 1 <= n <= p - 2:
        raise ValueError("need 1 <= n <= p-2")
    K = working_digits(p, M)
    g = gamma_p(1 - Fraction(n, p - 1), p, K)
    return EisensteinElement.from_terms(p, K, [(p - 1 - n, -g.value)])


@dataclass
class GKResult:
    p: int
    n: int
    M: int
    lhs_valuation: int  # in powers of pi
    rhs_valuation: int
    unit: int  # calibration constant (signed residue)
    ok: bool

    @property
    def valuation(self) -> Fraction:
        """Valuation of G_n normalised so that v(p) = 1."""
        return Fraction(self.lhs_valuation, self.p - 1)


@lru_cache(maxsize=None)
def calibration_unit(M: int = 20, p: int = 5, n: int = 1) -> int:
    """Unit u with G_n = u * RHS, read off at (p, n) = (5, 1) and then frozen.

    Both sides are a single pi-power times a Z_p-unit, so u is the ratio of
    their only nonzero coefficients.
    """
    lhs, rhs = dwork_gauss(n, p, M), gk_rhs(n, p, M)
    e = p - 1 - n
    if any(c for i, c in enumerate(rhs.coeffs) if i != e):
        raise ArithmeticError("unexpected shape of the Gross-Koblitz side")
    K = lhs.K
    u = lhs.coeffs[e] * pow(rhs.coeffs[e], -1, p**K) % p**K
    return PadicInt(p, K - 1, u).signed()


def gross_koblitz_check(p: int, n: int, M: int = 20) -> GKResult:
    u = calibration_unit(M)
    lhs = dwork_gauss(n, p, M)
    rhs = gk_rhs(n, p, M) * u
    return GKResult(p, n, M, lhs.valuation(), rhs.valuation(), u, lhs.agrees(rhs, M))


def gk_table(p: int, M: int = 20) -> list[GKResult]:
    return [gross_koblitz_check(p, n, M) for n in range(1, p - 1)]

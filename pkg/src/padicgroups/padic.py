"""Exact p-adic integer arithmetic at fixed residue precision.

A ``PadicInt`` is a congruence class modulo p^N together with its measured
valuation.  All arithmetic is exact modulo p^N; dividing by p^k trades k
digits of precision away instead of failing, so divided-power constructions
(binomial coefficients, factorial denominators) can run as long as digits
remain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadInputError, PrecisionError

DEFAULT_PRECISION = 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n: int, p: int) -> int:
    """Exponent of the prime p in the nonzero integer n."""
    if n == 0:
        raise BadInputError("valuation of zero undefined")
    n = abs(n)
    v = 0
    while n % p == 0:
        v += 1
        n //= p
    return v


def vp_fraction(x: Fraction, p: int) -> int:
    if x == 0:
        raise BadInputError("valuation of zero undefined")
    return vp(x.numerator, p) - vp(x.denominator, p)


def vp_factorial(n: int, p: int) -> int:
    """v_p(n!) via the floor sum over powers of p."""
    if n < 0:
        raise BadInputError("factorial of negative integer")
    total = 0
    q = p
    while q <= n:
        total += n // q
        q *= p
    return total


def flow_threshold(p: int) -> int:
    """Smallest positive integer c with c > 1/(p-1): 1 for odd p, 2 for p = 2."""
    if not is_prime(p):
        raise BadInputError(f"{p} is not prime")
    return 2 if p == 2 else 1


@dataclass(frozen=True)
class PrecisionPolicy:
    """Residue precision N plus a guard band of digits reserved before a
    quantity is declared indistinguishable from zero."""

    N: int = DEFAULT_PRECISION
    guard: int = 4

    def __post_init__(self):
        if self.N < 1:
            raise BadInputError("precision must be at least 1")
        if not 0 <= self.guard < self.N:
            raise BadInputError("guard must satisfy 0 <= guard < N")

    @property
    def zero_threshold(self) -> int:
        """Valuations >= N - guard are treated as zero at this policy."""
        return self.N - self.guard


class PadicInt:
    """A p-adic integer known modulo p^N.

    The valuation is recomputed from the residue; a zero residue is
    "indistinguishable from zero" and reports valuation N.
    """

    __slots__ = ("p", "N", "r")

    def __init__(self, p: int, N: int, value: int | Fraction):
        if N < 1:
            raise PrecisionError("precision exhausted")
        if isinstance(value, Fraction):
            den = value.denominator
            if den % p == 0:
                raise BadInputError(f"denominator {den} not a p-adic unit at p={p}")
            r = value.numerator * pow(den, -1, p**N)
        else:
            r = value
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "r", r % p**N)

    def __setattr__(self, name, value):
        raise AttributeError("PadicInt is immutable")

    # -- inspection ---------------------------------------------------------

    @property
    def valuation(self) -> int:
        """min(v_p(r), N); equals N exactly when the residue is zero."""
        if self.r == 0:
            return self.N
        return vp(self.r, self.p)

    def is_zero(self, guard: int = 0) -> bool:
        """Indistinguishable from zero at the current precision minus guard."""
        return self.valuation >= self.N - guard

    def is_unit(self) -> bool:
        return self.r % self.p != 0

    def lift(self) -> int:
        """The canonical integer representative in [0, p^N)."""
        return self.r

    def lift_centered(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.p**self.N
        return self.r - m if self.r > m // 2 else self.r

    # -- ring structure -----------------------------------------------------

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise BadInputError(f"mismatched primes {self.p} != {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicInt(self.p, self.N, other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        N = min(self.N, b.N)
        return PadicInt(self.p, N, self.r + b.r)

    __radd__ = __add__

    def __neg__(self):
        return PadicInt(self.p, self.N, -self.r)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        N = min(self.N, b.N)
        return PadicInt(self.p, N, self.r - b.r)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        N = min(self.N, b.N)
        return PadicInt(self.p, N, self.r * b.r)

    __rmul__ = __mul__

    def invert(self) -> "PadicInt":
        if not self.is_unit():
            raise BadInputError("non-unit")
        return PadicInt(self.p, self.N, pow(self.r, -1, self.p**self.N))

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        return PadicInt(self.p, self.N, pow(self.r, k, self.p**self.N))

    def divide_by_p_power(self, k: int) -> "PadicInt":
        """Divide by p^k, surrendering k digits of precision."""
        if k == 0:
            return self
        if self.valuation < k:
            raise BadInputError(f"residue has valuation {self.valuation} < {k}")
        if self.N - k < 1:
            raise PrecisionError("precision exhausted")
        return PadicInt(self.p, self.N - k, self.r // self.p**k)

    def divide(self, other) -> "PadicInt":
        """Exact division; consumes precision when the divisor is not a unit."""
        b = self._coerce(other)
        k = b.valuation
        if k >= b.N:
            raise BadInputError("division by (indistinguishable-from-) zero")
        unit = PadicInt(self.p, b.N, b.r // self.p**k)
        return self.divide_by_p_power(k) * unit.invert()

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        N = min(self.N, b.N)
        return (self.r - b.r) % self.p**N == 0

    def __hash__(self):
        return hash((self.p, self.N, self.r))

    def __repr__(self):
        return f"PadicInt({self.r} mod {self.p}^{self.N})"


def binom_padic(t: PadicInt | int, k: int, p: int | None = None,
                N: int = DEFAULT_PRECISION) -> PadicInt:
    """Binomial coefficient t(t-1)...(t-k+1)/k! as a p-adic integer.

    Integral whenever t is (Mahler); the division by k! costs
    vp_factorial(k, p) digits of precision.
    """
    if k < 0:
        raise BadInputError("binomial index must be nonnegative")
    if not isinstance(t, PadicInt):
        if p is None:
            raise BadInputError("prime required when t is a plain integer")
        t = PadicInt(p, N, t)
    result = PadicInt(t.p, t.N, 1)
    for j in range(k):
        result = result * (t - j)
    if k >= 2:
        import math

        result = result.divide(PadicInt(t.p, t.N, math.factorial(k)))
    return result

"""
Exact integer kernels: modular inverses, Legendre/Jacobi symbols and the
closed-form quadratic Gauss sum.

Everything here works on Python integers, so intermediate products never
overflow regardless of the modulus.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidModulus, NotInvertible

__all__ = [
    "ModInt",
    "gcd",
    "mod_inverse",
    "is_prime",
    "legendre",
    "jacobi",
    "gauss_sum",
    "gauss_sum_direct",
]


def gcd(a: int, b: int) -> int:
    """Greatest common divisor, non-negative; ``gcd(0, 0) == 0``."""
    return math.gcd(int(a), int(b))


def mod_inverse(a: int, m: int) -> int:
    """
    Inverse of ``a`` modulo ``m``.

    Negative ``a`` is reduced into ``[0, m)`` first.

    Raises
    ------
    NotInvertible
        If ``gcd(a, m) != 1``.
    InvalidModulus
        If ``m < 2``.
    """
    m = int(m)
    if m < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {m}")
    a = int(a) % m
    if math.gcd(a, m) != 1:
        raise NotInvertible(f"{a} has no inverse modulo {m} (gcd = {math.gcd(a, m)})")
    return pow(a, -1, m)


@dataclass(frozen=True)
class ModInt:
    """An element of Z_modulus, always stored reduced."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidModulus(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, ModInt):
            if other.modulus != self.modulus:
                raise InvalidModulus("operands have different moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return ModInt(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt(self.value - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return ModInt(self._coerce(other) - self.value, self.modulus)

    def __mul__(self, other):
        return ModInt(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.value, self.modulus)

    def __pow__(self, e: int):
        if e < 0:
            return ModInt(pow(self.inverse().value, -e, self.modulus), self.modulus)
        return ModInt(pow(self.value, e, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    __index__ = __int__

    def inverse(self) -> "ModInt":
        return ModInt(mod_inverse(self.value, self.modulus), self.modulus)


def is_prime(p: int) -> bool:
    """Trial-division primality test (moduli here are small)."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime ``p``, via Euler's criterion."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise InvalidModulus(f"Legendre symbol needs an odd prime, got {p}")
    r = pow(int(a) % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def jacobi(a: int, b: int) -> int:
    """
    Jacobi symbol (a/b) for odd positive ``b``.

    Uses the binary reciprocity algorithm, so no factorization of ``b`` is
    needed. ``jacobi(a, 1) == 1`` for every ``a``.
    """
    b = int(b)
    if b < 1 or b % 2 == 0:
        raise InvalidModulus(f"Jacobi symbol needs an odd positive denominator, got {b}")
    a = int(a) % b
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                acc = -acc
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            acc = -acc
        a %= b
    return acc if b == 1 else 0


def gauss_sum(a: int, b: int, N: int) -> complex:
    r"""
    Closed form of the quadratic Gauss sum

    .. math:: \sum_{n=0}^{N-1} e^{j2\pi(an^2 + bn)/N}
              = \epsilon_N \sqrt{N} (a/N)_J e^{-j2\pi (4a)^{-1}_N b^2 / N}

    with :math:`\epsilon_N = 1` for ``N % 4 == 1`` and ``1j`` for ``N % 4 == 3``.

    Parameters
    ----------
    a, b : int
        Quadratic and linear coefficients; ``gcd(a, N)`` must be 1.
    N : int
        Odd positive modulus.
    """
    N = int(N)
    if N < 1 or N % 2 == 0:
        raise InvalidModulus(f"Gauss sum closed form needs odd N, got {N}")
    if N == 1:
        return 1.0 + 0.0j
    inv4a = mod_inverse(4 * a, N)
    eps = 1.0 if N % 4 == 1 else 1j
    phase = (inv4a * (int(b) % N) ** 2) % N
    return eps * math.sqrt(N) * jacobi(a, N) * cmath.exp(-2j * math.pi * phase / N)


def gauss_sum_direct(a: int, b: int, N: int) -> complex:
    """Brute-force evaluation of the Gauss sum, O(N)."""
    total = 0j
    for n in range(N):
        total += cmath.exp(2j * math.pi * ((a * n * n + b * n) % N) / N)
    return total

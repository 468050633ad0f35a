"""Exact and modular number arithmetic.

Word-sized prime fields, deterministic prime generation, Chinese
remaindering of residue vectors, and rational reconstruction.  Exact
rationals are plain ``fractions.Fraction`` values throughout the package
(re-exported here as ``BigRational``); Fraction already maintains the
reduced-form / positive-denominator invariants we rely on.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadPrimeError

BigRational = Fraction

MAX_PRIME_BITS = 62

# Witness set making Miller-Rabin deterministic for all n < 3.3 * 10^24,
# which covers every modulus this package generates (p < 2^62).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Deterministic primality test for word-sized integers (n < 2^64)."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    """Draw a uniform random prime from [2^(bits-1), 2^bits).

    Retries internally until the Miller-Rabin test accepts a candidate.
    """
    if not 2 <= bits <= MAX_PRIME_BITS:
        raise ValueError(f"prime size must be between 2 and {MAX_PRIME_BITS} bits, got {bits}")
    lo = 1 << (bits - 1)
    hi = (1 << bits) - 1
    while True:
        cand = rng.randint(lo, hi) | 1 if bits > 2 else rng.randint(lo, hi)
        if is_prime(cand):
            return cand


def fork_rng(seed, *labels) -> random.Random:
    """Deterministically fork a PRNG stream from a seed and a label path.

    String seeding in CPython hashes the text with SHA-512 and is stable
    across platforms and versions, so the same (seed, labels) always
    produces the same stream.  Every randomized stage of the pipeline owns
    its own fork; nothing shares a stream across tasks.
    """
    tag = "odelim:" + repr(seed) + ":" + ":".join(str(part) for part in labels)
    return random.Random(tag)


def modinv(a: int, p: int) -> int:
    """Inverse of a modulo a prime p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in prime field")
    return pow(a, p - 2, p)


class PrimeField:
    """Arithmetic modulo a word-sized prime, elements stored in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if p.bit_length() > MAX_PRIME_BITS:
            raise ValueError(f"modulus too large ({p.bit_length()} bits, max {MAX_PRIME_BITS})")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def add(self, a: int, b: int) -> int:
        r = a + b
        return r - self.p if r >= self.p else r

    def sub(self, a: int, b: int) -> int:
        r = a - b
        return r + self.p if r < 0 else r

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return self.p - a if a else 0

    def inv(self, a: int) -> int:
        return modinv(a, self.p)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    def reduce(self, q) -> int:
        """Map an integer or Fraction into the field.

        Raises BadPrimeError when a denominator is divisible by p, which
        callers treat as "skip this prime".
        """
        if isinstance(q, Fraction):
            den = q.denominator % self.p
            if den == 0:
                raise BadPrimeError(f"denominator {q.denominator} vanishes mod {self.p}")
            return q.numerator * modinv(den, self.p) % self.p
        return q % self.p


@dataclass(frozen=True)
class CrtAccumulator:
    """Residue vector modulo a growing product of pairwise distinct primes."""

    modulus: int
    residues: tuple

    @staticmethod
    def empty(length: int) -> "CrtAccumulator":
        return CrtAccumulator(1, (0,) * length)

    def absorb(self, residues, p: int) -> "CrtAccumulator":
        return crt_absorb(self, residues, p)


def crt_absorb(acc: CrtAccumulator, residues, p: int) -> CrtAccumulator:
    """Absorb a residue vector mod p into the accumulator.

    Returns a new accumulator with modulus acc.modulus * p whose residues
    are congruent to the old ones mod acc.modulus and to ``residues`` mod p.
    """
    if len(residues) != len(acc.residues):
        raise ValueError(
            f"residue length mismatch: accumulator has {len(acc.residues)}, got {len(residues)}"
        )
    m = acc.modulus
    if math.gcd(m, p) != 1:
        raise ValueError(f"modulus {p} is not coprime to the accumulated product")
    inv_m = modinv(m % p, p)
    combined = tuple(
        x + m * ((int(r) - x) * inv_m % p) for x, r in zip(acc.residues, residues)
    )
    return CrtAccumulator(m * p, combined)


def rational_reconstruct(r: int, m: int) -> Fraction | None:
    """Recover a bounded-height rational from its residue mod m.

    Returns a/b with a ≡ r·b (mod m), |a| ≤ √(m/2), 0 < b ≤ √(m/2) and
    gcd(b, m) = 1 when such a pair exists (half-extended Euclid), else None.
    The symmetric bound splits the modulus evenly between numerator and
    denominator; callers that need certainty combine this with a
    stabilization policy across additional primes.
    """
    if m < 2:
        raise ValueError("modulus must be at least 2")
    bound = math.isqrt(m // 2)
    r0, r1 = m, r % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    a, b = r1, s1
    if b == 0:
        return None
    if b < 0:
        a, b = -a, -b
    if b > bound or math.gcd(b, m) != 1:
        return None
    return Fraction(a, b)

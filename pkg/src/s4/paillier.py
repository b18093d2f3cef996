"""Additive partially homomorphic encryption (Paillier), the baseline
scheme for all comparative benchmarks and correctness cross-checks.

Standard textbook Paillier with g fixed to n+1, which reduces g^m mod n^2
to 1 + m*n.  Ciphertexts are plain ints in (0, n^2); multiplying two
ciphertexts mod n^2 yields an encryption of the sum of their plaintexts.

The two heavy modular exponentiations (r^n on encrypt, c^lambda on
decrypt) go through gmpy2 when it is installed; results are identical,
plain ``pow`` is the fallback.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

from .errors import InvalidCiphertext, KeyGenFailure, MessageOutOfRange
from .modmath import is_probable_prime, mod_inv, system_rng

try:
    from gmpy2 import powmod as _gmp_powmod

    def _powmod(base: int, exp: int, mod: int) -> int:
        return int(_gmp_powmod(base, exp, mod))

except ImportError:  # pragma: no cover - exercised only without gmpy2
    _powmod = pow

_MIN_BITS = 64          # small keys are for tests; benchmarks use 1024
_KEYGEN_ATTEMPTS = 64
_PRIME_ROUNDS = 64


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    n_sq: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "n_sq", self.n * self.n)

    @property
    def g(self) -> int:
        return self.n + 1

    def fingerprint(self) -> str:
        """Hex digest identifying the key in ciphertext table headers."""
        return hashlib.sha256(str(self.n).encode("ascii")).hexdigest()


@dataclass(frozen=True)
class PaillierKeyPair:
    n: int
    g: int
    lam: int
    mu: int

    @property
    def public(self) -> PaillierPublicKey:
        return PaillierPublicKey(self.n)


def keygen(bits: int, rng: random.Random | None = None) -> PaillierKeyPair:
    """Generate a key with an exactly ``bits``-bit modulus n = p*q.

    bits must be even and >= 64.  Retries internally when lambda and n
    share a factor; raises KeyGenFailure after a bounded attempt budget.
    """
    if bits < _MIN_BITS or bits % 2:
        raise ValueError(f"key size must be even and >= {_MIN_BITS} bits, got {bits}")
    rng = rng or system_rng()
    half = bits // 2
    for _ in range(_KEYGEN_ATTEMPTS):
        p = _random_prime(half, rng)
        q = _random_prime(half, rng)
        if p == q:
            continue
        n = p * q
        lam = math.lcm(p - 1, q - 1)
        if math.gcd(lam, n) != 1:
            continue
        return PaillierKeyPair(n=n, g=n + 1, lam=lam, mu=mod_inv(lam, n))
    raise KeyGenFailure(f"no usable prime pair after {_KEYGEN_ATTEMPTS} attempts")


def _random_prime(bits: int, rng: random.Random) -> int:
    # Top two bits forced so the product of two such primes always has
    # exactly 2*bits bits.
    while True:
        candidate = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
        if is_probable_prime(candidate, _PRIME_ROUNDS):
            return candidate


def encrypt(m: int, key: PaillierPublicKey, rng: random.Random | None = None) -> int:
    """c = (1 + m*n) * r^n mod n^2 with r uniform in Z_n*."""
    n = key.n
    if not 0 <= m < n:
        raise MessageOutOfRange(f"message must lie in [0, n), got bit length {m.bit_length()}")
    rng = rng or system_rng()
    while True:
        r = rng.randrange(1, n)
        if math.gcd(r, n) == 1:
            break
    n_sq = key.n_sq
    return (1 + m * n) % n_sq * _powmod(r, n, n_sq) % n_sq


def decrypt(c: int, key: PaillierKeyPair) -> int:
    """m = L(c^lambda mod n^2) * mu mod n, where L(u) = (u - 1) / n."""
    n = key.n
    n_sq = n * n
    if not 0 < c < n_sq:
        raise InvalidCiphertext("ciphertext outside (0, n^2)")
    u = _powmod(c, key.lam, n_sq) - 1
    if u % n:
        raise InvalidCiphertext("L is undefined: c is not a valid ciphertext under this key")
    return u // n * key.mu % n


def add(c1: int, c2: int, key: PaillierPublicKey) -> int:
    """Ciphertext of the sum of the two underlying plaintexts (mod n)."""
    return c1 * c2 % key.n_sq

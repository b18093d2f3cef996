"""Arbitrary-precision arithmetic over a prime field F_p.

Values are plain Python integers (unbounded precision).  Every function
returns fully reduced residues, 0 <= v < modulus, so results compare and
serialize canonically.

Randomness: callers that need random field elements take an ``rng``
argument defaulting to a process-wide ``random.SystemRandom`` (CSPRNG,
backed by ``os.urandom``).  A plain ``random.Random(seed)`` may be passed
instead for reproducible runs; it is NOT cryptographically secure and is
meant for tests and benchmarks only.
"""

from __future__ import annotations

import random
from typing import NamedTuple, Sequence

from .errors import DuplicateNode, NotInvertible, SingularSystem

_SYSTEM_RNG = random.SystemRandom()

# Trial division below this bound is both exact and faster than Miller-Rabin.
_SMALL_LIMIT = 1 << 16
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldPoint(NamedTuple):
    """A point (x, y) in F_p x F_p used as an interpolation node."""

    x: int
    y: int


def system_rng() -> random.Random:
    """The process-wide CSPRNG used when no rng is supplied."""
    return _SYSTEM_RNG


def mod_inv(a: int, p: int) -> int:
    """Multiplicative inverse of a modulo p, reduced to [1, p)."""
    try:
        return pow(a, -1, p)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {p}") from None


def mod_pow(base: int, exp: int, m: int) -> int:
    """base**exp mod m for m >= 2."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    return pow(base, exp, m)


def is_probable_prime(n: int, rounds: int = 64) -> bool:
    """Miller-Rabin primality verdict.

    Deterministic (trial division) for n < 2**16; above that the
    false-positive probability is at most 4**-rounds.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if n < 2:
        return False
    if n < _SMALL_LIMIT:
        return _trial_division(n)
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return False

    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = _SYSTEM_RNG.randrange(2, n - 1)
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


def _trial_division(n: int) -> bool:
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


def next_prime(bound: int) -> int:
    """Smallest probable prime strictly greater than bound (bound >= 2)."""
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    candidate = bound + 1
    if candidate % 2 == 0:
        if candidate == 2:
            return 2
        candidate += 1
    while not is_probable_prime(candidate):
        candidate += 2
    return candidate


def lagrange_basis_at(xs: Sequence[int], x0: int, p: int) -> list[int]:
    """Lagrange basis values [l_1(x0), ..., l_t(x0)] over nodes xs.

    For any y-values, the degree <= t-1 interpolant through (xs[i], y[i])
    evaluates at x0 to sum(y[i] * l_i(x0)) mod p.  The basis always sums
    to 1 mod p.  Cost is O(t^2) products with one inversion per term.
    """
    if not xs:
        raise ValueError("need at least one node")
    _require_distinct(xs)
    basis = []
    for i, xi in enumerate(xs):
        num = 1
        den = 1
        for j, xj in enumerate(xs):
            if i == j:
                continue
            num = num * (x0 - xj) % p
            den = den * (xi - xj) % p
        basis.append(num * mod_inv(den, p) % p)
    return basis


def lagrange_eval(points: Sequence[tuple[int, int]], x0: int, p: int) -> int:
    """Evaluate at x0 the unique polynomial of degree <= t-1 through the
    t given points, all arithmetic mod p."""
    xs = [pt[0] for pt in points]
    basis = lagrange_basis_at(xs, x0, p)
    return sum(pt[1] * b for pt, b in zip(points, basis)) % p


def gauss_solve(matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int) -> list[int]:
    """Solve the square system matrix . x = rhs mod p by Gauss-Jordan
    elimination with modular pivot inversion."""
    t = len(matrix)
    if t == 0:
        raise ValueError("empty system")
    if any(len(row) != t for row in matrix) or len(rhs) != t:
        raise ValueError("system must be square with a matching right-hand side")
    aug = [[v % p for v in row] + [rhs[i] % p] for i, row in enumerate(matrix)]
    for col in range(t):
        pivot = next((r for r in range(col, t) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"no invertible pivot in column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = mod_inv(aug[col][col], p)
        aug[col] = [v * inv % p for v in aug[col]]
        lead = aug[col]
        for r in range(t):
            f = aug[r][col]
            if r != col and f:
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], lead)]
    return [aug[i][t] for i in range(t)]


def batch_mod_inv(vals: Sequence[int], p: int) -> list[int]:
    """Inverses of all vals mod p with a single exponentiation
    (prefix-product trick); raises NotInvertible if any value is 0."""
    n = len(vals)
    prefix = [1] * (n + 1)
    for i, v in enumerate(vals):
        prefix[i + 1] = prefix[i] * v % p
    acc = mod_inv(prefix[n], p)
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * acc % p
        acc = acc * vals[i] % p
    return out


def _require_distinct(xs: Sequence[int]) -> None:
    if len(set(xs)) != len(xs):
        raise DuplicateNode(f"interpolation nodes must be pairwise distinct: {list(xs)}")

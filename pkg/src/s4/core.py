"""The secret-splitting scheme: key generation, splitting a value into
k-1 outsourceable splits, exact reconstruction, and finalization of
homomorphically summed splits.

A key fixes a prime p, a threshold k, k-1 evaluation points X, and one
anchor point (anchor.x, anchor.y) that is the same for every secret and
never leaves the trusted side.  Splitting a secret v builds a fresh
random polynomial of degree k-1 through (0, v) and the anchor, then
evaluates it at each x in X; those k-1 values are what the cloud stores.
Any party holding the k-1 splits AND the key can rebuild the polynomial
and read the secret back off as its value at 0.

The k-2 random construction points are discarded after splitting; they
are not needed for reconstruction.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    FieldTooSmall,
    InvalidThreshold,
    KeyFormatError,
    LengthMismatch,
    NotPrime,
    SecretOutOfRange,
)
from .modmath import (
    FieldPoint,
    batch_mod_inv,
    is_probable_prime,
    lagrange_basis_at,
    system_rng,
)

KEY_FORMAT_VERSION = "s4-key/1"


@dataclass(frozen=True)
class PrivateKey:
    """Secret key material: (X, anchor) plus the public field parameters.

    basis0 caches the Lagrange basis at 0 over the nodes X + (anchor.x,);
    it depends only on (X, anchor.x, p), never on any secret, and makes
    reconstruction a k-term dot product.
    """

    p: int
    k: int
    xs: tuple[int, ...]
    anchor: FieldPoint
    basis0: tuple[int, ...]

    @classmethod
    def create(cls, p: int, k: int, xs: Sequence[int], anchor: tuple[int, int]) -> "PrivateKey":
        """Validate the key invariants and precompute basis0."""
        _check_field(k, p)
        anchor = FieldPoint(*anchor)
        if len(xs) != k - 1:
            raise ValueError(f"need {k - 1} evaluation points, got {len(xs)}")
        if anchor.x == 0:
            raise ValueError("anchor x-coordinate must be nonzero")
        if not (0 < anchor.x < p and 0 <= anchor.y < p):
            raise ValueError("anchor coordinates must lie in F_p")
        for x in xs:
            if not 0 < x < p:
                raise ValueError(f"evaluation point {x} outside (0, p)")
            if x == anchor.x:
                raise ValueError(f"evaluation point {x} collides with the anchor")
        if len(set(xs)) != len(xs):
            raise ValueError("evaluation points must be pairwise distinct")
        basis0 = lagrange_basis_at([*xs, anchor.x], 0, p)
        return cls(p=p, k=k, xs=tuple(xs), anchor=anchor, basis0=tuple(basis0))


def keygen(k: int, p: int, rng: random.Random | None = None) -> PrivateKey:
    """Draw a fresh key: anchor and evaluation points uniform in F_p
    subject to the distinctness constraints."""
    _check_field(k, p)
    rng = rng or system_rng()
    anchor_x = 1 + rng.randrange(p - 1)
    anchor_y = rng.randrange(p)
    xs: list[int] = []
    taken = {0, anchor_x}
    while len(xs) < k - 1:
        c = rng.randrange(p)
        if c in taken:
            continue
        taken.add(c)
        xs.append(c)
    return PrivateKey.create(p, k, xs, (anchor_x, anchor_y))


def _check_field(k: int, p: int) -> None:
    if k < 2:
        raise InvalidThreshold(f"threshold must be >= 2, got {k}")
    if not is_probable_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p <= k + 1:
        raise FieldTooSmall(f"p={p} leaves fewer than {k - 1} usable evaluation points")


def draw_construction_nodes(key: PrivateKey, rng: random.Random | None = None) -> list[FieldPoint]:
    """The k-2 random points used to build one secret's polynomial.

    Abscissae are uniform in F_p excluding 0 and anchor.x and pairwise
    distinct (they may coincide with elements of X, which are evaluation
    targets, not construction nodes); ordinates are uniform in F_p.
    """
    rng = rng or system_rng()
    nodes: list[FieldPoint] = []
    taken = {0, key.anchor.x}
    while len(nodes) < key.k - 2:
        a = rng.randrange(key.p)
        if a in taken:
            continue
        taken.add(a)
        nodes.append(FieldPoint(a, rng.randrange(key.p)))
    return nodes


def split(value: int, key: PrivateKey, rng: random.Random | None = None) -> list[int]:
    """Split a secret into the k-1 values stored at the cloud provider.

    Equivalent to evaluating, at each x in key.xs, the unique degree
    <= k-1 polynomial through (0, value), the anchor, and k-2 fresh
    random nodes.  The random nodes are discarded.
    """
    p = key.p
    if not 0 <= value < p:
        raise SecretOutOfRange(f"secret must lie in [0, p), got {value}")
    nodes = draw_construction_nodes(key, rng)
    node_xs = [0, *(n.x for n in nodes), key.anchor.x]
    node_ys = [value, *(n.y for n in nodes), key.anchor.y]

    # Denominators d_i = prod_{j != i}(x_i - x_j) depend only on the node
    # set, so they are computed once and inverted in one batch; each
    # target then needs prefix/suffix products of (x0 - x_j) only.
    t = len(node_xs)
    dens = []
    for i, xi in enumerate(node_xs):
        d = 1
        for j, xj in enumerate(node_xs):
            if i != j:
                d = d * (xi - xj) % p
        dens.append(d)
    den_inv = batch_mod_inv(dens, p)

    out = []
    for x0 in key.xs:
        prefix = [1] * (t + 1)
        for j in range(t):
            prefix[j + 1] = prefix[j] * (x0 - node_xs[j]) % p
        suffix = [1] * (t + 1)
        for j in range(t - 1, -1, -1):
            suffix[j] = suffix[j + 1] * (x0 - node_xs[j]) % p
        acc = 0
        for i in range(t):
            acc += node_ys[i] * (prefix[i] * suffix[i + 1] % p) % p * den_inv[i]
        out.append(acc % p)
    return out


def reconstruct(splits: Sequence[int], key: PrivateKey) -> int:
    """Recover the secret from its k-1 stored splits plus the anchor."""
    _check_vector(splits, key)
    return _anchored_dot(splits, key.anchor.y, key)


def finalize_sum(response, key: PrivateKey) -> int:
    """Turn a provider aggregate (response.sums, response.count) into the
    plaintext sum of the queried secrets.

    The provider returns the column-wise mod-p sums of the splits; the
    missing k-th point is (anchor.x, count * anchor.y), supplied here.
    Exact provided the true plaintext sum is below p.
    """
    sums = response.sums
    count = response.count
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    _check_vector(sums, key)
    return _anchored_dot(sums, count * key.anchor.y % key.p, key)


def _check_vector(values: Sequence[int], key: PrivateKey) -> None:
    if len(values) != key.k - 1:
        raise LengthMismatch(f"expected {key.k - 1} values, got {len(values)}")
    for v in values:
        if not 0 <= v < key.p:
            raise ValueError(f"value {v} outside [0, p)")


def _anchored_dot(ys: Sequence[int], anchor_y: int, key: PrivateKey) -> int:
    acc = 0
    for y, b in zip(ys, key.basis0):
        acc += y * b
    return (acc + anchor_y * key.basis0[-1]) % key.p


# -- key file -----------------------------------------------------------
#
# Plain text, decimal fields, versioned first line:
#
#     s4-key/1
#     p=<prime>
#     k=<threshold>
#     x=<x_1> <x_2> ... <x_{k-1}>
#     anchor_x=<x_k>
#     anchor_v=<v_k>
#
# basis0 is never serialized; it is recomputed on load.  The file is the
# private key: keep it on the trusted side only (written 0o600).


def save_key(key: PrivateKey, path: str | Path) -> None:
    path = Path(path)
    lines = [
        KEY_FORMAT_VERSION,
        f"p={key.p}",
        f"k={key.k}",
        "x=" + " ".join(str(x) for x in key.xs),
        f"anchor_x={key.anchor.x}",
        f"anchor_v={key.anchor.y}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    try:
        os.chmod(path, 0o600)
    except OSError:
        pass


def load_key(path: str | Path) -> PrivateKey:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise KeyFormatError(f"cannot read key file {path}: {exc}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != KEY_FORMAT_VERSION:
        raise KeyFormatError(f"missing or unsupported version line in {path}")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        name, sep, value = ln.partition("=")
        if not sep:
            raise KeyFormatError(f"malformed key line: {ln!r}")
        fields[name.strip()] = value.strip()
    try:
        p = int(fields["p"])
        k = int(fields["k"])
        xs = [int(tok) for tok in fields["x"].split()]
        anchor = (int(fields["anchor_x"]), int(fields["anchor_v"]))
    except (KeyError, ValueError) as exc:
        raise KeyFormatError(f"bad or missing key field: {exc}") from None
    return PrivateKey.create(p, k, xs, anchor)

"""Known-plaintext attack against the splitting scheme.

A curious provider that learns the plaintext secrets behind enough of
its own rows can solve for the reconstruction coefficients and then read
every other row in the table.  Each known (secret, splits) pair yields
one linear equation over F_p:

    secret = splits[0]*lambda_1 + ... + splits[k-2]*lambda_{k-1} + c

in the k unknowns (lambda_1..lambda_{k-1}, c), where the lambdas are the
Lagrange basis values at 0 over the key's nodes and c absorbs the
anchor's fixed contribution.  With k independent pairs the system is
square and the solve is exact; with fewer it is underdetermined (one
free dimension, p candidate solutions), so this implementation refuses
to guess and demands at least k pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import InconsistentPairs, InsufficientPairs, WidthMismatch
from .modmath import gauss_solve
from .store import SplitTable


class KnownPair(NamedTuple):
    secret: int
    splits: tuple[int, ...]


@dataclass(frozen=True)
class RecoveredBasis:
    """Attack output: per-column coefficients plus the constant term.

    For every row of the victim table, sum(splits[i] * lambdas[i]) + c
    mod p equals the row's secret.
    """

    lambdas: tuple[int, ...]
    c: int

    def apply(self, splits: Sequence[int], p: int) -> int:
        if len(splits) != len(self.lambdas):
            raise WidthMismatch(
                f"row width {len(splits)} does not match basis width {len(self.lambdas)}"
            )
        acc = self.c
        for s, l in zip(splits, self.lambdas):
            acc += s * l
        return acc % p


def recover_basis(pairs: Sequence[KnownPair], p: int) -> RecoveredBasis:
    """Solve for (lambdas, c) from at least k known pairs.

    The first k pairs form the solved system; every supplied pair is then
    residual-checked, so pairs drawn from different keys are rejected
    rather than silently producing garbage.
    """
    if not pairs:
        raise InsufficientPairs("no known pairs supplied")
    width = len(pairs[0].splits)
    for pair in pairs:
        if len(pair.splits) != width:
            raise WidthMismatch("known pairs have inconsistent split widths")
    unknowns = width + 1
    if len(pairs) < unknowns:
        raise InsufficientPairs(
            f"need at least {unknowns} known pairs for width {width}, got {len(pairs)}"
        )
    matrix = [[*pair.splits, 1] for pair in pairs[:unknowns]]
    rhs = [pair.secret for pair in pairs[:unknowns]]
    solution = gauss_solve(matrix, rhs, p)
    basis = RecoveredBasis(tuple(solution[:-1]), solution[-1])
    for pair in pairs:
        if basis.apply(pair.splits, p) != pair.secret % p:
            raise InconsistentPairs(
                "recovered coefficients do not reproduce every known pair; "
                "the pairs were not all produced under one key"
            )
    return basis


def recover_secrets(basis: RecoveredBasis, table: SplitTable, p: int) -> list[int]:
    """Apply the recovered coefficients to every row of a table, in row
    order.  Exact for any table written under the attacked key."""
    if table.k - 1 != len(basis.lambdas):
        raise WidthMismatch(
            f"table width {table.k - 1} does not match basis width {len(basis.lambdas)}"
        )
    return [basis.apply(record.splits, p) for record in table.rows()]

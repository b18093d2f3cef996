"""Trusted-side query layer: encodes plaintext measures, drives splitting
and ingestion, and finalizes SUM/COUNT/AVG results from provider
aggregates.

Values are fixed-point encoded (power-of-ten scale) into field elements.
AVG is computed client-side from one SUM+COUNT round trip; division does
not commute with the mod-p representation, so the provider never divides.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .core import PrivateKey, finalize_sum, split
from .errors import (
    EmptySelection,
    NegativeValue,
    Overflow,
    PrimeTooSmall,
    TableFormatError,
)
from .modmath import next_prime
from .store import CspStore, SplitRecord


@dataclass(frozen=True)
class EncodingSpec:
    """Fixed-point encoding: stored field element = value * scale.

    max_value bounds the encoded integer; pick it so that
    max_value * (expected row count) stays below the table's prime.
    """

    max_value: int
    scale: int = 1

    def __post_init__(self):
        if self.scale < 1 or 10 ** len(str(self.scale)) != 10 * self.scale:
            raise ValueError(f"scale must be a power of ten, got {self.scale}")
        if self.max_value < 1:
            raise ValueError(f"max_value must be >= 1, got {self.max_value}")


@dataclass(frozen=True)
class QueryResult:
    kind: str  # SUM | COUNT | AVG
    numerator: int
    count: int
    decoded: Fraction

    def json_line(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "numerator": self.numerator,
                "count": self.count,
                "decoded": render_fraction(self.decoded),
            },
            sort_keys=True,
        )


def encode(value, spec: EncodingSpec) -> int:
    """Encode a nonnegative number as a field element per the encoding spec."""
    if isinstance(value, int):
        dec = Decimal(value)
    elif isinstance(value, Decimal):
        dec = value
    else:
        try:
            dec = Decimal(str(value))
        except InvalidOperation:
            raise ValueError(f"cannot interpret {value!r} as a number") from None
    if dec < 0:
        raise NegativeValue(f"negative values are not encodable, got {value}")
    scaled = dec * spec.scale
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{value} is not representable at scale {spec.scale}")
    n = int(scaled)
    if n > spec.max_value:
        raise Overflow(f"encoded value {n} exceeds max_value {spec.max_value}")
    return n


def decode(encoded: int, spec: EncodingSpec) -> Fraction:
    return Fraction(encoded, spec.scale)


def auto_prime(row_count: int, max_value: int, scale: int = 1) -> int:
    """Default table prime: the first prime above row_count * max_value
    * scale, so that any full-table sum stays below p with headroom."""
    return next_prime(row_count * max_value * scale)


def outsource(
    values,
    key: PrivateKey,
    spec: EncodingSpec,
    store: CspStore,
    table: str,
    rng: random.Random | None = None,
) -> int:
    """Encode, split, and ingest the given values; returns the row count
    added.  Row ids continue from the table's current size."""
    encoded = [encode(v, spec) for v in values]
    if sum(encoded) >= key.p:
        raise PrimeTooSmall(
            f"sum of encoded values ({sum(encoded)}) reaches p={key.p}; "
            "regenerate the key with a larger prime"
        )
    if not store.has_table(table):
        store.create_table(table, key.k, key.p)
    else:
        t = store.table(table)
        if t.k != key.k or t.p != key.p:
            raise TableFormatError(
                f"table {table!r} was created for k={t.k}, p={t.p}; key has k={key.k}, p={key.p}"
            )
    next_id = store.count_rows(table)
    rows = [
        SplitRecord(next_id + i, tuple(split(v, key, rng)))
        for i, v in enumerate(encoded)
    ]
    store.ingest(table, rows)
    return len(rows)


def sum_query(
    store: CspStore,
    table: str,
    ids,
    key: PrivateKey,
    spec: EncodingSpec,
) -> QueryResult:
    """Ask the provider for column sums, finalize locally.  Exact equality
    with the plaintext sum, provided the table respected the p sizing rule."""
    response = store.sum_splits(table, ids)
    numerator = finalize_sum(response, key)
    return QueryResult("SUM", numerator, response.count, Fraction(numerator, spec.scale))


def avg_query(
    store: CspStore,
    table: str,
    ids,
    key: PrivateKey,
    spec: EncodingSpec,
) -> QueryResult:
    response = store.sum_splits(table, ids)
    if response.count == 0:
        raise EmptySelection("AVG over an empty selection")
    numerator = finalize_sum(response, key)
    return QueryResult(
        "AVG", numerator, response.count, Fraction(numerator, response.count * spec.scale)
    )


def count_query(store: CspStore, table: str, ids) -> QueryResult:
    """Row count only; touches no key material at all."""
    count = store.count_rows(table, ids)
    return QueryResult("COUNT", count, count, Fraction(count))


def render_fraction(fr: Fraction) -> str:
    """Exact text form: integer, terminating decimal, or 'num/den'."""
    if fr.denominator == 1:
        return str(fr.numerator)
    den = fr.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{fr.numerator}/{fr.denominator}"
    shift = max(twos, fives)
    digits = fr.numerator * 10**shift // fr.denominator
    text = str(digits).rjust(shift + 1, "0")
    return f"{text[:-shift]}.{text[-shift:]}"

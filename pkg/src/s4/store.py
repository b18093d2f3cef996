"""Simulated honest-but-curious cloud store.

Persists split tables (and Paillier ciphertext tables) under a directory
and executes server-side aggregation.  The store is the untrusted side
of the protocol: its whole public surface takes only public parameters
(the prime p, a Paillier public modulus n) and never any private key
material, so nothing in this module can reconstruct a secret.

Split table file (UTF-8 text, one file per table, append-only):

    s4-table/1 k=<k> p=<decimal p>
    id,a1,...,a{k-1}
    <id>,<split_1>,...,<split_{k-1}>

Ciphertext table file:

    s4-ptable/1 fingerprint=<sha256 of decimal n>
    id,c
    <id>,<decimal ciphertext>

Every cell is a decimal big integer.  Tables are held column-major in
memory so that column sums run at native speed.

Concurrency contract: single writer, multiple readers per table.
``ingest`` assumes exclusive access; aggregation and row reads may run
concurrently with each other.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Collection, Iterable, Iterator, NamedTuple

from .errors import (
    DuplicateId,
    TableExists,
    TableFormatError,
    UnknownId,
    UnknownTable,
    WidthMismatch,
)

SPLIT_TABLE_VERSION = "s4-table/1"
CIPHER_TABLE_VERSION = "s4-ptable/1"
SPLIT_SUFFIX = ".s4t"
CIPHER_SUFFIX = ".s4p"

_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")


class SplitRecord(NamedTuple):
    id: int
    splits: tuple[int, ...]


class AggregateResponse(NamedTuple):
    """Provider answer to a summation request: the column-wise mod-p sums
    of the selected rows plus the number of rows aggregated."""

    sums: list[int]
    count: int


class SplitTable:
    """One outsourced table: k-1 split columns keyed by record id."""

    def __init__(self, name: str, k: int, p: int, path: Path):
        self.name = name
        self.k = k
        self.p = p
        self.path = path
        self.ids: list[int] = []
        self.columns: list[list[int]] = [[] for _ in range(k - 1)]
        self._id_pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.ids)

    def rows(self) -> Iterator[SplitRecord]:
        for pos, rid in enumerate(self.ids):
            yield SplitRecord(rid, tuple(col[pos] for col in self.columns))

    def row(self, rid: int) -> SplitRecord:
        pos = self._id_pos.get(rid)
        if pos is None:
            raise UnknownId(f"no row {rid} in table {self.name!r}")
        return SplitRecord(rid, tuple(col[pos] for col in self.columns))


class CipherTable:
    """One outsourced Paillier column: ciphertexts keyed by record id."""

    def __init__(self, name: str, fingerprint: str, path: Path):
        self.name = name
        self.fingerprint = fingerprint
        self.path = path
        self.ids: list[int] = []
        self.cts: list[int] = []
        self._id_pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.ids)


class CspStore:
    """Directory-backed store; one file per table, loaded on first use."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._splits: dict[str, SplitTable] = {}
        self._ciphers: dict[str, CipherTable] = {}

    # -- split tables ----------------------------------------------------

    def create_table(self, name: str, k: int, p: int) -> SplitTable:
        path = self._path(name, SPLIT_SUFFIX)
        if name in self._splits or path.exists():
            raise TableExists(f"table {name!r} already exists")
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        table = SplitTable(name, k, p, path)
        header = ",".join(["id"] + [f"a{i}" for i in range(1, k)])
        _append(path, f"{SPLIT_TABLE_VERSION} k={k} p={p}\n{header}\n")
        self._splits[name] = table
        return table

    def has_table(self, name: str) -> bool:
        return name in self._splits or self._path(name, SPLIT_SUFFIX).exists()

    def table(self, name: str) -> SplitTable:
        t = self._splits.get(name)
        if t is None:
            path = self._path(name, SPLIT_SUFFIX)
            if not path.exists():
                raise UnknownTable(f"no split table {name!r} in {self.root}")
            t = self._splits[name] = _load_split_table(name, path)
        return t

    def ingest(self, name: str, rows: Iterable[SplitRecord]) -> int:
        """Append rows durably; returns the total rows now stored."""
        t = self.table(name)
        width = t.k - 1
        staged: list[SplitRecord] = []
        seen: set[int] = set()
        for row in rows:
            row = SplitRecord(int(row[0]), tuple(row[1]))
            if len(row.splits) != width:
                raise WidthMismatch(
                    f"row {row.id}: expected {width} splits, got {len(row.splits)}"
                )
            if row.id in t._id_pos or row.id in seen:
                raise DuplicateId(f"row id {row.id} already present in {name!r}")
            seen.add(row.id)
            staged.append(row)
        lines = []
        for row in staged:
            pos = len(t.ids)
            t.ids.append(row.id)
            t._id_pos[row.id] = pos
            for col, v in zip(t.columns, row.splits):
                col.append(v)
            lines.append(str(row.id) + "," + ",".join(map(str, row.splits)))
        if lines:
            _append(t.path, "\n".join(lines) + "\n")
        return len(t.ids)

    def sum_splits(self, name: str, ids: Collection[int] | None = None) -> AggregateResponse:
        """Column-wise mod-p sums over the selection (None means ALL)."""
        t = self.table(name)
        p = t.p
        if ids is None:
            return AggregateResponse([sum(col) % p for col in t.columns], len(t.ids))
        positions = self._positions(t, ids)
        sums = [sum(col[i] for i in positions) % p for col in t.columns]
        return AggregateResponse(sums, len(positions))

    def count_rows(self, name: str, ids: Collection[int] | None = None) -> int:
        t = self.table(name)
        if ids is None:
            return len(t.ids)
        return len(self._positions(t, ids))

    def rows(self, name: str, ids: Collection[int] | None = None) -> Iterator[SplitRecord]:
        t = self.table(name)
        if ids is None:
            yield from t.rows()
        else:
            for i in self._positions(t, ids):
                rid = t.ids[i]
                yield SplitRecord(rid, tuple(col[i] for col in t.columns))

    @staticmethod
    def _positions(t: SplitTable | CipherTable, ids: Collection[int]) -> list[int]:
        positions = []
        for rid in set(ids):
            pos = t._id_pos.get(rid)
            if pos is None:
                raise UnknownId(f"no row {rid} in table {t.name!r}")
            positions.append(pos)
        positions.sort()
        return positions

    # -- ciphertext tables -------------------------------------------------

    def create_ciphertext_table(self, name: str, fingerprint: str) -> CipherTable:
        path = self._path(name, CIPHER_SUFFIX)
        if name in self._ciphers or path.exists():
            raise TableExists(f"ciphertext table {name!r} already exists")
        table = CipherTable(name, fingerprint, path)
        _append(path, f"{CIPHER_TABLE_VERSION} fingerprint={fingerprint}\nid,c\n")
        self._ciphers[name] = table
        return table

    def ciphertext_table(self, name: str) -> CipherTable:
        t = self._ciphers.get(name)
        if t is None:
            path = self._path(name, CIPHER_SUFFIX)
            if not path.exists():
                raise UnknownTable(f"no ciphertext table {name!r} in {self.root}")
            t = self._ciphers[name] = _load_cipher_table(name, path)
        return t

    def ingest_ciphertexts(self, name: str, rows: Iterable[tuple[int, int]]) -> int:
        t = self.ciphertext_table(name)
        staged = []
        seen: set[int] = set()
        for rid, ct in rows:
            rid = int(rid)
            if rid in t._id_pos or rid in seen:
                raise DuplicateId(f"row id {rid} already present in {name!r}")
            seen.add(rid)
            staged.append((rid, ct))
        lines = []
        for rid, ct in staged:
            t._id_pos[rid] = len(t.ids)
            t.ids.append(rid)
            t.cts.append(ct)
            lines.append(f"{rid},{ct}")
        if lines:
            _append(t.path, "\n".join(lines) + "\n")
        return len(t.ids)

    def aggregate_ciphertexts(
        self, name: str, n: int, fingerprint: str, ids: Collection[int] | None = None
    ) -> tuple[int, int]:
        """Homomorphic sum: the product of the selected ciphertexts mod n^2.

        The caller supplies the public modulus; it must match the
        fingerprint recorded when the table was created.  Returns
        (ciphertext, count); the empty product is 1, an encryption of 0.
        """
        t = self.ciphertext_table(name)
        if fingerprint != t.fingerprint:
            raise TableFormatError(
                f"table {name!r} was written under a different public key"
            )
        n_sq = n * n
        if ids is None:
            selected: Iterable[int] = t.cts
            count = len(t.cts)
        else:
            positions = self._positions(t, ids)
            selected = [t.cts[i] for i in positions]
            count = len(positions)
        acc = 1
        for ct in selected:
            acc = acc * ct % n_sq
        return acc, count

    # -- shared ------------------------------------------------------------

    def _path(self, name: str, suffix: str) -> Path:
        if not _NAME_RE.fullmatch(name):
            raise ValueError(f"invalid table name {name!r}")
        return self.root / (name + suffix)


def _append(path: Path, text: str) -> None:
    with open(path, "a", encoding="utf-8", newline="") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())


def _load_split_table(name: str, path: Path) -> SplitTable:
    with open(path, encoding="utf-8") as f:
        meta = f.readline().rstrip("\n")
        m = re.fullmatch(rf"{re.escape(SPLIT_TABLE_VERSION)} k=(\d+) p=(\d+)", meta)
        if not m:
            raise TableFormatError(f"{path}: bad metadata line {meta!r}")
        k, p = int(m.group(1)), int(m.group(2))
        header = f.readline().rstrip("\n")
        expected = ",".join(["id"] + [f"a{i}" for i in range(1, k)])
        if header != expected:
            raise TableFormatError(f"{path}: bad header {header!r}")
        table = SplitTable(name, k, p, path)
        for lineno, line in enumerate(f, start=3):
            parts = line.rstrip("\n").split(",")
            if len(parts) != k:
                raise TableFormatError(f"{path}:{lineno}: expected {k} fields")
            try:
                rid = int(parts[0])
                cells = [int(c) for c in parts[1:]]
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: non-integer cell") from None
            if rid in table._id_pos:
                raise TableFormatError(f"{path}:{lineno}: duplicate id {rid}")
            table._id_pos[rid] = len(table.ids)
            table.ids.append(rid)
            for col, v in zip(table.columns, cells):
                col.append(v)
    return table


def _load_cipher_table(name: str, path: Path) -> CipherTable:
    with open(path, encoding="utf-8") as f:
        meta = f.readline().rstrip("\n")
        m = re.fullmatch(rf"{re.escape(CIPHER_TABLE_VERSION)} fingerprint=([0-9a-f]+)", meta)
        if not m:
            raise TableFormatError(f"{path}: bad metadata line {meta!r}")
        header = f.readline().rstrip("\n")
        if header != "id,c":
            raise TableFormatError(f"{path}: bad header {header!r}")
        table = CipherTable(name, m.group(1), path)
        for lineno, line in enumerate(f, start=3):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 2:
                raise TableFormatError(f"{path}:{lineno}: expected 2 fields")
            try:
                rid, ct = int(parts[0]), int(parts[1])
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: non-integer cell") from None
            if rid in table._id_pos:
                raise TableFormatError(f"{path}:{lineno}: duplicate id {rid}")
            table._id_pos[rid] = len(table.ids)
            table.ids.append(rid)
            table.cts.append(ct)
    return table

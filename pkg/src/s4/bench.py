"""Benchmark harness comparing the splitting scheme against the Paillier
baseline: synthetic dataset generation, split/encrypt timing,
reconstruct/decrypt timing, whole-table SUM timing, and exact storage
accounting of the outsourced representation.

Timing protocol: monotonic clock, one discarded warm-up run, median over
``repetitions`` timed runs.  Every benchmarked SUM is cross-checked
against the plaintext oracle and the run aborts on any mismatch, so a
timing number can never come from a wrong answer.

Storage is counted from the serialized table files, not estimated: cells
are counted in the file and multiplied by a fixed binary-equivalent cell
width (8 bytes per split cell, 2*keybits/8 per ciphertext), after
checking that every cell actually fits that width.

Wall-clock warning: the full default grid (m up to 10**6, k up to 64,
1024-bit keys) takes hours in pure Python.  Paillier phases are skipped
above m = 10**5 unless explicitly uncapped.
"""

from __future__ import annotations

import random
import statistics
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from . import core, paillier
from .errors import BenchVerificationError
from .modmath import next_prime
from .store import CIPHER_TABLE_VERSION, SPLIT_TABLE_VERSION, CspStore, SplitRecord

PHASES = ("split", "reconstruct", "sum", "storage")
SPLIT_CELL_BYTES = 8
PAILLIER_M_CAP = 10**5


@dataclass(frozen=True)
class BenchConfig:
    m_list: tuple[int, ...] = (10**3, 10**4, 10**5, 10**6)
    k_list: tuple[int, ...] = (8, 16, 32, 64)
    paillier_bits: int = 1024
    value_range: tuple[int, int] = (10**3, 10**4)
    seed: int = 0
    repetitions: int = 5
    phases: tuple[str, ...] = PHASES
    include_paillier: bool = True
    uncap_paillier: bool = False  # allow Paillier phases above m = 10**5

    def __post_init__(self):
        low, high = self.value_range
        if low >= high:
            raise ValueError(f"empty value range [{low}, {high})")
        if any(m < 1 for m in self.m_list):
            raise ValueError("m must be >= 1")
        if any(k < 2 for k in self.k_list):
            raise ValueError("k must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        bad = set(self.phases) - set(PHASES)
        if bad:
            raise ValueError(f"unknown phases: {sorted(bad)}")


@dataclass(frozen=True)
class BenchRecord:
    scheme: str  # "s4" | "paillier"
    param: int  # k for s4, key bits for paillier
    m: int
    phase: str  # split | reconstruct | sum | storage
    metric: str  # "seconds" | "bytes"
    value: float | int


def gen_dataset(m: int, value_range: tuple[int, int], seed) -> list[int]:
    """m values i.i.d. uniform on [low, high), deterministic per seed."""
    low, high = value_range
    if low >= high:
        raise ValueError(f"empty value range [{low}, {high})")
    rng = random.Random(seed)
    return [rng.randrange(low, high) for _ in range(m)]


def run_bench(config: BenchConfig, work_dir: str | Path | None = None) -> list[BenchRecord]:
    """Execute the configured grid and return one record per
    (scheme, param, m, phase) cell."""
    if work_dir is None:
        work_dir = tempfile.mkdtemp(prefix="s4-bench-")
    store = CspStore(Path(work_dir) / f"run-{time.strftime('%Y%m%d-%H%M%S')}-{time.monotonic_ns()}")
    records: list[BenchRecord] = []

    pail_key = None
    if config.include_paillier:
        pail_key = paillier.keygen(
            config.paillier_bits, random.Random(f"{config.seed}/paillier-key")
        )

    for m in config.m_list:
        data = gen_dataset(m, config.value_range, f"{config.seed}/data/{m}")
        oracle_sum = sum(data)
        p = next_prime(m * config.value_range[1])
        for k in config.k_list:
            records.extend(_bench_s4(config, store, m, k, p, data, oracle_sum))
        if pail_key is not None:
            if m > PAILLIER_M_CAP and not config.uncap_paillier:
                continue
            records.extend(_bench_paillier(config, store, m, pail_key, data, oracle_sum))
    return sorted(records, key=_record_order)


def _bench_s4(config, store, m, k, p, data, oracle_sum):
    records = []
    key = core.keygen(k, p, random.Random(f"{config.seed}/key/{m}/{k}"))
    split_rng = random.Random(f"{config.seed}/split/{m}/{k}")
    vectors: list[list[int]] = []

    def split_all():
        vectors.clear()
        vectors.extend(core.split(v, key, split_rng) for v in data)

    if "split" in config.phases:
        seconds = _timed_median(split_all, config.repetitions)
        records.append(BenchRecord("s4", k, m, "split", "seconds", seconds))
    else:
        split_all()

    if "reconstruct" in config.phases:

        def reconstruct_all():
            return [core.reconstruct(vec, key) for vec in vectors]

        seconds = _timed_median(reconstruct_all, config.repetitions)
        records.append(BenchRecord("s4", k, m, "reconstruct", "seconds", seconds))
        if reconstruct_all() != data:
            raise BenchVerificationError(f"s4 reconstruct mismatch at m={m}, k={k}")

    if "sum" in config.phases or "storage" in config.phases:
        name = f"s4-m{m}-k{k}"
        store.create_table(name, k, p)
        store.ingest(name, (SplitRecord(i, tuple(vec)) for i, vec in enumerate(vectors)))
        vectors.clear()  # the store's column copy is all later phases need

        if "sum" in config.phases:

            def sum_query():
                return core.finalize_sum(store.sum_splits(name), key)

            seconds = _timed_median(sum_query, config.repetitions)
            if sum_query() != oracle_sum:
                raise BenchVerificationError(f"s4 SUM mismatch at m={m}, k={k}")
            records.append(BenchRecord("s4", k, m, "sum", "seconds", seconds))

        if "storage" in config.phases:
            payload = split_table_payload_bytes(store.table(name).path)
            records.append(BenchRecord("s4", k, m, "storage", "bytes", payload))
    return records


def _bench_paillier(config, store, m, key, data, oracle_sum):
    records = []
    bits = config.paillier_bits
    pub = key.public
    enc_rng = random.Random(f"{config.seed}/encrypt/{m}/{bits}")
    cts: list[int] = []

    def encrypt_all():
        cts.clear()
        cts.extend(paillier.encrypt(v, pub, enc_rng) for v in data)

    if "split" in config.phases:
        seconds = _timed_median(encrypt_all, config.repetitions)
        records.append(BenchRecord("paillier", bits, m, "split", "seconds", seconds))
    else:
        encrypt_all()

    if "reconstruct" in config.phases:

        def decrypt_all():
            return [paillier.decrypt(ct, key) for ct in cts]

        seconds = _timed_median(decrypt_all, config.repetitions)
        records.append(BenchRecord("paillier", bits, m, "reconstruct", "seconds", seconds))
        if decrypt_all() != [v % key.n for v in data]:
            raise BenchVerificationError(f"paillier decrypt mismatch at m={m}")

    if "sum" in config.phases or "storage" in config.phases:
        name = f"paillier-m{m}-b{bits}"
        fp = pub.fingerprint()
        store.create_ciphertext_table(name, fp)
        store.ingest_ciphertexts(name, enumerate(cts))
        cts.clear()  # the store's copy is all later phases need

        if "sum" in config.phases:

            def sum_query():
                folded, _count = store.aggregate_ciphertexts(name, pub.n, fp)
                return paillier.decrypt(folded, key)

            seconds = _timed_median(sum_query, config.repetitions)
            if sum_query() != oracle_sum % key.n:
                raise BenchVerificationError(f"paillier SUM mismatch at m={m}")
            records.append(BenchRecord("paillier", bits, m, "sum", "seconds", seconds))

        if "storage" in config.phases:
            payload = ciphertext_table_payload_bytes(
                store.ciphertext_table(name).path, 2 * bits // 8
            )
            records.append(BenchRecord("paillier", bits, m, "storage", "bytes", payload))
    return records


def _timed_median(fn: Callable, repetitions: int) -> float:
    fn()  # warm-up, discarded
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


# -- storage accounting ---------------------------------------------------


def split_table_payload_bytes(path: str | Path, cell_bytes: int = SPLIT_CELL_BYTES) -> int:
    """Payload of a split table file in fixed binary-equivalent form:
    (number of split cells) * cell_bytes, verifying every cell fits."""
    limit = 1 << (8 * cell_bytes)
    cells = 0
    # Cells shorter than the limit's digit count minus one always fit.
    fast_len = len(str(limit)) - 1
    with open(path, encoding="utf-8") as f:
        meta = f.readline()
        if not meta.startswith(SPLIT_TABLE_VERSION):
            raise BenchVerificationError(f"{path}: not a split table file")
        f.readline()  # column header
        for line in f:
            row = line.rstrip("\n").split(",")[1:]
            for cell in row:
                if len(cell) >= fast_len and int(cell) >= limit:
                    raise BenchVerificationError(
                        f"{path}: cell does not fit {cell_bytes} bytes"
                    )
            cells += len(row)
    return cells * cell_bytes


def ciphertext_table_payload_bytes(path: str | Path, ct_bytes: int) -> int:
    """Payload of a ciphertext table file: rows * ct_bytes, verifying
    every ciphertext fits ct_bytes."""
    limit = 1 << (8 * ct_bytes)
    fast_len = len(str(limit)) - 1
    rows = 0
    with open(path, encoding="utf-8") as f:
        meta = f.readline()
        if not meta.startswith(CIPHER_TABLE_VERSION):
            raise BenchVerificationError(f"{path}: not a ciphertext table file")
        f.readline()  # column header
        for line in f:
            cell = line.rstrip("\n").split(",")[1]
            if len(cell) >= fast_len and int(cell) >= limit:
                raise BenchVerificationError(f"{path}: ciphertext does not fit {ct_bytes} bytes")
            rows += 1
    return rows * ct_bytes


# -- CSV emission -----------------------------------------------------------


def emit_csv(records: Iterable[BenchRecord], path: str | Path) -> Path:
    """Write records as CSV with a stable (scheme, m, phase, param) order;
    re-emitting the same records yields a byte-identical file."""
    records = sorted(records, key=_record_order)
    if not records:
        raise ValueError("no records to emit")
    path = Path(path)
    lines = ["scheme,param,m,phase,metric,value"]
    for r in records:
        value = repr(r.value) if isinstance(r.value, float) else str(r.value)
        lines.append(f"{r.scheme},{r.param},{r.m},{r.phase},{r.metric},{value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _record_order(r: BenchRecord):
    return (r.scheme, r.m, r.phase, r.param)

import itertools
import random

import pytest

from s4 import attack, core
from s4.attack import KnownPair, RecoveredBasis
from s4.errors import InconsistentPairs, InsufficientPairs, SingularSystem, WidthMismatch
from s4.modmath import next_prime
from s4.store import CspStore, SplitRecord


def _build_table(tmp_path, key, values, rng, name="t"):
    store = CspStore(tmp_path / "store")
    if not store.has_table(name):
        store.create_table(name, key.k, key.p)
    store.ingest(
        name,
        [SplitRecord(i, tuple(core.split(v, key, rng))) for i, v in enumerate(values)],
    )
    return store.table(name)


def test_recover_basis_worked_case():
    basis = attack.recover_basis([KnownPair(7, (25,)), KnownPair(10, (22,))], 31)
    # cross-check against the key behind the worked vectors: X={2},
    # anchor (1,16): lambda_1 = 30 and c = 16 * 2 mod 31 = 1
    assert basis.lambdas == (30,)
    assert basis.c == 1


def test_recovered_secrets_worked_table(tmp_path):
    key = core.PrivateKey.create(31, 2, [2], (1, 16))
    table = _build_table(tmp_path, key, [7, 10], random.Random(1))
    basis = RecoveredBasis((30,), 1)
    assert attack.recover_secrets(basis, table, 31) == [7, 10]


def test_full_recovery_then_scorecard_against_true_key(tmp_path):
    rng = random.Random(3)
    p = next_prime(10**7)
    key = core.keygen(8, p, rng)
    values = [rng.randrange(10**4) for _ in range(100)]
    table = _build_table(tmp_path, key, values, rng)

    known = [KnownPair(values[i], table.row(i).splits) for i in range(key.k)]
    basis = attack.recover_basis(known, p)
    assert attack.recover_secrets(basis, table, p) == values

    # the solved coefficients ARE the key's cached reconstruction basis
    assert basis.lambdas == key.basis0[: key.k - 1]
    assert basis.c == key.anchor.y * key.basis0[-1] % p


def test_residuals_checked_over_all_pairs(tmp_path):
    rng = random.Random(5)
    p = next_prime(10**6)
    key = core.keygen(4, p, rng)
    values = [rng.randrange(10**4) for _ in range(20)]
    table = _build_table(tmp_path, key, values, rng)
    known = [KnownPair(values[i], table.row(i).splits) for i in range(12)]
    basis = attack.recover_basis(known, p)  # extra pairs only confirm
    assert all(basis.apply(pair.splits, p) == pair.secret for pair in known)


def test_insufficient_pairs_refused():
    pairs = [KnownPair(7, (25,))]
    with pytest.raises(InsufficientPairs):
        attack.recover_basis(pairs, 31)
    with pytest.raises(InsufficientPairs):
        attack.recover_basis([], 31)


def test_mixed_key_pairs_detected(tmp_path):
    rng = random.Random(7)
    p = next_prime(10**6)
    key_a = core.keygen(3, p, rng)
    key_b = core.keygen(3, p, rng)
    values = [rng.randrange(10**4) for _ in range(6)]
    pairs = [KnownPair(v, tuple(core.split(v, key_a, rng))) for v in values[:3]]
    pairs += [KnownPair(v, tuple(core.split(v, key_b, rng))) for v in values[3:]]
    with pytest.raises(InconsistentPairs):
        attack.recover_basis(pairs, p)


def test_degenerate_pairs_reported_singular():
    pair = KnownPair(7, (25,))
    with pytest.raises(SingularSystem):
        attack.recover_basis([pair, pair], 31)


def test_width_mismatch():
    with pytest.raises(WidthMismatch):
        attack.recover_basis([KnownPair(7, (25,)), KnownPair(1, (2, 3))], 31)
    basis = RecoveredBasis((30,), 1)
    with pytest.raises(WidthMismatch):
        basis.apply((1, 2), 31)


def test_empty_table_recovers_nothing(tmp_path):
    key = core.PrivateKey.create(31, 2, [2], (1, 16))
    store = CspStore(tmp_path / "store")
    store.create_table("t", 2, 31)
    assert attack.recover_secrets(RecoveredBasis((30,), 1), store.table("t"), 31) == []


def test_one_fewer_pair_leaves_p_candidate_solutions():
    """With only k-1 pairs the system is underdetermined by exactly one
    dimension: enumeration at small p finds p consistent coefficient
    vectors, which is why the attack refuses rather than guessing."""
    p = 11
    rng = random.Random(11)
    key = core.keygen(3, p, rng)
    values = [3, 7]
    pairs = [KnownPair(v, tuple(core.split(v, key, rng))) for v in values]
    with pytest.raises(InsufficientPairs):
        attack.recover_basis(pairs, p)

    solutions = [
        (l1, l2, c)
        for l1, l2, c in itertools.product(range(p), repeat=3)
        if all((pair.splits[0] * l1 + pair.splits[1] * l2 + c) % p == pair.secret for pair in pairs)
    ]
    assert len(solutions) == p

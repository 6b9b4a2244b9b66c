"""Share encoding, single-disk repair, and message reconstruction."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgc.codec import (CorruptionError, DiskShare, MessageVector,
                       ShareFormatError, ShareSet, check_share, encode,
                       read_share, reconstruct, repair, share_from_bytes,
                       share_to_bytes, write_share)


def _msg(spec, seed):
    return MessageVector.random(spec.field.q, spec.params.M, seed=seed)


def test_message_text_round_trip():
    msg = MessageVector.from_text(7, " 1 2\n3\t4 ")
    assert msg.values == (1, 2, 3, 4)
    assert MessageVector.from_text(7, msg.to_text()) == msg
    with pytest.raises(ValueError):
        MessageVector.from_text(7, "1 2 x")
    with pytest.raises(ValueError):
        MessageVector(7, (7,))


def test_share_set_semantics(golden_spec):
    shares = encode(golden_spec, _msg(golden_spec, 0))
    assert shares.disks() == tuple(range(1, 10))
    assert len(shares.without(3, 7)) == 7
    assert shares.subset([5, 2]).disks() == (2, 5)
    assert shares.subset([2, 2]).disks() == (2,)   # set semantics
    with pytest.raises(ValueError):
        shares.subset([2, 44])
    with pytest.raises(ValueError):
        shares.get(77)
    with pytest.raises(ValueError):
        ShareSet((shares.get(1), shares.get(1)))


def test_share_layout_matches_spec(golden_spec):
    shares = encode(golden_spec, _msg(golden_spec, 1))
    for share in shares:
        check_share(golden_spec, share)
        assert len(share.symbols) == golden_spec.params.alpha
    bad = DiskShare(disk=1, symbols=((0, 0, 1),))
    with pytest.raises(ShareFormatError):
        check_share(golden_spec, bad)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_round_trip_over_random_k_subsets(golden_spec, seed):
    rng = random.Random(seed)
    msg = _msg(golden_spec, rng.randrange(10 ** 9))
    shares = encode(golden_spec, msg)
    keep = rng.sample(range(1, 10), 7)
    assert reconstruct(golden_spec, shares.subset(keep)) == msg


@given(st.integers(1, 9), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_repair_is_exact_and_idempotent(golden_spec, failed, seed):
    shares = encode(golden_spec, _msg(golden_spec, seed))
    rebuilt, transcript = repair(golden_spec, failed,
                                 shares.without(failed))
    assert rebuilt == shares.get(failed)
    again, _ = repair(golden_spec, failed,
                      shares.replace(rebuilt).without(failed))
    assert again == rebuilt
    assert transcript.helper_count == 8


def test_repair_requires_every_helper(golden_spec):
    shares = encode(golden_spec, _msg(golden_spec, 3))
    with pytest.raises(ValueError) as err:
        repair(golden_spec, 4, shares.without(4, 9))
    assert "9" in str(err.value)
    with pytest.raises(ValueError):
        repair(golden_spec, 4, shares)   # failed disk among helpers


def test_reconstruct_share_count_guard(golden_spec):
    shares = encode(golden_spec, _msg(golden_spec, 4))
    with pytest.raises(ValueError):
        reconstruct(golden_spec, shares.subset([1, 2, 3]))
    with pytest.raises(ValueError):
        reconstruct(golden_spec, shares)


def test_message_validation(golden_spec):
    with pytest.raises(ValueError):
        encode(golden_spec, MessageVector(3, (1,) * 22))   # short
    with pytest.raises(ValueError):
        encode(golden_spec, MessageVector(5, (1,) * 23))   # wrong modulus


def test_uncoded_repair_transmits_stored_symbols(golden_spec):
    """Helpers send verbatim stored values: repair never recodes."""
    shares = encode(golden_spec, _msg(golden_spec, 8))
    _, transcript = repair(golden_spec, 5, shares.without(5))
    for helper, syms in transcript.helpers:
        stored = shares.get(helper).value_map()
        for group, row, value in syms:
            assert stored[(group, row)] == value


def test_deep_overlap_repair_cross_checks(t3_spec):
    """With three-way overlap the spare parity rows audit the transfer."""
    msg = _msg(t3_spec, 2)
    shares = encode(t3_spec, msg)
    rebuilt, _ = repair(t3_spec, 1, shares.without(1))
    assert rebuilt == shares.get(1)

    # corrupt one stored symbol on a helper and repair again
    victim = shares.get(2)
    group, row, value = victim.symbols[0]
    tampered = DiskShare(disk=2, symbols=(
        ((group, row, (value + 1) % t3_spec.field.q),)
        + victim.symbols[1:]))
    polluted = shares.replace(tampered)
    with pytest.raises(CorruptionError):
        repair(t3_spec, 1, polluted.without(1))


def test_deep_overlap_round_trip(t3_spec):
    msg = _msg(t3_spec, 9)
    shares = encode(t3_spec, msg)
    n, k = t3_spec.params.n, t3_spec.params.k
    for keep in itertools.combinations(range(1, n + 1), k):
        assert reconstruct(t3_spec, shares.subset(keep)) == msg


def test_share_bytes_round_trip(golden_spec, tmp_path):
    shares = encode(golden_spec, _msg(golden_spec, 6))
    share = shares.get(3)
    blob = share_to_bytes(golden_spec, share)
    assert share_from_bytes(golden_spec, blob) == share
    path = tmp_path / "d3.share"
    write_share(golden_spec, share, path)
    assert read_share(golden_spec, path) == share


def test_share_bytes_error_reporting(golden_spec, complete9_spec):
    share = encode(golden_spec, _msg(golden_spec, 7)).get(1)
    blob = share_to_bytes(golden_spec, share)
    with pytest.raises(ShareFormatError, match="magic"):
        share_from_bytes(golden_spec, b"XXXX" + blob[4:])
    with pytest.raises(ShareFormatError, match="truncated"):
        share_from_bytes(golden_spec, blob[:-1])
    with pytest.raises(ShareFormatError, match="different code"):
        share_from_bytes(complete9_spec, blob)
    with pytest.raises(ShareFormatError, match="trailing"):
        share_from_bytes(golden_spec, blob + b"\x00")

"""Encoding, repair, and reconstruction for two-layer design codes.

Shares are per-disk symbol lists addressed by (group, row): group j is
the parity group hosted by design block j, row i its position inside
the block.  Encoding expands the message through the long layer
(appending T parity symbols) and then each group column through the
short layer.  Repairing a disk contacts all other disks and moves the
minimum transfer: per affected group, the lowest-indexed r-t+1
surviving rows.  Reconstruction decodes the full message from exactly k
disks via a cached pseudo-inverse of the surviving constraint rows.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from functools import lru_cache

from ._kernel import mat_mul as _kmul, mat_solve as _ksolve
from .construction import CodeSpec, erasure_system

_MAGIC = b"RGC1"


class ShareFormatError(ValueError):
    """A share does not match the code spec or is malformed on disk."""


class CorruptionError(ValueError):
    """Helper data contradicted itself during a repair."""


@dataclass(frozen=True)
class MessageVector:
    """A length-M message over GF(q)."""

    q: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("modulus must be at least 2")
        if any(not 0 <= v < self.q for v in self.values):
            raise ValueError("message symbol outside [0, q)")

    @classmethod
    def from_text(cls, q: int, text: str) -> MessageVector:
        """Parse whitespace-separated decimal symbols."""
        try:
            values = tuple(int(tok) for tok in text.split())
        except ValueError:
            raise ValueError("message file must contain whitespace-"
                             "separated decimal integers") from None
        return cls(q=q, values=values)

    def to_text(self) -> str:
        return " ".join(str(v) for v in self.values) + "\n"

    @classmethod
    def random(cls, q: int, length: int, seed: int = 0) -> MessageVector:
        rng = random.Random(seed)
        return cls(q=q, values=tuple(rng.randrange(q)
                                     for _ in range(length)))


@dataclass(frozen=True)
class DiskShare:
    """All symbols stored on one disk, as (group, row, value) triples in
    slot order."""

    disk: int
    symbols: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.disk < 1:
            raise ValueError("disk ids are 1-based")
        for sym in self.symbols:
            if len(sym) != 3 or any(x < 0 for x in sym):
                raise ValueError(f"malformed share symbol {sym!r}")
        if list(self.symbols) != sorted(self.symbols):
            raise ValueError("share symbols must be in slot order")

    def value_map(self) -> dict[tuple[int, int], int]:
        return {(j, i): v for j, i, v in self.symbols}


@dataclass(frozen=True)
class ShareSet:
    """A collection of shares for distinct disks, kept in disk order."""

    shares: tuple[DiskShare, ...]

    def __post_init__(self):
        disks = [s.disk for s in self.shares]
        if len(set(disks)) != len(disks):
            raise ValueError("duplicate disk in share set")
        if disks != sorted(disks):
            object.__setattr__(self, "shares",
                               tuple(sorted(self.shares,
                                            key=lambda s: s.disk)))

    def __iter__(self):
        return iter(self.shares)

    def __len__(self) -> int:
        return len(self.shares)

    def disks(self) -> tuple[int, ...]:
        return tuple(s.disk for s in self.shares)

    def get(self, disk: int) -> DiskShare:
        for s in self.shares:
            if s.disk == disk:
                return s
        raise ValueError(f"no share for disk {disk}")

    def subset(self, disks) -> ShareSet:
        want = set(disks)
        picked = tuple(s for s in self.shares if s.disk in want)
        if len(picked) != len(want):
            have = {s.disk for s in picked}
            raise ValueError(f"no share for disks "
                             f"{sorted(want - have)}")
        return ShareSet(shares=picked)

    def without(self, *disks) -> ShareSet:
        drop = set(disks)
        return ShareSet(shares=tuple(s for s in self.shares
                                     if s.disk not in drop))

    def replace(self, share: DiskShare) -> ShareSet:
        rest = tuple(s for s in self.shares if s.disk != share.disk)
        return ShareSet(shares=rest + (share,))


@dataclass(frozen=True)
class RepairTranscript:
    """What each helper transmitted during one repair.

    helpers lists every contacted disk (all n-1 of them) with its
    transmitted (group, row, value) symbols; disks outside every
    affected group transmit nothing but are still contacted.
    """

    failed: int
    helpers: tuple[tuple[int, tuple[tuple[int, int, int], ...]], ...]

    @property
    def helper_count(self) -> int:
        return len(self.helpers)

    @property
    def total_symbols(self) -> int:
        return sum(len(syms) for _, syms in self.helpers)

    def symbols_from(self, disk: int) -> tuple[tuple[int, int, int], ...]:
        for h, syms in self.helpers:
            if h == disk:
                return syms
        raise ValueError(f"disk {disk} was not a helper")


def check_share(spec: CodeSpec, share: DiskShare) -> None:
    """Validate a share's coordinates and values against the code spec."""
    p = spec.params
    if not 1 <= share.disk <= p.n:
        raise ShareFormatError(f"disk {share.disk} outside 1..{p.n}")
    slots = spec.layout.disk_slots(share.disk)
    coords = tuple((j, i) for j, i, _ in share.symbols)
    if coords != slots:
        raise ShareFormatError(
            f"share for disk {share.disk} carries slots {coords}, "
            f"expected {slots}")
    q = spec.field.q
    if any(not 0 <= v < q for _, _, v in share.symbols):
        raise ShareFormatError(f"share for disk {share.disk} has a symbol "
                               f"outside GF({q})")


def _message_values(spec: CodeSpec, message) -> tuple[int, ...]:
    if isinstance(message, MessageVector):
        if message.q != spec.field.q:
            raise ValueError(f"message modulus {message.q} does not match "
                             f"the code field GF({spec.field.q})")
        values = message.values
    else:
        values = tuple(int(v) for v in message)
    p, q = spec.params, spec.field.q
    if len(values) != p.M:
        raise ValueError(f"message must have M = {p.M} symbols, "
                         f"got {len(values)}")
    if any(not 0 <= v < q for v in values):
        raise ValueError(f"message symbol outside GF({q})")
    return values


def _share_map(spec: CodeSpec, shares) -> dict[int, DiskShare]:
    out: dict[int, DiskShare] = {}
    for share in shares:
        check_share(spec, share)
        if share.disk in out:
            raise ValueError(f"duplicate share for disk {share.disk}")
        out[share.disk] = share
    return out


def _solve_column(spec: CodeSpec, rows_sel, values) -> list[int]:
    """Recover a group column from m generator rows and their symbols."""
    p, q = spec.params, spec.field.q
    sg = spec.short_gen.to_rows()
    amat = [sg[i][c] for i in rows_sel for c in range(p.m)]
    col = _ksolve(amat, p.m, p.m, list(values), 1, q)
    if col is None:
        raise RuntimeError("short-layer generator rows are singular; "
                           "the stored spec is corrupt")
    return col


def encode(spec: CodeSpec, message) -> ShareSet:
    """Produce the n disk shares for a message."""
    values = _message_values(spec, message)
    p, q = spec.params, spec.field.q
    s_rows = spec.s_matrix.to_rows()
    w = list(values)
    for row in s_rows:
        w.append(sum(c * v for c, v in zip(row, values) if c) % q)
    sg = spec.short_gen.to_rows()
    per_disk: dict[int, list[tuple[int, int, int]]] = {}
    for j in range(p.nstar):
        col = w[j * p.m:(j + 1) * p.m]
        for i in range(p.r):
            val = sum(sg[i][c] * col[c] for c in range(p.m)) % q
            per_disk.setdefault(spec.layout.groups[j][i],
                                []).append((j, i, val))
    return ShareSet(shares=tuple(
        DiskShare(disk=disk, symbols=tuple(sorted(syms)))
        for disk, syms in sorted(per_disk.items())))


def repair(spec: CodeSpec, failed: int,
           shares) -> tuple[DiskShare, RepairTranscript]:
    """Rebuild a disk exactly from all n-1 survivors.

    Per affected group the lowest-indexed m surviving rows transmit one
    symbol each; the group column is solved and the lost row recomputed.
    Surviving rows beyond the m used (t > 2 only) are cross-checked
    against the recomputation and raise CorruptionError on mismatch.
    """
    p, q = spec.params, spec.field.q
    if not 1 <= failed <= p.n:
        raise ValueError(f"disk {failed} outside 1..{p.n}")
    pool = _share_map(spec, shares)
    if failed in pool:
        raise ValueError(f"disk {failed} cannot help repair itself")
    expect = set(range(1, p.n + 1)) - {failed}
    if set(pool) != expect:
        raise ValueError(
            f"repair of disk {failed} needs all {p.n - 1} other disks; "
            f"missing {sorted(expect - set(pool))}")
    vals = {disk: share.value_map() for disk, share in pool.items()}
    sent: dict[int, list[tuple[int, int, int]]] = {h: [] for h in expect}
    rebuilt: list[tuple[int, int, int]] = []
    sg = spec.short_gen.to_rows()
    for j, block in enumerate(spec.layout.groups):
        if failed not in block:
            continue
        fi = block.index(failed)
        surv = [i for i in range(p.r) if i != fi]
        sel = surv[:p.m]
        moved = []
        for i in sel:
            v = vals[block[i]][(j, i)]
            moved.append(v)
            sent[block[i]].append((j, i, v))
        col = _solve_column(spec, sel, moved)
        for i in surv[p.m:]:
            expect_v = sum(sg[i][c] * col[c] for c in range(p.m)) % q
            if vals[block[i]][(j, i)] != expect_v:
                raise CorruptionError(
                    f"disk {block[i]} holds an inconsistent symbol for "
                    f"group {j} row {i}")
        lost = sum(sg[fi][c] * col[c] for c in range(p.m)) % q
        rebuilt.append((j, fi, lost))
    share = DiskShare(disk=failed, symbols=tuple(sorted(rebuilt)))
    transcript = RepairTranscript(
        failed=failed,
        helpers=tuple((h, tuple(sent[h])) for h in sorted(sent)))
    return share, transcript


@lru_cache(maxsize=512)
def _decode_matrix(spec: CodeSpec, missing: tuple[int, ...]):
    """(kept coordinates, flat M x R left inverse) for an erasure set."""
    kept, rows = erasure_system(spec, missing)
    nr, M, q = len(rows), spec.params.M, spec.field.q
    at = [rows[s][c] for c in range(M) for s in range(nr)]
    ident = [1 if a == b else 0 for a in range(M) for b in range(M)]
    y = _ksolve(at, M, nr, ident, M, q)
    if y is None:
        raise ValueError(
            f"the stored parity matrix cannot decode erasure pattern "
            f"{missing}; the code spec fails its rank condition")
    dec = tuple(y[s * M + c] for c in range(M) for s in range(nr))
    return kept, dec


def reconstruct(spec: CodeSpec, shares) -> MessageVector:
    """Decode the message from exactly k disk shares."""
    p, q = spec.params, spec.field.q
    pool = _share_map(spec, shares)
    if len(pool) != p.k:
        raise ValueError(f"reconstruction needs exactly k = {p.k} shares, "
                         f"got {len(pool)}")
    missing = tuple(sorted(set(range(1, p.n + 1)) - set(pool)))
    kept, dec = _decode_matrix(spec, missing)
    aset = frozenset(missing)
    vals: dict[tuple[int, int], int] = {}
    for share in pool.values():
        vals.update(share.value_map())
    cols: dict[int, list[int]] = {}
    vvec: list[int] = []
    for j, i in kept:
        block = spec.layout.groups[j]
        if sum(1 for disk in block if disk in aset) <= p.t - 1:
            if j not in cols:
                surv = [ii for ii in range(p.r) if block[ii] not in aset]
                sel = surv[:p.m]
                cols[j] = _solve_column(spec, sel,
                                        [vals[(j, ii)] for ii in sel])
            vvec.append(cols[j][i])
        else:
            vvec.append(vals[(j, i)])
    out = _kmul(list(dec), p.M, len(vvec), vvec, len(vvec), 1, q)
    return MessageVector(q=q, values=tuple(out))


def symbol_width(q: int) -> int:
    """Bytes needed to store one symbol of GF(q)."""
    return max(1, ((q - 1).bit_length() + 7) // 8)


def share_to_bytes(spec: CodeSpec, share: DiskShare) -> bytes:
    """Serialize one share: magic, spec digest, disk id, symbol count,
    then one record per symbol."""
    check_share(spec, share)
    width = symbol_width(spec.field.q)
    out = bytearray()
    out += _MAGIC
    out += spec.spec_hash
    out += struct.pack("<II", share.disk, len(share.symbols))
    for j, i, v in share.symbols:
        out += struct.pack("<IBB", j, i, width)
        out += v.to_bytes(width, "little")
    return bytes(out)


def share_from_bytes(spec: CodeSpec, raw: bytes) -> DiskShare:
    if raw[:4] != _MAGIC:
        raise ShareFormatError("bad magic; not a share file")
    if len(raw) < 44:
        raise ShareFormatError("truncated share header")
    digest = raw[4:36]
    if digest != spec.spec_hash:
        raise ShareFormatError("share was written for a different code "
                               "spec (digest mismatch)")
    disk, count = struct.unpack_from("<II", raw, 36)
    off = 44
    width = symbol_width(spec.field.q)
    symbols = []
    for _ in range(count):
        if off + 6 > len(raw):
            raise ShareFormatError("truncated share record")
        j, i, w = struct.unpack_from("<IBB", raw, off)
        off += 6
        if w != width:
            raise ShareFormatError(f"record width {w} does not match the "
                                   f"field width {width}")
        if off + w > len(raw):
            raise ShareFormatError("truncated share value")
        v = int.from_bytes(raw[off:off + w], "little")
        off += w
        symbols.append((j, i, v))
    if off != len(raw):
        raise ShareFormatError(f"{len(raw) - off} trailing bytes after the "
                               f"last record")
    try:
        share = DiskShare(disk=disk, symbols=tuple(symbols))
    except ValueError as exc:
        raise ShareFormatError(str(exc)) from None
    check_share(spec, share)
    return share


def write_share(spec: CodeSpec, share: DiskShare, path) -> None:
    with open(path, "wb") as fh:
        fh.write(share_to_bytes(spec, share))


def read_share(spec: CodeSpec, path) -> DiskShare:
    with open(path, "rb") as fh:
        return share_from_bytes(spec, fh.read())

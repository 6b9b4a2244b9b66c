"""Two-layer erasure code construction driven by a block design.

A code is assembled from a design S_lambda(t, r, n) and a reconstruction
threshold k.  Each design block hosts one parity group of r stored
symbols: m = r - t + 1 long-layer symbols expanded by a short systematic
(r, m) MDS code, one symbol per disk of the block.  Filling the m * N
long-layer slots column by column, the first M hold message symbols and
the last T hold parity symbols S @ d, sized so that any n - k disk
erasures still leave a rank-M system.  T is the worst case, over erasure
sets A, of the symbol deficit beyond what the short layer absorbs.

verify_S checks the rank condition for every erasure set; rank_witness
builds, for one erasure set, an explicit S certifying that the condition
is satisfiable, which makes the generic determinant argument for random
S checkable per set.
"""

from __future__ import annotations

import itertools
import json
import hashlib
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from math import comb

from ._kernel import mat_rank as _krank, mat_solve as _ksolve
from .designs import BlockDesign, block_bitmasks, is_complete_design
from .ffield import FieldMatrix, PrimeField, next_prime


class BudgetExceededError(ValueError):
    """A combinatorial enumeration would exceed its configured cap."""


class SynthesisError(ValueError):
    """No admissible long-parity matrix found within the attempt budget."""


class WitnessError(RuntimeError):
    """Internal failure while building a rank witness; indicates a bug."""


@dataclass(frozen=True)
class CodeParams:
    """Derived code parameters for a design plus threshold k.

    alpha is the per-disk symbol count, beta the per-helper repair
    transfer (defined only when t = 2), gamma the total repair transfer,
    M the message length, T the long-layer parity count and nstar the
    number of parity groups.
    """

    n: int
    k: int
    d: int
    t: int
    r: int
    lam: int
    alpha: int
    beta: int | None
    gamma: int
    M: int
    T: int
    nstar: int

    @property
    def m(self) -> int:
        """Long-layer symbols per parity group."""
        return self.r - self.t + 1


@dataclass(frozen=True)
class Layout:
    """Placement of parity-group rows onto disks.

    groups[j][i] is the disk holding row i of group j (0-based group and
    row indices, 1-based disk ids).  Within a disk, slots are ordered by
    group index.
    """

    groups: tuple[tuple[int, ...], ...]

    @cached_property
    def _by_disk(self) -> dict[int, tuple[tuple[int, int], ...]]:
        inv: dict[int, list[tuple[int, int]]] = {}
        for j, grp in enumerate(self.groups):
            for i, disk in enumerate(grp):
                inv.setdefault(disk, []).append((j, i))
        return {disk: tuple(sorted(pairs)) for disk, pairs in inv.items()}

    def disk_of(self, group: int, row: int) -> int:
        return self.groups[group][row]

    def slot_of(self, group: int, row: int) -> tuple[int, int]:
        """(disk id, slot index on that disk) for a group row."""
        disk = self.groups[group][row]
        return disk, self._by_disk[disk].index((group, row))

    def disk_slots(self, disk: int) -> tuple[tuple[int, int], ...]:
        """All (group, row) pairs stored on a disk, in slot order."""
        return self._by_disk.get(disk, ())

    def disk_load(self, disk: int) -> int:
        return len(self.disk_slots(disk))


def build_layout(design: BlockDesign) -> Layout:
    """Deterministic placement: row i of group j goes to the i-th
    smallest disk of block j."""
    return Layout(groups=design.blocks)


def compute_TA(design: BlockDesign, a, t: int | None = None) -> int:
    """Symbol deficit of erasure set a: sum over blocks meeting a in at
    least t elements of (|B & a| - t + 1)."""
    t = design.t if t is None else t
    aset = frozenset(a)
    if any(not 1 <= x <= design.n for x in aset):
        raise ValueError("erasure set leaves the ground set")
    total = 0
    for block in design.blocks:
        e = len(aset.intersection(block))
        if e >= t:
            total += e - t + 1
    return total


def compute_T(design: BlockDesign, k: int, t: int | None = None,
              max_subsets: int = 10 ** 6) -> int:
    """Worst-case deficit max_A T(A) over all (n-k)-subsets, exhaustive.

    For complete designs the result is cross-checked against the closed
    form closed_form_Tc; a mismatch raises.
    """
    n = design.n
    t = design.t if t is None else t
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} must be in 1..{n - 1}")
    miss = n - k
    total = comb(n, miss)
    if total > max_subsets:
        raise BudgetExceededError(
            f"C({n},{miss}) = {total} erasure sets exceed the cap "
            f"{max_subsets}")
    masks = block_bitmasks(design)
    best = 0
    for sub in itertools.combinations(range(n), miss):
        amask = 0
        for x in sub:
            amask |= 1 << x
        ta = 0
        for bm in masks:
            e = (bm & amask).bit_count()
            if e >= t:
                ta += e - t + 1
        if ta > best:
            best = ta
    if is_complete_design(design):
        formula = closed_form_Tc(n, k, design.r, t)
        if best != formula:
            raise ValueError(
                f"exhaustive T = {best} disagrees with the complete-design "
                f"closed form {formula}")
    return best


def closed_form_Tc(n: int, k: int, r: int, t: int = 2) -> int:
    """Worst-case deficit of the complete design, in closed form."""
    return sum((i - t + 1) * comb(n - k, i) * comb(k, r - i)
               for i in range(t, min(n - k, r) + 1))


def derive_params(design: BlockDesign, k: int,
                  max_subsets: int = 10 ** 6) -> CodeParams:
    """Fill CodeParams for a design and reconstruction threshold k."""
    n, t, r, lam = design.n, design.t, design.r, design.lam
    if t < 2:
        raise ValueError("design strength t must be at least 2; t=1 would "
                         "require all n disks as repair helpers")
    d = n - t + 1
    if not 1 <= k <= d:
        raise ValueError(f"k={k} must satisfy 1 <= k <= d = n-t+1 = {d}")
    alpha = design.replication
    nstar = design.num_blocks
    m = r - t + 1
    T = compute_T(design, k, max_subsets=max_subsets)
    M = m * nstar - T
    if M < 1:
        raise ValueError(f"parity deficit T = {T} consumes the whole "
                         f"long layer ({m * nstar} slots)")
    return CodeParams(n=n, k=k, d=d, t=t, r=r, lam=lam, alpha=alpha,
                      beta=lam if t == 2 else None, gamma=m * alpha,
                      M=M, T=T, nstar=nstar)


def short_mds_generator(r: int, t: int, field: PrimeField) -> FieldMatrix:
    """Systematic r x m generator of the short (r, m) MDS code, m = r-t+1.

    The top m rows are the identity.  For t = 2 the single parity row is
    all ones; for m = 1 the code is repetition; otherwise the parity
    rows form a Cauchy block, which needs q >= r.  The MDS property is
    verified exhaustively for r <= 12.
    """
    if not 2 <= t <= r:
        raise ValueError(f"need 2 <= t <= r, got t={t} r={r}")
    m = r - t + 1
    q = field.q
    rows = [[1 if c == i else 0 for c in range(m)] for i in range(m)]
    if t == 2:
        rows.append([1] * m)
    elif m == 1:
        rows.extend([[1]] * (t - 1))
    else:
        if q < r:
            raise ValueError(
                f"field GF({q}) too small for a Cauchy parity block; "
                f"need q >= r = {r}")
        # nodes m..r-1 vs 0..m-1 are distinct mod q, so every minor of
        # the Cauchy block is invertible
        for i in range(t - 1):
            rows.append([field.inv((m + i - c) % q) for c in range(m)])
    gen = FieldMatrix.from_rows(q, rows)
    if r <= 12:
        for sub in itertools.combinations(range(r), m):
            picked = [rows[i] for i in sub]
            flat = [v for row in picked for v in row]
            if _krank(flat, m, m, q) != m:
                raise ValueError(f"short generator is not MDS over GF({q}); "
                                 f"rows {sub} are singular")
    return gen


@dataclass(frozen=True)
class CodeSpec:
    """Immutable, hashable description of one concrete code.

    The long-layer parity matrix S is stored either as an explicit
    coefficient vector phi (Steiner systems with k = n-2, where S is the
    single row that cycles phi across message positions) or as raw
    entries.  T = 0 codes carry an empty entry tuple.
    """

    params: CodeParams
    field: PrimeField
    design: BlockDesign
    layout: Layout
    phi: tuple[int, ...] | None = None
    s_entries: tuple[int, ...] | None = None

    def __post_init__(self):
        p, q = self.params, self.field.q
        if p.d != p.n - p.t + 1 or p.m < 1:
            raise ValueError("inconsistent (n, t, d) in params")
        if (p.n, p.t, p.r, p.lam) != (self.design.n, self.design.t,
                                      self.design.r, self.design.lam):
            raise ValueError("params do not match the design")
        if p.nstar != self.design.num_blocks:
            raise ValueError("params.nstar does not match the design")
        if p.alpha != self.design.replication:
            raise ValueError("params.alpha does not match the design")
        if p.beta != (p.lam if p.t == 2 else None):
            raise ValueError("params.beta is inconsistent")
        if p.gamma != p.m * p.alpha:
            raise ValueError("params.gamma is inconsistent")
        if p.M != p.m * p.nstar - p.T or p.T < 0 or p.M < 1:
            raise ValueError("params (M, T) are inconsistent")
        if not 1 <= p.k <= p.d:
            raise ValueError("params.k out of range")
        if self.layout != build_layout(self.design):
            raise ValueError("layout does not match the design placement")
        if (self.phi is None) == (self.s_entries is None):
            raise ValueError("exactly one of phi and s_entries is required")
        if self.phi is not None:
            if p.t != 2 or p.lam != 1 or p.T != 1:
                raise ValueError("phi form requires a Steiner design with "
                                 "T = 1")
            if len(self.phi) != p.r - 1:
                raise ValueError(f"phi needs {p.r - 1} coefficients")
            if len(set(self.phi)) != len(self.phi):
                raise ValueError("phi coefficients must be distinct")
            for i, c in enumerate(self.phi):
                if not 1 <= c < q:
                    raise ValueError("phi coefficients must be nonzero "
                                     "field elements")
                if i < p.r - 2 and (c + 1) % q == 0:
                    raise ValueError("phi coefficients before the last must "
                                     "not equal -1")
        else:
            if len(self.s_entries) != p.T * p.M:
                raise ValueError(f"s_entries needs {p.T * p.M} values")
            if any(not 0 <= v < q for v in self.s_entries):
                raise ValueError("s_entries must be reduced field elements")

    @cached_property
    def short_gen(self) -> FieldMatrix:
        return short_mds_generator(self.params.r, self.params.t, self.field)

    @cached_property
    def s_matrix(self) -> FieldMatrix:
        """Long-layer parity matrix S (T x M)."""
        p = self.params
        if self.phi is not None:
            # message position x contributes with coefficient
            # phi[x mod m]: positions cycle through the group rows
            row = [self.phi[x % p.m] for x in range(p.M)]
            return FieldMatrix.from_rows(self.field.q, [row])
        return FieldMatrix(self.field.q, p.T, p.M, self.s_entries)

    @cached_property
    def g_matrix(self) -> FieldMatrix:
        """Stacked generator G = [I; S] of the long layer."""
        return FieldMatrix.vstack([FieldMatrix.identity(self.field.q,
                                                        self.params.M),
                                   self.s_matrix])

    def to_json(self) -> str:
        """Canonical JSON; round-trips bit-exactly through from_json."""
        p = self.params
        doc = {
            "q": self.field.q,
            "params": {"n": p.n, "k": p.k, "d": p.d, "t": p.t, "r": p.r,
                       "lambda": p.lam, "alpha": p.alpha, "beta": p.beta,
                       "gamma": p.gamma, "M": p.M, "T": p.T,
                       "nstar": p.nstar},
            "design": json.loads(self.design.to_json()),
            "layout": [list(g) for g in self.layout.groups],
        }
        if self.phi is not None:
            doc["phi"] = [str(c) for c in self.phi]
        else:
            doc["s"] = [str(v) for v in self.s_entries]
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> CodeSpec:
        doc = json.loads(text)
        try:
            pd = doc["params"]
            params = CodeParams(n=pd["n"], k=pd["k"], d=pd["d"], t=pd["t"],
                                r=pd["r"], lam=pd["lambda"],
                                alpha=pd["alpha"], beta=pd["beta"],
                                gamma=pd["gamma"], M=pd["M"], T=pd["T"],
                                nstar=pd["nstar"])
            dd = doc["design"]
            design = BlockDesign(n=dd["n"], t=dd["t"], r=dd["r"],
                                 lam=dd["lambda"],
                                 blocks=tuple(tuple(b) for b in dd["blocks"]))
            layout = Layout(groups=tuple(tuple(g) for g in doc["layout"]))
            phi = tuple(int(c) for c in doc["phi"]) if "phi" in doc else None
            s_entries = (tuple(int(v) for v in doc["s"])
                         if phi is None else None)
            return cls(params=params, field=PrimeField(doc["q"]),
                       design=design, layout=layout, phi=phi,
                       s_entries=s_entries)
        except KeyError as exc:
            raise ValueError(f"code spec JSON missing key {exc}") from None

    @cached_property
    def spec_hash(self) -> bytes:
        """32-byte digest of the canonical JSON; embedded in share files."""
        return hashlib.sha256(self.to_json().encode("utf-8")).digest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> CodeSpec:
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def choose_phi(r: int, field: PrimeField) -> tuple[int, ...]:
    """Smallest-lexicographic admissible coefficient vector: r-1 distinct
    nonzero elements, none equal to -1 except possibly the last."""
    q = field.q
    if q < r:
        raise ValueError(f"field GF({q}) cannot supply {r - 1} distinct "
                         f"nonzero coefficients with the -1 exclusion; "
                         f"need q >= r = {r}")
    phi: list[int] = []
    used: set[int] = set()
    for pos in range(1, r):
        last = pos == r - 1
        pick = next((c for c in range(1, q)
                     if c not in used and (last or (c + 1) % q != 0)), None)
        if pick is None:
            raise ValueError(f"no admissible coefficient assignment in "
                             f"GF({q}) for block size {r}")
        phi.append(pick)
        used.add(pick)
    return tuple(phi)


def build_explicit_steiner_code(design: BlockDesign,
                                field: PrimeField) -> CodeSpec:
    """The closed-form code on a Steiner system S(2, r, n) with k = n-2.

    The single long parity symbol occupies the last slot of the last
    group and carries coefficient phi[x mod (r-1)] for message position
    x; T = 1 and M = n(n-1)/r - 1.
    """
    if design.t != 2 or design.lam != 1:
        raise ValueError("explicit construction requires a Steiner system "
                         "S(2, r, n) with lambda = 1")
    params = derive_params(design, design.n - 2)
    if params.T != 1:
        raise WitnessError("Steiner system with n-k = 2 must have T = 1")
    phi = choose_phi(design.r, field)
    return CodeSpec(params=params, field=field, design=design,
                    layout=build_layout(design), phi=phi)


def _check_erasure_set(spec: CodeSpec, a) -> frozenset[int]:
    aset = frozenset(a)
    expect = spec.params.n - spec.params.k
    if len(aset) != expect:
        raise ValueError(f"erasure set must have n-k = {expect} disks, "
                         f"got {len(aset)}")
    if any(not 1 <= x <= spec.params.n for x in aset):
        raise ValueError("erasure set leaves the ground set")
    return aset


def _reduced_blocks(spec: CodeSpec, aset: frozenset[int]) -> list[list[list[int]]]:
    """Per-group constraint templates under erasure set aset.

    A group hit in at most t-1 disks is fully decodable, so its template
    is [I; 0].  A group hit in t or more keeps only the generator rows
    of surviving disks.
    """
    p = spec.params
    m, t = p.m, p.t
    sg = spec.short_gen.to_rows()
    blocks = []
    for block in spec.design.blocks:
        hit = [disk in aset for disk in block]
        if sum(hit) <= t - 1:
            rb = [[1 if c == i else 0 for c in range(m)] for i in range(m)]
            rb.extend([0] * m for _ in range(t - 1))
        else:
            rb = [[0] * m if hit[i] else list(sg[i]) for i in range(p.r)]
        blocks.append(rb)
    return blocks


def _qg_rows(blocks, s_rows, m, M, q):
    """Rows of Q_A @ G, skipping all-zero templates.

    Returns (rows, kept) where kept[i] is the (group, row) coordinate
    of rows[i].
    """
    rows = []
    kept = []
    for j, rb in enumerate(blocks):
        base = j * m
        for i, brow in enumerate(rb):
            if not any(brow):
                continue
            out = [0] * M
            for c, v in enumerate(brow):
                if not v:
                    continue
                pos = base + c
                if pos < M:
                    out[pos] = (out[pos] + v) % q
                else:
                    srow = s_rows[pos - M]
                    for x, sv in enumerate(srow):
                        if sv:
                            out[x] = (out[x] + v * sv) % q
            rows.append(out)
            kept.append((j, i))
    return rows, kept


def assemble_QA(spec: CodeSpec, a) -> FieldMatrix:
    """Block-diagonal constraint matrix Q_A, (r*nstar) x (m*nstar)."""
    aset = _check_erasure_set(spec, a)
    p = spec.params
    blocks = _reduced_blocks(spec, aset)
    width = p.m * p.nstar
    entries = []
    for j, rb in enumerate(blocks):
        base = j * p.m
        for brow in rb:
            row = [0] * width
            row[base:base + p.m] = brow
            entries.extend(row)
    return FieldMatrix(spec.field.q, p.r * p.nstar, width, tuple(entries))


def erasure_system(spec: CodeSpec, a):
    """(kept coordinates, rows of Q_A @ G) for an erasure set; the rows
    are the reachable linear views of the message."""
    aset = _check_erasure_set(spec, a)
    blocks = _reduced_blocks(spec, aset)
    s_rows = spec.s_matrix.to_rows()
    rows, kept = _qg_rows(blocks, s_rows, spec.params.m, spec.params.M,
                          spec.field.q)
    return kept, rows


def _rank_ok(spec: CodeSpec, a) -> bool:
    _, rows = erasure_system(spec, a)
    flat = [v for row in rows for v in row]
    return _krank(flat, len(rows), spec.params.M, spec.field.q) == spec.params.M


def _verify_chunk(args):
    spec, chunk = args
    return [a for a in chunk if not _rank_ok(spec, a)]


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failures: tuple[tuple[int, ...], ...]
    checked: int
    total: int
    sampled: bool


def resolve_jobs(jobs: int | None = None) -> int:
    """Worker count: explicit argument, else RGC_JOBS, else 1."""
    if jobs is None:
        jobs = int(os.environ.get("RGC_JOBS", "1") or "1")
    return max(1, jobs)


def verify_S(spec: CodeSpec, jobs: int | None = 1, sample: int | None = None,
             seed: int = 0, max_subsets: int = 10 ** 6) -> VerifyReport:
    """Check rank(Q_A @ G) = M for every (n-k)-subset A.

    When C(n, n-k) exceeds max_subsets, a seeded random sample must be
    requested explicitly via `sample`; the report then marks itself as
    incomplete verification.
    """
    p = spec.params
    miss = p.n - p.k
    total = comb(p.n, miss)
    if sample is not None and sample < 1:
        raise ValueError("sample must be positive")
    if total > max_subsets and sample is None:
        raise BudgetExceededError(
            f"C({p.n},{miss}) = {total} erasure sets exceed the cap "
            f"{max_subsets}; pass sample= to acknowledge incomplete "
            f"verification")
    if sample is not None and sample < total:
        rng = random.Random(seed)
        chosen: set[tuple[int, ...]] = set()
        while len(chosen) < sample:
            chosen.add(tuple(sorted(rng.sample(range(1, p.n + 1), miss))))
        subsets = sorted(chosen)
        sampled = True
    else:
        subsets = [tuple(c) for c in
                   itertools.combinations(range(1, p.n + 1), miss)]
        sampled = False
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(subsets) < 2 * jobs:
        failures = _verify_chunk((spec, subsets))
    else:
        step = (len(subsets) + jobs - 1) // jobs
        chunks = [(spec, subsets[i:i + step])
                  for i in range(0, len(subsets), step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            failures = [a for part in pool.map(_verify_chunk, chunks)
                        for a in part]
    return VerifyReport(ok=not failures, failures=tuple(failures),
                        checked=len(subsets), total=total, sampled=sampled)


@dataclass(frozen=True)
class SynthesisResult:
    s: FieldMatrix
    attempts: int
    structured: bool


def _vandermonde_parity(M: int, T: int, field: PrimeField) -> tuple[int, ...]:
    # parity block of the systematic (M+T, M) Vandermonde MDS code:
    # S = V_bot @ V_top^{-1} with nodes 0..M+T-1
    q = field.q
    vtop_t = [pow(i, row, q) for row in range(M) for i in range(M)]
    vbot_t = [pow(M + i, row, q) for row in range(M) for i in range(T)]
    x = _ksolve(vtop_t, M, M, vbot_t, T, q)
    if x is None:
        raise WitnessError("Vandermonde system must be invertible")
    # x is M x T = S^t
    return tuple(x[c * T + t0] for t0 in range(T) for c in range(M))


def synthesize_S(params: CodeParams, design: BlockDesign, field: PrimeField,
                 seed: int = 0, budget: int = 8, jobs: int | None = 1,
                 sample: int | None = None,
                 max_subsets: int = 10 ** 6) -> SynthesisResult:
    """Find a long-parity matrix S passing verify_S.

    The first candidate is the parity block of a systematic Vandermonde
    MDS code (when q >= M+T); later candidates are seeded uniform draws.
    Deterministic for a given seed.  Raises SynthesisError when the
    budget is exhausted, quoting the field-size existence threshold.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    M, T = params.M, params.T
    q = field.q
    if T == 0:
        return SynthesisResult(s=FieldMatrix.zeros(q, 0, M), attempts=0,
                               structured=False)
    layout = build_layout(design)
    rng = random.Random(seed)
    attempts = 0
    use_structured = q >= M + T
    while attempts < budget:
        structured = use_structured and attempts == 0
        if structured:
            entries = _vandermonde_parity(M, T, field)
        else:
            entries = tuple(rng.randrange(q) for _ in range(T * M))
        attempts += 1
        trial = CodeSpec(params=params, field=field, design=design,
                         layout=layout, s_entries=entries)
        report = verify_S(trial, jobs=jobs, sample=sample,
                          max_subsets=max_subsets)
        if report.ok:
            return SynthesisResult(s=trial.s_matrix, attempts=attempts,
                                   structured=structured)
    threshold = comb(params.n, params.k) * T * M
    raise SynthesisError(
        f"no admissible S after {attempts} candidates over GF({q}); the "
        f"existence guarantee needs q > C(n,k)*T*M = {threshold}")


def rank_witness(spec: CodeSpec, a) -> FieldMatrix:
    """Construct an S making rank(Q_A @ G) = M for this one erasure set.

    Existence of a witness for every A shows the determinant polynomial
    behind the random-S argument is not identically zero.  The witness
    is built by completing the surviving constraint rows with unit rows
    at vacated message coordinates, then solving for the S rows block by
    block; deficient parity rows of the one partially-filled group are
    dependent and dropped from the solve.  The result is self-checked.
    """
    p = spec.params
    q, m, r, t, M, T, nstar = (spec.field.q, p.m, p.r, p.t, p.M, p.T,
                               p.nstar)
    aset = _check_erasure_set(spec, a)
    if T == 0:
        return FieldMatrix.zeros(q, 0, M)
    rblocks = _reduced_blocks(spec, aset)
    # zero the first T - T(A) surviving rows so exactly M remain
    remaining = T - compute_TA(spec.design, aset, t)
    if remaining < 0:
        raise WitnessError("T(A) exceeds T")
    for rb in rblocks:
        if not remaining:
            break
        for i in range(r):
            if not remaining:
                break
            if any(rb[i]):
                rb[i] = [0] * m
                remaining -= 1
    if remaining:
        raise WitnessError("not enough surviving rows to zero")
    nfull, b = divmod(M, m)
    zrows = [[i for i in range(r) if not any(rb[i])] for rb in rblocks]
    # pool of unit-row column targets for the vacated message coordinates
    pool: list[int] = []
    for j in range(nfull):
        take = len(zrows[j]) - (t - 1)
        if take < 0:
            raise WitnessError(f"group {j} has fewer than t-1 zero rows")
        for i in range(take):
            if zrows[j][i] >= m:
                raise WitnessError(f"group {j} pool row is not a data row")
            pool.append(j * m + zrows[j][i])
    tbd: set[tuple[int, int]] = set()
    if b > 0:
        z_top = [i for i in zrows[nfull] if i < b]
        z_bottom = len(zrows[nfull]) - len(z_top)
        delta = max(0, (t - 1) - z_bottom)
        if delta > len(z_top):
            raise WitnessError("partial group lacks droppable unit rows")
        keep = z_top[:len(z_top) - delta] if delta else z_top
        pool.extend(nfull * m + i for i in keep)
        if delta:
            alive_parity = [i for i in range(m, r)
                            if any(rblocks[nfull][i])]
            if len(alive_parity) < delta:
                raise WitnessError("not enough live parity rows to defer")
            tbd.update((nfull, i) for i in alive_parity[-delta:])
    # hand pool units to the surviving rows below the row split
    unit_at: dict[tuple[int, int], int] = {}
    pos = 0
    for j in range(nfull, nstar):
        lo = b if (j == nfull and b > 0) else 0
        for i in range(lo, r):
            if (j, i) in tbd or not any(rblocks[j][i]):
                continue
            if pos >= len(pool):
                raise WitnessError("unit pool underflow")
            unit_at[(j, i)] = pool[pos]
            pos += 1
    if pos != len(pool):
        raise WitnessError("unit pool not exhausted")
    # solve each parity-bearing group for its rows of S
    s_rows: list[list[int] | None] = [None] * T
    for j in range(nfull, nstar):
        lo = b if (j == nfull and b > 0) else 0
        ncols = m - lo
        eq = [i for i in range(lo, r) if (j, i) not in tbd]
        amat: list[int] = []
        rhs: list[int] = []
        for i in eq:
            amat.extend(rblocks[j][i][lo:])
            row = [0] * M
            u = unit_at.get((j, i))
            if u is not None:
                row[u] = 1
            if lo:
                # columns left of the split are message coordinates and
                # move to the right-hand side
                for c in range(lo):
                    v = rblocks[j][i][c]
                    if v:
                        pos_c = j * m + c
                        row[pos_c] = (row[pos_c] - v) % q
            rhs.extend(row)
        x = _ksolve(amat, len(eq), ncols, rhs, M, q)
        if x is None:
            raise WitnessError(
                f"group {j} witness system inconsistent for erasure set "
                f"{tuple(sorted(aset))}")
        for ci in range(ncols):
            s_rows[j * m + lo + ci - M] = x[ci * M:(ci + 1) * M]
    if any(row is None for row in s_rows):
        raise WitnessError("unassigned S row")
    witness = FieldMatrix(q, T, M,
                          tuple(v for row in s_rows for v in row))
    # mandatory self-check against the untouched constraint system
    fresh = _reduced_blocks(spec, aset)
    rows, _ = _qg_rows(fresh, witness.to_rows(), m, M, q)
    flat = [v for row in rows for v in row]
    if _krank(flat, len(rows), M, q) != M:
        raise WitnessError(f"witness failed the rank self-check for "
                           f"erasure set {tuple(sorted(aset))}")
    return witness


@dataclass(frozen=True)
class BuildResult:
    spec: CodeSpec
    attempts: int
    structured: bool


def build_code(design: BlockDesign, k: int, q: int | str | None = "auto",
               seed: int = 0, budget: int = 8, jobs: int | None = 1,
               sample: int | None = None,
               max_subsets: int = 10 ** 6) -> BuildResult:
    """Derive parameters, pick a field, and produce a verified CodeSpec.

    q="auto" selects the smallest prime exceeding C(n,k)*T*M, the
    threshold above which a valid S is guaranteed to exist.  Steiner
    designs with k = n-2 use the closed-form coefficient construction;
    other codes synthesize and verify an S matrix.
    """
    params = derive_params(design, k, max_subsets=max_subsets)
    if q in (None, "auto"):
        threshold = comb(params.n, k) * params.T * params.M
        floor = params.r - 1 if (params.t > 2 and params.m > 1) else 1
        qv = next_prime(max(threshold, floor))
    else:
        qv = int(q)
    field = PrimeField(qv)
    if params.t == 2 and params.lam == 1 and k == params.n - 2:
        return BuildResult(spec=build_explicit_steiner_code(design, field),
                           attempts=0, structured=False)
    if params.T == 0:
        spec = CodeSpec(params=params, field=field, design=design,
                        layout=build_layout(design), s_entries=())
        return BuildResult(spec=spec, attempts=0, structured=False)
    result = synthesize_S(params, design, field, seed=seed, budget=budget,
                          jobs=jobs, sample=sample, max_subsets=max_subsets)
    spec = CodeSpec(params=params, field=field, design=design,
                    layout=build_layout(design),
                    s_entries=result.s.entries)
    return BuildResult(spec=spec, attempts=result.attempts,
                       structured=result.structured)

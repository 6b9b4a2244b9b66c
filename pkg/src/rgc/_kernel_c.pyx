# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled linear algebra kernel over a prime field.

Same contract as ``_kernel_py``: flat row-major lists of residues in [0, q),
q < 2^61 so that products fit in 128-bit intermediates.
"""

from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline u64 mulmod(u64 a, u64 b, u64 q) noexcept:
    return <u64>((<u128>a * b) % q)


cdef inline u64 submod(u64 a, u64 b, u64 q) noexcept:
    return a - b if a >= b else a + q - b


cdef inline u64 powmod(u64 a, u64 e, u64 q) noexcept:
    cdef u64 res = 1 % q
    a %= q
    while e:
        if e & 1:
            res = mulmod(res, a, q)
        a = mulmod(a, a, q)
        e >>= 1
    return res


cdef inline u64 invmod(u64 a, u64 q) noexcept:
    # q prime, a nonzero mod q
    return powmod(a, q - 2, q)


cdef u64* _copy_in(object data, Py_ssize_t size) except NULL:
    # max(size, 1): malloc(0) may legally return NULL
    cdef u64* buf = <u64*>malloc(max(size, 1) * sizeof(u64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(size):
        buf[i] = data[i]
    return buf


def mat_mul(a, Py_ssize_t ar, Py_ssize_t ac, b, Py_ssize_t br, Py_ssize_t bc,
            u64 q):
    """Return the flat product of a (ar x ac) and b (br x bc) mod q."""
    if ac != br:
        raise ValueError(f"dimension mismatch: {ar}x{ac} times {br}x{bc}")
    cdef u64* ba = _copy_in(a, ar * ac)
    cdef u64* bb
    cdef u64* bo
    try:
        bb = _copy_in(b, br * bc)
    except BaseException:
        free(ba)
        raise
    bo = <u64*>malloc(max(ar * bc, 1) * sizeof(u64))
    if bo == NULL:
        free(ba)
        free(bb)
        raise MemoryError()
    cdef Py_ssize_t i, j, k
    cdef u64 v, s
    for i in range(ar):
        for j in range(bc):
            bo[i * bc + j] = 0
        for k in range(ac):
            v = ba[i * ac + k]
            if v:
                for j in range(bc):
                    s = bo[i * bc + j] + mulmod(v, bb[k * bc + j], q)
                    if s >= q:
                        s -= q
                    bo[i * bc + j] = s
    out = [bo[i] for i in range(ar * bc)]
    free(ba)
    free(bb)
    free(bo)
    return out


def mat_rank(a, Py_ssize_t rows, Py_ssize_t cols, u64 q):
    """Rank via Gaussian elimination with first-nonzero pivoting."""
    cdef u64* m = _copy_in(a, rows * cols)
    cdef Py_ssize_t rank = 0, c, i, j, piv
    cdef u64 inv, f
    try:
        for c in range(cols):
            piv = -1
            for i in range(rank, rows):
                if m[i * cols + c]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(cols):
                    m[rank * cols + j], m[piv * cols + j] = \
                        m[piv * cols + j], m[rank * cols + j]
            inv = invmod(m[rank * cols + c], q)
            if inv != 1:
                for j in range(c, cols):
                    m[rank * cols + j] = mulmod(m[rank * cols + j], inv, q)
            for i in range(rank + 1, rows):
                f = m[i * cols + c]
                if f:
                    for j in range(c, cols):
                        m[i * cols + j] = submod(
                            m[i * cols + j],
                            mulmod(f, m[rank * cols + j], q), q)
            rank += 1
            if rank == rows:
                break
        return rank
    finally:
        free(m)


def mat_solve(a, Py_ssize_t rows, Py_ssize_t cols, b, Py_ssize_t bcols, u64 q):
    """Solve a x = b; return flat x (cols x bcols) or None if inconsistent.

    Free variables are set to zero; pivot variables are filled
    lowest-pivot-first, matching the pure-Python kernel exactly.
    """
    cdef Py_ssize_t w = cols + bcols
    cdef u64* m = <u64*>malloc(max(rows * w, 1) * sizeof(u64))
    if m == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, c, piv, rank = 0, nz
    cdef u64 inv, f
    cdef list pivots = []
    try:
        for i in range(rows):
            for j in range(cols):
                m[i * w + j] = a[i * cols + j]
            for j in range(bcols):
                m[i * w + cols + j] = b[i * bcols + j]
        for c in range(cols):
            piv = -1
            for i in range(rank, rows):
                if m[i * w + c]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(w):
                    m[rank * w + j], m[piv * w + j] = \
                        m[piv * w + j], m[rank * w + j]
            inv = invmod(m[rank * w + c], q)
            if inv != 1:
                for j in range(c, w):
                    m[rank * w + j] = mulmod(m[rank * w + j], inv, q)
            for i in range(rows):
                if i != rank and m[i * w + c]:
                    f = m[i * w + c]
                    for j in range(c, w):
                        m[i * w + j] = submod(
                            m[i * w + j], mulmod(f, m[rank * w + j], q), q)
            pivots.append(c)
            rank += 1
            if rank == rows:
                break
        for i in range(rank, rows):
            nz = 0
            for j in range(cols, w):
                if m[i * w + j]:
                    nz = 1
                    break
            if nz:
                return None
        x = [0] * (cols * bcols)
        for i in range(rank):
            c = pivots[i]
            for j in range(bcols):
                x[c * bcols + j] = m[i * w + cols + j]
        return x
    finally:
        free(m)

# cython: boundscheck=False, wraparound=False
"""Compiled twins of the pure-Python kernels in pybackend.py.

The arithmetic stays on Python ints (arbitrary precision is required); the
speedup comes from removing interpreter dispatch in the tight loops.
"""

BACKEND = "c"


def mat_mul_add(list acc, list A, list B, Py_ssize_t b):
    cdef Py_ssize_t i, j, k, ib, kb
    cdef object a, x
    for i in range(b):
        ib = i * b
        for k in range(b):
            a = A[ib + k]
            if a:
                kb = k * b
                for j in range(b):
                    x = B[kb + j]
                    if x:
                        acc[ib + j] = acc[ib + j] + a * x


def vec_addmul(list acc, list A, object c):
    cdef Py_ssize_t i
    cdef object a
    if c:
        for i in range(len(A)):
            a = A[i]
            if a:
                acc[i] = acc[i] + c * a


def mod_list(list vals, object m):
    cdef Py_ssize_t i, n = len(vals)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = vals[i] % m
    return out


def pack_bytes(list vals, Py_ssize_t slot_bytes):
    cdef Py_ssize_t n = len(vals)
    cdef bytearray out = bytearray(slot_bytes * n)
    cdef Py_ssize_t pos = 0
    cdef object v
    for v in vals:
        out[pos : pos + slot_bytes] = (<object> v).to_bytes(slot_bytes, "little")
        pos += slot_bytes
    return bytes(out)


def unpack_add(list dst, Py_ssize_t dst_base, bytes payload, Py_ssize_t first_slot,
               Py_ssize_t slot_bytes, Py_ssize_t nslots):
    cdef Py_ssize_t i, pos = first_slot * slot_bytes
    cdef object v
    for i in range(nslots):
        v = int.from_bytes(payload[pos : pos + slot_bytes], "little")
        dst[dst_base + i] = dst[dst_base + i] + v
        pos += slot_bytes


def conv_trunc(list a, list b, Py_ssize_t K):
    cdef Py_ssize_t i, j, n, top
    cdef object ai, bj
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if n > K:
        n = K
    cdef list out = [0] * n
    for i in range(len(a)):
        if i >= K:
            break
        ai = a[i]
        if ai:
            top = len(b)
            if top > K - i:
                top = K - i
            for j in range(top):
                bj = b[j]
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    return out


def csr_apply(list row_start, list col, list val, list vec, list out):
    cdef Py_ssize_t i, j, lo, hi
    cdef object s
    for i in range(len(out)):
        lo = row_start[i]
        hi = row_start[i + 1]
        s = 0
        for j in range(lo, hi):
            s = s + val[j] * vec[col[j]]
        out[i] = s


def lincomb(list coeffs, list vectors, Py_ssize_t width):
    cdef list acc = [0] * width
    cdef Py_ssize_t i, j
    cdef object c, v
    cdef list vec
    for i in range(len(coeffs)):
        c = coeffs[i]
        if c:
            vec = vectors[i]
            for j in range(width):
                v = vec[j]
                if v:
                    acc[j] = acc[j] + c * v
    return acc


def count_projective(int n_coords, long q, list zech_list, list term_logs_list,
                     list term_exps_list, int nterms):
    cdef long qm1 = q - 1
    cdef long count = 0
    cdef int lead, i, t
    cdef long idx, total, rem, s, acc, d, z, e, ci
    cdef long[64] coords
    import array
    zarr = array.array("l", zech_list)
    tlog = array.array("l", term_logs_list)
    texp = array.array("l", term_exps_list)
    cdef long[:] zv = zarr
    cdef long[:] tl = tlog
    cdef long[:] te = texp
    for lead in range(n_coords):
        for i in range(lead):
            coords[i] = -1
        coords[lead] = 0
        total = 1
        for i in range(n_coords - lead - 1):
            total *= q
        for idx in range(total):
            rem = idx
            for i in range(n_coords - lead - 1):
                coords[lead + 1 + i] = (rem % q) - 1
                rem //= q
            acc = -1
            for t in range(nterms):
                s = tl[t]
                for i in range(n_coords):
                    e = te[t * n_coords + i]
                    if e:
                        ci = coords[i]
                        if ci < 0:
                            s = -1
                            break
                        s = (s + e * ci) % qm1
                if s < 0:
                    continue
                if acc < 0:
                    acc = s
                else:
                    d = (s - acc) % qm1
                    z = zv[d]
                    if z < 0:
                        acc = -1
                    else:
                        acc = (acc + z) % qm1
            if acc < 0:
                count += 1
    return count

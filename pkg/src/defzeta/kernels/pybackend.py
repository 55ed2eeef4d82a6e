"""Pure-Python implementations of the hot kernels.

Same semantics as the compiled twins in _ckernels.pyx: exact integer
arithmetic on Python ints, so results are bit-identical across backends.
"""

BACKEND = "python"


def mat_mul_add(acc, A, B, b):
    """acc += A @ B for flat row-major b*b integer matrices (no reduction)."""
    for i in range(b):
        ib = i * b
        for k in range(b):
            a = A[ib + k]
            if a:
                kb = k * b
                for j in range(b):
                    x = B[kb + j]
                    if x:
                        acc[ib + j] += a * x


def vec_addmul(acc, A, c):
    """acc += c * A elementwise (lists of ints)."""
    if c:
        for i, a in enumerate(A):
            if a:
                acc[i] += c * a


def mod_list(vals, m):
    return [v % m for v in vals]


def pack_bytes(vals, slot_bytes):
    """Concatenate non-negative ints into fixed-width little-endian slots."""
    out = bytearray(slot_bytes * len(vals))
    pos = 0
    for v in vals:
        out[pos : pos + slot_bytes] = v.to_bytes(slot_bytes, "little")
        pos += slot_bytes
    return bytes(out)


def unpack_add(dst, dst_base, payload, first_slot, slot_bytes, nslots):
    """dst[dst_base+i] += slot(first_slot+i) of payload, for i < nslots."""
    pos = first_slot * slot_bytes
    for i in range(nslots):
        dst[dst_base + i] += int.from_bytes(payload[pos : pos + slot_bytes], "little")
        pos += slot_bytes


def conv_trunc(a, b, K):
    """Truncated convolution of two integer lists: sum_{i+j=k} a_i b_j, k < K."""
    n = min(K, len(a) + len(b) - 1) if a and b else 0
    out = [0] * n
    for i, ai in enumerate(a):
        if ai and i < K:
            top = min(len(b), K - i)
            for j in range(top):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
    return out


def csr_apply(row_start, col, val, vec, out):
    """out[i] = sum_j val[j] * vec[col[j]] over row i's slice (ints)."""
    for i in range(len(out)):
        s = 0
        for j in range(row_start[i], row_start[i + 1]):
            s += val[j] * vec[col[j]]
        out[i] = s


def lincomb(coeffs, vectors, width):
    """sum_i coeffs[i] * vectors[i] for integer vectors of a fixed width."""
    acc = [0] * width
    for c, vec in zip(coeffs, vectors):
        if c:
            for j in range(width):
                v = vec[j]
                if v:
                    acc[j] += c * v
    return acc


def count_projective(n_coords, q, zech, term_logs, term_exps, nterms):
    """Count points of P^(n_coords-1)(F_q) where the given form vanishes.

    Field elements are in discrete-log form: -1 is zero, k in [0, q-1) is g^k.
    zech[d] = log(1 + g^d), or -1 when 1 + g^d = 0.  term_logs holds the log
    of each term coefficient; term_exps is flat nterms x n_coords.
    """
    qm1 = q - 1
    count = 0
    coords = [-1] * n_coords
    for lead in range(n_coords):
        # coords[0..lead-1] = 0, coords[lead] = 1 (log 0), rest enumerate F_q
        for i in range(lead):
            coords[i] = -1
        coords[lead] = 0
        nfree = n_coords - lead - 1
        total = q**nfree
        for idx in range(total):
            rem = idx
            for i in range(nfree):
                coords[lead + 1 + i] = (rem % q) - 1
                rem //= q
            acc = -1
            for t in range(nterms):
                s = term_logs[t]
                base = t * n_coords
                for i in range(n_coords):
                    e = term_exps[base + i]
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
                    z = zech[d]
                    acc = -1 if z < 0 else (acc + z) % qm1
            if acc < 0:
                count += 1
    return count

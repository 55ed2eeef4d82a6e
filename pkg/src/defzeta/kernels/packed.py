"""Kronecker-style packed convolutions for truncated series of residues.

A series of non-negative mantissas (each < bound) is packed into one big
integer with fixed byte-aligned slots; a single big multiplication then
performs the whole convolution, with GMP (via gmpy2) doing the heavy
lifting.  Slots are sized so that convolution sums never overflow into the
next slot.
"""

from gmpy2 import mpz

from . import pack_bytes, unpack_add


def slot_bytes_for(bound_a, bound_b, max_terms):
    """Slot width (bytes) so that max_terms products a*b fit in one slot."""
    bits = (bound_a - 1).bit_length() + (bound_b - 1).bit_length()
    bits += max(1, max_terms).bit_length() + 1
    return (bits + 7) // 8


class PackedSeries:
    """One packed integer per matrix entry, for a series of flat matrices."""

    def __init__(self, coeffs, nentries, slot_bytes, length=None):
        self.nentries = nentries
        self.slot_bytes = slot_bytes
        self.length = len(coeffs) if length is None else length
        self.packed = []
        for e in range(nentries):
            vals = [coeffs[i][e] for i in range(len(coeffs))]
            self.packed.append(mpz(int.from_bytes(pack_bytes(vals, slot_bytes), "little")))


def pack_scalar_series(vals, slot_bytes):
    return mpz(int.from_bytes(pack_bytes(list(vals), slot_bytes), "little"))


def unpack_into(total, dst_rows, entry, first_slot, slot_bytes, nslots, dst_base=0):
    """Add slots [first_slot, first_slot+nslots) of total into dst_rows.

    dst_rows is a list of flat matrices; slot first_slot+i goes into
    dst_rows[dst_base+i][entry].
    """
    if total == 0:
        return
    total = int(total)
    nbytes = max(total.bit_length() // 8 + 1, (first_slot + nslots) * slot_bytes)
    payload = total.to_bytes(nbytes, "little")
    pos = first_slot * slot_bytes
    for i in range(nslots):
        v = int.from_bytes(payload[pos : pos + slot_bytes], "little")
        if v:
            dst_rows[dst_base + i][entry] += v
        pos += slot_bytes


def series_matmul(A, B, b, K, bound_a, bound_b, modulus=None):
    """Truncated product of series of b x b matrices, exact integer sums.

    A, B: lists of flat b*b mantissa matrices (non-negative ints below
    bound_a / bound_b).  Returns K flat matrices; entries are reduced
    modulo `modulus` when given.
    """
    la, lb = len(A), len(B)
    if la == 0 or lb == 0:
        return [[0] * (b * b) for _ in range(K)]
    sb = slot_bytes_for(bound_a, bound_b, b * min(la, lb, K))
    PA = PackedSeries(A, b * b, sb)
    PB = PackedSeries(B, b * b, sb)
    n = min(K, la + lb - 1)
    out = [[0] * (b * b) for _ in range(n)]
    limit_bytes = n * sb
    mask_int = (1 << (8 * limit_bytes)) - 1
    for i in range(b):
        for j in range(b):
            total = mpz(0)
            for k in range(b):
                pa = PA.packed[i * b + k]
                pb = PB.packed[k * b + j]
                if pa and pb:
                    total += (pa * pb) & mask_int
            unpack_into(total & mask_int, out, i * b + j, 0, sb, n)
    if modulus is not None:
        out = [[v % modulus for v in row] for row in out]
    if n < K:
        out.extend([0] * (b * b) for _ in range(K - n))
    return out


def series_scalar_mul(svals, A, K, bound_s, bound_a, modulus=None):
    """Truncated product of a scalar series with a matrix series."""
    la = len(A)
    if la == 0 or not svals:
        return [[0] * len(A[0]) for _ in range(K)]
    nent = len(A[0])
    sb = slot_bytes_for(bound_s, bound_a, min(len(svals), la, K))
    ps = pack_scalar_series(svals, sb)
    PA = PackedSeries(A, nent, sb)
    n = min(K, la + len(svals) - 1)
    out = [[0] * nent for _ in range(n)]
    limit_bytes = n * sb
    mask_int = (1 << (8 * limit_bytes)) - 1
    for e in range(nent):
        pa = PA.packed[e]
        if pa:
            unpack_into((ps * pa) & mask_int, out, e, 0, sb, n)
    if modulus is not None:
        out = [[v % modulus for v in row] for row in out]
    if n < K:
        out.extend([0] * nent for _ in range(K - n))
    return out


def block_scatter(acc, Cblock, block_start, G, Gpacked, rp, rpacked, jC, b,
                  slot_bytes, K):
    """Add the long-range recursion contributions of a finished block.

    Cblock: list of T flat matrices C_j, j = block_start..block_start+T-1;
    jC the matching j*C_j values.  G is the list of flat matrix coefficients
    of the connection numerator, rp the scalar r'_m = r_{m+1} list; both are
    also supplied packed with the same slot width.  The combined convolution
    contribution to targets s = j+1+m lands in acc, restricted to targets
    beyond the block itself.
    """
    T = len(Cblock)
    sb = slot_bytes
    PC = PackedSeries(Cblock, b * b, sb)
    PjC = PackedSeries(jC, b * b, sb)
    nG, nr = len(G), len(rp)
    conv_len = T + max(nG, nr) - 1
    first = T - 1  # targets block_start+T .. block_start+conv_len
    nslots = conv_len - first
    base = block_start + T
    if base >= K + 1:
        return
    if base + nslots > K:
        nslots = K - base
    if nslots <= 0:
        return
    for i in range(b):
        for j in range(b):
            total = mpz(0)
            for k in range(b):
                pg = Gpacked[i * b + k]
                pc = PC.packed[k * b + j]
                if pg and pc:
                    total += pg * pc
            pj = PjC.packed[i * b + j]
            if rpacked and pj:
                total += rpacked * pj
            if total:
                unpack_into(total, acc, i * b + j, first, sb, nslots, dst_base=base)

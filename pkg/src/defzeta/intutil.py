"""Small exact-integer helpers shared across modules."""


def ordp(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("ordp(0) is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def ordp_factorial(n, p):
    """ord_p(n!) by Legendre's formula."""
    v = 0
    q = p
    while q <= n:
        v += n // q
        q *= p
    return v


def invmod(a, m):
    return pow(a, -1, m)


def floor_log(n, b):
    """floor(log_b(n)) for integers n >= 1, b >= 2, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = 0
    q = b
    while q <= n:
        k += 1
        q *= b
    return k


def ceil_log(n, b):
    """ceil(log_b(n)) for integers n >= 1, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = floor_log(n, b)
    return k if b**k == n else k + 1


def isqrt_exact(n):
    """(isqrt(n), is_square) for n >= 0."""
    import math

    r = math.isqrt(n)
    return r, r * r == n

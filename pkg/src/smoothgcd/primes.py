"""Prime tables and smooth-part arithmetic.

A PrimeTable fixes a smoothness bound B and, once powers are built for a
bit budget n, holds every prime power p^e with p <= B and p^e <= 2^n.
On top of it this module extracts B-smooth parts of integers, either as a
factor vector (prime, exponent) or as a bare rough cofactor via a
gcd-with-prime-product trick that is cheap enough for hot loops.

All integers are plain Python ints (arbitrary precision); 0 and 1 have
empty smooth parts by convention so they propagate cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# A factor vector is a list of (prime, exponent) pairs, primes ascending.
FactorVector = list[tuple[int, int]]

_SIEVE_SEGMENT = 1 << 20


def _simple_sieve(limit: int) -> np.ndarray:
    """Primes <= limit by a straight boolean sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    """Primes <= limit, sieving in fixed-size segments to bound memory."""
    root = math.isqrt(limit)
    base = _simple_sieve(root)
    out = [base]
    lo = root + 1
    while lo <= limit:
        hi = min(lo + _SIEVE_SEGMENT, limit + 1)  # exclusive
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                mask[start - lo :: p] = False
        out.append(np.flatnonzero(mask).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(out)


def _balanced_product(vals: list[int], lo: int, hi: int) -> int:
    if hi - lo == 1:
        return vals[lo]
    mid = (lo + hi) // 2
    return _balanced_product(vals, lo, mid) * _balanced_product(vals, mid, hi)


def prime_product(primes: tuple[int, ...]) -> int:
    """Product of all listed primes (1 if empty), via a balanced tree."""
    if not primes:
        return 1
    return _balanced_product(list(primes), 0, len(primes))


@dataclass(frozen=True)
class PrimeTable:
    """Primes <= bound_B plus precomputed powers for a bit budget.

    Immutable after construction and safe to share across workers.
    `powers[p][e-1] == p**e`, covering every e with p**e <= 2**bit_budget.
    `product` is the product of all primes in the table, used to strip
    smooth parts by repeated gcd.
    """

    bound_B: int
    primes: tuple[int, ...]
    product: int
    powers: dict[int, list[int]] = field(default_factory=dict)
    bit_budget: int | None = None


def sieve_primes(B: int) -> PrimeTable:
    """Sieve all primes <= B into a fresh table (powers not yet built).

    Parameters
    ----------
    B : int
        Smoothness bound, must be >= 2.

    Returns
    -------
    PrimeTable
        Table with ascending primes and their product; `powers` empty.
    """
    if B < 2:
        raise ValueError(f"smoothness bound must be >= 2, got {B}")
    if B <= _SIEVE_SEGMENT:
        arr = _simple_sieve(B)
    else:
        arr = _segmented_sieve(B)
    primes = tuple(int(p) for p in arr)
    return PrimeTable(bound_B=B, primes=primes, product=prime_product(primes))


def build_prime_powers(table: PrimeTable, n: int) -> PrimeTable:
    """Fill in prime powers p^e for e = 1 .. floor(n / log2 p).

    The exponent cap is evaluated exactly as the largest e with
    p**e <= 2**n, which avoids floating-point edge cases at integer
    boundaries.  Primes above 2**n get an empty power list.
    """
    if n < 1:
        raise ValueError(f"bit budget must be >= 1, got {n}")
    limit = 1 << n
    powers: dict[int, list[int]] = {}
    for p in table.primes:
        lst = []
        q = p
        while q <= limit:
            lst.append(q)
            q *= p
        powers[p] = lst
    return PrimeTable(
        bound_B=table.bound_B,
        primes=table.primes,
        product=table.product,
        powers=powers,
        bit_budget=n,
    )


def make_table(B: int, n: int) -> PrimeTable:
    """Sieve primes <= B and build powers for bit budget n in one call."""
    return build_prime_powers(sieve_primes(B), n)


def _max_exponent(m: int, p: int, plist: list[int]) -> int:
    """Largest e with p^e | m, binary-searching the precomputed powers.

    Divisibility by p^e is monotone in e, so the power list supports a
    plain binary search.  If the list tops out (m larger than the bit
    budget allows for), finish with direct division.
    """
    lo, hi = 0, len(plist)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if m % plist[mid - 1] == 0:
            lo = mid
        else:
            hi = mid - 1
    e = lo
    if e == len(plist):
        q = (plist[-1] if plist else 1) * p
        while m % q == 0:
            e += 1
            q *= p
    return e


def smooth_part(m: int, table: PrimeTable) -> tuple[FactorVector, int]:
    """Split m into its B-smooth part (as a factor vector) and rough rest.

    Parameters
    ----------
    m : int
        Nonnegative integer to split.
    table : PrimeTable
        Table with powers built.

    Returns
    -------
    (FactorVector, int)
        Entries (p, e) with p <= B and maximal e, and the cofactor with
        no prime factor <= B.  m == 0 gives ([], 0); m == 1 gives ([], 1).
    """
    if m == 0:
        return [], 0
    entries: FactorVector = []
    rest = m
    g = math.gcd(rest, table.product)
    if g == 1:
        return entries, rest
    found = 1
    for p in table.primes:
        if g % p:
            continue
        e = _max_exponent(rest, p, table.powers.get(p, []))
        entries.append((p, e))
        rest //= p**e
        found *= p
        if found == g:
            break
    return entries, rest


def rough_part(m: int, table: PrimeTable) -> int:
    """The cofactor of m after removing all prime factors <= B.

    Fast path for hot loops: one gcd against the prime product finds the
    radical of the smooth part, then squaring gcds grow it to the full
    smooth divisor without ever factoring anything.
    """
    if m == 0:
        return 0
    g = math.gcd(m, table.product)
    if g == 1:
        return m
    while True:
        h = math.gcd(m, g * g)
        if h == g:
            break
        g = h
    return m // g


def factor_vector_product(fv: FactorVector) -> int:
    """Exact product of the p^e entries; empty vector gives 1."""
    out = 1
    for p, e in fv:
        out *= p**e
    return out


def common_small_part(
    u: int, v: int, table: PrimeTable
) -> tuple[FactorVector, int, int]:
    """Remove the shared prime factors <= B from both inputs.

    Returns (g_small, u0, v0) where g_small holds min(e_u, e_v) for every
    prime <= B dividing both, u0 = u / product(g_small) and likewise v0.
    After this, gcd(u0, v0) has no prime factor <= B.
    """
    if u == 0 or v == 0:
        raise ValueError("common_small_part needs both inputs nonzero")
    fu, _ = smooth_part(u, table)
    fv_, _ = smooth_part(v, table)
    ev = dict(fv_)
    g_small: FactorVector = []
    for p, eu in fu:
        e = min(eu, ev.get(p, 0))
        if e > 0:
            g_small.append((p, e))
    g = factor_vector_product(g_small)
    return g_small, u // g, v // g


def verify_table(table: PrimeTable) -> None:
    """Check table integrity against trial division; raise on corruption.

    Verifies primality of every entry, that no prime <= B is missing,
    that the cached product matches, and that every power list holds
    exactly the p^e within the bit budget.
    """
    expected = []
    for q in range(2, table.bound_B + 1):
        if all(q % d for d in range(2, math.isqrt(q) + 1)):
            expected.append(q)
    if list(table.primes) != expected:
        raise ValueError("prime list disagrees with trial division")
    if table.product != prime_product(table.primes):
        raise ValueError("cached prime product is stale")
    if table.bit_budget is not None:
        limit = 1 << table.bit_budget
        for p in table.primes:
            lst = table.powers.get(p)
            if lst is None:
                raise ValueError(f"powers missing for {p}")
            q, want = p, []
            while q <= limit:
                want.append(q)
                q *= p
            if lst != want:
                raise ValueError(f"power list wrong for {p}")

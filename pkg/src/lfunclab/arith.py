"""Integer arithmetic kernel: prime sieves, Kronecker symbols, discriminant sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, ResourceBudgetError

# (2/n) as a function of n mod 8; even entries are never read.
_KRON2 = (0, 1, 0, -1, 0, -1, 0, 1)

# Above this bound the least-factor table is no longer kept dense and primes
# are produced by a segmented sieve.
DENSE_LPF_CAP = 10**7

_SEGMENT = 1 << 20


@dataclass(frozen=True)
class PrimeTable:
    """Primes up to `limit` plus a dense least-prime-factor table.

    `least_factor[n]` is the smallest prime dividing n for 2 <= n <= lpf_limit.
    When `limit` exceeds the dense cap, primes beyond `lpf_limit` come from a
    segmented sieve and only the prime list is kept for them.
    """

    limit: int
    primes: np.ndarray
    least_factor: np.ndarray
    lpf_limit: int

    def factor(self, n: int) -> list[tuple[int, int]]:
        """Factor n >= 1 into ascending (prime, exponent) pairs."""
        if n < 1:
            raise ValueError("factor() requires n >= 1")
        out: list[tuple[int, int]] = []
        if n <= self.lpf_limit:
            lf = self.least_factor
            while n > 1:
                p = int(lf[n])
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
            return out
        if n > self.limit * self.limit:
            raise CoverageError(f"cannot factor {n}: table covers primes <= {self.limit}")
        for p in self.primes:
            p = int(p)
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        if n > 1:
            out.append((n, 1))
        return out

    def prime_power(self, n: int) -> tuple[int, int] | None:
        """Return (p, m) when n = p^m with m >= 1, else None."""
        if n < 2:
            return None
        fac = self.factor(n)
        if len(fac) == 1:
            return fac[0]
        return None

    def primes_below(self, x: float) -> np.ndarray:
        """Primes p < x (strict), requiring x <= limit."""
        if x > self.limit + 1:
            raise CoverageError(f"prime table limit {self.limit} < requested bound {x}")
        return self.primes[: np.searchsorted(self.primes, x, side="left")]


def _dense_sieve(limit: int) -> tuple[np.ndarray, np.ndarray]:
    lf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, math.isqrt(limit) + 1):
        if lf[i] == 0:
            sl = lf[i::i]
            sl[sl == 0] = i
    rest = np.flatnonzero(lf == 0)
    rest = rest[rest >= 2]
    lf[rest] = rest
    primes = np.flatnonzero(lf == np.arange(limit + 1))
    primes = primes[primes >= 2]
    return primes.astype(np.int64), lf


def _segmented_primes(lo: int, hi: int, base: np.ndarray) -> list[np.ndarray]:
    """Primes in (lo, hi] given base primes covering sqrt(hi)."""
    chunks = []
    start = lo + 1
    while start <= hi:
        stop = min(start + _SEGMENT, hi + 1)
        seg = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, ((start + p - 1) // p) * p)
            seg[first - start :: p] = False
        chunks.append(np.flatnonzero(seg) + start)
        start = stop
    return chunks


def sieve(limit: int, memory_budget_mb: int = 768) -> PrimeTable:
    """Build a PrimeTable of all primes <= limit.

    The least-factor table is dense up to min(limit, DENSE_LPF_CAP); beyond
    that primes are produced by a segmented sieve so memory stays bounded.

    Raises:
        ResourceBudgetError: estimated table memory exceeds the budget.
    """
    if limit < 2:
        raise ValueError("sieve() requires limit >= 2")
    lpf_limit = min(limit, DENSE_LPF_CAP)
    est_mb = (9 * lpf_limit + 8 * int(1.2 * limit / max(math.log(limit), 1.0))) / 1e6
    if est_mb > memory_budget_mb:
        raise ResourceBudgetError(
            f"sieve({limit}) needs ~{est_mb:.0f} MB > budget {memory_budget_mb} MB"
        )
    primes, lf = _dense_sieve(lpf_limit)
    if limit > lpf_limit:
        chunks = [primes]
        chunks.extend(_segmented_primes(lpf_limit, limit, primes))
        primes = np.concatenate(chunks)
    primes.setflags(write=False)
    lf.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes, least_factor=lf, lpf_limit=lpf_limit)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 1, by the binary algorithm.

    Completely multiplicative in n; zero exactly when gcd(a, n) > 1.
    """
    if n < 1:
        raise ValueError("kronecker() requires n >= 1")
    if n == 1:
        return 1
    result = 1
    # peel the even part of n; (a/2) is 0 for even a, else a table of a mod 8
    while n % 2 == 0:
        if a % 2 == 0:
            return 0
        result *= _KRON2[a & 7]
        n //= 2
    if n == 1:
        return result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            result *= _KRON2[n & 7]
        # quadratic reciprocity twist for odd a, n
        a, n = n, a
        if (a & 3) == 3 and (n & 3) == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class DiscriminantSet:
    """Odd squarefree d with D/2 < d <= D, ascending."""

    D: int
    members: np.ndarray

    def __len__(self) -> int:
        return len(self.members)


def enumerate_discriminants(D: int) -> DiscriminantSet:
    """Enumerate the complete set of odd squarefree d in (D/2, D]."""
    if D < 2:
        raise ValueError("enumerate_discriminants() requires D >= 2")
    lo = D // 2 + 1
    first_odd = lo | 1
    cand = np.arange(first_odd, D + 1, 2, dtype=np.int64)
    ok = np.ones(cand.shape, dtype=bool)
    for p in range(3, math.isqrt(D) + 1, 2):
        p2 = p * p
        m0 = ((lo + p2 - 1) // p2) * p2
        if m0 % 2 == 0:
            m0 += p2
        if m0 <= D:
            ok[(np.arange(m0, D + 1, 2 * p2) - first_odd) >> 1] = False
    members = cand[ok]
    members.setflags(write=False)
    return DiscriminantSet(D=D, members=members)


@dataclass(frozen=True)
class PrimeLogSums:
    sum_inv_p: float
    sum_logsq_over_p: float


def prime_log_sums(x: float, table: PrimeTable) -> PrimeLogSums:
    """Sum 1/p and (log p)^2/p over primes p < x, compensated."""
    if x < 2:
        raise ValueError("prime_log_sums() requires x >= 2")
    if x > table.limit + 1:
        raise ValueError(f"prime table limit {table.limit} too small for x = {x}")
    p = table.primes_below(x).astype(np.float64)
    if p.size == 0:
        return PrimeLogSums(0.0, 0.0)
    inv = 1.0 / p
    logs = np.log(p)
    return PrimeLogSums(
        sum_inv_p=float(math.fsum(inv)),
        sum_logsq_over_p=float(math.fsum(logs * logs * inv)),
    )

"""Mollified prime sums: a_x weights, Lambda coefficients, sigma_x, identities.

The truncated Dirichlet sums here feed the distribution experiments: the
smoothed coefficients Lambda_{x,*}(n) = Lambda_*(n) a_x(n) represent
log-derivatives of L(s, *) near the central point up to explicit zero sums.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .arith import PrimeTable
from .errors import CoverageError, NegativeLValueError, PrecisionError
from .holo import HeckeEigenform, l_value_holo
from .quad import (
    QuadraticDiscriminant,
    ZeroList,
    character_values,
    l_value_afe,
    l_value_oracle,
)

Member = Union[QuadraticDiscriminant, HeckeEigenform]


def member_id(member: Member) -> str:
    if isinstance(member, QuadraticDiscriminant):
        return f"d{member.d}"
    return f"k{member.k}.{member.index}"


def conductor(member: Member) -> float:
    """C = 8d for the quadratic family, k^2 for weight-k forms."""
    if isinstance(member, QuadraticDiscriminant):
        return float(member.q)
    return float(member.k) ** 2


# ---------------------------------------------------------------------------
# Mollifier weights
# ---------------------------------------------------------------------------


def weight_a_x(x: float, n) -> np.ndarray | float:
    """Piecewise-quadratic-in-log weight: 1 on [1,x], 0 at x^3 and beyond.

    Middle branch (log^2(x^3/n) - 2 log^2(x^2/n)) / (2 log^2 x) on [x, x^2],
    outer branch log^2(x^3/n) / (2 log^2 x) on [x^2, x^3].
    """
    if x <= 1:
        raise ValueError("weight_a_x() requires x > 1")
    scalar = np.isscalar(n)
    n = np.asarray(n, dtype=np.float64)
    if np.any(n < 1):
        raise ValueError("weight_a_x() requires n >= 1")
    lx = math.log(x)
    ln = np.log(n)
    out = np.ones(n.shape, dtype=np.float64)
    mid = (ln >= lx) & (ln <= 2 * lx)
    outer = (ln > 2 * lx) & (ln <= 3 * lx)
    l3 = 3 * lx - ln
    l2 = 2 * lx - ln
    out[mid] = (l3[mid] ** 2 - 2 * l2[mid] ** 2) / (2 * lx * lx)
    out[outer] = l3[outer] ** 2 / (2 * lx * lx)
    out[ln > 3 * lx] = 0.0
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# Lambda_*(n) coefficients (supported on prime powers)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaCoefficient:
    family: str  # "quad" | "holo"
    member: str
    n: int
    value: float


def _lambda_value(member: Member, p: int, m: int, chi_p: int | None = None) -> float:
    logp = math.log(p)
    if isinstance(member, QuadraticDiscriminant):
        c = chi_p if chi_p is not None else _chi_at(member, p)
        return float(c**m) * logp if c else 0.0
    lam = member.lam
    pm = p**m
    if pm > member.truncation:
        raise CoverageError(f"lambda({pm}) not available on {member_id(member)}")
    prev = 1.0 if m == 2 else (lam[pm // (p * p)] if m > 2 else 0.0)
    return (lam[pm] - prev) * logp


def _chi_at(disc: QuadraticDiscriminant, p: int) -> int:
    from .arith import kronecker

    return kronecker(disc.q, p)


def lambda_coeff(member: Member, n: int, table: PrimeTable) -> LambdaCoefficient:
    """Lambda_*(n): zero off prime powers; chi_8d(p^m) log p, resp.
    (lambda(p^m) - lambda(p^{m-2})) log p with lambda(p^{-1}) = 0."""
    if n < 1:
        raise ValueError("lambda_coeff() requires n >= 1")
    family = "quad" if isinstance(member, QuadraticDiscriminant) else "holo"
    pp = table.prime_power(n) if n > 1 else None
    if pp is None:
        return LambdaCoefficient(family, member_id(member), n, 0.0)
    p, m = pp
    return LambdaCoefficient(family, member_id(member), n, _lambda_value(member, p, m))


def _prime_powers(limit: float, table: PrimeTable) -> Iterator[tuple[int, int, int]]:
    """(n, p, m) with n = p^m <= limit, primes ascending then powers."""
    for p in table.primes_below(limit + 1):
        p = int(p)
        n, m = p, 1
        while n <= limit:
            yield n, p, m
            n *= p
            m += 1


# ---------------------------------------------------------------------------
# Truncated, weighted Dirichlet sums
# ---------------------------------------------------------------------------


def truncated_sum(
    member: Member,
    x: float,
    s: float,
    log_weighted: bool,
    table: PrimeTable,
) -> float:
    """sum over n <= x^3 of Lambda_*(n) a_x(n) n^{-1/2-s} (over log n if flagged)."""
    limit = x**3
    if limit > table.limit + 1:
        raise CoverageError(f"prime table to {table.limit} < x^3 = {limit:.0f}")
    chi = None
    if isinstance(member, QuadraticDiscriminant):
        chi = character_values(member.d, int(limit) + 1, table)
    terms = []
    for n, p, m in _prime_powers(limit, table):
        if chi is not None:
            c = int(chi[p])
            if c == 0:
                continue
            lam = float(c**m) * math.log(p)
        else:
            lam = _lambda_value(member, p, m)
        if lam == 0.0:
            continue
        w = weight_a_x(x, n)
        if w == 0.0:
            continue
        t = lam * w * n ** (-0.5 - s)
        if log_weighted:
            t /= math.log(n)
        terms.append(t)
    return float(math.fsum(terms))


# ---------------------------------------------------------------------------
# sigma_{x,*}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaX:
    x: float
    sigma: float
    source: str  # "default-4-over-logx" | "zero-driven"


def sigma_x(zeros, x: float) -> SigmaX:
    """sigma = 2 max(2/log x, max |beta| over zeros in the exclusion region).

    The region contains rho = 1/2 + beta + i gamma with |beta| >= 2/log x and
    |gamma| <= x^{3|beta|}/log x.  `zeros` is an iterable of (beta, gamma)
    pairs or a ZeroList (all beta = 0).
    """
    if x <= 1:
        raise ValueError("sigma_x() requires x > 1")
    lx = math.log(x)
    floor = 2.0 / lx
    if isinstance(zeros, ZeroList):
        pairs = [(0.0, g) for g in zeros.ordinates]
    else:
        pairs = [(float(b), float(g)) for b, g in zeros]
    best = floor
    driven = False
    for beta, gamma in pairs:
        b = abs(beta)
        if b < floor:
            continue
        if abs(gamma) <= x ** (3 * b) / lx:
            if b > best:
                best = b
                driven = True
    return SigmaX(
        x=x,
        sigma=2.0 * best,
        source="zero-driven" if driven else "default-4-over-logx",
    )


# ---------------------------------------------------------------------------
# Normalized prime-sum statistic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSumStat:
    member: str
    x: float
    P: float
    prime_part: float
    square_part: float
    higher_part: float


def prime_sum_stat(
    member: Member, x: float, family_scale: float, table: PrimeTable
) -> PrimeSumStat:
    """P(*) = (core +/- log log scale / 2) / sqrt(log log scale).

    core = sum_{n <= x} Lambda_*(n) / (sqrt(n) log n), split into prime,
    prime-square, and higher prime-power parts.  The mean shift enters with
    +1/2 log log k for forms and -1/2 log log D for quadratic characters.
    """
    if x > table.limit + 1:
        raise CoverageError(f"prime table to {table.limit} < x = {x}")
    chi = None
    if isinstance(member, QuadraticDiscriminant):
        chi = character_values(member.d, int(x) + 1, table)
    parts: dict[int, list[float]] = {1: [], 2: [], 3: []}
    for n, p, m in _prime_powers(x, table):
        if n >= x:
            continue  # strict cutoff p^m < x
        if chi is not None:
            c = int(chi[p])
            if c == 0:
                continue
            lam = float(c**m) * math.log(p)
        else:
            lam = _lambda_value(member, p, m)
        if lam == 0.0:
            continue
        parts[min(m, 3)].append(lam / (math.sqrt(n) * math.log(n)))
    prime_part = math.fsum(parts[1])
    square_part = math.fsum(parts[2])
    higher_part = math.fsum(parts[3])
    core = prime_part + square_part + higher_part
    ll = math.log(math.log(family_scale))
    shift = 0.5 * ll if isinstance(member, HeckeEigenform) else -0.5 * ll
    return PrimeSumStat(
        member=member_id(member),
        x=x,
        P=(core + shift) / math.sqrt(ll),
        prime_part=prime_part,
        square_part=square_part,
        higher_part=higher_part,
    )


# ---------------------------------------------------------------------------
# Decomposition of log L right of the center
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionResidual:
    member: str
    x: float
    sigma: float
    lhs: float
    main: float
    err1: float
    err2: float

    @property
    def residual(self) -> float:
        return self.lhs - self.main

    @property
    def budget(self) -> float:
        return self.err1 + self.err2


def _log_l_real(member: Member, s: float, table: PrimeTable) -> float:
    """log L(s, *) at real s > 1/2; sign failures raise NegativeLValueError."""
    if isinstance(member, QuadraticDiscriminant):
        if 0 < s < 1:
            val = l_value_afe(member, s, table=table).real_value
        else:
            val = l_value_oracle(member, s, table=table).real_value
    else:
        val = float(np.real(l_value_holo(member, s)))
    if val <= 0:
        raise NegativeLValueError(f"{member_id(member)}: L({s}) = {val:.3e} <= 0")
    return math.log(val)


def decomposition_residual(
    member: Member, x: float, table: PrimeTable, zeros=()
) -> DecompositionResidual:
    """Compare log L(1/2 + sigma_x) with the log-weighted truncated prime sum.

    err1 = |unweighted truncated sum| / log x and err2 = log C / log x bound
    the neglected zero contributions.
    """
    sig = sigma_x(zeros, x)
    lhs = _log_l_real(member, 0.5 + sig.sigma, table)
    main = truncated_sum(member, x, sig.sigma, log_weighted=True, table=table)
    err1 = abs(truncated_sum(member, x, sig.sigma, log_weighted=False, table=table))
    err1 /= math.log(x)
    err2 = math.log(conductor(member)) / math.log(x)
    return DecompositionResidual(
        member=member_id(member),
        x=x,
        sigma=sig.sigma,
        lhs=lhs,
        main=main,
        err1=err1,
        err2=err2,
    )


# ---------------------------------------------------------------------------
# Explicit formula for -L'/L off the critical line (quadratic family)
# ---------------------------------------------------------------------------


def explicit_formula_tail(q: int, x: float, s: float, T: float) -> float:
    """Bound on the nontrivial-zero sum omitted above height T."""
    lx = math.log(x)
    coef = x ** (-s) * (1 + x ** (-s)) ** 2 / (lx * lx)
    # zero density ~ log(q t / 2 pi)/pi per unit height, both signs
    return coef * (math.log(q * T / (2 * math.pi)) + 0.75) / (math.pi * T * T)


def minus_l_over_l_stencil(
    disc: QuadraticDiscriminant, s: float, table: PrimeTable, h: float = 1e-4
) -> float:
    """-L'/L(1/2+s) by a 5-point central stencil on log L from the oracle."""
    vals = []
    for step in (-2, -1, 1, 2):
        vals.append(_log_l_real(disc, 0.5 + s + step * h, table))
    deriv = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return -deriv


def explicit_formula_residual(
    disc: QuadraticDiscriminant,
    x: float,
    s: float,
    zeros: ZeroList,
    table: PrimeTable,
    tail_budget: float = 1e-6,
) -> float:
    """|LHS - RHS| for the smoothed explicit formula at 1/2 + s, real s > 0.

    LHS is -L'/L by finite differences of the oracle; RHS is the weighted
    prime sum minus the (paired) nontrivial-zero sum and the trivial-zero sum.

    Raises:
        PrecisionError: zero list too short for the 1/gamma^3 tail budget.
    """
    if s <= 0:
        raise ValueError("explicit_formula_residual() requires s > 0")
    tail = explicit_formula_tail(disc.q, x, s, zeros.T)
    if tail > tail_budget:
        raise PrecisionError(
            f"zero tail {tail:.2e} above budget {tail_budget:.1e}; extend T"
        )
    lhs = minus_l_over_l_stencil(disc, s, table)
    prime_sum = truncated_sum(disc, x, s, log_weighted=False, table=table)
    lx = math.log(x)
    zero_sum = 0.0
    for g in zeros.ordinates:
        w = x ** (1j * g - s)
        term = w * (1 - w) ** 2 / complex(s, -g) ** 3
        zero_sum += 2 * term.real
    trivial = 0.0
    r = 0
    while True:
        w = x ** (-r - 0.5 - s)
        if w < 1e-14:
            break
        trivial += w * (1 - w) ** 2 / (0.5 + r + s) ** 3
        r += 2
    rhs = prime_sum - zero_sum / (lx * lx) - trivial / (lx * lx)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# One-sided central-value bound
# ---------------------------------------------------------------------------


def upper_bound_gap(
    member: Member,
    x: float,
    table: PrimeTable,
    zeros=(),
    near_zero_cut: float = 1e-12,
) -> float:
    """gap = log L(1/2+sigma) + sigma log C - log|L(1/2)|; +inf if |L(1/2)| tiny.

    The one-sided bound asserts the gap stays above an absolute constant.
    """
    sig = sigma_x(zeros, x)
    lhs_right = _log_l_real(member, 0.5 + sig.sigma, table)
    if isinstance(member, QuadraticDiscriminant):
        central = l_value_afe(member, 0.5, table=table).real_value
    else:
        central = float(np.real(l_value_holo(member, 0.5)))
    if abs(central) < near_zero_cut:
        return math.inf
    return lhs_right + sig.sigma * math.log(conductor(member)) - math.log(abs(central))

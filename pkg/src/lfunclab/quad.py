"""L(s, chi_8d) for odd squarefree d: oracle and AFE evaluation, Hardy Z, zeros.

chi_8d(n) = (8d/n) is the real primitive even character of conductor q = 8d,
with completed function Lambda(s) = (q/pi)^{s/2} Gamma(s/2) L(s, chi_8d)
satisfying Lambda(s) = Lambda(1-s) (root number +1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .arith import PrimeTable, kronecker, sieve
from .errors import (
    CoverageError,
    NumericLossError,
    RescanError,
    ResourceBudgetError,
)
from .numerics import dirichlet_l_hurwitz, hurwitz_zeta_em, regularized_gamma_q

_EPS = float(np.finfo(np.float64).eps)

# exp(-X) below which theta terms are dropped entirely
_THETA_CUT = 46.0


@dataclass(frozen=True)
class QuadraticDiscriminant:
    """Odd squarefree d > 0 with character chi_8d of modulus q = 8d."""

    d: int
    q: int


def quadratic_discriminant(d: int, table: PrimeTable | None = None) -> QuadraticDiscriminant:
    """Validate d (odd, squarefree, positive) and build the member object."""
    if d < 1 or d % 2 == 0:
        raise ValueError(f"d = {d} must be a positive odd integer")
    if table is not None and d <= table.lpf_limit:
        fac = table.factor(d)
    else:
        fac = []
        m = d
        p = 3
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                fac.append((p, e))
            p += 2
        if m > 1:
            fac.append((m, 1))
    if any(e > 1 for _, e in fac):
        raise ValueError(f"d = {d} is not squarefree")
    return QuadraticDiscriminant(d=d, q=8 * d)


@dataclass(frozen=True)
class QuadLValue:
    d: int
    s: complex
    value: complex
    method: str  # "hurwitz-oracle" | "afe"
    est_error: float
    value_str: str | None = None  # full decimal string on the high-precision path

    @property
    def real_value(self) -> float:
        return float(np.real(self.value))


@dataclass(frozen=True)
class ZeroList:
    """Positive ordinates of zeros of one completed L-function up to height T."""

    member: str
    T: float
    ordinates: np.ndarray
    gamma_min: float | None
    count_check: int


def _legendre_table(p: int) -> np.ndarray:
    """Value table of the Legendre symbol (r/p) indexed by r mod p, odd prime p."""
    tbl = np.full(p, -1, dtype=np.int8)
    r = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    tbl[(r * r) % p] = 1
    tbl[0] = 0
    return tbl


def character_values(d: int, N: int, table: PrimeTable) -> np.ndarray:
    """chi_8d(n) for 0 <= n <= N as an int8 array (multiplicative fill)."""
    if N > table.lpf_limit:
        raise CoverageError(f"character fill needs least-factor table to {N}")
    chi = np.zeros(N + 1, dtype=np.int8)
    if N >= 1:
        chi[1] = 1
    lf = table.least_factor
    a = 8 * d
    for p in table.primes_below(N + 1):
        p = int(p)
        chi[p] = kronecker(a, p)
    for n in range(2, N + 1):
        p = int(lf[n])
        if p != n:
            chi[n] = chi[p] * chi[n // p]
    return chi


def character_table(ds: np.ndarray, N: int, table: PrimeTable) -> np.ndarray:
    """chi_8d(n) for all d in `ds` and n <= N; shape (len(ds), N+1), int8.

    Columns at primes come from per-prime quadratic-residue tables; composite
    columns are filled multiplicatively via the least-factor table.
    """
    if N > table.lpf_limit:
        raise CoverageError(f"character fill needs least-factor table to {N}")
    ds = np.asarray(ds, dtype=np.int64)
    chi = np.zeros((ds.size, N + 1), dtype=np.int8)
    chi[:, 1] = 1
    a = 8 * ds
    for p in table.primes_below(N + 1):
        p = int(p)
        if p == 2:
            continue  # 2 | 8d always
        tbl = _legendre_table(p)
        chi[:, p] = tbl[a % p]
    lf = table.least_factor
    for n in range(4, N + 1):
        p = int(lf[n])
        if p != n:
            np.multiply(chi[:, p], chi[:, n // p], out=chi[:, n])
    return chi


# ---------------------------------------------------------------------------
# Oracle: L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)
# ---------------------------------------------------------------------------


def l_value_oracle(
    disc: QuadraticDiscriminant,
    s: complex,
    precision: int = 12,
    table: PrimeTable | None = None,
    max_cost: float = 5e8,
) -> QuadLValue:
    """Hurwitz-zeta evaluation of L(s, chi_8d), correct to ~10^(2-precision).

    precision <= 13 runs the fast double-precision Euler-Maclaurin path;
    higher precision switches to mpmath with a per-residue loop.
    """
    s = complex(s)
    if s == 1:
        raise ValueError("L-series evaluation point s = 1 not allowed")
    if precision > 50:
        raise ValueError("precision capped at 50 digits")
    q = disc.q
    target = 10.0 ** (-(precision - 2))
    if table is None or table.lpf_limit < q:
        table = sieve(max(q, 2))
    chi = character_values(disc.d, q, table)
    if precision <= 13:
        if q * (24 + abs(s.imag)) > max_cost:
            raise ResourceBudgetError(f"oracle cost for q={q} at s={s} over budget")
        value, est = dirichlet_l_hurwitz(s, chi, q)
        if est > target:
            raise NumericLossError(
                f"double-precision oracle error {est:.1e} exceeds target {target:.1e}"
            )
    else:
        import mpmath as mp

        if q * precision > 2e6:
            raise ResourceBudgetError(f"high-precision oracle for q={q} over budget")
        with mp.workdps(precision + 12):
            ms = mp.mpc(s) if s.imag else mp.mpf(s.real)
            acc = mp.mpf(0)
            for a_res in range(1, q + 1):
                c = int(chi[a_res])
                if c:
                    acc += c * mp.zeta(ms, mp.mpf(a_res) / q)
            val = mp.power(q, -ms) * acc
            value = complex(val)
            vstr = mp.nstr(val, precision, strip_zeros=False)
        est = 10.0 ** (-(precision + 4))
        if s.imag == 0.0:
            value = complex(value).real
        return QuadLValue(
            d=disc.d, s=s, value=value, method="hurwitz-oracle",
            est_error=float(est), value_str=vstr,
        )
    if s.imag == 0.0:
        value = complex(value).real
    return QuadLValue(d=disc.d, s=s, value=value, method="hurwitz-oracle", est_error=float(est))


# ---------------------------------------------------------------------------
# AFE: exact incomplete-gamma identity for even primitive chi, root number +1
#   L(s) = sum chi(n) n^-s Q(s/2, pi n^2/q)
#        + X(s) sum chi(n) n^(s-1) Q((1-s)/2, pi n^2/q)
#   X(s) = (q/pi)^(1/2-s) Gamma((1-s)/2)/Gamma(s/2)
# ---------------------------------------------------------------------------


def _afe_length(q: int, s: complex) -> int:
    # Gaussian tail: need pi n^2/q >~ cut + height allowance
    cut = _THETA_CUT + 0.7 * abs(s.imag)
    return int(math.sqrt(cut * q / math.pi)) + 2


def _afe_tail_bound(q: int, n_max: int, sigma: float) -> float:
    # Q(a, z) <= 2 e^{-z/2} once z dominates |a|; geometric tail in n
    z0 = math.pi * (n_max + 1) ** 2 / q
    ratio = math.exp(-math.pi * n_max / q)
    return 2.0 * math.exp(-z0 / 2) * (n_max + 1) ** (-sigma) / max(1e-9, 1 - ratio)


def l_value_afe(
    disc: QuadraticDiscriminant,
    s: complex,
    table: PrimeTable | None = None,
    max_height: float = 80.0,
) -> QuadLValue:
    """Approximate-functional-equation value of L(s, chi_8d), 0 < Re(s) < 1."""
    s = complex(s)
    if not 0.0 < s.real < 1.0:
        raise ValueError("AFE identity used inside the strip 0 < Re(s) < 1 only")
    if abs(s.imag) > max_height:
        raise NumericLossError(
            f"|Im s| = {abs(s.imag):.1f} beyond supported AFE height {max_height}"
        )
    q = disc.q
    n_max = _afe_length(q, s)
    if table is None or table.lpf_limit < n_max:
        table = sieve(max(n_max, 2))
    chi = character_values(disc.d, n_max, table).astype(np.float64)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    z = math.pi * n * n / q
    a1 = s / 2
    a2 = (1 - s) / 2
    q1 = regularized_gamma_q(a1, z)
    q2 = regularized_gamma_q(a2, z)
    logn = np.log(n)
    w = chi[1:]
    real_s = s.imag == 0.0
    if real_s:
        first = float(np.dot(w, np.exp(-s.real * logn) * np.real(q1)))
        second = float(np.dot(w, np.exp((s.real - 1) * logn) * np.real(q2)))
        x_s = math.exp(
            (0.5 - s.real) * math.log(q / math.pi)
            + (loggamma(a2) - loggamma(a1)).real
        )
        value: complex = first + x_s * second
        xabs = abs(x_s)
    else:
        first = complex(np.dot(w, np.exp(-s * logn) * q1))
        second = complex(np.dot(w, np.exp((s - 1) * logn) * q2))
        x_s = cmath.exp(
            (0.5 - s) * math.log(q / math.pi) + (loggamma(a2) - loggamma(a1))
        )
        value = first + x_s * second
        xabs = abs(x_s)
    # roundoff: terms with z << |Im s|/2 are ~e^{pi|t|/4} large and cancel
    cancel = math.exp(min(600.0, math.pi * abs(s.imag) / 4))
    est = (
        _afe_tail_bound(q, n_max, s.real)
        + xabs * _afe_tail_bound(q, n_max, 1 - s.real)
        + 16 * _EPS * (1 + xabs) * n_max ** (1 - min(s.real, 1 - s.real)) * cancel
    )
    return QuadLValue(d=disc.d, s=s, value=value, method="afe", est_error=float(est))


def gamma_factor(q: int, s: complex) -> complex:
    """Archimedean factor (q/pi)^{s/2} Gamma(s/2) of the completed function."""
    s = complex(s)
    return cmath.exp(0.5 * s * math.log(q / math.pi) + loggamma(s / 2))


def completed_lambda(disc: QuadraticDiscriminant, s: complex, **kw) -> complex:
    """Lambda(s) = gamma(s) L(s) with L from the AFE (strip) or oracle."""
    s = complex(s)
    if 0 < s.real < 1:
        lv = l_value_afe(disc, s, **kw)
    else:
        lv = l_value_oracle(disc, s, **kw)
    return gamma_factor(disc.q, s) * lv.value


def theta_phase(q: int, t: float) -> float:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log(pi/q)."""
    return float(loggamma(0.25 + 0.5j * t).imag) - 0.5 * t * math.log(math.pi / q)


def hardy_z(
    disc: QuadraticDiscriminant,
    t: float,
    table: PrimeTable | None = None,
    max_height: float = 60.0,
) -> float:
    """Z(t) = e^{i theta(t)} L(1/2 + it, chi_8d); real, even, |Z| = |L|."""
    z = _hardy_z_complex(disc, t, table=table, max_height=max_height)
    return z.real


def _hardy_z_complex(
    disc: QuadraticDiscriminant,
    t: float,
    table: PrimeTable | None = None,
    max_height: float = 60.0,
) -> complex:
    if abs(t) > max_height:
        raise NumericLossError(f"|t| = {abs(t):.1f} beyond supported height {max_height}")
    s = 0.5 + 1j * t
    # O(q) Euler-Maclaurin beats complex incomplete gammas for small modulus
    if disc.q <= 10**4:
        lv = l_value_oracle(disc, s, table=table)
    else:
        lv = l_value_afe(disc, s, table=table, max_height=max_height)
    return cmath.exp(1j * theta_phase(disc.q, t)) * lv.value


# ---------------------------------------------------------------------------
# Zero location: Lambda(1/2+it) as a cosine transform of the theta function
#
#   Lambda(1/2+it) = 2 * integral over R of h(u) e^{itu} du,
#   h(u) = e^{u/2} sum_n chi(n) exp(-(pi n^2/q) e^{2u}),
#
# h is even and analytic on |Im u| < pi/4, so the trapezoid rule converges
# superexponentially and the contour may be shifted to Im u = v < pi/4 to
# offset the e^{-pi t/4} decay of Lambda at height t.
# ---------------------------------------------------------------------------


class _ThetaZ:
    """Cached evaluator of Z(t) for one discriminant, up to height tmax."""

    def __init__(self, disc: QuadraticDiscriminant, tmax: float, table: PrimeTable):
        q = disc.q
        tmax = max(tmax, 1.0)
        # contour shift trades theta-sum length for the e^{-pi t/4} cancellation;
        # keep ~e^{-24} of it so double precision retains ~5 digits of Z at tmax
        v = 0.0 if tmax <= 30.0 else min(math.pi / 4 - 0.04, math.pi / 4 - 24.0 / tmax)
        v = max(v, 0.0)
        c2 = math.cos(2 * v)
        hg = min(0.08, 2 * math.pi * (v + math.pi / 4) / (math.pi * tmax / 2 + 35.0))
        decay = math.pi * c2 / q
        n_top = int(math.sqrt(_THETA_CUT / decay)) + 1
        u_max = 0.5 * math.log(_THETA_CUT / decay) + 2 * hg
        m = int(u_max / hg) + 2
        chi = character_values(disc.d, n_top, table).astype(np.float64)
        phase = cmath.exp(2j * v)
        half_iv = cmath.exp(0.5j * v)
        rows = np.empty(m, dtype=np.complex128)
        nn = np.arange(1, n_top + 1, dtype=np.float64)
        nn2 = nn * nn
        w = chi[1:]
        for j in range(m):
            u = j * hg
            scale = math.exp(2 * u)
            cut = int(math.sqrt(_THETA_CUT / (decay * scale))) + 1
            if cut < 1:
                rows[j:] = 0.0
                m = j
                break
            expo = (-(math.pi / q) * scale * phase) * nn2[:cut]
            rows[j] = np.dot(w[:cut], np.exp(expo)) * (math.exp(0.5 * u) * half_iv)
        self.q = q
        self.v = v
        self.hg = hg
        self.u = np.arange(1, m) * hg
        self.row0 = rows[0].real
        self.rows = rows[1:m]
        self._ln_pref = math.log(2 * hg) - 0.25 * math.log(q / math.pi)
        self.tmax = tmax

    def z(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        ph = np.exp(1j * np.outer(t, self.u))
        bracket = self.row0 + 2.0 * (ph @ self.rows).real
        lg = loggamma(0.25 + 0.5j * t).real
        return np.exp(self._ln_pref - t * self.v - lg) * bracket


class _HurwitzZ:
    """Z(t) through the complex-s Euler-Maclaurin oracle (small q cross-check)."""

    def __init__(self, disc: QuadraticDiscriminant, table: PrimeTable):
        self.q = disc.q
        chi = character_values(disc.d, disc.q, table)
        self.idx = np.flatnonzero(chi[1:]) + 1
        self.w = chi[self.idx].astype(np.float64)
        self.a = self.idx / disc.q

    def z(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.empty(t.shape, dtype=np.float64)
        for i, ti in enumerate(t):
            s = 0.5 + 1j * ti
            zet, _ = hurwitz_zeta_em(s, self.a)
            lval = np.exp(-s * math.log(self.q)) * np.dot(self.w, zet)
            out[i] = (cmath.exp(1j * theta_phase(self.q, ti)) * lval).real
        return out


def smooth_zero_count(q: int, T: float) -> float:
    """Smooth estimate of the number of zeros with 0 < gamma <= T."""
    if q * T <= 2 * math.pi * math.e:
        return 0.0
    return T / (2 * math.pi) * math.log(q * T / (2 * math.pi * math.e))


def _bisect_zeros(zfun, lo, hi, flo, tol) -> np.ndarray:
    lo = lo.copy()
    hi = hi.copy()
    sgn = np.sign(flo)
    steps = int(math.ceil(math.log2(max(np.max(hi - lo), tol) / tol))) + 1
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = zfun(mid)
        left = np.sign(fm) == sgn
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def scan_zero_list(
    zfun,
    T: float,
    delta0: float,
    smooth_estimate: float,
    member: str,
    refine_tol: float = 1e-9,
) -> ZeroList:
    """Grid scan for sign changes of a real even Z-function, bisection-refined.

    A count deficit beyond 2 against the smooth estimate triggers rescans at
    half spacing; if the deficit persists, RescanError.
    """
    for factor in (1.0, 0.5, 0.25):
        delta = delta0 * factor
        grid = np.arange(0.0, T + delta, delta)
        zv = zfun(grid)
        flip = np.flatnonzero(np.sign(zv[:-1]) * np.sign(zv[1:]) < 0)
        ords = _bisect_zeros(zfun, grid[flip], grid[flip + 1], zv[flip], refine_tol)
        ords = np.sort(ords[ords <= T + refine_tol])
        check = len(ords) - round(smooth_estimate)
        if check >= -2:
            break
    else:
        raise RescanError(
            f"{member}: zero count {len(ords)} short of smooth estimate by {-check}"
        )
    ords.setflags(write=False)
    return ZeroList(
        member=member,
        T=float(T),
        ordinates=ords,
        gamma_min=float(ords[0]) if len(ords) else None,
        count_check=int(check),
    )


def find_zeros(
    disc: QuadraticDiscriminant,
    T: float,
    table: PrimeTable | None = None,
    method: str = "auto",
    refine_tol: float = 1e-9,
    max_height: float = 600.0,
) -> ZeroList:
    """Locate all zeros 1/2 + i*gamma, 0 < gamma <= T, by Z sign changes.

    The scan grid has spacing pi/(2 log(qT+10)), about two points per mean
    zero gap; each sign change is refined by bisection to `refine_tol`.
    """
    if T <= 0:
        raise ValueError("find_zeros() requires T > 0")
    if T > max_height:
        raise NumericLossError(f"T = {T} beyond supported height {max_height}")
    if table is None:
        table = sieve(max(2, int(math.sqrt(_THETA_CUT * disc.q / math.pi)) + 2))
    if method == "hurwitz" or (method == "auto" and disc.q <= 64):
        provider = _HurwitzZ(disc, table)
    else:
        provider = _ThetaZ(disc, T, table)
    delta0 = math.pi / (2 * math.log(disc.q * T + 10.0))
    return scan_zero_list(
        provider.z, T, delta0, smooth_zero_count(disc.q, T), f"d{disc.d}", refine_tol
    )

"""Hecke eigenbasis of level-one cusp forms and evaluation of L(s, f).

Forms of even weight k are built exactly from integer q-expansions of E4, E6
and Delta, echelonized (Miller basis), and diagonalized under T_2 in double
precision with certification against T_3 and T_5.  Eigenvalues are normalized
so lambda(1) = 1 and lambda(n) = a(n) / n^{(k-1)/2}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.integrate import quad as _quad
from scipy.special import loggamma

from .errors import ConditioningError, CoverageError, ForcedZeroError
from .quad import ZeroList, scan_zero_list

_THETA_CUT = 46.0


# ---------------------------------------------------------------------------
# Exact q-expansions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QExpansion:
    """Exact integer q-expansion a(0) + a(1)q + ... + a(N)q^N of given weight."""

    weight: int
    coeffs: tuple[int, ...]

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if self.weight != other.weight:
            raise ValueError("cannot add q-expansions of different weights")
        n = min(self.truncation, other.truncation)
        return QExpansion(
            self.weight,
            tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])),
        )

    def __mul__(self, other):
        if isinstance(other, int):
            return QExpansion(self.weight, tuple(other * c for c in self.coeffs))
        n = min(self.truncation + other.truncation,
                max(self.truncation, other.truncation))
        out = _series_mul(self.coeffs, other.coeffs,
                          min(self.truncation, other.truncation))
        return QExpansion(self.weight + other.weight, tuple(out))

    __rmul__ = __mul__


def _series_mul(a, b, n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai:
            for j, bj in enumerate(b[: n + 1 - i]):
                if bj:
                    out[i + j] += ai * bj
    return out


def _sigma_sums(r: int, n: int) -> list[int]:
    sig = [0] * (n + 1)
    for d in range(1, n + 1):
        dr = d**r
        for m in range(d, n + 1, d):
            sig[m] += dr
    return sig


@lru_cache(maxsize=8)
def _eisenstein(weight: int, n: int) -> tuple[int, ...]:
    if weight == 4:
        mult = 240
    elif weight == 6:
        mult = -504
    else:
        raise ValueError("only E4 and E6 are used")
    sig = _sigma_sums(weight - 1, n)
    return tuple([1] + [mult * s for s in sig[1:]])


@lru_cache(maxsize=64)
def _delta(n: int) -> tuple[int, ...]:
    e4 = _eisenstein(4, n)
    e6 = _eisenstein(6, n)
    num = [
        a - b
        for a, b in zip(
            _series_mul(_series_mul(e4, e4, n), e4, n), _series_mul(e6, e6, n)
        )
    ]
    assert all(c % 1728 == 0 for c in num)
    return tuple(c // 1728 for c in num)


@lru_cache(maxsize=256)
def _e4_power(alpha: int, n: int) -> tuple[int, ...]:
    if alpha == 0:
        return tuple([1] + [0] * n)
    if alpha == 1:
        return _eisenstein(4, n)
    return tuple(_series_mul(_e4_power(alpha - 1, n), _eisenstein(4, n), n))


@lru_cache(maxsize=128)
def _delta_power(j: int, n: int) -> tuple[int, ...]:
    if j == 1:
        return _delta(n)
    return tuple(_series_mul(_delta_power(j - 1, n), _delta(n), n))


def dim_cusp_forms(k: int) -> int:
    """dim S_k for SL2(Z), even k."""
    if k % 2 or k < 0:
        return 0
    if k < 12:
        return 0
    return k // 12 - 1 if k % 12 == 2 else k // 12


def miller_basis(k: int, N: int) -> list[QExpansion]:
    """Echelonized integer basis g_1..g_dim of S_k with g_i = q^i + O(q^{dim+1}).

    Args:
        k: even weight.
        N: coefficient truncation; must allow N >= dim + 1.

    Returns:
        Empty list when dim S_k = 0.
    """
    if k % 2:
        raise ValueError("weight must be even")
    dim = dim_cusp_forms(k)
    if dim == 0:
        return []
    if N < dim + 1:
        raise ValueError(f"N = {N} too small for dim S_{k} = {dim}")
    e6 = _eisenstein(6, N)
    rows: list[list[int]] = []
    for j in range(1, dim + 1):
        r = k - 12 * j
        if r % 4 == 0:
            alpha, beta = r // 4, 0
        else:
            alpha, beta = (r - 6) // 4, 1
        assert alpha >= 0
        s = _series_mul(_delta_power(j, N), _e4_power(alpha, N), N)
        if beta:
            s = _series_mul(s, e6, N)
        rows.append(s)
    # rows[j-1] = q^j + ...; unit pivots make backward elimination integral
    for j in range(dim, 1, -1):
        for i in range(j - 1):
            c = rows[i][j]
            if c:
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[j - 1])]
    return [QExpansion(k, tuple(r)) for r in rows]


# ---------------------------------------------------------------------------
# Hecke eigenforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeckeEigenform:
    """Normalized eigenform: lam[n] = lambda_f(n) for 1 <= n <= truncation."""

    k: int
    index: int
    lam: np.ndarray
    basis_residual: float

    @property
    def truncation(self) -> int:
        return len(self.lam) - 1

    def lambda_of(self, n: int) -> float:
        if n > self.truncation:
            raise CoverageError(f"eigenvalues computed only to n = {self.truncation}")
        return float(self.lam[n])


@dataclass(frozen=True)
class EigenbasisReport:
    k: int
    dim: int
    conditioning: float
    residuals: tuple[float, ...]


def _hecke_matrix(basis: list[QExpansion], p: int, k: int, dim: int) -> list[list[int]]:
    # (T_p a)(n) = a(np) + p^{k-1} a(n/p); matrix entry = coeff of q^i in T_p g_j
    pk = p ** (k - 1)
    mat = [[0] * dim for _ in range(dim)]
    for j in range(dim):
        c = basis[j].coeffs
        for i in range(1, dim + 1):
            v = c[i * p]
            if i % p == 0:
                v += pk * c[i // p]
            mat[i - 1][j] = v
    return mat


def _balanced(mat: list[list[int]], p: int, k: int) -> np.ndarray:
    """Similarity-scaled T_p with O(1) entries and eigenvalues lambda_f(p)."""
    dim = len(mat)
    out = np.empty((dim, dim), dtype=np.float64)
    half = mp.mpf(k - 1) / 2
    with mp.workdps(40):
        pw = [mp.power(i, half) for i in range(1, dim + 1)]
        ppw = mp.power(p, half)
        for i in range(dim):
            for j in range(dim):
                out[i, j] = float(mp.mpf(mat[i][j]) * pw[j] / (pw[i] * ppw))
    return out


def hecke_eigenforms(
    k: int, N: int, gap_threshold: float = 1e-6
) -> tuple[list[HeckeEigenform], EigenbasisReport]:
    """Simultaneous Hecke eigenbasis of S_k with lambda(n) for n <= N.

    T_2 is diagonalized in double precision; eigenvectors are certified as
    simultaneous eigenvectors of T_3 and T_5 through the reported residuals.
    Forms are ordered by ascending lambda(2), ties broken by lambda(3).
    """
    if k % 2:
        raise ValueError("weight must be even")
    dim = dim_cusp_forms(k)
    if dim == 0:
        return [], EigenbasisReport(k=k, dim=0, conditioning=math.inf, residuals=())
    n_basis = max(N, 5 * dim + 2, 2 * dim + 2)
    basis = miller_basis(k, n_basis)
    t2 = _balanced(_hecke_matrix(basis, 2, k, dim), 2, k)
    t3 = _balanced(_hecke_matrix(basis, 3, k, dim), 3, k)
    t5 = _balanced(_hecke_matrix(basis, 5, k, dim), 5, k)

    vals, vecs = np.linalg.eig(t2)
    order = np.argsort(vals.real)
    gaps = np.diff(np.sort(vals.real))
    conditioning = float(gaps.min()) if dim > 1 else math.inf
    if conditioning < gap_threshold:
        # T_2 spectrum too close; a generic combination separates the forms
        vals_c, vecs_c = np.linalg.eig(t2 + t3 / 3.0)
        gaps_c = np.diff(np.sort(vals_c.real))
        if dim > 1 and float(gaps_c.min()) < gap_threshold:
            raise ConditioningError(
                f"k={k}: eigenvalue gaps {conditioning:.2e} even after T2+T3/3"
            )
        vecs = vecs_c
        order = np.argsort(vals_c.real)
    if np.abs(vecs.imag).max() > 1e-9:
        raise ConditioningError(f"k={k}: complex eigenvectors from real Hecke matrix")
    vecs = vecs.real

    forms = []
    residuals = []
    with mp.workdps(40):
        half = mp.mpf(k - 1) / 2
        for col in order:
            x = vecs[:, col]
            x = x / x[np.argmax(np.abs(x))]
            y = [mp.mpf(x[j]) * mp.power(j + 1, half) for j in range(dim)]
            a1 = y[0]  # echelon basis: a(1) = y_1
            if a1 == 0:
                raise ConditioningError(f"k={k}: eigenvector with vanishing a(1)")
            lam = np.empty(N + 1, dtype=np.float64)
            lam[0] = 0.0
            for n in range(1, N + 1):
                acc = mp.mpf(0)
                for j in range(dim):
                    c = basis[j].coeffs[n]
                    if c:
                        acc += y[j] * c
                lam[n] = float(acc / (a1 * mp.power(n, half)))
            lam2, lam3, lam5 = lam[2], lam[3], lam[5]
            res = 0.0
            for tm, lv in ((t3, lam3), (t5, lam5)):
                res = max(res, float(np.max(np.abs(tm @ x - lv * x))))
            lam.setflags(write=False)
            forms.append((lam2, lam3, lam, res))
            residuals.append(res)
    forms.sort(key=lambda f: (f[0], f[1]))
    out = [
        HeckeEigenform(k=k, index=i, lam=f[2], basis_residual=f[3])
        for i, f in enumerate(forms)
    ]
    report = EigenbasisReport(
        k=k,
        dim=dim,
        conditioning=conditioning,
        residuals=tuple(f[3] for f in forms),
    )
    return out, report


# ---------------------------------------------------------------------------
# L(s, f) by the incomplete-gamma identity
#   L(s) = sum lam(n) n^-s Q(a1, 2 pi n) + i^k X(s) sum lam(n) n^{s-1} Q(a2, 2 pi n)
#   a1 = s + (k-1)/2, a2 = 1 - s + (k-1)/2,
#   X(s) = (2 pi)^{2s-1} Gamma(a2)/Gamma(a1)
# ---------------------------------------------------------------------------


def _holo_afe_length(k: int, s: complex) -> int:
    amax = max(abs(s + (k - 1) / 2), abs(1 - s + (k - 1) / 2))
    z_need = amax + 12.0 * math.sqrt(amax) + 45.0
    return int(z_need / (2 * math.pi)) + 1


def l_value_holo(
    f: HeckeEigenform, s: complex, return_error: bool = False
):
    """L(s, f) inside the strip, via the incomplete-gamma identity.

    Raises:
        ForcedZeroError: s = 1/2 with k = 2 mod 4 (odd functional equation).
        CoverageError: the form carries too few eigenvalues for the tail.
    """
    from .numerics import regularized_gamma_q

    s = complex(s)
    k = f.k
    if k % 4 == 2 and s == 0.5:
        raise ForcedZeroError(
            f"k = {k} = 2 (mod 4): functional-equation sign -1 forces L(1/2, f) = 0"
        )
    n_max = _holo_afe_length(k, s)
    if n_max > f.truncation:
        raise CoverageError(
            f"need lambda(n) to n = {n_max}, form carries {f.truncation}"
        )
    root = 1.0 if k % 4 == 0 else -1.0
    a1 = s + (k - 1) / 2
    a2 = 1 - s + (k - 1) / 2
    n = np.arange(1, n_max + 1, dtype=np.float64)
    z = 2 * math.pi * n
    q1 = regularized_gamma_q(a1, z)
    q2 = regularized_gamma_q(a2, z)
    lam = f.lam[1 : n_max + 1]
    logn = np.log(n)
    xs = root * cmath.exp(
        (2 * s - 1) * math.log(2 * math.pi) + (loggamma(complex(a2)) - loggamma(complex(a1)))
    )
    first = np.dot(lam, np.exp(-s * logn) * q1)
    second = np.dot(lam, np.exp((s - 1) * logn) * q2)
    value = first + xs * second
    # tail estimate: divisor-bounded coefficients against the last-kept Q size
    dn = 16.0 * math.log(n_max + 2)
    est = dn * float(
        abs(q1[-1]) * n_max ** (-s.real) + abs(xs) * abs(q2[-1]) * n_max ** (s.real - 1)
    ) + 1e-15 * (1 + abs(xs)) * n_max
    if s.imag == 0.0:
        value = value.real
    if return_error:
        return value, est
    return value


def gamma_factor_holo(k: int, s: complex) -> complex:
    """(2 pi)^{-s} Gamma(s + (k-1)/2)."""
    s = complex(s)
    return cmath.exp(-s * math.log(2 * math.pi) + loggamma(s + (k - 1) / 2))


def completed_lambda_holo(f: HeckeEigenform, s: complex) -> complex:
    return gamma_factor_holo(f.k, s) * l_value_holo(f, s)


def lambda_mellin(f: HeckeEigenform, s: float, tol: float = 1e-11) -> float:
    """Oracle for Lambda(s, f) at real s: numerical Mellin integral.

    Lambda(s, f) = (2 pi)^{(k-1)/2} * integral_1^inf f(iy) (y^{w-1} + i^k y^{k-w-1}) dy,
    with w = s + (k-1)/2, evaluating f(iy) by direct q-expansion summation.
    """
    k = f.k
    w = s + (k - 1) / 2
    root = 1.0 if k % 4 == 0 else -1.0
    n_terms = min(f.truncation, 60)
    nn = np.arange(1, n_terms + 1, dtype=np.float64)
    cn = f.lam[1 : n_terms + 1] * np.exp((k - 1) / 2 * np.log(nn))

    def f_iy(y: float) -> float:
        return float(np.dot(cn, np.exp(-2 * math.pi * nn * y)))

    def integrand(y: float) -> float:
        return f_iy(y) * (y ** (w - 1) + root * y ** (k - w - 1))

    val, err = _quad(integrand, 1.0, np.inf, epsabs=1e-14, epsrel=tol, limit=200)
    scale = math.exp((k - 1) / 2 * math.log(2 * math.pi))
    return scale * val


# ---------------------------------------------------------------------------
# Zeros of Lambda(1/2 + it, f) through the theta-style integral
#   Lambda(1/2+it) = (2 pi)^{(k-1)/2} * integral over R of h(u) e^{itu} du,
#   h(u) = f(i e^u) e^{ku/2}, even for k = 0 mod 4 and odd for k = 2 mod 4.
# ---------------------------------------------------------------------------


class _ThetaZHolo:
    def __init__(self, f: HeckeEigenform, tmax: float):
        k = f.k
        tmax = max(tmax, 1.0)
        v = 0.0 if tmax <= 30.0 else max(0.0, min(math.pi / 2 - 0.1, math.pi / 2 - 24.0 / tmax))
        cosv = math.cos(v)
        hg = min(0.08, 2 * math.pi * (v + math.pi / 2) / (math.pi * tmax + 35.0))
        # u_max: solve 2 pi cos(v) e^u - (k/2+1) u = CUT + margin
        g = lambda u: 2 * math.pi * cosv * math.exp(u) - (k / 2 + 1) * u - _THETA_CUT - 8
        lo, hi = 0.0, 25.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if g(mid) < 0 else (lo, mid)
        u_max = hi
        m = int(u_max / hg) + 2
        half_k = (k - 1) / 2

        def n_cut(u: float) -> int:
            c = 2 * math.pi * math.exp(u) * cosv
            n_est = 2.0
            for _ in range(4):
                n_est = (_THETA_CUT + 6 + half_k * math.log(max(n_est, 2.0))) / c
            return max(1, int(n_est) + 1)

        top = n_cut(0.0)
        if top > f.truncation:
            raise CoverageError(f"zero scan needs lambda(n) to n = {top}")
        nn = np.arange(1, top + 1, dtype=np.float64)
        cn = f.lam[1 : top + 1] * np.exp(half_k * np.log(nn))
        rows = np.empty(m, dtype=np.complex128)
        eiv = cmath.exp(1j * v)
        for j in range(m):
            u = j * hg
            cut = min(top, n_cut(u))
            expo = (-2 * math.pi * math.exp(u) * eiv) * nn[:cut]
            rows[j] = np.dot(cn[:cut], np.exp(expo)) * cmath.exp(k * (u + 1j * v) / 2)
        self.k = k
        self.even = k % 4 == 0
        self.v = v
        self.hg = hg
        self.u = np.arange(1, m) * hg
        self.row0 = rows[0]
        self.rows = rows[1:m]
        self._ln_pref = math.log(2 * hg) + (k - 1) / 2 * math.log(2 * math.pi) \
            + 0.5 * math.log(2 * math.pi)

    def z(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        ph = np.exp(1j * np.outer(t, self.u))
        acc = ph @ self.rows
        if self.even:
            bracket = self.row0.real + 2.0 * acc.real
        else:
            bracket = self.row0.imag + 2.0 * acc.imag
        lg = loggamma(self.k / 2 + 1j * t).real
        out = np.sign(bracket) * np.exp(
            self._ln_pref - t * self.v - lg + np.log(np.maximum(np.abs(bracket), 1e-300))
        )
        return out


def smooth_zero_count_holo(k: int, T: float) -> float:
    """Smooth estimate of #{0 < gamma <= T} for L(s, f) of weight k."""
    a = k / 2
    phase = T * math.log(math.hypot(a, T)) - T + a * math.atan2(T, a) - T * math.log(2 * math.pi)
    return max(0.0, phase / math.pi)


def find_zeros_holo(
    f: HeckeEigenform, T: float, refine_tol: float = 1e-9, max_height: float = 400.0
) -> ZeroList:
    """Zeros 1/2 + i gamma, 0 < gamma <= T, of the completed L(s, f)."""
    from .errors import NumericLossError

    if T <= 0:
        raise ValueError("find_zeros_holo() requires T > 0")
    if T > max_height:
        raise NumericLossError(f"T = {T} beyond supported height {max_height}")
    provider = _ThetaZHolo(f, T)
    delta0 = math.pi / (2 * math.log(f.k * f.k * (T + 10.0)))
    return scan_zero_list(
        provider.z,
        T,
        delta0,
        smooth_zero_count_holo(f.k, T),
        f"k{f.k}.{f.index}",
        refine_tol,
    )

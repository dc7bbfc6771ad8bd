"""Floating-point kernels: Euler-Maclaurin Hurwitz zeta and incomplete gamma."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli, gammaincc, loggamma

from .errors import PrecisionError

_EPS = float(np.finfo(np.float64).eps)

# B_{2j}/(2j)! for j = 1..18
_B2F = np.array(
    [bernoulli(2 * j)[-1] / math.factorial(2 * j) for j in range(1, 19)]
)

_MAX_EM_TERMS = 1 << 14


def _em_tail_bound(s: complex, N: int, J: int) -> float:
    """Magnitude bound for the Euler-Maclaurin remainder after J Bernoulli terms."""
    # |B_{2J+2}/(2J+2)! * (s)_{2J+1} * (N+a)^{-s-2J-1}|, a in (0,1]
    lp = (loggamma(s + 2 * J + 1) - loggamma(s)).real
    lb = math.log(abs(bernoulli(2 * J + 2)[-1])) - math.lgamma(2 * J + 3)
    expo = lp + lb - (s.real + 2 * J + 1) * math.log(N)
    if expo > 600:
        return math.inf
    return 2.0 * math.exp(expo)


def hurwitz_zeta_em(
    s: complex, a: np.ndarray, eps: float = 1e-13, J: int = 14
) -> tuple[np.ndarray, float]:
    """Hurwitz zeta(s, a) on a vector of a in (0, 1], by Euler-Maclaurin.

    Valid for real or complex s with Re(s) > 0, s != 1.  Returns the values
    and a uniform truncation bound.

    Raises:
        PrecisionError: the tail bound cannot be pushed below eps.
    """
    s = complex(s)
    if s == 1:
        raise ValueError("Hurwitz zeta pole at s = 1")
    if s.real <= 0:
        raise ValueError("Euler-Maclaurin path implemented for Re(s) > 0 only")
    a = np.asarray(a, dtype=np.float64)
    N = max(24, int(0.35 * abs(s.imag)) + 16)
    while True:
        bound = _em_tail_bound(s, N, J)
        if bound < eps:
            break
        if N >= _MAX_EM_TERMS:
            raise PrecisionError(
                f"Euler-Maclaurin tail stuck at {bound:.2e} with N={N} for s={s}"
            )
        N *= 2

    real_s = s.imag == 0.0
    sv = s.real if real_s else s
    out = np.empty(a.shape, dtype=np.float64 if real_s else np.complex128)
    chunk = max(1, 4_000_000 // (N + 1))
    n = np.arange(N, dtype=np.float64)
    for i in range(0, a.size, chunk):
        av = a[i : i + chunk, None]
        base = n[None, :] + av
        if real_s:
            main = np.power(base, -sv).sum(axis=1)
        else:
            main = np.exp(-sv * np.log(base)).sum(axis=1)
        big = (N + a[i : i + chunk]).astype(np.float64)
        lb = np.log(big)
        if real_s:
            pw = np.power(big, -sv)
            tail = big * pw / (sv - 1.0) + 0.5 * pw
        else:
            pw = np.exp(-sv * lb)
            tail = big * pw / (sv - 1.0) + 0.5 * pw
        # Bernoulli correction terms: B_{2j}/(2j)! * (s)_{2j-1} * big^{-s-2j+1}
        poch = sv
        fac = pw * big  # big^{-s+1}
        inv2 = 1.0 / (big * big)
        for j in range(1, J + 1):
            fac = fac * inv2  # big^{-s-2j+1}
            tail = tail + _B2F[j - 1] * poch * fac
            poch = poch * (sv + 2 * j - 1) * (sv + 2 * j)
        out[i : i + chunk] = main + tail
    return out, bound


def dirichlet_l_hurwitz(
    s: complex, chi: np.ndarray, q: int, eps: float = 1e-13
) -> tuple[complex, float]:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q) for chi indexed 0..q.

    Returns (value, error bound).  chi entries in {-1, 0, 1}.
    """
    idx = np.flatnonzero(chi[1 : q + 1]) + 1
    avals = idx / q
    zet, zbound = hurwitz_zeta_em(s, avals, eps=eps)
    w = chi[idx].astype(np.float64)
    s = complex(s)
    qs = np.exp(-s * math.log(q))
    if s.imag == 0.0:
        qs = qs.real
    total = np.dot(w, zet)
    value = qs * total
    absq = abs(qs)
    est = absq * (idx.size * zbound + 16 * _EPS * float(np.abs(zet).sum()))
    return value, est


# ---------------------------------------------------------------------------
# Regularized incomplete gamma Q(a, z) = Gamma(a, z)/Gamma(a)
# ---------------------------------------------------------------------------


def _q_series(a: complex, z: np.ndarray) -> np.ndarray:
    """Q = 1 - P via the lower-gamma power series; use for z < |a| + 1."""
    out = np.ones(z.shape, dtype=np.complex128)
    pos = z > 0
    zp = z[pos]
    if zp.size:
        term = np.ones(zp.shape, dtype=np.complex128)
        total = np.ones(zp.shape, dtype=np.complex128)
        for j in range(1, 600):
            term = term * zp / (a + j)
            total = total + term
            if np.max(np.abs(term)) <= 1e-18 * (1.0 + np.max(np.abs(total))):
                break
        else:
            raise PrecisionError("incomplete-gamma series did not converge")
        lpref = a * np.log(zp) - zp - loggamma(a + 1)
        out[pos] = 1.0 - np.exp(lpref) * total
    return out


def _q_contfrac(a: complex, z: np.ndarray) -> np.ndarray:
    """Q via the continued fraction (modified Lentz); use for z >= |a| + 1."""
    tiny = 1e-290
    b = z + 1.0 - a
    c = np.full(z.shape, 1.0 / tiny, dtype=np.complex128)
    d = 1.0 / np.where(np.abs(b) < tiny, tiny, b)
    h = d.copy()
    for i in range(1, 2000):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.max(np.abs(delta - 1.0)) < 1e-15:
            break
    else:
        raise PrecisionError("incomplete-gamma continued fraction did not converge")
    lpref = a * np.log(z) - z - loggamma(a)
    return np.exp(lpref) * h


def regularized_gamma_q(a: complex, z) -> np.ndarray:
    """Q(a, z) vectorized over real z >= 0, for real or complex a.

    Real a > 0 dispatches to scipy; complex a uses a power series below
    z = |a| + 1 and a continued fraction above it.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    a = complex(a)
    if a.imag == 0.0 and a.real > 0:
        return gammaincc(a.real, z)
    out = np.empty(z.shape, dtype=np.complex128)
    cut = abs(a) + 1.0
    small = z < cut
    if small.any():
        out[small] = _q_series(a, z[small])
    if (~small).any():
        out[~small] = _q_contfrac(a, z[~small])
    return out

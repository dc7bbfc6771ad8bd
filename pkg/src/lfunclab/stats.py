"""Family statistics: normalization, Gaussian comparison, orthogonality, density.

Normalized statistics follow the family conventions: a +1/2 log log k mean
shift for weight-k forms, -1/2 log log D for quadratic characters, and a
sqrt(log log C) scale in both cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad as _quad

from .errors import CoverageError
from .quad import ZeroList

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Normalized samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedSample:
    family: str  # "quad" | "holo"
    statistic: str  # "P" | "A" | "B"
    values: np.ndarray
    loglog_scale: float
    mean_shift_sign: int
    sigma_offset: float
    x: float | None
    excluded: int = 0


def normalize(
    raw,
    family: str,
    statistic: str,
    scale: float,
    sigma_offset: float = 0.0,
    x: float | None = None,
    excluded: int = 0,
) -> NormalizedSample:
    """(value + sign * log log scale / 2) / sqrt(log log scale), per member.

    `raw` carries log |L| values (A, B) or unshifted prime-sum cores (P);
    already-normalized P values should not pass through here again.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        raise ValueError("normalize() requires a nonempty sample")
    if not np.all(np.isfinite(raw)):
        raise ValueError("normalize() requires finite raw values")
    if family not in ("quad", "holo"):
        raise ValueError(f"unknown family {family!r}")
    if statistic not in ("P", "A", "B"):
        raise ValueError(f"unknown statistic {statistic!r}")
    sign = 1 if family == "holo" else -1
    ll = math.log(math.log(scale))
    values = (raw + sign * 0.5 * ll) / math.sqrt(ll)
    values.setflags(write=False)
    return NormalizedSample(
        family=family,
        statistic=statistic,
        values=values,
        loglog_scale=ll,
        mean_shift_sign=sign,
        sigma_offset=sigma_offset,
        x=x,
        excluded=excluded,
    )


# ---------------------------------------------------------------------------
# Distribution report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionReport:
    moments: tuple[float, ...]  # m1 mean, m2 unbiased variance, central m3..m6
    ks: float
    bin_edges: np.ndarray
    counts: np.ndarray
    tail_freqs: dict[float, float]
    size: int


def _phi(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / _SQRT2))


def ks_to_normal(values: np.ndarray) -> float:
    """Two-sided Kolmogorov-Smirnov distance to the standard normal."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    n = v.size
    cdf = _phi(v)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def distribution_report(
    sample: NormalizedSample, thresholds=(0.5, 1.0, 1.5)
) -> DistributionReport:
    """Moments, KS distance to N(0,1), Freedman-Diaconis histogram, tails."""
    v = np.asarray(sample.values, dtype=np.float64)
    if v.size < 2:
        raise ValueError("distribution_report() requires sample size >= 2")
    mean = float(v.mean())
    c = v - mean
    m2 = float(np.dot(c, c) / (v.size - 1))
    moments = (mean, m2) + tuple(float(np.mean(c**k)) for k in (3, 4, 5, 6))
    counts, edges = np.histogram(v, bins="fd")
    tails = {float(a): float(np.mean(v > a)) for a in thresholds}
    return DistributionReport(
        moments=moments,
        ks=ks_to_normal(v),
        bin_edges=edges,
        counts=counts,
        tail_freqs=tails,
        size=int(v.size),
    )


# ---------------------------------------------------------------------------
# Moment prediction for the prime sums
# ---------------------------------------------------------------------------


def moment_prediction(m: int, x: float) -> float:
    """(2m)!/(2^m m!) * (log log x)^m, the Gaussian moment law for prime sums."""
    if m < 1:
        raise ValueError("moment_prediction() requires m >= 1")
    coeff = math.factorial(2 * m) // (2**m * math.factorial(m))
    return coeff * math.log(math.log(x)) ** m


# ---------------------------------------------------------------------------
# Orthogonality averages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthogonalityAverage:
    family: str
    argument: int
    empirical: float
    predicted: float

    @property
    def deviation(self) -> float:
        return self.empirical - self.predicted


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def orthogonality_average(
    family: str, values: np.ndarray, argument: int, table=None
) -> OrthogonalityAverage:
    """Family mean of lambda_f(m) or chi_8d(n) against its main-term prediction.

    Predictions: delta_{m=square}/sqrt(m) for forms; for characters,
    delta_{n=square} * prod over odd p | n of p/(p+1).
    """
    values = np.asarray(values, dtype=np.float64)
    emp = float(values.mean())
    if family == "holo":
        pred = 1.0 / math.sqrt(argument) if _is_square(argument) else 0.0
    elif family == "quad":
        if _is_square(argument):
            pred = 1.0
            m = argument
            p = 3
            while p * p <= m:
                if m % p == 0:
                    pred *= p / (p + 1)
                    while m % p == 0:
                        m //= p
                p += 2
            if m > 1 and m % 2 == 1:
                pred *= m / (m + 1)
            if argument % 2 == 0:
                pred = 0.0 if argument % 2 == 0 else pred  # chi(even) = 0
        else:
            pred = 0.0
    else:
        raise ValueError(f"unknown family {family!r}")
    return OrthogonalityAverage(
        family=family, argument=argument, empirical=emp, predicted=pred
    )


# ---------------------------------------------------------------------------
# One-level density against the symmetry-type predictions
# ---------------------------------------------------------------------------


def density_w(symmetry: str, x) -> np.ndarray | float:
    """W(Sp) = 1 - sin(2 pi x)/(2 pi x), W(SO_even) = 1 + the same sinc."""
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=np.float64)
    w = np.ones(x.shape)
    nz = x != 0
    t = 2 * math.pi * x[nz]
    snc = np.sin(t) / t
    sign = {"Sp": -1.0, "SO_even": 1.0}.get(symmetry)
    if sign is None:
        raise ValueError(f"unknown symmetry {symmetry!r}")
    w[nz] = 1.0 + sign * snc
    w[~nz] = 1.0 + sign * 1.0
    return float(w) if scalar else w


_TEST_FUNCTIONS = {
    # Fejer kernel: Fourier transform supported on [-1, 1]
    "fejer": {
        "fn": lambda x: np.where(
            x == 0.0, 1.0, (np.sin(math.pi * np.where(x == 0, 1, x)) /
                            (math.pi * np.where(x == 0, 1, x))) ** 2
        ),
        "envelope": lambda x: np.minimum(1.0, 1.0 / (math.pi * np.maximum(np.abs(x), 1e-12)) ** 2),
        "conforming": True,
    },
    # sensitivity check only: Gaussian-damped cosine, transform not compactly supported
    "gauss_cosine": {
        "fn": lambda x: np.exp(-0.5 * x * x) * np.cos(math.pi * x),
        "envelope": lambda x: np.exp(-0.5 * x * x),
        "conforming": False,
    },
}


def test_function(tag: str):
    try:
        return _TEST_FUNCTIONS[tag]
    except KeyError:
        raise ValueError(f"unknown test function {tag!r}") from None


def predicted_density_integral(symmetry: str, phi_tag: str) -> float:
    """integral of phi(x) W(x) dx over R, by adaptive quadrature."""
    phi = test_function(phi_tag)["fn"]

    def f(x):
        return float(phi(np.array([x]))[0] * density_w(symmetry, x))

    total = 0.0
    edges = [0.0, 1.0, 5.0, 20.0, 80.0, 400.0]
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = _quad(f, a, b, limit=400)
        total += val
    tail, _ = _quad(f, edges[-1], np.inf, limit=400)
    return 2.0 * (total + tail)


@dataclass(frozen=True)
class DensityTestResult:
    family: str
    phi_tag: str
    empirical: float
    predicted: float
    scaling: float
    members: int
    coverage_tail: float


def density_scaling(family: str, scale: float) -> float:
    """Ordinate rescaling: gamma * log(k)/pi for forms, gamma * log(D)/(2 pi)."""
    if family == "holo":
        return math.log(scale) / math.pi
    if family == "quad":
        return math.log(scale) / (2 * math.pi)
    raise ValueError(f"unknown family {family!r}")


def density_coverage_tail(
    family: str, scale: float, conductor: float, T: float, phi_tag: str
) -> float:
    """Estimated contribution of zeros above height T to one member's phi-sum.

    Uses the smooth zero density and the envelope of the test function; the
    pointwise envelope at the scaled argument must be negligible at T.
    """
    env = test_function(phi_tag)["envelope"]
    c = density_scaling(family, scale)
    ts = np.linspace(T, max(4 * T, T + 50), 2000)
    dens = np.log(np.maximum(conductor * ts / (2 * math.pi), math.e)) / math.pi
    vals = env(ts * c) * dens
    return float(np.trapezoid(vals, ts))


def one_level_density(
    zero_lists: list[ZeroList],
    family: str,
    scale: float,
    phi_tag: str = "fejer",
    conductor: float | None = None,
    coverage_budget: float = 0.02,
) -> DensityTestResult:
    """Family average of sum over zeros of phi(scaled gamma), +/- pairs both.

    Raises:
        CoverageError: estimated above-height tail exceeds the budget relative
            to the predicted integral.
    """
    if not zero_lists:
        raise ValueError("one_level_density() requires at least one zero list")
    phi = test_function(phi_tag)["fn"]
    symmetry = "SO_even" if family == "holo" else "Sp"
    predicted = predicted_density_integral(symmetry, phi_tag)
    c = density_scaling(family, scale)
    cond = conductor if conductor is not None else (8.0 * scale if family == "quad" else scale**2)
    t_min = min(zl.T for zl in zero_lists)
    tail = density_coverage_tail(family, scale, cond, t_min, phi_tag)
    if tail > coverage_budget * abs(predicted):
        raise CoverageError(
            f"zero lists reach T={t_min}, tail {tail:.2e} above "
            f"{coverage_budget:.0%} of predicted {predicted:.3f}"
        )
    totals = []
    for zl in zero_lists:
        g = zl.ordinates * c
        totals.append(float(np.sum(phi(g)) + np.sum(phi(-g))))
    return DensityTestResult(
        family=family,
        phi_tag=phi_tag,
        empirical=float(np.mean(totals)),
        predicted=predicted,
        scaling=c,
        members=len(zero_lists),
        coverage_tail=tail,
    )


# ---------------------------------------------------------------------------
# One-sided tail comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailCheck:
    threshold: float
    empirical: float
    gaussian: float

    @property
    def excess(self) -> float:
        return self.empirical - self.gaussian


def gaussian_tail(a: float) -> float:
    """P[N(0,1) > a]."""
    return 0.5 * math.erfc(a / _SQRT2)


def tail_bound_check(sample: NormalizedSample, thresholds=(0.5, 1.0)) -> list[TailCheck]:
    """Empirical frequency above each threshold against the Gaussian tail."""
    if sample.statistic not in ("A", "B"):
        raise ValueError("tail comparison applies to the A/B statistics")
    v = np.asarray(sample.values)
    return [
        TailCheck(
            threshold=float(a),
            empirical=float(np.mean(v > a)),
            gaussian=gaussian_tail(float(a)),
        )
        for a in thresholds
    ]

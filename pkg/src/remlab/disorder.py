"""Scaled disorder families: samplers, interval probabilities, rate functions.

A :class:`DisorderFamily` represents a sequence of laws ``lambda_N`` on the
real line that concentrates at 0 as ``N`` grows, together with the exponential
decay speed of its interval probabilities:

    -(1/N) * log lambda_N([a, b])  ->  inf_{x in [a, b]} rate(x).

Built-in families:

* ``gaussian``        : centered normal with variance 1/N, rate x^2/2.
* ``two_sided_exp``   : density (N/2) exp(-N|y|), rate |x|.
* ``weibull``         : two-sided tail P(|Y| > x) = exp(-N x^shape) for x >= 0,
                        rate |x|^shape.  With ``one_sided=True`` all mass sits
                        on [0, inf) and the rate is +inf for x < 0.  The tail
                        scaling convention is ours; shape=1 reproduces the
                        two-sided exponential rate.

Rate functions accept floats or numpy arrays.  Samplers draw from an explicit
``numpy.random.Generator`` so the module holds no hidden mutable state and
families can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DisorderValidationError

CONVEX = "convex"
UNIMODAL = "unimodal"

LOG2 = math.log(2.0)

#: Intervals probed when validating a user-supplied family, chosen to catch
#: rate/sampler mismatches on both signs and in a deeper tail.
DEFAULT_CHECK_INTERVALS = ((0.25, 0.75), (-0.75, -0.25), (1.0, 1.5))


@dataclass(frozen=True, eq=False)
class DisorderFamily:
    """A scaled distribution sequence with rate function and sampler.

    Attributes
    ----------
    kind : str
        One of ``gaussian``, ``two_sided_exp``, ``weibull``, ``custom``.
    params : dict
        Construction parameters (empty for the parameter-free families).
    convexity : str
        ``convex`` or ``unimodal``; unimodal rates still have interval
        sublevel sets, which is all downstream solvers rely on.
    rate : callable
        Vectorized map x -> [0, inf]; rate(0) = 0 for every valid family.
    """

    kind: str
    params: dict
    convexity: str
    rate: Callable[[np.ndarray | float], np.ndarray | float]
    _sample: Callable[[int, int, np.random.Generator], np.ndarray] = field(repr=False)
    _interval: Callable[[int, float, float], float] = field(repr=False)

    def sampler(self, N: int, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``count`` independent values from lambda_N using ``rng``."""
        if N < 1:
            raise DisorderValidationError("N must be a positive integer")
        return self._sample(N, count, rng)

    def interval_prob(self, N: int, lo: float, hi: float) -> float:
        """Probability lambda_N([lo, hi]); endpoints may be infinite."""
        if N < 1:
            raise DisorderValidationError("N must be a positive integer")
        if not lo <= hi:
            raise DisorderValidationError("interval endpoints must satisfy lo <= hi")
        p = self._interval(N, lo, hi)
        return min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Gaussian: variance 1/N


def _gauss_rate(x):
    return 0.5 * np.square(x)


def _gauss_sample(N, count, rng):
    return rng.standard_normal(count) / math.sqrt(N)


def _gauss_interval(N, lo, hi):
    s = math.sqrt(N)
    zlo, zhi = lo * s, hi * s
    if zlo >= 0.0:
        # work on the survival side to avoid 1 - 1 cancellation in the tail
        return float(ndtr(-zlo) - ndtr(-zhi))
    return float(ndtr(zhi) - ndtr(zlo))


def make_gaussian() -> DisorderFamily:
    """Centered Gaussian with variance 1/N; rate(x) = x^2/2."""
    return DisorderFamily(
        kind="gaussian",
        params={},
        convexity=CONVEX,
        rate=_gauss_rate,
        _sample=_gauss_sample,
        _interval=_gauss_interval,
    )


# ---------------------------------------------------------------------------
# Two-sided exponential: density (N/2) exp(-N |y|)


def _laplace_rate(x):
    return np.abs(x)


def _laplace_sample(N, count, rng):
    return rng.laplace(0.0, 1.0 / N, count)


def _laplace_interval(N, lo, hi):
    # Closed forms per sign pattern; expm1 keeps narrow intervals exact.
    if lo >= 0.0:
        return 0.5 * math.exp(-N * lo) * -math.expm1(-N * (hi - lo)) if hi > lo else 0.0
    if hi <= 0.0:
        return _laplace_interval(N, -hi, -lo)
    return -0.5 * math.expm1(N * lo) - 0.5 * math.expm1(-N * hi)


def make_two_sided_exp() -> DisorderFamily:
    """Two-sided exponential with density (N/2) exp(-N|y|); rate(x) = |x|."""
    return DisorderFamily(
        kind="two_sided_exp",
        params={},
        convexity=CONVEX,
        rate=_laplace_rate,
        _sample=_laplace_sample,
        _interval=_laplace_interval,
    )


# ---------------------------------------------------------------------------
# Weibull: two-sided tail exp(-N x^a), optionally restricted to [0, inf)


def _weibull_tail(N, a, x):
    """P(|Y| > x) = exp(-N x^a) for x >= 0 (one-sided: P(Y > x))."""
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return math.exp(-N * x**a)


def make_weibull(shape: float, one_sided: bool = False) -> DisorderFamily:
    """Weibull family with tail exp(-N x^shape); rate(x) = |x|^shape.

    shape >= 1 gives a convex rate; shape < 1 only a unimodal one, which is
    still admissible for everything downstream.  With ``one_sided=True`` the
    variable is non-negative and the rate is +inf on x < 0 (such families
    produce no low-temperature phase transition).
    """
    if not shape > 0:
        raise DisorderValidationError("weibull shape must be positive")
    a = float(shape)

    if one_sided:

        def rate(x, _a=a):
            x = np.asarray(x, dtype=float)
            r = np.where(x < 0, np.inf, np.abs(x) ** _a)
            return float(r) if r.ndim == 0 else r

        def sample(N, count, rng, _a=a):
            return rng.weibull(_a, count) * N ** (-1.0 / _a)

        def interval(N, lo, hi, _a=a):
            if hi < 0.0:
                return 0.0
            lo = max(lo, 0.0)
            glo, ghi = _weibull_tail(N, _a, lo), _weibull_tail(N, _a, hi)
            return glo - ghi

    else:

        def rate(x, _a=a):
            r = np.abs(x) ** _a
            return float(r) if np.ndim(r) == 0 else r

        def sample(N, count, rng, _a=a):
            mag = rng.weibull(_a, count) * N ** (-1.0 / _a)
            signs = 2.0 * rng.integers(0, 2, count) - 1.0
            return mag * signs

        def interval(N, lo, hi, _a=a):
            if lo >= 0.0:
                return 0.5 * (_weibull_tail(N, _a, lo) - _weibull_tail(N, _a, hi))
            if hi <= 0.0:
                return interval(N, -hi, -lo)
            return 1.0 - 0.5 * _weibull_tail(N, _a, -lo) - 0.5 * _weibull_tail(N, _a, hi)

    return DisorderFamily(
        kind="weibull",
        params={"shape": a, "one_sided": bool(one_sided)},
        convexity=CONVEX if a >= 1.0 else UNIMODAL,
        rate=rate,
        _sample=sample,
        _interval=interval,
    )


# ---------------------------------------------------------------------------
# Cramer rate for means of symmetric +-1 variables


def binary_mean_rate(y: float) -> float:
    """Rate function I0 for arithmetic means of symmetric +-1 variables.

    I0(y) = ((1+y)/2) log(1+y) + ((1-y)/2) log(1-y) on [-1, 1], with the
    endpoint values log 2 taken by continuity.  Outside [-1, 1] the rate is
    +inf; callers that want the extended value should catch the ValueError
    (or use :func:`scaled_binary_mean_rate`).
    """
    y = float(y)
    if abs(y) > 1.0:
        raise ValueError("binary mean rate is +inf outside [-1, 1]")
    if abs(y) == 1.0:
        return LOG2
    return 0.5 * ((1.0 + y) * math.log1p(y) + (1.0 - y) * math.log1p(-y))


def scaled_binary_mean_rate(p: float, y):
    """p * I0(y / p), vectorized, returning +inf where |y| > p."""
    if not 0.0 < p <= 1.0:
        raise ValueError("scale p must lie in (0, 1]")
    y = np.asarray(y, dtype=float)
    u = y / p
    out = np.full(y.shape, np.inf)
    inside = np.abs(u) <= 1.0
    ui = u[inside]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 0.5 * ((1.0 + ui) * np.log1p(ui) + (1.0 - ui) * np.log1p(-ui))
    vals = np.where(np.abs(ui) == 1.0, LOG2, vals)
    out[inside] = p * vals
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Empirical validation of the rate/lambda_N pairing


def empirical_rate_check(
    family: DisorderFamily,
    interval: tuple[float, float],
    N_list: Sequence[int],
) -> list[tuple[int, float]]:
    """Sequence of (N, -(1/N) log lambda_N(interval)) for increasing N.

    Converges to the infimum of the rate over the interval.  An interval
    probability that underflows to zero is reported as +inf.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise DisorderValidationError("interval must be nondegenerate")
    if list(N_list) != sorted(set(int(N) for N in N_list)):
        raise DisorderValidationError("N_list must be strictly increasing")
    out = []
    for N in N_list:
        p = family.interval_prob(int(N), lo, hi)
        out.append((int(N), math.inf if p <= 0.0 else -math.log(p) / N))
    return out


def _grid_infimum(rate, lo, hi, points=2001):
    xs = np.linspace(lo, hi, points)
    return float(np.min(rate(xs)))


def validate_family(
    family: DisorderFamily,
    check_intervals: Sequence[tuple[float, float]] = DEFAULT_CHECK_INTERVALS,
    check_N: int = 256,
) -> None:
    """Cross-check interval probabilities against the declared rate.

    Raises :class:`DisorderValidationError` when -(1/N) log lambda_N deviates
    from the grid infimum of the rate by more than a log(N)/N envelope.
    """
    r0 = float(np.asarray(family.rate(0.0)))
    if not abs(r0) <= 1e-9:
        raise DisorderValidationError("rate(0) must be 0 (family must concentrate at 0)")
    tol = 0.05 + 8.0 * math.log(check_N) / check_N
    for lo, hi in check_intervals:
        target = _grid_infimum(family.rate, lo, hi)
        (_, observed), = empirical_rate_check(family, (lo, hi), [check_N])
        if math.isinf(target):
            if not (math.isinf(observed) or observed > 10.0):
                raise DisorderValidationError(
                    f"interval [{lo}, {hi}]: rate claims no mass but observed decay {observed:.4f}"
                )
            continue
        if math.isinf(observed):
            if target * check_N < 700.0:  # genuine underflow is only possible deeper out
                raise DisorderValidationError(
                    f"interval [{lo}, {hi}]: interval_prob underflowed but rate infimum is {target:.4f}"
                )
            continue
        if abs(observed - target) > tol:
            raise DisorderValidationError(
                f"interval [{lo}, {hi}]: observed decay {observed:.4f} vs rate infimum "
                f"{target:.4f} (tolerance {tol:.4f})"
            )


def make_custom(
    rate: Callable,
    sampler: Callable[[int, int, np.random.Generator], np.ndarray],
    interval_prob: Callable[[int, float, float], float],
    convexity: str = CONVEX,
    params: dict | None = None,
    validate: bool = True,
    check_intervals: Sequence[tuple[float, float]] = DEFAULT_CHECK_INTERVALS,
) -> DisorderFamily:
    """Wrap user-supplied callables as a family, validating them by default.

    Validation runs :func:`validate_family` and rejects inconsistent input
    instead of trusting it.
    """
    if convexity not in (CONVEX, UNIMODAL):
        raise DisorderValidationError("convexity must be 'convex' or 'unimodal'")
    fam = DisorderFamily(
        kind="custom",
        params=dict(params or {}),
        convexity=convexity,
        rate=rate,
        _sample=sampler,
        _interval=interval_prob,
    )
    if validate:
        validate_family(fam, check_intervals)
    return fam


_BUILTIN_FACTORIES = {
    "gaussian": lambda params: make_gaussian(),
    "two_sided_exp": lambda params: make_two_sided_exp(),
    "weibull": lambda params: make_weibull(
        shape=params["shape"], one_sided=bool(params.get("one_sided", False))
    ),
}


def family_from_config(kind: str, params: dict | None = None) -> DisorderFamily:
    """Build a built-in family from its (kind, params) description."""
    params = params or {}
    try:
        factory = _BUILTIN_FACTORIES[kind]
    except KeyError:
        raise DisorderValidationError(
            f"unknown disorder family kind {kind!r} (custom families cannot be "
            "built from a document)"
        ) from None
    if kind == "weibull" and "shape" not in params:
        raise DisorderValidationError("weibull family requires a 'shape' parameter")
    return factory(params)

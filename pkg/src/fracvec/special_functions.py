"""Gamma, two-parameter Mittag-Leffler and Wright functions.

Gamma is a double-precision Lanczos approximation with reflection. The two
entire series are summed in arbitrary precision (``mpmath``) with the working
precision chosen from a double-precision envelope of the term magnitudes, so
that cancellation on the negative real axis (``E_{1,1}(-20) = exp(-20)``) does
not destroy the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath as mp
import numpy as np
from scipy import special as sps

from fracvec.errors import DomainError, PoleError

# {{{ gamma

_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
GAMMA_MAX_ARG = 171.6243769563027


def _sinpi(x: float) -> float:
    # reduce exactly to [-1, 1] before multiplying by pi
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    return math.sin(math.pi * r)


def _gamma_positive(x: float) -> float:
    # x >= 0.5
    x -= 1.0
    acc = _LANCZOS_P[0]
    for i in range(1, 9):
        acc += _LANCZOS_P[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    # split the power so t**(x + 0.5) does not overflow before exp(-t) scales it
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def gamma(x: float) -> float:
    """Gamma function for real ``x``.

    Raises :class:`PoleError` at non-positive integers and
    :class:`OverflowError` above ~171.6.
    """
    x = float(x)
    if math.isnan(x):
        return math.nan
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > GAMMA_MAX_ARG:
        raise OverflowError(f"Gamma({x}) overflows double precision")
    if x == math.floor(x) and x <= 23.0:
        return float(math.factorial(int(x) - 1))

    if x < 0.5:
        s = _sinpi(x)
        return math.pi / (s * _gamma_positive(1.0 - x))
    return _gamma_positive(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma, zero at the poles."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > GAMMA_MAX_ARG:
        return 0.0
    return 1.0 / gamma(x)


# }}}


# {{{ parameter types


@dataclass(frozen=True)
class MLParams:
    """Parameters of :math:`E_{\\alpha,\\beta}`."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"Mittag-Leffler alpha must be positive: {self.alpha}")


@dataclass(frozen=True)
class WrightParams:
    r"""Parameters of :math:`\phi(\rho, \mu; z)`."""

    rho: float
    mu: float

    def __post_init__(self) -> None:
        if not self.rho > -1:
            raise DomainError(f"Wright series diverges for rho <= -1: {self.rho}")
        if self.rho == 0:
            raise DomainError("rho = 0 is excluded")


class SeriesResult(NamedTuple):
    value: complex
    terms: int
    #: bound on the dropped tail plus accumulated rounding
    error_bound: float
    #: magnitude envelope of the first omitted term
    first_omitted: float
    dps: int


#: Largest |z| accepted by :func:`mittag_leffler`.
Z_MAX = 30.0

_MAX_TERMS = 200_000
_MAX_DPS = 6000
_LN10 = math.log(10.0)

# }}}


# {{{ series machinery


def _rational(x: float, max_den: int = 1000) -> Fraction | None:
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) <= 4 * np.finfo(float).eps * abs(x):
        return frac
    return None


def _log_rgamma_bound(s: float) -> float:
    """Upper bound of log|1/Gamma(s)|, smooth across the poles."""
    if s > 0:
        return -math.lgamma(s)
    # reflection: |1/Gamma(s)| = Gamma(1 - s) |sin(pi s)| / pi
    return math.lgamma(1.0 - s) - math.log(math.pi)


class _Series:
    """Coefficients ``c_k = 1 / (k!^w Gamma(a k + b))`` generated lazily.

    ``w`` is 0 for Mittag-Leffler and 1 for Wright.
    """

    def __init__(self, a: float, b: float, factorial: bool) -> None:
        self.a = a
        self.b = b
        self.factorial = factorial
        self.frac = _rational(a)
        # dps -> coefficient list; lists are replaced, never mutated
        self._cache: dict[int, list] = {}

    def log_envelope(self, k: int, logz: float) -> float:
        env = k * logz + _log_rgamma_bound(self.a * k + self.b)
        if self.factorial:
            env -= math.lgamma(k + 1.0)
        return env

    def coefficients(self, count: int, dps: int) -> list:
        hit = self._cache.get(dps)
        if hit is not None and len(hit) >= count:
            return hit
        out = self._generate(count, dps)
        self._cache[dps] = out
        return out

    def _generate(self, count: int, dps: int) -> list:
        with mp.workdps(dps):
            b = mp.mpf(self.b)
            if self.frac is None:
                a = mp.mpf(self.a)
                out = [mp.rgamma(a * k + b) for k in range(count)]
            else:
                p, q = self.frac.numerator, self.frac.denominator
                ak = lambda k: mp.mpf(p * k) / q + b  # noqa: E731
                out = [mp.rgamma(ak(k)) for k in range(min(q, count))]
                for k in range(q, count):
                    s = ak(k - q)
                    if p > 0:
                        # Gamma(s + p) = Gamma(s) * s (s+1) ... (s+p-1)
                        den = mp.mpf(1)
                        for i in range(p):
                            den *= s + i
                        out.append(out[k - q] / den)
                    else:
                        # Gamma(s - |p|) = Gamma(s) / ((s-1) ... (s-|p|))
                        num = mp.mpf(1)
                        for i in range(1, -p + 1):
                            num *= s - i
                        out.append(out[k - q] * num)

            if self.factorial:
                fk = mp.mpf(1)
                for k in range(count):
                    if k > 0:
                        fk /= k
                    out[k] = out[k] * fk
        return out


@lru_cache(maxsize=128)
def _series(a: float, b: float, factorial: bool) -> _Series:
    return _Series(a, b, factorial)


def _plan(series: _Series, absz: float) -> tuple[int, float]:
    """Index of the envelope peak and the peak log-magnitude."""
    if absz == 0.0:
        return 0, series.log_envelope(0, 0.0)
    logz = math.log(absz)
    best_k, best = 0, series.log_envelope(0, logz)
    k = 1
    while k < _MAX_TERMS:
        env = series.log_envelope(k, logz)
        if env > best:
            best_k, best = k, env
        elif env < best - 50.0 and k > 2 * best_k + 8:
            break
        k += 1
    return best_k, best


_LN2 = math.log(2.0)
# log of a magnitude safely below the smallest subnormal double
_LOG_UNDERFLOW = -330.0 * math.log(10.0)


def _logabs(x) -> float:
    # cheap upper estimate of log|x| that never leaves double range
    return -math.inf if x == 0 else float(mp.mag(x)) * _LN2


def _sum_series(series: _Series, z: complex | float, rel_tol: float = 1e-17) -> SeriesResult:
    iscomplex = isinstance(z, complex)
    absz = abs(z)
    if absz == 0.0:
        c0 = series.coefficients(1, 30)[0]
        return SeriesResult(complex(c0) if iscomplex else float(c0), 1, 0.0, 0.0, 30)

    logz = math.log(absz)
    k_peak, env_peak = _plan(series, absz)
    # first pass assumes |sum| is not far below min(1, peak term)
    dps = int(max(0.0, env_peak) / _LN10) + 22 + int(math.log10(k_peak + 10))

    while True:
        if dps > _MAX_DPS:
            raise DomainError(
                f"series for |z|={absz:g} needs more than {_MAX_DPS} digits; argument too large"
            )
        coeffs = series.coefficients(2 * k_peak + 16, dps)
        log_noise = env_peak - dps * _LN10
        with mp.workdps(dps):
            zz = mp.mpc(z) if iscomplex else mp.mpf(z)
            total = mp.mpf(0)
            zk = mp.mpf(1)
            k = 0
            while True:
                if k >= len(coeffs):
                    if k >= _MAX_TERMS:
                        raise DomainError(f"series did not converge within {_MAX_TERMS} terms")
                    coeffs = series.coefficients(2 * len(coeffs), dps)
                total += zk * coeffs[k]
                zk *= zz
                k += 1
                if k > k_peak:
                    env = series.log_envelope(k, logz)
                    env_next = series.log_envelope(k + 1, logz)
                    floor = max(_logabs(total), log_noise)
                    if env_next < env and env < floor + math.log(rel_tol):
                        break

            logmag = _logabs(total)
            log_noise += math.log(k)
            ratio = math.exp(min(0.0, env_next - env))
            first = math.exp(env) if env > -7.0e2 else 0.0
            tail = first / (1.0 - ratio) if ratio < 1.0 else math.inf

            if logmag > log_noise + 20 * _LN10:
                rounding = math.exp(min(log_noise, 700.0))
                value = complex(total) if iscomplex else float(total)
                return SeriesResult(value, k, tail + rounding, first, dps)

            if logmag <= log_noise + _LN10:
                # pure rounding noise: the true value is below ~exp(log_noise)
                if log_noise < _LOG_UNDERFLOW:
                    bound = math.exp(max(log_noise, -745.0))
                    return SeriesResult(0j if iscomplex else 0.0, k, tail + bound, first, dps)
                needed = int((env_peak - _LOG_UNDERFLOW) / _LN10) + 22
                dps = max(2 * dps, min(needed, _MAX_DPS))
            else:
                needed = int((env_peak - logmag) / _LN10) + 22 + int(math.log10(k + 10))
                dps = max(needed, dps + 10)


# largest tolerated ratio of the biggest term to |sum| on the double path
_FAST_CANCELLATION = 1.0e3
_FAST_MAX_TERMS = 4000


def _fast_sum(series: _Series, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized double-precision sum; returns ``(values, accepted)``.

    Points whose largest term exceeds ``|sum|`` by more than
    ``_FAST_CANCELLATION`` are marked as not accepted.
    """
    absz = np.abs(z)
    zmax = float(np.max(absz)) if z.size else 0.0
    accepted = np.zeros(z.shape, dtype=bool)
    values = np.zeros(z.shape, dtype=z.dtype)
    if z.size == 0:
        return values, accepted
    if zmax == 0.0:
        values[...] = sps.rgamma(series.b)
        return values, ~accepted

    k_peak, env_peak = _plan(series, zmax)
    if env_peak > 600.0:
        return values, accepted

    logz = math.log(zmax)
    nterms = k_peak + 1
    while series.log_envelope(nterms, logz) > env_peak + math.log(1e-18) or (
        series.log_envelope(nterms + 1, logz) >= series.log_envelope(nterms, logz)
    ):
        nterms += 1
        if nterms > _FAST_MAX_TERMS:
            return values, accepted

    k = np.arange(nterms, dtype=np.float64)
    s = series.a * k + series.b
    logc = -sps.gammaln(s)
    if series.factorial:
        logc -= sps.gammaln(k + 1.0)
    sign = sps.gammasgn(s)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logabs = np.log(absz)[..., None] * k + logc
        logabs[..., 0] = logc[0]
        mag = np.where(sign != 0, np.exp(logabs), 0.0)
        if np.iscomplexobj(z):
            terms = mag * sign * np.exp(1j * np.angle(z)[..., None] * k)
        else:
            zsign = np.sign(z)[..., None]
            terms = mag * sign * np.where(k % 2 == 1, zsign, 1.0)
        total = terms.sum(axis=-1)
        biggest = np.max(mag, axis=-1)

        accepted = np.isfinite(total) & (biggest <= _FAST_CANCELLATION * np.abs(total))
    values[...] = np.where(accepted, total, 0)
    return values, accepted


def _evaluate(series: _Series, z, slow):
    """Evaluate at scalar or array *z*, falling back to *slow* per point."""
    scalar = np.ndim(z) == 0
    arr = np.asarray(z)
    iscomplex = np.iscomplexobj(arr)
    arr = arr.astype(complex if iscomplex else np.float64)

    values, accepted = _fast_sum(series, arr.ravel())
    for i in np.flatnonzero(~accepted):
        values[i] = slow(complex(arr.flat[i]) if iscomplex else float(arr.flat[i]))
    values = values.reshape(arr.shape)

    if scalar:
        return complex(values[()]) if iscomplex else float(values[()])
    return values


# }}}


# {{{ public functions


def _as_ml(p) -> MLParams:
    if isinstance(p, MLParams):
        return p
    return MLParams(*p)


def _as_wright(p) -> WrightParams:
    if isinstance(p, WrightParams):
        return p
    return WrightParams(*p)


def mittag_leffler_series(p: MLParams, z: complex | float) -> SeriesResult:
    """Sum :math:`\\sum_k z^k / \\Gamma(\\alpha k + \\beta)` and report the error bound."""
    p = _as_ml(p)
    if isinstance(z, (int, np.integer, np.floating)):
        z = float(z)
    elif isinstance(z, np.complexfloating):
        z = complex(z)
    if not abs(z) <= Z_MAX:
        raise DomainError(f"|z| = {abs(z):g} exceeds the supported cap Z_MAX = {Z_MAX}")
    return _sum_series(_series(float(p.alpha), float(p.beta), False), z)


def mittag_leffler(p: MLParams, z):
    """Two-parameter Mittag-Leffler function :math:`E_{\\alpha,\\beta}(z)`.

    ``z`` may be a scalar or an array; real input gives real output.
    Arguments with ``|z| > Z_MAX`` raise :class:`~fracvec.errors.DomainError`.
    """
    p = _as_ml(p)
    if np.any(np.abs(z) > Z_MAX):
        raise DomainError(f"|z| exceeds the supported cap Z_MAX = {Z_MAX}")
    return _evaluate(
        _series(float(p.alpha), float(p.beta), False),
        z,
        lambda s: mittag_leffler_series(p, s).value,
    )


def wright_series(p: WrightParams, z: float) -> SeriesResult:
    p = _as_wright(p)
    return _sum_series(_series(float(p.rho), float(p.mu), True), float(z))


def wright(p: WrightParams, z):
    r"""Wright function :math:`\phi(\rho,\mu;z) = \sum_k z^k / (k!\,\Gamma(\rho k+\mu))`."""
    p = _as_wright(p)
    if np.iscomplexobj(z):
        raise DomainError("wright is implemented for real arguments only")
    return _evaluate(
        _series(float(p.rho), float(p.mu), True), z, lambda s: wright_series(p, s).value
    )


# }}}

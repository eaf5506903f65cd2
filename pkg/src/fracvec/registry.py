"""Named analytic test functions with closed-form fractional operators.

1-D function keys::

    poly:c0,c1,...    c0 + c1 x + c2 x^2 + ...
    sin, cos, exp     the elementary functions of x
    ml:beta           E_beta(x^beta), defined for x >= 0
    x                 alias of poly:0,1

Every function knows its RL integral and Caputo derivative with lower limit
``a``, written in terms of ``s = x - a``. The trigonometric and exponential
closed forms use Mittag-Leffler functions, e.g.
``I^mu cos(s) = s^mu E_{2,1+mu}(-s^2)``.

3-D scalar fields are products of per-axis functions, ``"fx|fy|fz"``, where a
missing or ``1`` factor means the constant one and ``0`` means the zero
field. Vector fields join three components with ``;``. The aliases ``x``,
``y``, ``z`` denote the coordinate functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracvec.errors import RegistryError, UnsupportedExponentError
from fracvec.special_functions import gamma, mittag_leffler

# {{{ 1-D functions


class Function1D:
    """Base class: ``f(x)`` with closed-form operators about a lower limit ``a``."""

    key: str = ""

    def __call__(self, x):
        raise NotImplementedError

    def rl_integral(self, x, mu: float, a: float = 0.0):
        """:math:`{}_aI^\\mu_x f` for ``mu >= 0`` (``mu = 0`` is ``f`` itself)."""
        raise NotImplementedError

    def derivative(self, n: int) -> Function1D:
        raise NotImplementedError

    def caputo(self, x, alpha: float, a: float = 0.0):
        """:math:`{}^C_aD^\\alpha_x f = {}_aI^{n-\\alpha} f^{(n)}`."""
        n = math.ceil(alpha)
        return self.derivative(n).rl_integral(x, n - alpha, a)


def _s(x, a: float) -> np.ndarray:
    s = np.asarray(x, dtype=np.float64) - a
    if np.any(s < 0):
        raise ValueError("closed forms need x >= a")
    return s


def _pow(s: np.ndarray, p: float) -> np.ndarray:
    if p == 0:
        return np.ones_like(s)
    return s**p


@dataclass(frozen=True)
class Polynomial(Function1D):
    coefficients: tuple[float, ...]

    @property
    def key(self) -> str:  # type: ignore[override]
        return "poly:" + ",".join(repr(float(c)) for c in self.coefficients)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64), self.coefficients)

    def shifted(self, a: float) -> np.ndarray:
        """Coefficients ``d_k`` with ``p(a + s) = sum_k d_k s^k``."""
        c = np.asarray(self.coefficients, dtype=np.float64)
        d = np.zeros_like(c)
        for i, ci in enumerate(c):
            for k in range(i + 1):
                d[k] += ci * math.comb(i, k) * a ** (i - k)
        return d

    def derivative(self, n: int) -> Polynomial:
        c = np.polynomial.polynomial.polyder(np.asarray(self.coefficients, dtype=np.float64), n)
        return Polynomial(tuple(float(v) for v in np.atleast_1d(c)))

    def rl_integral(self, x, mu: float, a: float = 0.0):
        s = _s(x, a)
        out = np.zeros_like(s)
        for k, dk in enumerate(self.shifted(a)):
            if dk != 0:
                out += dk * math.factorial(k) / gamma(k + mu + 1.0) * _pow(s, k + mu)
        return out

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coefficients)
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class Trig(Function1D):
    """``A cos(x) + B sin(x)``."""

    cos_coef: float = 0.0
    sin_coef: float = 1.0

    @property
    def key(self) -> str:  # type: ignore[override]
        if (self.cos_coef, self.sin_coef) == (0.0, 1.0):
            return "sin"
        if (self.cos_coef, self.sin_coef) == (1.0, 0.0):
            return "cos"
        return f"trig:{self.cos_coef!r},{self.sin_coef!r}"

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.cos_coef * np.cos(x) + self.sin_coef * np.sin(x)

    def derivative(self, n: int) -> Trig:
        A, B = self.cos_coef, self.sin_coef
        for _ in range(n):
            A, B = B, -A
        return Trig(A, B)

    def rl_integral(self, x, mu: float, a: float = 0.0):
        s = _s(x, a)
        # expand about a: A cos(a+s) + B sin(a+s) = P cos s + Q sin s
        ca, sa = math.cos(a), math.sin(a)
        P = self.cos_coef * ca + self.sin_coef * sa
        Q = self.sin_coef * ca - self.cos_coef * sa

        z = -(s**2)
        out = np.zeros_like(s)
        if P != 0:
            out += P * _pow(s, mu) * mittag_leffler((2.0, 1.0 + mu), z)
        if Q != 0:
            out += Q * _pow(s, 1.0 + mu) * mittag_leffler((2.0, 2.0 + mu), z)
        return out


@dataclass(frozen=True)
class Exp(Function1D):
    """``scale * exp(x)``."""

    scale: float = 1.0

    @property
    def key(self) -> str:  # type: ignore[override]
        return "exp" if self.scale == 1.0 else f"exp*{self.scale!r}"

    def __call__(self, x):
        return self.scale * np.exp(np.asarray(x, dtype=np.float64))

    def derivative(self, n: int) -> Exp:
        return self

    def rl_integral(self, x, mu: float, a: float = 0.0):
        s = _s(x, a)
        return self.scale * math.exp(a) * _pow(s, mu) * mittag_leffler((1.0, 1.0 + mu), s)


@dataclass(frozen=True)
class MittagLefflerPower(Function1D):
    """``E_beta(x^beta)``, the Caputo fixed point of order ``beta`` on ``[0, b]``."""

    beta: float = 0.5

    @property
    def key(self) -> str:  # type: ignore[override]
        return f"ml:{self.beta!r}"

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return mittag_leffler((self.beta, 1.0), np.maximum(x, 0.0) ** self.beta)

    def _check(self, a: float) -> None:
        if a != 0.0:
            raise ValueError("closed forms of ml:beta are available for a = 0 only")

    def derivative(self, n: int) -> Function1D:
        raise UnsupportedExponentError("E_beta(x^beta) is not classically differentiable at 0")

    def rl_integral(self, x, mu: float, a: float = 0.0):
        self._check(a)
        s = _s(x, a)
        return _pow(s, mu) * mittag_leffler((self.beta, 1.0 + mu), s**self.beta)

    def caputo(self, x, alpha: float, a: float = 0.0):
        self._check(a)
        if alpha > 1:
            raise UnsupportedExponentError("ml:beta supports Caputo orders <= 1 only")
        s = _s(x, a)
        b = self.beta
        with np.errstate(divide="ignore"):
            return _pow(s, b - alpha) * mittag_leffler((b, b + 1.0 - alpha), s**b)


ONE = Polynomial((1.0,))
ZERO = Polynomial((0.0,))


@lru_cache(maxsize=256)
def parse_function(key: str) -> Function1D:
    """Parse a 1-D registry key such as ``"poly:0,1"``, ``"sin"`` or ``"ml:0.5"``."""
    text = key.strip()
    try:
        if text in ("", "1"):
            return ONE
        if text == "0":
            return ZERO
        if text == "x":
            return Polynomial((0.0, 1.0))
        if text == "sin":
            return Trig(0.0, 1.0)
        if text == "cos":
            return Trig(1.0, 0.0)
        if text == "exp":
            return Exp()
        if text.startswith("poly:"):
            coeffs = tuple(float(c) for c in text[5:].split(","))
            if not coeffs:
                raise ValueError("empty coefficient list")
            return Polynomial(coeffs)
        if text.startswith("ml:"):
            return MittagLefflerPower(float(text[3:]))
    except ValueError as exc:
        raise RegistryError(f"malformed function key {key!r}: {exc}") from exc

    raise RegistryError(f"unknown function key {key!r}")


#: Keys exercised by default in tests and experiments.
FUNCTION_KEYS = ("x", "poly:0,0,1", "poly:1,-2,0,1", "sin", "cos", "exp", "ml:0.5")

# }}}


# {{{ 3-D fields

_AXIS_ALIASES = {"x": "x|1|1", "y": "1|x|1", "z": "1|1|x"}


@dataclass(frozen=True)
class ScalarFieldSpec:
    """Separable scalar field ``fx(x) fy(y) fz(z)``; ``factors is None`` is zero."""

    factors: tuple[Function1D, Function1D, Function1D] | None

    @property
    def is_zero(self) -> bool:
        return self.factors is None

    def __call__(self, x, y, z):
        x, y, z = np.broadcast_arrays(
            *(np.asarray(v, dtype=np.float64) for v in (x, y, z))
        )
        if self.factors is None:
            return np.zeros_like(x)
        fx, fy, fz = self.factors
        return fx(x) * fy(y) * fz(z)

    def sample(self, axes: tuple[np.ndarray, np.ndarray, np.ndarray]) -> np.ndarray:
        """Values on the tensor grid built from three 1-D node arrays."""
        shape = tuple(len(ax) for ax in axes)
        if self.factors is None:
            return np.zeros(shape)
        parts = [np.broadcast_to(f(ax), ax.shape) for f, ax in zip(self.factors, axes)]
        return np.einsum("i,j,k->ijk", *parts)


def parse_scalar_field(key: str) -> ScalarFieldSpec:
    text = _AXIS_ALIASES.get(key.strip(), key.strip())
    parts = text.split("|")
    if len(parts) > 3:
        raise RegistryError(f"scalar field key has more than three factors: {key!r}")
    parts += ["1"] * (3 - len(parts))
    if any(p.strip() == "0" for p in parts):
        return ScalarFieldSpec(None)
    return ScalarFieldSpec(tuple(parse_function(p) for p in parts))  # type: ignore[arg-type]


@dataclass(frozen=True)
class VectorFieldSpec:
    components: tuple[ScalarFieldSpec, ScalarFieldSpec, ScalarFieldSpec]


def parse_vector_field(key: str) -> VectorFieldSpec:
    """Parse ``"Fx;Fy;Fz"``; missing trailing components are zero."""
    parts = key.split(";")
    if len(parts) > 3:
        raise RegistryError(f"vector field key has more than three components: {key!r}")
    parts += ["0"] * (3 - len(parts))
    return VectorFieldSpec(tuple(parse_scalar_field(p) for p in parts))  # type: ignore[arg-type]


#: Vector fields used by the identity and theorem suites.
VECTOR_FIELD_KEYS = (
    "x;0;0",
    "y;0;0",
    "0;poly:0,0,1;0",
    "sin|cos;exp|1|poly:0,1;cos|1|sin",
    "poly:1,0,1|poly:0,1;sin|1|exp;x|x",
)

#: Scalar fields used by the gradient identity suite.
SCALAR_FIELD_KEYS = ("x", "poly:0,0,1|poly:1,1", "sin|exp|cos", "exp|poly:0,1,1|sin")

# }}}

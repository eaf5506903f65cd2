"""Frozen reference values and independent closed forms.

Constants were computed once with 40-digit mpmath series and are stored as
literals; nothing here imports fracvec.
"""

from __future__ import annotations

import math

import numpy as np

# {{{ special functions

#: (alpha, beta, z, E_{alpha,beta}(z))
MITTAG_LEFFLER = (
    (0.5, 1.0, -1j, 0.3678794411714423215955 - 0.6071577058413937291150j),
    (0.5, 1.0, 1.0, 5.008980080762283466310),
    (0.5, 1.0, -1.0, 0.4275835761558070044108),
    (2.0, 1.0, -4.0, -0.4161468365471423869976),
    (0.8, 0.9, 2.5, 32.48026858165978889426),
    (0.7, 1.3, -3 + 2j, 0.1601466411328973204479 + 0.1038844953409918240898j),
)

#: (rho, mu, z, phi(rho, mu; z))
WRIGHT = (
    (-0.5, 0.5, -1.0, 0.4393912894677223970469),
    (1.0, 1.0, 1.0, 2.279585302336067267437),
    (-0.4, 0.6, -1.5, 0.2856884926272520724742),
    (-0.3, 0.7, -2.0, 0.1684003062267831219791),
)

GAMMA = (
    (0.7, 1.298055332647557856010),
    (-1.5, 2.363271801207354703064),
    (10.3, 716430.6890623764066254),
)

# }}}


# {{{ fractional calculus of powers


def rl_power(beta: float, alpha: float, x):
    """``I^alpha x^beta`` with lower limit 0."""
    return math.gamma(beta + 1) / math.gamma(beta + alpha + 1) * np.asarray(x, float) ** (beta + alpha)


def caputo_power(beta: float, alpha: float, x):
    """Caputo ``D^alpha x^beta`` for integer ``beta >= 0`` or ``beta > ceil(alpha) - 1``."""
    n = math.ceil(alpha)
    x = np.asarray(x, float)
    if beta == int(beta) and beta < n:
        return np.zeros_like(x)
    return math.gamma(beta + 1) / math.gamma(beta + 1 - alpha) * x ** (beta - alpha)


#: (D^0.7)^2 x at x = 0.5, i.e. 0.5^-0.4 / Gamma(0.6)
CAPUTO_TWICE_07_AT_HALF = 0.8860561232606501345933

#: |Grad(x x) - 2 x Grad x| at x = 1 for alpha = 0.5: 2 (1/Gamma(1.5) - 1/Gamma(2.5))
LEIBNIZ_GAP_HALF = 0.7522527780636750492641

#: outward flux of (x, 0, 0) through the unit cube for alpha = 0.5: (1/Gamma(1.5))^2
GAUSS_HALF = 4.0 / math.pi


def elementary_xy(alpha: float) -> float:
    """RL double integral of ``x y`` over ``0 <= y <= x <= 1`` at the far corner.

    Inner integral ``x * x^(alpha+1) / Gamma(alpha+2)``; the outer one applies
    the power rule to ``x^(alpha+2)`` at ``x = 1``.
    """
    return math.gamma(alpha + 3) / (math.gamma(2 * alpha + 3) * math.gamma(alpha + 2))


# }}}

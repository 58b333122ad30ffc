"""Logarithmic potential, degenerate mobility and their epsilon-regularization.

The regularized pair (mu_eps, f_eps) is defined through

    mu_eps = max(mu + eps, eps),   f_eps'' = (1 + 2 a) / mu_eps,
    f_eps'(1/2) = 0,  f_eps(1/2) = -ln 2,   a = (sqrt(1 + 4 eps) - 1) / 2,

so that mu_eps * f_eps'' = 1 + 2a identically. On [0, 1] the mobility factors
as (s + a)(1 + a - s) because a (1 + a) = eps. Outside [0, 1] the mobility is
the constant eps and f_eps' continues linearly with slope (1 + 2a) / eps.

Note: the source displays label the third branch of mu_eps and f_eps'' as
"s > 0"; the branch point is s = 1 (the middle branch covers [0, 1]).

All evaluators accept scalars or numpy arrays and never clamp their input.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import xlogy

from ._backend import kernels
from .errors import DomainError

LN2 = math.log(2.0)


def _check_open_unit(s):
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0) or np.any(s >= 1.0):
        raise DomainError("logarithmic potential needs 0 < s < 1")
    return s


def _unwrap(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def log_potential(s):
    """Return ``(f, f', f'')`` of f(s) = s ln s + (1 - s) ln(1 - s)."""
    s = _check_open_unit(s)
    f = s * np.log(s) + (1.0 - s) * np.log1p(-s)
    fp = np.log(s) - np.log1p(-s)
    fpp = 1.0 / (s * (1.0 - s))
    return _unwrap(f), _unwrap(fp), _unwrap(fpp)


def mobility(s):
    """Degenerate mobility s(1 - s), defined on all reals."""
    s = np.asarray(s, dtype=float)
    return _unwrap(s * (1.0 - s))


def epsilon_offset(epsilon):
    """a_eps = (sqrt(1 + 4 eps) - 1) / 2, evaluated without cancellation."""
    # algebraically equal form: 2 eps / (sqrt(1 + 4 eps) + 1)
    return 2.0 * epsilon / (math.sqrt(1.0 + 4.0 * epsilon) + 1.0)


@dataclass(frozen=True)
class EpsilonFamily:
    """Closed-form bundle (a_eps, mu_eps, f_eps', f_eps'', f_eps) for one eps >= 0."""

    epsilon: float
    a_eps: float = field(init=False)
    one_plus_2a: float = field(init=False)
    f_eps_at_half: float = field(init=False, default=-LN2)

    def __post_init__(self):
        eps = float(self.epsilon)
        if not eps >= 0.0 or not math.isfinite(eps):
            raise DomainError(f"epsilon must be a finite nonnegative number, got {self.epsilon!r}")
        a = epsilon_offset(eps)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "a_eps", a)
        object.__setattr__(self, "one_plus_2a", 1.0 + 2.0 * a)

    @property
    def degenerate(self):
        return self.epsilon == 0.0

    @property
    def outer_slope(self):
        """Constant value of f_eps'' outside [0, 1]."""
        if self.degenerate:
            return math.inf
        return self.one_plus_2a / self.epsilon

    def mobility(self, s):
        return mobility_eps(self, s)

    def f_prime(self, s):
        return f_prime_eps(self, s)

    def f_second(self, s):
        return f_second_eps(self, s)

    def f(self, s):
        return f_eps(self, s)


def make_epsilon_family(epsilon):
    return EpsilonFamily(epsilon)


def mobility_eps(family, s):
    return _unwrap(kernels.mobility_eps(np.asarray(s, dtype=float), family.a_eps, family.epsilon))


def f_prime_eps(family, s):
    if family.degenerate:
        return log_potential(s)[1]
    return _unwrap(kernels.f_prime_eps(np.asarray(s, dtype=float), family.a_eps, family.epsilon))


def f_second_eps(family, s):
    if family.degenerate:
        return log_potential(s)[2]
    s = np.asarray(s, dtype=float)
    a = family.a_eps
    inside = family.one_plus_2a / ((a + s) * (a + (1.0 - s)))
    return _unwrap(np.where((s < 0.0) | (s > 1.0), family.outer_slope, inside))


def _log_antiderivative(s, a):
    # d/ds [(a+s) ln(a+s) + (1+a-s) ln(1+a-s)] = ln((a+s)/(1+a-s))
    p, q = a + s, a + (1.0 - s)
    return xlogy(p, p) + xlogy(q, q)


def f_eps(family, s):
    """f_eps, normalized by f_eps(1/2) = -ln 2; quadratic continuation outside [0, 1]."""
    if family.degenerate:
        return log_potential(s)[0]
    s = np.asarray(s, dtype=float)
    a = family.a_eps
    shift = -LN2 - _log_antiderivative(0.5, a)
    inside = _log_antiderivative(np.clip(s, 0.0, 1.0), a) + shift
    at_zero = _log_antiderivative(0.0, a) + shift
    slope_zero = math.log(a / (1.0 + a))
    c = family.outer_slope
    below = at_zero + slope_zero * s + 0.5 * c * s * s
    t = s - 1.0
    above = at_zero - slope_zero * t + 0.5 * c * t * t  # f_eps(1) = f_eps(0) by symmetry
    out = np.where(s < 0.0, below, inside)
    return _unwrap(np.where(s > 1.0, above, out))

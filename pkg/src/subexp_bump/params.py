"""Decay targets and the bump parameters that realise them.

A target decay ``exp(-C k**delta)`` is realised by the two-parameter bump
``phi_{A,B}`` with ``delta = A/(A+1)``; ``B`` sets the decay constant.
"""

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class DecaySpec:
    delta: float
    bigC: float
    epsilon: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not (self.bigC > 0.0) or not math.isfinite(self.bigC):
            raise DomainError(f"C must be a positive finite number, got {self.bigC!r}")
        if not (0.0 < self.epsilon < 1.0):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")


@dataclass(frozen=True)
class BumpParams:
    A: float
    B: float
    alpha: float
    beta: float
    saddle: complex
    delta_eff: float

    @classmethod
    def from_AB(cls, A, B):
        alpha, beta = alpha_beta(A, B)
        return cls(float(A), float(B), alpha, beta, saddle_point(A, B), A / (A + 1.0))

    def to_dict(self):
        return {
            "A": self.A,
            "B": self.B,
            "alpha": self.alpha,
            "beta": self.beta,
            "saddle": {"re": self.saddle.real, "im": self.saddle.imag},
            "delta_eff": self.delta_eff,
        }


def _check_positive(A, B):
    if not (A > 0.0 and B > 0.0) or not (math.isfinite(A) and math.isfinite(B)):
        raise DomainError(f"A and B must be positive and finite, got A={A!r}, B={B!r}")


def _angle(A):
    return math.pi / (2.0 * A + 2.0)


def alpha_beta(A, B):
    """Phase and decay constants of the leading-order transform asymptotics."""
    _check_positive(A, B)
    radius = (A * B) ** (1.0 / (A + 1.0))
    amp = radius * (1.0 + 1.0 / A)
    theta = _angle(A)
    return amp * math.cos(theta), amp * math.sin(theta)


def saddle_point(A, B):
    """Critical point of ``g(z) = i z - B z**(-A)`` on the principal branch."""
    _check_positive(A, B)
    radius = (A * B) ** (1.0 / (A + 1.0))
    theta = _angle(A)
    return complex(radius * math.cos(theta), radius * math.sin(theta))


def g_prime(A, B, z):
    return 1j + A * B * complex(z) ** (-A - 1.0)


def g_second(A, B, z):
    return -A * (A + 1.0) * B * complex(z) ** (-A - 2.0)


def resolve_params(spec):
    """Invert a :class:`DecaySpec` into bump parameters.

    The transform of ``phi_{A,B}(2x)`` decays like ``exp(-beta (pi k)**delta)``
    so ``beta = C / (2 pi**delta)`` makes its square decay like
    ``exp(-C k**delta)``.
    """
    if not isinstance(spec, DecaySpec):
        spec = DecaySpec(*spec)
    A = spec.delta / (1.0 - spec.delta)
    beta_target = spec.bigC / (2.0 * math.pi**spec.delta)
    base = beta_target / ((1.0 + 1.0 / A) * math.sin(_angle(A)))
    B = base ** (A + 1.0) / A
    return BumpParams.from_AB(A, B)

"""The bump ``phi_{A,B}``, its complex continuation and its self-convolution."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import BumpParams
from .quadrature import integrate

CONV_EPSREL = 1e-12
CONV_ABS_FLOOR = 1e-280


def _log_phi(params, ax):
    # ax = |x| restricted to [0, 1)
    return -params.B * (np.exp(-params.A * np.log1p(-ax)) + np.exp(-params.A * np.log1p(ax)))


def eval_phi(params, x):
    """``phi_{A,B}(x)``; exactly zero for ``|x| >= 1``, NaN propagates."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inside = ax < 1.0
    out = np.where(np.isnan(x), np.nan, 0.0)
    if inside.any():
        with np.errstate(over="ignore", under="ignore"):
            out[inside] = np.exp(_log_phi(params, ax[inside]))
    return out if out.ndim else float(out)


def log_phi_complex(params, z):
    """Principal-branch logarithm of the analytic continuation of ``phi_{A,B}``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.real) >= 1.0) or np.any(z.imag > 0.0):
        raise DomainError("complex evaluation requires |Re z| < 1 and Im z <= 0")
    A, B = params.A, params.B
    return -B * (np.exp(-A * np.log1p(-z)) + np.exp(-A * np.log1p(z)))


def eval_phi_complex(params, z):
    with np.errstate(under="ignore"):
        out = np.exp(log_phi_complex(params, z))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BumpFunction:
    """``phi_{A,B}(scale * x)``, supported in ``|x| < 1/scale``."""

    params: BumpParams
    scale: float = 1.0

    @property
    def radius(self):
        return 1.0 / self.scale

    def __call__(self, x):
        return eval_phi(self.params, self.scale * np.asarray(x, dtype=float))

    def conv(self, x):
        return conv_phi(self.params, self.scale, x)


def conv_phi(params, scale, x):
    """Self-convolution of ``phi_{A,B}(scale * .)`` evaluated at ``x``.

    Vectorised: all ``x`` are integrated together over the support of the
    first factor, each with its own relative tolerance.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.abs(np.atleast_1d(x))
    out = np.zeros_like(xs)
    r = 1.0 / scale
    live = np.flatnonzero(xs < 2.0 * r)
    if live.size:
        xl = xs[live]
        # overlap of [-r, r] and [x - r, x + r] for x >= 0
        lo = xl - r
        width = 2.0 * r - xl

        def integrand(t):
            y = lo[None, :] + t[:, None] * width[None, :]
            return eval_phi(params, scale * y) * eval_phi(params, scale * (xl[None, :] - y)) * width[None, :]

        res = integrate(integrand, 0.0, 1.0, epsrel=CONV_EPSREL, epsabs=CONV_ABS_FLOOR,
                        initial_panels=4)
        out[live] = res.value
    return float(out[0]) if scalar else out

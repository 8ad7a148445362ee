"""Leading-order large-k behaviour of the bump transform and its phase zeros.

The leading term is

    c * cos(kt - alpha kt**delta - offset) * exp(-beta kt**delta) / kt**p

with ``kt = 2 pi k``, ``delta = A/(A+1)`` and ``p = (A+2)/(2A+2)``. The
constant phase ``offset = pi/4 + pi/(4(A+1))`` is the argument of the
Gaussian factor at the saddle (half the angle of the steepest-descent
direction plus pi/4). Without it the cosine is out of step with the true
transform by a fixed angle, so it is part of the model by default; pass
``phase_offset=0.0`` for the bare cosine.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InsufficientSamples
from .params import BumpParams

FIT_COS_THRESHOLD = 0.3
MIN_FIT_SAMPLES = 30


def steepest_descent_phase(A):
    return math.pi / 4.0 + math.pi / (4.0 * (A + 1.0))


def leading_constant(params):
    """Analytic amplitude of the leading term (limit of the fitted constant)."""
    A, B = params.A, params.B
    radius = abs(params.saddle)
    return 2.0 * math.sqrt(2.0 * math.pi * radius / (A + 1.0)) * math.exp(-B * 2.0 ** (-A))


@dataclass(frozen=True)
class AsymptoticModel:
    params: BumpParams
    phase_offset: float = field(default=None)

    def __post_init__(self):
        if self.phase_offset is None:
            object.__setattr__(self, "phase_offset", steepest_descent_phase(self.params.A))

    @property
    def delta(self):
        return self.params.A / (self.params.A + 1.0)

    @property
    def prefactor_exponent(self):
        A = self.params.A
        return (A + 2.0) / (2.0 * A + 2.0)

    def phase(self, kt):
        kt = np.asarray(kt, dtype=float)
        return kt - self.params.alpha * kt**self.delta - self.phase_offset

    def scaled_phase(self, kt):
        """Phase of the transform of ``phi_{A,B}(2x)``, as a function of ``kt = 2 pi k``."""
        kt = np.asarray(kt, dtype=float)
        return kt / 2.0 - self.params.alpha * (kt / 2.0) ** self.delta - self.phase_offset

    def envelope(self, kt):
        kt = np.asarray(kt, dtype=float)
        return np.exp(-self.params.beta * kt**self.delta) / kt**self.prefactor_exponent


def asymptotic_value(model, k):
    """Leading-order shape of the transform at frequency ``k``, with unit constant."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("asymptotic form needs k > 0")
    kt = 2.0 * np.pi * k
    out = np.cos(model.phase(kt)) * model.envelope(kt)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FitResult:
    c: float
    residual: float
    ratio_cv: float
    samples: int


def fit_constant(numeric, model, window):
    """Least-squares constant ``c`` with ``numeric ~ c * asymptotic`` on ``window``.

    Samples where ``|cos(phase)| <= 0.3`` are dropped. ``residual`` is the RMS
    of ``(numeric - c*asym) / (c*asym)`` over the kept samples; ``ratio_cv`` is
    the coefficient of variation of ``numeric/asym``.
    """
    lo, hi = window
    ks = np.array([r.k for r in numeric], dtype=float)
    vals = np.array([r.value for r in numeric], dtype=float)
    keep = (ks >= lo) & (ks <= hi) & (ks > 0)
    ks, vals = ks[keep], vals[keep]
    kt = 2.0 * np.pi * ks
    keep = np.abs(np.cos(model.phase(kt))) > FIT_COS_THRESHOLD
    if keep.sum() < MIN_FIT_SAMPLES:
        raise InsufficientSamples(
            f"{int(keep.sum())} samples survive the phase filter, need {MIN_FIT_SAMPLES}")
    ks, vals = ks[keep], vals[keep]
    asym = asymptotic_value(model, ks)
    c = float(np.dot(vals, asym) / np.dot(asym, asym))
    rel = (vals - c * asym) / (c * asym)
    ratio = vals / asym
    return FitResult(c, float(np.sqrt(np.mean(rel**2))),
                     float(np.std(ratio) / abs(np.mean(ratio))), int(ks.size))


def _phase_fn(model, scaled):
    return model.scaled_phase if scaled else model.phase


def _phase_slope(model, scaled, kt):
    a, d = model.params.alpha, model.delta
    if scaled:
        return 0.5 - a * d * 0.5**d * kt ** (d - 1.0)
    return 1.0 - a * d * kt ** (d - 1.0)


def _level_crossings(model, scaled, krange, fn):
    """Roots of ``fn(phase(kt))`` for ``kt`` in ``2 pi * krange``."""
    k0, k1 = krange
    if not (0 < k0 < k1):
        raise DomainError("range must satisfy 0 < kmin < kmax")
    a, b = 2.0 * np.pi * k0, 2.0 * np.pi * k1
    phase = _phase_fn(model, scaled)
    # phase slope is monotone in kt, so its extreme sits at an endpoint
    slope = max(abs(_phase_slope(model, scaled, a)),
                abs(_phase_slope(model, scaled, b)))
    n = int(math.ceil((b - a) * slope / (np.pi / 8.0))) + 2
    grid = np.linspace(a, b, n)
    g = lambda t: fn(phase(t))
    vals = g(grid)
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-12, rtol=4 * np.finfo(float).eps))
    roots.extend(grid[vals == 0.0])
    return np.array(sorted(roots))


def phase_zeros(model, scaled, krange):
    """Zeros of the asymptotic cosine for frequencies in ``krange``.

    The zeros are returned in the phase variable ``kt = 2 pi k``, where their
    spacing tends to ``pi`` (bump phase) or ``2 pi`` (phase of the scaled bump).
    """
    return _level_crossings(model, scaled, krange, np.cos)


def subset_tildeZ(model, krange, scaled=True):
    """Maximal intervals (in ``kt``) on which ``cos(phase)**2 <= 1/4``.

    Only intervals lying entirely inside the range are returned, each as a
    ``(left, right)`` pair.
    """
    edges = _level_crossings(model, scaled, krange,
                             lambda p: np.cos(p) ** 2 - 0.25)
    phase = _phase_fn(model, scaled)
    intervals = []
    for left, right in zip(edges[:-1], edges[1:]):
        if np.cos(phase(0.5 * (left + right))) ** 2 <= 0.25:
            intervals.append((float(left), float(right)))
    return intervals

"""Numerical checks of the properties of the constructed function.

Each check is a plain function returning measured quantities, so that it can
be run on synthetic input as well as on pipeline artifacts.
:func:`full_report` runs all of them with default windows and collects the
results in a :class:`VerificationReport`; failures are recorded, not raised.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .asymptotics import AsymptoticModel, phase_zeros, subset_tildeZ
from .errors import WindowTooSmall
from .quadrature import integrate

UNDERFLOW_FLOOR = 1e-250
MIN_WINDOW_NODES = 20
_FD8 = np.array([4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0])


@dataclass(frozen=True)
class Thresholds:
    monotone_rel: float = 1e-14
    sign_rel: float = 1e-14
    support_margin: float = 0.05
    support_max: float = 1e-6
    identity_rtol: float = 1e-5
    identity_k: tuple = (1.0, 5.0, 20.0)
    bracket_rel: float = 1e-12
    fd_step: float = 0.01
    fhat_deriv_rtol: float = 1e-6
    psi_floor: float = 1e-200
    zero_window: tuple = (480.0, 500.0)
    zero_spacing_rtol: float = 0.02
    tildeZ_rtol: float = 0.03
    envelope_levels: tuple = (40.0, 80.0)   # default window: C k**delta in this range


def check_monotone(fn, rel=1e-14):
    """Count of increases larger than ``rel * value(0)``, and the worst one relative to ``value(0)``."""
    v = np.asarray(fn.values, dtype=float)
    v0 = abs(v[0])
    inc = np.diff(v)
    bad = inc > rel * v0
    worst = float(inc[bad].max() / v0) if bad.any() else 0.0
    return int(bad.sum()), worst


def _window_data(fn, spec, window):
    lo, hi = window
    k = np.asarray(fn.nodes, dtype=float)
    v = np.asarray(fn.values, dtype=float)
    keep = (k >= lo) & (k <= hi) & (v > UNDERFLOW_FLOOR)
    if keep.sum() < MIN_WINDOW_NODES:
        raise WindowTooSmall(f"{int(keep.sum())} usable nodes in {window}, need {MIN_WINDOW_NODES}")
    return k[keep] ** spec.delta, -np.log(v[keep])


def check_envelope(fn, spec, window):
    """Regression slope of ``-log(value)`` against ``k**delta`` and whether it is within the band."""
    s, y = _window_data(fn, spec, window)
    slope = float(np.polyfit(s, y, 1)[0])
    C, eps = spec.bigC, spec.epsilon
    return slope, bool((1.0 - eps) * C <= slope <= (1.0 + eps) * C)


def _hull(s, y, lower):
    # monotone chain over points sorted by s
    sign = 1.0 if lower else -1.0
    hull = []
    for p in zip(s, y):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            if sign * cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


def envelope_hull_slopes(fn, spec, window):
    """Slopes of the upper and lower envelopes of ``fn`` in the ``-log`` vs ``k**delta`` plane.

    The upper envelope of ``fn`` is the lower convex hull of ``-log(fn)``; its
    fitted slope is the decay rate that bounds ``fn`` from above. The lower
    envelope uses the upper hull. Returns ``(upper, lower)``.
    """
    s, y = _window_data(fn, spec, window)
    out = []
    for lower in (True, False):
        h = _hull(s, y, lower)
        out.append(float(np.polyfit(h[:, 0], h[:, 1], 1)[0]))
    return tuple(out)


def check_support(fSpace, margin=0.05):
    """Largest ``|value|`` at ``|x| >= 1 + margin`` relative to the largest overall."""
    x = np.asarray(fSpace.nodes, dtype=float)
    v = np.abs(np.asarray(fSpace.values, dtype=float))
    peak = v.max()
    if peak == 0.0:
        return 0.0
    outside = np.abs(x) >= 1.0 + margin
    return float(v[outside].max() / peak) if outside.any() else 0.0


def count_sign_violations(fn, rel=1e-14, sign=1.0, skip_origin=False):
    """Nodes where ``sign * value`` is below ``-rel * max|value|``."""
    v = sign * np.asarray(fn.values, dtype=float)
    if skip_origin:
        v = v[np.asarray(fn.nodes) != 0.0]
    scale = np.abs(fn.values).max()
    return int(np.sum(v < -rel * scale))


def central_difference(fn, k, h):
    """Eighth-order central difference of a vectorised ``fn`` at the points ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    steps = h * np.arange(1, 5)
    plus = np.asarray(fn((k[:, None] + steps).ravel())).reshape(len(k), 4)
    minus = np.asarray(fn((k[:, None] - steps).ravel())).reshape(len(k), 4)
    return (plus - minus) @ _FD8 / h


@dataclass(frozen=True)
class IdentityCheck:
    residual: float
    bracket_min: float
    bracket_ok: bool
    fd: tuple
    integral: tuple


def identity_integral(fhat, k, epsrel=1e-12):
    """``int_0^inf (fhat(kappa-k) - fhat(kappa+k)) psi_hat(kappa) dkappa`` and the bracket minimum.

    ``fhat`` is a table exposing ``f_hat``, ``psi_hat`` and ``support_end``.
    """
    lowest = [np.inf]

    def integrand(kappa):
        bracket = fhat.f_hat(kappa - k) - fhat.f_hat(kappa + k)
        lowest[0] = min(lowest[0], float(bracket.min()))
        return bracket * fhat.psi_hat(kappa)

    end = fhat.support_end
    bps = np.concatenate([[k], k + 4.0 ** np.arange(-1, 8), 4.0 ** np.arange(-1, 8)])
    res = integrate(integrand, 0.0, end, epsrel=epsrel, epsabs=1e-300, breakpoints=bps,
                    initial_panels=4)
    return float(res.value[0]), lowest[0]


def check_derivative_identity(artifacts, k_samples=(1.0, 5.0, 20.0), h=0.01, big_F=None,
                              bracket_rel=1e-12):
    """Compare a finite-difference ``dF_hat/dk`` with the bracket-integral identity.

    ``big_F`` overrides the evaluator of ``F_hat`` (default: the pipeline's
    convolution). The residual is the largest relative deviation; at ``k = 0``
    both sides vanish and the absolute deviation relative to ``F_hat(0)`` is used.
    """
    table = artifacts.table
    big_F = big_F or artifacts.big_F_hat_at
    fd = central_difference(big_F, k_samples, h)
    f0 = float(table.f_hat(0.0))
    F0 = float(np.asarray(big_F(np.array([0.0])))[0])
    integrals, residual, bmin = [], 0.0, np.inf
    for k, d in zip(k_samples, fd):
        val, low = identity_integral(table, float(k))
        integrals.append(val)
        bmin = min(bmin, low)
        scale = abs(val) if k != 0 else F0
        residual = max(residual, abs(d - val) / max(scale, 1e-300))
    return IdentityCheck(float(residual), float(bmin), bool(bmin >= -bracket_rel * f0),
                         tuple(float(x) for x in fd), tuple(integrals))


def check_fhat_derivative(fhat_eval, psiHat, h=0.01, floor=1e-200):
    """Largest relative deviation of a finite-difference ``d fhat/dk`` from sampled ``psi_hat``.

    Only nodes with ``|psi_hat| > floor`` and ``k >= 4h`` enter.
    """
    k = np.asarray(psiHat.nodes, dtype=float)
    psi = np.asarray(psiHat.values, dtype=float)
    keep = (np.abs(psi) > floor) & (k >= 4.0 * h)
    if not keep.any():
        return 0.0
    fd = central_difference(fhat_eval, k[keep], h)
    return float(np.max(np.abs(fd - psi[keep]) / np.abs(psi[keep])))


def zero_spacing_error(model, krange):
    """Worst relative deviation of scaled-bump zero spacings from ``2 pi``."""
    z = phase_zeros(model, True, krange)
    if len(z) < 2:
        return math.inf
    return float(np.max(np.abs(np.diff(z) - 2.0 * np.pi)) / (2.0 * np.pi))


def tildeZ_length_error(model, krange):
    """Worst relative deviation of the near-zero interval lengths from ``2 pi / 3``."""
    iv = subset_tildeZ(model, krange)
    if not iv:
        return math.inf
    lengths = np.array([b - a for a, b in iv])
    target = 2.0 * np.pi / 3.0
    return float(np.max(np.abs(lengths - target)) / target)


def laplace_growth_slope(fn, spec, window, rate=None):
    """Log-log slope of ``fn(k) * exp(rate * k**delta)`` over ``window`` (default rate ``C``).

    A slope of order one means the compensated function changes at most
    polynomially, i.e. ``rate`` is the exact exponential order of ``fn``.
    """
    rate = spec.bigC if rate is None else rate
    s, y = _window_data(fn, spec, window)
    k = s ** (1.0 / spec.delta)
    return float(np.polyfit(np.log(k), -y + rate * s, 1)[0])


def default_envelope_window(spec, levels=(40.0, 80.0)):
    return tuple((lev / spec.bigC) ** (1.0 / spec.delta) for lev in levels)


@dataclass
class VerificationReport:
    monotone_violations: dict
    envelope_slope: float
    envelope_slope_upper: float
    envelope_slope_lower: float
    envelope_window: tuple
    support_leakage: dict
    sign_violations: int
    derivative_identity_residual: float
    bracket_min: float
    fhat_derivative_residual: float
    zero_spacing_error: float
    tildeZ_length_error: float
    passed: dict
    thresholds: dict = field(default_factory=dict)

    @property
    def all_passed(self):
        return all(self.passed.values())

    _KEYS = {
        "monotone_violations": "monotoneViolations",
        "envelope_slope": "envelopeSlope",
        "envelope_slope_upper": "envelopeSlopeUpper",
        "envelope_slope_lower": "envelopeSlopeLower",
        "envelope_window": "envelopeWindow",
        "support_leakage": "supportLeakage",
        "sign_violations": "signViolations",
        "derivative_identity_residual": "derivativeIdentityResidual",
        "bracket_min": "bracketMin",
        "fhat_derivative_residual": "fhatDerivativeResidual",
        "zero_spacing_error": "zeroSpacingError",
        "tildeZ_length_error": "tildeZLengthError",
        "passed": "passed",
        "thresholds": "thresholds",
    }

    def to_dict(self):
        d = {self._KEYS[k]: v for k, v in asdict(self).items()}
        d["envelopeWindow"] = list(self.envelope_window)
        d["allPassed"] = self.all_passed
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d):
        inv = {v: k for k, v in cls._KEYS.items()}
        kw = {inv[k]: v for k, v in d.items() if k in inv}
        kw["envelope_window"] = tuple(kw["envelope_window"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def full_report(artifacts, spec, thresholds=None):
    """Run every check on ``artifacts`` and collect a :class:`VerificationReport`."""
    th = thresholds or Thresholds()
    C, eps = spec.bigC, spec.epsilon
    passed = {}

    mono = {}
    for name, fn in (("fHat", artifacts.fHat), ("bigFHat", artifacts.bigFHat)):
        count, worst = check_monotone(fn, th.monotone_rel)
        mono[name] = {"count": count, "worst": worst}
    passed["monotone"] = all(m["count"] == 0 for m in mono.values())

    window = default_envelope_window(spec, th.envelope_levels)
    try:
        slope, ok = check_envelope(artifacts.bigFHat, spec, window)
        upper, lower = envelope_hull_slopes(artifacts.bigFHat, spec, window)
    except WindowTooSmall:
        slope = upper = lower = math.nan
        ok = False
    passed["envelope"] = bool(ok)
    passed["envelopeTwoSided"] = bool(upper >= (1.0 - eps) * C and lower <= (1.0 + eps) * C)

    leak = {"f": check_support(artifacts.fSpace, th.support_margin),
            "F": check_support(artifacts.bigFSpace, th.support_margin)}
    passed["support"] = max(leak.values()) <= th.support_max

    signs = (count_sign_violations(artifacts.bigFSpace, 0.0)
             + count_sign_violations(artifacts.fHat, th.sign_rel)
             + count_sign_violations(artifacts.bigFHat, th.sign_rel)
             + count_sign_violations(artifacts.psiHat, th.sign_rel, sign=-1.0))
    passed["sign"] = signs == 0

    ident = check_derivative_identity(artifacts, th.identity_k, th.fd_step,
                                      bracket_rel=th.bracket_rel)
    passed["derivativeIdentity"] = ident.residual <= th.identity_rtol and ident.bracket_ok

    fder = check_fhat_derivative(artifacts.table.f_hat, artifacts.psiHat, th.fd_step,
                                 th.psi_floor)
    passed["fhatDerivative"] = fder <= th.fhat_deriv_rtol

    model = AsymptoticModel(artifacts.params)
    zs = zero_spacing_error(model, th.zero_window)
    tz = tildeZ_length_error(model, th.zero_window)
    passed["zeroSpacing"] = zs <= th.zero_spacing_rtol
    passed["tildeZ"] = tz <= th.tildeZ_rtol

    echo = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(th).items()}
    echo.update(epsilon=eps, envelopeBand=[(1.0 - eps) * C, (1.0 + eps) * C])
    return VerificationReport(mono, slope, upper, lower, window, leak, signs, ident.residual,
                              ident.bracket_min, fder, zs, tz, passed, echo)

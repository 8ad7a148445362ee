"""From the bump to the nonnegative function with monotone transform.

With ``phi(x) = phi_{A,B}(2x)``:

* ``psi_hat(k) = -2 pi k phi_hat(k)**2`` (odd, nonpositive for k >= 0),
* ``f_hat(k) = int_k^inf 2 pi t phi_hat(t)**2 dt`` (even, nonincreasing),
  ``I = f_hat(0)``,
* ``F_hat = f_hat * f_hat`` (convolution), the transform of ``F = f**2``.

``f_hat`` is evaluated as a tail integral of a nonnegative integrand rather
than as ``I`` minus a running integral, so it keeps full relative accuracy
deep into the decay.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.optimize import brentq

from .errors import DomainError, TailNotNegligible
from .fourier import (BAND, KGrid, build_k_grid, inverse_ft, stretched_exp_tail,
                      transform_many)
from .interp import local_interp
from .params import BumpParams, DecaySpec, resolve_params
from .quadrature import integrate

log = logging.getLogger(__name__)

CONV_EPSREL = 1e-13
TAIL_REL = 1e-16
_LOG_1E17 = math.log(1e17)


class Parity(str, Enum):
    EVEN = "Even"
    ODD = "Odd"
    NONE = "None"


class Domain(str, Enum):
    SPACE = "Space"
    FREQUENCY = "Frequency"


@dataclass(frozen=True)
class GridConfig:
    linear_dk: float = 0.05
    linear_max: float = 20.0
    geo_ratio: float = 1.02
    kmax: float = None              # None: envelope of f_hat**2 reaches f2_floor
    f2_floor: float = 1e-260
    panel_width: float = 2.0
    cheb_nodes: int = 32
    kmax_cap: float = 5e4
    x_max: float = 1.5
    x_nodes: int = 3001
    space_cutoff_rel: float = 1e-10
    inverse_degree: int = 11
    band: tuple = BAND

    def __post_init__(self):
        if self.linear_dk <= 0 or self.geo_ratio <= 1.0 or self.panel_width <= 0:
            raise DomainError("grid spacing controls must be positive (ratio > 1)")
        if self.kmax is not None and self.kmax <= self.linear_dk:
            raise DomainError("kmax must exceed the linear spacing")
        if not (0 < self.space_cutoff_rel < 1) or self.x_nodes < 3:
            raise DomainError("invalid space-domain sampling controls")


@dataclass(frozen=True)
class SampledFunction:
    nodes: np.ndarray
    values: np.ndarray
    parity: Parity = Parity.EVEN
    domain: Domain = Domain.FREQUENCY
    envelope: tuple = None          # (C, delta): tail decays like exp(-C k**delta)
    err: np.ndarray = None
    method: np.ndarray = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1:
            raise ValueError("nodes and values must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if self.err is not None:
            object.__setattr__(self, "err", np.asarray(self.err, dtype=float))
        sign = {Parity.EVEN: 1.0, Parity.ODD: -1.0}.get(self.parity)
        if sign is not None and len(nodes) > 1 and np.allclose(nodes, -nodes[::-1], rtol=1e-12, atol=1e-14):
            scale = np.abs(values).max()
            if np.any(np.abs(values - sign * values[::-1]) > 1e-12 * scale):
                raise ValueError(f"values violate declared {self.parity.value} parity")

    def __len__(self):
        return len(self.nodes)

    @property
    def support_end(self):
        return float(self.nodes[-1])

    def __call__(self, k, degree=3):
        """Local polynomial interpolation; even/odd reflection for negative ``k``."""
        k = np.asarray(k, dtype=float)
        if self.parity is Parity.NONE or self.nodes[0] < 0:
            return local_interp(self.nodes, self.values, k, degree)
        ak = np.abs(k)
        out = local_interp(self.nodes, self.values, ak, degree)
        out = np.where(ak > self.nodes[-1], 0.0, out)
        if self.parity is Parity.ODD:
            out = np.sign(k) * out
        return out

    def tail_bound(self, k):
        """Bound on ``int_k^inf |value|`` from the declared envelope."""
        if self.envelope is None:
            tail = np.abs(self.values[-10:]).max() * (self.nodes[-1] - self.nodes[-10])
            return float(tail)
        C, delta = self.envelope
        last = slice(max(0, len(self.nodes) - 10), None)
        with np.errstate(over="ignore"):
            amp = np.max(np.abs(self.values[last]) * np.exp(C * self.nodes[last] ** delta))
        return float(amp * stretched_exp_tail(C, delta, k))


class ScaledTransform:
    """Callable ``k -> phi_hat(k)`` for ``phi(x) = phi_{A,B}(2x)``, i.e. ``phi_hat_{A,B}(k/2)/2``."""

    def __init__(self, params, band=BAND):
        self.params = params
        self.band = band
        d = params.A / (params.A + 1.0)
        # phi_hat**2 decays like exp(-C k**delta) with C = 2 beta pi**delta
        self.envelope = (2.0 * params.beta * math.pi**d, d)

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        v, _, _ = transform_many(self.params, np.abs(k).ravel() / 2.0, self.band)
        out = 0.5 * v.reshape(k.shape)
        return out if out.ndim else float(out)


def psi_hat(phi_hat_at, k):
    """``-2 pi k phi_hat(k)**2``."""
    k = np.asarray(k, dtype=float)
    out = -2.0 * np.pi * k * np.asarray(phi_hat_at(k)) ** 2
    return out if out.ndim else float(out)


def _tail_check(phi_hat_at, kmax, partial, envelope):
    envelope = envelope or getattr(phi_hat_at, "envelope", None)
    if envelope is None:
        raise DomainError("an envelope (C, delta) is needed to bound the tail")
    C, delta = envelope
    t = np.linspace(kmax - 1.0, kmax, 65)
    g = -psi_hat(phi_hat_at, t)
    amp = 2.0 * np.max(g * np.exp(C * t**delta))
    bound = float(amp * stretched_exp_tail(C, delta, kmax))
    if bound > TAIL_REL * partial:
        raise TailNotNegligible(
            f"tail beyond kmax={kmax} bounded by {bound:.3e}, partial integral {partial:.3e}")
    return bound


def f_hat(phi_hat_at, k, kmax, envelope=None):
    """``int_k^kmax 2 pi t phi_hat(t)**2 dt`` by adaptive quadrature, with a tail check."""
    k = abs(float(k))
    if k >= kmax:
        raise DomainError("k must be below kmax")
    integrand = lambda t: -psi_hat(phi_hat_at, t)
    res = integrate(integrand, k, kmax, epsrel=1e-13, epsabs=1e-300,
                    initial_panels=int(math.ceil(kmax - k)))
    value = float(res.value[0])
    _tail_check(phi_hat_at, kmax, value, envelope)
    return value


def capital_I(phi_hat_at, kmax, envelope=None):
    """``I = -int_0^inf psi_hat``; positive."""
    return f_hat(phi_hat_at, 0.0, kmax, envelope)


def _cheb_matrix(n):
    j = np.arange(n)
    m = np.arange(n)
    mat = (2.0 / n) * np.cos(np.pi * np.outer(m, j + 0.5) / n)
    mat[0] *= 0.5
    return mat


class SpectralTable:
    """Piecewise Chebyshev representation of ``phi_hat``, ``psi_hat`` and ``f_hat``.

    Panels of equal width cover ``[0, support_end]``. ``phi_hat`` is sampled
    at first-kind Chebyshev points of every panel; the integrand
    ``2 pi t phi_hat**2`` is interpolated on the same points and integrated
    exactly, and ``f_hat`` is assembled from the right as a tail sum. Calling
    the table evaluates ``f_hat``.
    """

    def __init__(self, params, edges, phi_coef, g_coef, g_int, panel_int, tails,
                 tail_err, end_tail, envelope):
        self.params = params
        self.edges = edges
        self.phi_coef = phi_coef
        self.g_coef = g_coef
        self.g_int = g_int
        self.panel_int = panel_int
        self.tails = tails
        self.tail_err = tail_err
        self.end_tail = end_tail
        self.envelope = envelope

    @classmethod
    def build(cls, params, k_end, width=2.0, n=32, band=BAND):
        npanel = int(math.ceil(k_end / width))
        edges = np.arange(npanel + 1) * width
        half = 0.5 * width
        mid = edges[:-1] + half
        s = np.cos(np.pi * (np.arange(n) + 0.5) / n)
        t = mid[None, :] + half * s[:, None]                  # (n, P)
        vals, errs, _ = transform_many(params, t.ravel() / 2.0, band)
        phi = 0.5 * vals.reshape(t.shape)
        phi_err = 0.5 * errs.reshape(t.shape)
        mat = _cheb_matrix(n)
        phi_coef = mat @ phi
        g = 2.0 * np.pi * t * phi**2
        g_coef = mat @ g
        g_int = cheb.chebint(g_coef, lbnd=-1, scl=half, axis=0)
        panel_int = cheb.chebval(1.0, g_int)
        # interpolation truncation plus propagated transform error, per panel
        trunc = (np.abs(g_coef[-1]) + np.abs(g_coef[-2])) * width
        prop = width * np.mean(4.0 * np.pi * t * np.abs(phi) * phi_err, axis=0)

        d = params.A / (params.A + 1.0)
        C = 2.0 * params.beta * math.pi**d
        end = edges[-1]
        # beyond the last panel: mean level of the last panel continued along the envelope
        end_tail = panel_int[-1] / width * end ** (1.0 - d) / (C * d)
        tails = np.empty(npanel + 1)
        tails[-1] = end_tail
        tails[:-1] = end_tail + np.cumsum(panel_int[::-1])[::-1]
        tail_err = np.empty(npanel + 1)
        tail_err[-1] = end_tail
        tail_err[:-1] = end_tail + np.cumsum((trunc + prop)[::-1])[::-1]
        return cls(params, edges, phi_coef, g_coef, g_int, panel_int, tails, tail_err,
                   end_tail, (C, d))

    @property
    def width(self):
        return self.edges[1] - self.edges[0]

    @property
    def support_end(self):
        return float(self.edges[-1])

    def _locate(self, k):
        idx = np.clip((k / self.width).astype(int), 0, len(self.edges) - 2)
        half = 0.5 * self.width
        s = (k - (self.edges[idx] + half)) / half
        return idx, s

    def phi_hat(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        idx, s = self._locate(k)
        out = cheb.chebval(s, self.phi_coef[:, idx], tensor=False)
        out = np.where(k > self.support_end, 0.0, out)
        return out if out.ndim else float(out)

    def psi_hat(self, k):
        k = np.asarray(k, dtype=float)
        return -2.0 * np.pi * k * np.asarray(self.phi_hat(k)) ** 2

    def f_hat(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        idx, s = self._locate(k)
        partial = self.panel_int[idx] - cheb.chebval(s, self.g_int[:, idx], tensor=False)
        out = self.tails[idx + 1] + np.maximum(partial, 0.0)
        beyond = k > self.support_end
        if np.any(beyond):
            C, d = self.envelope
            decay = np.exp(-C * (k[beyond] ** d - self.support_end**d))
            out = np.where(beyond, 0.0, out)
            out[beyond] = self.end_tail * decay
        return out if out.ndim else float(out)

    __call__ = f_hat

    def f_hat_err(self, k):
        k = np.abs(np.asarray(k, dtype=float))
        idx, _ = self._locate(k)
        return self.tail_err[idx]

    def tail_bound(self, k):
        """Bound on ``int_k^inf f_hat`` for ``k`` at or beyond the table end."""
        C, d = self.envelope
        k = max(float(k), self.support_end)
        amp = self.f_hat(self.support_end) * math.exp(C * self.support_end**d)
        return float(amp * stretched_exp_tail(C, d, k))

    def level_crossing(self, level):
        """Smallest ``k`` with ``f_hat(k) = level`` (``f_hat`` is nonincreasing)."""
        if level >= self.f_hat(0.0):
            return 0.0
        hi = self.width
        while self.f_hat(hi) > level:
            hi *= 2.0
            if hi > self.support_end:
                raise DomainError("level below the tabulated range")
        return brentq(lambda k: self.f_hat(k) - level, 0.0, hi, xtol=1e-12)


def big_F_hat(fhat, k, epsrel=CONV_EPSREL, full_output=False):
    """Self-convolution ``int f_hat(k - kappa) f_hat(kappa) dkappa``.

    ``fhat`` is any even representation of ``f_hat`` exposing ``__call__``,
    ``support_end`` and ``tail_bound`` (a :class:`SpectralTable` or a
    :class:`SampledFunction`). By symmetry about ``kappa = k/2`` the integral
    is twice the integral over ``kappa >= k/2``; beyond ``support_end`` the
    envelope bound is added to the error estimate.
    """
    ks = np.abs(np.atleast_1d(np.asarray(k, dtype=float)))
    end = fhat.support_end
    f0 = float(np.asarray(fhat(0.0)))
    values = np.zeros(len(ks))
    errs = np.zeros(len(ks))
    integrand = None
    for i, kk in enumerate(ks):
        a = 0.5 * kk
        if a >= end:
            errs[i] = 2.0 * f0 * fhat.tail_bound(a)
            continue

        def integrand(kappa, kk=kk):
            return fhat(kappa) * fhat(np.abs(kappa - kk))

        bps = np.concatenate([kk + 4.0 ** np.arange(-1, 8), [kk], a + 4.0 ** np.arange(-1, 8)])
        res = integrate(integrand, a, end, epsrel=epsrel, epsabs=1e-300, breakpoints=bps,
                        initial_panels=4)
        trunc = 2.0 * f0 * fhat.tail_bound(end)
        values[i] = 2.0 * res.value[0]
        errs[i] = 2.0 * res.error[0] + trunc
        if trunc > 1e-6 * values[i]:
            raise TailNotNegligible(f"truncation at k={end} is not negligible for F_hat({kk})")
    if full_output:
        return values, errs
    return values if np.ndim(k) else float(values[0])


def auto_kmax(spec, floor=1e-260):
    """Frequency where ``exp(-2 C k**delta)`` reaches ``floor``."""
    return (math.log(1.0 / floor) / (2.0 * spec.bigC)) ** (1.0 / spec.delta)


def table_end(spec, kmax):
    # f_hat at the table end is 1e-17 of its value at kmax (envelope level)
    return ((spec.bigC * kmax**spec.delta + _LOG_1E17) / spec.bigC) ** (1.0 / spec.delta)


def space_samples(table, x, cutoff_k, dk, degree=11):
    """``f`` on ``x`` by inverting ``f_hat`` sampled uniformly on ``[0, cutoff_k]``."""
    n = int(math.ceil(cutoff_k / dk))
    kk = np.arange(n + 1) * dk
    fh = SampledFunction(kk, table.f_hat(kk), envelope=table.envelope)
    return inverse_ft(fh, x, degree=degree, full_output=True)


@dataclass(frozen=True)
class PipelineArtifacts:
    phiHat: SampledFunction
    psiHat: SampledFunction
    capitalI: float
    fHat: SampledFunction
    bigFHat: SampledFunction
    fSpace: SampledFunction
    bigFSpace: SampledFunction
    spec: DecaySpec = None
    params: BumpParams = None
    grid: KGrid = None
    config: GridConfig = None
    table: SpectralTable = field(default=None, repr=False)
    space_cutoff: float = None

    def big_F_hat_at(self, k):
        return big_F_hat(self.table, k)


def run_pipeline(spec, grid_cfg=None):
    """Build every artifact for ``spec``; see :class:`PipelineArtifacts`."""
    cfg = grid_cfg or GridConfig()
    params = resolve_params(spec)
    kmax = cfg.kmax or auto_kmax(spec, cfg.f2_floor)
    k_end = max(table_end(spec, kmax), kmax + cfg.panel_width)
    if k_end > cfg.kmax_cap:
        raise TailNotNegligible(
            f"reaching the f_hat**2 floor needs k up to {k_end:.4g} > kmax_cap={cfg.kmax_cap:g}")
    log.info("A=%g B=%g kmax=%.6g table end=%.6g", params.A, params.B, kmax, k_end)

    table = SpectralTable.build(params, k_end, cfg.panel_width, cfg.cheb_nodes, cfg.band)
    grid = build_k_grid(kmax, cfg.linear_dk, cfg.linear_max, cfg.geo_ratio)
    k = grid.nodes
    C, d = table.envelope

    v, e, methods = transform_many(params, k / 2.0, cfg.band)
    phi, phi_err = 0.5 * v, 0.5 * e
    methods = np.array([m.value for m in methods])
    phiHat = SampledFunction(k, phi, envelope=(0.5 * C, d), err=phi_err, method=methods)
    psiHat = SampledFunction(k, -2.0 * np.pi * k * phi**2, parity=Parity.ODD,
                             envelope=(C, d), err=4.0 * np.pi * k * np.abs(phi) * phi_err,
                             method=methods)

    I = float(table.f_hat(0.0))
    if table.end_tail > TAIL_REL * I:
        raise TailNotNegligible(f"tail beyond k={k_end:.4g} is {table.end_tail:.3e} of I={I:.3e}")
    fHat = SampledFunction(k, table.f_hat(k), envelope=(C, d), err=table.f_hat_err(k))

    Fv, Fe = big_F_hat(table, k, full_output=True)
    bigFHat = SampledFunction(k, Fv, envelope=(C, d), err=Fe)

    x = np.linspace(-cfg.x_max, cfg.x_max, cfg.x_nodes)
    cutoff = table.level_crossing(cfg.space_cutoff_rel * I)
    fx, fx_err = space_samples(table, x, cutoff, cfg.linear_dk, cfg.inverse_degree)
    fSpace = SampledFunction(x, fx, domain=Domain.SPACE, err=fx_err)
    bigFSpace = SampledFunction(x, fx**2, domain=Domain.SPACE, err=2.0 * np.abs(fx) * fx_err)

    return PipelineArtifacts(phiHat, psiHat, I, fHat, bigFHat, fSpace, bigFSpace,
                             spec=spec, params=params, grid=grid, config=cfg, table=table,
                             space_cutoff=cutoff)

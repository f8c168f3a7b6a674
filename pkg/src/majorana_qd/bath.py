"""Fermionic bath with spectral density J(w) = gamma w^s wc^(1-s) exp(-w/wc).

Correlation functions (chemical potential fixed at zero)::

    alpha_plus(t)  = int_0^inf dw J(w) N_F(w) exp(+i w t)
    alpha_minus(t) = int_0^inf dw J(w) (N_F(w) + 1) exp(-i w t)

and the memory coefficients of the dissipator::

    G_jl(t) = int_0^t du alpha(u) exp(-i u (E_j - E_l))
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import expit

from . import _kernels

PLUS, MINUS = "plus", "minus"

# Bernoulli numbers B_2 .. B_12
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)
_ZETA_SHIFT = 16.0


@dataclass(frozen=True)
class BathParams:
    """Ohmic-family bath.  ``beta = math.inf`` selects zero temperature.

    ``gamma = 0`` is accepted and switches the bath off (closed system).
    """

    gamma: float
    s: float
    omega_c: float
    beta: float = math.inf

    def __post_init__(self):
        for name in ("gamma", "s", "omega_c", "beta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (math.isfinite(self.s) and self.s > 0):
            raise ValueError(f"s must be > 0, got {self.s}")
        if not (math.isfinite(self.omega_c) and self.omega_c > 0):
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0 (or inf), got {self.beta}")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)


def _check_sign(sign):
    if sign not in (PLUS, MINUS):
        raise ValueError(f"sign must be {PLUS!r} or {MINUS!r}, got {sign!r}")


def spectral_density(omega, b: BathParams):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral density is defined for omega >= 0")
    out = b.gamma * omega**b.s * b.omega_c ** (1 - b.s) * np.exp(-omega / b.omega_c)
    return out[()] if out.ndim == 0 else out


def fermi(omega, beta):
    """Fermi-Dirac occupation at zero chemical potential."""
    if math.isinf(beta):
        return np.where(np.asarray(omega) > 0, 0.0, np.where(np.asarray(omega) < 0, 1.0, 0.5))
    return expit(-beta * np.asarray(omega, dtype=float))


def hurwitz_zeta(order, z):
    """Hurwitz zeta ``sum_k (z + k)^(-order)`` for ``order > 1`` and ``Re z > 0``.

    Accepts scalar or array ``z``.  The argument is shifted by the recurrence
    until ``|z| >= 16`` and the tail is summed with Euler-Maclaurin through
    the B_12 term, which keeps the relative error near machine precision.
    """
    p = float(order)
    if not p > 1:
        raise ValueError(f"order must exceed 1, got {order}")
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("hurwitz_zeta requires Re(z) > 0")
    # shifts needed to reach |z + n| >= 16
    reach = np.sqrt(np.maximum(_ZETA_SHIFT**2 - z.imag**2, 0.0)) - z.real
    nshift = np.ceil(np.maximum(reach, 0.0)).astype(int)
    head = np.zeros_like(z)
    for k in range(int(nshift.max(initial=0))):
        head += np.where(k < nshift, (z + k) ** (-p), 0.0)
    w = z + nshift
    tail = w ** (1 - p) / (p - 1) + 0.5 * w ** (-p)
    rising = p  # p (p+1) ... (p+2k-2)
    wpow = w ** (-p - 1)
    fact = 2.0
    for k, b2k in enumerate(_BERNOULLI, start=1):
        tail += b2k / fact * rising * wpow
        rising *= (p + 2 * k - 1) * (p + 2 * k)
        wpow = wpow / (w * w)
        fact *= (2 * k + 1) * (2 * k + 2)
    out = head + tail
    return out[()] if out.ndim == 0 else out


def correlation(sign, t, b: BathParams):
    """Closed-form ``alpha_plus`` / ``alpha_minus`` at time(s) ``t >= 0``."""
    _check_sign(sign)
    t = np.asarray(t, dtype=float)
    g1 = math.gamma(1 + b.s)
    wc = b.omega_c
    vacuum = b.gamma * wc**2 * g1 / (1 + 1j * wc * t) ** (1 + b.s)
    if b.zero_temperature:
        thermal = np.zeros_like(vacuum)
    else:
        beta = b.beta
        z = (1 + beta * wc - 1j * wc * t) / (2 * beta * wc)
        pref = b.gamma / (4 * beta**2) * (2 * beta * wc) ** (1 - b.s) * g1
        thermal = pref * (hurwitz_zeta(1 + b.s, z) - hurwitz_zeta(1 + b.s, z + 0.5))
    out = thermal if sign == PLUS else np.conj(thermal) + vacuum
    return out[()] if out.ndim == 0 else out


class QuadratureError(RuntimeError):
    def __init__(self, message, estimate, error):
        super().__init__(f"{message}: estimate {estimate!r}, error bound {error:.3e}")
        self.estimate = estimate
        self.error = error


def correlation_quadrature(sign, t: float, b: BathParams, tol: float = 1e-10):
    """Adaptive-quadrature evaluation of the defining frequency integrals.

    Independent of :func:`correlation`; intended as its oracle.  The
    integral is truncated at ``40 * omega_c``.
    """
    _check_sign(sign)
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    if sign == PLUS and b.zero_temperature:
        return 0.0 + 0.0j
    upper = 40.0 * b.omega_c

    # scalar math: quad calls this point by point, numpy overhead would dominate
    scale = b.gamma * b.omega_c ** (1 - b.s)
    shift = 0.0 if sign == PLUS else 1.0

    def weight(w):
        x = b.beta * w
        nf = 1.0 / (math.exp(x) + 1.0) if x < 700.0 else 0.0
        return scale * w**b.s * math.exp(-w / b.omega_c) * (nf + shift)

    kwargs = dict(epsabs=tol / 4, epsrel=1e-13, limit=2000, full_output=1)
    # w^s is not smooth at 0 for fractional s; split off the first panel
    split = min(upper, 1.0 / max(t, 1e-300), b.omega_c)
    parts = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if t == 0.0:
            for lo, hi in ((0.0, split), (split, upper)):
                parts.append(integrate.quad(weight, lo, hi, **kwargs)[:2])
            re = sum(v for v, _ in parts)
            im = 0.0
            err = sum(e for _, e in parts)
        else:
            cos_parts = [
                integrate.quad(weight, 0.0, split, weight="cos", wvar=t, **kwargs)[:2],
                integrate.quad(weight, split, upper, weight="cos", wvar=t, **kwargs)[:2],
            ]
            sin_parts = [
                integrate.quad(weight, 0.0, split, weight="sin", wvar=t, **kwargs)[:2],
                integrate.quad(weight, split, upper, weight="sin", wvar=t, **kwargs)[:2],
            ]
            re = sum(v for v, _ in cos_parts)
            im = sum(v for v, _ in sin_parts)
            err = sum(e for _, e in cos_parts + sin_parts)
    value = complex(re, im if sign == PLUS else -im)
    if not err <= tol:
        raise QuadratureError("correlation quadrature did not reach tolerance", value, err)
    return value


def dissipation_rate_estimate(b: BathParams) -> float:
    """Rough magnitude ``|int_0^inf alpha_minus(u) du|``; diagnostic only."""
    re, _ = integrate.quad(lambda u: correlation(MINUS, u, b).real, 0.0, np.inf, limit=500)
    im, _ = integrate.quad(lambda u: correlation(MINUS, u, b).imag, 0.0, np.inf, limit=500)
    return abs(complex(re, im))


@dataclass(frozen=True)
class MemoryCoefficients:
    """Running integrals ``G_plus``/``G_minus`` at time ``t``.

    ``omega`` holds the Bohr frequencies ``E_j - E_l`` the integrals were
    accumulated with; advancing with a different spectrum is an error.
    """

    g_plus: np.ndarray
    g_minus: np.ndarray
    t: float
    omega: np.ndarray

    @classmethod
    def zero(cls, spectrum) -> "MemoryCoefficients":
        omega = spectrum.bohr_frequencies()
        z = np.zeros(omega.shape, dtype=complex)
        return cls(z, z.copy(), 0.0, omega)


def advance_memory(
    mc: MemoryCoefficients, spectrum, h: float, b: BathParams, panels: int = 2, kernel=None
) -> MemoryCoefficients:
    """Extend the memory integrals from ``mc.t`` to ``mc.t + h``.

    Composite Simpson with ``panels`` panels on ``[t, t + h]``; all 64
    ``(j, l)`` pairs share the same correlation samples.  ``kernel`` may
    replace the closed-form correlations with a callable
    ``u -> (alpha_plus(u), alpha_minus(u))``.
    """
    if h < 0:
        raise ValueError(f"step must be >= 0, got {h}")
    if panels < 1:
        raise ValueError("need at least one Simpson panel")
    omega = spectrum.bohr_frequencies()
    if not np.allclose(omega, mc.omega, rtol=0, atol=1e-12):
        raise ValueError("memory coefficients were accumulated with a different spectrum")
    if h == 0:
        return mc
    n = 2 * panels
    du = h / n
    u = mc.t + du * np.arange(n + 1)
    if kernel is None:
        ap, am = correlation(PLUS, u, b), correlation(MINUS, u, b)
    else:
        ap, am = kernel(u)
        ap = np.broadcast_to(np.asarray(ap, dtype=complex), u.shape).copy()
        am = np.broadcast_to(np.asarray(am, dtype=complex), u.shape).copy()
    gp, gm = mc.g_plus.copy(), mc.g_minus.copy()
    _kernels.simpson_accumulate(gp, gm, np.ascontiguousarray(ap), np.ascontiguousarray(am), mc.t, du, omega)
    return MemoryCoefficients(gp, gm, mc.t + h, mc.omega)


def memory_reference(sign, t: float, spectrum, b: BathParams, tol: float = 1e-11) -> np.ndarray:
    """One-shot adaptive quadrature of ``G_jl(t)`` for every pair (test oracle).

    All 64 integrands are integrated together so the correlation function is
    evaluated once per node.
    """
    _check_sign(sign)
    omega = spectrum.bohr_frequencies()

    def f(u):
        v = correlation(sign, u, b) * np.exp(-1j * u * omega)
        return np.concatenate([v.real.ravel(), v.imag.ravel()])

    # resolve the kernel's initial fall-off separately from the slow tail
    edge = min(t, 20.0 / b.omega_c)
    total = np.zeros(2 * omega.size)
    for lo, hi in ((0.0, edge), (edge, t)):
        if hi > lo:
            val, err = integrate.quad_vec(f, lo, hi, epsabs=tol, epsrel=1e-13, norm="max", limit=4000)
            if not err <= 10 * tol:
                raise QuadratureError("memory quadrature did not reach tolerance", val, err)
            total += val
    n = omega.size
    return (total[:n] + 1j * total[n:]).reshape(omega.shape)

"""Closed-form spectral quantities of the operator W(b) = 2cosh(bP) - V.

The operator 2cosh(bP) acts in Fourier space (convention
psi_hat(k) = int exp(-2 pi i k x) psi(x) dx) as multiplication by
2cosh(2 pi b k); its spectrum is [2, inf).  Energies lambda < 2 are
parametrized by an angle, lambda = -2 cos(omega), with omega in [0, pi] for
lambda in [-2, 2] and omega purely imaginary below -2.  All public values
stay real: a point stores (branch, magnitude) plus theta = omega^2, which is
real on both branches.

Everything in this module is a pure function evaluated in numerically stable
form: the free symbol, the free resolvent kernel, the normalized kernel
ratio g_{phi,theta} and its Fourier transform, and the exact rank-one
solution for a delta potential.  Position/frequency arguments accept scalars
or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EdgeError, ParameterError, SymbolOverflowError

PI_SQ = math.pi * math.pi

REAL_BRANCH = "real-angle"
IMAG_BRANCH = "imaginary-angle"

# |theta| below which sin(sqrt(theta))/sqrt(theta) switches to its series
_SERIES_CUT = 1e-8
# |x|/b beyond which kernel ratios switch to the explicit exponential form
_EXP_FORM_CUT = 30.0
# largest argument fed to cosh/sinh before the result leaves double range
_MAX_EXP_ARG = 709.0
# reject resolvent evaluations with omega closer than this to pi
_EDGE_OMEGA_GAP = 1e-10


def sin_ratio(theta):
    """sin(sqrt(theta))/sqrt(theta), continued to sinh(sqrt(-theta))/sqrt(-theta).

    Entire in theta (same power series on both sides of zero); strictly
    decreasing, with range (0, inf) on theta in (-inf, pi^2].  Saturates to
    inf once sinh overflows (theta below about -5e5).
    """
    t = np.asarray(theta, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_CUT
    if small.any():
        ts = t[small]
        out[small] = 1.0 - ts / 6.0 + ts * ts / 120.0
    pos = t >= _SERIES_CUT
    if pos.any():
        r = np.sqrt(t[pos])
        out[pos] = np.sin(r) / r
    neg = t <= -_SERIES_CUT
    if neg.any():
        r = np.sqrt(-t[neg])
        with np.errstate(over="ignore"):
            out[neg] = np.sinh(r) / r
    return float(out[0]) if scalar else out


def cos_sqrt(theta):
    """cos(sqrt(theta)), continued to cosh(sqrt(-theta)) for theta < 0."""
    t = np.asarray(theta, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_CUT
    if small.any():
        ts = t[small]
        out[small] = 1.0 - ts / 2.0 + ts * ts / 24.0
    pos = t >= _SERIES_CUT
    if pos.any():
        out[pos] = np.cos(np.sqrt(t[pos]))
    neg = t <= -_SERIES_CUT
    if neg.any():
        with np.errstate(over="ignore"):
            out[neg] = np.cosh(np.sqrt(-t[neg]))
    return float(out[0]) if scalar else out


def lambda_from_theta(theta):
    """Energy -2*cos(sqrt(theta)) on either branch."""
    return -2.0 * cos_sqrt(theta)


@dataclass(frozen=True)
class Scale:
    """Deformation parameter b > 0 of the shift operator 2cosh(bP)."""

    b: float

    def __post_init__(self):
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b) and self.b > 0):
            raise ParameterError(f"scale b must be a positive finite real, got {self.b!r}")


@dataclass(frozen=True)
class SpectralPoint:
    """Energy below the edge, stored as (branch, |omega|) with theta = omega^2.

    real-angle branch:       lambda = -2 cos(magnitude),  magnitude in [0, pi]
    imaginary-angle branch:  lambda = -2 cosh(magnitude), magnitude > 0
    """

    branch: str
    magnitude: float

    def __post_init__(self):
        if self.branch == REAL_BRANCH:
            if not 0.0 <= self.magnitude <= math.pi:
                raise ParameterError(
                    f"real-angle magnitude must lie in [0, pi], got {self.magnitude!r}"
                )
        elif self.branch == IMAG_BRANCH:
            if not self.magnitude > 0.0:
                raise ParameterError(
                    f"imaginary-angle magnitude must be positive, got {self.magnitude!r}"
                )
        else:
            raise ParameterError(f"unknown branch {self.branch!r}")

    @property
    def lam(self) -> float:
        if self.branch == REAL_BRANCH:
            return -2.0 * math.cos(self.magnitude)
        return -2.0 * math.cosh(self.magnitude)

    @property
    def theta(self) -> float:
        m2 = self.magnitude * self.magnitude
        return m2 if self.branch == REAL_BRANCH else -m2


def spectral_point_from_lambda(lam: float, tol: float = 1e-12) -> SpectralPoint:
    """Invert lambda = -2 cos(omega) below the edge.

    Energies within tol below -2 are snapped onto the branch point omega = 0
    so that eigensolver roundoff cannot flip the branch.
    """
    if not math.isfinite(lam):
        raise ParameterError(f"lambda must be finite, got {lam!r}")
    if lam >= 2.0:
        raise EdgeError(f"lambda = {lam!r} is not below the continuous-spectrum edge 2")
    if lam >= -2.0:
        return SpectralPoint(REAL_BRANCH, math.acos(min(1.0, -lam / 2.0)))
    if lam >= -2.0 - tol:
        return SpectralPoint(REAL_BRANCH, 0.0)
    return SpectralPoint(IMAG_BRANCH, math.acosh(-lam / 2.0))


def spectral_point_from_theta(theta: float) -> SpectralPoint:
    """Point with omega^2 = theta; requires theta <= pi^2."""
    if not math.isfinite(theta) or theta > PI_SQ:
        raise ParameterError(f"theta must be finite and <= pi^2, got {theta!r}")
    if theta >= 0.0:
        return SpectralPoint(REAL_BRANCH, math.sqrt(theta))
    return SpectralPoint(IMAG_BRANCH, math.sqrt(-theta))


def _require_off_edge(point: SpectralPoint):
    if point.branch == REAL_BRANCH and math.pi - point.magnitude < _EDGE_OMEGA_GAP:
        raise EdgeError(
            f"omega = {point.magnitude!r} is within {_EDGE_OMEGA_GAP} of pi; "
            "the resolvent is singular at the edge lambda = 2"
        )


def free_symbol(k, scale: Scale):
    """Fourier symbol 2cosh(2 pi b k) of the free operator; always >= 2."""
    arg = 2.0 * math.pi * scale.b * np.asarray(k, dtype=float)
    amax = float(np.max(np.abs(arg))) if arg.size else 0.0
    if amax > _MAX_EXP_ARG:
        raise SymbolOverflowError(
            f"|2 pi b k| = {amax:.6g} exceeds the cosh overflow threshold "
            f"({_MAX_EXP_ARG:g}); largest representable |k| at b = {scale.b:g} is "
            f"{_MAX_EXP_ARG / (2.0 * math.pi * scale.b):.6g}"
        )
    out = 2.0 * np.cosh(arg)
    return float(out) if out.ndim == 0 else out


def shift_symbol(k, scale: Scale):
    """Symbol 2sinh(pi b k) of the half-shift difference; its square is free_symbol - 2."""
    arg = math.pi * scale.b * np.asarray(k, dtype=float)
    amax = float(np.max(np.abs(arg))) if arg.size else 0.0
    if amax > _MAX_EXP_ARG:
        raise SymbolOverflowError(
            f"|pi b k| = {amax:.6g} exceeds the sinh overflow threshold ({_MAX_EXP_ARG:g})"
        )
    out = 2.0 * np.sinh(arg)
    return float(out) if out.ndim == 0 else out


def resolvent_diagonal(point: SpectralPoint, scale: Scale) -> float:
    """G_lambda(0) = omega/(2 pi b sin(omega)), continued across both branches."""
    _require_off_edge(point)
    sr = sin_ratio(point.theta)
    if sr == 0.0:
        raise EdgeError(f"diagonal resolvent diverges at theta = {point.theta!r}")
    return 1.0 / (2.0 * math.pi * scale.b * sr)


def _check_g_params(phi: float, theta: float):
    if not (math.isfinite(phi) and 0.0 < phi <= PI_SQ * (1.0 + 1e-12)):
        raise ParameterError(f"phi must lie in (0, pi^2], got {phi!r}")
    if not (math.isfinite(theta) and theta < phi):
        raise ParameterError(f"theta must be < phi, got theta = {theta!r}, phi = {phi!r}")


def g_fn(x, phi: float, theta: float, scale: Scale):
    """Kernel ratio g_{phi,theta}(x) = (sqrt(phi)/sqrt(theta)) sinh(sqrt(theta)x/b)/sinh(sqrt(phi)x/b).

    Even in x with g(0) = 1; decays like exp((sqrt(theta)-sqrt(phi))|x|/b)
    for theta > 0 and oscillates inside the same envelope for theta < 0.
    Evaluated through sin_ratio for |x|/b <= 30 and in explicit exponential
    form beyond, so no intermediate overflows.
    """
    _check_g_params(phi, theta)
    u = np.abs(np.asarray(x, dtype=float)) / scale.b
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    out = np.empty_like(u)
    near = u <= _EXP_FORM_CUT
    if near.any():
        u2 = u[near] ** 2
        out[near] = sin_ratio(-theta * u2) / sin_ratio(-phi * u2)
    far = ~near
    if far.any():
        uf = u[far]
        sp = math.sqrt(phi)
        den = -np.expm1(-2.0 * sp * uf)
        if theta > 0.0:
            st = math.sqrt(theta)
            out[far] = (sp / st) * np.exp((st - sp) * uf) * (-np.expm1(-2.0 * st * uf)) / den
        elif theta < 0.0:
            st = math.sqrt(-theta)
            out[far] = (sp / st) * np.sin(st * uf) * 2.0 * np.exp(-sp * uf) / den
        else:
            out[far] = sp * uf * 2.0 * np.exp(-sp * uf) / den
    return float(out[0]) if scalar else out


def resolvent_kernel(x, point: SpectralPoint, scale: Scale):
    """Free resolvent kernel G_lambda(x) = sinh(omega x/b) / (2 b sin(omega) sinh(pi x/b)).

    Real on both branches; even and positive for real omega, oscillating for
    imaginary omega.  x = 0 returns the diagonal value.
    """
    _require_off_edge(point)
    return g_fn(x, PI_SQ, point.theta, scale) * resolvent_diagonal(point, scale)


def g_hat(k, phi: float, theta: float, scale: Scale):
    """Fourier transform of g_{phi,theta}: a positive density of unit mass.

    Closed form
        g_hat(k) = (2 pi sin(pi sqrt(theta)/sqrt(phi)) / sqrt(theta)) *
                   b / (2 cosh(2 pi^2 b k / sqrt(phi)) + 2 cos(pi sqrt(theta)/sqrt(phi)))
    with sin/cos continued through theta <= 0 exactly as in sin_ratio/cos_sqrt.
    """
    _check_g_params(phi, theta)
    b = scale.b
    s = math.sqrt(phi)
    q = theta * PI_SQ / phi  # (pi sqrt(theta)/sqrt(phi))^2, sign of theta
    coeff = 2.0 * math.pi * (math.pi / s) * sin_ratio(q) * b
    cos2 = 2.0 * cos_sqrt(q)
    arg = np.abs(2.0 * PI_SQ * b * np.asarray(k, dtype=float) / s)
    scalar = arg.ndim == 0
    arg = np.atleast_1d(arg)
    out = np.empty_like(arg)
    near = arg <= _EXP_FORM_CUT
    if near.any():
        out[near] = coeff / (2.0 * np.cosh(arg[near]) + cos2)
    far = ~near
    if far.any():
        e = np.exp(-arg[far])
        out[far] = coeff * e / (1.0 + cos2 * e + e * e)
    return float(out[0]) if scalar else out


def g_hat_box(k, theta: float, scale: Scale):
    """phi -> 0 limit of g_hat for theta < 0: a flat box of unit mass.

    Value pi*b/sqrt(|theta|) on |2 pi b k| <= sqrt(|theta|), zero outside.
    """
    if not (math.isfinite(theta) and theta < 0.0):
        raise ParameterError(f"the box transform needs theta < 0, got {theta!r}")
    root = math.sqrt(-theta)
    half_width = root / (2.0 * math.pi * scale.b)
    height = math.pi * scale.b / root
    kk = np.asarray(k, dtype=float)
    out = np.where(np.abs(kk) <= half_width, height, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DeltaSolution:
    """The unique bound state of the rank-one potential c*delta."""

    coupling: float
    scale: Scale
    point: SpectralPoint


def delta_solve(c: float, scale: Scale) -> DeltaSolution:
    """Solve sin(omega)/omega = c/(2 pi b) for the delta-potential eigenvalue.

    sin_ratio is strictly decreasing on theta in (-inf, pi^2] with range
    (0, inf), so the root is bracketed by doubling on the negative side and
    pinned by bisection, run to floating-point resolution.
    """
    if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
        raise ParameterError(f"delta coupling must be positive, got {c!r}")
    target = c / (2.0 * math.pi * scale.b)
    lo, hi = 0.0, PI_SQ
    if sin_ratio(lo) < target:
        lo = -1.0
        hi = 0.0
        for _ in range(64):
            if sin_ratio(lo) >= target:
                break
            hi = lo
            lo *= 2.0
    # invariant: sin_ratio(lo) >= target >= sin_ratio(hi)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if sin_ratio(mid) >= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    theta = 0.5 * (lo + hi)
    return DeltaSolution(coupling=float(c), scale=scale, point=spectral_point_from_theta(theta))


def delta_eigenfunction(x, sol: DeltaSolution):
    """Bound-state wavefunction of c*delta, normalized to psi(0) = 1.

    psi(x) = c * G_lambda(x) at the solved spectral point; continuous at
    x = 0, strictly positive for c <= 2 pi b and oscillating beyond.
    """
    return sol.coupling * resolvent_kernel(x, sol.point, sol.scale)

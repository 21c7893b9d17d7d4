"""Schwarzian derivatives, harmonic coefficients and Fredholm eigenvalues.

The least positive Fredholm eigenvalue of a quasicircle f(S^1) is the
reciprocal of the Grunsky norm of f, so the truncated norm machinery
yields eigenvalue estimates directly.  The first-order route evaluates
the moment form of the harmonic coefficient

    nu(z) = (1/2)(1 - |z|^2)^2 S_f(1/conj z) / conj(z)^4

built from the Schwarzian derivative S_f; for small hyperbolic norms this
reproduces the Grunsky norm up to a quadratic remainder and improves the
classical reflection-dilatation bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beltrami import BeltramiSpec, harmonic_tail_moments, _hankel_form
from .errors import QuadratureError, ValidationError
from .forms import build_form, form_norm
from .series import LaurentFunction, TaylorSeries, series_log_ratio

__all__ = [
    "SchwarzianData",
    "FredholmReport",
    "schwarzian",
    "harmonic_beltrami",
    "fredholm_eigenvalue",
]

RHO_INFINITE_BELOW = 1e-12


@dataclass(frozen=True)
class SchwarzianData:
    """Schwarzian expansion at infinity plus its hyperbolic sup norm.

    ``series`` holds the coefficients s_j of z^{-j}; the expansion starts
    at j = 4.  ``bnorm`` is sup over the exterior disk of
    (|z|^2 - 1)^2 |S_f(z)| (hyperbolic metric of curvature -4).
    """

    series: TaylorSeries
    bnorm: float

    @property
    def tail(self) -> np.ndarray:
        """Coefficients of conj(z)^q in S_f(1/conj z)/conj(z)^4, q >= 0."""
        if self.series.order < 4:
            return np.zeros(1, dtype=complex)
        return np.array(self.series.a[4:])


def _schwarzian_series(f: LaurentFunction, order: int) -> TaylorSeries:
    """Coefficients of S_f in powers of w = 1/z, truncated at w^order."""
    n = np.arange(1, f.b.size)
    fp = np.zeros(order + 1, dtype=complex)
    fp[0] = 1.0
    for k in n:
        if k + 1 <= order:
            fp[k + 1] = -k * f.b[k]
    fpp = np.zeros(order + 1, dtype=complex)
    for k in n:
        if k + 2 <= order:
            fpp[k + 2] = k * (k + 1) * f.b[k]
    A = TaylorSeries(fp)
    G = TaylorSeries(fpp) * A.reciprocal()  # f''/f' in w
    dG = G.deriv()  # d/dw; d/dz = -w^2 d/dw
    gprime = -dG.shift(2).truncate(order)
    return (gprime - 0.5 * (G * G)).truncate(order)


def _schwarzian_eval(f: LaurentFunction, z) -> np.ndarray:
    """Exact pointwise S_f = f'''/f' - (3/2)(f''/f')^2 for truncated data."""
    fp = f.deriv_eval(z, 1)
    fpp = f.deriv_eval(z, 2)
    fppp = f.deriv_eval(z, 3)
    return fppp / fp - 1.5 * (fpp / fp) ** 2


def schwarzian(f: LaurentFunction, N: int = 24) -> SchwarzianData:
    """Schwarzian derivative data of a normalized univalent expansion.

    N is the truncation order of the series at infinity.  The sup norm is
    taken on geometric radial grids, refined (and extended outward) until
    stable to 1e-6; the limit value |s_4| at infinity is always included,
    since the weighted Schwarzian tends to it along |z| -> oo.
    """
    if f.leading != 1.0:
        raise ValidationError("Schwarzian normalization requires leading coefficient 1")
    # f'(z) = 1 - sum n b_n w^{n+1} is a polynomial in w = 1/z for truncated
    # data, so zeros of f' in |z| >= 1 + delta are found exactly by its roots
    delta = 0.01
    q = np.zeros(f.b.size + 1, dtype=complex)
    q[0] = 1.0
    for k in range(1, f.b.size):
        q[k + 1] = -k * f.b[k]
    q = np.trim_zeros(q, "b")
    if q.size > 1:
        roots = np.polynomial.polynomial.polyroots(q)
        if np.any(np.abs(roots) < 1.0 / (1.0 + delta)):
            raise ValidationError(
                "f' vanishes in the evaluation region |z| >= 1.01; data not univalent there"
            )
    series = _schwarzian_series(f, N)
    s4 = abs(series.a[4]) if series.order >= 4 else 0.0
    prev = None
    value = s4
    rmax = 8.0
    nr, ntheta = 96, 64
    for _ in range(8):
        r = np.geomspace(1.0 + delta, rmax, nr)
        t = np.exp(2j * np.pi * np.arange(ntheta) / ntheta)
        Z = r[:, None] * t[None, :]
        weighted = (np.abs(Z) ** 2 - 1.0) ** 2 * np.abs(_schwarzian_eval(f, Z))
        value = max(float(weighted.max()), s4)
        if prev is not None and abs(value - prev) < 1e-6 * max(1.0, value):
            break
        prev = value
        nr *= 2
        ntheta *= 2
        rmax = min(2.0 * rmax, 64.0)
    else:
        raise QuadratureError("hyperbolic sup norm grid did not stabilize")
    return SchwarzianData(series=series, bnorm=value)


def harmonic_beltrami(phi: SchwarzianData) -> BeltramiSpec:
    """Harmonic Beltrami coefficient nu of the reflection extension of phi.

    nu(z) = (1/2)(1-|z|^2)^2 phi(1/conj z)/conj(z)^4 on the unit disk;
    with phi expanded at infinity this is (1/2)(1-|z|^2)^2 times a
    polynomial in conj(z), so moments stay in closed form.  Its sup norm
    is at most bnorm/2 and must stay below 1 to be a valid coefficient.
    """
    return BeltramiSpec.harmonic(phi.tail)


@dataclass(frozen=True)
class FredholmReport:
    """Grunsky-reciprocal eigenvalue estimate with first-order comparison."""

    kappa: float
    rho: float
    firstorder: float
    qL: Optional[float] = None
    ahlfors_ok: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "rho": self.rho,
            "firstorder": self.firstorder,
            "qL": self.qL,
            "ahlfors_ok": self.ahlfors_ok,
        }


def fredholm_eigenvalue(
    f: LaurentFunction,
    N: int = 16,
    qL: Optional[float] = None,
    tol: float = 1e-12,
) -> FredholmReport:
    """Fredholm eigenvalue estimate for the curve f(S^1).

    kappa is the truncated Grunsky norm, rho its reciprocal (infinite for
    the circle), and firstorder the supremum of the harmonic-coefficient
    moment form, which agrees with kappa to second order in the Schwarzian
    norm.  A user-supplied reflection dilatation qL turns on the
    consistency flag 1/rho <= qL + tol; qL is never computed here.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    kappa = form_norm(build_form(series_log_ratio(f.pad(N), N))).value
    rho = float("inf") if kappa < RHO_INFINITE_BELOW else 1.0 / kappa
    sdata = schwarzian(f, 2 * N + 2)
    moments = harmonic_tail_moments(sdata.tail, range(2 * N - 1))
    firstorder = form_norm(_hankel_form(moments, N, "firstorder-Hankel")).value
    ahlfors_ok = None if qL is None else bool(kappa <= qL + tol)
    return FredholmReport(
        kappa=kappa, rho=rho, firstorder=firstorder, qL=qL, ahlfors_ok=ahlfors_ok
    )

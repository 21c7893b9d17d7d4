"""Polar quadrature over the unit disk and parametric rules for domains.

Two integration paths cover the integrands that arise here:

* a smooth path (uniform angular rule, Gauss-Legendre radial panels, both
  refined by doubling) for integrands that are real-analytic on the closed
  disk up to angular harmonics -- the uniform rule integrates harmonics
  e^{ik theta} exactly, which keeps monomial moment computations at
  machine precision;
* an adaptive path (panel bisection with embedded Gauss error estimates)
  for phase factors |psi|/psi whose zeros put bounded, non-smooth corner
  points inside the disk.  Radial and angular splits place every zero on
  panel boundaries, so panels shrink toward isolated corners only.

All integrals include the polar area element r dr dtheta.  Integrands are
vector-valued: ``fvec(z)`` maps a flat complex array of nodes to an array
of shape (K, len(z)).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError

__all__ = [
    "disk_quadrature_smooth",
    "disk_quadrature_adaptive",
    "disk_nodes",
    "ellipse_nodes",
]


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _radial_rule(segments, n_per_segment):
    """Gauss-Legendre nodes/weights on a union of radial segments."""
    x, w = _gauss_legendre(n_per_segment)
    rs, ws = [], []
    for r0, r1 in segments:
        half = 0.5 * (r1 - r0)
        mid = 0.5 * (r1 + r0)
        rs.append(mid + half * x)
        ws.append(half * w)
    return np.concatenate(rs), np.concatenate(ws)


def _segments(breaks, lo=0.0, hi=1.0):
    pts = sorted({float(b) for b in breaks if lo + 1e-14 < b < hi - 1e-14})
    edges = [lo] + pts + [hi]
    return list(zip(edges[:-1], edges[1:]))


def disk_quadrature_smooth(
    fvec,
    radial_breaks=(),
    tol: float = 1e-10,
    min_theta: int = 64,
    max_level: int = 7,
):
    """Integral over the unit disk of a smooth-per-radial-segment integrand.

    Refines by doubling both directions until two consecutive levels agree
    within ``tol`` (absolute, componentwise).
    """
    segments = _segments(radial_breaks)
    prev = None
    for level in range(max_level + 1):
        ntheta = min_theta << level
        nr = 24 << level
        theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
        wtheta = 2.0 * np.pi / ntheta
        r, wr = _radial_rule(segments, nr)
        Z = np.exp(1j * theta)[:, None] * r[None, :]
        wflat = np.broadcast_to((wr * r)[None, :] * wtheta, (ntheta, r.size)).ravel()
        vals = fvec(Z.ravel())
        I = vals @ wflat
        if prev is not None and np.max(np.abs(I - prev)) < tol:
            return I
        prev = I
    raise QuadratureError(
        f"smooth disk quadrature did not reach tolerance {tol:g} by level {max_level}"
    )


def _panel_tensor(fvec, panels, q):
    """Tensor Gauss rule per polar panel, batched over all panels."""
    x, w = _gauss_legendre(q)
    P = len(panels)
    arr = np.asarray(panels)  # (P, 4): r0, r1, t0, t1
    rhalf = 0.5 * (arr[:, 1] - arr[:, 0])
    rmid = 0.5 * (arr[:, 1] + arr[:, 0])
    thalf = 0.5 * (arr[:, 3] - arr[:, 2])
    tmid = 0.5 * (arr[:, 3] + arr[:, 2])
    r = rmid[:, None] + rhalf[:, None] * x[None, :]  # (P, q)
    t = tmid[:, None] + thalf[:, None] * x[None, :]
    Z = (r[:, :, None] * np.exp(1j * t[:, None, :])).reshape(P, q * q)
    wgt = (r * w[None, :] * rhalf[:, None])[:, :, None] * (w[None, :] * thalf[:, None])[:, None, :]
    vals = fvec(Z.ravel())
    K = vals.shape[0]
    return np.einsum("kpm,pm->kp", vals.reshape(K, P, q * q), wgt.reshape(P, q * q))


def disk_quadrature_adaptive(
    fvec,
    radial_breaks=(),
    angular_breaks=(),
    tol: float = 1e-9,
    q_low: int = 10,
    q_high: int = 20,
    max_panels: int = 60000,
):
    """Adaptive panel quadrature over the unit disk.

    Panels start from the given radial and angular splits (zeros of the
    phase factor must lie on panel boundaries) and are bisected four-way
    wherever the embedded error estimate exceeds the panel's share of the
    absolute tolerance budget.
    """
    rsegs = _segments(radial_breaks)
    angs = sorted({float(a) % (2.0 * np.pi) for a in angular_breaks})
    if not angs:
        tsegs = [(0.0, 2.0 * np.pi)]
    else:
        tsegs = [(angs[i], angs[i + 1]) for i in range(len(angs) - 1)]
        tsegs.append((angs[-1], angs[0] + 2.0 * np.pi))
    worklist = [(r0, r1, t0, t1) for r0, r1 in rsegs for t0, t1 in tsegs]
    total = None
    err_total = 0.0
    processed = 0
    disk_area = np.pi
    while worklist:
        processed += len(worklist)
        if processed > max_panels:
            raise QuadratureError(
                f"adaptive disk quadrature exceeded {max_panels} panels at tolerance {tol:g}"
            )
        I_low = _panel_tensor(fvec, worklist, q_low)
        I_high = _panel_tensor(fvec, worklist, q_high)
        err = np.max(np.abs(I_high - I_low), axis=0)
        areas = np.array([(r1 - r0) * (t1 - t0) * 0.5 * (r0 + r1) for r0, r1, t0, t1 in worklist])
        budget = 0.5 * tol * areas / disk_area
        accept = (err <= budget) | (err <= 1e-16) | (areas < 1e-18)
        if total is None:
            total = np.zeros(I_high.shape[0], dtype=complex)
        total += I_high[:, accept].sum(axis=1)
        err_total += float(err[accept].sum())
        next_work = []
        for flag, (r0, r1, t0, t1) in zip(accept, worklist):
            if flag:
                continue
            rm = 0.5 * (r0 + r1)
            tm = 0.5 * (t0 + t1)
            next_work += [
                (r0, rm, t0, tm),
                (r0, rm, tm, t1),
                (rm, r1, t0, tm),
                (rm, r1, tm, t1),
            ]
        worklist = next_work
    return total, err_total


def disk_nodes(level: int):
    """Tensor nodes/weights on the unit disk for smooth form quadrature."""
    ntheta = 64 << level
    nr = 24 << level
    x, w = _gauss_legendre(nr)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    Z = (np.exp(1j * theta)[:, None] * r[None, :]).ravel()
    W = np.broadcast_to((wr * r)[None, :] * (2.0 * np.pi / ntheta), (ntheta, nr)).ravel()
    return Z, W


def ellipse_nodes(a: float, b: float, level: int):
    """Tensor nodes/weights on the interior of an ellipse with semiaxes a, b.

    Parametrization (a rho cos phi, b rho sin phi) with Jacobian a b rho;
    uniform rule in phi, Gauss-Legendre in rho.
    """
    nphi = 64 << level
    nr = 24 << level
    x, w = _gauss_legendre(nr)
    rho = 0.5 * (x + 1.0)
    wrho = 0.5 * w
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    Z = (rho[None, :] * (a * np.cos(phi)[:, None] + 1j * b * np.sin(phi)[:, None])).ravel()
    W = np.broadcast_to(
        (a * b) * (wrho * rho)[None, :] * (2.0 * np.pi / nphi), (nphi, nr)
    ).ravel()
    return Z, W

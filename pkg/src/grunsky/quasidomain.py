"""Quasidisk pairs (D, D*), conformal maps, Milin bases and domain alpha.

A quasidisk exterior D* containing infinity is described by its conformal
map chi onto the exterior unit disk (chi(inf) = inf, chi'(inf) > 0); the
bounded complement D carries the quadratic differentials.  Supported
families: the unit disk itself, ellipse interiors with foci +-1, interiors
of Cassini ovals |z^2 - 1| = c, and user-supplied series map pairs.

The Milin polynomials are the polynomial coefficients of the Cauchy kernel
expansion 1/(z - w) = sum q_n(w) chi(z)^{-n}, orthonormalized in the
Bergman sense <p_m, p_n>_D = pi delta_mn.  On the ellipse the raw kernel
coefficients come out proportional to Chebyshev polynomials of the second
kind and the exact Gram diagonal is pi (1 - (a+b)^{-4n})/1 * ...; the
orthonormalization step absorbs those factors, which is what every alpha
computation downstream requires.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .beltrami import BeltramiSpec, _hankel_form, _clip_unit
from .errors import NumericalError, QuadratureError, ValidationError
from .forms import DEFAULT_NORM_TOLERANCE, NormEstimate, SymmetricForm, form_norm
from .quadrature import disk_nodes, disk_quadrature_smooth, ellipse_nodes
from .series import (
    KernelMatrix,
    LaurentFunction,
    TaylorSeries,
    compose_at_infinity,
    revert_at_infinity,
    series_log_ratio,
)

__all__ = [
    "DomainSpec",
    "UnitDisk",
    "EllipseInterior",
    "CassiniInterior",
    "ConformalImage",
    "MilinBasis",
    "ellipse_maps",
    "ellipse_basis",
    "cassini_maps",
    "milin_polynomials",
    "generalized_coefficients",
    "alpha_functional_domain",
]

_polyval = np.polynomial.polynomial.polyval


class DomainSpec:
    """Base descriptor of a quasidisk pair; concrete variants below."""

    kind = "abstract"
    has_g = False

    def chi_inv_series(self, order: int) -> LaurentFunction:
        raise NotImplementedError

    def chi_inv_eval(self, u):
        raise NotImplementedError

    def g_eval(self, zeta):
        raise ValidationError(f"{self.kind} carries no disk parametrization g")

    def g_prime_eval(self, zeta):
        raise ValidationError(f"{self.kind} carries no disk parametrization g")

    def quad_nodes(self, level: int):
        """Area nodes/weights over the bounded domain D."""
        raise NotImplementedError

    def interior_ring(self, s: float, n: int) -> np.ndarray:
        """n sample points on an interior ring at relative size s."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(obj: dict) -> "DomainSpec":
        if not isinstance(obj, dict) or "type" not in obj:
            raise ValidationError("domain JSON needs a 'type' tag")
        kind = obj["type"]
        if kind == "unit_disk":
            if set(obj) != {"type"}:
                raise ValidationError("unit_disk takes no parameters")
            return UnitDisk()
        if kind == "ellipse":
            if set(obj) != {"type", "a", "b"}:
                raise ValidationError("ellipse JSON needs exactly a and b")
            return EllipseInterior(obj["a"], obj["b"])
        if kind == "cassini":
            if set(obj) != {"type", "c"}:
                raise ValidationError("cassini JSON needs exactly c")
            return CassiniInterior(obj["c"])
        if kind == "conformal_image":
            if set(obj) != {"type", "g", "chi_inv"}:
                raise ValidationError("conformal_image JSON needs g and chi_inv")
            g = TaylorSeries([complex(re, im) for re, im in obj["g"]])
            chi_inv = LaurentFunction.from_json(obj["chi_inv"])
            return ConformalImage(g, chi_inv)
        raise ValidationError(f"unknown domain type {kind!r}")


class UnitDisk(DomainSpec):
    kind = "unit_disk"
    has_g = True

    def chi_inv_series(self, order: int) -> LaurentFunction:
        return LaurentFunction.identity(order)

    def chi_inv_eval(self, u):
        return np.asarray(u, dtype=complex)

    def g_eval(self, zeta):
        return np.asarray(zeta, dtype=complex)

    def g_prime_eval(self, zeta):
        return np.ones_like(np.asarray(zeta, dtype=complex))

    def quad_nodes(self, level: int):
        return disk_nodes(level)

    def interior_ring(self, s: float, n: int) -> np.ndarray:
        return s * np.exp(2j * np.pi * np.arange(n) / n)

    def to_json(self) -> dict:
        return {"type": "unit_disk"}


class EllipseInterior(DomainSpec):
    """Interior of the ellipse with foci +-1 and semiaxes a > b > 0."""

    kind = "ellipse"
    has_g = False

    def __init__(self, a: float, b: float) -> None:
        a, b = float(a), float(b)
        if not (a > b > 0.0):
            raise ValidationError("ellipse needs a > b > 0")
        if abs(a * a - b * b - 1.0) > 1e-9:
            raise ValidationError("foci at +-1 require a^2 - b^2 = 1")
        self.a = a
        self.b = b
        self.radius = a + b  # image scale: chi^{-1}(u) = (R u + 1/(R u))/2

    def chi_eval(self, z):
        z = np.asarray(z, dtype=complex)
        root = z * np.sqrt(1.0 - 1.0 / (z * z))  # branch cut on the foci segment
        return (z + root) / self.radius

    def chi_inv_series(self, order: int) -> LaurentFunction:
        R = self.radius
        b = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            b[1] = 1.0 / (2.0 * R)
        return LaurentFunction(R / 2.0, b)

    def chi_inv_eval(self, u):
        u = np.asarray(u, dtype=complex)
        Ru = self.radius * u
        return 0.5 * (Ru + 1.0 / Ru)

    def quad_nodes(self, level: int):
        return ellipse_nodes(self.a, self.b, level)

    def interior_ring(self, s: float, n: int) -> np.ndarray:
        phi = 2.0 * np.pi * np.arange(n) / n
        return s * (self.a * np.cos(phi) + 1j * self.b * np.sin(phi))

    def to_json(self) -> dict:
        return {"type": "ellipse", "a": self.a, "b": self.b}


class CassiniInterior(DomainSpec):
    """Interior of the Cassini oval |z^2 - 1| = c with c > 1."""

    kind = "cassini"
    has_g = True

    def __init__(self, c: float) -> None:
        c = float(c)
        if not c > 1.0:
            raise ValidationError("Cassini parameter c must exceed 1")
        self.c = c

    def chi_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return z * np.sqrt(1.0 - 1.0 / (z * z)) / np.sqrt(self.c)

    def chi_inv_series(self, order: int) -> LaurentFunction:
        c = self.c
        s = TaylorSeries(np.array([1.0, 0.0, 1.0 / c])).truncate(order + 1).sqrt()
        coeffs = np.sqrt(c) * s.a  # chi_inv(u) = u * sum coeffs[k] (1/u)^k
        b = np.zeros(order + 1, dtype=complex)
        m = min(order + 1, coeffs.size - 1)
        b[:m] = coeffs[1 : m + 1]
        return LaurentFunction(float(coeffs[0].real), b)

    def chi_inv_eval(self, u):
        u = np.asarray(u, dtype=complex)
        return np.sqrt(self.c) * u * np.sqrt(1.0 + 1.0 / (self.c * u * u))

    def g_eval(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        c = self.c
        return zeta * np.sqrt((c * c - 1.0) / (c - zeta * zeta))

    def g_prime_eval(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        c = self.c
        return c * np.sqrt(c * c - 1.0) * (c - zeta * zeta) ** (-1.5)

    def quad_nodes(self, level: int):
        zeta, w = disk_nodes(level)
        return self.g_eval(zeta), w * np.abs(self.g_prime_eval(zeta)) ** 2

    def interior_ring(self, s: float, n: int) -> np.ndarray:
        return self.g_eval(s * np.exp(2j * np.pi * np.arange(n) / n))

    def to_json(self) -> dict:
        return {"type": "cassini", "c": self.c}


class ConformalImage(DomainSpec):
    """Domain given by a series pair: g maps the unit disk onto D,
    chi_inv maps the exterior unit disk onto D*."""

    kind = "conformal_image"
    has_g = True

    def __init__(self, g: TaylorSeries, chi_inv: LaurentFunction) -> None:
        if g.a[0] != 0:
            raise ValidationError("g must fix the origin")
        if g.order < 1 or not (g.a[1].real > 0.0 and abs(g.a[1].imag) < 1e-12):
            raise ValidationError("g'(0) must be positive real")
        self.g = g
        self.g_prime = g.deriv()
        self.chi_inv = chi_inv

    def chi_inv_series(self, order: int) -> LaurentFunction:
        if order > self.chi_inv.order:
            # declared truncation: higher coefficients are exactly zero
            return self.chi_inv.pad(order)
        return self.chi_inv.truncate(order)

    def chi_inv_eval(self, u):
        return self.chi_inv(u)

    def g_eval(self, zeta):
        return self.g(np.asarray(zeta, dtype=complex))

    def g_prime_eval(self, zeta):
        return self.g_prime(np.asarray(zeta, dtype=complex))

    def quad_nodes(self, level: int):
        zeta, w = disk_nodes(level)
        return self.g_eval(zeta), w * np.abs(self.g_prime_eval(zeta)) ** 2

    def interior_ring(self, s: float, n: int) -> np.ndarray:
        return self.g_eval(s * np.exp(2j * np.pi * np.arange(n) / n))

    def to_json(self) -> dict:
        return {
            "type": "conformal_image",
            "g": [[c.real, c.imag] for c in self.g.a],
            "chi_inv": self.chi_inv.to_json(),
        }


# ---------------------------------------------------------------------------
# explicit map constructors


def ellipse_maps(a: float, b: float, order: int = 32):
    """Exterior map chi of the ellipse with foci +-1 and its Laurent inverse.

    chi(z) = (z + sqrt(z^2 - 1))/(a + b), branch positive for real z > 1.
    The inverse is produced by series reversion; it terminates after the
    1/u term, matching the closed form ((a+b)u + ((a+b)u)^{-1})/2.
    """
    dom = EllipseInterior(a, b)
    R = dom.radius
    root = TaylorSeries(np.array([1.0, 0.0, -1.0])).truncate(order + 2).sqrt()
    coeffs = (1.0 + root).a / R  # z*(1 + sqrt(1 - w^2))/R, w = 1/z
    btail = np.concatenate([coeffs[1:], np.zeros(1, complex)])[: order + 1]
    btail = np.pad(btail, (0, order + 1 - btail.size))
    chi_series = LaurentFunction(2.0 / R, btail)
    chi_inv = revert_at_infinity(chi_series, order)
    return dom.chi_eval, chi_inv


def cassini_maps(c: float, order: int = 32):
    """Disk map g onto the Cassini interior and the Laurent inverse of chi.

    g(z) = z sqrt((c^2-1)/(c - z^2)) with g'(0) > 0; chi^{-1}(u) =
    sqrt(1 + c u^2) expanded about infinity.  Both are validated against
    the defining boundary relation |g(e^{i t})^2 - 1| = c.
    """
    dom = CassiniInterior(c)
    inner = TaylorSeries(np.array([c, 0.0, -1.0])).truncate(order).reciprocal()
    g = ((c * c - 1.0) * inner).sqrt().shift(1).truncate(order)
    chi_inv = dom.chi_inv_series(order)
    t = np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False))
    resid = np.abs(np.abs(dom.g_eval(t) ** 2 - 1.0) - c)
    if np.max(resid) > 1e-8:
        raise NumericalError("Cassini boundary relation failed; invalid parameter")
    return g, chi_inv


# ---------------------------------------------------------------------------
# Milin bases


@dataclass(frozen=True)
class MilinBasis:
    """Orthonormalized polynomials p_n (degree n-1) with <p_m, p_n>_D = pi."""

    polys: tuple
    order: int
    domain: DomainSpec
    gram_error: float
    diagnostics: dict

    def eval_all(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.stack([_polyval(z, p) for p in self.polys])

    def to_csv_rows(self):
        rows = []
        for n, p in enumerate(self.polys, start=1):
            for j, cj in enumerate(p):
                rows.append((n, j, cj.real, cj.imag))
        return rows


def _gram_matrix(domain: DomainSpec, coeffs: np.ndarray, tol: float = 1e-10,
                 max_level: int = 6) -> np.ndarray:
    """G[m][n] = (1/pi) integral p_m conj(p_n) dA over D, refined by doubling."""
    prev = None
    for level in range(max_level + 1):
        z, w = domain.quad_nodes(level)
        P = np.stack([_polyval(z, row) for row in coeffs])
        G = (P * w) @ np.conj(P).T / np.pi
        if prev is not None and np.max(np.abs(G - prev)) < tol:
            return G
        prev = G
    raise QuadratureError("Gram quadrature did not stabilize")


def _cauchy_kernel_polys(domain: DomainSpec, N: int, radius: float, samples: int):
    """Raw kernel coefficient polynomials q_n from contour extraction."""
    S = samples
    u = radius * np.exp(2j * np.pi * np.arange(S) / S)
    X = domain.chi_inv_eval(u)
    n_ring = max(32, 2 * N + 8)
    w = np.concatenate([domain.interior_ring(0.45, n_ring),
                        domain.interior_ring(0.85, n_ring + 1)])
    D = X[:, None] - w[None, :]
    if np.min(np.abs(D)) < 1e-9:
        raise NumericalError("contour passes through an interior sample point")
    powers = np.power.outer(u, np.arange(1, N + 1)).T  # (N, S)
    Q = powers @ (1.0 / D) / S  # (N, J) values of q_n at w
    scale = np.max(np.abs(w))
    V = np.vander(w / scale, N, increasing=True)
    C, *_ = np.linalg.lstsq(V, Q.T, rcond=None)
    resid = np.max(np.abs(V @ C - Q.T))
    coeffs = (C / scale ** np.arange(N)[:, None]).T  # row n: coeffs of q_{n+1}
    # q_n must have exact degree n-1: excess coefficients certify the fit
    excess = max(
        (np.max(np.abs(coeffs[n, n + 1 :])) for n in range(N - 1)), default=0.0
    )
    return coeffs, max(resid, excess)


def milin_polynomials(
    domain: DomainSpec,
    N: int,
    gram_tol: float = 1e-7,
    fit_tol: float = 1e-9,
) -> MilinBasis:
    """Milin polynomial system of a quasidisk, Gram-certified.

    Raw coefficients are extracted from the Cauchy kernel expansion on a
    contour |u| = R (R doubling from 2 to 16 on fit failure), fitted by
    least squares on interior rings, then orthonormalized against the
    area Gram matrix.  On the unit disk the raw polynomials are w^{n-1}
    and the orthonormalized ones sqrt(n) w^{n-1}.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    radius = 2.0
    last_resid = np.inf
    coeffs = None
    while radius <= 16.0:
        coeffs, resid = _cauchy_kernel_polys(domain, N, radius, max(256, 16 * N))
        last_resid = resid
        if resid <= fit_tol:
            break
        radius *= 2.0
    else:
        raise NumericalError(
            f"kernel polynomial fit residual {last_resid:.2e} exceeds {fit_tol:g} "
            "at every contour radius up to 16"
        )
    for n in range(N - 1):
        coeffs[n, n + 1 :] = 0.0

    G = _gram_matrix(domain, coeffs)
    raw_norms = np.sqrt(np.abs(np.diag(G)))
    try:
        L = cholesky(G, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Gram matrix not positive definite: {exc}") from exc
    ortho = solve_triangular(L, coeffs, lower=True)
    # fix phases: leading coefficients positive real
    for n in range(N):
        lead = ortho[n, n]
        if abs(lead) < 1e-13:
            raise NumericalError(f"degenerate leading coefficient in p_{n + 1}")
        ortho[n, :] *= abs(lead) / lead

    G2 = _gram_matrix(domain, ortho)
    gram_error = float(np.max(np.abs(G2 - np.eye(N))))
    if gram_error > gram_tol:
        raise NumericalError(
            f"orthonormality defect {gram_error:.2e} exceeds tolerance {gram_tol:g}"
        )
    polys = tuple(np.array(ortho[n, : n + 1]) for n in range(N))
    diagnostics = {
        "contour_radius": radius,
        "fit_residual": float(last_resid),
        "raw_gram_diagonal": raw_norms ** 2,
    }
    return MilinBasis(polys=polys, order=N, domain=domain,
                      gram_error=gram_error, diagnostics=diagnostics)


def _chebyshev_u(N: int):
    """Coefficient rows of U_0..U_{N-1}, ascending."""
    rows = [np.array([1.0 + 0j]), np.array([0.0, 2.0 + 0j])]
    while len(rows) < N:
        prev, last = rows[-2], rows[-1]
        nxt = np.zeros(last.size + 1, dtype=complex)
        nxt[1:] = 2.0 * last
        nxt[: prev.size] -= prev
        rows.append(nxt)
    return rows[:N]


def ellipse_basis(a: float, b: float, N: int, gram_tol: float = 1e-8) -> MilinBasis:
    """Orthonormal basis of the ellipse interior from Chebyshev U polynomials.

    The normalization constants are forced numerically by Gram quadrature;
    the exact diagonal pi (R^{2n} - R^{-2n})/(4n), R = a + b, and the
    inverted printed constant 2 sqrt(n/pi) (r^n - r^{-n}), r = R^2, are
    both recorded in the diagnostics for cross-checking.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    dom = EllipseInterior(a, b)
    U = _chebyshev_u(N)
    maxlen = N
    raw = np.zeros((N, maxlen), dtype=complex)
    for i, row in enumerate(U):
        raw[i, : row.size] = row
    G = _gram_matrix(dom, raw)
    off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    gamma = np.real(np.diag(G)) * np.pi  # integral |U_{n-1}|^2 dA
    scale = np.sqrt(np.pi / gamma)
    ortho = raw * scale[:, None]
    G2 = _gram_matrix(dom, ortho)
    gram_error = float(np.max(np.abs(G2 - np.eye(N))))
    if gram_error > gram_tol:
        raise NumericalError(
            f"ellipse basis orthonormality defect {gram_error:.2e} exceeds {gram_tol:g}"
        )
    R = dom.radius
    n = np.arange(1, N + 1, dtype=float)
    gamma_exact = np.pi * (R ** (2 * n) - R ** (-2 * n)) / (4 * n)
    r = R * R
    printed = 2.0 * np.sqrt(n / np.pi) * (r ** n - r ** (-n))
    numeric = scale
    diagnostics = {
        "offdiagonal_before": off,
        "gamma_numeric": gamma,
        "gamma_exact": gamma_exact,
        "printed_constant": printed,
        "numeric_constant": numeric,
        "printed_to_numeric_ratio": printed / numeric,
    }
    polys = tuple(np.array(ortho[i, : i + 1]) for i in range(N))
    return MilinBasis(polys=polys, order=N, domain=dom,
                      gram_error=gram_error, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# generalized coefficients and domain alpha


def generalized_coefficients(f: LaurentFunction, domain: DomainSpec, N: int) -> KernelMatrix:
    """Generalized kernel coefficients of f on the quasidisk D*.

    Uses the splitting of -log((f(z)-f(zeta))/(z-zeta)) under z = chi^{-1}(u):
    the expansion of F = f o chi^{-1} minus the expansion of chi^{-1}
    itself.  Entries hold the generalized coefficient divided by sqrt(mn);
    on the unit disk this reduces bitwise to the classical matrix.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    chi_inv = domain.chi_inv_series(2 * N)
    F = compose_at_infinity(f.pad(2 * N), chi_inv, 2 * N)
    A_f = series_log_ratio(F, N)
    A_chi = series_log_ratio(chi_inv, N)
    return KernelMatrix(entries=A_f.entries - A_chi.entries, order=N, kind="generalized")


def _pullback_alpha(mu: BeltramiSpec, domain: DomainSpec, N: int,
                    tol: float, norm_tolerance: float) -> NormEstimate:
    """Transport mu to the unit disk and use the monomial Hankel form.

    The transported coefficient is mu*(g(zeta)) conj(g')/g'; the |g'|^2
    Jacobian is already consumed by the change of area measure, since the
    disk differentials phi(g) g'^2 carry the same L1 norm as phi.
    """

    powers = np.arange(0, 2 * N - 1)

    def fvec(zeta):
        gp = domain.g_prime_eval(zeta)
        mus = mu.mu_star(domain.g_eval(zeta))
        base = mus * np.conj(gp) / gp
        return np.stack([base * zeta ** p for p in powers])

    vals = disk_quadrature_smooth(fvec, tol=tol * np.pi, min_theta=max(64, 4 * N + 16))
    c = vals / np.pi
    est = form_norm(_hankel_form(c, N, "alpha-Hankel-pullback"), tolerance=norm_tolerance)
    return _clip_unit(est)


def _direct_alpha(mu: BeltramiSpec, domain: DomainSpec, N: int,
                  tol: float, norm_tolerance: float, basis: MilinBasis | None,
                  max_level: int = 6) -> NormEstimate:
    """B[m][n] = (1/pi) integral mu*(z) p_m(z) p_n(z) dxdy, then the form norm."""
    if basis is None:
        basis = milin_polynomials(domain, N)
    prev = None
    B = None
    for level in range(max_level + 1):
        z, w = domain.quad_nodes(level)
        P = basis.eval_all(z)
        B = (P * (mu.mu_star(z) * w)) @ P.T / np.pi
        if prev is not None and np.max(np.abs(B - prev)) < tol:
            break
        prev = B
    else:
        raise QuadratureError("domain alpha quadrature did not stabilize")
    iu = np.triu_indices(N, k=1)
    B[iu[1], iu[0]] = B[iu]
    est = form_norm(SymmetricForm(B=B, order=N, label="alpha-Milin"),
                    tolerance=norm_tolerance)
    return _clip_unit(est)


def alpha_functional_domain(
    mu: BeltramiSpec,
    domain: DomainSpec,
    N: int = 16,
    method: str = "auto",
    tol: float = 1e-9,
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE,
    basis: MilinBasis | None = None,
) -> NormEstimate:
    """Extremal pairing alpha over a quasidisk's bounded complement D.

    method 'direct' integrates mu* against Milin polynomial pairs on D;
    'pullback' transports mu to the unit disk along g (when available) and
    reuses the monomial Hankel route; 'auto' picks pullback when g exists.
    The two routes agree up to truncation and provide a change-of-variables
    cross-check.
    """
    if isinstance(domain, UnitDisk):
        from .beltrami import alpha_functional

        return alpha_functional(mu, N, tol=tol, norm_tolerance=norm_tolerance)
    if mu.kind == "harmonic":
        raise ValidationError("harmonic coefficients are defined on the unit disk only")
    if method == "auto":
        method = "pullback" if domain.has_g else "direct"
    if method == "pullback":
        if not domain.has_g:
            raise ValidationError(f"{domain.kind} has no disk parametrization for pullback")
        return _pullback_alpha(mu, domain, N, tol, norm_tolerance)
    if method == "direct":
        return _direct_alpha(mu, domain, N, tol, norm_tolerance, basis)
    raise ValidationError("method must be 'auto', 'direct' or 'pullback'")

"""Beltrami coefficient descriptors and the extremal functional alpha.

A Beltrami coefficient mu supported on the unit disk is paired with
holomorphic squares psi = omega^2 of unit L1 norm; the supremum

    alpha = sup |(1/pi) integral mu*(z) psi(z) dxdy|,   mu* = mu/||mu||_oo,

is evaluated on the truncated family psi = (1/pi) sum sqrt(mn) x_m x_n
z^{m+n-2} with x on the unit sphere, which turns the supremum into the
norm of a Hankel-type quadratic form built from the disk moments

    c_p = (1/pi) integral mu*(z) z^p dxdy.

alpha controls the gap between the Grunsky norm and the dilatation k of a
quasiconformal extension through the bound k*(k + alpha)/(1 + alpha*k),
which is strictly below k unless alpha = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvariantViolation, ValidationError
from .forms import (
    DEFAULT_NORM_TOLERANCE,
    NormEstimate,
    SymmetricForm,
    build_form,
    form_norm,
)
from .quadrature import disk_quadrature_adaptive, disk_quadrature_smooth
from .series import LaurentFunction, series_log_ratio

__all__ = [
    "RationalPoly",
    "BeltramiSpec",
    "MomentVector",
    "disk_moments",
    "harmonic_tail_moments",
    "alpha_functional",
    "strengthened_bound",
    "BoundReport",
    "bound_check",
    "variational_map",
    "MoserReport",
    "moser_approximant",
    "DEFAULT_ALPHA_ORDER",
]

DEFAULT_ALPHA_ORDER = 16
DEFAULT_MOMENT_TOL = 1e-9

_polyval = np.polynomial.polynomial.polyval
_polyroots = np.polynomial.polynomial.polyroots
_polymul = np.polynomial.polynomial.polymul


def _trim(coeffs) -> np.ndarray:
    a = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.flatnonzero(np.abs(a) > 0)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return a[: nz[-1] + 1]


@dataclass(frozen=True)
class RationalPoly:
    """Quotient of polynomials, ascending coefficients in z."""

    num: np.ndarray
    den: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if np.all(num == 0):
            raise ValidationError("psi is identically zero")
        if np.all(den == 0):
            raise ValidationError("denominator is identically zero")
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __call__(self, z):
        return _polyval(z, self.num) / _polyval(z, self.den)

    def zeros(self) -> np.ndarray:
        return _polyroots(self.num) if self.num.size > 1 else np.empty(0, complex)

    def poles(self) -> np.ndarray:
        return _polyroots(self.den) if self.den.size > 1 else np.empty(0, complex)

    def add_pole_at_origin(self, c: complex) -> "RationalPoly":
        """psi(z) + c/z as a single quotient."""
        num = _polymul(np.array([0.0, 1.0]), self.num)
        cden = c * self.den
        n = max(num.size, cden.size)
        merged = np.zeros(n, dtype=complex)
        merged[: num.size] += num
        merged[: cden.size] += cden
        return RationalPoly(merged, _polymul(np.array([0.0, 1.0]), self.den))

    def to_json(self) -> dict:
        pack = lambda a: [[float(c.real), float(c.imag)] for c in a]
        return {"num": pack(self.num), "den": pack(self.den)}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalPoly":
        if not isinstance(obj, dict) or not set(obj) <= {"num", "den"}:
            raise ValidationError('psi JSON must be {"num": [[re,im],...], "den": [[re,im],...]}')
        num = [complex(re, im) for re, im in obj["num"]]
        den = [complex(re, im) for re, im in obj.get("den", [[1.0, 0.0]])]
        return cls(np.array(num), np.array(den))


class BeltramiSpec:
    """Symbolic descriptor of a Beltrami coefficient on the unit disk.

    Variants: a constant, a Teichmuller-type coefficient k|psi|/psi for a
    rational psi (simple poles such as c/z allowed), a harmonic coefficient
    given by the tail of a Schwarzian at infinity, and raw polar grid
    samples.  The essential sup norm must stay below 1.
    """

    __slots__ = ("kind", "value", "k", "psi", "tail", "grid_values", "grid_r", "support")

    def __init__(self, kind, *, value=0j, k=0.0, psi=None, tail=None,
                 grid_values=None, grid_r=None, support=None):
        self.kind = kind
        self.value = complex(value)
        self.k = float(k)
        self.psi = psi
        self.tail = tail
        self.grid_values = grid_values
        self.grid_r = grid_r
        self.support = support
        self._validate()

    @classmethod
    def constant(cls, value) -> "BeltramiSpec":
        return cls("constant", value=value)

    @classmethod
    def teichmuller(cls, k: float, psi: RationalPoly) -> "BeltramiSpec":
        return cls("teichmuller", k=k, psi=psi)

    @classmethod
    def harmonic(cls, tail) -> "BeltramiSpec":
        t = np.atleast_1d(np.asarray(tail, dtype=complex))
        t.setflags(write=False)
        return cls("harmonic", tail=t)

    @classmethod
    def grid_sample(cls, values, r_nodes) -> "BeltramiSpec":
        v = np.asarray(values, dtype=complex)
        r = np.asarray(r_nodes, dtype=float)
        if v.ndim != 2 or v.shape[0] != r.size:
            raise ValidationError("grid values must be (len(r), n_theta)")
        return cls("grid_sample", grid_values=v, grid_r=r)

    def _validate(self):
        if self.kind == "constant":
            if abs(self.value) >= 1.0:
                raise ValidationError("|mu| must be < 1")
        elif self.kind == "teichmuller":
            if not 0.0 < self.k < 1.0:
                raise ValidationError("Teichmuller dilatation k must lie in (0, 1)")
            if not isinstance(self.psi, RationalPoly):
                raise ValidationError("Teichmuller variant needs a RationalPoly psi")
        elif self.kind == "harmonic":
            if self.tail is None:
                raise ValidationError("harmonic variant needs tail coefficients")
            if self.sup_norm() >= 1.0:
                raise ValidationError("harmonic coefficient has sup norm >= 1")
        elif self.kind == "grid_sample":
            if np.max(np.abs(self.grid_values)) >= 1.0:
                raise ValidationError("grid samples must stay below modulus 1")
        else:
            raise ValidationError(f"unknown Beltrami variant {self.kind!r}")

    # -- evaluation ---------------------------------------------------

    def _nu_eval(self, z):
        """Harmonic variant: nu(z) = (1/2)(1-|z|^2)^2 sum tail[q] conj(z)^q."""
        z = np.asarray(z, dtype=complex)
        poly = _polyval(np.conj(z), self.tail)
        return 0.5 * (1.0 - np.abs(z) ** 2) ** 2 * poly

    def sup_norm(self) -> float:
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "teichmuller":
            return self.k
        if self.kind == "harmonic":
            r = np.linspace(0.0, 0.999, 400)
            t = np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False))
            vals = np.abs(self._nu_eval(np.outer(r, t)))
            return float(vals.max())
        return float(np.max(np.abs(self.grid_values)))

    def mu_star(self, z):
        """Normalized coefficient mu/||mu||_oo evaluated at points z."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "constant":
            v = self.value / abs(self.value) if self.value != 0 else 0.0
            return np.full(z.shape, v, dtype=complex)
        if self.kind == "teichmuller":
            num = _polyval(z, self.psi.num)
            den = _polyval(z, self.psi.den)
            vals = num * np.conj(den)  # psi = num/den, conj(psi)*|den|^2/...
            mod = np.abs(vals)
            out = np.zeros_like(vals)
            ok = mod > 0
            out[ok] = np.conj(vals[ok]) / mod[ok]
            return out
        if self.kind == "harmonic":
            nu = self._nu_eval(z)
            norm = self.sup_norm()
            return nu / norm if norm > 0 else nu
        raise ValidationError("grid samples have no pointwise evaluator")

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        pack = lambda a: [[float(c.real), float(c.imag)] for c in np.atleast_1d(a)]
        if self.kind == "constant":
            return {"type": "constant", "value": [self.value.real, self.value.imag]}
        if self.kind == "teichmuller":
            return {"type": "teichmuller", "k": self.k, "psi": self.psi.to_json()}
        if self.kind == "harmonic":
            return {"type": "harmonic", "tail": pack(self.tail)}
        return {
            "type": "grid_sample",
            "r": [float(x) for x in self.grid_r],
            "values": [pack(row) for row in self.grid_values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BeltramiSpec":
        if not isinstance(obj, dict) or "type" not in obj:
            raise ValidationError("Beltrami JSON needs a 'type' tag")
        kind = obj["type"]
        allowed = {
            "constant": {"type", "value"},
            "teichmuller": {"type", "k", "psi"},
            "harmonic": {"type", "tail"},
            "grid_sample": {"type", "r", "values"},
        }
        if kind not in allowed:
            raise ValidationError(f"unknown Beltrami type {kind!r}")
        extra = set(obj) - allowed[kind]
        if extra:
            raise ValidationError(f"unknown Beltrami fields {sorted(extra)}")
        if kind == "constant":
            re, im = obj["value"]
            return cls.constant(complex(re, im))
        if kind == "teichmuller":
            return cls.teichmuller(obj["k"], RationalPoly.from_json(obj["psi"]))
        if kind == "harmonic":
            return cls.harmonic([complex(re, im) for re, im in obj["tail"]])
        values = [[complex(re, im) for re, im in row] for row in obj["values"]]
        return cls.grid_sample(values, obj["r"])


@dataclass(frozen=True)
class MomentVector:
    """Moments c_p = (1/pi) integral mu*(z) e_p(z) dxdy for a basis e_p."""

    c: np.ndarray
    basis: str = "monomial"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def to_csv_rows(self):
        return [(p, v.real, v.imag) for p, v in enumerate(self.c)]


def _teichmuller_breaks(psi: RationalPoly):
    pts = np.concatenate([psi.zeros(), psi.poles()])
    radial, angular = [], []
    for z in pts:
        r = abs(z)
        if r < 1e-12 or r > 1.0 + 1e-9:
            continue
        angular.append(float(np.angle(z) % (2.0 * np.pi)))
        if r < 1.0 - 1e-9:
            radial.append(r)
    return radial, angular


def _quad_moments(mu: BeltramiSpec, powers, tol: float) -> np.ndarray:
    """(1/pi) integral mu*(z) z^p dxdy for each p in powers (p >= -1)."""
    powers = np.asarray(powers, dtype=int)

    def fvec(z):
        ms = mu.mu_star(z)
        return np.stack([ms * z ** p for p in powers])

    if mu.kind == "teichmuller":
        radial, angular = _teichmuller_breaks(mu.psi)
    else:
        radial, angular = [], []
    if angular:
        vals, _ = disk_quadrature_adaptive(
            fvec, radial_breaks=radial, angular_breaks=angular, tol=tol * np.pi
        )
    else:
        deg = 0
        if mu.kind == "teichmuller":
            deg = mu.psi.num.size + mu.psi.den.size
        harmonics = int(np.max(np.abs(powers))) + deg
        vals = disk_quadrature_smooth(
            fvec,
            radial_breaks=radial,
            tol=tol * np.pi,
            min_theta=max(64, 2 * harmonics + 16),
        )
    return vals / np.pi


def _grid_moments(mu: BeltramiSpec, powers) -> np.ndarray:
    """Trapezoid moments straight off the stored polar grid (no refinement)."""
    r = mu.grid_r
    v = mu.grid_values
    ntheta = v.shape[1]
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    z = r[:, None] * np.exp(1j * theta)[None, :]
    norm = np.max(np.abs(v))
    vstar = v / norm if norm > 0 else v
    out = []
    for p in powers:
        integrand = vstar * z ** p * r[:, None]
        ang = integrand.sum(axis=1) * (2.0 * np.pi / ntheta)
        out.append(np.trapz(ang, r) / np.pi)
    return np.asarray(out)


def harmonic_tail_moments(tail, powers) -> np.ndarray:
    """Moments (1/pi) integral nu(z) z^p dxdy of nu = (1/2)(1-|z|^2)^2 T(conj z).

    Exact: the angular integral selects the matching power of conj(z) and
    the radial factor integrates to 1/((p+1)(p+2)(p+3)).
    """
    t = np.atleast_1d(np.asarray(tail, dtype=complex))
    out = np.zeros(len(list(powers)), dtype=complex)
    for i, p in enumerate(powers):
        if 0 <= p < t.size:
            out[i] = t[p] / ((p + 1.0) * (p + 2.0) * (p + 3.0))
    return out


def _raw_moments(mu: BeltramiSpec, powers, tol: float = DEFAULT_MOMENT_TOL) -> np.ndarray:
    """Unnormalized moments (1/pi) integral mu(z) z^p dxdy."""
    powers = list(powers)
    if mu.kind == "constant":
        return np.array([mu.value if p == 0 else 0.0 for p in powers], dtype=complex)
    if mu.kind == "harmonic":
        return harmonic_tail_moments(mu.tail, powers)
    if mu.kind == "grid_sample":
        return _grid_moments(mu, powers) * np.max(np.abs(mu.grid_values))
    return mu.k * _quad_moments(mu, powers, tol)


def disk_moments(mu: BeltramiSpec, P: int, tol: float = DEFAULT_MOMENT_TOL) -> MomentVector:
    """Normalized monomial moments c_p, p = 0..P, of mu* = mu/||mu||_oo.

    Constant and harmonic variants use closed forms; Teichmuller variants
    use adaptive polar quadrature with panel boundaries through every zero
    and pole of psi.
    """
    if P < 0:
        raise ValidationError("P must be >= 0")
    if mu.support is not None and getattr(mu.support, "kind", "unit_disk") != "unit_disk":
        raise ValidationError("disk moments require unit disk support")
    norm = mu.sup_norm()
    if norm == 0.0:
        return MomentVector(np.zeros(P + 1, dtype=complex))
    raw = _raw_moments(mu, range(P + 1), tol)
    return MomentVector(raw / norm)


def _hankel_form(c: np.ndarray, N: int, label: str) -> SymmetricForm:
    idx = np.arange(1, N + 1, dtype=float)
    m, n = np.meshgrid(idx, idx, indexing="ij")
    B = np.sqrt(m * n) * c[(m + n - 2).astype(int)]
    B = np.asarray(B, dtype=complex)
    iu = np.triu_indices(N, k=1)
    B[iu[1], iu[0]] = B[iu]
    return SymmetricForm(B=B, order=N, label=label)


def _clip_unit(est: NormEstimate, slack: float = 1e-6) -> NormEstimate:
    if est.value > 1.0 + slack:
        raise InvariantViolation(
            f"alpha estimate {est.value} exceeds 1 beyond numerical slack"
        )
    history = tuple((k, min(v, 1.0)) for k, v in est.history)
    return NormEstimate(
        value=min(est.value, 1.0),
        order=est.order,
        history=history,
        converged=est.converged,
        tolerance=est.tolerance,
    )


def alpha_functional(
    mu: BeltramiSpec,
    N: int = DEFAULT_ALPHA_ORDER,
    tol: float = DEFAULT_MOMENT_TOL,
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE,
) -> NormEstimate:
    """Extremal pairing sup |<mu*, omega^2>|/pi over the truncated sphere.

    Computed as the norm of the Hankel form B[m][n] = sqrt(mn) c_{m+n-2};
    the history over nested truncations yields certified lower bounds, and
    the value always lies in [0, 1].
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    norm = mu.sup_norm()
    if norm == 0.0:
        return NormEstimate(0.0, N, tuple((k, 0.0) for k in range(1, N + 1)), True,
                            norm_tolerance)
    c = disk_moments(mu, 2 * N - 2, tol=tol).c
    est = form_norm(_hankel_form(c, N, "alpha-Hankel"), tolerance=norm_tolerance)
    return _clip_unit(est)


def strengthened_bound(k: float, alpha: float) -> float:
    """Upper bound k (k + alpha) / (1 + alpha k) for the Grunsky norm.

    Strictly below k when alpha < 1; equals k when alpha = 1; equals k^2
    when alpha = 0.
    """
    if not 0.0 <= k < 1.0:
        raise ValidationError("k must lie in [0, 1)")
    if not -1e-12 <= alpha <= 1.0 + 1e-12:
        raise ValidationError("alpha must lie in [0, 1]")
    a = min(max(alpha, 0.0), 1.0)
    return k * (k + a) / (1.0 + a * k)


@dataclass(frozen=True)
class BoundReport:
    """Two-sided check alpha*k <= kappa_N <= k(k+alpha)/(1+alpha k)."""

    kappa: float
    k: float
    alpha: float
    lower: float
    upper: float
    epsilon: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "k": self.k,
            "alpha": self.alpha,
            "lower": self.lower,
            "upper": self.upper,
            "epsilon": self.epsilon,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "ok": self.ok,
        }


def bound_check(
    f: LaurentFunction,
    mu: BeltramiSpec,
    N: int = DEFAULT_ALPHA_ORDER,
    epsilon: Optional[float] = None,
) -> BoundReport:
    """Check the dilatation bounds for a declared extension mu of f.

    The caller asserts that mu extends f; the lower bound alpha*k applies
    to Teichmuller-type (and constant) coefficients.  epsilon defaults to
    5 k^2, the first-order truncation allowance.
    """
    k = mu.sup_norm()
    if epsilon is None:
        epsilon = 5.0 * k * k
    kappa = form_norm(build_form(series_log_ratio(f.pad(N), N))).value
    alpha = alpha_functional(mu, N).value if k > 0 else 0.0
    lower = alpha * k
    upper = strengthened_bound(k, alpha)
    return BoundReport(
        kappa=kappa,
        k=k,
        alpha=alpha,
        lower=lower,
        upper=upper,
        epsilon=epsilon,
        lower_ok=kappa >= lower - epsilon,
        upper_ok=kappa <= upper + epsilon,
    )


def variational_map(mu: BeltramiSpec, N: int = DEFAULT_ALPHA_ORDER,
                    tol: float = DEFAULT_MOMENT_TOL) -> LaurentFunction:
    """First-order map z + sum b_n z^{-n} induced by a small coefficient mu.

    b_n = (1/pi) integral mu(w) w^{n-1} dudv for n >= 1; the constant term
    comes from the -1/w part of the variational kernel.  The returned map
    deviates from the exact solution by O(||mu||^2).
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if mu.sup_norm() == 0.0:
        return LaurentFunction.identity(N)
    raw = _raw_moments(mu, range(-1, N), tol)
    b = np.concatenate([[raw[0]], raw[1:]])
    return LaurentFunction(1.0, b)


@dataclass(frozen=True)
class MoserReport:
    """Certificate that a pole-perturbed coefficient pushes the bound below k."""

    k: float
    c: complex
    alpha: float
    upper: float
    strict: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c": [self.c.real, self.c.imag],
            "alpha": self.alpha,
            "upper": self.upper,
            "strict": self.strict,
        }


def moser_approximant(
    psi: RationalPoly,
    k: float,
    c: complex,
    N: int = DEFAULT_ALPHA_ORDER,
    tol: float = DEFAULT_MOMENT_TOL,
):
    """Teichmuller coefficient for psi_c = psi + c/z with its bound report.

    The added simple pole at the origin forces alpha < 1 and hence a
    strict upper bound below k; the report records both quantities.
    """
    c = complex(c)
    if c == 0:
        raise ValidationError("pole coefficient c must be nonzero")
    poles = psi.poles()
    if poles.size and np.min(np.abs(poles)) <= 1.0 + 1e-9:
        raise ValidationError("psi must be holomorphic on the closed unit disk")
    psi_c = psi.add_pole_at_origin(c)
    spec = BeltramiSpec.teichmuller(k, psi_c)
    alpha = alpha_functional(spec, N, tol=tol).value
    upper = strengthened_bound(k, alpha)
    report = MoserReport(k=k, c=c, alpha=alpha, upper=upper, strict=bool(upper < k))
    return spec, report

"""Truncated series algebra and the bivariate logarithmic kernel expansion.

Two series types are exchanged throughout the library:

* :class:`TaylorSeries` -- a plain truncated expansion ``sum a[j] x^j`` in a
  formal variable ``x``.  The variable may stand for ``z`` (expansion at 0)
  or for ``1/z`` (expansion at infinity); callers track the meaning, the
  algebra is identical.
* :class:`LaurentFunction` -- a hydrodynamically normalized map
  ``f(z) = c z + b0 + b1/z + b2/z^2 + ...`` with ``c > 0``.  Coefficients
  beyond the declared order are exactly zero, so every operation below is
  exact for polynomial-in-1/z inputs.

The central operation is :func:`series_log_ratio`, which expands

    -log((f(z) - f(zeta)) / (z - zeta)) = sum a_mn z^{-m} zeta^{-n}

truncated at total degree 2N, producing the coefficient matrix ``a_mn``.
:func:`kernel_oracle_sampling` recovers the same matrix by sampling the
left-hand side on two circles and applying a 2-D discrete Fourier
transform; agreement of the two routes certifies the series engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import BranchWindingError, OrderUnderflowError, ValidationError

__all__ = [
    "TaylorSeries",
    "LaurentFunction",
    "KernelMatrix",
    "series_log_ratio",
    "kernel_oracle_sampling",
    "compose_at_infinity",
    "revert_at_infinity",
]


class TaylorSeries:
    """Truncated power series ``sum_{j<=order} a[j] x^j``.

    Binary operations truncate to the smaller operand order; coefficients
    above the declared order are unknown, not zero.
    """

    __slots__ = ("a",)

    def __init__(self, coeffs) -> None:
        a = np.array(coeffs, dtype=complex)
        if a.ndim != 1 or a.size == 0:
            raise ValidationError("TaylorSeries needs a 1-D, non-empty coefficient list")
        if not np.all(np.isfinite(a)):
            raise ValidationError("TaylorSeries coefficients must be finite")
        a.setflags(write=False)
        self.a = a

    @property
    def order(self) -> int:
        return self.a.size - 1

    @classmethod
    def zero(cls, order: int) -> "TaylorSeries":
        return cls(np.zeros(order + 1))

    @classmethod
    def one(cls, order: int) -> "TaylorSeries":
        a = np.zeros(order + 1, dtype=complex)
        a[0] = 1.0
        return cls(a)

    @classmethod
    def variable(cls, order: int) -> "TaylorSeries":
        a = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            a[1] = 1.0
        return cls(a)

    def truncate(self, order: int) -> "TaylorSeries":
        """Cut or zero-pad to the given order.

        Padding asserts that the dropped coefficients are exactly zero,
        which holds for the polynomial data used throughout this package.
        """
        if order < 0:
            raise ValidationError("order must be >= 0")
        if order <= self.order:
            return TaylorSeries(self.a[: order + 1])
        a = np.zeros(order + 1, dtype=complex)
        a[: self.a.size] = self.a
        return TaylorSeries(a)

    def __add__(self, other):
        if np.isscalar(other):
            a = self.a.copy()
            a[0] += other
            return TaylorSeries(a)
        n = min(self.order, other.order)
        return TaylorSeries(self.a[: n + 1] + other.a[: n + 1])

    __radd__ = __add__

    def __neg__(self):
        return TaylorSeries(-self.a)

    def __sub__(self, other):
        if np.isscalar(other):
            a = self.a.copy()
            a[0] -= other
            return TaylorSeries(a)
        return self + (-other)

    def __mul__(self, other):
        if np.isscalar(other):
            return TaylorSeries(self.a * other)
        n = min(self.order, other.order)
        return TaylorSeries(np.convolve(self.a[: n + 1], other.a[: n + 1])[: n + 1])

    __rmul__ = __mul__

    def reciprocal(self) -> "TaylorSeries":
        """Series of 1/self; requires a nonzero constant term."""
        a = self.a
        if a[0] == 0:
            raise ValidationError("reciprocal needs a nonzero constant term")
        r = np.zeros_like(a)
        r[0] = 1.0 / a[0]
        for k in range(1, a.size):
            r[k] = -np.dot(a[1 : k + 1], r[k - 1 :: -1]) / a[0]
        return TaylorSeries(r)

    def sqrt(self) -> "TaylorSeries":
        """Principal square root; requires a nonzero constant term."""
        a = self.a
        if a[0] == 0:
            raise ValidationError("sqrt needs a nonzero constant term")
        s = np.zeros_like(a)
        s[0] = np.sqrt(complex(a[0]))
        for k in range(1, a.size):
            conv = np.dot(s[1:k], s[k - 1 : 0 : -1]) if k >= 2 else 0.0
            s[k] = (a[k] - conv) / (2.0 * s[0])
        return TaylorSeries(s)

    def deriv(self) -> "TaylorSeries":
        if self.order == 0:
            return TaylorSeries([0.0])
        return TaylorSeries(self.a[1:] * np.arange(1, self.a.size))

    def compose(self, inner: "TaylorSeries") -> "TaylorSeries":
        """Series of self(inner(x)); the inner series must vanish at 0."""
        if inner.a[0] != 0:
            raise ValidationError("composition requires an inner series without constant term")
        n = inner.order
        out = TaylorSeries.zero(n)
        for c in self.a[min(self.order, n) :: -1]:
            out = out * inner + c
        return out

    def shift(self, k: int) -> "TaylorSeries":
        """Multiply by x^k (order grows by k)."""
        a = np.zeros(self.a.size + k, dtype=complex)
        a[k:] = self.a
        return TaylorSeries(a)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.a)

    def __repr__(self) -> str:
        return f"TaylorSeries(order={self.order}, a={np.array2string(self.a, precision=6)})"


class LaurentFunction:
    """Normalized expansion ``f(z) = leading*z + b[0] + sum_{n>=1} b[n] z^{-n}``.

    ``leading`` must be positive.  Coefficients beyond ``order`` are exactly
    zero by declared truncation, so :meth:`pad` is lossless.
    """

    __slots__ = ("leading", "b")

    def __init__(self, leading: float, b) -> None:
        lead = float(leading)
        if not np.isfinite(lead) or lead <= 0:
            raise ValidationError("leading coefficient must be positive and finite")
        arr = np.array(b, dtype=complex)
        if arr.ndim != 1 or arr.size < 2:
            raise ValidationError("b must hold at least b0 and b1 (order >= 1)")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("coefficients must be finite")
        arr.setflags(write=False)
        self.leading = lead
        self.b = arr

    @property
    def order(self) -> int:
        return self.b.size - 1

    @classmethod
    def identity(cls, order: int = 1) -> "LaurentFunction":
        return cls(1.0, np.zeros(max(order, 1) + 1))

    def pad(self, order: int) -> "LaurentFunction":
        if order <= self.order:
            return self
        b = np.zeros(order + 1, dtype=complex)
        b[: self.b.size] = self.b
        return LaurentFunction(self.leading, b)

    def truncate(self, order: int) -> "LaurentFunction":
        if order < 1:
            raise ValidationError("order must be >= 1")
        if order >= self.order:
            return self.pad(order)
        return LaurentFunction(self.leading, self.b[: order + 1])

    def tail_series(self, order: int | None = None) -> TaylorSeries:
        """Series A(w) with f(z) = z*A(w), w = 1/z: A = leading + b0 w + b1 w^2 + ..."""
        n = self.order if order is None else order
        a = np.zeros(n + 1, dtype=complex)
        a[0] = self.leading
        m = min(n, self.b.size)
        a[1 : m + 1] = self.b[:m]
        return TaylorSeries(a)

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        val = self.leading * zz + np.polynomial.polynomial.polyval(1.0 / zz, self.b)
        return val if zz.ndim else complex(val)

    def deriv_eval(self, z, k: int = 1):
        """Exact k-th derivative (k = 0..3) of the truncated rational map."""
        z = np.asarray(z, dtype=complex)
        n = np.arange(1, self.b.size)
        bn = self.b[1:]
        if k == 0:
            return self(z)
        zo = z[..., None] if z.ndim else z
        if k == 1:
            val = self.leading - np.sum(n * bn * zo ** (-n - 1), axis=-1)
        elif k == 2:
            val = np.sum(n * (n + 1) * bn * zo ** (-n - 2), axis=-1)
        elif k == 3:
            val = -np.sum(n * (n + 1) * (n + 2) * bn * zo ** (-n - 3), axis=-1)
        else:
            raise ValidationError("derivative order must be 0..3")
        return val if z.ndim else complex(val)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentFunction):
            return NotImplemented
        n = max(self.order, other.order)
        return self.leading == other.leading and np.array_equal(
            self.pad(n).b, other.pad(n).b
        )

    def __hash__(self):
        return hash((self.leading, self.b.tobytes()))

    def to_json(self) -> dict:
        return {
            "leading": self.leading,
            "b": [[float(c.real), float(c.imag)] for c in self.b],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentFunction":
        if not isinstance(obj, dict) or set(obj) != {"leading", "b"}:
            raise ValidationError('LaurentFunction JSON must be {"leading":..., "b":[[re,im],...]}')
        b = [complex(re, im) for re, im in obj["b"]]
        return cls(obj["leading"], b)

    def __repr__(self) -> str:
        return f"LaurentFunction(leading={self.leading}, order={self.order})"


@dataclass(frozen=True)
class KernelMatrix:
    """Truncated symmetric matrix of (generalized) kernel coefficients.

    ``entries[m-1][n-1]`` holds ``a_mn`` in the disk case; in the quasidisk
    case it holds the generalized coefficient divided by sqrt(mn), so that
    the quadratic-form weights are uniform across both kinds.
    """

    entries: np.ndarray
    order: int
    kind: str = "classical"

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.shape != (self.order, self.order):
            raise ValidationError("entries must be an order x order matrix")
        if self.kind not in ("classical", "generalized"):
            raise ValidationError("kind must be 'classical' or 'generalized'")
        # enforce bit-exact symmetry by mirroring the upper triangle
        iu = np.triu_indices(self.order, k=1)
        e[iu[1], iu[0]] = e[iu]
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def _bivariate_mul(a: np.ndarray, b: np.ndarray, degree: int, mask: np.ndarray) -> np.ndarray:
    """Product of bivariate series truncated at total degree ``degree``."""
    c = convolve2d(a, b)[: degree + 1, : degree + 1]
    c[mask] = 0.0
    return c


def series_log_ratio(f: LaurentFunction, N: int) -> KernelMatrix:
    """Coefficients a_mn of -log((f(z)-f(zeta))/(z-zeta)), 1 <= m,n <= N.

    The difference quotient equals c*(1 + T(z,zeta)) with a bivariate tail
    T assembled from the identity
    (z^{-k} - zeta^{-k})/(z - zeta) = -sum_{j<k} z^{j-k} zeta^{-j-1};
    the logarithm is expanded as log(1+T) truncated at total degree 2N.
    The constant log(c) term is discarded; it carries no a_mn with m,n >= 1.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if N > f.order:
        raise OrderUnderflowError(
            f"requested order {N} exceeds declared coefficient order {f.order}"
        )
    degree = 2 * N
    T = np.zeros((degree + 1, degree + 1), dtype=complex)
    c = f.leading
    for n in range(1, min(f.order, degree - 1) + 1):
        bn = f.b[n]
        if bn == 0:
            continue
        coef = -bn / c
        for i in range(1, n + 1):
            j = n + 1 - i
            if i <= degree and j <= degree:
                T[i, j] += coef
    i_idx, j_idx = np.indices(T.shape)
    mask = i_idx + j_idx > degree
    T[mask] = 0.0

    # -log(1+T) = sum_{p>=1} (-1)^p T^p / p; T has total degree >= 2, so p <= N
    L = -T.copy()
    power = T
    for p in range(2, N + 1):
        power = _bivariate_mul(power, T, degree, mask)
        L += ((-1) ** p / p) * power

    return KernelMatrix(entries=L[1 : N + 1, 1 : N + 1], order=N, kind="classical")


def _continuous_log(W: np.ndarray) -> np.ndarray:
    """Branch-continuous log over a sampling grid, anchored at index (0, 0).

    The branch is propagated by angle increments along row 0 and then down
    each column.  Raises if any closed sampling loop winds around 0.
    """
    if np.min(np.abs(W)) == 0.0:
        raise BranchWindingError("f(z) - f(zeta) vanishes at a sampled pair; increase radii")
    for axis in (0, 1):
        ratios = np.roll(W, -1, axis=axis) / W
        winding = np.sum(np.angle(ratios), axis=axis) / (2.0 * np.pi)
        if np.any(np.abs(winding) > 0.5):
            raise BranchWindingError("log branch winds along a sampling loop; increase radii")
    phase = np.empty(W.shape, dtype=float)
    row0 = np.angle(W[0, 0]) + np.concatenate(
        ([0.0], np.cumsum(np.angle(W[0, 1:] / W[0, :-1])))
    )
    col_inc = np.angle(W[1:, :] / W[:-1, :])
    phase[0, :] = row0
    phase[1:, :] = row0[None, :] + np.cumsum(col_inc, axis=0)
    return np.log(np.abs(W)) + 1j * phase


def kernel_oracle_sampling(
    f: LaurentFunction,
    N: int,
    r1: float = 3.0,
    r2: float = 3.0,
    S: int | None = None,
) -> KernelMatrix:
    """DFT-based oracle for :func:`series_log_ratio`.

    Samples -log((f(z)-f(zeta))/(z-zeta)) at z = r1 e^{2 pi i j/S},
    zeta = r2 e^{2 pi i l/S}, takes a 2-D inverse DFT and rescales by
    r1^m r2^n.  Independent of the bivariate series path: its only series
    ingredient is pointwise evaluation of f.
    """
    if S is None:
        S = 8 * N
    if S < 4 * N:
        raise ValidationError("need at least 4N samples per circle")
    if min(r1, r2) <= 1.0:
        raise ValidationError("sampling radii must exceed 1")
    ang = 2.0 * np.pi * np.arange(S) / S
    z = r1 * np.exp(1j * ang)
    zeta = r2 * np.exp(1j * ang)
    Z, H = np.meshgrid(z, zeta, indexing="ij")
    num = f(Z) - f(H)
    den = Z - H
    W = np.empty_like(num)
    diag = np.abs(den) < 1e-13 * max(r1, r2)
    W[~diag] = num[~diag] / den[~diag]
    if np.any(diag):
        # coincident sample points: the difference quotient extends as f'(z)
        W[diag] = f.deriv_eval(Z[diag])
    V = -_continuous_log(W)
    A = np.fft.ifft2(V)
    m = np.arange(1, N + 1)
    scale = np.outer(r1 ** m, r2 ** np.arange(1, N + 1).astype(float))
    entries = A[1 : N + 1, 1 : N + 1] * scale
    return KernelMatrix(entries=entries, order=N, kind="classical")


def _negative_power_tail(b: np.ndarray, g: LaurentFunction, N: int) -> np.ndarray:
    """Coefficients over w^0..w^N of sum_{n>=1} b[n] * g(z)^{-n}, w = 1/z."""
    Ag = g.tail_series(N)
    R = Ag.reciprocal()  # 1/g = w * R(w)
    out = np.zeros(N + 1, dtype=complex)
    Rp = TaylorSeries.one(N)
    for n in range(1, min(b.size - 1, N) + 1):
        Rp = (Rp * R).truncate(max(N - n, 0))
        if b[n] != 0:
            out[n : N + 1] += b[n] * Rp.a[: N - n + 1]
    return out


def compose_at_infinity(f: LaurentFunction, g: LaurentFunction, N: int) -> LaurentFunction:
    """Truncated expansion of f(g(z)) about infinity to order N.

    Exact when both inputs are exact polynomial-in-1/z data.  Both declared
    orders must reach N; pad() the inputs first if their tails are known to
    be zero.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if f.order < N or g.order < N:
        raise OrderUnderflowError(
            f"composition to order {N} needs both inputs declared to order >= {N} "
            f"(got {f.order} and {g.order}); pad exact inputs first"
        )
    out = np.zeros(N + 1, dtype=complex)
    out[0] = f.b[0] + f.leading * g.b[0]
    out[1:] += f.leading * g.b[1 : N + 1]
    out += _negative_power_tail(f.b, g, N)
    return LaurentFunction(f.leading * g.leading, out)


def revert_at_infinity(f: LaurentFunction, N: int) -> LaurentFunction:
    """Laurent expansion of the inverse map, f(psi(u)) = u, to order N.

    Fixed-point iteration psi <- (u - b0 - sum b_n psi^{-n})/c gains one
    coefficient per pass; N + 2 passes pin all coefficients through order N.
    """
    c = f.leading
    b = np.zeros(N + 1, dtype=complex)
    b[0] = -f.b[0] / c
    psi = LaurentFunction(1.0 / c, b)
    for _ in range(N + 2):
        s = _negative_power_tail(f.b, psi, N)
        nb = np.zeros(N + 1, dtype=complex)
        nb[0] = -f.b[0] / c
        nb[1:] = -s[1:] / c
        new = LaurentFunction(1.0 / c, nb)
        if new == psi:
            break
        psi = new
    return psi

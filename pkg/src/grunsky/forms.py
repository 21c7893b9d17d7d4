"""Quadratic forms on the truncated l^2 sphere and their norms.

The central fact: for a complex symmetric matrix B, the supremum of
|x^T B x| over complex unit vectors equals the largest singular value of B
(Takagi factorization).  ``form_norm`` computes that value together with
the history of the nested leading principal submatrices, which is a
nondecreasing sequence of lower bounds for the untruncated norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, OrderUnderflowError, ValidationError
from .series import KernelMatrix, LaurentFunction, series_log_ratio

__all__ = [
    "SymmetricForm",
    "NormEstimate",
    "build_form",
    "form_norm",
    "form_eval",
    "norm_convergence",
    "DEFAULT_NORM_TOLERANCE",
]

DEFAULT_NORM_TOLERANCE = 1e-10

# dense SVD below this size; power iteration on B*B above
_DENSE_LIMIT = 64


@dataclass(frozen=True)
class SymmetricForm:
    """Finite complex symmetric matrix acting as x -> sum B[m][n] x_m x_n."""

    B: np.ndarray
    order: int
    label: str = ""

    def __post_init__(self):
        B = np.array(self.B, dtype=complex)
        if B.shape != (self.order, self.order):
            raise ValidationError("B must be an order x order matrix")
        if not np.all(np.isfinite(B)):
            raise ValidationError("form entries must be finite")
        if self.order and not np.array_equal(B, B.T):
            raise ValidationError("form matrix must be symmetric")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)


@dataclass(frozen=True)
class NormEstimate:
    """Supremum estimate with its truncation history.

    ``history`` holds (order, value) pairs for nested truncations; the
    values are nondecreasing and the last one equals ``value``.
    """

    value: float
    order: int
    history: tuple
    converged: bool
    tolerance: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "order": self.order,
            "history": [[int(k), float(v)] for k, v in self.history],
            "converged": self.converged,
        }


def build_form(K: KernelMatrix) -> SymmetricForm:
    """Weight kernel coefficients into the Grunsky quadratic form.

    Both kinds store entries scaled so that B[m][n] = sqrt(mn) * entries,
    which yields sqrt(mn)*a_mn classically and the generalized coefficient
    itself on quasidisks.
    """
    n = K.order
    idx = np.arange(1, n + 1, dtype=float)
    weights = np.sqrt(np.outer(idx, idx))
    label = "Grunsky" if K.kind == "classical" else "generalized Grunsky"
    return SymmetricForm(B=weights * K.entries, order=n, label=label)


def _sigma_max_dense(B: np.ndarray) -> float:
    return float(np.linalg.svd(B, compute_uv=False)[0]) if B.size else 0.0


def _sigma_max_power(B: np.ndarray, tol: float = 1e-14, maxiter: int = 20000) -> float:
    """Largest singular value by power iteration on B* B.

    Deterministic start vector; raises instead of returning an
    uncertified value when the iteration cap is reached.
    """
    n = B.shape[0]
    x = np.ones(n, dtype=complex) / np.sqrt(n)
    BH = B.conj().T
    prev = 0.0
    for _ in range(maxiter):
        y = BH @ (B @ x)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        sigma = np.sqrt(norm)
        if abs(sigma - prev) <= tol * max(1.0, sigma):
            return float(np.linalg.norm(B @ x))
        prev = sigma
    raise ConvergenceError("power iteration for the largest singular value did not converge")


def _sigma_max(B: np.ndarray) -> float:
    if B.shape[0] <= _DENSE_LIMIT:
        return _sigma_max_dense(B)
    return _sigma_max_power(B)


def _takagi_maximizer(B: np.ndarray) -> np.ndarray:
    """Unit vector x with |x^T B x| = sigma_max, from the con-eigenproblem.

    Takagi vectors q solve B conj(q) = sigma q; embedding this antilinear
    equation as a real symmetric eigenproblem makes the maximizer x =
    conj(q) computable by a single eigh call.  The phase is fixed so the
    first nonzero entry of x is positive real.
    """
    n = B.shape[0]
    M = np.block([[B.real, B.imag], [B.imag, -B.real]])
    vals, vecs = np.linalg.eigh(M)
    v = vecs[:, -1]
    q = v[:n] + 1j * v[n:]
    q /= np.linalg.norm(q)
    x = np.conj(q)
    nz = np.flatnonzero(np.abs(x) > 1e-12)
    if nz.size:
        x = x * (np.abs(x[nz[0]]) / x[nz[0]])
    return x


def form_norm(
    F: SymmetricForm,
    tolerance: float = DEFAULT_NORM_TOLERANCE,
    return_maximizer: bool = False,
):
    """sup of |x^T B x| over the complex unit sphere, with truncation history.

    Valid because B is complex symmetric (Takagi); computed as the largest
    singular value of each nested leading principal submatrix.
    """
    n = F.order
    values = []
    best = 0.0
    for k in range(1, n + 1):
        sigma = _sigma_max(np.asarray(F.B[:k, :k]))
        # nested suprema are monotone; guard the bit-level wobble of svd
        best = max(best, sigma)
        values.append(best)
    converged = len(values) >= 2 and abs(values[-1] - values[-2]) < tolerance
    estimate = NormEstimate(
        value=values[-1] if values else 0.0,
        order=n,
        history=tuple((k + 1, v) for k, v in enumerate(values)),
        converged=converged,
        tolerance=tolerance,
    )
    if return_maximizer:
        return estimate, _takagi_maximizer(np.asarray(F.B))
    return estimate


def form_eval(F: SymmetricForm, x) -> complex:
    """Value sum B[m][n] x_m x_n of the quadratic form at x."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (F.order,):
        raise ValidationError(f"argument vector must have length {F.order}")
    return complex(x @ F.B @ x)


def norm_convergence(
    f: LaurentFunction,
    orders,
    tolerance: float = DEFAULT_NORM_TOLERANCE,
) -> NormEstimate:
    """Grunsky-norm truncation study kappa_N over a ladder of orders.

    The coefficient matrix is computed once at the largest order; the
    degree filtration (a_mn depends only on b_1..b_{m+n-1}) makes its
    leading submatrices identical to direct lower-order computations.
    """
    orders = [int(k) for k in orders]
    if not orders or any(k < 1 for k in orders):
        raise ValidationError("orders must be positive integers")
    if any(b >= a for a, b in zip(orders[1:], orders)):
        raise ValidationError("orders must be strictly increasing")
    top = orders[-1]
    if top > f.order:
        raise OrderUnderflowError(
            f"largest requested order {top} exceeds declared coefficient order {f.order}"
        )
    B = build_form(series_log_ratio(f, top)).B
    values = []
    best = 0.0
    for k in orders:
        best = max(best, _sigma_max(np.asarray(B[:k, :k])))
        values.append(best)
    converged = len(values) >= 2 and abs(values[-1] - values[-2]) < tolerance
    return NormEstimate(
        value=values[-1],
        order=top,
        history=tuple(zip(orders, values)),
        converged=converged,
        tolerance=tolerance,
    )

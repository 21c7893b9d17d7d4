"""Command line driver: one JSON config per run, deterministic reports.

    grunsky CONFIG.json [--order N] [--tol X] [--out PATH]

The config names one command plus its inputs; flags override the order,
the command's primary tolerance, and the output path.  Default tolerances
may also come from the environment variable GRUNSKY_DEFAULT_TOL.
Precedence: flag > config > environment > built-in.

Exit codes: 0 success, 2 validation error, 3 numerical failure,
4 invariant violation.  Numerical failures propagate the module
diagnostic verbatim on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import beltrami as bl
from . import fredholm as fr
from . import homotopy as ht
from . import quasidomain as qd
from .errors import InvariantViolation, NumericalError, ValidationError
from .forms import build_form, form_norm
from .serialize import csv_text, dumps_json
from .series import LaurentFunction, series_log_ratio

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4

COMMANDS = (
    "coeffs",
    "norm",
    "alpha",
    "bound-check",
    "variational",
    "moser",
    "domain-basis",
    "generalized",
    "fredholm",
    "homotopy",
)

# required / optional top-level fields per command (besides command/output/tolerances)
_FIELDS = {
    "coeffs": ({"function", "order"}, set()),
    "norm": ({"function", "order"}, set()),
    "alpha": ({"beltrami", "order"}, {"domain", "route"}),
    "bound-check": ({"function", "beltrami", "order"}, set()),
    "variational": ({"beltrami", "order"}, set()),
    "moser": ({"beltrami", "pole_coefficient", "order"}, set()),
    "domain-basis": ({"domain", "order"}, set()),
    "generalized": ({"function", "domain", "order"}, set()),
    "fredholm": ({"function", "order"}, {"qL"}),
    "homotopy": ({"function", "grid", "order"}, {"k_known"}),
}

_TOL_KEYS = {"default", "norm", "quadrature", "bound_epsilon", "gram", "ahlfors"}

_CSV_COMMANDS = {"coeffs", "generalized", "domain-basis", "homotopy", "variational",
                 "norm", "alpha"}


class RunConfig:
    """Validated run description; unknown fields are rejected."""

    def __init__(self, raw: dict, order_override=None, tol_override=None,
                 out_override=None):
        if not isinstance(raw, dict):
            raise ValidationError("config must be a JSON object")
        command = raw.get("command")
        if command not in COMMANDS:
            raise ValidationError(f"command must be one of {', '.join(COMMANDS)}")
        required, optional = _FIELDS[command]
        allowed = required | optional | {"command", "output", "tolerances"}
        unknown = set(raw) - allowed
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        missing = required - set(raw)
        if missing:
            raise ValidationError(f"missing config fields: {sorted(missing)}")

        self.command = command
        self.order = int(order_override if order_override is not None else raw.get("order", 16))
        if self.order < 1:
            raise ValidationError("order must be >= 1")

        tols = raw.get("tolerances", {})
        if not isinstance(tols, dict):
            raise ValidationError("tolerances must be an object")
        unknown_tols = set(tols) - _TOL_KEYS
        if unknown_tols:
            raise ValidationError(f"unknown tolerance keys: {sorted(unknown_tols)}")
        self.tolerances = {k: float(v) for k, v in tols.items()}
        if tol_override is not None:
            self.tolerances["default"] = float(tol_override)
        env = os.environ.get("GRUNSKY_DEFAULT_TOL")
        if env is not None and "default" not in self.tolerances:
            self.tolerances["default"] = float(env)

        output = raw.get("output", {})
        if not isinstance(output, dict) or not set(output) <= {"path", "format"}:
            raise ValidationError('output must be {"path": ..., "format": "json"|"csv"}')
        self.out_path = Path(out_override if out_override is not None else output.get("path", "-"))
        self.out_format = output.get("format", "json")
        if self.out_format not in ("json", "csv"):
            raise ValidationError("output format must be json or csv")
        if self.out_format == "csv" and command not in _CSV_COMMANDS:
            raise ValidationError(f"command {command} emits JSON reports only")

        self.function = LaurentFunction.from_json(raw["function"]) if "function" in raw else None
        self.beltrami = bl.BeltramiSpec.from_json(raw["beltrami"]) if "beltrami" in raw else None
        self.domain = qd.DomainSpec.from_json(raw["domain"]) if "domain" in raw else None
        self.route = raw.get("route", "auto")
        if self.route not in ("auto", "direct", "pullback"):
            raise ValidationError("route must be auto, direct or pullback")
        self.qL = float(raw["qL"]) if raw.get("qL") is not None else None
        self.grid = [float(r) for r in raw.get("grid", [])]
        self.k_known = [float(v) for v in raw["k_known"]] if "k_known" in raw else None
        if self.k_known is not None and len(self.k_known) != len(self.grid):
            raise ValidationError("k_known must have the same length as grid")
        if "pole_coefficient" in raw:
            re, im = raw["pole_coefficient"]
            self.pole_coefficient = complex(re, im)
        else:
            self.pole_coefficient = None

    def tol(self, key: str, builtin: float) -> float:
        if key in self.tolerances:
            return self.tolerances[key]
        return self.tolerances.get("default", builtin)


def _matrix_rows(entries: np.ndarray):
    rows = []
    for m in range(entries.shape[0]):
        for n in range(entries.shape[1]):
            v = entries[m, n]
            rows.append((m + 1, n + 1, v.real, v.imag))
    return rows


def _matrix_json(entries: np.ndarray):
    return [[[v.real, v.imag] for v in row] for row in entries]


def _execute(cfg: RunConfig):
    """Run the command; return (payload_dict, csv_header, csv_rows, exit_code)."""
    N = cfg.order
    quad_tol = cfg.tol("quadrature", 1e-9)
    norm_tol = cfg.tol("norm", 1e-10)

    if cfg.command == "coeffs":
        K = series_log_ratio(cfg.function.pad(N), N)
        payload = {"command": "coeffs", "order": N, "kind": K.kind,
                   "entries": _matrix_json(K.entries)}
        return payload, ("m", "n", "re", "im"), _matrix_rows(K.entries), EXIT_OK

    if cfg.command == "norm":
        est = form_norm(build_form(series_log_ratio(cfg.function.pad(N), N)),
                        tolerance=norm_tol)
        payload = {"command": "norm"}
        payload.update(est.to_json())
        return payload, ("order", "value"), list(est.history), EXIT_OK

    if cfg.command == "alpha":
        if cfg.domain is None or isinstance(cfg.domain, qd.UnitDisk):
            est = bl.alpha_functional(cfg.beltrami, N, tol=quad_tol,
                                      norm_tolerance=norm_tol)
        else:
            est = qd.alpha_functional_domain(cfg.beltrami, cfg.domain, N,
                                             method=cfg.route, tol=quad_tol,
                                             norm_tolerance=norm_tol)
        payload = {"command": "alpha"}
        payload.update(est.to_json())
        return payload, ("order", "value"), list(est.history), EXIT_OK

    if cfg.command == "bound-check":
        eps = cfg.tolerances.get("bound_epsilon")
        report = bl.bound_check(cfg.function, cfg.beltrami, N, epsilon=eps)
        payload = {"command": "bound-check"}
        payload.update(report.to_json())
        code = EXIT_OK if report.ok else EXIT_INVARIANT
        return payload, None, None, code

    if cfg.command == "variational":
        f = bl.variational_map(cfg.beltrami, N, tol=quad_tol)
        payload = {"command": "variational"}
        payload.update(f.to_json())
        rows = [("leading", f.leading, 0.0)]
        rows += [(f"b{n}", f.b[n].real, f.b[n].imag) for n in range(f.b.size)]
        return payload, ("coefficient", "re", "im"), rows, EXIT_OK

    if cfg.command == "moser":
        if cfg.beltrami.kind != "teichmuller":
            raise ValidationError("moser needs a teichmuller beltrami spec")
        _, report = bl.moser_approximant(cfg.beltrami.psi, cfg.beltrami.k,
                                         cfg.pole_coefficient, N, tol=quad_tol)
        payload = {"command": "moser"}
        payload.update(report.to_json())
        return payload, None, None, EXIT_OK

    if cfg.command == "domain-basis":
        gram_tol = cfg.tol("gram", 1e-7)
        basis = qd.milin_polynomials(cfg.domain, N, gram_tol=gram_tol)
        payload = {
            "command": "domain-basis",
            "order": N,
            "gram_error": basis.gram_error,
            "polys": [[[c.real, c.imag] for c in p] for p in basis.polys],
        }
        return payload, ("n", "j", "re", "im"), basis.to_csv_rows(), EXIT_OK

    if cfg.command == "generalized":
        K = qd.generalized_coefficients(cfg.function, cfg.domain, N)
        payload = {"command": "generalized", "order": N, "kind": K.kind,
                   "entries": _matrix_json(K.entries)}
        return payload, ("m", "n", "re", "im"), _matrix_rows(K.entries), EXIT_OK

    if cfg.command == "fredholm":
        report = fr.fredholm_eigenvalue(cfg.function, N, qL=cfg.qL,
                                        tol=cfg.tol("ahlfors", 1e-12))
        payload = {"command": "fredholm"}
        payload.update(report.to_json())
        return payload, None, None, EXIT_OK

    if cfg.command == "homotopy":
        k_known = cfg.k_known
        model = None
        if k_known is not None:
            table = dict(zip(cfg.grid, k_known))
            model = lambda r: table[r]
        profile = ht.norm_profile(cfg.function, cfg.grid, N, k_model=model)
        payload = {
            "command": "homotopy",
            "r": [float(r) for r in profile.t_grid],
            "kappa": [float(v) for v in profile.kappa],
            "k_known": None if profile.k_known is None else [float(v) for v in profile.k_known],
            "ratio": None if profile.ratio is None else [float(v) for v in profile.ratio],
            "monotone": profile.monotone,
            "reconstruction_residual": profile.reconstruction_residual,
        }
        return payload, ("r", "kappa", "k_known", "ratio"), profile.to_csv_rows(), EXIT_OK

    raise ValidationError(f"unhandled command {cfg.command}")  # pragma: no cover


def _write(cfg: RunConfig, payload, header, rows) -> None:
    if cfg.out_format == "json":
        text = dumps_json(payload)
    else:
        text = csv_text(header, rows)
    if str(cfg.out_path) == "-":
        sys.stdout.write(text)
    else:
        cfg.out_path.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="grunsky",
        description="Grunsky coefficient operators, norms, extremal functionals "
        "and Fredholm eigenvalue estimates",
    )
    parser.add_argument("config", help="path to a JSON run configuration")
    parser.add_argument("--order", type=int, help="override the truncation order")
    parser.add_argument("--tol", type=float, help="override the default tolerance")
    parser.add_argument("--out", help="override the output path ('-' for stdout)")
    args = parser.parse_args(argv)

    try:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config: {exc}") from exc
        cfg = RunConfig(raw, order_override=args.order, tol_override=args.tol,
                        out_override=args.out)
        payload, header, rows, code = _execute(cfg)
        _write(cfg, payload, header, rows)
        if code != EXIT_OK:
            print("invariant violation: see report", file=sys.stderr)
        return code
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

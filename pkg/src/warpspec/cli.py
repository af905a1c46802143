"""Command-line front end.

Every command prints (or writes) one JSON document
``{"command", "config", "result"}``; ``--format csv`` writes the command's
curve table instead. Exit status: 0 success, 2 theorem hypothesis not
satisfied by the input, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, comparison, radial_ode, warped_metric
from .errors import HypothesisViolation, WarpspecError
from .spaceform import SpaceForm, sine_kappa

DEFAULT_TOL = 1e-10
DEFAULT_GRID_POINTS = 1024
COMMANDS = ("eigen", "compare", "construct-psi", "barta", "cone", "product", "example43")

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    kappa: float = 0.0
    dim: int = 3
    radius: float = 1.0
    tol: float = DEFAULT_TOL
    grid_points: int = DEFAULT_GRID_POINTS
    psi_c: float = 0.1
    output_format: str = "json"
    output_path: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if not 1e-14 < self.tol < 1e-2:
            raise ValueError(f"--tol must lie in (1e-14, 1e-2), got {self.tol:g}")
        if self.grid_points < 64:
            raise ValueError(f"--grid-points must be at least 64, got {self.grid_points}")
        if not self.radius > 0:
            raise ValueError(f"--radius must be positive, got {self.radius:g}")
        if self.dim < 2:
            raise ValueError(f"--dim must be at least 2, got {self.dim}")
        if self.output_format not in ("json", "csv"):
            raise ValueError("--format must be json or csv")
        kappas = [self.kappa] + [self.extra[k] for k in ("model_kappa", "f_kappa", "g_kappa")
                                 if self.extra.get(k) is not None]
        for k in kappas:
            if k > 0 and not self.radius < math.pi / math.sqrt(k):
                raise ValueError(
                    f"kappa={k:g} > 0 needs radius < pi/sqrt(kappa) = {math.pi / math.sqrt(k):.6g}"
                )


def format_number(x) -> str:
    return f"{float(x):.17g}"


def emit_curve(samples, path=None, fmt: str = "csv") -> str:
    """Write ``(t, value)`` rows as CSV (header ``t,value``) or a JSON array.

    Numbers use 17 significant digits so identical inputs give identical bytes.
    Returns the text; writes it to ``path`` when given.
    """
    rows = [(float(t), float(v)) for t, v in samples]
    if not rows:
        raise ValueError("refusing to emit an empty curve")
    return _emit_table(["t", "value"], rows, path, fmt)


def _emit_table(header, rows, path=None, fmt="csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_number(x) for x in row])
        text = buf.getvalue()
    elif fmt == "json":
        body = ",\n".join(
            "  {" + ", ".join(f'"{h}": {format_number(x)}' for h, x in zip(header, row)) + "}"
            for row in rows)
        text = "[\n" + body + "\n]\n"
    else:
        raise ValueError(f"unknown curve format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands; each returns (result dict, curve header, curve rows)


def _model_geometry(cfg: RunConfig):
    kind = cfg.extra.get("model", "spaceform")
    mk = cfg.extra.get("model_kappa")
    mk = cfg.kappa if mk is None else mk
    if kind == "spaceform":
        return SpaceForm(mk, cfg.dim), cfg.dim
    if kind == "psi":
        psi = warped_metric.psi_exponential(cfg.psi_c, mk)
        return warped_metric.profile_from_psi(psi, mk, cfg.radius), cfg.dim
    if kind == "example43":
        return warped_metric.example43_metric(mk, cfg.dim), cfg.dim
    if kind == "sampled":
        path = cfg.extra.get("profile_csv")
        if not path:
            raise ValueError("--model sampled needs --profile-csv")
        return warped_metric.read_profile_csv(path), cfg.dim
    raise ValueError(f"unknown model {kind!r}")


def cmd_eigen(cfg: RunConfig):
    sf = SpaceForm(cfg.kappa, cfg.dim)
    sol = radial_ode.solve_first_eigenvalue(radial_ode.RadialCoefficient.spaceform(sf),
                                            cfg.radius, cfg.tol, samples=cfg.grid_points + 1)
    rows = list(zip(sol.grid, sol.u_samples))
    return sol.to_dict(), ["t", "value"], rows


def cmd_compare(cfg: RunConfig):
    model, nm = _model_geometry(cfg)
    ref_dim = cfg.extra.get("ref_dim") or cfg.dim
    reference = SpaceForm(cfg.kappa, ref_dim)
    grid = comparison.hypothesis_grid(cfg.radius, cfg.grid_points)
    report, _, _ = comparison.compare_eigenvalues(model, reference, cfg.radius, cfg.tol,
                                                  model_dim=nm, reference_dim=ref_dim, grid=grid)
    t, Hm, Hr, margin = comparison.mean_curvature_margins(model, reference, cfg.radius, grid,
                                                          model_dim=nm, reference_dim=ref_dim)
    if report.hypothesis_verdict == comparison.INCOMPARABLE:
        raise HypothesisViolation("mean curvatures cross: no comparison applies",
                                  witness=report.witness_t, margin=report.worst_margin)
    return report.to_dict(), ["t", "H_model", "H_ref", "margin"], list(zip(t, Hm, Hr, margin))


def cmd_construct_psi(cfg: RunConfig):
    psi = warped_metric.psi_exponential(cfg.psi_c, cfg.kappa)
    prof = warped_metric.profile_from_psi(psi, cfg.kappa, cfg.radius)
    grid = comparison.hypothesis_grid(cfg.radius, cfg.grid_points)
    verdict = comparison.check_mean_curvature_ordering(prof, SpaceForm(cfg.kappa, cfg.dim),
                                                       cfg.radius, grid, model_dim=cfg.dim)
    K = np.array([warped_metric.radial_curvature(prof, float(x)) for x in grid])
    beyond = grid > 1.0
    result = {
        "profile": prof.to_dict(),
        "psi_nonpositive": psi.nonpositive_on(grid),
        "verdict": verdict.verdict,
        "min_H_margin": verdict.min_margin,
        "min_H_margin_t": verdict.t_min,
        "curvature_above_kappa_beyond_1": bool(np.all(K[beyond] > cfg.kappa)) if beyond.any()
        else None,
        "origin_ok": prof.origin_ok(),
    }
    rows = warped_metric.profile_rows(prof, np.linspace(0.0, cfg.radius, cfg.grid_points + 1))
    if not verdict.dominates:
        raise HypothesisViolation("constructed profile does not dominate the space form",
                                  witness=verdict.t_min, margin=verdict.min_margin)
    return result, ["t", "f", "df", "d2f"], rows


def cmd_barta(cfg: RunConfig):
    sf = SpaceForm(cfg.kappa, cfg.dim)
    coeff = radial_ode.RadialCoefficient.spaceform(sf)
    sol = radial_ode.solve_first_eigenvalue(coeff, cfg.radius, cfg.tol)
    test = cfg.extra.get("test", "eigen")
    if test == "eigen":
        u = bounds.TestFunction.from_eigensolution(sol)
    elif test == "poly":
        u = bounds.TestFunction.polynomial(cfg.radius, cfg.extra.get("poly_a", 0.0),
                                           cfg.extra.get("power", 1))
    elif test == "cos":
        u = bounds.TestFunction.cosine(cfg.radius, cfg.extra.get("power", 1))
    else:
        raise ValueError(f"unknown test function {test!r}")
    grid = bounds.barta_grid(cfg.radius, cfg.grid_points)
    cert = bounds.barta_bracket(coeff, u, cfg.radius, grid)
    cert.parameters["lambda1"] = sol.lam
    q = [(float(t), bounds.barta_quotient(coeff, u, float(t))) for t in grid]
    return cert.to_dict(), ["t", "value"], q


def _profile_for(kappa):
    return warped_metric.spaceform_profile(kappa)


def cmd_cone(cfg: RunConfig):
    fk = cfg.extra.get("f_kappa", cfg.kappa)
    gk = cfg.extra.get("g_kappa", cfg.kappa)
    n = cfg.extra.get("n") or cfg.dim
    m = cfg.extra.get("m") or cfg.dim
    r = math.inf if cfg.extra.get("infinite") else cfg.radius
    grid = None if not math.isfinite(r) else cfg.radius * np.arange(1, cfg.grid_points + 1) \
        / cfg.grid_points
    cert = bounds.cone_tone_bound(_profile_for(fk), n, _profile_for(gk), m, r, grid, tol=cfg.tol)
    f, g = _profile_for(fk), _profile_for(gk)
    ts = grid if grid is not None else np.linspace(cfg.radius / cfg.grid_points, cfg.radius,
                                                   cfg.grid_points)
    rows = [(float(t), (n - 1) * f.dlog(float(t)) - (m - 1) * g.dlog(float(t))) for t in ts]
    return cert.to_dict(), ["t", "value"], rows


def cmd_product(cfg: RunConfig):
    fk = cfg.extra.get("f_kappa", cfg.kappa)
    m = cfg.extra.get("m") or cfg.dim
    l_dim = cfg.extra.get("l") or cfg.dim
    c = cfg.extra.get("g_const", 1.0)
    lam_w = cfg.extra.get("lambda_w", 0.0)
    n_fiber = cfg.extra.get("n_fiber", 1)
    g = warped_metric.constant_map(c)
    grid = cfg.radius * np.arange(1, cfg.grid_points + 1) / cfg.grid_points
    cert = bounds.product_tone_bounds(_profile_for(fk), m, g, n_fiber, cfg.kappa, l_dim,
                                      cfg.radius, lam_w, grid, tol=cfg.tol)
    return cert.to_dict(), ["t", "value"], [(float(t), 1.0 / c ** 2) for t in grid]


def cmd_example43(cfg: RunConfig):
    m = warped_metric.example43_metric(cfg.kappa, cfg.dim)
    sf = SpaceForm(cfg.kappa, cfg.dim)
    grid = comparison.hypothesis_grid(cfg.radius, cfg.grid_points)
    report, s_m, s_r = comparison.compare_eigenvalues(m, sf, cfg.radius, cfg.tol, grid=grid)
    dens = np.asarray(m.density(grid))
    ref = sine_kappa(cfg.kappa, grid) ** (cfg.dim - 1)
    t_w = min(1.0, cfg.radius)
    result = {
        "lambda_example43": s_m.lam,
        "lambda_spaceform": s_r.lam,
        "eigen_gap": s_m.lam - s_r.lam,
        "equal": report.equality_detected,
        "nonisometry_witness": warped_metric.nonisometry_witness(m, cfg.kappa, t_w),
        "witness_t": t_w,
        "density_rel_error": float(np.max(np.abs(dens - ref) / ref)),
        "rigidity_gap": report.rigidity_gap,
    }
    rows = list(zip(s_m.grid, s_m.u_samples))
    return result, ["t", "value"], rows


HANDLERS = {
    "eigen": cmd_eigen,
    "compare": cmd_compare,
    "construct-psi": cmd_construct_psi,
    "barta": cmd_barta,
    "cone": cmd_cone,
    "product": cmd_product,
    "example43": cmd_example43,
}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one configured command; returns the process exit status."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        cfg.validate()
        result, header, rows = HANDLERS[cfg.command](cfg)
    except HypothesisViolation as exc:
        doc = {"command": cfg.command, "config": asdict(cfg),
               "hypothesis_violation": {"message": str(exc), "witness": exc.witness,
                                        "margin": exc.margin}}
        _write(_json_text(doc), cfg.output_path if cfg.output_format == "json" else None, stdout)
        return EXIT_HYPOTHESIS
    except (WarpspecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        if cfg.output_format == "csv":
            text = _emit_table(header, rows, None, "csv")
        else:
            text = _json_text({"command": cfg.command, "config": asdict(cfg), "result": result})
        _write(text, cfg.output_path, stdout)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _write(text, path, stdout):
    if path:
        Path(path).write_text(text)
    else:
        stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpspec",
        description="First Dirichlet eigenvalues of geodesic balls in warped metrics, "
                    "comparison certificates and fundamental-tone bounds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kappa", type=float, default=0.0, help="reference curvature")
    common.add_argument("--dim", type=int, default=3)
    common.add_argument("--radius", type=float, default=1.0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"),
                        default="json")
    common.add_argument("--output", dest="output_path", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("eigen", parents=[common], help="first eigenvalue of a space-form ball")

    p = sub.add_parser("compare", parents=[common], help="model ball vs space-form ball")
    p.add_argument("--model", choices=("spaceform", "psi", "example43", "sampled"),
                   default="spaceform")
    p.add_argument("--model-kappa", type=float, default=None)
    p.add_argument("--psi-c", type=float, default=0.1)
    p.add_argument("--profile-csv", default=None)
    p.add_argument("--ref-dim", type=int, default=None)

    p = sub.add_parser("construct-psi", parents=[common],
                       help="build f from psi(t) = -c t^2 exp(-2t)")
    p.add_argument("--psi-c", type=float, default=0.1)

    p = sub.add_parser("barta", parents=[common], help="Barta bracket for a test function")
    p.add_argument("--test", choices=("eigen", "poly", "cos"), default="eigen")
    p.add_argument("--poly-a", type=float, default=0.0)
    p.add_argument("--power", type=int, default=1)

    p = sub.add_parser("cone", parents=[common], help="fundamental tone of a truncated cone")
    p.add_argument("--f-kappa", type=float, default=None)
    p.add_argument("--g-kappa", type=float, default=None)
    p.add_argument("--n", type=int, default=None, help="cone dimension")
    p.add_argument("--m", type=int, default=None, help="reference dimension")
    p.add_argument("--infinite", action="store_true", help="untruncated cone (r = inf)")

    p = sub.add_parser("product", parents=[common], help="bounds on B(r) x W")
    p.add_argument("--f-kappa", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--g-const", type=float, default=1.0)
    p.add_argument("--n-fiber", type=int, default=1)
    p.add_argument("--lambda-w", type=float, default=0.0)

    sub.add_parser("example43", parents=[common],
                   help="non-isometric metric with the space-form eigenvalue")
    return parser


_BASE_FIELDS = {"command", "kappa", "dim", "radius", "tol", "grid_points", "psi_c",
                "output_format", "output_path"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = vars(ns).copy()
    base = {k: values.pop(k) for k in list(values) if k in _BASE_FIELDS}
    extra = {k: v for k, v in values.items() if v is not None}
    return RunConfig(**base, extra=extra)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())

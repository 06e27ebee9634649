"""Command-line front end: reproducible experiment runs from JSON configs.

    fdo-spectra <command> --config cfg.json [--out DIR] [--seed N] [--quiet] [--force]

Each command wraps one analysis/discretize operation, echoes its full
configuration, and writes `report.json` plus flat CSV tables under --out.
Exit codes: 0 ran clean (or a hypothesis gate disengaged), 1 a certified
inequality check failed (a bug, not a parameter problem), 2 bad
configuration, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analysis, core, discretize
from .core import PI_SQ, Scale
from .discretize import Grid, Potential
from .errors import ConfigError, FdoError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_POTENTIAL_KEYS = {
    "box": {"c", "w"},
    "gaussian": {"c", "s"},
    "sech2": {"c", "w"},
    "bump_sum": {"c", "bumps"},
    "sampled": {"c", "path"},
    "delta": {"c"},
    "ensemble": {"counts"},
}

_COMMAND_PARAMS = {
    "solve": {"edge_margin"},
    "verify-lt": {"tol", "edge_margin"},
    "delta": {"c_list", "x_samples"},
    "bs-locate": {"n_max", "tol"},
    "semigroup": {"pairs", "k_half_width", "n_k"},
    "majorize": {"theta_pairs"},
    "weak-coupling": {"eps_list", "c"},
    "gamma-sweep": {"gamma", "c_list"},
    "schrodinger-limit": {"b_list", "n_compare", "L", "N"},
    "ground-state": {"edge_margin"},
}

_NEEDS_POTENTIAL = {
    "solve",
    "verify-lt",
    "delta",
    "bs-locate",
    "majorize",
    "gamma-sweep",
    "schrodinger-limit",
    "ground-state",
}


def _expect_keys(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected an object, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")


def _require(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _number(value, where, positive=False):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be positive, got {value!r}")
    return float(value)


def parse_potential(spec, where="potential") -> Potential | dict:
    kind = _require(spec, "kind", where) if isinstance(spec, dict) else None
    if kind not in _POTENTIAL_KEYS:
        raise ConfigError(f"{where}: unknown potential kind {kind!r}")
    _expect_keys(spec, _POTENTIAL_KEYS[kind] | {"kind"}, where)
    try:
        if kind == "box":
            return Potential.box(_number(_require(spec, "c", where), where + ".c"),
                                 _number(_require(spec, "w", where), where + ".w", positive=True))
        if kind == "gaussian":
            return Potential.gaussian(_number(_require(spec, "c", where), where + ".c"),
                                      _number(_require(spec, "s", where), where + ".s", positive=True))
        if kind == "sech2":
            return Potential.sech2(_number(_require(spec, "c", where), where + ".c"),
                                   _number(_require(spec, "w", where), where + ".w", positive=True))
        if kind == "bump_sum":
            bumps = _require(spec, "bumps", where)
            if not isinstance(bumps, list) or not all(
                isinstance(t, list) and len(t) == 3 for t in bumps
            ):
                raise ConfigError(f"{where}.bumps: expected [[center, height, width], ...]")
            return Potential.bump_sum(bumps, c=_number(spec.get("c", 1.0), where + ".c"))
        if kind == "sampled":
            path = _require(spec, "path", where)
            return discretize.load_sampled_potential(path, c=_number(spec.get("c", 1.0), where + ".c"))
        if kind == "delta":
            return Potential.delta(_number(_require(spec, "c", where), where + ".c"))
    except FdoError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    counts = spec.get("counts", [50, 25, 25])
    if not (isinstance(counts, list) and len(counts) == 3 and all(isinstance(c, int) for c in counts)):
        raise ConfigError(f"{where}.counts: expected three integers")
    return {"kind": "ensemble", "counts": tuple(counts)}


def parse_grid(spec, scale: Scale, where="grid") -> Grid:
    if spec == "auto" or spec is None:
        return discretize.make_grid(12.0 * scale.b, 512)
    _expect_keys(spec, {"L", "N"}, where)
    L = _number(_require(spec, "L", where), where + ".L", positive=True)
    N = _require(spec, "N", where)
    if not isinstance(N, int):
        raise ConfigError(f"{where}.N: expected an integer, got {N!r}")
    try:
        return discretize.make_grid(L, N)
    except FdoError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str, command: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    allowed = {"b", "potential", "grid", "seed", "params"}
    _expect_keys(raw, allowed, path)
    if "b" not in raw:
        raise ConfigError(f"{path}: missing required key 'b'")
    _number(raw["b"], "b", positive=True)
    if command in _NEEDS_POTENTIAL and "potential" not in raw:
        raise ConfigError(f"{path}: command {command!r} needs a 'potential' entry")
    params = raw.get("params", {})
    _expect_keys(params, _COMMAND_PARAMS[command], "params")
    if "seed" in raw and (not isinstance(raw["seed"], int) or raw["seed"] < 0):
        raise ConfigError("seed: expected a nonnegative integer")
    return raw


def _point_row(lam: float, point: core.SpectralPoint) -> dict:
    return {
        "lambda": float(lam),
        "branch": point.branch,
        "omega_magnitude": float(point.magnitude),
        "theta": float(point.theta),
    }


def _report_rows(report: discretize.EigenReport) -> list[dict]:
    return [_point_row(lam, pt) for lam, pt in zip(report.lambdas, report.points)]


# ---------------------------------------------------------------------------
# command payload builders; each returns (payload, certificate | None, exit_code)


def _cmd_solve(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    grid = parse_grid(cfg.get("grid"), scale)
    margin = float(cfg.get("params", {}).get("edge_margin", discretize.DEFAULT_EDGE_MARGIN))
    op = discretize.assemble_operator(V, grid, scale)
    ok, lam_min = discretize.wv_lower_bound_certificate(op)
    report = discretize.eigens_below(op, edge_margin=margin)
    payload = {
        "eigenvalues": _report_rows(report),
        "method": report.method,
        "edge_margin": margin,
        "n_found": len(report),
    }
    cert = {"wv_ge_minus2": ok, "lambda_min": lam_min}
    return payload, cert, EXIT_OK, {"eigenvalues.csv": _rows_to_table(payload["eigenvalues"])}


def _lt_payload(rep: analysis.LTReport) -> dict:
    return {
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "ratio": rep.ratio if math.isfinite(rep.ratio) else None,
        "certificate_ok": rep.certificate_ok,
        "lambda_min": rep.lambda_min,
        "excluded_below_minus2": rep.excluded_below_minus2,
        "lhs_all_branches": rep.lhs_all_branches,
        "holds": rep.holds,
        "n_eigenvalues": len(rep.eigen),
    }


def _cmd_verify_lt(cfg, scale, rng):
    spec = parse_potential(cfg["potential"])
    params = cfg.get("params", {})
    tol = float(params.get("tol", analysis.DEFAULT_LT_TOL))
    margin = float(params.get("edge_margin", discretize.DEFAULT_EDGE_MARGIN))
    if isinstance(spec, dict):  # ensemble
        grid = analysis.ensemble_grid(scale)
        seed = int(cfg.get("seed", 0))
        potentials = analysis.draw_standard_ensemble(seed, grid, scale, counts=spec["counts"])
        rows, all_hold = [], True
        for i, V in enumerate(potentials):
            rep = analysis.verify_lt(V, grid, scale, tol=tol, edge_margin=margin)
            gate_on = rep.certificate_ok
            if gate_on and not rep.holds:
                all_hold = False
            rows.append({"index": i, "kind": V.kind, **_lt_payload(rep)})
        payload = {"ensemble": rows, "all_hold": all_hold, "count": len(rows)}
        code = EXIT_OK if all_hold else EXIT_VIOLATION
        return payload, None, code, {"lt_ensemble.csv": _rows_to_table(rows)}
    grid = None if spec.kind == discretize.DELTA else parse_grid(cfg.get("grid"), scale)
    rep = analysis.verify_lt(spec, grid, scale, tol=tol, edge_margin=margin)
    payload = _lt_payload(rep)
    payload["hypothesis_gate"] = (
        "engaged" if rep.certificate_ok else "disengaged: W_V >= -2 fails, bound not asserted"
    )
    cert = {"wv_ge_minus2": rep.certificate_ok, "lambda_min": rep.lambda_min}
    code = EXIT_OK if (not rep.certificate_ok or rep.holds) else EXIT_VIOLATION
    return payload, cert, code, {"lt.csv": _rows_to_table([payload])}


def _cmd_delta(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    if not isinstance(V, Potential) or V.kind != discretize.DELTA:
        raise ConfigError("the delta command needs a delta potential")
    params = cfg.get("params", {})
    c_list = params.get("c_list", [V.c])
    rows = []
    for c in c_list:
        sol = core.delta_solve(float(c), scale)
        rep = analysis.verify_lt(Potential.delta(float(c)), None, scale)
        rows.append(
            {
                "c": float(c),
                "c_over_2pib": float(c) / (2.0 * math.pi * scale.b),
                **_point_row(sol.point.lam, sol.point),
                "lt_lhs": rep.lhs,
                "lt_rhs": rep.rhs,
            }
        )
    xs = params.get("x_samples")
    tables = {"delta.csv": _rows_to_table(rows)}
    if xs is not None:
        sol = core.delta_solve(V.c, scale)
        x = np.asarray(xs, dtype=float)
        psi = core.delta_eigenfunction(x, sol)
        tables["eigenfunction.csv"] = _rows_to_table(
            [{"x": float(a), "psi": float(p)} for a, p in zip(x, psi)]
        )
    return {"solutions": rows}, None, EXIT_OK, tables


def _cmd_bs_locate(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    grid = parse_grid(cfg.get("grid"), scale)
    params = cfg.get("params", {})
    n_max = int(params.get("n_max", 4))
    tol = float(params.get("tol", 1e-10))
    report = discretize.bs_locate(V, grid, scale, n_max=n_max, tol=tol)
    payload = {"eigenvalues": _report_rows(report), "method": report.method, "n_found": len(report)}
    return payload, None, EXIT_OK, {"bs_locate.csv": _rows_to_table(payload["eigenvalues"])}


def _cmd_semigroup(cfg, scale, rng):
    params = cfg.get("params", {})
    pairs = params.get(
        "pairs",
        [[PI_SQ / 9.0, PI_SQ / 4.0], [-1.0, 0.0], [-4.0, PI_SQ / 2.0], [0.0, PI_SQ / 4.0], [-2.0, 1.0]],
    )
    k_grid = analysis.make_k_grid(
        scale, float(params.get("k_half_width", 8.0)), int(params.get("n_k", 4096))
    )
    rows = [
        {
            "theta": float(th),
            "theta_mid": float(tm),
            "sup_error": analysis.semigroup_check(float(th), float(tm), scale, k_grid),
        }
        for th, tm in pairs
    ]
    payload = {"pairs": rows, "max_sup_error": max(r["sup_error"] for r in rows)}
    return payload, None, EXIT_OK, {"semigroup.csv": _rows_to_table(rows)}


def _cmd_majorize(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    grid = parse_grid(cfg.get("grid"), scale)
    pairs = cfg.get("params", {}).get(
        "theta_pairs", [[-4.0, 0.0], [1.0, 4.0], [0.0, 2.0], [-1.0, 1.0], [PI_SQ / 4, PI_SQ / 2]]
    )
    oks = analysis.majorisation_check(V, grid, scale, pairs)
    rows, tables = [], {}
    for i, ((th, tp), ok) in enumerate(zip(pairs, oks)):
        lo = analysis.ky_fan_profile(analysis.l_theta_matrix(V, grid, float(th), scale).matrix)
        hi = analysis.ky_fan_profile(analysis.l_theta_matrix(V, grid, float(tp), scale).matrix)
        rows.append({"theta": float(th), "theta_prime": float(tp), "majorised": ok})
        tables[f"kyfan_pair{i}.csv"] = _rows_to_table(
            [
                {"n": n + 1, "norm_low": float(a), "norm_high": float(b)}
                for n, (a, b) in enumerate(zip(lo.norms, hi.norms))
            ]
        )
    payload = {"pairs": rows, "all_majorised": all(oks)}
    tables["majorize.csv"] = _rows_to_table(rows)
    return payload, None, EXIT_OK, tables


def _cmd_weak_coupling(cfg, scale, rng):
    params = cfg.get("params", {})
    eps_list = params.get("eps_list", [0.3, 0.2, 0.1, 0.05, 0.025])
    c = float(params.get("c", 1.0))
    rows = []
    for eps in eps_list:
        value, ratio = analysis.weak_coupling_form(float(eps), scale)
        pot = analysis.weak_coupling_potential_term(float(eps), c, scale)
        rows.append(
            {
                "eps": float(eps),
                "form_value": value,
                "form_over_b_eps": ratio,
                "potential_term": pot,
                "potential_lower_bound": 0.5 * c * scale.b,
            }
        )
    payload = {"rows": rows, "sup_form_over_b_eps": max(r["form_over_b_eps"] for r in rows)}
    return payload, None, EXIT_OK, {"weak_coupling.csv": _rows_to_table(rows)}


def _cmd_gamma_sweep(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    if not (isinstance(V, Potential) and V.kind == discretize.BOX):
        raise ConfigError("gamma-sweep uses the box potential c on |x| <= b/2")
    grid = parse_grid(cfg.get("grid"), scale)
    params = cfg.get("params", {})
    gamma = float(params.get("gamma", 0.25))
    c_list = params.get("c_list", [0.016, 0.008, 0.004, 0.002, 0.001])
    rows = analysis.gamma_necessity_sweep([float(c) for c in c_list], gamma, scale, grid)
    table = [
        {
            "c": r.c,
            "lambda1": r.lam1,
            "gap": r.gap,
            "gap_over_c2": r.gap_over_c2,
            "ratio_gamma": r.ratio_gamma,
            "certificate_ok": r.certificate_ok,
        }
        for r in rows
    ]
    payload = {"gamma": gamma, "rows": table}
    return payload, None, EXIT_OK, {"gamma_sweep.csv": _rows_to_table(table)}


def _cmd_schrodinger_limit(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    params = cfg.get("params", {})
    b_list = params.get("b_list", [0.4, 0.2, 0.1])
    n_compare = int(params.get("n_compare", 1))
    policy = None
    if "L" in params or "N" in params:
        L = float(params.get("L", 12.0))
        N = int(params.get("N", 1024))

        def policy(b):
            return L, N

    rows = analysis.schrodinger_limit_check(V, [float(b) for b in b_list], policy, n_compare)
    table = [
        {
            "b": r.b,
            "scaled_gap_1": r.scaled_gaps[0],
            "oracle_mu_1": r.oracle[0],
            "rel_dev_1": r.rel_dev[0],
            "certificate_ok": r.certificate_ok,
        }
        for r in rows
    ]
    payload = {"rows": table}
    return payload, None, EXIT_OK, {"schrodinger_limit.csv": _rows_to_table(table)}


def _cmd_ground_state(cfg, scale, rng):
    V = parse_potential(cfg["potential"])
    grid = parse_grid(cfg.get("grid"), scale)
    margin = float(cfg.get("params", {}).get("edge_margin", discretize.DEFAULT_EDGE_MARGIN))
    rep = analysis.ground_state_explorer(V, grid, scale, edge_margin=margin)
    payload = {
        "found": rep.found,
        "lambda1": rep.lam1,
        "sign_changes": rep.sign_changes,
        "certificate_ok": rep.certificate_ok,
        "lambda_min": rep.lambda_min,
    }
    cert = {"wv_ge_minus2": rep.certificate_ok, "lambda_min": rep.lambda_min}
    return payload, cert, EXIT_OK, {}


_COMMANDS = {
    "solve": _cmd_solve,
    "verify-lt": _cmd_verify_lt,
    "delta": _cmd_delta,
    "bs-locate": _cmd_bs_locate,
    "semigroup": _cmd_semigroup,
    "majorize": _cmd_majorize,
    "weak-coupling": _cmd_weak_coupling,
    "gamma-sweep": _cmd_gamma_sweep,
    "schrodinger-limit": _cmd_schrodinger_limit,
    "ground-state": _cmd_ground_state,
}


# ---------------------------------------------------------------------------
# output plumbing


def _pyify(obj):
    if isinstance(obj, dict):
        return {k: _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _rows_to_table(rows: list[dict]) -> tuple[list[str], list[list]]:
    if not rows:
        return [], []
    header = list(rows[0].keys())
    return header, [[_pyify(r.get(h)) for h in header] for r in rows]


def _write_outputs(out_dir: Path, report: dict, tables: dict, force: bool):
    report_path = out_dir / "report.json"
    if report_path.exists() and not force:
        raise ConfigError(f"{report_path} exists; pass --force to overwrite")
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for name, (header, rows) in tables.items():
        target = out_dir / name
        if target.exists() and not force:
            raise ConfigError(f"{target} exists; pass --force to overwrite")
        with open(target, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fdo-spectra",
        description="Spectral experiments on the functional difference operator 2cosh(bP) - V",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON experiment configuration")
    parser.add_argument("--out", default="./out", help="output directory (default ./out)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config, args.command)
        if args.seed is not None:
            cfg["seed"] = args.seed
        scale = Scale(float(cfg["b"]))
        payload, cert, code, tables = _COMMANDS[args.command](cfg, scale, None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FdoError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    report = {
        "command": args.command,
        "config": _pyify(cfg),
        "seed": cfg.get("seed"),
        "version": __version__,
        "payload": _pyify(payload),
        "certificate": _pyify(cert),
        "timing_s": round(time.perf_counter() - t0, 6),
    }
    try:
        _write_outputs(Path(args.out), report, tables, args.force)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print(f"{args.command}: exit {code}, report in {Path(args.out) / 'report.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())

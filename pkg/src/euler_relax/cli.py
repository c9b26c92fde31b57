"""Command-line driver: JSON scenario configs in, JSON reports and CSV tables out.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 a precondition of the computation failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import fieldio, geometry, laminates, shear, states, symbols, torus
from .errors import EulerRelaxError, PreconditionError

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_PRECONDITION = 0, 1, 2, 3
MACHINE_EPS = np.finfo(float).eps


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- reports


def _format(obj):
    """Byte-stable JSON text: sorted keys, floats with 17 significant digits."""
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_format(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_format(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"NaN"'
        if math.isinf(x):
            return '"Infinity"' if x > 0 else '"-Infinity"'
        return format(x, ".17g")
    if isinstance(obj, np.ndarray):
        return _format(obj.tolist())
    if obj is None:
        return "null"
    return json.dumps(str(obj))


class Report:
    def __init__(self, command, seed, config):
        self.command = command
        self.seed = seed
        self.config = config
        self.checks = []
        self.info = {}
        self.timings = {}
        self.error = None
        self._clock = time.perf_counter()

    def check(self, name, measured, threshold, passed, note=None):
        entry = {"name": name, "measured": measured, "threshold": threshold, "passed": bool(passed)}
        if note:
            entry["note"] = note
        self.checks.append(entry)
        now = time.perf_counter()
        self.timings[name] = now - self._clock
        self._clock = now

    @property
    def passed(self):
        return self.error is None and all(c["passed"] for c in self.checks)

    def to_dict(self):
        out = {
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "checks": self.checks,
            "passed": self.passed,
            "info": self.info,
        }
        if self.error:
            out["error"] = self.error
        return out

    def write(self, out_dir: Path):
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(_format(self.to_dict()) + "\n")
        # wall times vary between runs, so they live outside the byte-stable report
        (out_dir / "timings.json").write_text(json.dumps(self.timings, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), ".17g") if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------- schemas

_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n_t": {"type": "integer", "minimum": 4, "multipleOf": 2},
        "n_x": {"type": "integer", "minimum": 4, "multipleOf": 2},
        "n_y": {"type": "integer", "minimum": 4, "multipleOf": 2},
        "period_t": {"type": "number", "exclusiveMinimum": 0},
    },
}
_VEC6 = {"type": "array", "items": {"type": "number"}, "minItems": 6, "maxItems": 6}
_FLUID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rho", "m"],
    "properties": {
        "rho": {"type": "number", "exclusiveMinimum": 0},
        "m": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    },
}
_POLY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["terms"],
    "properties": {
        "terms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["coef", "powers"],
                "properties": {
                    "coef": {"type": "number"},
                    "powers": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 6, "maxItems": 6},
                },
            },
        }
    },
}
_PROFILE = {
    "oneOf": [
        {"type": "string", "enum": ["sin", "cos", "square", "zero"]},
        {"type": "number"},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["sin", "cos", "square", "zero", "polynomial", "samples"]},
                "amplitude": {"type": "number"},
                "coefficients": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
            },
        },
    ]
}
_POLYTOPE = {
    "oneOf": [
        {"type": "string", "enum": ["cube", "octahedron", "simplex"]},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["vertices"],
            "properties": {
                "vertices": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 4},
                }
            },
        },
    ]
}


def _obj(props, required=()):
    return {"type": "object", "additionalProperties": False, "properties": props, "required": list(required)}


def _num(default, **kw):
    return {"type": "number", "default": default, **kw}


SCHEMAS = {
    "symbols": _obj(
        {
            "n_samples": {"type": "integer", "minimum": 1, "default": 10_000},
            "rank_tol": _num(1e-10, exclusiveMinimum=0),
            "gap_tol": _num(1e-8, exclusiveMinimum=0),
            "product_tol": _num(1e-12, exclusiveMinimum=0),
            "homogeneity_tol": _num(1e-12, exclusiveMinimum=0),
            "csv": {"type": "boolean", "default": True},
        }
    ),
    "solve": _obj(
        {
            "input": {"type": "string"},
            "fixture": {"enum": ["roundtrip", "constant", "shear"]},
            "grid": {**_GRID, "default": {"n_t": 16, "n_x": 16, "n_y": 16}},
            "rel_tol": _num(1e-8, exclusiveMinimum=0),
            "p": _num(2.0, exclusiveMinimum=1),
            "write_potential": {"type": "boolean", "default": False},
        }
    ),
    "shear": _obj(
        {
            "alpha": {**_PROFILE, "default": "sin"},
            "beta": {**_PROFILE, "default": "cos"},
            "lambda": _num(0.5, exclusiveMinimum=0, exclusiveMaximum=1),
            "grid": {**_GRID, "default": {"n_t": 4, "n_x": 4, "n_y": 64}},
            "tolerances": {
                "type": "object",
                "additionalProperties": False,
                "properties": {k: {"type": "number", "minimum": 0} for k in shear.DEFAULT_TOLERANCES},
                "default": {},
            },
            "csv": {"type": "boolean", "default": True},
        }
    ),
    "laminate": _obj(
        {
            "z1": {"oneOf": [_VEC6, _FLUID], "default": {"rho": 1.0, "m": [0.0, 0.0]}},
            "z2": {"oneOf": [_VEC6, _FLUID], "default": {"rho": 1.0, "m": [1.0, 0.0]}},
            "lambda": _num(0.5, exclusiveMinimum=0, exclusiveMaximum=1),
            "direction": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
            "n_values": {
                "type": "array",
                "items": {"type": "integer", "minimum": 1},
                "minItems": 1,
                "default": [16, 64, 256],
            },
            "grid": {**_GRID, "default": {"n_t": 4, "n_x": 4, "n_y": 4096}},
            "functions": {"type": "array", "items": _POLY, "minItems": 1},
            "error_constant": _num(8.0, exclusiveMinimum=0),
            "mean_tol": _num(1e-12, minimum=0),
            "jensen": _obj(
                {
                    "n": {"type": "integer", "minimum": 1, "default": 128},
                    "eps": _num(0.05, minimum=0),
                    "delta": _num(0.01, exclusiveMinimum=0),
                    "functions": {"type": "array", "items": _POLY, "minItems": 1},
                }
            ),
        }
    ),
    "hausdorff": _obj(
        {
            "audits": {
                "type": "array",
                "minItems": 1,
                "items": _obj(
                    {
                        "polytope": _POLYTOPE,
                        "samples": _obj(
                            {
                                "start": {"type": "number"},
                                "stop": {"type": "number"},
                                "count": {"type": "integer", "minimum": 2},
                            },
                            required=("start", "stop", "count"),
                        ),
                        "slope": _num(1.0),
                        "offset": _num(0.0),
                        "delta_grid": {"type": "array", "items": {"type": "number", "minimum": 0}, "default": []},
                        "compare": {"enum": ["section", "ambient"], "default": "section"},
                        "oracle_tol": _num(1e-9, minimum=0),
                    },
                    required=("polytope", "samples"),
                ),
                "default": [
                    {"polytope": "cube", "samples": {"start": 0.1, "stop": 0.9, "count": 9}},
                    {"polytope": "octahedron", "samples": {"start": -0.9, "stop": 0.9, "count": 10}},
                ],
            }
        }
    ),
}


def _fill_defaults(schema, value):
    if schema.get("type") == "object" and isinstance(value, dict):
        for key, sub in schema.get("properties", {}).items():
            if key not in value and "default" in sub:
                value[key] = json.loads(json.dumps(sub["default"]))
            if key in value:
                value[key] = _fill_defaults(sub, value[key])
    elif schema.get("type") == "array" and isinstance(value, list) and "items" in schema:
        value = [_fill_defaults(schema["items"], v) for v in value]
    return value


def load_config(command, path):
    if path is None:
        cfg = {}
    else:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    schema = SCHEMAS[command]
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid {command} config: {exc.message}") from exc
    return _fill_defaults(schema, cfg)


def _grid(cfg, **defaults):
    g = {**defaults, **cfg}
    return torus.TorusGrid(g["n_t"], g["n_x"], g["n_y"], g.get("period_t", 1.0))


def _state(spec):
    if isinstance(spec, dict):
        return states.lift_array(spec["rho"], np.asarray(spec["m"], dtype=float))
    return np.asarray(spec, dtype=float)


# ---------------------------------------------------------------- commands


def cmd_symbols(cfg, rng, out_dir):
    rep = Report("symbols", None, cfg)
    omega = symbols.fibonacci_sphere(cfg["n_samples"])
    tol = cfg["rank_tol"]
    amat, bmat = symbols.euler_symbol(omega), symbols.potential_symbol(omega)
    stable = tol >= 10 * MACHINE_EPS
    note = None if stable else (
        f"rank tolerance {tol:g} is below 10 * machine epsilon; numerically zero singular values "
        "count as nonzero and the rank is not meaningful"
    )
    rep.check("rank_tolerance_stable", tol, 10 * MACHINE_EPS, stable, note)
    rank_a, rank_b = np.atleast_1d(symbols.rank(amat, tol)), np.atleast_1d(symbols.rank(bmat, tol))
    rep.check("rank_A_constant", int(np.max(np.abs(rank_a - 3))), 0, bool(np.all(rank_a == 3)))
    rep.check("rank_B_constant", int(np.max(np.abs(rank_b - 3))), 0, bool(np.all(rank_b == 3)))
    gaps = symbols.projector_gaps(omega, tol)
    rep.check("projector_gap", float(gaps.max()), cfg["gap_tol"], float(gaps.max()) <= cfg["gap_tol"])
    prod = np.linalg.norm(amat @ bmat, axis=(-2, -1)) / (
        np.linalg.norm(amat, axis=(-2, -1)) * np.linalg.norm(bmat, axis=(-2, -1))
    )
    rep.check("symbol_product", float(prod.max()), cfg["product_tol"], float(prod.max()) <= cfg["product_tol"])
    s = rng.uniform(0.1, 10.0, size=(len(omega), 1, 1))
    scaled = omega * s[..., 0]
    hom_a = np.max(np.abs(symbols.euler_symbol(scaled) - s * amat) / (s * np.abs(amat).max()))
    hom_b = np.max(np.abs(symbols.potential_symbol(scaled) - s**2 * bmat) / (s**2 * np.abs(bmat).max()))
    hom = float(max(hom_a, hom_b))
    rep.check("homogeneity", hom, cfg["homogeneity_tol"], hom <= cfg["homogeneity_tol"])
    if cfg["csv"]:
        rows = zip(omega[:, 0], omega[:, 1], omega[:, 2], rank_a, rank_b, gaps)
        _write_csv(out_dir / "symbols.csv", ["omega_t", "omega_x", "omega_y", "rank_A", "rank_B", "projector_gap"], rows)
    return rep


def _solve_fixture(cfg, rng):
    grid = _grid(cfg["grid"], n_t=16, n_x=16, n_y=16)
    kind = cfg["fixture"]
    if kind == "roundtrip":
        w = torus.TorusField(grid, rng.standard_normal(grid.shape + (9,)))
        return torus.apply_potential_operator(w)
    if kind == "constant":
        return torus.TorusField.constant(grid, [1.0, 0, 0, 0, 0, 0])
    spec = shear.ShearSpec("sin", "cos", 0.5, grid)
    z1, z2 = shear.build_shear_solutions(spec)
    return shear.barycenter(spec, z1, z2) - shear.shear_sigma(spec, z1, z2)


def cmd_solve(cfg, rng, out_dir):
    rep = Report("solve", None, cfg)
    if ("input" in cfg) == ("fixture" in cfg):
        raise ConfigError("solve needs exactly one of 'input' or 'fixture'")
    if "input" in cfg:
        try:
            z = fieldio.read_field(cfg["input"])
        except OSError as exc:
            raise ConfigError(f"cannot read field {cfg['input']}: {exc}") from exc
    else:
        z = _solve_fixture(cfg, rng)
    scale = max(z.l2(), np.finfo(float).tiny)
    rep.info["mean_norm"] = float(np.linalg.norm(z.mean()))
    afree = torus.apply_euler_operator(z).l2() / scale
    rep.info["afree_residual"] = afree
    sol = torus.solve_potential(z, cfg["rel_tol"])
    rep.check("potential_residual", sol.residual, cfg["rel_tol"], sol.exact)
    if not sol.exact:
        raise PreconditionError("field is not in the range of the potential (NotExact)", residual=sol.residual)
    diag = torus.norm_diagnostics(sol.w, z, cfg["p"])
    rep.info["norms"] = {"p": diag.p, "lp_z": diag.lp_z, "w2p_w": diag.w2p_w, "ratio": diag.ratio}
    rep.check("norm_ratio_finite", diag.ratio, "finite", bool(np.isfinite(diag.ratio)))
    if cfg["write_potential"]:
        fieldio.write_field(out_dir / "potential.bin", sol.w)
    return rep


def cmd_shear(cfg, rng, out_dir):
    rep = Report("shear", None, cfg)
    grid = _grid(cfg["grid"], n_t=4, n_x=4, n_y=64)
    spec = shear.ShearSpec(cfg["alpha"], cfg["beta"], cfg["lambda"], grid)
    result = shear.verify_shear(spec, cfg["tolerances"])
    for name, c in result.checks.items():
        note = "skipped: z1 == z2 everywhere" if c.skipped else None
        rep.check(name, c.measured, c.tol, c.passed or c.skipped, note)
    rep.info["degenerate"] = result.degenerate
    rep.info["sigma"] = result.sigma
    if cfg["csv"]:
        pot = shear.shear_potential(spec)
        alpha, beta = spec.profiles()
        rows = zip(spec.y(), alpha, beta, pot.source_a, pot.source_b, pot.F_a, pot.F_b)
        _write_csv(out_dir / "shear_profiles.csv", ["y", "alpha", "beta", "a", "b", "F_a", "F_b"], rows)
    return rep


def _monomial(coef, **powers):
    order = ("rho", "m1", "m2", "M11", "M12", "Q")
    return {"coef": coef, "powers": [powers.get(name, 0) for name in order]}


DEFAULT_TEST_FUNCTIONS = [
    {"terms": [_monomial(1.0, m1=1)]},
    {"terms": [_monomial(1.0, m1=2)]},
    {"terms": [_monomial(1.0, M11=1, Q=1)]},
    {"terms": [_monomial(1.0, m1=1, Q=2), _monomial(-0.5, rho=1)]},
    # minus the squared Euclidean norm
    {"terms": [_monomial(-1.0, **{name: 2}) for name in ("rho", "m1", "m2", "M11", "M12", "Q")]},
]


def _y_weight(grid, direction):
    """Unit-mean test density ``2 s`` in the coordinate along which the laminate oscillates."""
    axis = int(np.argmax(np.abs(direction)))
    s = grid.axes()[axis] / grid.periods[axis]
    weight = 2 * s / np.mean(2 * s)
    shape = [1, 1, 1]
    shape[axis] = -1
    return np.broadcast_to(weight.reshape(shape), grid.shape)


def cmd_laminate(cfg, rng, out_dir):
    rep = Report("laminate", None, cfg)
    mu = laminates.DiatomicMeasure(_state(cfg["z1"]), _state(cfg["z2"]), cfg["lambda"])
    if mu.degenerate:
        raise PreconditionError("z1 and z2 coincide; there is nothing to laminate")
    if "direction" in cfg:
        omega = np.asarray(cfg["direction"], dtype=float)
        omega = omega / np.linalg.norm(omega)
    else:
        wc = symbols.wavecone_distance(mu.jump)
        if not wc.member:
            raise PreconditionError(f"z1 - z2 is not in the wave cone (distance {wc.distance:.3e})", distance=wc.distance)
        omega = wc.minimizer
    grid = _grid(cfg["grid"], n_t=4, n_x=4, n_y=4096)
    funcs = [laminates.Polynomial.from_config(f) for f in cfg.get("functions", DEFAULT_TEST_FUNCTIONS)]
    weight = _y_weight(grid, omega)
    rows, prev, decreasing, within, mean_err = [], None, True, True, 0.0
    for n in cfg["n_values"]:
        prof = laminates.LaminateProfile(cfg["lambda"], omega, n)
        field = laminates.laminate_field(mu, prof, grid)
        mean_err = max(mean_err, float(np.max(np.abs(field.mean() - mu.barycenter))))
        emp = laminates.empirical_measure(field)
        errs = [emp.test_against(f, mu.expectation(f), weight) for f in funcs]
        for k, e in enumerate(errs):
            rows.append((n, k, e, cfg["error_constant"] / n))
        worst = max(errs)
        within &= worst <= cfg["error_constant"] / n
        if prev is not None:
            decreasing &= all(e < p for e, p in zip(errs, prev) if p > 0)
        prev = errs
    rep.check("mean_equals_barycenter", mean_err, cfg["mean_tol"], mean_err <= cfg["mean_tol"])
    rep.check("error_within_C_over_n", max(r[2] * r[0] for r in rows), cfg["error_constant"], within)
    rep.check("error_decreasing", float(decreasing), 1.0, decreasing)
    _write_csv(out_dir / "laminate_convergence.csv", ["n", "function", "error", "bound"], rows)
    if "jensen" in cfg:
        jc = cfg["jensen"]
        jfuncs = [laminates.Polynomial.from_config(f) for f in jc.get("functions", DEFAULT_TEST_FUNCTIONS[4:])]
        for k, f in enumerate(jfuncs):
            r = laminates.jensen_witness_check(mu, f, jc["n"], jc["eps"], jc["delta"], omega=omega)
            rep.check(f"jensen_mean_{k}", r.lhs - r.rhs, jc["eps"], r.margin_a >= 0)
            rep.check(f"jensen_derivative_{k}", r.d2_sup, r.c_bound * r.jump * (1 + 1 / np.sqrt(r.n)), r.margin_b >= 0)
            rep.info[f"jensen_c_measured_{k}"] = r.c_measured
    return rep


def _polytope(spec):
    if spec == "cube":
        return geometry.Polytope.cube(3)
    if spec == "octahedron":
        return geometry.Polytope.cross_polytope(3)
    if spec == "simplex":
        return geometry.Polytope.simplex(3)
    return geometry.Polytope(np.asarray(spec["vertices"], dtype=float))


def cmd_hausdorff(cfg, rng, out_dir):
    rep = Report("hausdorff", None, cfg)
    rows = []
    for k, audit_cfg in enumerate(cfg["audits"]):
        K = _polytope(audit_cfg["polytope"])
        s = audit_cfg["samples"]
        xs = np.linspace(s["start"], s["stop"], s["count"])
        fs = audit_cfg["slope"] * xs + audit_cfg["offset"]
        audit = geometry.slice_continuity_audit(K, xs, fs, audit_cfg["delta_grid"], audit_cfg["compare"])
        rep.check(f"audit_{k}_a_k_finite", audit.a_k, "finite", bool(np.isfinite(audit.a_k)))
        rep.check(f"audit_{k}_oracle_gap", audit.oracle_gap, audit_cfg["oracle_tol"], audit.oracle_gap <= audit_cfg["oracle_tol"])
        rep.check(f"audit_{k}_consistent", audit.a_k, "bounds all ratios", audit.consistent)
        rep.info[f"audit_{k}_modulus"] = {format(d, ".17g"): e for d, e in audit.modulus.items()}
        rows.extend((k, d, e) for d, e in audit.modulus.items())
    _write_csv(out_dir / "hausdorff_modulus.csv", ["audit", "delta", "epsilon"], rows)
    return rep


COMMANDS = {
    "symbols": cmd_symbols,
    "solve": cmd_solve,
    "shear": cmd_shear,
    "laminate": cmd_laminate,
    "hausdorff": cmd_hausdorff,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="euler-relax", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON scenario config (defaults apply when omitted)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps (default 0)")
    parser.add_argument("--out", default="euler-relax-out", help="output directory")
    return parser


def run(argv=None):
    """Run the CLI and return ``(exit_code, report_or_None)``."""
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    try:
        cfg = load_config(args.command, args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    rng = np.random.default_rng(args.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        rep = COMMANDS[args.command](cfg, rng, out_dir)
        code = EXIT_OK if rep.passed else EXIT_CHECK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    except (PreconditionError, EulerRelaxError) as exc:
        rep = Report(args.command, None, cfg)
        rep.error = {"type": type(exc).__name__, "message": str(exc), "measured": getattr(exc, "measured", {})}
        code = EXIT_PRECONDITION
        print(f"precondition failed: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    rep.seed = args.seed
    rep.write(out_dir)
    status = {EXIT_OK: "PASS", EXIT_CHECK: "FAIL", EXIT_PRECONDITION: "PRECONDITION"}[code]
    for c in rep.checks:
        print(f"{'ok  ' if c['passed'] else 'FAIL'} {c['name']}: {c['measured']}")
    print(f"{args.command}: {status} (report in {out_dir / 'report.json'})")
    return code, rep


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())

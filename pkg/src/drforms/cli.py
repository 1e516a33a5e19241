"""drforms command line: ``compute`` objects and ``verify`` identity suites.

Exit codes: 0 ok, 1 invalid configuration, 2 precision exhausted, 3 an identity failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, fields

from . import __version__
from .cinfty import PrecisionExhausted, working_precision
from .eisenstein import (
    PointForms,
    bold_E_j,
    default_degree_bound,
    eis_scalar,
    eis_tate,
    false_eisenstein,
    j_invariants,
    u_expansion,
    w_normalize,
)
from .fields import factor_prime_power
from .lattice import UncertifiedPoint, parse_point
from .suites import DEFAULT_SUITES, SUITES, RunContext, run_suites
from .tate import OutOfDomain

EXIT_OK, EXIT_CONFIG, EXIT_PRECISION, EXIT_FAILED = 0, 1, 2, 3

OBJECTS = ("pi", "module", "period", "h", "u", "E", "boldE", "eis", "J")
RANK_ONE_OK = {"pi"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    q: int = 2
    r: int = 2
    theta_precision: int = 80
    t_trunc: int = 24
    z_trunc: int | None = None
    degree_bound: int | None = None
    point: str = "canonical"
    route: str = "u"
    j: int = 1
    k: int = 1
    output: str = "json"
    suite: tuple = DEFAULT_SUITES

    def validate(self, command: str, obj: str | None = None):
        try:
            factor_prime_power(self.q)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        min_r = 1 if obj in RANK_ONE_OK else 2
        if self.r < min_r:
            raise ConfigError(f"r must be >= {min_r} for {obj or command}")
        if self.q**self.r > 64:
            raise ConfigError("q^r > 64 is outside the desk-scale range")
        if not 8 <= self.theta_precision <= 400:
            raise ConfigError("theta precision must lie in [8, 400]")
        if not 1 <= self.t_trunc <= 64:
            raise ConfigError("t truncation must lie in [1, 64]")
        if self.z_trunc is not None and not self.q**2 - 1 <= self.z_trunc <= self.q**3:
            raise ConfigError("Z truncation must lie in [q^2 - 1, q^3]")
        if self.degree_bound is not None and not 0 <= self.degree_bound <= 5:
            raise ConfigError("degree bound must lie in [0, 5]")
        if self.output not in ("json", "text"):
            raise ConfigError("output must be json or text")
        if self.route not in ("u", "det", "dL", "bold"):
            raise ConfigError(f"unknown route {self.route!r}")
        unknown = [s for s in self.suite if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")

    @property
    def D(self) -> int:
        return default_degree_bound(self.r) if self.degree_bound is None else self.degree_bound


def load_config_file(path: str) -> dict:
    """A flat JSON object whose keys are RunConfig field names."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat JSON object")
    names = {f.name for f in fields(RunConfig)}
    bad = [k for k in data if k not in names]
    if bad:
        raise ConfigError(f"unknown config keys {bad}")
    if "suite" in data:
        data["suite"] = tuple(data["suite"])
    return data


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("-P", "--theta-precision", type=int, dest="theta_precision")
    common.add_argument("-N", "--t-trunc", type=int, dest="t_trunc")
    common.add_argument("-M", "--z-trunc", type=int, dest="z_trunc")
    common.add_argument("-D", "--degree-bound", type=int, dest="degree_bound")
    common.add_argument("--point")
    common.add_argument("--output", choices=("json", "text"))
    common.add_argument("--config", help="flat JSON config (overrides DRFORMS_CONFIG)")

    parser = argparse.ArgumentParser(prog="drforms", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compute", parents=[common], help="compute one object")
    comp.add_argument("object", choices=OBJECTS)
    comp.add_argument("--route", choices=("u", "det", "dL", "bold"))
    comp.add_argument("--j", type=int, help="index for E^[j] (default 1)")
    comp.add_argument("--k", type=int, help="weight for eis (default 1)")
    comp.add_argument("--tate", action="store_true", help="eis: the t-valued vector instead of the scalar sum")

    ver = sub.add_parser("verify", parents=[common], help="run identity suites")
    ver.add_argument("suites", nargs="*", help=f"any of {', '.join(SUITES)}")
    ver.add_argument("--suite", help="comma-separated suite list")
    return parser


def resolve_config(args) -> RunConfig:
    """Flags > config file > defaults."""
    values = {}
    path = args.config or os.environ.get("DRFORMS_CONFIG")
    if path:
        values.update(load_config_file(path))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "suite":
            values[f.name] = v
    if args.command == "verify":
        chosen = list(args.suites)
        if args.suite:
            chosen += [s.strip() for s in args.suite.split(",") if s.strip()]
        if chosen:
            values["suite"] = tuple(chosen)
    return RunConfig(**values)


def _meta(cfg: RunConfig) -> dict:
    return {"drforms": __version__, "config": {**asdict(cfg), "suite": list(cfg.suite)}, "timestamp": time.time()}


def _value_doc(v) -> dict:
    """Value plus certified relative digits (None when the value is exact)."""
    err, size = v.err_deg, v.size_deg()
    digits = None if err is None or size is None else str(size - err)
    return {"value": v.to_json(), "certified_digits": digits}


def compute(cfg: RunConfig, obj: str, tate: bool = False) -> dict:
    from .drinfeld import carlitz_pi

    q = cfg.q
    if obj == "pi":
        return {"object": "pi", **_value_doc(carlitz_pi(q))}
    z = parse_point(cfg.point, q, cfg.r)
    forms = PointForms(z, cfg.D, cfg.t_trunc)
    out = {"object": obj, "point": z.describe()}
    if obj == "module":
        out["value"] = forms.mod.to_json()
    elif obj == "period":
        out["value"] = [[x.to_json() for x in row] for row in forms.period_matrix]
    elif obj == "h":
        out.update(_value_doc(forms.h))
    elif obj == "u":
        ux = u_expansion(z, cfg.D, forms.tilde_mod, forms.pi)
        out.update(_value_doc(ux.terms[0][1]))
        out["u_expansion"] = ux.to_json()
    elif obj == "E":
        v = false_eisenstein(forms, cfg.route, j=cfg.j)
        out.update(route=cfg.route, j=cfg.j, **_value_doc(v))
    elif obj == "boldE":
        out.update(j=cfg.j, value=bold_E_j(forms, cfg.j).to_json())
    elif obj == "eis":
        if tate:
            out["value"] = eis_tate(z, cfg.k, cfg.D, cfg.t_trunc).to_json()
        else:
            out.update(_value_doc(eis_scalar(z, cfg.k, cfg.D)))
        out["k"] = cfg.k
    elif obj == "J":
        nm = w_normalize(forms.mod)
        out["value"] = [x.to_json() for x in j_invariants(forms.mod)]
        out["normalized"] = {"w": nm.w.to_json(), "g": [x.to_json() for x in nm.g], "delta": nm.delta.to_json()}
    return out


def verify(cfg: RunConfig):
    ctx = RunContext(cfg.q, cfg.r, N=cfg.t_trunc, D=cfg.degree_bound, P=cfg.theta_precision,
                     M=cfg.z_trunc, point=cfg.point)
    return run_suites(ctx, cfg.suite)


def _emit(doc: dict, cfg: RunConfig | None, stream=None):
    stream = sys.stdout if stream is None else stream
    if cfg is not None and cfg.output == "text":
        if "reports" in doc:
            for rep in doc["reports"]:
                status = "PASS" if rep["pass"] else "FAIL"
                print(f"{status} {rep['name']} certified_valuation={rep['certified_valuation']} "
                      f"residual_valuation={rep['residual_valuation']}", file=stream)
        else:
            for k, v in doc.items():
                print(f"{k}: {json.dumps(v, sort_keys=True)}", file=stream)
        return
    print(json.dumps(doc, indent=1, sort_keys=True), file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = None
    try:
        cfg = resolve_config(args)
        cfg.validate(args.command, getattr(args, "object", None))
        with working_precision(cfg.theta_precision):
            if args.command == "compute":
                doc = {"meta": _meta(cfg), **compute(cfg, args.object, args.tate)}
                _emit(doc, cfg)
                return EXIT_OK
            reports = verify(cfg)
        doc = {"meta": _meta(cfg), "reports": [r.to_json() for r in reports]}
        _emit(doc, cfg)
        return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED
    except (ConfigError, UncertifiedPoint) as e:
        print(json.dumps({"error": "config", "message": str(e)}), file=sys.stderr)
        return EXIT_CONFIG
    except (PrecisionExhausted, OutOfDomain) as e:
        hint = {}
        if cfg is not None:
            hint = {"theta_precision": cfg.theta_precision + 40, "degree_bound": cfg.D + 1,
                    "t_trunc": cfg.t_trunc + 8}
        print(json.dumps({"error": "precision", "message": str(e), "recommended": hint}), file=sys.stderr)
        return EXIT_PRECISION
    except ValueError as e:
        print(json.dumps({"error": "config", "message": str(e)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

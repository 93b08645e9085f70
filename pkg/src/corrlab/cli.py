"""Command-line surface: one subcommand per computed object.

Outputs are deterministic: identical configs (including seeds) produce
byte-identical artifacts.  JSON artifacts embed the resolved config under
the "config" key; CSV artifacts carry it in a leading comment line and,
when written to a file, in a JSON sidecar next to the table.

Exit codes: 0 ok, 2 precondition failure, 3 budget/scale guard,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

from . import acceptance
from .correlations import box1d, box2d, pair_correlation, pyramid, triangle, triple_correlation
from .diophantine import RationalApprox, prime_denominator_approx
from .errors import AlphaParseError, BudgetError, CorrlabError, PreconditionError, VerificationError
from .modcount import (
    CongruenceTable,
    a0_table,
    a_table,
    delta,
    delta_sq_sum,
    delta_star_table,
    delta_table,
)
from .numeric import parse_alpha_spec
from .pipeline import SandwichBox, expected_box_size, obstruction_report, sandwich_bounds
from .reports import csv_lines
from .sequences import dilated_points, discrepancy, poisson_moment, simulate_counts, window_moment

_CSV_CELL_BUDGET = 300_000


@dataclass
class RunConfig:
    command: str
    alpha: str | None = None
    N: int | None = None
    L: float | None = None
    q: int | None = None
    M: int | None = None
    d: int = 2
    k: int | None = None
    eta: float | None = None
    beta: float | None = None
    C: float = 10.0
    seed: int = 0
    samples: int | None = None
    grid: int | None = None
    c1: int | None = None
    c2: int | None = None
    a: int | None = None
    box: str | None = None
    kernel: str | None = None
    table: str | None = None
    threads: int = 1
    out: str | None = None
    format: str = "json"
    csv_cells: bool = False

    def resolved(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _parse_kernel(spec: str, arity: int):
    spec = spec.strip()
    if spec == "triangle":
        return triangle()
    if spec == "pyramid":
        return pyramid()
    for head in ("box2:", "box2d:"):
        if spec.startswith(head):
            s1, t1, s2, t2 = (float(v) for v in spec[len(head):].split(","))
            return box2d(s1, t1, s2, t2)
    for head in ("box:", "box1d:"):
        if spec.startswith(head):
            s, t = (float(v) for v in spec[len(head):].split(","))
            return box1d(s, t)
    raise PreconditionError(f"unknown kernel spec {spec!r}")


def _emit(cfg: RunConfig, payload: dict | None = None, lines: list[str] | None = None,
          sidecar: dict | None = None):
    """Write the artifact to --out or stdout."""
    if lines is not None:
        text = "\n".join(lines) + "\n"
    else:
        body = dict(payload)
        body["config"] = cfg.resolved()
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        if sidecar is not None:
            side = dict(sidecar)
            side["config"] = cfg.resolved()
            with open(cfg.out + ".meta.json", "w") as fh:
                fh.write(json.dumps(side, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _points_cmd(cfg: RunConfig):
    alpha = parse_alpha_spec(cfg.alpha)
    ps = dilated_points(alpha, cfg.d, cfg.N)
    if cfg.format == "csv":
        rows = [(i, float(v)) for i, v in enumerate(ps.points)]
        _emit(cfg, lines=csv_lines(["i", "value"], rows, cfg.resolved()))
    else:
        _emit(cfg, {"n": ps.n, "points": [float(v) for v in ps.points]})


def _discrepancy_cmd(cfg: RunConfig):
    ps = dilated_points(parse_alpha_spec(cfg.alpha), cfg.d, cfg.N)
    _emit(cfg, {"N": cfg.N, "d": cfg.d, "discrepancy": discrepancy(ps)})


def _moments_cmd(cfg: RunConfig):
    kmax = cfg.k or 3
    ps = dilated_points(parse_alpha_spec(cfg.alpha), cfg.d, cfg.N)
    moments = {f"EW{j}": window_moment(ps, cfg.L, j) for j in range(1, kmax + 1)}
    refs = {f"poisson{j}": poisson_moment(cfg.L, j) for j in range(1, kmax + 1)}
    _emit(cfg, {"moments": moments, "poisson_reference": refs})


def _pair_cmd(cfg: RunConfig):
    ps = dilated_points(parse_alpha_spec(cfg.alpha), cfg.d, cfg.N)
    kernel = _parse_kernel(cfg.kernel or "box:-1,1", 1)
    res = pair_correlation(ps, cfg.L, kernel)
    out = res.as_dict()
    out["expected"] = cfg.L * kernel.integral
    out["ratio"] = res.value / out["expected"] if out["expected"] else None
    _emit(cfg, out)


def _triple_cmd(cfg: RunConfig):
    ps = dilated_points(parse_alpha_spec(cfg.alpha), cfg.d, cfg.N)
    kernel = _parse_kernel(cfg.kernel or "box2:-1,1,-1,1", 2)
    res = triple_correlation(ps, cfg.L, kernel)
    out = res.as_dict()
    out["expected"] = cfg.L**2 * kernel.integral
    out["ratio"] = res.value / out["expected"] if out["expected"] else None
    _emit(cfg, out)


def _table_artifact(cfg: RunConfig, table: CongruenceTable):
    rows = [(c1, c2, int(v) if table.entries.dtype == "int64" else float(v))
            for c1, c2, v in table.rows()]
    _emit(cfg, lines=csv_lines(["c1", "c2", "value"], rows, cfg.resolved()),
          sidecar=table.sidecar())


def _modcount_cmd(cfg: RunConfig):
    kind = cfg.table
    if kind == "a0":
        _table_artifact(cfg, a0_table(cfg.q))
    elif kind == "a":
        _table_artifact(cfg, a_table(cfg.q, cfg.M))
    elif kind == "delta":
        if cfg.c1 is None or cfg.c2 is None:
            _table_artifact(cfg, delta_table(cfg.q, cfg.M))
        else:
            _emit(cfg, {"delta": delta(cfg.q, cfg.M, cfg.c1, cfg.c2)})
    elif kind == "delta-star":
        _table_artifact(cfg, delta_star_table(cfg.q, cfg.beta if cfg.beta is not None else 0.5))
    else:
        raise PreconditionError(f"unknown modcount table {kind!r}")


def _variance_cmd(cfg: RunConfig):
    v = delta_sq_sum(cfg.q, cfg.M)
    upper = math.log(cfg.q) ** 3 * cfg.M**3 + math.log(cfg.q) ** 6 * cfg.q**2
    lower_applies = cfg.M <= 0.2 * cfg.q ** (2.0 / 3.0)
    _emit(cfg, {
        "delta_sq_sum": v,
        "upper_reference": upper,
        "upper_ratio": v / upper,
        "lower_reference": 0.1 * cfg.M**3 if lower_applies else None,
        "lower_holds": bool(v >= 0.1 * cfg.M**3) if lower_applies else None,
    })


def _approx_cmd(cfg: RunConfig):
    alpha = parse_alpha_spec(cfg.alpha)
    res = prime_denominator_approx(alpha, cfg.N, cfg.eta)
    if res is None:
        _emit(cfg, {"found": False})
    else:
        _emit(cfg, {"found": True, "a": res.a, "q": res.q, "err": res.err,
                    "q_prime": res.q_prime})


def _sandwich_cmd(cfg: RunConfig):
    from fractions import Fraction

    alpha = parse_alpha_spec(cfg.alpha)
    eta = cfg.eta if cfg.eta is not None else 0.05
    vals = [float(v) for v in (cfg.box or "-1,1,-1,1").split(",")]
    box = SandwichBox(*vals)
    if cfg.a is not None and cfg.q is not None:
        err = float(abs(alpha.exact - Fraction(cfg.a, cfg.q))) + alpha.error_bound
        approx = RationalApprox(cfg.a, cfg.q, err, True)
    else:
        beta = 1.0 - math.log(cfg.L) / math.log(cfg.N)
        Q = math.ceil(cfg.N ** ((2.0 + beta) / 2.0 + 10.0 * eta))
        approx = prime_denominator_approx(alpha, Q, eta)
        if approx is None:
            raise PreconditionError(f"no prime-denominator approximation in [{Q}, {2*Q}]")
    rep = sandwich_bounds(alpha, approx, cfg.N, cfg.L, eta, box)
    out = rep.as_dict()
    out["expected_size"] = expected_box_size(box, rep.q, cfg.L, cfg.N)
    if cfg.csv_cells:
        _sandwich_csv(cfg, rep, box)
        return
    _emit(cfg, out)


def _sandwich_csv(cfg: RunConfig, rep, box: SandwichBox):
    """Per-(r1, r2) cell projection of the fattened box (budget-guarded)."""
    from .modcount import count_A

    (lo1, hi1), (lo2, hi2) = box.residue_ranges(rep.q, rep.L, rep.N, rep.eta, fattened=True)
    half = (rep.q - 1) // 2
    lo1, hi1 = max(lo1, -half), min(hi1, half)
    lo2, hi2 = max(lo2, -half), min(hi2, half)
    cells = max(0, hi1 - lo1 + 1) * max(0, hi2 - lo2 + 1)
    if cells > _CSV_CELL_BUDGET:
        raise BudgetError(f"{cells} cells exceed the CSV projection budget {_CSV_CELL_BUDGET}")
    abar = pow(rep.a, -1, rep.q)
    rows = []
    for r1 in range(lo1, hi1 + 1):
        for r2 in range(lo2, hi2 + 1):
            if r1 * r2 == 0 or r1 + r2 == 0:
                continue
            rows.append((r1, r2, count_A(rep.q, rep.N, (abar * r1) % rep.q, (abar * r2) % rep.q)))
    _emit(cfg, lines=csv_lines(["r1", "r2", "count"], rows, cfg.resolved()))


def _obstruction_cmd(cfg: RunConfig):
    kernel = _parse_kernel(cfg.kernel or ("triangle" if (cfg.k or 2) == 2 else "box2:-1,1,-1,1"),
                           (cfg.k or 2) - 1)
    k = cfg.k or 2
    rep = obstruction_report(cfg.d, k, cfg.L, cfg.N, kernel,
                             grid=cfg.grid or 4096,
                             with_coefficients=(k == 2))
    if cfg.csv_cells and rep.coefficients is not None:
        mid = (len(rep.coefficients) - 1) // 2
        rows = [(ell - mid, float(c.real), float(c.imag))
                for ell, c in enumerate(rep.coefficients)]
        _emit(cfg, lines=csv_lines(["ell", "re", "im"], rows, cfg.resolved()))
        return
    _emit(cfg, rep.as_dict())


def _simulate_cmd(cfg: RunConfig):
    sim = simulate_counts(cfg.N, cfg.L, cfg.samples or 10000, cfg.seed)
    if cfg.format == "csv":
        rows = [(k, int(c), float(c) / sim.samples) for k, c in enumerate(sim.counts)]
        _emit(cfg, lines=csv_lines(["k", "count", "prob"], rows, cfg.resolved()))
    else:
        _emit(cfg, {
            "pmf": {str(k): float(c) / sim.samples for k, c in enumerate(sim.counts) if c},
            "moments": list(sim.moments),
            "poisson_moments": [poisson_moment(cfg.L, j) for j in range(1, 5)],
            "tv_distance_poisson": sim.tv_distance_poisson(),
        })


def _verify_cmd(cfg: RunConfig):
    only = None
    if cfg.table:  # reuse of the generic slot: comma-separated criterion numbers
        only = [int(v) for v in cfg.table.split(",")]
    results = acceptance.run_all(only, report=print)
    if not all(r.passed for r in results):
        raise VerificationError("acceptance criteria failed")


_COMMANDS = {
    "points": _points_cmd,
    "discrepancy": _discrepancy_cmd,
    "moments": _moments_cmd,
    "pair": _pair_cmd,
    "triple": _triple_cmd,
    "modcount": _modcount_cmd,
    "variance": _variance_cmd,
    "approx": _approx_cmd,
    "sandwich": _sandwich_cmd,
    "obstruction": _obstruction_cmd,
    "simulate": _simulate_cmd,
    "verify": _verify_cmd,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corrlab",
                                description="spacing statistics of dilated power sequences mod 1")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--alpha", help="dilation spec (rational:a/q, dec:., sqrt:k, golden, pi-frac, cf:...)")
        sp.add_argument("--N", type=int)
        sp.add_argument("--L", type=float)
        sp.add_argument("--q", type=int)
        sp.add_argument("--M", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--eta", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--C", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--c1", type=int)
        sp.add_argument("--c2", type=int)
        sp.add_argument("--a", type=int)
        sp.add_argument("--box", help="s1,t1,s2,t2")
        sp.add_argument("--kernel", help="box:s,t | triangle | box2:s1,t1,s2,t2 | pyramid")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out", help="artifact path (default: stdout)")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--csv", dest="csv_cells", action="store_const", const=True,
                        help="emit the per-cell / per-ell CSV projection")
        return sp

    for name in ("points", "discrepancy", "moments", "pair", "triple", "variance",
                 "approx", "sandwich", "obstruction", "simulate"):
        add(name)
    mp = add("modcount")
    mp.add_argument("table", choices=["a0", "a", "delta", "delta-star"])
    vp = add("verify")
    vp.add_argument("--only", dest="table", help="comma-separated criterion numbers")
    return p


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PreconditionError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        ns = vars(args)
        cfgfile = ns.pop("config", None)
        merged = {}
        if cfgfile:
            string_keys = {"alpha", "box", "kernel", "out", "format", "table", "command"}
            for key, val in _load_config_file(cfgfile).items():
                if key not in RunConfig.__dataclass_fields__:
                    raise PreconditionError(f"unknown config key {key!r}")
                if key in string_keys:
                    merged[key] = val
                elif key == "csv_cells":
                    merged[key] = val.lower() in ("1", "true", "yes")
                else:
                    merged[key] = int(val) if val.lstrip("-").isdigit() else float(val)
        merged.update({k: v for k, v in ns.items() if v is not None})
        merged.setdefault("threads", int(os.environ.get("CORRLAB_THREADS", "1")))
        merged.setdefault("format", "csv" if merged.get("command") in ("points", "simulate") else "json")
        cfg = RunConfig(**merged)
        if cfg.threads < 1:
            raise PreconditionError("threads must be >= 1")
        _COMMANDS[cfg.command](cfg)
        return 0
    except AlphaParseError as exc:
        _error(exc, 2, position=exc.position)
        return 2
    except PreconditionError as exc:
        _error(exc, 2)
        return 2
    except BudgetError as exc:
        _error(exc, 3)
        return 3
    except VerificationError as exc:
        _error(exc, 4)
        return 4
    except CorrlabError as exc:
        _error(exc, 2)
        return 2


def _error(exc: Exception, code: int, **extra):
    payload = {"error": {"type": type(exc).__name__, "message": str(exc), "code": code, **extra}}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())

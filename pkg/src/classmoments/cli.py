"""Command-line entry point: `classmoments <subcommand> ...`.

Exit status: 0 on success, 1 when a verification fails, 2 for invalid
parameters, 3 when a work budget is exhausted.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .arith import WorkBudgetExceeded

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    d: int = None
    X: int = None
    Z: int = None
    g: list = field(default_factory=lambda: [3])
    k: str = None
    H: int = None
    V0: int = None
    ell: int = None
    b: int = None
    radius: int = None
    lo: int = None
    hi: int = None
    grid: list = None
    table: str = None
    mode: str = "squarefree"
    column: str = "torsion"
    strategy: str = "congruence"
    quick: bool = False
    only: list = None
    output: str = None
    jobs: int = 1
    budget: int = 10**7

    def validate(self):
        for name in ("d", "X", "Z", "ell", "radius", "lo", "hi", "V0"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"--{name} must be positive, got {v}")
        if self.b is not None and self.ell is not None and not 0 <= self.b < self.ell:
            raise ValueError(f"--b must lie in [0, {self.ell})")
        if self.jobs < 1 or self.budget < 1:
            raise ValueError("--jobs and --budget must be positive")
        if self.mode not in ("squarefree", "fundamental"):
            raise ValueError(f"unknown mode {self.mode}")
        if self.column not in ("torsion", "sylow"):
            raise ValueError(f"unknown column {self.column}")
        if self.k is not None and Fraction(self.k) < 0:
            raise ValueError("k must be non-negative")
        return self


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()]


def _fraction(s):
    try:
        return str(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an integer or fraction p/q: {s!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="classmoments", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="directory for CSV/JSON artifacts")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--budget", type=int, default=10**7, help="work budget for enumerations")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("classgroup", parents=[common], help="class group of Q(sqrt(-d))")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--g", type=_int_list, default=[3, 5])

    s = sub.add_parser("sweep", parents=[common], help="h and g-parts over square-free d in [from, to)")
    s.add_argument("--from", dest="lo", type=int, required=True)
    s.add_argument("--to", dest="hi", type=int, required=True)
    s.add_argument("--g", type=_int_list, default=[3])

    s = sub.add_parser("repcount", parents=[common], help="S_g(d; Z), or N(Z, X; V0) with --X and --V0")
    s.add_argument("--d", type=int)
    s.add_argument("--X", type=int)
    s.add_argument("--V0", type=int)
    s.add_argument("--Z", type=int, required=True)
    s.add_argument("--g", type=_int_list, default=[3])
    s.add_argument("--strategy", choices=["direct", "congruence"], default="congruence")

    s = sub.add_parser("tg", parents=[common], help="T_g pair count and sum R(R - 1)")
    s.add_argument("--X", type=int, required=True)
    s.add_argument("--Z", type=int, required=True)
    s.add_argument("--g", type=_int_list, default=[3])

    s = sub.add_parser("lattice", parents=[common], help="reduce {z2 = b z1 mod ell} and count points")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--radius", type=int, required=True)

    s = sub.add_parser("moments", parents=[common], help="moment sums, fit and theoretical exponent")
    s.add_argument("--g", type=_int_list, default=[3])
    s.add_argument("--k", type=_fraction, default="1")
    s.add_argument("--grid", type=_int_list, default=[10**3, 10**4, 10**5])
    s.add_argument("--H", type=int, help="also report the tail count N_g(H; X) at the largest X")
    s.add_argument("--column", choices=["torsion", "sylow"], default="torsion")
    s.add_argument("--mode", choices=["squarefree", "fundamental"], default="squarefree")
    s.add_argument("--table", help="existing sweep CSV to read instead of sweeping")

    s = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--only", type=_int_list)
    return p


def _emit(cfg, name, payload):
    payload = {"config": asdict(cfg), **payload}
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    print(text)
    if cfg.output:
        os.makedirs(cfg.output, exist_ok=True)
        with open(os.path.join(cfg.output, name), "w") as fh:
            fh.write(text + "\n")


def _single_g(cfg):
    if len(cfg.g) != 1:
        raise ValueError("this subcommand takes a single --g")
    return cfg.g[0]


def cmd_classgroup(cfg):
    from .quadforms import class_group, g_part

    from .arith import is_squarefree

    if not is_squarefree(cfg.d):
        raise ValueError(f"d={cfg.d} is not square-free")
    grp = class_group(cfg.d)
    parts = {str(g): asdict(g_part(grp, g)) for g in cfg.g}
    _emit(cfg, f"classgroup_{cfg.d}.json", {
        "d": cfg.d, "delta": grp.delta.delta, "h": grp.h,
        "divisors": list(grp.divisors), "g_parts": parts,
    })
    return EXIT_OK


def cmd_sweep(cfg):
    from .moments import sweep

    path = None
    if cfg.output:
        os.makedirs(cfg.output, exist_ok=True)
        path = os.path.join(cfg.output, f"sweep_{cfg.lo}_{cfg.hi}_g{'-'.join(map(str, cfg.g))}.csv")
    table = sweep(cfg.lo, cfg.hi, cfg.g, path=path, jobs=cfg.jobs)
    if path:
        print(json.dumps({"config": asdict(cfg), "rows": len(table), "csv": path}, indent=2, sort_keys=True))
    else:
        from .moments import header
        print(",".join(header(table.g_list)))
        for row in table.rows():
            print(",".join(map(str, row)))
    return EXIT_OK


def cmd_repcount(cfg):
    from .repcount import WindowParams, n_count, s_g_direct, write_witnesses

    g = _single_g(cfg)
    if cfg.X is not None:
        if cfg.V0 is None:
            raise ValueError("--X needs --V0")
        params = WindowParams(cfg.X, cfg.Z, g)
        res = n_count(params, cfg.V0, strategy=cfg.strategy, budget=cfg.budget)
        _emit(cfg, f"ncount_{cfg.X}_{cfg.Z}_{g}_{cfg.V0}.json", json.loads(res.to_json()))
        return EXIT_OK
    if cfg.d is None:
        raise ValueError("repcount needs --d, or --X with --V0")
    res = s_g_direct(cfg.d, cfg.Z, g)
    if cfg.output:
        os.makedirs(cfg.output, exist_ok=True)
        write_witnesses(os.path.join(cfg.output, f"witnesses_{cfg.d}_{cfg.Z}_{g}.csv"), res.witnesses)
    _emit(cfg, f"repcount_{cfg.d}_{cfg.Z}_{g}.json", {
        "d": cfg.d, "Z": cfg.Z, "g": g, "count": res.count, "unordered": res.unordered,
        "convention": res.convention,
        "witnesses": [asdict(w) for w in res.witnesses],
    })
    return EXIT_OK


def cmd_tg(cfg):
    from .repcount import t_g

    g = _single_g(cfg)
    rep = t_g(cfg.X, cfg.Z, g, budget=cfg.budget)
    out = asdict(rep)
    out.pop("pairs")
    out["by_delta"] = {str(k): v for k, v in rep.by_delta.items()}
    _emit(cfg, f"tg_{cfg.X}_{cfg.Z}_{g}.json", out)
    return EXIT_OK


def cmd_lattice(cfg):
    from .lattice import count_points, davenport_bound, gauss_reduce, lattice_from_congruence

    L = lattice_from_congruence(cfg.ell, cfg.b)
    red, m = gauss_reduce(L)
    count = count_points(L, cfg.radius, budget=cfg.budget)
    _emit(cfg, f"lattice_{cfg.ell}_{cfg.b}_{cfg.radius}.json", {
        "det": red.det, "basis": [list(red.b1), list(red.b2)],
        "minima": {"lambda1": m.lambda1, "lambda2": m.lambda2, "v1": list(m.v1), "v2": list(m.v2)},
        "radius": cfg.radius, "count": count,
        "davenport_bound": davenport_bound(cfg.radius, m),
    })
    return EXIT_OK


def cmd_moments(cfg):
    from . import moments as mom

    g = _single_g(cfg)
    k = Fraction(cfg.k)
    grid = sorted(cfg.grid)
    if len(grid) < 3 or len(set(grid)) != len(grid):
        raise ValueError("--grid needs at least 3 distinct values")
    top = max(grid)
    if cfg.table:
        table = mom.read_table(cfg.table)
    else:
        need = 2 * top if cfg.H is not None else top
        table = mom.sweep(1, need, (g,), jobs=cfg.jobs)
    if cfg.mode == "fundamental":
        if g != 3 or k != 1 or cfg.column != "torsion":
            raise ValueError("fundamental mode reports the 3-torsion average only (g=3, k=1)")
        vals = [mom.dh_average(table, X) for X in grid]
        payload = {"grid": grid, "dh_average": vals}
    else:
        rep = mom.moment_report(table, g, k, grid, column=cfg.column)
        payload = json.loads(rep.to_json())
        if cfg.H is not None:
            payload["tail"] = asdict(mom.tail_count(table, g, cfg.H, top, cfg.column))
    _emit(cfg, f"moments_g{g}_k{str(k).replace('/', '-')}.json", payload)
    return EXIT_OK


def cmd_verify(cfg):
    from .acceptance import run_all

    results = run_all(quick=cfg.quick, only=cfg.only)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    if cfg.output:
        os.makedirs(cfg.output, exist_ok=True)
        with open(os.path.join(cfg.output, "verify.json"), "w") as fh:
            json.dump({"config": asdict(cfg), "results": [asdict(r) for r in results]}, fh,
                      indent=2, sort_keys=True)
    return EXIT_OK if n_pass == len(results) else EXIT_FAILED


COMMANDS = {
    "classgroup": cmd_classgroup, "sweep": cmd_sweep, "repcount": cmd_repcount, "tg": cmd_tg,
    "lattice": cmd_lattice, "moments": cmd_moments, "verify": cmd_verify,
}


def config_from_args(ns):
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in known})


def run(cfg):
    try:
        cfg.validate()
        return COMMANDS[cfg.subcommand](cfg)
    except WorkBudgetExceeded as e:
        print(f"work budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError) as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())

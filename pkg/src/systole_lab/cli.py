"""Command line front end: ``systole-lab VERB [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, InvalidParams, SystoleLabError, UnsupportedFormat
from .generators import GENERATORS, generate, model_torus
from .lattice import FlatTorus
from .surface import Surface, euler_genus, surface_from_json

VERBS = ("gen", "validate", "systole", "ratio", "pack", "nerve", "admissible", "entropy", "check", "optimize")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


# serialization --------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(obj[k])}" for k in sorted(obj)) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return "%.12g" % obj if math.isfinite(obj) else "null"
    return json.dumps(obj)


def emit(report: dict, fmt: str = "json") -> bytes:
    """Canonical bytes: sorted keys and %.12g floats (JSON) or a flat table (CSV)."""
    if fmt == "json":
        return (_encode(_plain(report)) + "\n").encode()
    if fmt == "csv":
        res = _plain(report).get("results", report)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if isinstance(res, dict) and "table" in res:
            table = res["table"]
            w.writerow(table["columns"])
            for row in table["rows"]:
                w.writerow(["%.12g" % x if isinstance(x, float) else x for x in row])
        else:
            w.writerow(["key", "value"])
            for k, v in sorted(_flatten(res).items()):
                w.writerow([k, "%.12g" % v if isinstance(v, float) else _encode(v) if isinstance(v, (list, dict)) else v])
        return buf.getvalue().encode()
    raise UnsupportedFormat(f"unsupported format {fmt!r}; use json or csv")


def _flatten(obj, prefix="") -> dict:
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
        return {k.rstrip("."): v for k, v in out.items()}
    out[prefix] = obj
    return out


# inputs ---------------------------------------------------------------------

def _load(args) -> Surface | FlatTorus:
    src = args.input
    if src is None:
        raise InputError("--input is required")
    path = Path(src)
    if path.exists():
        try:
            obj = json.loads(path.read_text())
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {src}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{src} is not valid JSON: {exc}") from None
        if isinstance(obj, dict) and ("basis" in obj or "tau" in obj) and "triangles" not in obj:
            return FlatTorus.from_json_obj(obj)
        surf = surface_from_json(obj)
        return _refine(surf, args.k) if args.k else surf
    name = src[8:] if src.startswith("builtin:") else src
    if name in GENERATORS:
        return generate(name, args.k or 0)
    raise InputError(f"input {src!r} is neither a readable file nor a builtin surface")


def _refine(surf: Surface, k: int) -> Surface:
    from .surface import subdivide
    return subdivide(surf, k)


def _need_surface(obj) -> Surface:
    if not isinstance(obj, Surface):
        raise InputError("this command needs a triangulated surface, not a torus basis")
    return obj


def _window(text: str | None):
    if text is None:
        return None
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise InputError("--window must look like Lmin:Lmax") from None
    if not (0 <= a < b):
        raise InputError("--window needs 0 <= Lmin < Lmax")
    return a, b


# verbs ----------------------------------------------------------------------

def cmd_gen(args):
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InvalidParams(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            params[k] = float(v)
        except ValueError:
            raise InvalidParams(f"parameter {k} must be numeric") from None
    if args.torus:
        if args.name not in GENERATORS:
            raise InputError(f"unknown generator {args.name!r}")
        tor = model_torus(args.name, **params)
        if tor is None:
            raise InvalidParams(f"{args.name} has no model torus")
        return tor.to_json_obj(), []
    surf = generate(args.name, args.k or 0, **params)
    return surf.to_json_obj(), []


def _summary(s: Surface) -> dict:
    chi, genus, orientable = euler_genus(s)
    return {"vertices": s.n_vertices, "edges": s.n_edges, "faces": s.n_faces, "euler_characteristic": chi,
            "genus": genus, "orientable": orientable, "area": s.total_area, "flat": s.is_flat()}


def cmd_validate(args):
    obj = _load(args)
    if isinstance(obj, FlatTorus):
        return {"valid": True, "dim": obj.dim, "volume": obj.volume}, []
    return {"valid": True, **_summary(obj)}, []


def cmd_systole(args):
    from .covering import homology_systole_z2, homotopy_systole
    obj = _load(args)
    if isinstance(obj, FlatTorus):
        from .lattice import shortest_vector
        sv = shortest_vector(obj)
        return {"systole": sv.norm, "kind": "lattice", "certified": True,
                "coefficients": list(sv.coefficients)}, []
    if args.kind == "z2":
        res = homology_systole_z2(obj)
    else:
        res = homotopy_systole(obj, threads=args.threads)
    return res.to_json_obj(), list(res.notes)


def cmd_ratio(args):
    obj = _load(args)
    if isinstance(obj, FlatTorus):
        from .lattice import embolic_torus, systole, systolic_ratio_torus
        return {"ratio": systolic_ratio_torus(obj), "systole": systole(obj), "volume": obj.volume,
                "embolic": embolic_torus(obj)}, []
    from .covering import homotopy_systole
    sys_len = homotopy_systole(obj, threads=args.threads).length
    return {"ratio": obj.total_area / sys_len ** 2, "systole": sys_len, "area": obj.total_area}, []


def cmd_pack(args):
    from .packing import greedy_ball_system, uncovered_vertices
    s = _need_surface(_load(args))
    if args.radius is None:
        raise InputError("--radius is required")
    system = greedy_ball_system(s, args.radius)
    out = system.to_json_obj()
    out["count"] = len(system)
    out["doubled_cover_gaps"] = len(uncovered_vertices(system, 2.0))
    return out, []


def cmd_nerve(args):
    from .packing import build_nerve, greedy_ball_system
    s = _need_surface(_load(args))
    if args.radius is None:
        raise InputError("--radius is required")
    if args.factor not in (1.0, 2.0, 5.0):
        raise InvalidParams("--factor must be 1, 2 or 5")
    system = greedy_ball_system(s, args.radius)
    nerve = build_nerve(system, args.factor)
    return nerve.to_json_obj(system), []


def cmd_admissible(args):
    from .packing import build_nerve, is_admissible, maximal_admissible_system
    s = _need_surface(_load(args))
    if args.alpha is None:
        raise InputError("--alpha is required")
    if args.system:
        from .packing import default_R0
        R0 = args.R0 if args.R0 is not None else default_R0(s)
        r = args.r if args.r is not None else R0 / 25
        system = maximal_admissible_system(s, args.alpha, r, args.an, R0)
        out = system.to_json_obj()
        out["nerve"] = build_nerve(system, 2.0).to_json_obj()
        return out, list(system.notes)
    if args.radius is None:
        raise InputError("--radius is required unless --system is given")
    r = args.r if args.r is not None else args.radius
    rep = is_admissible(s, args.vertex, args.radius, args.alpha, r, args.R0, args.an)
    return rep.to_json_obj(), []


def cmd_entropy(args):
    from .entropy import fit_entropy, growth_series
    obj = _load(args)
    win = _window(args.window)
    if win is None:
        raise InputError("--window is required")
    Ls = np.linspace(win[0], win[1], args.points)
    series = growth_series(obj, args.vertex, Ls)
    est = fit_entropy(series, win)
    out = {"series": series.to_json_obj(), "estimate": est.to_json_obj(),
           "table": {"columns": ["L", "count"], "rows": [[float(L), int(c)] for L, c in series.to_rows()]}}
    return out, []


def cmd_check(args):
    from . import entropy as en
    obj = _load(args)
    warnings = []
    suite = args.suite
    if suite == "constants":
        reps = en.check_constants(obj)
    elif suite == "burago-hebda":
        reps = [en.check_burago_hebda(_need_surface(obj))]
    elif suite == "sabourau":
        if args.alpha is None or args.beta is None:
            raise InputError("--alpha and --beta are required for the sabourau suite")
        reps = [en.check_sabourau_lemma(_need_surface(obj), args.alpha, args.beta, _window(args.window))]
        warnings.append(en.GATE_NOTE)
    elif suite == "orbit":
        s = _need_surface(obj)
        from .chart import flat_chart
        win = _window(args.window) or (0.0, 6.0)
        Ls = np.arange(math.ceil(win[0]), math.floor(win[1]) + 1, dtype=float)
        reps = [en.check_lemma_orbit_equality(s, flat_chart(s).torus, Ls)]
    else:
        raise InputError(f"unknown suite {suite!r}")
    return {"checks": [r.to_json_obj() for r in reps], "all_pass": all(r.verdict for r in reps)}, warnings


def cmd_optimize(args):
    from .optimize import optimize_edge_lengths, optimize_moduli
    if args.tau is not None:
        try:
            x, y = (float(t) for t in args.tau.split(","))
        except ValueError:
            raise InputError("--tau must look like x,y") from None
        opts = {"seed": args.seed}
        if args.max_iter:
            opts["max_iter"] = args.max_iter
        res = optimize_moduli((x, y), opts)
        return res.to_json_obj(), []
    s = _need_surface(_load(args))
    opts = {"seed": args.seed}
    if args.max_iter:
        opts["max_iter"] = args.max_iter
    res = optimize_edge_lengths(s, opts)
    warnings = ["edge-graph ratio; it is an upper bound for the systolic area only when the "
                "graph systole equals the geodesic systole"]
    return res.to_json_obj(), warnings


COMMANDS = {
    "gen": cmd_gen, "validate": cmd_validate, "systole": cmd_systole, "ratio": cmd_ratio,
    "pack": cmd_pack, "nerve": cmd_nerve, "admissible": cmd_admissible, "entropy": cmd_entropy,
    "check": cmd_check, "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="systole-lab", description="computational systolic geometry workbench")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    for verb in VERBS:
        q = sub.add_parser(verb)
        if verb == "gen":
            q.add_argument("name")
            q.add_argument("--param", action="append", help="generator parameter key=value")
            q.add_argument("--torus", action="store_true", help="write the model torus basis instead")
        else:
            q.add_argument("--input", help="surface/torus JSON path or builtin name")
        q.add_argument("--out")
        q.add_argument("--format", default="json")
        q.add_argument("-k", "--k", type=int, default=0, help="subdivision rounds")
        q.add_argument("--alpha", type=float)
        q.add_argument("--beta", type=float)
        q.add_argument("--radius", type=float)
        q.add_argument("--window")
        q.add_argument("--suite", default="constants")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--threads", type=int, default=1)
        q.add_argument("--an", type=float, default=0.1)
        q.add_argument("--timing", action="store_true", help="add wall time (breaks byte identity)")
        if verb == "systole":
            q.add_argument("--kind", choices=["homotopy", "z2"], default="homotopy")
        if verb == "nerve":
            q.add_argument("--factor", type=float, default=1.0)
        if verb == "admissible":
            q.add_argument("--vertex", type=int, default=0)
            q.add_argument("--r", type=float)
            q.add_argument("--R0", type=float)
            q.add_argument("--system", action="store_true")
        if verb == "entropy":
            q.add_argument("--vertex", type=int, default=0)
            q.add_argument("--points", type=int, default=31)
        if verb == "optimize":
            q.add_argument("--tau")
            q.add_argument("--max-iter", type=int, dest="max_iter")
    return p


def run(argv) -> tuple[int, bytes, str]:
    """Execute a command; returns (exit code, report bytes, diagnostic)."""
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise InputError("a command is required: " + ", ".join(VERBS))
        if args.format not in ("json", "csv"):
            raise UnsupportedFormat(f"unsupported format {args.format!r}; use json or csv")
        if args.k < 0 or args.threads < 1:
            raise InputError("-k must be >= 0 and --threads >= 1")
        results, warnings = COMMANDS[args.verb](args)
        if args.verb == "gen":
            # full precision so shared edge lengths round-trip exactly
            payload = (json.dumps(_plain(results), sort_keys=True) + "\n").encode()
        else:
            echo = {k: v for k, v in sorted(vars(args).items()) if v is not None and k not in ("out", "timing")}
            report = {"command": echo, "version": __version__, "results": results, "warnings": warnings}
            if args.timing:
                report["wall_time"] = time.perf_counter() - t0
            payload = emit(report, args.format)
        if args.out:
            Path(args.out).write_bytes(payload)
            return 0, b"", ""
        return 0, payload, ""
    except SystoleLabError as exc:
        return exc.exit_code, b"", f"error [{type(exc).__name__}]: {exc}"
    except (ValueError, TypeError, KeyError, IndexError, OSError) as exc:
        return 1, b"", f"error [{type(exc).__name__}]: {exc}"
    except (MemoryError, RuntimeError, RecursionError) as exc:
        return 2, b"", f"error [{type(exc).__name__}]: {exc}"


def main(argv=None) -> int:
    code, payload, diag = run(sys.argv[1:] if argv is None else argv)
    if payload:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    if diag:
        print(diag, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

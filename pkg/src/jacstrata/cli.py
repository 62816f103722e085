"""Command-line front end: ``jacstrata graphs|bijection|chi|selftest``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

from . import ENGINE_VERSION
from .bijections import BijectionError, InadmissibleDegree, degree_admissible
from .interior import InteriorProvider, MissingInteriorData

EXIT_OK = 0
EXIT_INADMISSIBLE = 2
EXIT_MISSING_PLUGIN = 3
EXIT_INTERNAL = 4

CACHE_ENV = "JACSTRATA_CACHE_DIR"
MUTATION_ENV = "JACSTRATA_MUTATIONS"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# -- parsing helpers ---------------------------------------------------------

def parse_colors(text: str) -> tuple:
    text = (text or "").strip()
    if not text:
        return ()
    try:
        colors = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad color multiplicities {text!r}")
    if any(c < 0 for c in colors):
        raise argparse.ArgumentTypeError("color multiplicities must be nonnegative")
    return colors


def parse_range(text: str) -> List[int]:
    for sep in ("..", ":"):
        if sep in text:
            a, b = text.split(sep, 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise argparse.ArgumentTypeError("empty degree range")
            return list(range(lo, hi + 1))
    raise argparse.ArgumentTypeError("degree range must look like A..B")


# -- cache -------------------------------------------------------------------------

class Cache:
    """Content-addressed JSON store; unreadable entries are treated as misses."""

    def __init__(self, root: Optional[str]):
        self.root = Path(root) if root else None

    @staticmethod
    def key(parts: dict) -> str:
        blob = json.dumps({**parts, "engine": ENGINE_VERSION}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key):
        return self.root / key[:2] / f"{key}.json"

    def get(self, key):
        if self.root is None:
            return None
        path = self._path(key)
        try:
            entry = json.loads(path.read_text())
            payload = entry["payload"]
            digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
            if entry.get("key") != key or entry.get("digest") != digest:
                return None
            return payload
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, key, payload):
        if self.root is None:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"key": key, "digest": digest, "payload": payload}, sort_keys=True))
        os.replace(tmp, path)

    def fetch(self, parts: dict, compute, bypass=False):
        key = self.key(parts)
        if not bypass:
            hit = self.get(key)
            if hit is not None:
                return hit
        payload = compute()
        if not bypass:
            self.put(key, payload)
        return payload


# -- output ---------------------------------------------------------------------------

def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands -----------------------------------------------------------------------------

def _provider(args) -> Optional[InteriorProvider]:
    if not args.plugin:
        return None
    provider = InteriorProvider()
    for path in args.plugin:
        if not Path(path).exists():
            raise CliError(f"plugin table {path} not found", EXIT_MISSING_PLUGIN)
        provider.load_plugin(path)
    return provider


def _plugin_digest(args) -> List[str]:
    return [hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in (args.plugin or [])]


def graphs_payload(g: int, colors: tuple) -> dict:
    from .graphs import UnstableTypeError, pair_classes
    from .picard import pic_group

    try:
        pairs = pair_classes(g, colors)
    except UnstableTypeError as exc:
        raise CliError(str(exc), EXIT_INADMISSIBLE)
    return {
        "type": [g, list(colors)],
        "pairs": [
            {
                "graph": graph.to_json(),
                "subgraph": sorted(sub.edge_subset),
                "aut_order": len(aut),
                "excess": sub.excess,
                "torus_rank": sub.betti,
                "torsor_size": pic_group(sub.multigraph()).order,
            }
            for graph, sub, aut in pairs
        ],
    }


def cmd_graphs(args, cache: Cache) -> str:
    colors = args.colors
    payload = cache.fetch(
        {"command": "graphs", "g": args.genus, "colors": list(colors)},
        lambda: graphs_payload(args.genus, colors),
        args.no_cache,
    )
    if args.format == "json":
        return dump_json(payload)
    if args.format == "csv":
        rows = [
            [i, json.dumps(p["graph"], sort_keys=True, separators=(",", ":")), " ".join(map(str, p["subgraph"])), p["aut_order"], p["excess"], p["torus_rank"], p["torsor_size"]]
            for i, p in enumerate(payload["pairs"])
        ]
        return _csv(rows, ["index", "graph", "subgraph", "aut_order", "excess", "torus_rank", "torsor_size"])
    lines = [f"type (g={args.genus}, colors={list(colors)}): {len(payload['pairs'])} pairs"]
    for i, p in enumerate(payload["pairs"]):
        graph = json.dumps(p["graph"], sort_keys=True, separators=(",", ":"))
        lines.append(f"{i:3d}  |Aut|={p['aut_order']:<3d} e={p['excess']} b1={p['torus_rank']} |Pic0|={p['torsor_size']}  {graph}  G0={p['subgraph']}")
    return "\n".join(lines) + "\n"


def cmd_bijection(args, cache: Cache) -> str:
    from .bijections import build_bijection
    from .graphs import StableGraph, automorphism_group

    try:
        graph = StableGraph.from_json(Path(args.graph).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read graph file: {exc}", EXIT_INTERNAL)
    colors = graph.color_profile()
    g = graph.genus
    for d in (args.d1, args.d2):
        if not degree_admissible(g, colors, d):
            raise CliError(f"degree {d} is not admissible for type ({g}, {list(colors)})", EXIT_INADMISSIBLE)
    bij = build_bijection(graph, colors, args.d1, args.d2, multiplier=args.multiplier)
    payload = {
        "graph": graph.to_json(),
        "d1": args.d1,
        "d2": args.d2,
        "steps": bij.steps_json(),
        "table": [[list(k), list(v)] for k, v in sorted(bij.table().items())],
    }
    if args.verify:
        rep = bij.check([a.vertex_perm for a in automorphism_group(graph)])
        payload.update(rep)
        payload["status"] = "PASS" if rep["bijective"] and rep["equivariant"] else "FAIL"
    if args.format == "json":
        return dump_json(payload)
    if args.format == "csv":
        return _csv([[" ".join(map(str, a)), " ".join(map(str, b))] for a, b in payload["table"]], ["source", "target"])
    lines = [f"steps: {payload['steps']}"]
    lines += [f"{tuple(a)} -> {tuple(b)}" for a, b in payload["table"]]
    if args.verify:
        lines.append(payload["status"])
    return "\n".join(lines) + "\n"


def chi_payload(g, colors, d, provider, jobs, plugin_paths) -> dict:
    from .assembly import chi_compactified
    from .motives import epoly_to_text

    res = chi_compactified(g, colors, d, provider, jobs=jobs, plugin_paths=plugin_paths)
    payload = res.to_json()
    payload["text"] = epoly_to_text(res.e_polynomial)
    return payload


def cmd_chi(args, cache: Cache) -> str:
    g, colors = args.genus, args.colors
    provider = _provider(args)
    plugins = _plugin_digest(args)
    degrees = args.all_degrees if args.all_degrees is not None else [args.degree]
    if degrees == [None]:
        raise CliError("give --degree or --all-degrees", EXIT_INADMISSIBLE)
    admissible = [d for d in degrees if degree_admissible(g, colors, d)]
    rejected = [d for d in degrees if d not in admissible]
    if not admissible:
        raise CliError(f"no admissible degree among {degrees} for type ({g}, {list(colors)})", EXIT_INADMISSIBLE)
    results = {}
    for d in admissible:
        results[d] = cache.fetch(
            {"command": "chi", "g": g, "colors": list(colors), "d": d, "plugins": plugins},
            lambda d=d: chi_payload(g, colors, d, provider, args.jobs, args.plugin or []),
            args.no_cache,
        )
    if args.all_degrees is None:
        payload = results[admissible[0]]
    else:
        # totals and per-stratum classes must agree across admissible degrees
        distinct = {json.dumps({k: v for k, v in r.items() if k != "degree"}, sort_keys=True) for r in results.values()}
        first = results[admissible[0]]
        payload = {
            "type": first["type"],
            "degrees": admissible,
            "rejected": rejected,
            "e_polynomial": first["e_polynomial"],
            "text": first["text"],
            "symbols": first["symbols"],
            "admissible_status": "PASS" if len(distinct) == 1 else "FAIL",
        }
        payload["status"] = "PRECONDITION" if rejected else payload["admissible_status"]
        if "equivariant" in first:
            payload["equivariant"] = first["equivariant"]
    if args.format == "json":
        return dump_json(payload)
    if args.format == "csv":
        return _csv([[t["u"], t["v"], t["c"]] for t in payload["e_polynomial"]], ["u", "v", "c"])
    lines = [payload["text"]]
    if args.all_degrees is not None:
        lines.append(f"degrees {payload['degrees']}: {payload['admissible_status']}")
        if rejected:
            lines.append(f"inadmissible degrees skipped: {rejected} (status {payload['status']})")
    if payload.get("symbols"):
        lines.append("cusp-form symbols: " + ", ".join(payload["symbols"]))
    return "\n".join(lines) + "\n"


def cmd_selftest(args, cache: Cache) -> str:
    from .acceptance import run_acceptance
    from .assembly import chi_compactified

    lines = []
    skip = set(args.skip or [])
    results = run_acceptance(skip=skip, stream=sys.stderr if args.verbose else None)
    lines += [r.line() for r in results]
    ok = all(r.passed for r in results)
    # cache consistency: a cached value must equal a fresh computation, even
    # after the stored entry has been damaged
    if cache.root is not None:
        parts = {"command": "chi", "g": 1, "colors": [1, 1], "d": 0, "plugins": []}
        fresh = chi_payload(1, (1, 1), 0, None, 1, [])
        key = cache.key(parts)
        cache.put(key, fresh)
        path = cache._path(key)
        path.write_text(path.read_text()[: len(path.read_text()) // 2])
        again = cache.fetch(parts, lambda: chi_payload(1, (1, 1), 0, None, 1, []))
        hit = cache.fetch(parts, lambda: None)
        cache_ok = again == fresh and hit == fresh
        lines.append(f"[{'PASS' if cache_ok else 'FAIL'}] cache: corrupted entry recomputed, hit equals bypass")
        ok = ok and cache_ok
    lines.append("PASS" if ok else "FAIL")
    if not ok:
        raise CliError("\n".join(lines), EXIT_INTERNAL)
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV))
    common.add_argument("--no-cache", action="store_true", help="bypass the cache")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--plugin", action="append", metavar="TABLE.json")

    p = argparse.ArgumentParser(prog="jacstrata", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("graphs", parents=[common], help="list (graph, spanning subgraph) classes")
    pg.add_argument("genus", type=int)
    pg.add_argument("--lambda", dest="colors", type=parse_colors, default=())

    pb = sub.add_parser("bijection", parents=[common], help="build a degree bijection on one graph")
    pb.add_argument("graph", help="graph JSON file")
    pb.add_argument("d1", type=int)
    pb.add_argument("d2", type=int)
    pb.add_argument("--verify", action="store_true")
    pb.add_argument("--multiplier", type=int)

    pc = sub.add_parser("chi", parents=[common], help="E-polynomial of the compactified Jacobian")
    pc.add_argument("genus", type=int)
    pc.add_argument("--lambda", dest="colors", type=parse_colors, default=())
    pc.add_argument("--degree", "-d", type=int)
    pc.add_argument("--all-degrees", type=parse_range)

    ps = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    ps.add_argument("--skip", action="append", help="name of a check to skip")
    ps.add_argument("--verbose", action="store_true")
    return p


COMMANDS = {"graphs": cmd_graphs, "bijection": cmd_bijection, "chi": cmd_chi, "selftest": cmd_selftest}


def main(argv=None) -> int:
    from .assembly import MUTATIONS, IntegralityError

    MUTATIONS.update(x for x in os.environ.get(MUTATION_ENV, "").split(",") if x)
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_INTERNAL
    cache = Cache(args.cache_dir)
    try:
        out = COMMANDS[args.command](args, cache)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except InadmissibleDegree as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except MissingInteriorData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_PLUGIN
    except (IntegralityError, BijectionError, AssertionError, ArithmeticError) as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

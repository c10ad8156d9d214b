"""Command-line front end.

    fewdist bound --space sphere:8 --distances " -1,-1/2,0,1/2"
    fewdist search --space hamming:10 --s 4
    fewdist construct --name leech-section --verify --out leech.txt
    fewdist table --theorem hamming-s3 --range 8..12
    fewdist verify result.json

Space grammar: ``hamming:<n>``, ``johnson:<n>,<w>``, ``sphere:<n>`` where n is
the ambient dimension, so ``sphere:8`` is S^7.  Distances are exact strings
such as ``-1/2`` or ``1/3+2√5``.  Exit status: 0 ok, 2 verification
mismatch, 1 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .bounds import Certificate, combined_bound
from .constructions import (
    ConstructionError,
    PointSet,
    e8_full,
    e8_half,
    golay23_even,
    golay23_weight7,
    hamming_weight_classes,
    johnson24_lift,
    johnson_prefix,
    leech_minimal_vectors,
    leech_pairs,
    leech_section,
    sphere_01,
    verify_spectrum,
)
from .exactmath import DomainError
from .search import SearchConfig, bound_for_known, search
from .spaces import HAMMING, JOHNSON, SPHERE, DistanceSet, Space, SpaceError

OK, USAGE, MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# output


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def render(data, fmt: str) -> str:
    rows = data if isinstance(data, list) else [data]
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False)
    flat = [_flatten(r) for r in rows]
    if fmt == "csv":
        keys = list(dict.fromkeys(k for r in flat for k in r))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        return buf.getvalue().rstrip("\n")
    blocks = ["\n".join(f"{k}: {v}" for k, v in r.items()) for r in flat]
    return "\n\n".join(blocks)


def _emit(args, data):
    text = render(data, args.format)
    if getattr(args, "out", None) and args.command != "construct":
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# helpers


def _space(text: str | None) -> Space:
    if not text:
        raise UsageError("--space is required")
    return Space.parse(text)


def _distances(text: str | None) -> list[str]:
    if not text:
        raise UsageError("--distances is required")
    return [t.strip() for t in text.split(",") if t.strip()]


def _config(args) -> SearchConfig:
    ks = None
    if getattr(args, "k", None):
        ks = tuple(tuple(int(v) for v in k.split(",")) for k in args.k)
    return SearchConfig(
        lp_truncation=args.lp_m,
        grid_steps=args.grid,
        precision_bits=args.precision_bits,
        parallel_width=args.jobs,
        emit_all_candidates=getattr(args, "all", False),
        refine_fallback=not getattr(args, "no_refine", False),
        k_filter=ks,
    )


def _parse_range(text: str | None, w: int | None) -> list[tuple]:
    """``8..12``, ``8,10,12`` or ``13:5,16:6``; returns (n,) or (n, w) tuples."""
    if not text:
        raise UsageError("--range is required")
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            n, ww = part.split(":")
            out.append((int(n), int(ww)))
            continue
        if ".." in part:
            lo, hi = part.split("..")
            ns = range(int(lo), int(hi) + 1)
        else:
            ns = [int(part)]
        out.extend((n,) if w is None else (n, w) for n in ns)
    return out


# ---------------------------------------------------------------------------
# theorem tables


def _sphere_s3_claim(n: int) -> int | None:
    special = {4: 27, 5: 39, 7: 91, 8: 120, 22: 2025}
    if n in special:
        return special[n]
    if n == 6 or 9 <= n <= 19:
        return n * (n + 1) * (n + 2) // 6
    if 20 <= n <= 30:
        return (n + 3) * (n * n + 2) // 6
    if 31 <= n <= 50:
        return (n * n - 1) * (n + 6) // 6
    return None


def _sphere_s4_claim(n: int) -> int | None:
    special = {5: 99, 6: 153, 7: 223}
    if n in special:
        return special[n]
    if 8 <= n <= 15 or n == 18:
        return n * (n + 1) * (n + 2) * (n + 3) // 24
    if 16 <= n <= 17:
        return (n + 3) * (n**3 + 7 * n * n - 10 * n + 8) // 24
    return None


def _sphere_lower(n: int, s: int) -> int | None:
    if s == 3 and n == 8:
        return len(e8_half())
    if 2 * s <= n + 1:
        return math.comb(n + 1, s)
    return None


THEOREMS = {
    "hamming-s2": (HAMMING, 2, lambda n: (n * n - n + 2) // 2, lambda n: len(hamming_weight_classes(n, 2))),
    "hamming-s3": (HAMMING, 3, lambda n: n + math.comb(n, 3), lambda n: len(hamming_weight_classes(n, 3))),
    "hamming-s4": (
        HAMMING,
        4,
        lambda n: 1 + math.comb(n, 2) + math.comb(n, 4),
        lambda n: len(hamming_weight_classes(n, 4)),
    ),
    "johnson-s2": (JOHNSON, 2, lambda n, w: math.comb(n - w + 2, 2), lambda n, w: len(johnson_prefix(n, w, 2))),
    "johnson-s3": (JOHNSON, 3, lambda n, w: math.comb(n - w + 3, 3), lambda n, w: len(johnson_prefix(n, w, 3))),
    "johnson-s4": (JOHNSON, 4, lambda n, w: math.comb(n - w + 4, 4), lambda n, w: len(johnson_prefix(n, w, 4))),
    "sphere-s3": (SPHERE, 3, _sphere_s3_claim, lambda n: _sphere_lower(n, 3)),
    "sphere-s4": (SPHERE, 4, _sphere_s4_claim, lambda n: _sphere_lower(n, 4)),
}


def table_rows(theorem: str, params: list[tuple], config: SearchConfig) -> list[dict]:
    kind, s, claim, lower = THEOREMS[theorem]
    rows = []
    for p in params:
        if kind == JOHNSON and len(p) != 2:
            raise UsageError("Johnson tables need n:w items or --w")
        space = Space(kind, *p)
        res = search(space, s, config)
        expected = claim(*p)
        low = lower(*p)
        if kind == SPHERE:
            match = expected is not None and res.upper_bound == expected
        else:
            match = res.upper_bound == expected == low
        rows.append(
            {
                "space": str(space),
                "s": s,
                "upper_bound": res.upper_bound,
                "lower_bound": low,
                "expected": expected,
                "match": match,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# constructions


def _expected_construction(name: str, space: Space | None, s: int | None):
    if name == "hamming-weights":
        return sum(math.comb(space.n, s - 2 * i) for i in range(s // 2 + 1)), s
    if name == "johnson-prefix":
        return math.comb(space.n - space.w + s, s), s
    if name == "sphere-01":
        return math.comb(space.n + 1, s), s
    return {
        "golay23-even": (2048, 3),
        "golay23-weight7": (253, 2),
        "johnson24-lift": (253, 2),
        "e8": (240, 4),
        "e8-half": (120, 3),
        "leech-section": (2025, 3),
    }[name]


def build_construction(name: str, space: Space | None, s: int | None, seed: int | None) -> PointSet:
    if name in ("hamming-weights", "johnson-prefix", "sphere-01"):
        if space is None or s is None:
            raise UsageError(f"{name} needs --space and --s")
        want = {"hamming-weights": HAMMING, "johnson-prefix": JOHNSON, "sphere-01": SPHERE}[name]
        if space.kind != want:
            raise UsageError(f"{name} needs a {want} space")
        if name == "hamming-weights":
            return hamming_weight_classes(space.n, s)
        if name == "johnson-prefix":
            return johnson_prefix(space.n, space.w, s)
        return sphere_01(space.n, s)
    if name == "e8-half":
        return e8_half(seed)
    if name == "leech-section":
        vectors = leech_minimal_vectors()
        pair = leech_pairs(vectors, 1, seed)[1] if seed is not None else None
        return leech_section(vectors, pair)
    simple = {
        "golay23-even": golay23_even,
        "golay23-weight7": golay23_weight7,
        "johnson24-lift": johnson24_lift,
        "e8": e8_full,
    }
    if name not in simple:
        raise UsageError(f"unknown construction {name!r}")
    return simple[name]()


CONSTRUCTION_NAMES = (
    "hamming-weights",
    "johnson-prefix",
    "sphere-01",
    "golay23-even",
    "golay23-weight7",
    "johnson24-lift",
    "e8",
    "e8-half",
    "leech-section",
)


# ---------------------------------------------------------------------------
# verify


def _verify_json(obj) -> tuple[bool, dict]:
    if "f" in obj:
        cert = Certificate.from_dict(obj)
        return cert.verify(), {"kind": "certificate", "bound": cert.bound, "exactness": cert.exactness}
    if "best_candidate" in obj:
        cand = obj["best_candidate"]
        if cand is None:
            floor = obj["fallback"] if obj.get("refined_fallback") is None else obj["refined_fallback"]
            return obj["upper_bound"] == floor, {"kind": "search", "upper_bound": obj["upper_bound"]}
        ok, info = _verify_report(cand)
        ok = ok and obj["upper_bound"] >= cand["combined"]
        info["kind"] = "search"
        info["upper_bound"] = obj["upper_bound"]
        return ok, info
    if "combined" in obj:
        return _verify_report(obj)
    raise UsageError("unrecognized JSON document")


def _verify_report(rep: dict) -> tuple[bool, dict]:
    info = {"kind": "bound", "combined": rep["combined"]}
    cert_obj = rep.get("certificate")
    if cert_obj is None:
        ok = rep["lp"] is None and rep["combined"] == rep["harmonic"]
        info["certificate"] = None
        return ok, info
    cert = Certificate.from_dict(cert_obj)
    ok = cert.verify() and cert.bound == rep["lp"] and rep["combined"] == min(rep["harmonic"], rep["lp"])
    info["certificate"] = "verified" if ok else "failed"
    if cert.exactness == "exact":
        ok = ok and list(cert_obj["distances"]) == list(rep["distances"])
        # exact reports are recomputed from scratch as well
        d = DistanceSet.of(Space.parse(rep["space"]), rep["distances"])
        fresh = combined_bound(d, rep.get("lp_m"))
        ok = ok and fresh.combined == rep["combined"] and fresh.harmonic == rep["harmonic"]
    return ok, info


def _verify_pointset(text: str, s: int | None) -> tuple[bool, dict]:
    ps = PointSet.from_text(text)
    rep = verify_spectrum(ps)
    info = {"kind": "pointset", "space": str(ps.space), "label": ps.label, **rep.to_dict()}
    ok = s is None or rep.s == s
    return ok, info


# ---------------------------------------------------------------------------
# commands


def cmd_bound(args) -> int:
    space = _space(args.space)
    d = DistanceSet.of(space, _distances(args.distances))
    if args.s is not None and args.s != d.s:
        raise UsageError(f"--s {args.s} but {d.s} distances given")
    cand = bound_for_known(d, SearchConfig(lp_truncation=args.lp_m))
    _emit(args, cand.to_dict())
    return OK


def cmd_search(args) -> int:
    space = _space(args.space)
    if args.s is None:
        raise UsageError("--s is required")
    res = search(space, args.s, _config(args))
    _emit(args, res.to_dict())
    return OK


def cmd_construct(args) -> int:
    if not args.name:
        raise UsageError("--name is required")
    space = Space.parse(args.space) if args.space else None
    ps = build_construction(args.name, space, args.s, args.seed)
    out = {"name": args.name, "label": ps.label, "space": str(ps.space), "cardinality": len(ps)}
    status = OK
    if args.verify:
        rep = verify_spectrum(ps)
        want = _expected_construction(args.name, ps.space, args.s)
        out.update(rep.to_dict())
        out["expected"] = {"cardinality": want[0], "s": want[1]}
        out["match"] = (rep.cardinality, rep.s) == want
        status = OK if out["match"] else MISMATCH
    path = args.out or f"{args.name}.txt"
    ps.save(path)
    out["file"] = path
    _emit(args, out)
    return status


def cmd_table(args) -> int:
    if args.theorem not in THEOREMS:
        raise UsageError(f"unknown theorem {args.theorem!r}; choose from {', '.join(THEOREMS)}")
    rows = table_rows(args.theorem, _parse_range(args.range, args.w), _config(args))
    _emit(args, rows)
    return OK if all(r["match"] for r in rows) else MISMATCH


def cmd_verify(args) -> int:
    with open(args.path) as fh:
        text = fh.read()
    try:
        if text.lstrip().startswith("{"):
            ok, info = _verify_json(json.loads(text))
        else:
            ok, info = _verify_pointset(text, args.s)
    except (ValueError, KeyError, ArithmeticError) as exc:
        ok, info = False, {"error": str(exc)}
    info["ok"] = ok
    _emit(args, info)
    return OK if ok else MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fewdist", description="Bounds and constructions for s-distance sets.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(sp, search_flags=False):
        sp.add_argument("--format", choices=("json", "csv", "plain"), default="json")
        sp.add_argument("--out", help="write the report to FILE (for construct: the point set, default NAME.txt)")
        if search_flags:
            sp.add_argument("--grid", type=int, help="grid steps for the largest sphere distance")
            sp.add_argument("--lp-m", type=int, dest="lp_m", help="LP truncation degree")
            sp.add_argument("--precision-bits", type=int, default=256, dest="precision_bits")
            sp.add_argument("--jobs", type=int, default=1)
            sp.add_argument("--k", action="append", help="restrict a sphere search to this K vector, e.g. 1,-3,3")
            sp.add_argument("--all", action="store_true", help="evaluate every candidate (no pruning)")
            sp.add_argument("--no-refine", action="store_true", dest="no_refine")

    b = sub.add_parser("bound", help="bounds for one distance set")
    b.add_argument("--space")
    b.add_argument("--distances")
    b.add_argument("--s", type=int)
    b.add_argument("--lp-m", type=int, dest="lp_m")
    common(b)

    s = sub.add_parser("search", help="maximize the bound over all admissible distance sets")
    s.add_argument("--space")
    s.add_argument("--s", type=int)
    common(s, True)

    c = sub.add_parser("construct", help="generate a construction")
    c.add_argument("--name", choices=CONSTRUCTION_NAMES)
    c.add_argument("--space")
    c.add_argument("--s", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--verify", action="store_true")
    common(c)

    t = sub.add_parser("table", help="reproduce a theorem table")
    t.add_argument("--theorem", required=True)
    t.add_argument("--range")
    t.add_argument("--w", type=int)
    common(t, True)

    v = sub.add_parser("verify", help="re-check a certificate, report or point-set file")
    v.add_argument("path")
    v.add_argument("--s", type=int, help="expected number of distances for point sets")
    common(v)
    return p


COMMANDS = {
    "bound": cmd_bound,
    "search": cmd_search,
    "construct": cmd_construct,
    "table": cmd_table,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SpaceError, DomainError, ConstructionError, ValueError) as exc:
        print(f"fewdist: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.  Every verb writes one JSON document to stdout.

Exit codes: 0 success, 1 mathematical failure (rejected certificate, failing
order, violated inequality, classifier disagreement), 2 malformed input,
3 resource guard tripped.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import fine, groebner, ideals, perm, schubert
from .hypergraph import GuardExceeded
from .poly import parse_order

log = logging.getLogger("fineschubert")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
CONFIG_KEYS = {"prime": int, "trials": int, "seed": int, "max_spairs": int,
               "max_subsets": int, "orders": int}


class UsageError(ValueError):
    pass


def read_config(path: str) -> dict:
    """key = value lines; '#' starts a comment; [sections] are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unrecognized line {raw.strip()!r}")
            try:
                out[key] = CONFIG_KEYS[key](value.strip().strip('"'))
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def parse_perm(text: str) -> perm.Permutation:
    try:
        return perm.Permutation.parse(text)
    except ValueError as exc:
        raise UsageError(f"malformed permutation {text!r}: {exc}") from None


def parse_cells(text: str, n: int) -> frozenset:
    """'1,2;1,3' or a JSON list of pairs."""
    text = text.strip()
    try:
        if text.startswith("[") or text.startswith("{"):
            return perm.cells_from_json(text, n)
        pairs = [p for p in text.split(";") if p.strip()]
        return perm.cells_from_json([[int(t) for t in p.split(",")] for p in pairs], n)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed cell list {text!r}: {exc}") from None


def _cells(cells) -> list:
    return sorted(map(list, cells))


def classify(n: int, literal: bool = False, max_n: int = 8) -> dict:
    if n > max_n:
        raise GuardExceeded(f"classify is limited to n <= {max_n}")
    count, disagreements = 0, []
    for w in perm.all_permutations(n):
        p = perm.avoids_P(w)
        d = perm.avoids_P_via_diagram(w, literal=literal)
        count += p
        if p != d:
            disagreements.append(str(w))
    return {"n": n, "total": sum(1 for _ in perm.all_permutations(n)) if n <= 8 else None,
            "avoiding": count, "literal_hypothesis": literal,
            "disagreements": disagreements, "agree": not disagreements}


# ------------------------------------------------------------------ verbs

def cmd_diagram(args, cfg):
    w = parse_perm(args.perm)
    return {"w": str(w), "n": w.n, "length": w.length,
            "diagram": _cells(perm.rothe_diagram(w)),
            "essential": _cells(perm.essential_set(w)),
            "dominant": _cells(perm.dominant_part(w)),
            "interesting": _cells(perm.interesting_part(w)),
            "regions": [{"cells": _cells(r.cells), "rank": r.rank} for r in perm.regions(w)]}, True


def cmd_ess(args, cfg):
    w = parse_perm(args.perm)
    ess = sorted(perm.essential_set(w))
    return {"w": str(w), "essential": [list(c) for c in ess],
            "ranks": [perm.rank_function(w, *c) for c in ess]}, True


def cmd_fulton(args, cfg):
    return ideals.fulton_generators(parse_perm(args.perm)).to_json(), True


def cmd_cdg(args, cfg):
    return ideals.cdg_generators(parse_perm(args.perm)).to_json(), True


def cmd_rw(args, cfg):
    return ideals.build_Rw(parse_perm(args.perm), cfg.get("max_subsets")).to_json(), True


def cmd_fine(args, cfg):
    w = parse_perm(args.perm)
    oc = _oracle(cfg)
    method = args.method
    if method == "auto":
        method = "formula" if perm.avoids_P(w) else "oracle"
    if method == "formula":
        F = fine.fine_schubert_01(w)
    else:
        sup = fine.oracle_support(w, oc, cfg.get("max_subsets"))
        F = fine.FinePolynomial.from_dict(w.n, w.length, {S: 1 for S in sup})
    out = F.to_json()
    out.update({"w": str(w), "method": method})
    if method == "oracle":
        out["note"] = "coefficients are support indicators; multiplicities are not computed"
        out["seed"] = oc.seed
    return out, True


def cmd_schubert(args, cfg):
    w = parse_perm(args.perm)
    out = {"w": str(w), "poly": schubert.schubert_poly(w).to_json(),
           "zero_one": schubert.is_zero_one(w), "zero_one_pair": schubert.zero_one_pair(w)}
    if args.pipe_dreams:
        out["pipe_dreams"] = [_cells(P) for P in schubert.pipe_dreams(w)]
    return out, True


def cmd_avoids(args, cfg):
    w = parse_perm(args.perm)
    wit = perm.witness_pattern(w)
    return {"w": str(w), "avoids_P": wit is None,
            "witness_pattern": str(wit) if wit else None,
            "diagram_classifier": perm.avoids_P_via_diagram(w)}, True


def cmd_certify(args, cfg):
    rep = fine.ugb_certificate(parse_perm(args.perm), _oracle(cfg), cfg.get("max_subsets"))
    return rep, rep["passed"]


def cmd_ugb_sample(args, cfg):
    w = parse_perm(args.perm)
    rels = ideals.build_Rw(w).polys()
    fulton = ideals.fulton_generators(w).polys()
    sampling = groebner.OrderSampling(count=cfg.get("orders", 50), seed=cfg.get("seed", 0),
                                      extra=tuple(args.order or ()))
    variables = sorted({v for f in fulton for v in f.variables()})
    try:
        for spec in sampling.extra:
            missing = set(variables) - set(parse_order(spec, variables).ranking)
            if missing:
                raise ValueError(f"order {spec!r} does not rank {min(missing)}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = groebner.ugb_sample_check(rels, fulton, sampling, cfg.get("max_spairs"))
    rep["w"] = str(w)
    return rep, rep["passed"]


def cmd_complete(args, cfg):
    w = parse_perm(args.perm)
    U = parse_cells(args.cells, w.n)
    rep = fine.completable_report(w, U, _oracle(cfg))
    rep.update({"w": str(w), "U": _cells(U), "rw_avoiding": fine.rw_avoiding_check(w, U)})
    return rep, True


def cmd_inequality(args, cfg):
    w = parse_perm(args.perm)
    cell = None
    if args.cell:
        cell = tuple(int(t) for t in args.cell.split(","))
    try:
        rep = fine.check_inequalities(w, args.op, _oracle(cfg), k=args.k, c=args.c, cell=cell)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not args.records:
        rep.pop("records", None)
    return rep, rep.get("violations", 0) == 0


def cmd_classify(args, cfg):
    rep = classify(args.n, literal=args.literal)
    return rep, rep["agree"]


def _oracle(cfg: dict) -> fine.OracleConfig:
    try:
        return fine.OracleConfig(prime=cfg.get("prime", fine.MERSENNE_61),
                                 trials=cfg.get("trials", 3), seed=cfg.get("seed", 0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="key=value file (prime, trials, seed, max_spairs, ...)")
    common.add_argument("--prime", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--max-spairs", type=int, dest="max_spairs")
    common.add_argument("--max-subsets", type=int, dest="max_subsets")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true")

    p = argparse.ArgumentParser(prog="fineschubert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_, with_perm=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if with_perm:
            sp.add_argument("perm", help="one-line notation, e.g. 2143 or 10,3,1,...")
        sp.set_defaults(fn=fn)
        return sp

    verb("diagram", cmd_diagram, "Rothe diagram, essential set, dominant and interesting parts")
    verb("ess", cmd_ess, "essential set with ranks")
    verb("fulton", cmd_fulton, "Fulton generators")
    verb("cdg", cmd_cdg, "CDG generators")
    verb("rw", cmd_rw, "merge closure R_w with provenance")
    sp = verb("fine", cmd_fine, "fine Schubert polynomial")
    sp.add_argument("--method", choices=["auto", "formula", "oracle"], default="auto")
    sp = verb("schubert", cmd_schubert, "Schubert polynomial")
    sp.add_argument("--pipe-dreams", action="store_true", dest="pipe_dreams")
    verb("avoids", cmd_avoids, "pattern avoidance of the 13-pattern set")
    verb("certify", cmd_certify, "universal Groebner basis certificate for R_w")
    sp = verb("ugb-sample", cmd_ugb_sample, "compare in(R_w) with in(I_w) over sampled orders")
    sp.add_argument("--order", action="append", help="extra order spec, repeatable")
    sp = verb("complete", cmd_complete, "completability and R_w-avoidance of a cell set")
    sp.add_argument("--cells", required=True, help="'1,2;1,3' or JSON pairs")
    sp = verb("inequality", cmd_inequality, "coefficient relation for a diagram operator")
    sp.add_argument("--op", required=True,
                    choices=["pattern", "cotransition", "transition", "special_col",
                             "solid_col", "special_row", "solid_row"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--cell")
    sp.add_argument("--records", action="store_true", help="include every checked S")
    sp = verb("classify", cmd_classify, "count P-avoiding permutations with both classifiers",
              with_perm=False)
    sp.add_argument("n", type=int)
    sp.add_argument("--literal", action="store_true",
                    help="use the unrepaired corner hypothesis in the diagram classifier")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        cfg = read_config(args.config) if args.config else {}
        for key in ("seed", "prime", "trials", "max_spairs", "max_subsets"):
            if getattr(args, key) is not None:
                cfg[key] = getattr(args, key)
        payload, ok = args.fn(args, cfg)
    except (UsageError, OSError) as exc:
        log.error("%s", exc)
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except GuardExceeded as exc:
        log.error("resource guard: %s", exc)
        print(json.dumps({"error": "guard", "message": str(exc)}), file=sys.stderr)
        return EXIT_GUARD
    except fine.NotPAvoiding as exc:
        log.error("%s", exc)
        print(json.dumps({"error": "not_p_avoiding", "message": str(exc)}), file=sys.stderr)
        return EXIT_FAIL
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

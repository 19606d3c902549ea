"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 capability error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .aggregation import (
    VoteProfile,
    aggregate_bmls,
    aggregate_closest_vote,
    aggregate_exhaustive,
    aggregate_matching,
    kendall_distance,
    matching_cost_matrix,
)
from .analysis import compare_methods, expected_weighted_kendall, monte_carlo_expected
from .errors import CapabilityError, DimensionError, NonConvergenceError, ParseError
from .io import load_weights, parse_ranking, parse_tree, parse_votes, read_source
from .markov import mc_aggregate
from .perm import MAX_ENUMERATION_N, Permutation, kendall_tau
from .weights import AdjacentWeights, TranspositionWeights, from_metric_tree
from .wkendall import exact_dijkstra, weighted_kendall
from .wtrans import SimilarityMode, exact_cayley, transposition_distance, weighted_transposition

EXIT_OK, EXIT_PARSE, EXIT_CAPABILITY, EXIT_NONCONVERGENCE = 0, 2, 3, 4
METRICS = ("kendall", "wkendall", "wtrans")
METHODS = ("exhaustive", "closest", "matching", "bmls", "mc")


def max_enumeration_n() -> int:
    """Exhaustive ceiling, lowered (never raised past 10) by RANKFORGE_MAX_N."""
    raw = os.environ.get("RANKFORGE_MAX_N")
    if raw is None:
        return MAX_ENUMERATION_N
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"RANKFORGE_MAX_N must be an integer, got {raw!r}") from None
    return max(1, min(value, MAX_ENUMERATION_N))


@dataclass
class RunConfig:
    metric: str = "kendall"
    method: str = "exhaustive"
    mode: str = "positions"
    weights: str | None = None
    tree: str | None = None
    seed: int = 0
    format: str = "json"


def resolve_weights(config: RunConfig, n: int):
    """Turn the configured weight source into a weight object for the chosen metric."""
    if config.metric == "kendall":
        if config.weights or config.tree:
            raise CapabilityError("the kendall metric takes no weights")
        return AdjacentWeights.uniform(n), None
    if config.metric == "wkendall":
        if config.tree:
            raise CapabilityError("wkendall needs an adjacent weight vector, not a tree")
        if not config.weights:
            raise CapabilityError("wkendall needs --weights")
        phi = load_weights(config.weights, n)
        if not isinstance(phi, AdjacentWeights):
            raise CapabilityError("wkendall needs an adjacent weight vector, got a matrix")
        return phi, None
    if config.metric == "wtrans":
        tree = None
        if config.tree:
            tree = parse_tree(read_source(config.tree)[0], n)
            phi = from_metric_tree(tree)
        elif config.weights:
            phi = load_weights(config.weights, n)
            if not isinstance(phi, TranspositionWeights):
                raise CapabilityError("wtrans needs a weight matrix or a tree, got an adjacent vector")
        else:
            raise CapabilityError("wtrans needs --weights (matrix) or --tree")
        return phi, tree
    raise ParseError(f"unknown metric {config.metric!r}")


def distance_for(config: RunConfig, phi, tree):
    if config.metric == "kendall":
        return kendall_distance
    if config.metric == "wkendall":
        return weighted_kendall(phi)
    return weighted_transposition(phi, config.mode, tree)


def _labelled(p: Permutation, labels) -> list:
    return [labels[c - 1] for c in p.entries] if labels else list(p.entries)


def run(config: RunConfig, profile: VoteProfile) -> dict:
    """Run one aggregation and return a JSON-ready report."""
    n, m = profile.n, profile.m
    phi, tree = resolve_weights(config, n)
    dist = distance_for(config, phi, tree)
    limit = max_enumeration_n()
    method = config.method
    if method == "exhaustive":
        if n > limit:
            raise CapabilityError(f"n={n} exceeds the exhaustive ceiling of {limit}")
        out = aggregate_exhaustive(profile, dist, limit)
    elif method == "closest":
        out = aggregate_closest_vote(profile, dist)
    elif method == "matching":
        out = aggregate_matching(profile, phi, config.mode, dist)
    elif method == "bmls":
        out = aggregate_bmls(profile, phi, config.mode, dist)
    elif method == "mc":
        if not isinstance(phi, AdjacentWeights):
            raise CapabilityError("the Markov-chain method needs adjacent weights")
        out = mc_aggregate(profile, phi)
    else:
        raise ParseError(f"unknown method {method!r}")
    report = {
        "metric": config.metric,
        "method": method,
        "mode": config.mode if config.metric == "wtrans" else "positions",
        "n": n,
        "m": m,
        "aggregates": [_labelled(p, profile.labels) for p in out.optima],
        "objective": out.objective,
        "average": out.objective / m,
        "per_vote": out.per_vote,
        "exact": out.exact,
        "seed": config.seed,
    }
    if not out.exact:
        # half the best surrogate total bounds every ranking's cumulative distance from below
        C = matching_cost_matrix(profile, phi, config.mode)
        from scipy.optimize import linear_sum_assignment

        r, c = linear_sum_assignment(C)
        report["bounds"] = {"lower": 0.5 * float(C[r, c].sum()), "upper": out.objective}
    if method == "mc":
        report["stationary"] = out.details["stationary"]
    return report


def _emit(obj: dict, fmt: str, tsv_rows: Sequence[Sequence] | None = None) -> None:
    if fmt == "tsv" and tsv_rows is not None:
        for row in tsv_rows:
            print("\t".join(_tsv_cell(x) for x in row))
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def _tsv_cell(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.4f}"
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(str(v) for v in x) + ")"
    return str(x)


def _profile_from(path: str) -> VoteProfile:
    text, from_file = read_source(path)
    if not from_file:
        raise ParseError(f"vote file not found: {path}")
    return parse_votes(text)


def _config(args) -> RunConfig:
    return RunConfig(
        metric=getattr(args, "metric", "kendall"),
        method=getattr(args, "method", "exhaustive"),
        mode=getattr(args, "mode", "positions"),
        weights=getattr(args, "weights", None),
        tree=getattr(args, "tree", None),
        seed=getattr(args, "seed", 0),
        format=getattr(args, "format", "json"),
    )


def cmd_dist(args) -> int:
    config = _config(args)
    a, b = parse_ranking(args.a), parse_ranking(args.b)
    if a.n != b.n:
        raise DimensionError(f"rankings have different lengths ({a.n} vs {b.n})")
    phi, tree = resolve_weights(config, a.n)
    rep = {"metric": config.metric, "a": list(a.entries), "b": list(b.entries)}
    if config.metric == "kendall":
        rep.update(distance=float(kendall_tau(a, b)), exact=True, method="inversions")
    elif config.metric == "wkendall":
        d = weighted_kendall(phi)
        rep.update(distance=d(a, b), exact=True, method=d.method)
    else:
        res = transposition_distance(a, b, phi, config.mode, tree)
        rep.update(distance=res.value, exact=res.exact, method=res.method, mode=config.mode)
        if not res.exact:
            rep["bounds"] = {"lower": res.lower, "upper": res.upper}
    rows = [("distance", "exact", "method"), (rep["distance"], rep["exact"], rep["method"])]
    _emit(rep, config.format, rows)
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = _config(args)
    a, b = parse_ranking(args.a), parse_ranking(args.b)
    if a.n != b.n:
        raise DimensionError(f"rankings have different lengths ({a.n} vs {b.n})")
    phi, _ = resolve_weights(config, a.n)
    if config.metric == "wtrans":
        value = exact_cayley(a, b, phi, config.mode)
    else:
        value = exact_dijkstra(a, b, phi)
    rep = {"metric": config.metric, "a": list(a.entries), "b": list(b.entries), "distance": value, "method": "graph_search"}
    _emit(rep, config.format, [("distance",), (value,)])
    return EXIT_OK


def cmd_aggregate(args) -> int:
    config = _config(args)
    rep = run(config, _profile_from(args.votes))
    rows = [("aggregate", "objective", "average", "exact")]
    rows += [(agg, rep["objective"], rep["average"], rep["exact"]) for agg in rep["aggregates"]]
    _emit(rep, config.format, rows)
    return EXIT_OK


def cmd_mc(args) -> int:
    args.metric = "wkendall" if args.weights else "kendall"
    args.method = "mc"
    return cmd_aggregate(args)


def cmd_expected(args) -> int:
    n = args.n
    phi = load_weights(args.weights, n)
    if not isinstance(phi, AdjacentWeights):
        raise CapabilityError("expected distances need adjacent weights")
    rep: dict = {"n": n, "weights": list(phi.weights), "seed": args.seed}
    try:
        rep["closed_form"] = float(expected_weighted_kendall(phi, n))
    except CapabilityError:
        rep["closed_form"] = None
        if not args.trials:
            raise
    if args.trials:
        mc = monte_carlo_expected(phi, n, args.trials, args.seed)
        rep.update(monte_carlo_mean=mc.monte_carlo_mean, std_error=mc.std_error, trials=mc.trials)
    rows = [("closed_form", "monte_carlo_mean", "std_error"),
            (rep["closed_form"], rep.get("monte_carlo_mean", ""), rep.get("std_error", ""))]
    _emit(rep, args.format, rows)
    return EXIT_OK


def cmd_compare(args) -> int:
    profile = _profile_from(args.votes)
    phi = load_weights(args.weights, profile.n)
    if not isinstance(phi, AdjacentWeights):
        raise CapabilityError("compare needs adjacent weights")
    methods = [x.strip() for x in args.methods.split(",") if x.strip()]
    rep = compare_methods(profile, phi, methods, max_enumeration_n())
    if args.format == "tsv":
        sys.stdout.write(rep.to_tsv(profile.labels))
    else:
        print(rep.to_json(profile.labels))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankforge", description="Weighted rank aggregation toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, metric=True):
        if metric:
            sp.add_argument("--metric", choices=METRICS, default="kendall")
            sp.add_argument("--tree", help="defining tree file (lines 'u v w') for wtrans")
            sp.add_argument("--mode", choices=[m.value for m in SimilarityMode], default="candidates",
                            help="wtrans only: weights index candidates (default) or positions")
        sp.add_argument("--weights", help="inline list, geom:r, or a weight file")
        sp.add_argument("--format", choices=("json", "tsv"), default="json")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("dist", help="distance between two rankings")
    sp.add_argument("a")
    sp.add_argument("b")
    common(sp)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("oracle", help="ground-truth distance by search over all permutations")
    sp.add_argument("a")
    sp.add_argument("b")
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("aggregate", help="aggregate a vote file")
    sp.add_argument("votes")
    sp.add_argument("--method", choices=METHODS, default="exhaustive")
    common(sp)
    sp.set_defaults(func=cmd_aggregate)

    sp = sub.add_parser("mc", help="Markov-chain aggregate of a vote file")
    sp.add_argument("votes")
    common(sp, metric=False)
    sp.set_defaults(func=cmd_mc, mode="positions", tree=None)

    sp = sub.add_parser("expected", help="expected distance to a random permutation")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=0, help="also run a Monte-Carlo estimate")
    common(sp, metric=False)
    sp.set_defaults(func=cmd_expected)

    sp = sub.add_parser("compare", help="compare aggregation methods against the optimum")
    sp.add_argument("votes")
    sp.add_argument("--methods", default="opt,bmls,mc")
    common(sp, metric=False)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "metric", None) != "wtrans" and hasattr(args, "mode"):
        args.mode = "positions"
    try:
        return args.func(args)
    except (ParseError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

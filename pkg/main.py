"""
kheat - heat kernel coefficients on Kähler manifolds from graphs

Sub-commands:
- enum    stable graphs of a weight, one per line with the canonical key
- phi     φ of a pointed graph (vertex 0 is •)
- z       z(G) of an unpointed stable graph
- coeff   aₙ as a graph sum (or in the σ basis at weight 3)
- eval    a graph or σₖ at the origin of a seeded or file-given potential
- verify  acceptance suites
- cache   stats | clear for the persistent φ cache

Exit codes: 0 ok, 1 verification failed (or a value broke an invariant),
2 usage / parse / truncation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from digraph_core import AnyGraph, GraphError, PointedGraph, canonical_form, format_compact, parse_graph, to_json
from graph_enum import enumerate_stable
from heat_coeff import RENDER_FORMATS, format_rational, heat_coefficient, render, tau_to_sigma, z
from jets import TruncationError
from oracles import SUITES, run_suite
from phi_invariant import PhiCache, phi

log = logging.getLogger("kheat")

# ═══════════════════════════════════════════════════════════════════
# CONFIG
# ═══════════════════════════════════════════════════════════════════
PHI_CACHE = os.getenv("KHEAT_PHI_CACHE") or None
WEIGHT_BOUND = int(os.getenv("KHEAT_WEIGHT_BOUND", "4"))
ORDER = int(os.getenv("KHEAT_ORDER", "8"))
DIM = int(os.getenv("KHEAT_DIM", "2"))
LOG_LEVEL = os.getenv("KHEAT_LOG_LEVEL", "WARNING")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

POINTED_MARKERS = ("•", "*")


class UsageError(ValueError):
    pass


@dataclass
class Config:
    weight_bound: int = WEIGHT_BOUND
    order: int = ORDER
    d: int = DIM
    seed: int = 0
    cache_path: Optional[str] = PHI_CACHE
    fmt: str = "text"
    out: Optional[str] = None

    def validate(self) -> "Config":
        if self.weight_bound < 1:
            raise UsageError(f"weight bound must be >= 1, got {self.weight_bound}")
        if self.order < 4:
            raise UsageError(f"truncation order N must be >= 4, got {self.order}")
        if self.d < 1:
            raise UsageError(f"dimension d must be >= 1, got {self.d}")
        if self.fmt not in RENDER_FORMATS:
            raise UsageError(f"unknown format {self.fmt!r}, expected one of {', '.join(RENDER_FORMATS)}")
        return self

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "Config":
        return cls(
            weight_bound=WEIGHT_BOUND,
            order=args.order,
            d=args.d,
            seed=args.seed,
            cache_path=args.cache or PHI_CACHE,
            fmt=args.format,
            out=args.out,
        ).validate()

    def cache(self) -> PhiCache:
        return PhiCache(self.cache_path)


# ═══════════════════════════════════════════════════════════════════
# INPUT
# ═══════════════════════════════════════════════════════════════════


def read_graph(source: str, pointed: bool) -> AnyGraph:
    """Inline graph text or a path to a file holding it.

    Compact input marked with a leading • (or *) is pointed; JSON input
    carries its own "pointed" flag. Pointedness must match the command.
    """
    text = source
    path = Path(source)
    if not source.lstrip().startswith(("{",) + POINTED_MARKERS) and ";" not in source and path.is_file():
        text = path.read_text(encoding="utf-8")
    text = text.strip()
    marked = text.startswith(POINTED_MARKERS)
    if marked:
        text = text[1:].lstrip()
        if not pointed:
            raise UsageError("this command needs an unpointed graph, got a pointed one")
    g = parse_graph(text, pointed=pointed)
    if isinstance(g, PointedGraph) != pointed:
        kind = "pointed" if pointed else "unpointed"
        raise UsageError(f"this command needs a {kind} graph")
    return g


def load_potential(cfg: Config, path: Optional[str]):
    from curvature_lab import KahlerPotential, random_potential

    if path:
        return KahlerPotential.load(path)
    return random_potential(cfg.d, cfg.order, cfg.seed)


# ═══════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════


def cmd_enum(args, cfg: Config) -> tuple[int, str]:
    graphs = enumerate_stable(args.weight, cfg.weight_bound)
    if cfg.fmt == "json":
        lines = [json.dumps({**to_json(g), "canonical": canonical_form(g)}) for g in graphs]
    else:
        lines = [f"{format_compact(g)}\t{canonical_form(g)}" for g in graphs]
    return EXIT_OK, "\n".join(lines)


def cmd_phi(args, cfg: Config) -> tuple[int, str]:
    g = read_graph(args.graph, pointed=True)
    return EXIT_OK, str(phi(g, cfg.cache()))


def cmd_z(args, cfg: Config) -> tuple[int, str]:
    g = read_graph(args.graph, pointed=False)
    return EXIT_OK, format_rational(z(g, cfg.cache()))


def cmd_coeff(args, cfg: Config) -> tuple[int, str]:
    if args.weight > cfg.weight_bound:
        raise UsageError(f"weight must be in 1..{cfg.weight_bound}, got {args.weight}")
    a_n = heat_coefficient(args.weight, cfg.cache(), cfg.weight_bound)
    if args.sigma:
        if args.weight != 3:
            raise UsageError("the sigma basis is only defined at weight 3")
        return EXIT_OK, render(tau_to_sigma(a_n), cfg.fmt)
    return EXIT_OK, render(a_n, cfg.fmt)


def cmd_eval(args, cfg: Config) -> tuple[int, str]:
    from curvature_lab import evaluate_graph, evaluate_sigma, kahler_invariants
    from jets import format_gaussian

    if sum((args.graph is not None, args.sigma is not None, args.invariants)) != 1:
        raise UsageError("eval needs exactly one of --graph, --sigma, --invariants")
    potential = load_potential(cfg, args.potential)
    if args.graph is not None:
        value = evaluate_graph(read_graph(args.graph, pointed=False), potential)
        return EXIT_OK, format_gaussian(value)
    if args.sigma is not None:
        if not 1 <= args.sigma <= 15:
            raise UsageError(f"--sigma must be in 1..15, got {args.sigma}")
        return EXIT_OK, format_gaussian(evaluate_sigma(args.sigma, potential))
    inv = kahler_invariants(potential)
    fields = {"rho": inv.rho, "ricci_sq": inv.ricci_sq, "riemann_sq": inv.riemann_sq, "box_rho": inv.box_rho}
    if cfg.fmt == "json":
        return EXIT_OK, json.dumps({k: format_gaussian(v) for k, v in fields.items()}, indent=2)
    return EXIT_OK, "\n".join(f"{k} = {format_gaussian(v)}" for k, v in fields.items())


def cmd_verify(args, cfg: Config) -> tuple[int, str]:
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [run_suite(name, cfg.cache(), d=cfg.d, seeds=args.seeds, order=cfg.order) for name in names]
    if cfg.fmt == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2)
    else:
        text = "\n".join(r.to_text() for r in reports)
    return (EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED), text


def cmd_cache(args, cfg: Config) -> tuple[int, str]:
    if not cfg.cache_path:
        raise UsageError("no cache path: pass --cache or set KHEAT_PHI_CACHE")
    cache = cfg.cache()
    if args.action == "clear":
        cache.clear()
        return EXIT_OK, f"cleared {cfg.cache_path}"
    stats = cache.stats()
    if cfg.fmt == "json":
        return EXIT_OK, json.dumps(stats, indent=2)
    return EXIT_OK, "\n".join(f"{k}: {v}" for k, v in stats.items())


COMMANDS = {
    "enum": cmd_enum,
    "phi": cmd_phi,
    "z": cmd_z,
    "coeff": cmd_coeff,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "cache": cmd_cache,
}

# ═══════════════════════════════════════════════════════════════════
# PARSER
# ═══════════════════════════════════════════════════════════════════


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", default="text", help="text | json | latex")
    common.add_argument("--d", type=int, default=DIM, help="complex dimension of random potentials")
    common.add_argument("--order", type=int, default=ORDER, help="truncation order N")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache", default=None, help="phi cache file (overrides KHEAT_PHI_CACHE)")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--verbose", "-v", action="count", default=0)

    parser = _Parser(prog="kheat", description="Kähler heat kernel coefficients from stable graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enum", parents=[common], help="list stable graphs of a weight")
    p.add_argument("--weight", type=int, required=True)

    p = sub.add_parser("phi", parents=[common], help="phi of a pointed graph")
    p.add_argument("graph", help="compact 'k; u>v*m, ...', JSON, or a file")

    p = sub.add_parser("z", parents=[common], help="z of a stable graph")
    p.add_argument("graph", help="compact 'k; u>v*m, ...', JSON, or a file")

    p = sub.add_parser("coeff", parents=[common], help="heat coefficient a_n")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--sigma", action="store_true", help="express a_3 in the sigma basis")

    p = sub.add_parser("eval", parents=[common], help="evaluate at the origin of a potential")
    p.add_argument("--graph")
    p.add_argument("--sigma", type=int)
    p.add_argument("--invariants", action="store_true", help="rho, |Ric|^2, |R|^2, box rho")
    p.add_argument("--potential", help="potential JSON file (default: random from --seed)")

    p = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--seeds", type=int, default=5)

    p = sub.add_parser("cache", parents=[common], help="phi cache maintenance")
    p.add_argument("action", choices=("stats", "clear"))
    return parser


def _configure_logging(verbose: int):
    level = {0: LOG_LEVEL.upper(), 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# ═══════════════════════════════════════════════════════════════════
# MAIN
# ═══════════════════════════════════════════════════════════════════


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        cfg = Config.from_args(args)
        code, text = COMMANDS[args.command](args, cfg)
    except TruncationError as e:
        print(
            f"error: {e}; truncation needs N >= {e.required_order} "
            f"(pass --order {e.required_order} or a potential file with a larger N)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    except ArithmeticError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, GraphError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, cfg.out)
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``xorgames analyze|generate|graph|conjecture``.

Exit codes: 0 success, 2 input error, 3 numerical inconsistency between a
no-advantage certificate and the quantum SDP.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import families
from .certificate import RHO_TOL, cor1_check, no_advantage
from .game import GameError, classical_value, fraction_str, game_from_dict, game_to_dict, load_game, validate_game
from .graph import ALPHA_CAP, GraphError, build_graph_rules, independence_number, to_dot
from .report import AnalysisOptions, analyze
from .sdp import DEFAULT_TOL
from .theta import lovasz_theta

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3

log = logging.getLogger("xorgames")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _dump(obj, pretty: bool) -> str:
    return json.dumps(obj, indent=2 if pretty else None, sort_keys=False)


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _analyze_one(args_tuple):
    path, opts = args_tuple
    game = load_game(path)
    rep = analyze(game, opts)
    return rep.data, rep.inconsistent


def cmd_analyze(args) -> int:
    opts = AnalysisOptions(
        tol=args.tol,
        cert_tol=args.cert_tol,
        alpha_cap=args.alpha_cap,
        graph=not args.no_graph,
        digits=args.digits,
        timings=args.timings,
    )
    jobs = [(p, opts) for p in args.games]
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(_analyze_one, jobs))
        else:
            results = [_analyze_one(j) for j in jobs]
    except (GameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    reports = [r for r, _ in results]
    for (path, _), rep in zip(jobs, reports):
        rep["source"] = str(path)
    payload = reports[0] if len(reports) == 1 else reports
    if args.json or args.output:
        _write(_dump(payload, args.pretty), args.output)
    else:
        for rep in reports:
            print(summarize(rep))
    if any(bad for _, bad in results):
        print("error: certificate and SDP disagree (see notes)", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def summarize(rep: dict) -> str:
    """Short human-readable digest of an analysis report."""
    lines = [f"game {rep.get('source', '')}: m={rep['game']['m']} uniform={rep['game']['uniform']}"]
    c = rep.get("classical")
    if c:
        lines.append(f"  classical  omega_c = {c['value']} ({c['value_float']:.9g}), {len(c['strategies'])} optimal strategies")
    q = rep.get("quantum")
    if q:
        lines.append(f"  quantum    omega_q = {q['value']:.9g}  (gap {q['gap']:.2e}, {q['iterations']} iterations)")
    a = rep.get("advantage")
    if a:
        lines.append(f"  advantage  {a['quantum_advantage']}  (omega_q - omega_c = {a['omega_gap']:.3e})")
    cert = rep.get("certificates", {})
    if "thm1" in cert:
        t = cert["thm1"]
        lines.append(f"  thm1       no_advantage={t['no_advantage']}  rho={t['best']['rho']}")
    if "cor1" in cert:
        lines.append(f"  cor1       {cert['cor1']['is_pm_one']}")
    cap = rep.get("capacity")
    if cap:
        lines.append(f"  capacity   alpha={cap['alpha']} theta={cap['theta']:.9g} class1={cap['class1']}")
    for k, v in rep.get("skipped", {}).items():
        lines.append(f"  skipped {k}: {v}")
    for n in rep.get("notes", []):
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def _load_family_input(path: str):
    return load_game(path)


def build_family(args) -> list[families.Family]:
    kind = args.family
    if kind == "chsh":
        return [families.gen_chsh()]
    if kind in ("example_ex", "ex"):
        return [families.gen_example_ex()]
    if kind == "nlc":
        return [families.gen_nlc(args.m, args.diag)]
    if kind in ("symmetric_row_sum", "symrow"):
        return [families.gen_symmetric_row_sum(args.m, args.row_sum)]
    if kind == "anticirculant4":
        return [families.gen_anticirculant4(args.gamma)]
    if kind == "pq":
        return [families.gen_pq_pattern(args.p, args.q)]
    if kind == "pq_grid":
        return [families.gen_pq_pattern(p, q) for p, q in families.pq_grid(args.points)]
    if kind == "tensor":
        if len(args.inputs) != 2:
            raise GameError("tensor needs exactly two input game files")
        g1, g2 = (_load_family_input(p) for p in args.inputs)
        return [families.compose_tensor(g1, g2)]
    if kind == "transform":
        if len(args.inputs) != 1:
            raise GameError("transform needs exactly one input game file")
        g = _load_family_input(args.inputs[0])
        m = g.m
        u = families.signed_permutation(args.row_perm or list(range(m)), args.row_signs or [1] * m)
        v = families.signed_permutation(args.col_perm or list(range(m)), args.col_signs or [1] * m)
        return [families.transform_orthogonal(g, u, v)]
    if kind == "cor1_suite":
        return families.cor1_uniform_suite(args.count, args.seed)
    raise GameError(f"unknown family {kind!r}")


def cmd_generate(args) -> int:
    try:
        fams = build_family(args)
    except (GameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    docs = [families.family_to_dict(f) for f in fams]
    if len(docs) == 1 and not args.out_dir:
        _write(_dump(docs[0], True), args.output)
        return EXIT_OK
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, doc in enumerate(docs):
        path = out_dir / f"{args.family}_{i:03d}.json"
        path.write_text(_dump(doc, True) + "\n")
        print(path)
    return EXIT_OK


def cmd_graph(args) -> int:
    try:
        game = load_game(args.game)
        g = build_graph_rules(game.signs)
    except (GameError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not game.uniform:
        print("note: graph uses the sign pattern only (non-uniform distribution)", file=sys.stderr)
    if args.adjacency:
        _write(json.dumps(g.adjacency.tolist()), args.adjacency)
    if args.dot or not args.adjacency:
        _write(to_dot(g), args.dot)
    return EXIT_OK


def cmd_conjecture(args) -> int:
    """Sample games passing the no-advantage certificate but lacking +-1 top
    singular vectors, and record whether alpha = theta for their graphs."""
    if 2 * args.m * args.m > args.alpha_cap:
        print(
            f"error: m={args.m} gives {2 * args.m ** 2} graph vertices, above the exact alpha cap {args.alpha_cap}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    rng = np.random.default_rng(args.seed)
    games = []
    if args.m == 4 and not args.no_example:
        games.append(("example_ex", families.gen_example_ex().game))
    for k in range(args.samples):
        signs = rng.choice([1, -1], size=(args.m, args.m)).tolist()
        games.append((f"sample_{k}", validate_game(signs)))

    out = open(args.log, "w") if args.log else sys.stdout
    selected = agree = 0
    try:
        for name, game in games:
            classical = classical_value(game)
            verdict = no_advantage(game, tol=args.cert_tol, classical=classical, cross_check=False)
            c1 = cor1_check(game)
            rec = {
                "name": name,
                "game": game_to_dict(game),
                "omega_c": fraction_str(classical.value),
                "thm1": verdict.no_advantage,
                "cor1": c1.is_pm_one,
                "selected": bool(verdict.no_advantage and c1.is_pm_one is False),
            }
            if rec["selected"]:
                selected += 1
                g = build_graph_rules(game.signs)
                alpha = independence_number(g, cap=args.alpha_cap).size
                theta = lovasz_theta(g.adjacency, tol=args.tol).value
                rec.update(alpha=alpha, theta=theta, alpha_equals_theta=abs(theta - alpha) <= 1e-5)
                agree += rec["alpha_equals_theta"]
            out.write(json.dumps(rec) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"sampled {len(games)} games, {selected} pass thm1 without cor1, alpha = theta for {agree}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xorgames", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full pipeline on game JSON files")
    p.add_argument("games", nargs="+")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="SDP tolerance")
    p.add_argument("--cert-tol", type=float, default=RHO_TOL, help="spectral radius tolerance")
    p.add_argument("--alpha-cap", type=int, default=ALPHA_CAP, help="max vertices for exact alpha")
    p.add_argument("--no-graph", action="store_true")
    p.add_argument("--digits", type=int, default=9, help="significant digits for quantum values")
    p.add_argument("--timings", action="store_true", help="include stage timings (breaks report reproducibility)")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--pretty", action="store_true", help="indent JSON output")
    p.add_argument("--jobs", type=int, default=1, help="analyze several files in parallel")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="write game JSON for a family")
    p.add_argument(
        "family",
        choices=["chsh", "example_ex", "ex", "nlc", "symmetric_row_sum", "symrow", "anticirculant4",
                 "pq", "pq_grid", "tensor", "transform", "cor1_suite"],
    )
    p.add_argument("inputs", nargs="*", help="input game files for tensor/transform")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--diag", type=_rational_list)
    p.add_argument("--row-sum", type=int)
    p.add_argument("--gamma", type=_rational_list)
    p.add_argument("--p", type=_rational)
    p.add_argument("--q", type=_rational)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--row-perm", type=_int_list)
    p.add_argument("--row-signs", type=_int_list)
    p.add_argument("--col-perm", type=_int_list)
    p.add_argument("--col-signs", type=_int_list)
    p.add_argument("--count", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("graph", help="export the game graph")
    p.add_argument("game")
    p.add_argument("--dot", nargs="?", const="-", help="DOT output path (default stdout)")
    p.add_argument("--adjacency", nargs="?", const="-", help="adjacency JSON output path")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("conjecture", help="test alpha = theta on no-advantage games without +-1 singular vectors")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--cert-tol", type=float, default=RHO_TOL)
    p.add_argument("--alpha-cap", type=int, default=32)
    p.add_argument("--no-example", action="store_true", help="do not force the 4x4 example into the sample")
    p.add_argument("--log", help="JSON-lines output file (default stdout)")
    p.set_defaults(func=cmd_conjecture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "generate":
        missing = {
            "nlc": ["diag"],
            "symmetric_row_sum": ["row_sum"],
            "symrow": ["row_sum"],
            "anticirculant4": ["gamma"],
            "pq": ["p", "q"],
        }.get(args.family, [])
        for name in missing:
            if getattr(args, name) is None:
                parser.error(f"generate {args.family} requires --{name.replace('_', '-')}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

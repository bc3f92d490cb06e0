"""Command-line entry point: ``frieze polygon | quiver | surface | claims``.

Random flip words come from :class:`random.Random` (Mersenne Twister) seeded
with ``--rng-seed``; its integer streams are identical across platforms and
Python versions for ``randrange``/``choice``, so reports are reproducible.
JSON reports carry ``"schemaVersion": 1`` and never include timings.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import __version__
from .cc import (
    PolygonTriangulation,
    QuiddityCycle,
    frieze_from_quiddity,
    frieze_from_triangulation,
    quiddity_from_triangulation,
)
from .cluster import MeshGrid, Quiver, ValuedSeed, check_mesh_rules, explore_clusters, parse_value
from .errors import FriezeError, HypothesesNotMet, InvalidQuiddity, InvalidState, MalformedGrid
from .lambda_engine import LambdaState, apply_flip_word
from .solver import (
    Budget,
    Status,
    certify_uniqueness,
    check_short_diagonal_law,
    replay,
    solve_structural,
    solve_unitary,
)
from .strip import (
    admissible_positions,
    audit,
    enumerate_bridging_triangulations,
    instance_from_chart,
    search_k_instances,
    unitary_chart,
)
from .surface import MarkedSurface, base_triangulation, random_flip_word

log = logging.getLogger("frieze")

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_NONINTEGRAL = 0, 1, 2, 3


def _emit(report: dict, text: str, as_json: bool) -> None:
    if as_json:
        out = {"schemaVersion": 1}
        out.update(report)
        sys.stdout.write(json.dumps(out, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidState(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidState(f"{path} is not valid JSON: {exc.msg}") from exc


def _map(fn, items: list, threads: int) -> list:
    """Ordered map; worker processes only when ``threads > 1``."""
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- polygon ------------------------------------------------------------------


def cmd_polygon(args) -> int:
    if args.from_triangulation:
        data = _read_json(args.from_triangulation)
        try:
            tri = PolygonTriangulation.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidState(f"bad polygon triangulation: {exc}") from exc
        q = quiddity_from_triangulation(tri)
        table = frieze_from_triangulation(tri)
    elif args.quiddity:
        q = QuiddityCycle.parse(args.quiddity)
        table = frieze_from_quiddity(q)
    else:
        raise InvalidQuiddity("give --quiddity or --from-triangulation")
    report = {"quiddity": list(q.entries), "frieze": table.to_json()}
    lines = [f"quiddity {q}"]
    if args.chords:
        lines += [f"{{{i},{j}}} {v}" for (i, j), v in table.items()]
    else:
        lines.append(table.grid_text())
    _emit(report, "\n".join(lines), args.json)
    return EXIT_OK


# -- quiver -------------------------------------------------------------------


def cmd_quiver(args) -> int:
    if args.mesh_check:
        try:
            with open(args.mesh_check, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedGrid(f"cannot read {args.mesh_check}: {exc.strerror}") from exc
        if args.type and not text.lstrip().upper().startswith(args.type.upper()):
            text = f"{args.type}\n{text}"
        grid = MeshGrid.parse(text)
        bad = check_mesh_rules(grid)
        report = {"type": f"{grid.kind}{grid.rank}", "violations": [v.to_json() for v in bad]}
        lines = [f"{len(bad)} violations"] + [
            f"row {v.row} col {v.col} ({v.kind}): {v.lhs} != 1" for v in bad
        ]
        _emit(report, "\n".join(lines), args.json)
        return EXIT_OK if not bad else EXIT_INPUT
    if not args.arrows and not args.values:
        raise InvalidState("give --arrows and --values, or --mesh-check")
    values = [parse_value(v) for v in args.values.split(",")]
    quiver = Quiver.parse(args.arrows or "", n=len(values))
    seed = ValuedSeed(quiver, tuple(values))
    atlas = explore_clusters(seed, args.budget)
    report = {
        "seeds": atlas.seeds,
        "clusters": atlas.clusters,
        "closed": atlas.closed,
        "positiveIntegral": atlas.positive_integral,
        "values": [str(v) for v in atlas.variable_values()],
        "unitaryWord": list(atlas.unitary_word) if atlas.unitary_word is not None else None,
    }
    if atlas.unitary_word is not None:
        word = " ".join(str(k + 1) for k in atlas.unitary_word)
        verdict = f"unitary ({'empty word' if not word else 'word ' + word})"
    elif atlas.closed:
        verdict = f"non-unitary (closure, {atlas.clusters} clusters)"
    else:
        verdict = f"unknown (budget exhausted after {atlas.seeds} seeds)"
    report["verdict"] = verdict
    _emit(report, verdict, args.json)
    if args.check_unitary and atlas.unitary_word is None and not atlas.closed:
        return EXIT_BUDGET
    return EXIT_OK


# -- surface ------------------------------------------------------------------


def _roundtrip_trial(job: tuple) -> dict:
    spec, flips, seed, budget_nodes = job
    rng = random.Random(seed)
    tri = base_triangulation(spec)
    unit = LambdaState.unitary(tri)
    word = random_flip_word(tri, flips, rng)
    state = apply_flip_word(unit, word)
    budget = Budget(budget_nodes)
    rep = solve_unitary(state, budget)
    out = {"scramble": word, "status": rep.status.value, "nodes": rep.nodes}
    if rep.status is not Status.UNITARY_FOUND:
        return out
    end = replay(state, rep.word)
    structural = solve_structural(state, budget)
    end2 = replay(state, structural.word) if structural.status is Status.UNITARY_FOUND else None
    out["recovered"] = end.is_unitary()
    out["structuralAgrees"] = end2 is not None and end2.search_key() == end.search_key()
    out["certificate"] = certify_uniqueness(end).holds
    out["shortDiagonalLaw"] = all(v.ok for v in check_short_diagonal_law(end))
    out["flipWord"] = rep.word
    return out


def cmd_surface(args) -> int:
    spec = MarkedSurface.parse(args.spec)
    budget = Budget(args.budget)
    if args.action == "base":
        state = LambdaState.unitary(base_triangulation(spec))
        _write_state(state, args.output)
        return EXIT_OK
    if args.action == "scramble":
        rng = random.Random(args.rng_seed)
        tri = base_triangulation(spec)
        word = random_flip_word(tri, args.flips, rng)
        _write_state(apply_flip_word(LambdaState.unitary(tri), word), args.output)
        return EXIT_OK
    if args.action == "solve":
        if not args.state:
            raise InvalidState("solve needs --state FILE")
        try:
            state = LambdaState.from_json(_read_json(args.state), strict=False)
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidState(f"malformed state file: {exc}") from exc
        if state.triangulation.surface != spec:
            raise InvalidState(f"state file describes {state.triangulation.surface}, not {spec}")
        rep = solve_structural(state, budget) if args.structural else solve_unitary(state, budget)
        report = rep.to_json()
        text = f"{rep.status.value}: word [{' '.join(map(str, rep.word))}], {rep.nodes} nodes"
        if rep.detail:
            text += f" ({rep.detail})"
        _emit(report, text, args.json)
        return rep.status.exit_code
    # roundtrip
    master = random.Random(args.rng_seed)
    jobs = [(spec, args.flips, master.getrandbits(64), args.budget) for _ in range(args.trials)]
    results = _map(_roundtrip_trial, jobs, args.threads)
    recovered = sum(1 for r in results if r.get("recovered"))
    cert = all(r.get("certificate", False) for r in results)
    law = all(r.get("shortDiagonalLaw", False) for r in results)
    agree = all(r.get("structuralAgrees", False) for r in results)
    report = {
        "spec": list(spec.boundaries),
        "trials": args.trials,
        "flips": args.flips,
        "rngSeed": args.rng_seed,
        "recovered": recovered,
        "certificate": cert,
        "shortDiagonalLaw": law,
        "structuralAgrees": agree,
        "results": results,
    }
    text = (
        f"{recovered}/{args.trials} recovered; "
        f"uniqueness certificate {'OK' if cert else 'FAILED'}; "
        f"short-diagonal law {'OK' if law else 'FAILED'}; "
        f"structural solver {'agrees' if agree else 'DISAGREES'}"
    )
    _emit(report, text, args.json)
    if recovered < args.trials:
        return EXIT_BUDGET
    return EXIT_OK if cert and law and agree else EXIT_INPUT


def _write_state(state: LambdaState, path: str | None) -> None:
    data = json.dumps(state.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


# -- claims -------------------------------------------------------------------


def _claim4(p: int, q: int, ls: Sequence[int]) -> dict:
    total = without = 0
    for l in ls:
        for t in enumerate_bridging_triangulations(p, q, (0, l - 1)):
            total += 1
            without += t.good == 0
    return {"p": p, "q": q, "ls": list(ls), "triangulations": total, "withoutGood": without}


def _search_job(job: tuple) -> dict:
    p, q, k, l, cap, winding = job
    return search_k_instances(p, q, k, l, cap, winding).to_json()


def cmd_claims(args) -> int:
    if args.action == "enumerate":
        ls = [args.l] if args.l else [l for _, l1 in admissible_positions(args.p) for l in [l1 + 1]]
        for l in ls:
            if not (l >= 3 and l + 1 <= args.p):
                raise HypothesesNotMet(f"l = {l} needs l >= 3 and l + 1 <= p", ["l >= 3 and l + 1 <= p"])
        res = _claim4(args.p, args.q, ls)
        if not ls:
            text = f"no admissible l for p = {args.p} (need p >= 4)"
        elif res["withoutGood"] == 0:
            text = f"all {res['triangulations']} triangulations contain a good quadrilateral"
        else:
            text = f"{res['withoutGood']} triangulations without a good quadrilateral"
        _emit(res, text, args.json)
        return EXIT_OK if res["withoutGood"] == 0 else EXIT_INPUT
    if args.k == 1:
        chart = unitary_chart(args.p, args.q)
        rep = audit(instance_from_chart(chart, args.winding))
        hist = ", ".join(f"{c}:{n}" for c, n in sorted(rep.cases.items()))
        text = f"k = 1: claims {rep.claims}; case histogram {hist}"
        _emit(rep.to_json(), text, args.json)
        return EXIT_OK
    l = args.l or 3
    if not (l >= 3 and l + 1 <= args.p):
        raise HypothesesNotMet(f"l = {l} needs l >= 3 and l + 1 <= p", ["l >= 3 and l + 1 <= p"])
    qs = [args.q]
    res = _map(_search_job, [(args.p, q, args.k, l, args.cap, args.winding) for q in qs], args.threads)[0]
    found = res["hypothesisSatisfying"]
    if res["claimViolations"]:
        text = f"{res['claimViolations']} claim violations with hypotheses met"
    elif found:
        text = f"{found} consistent instances found; all claims hold"
    else:
        text = "no consistent frieze instance found"
    text += f" ({res['words']} words, {res['leaves']} candidate charts)"
    _emit(res, text, args.json)
    return EXIT_INPUT if res["claimViolations"] else EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frieze", description="Friezes, cluster seeds and unitary surface charts.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        p.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")

    p = sub.add_parser("polygon", help="Conway-Coxeter friezes")
    p.add_argument("--quiddity")
    p.add_argument("--from-triangulation", metavar="FILE")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--grid", action="store_true", help="print the frieze grid (default)")
    g.add_argument("--chords", action="store_true", help="print chord values")
    common(p)
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("quiver", help="valued seeds and mesh rules")
    p.add_argument("--arrows", help='arrows like "1>2,2>3" (1-based)')
    p.add_argument("--values", help="initial values, comma separated")
    p.add_argument("--check-unitary", action="store_true")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--mesh-check", metavar="FILE")
    p.add_argument("--type", help="grid type such as D4 when the file has no header")
    common(p)
    p.set_defaults(func=cmd_quiver)

    p = sub.add_parser("surface", help="unitary charts on disks, annuli and pairs of pants")
    p.add_argument("action", choices=["solve", "roundtrip", "base", "scramble"])
    p.add_argument("--spec", required=True, help="e.g. pants:2,1,1 or annulus:4,3")
    p.add_argument("--state", metavar="FILE")
    p.add_argument("--output", "-o", metavar="FILE")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--structural", action="store_true")
    p.add_argument("--flips", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--rng-seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("claims", help="strip claims harness")
    p.add_argument("action", nargs="?", choices=["search", "enumerate"], default="search")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int)
    p.add_argument("--winding", type=int, default=2)
    p.add_argument("--cap", type=int, default=30)
    common(p)
    p.set_defaults(func=cmd_claims)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "rng_seed", 0) is not None and not 0 <= getattr(args, "rng_seed", 0) < 2**64:
        parser.error("--rng-seed must be a 64-bit unsigned integer")
    try:
        return args.func(args)
    except InvalidQuiddity as exc:
        where = f" at chord {{{exc.chord[0]},{exc.chord[1]}}}" if exc.chord else ""
        print(f"error: invalid quiddity{where}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FriezeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = {"NonIntegralValue": EXIT_NONINTEGRAL}.get(type(exc).__name__, EXIT_INPUT)
        return code
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

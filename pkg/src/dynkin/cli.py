"""Command-line front end: ``dynkin {solve,verify,wuc} GAME.json``.

Exit codes: 0 ok, 1 negative verdict, 2 invalid input, 3 instance too large
for the brute-force oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .model import TOL, SinglePeriodGame, WeightSystem, mask_of
from .oracle import (
    InstanceTooLarge,
    RawWeightGame,
    RawWeightTable,
    StochasticQuittingGame,
    analyze_single,
    check_weight_form,
    check_wuc,
    search_wuc_witness,
    single_game_from_raw,
    verify_quitting,
    verify_stopping_equilibrium,
)
from .solver import (
    QuittingGame,
    ScenarioSet,
    quitting_payoff,
    solve_quitting,
    solve_single,
    solve_single_stochastic,
)
from .stopping import (
    EventTree,
    Node,
    equilibrium_stopping,
    evaluate_stopping_profile,
    value_process,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_TOO_LARGE = 3

KINDS = ("single", "stochastic", "quitting", "stopping", "raw-weights")
WUC_TRIALS = 200


class SpecError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------- parsing


@dataclass
class GameSpec:
    kind: str
    data: dict
    text: str
    tolerance: float

    def line_of(self, key: str) -> int | None:
        match = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        return self.text.count("\n", 0, match.start()) + 1 if match else None

    def fail(self, key: str, message: str):
        raise SpecError(f"{key}: {message}", self.line_of(key))

    def require(self, key: str) -> Any:
        if key not in self.data:
            raise SpecError(f"missing required field {key!r} for kind {self.kind!r}", 1)
        return self.data[key]

    def vector(self, key: str, value: Any = None, length: int | None = None) -> np.ndarray:
        value = self.require(key) if value is None else value
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            self.fail(key, "expected a list of numbers")
        if length is not None and len(value) != length:
            self.fail(key, f"expected {length} entries, got {len(value)}")
        return np.array(value, dtype=float)

    def matrix(self, key: str, value: Any = None, width: int | None = None) -> np.ndarray:
        value = self.require(key) if value is None else value
        if not isinstance(value, list) or not value:
            self.fail(key, "expected a non-empty list of rows")
        rows = [self.vector(key, row, width) for row in value]
        if len({r.size for r in rows}) != 1:
            self.fail(key, "rows must have equal length")
        return np.vstack(rows)

    def player_count(self, m: int) -> int:
        if "m" in self.data:
            declared = self.data["m"]
            if not isinstance(declared, int) or declared != m:
                self.fail("m", f"declares {declared!r} players but the data has {m}")
        return m

    def weights(self) -> WeightSystem:
        a = self.vector("a")
        try:
            return WeightSystem(a, tol=self.tolerance)
        except ValueError as exc:
            self.fail("a", str(exc))


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def load_spec(path: str | Path, tolerance: float | None = None) -> GameSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    if not isinstance(data, dict):
        raise SpecError("the game file must hold a JSON object", 1)
    kind = data.get("kind")
    if kind not in KINDS:
        spec = GameSpec(str(kind), data, text, TOL)
        spec.fail("kind", f"expected one of {', '.join(KINDS)}, got {kind!r}")
    tol = TOL
    if "tolerance" in data:
        if not _is_number(data["tolerance"]) or data["tolerance"] <= 0:
            GameSpec(kind, data, text, TOL).fail("tolerance", "must be a positive number")
        tol = float(data["tolerance"])
    if tolerance is not None:
        tol = tolerance
    return GameSpec(kind, data, text, tol)


def build_single(spec: GameSpec) -> SinglePeriodGame:
    w = spec.weights()
    spec.player_count(w.m)
    return SinglePeriodGame(w, spec.vector("X", length=w.m), spec.vector("P", length=w.m))


def build_stochastic(spec: GameSpec) -> tuple[ScenarioSet, WeightSystem]:
    w = spec.weights()
    spec.player_count(w.m)
    raw = spec.require("scenarios")
    if not isinstance(raw, list) or not raw:
        spec.fail("scenarios", "expected a non-empty list")
    items = []
    for sc in raw:
        if not isinstance(sc, dict) or not _is_number(sc.get("p")):
            spec.fail("scenarios", "each scenario needs a numeric 'p'")
        items.append((sc["p"], spec.vector("X", sc.get("X"), w.m), spec.vector("P", sc.get("P"), w.m)))
    try:
        return ScenarioSet(items, tol=spec.tolerance), w
    except ValueError as exc:
        spec.fail("scenarios", str(exc))


def build_quitting(spec: GameSpec):
    w = spec.weights()
    spec.player_count(w.m)
    if "scenarios" in spec.data:
        X0 = spec.vector("X0", length=w.m)
        raw = spec.data["scenarios"]
        if not isinstance(raw, list) or not raw:
            spec.fail("scenarios", "expected a non-empty list")
        items = []
        for sc in raw:
            if not isinstance(sc, dict) or not _is_number(sc.get("p")):
                spec.fail("scenarios", "each scenario needs a numeric 'p'")
            items.append((sc["p"], spec.matrix("X", sc.get("X"), w.m)))
        try:
            return StochasticQuittingGame(w, X0, items, tol=spec.tolerance)
        except ValueError as exc:
            spec.fail("scenarios", str(exc))
    X = spec.matrix("X", width=w.m)
    if X.shape[0] < 2:
        spec.fail("X", "a quitting game needs at least two rows (T >= 1)")
    return QuittingGame(X, w)


def build_stopping(spec: GameSpec) -> tuple[EventTree, WeightSystem]:
    w = spec.weights()
    spec.player_count(w.m)
    raw = spec.require("nodes")
    if not isinstance(raw, list) or not raw:
        spec.fail("nodes", "expected a non-empty list of nodes")
    nodes = []
    for entry in raw:
        if not isinstance(entry, dict) or "id" not in entry or not isinstance(entry.get("t"), int):
            spec.fail("nodes", "each node needs an 'id' and an integer 't'")
        children = entry.get("children", [])
        if not isinstance(children, list) or not all(
            isinstance(c, dict) and "id" in c and _is_number(c.get("p")) for c in children
        ):
            spec.fail("children", f"node {entry['id']!r}: children must be objects with 'id' and 'p'")
        X = spec.vector("X", entry.get("X"), w.m)
        nodes.append(Node(entry["id"], entry["t"], X, tuple((c["id"], c["p"]) for c in children)))
    root = spec.data.get("root", raw[0]["id"])
    try:
        return EventTree(nodes, root, tol=spec.tolerance), w
    except ValueError as exc:
        spec.fail("nodes", str(exc))


def build_raw(spec: GameSpec) -> tuple[RawWeightTable, np.ndarray | None, np.ndarray | None]:
    if "weights" in spec.data:
        entries = spec.data["weights"]
        if not isinstance(entries, list) or not entries:
            spec.fail("weights", "expected a list of {E, k, w} entries")
        m = spec.data.get("m")
        if not isinstance(m, int) or m < 1:
            spec.fail("m", "raw weight tables need the player count 'm'")
        table = {}
        for e in entries:
            ok = (
                isinstance(e, dict)
                and isinstance(e.get("E"), list)
                and all(isinstance(i, int) and 1 <= i <= m for i in e["E"])
                and isinstance(e.get("k"), int)
                and 1 <= e["k"] <= m
                and _is_number(e.get("w"))
            )
            if not ok:
                spec.fail("weights", "entries need 'E' (players 1..m), 'k' (1..m) and a numeric 'w'")
            table[mask_of(i - 1 for i in e["E"]), e["k"] - 1] = e["w"]
        try:
            raw = RawWeightTable(m, table)
        except ValueError as exc:
            spec.fail("weights", str(exc))
    else:
        a = spec.vector("a")
        if np.any(a.sum() - a >= 1.0):
            spec.fail("a", "every partial sum excluding one player must stay below 1")
        raw = RawWeightTable.from_generators(a)
        spec.player_count(raw.m)
    X = spec.vector("X", length=raw.m) if "X" in spec.data else None
    P = spec.vector("P", length=raw.m) if "P" in spec.data else None
    if (X is None) != (P is None):
        spec.fail("X" if X is None else "P", "X and P must be given together")
    return raw, X, P


# ---------------------------------------------------------------- output


def fmt(x: float) -> str:
    return f"{x:.9f}"


def fmt_vec(v) -> str:
    return "[" + ", ".join(fmt(x) for x in v) + "]"


def players(mask: int, m: int) -> str:
    inside = ", ".join(str(k + 1) for k in range(m) if mask >> k & 1)
    return "{" + inside + "}"


def exact(x: float) -> str:
    return repr(float(x))


def exact_vec(v) -> list[str]:
    return [exact(x) for x in v]


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.doc: dict[str, Any] = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, machine: bool) -> str:
        if machine:
            return json.dumps(self.doc, sort_keys=True, indent=2) + "\n"
        return "\n".join(self.lines) + "\n"


def _header(rep: Report, spec: GameSpec, m: int, regime: str | None) -> None:
    rep.line(f"kind: {spec.kind}")
    rep.line(f"players: {m}")
    if regime is not None:
        rep.line(f"regime: {regime}")
    rep.line(f"tolerance: {spec.tolerance!r}")
    rep.doc.update(kind=spec.kind, players=m, regime=regime, tolerance=exact(spec.tolerance))


# ---------------------------------------------------------------- commands


def cmd_solve(spec: GameSpec, args) -> tuple[Report, int]:
    rep = Report()
    if spec.kind in ("single", "stochastic"):
        sc = None
        if spec.kind == "single":
            g = build_single(spec)
            res = solve_single(g)
            w = g.weights
        else:
            sc, w = build_stochastic(spec)
            res = solve_single_stochastic(sc, w)
        m = w.m
        _header(rep, spec, m, w.regime)
        if sc is not None:
            rep.line("expected X: " + fmt_vec(sc.expected_X()))
            rep.line("expected P: " + fmt_vec(sc.expected_P()))
        rep.line("value: " + fmt_vec(res.value))
        rep.line("exercisers: " + players(res.active_set, m))
        rep.line("equilibrium: " + " ".join("exercise" if s == 0 else "wait" for s in res.equilibrium))
        rep.doc.update(
            value=exact_vec(res.value),
            equilibrium={"profile": list(res.equilibrium), "exercisers": [k + 1 for k in res.exercisers]},
        )
        return rep, EXIT_OK
    if spec.kind == "quitting":
        q = build_quitting(spec)
        if isinstance(q, StochasticQuittingGame):
            raise SpecError("stochastic quitting games need not have a pure value; use 'verify'", spec.line_of("scenarios"))
        res = solve_quitting(q)
        _header(rep, spec, q.m, q.weights.regime)
        rep.line(f"horizon: {q.T}")
        rep.line("value: " + fmt_vec(res.value))
        rep.line("times: (" + ", ".join(str(t) for t in res.equilibrium) + ")")
        rep.line("early quitters: " + players(res.active_set, q.m))
        rep.doc.update(
            horizon=q.T,
            value=exact_vec(res.value),
            equilibrium={"times": list(res.equilibrium), "exercisers": [k + 1 for k in res.exercisers]},
        )
        return rep, EXIT_OK
    if spec.kind == "stopping":
        tree, w = build_stopping(spec)
        vp = value_process(tree, w)
        tau = equilibrium_stopping(tree, vp, spec.tolerance)
        _header(rep, spec, tree.m, w.regime)
        rep.line(f"horizon: {tree.T}")
        rep.line("value: " + fmt_vec(vp[tree.root]))
        rep.line("value process:")
        for nid in tree.order:
            node = tree.nodes[nid]
            stops = [k + 1 for k in range(tree.m) if vp[nid][k] <= node.X[k] + spec.tolerance]
            mark = " stop: " + players(mask_of(k - 1 for k in stops), tree.m) if stops and not node.is_leaf else ""
            rep.line(f"  node {nid} (t={node.t}): {fmt_vec(vp[nid])}{mark}")
        internal = set(tree.internal)
        stop_nodes = {}
        for k in range(tree.m):
            nodes = sorted((n for n in tau.stops[k] if n in internal), key=lambda n: (tree.nodes[n].t, str(n)))
            stop_nodes[str(k + 1)] = [str(n) for n in nodes]
            rep.line(f"player {k + 1} stops at: " + (", ".join(map(str, nodes)) if nodes else "horizon only"))
        rep.doc.update(
            horizon=tree.T,
            value=exact_vec(vp[tree.root]),
            equilibrium={"stopping_nodes": stop_nodes},
            value_process={str(n): exact_vec(vp[n]) for n in tree.order},
        )
        return rep, EXIT_OK
    raise SpecError(
        "raw weight tables have no guaranteed value; use 'verify' or 'wuc'", spec.line_of("kind")
    )


def _report_table(rep: Report, report, m: int) -> None:
    if m > 4:
        return
    rep.line("payoff table (s_k: 0 = exercise, 1 = wait):")
    for prof in (tuple(p) for p in np.ndindex(*(2,) * m)):
        rep.line(f"  {prof}: {fmt_vec(report.payoff(prof))}")


def _nash_lines(rep: Report, report) -> None:
    if report.nash:
        rep.line(f"pure Nash: {len(report.nash)} profile(s), {len(report.nash_payoffs())} distinct payoff(s)")
    else:
        rep.line("pure Nash: none")
    rep.line(f"optimal equilibria: {len(report.optimal) if report.optimal else 'none'}")


def cmd_verify(spec: GameSpec, args) -> tuple[Report, int]:
    rep = Report()
    tol = spec.tolerance
    if spec.kind in ("single", "stochastic", "raw-weights"):
        if spec.kind == "single":
            g = build_single(spec)
            solvable = g
            regime = g.weights.regime
        elif spec.kind == "stochastic":
            sc, w = build_stochastic(spec)
            g = SinglePeriodGame(w, sc.expected_X(), sc.expected_P())
            solvable = g
            regime = w.regime
        else:
            table, X, P = build_raw(spec)
            if X is None:
                raise SpecError("verify needs X and P", 1)
            g = RawWeightGame(table, X, P)
            solvable = single_game_from_raw(g)
            regime = None
        _header(rep, spec, g.m, regime)
        report = analyze_single(g, tol)
        _report_table(rep, report, g.m)
        _nash_lines(rep, report)
        rep.line("maximin: " + fmt_vec(report.maximin))
        rep.line("minimax: " + fmt_vec(report.minimax))
        rep.doc.update(
            nash=[list(p) for p in report.nash],
            optimal=[list(p) for p in report.optimal],
            maximin=exact_vec(report.maximin),
            minimax=exact_vec(report.minimax),
        )
        code = EXIT_OK
        if solvable is not None:
            res = solve_single(solvable)
            agree = (
                np.all(np.abs(res.value - report.maximin) <= tol)
                and np.all(np.abs(res.value - report.minimax) <= tol)
                and report.is_optimal(res.equilibrium)
            )
            rep.line("solver value: " + fmt_vec(res.value))
            rep.line("solver value = oracle value ✓" if agree else "solver value ≠ oracle value ✗")
            rep.doc.update(value=exact_vec(res.value), agreement=bool(agree))
            code = EXIT_OK if agree else EXIT_NEGATIVE
        return rep, code
    if spec.kind == "quitting":
        q = build_quitting(spec)
        _header(rep, spec, q.m, q.weights.regime)
        if isinstance(q, StochasticQuittingGame):
            check = verify_quitting(q, tol=tol)
            _nash_lines(rep, check.report)
            rep.doc.update(nash=[[list(s) for s in p] for p in check.report.nash])
            return rep, EXIT_OK
        res = solve_quitting(q)
        check = verify_quitting(q, res.equilibrium, tol)
        _nash_lines(rep, check.report)
        agree = bool(check.candidate_optimal) and np.all(
            np.abs(quitting_payoff(q, res.equilibrium) - res.value) <= tol
        )
        rep.line("solver times: (" + ", ".join(map(str, res.equilibrium)) + ")")
        rep.line("solver value: " + fmt_vec(res.value))
        rep.line("solver equilibrium passes the saddle check ✓" if agree else "solver equilibrium fails the saddle check ✗")
        rep.doc.update(
            nash=[list(p) for p in check.report.nash],
            value=exact_vec(res.value),
            agreement=bool(agree),
        )
        return rep, EXIT_OK if agree else EXIT_NEGATIVE
    if spec.kind == "stopping":
        tree, w = build_stopping(spec)
        _header(rep, spec, tree.m, w.regime)
        vp = value_process(tree, w)
        tau = equilibrium_stopping(tree, vp, tol)
        replay = evaluate_stopping_profile(tree, w, tau, vp)
        ok_value = bool(np.all(np.abs(replay - vp[tree.root]) <= tol))
        ok_saddle = verify_stopping_equilibrium(tree, w, tau, vp=vp, tol=tol)
        rep.line("value: " + fmt_vec(vp[tree.root]))
        rep.line("replayed equilibrium payoff: " + fmt_vec(replay))
        rep.line("equilibrium stopping rule attains the value ✓" if ok_value else "equilibrium payoff differs from the value ✗")
        rep.line("equilibrium stopping rule is an optimal equilibrium ✓" if ok_saddle else "equilibrium stopping rule fails the saddle check ✗")
        rep.doc.update(value=exact_vec(vp[tree.root]), agreement=ok_value and ok_saddle)
        return rep, EXIT_OK if ok_value and ok_saddle else EXIT_NEGATIVE
    raise SpecError(f"verify does not support kind {spec.kind!r}")


def cmd_wuc(spec: GameSpec, args) -> tuple[Report, int]:
    rep = Report()
    if spec.kind == "single":
        g = build_single(spec)
        table = RawWeightTable.from_generators(g.weights.a)
        X, P = g.X, g.P
    elif spec.kind == "raw-weights":
        table, X, P = build_raw(spec)
    else:
        raise SpecError(f"wuc needs kind 'single' or 'raw-weights', got {spec.kind!r}", spec.line_of("kind"))
    m = table.m
    _header(rep, spec, m, None)
    if m == 1:
        rep.line("WUC: vacuously yes")
        rep.doc.update(wuc=True, witness=None, a=None)
        return rep, EXIT_OK

    a = check_weight_form(table, spec.tolerance)
    witness = None
    if X is not None:
        res = check_wuc(RawWeightGame(table, X, P), spec.tolerance)
        if not res:
            witness = (X, P, res.witness)
    if witness is None:
        rng = np.random.default_rng(args.seed)
        witness = search_wuc_witness(table, rng, WUC_TRIALS, spec.tolerance)

    if witness is None:
        rep.line(f"WUC: yes (no violation in the given game or {WUC_TRIALS} random games, seed {args.seed})")
    else:
        Xw, Pw, (k, l, s, s2) = witness
        rep.line("WUC: no")
        rep.line(f"witness: X = {fmt_vec(Xw)}, P = {fmt_vec(Pw)}")
        rep.line(f"  player {k + 1} moves {s} -> {s2}; player {l + 1}'s payoff moves the same way")
    rep.line("form fit: a = " + fmt_vec(a) if a is not None else "form fit: none")
    summary = ("WUC: yes" if witness is None else "WUC witness found") + (
        "; a recovered" if a is not None else "; form fit: none"
    )
    rep.line(summary)
    rep.doc.update(
        wuc=witness is None,
        witness=None
        if witness is None
        else {
            "X": exact_vec(witness[0]),
            "P": exact_vec(witness[1]),
            "deviator": witness[2][0] + 1,
            "affected": witness[2][1] + 1,
            "from": list(witness[2][2]),
            "to": list(witness[2][3]),
        },
        a=None if a is None else exact_vec(a),
        seed=args.seed,
    )
    return rep, EXIT_OK if witness is None else EXIT_NEGATIVE


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "wuc": cmd_wuc}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynkin", description="Solve and verify multi-player Dynkin games."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "compute the value and an optimal equilibrium"),
        ("verify", "check the solver against exhaustive enumeration"),
        ("wuc", "check weak unilateral competitiveness and the weight form"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("path", help="game specification (JSON)")
        p.add_argument("--tolerance", type=float, default=None, help="absolute tolerance (default 1e-9)")
        p.add_argument("--machine", action="store_true", help="emit machine-readable JSON")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized oracle searches")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tolerance is not None and not (args.tolerance > 0 and math.isfinite(args.tolerance)):
        print(f"{args.path}: --tolerance must be a positive number", file=sys.stderr)
        return EXIT_INVALID
    try:
        spec = load_spec(args.path, args.tolerance)
        rep, code = COMMANDS[args.command](spec, args)
    except OSError as exc:
        print(f"{args.path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpecError as exc:
        where = f"{args.path}:{exc.line}" if exc.line else args.path
        print(f"{where}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InstanceTooLarge as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    sys.stdout.write(rep.emit(args.machine))
    return code


if __name__ == "__main__":
    sys.exit(main())

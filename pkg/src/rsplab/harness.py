"""
Command-line harness: build worlds, run honest/attack/control executions
across the scenario matrix, check all goals, diff against the expected
fixture, and render the verdict tables.

A cell of the matrix is one (approach, scenario, tunnel setting, goal).
Its verdict is "violated" iff any execution of that world - the honest run,
every applicable attack script, every applicable negative control - yields
a trace violating the goal.  Pass therefore means "no scripted or honest
execution violates the goal", not a proof of absence; the renderer says so.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from . import attacks as attacks_mod
from .attacks import (ATTACKS_BY_ID, EXPLANATIONS, attack_registry,
                      audit_trace, fuzz_adversary, honest_script,
                      negative_controls)
from .fixture import (FAIL, GOALS, NO_TLS, PASS, PAPER_DIVERGENCES,
                      expected_matrix, scenario_rows)
from .goals import check_all, check_forward_secrecy, goal_catalog
from .scenarios import (AC_SCENARIOS, DS_SCENARIOS, ScenarioConfig,
                        build_world, expand_recs, parse_config)

DEFAULT_SEED_ENV = "RSP_LAB_SEED"


@dataclass
class RunOutcome:
    """One world execution: which script ran it and what the goals said."""
    script: str
    verdicts: dict
    audit_failures: list
    aborted: Optional[str] = None


@dataclass
class Cell:
    approach: str
    scenario: int
    tls: bool
    goal: str
    actual: str                      # "pass" | "violated"
    expected: Optional[str] = None   # resolved fixture mark, None under recs
    refs: tuple = ()
    via: Optional[str] = None        # script that demonstrated the violation
    witness: Optional[str] = None

    @property
    def agree(self) -> Optional[bool]:
        return None if self.expected is None else self.actual == self.expected


@dataclass
class MatrixReport:
    cells: list
    seed: int
    recs: tuple
    runtime: float
    audit_failures: list = field(default_factory=list)

    def disagreements(self) -> list:
        return [c for c in self.cells if c.agree is False]

    def cell_map(self) -> dict:
        return {(c.approach, c.scenario, c.tls, c.goal): c for c in self.cells}


def run_world_suite(cfg: ScenarioConfig, seed: int = 0) -> list[RunOutcome]:
    """Honest script, then every applicable attack and negative control,
    each in a freshly built world."""
    outcomes = []
    runs = [("honest", honest_script)]
    runs += [(s.id, s.run) for s in attack_registry() if s.applicable(cfg)]
    runs += [(c.id, c.run) for c in negative_controls(cfg)]
    for name, fn in runs:
        world = build_world(cfg)
        aborted = None
        try:
            fn(world)
        except AssertionError:
            raise
        except Exception as exc:  # a script bug, not a verdict
            aborted = f"{type(exc).__name__}: {exc}"
        verdicts = check_all(world.trace, world.adversary.knowledge)
        outcomes.append(RunOutcome(name, verdicts, audit_trace(world.trace),
                                   aborted))
    return outcomes


def evaluate_cell_group(cfg: ScenarioConfig, compare: bool, seed: int) -> tuple:
    """All 15 goal cells for one (approach, scenario, tls)."""
    outcomes = run_world_suite(cfg, seed)
    expected = expected_matrix().get((cfg.approach, cfg.scenario))
    cells = []
    audit_failures = []
    for o in outcomes:
        for msg in o.audit_failures:
            audit_failures.append(f"{cfg.describe()} run={o.script}: {msg}")
        if o.aborted:
            audit_failures.append(
                f"{cfg.describe()} run={o.script}: run crashed: {o.aborted}")
    for goal in GOALS:
        via = witness = None
        actual = "pass"
        for o in outcomes:
            v = o.verdicts[goal]
            if not v.ok:
                actual, via, witness = "violated", o.script, v.witness
                break
        exp = expected[goal] if compare else None
        cells.append(Cell(
            cfg.approach, cfg.scenario, cfg.tls, goal, actual,
            expected=None if exp is None else exp.resolved(cfg.tls),
            refs=() if exp is None else exp.attack_refs,
            via=via, witness=witness))
    return cells, audit_failures


def run_matrix(approaches=("ds", "ac"), scenarios=None, tls_values=(True, False),
               recs=frozenset(), seed: int = 0,
               lpa_strict: bool = True) -> MatrixReport:
    start = time.monotonic()
    cells = []
    audit_failures = []
    compare = not recs
    for approach in approaches:
        rows = scenario_rows(approach)
        for scenario in rows:
            if scenarios and scenario not in scenarios:
                continue
            for tls in tls_values:
                cfg = ScenarioConfig(approach, scenario, tls,
                                     recs=expand_recs(recs, approach),
                                     lpa_strict=lpa_strict)
                group, audits = evaluate_cell_group(cfg, compare, seed)
                cells.extend(group)
                audit_failures.extend(audits)
    return MatrixReport(cells, seed, tuple(sorted(recs)),
                        time.monotonic() - start, audit_failures)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_MARK = {("pass", "pass"): "+", ("violated", "violated"): "x",
         ("pass", "violated"): "o", ("violated", "pass"): "!"}


def render_text(report: MatrixReport) -> str:
    """Rows are scenarios, columns goals; each cell folds the two tunnel
    settings: + holds, x fails, o fails only without the tunnel, ! fails
    only with it (never expected).  Superscripts are the script ids."""
    cmap = report.cell_map()
    out = []
    if report.recs:
        out.append(f"hardening in effect: {', '.join(report.recs)}")
    for approach, label in (("ds", "default-server approach"),
                            ("ac", "activation-code approach")):
        rows = [sc for sc in scenario_rows(approach)
                if any(k[0] == approach and k[1] == sc for k in cmap)]
        if not rows:
            continue
        out.append(f"== {label} ==")
        head = "scen | " + " ".join(f"{g:>4}" for g in GOALS)
        out.append(head)
        out.append("-" * len(head))
        for sc in rows:
            marks = []
            for g in GOALS:
                with_tls = cmap.get((approach, sc, True, g))
                without = cmap.get((approach, sc, False, g))
                if with_tls is None or without is None:
                    present = with_tls or without
                    mark = "x" if present.actual == "violated" else "+"
                    refs = "".join(present.refs)
                else:
                    mark = _MARK[(with_tls.actual, without.actual)]
                    refs = "".join(with_tls.refs or without.refs)
                disagree = any(c is not None and c.agree is False
                               for c in (with_tls, without))
                marks.append(f"{mark}{refs:<2}{'*' if disagree else ' '}"[:4].rjust(4))
            out.append(f"{sc:>4} | " + " ".join(marks))
        out.append("")
    bad = report.disagreements()
    out.append(f"cells: {len(report.cells)}  disagreements: {len(bad)}  "
               f"audit failures: {len(report.audit_failures)}  "
               f"runtime: {report.runtime:.2f}s  seed: {report.seed}")
    for c in bad:
        out.append(f"  DISAGREE {c.approach}/{c.scenario}/"
                   f"{'tls' if c.tls else 'notls'}/{c.goal}: actual={c.actual} "
                   f"expected={c.expected} via={c.via}")
        if c.witness:
            out.append(f"    witness: {c.witness}")
    for msg in report.audit_failures:
        out.append(f"  AUDIT {msg}")
    out.append("note: 'pass' means no scripted or honest execution violates "
               "the goal; it is evidence, not proof of absence.")
    return "\n".join(out)


def render_json(report: MatrixReport) -> str:
    payload = {
        "seed": report.seed,
        "recs": list(report.recs),
        "cells": [
            {"approach": c.approach, "scenario": c.scenario, "tls": c.tls,
             "goal": c.goal, "actual": c.actual, "expected": c.expected,
             "agree": c.agree, "refs": list(c.refs), "via": c.via,
             "witness": c.witness}
            for c in report.cells
        ],
        "disagreements": len(report.disagreements()),
        "audit_failures": report.audit_failures,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def render_csv(report: MatrixReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["approach", "scenario", "tls", "goal", "actual", "expected",
                "agree", "refs", "via", "witness"])
    for c in report.cells:
        w.writerow([c.approach, c.scenario, int(c.tls), c.goal, c.actual,
                    c.expected or "", "" if c.agree is None else int(c.agree),
                    "".join(c.refs), c.via or "", c.witness or ""])
    return buf.getvalue()


RENDERERS = {"text": render_text, "json": render_json, "csv": render_csv}


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _add_world_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--approach", choices=["ds", "ac"], default="ds",
                   help="profile ordering approach: default-server or activation-code")
    p.add_argument("--scenario", type=int, default=1)
    tls = p.add_mutually_exclusive_group()
    tls.add_argument("--tls", dest="tls", action="store_true", default=True)
    tls.add_argument("--no-tls", dest="tls", action="store_false")
    p.add_argument("--recs", default="",
                   help="comma-separated hardening set, e.g. R2,R7,R9 or R10")
    strict = p.add_mutually_exclusive_group()
    strict.add_argument("--strict-lpa", dest="lpa_strict", action="store_true",
                        default=True)
    strict.add_argument("--relaxed-lpa", dest="lpa_strict", action="store_false")
    p.add_argument("--careless-user", action="store_true")
    p.add_argument("--config", help="key=value scenario file; flags override")
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get(DEFAULT_SEED_ENV, "0")))


def _cfg_from_args(args) -> ScenarioConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        return cfg
    return ScenarioConfig(
        args.approach, args.scenario, args.tls,
        recs=expand_recs(args.recs.split(","), args.approach),
        lpa_strict=args.lpa_strict, careless_user=args.careless_user)


def _cmd_matrix(args) -> int:
    approaches = ("ds", "ac") if args.approach_filter == "both" \
        else (args.approach_filter,)
    tls_values = {"both": (True, False), "on": (True,), "off": (False,)}[args.tls_filter]
    scenarios = set(args.scenario_filter) if args.scenario_filter else None
    recs = frozenset(x for x in args.recs.split(",") if x.strip())
    report = run_matrix(approaches, scenarios, tls_values, recs=recs,
                        seed=args.seed)
    text = RENDERERS[args.format](report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if report.audit_failures:
        return 1
    if not recs and report.disagreements():
        return 1
    return 0


def _cmd_run(args) -> int:
    cfg = _cfg_from_args(args)
    outcomes = run_world_suite(cfg, args.seed)
    wanted = None if args.attack in ("all", "") else args.attack
    exp = expected_matrix()[(cfg.approach, cfg.scenario)]
    status = 0
    print(cfg.describe())
    for o in outcomes:
        if wanted and o.script not in ("honest", wanted):
            continue
        bad = [g for g in GOALS if not o.verdicts[g].ok]
        print(f"  run {o.script}: " +
              ("all goals hold" if not bad else "violated " + ", ".join(bad)))
        for g in bad:
            print(f"    {g}: {o.verdicts[g].witness}")
    if not cfg.recs:
        for goal in GOALS:
            actual = "violated" if any(not o.verdicts[goal].ok for o in outcomes
                                       if not wanted or o.script in ("honest", wanted)) \
                else "pass"
            want = exp[goal].resolved(cfg.tls)
            if wanted is None and actual != want:
                print(f"  MISMATCH {goal}: actual={actual} expected={want}")
                status = 1
    return status


def _cmd_trace(args) -> int:
    cfg = _cfg_from_args(args)
    world = build_world(cfg)
    if args.attack:
        script = ATTACKS_BY_ID.get(args.attack)
        if script is None:
            print(f"unknown attack id {args.attack!r}", file=sys.stderr)
            return 2
        if not script.applicable(cfg):
            print(f"attack {args.attack} does not apply to {cfg.describe()}",
                  file=sys.stderr)
            return 2
        script.run(world)
    else:
        honest_script(world)
    print(world.trace.render())
    return 0


def _cmd_goals(args) -> int:
    for g in goal_catalog():
        inj = "/".join("inj" if r.injective else "noninj" for r in g.requires) \
            if g.requires else "secrecy"
        print(f"{g.name:>2} [{g.side}] ({inj}) {g.summary}")
    return 0


def _cmd_explain(args) -> int:
    text = EXPLANATIONS.get(args.marker)
    if text is None:
        print(f"unknown attack marker {args.marker!r}", file=sys.stderr)
        return 2
    script = ATTACKS_BY_ID[args.marker]
    print(f"attack {script.id}: {script.title}")
    print(f"typically violates: {', '.join(sorted(script.claims))}")
    print()
    print(text)
    return 0


def _cmd_fuzz(args) -> int:
    cfg = _cfg_from_args(args)
    rng = random.Random(args.seed)
    world = build_world(cfg)
    fuzz_adversary(world, args.steps, rng)
    verdicts = check_all(world.trace, world.adversary.knowledge)
    bad = [g for g in GOALS if not verdicts[g].ok]
    exp = expected_matrix()[(cfg.approach, cfg.scenario)]
    surprises = [g for g in bad if exp[g].resolved(cfg.tls) == "pass"]
    print(f"fuzz: {args.steps} steps, violations: {bad or 'none'}")
    if surprises:
        print(f"UNEXPECTED violations on pass-cells: {surprises}")
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rsp-lab",
        description="executable security lab for consumer remote SIM provisioning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="run the full scenario matrix and diff "
                                      "against the expected fixture")
    p.add_argument("--approach", dest="approach_filter",
                   choices=["ds", "ac", "both"], default="both")
    p.add_argument("--scenario", dest="scenario_filter", type=int,
                   action="append")
    p.add_argument("--tls", dest="tls_filter", choices=["on", "off", "both"],
                   default="both")
    p.add_argument("--recs", default="")
    p.add_argument("--format", choices=sorted(RENDERERS), default="text")
    p.add_argument("--out")
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get(DEFAULT_SEED_ENV, "0")))
    p.set_defaults(fn=_cmd_matrix)

    p = sub.add_parser("run", help="run one world: honest plus applicable attacks")
    _add_world_flags(p)
    p.add_argument("--attack", default="",
                   help="only this attack id (default: all applicable)")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("trace", help="dump the canonical trace of one run")
    _add_world_flags(p)
    p.add_argument("--attack", default="")
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("goals", help="list the goal catalog")
    p.set_defaults(fn=_cmd_goals)

    p = sub.add_parser("explain", help="describe one attack marker")
    p.add_argument("marker")
    p.set_defaults(fn=_cmd_explain)

    p = sub.add_parser("fuzz", help="bounded random adversary smoke test")
    _add_world_flags(p)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(fn=_cmd_fuzz)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())

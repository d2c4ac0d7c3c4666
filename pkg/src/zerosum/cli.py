"""Command-line front end: ``zerosum <command> ...``.

Exit codes: 0 ok, 2 usage or validation error, 3 search budget exhausted
(partial result), 4 theorem mismatch or verification failure.

Budgets fall back to the environment variables ZEROSUM_MAX_NODES,
ZEROSUM_MAX_SECONDS, ZEROSUM_MAX_STATES and ZEROSUM_WORKERS when the
corresponding flag is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence as Seq

from . import invariants as inv
from . import structure, witness
from .group import GroupSpec, NotAGroupError, make_cyclic, make_group
from .sequence import (
    DEFAULT_STATE_CAP,
    SequenceSyntaxError,
    has_product_one_of_length,
    parse_sequence,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARTIAL = 3
EXIT_MISMATCH = 4

FAMILY_FOR = {
    ("davenport", 0): structure.DAVENPORT_ETA,
    ("davenport", 1): structure.DAVENPORT_ETA,
    ("eta", 0): structure.DAVENPORT_ETA,
    ("eta", 1): structure.DAVENPORT_ETA,
    ("egz", 0): structure.EGZ_EVEN,
    ("egz", 1): structure.EGZ_ODD,
    ("gao", 0): structure.GAO_EVEN,
    ("gao", 1): structure.EGZ_ODD,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    s: Optional[int] = None
    cyclic: bool = False
    kinds: List[str] = field(default_factory=list)
    max_nodes: int = 10**9
    max_seconds: float = 3600.0
    max_states: int = DEFAULT_STATE_CAP
    seed: int = 0
    workers: int = 1
    fmt: str = "text"
    output: Optional[str] = None

    def budget(self) -> inv.SearchBudget:
        return inv.SearchBudget(self.max_nodes, self.max_seconds, self.max_states)

    def group(self) -> GroupSpec:
        if self.n is None:
            raise UsageError("--n is required")
        if self.cyclic:
            return make_cyclic(self.n)
        if self.s is None:
            raise UsageError("--s is required")
        return make_group(self.n, self.s)

    def echo(self) -> dict:
        return {
            "seed": self.seed,
            "budget": {"max_nodes": self.max_nodes, "max_seconds": self.max_seconds, "max_states": self.max_states},
            "workers": self.workers,
        }


def _env(name: str, cast, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {name}: {raw!r}") from exc


def _kinds(text: str) -> List[str]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part not in inv.KIND_ALIASES:
            raise UsageError(f"unknown kind {part!r} (use d, eta, s, E)")
        out.append(inv.KIND_ALIASES[part])
    return out


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    cfg.n = getattr(ns, "n", None)
    cfg.s = getattr(ns, "s", None)
    cfg.cyclic = getattr(ns, "cyclic", False)
    cfg.seed = getattr(ns, "seed", 0) or 0
    cfg.fmt = ns.format
    cfg.output = ns.output
    cfg.max_nodes = ns.max_nodes if ns.max_nodes is not None else _env("ZEROSUM_MAX_NODES", int, cfg.max_nodes)
    cfg.max_seconds = (
        ns.max_seconds if ns.max_seconds is not None else _env("ZEROSUM_MAX_SECONDS", float, cfg.max_seconds)
    )
    cfg.max_states = ns.max_states if ns.max_states is not None else _env("ZEROSUM_MAX_STATES", int, cfg.max_states)
    cfg.workers = ns.workers if ns.workers is not None else _env("ZEROSUM_WORKERS", int, cfg.workers)
    if min(cfg.max_nodes, cfg.max_seconds, cfg.max_states, cfg.workers) <= 0:
        raise UsageError("budgets and worker count must be positive")
    if cfg.fmt not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {cfg.fmt!r}")
    if getattr(ns, "kinds", None):
        cfg.kinds = _kinds(ns.kinds)
    elif getattr(ns, "kind", None):
        cfg.kinds = _kinds(ns.kind)
    return cfg


# -- output ------------------------------------------------------------------------


def _emit(cfg: RunConfig, payload: dict, text: str, csv_text: Optional[str] = None) -> None:
    if cfg.fmt == "json":
        out = json.dumps(payload, indent=2)
    elif cfg.fmt == "csv":
        if csv_text is None:
            raise UsageError(f"csv output is not available for {cfg.command}")
        out = csv_text
    else:
        out = text
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(out + ("" if out.endswith("\n") else "\n"))
    else:
        print(out)


def load_schema(name: str) -> dict:
    """JSON schema shipped with the package, e.g. ``load_schema("constants")``."""
    from importlib import resources

    return json.loads(resources.files("zerosum").joinpath("schemas", f"{name}.json").read_text())


def _group_json(G: GroupSpec) -> dict:
    return {"n": G.n, "s": G.s, "label": G.label(), "order": G.order, "exponent": G.exponent()}


def _table(rows: List[List[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


# -- commands ------------------------------------------------------------------------


def cmd_constants(cfg: RunConfig, disjoint_bound: bool = True, search: bool = True) -> int:
    G = cfg.group()
    kinds = cfg.kinds or list(inv.KINDS)
    reports = []
    for kind in kinds:
        if search:
            r = inv.compute_invariant(
                G, kind, cfg.budget(), workers=cfg.workers, disjoint_bound=disjoint_bound and kind == inv.GAO
            )
        else:
            r = inv.predicted_report(G, kind)
        reports.append(r)
    code = EXIT_OK
    rows = [["kind", "computed", "method", "predicted", "nodes", "ms"]]
    for r in reports:
        pred = "-" if r.predicted is None else str(r.predicted)
        shown = str(r.value) if r.method != inv.PREDICTED_ONLY else "-"
        rows.append([r.kind, shown, r.method, pred, str(r.stats.nodes), f"{r.stats.elapsed_ms:.0f}"])
        if r.exhaustive and isinstance(r.predicted, int) and r.predicted != r.value:
            code = EXIT_MISMATCH
        elif r.method == inv.BUDGET_EXHAUSTED and code == EXIT_OK:
            code = EXIT_PARTIAL
    relations = inv.check_relations(reports)
    if any(not ok for _, ok in relations):
        code = EXIT_MISMATCH
    payload = {
        "command": "constants",
        "group": _group_json(G),
        **cfg.echo(),
        "reports": [r.to_json() for r in reports],
        "relations": [{"name": name, "holds": ok} for name, ok in relations],
        "exit_code": code,
    }
    text = f"{G.label()}  (order {G.order}, exponent {G.exponent()})\n" + _table(rows)
    if relations:
        text += "\n" + "\n".join(f"{'ok  ' if ok else 'FAIL'} {name}" for name, ok in relations)
    _emit(cfg, payload, text, inv.reports_to_csv(reports))
    return code


def cmd_inverse(cfg: RunConfig) -> int:
    G = cfg.group()
    if len(cfg.kinds) != 1:
        raise UsageError("inverse needs exactly one --kind")
    kind = cfg.kinds[0]
    family = FAMILY_FOR[(kind, G.n % 2)]
    r = inv.compute_invariant(G, kind, cfg.budget(), workers=cfg.workers)
    matched, unmatched = [], []
    for S in r.extremal:
        try:
            params = structure.classify_inverse(G, S, family)
        except structure.NotApplicableError:
            params = None
        (matched if params else unmatched).append((S, params))
    partial = not r.exhaustive
    code = EXIT_PARTIAL if partial else EXIT_OK
    if unmatched and not partial and G.s_class == "proper" and G.n >= 8:
        code = EXIT_MISMATCH
    payload = {
        "command": "inverse",
        "group": _group_json(G),
        **cfg.echo(),
        "kind": kind,
        "family": family,
        "value": r.value,
        "method": r.method,
        "partial": partial,
        "extremal_length": len(r.extremal[0]) if r.extremal else None,
        "matched": len(matched),
        "unmatched": len(unmatched),
        "sequences": [
            {"sequence": str(S), "family": p.to_json() if p else {"matched": False}} for S, p in matched + unmatched
        ],
        "exit_code": code,
    }
    lines = [
        f"{G.label()} {kind}: value {r.value} ({r.method}), {len(r.extremal)} canonical extremal sequences",
        f"family {family}: matched {len(matched)}, unmatched {len(unmatched)}",
    ]
    for S, p in matched + unmatched:
        tag = f"{family} alpha={p.alpha} beta={p.beta} t={list(p.t)}" if p else "UNMATCHED"
        lines.append(f"  {S}    {tag}")
    _emit(cfg, payload, "\n".join(lines))
    return code


def _threshold(G: GroupSpec, target: int) -> Optional[int]:
    kind = inv.GAO if target == G.order and target != G.exponent() else inv.EGZ
    if target not in (G.order, G.exponent()):
        return None
    value = inv.predicted(G, kind)
    return value if isinstance(value, int) else None


def cmd_witness(cfg: RunConfig, seq: Optional[str], length: Optional[int], target: Optional[int],
                exchange_cap: int, fallback: bool) -> int:
    G = cfg.group()
    if seq is not None:
        S = parse_sequence(seq, G)
    elif length is not None:
        S = witness.random_sequence(G, length, random.Random(cfg.seed))
    else:
        raise UsageError("give --seq or --len")
    target = target or G.exponent()
    out = witness.find_exp_product_one(G, S, target, exchange_cap=exchange_cap, allow_fallback=fallback)
    confirmed = None
    if not out.found:
        confirmed = has_product_one_of_length(S, target, method="cosets") is None
    thr = _threshold(G, target)
    code = EXIT_OK
    if not out.found and (confirmed is False or (thr is not None and len(S) >= thr)):
        code = EXIT_MISMATCH
    payload = {
        "command": "witness",
        "group": _group_json(G),
        **cfg.echo(),
        "sequence": str(S),
        "length": len(S),
        "threshold": thr,
        "outcome": out.to_json(),
        "absence_confirmed_by_dp": confirmed,
        "exit_code": code,
    }
    if out.found:
        text = (
            f"witness ({out.strategy}/{out.stage}), {len(out.witness)} terms:\n"
            f"  {' * '.join(str(g) for g in out.witness.elements)} = 1"
        )
    else:
        text = "no witness" + (" (absence confirmed by DP)" if confirmed else " (DP found one: finder incomplete)")
    _emit(cfg, payload, text)
    return code


def cmd_fuzz(cfg: RunConfig, length: Optional[int], count: int, target: Optional[int]) -> int:
    G = cfg.group()
    if count < 0:
        raise UsageError("--count must be >= 0")
    target = target or G.exponent()
    thr = _threshold(G, target)
    if length is None:
        if thr is None:
            raise UsageError("--len is required when no threshold is known")
        length = thr
    rep = witness.fuzz(G, length, target, count, cfg.seed)
    code = EXIT_OK
    if rep.failures and (thr is not None and length >= thr):
        code = EXIT_MISMATCH
    payload = {"command": "fuzz", "group": _group_json(G), **cfg.echo(), "threshold": thr, **rep.to_json(), "exit_code": code}
    text = (
        f"{G.label()}: {rep.successes}/{count} witnesses (len {length}, target {target}, seed {cfg.seed})\n"
        f"strategies: {rep.strategies}  stages: {rep.stages}"
    )
    _emit(cfg, payload, text)
    return code


def cmd_factorize(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.s is None:
        raise UsageError("--n and --s are required")
    try:
        f = structure.factorize(cfg.n, cfg.s)
    except NotAGroupError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"command": "factorize", "n": cfg.n, "s": cfg.s % cfg.n, **f.to_json(), "split_case": f.case}
    text = f"n = {cfg.n} = {f.h} * {f.n1} * {f.n2}   (n1 = {f.n1}, n2 = {f.n2}, h = {f.h})"
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_classify(cfg: RunConfig, seq: str) -> int:
    G = cfg.group()
    if len(cfg.kinds) != 1:
        raise UsageError("classify needs exactly one --kind")
    kind = cfg.kinds[0]
    family = FAMILY_FOR[(kind, G.n % 2)]
    S = parse_sequence(seq, G)
    try:
        params = structure.classify_inverse(G, S, family)
    except structure.NotApplicableError as exc:
        raise UsageError(str(exc)) from exc
    payload = {
        "command": "classify",
        "group": _group_json(G),
        "kind": kind,
        "family": family,
        "sequence": str(S),
        "result": params.to_json() if params else {"matched": False},
    }
    text = f"match: alpha={params.alpha} beta={params.beta} t={list(params.t)}" if params else "absent"
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_quotients(cfg: RunConfig) -> int:
    G = cfg.group()
    try:
        qs = structure.quotients(G)
        fact = structure.factorize(G.n, G.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"command": "quotients", "group": _group_json(G), "factorization": fact.to_json(), "quotients": [q.to_json() for q in qs]}
    rows = [["case", "H generators", "|H|", "H", "G/H"]]
    for q in qs:
        d = q.to_json()
        rows.append([d["case"], ", ".join(d["H_generators"]), str(d["H_order"]), d["H_kind"], d["quotient_kind"]])
    _emit(cfg, payload, f"{G.label()}  n1={fact.n1} n2={fact.n2} h={fact.h}\n" + _table(rows))
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", default="text", help="text, json or csv")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--max-nodes", type=int, help="search node budget [env ZEROSUM_MAX_NODES]")
    common.add_argument("--max-seconds", type=float, help="search wall-time budget [env ZEROSUM_MAX_SECONDS]")
    common.add_argument("--max-states", type=int, help="DP state cap [env ZEROSUM_MAX_STATES]")
    common.add_argument("--workers", type=int, help="worker processes [env ZEROSUM_WORKERS]")

    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--n", type=int, required=True)
    grp.add_argument("--s", type=int, help="twist parameter, s^2 = 1 mod n")
    grp.add_argument("--cyclic", action="store_true", help="work in C_n (rotations only)")

    ap = argparse.ArgumentParser(prog="zerosum", description="Zero-sum invariants of C_n x|_s C_2.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common, grp], help="compute d, eta, s, E")
    p.add_argument("--kinds", default="d,eta,s,E")
    p.add_argument("--no-disjoint-bound", action="store_true", help="plain search for E")
    p.add_argument("--predict-only", action="store_true", help="skip the searches")

    p = sub.add_parser("inverse", parents=[common, grp], help="enumerate and classify extremal sequences")
    p.add_argument("--kind", required=True)

    p = sub.add_parser("witness", parents=[common, grp], help="find one product-one witness")
    p.add_argument("--seq", help='sequence literal, e.g. "y^1^[7] . 1^[7] . x"')
    p.add_argument("--len", type=int, dest="length", help="random sequence of this length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int)
    p.add_argument("--exchange-cap", type=int, default=witness.DEFAULT_EXCHANGE_CAP)
    p.add_argument("--no-fallback", action="store_true")

    p = sub.add_parser("fuzz", parents=[common, grp], help="seeded witness campaign")
    p.add_argument("--len", type=int, dest="length")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int)

    p = sub.add_parser("factorize", parents=[common], help="n = h n1 n2 with s = -1 mod n1, 1 mod n2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)

    p = sub.add_parser("classify", parents=[common, grp], help="match a sequence to an extremal family")
    p.add_argument("--kind", required=True)
    p.add_argument("--seq", required=True)

    sub.add_parser("quotients", parents=[common, grp], help="normal subgroups H and quotients G/H")
    return ap


def main(argv: Optional[Seq[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        if cfg.command == "constants":
            return cmd_constants(cfg, disjoint_bound=not ns.no_disjoint_bound, search=not ns.predict_only)
        if cfg.command == "inverse":
            return cmd_inverse(cfg)
        if cfg.command == "witness":
            return cmd_witness(cfg, ns.seq, ns.length, ns.target, ns.exchange_cap, not ns.no_fallback)
        if cfg.command == "fuzz":
            return cmd_fuzz(cfg, ns.length, ns.count, ns.target)
        if cfg.command == "factorize":
            return cmd_factorize(cfg)
        if cfg.command == "classify":
            return cmd_classify(cfg, ns.seq)
        if cfg.command == "quotients":
            return cmd_quotients(cfg)
    except NotAGroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, SequenceSyntaxError, structure.NotApplicableError, inv.OutsideTheoremRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError(f"unhandled command {ns.command}")  # pragma: no cover


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

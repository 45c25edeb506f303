"""``plausinet`` command line.

Every command prints one record per line (``record key=value ...``) or, with
``--json``, a single JSON document.  Exit codes: 0 success or affirmative
verdict, 1 law failure or negative verdict, 2 usage or parse error, 3 a
dependent verdict from ``indep``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import algebras as A
from . import axioms, bayesnet, independence
from . import documents as D
from .core import DEFAULT_MAX_VARIABLES, EXHAUSTIVE_MAX_VARIABLES, PlausibilityError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DEPENDENT = 3

SUITES = ("axioms", "semigraphoid", "construction", "dsep-sound", "ni-vs-i")
SUITE_CAPS = {
    "axioms": DEFAULT_MAX_VARIABLES,
    "semigraphoid": 4,
    "construction": 4,
    "dsep-sound": 4,
    "ni-vs-i": EXHAUSTIVE_MAX_VARIABLES,
}


class UsageError(Exception):
    pass


# -- output -----------------------------------------------------------------


def plain(v):
    """JSON-friendly form of a plausibility value or witness field."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, int):
        return v
    if v is A.BOTTOM:
        return "bottom"
    if v is A.TOP:
        return "top"
    if isinstance(v, A.StarFunction):
        return ["*" if e is None else str(e) for e in v.entries]
    if isinstance(v, A.IntervalValue):
        return [str(v.lo), str(v.hi)]
    if isinstance(v, (list, tuple, set, frozenset)):
        return [plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    return str(v)


def _field(v) -> str:
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False) if (not v or any(c in v for c in ' "=')) else v
    if isinstance(v, bool):
        return "yes" if v else "no"
    return json.dumps(v, separators=(",", ":"), ensure_ascii=False)


def _flatten(d: dict, prefix=""):
    for k, v in d.items():
        if isinstance(v, dict) and v:
            yield from _flatten(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


class Report:
    def __init__(self, command: str):
        self.command = command
        self.records: list[dict] = []
        self.silent = False  # the command already wrote its document to stdout

    def add(self, record: str, **fields):
        self.records.append({"record": record, **{k: plain(v) for k, v in fields.items()}})

    def emit(self, code: int, as_json: bool, out=None):
        out = out or sys.stdout
        if as_json:
            doc = {"command": self.command, "exit": code, "records": self.records}
            out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
            return
        for r in self.records:
            fields = " ".join(f"{k}={_field(v)}" for k, v in _flatten(r) if k != "record")
            out.write(f"{r['record']} {fields}".rstrip() + "\n")
        out.write(f"exit code={code}\n")


def witness_fields(cpm, w: axioms.Witness, names=None) -> dict:
    values = dict(w.values)
    if names:
        for k in ("X", "Y", "Y'", "Z"):
            if k in values and isinstance(values[k], list):
                values[k] = [names[i] for i in values[k]]
    return {
        "law": w.law,
        "events": {k: cpm.space.members(e) for k, e in w.events.items()},
        "values": values,
    }


# -- argument helpers -------------------------------------------------------


def load_model(path: str):
    model = D.model_from_json(D.read_json(path))
    return model, model.build()


def variable_set(text: str | None, names: list[str]) -> list[int]:
    if text is None or text.strip() in ("", "{}", "-"):
        return []
    out = []
    for name in text.split(","):
        name = name.strip()
        if name not in names:
            raise UsageError(f"unknown variable {name!r}; known: {', '.join(names)}")
        out.append(names.index(name))
    return out


def _is_algebraic(cpm) -> bool:
    return cpm.domain.has_oplus and cpm.domain.has_otimes


def _seed(args) -> int:
    return axioms.default_seed() if args.seed is None else args.seed


# -- axioms -----------------------------------------------------------------


def _axiom_records(report: Report, cpm, samples, seed, suite=None) -> bool:
    """Run the law checks, add their records; True iff a required law failed."""
    if samples is None and cpm.space.n > EXHAUSTIVE_MAX_VARIABLES:
        samples = axioms.DEFAULT_SAMPLES
    reports = axioms.run_axioms(cpm, samples, seed)
    required = axioms.required_laws(cpm)
    failed = False
    extra = {"suite": suite} if suite else {}
    for law in axioms.LAWS:
        rep = reports[law]
        req = law in required
        failed |= req and rep.status == "fail"
        info = {k: v for k, v in rep.info.items() if k in ("reason", "alg4_prime", "unrestricted")}
        report.add(
            "law", **extra, law=law, status=rep.status, required=req, checked=rep.checked,
            failures=rep.failures, mode="sampled" if samples else "exhaustive", **info,
        )
        for w in rep.witnesses:
            report.add("witness", **extra, **witness_fields(cpm, w), replays=axioms.replay_witness(cpm, w))
    for name, ok in axioms.lemma_implications(cpm, reports).items():
        failed |= not ok
        report.add("implication", **extra, name=name, status="pass" if ok else "fail")
    return failed


def cmd_axioms(args, report: Report) -> int:
    _, cpm = load_model(args.model)
    samples = args.samples if not args.exhaustive else None
    if args.exhaustive and cpm.space.n > EXHAUSTIVE_MAX_VARIABLES:
        raise UsageError(f"--exhaustive needs n <= {EXHAUSTIVE_MAX_VARIABLES}; use --samples")
    report.add("model", kind=cpm.kind, n=cpm.space.n, claims=sorted(cpm.claims))
    return EXIT_FAIL if _axiom_records(report, cpm, samples, _seed(args)) else EXIT_OK


# -- indep ------------------------------------------------------------------


def _verdict_note(indep, ni, t1) -> str:
    parts = []
    if ni is not None:
        parts.append("NI holds" if ni else "NI fails")
    if t1 is not None:
        parts.append("type-1 holds" if t1 else "type-1 fails")
    parts.append("I holds" if indep else "I fails")
    return ", ".join(parts)


def cmd_indep(args, report: Report) -> int:
    model, cpm = load_model(args.model)
    names = model.variables
    ni = t1 = None
    try:
        if args.events:
            pieces = args.events.split("|")
            if len(pieces) != 3:
                raise UsageError('--events takes "U|V|C"')
            u, v, c = (D.parse_event(p, cpm.space, names) for p in pieces)
            indep = independence.indep_events(cpm, u, v, c)
            if _is_algebraic(cpm):
                ni = independence.noninteractive(cpm, u, v, c)
            if isinstance(cpm, A.ProbSetMeasure):
                t1 = independence.type1_indep(cpm, u, v, c)
            report.add("query", U=cpm.space.members(u), V=cpm.space.members(v), C=cpm.space.members(c))
        else:
            xs, ys, zs = (variable_set(s, names) for s in (args.x, args.y, args.z))
            if not xs or not ys:
                raise UsageError("--x and --y must name at least one variable each")
            indep = independence.indep_rv(cpm, xs, ys, zs)
            if _is_algebraic(cpm):
                ni = independence.noninteractive_rv(cpm, xs, ys, zs)
            if isinstance(cpm, A.ProbSetMeasure):
                t1 = independence.type1_indep_rv(cpm, xs, ys, zs)
            report.add("query", X=[names[i] for i in xs], Y=[names[i] for i in ys], Z=[names[i] for i in zs])
    except independence.QueryUndefined as exc:
        raise UsageError(str(exc)) from None
    report.add("result", independent=indep, noninteractive=ni, type1=t1, note=_verdict_note(indep, ni, t1))
    return EXIT_OK if indep else EXIT_DEPENDENT


# -- buildbn ----------------------------------------------------------------


def cmd_buildbn(args, report: Report) -> int:
    model, cpm = load_model(args.model)
    names = model.variables
    if not _is_algebraic(cpm):
        raise UsageError(f"{cpm.kind} measure provides no ⊗; cannot tabulate a network")
    order = variable_set(args.order, names) if args.order else list(range(len(names)))
    if sorted(order) != list(range(len(names))):
        raise UsageError("--order must be a permutation of the model's variables")
    if cpm.space.n > 6:
        raise UsageError("network construction is limited to n <= 6")
    G = bayesnet.build_network(cpm, order)
    qbn = bayesnet.extract_cpts(G, cpm)
    doc = D.network_to_json(names, G, qbn)
    if args.out in (None, "-"):
        D.write_json(doc, None)
        report.silent = True
        return EXIT_OK
    D.write_json(doc, args.out)
    report.add("network", out=args.out, order=[names[i] for i in order], edges=doc["edges"], algebra=qbn.algebra)
    return EXIT_OK


# -- dsep -------------------------------------------------------------------


def cmd_dsep(args, report: Report) -> int:
    net = D.network_from_json(D.read_json(args.network))
    names = net.nodes
    xs, ys, zs = (variable_set(s, names) for s in (args.x, args.y, args.z))
    if not xs or not ys:
        raise UsageError("--x and --y must name at least one node each")
    try:
        sep = bayesnet.d_separated(net.dag, xs, ys, zs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report.add(
        "dsep", X=[names[i] for i in xs], Y=[names[i] for i in ys], Z=[names[i] for i in zs],
        verdict="d-separated" if sep else "connected",
    )
    if sep:
        return EXIT_OK
    if args.witness or args.witness_out:
        mu = bayesnet.find_dependence_witness(net.dag, xs, ys, zs, budget=args.budget, seed=_seed(args))
        if mu is None:
            report.add("witness", found=False, budget=args.budget)
        else:
            doc = D.model_to_json(D.model_of(mu, names))
            if args.witness_out:
                D.write_json(doc, args.witness_out)
                report.add("witness", found=True, out=args.witness_out)
            else:
                report.add("witness", found=True, model=doc)
    return EXIT_FAIL


# -- verify -----------------------------------------------------------------


def _check_record(report, suite, rep, theorem, cpm, names=None, law=None, **extra) -> bool:
    report.add(
        "check", suite=suite, law=law or rep.law, status=rep.status, theorem=theorem,
        checked=rep.checked, failures=rep.failures, **extra,
    )
    for w in rep.witnesses:
        report.add("witness", suite=suite, **witness_fields(cpm, w, names))
    return theorem and rep.status == "fail"


def _suite_semigraphoid(report, cpm, names, args) -> bool:
    rep = independence.check_semigraphoid(cpm)
    return _check_record(report, "semigraphoid", rep, _is_algebraic(cpm), cpm, names, triples=rep.info["triples"])


def _suite_construction(report, cpm, names, args) -> bool:
    if not _is_algebraic(cpm):
        report.add("check", suite="construction", law="construction", status="n/a", reason=f"{cpm.kind} measure provides no ⊗")
        return False
    rep = bayesnet.verify_construction(cpm)
    failed = False
    for part in ("compatible", "round-trip"):
        failed |= _check_record(report, "construction", rep.parts[part], True, cpm, names)
    report.add("info", suite="construction", distinct_dags=rep.info["distinct_dags"])
    return failed


def _suite_dsep(report, cpm, names, args) -> bool:
    G = bayesnet.build_network(cpm, range(cpm.space.n))
    rep = bayesnet.check_dsep_soundness(G, cpm)
    edges = [[names[p], names[c]] for p, c in sorted(G.edges)]
    return _check_record(
        report, "dsep-sound", rep, _is_algebraic(cpm), cpm, names,
        edges=edges, d_separated_triples=rep.info["d_separated_triples"],
    )


def _suite_ni(report, cpm, names, args) -> bool:
    if not _is_algebraic(cpm):
        report.add("check", suite="ni-vs-i", law="NI-vs-I", status="n/a", reason=f"{cpm.kind} measure provides no ⊗")
        return False
    rep = independence.check_ni_vs_i(cpm)
    failed = _check_record(report, "ni-vs-i", rep.parts["I=>NI"], True, cpm, names)
    part = rep.parts["NI=>I"]
    if part.status == "n/a":
        examples = part.info["examples"]
        note = "NI⇏I witness (expected)" if examples else "no NI⇏I instance at this measure"
        report.add(
            "check", suite="ni-vs-i", law="NI=>I", status="pass", theorem=False, checked=part.checked,
            standard=part.info["standard"], alg4_prime=part.info["alg4_prime"], note=note,
        )
        for w in examples:
            report.add("witness", suite="ni-vs-i", expected=True, **witness_fields(cpm, w))
    else:
        failed |= _check_record(report, "ni-vs-i", part, True, cpm, names)
    return failed


def _suite_axioms(report, cpm, names, args) -> bool:
    return _axiom_records(report, cpm, None, _seed(args), suite="axioms")


_SUITE_RUNNERS = {
    "axioms": _suite_axioms,
    "semigraphoid": _suite_semigraphoid,
    "construction": _suite_construction,
    "dsep-sound": _suite_dsep,
    "ni-vs-i": _suite_ni,
}


def cmd_verify(args, report: Report) -> int:
    model, cpm = load_model(args.model)
    suites = SUITES if args.suite == "all" else (args.suite,)
    n = cpm.space.n
    for s in suites:
        if n > SUITE_CAPS[s]:
            raise UsageError(f"suite {s} is limited to n <= {SUITE_CAPS[s]}, model has n = {n}")
    report.add("model", kind=cpm.kind, n=n, algebraic=_is_algebraic(cpm))
    failed = False
    for s in suites:
        failed |= _SUITE_RUNNERS[s](report, cpm, model.variables, args)
    return EXIT_FAIL if failed else EXIT_OK


# -- reconstruct ------------------------------------------------------------


def cmd_reconstruct(args, report: Report) -> int:
    model, cpm = load_model(args.model)
    net = D.network_from_json(D.read_json(args.network))
    if net.nodes != model.variables:
        raise UsageError("network nodes must match the model's variables in order")
    if not _is_algebraic(cpm):
        raise UsageError(f"{cpm.kind} measure provides no ⊗; nothing to reconstruct")
    if net.qbn is not None and net.qbn.domain != cpm.domain:
        raise UsageError(f"network tables are {net.qbn.algebra} values, the model is {cpm.kind}")
    if not bayesnet.is_compatible(net.dag, cpm):
        report.add("verdict", compatible=False)
        return EXIT_FAIL
    qbn = net.qbn or bayesnet.extract_cpts(net.dag, cpm)
    try:
        got = bayesnet.reconstruct(qbn)
    except bayesnet.MissingCptRow as exc:
        report.add("verdict", compatible=True, error=str(exc))
        return EXIT_FAIL
    truth = cpm.world_values()
    all_equal = True
    for w, (a, b) in enumerate(zip(got, truth)):
        assignment = ",".join(f"{name}={(w >> i) & 1}" for i, name in enumerate(model.variables))
        all_equal &= a == b
        report.add(
            "world", index=w, assignment=assignment, reconstructed=D.format_value(cpm.domain, a),
            original=D.format_value(cpm.domain, b), equal=a == b,
        )
    report.add("verdict", compatible=True, all_equal=all_equal)
    return EXIT_OK if all_equal else EXIT_FAIL


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document instead of line records")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $PLAUSINET_SEED or a fixed constant)")

    p = argparse.ArgumentParser(prog="plausinet", description="Check conditional plausibility measures and the networks built from them.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("axioms", parents=[common], help="check the conditional plausibility laws")
    s.add_argument("model")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every event tuple (n <= 3)")
    mode.add_argument("--samples", type=int, default=None, help="check this many random tuples per law")
    s.set_defaults(func=cmd_axioms)

    s = sub.add_parser("indep", parents=[common], help="answer a conditional independence query")
    s.add_argument("model")
    s.add_argument("--x", help="comma-separated variable names")
    s.add_argument("--y", help="comma-separated variable names")
    s.add_argument("--z", default="", help="conditioning variables (default: none)")
    s.add_argument("--events", help='raw event query "U|V|C", e.g. "X1=1|X2=1|W" or "{0,3}|{1}|W"')
    s.set_defaults(func=cmd_indep)

    s = sub.add_parser("buildbn", parents=[common], help="construct a network along a variable order")
    s.add_argument("model")
    s.add_argument("--order", help="comma-separated permutation of the variables")
    s.add_argument("--out", help="network file to write (default: stdout)")
    s.set_defaults(func=cmd_buildbn)

    s = sub.add_parser("dsep", parents=[common], help="d-separation query on a network")
    s.add_argument("network")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--z", default="")
    s.add_argument("--witness", action="store_true", help="search a dependence witness for connected queries")
    s.add_argument("--witness-out", help="write the witness model to this file (implies --witness)")
    s.add_argument("--budget", type=int, default=200, help="random parameterizations tried by the witness search")
    s.set_defaults(func=cmd_dsep)

    s = sub.add_parser("verify", parents=[common], help="run a theorem suite on a model")
    s.add_argument("model")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("reconstruct", parents=[common], help="rebuild world values from a network's tables")
    s.add_argument("model")
    s.add_argument("network")
    s.set_defaults(func=cmd_reconstruct)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(args.command)
    try:
        code = args.func(args, report)
    except (UsageError, PlausibilityError) as exc:
        report.add("error", message=str(exc))
        code = EXIT_USAGE
        print(f"plausinet {args.command}: {exc}", file=sys.stderr)
    if not report.silent and (report.records or args.json):
        report.emit(code, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 SAT / IN / success, 1 UNSAT / OUT / invalid witness,
2 usage or input error, 3 capability refusal (caps, non-EI language).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ENV_ORACLE_CAP, CapExceeded
from .formula import classify_horn, compile_instance, falsified_clause
from .gadgets import gadget_from_3sat, gadget_text
from .membership import InternalInconsistency, check_membership
from .oracle import block_values, eval_block_model, oracle_entails, oracle_equiv, oracle_sat, pattern_to_block_model
from .outer_res import replay_trace, solve_instance
from .parser import (
    ParseError,
    decode_witness,
    encode_witness,
    parse_clausal,
    parse_dimacs_3sat,
    parse_instance,
    render,
)
from .reduction import NotInEI, reduce_language, reduce_relation

OK, NO, INPUT, REFUSED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _err(msg: str):
    print(msg, file=sys.stderr)


def _model_lines(model) -> list[str]:
    out = [f"blocks {model.s}"]
    for name in sorted(model.values):
        out.append(f"  {name} = {model.blocks(name)}")
    return out


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.instance))
    if args.raw_horn_horn:
        _err(
            "warning: --raw-horn-horn skips the EI membership check; answers are only "
            "guaranteed correct for EI languages"
        )
        templates = {}
        for name, d in sorted(inst.defs.items()):
            phi = d.formula()
            if not classify_horn(phi).horn_horn:
                _err(f"relation {name} is not Horn-Horn as written")
                return REFUSED
            templates[name] = phi
    else:
        try:
            templates = reduce_language(inst.defs)
        except NotInEI as exc:
            _err(f"relation {exc.outcome.name} is not in EI; refusing to solve")
            return REFUSED
    outcome = solve_instance(inst, templates, raw=args.raw_horn_horn)
    if outcome.sat:
        model = outcome.model
        if args.witness:
            Path(args.witness).write_text(encode_witness(model))
            model = decode_witness(Path(args.witness).read_text(), [v.name for v in inst.vars])
        if not eval_block_model(compile_instance(inst), model):
            _err("internal error: witness failed self-verification")
            return INPUT
        print("SAT")
        if not args.witness:
            print("\n".join(_model_lines(model)))
    else:
        print("UNSAT")
        last = outcome.trace[-1]
        removed = sum(1 for e in outcome.trace if e.kind == "remove-literal")
        print(f"  {removed} negative literal(s) removed in {outcome.stats.iterations} pass(es)")
        if last.kind == "empty-clause":
            print(f"  clause {last.clause} became empty")
        else:
            print("  the positive unit clauses are contradictory")
        print(f"  trace replay: {'ok' if replay_trace(outcome.formula, outcome.trace) else 'FAILED'}")
    if args.stats:
        st = outcome.stats
        print(
            f"stats iterations={st.iterations} inner_res_calls={st.inner_res_calls} "
            f"literals_removed={st.literals_removed} inner_clauses_removed={st.inner_clauses_removed} "
            f"retests_skipped={st.retests_skipped}"
        )
    return OK if outcome.sat else NO


def _print_formula(label: str, phi):
    print(f"  {label}: {render(phi)}")


def cmd_check_language(args) -> int:
    inst = parse_instance(_read(args.file))
    all_in = True
    for name in sorted(inst.defs):
        v = check_membership(inst.defs[name], m=args.atoms)
        print(v.report())
        if v.member:
            _print_formula("template", v.template.formula)
        else:
            all_in = False
            r = v.reduction
            _print_formula("reduced", r.reduced)
            bad = r.reduced.clauses[r.offending_clause]
            sub = type(r.reduced)((bad,), r.reduced.vars)
            _print_formula("offending clause", sub)
    return OK if all_in else NO


def cmd_reduce(args) -> int:
    inst = parse_instance(_read(args.file))
    ok = True
    for name in sorted(inst.defs):
        r = reduce_relation(inst.defs[name])
        print(f"{name}: {r.kind}")
        names = r.reduced.names
        for step in r.log:
            print(f"  {step.describe(names)}")
        _print_formula("form", r.reduced)
        ok &= r.horn_horn
    return OK if ok else NO


def cmd_oracle(args) -> int:
    phi = parse_clausal(args.formula)
    if args.mode == "sat":
        b = oracle_sat(phi, cap=args.cap)
        if b is None:
            print("UNSAT")
            return NO
        print("SAT")
        print("  pattern " + "".join(str(x) for x in b.bits))
        print("\n".join("  " + line for line in _model_lines(pattern_to_block_model(b, phi.vars))))
        return OK
    if args.other is None:
        raise InputError(f"oracle {args.mode} needs a second formula")
    psi = parse_clausal(args.other)
    if args.mode == "equiv":
        res = oracle_equiv(phi, psi, cap=args.cap)
        print("EQUIVALENT" if res else "NOT EQUIVALENT")
    else:
        res = oracle_entails(phi, psi, cap=args.cap)
        print("ENTAILS" if res else "DOES NOT ENTAIL")
    return OK if res else NO


def cmd_gadget(args) -> int:
    cnf = parse_dimacs_3sat(_read(args.dimacs))
    text = gadget_text(gadget_from_3sat(cnf))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.instance))
    model = decode_witness(_read(args.witness), [v.name for v in inst.vars])
    phi = compile_instance(inst)
    bad = falsified_clause(phi, block_values(phi, model), (1 << model.s) - 1)
    if bad is None:
        print("VALID")
        return OK
    print(f"INVALID: compiled clause {bad} is falsified")
    return NO


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="setcsp",
        description="Set constraint solver over the powerset algebra.",
        epilog=f"The oracle variable cap defaults to 4 and can be set with {ENV_ORACLE_CAP}.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide an instance file")
    s.add_argument("instance")
    s.add_argument("--witness", metavar="OUT", help="write the JSON witness here")
    s.add_argument("--raw-horn-horn", action="store_true", help="use definitions as Horn-Horn clauses directly")
    s.add_argument("--stats", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("check-language", help="EI membership of every relation in a file")
    s.add_argument("file")
    s.add_argument("--atoms", type=int, default=None, help="atom budget for the counterexample search")
    s.set_defaults(func=cmd_check_language)

    s = sub.add_parser("reduce", help="print Horn-Horn templates and rewrite logs")
    s.add_argument("file")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("oracle", help="brute-force sat / equiv / entails")
    s.add_argument("mode", choices=["sat", "equiv", "entails"])
    s.add_argument("formula")
    s.add_argument("other", nargs="?")
    s.add_argument("--cap", type=int, default=None, help="variable cap for this call")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gadget", help="3SAT (DIMACS) to a U/I/Neq instance")
    s.add_argument("dimacs")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("verify", help="check a witness against an instance")
    s.add_argument("instance")
    s.add_argument("witness")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError, ValueError, KeyError) as exc:
        _err(f"error: {exc}")
        return INPUT
    except CapExceeded as exc:
        _err(f"refused: {exc}")
        return REFUSED
    except InternalInconsistency as exc:
        _err(f"internal inconsistency: {exc}")
        return REFUSED


if __name__ == "__main__":
    sys.exit(main())

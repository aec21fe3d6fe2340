"""Command-line front end.

Every command loads a scenario file, runs one query and prints a report
as text or JSON. Exit codes: 0 when the check passes, 1 when it fails
(including invariant violations of referenced objects), 2 for input
errors (unreadable or malformed files, unknown names, mismatched models).
"""
import argparse
import json
import math
import sys

import numpy as np

from .errors import (
    EffectAlgebraError,
    InvariantError,
    ModelMismatchError,
    ScenarioError,
)
from .holevo import commutant
from .instruments import (
    compose_instruments,
    condition_observable,
    measured_observable,
    sequential_product_observables,
)
from .observables import Verdict, marginals, observables_coexist
from .operations import is_effect_repeatable, repeatability_conditions
from .scenario import Scenario

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

FORMULAS = {
    "seqprod": "(A[I]B)_xy = I_x*(B_y)",
    "condition": "(B|[I]A)_y = sum_x I_x*(B_y)",
    "commutant": "[a,b]_alpha = alpha(b) a - alpha(a) b",
    "compose": "(I o J)_xy* = I_x* J_y*",
    "repeatable": "repeatable iff a = theta or max_s s(a) = 1; "
                  "witness dual b -> s1(b) a",
}


# -- output -------------------------------------------------------------
def fmt_float(x):
    x = float(x)
    if x == 0.0:
        return "0"
    if not math.isfinite(x):
        raise ValueError("non-finite number in report")
    return "%.12g" % x


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def dumps(obj, indent=2, _level=0):
    """JSON text with floats rendered by %.12g and fixed key order."""
    obj = _plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1)
                                   for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if not obj:
        return "{}"
    items = [pad + json.dumps(k) + ": " + dumps(v, indent, _level + 1)
             for k, v in obj.items()]
    return "{\n" + ",\n".join(items) + "\n" + end + "}"


def _text_lines(obj, prefix=""):
    obj = _plain(obj)
    lines = []
    for k, v in obj.items():
        key = prefix + k
        if isinstance(v, dict):
            lines.extend(_text_lines(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], (list, dict)):
            lines.append(f"{key}:")
            for item in v:
                if isinstance(item, dict):
                    lines.append("  " + ", ".join(
                        f"{a}={_text_value(b)}" for a, b in item.items()))
                else:
                    lines.append("  " + _text_value(item))
        else:
            lines.append(f"{key}: {_text_value(v)}")
    return lines


def _text_value(v):
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, list):
        return "[" + ", ".join(_text_value(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def render(report, fmt):
    if fmt == "json":
        return dumps(report) + "\n"
    return "\n".join(_text_lines(report)) + "\n"


# -- commands -----------------------------------------------------------
def _coexist(sc, a, b, witness_out=None):
    A, B = sc.observable(a), sc.observable(b)
    if A.model != B.model:
        raise ModelMismatchError("observables live on different models")
    res = observables_coexist(A, B)
    rep = {"command": "coexist", "a": a, "b": b,
           "verdict": res.verdict.value, "method": res.method}
    if res.witness is not None:
        rep["witness"] = res.witness.to_dict()
    if res.certificate is not None:
        rep["certificate"] = res.certificate
    if res.certificate_verified is not None:
        rep["certificate_verified"] = res.certificate_verified
    if witness_out and res.witness is not None:
        with open(witness_out, "w", encoding="utf-8") as fh:
            fh.write(dumps(res.witness.to_dict()) + "\n")
    code = EXIT_PASS if res.verdict is Verdict.FEASIBLE else EXIT_FAIL
    return rep, code, res.verdict.value


def _repeatable(sc, effect, op=None):
    a = sc.effect(effect)
    v = is_effect_repeatable(a)
    verdict = "REPEATABLE" if v.repeatable else "NOT_REPEATABLE"
    rep = {"command": "repeatable", "effect": effect, "verdict": verdict,
           "max_probability": v.max_probability,
           "formula": FORMULAS["repeatable"]}
    if v.witness_state is not None:
        rep["witness_state"] = v.witness_state.covector
    if v.witness_operation is not None:
        rep["witness_dual_matrix"] = v.witness_operation.dual
    code = EXIT_PASS if v.repeatable else EXIT_FAIL
    if op is not None:
        c = repeatability_conditions(sc.operation(op), a)
        rep["operation"] = op
        rep["conditions"] = dict(zip(("i", "ii", "iii", "iv", "v", "vi"),
                                     c.as_tuple()))
        rep["conditions_agree"] = c.agree
        if not c.agree:
            code = EXIT_FAIL
    return rep, code, verdict


def _seq(sc, command, obs, instr, then):
    A, I, B = sc.observable(obs), sc.instrument(instr), sc.observable(then)
    rep = {"command": command, "obs": obs, "instr": instr, "then": then,
           "formula": FORMULAS[command]}
    C = sequential_product_observables(A, I, B)
    m1, m2 = marginals(C)
    ok = m1.close_to(A, 1e-9)
    if command == "seqprod":
        rep["grid"] = C.to_dict()
        rep["first_marginal_matches"] = ok
    else:
        cond = condition_observable(B, A, I)
        rep["conditioned"] = cond.to_dict()
        ok = ok and cond.close_to(m2, 1e-9)
        rep["is_second_marginal"] = ok
    return rep, EXIT_PASS if ok else EXIT_FAIL, "OK" if ok else "FAILED"


def _commutant(sc, state, a, b):
    alpha, ea, eb = sc.state(state), sc.effect(a), sc.effect(b)
    vec = commutant(alpha, ea, eb)
    val = alpha(vec)
    ok = abs(val) <= 1e-10
    rep = {"command": "commutant", "state": state, "a": a, "b": b,
           "formula": FORMULAS["commutant"], "vector": vec,
           "is_zero": bool(np.max(np.abs(vec)) <= 1e-10),
           "alpha_of_commutant": val}
    return rep, EXIT_PASS if ok else EXIT_FAIL, "OK" if ok else "FAILED"


def _compose(sc, i, j):
    I, J = sc.instrument(i), sc.instrument(j)
    K = compose_instruments(I, J)
    m1, _ = K.marginals()
    ok = measured_observable(m1).close_to(measured_observable(I), 1e-9)
    rep = {"command": "compose", "i": i, "j": j,
           "formula": FORMULAS["compose"],
           "outcomes1": list(K.outcomes1), "outcomes2": list(K.outcomes2),
           "dual_matrices": K.duals,
           "measured": K.measured().to_dict(),
           "first_marginal_measures_I": ok}
    return rep, EXIT_PASS if ok else EXIT_FAIL, "OK" if ok else "FAILED"


def _run_check(sc, check):
    cmd = check["command"]
    args = {k: v for k, v in check.items() if k not in ("command", "expect")}
    if cmd == "coexist":
        return _coexist(sc, args["a"], args["b"])
    if cmd == "repeatable":
        return _repeatable(sc, args["effect"], args.get("op"))
    if cmd in ("seqprod", "condition"):
        return _seq(sc, cmd, args["obs"], args["instr"], args["then"])
    if cmd == "commutant":
        return _commutant(sc, args["state"], args["a"], args["b"])
    if cmd == "compose":
        return _compose(sc, args["i"], args["j"])
    raise ScenarioError(f"command {cmd!r} cannot be used as a check")


def _validate(sc):
    objects, code = [], EXIT_PASS
    for section, name, err in sc.validate_all():
        entry = {"kind": section[:-1], "name": name,
                 "status": "ok" if err is None else "invalid"}
        if err is not None:
            entry["error"] = err
            code = EXIT_FAIL
        objects.append(entry)
    checks = []
    for k, check in enumerate(sc.checks):
        entry = {"index": k, "command": check["command"]}
        try:
            _, c, verdict = _run_check(sc, check)
        except InvariantError as exc:
            c, verdict = EXIT_FAIL, "INVALID"
            entry["error"] = str(exc)
        except EffectAlgebraError as exc:
            c, verdict = EXIT_FAIL, "ERROR"
            entry["error"] = str(exc)
        entry["verdict"] = verdict
        if "expect" in check:
            entry["expect"] = check["expect"]
            passed = verdict == check["expect"]
        else:
            passed = c == EXIT_PASS
        entry["status"] = "pass" if passed else "fail"
        if not passed:
            code = EXIT_FAIL
        checks.append(entry)
    rep = {"command": "validate", "objects": objects, "checks": checks,
           "result": "PASS" if code == EXIT_PASS else "FAIL"}
    return rep, code, rep["result"]


def build_parser():
    p = argparse.ArgumentParser(
        prog="effectalg",
        description="Effect-algebra checks on scenario files.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tol", type=float, default=None,
                   help="model tolerance (default 1e-9)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check every object and directive")
    s.add_argument("file")
    s = sub.add_parser("coexist", help="joint measurability of observables")
    s.add_argument("file")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--witness-out", default=None)
    s = sub.add_parser("repeatable", help="repeatability of an effect")
    s.add_argument("file")
    s.add_argument("--effect", required=True)
    s.add_argument("--op", default=None)
    for name in ("seqprod", "condition"):
        s = sub.add_parser(name, help=FORMULAS[name])
        s.add_argument("file")
        s.add_argument("--obs", required=True)
        s.add_argument("--instr", required=True)
        s.add_argument("--then", required=True)
    s = sub.add_parser("commutant", help=FORMULAS["commutant"])
    s.add_argument("file")
    s.add_argument("--state", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s = sub.add_parser("compose", help=FORMULAS["compose"])
    s.add_argument("file")
    s.add_argument("--i", required=True)
    s.add_argument("--j", required=True)
    return p


def run(argv=None):
    """Run the CLI; returns ``(exit_code, output_text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_PASS if exc.code == 0 else EXIT_INPUT), ""
    if args.tol is not None and not (0 < args.tol < 1):
        return EXIT_INPUT, _error(args, "input-error", "--tol must lie in (0, 1)")
    try:
        sc = Scenario.load(args.file, tol=args.tol)
        cmd = args.command
        if cmd == "validate":
            rep, code, _ = _validate(sc)
        elif cmd == "coexist":
            rep, code, _ = _coexist(sc, args.a, args.b, args.witness_out)
        elif cmd == "repeatable":
            rep, code, _ = _repeatable(sc, args.effect, args.op)
        elif cmd in ("seqprod", "condition"):
            rep, code, _ = _seq(sc, cmd, args.obs, args.instr, args.then)
        elif cmd == "commutant":
            rep, code, _ = _commutant(sc, args.state, args.a, args.b)
        else:
            rep, code, _ = _compose(sc, args.i, args.j)
    except InvariantError as exc:
        return EXIT_FAIL, _error(args, "invariant-violation", str(exc))
    except (EffectAlgebraError, OSError) as exc:
        return EXIT_INPUT, _error(args, "input-error", str(exc))
    return code, render(rep, args.format)


def _error(args, kind, message):
    return render({"command": args.command, "error": kind,
                   "message": message}, args.format)


def main(argv=None):
    code, out = run(argv)
    if out:
        stream = sys.stdout if code != EXIT_INPUT else sys.stderr
        stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())

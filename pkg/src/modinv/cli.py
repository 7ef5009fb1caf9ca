"""Command-line frontend: individual computations and the BF4 suite.

Text output is deterministic byte-for-byte for fixed flags (timings are
emitted only in JSON reports, which validate against
schemas/report.schema.json).
"""

from __future__ import annotations

import argparse
import json
import sys

from .ffield import is_prime
from .gca import Signature
from .forge import (
    InvariantSystem,
    construct_M_family,
    dickson_generators,
    jacobian_criterion,
    verify_free_module,
)
from .f4 import CHECK_NAMES, F4Suite
from .groups import MatrixGroup
from .steenrod import bockstein, power


def _check_odd_prime(p: int):
    if p % 2 == 0 or not is_prime(p):
        raise SystemExit(f"error: p must be an odd prime, got {p}")


def _emit(args, payload, text: str):
    if args.json:
        out = json.dumps(payload, indent=2, sort_keys=True)
    else:
        out = text
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def cmd_dickson(args) -> int:
    _check_odd_prime(args.p)
    k = args.k
    if k not in (2, 3):
        raise SystemExit("error: --k must be 2 or 3")
    sig = Signature.bv(args.p, k) if k == 3 else Signature.standard(args.p, k)
    gens = dickson_generators(sig, k)
    names = [f"L{k}"] + [f"Q{k},{i}" for i in range(k - 1, 0, -1)]
    lines = [f"p = {args.p}, k = {k}"]
    payload = {"p": args.p, "k": k, "generators": {}}
    for name, g in zip(names, gens):
        lines.append(f"{name} = {g}  [degree {g.degree()}]")
        payload["generators"][name] = {"element": str(g), "degree": g.degree()}
    _emit(args, payload, "\n".join(lines))
    return 0


GROUP_PRESETS = {
    "gl2": lambda p: MatrixGroup.general_linear(p, 2),
    "sl3": lambda p: MatrixGroup.special_linear(p, 3),
    "trivial2": lambda p: MatrixGroup.trivial(p, 2),
    "trivial3": lambda p: MatrixGroup.trivial(p, 3),
    "reflection2": lambda p: MatrixGroup(p, [[[p - 1, 0], [0, 1]]], name="reflection"),
}


def _resolve_group(args) -> MatrixGroup:
    source = args.group
    if source in GROUP_PRESETS:
        return GROUP_PRESETS[source](args.p)
    with open(source) as fh:
        return MatrixGroup.from_json(json.load(fh), p=args.p)


def _resolve_rho(args, sig: Signature, group: MatrixGroup):
    choice = args.rho
    if choice == "auto":
        choice = {
            "gl2": "dickson", "sl3": "dickson",
            "trivial2": "vars", "trivial3": "vars",
        }.get(args.group)
        if args.group == "reflection2":
            return [sig.var("x1") ** 2, sig.var("x2")]
        if choice is None:
            raise SystemExit("error: --rho is required for a custom group")
    if choice == "dickson":
        n = sig.n_poly
        gens = dickson_generators(sig, n)
        if group.name.startswith("GL"):
            # GL_n invariants: L^(p-1) and the Q's
            return [gens[0] ** (sig.p - 1)] + gens[1:]
        return gens
    if choice == "vars":
        return [sig.var(n) for n in sig.poly_names]
    with open(choice) as fh:
        data = json.load(fh)
    return [sig.parse(s) for s in data["rho"]]


def cmd_invariants(args) -> int:
    _check_odd_prime(args.p)
    group = _resolve_group(args)
    n = group.n
    sig = Signature.bv(args.p, n) if args.group == "sl3" else Signature.standard(args.p, n)
    rho = _resolve_rho(args, sig, group)
    system = InvariantSystem(sig, group, rho)
    verdict = jacobian_criterion(system)
    family = construct_M_family(system)
    fm = verify_free_module(system, family, args.max_degree)
    generators = [str(r) for r in rho] + [str(e.M) for e in family.values()]
    payload = {
        "p": args.p,
        "group": args.group,
        "rho": [str(r) for r in rho],
        "criterion": verdict.to_dict(),
        "family": {"+".join(str(i + 1) for i in k): e.to_dict() for k, e in family.items()},
        "free_module": fm.to_dict(),
        "generators": generators,
    }
    lines = [f"group: {group.name or args.group} (p = {args.p})"]
    lines.append(f"criterion holds: {verdict.holds}")
    lines.append(f"f_det^-1 = {verdict.f_det_inv}")
    lines.append(f"iota = {verdict.iota}")
    if verdict.witness is not None:
        lines.append(f"witness = {verdict.witness}")
    for k, e in family.items():
        label = ",".join(str(i + 1) for i in k)
        lines.append(f"M_{{{label}}} = {e.M}  [degree {e.M.degree()}]  B = {e.B}")
    lines.append(f"free module over P(V*)^G on {{M_I}}: {fm.status.upper()} "
                 f"[degrees 0..{args.max_degree}]")
    lines.append(f"generators ({len(generators)}): " + "; ".join(generators))
    _emit(args, payload, "\n".join(lines))
    return 0 if fm.passed else 1


def cmd_steenrod_table(args) -> int:
    _check_odd_prime(args.p)
    p = args.p
    sig = Signature.bv(p, 3)
    L3, Q32, Q31 = dickson_generators(sig, 3)
    table = [
        ("P^1", "L3", power(1, L3)), ("P^3", "L3", power(p, L3)), ("P^9", "L3", power(p * p, L3)),
        ("P^1", "Q3,2", power(1, Q32)), ("P^3", "Q3,2", power(p, Q32)), ("P^9", "Q3,2", power(p * p, Q32)),
        ("P^1", "Q3,1", power(1, Q31)), ("P^3", "Q3,1", power(p, Q31)), ("P^9", "Q3,1", power(p * p, Q31)),
    ]
    m3 = sig.parse("v1v2v3")
    m4 = bockstein(m3)
    m8 = -power(1, m4)
    m9 = bockstein(m8)
    m20 = power(p, m8)
    m21 = power(p, m9)
    m25 = power(1, m21)
    chain = [
        ("m3 = M_{1,2,3}", m3),
        ("m4 = beta m3", m4),
        ("m8 = -P^1 m4", m8),
        ("m9 = beta m8", m9),
        ("m20 = P^3 m8", m20),
        ("m21 = P^3 m9", m21),
        ("m25 = P^1 m21", m25),
        ("beta m25", bockstein(m25)),
    ]
    lines = [f"p = {p}"]
    payload = {"p": p, "table": {}, "chain": {}}
    for op, name, val in table:
        lines.append(f"{op} {name} = {val}")
        payload["table"][f"{op} {name}"] = str(val)
    lines.append("M-chain:")
    for label, val in chain:
        lines.append(f"{label} = {val}  [degree {val.degree()}]")
        payload["chain"][label] = str(val)
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_verify_f4(args) -> int:
    _check_odd_prime(args.p)
    if args.max_degree == 0:
        print("warning: --max-degree 0 makes the degreewise checks vacuous", file=sys.stderr)
    checks = args.checks.split(",") if args.checks else None
    suite = F4Suite(d_max=args.max_degree, p=args.p, jobs=args.jobs)
    reports = suite.run(checks)
    payload = [r.to_dict() for r in reports]
    lines = [r.summary() for r in reports]
    ok = all(r.passed for r in reports)
    lines.append("all checks passed" if ok else "some checks FAILED")
    _emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


HILBERT_MODELS = ("toda", "torus", "radical-quotient", "sl3-invariants", "gl2-invariants")


def cmd_hilbert(args) -> int:
    _check_odd_prime(args.p)
    d_max = args.max_degree
    suite = F4Suite(d_max=max(d_max, 1), p=args.p)
    if args.model == "toda":
        dims = [suite.toda.graded_dimension(d) for d in range(d_max + 1)]
    elif args.model == "torus":
        dims = [suite.torus.presented.graded_dimension(d) for d in range(d_max + 1)]
    elif args.model == "radical-quotient":
        dims = [suite.radical_quotient.graded_dimension(d) for d in range(d_max + 1)]
    elif args.model == "sl3-invariants":
        dims = suite.invariant_series[: d_max + 1]
    elif args.model == "gl2-invariants":
        from .series import free_module_series

        dims = free_module_series([0, 10, 11, 15], [16, 12], d_max)
    else:
        raise SystemExit(f"error: unknown model {args.model}; options: {HILBERT_MODELS}")
    payload = {"model": args.model, "p": args.p, "dimensions": dims}
    lines = [f"model: {args.model} (p = {args.p})"]
    lines += [f"{d}: {dims[d]}" for d in range(d_max + 1)]
    _emit(args, payload, "\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="modinv",
        description="Exact modular invariant theory over F_p and the BF4 verification suite",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, max_degree=60):
        sp.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        sp.add_argument("--output", help="write output to a file instead of stdout")
        sp.add_argument("--max-degree", type=int, default=max_degree,
                        help=f"top degree for degreewise checks (default {max_degree})")

    sp = sub.add_parser("dickson", help="print Dickson generators L_k, Q_k,i")
    common(sp)
    sp.add_argument("--k", type=int, required=True, help="number of variables (2 or 3)")
    sp.set_defaults(func=cmd_dickson)

    sp = sub.add_parser("invariants", help="Jacobian criterion and the M_I family")
    common(sp, max_degree=24)
    sp.add_argument("--group", default="gl2",
                    help="gl2|sl3|trivial2|trivial3|reflection2 or a JSON file of generator matrices")
    sp.add_argument("--rho", default="auto",
                    help="auto|dickson|vars or a JSON file {\"rho\": [element strings]}")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("steenrod-table", help="reduced-power table and the M-chain on K(V3*)")
    common(sp)
    sp.set_defaults(func=cmd_steenrod_table)

    sp = sub.add_parser("verify-f4", help="run the BF4 verification suite")
    common(sp)
    sp.add_argument("--checks", help="comma-separated subset of: " + ",".join(CHECK_NAMES))
    sp.add_argument("--jobs", type=int, default=1, help="parallel degreewise jobs")
    sp.set_defaults(func=cmd_verify_f4)

    sp = sub.add_parser("hilbert", help="degreewise dimensions of a model algebra")
    common(sp)
    sp.add_argument("--model", default="toda", help="|".join(HILBERT_MODELS))
    sp.set_defaults(func=cmd_hilbert)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "max_degree", 0) < 0:
        raise SystemExit("error: --max-degree must be non-negative")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

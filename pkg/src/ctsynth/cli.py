"""Command-line interface: synthesis, verification, T-count reporting.

Exit codes: 0 success with all checks passing, 1 verification failure,
2 usage or parameter error.  Diagnostics go to stderr, machine output to
stdout or --out.
"""

from __future__ import annotations

import argparse
import json
import sys

from ctsynth import constructions as cons
from ctsynth.circuit import CircuitError, from_text, t_count, to_text
from ctsynth.constructions import REGISTRY, ValidityError
from ctsynth.sim import SimulationError, mat_equal, unitary_of
from ctsynth.verify import (
    appendix_identities, check_construction, ledger_to_json, ledger_to_text,
    table_ledger,
)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _make_spec(args) -> cons.ConstructionSpec:
    if args.construction not in REGISTRY:
        raise ValidityError(f"unknown construction {args.construction!r}")
    fn, wanted = REGISTRY[args.construction]
    kwargs = {}
    for p in wanted:
        val = getattr(args, p, None)
        if val is not None:
            kwargs[p] = val
    return fn(**kwargs)


def cmd_synth(args) -> int:
    spec = _make_spec(args)
    if args.format == "json":
        payload = spec.sidecar()
        payload["circuit"] = to_text(spec.circuit)
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(to_text(spec.circuit), args.out)
    return 0


def cmd_verify(args) -> int:
    if args.stdin:
        circ = from_text(sys.stdin.read())
        tc = t_count(circ)
        report = {
            "schema": 1,
            "n_qubits": circ.n_qubits,
            "t_count": tc.unconditional,
            "branch_t_counts": sorted(tc.outcome_values()) if tc.per_outcome else None,
        }
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        return 0
    spec = _make_spec(args)
    rep = check_construction(spec)
    _emit(json.dumps(rep.to_json(), indent=2) + "\n", args.out)
    if not rep.ok:
        print(f"verification failed: {rep.detail}", file=sys.stderr)
        return 1
    return 0


def cmd_tcount(args) -> int:
    if args.table:
        rows = table_ledger(args.kmax)
        if args.format == "json":
            _emit(ledger_to_json(rows) + "\n", args.out)
        else:
            _emit(ledger_to_text(rows) + "\n", args.out)
        bad = [r for r in rows if r.match is False]
        if bad:
            for r in bad:
                print(f"mismatch: {r.gate} k={r.k} formula={r.formula_value} "
                      f"measured={r.measured}", file=sys.stderr)
            return 1
        return 0
    spec = _make_spec(args)
    tc = t_count(spec.circuit)
    payload = {"schema": 1, "name": spec.name, "params": spec.params,
               "t_count": tc.unconditional,
               "branch_t_counts": sorted(tc.outcome_values()) if tc.per_outcome else None}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_equiv(args) -> int:
    with open(args.file_a) as fh:
        ca = from_text(fh.read())
    with open(args.file_b) as fh:
        cb = from_text(fh.read())
    if ca.has_measurement() or cb.has_measurement():
        print("equiv compares measurement-free circuits", file=sys.stderr)
        return 2
    same = mat_equal(unitary_of(ca), unitary_of(cb))
    _emit(json.dumps({"schema": 1, "equal": same}) + "\n", args.out)
    return 0 if same else 1


def cmd_appendix(args) -> int:
    results = appendix_identities()
    payload = {"schema": 1,
               "identities": [{"name": nm, "holds": ok} for nm, ok in results]}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if all(ok for _, ok in results) else 1


def cmd_list(args) -> int:
    names = sorted(REGISTRY)
    payload = {"schema": 1, "constructions": names}
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit("\n".join(names) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctsynth")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_construction=True):
        if with_construction:
            p.add_argument("construction", nargs="?")
            p.add_argument("--k", type=int)
            p.add_argument("--m", type=int)
            p.add_argument("--variant")
        p.add_argument("--format", choices=["circuit-text", "json", "table"],
                       default="circuit-text")
        p.add_argument("--out")

    p = sub.add_parser("synth", help="generate a construction")
    common(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify", help="check a construction's obligations")
    common(p)
    p.add_argument("--stdin", action="store_true",
                   help="read a circuit-text file from stdin instead")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("tcount", help="T-count of a construction or the full table")
    common(p)
    p.add_argument("--table", action="store_true")
    p.add_argument("--kmax", type=int, default=8)
    p.set_defaults(fn=cmd_tcount)

    p = sub.add_parser("equiv", help="compare two circuit-text files exactly")
    p.add_argument("file_a")
    p.add_argument("file_b")
    common(p, with_construction=False)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("appendix", help="run the appendix identity checks")
    common(p, with_construction=False)
    p.set_defaults(fn=cmd_appendix)

    p = sub.add_parser("list", help="list registered constructions")
    common(p, with_construction=False)
    p.set_defaults(fn=cmd_list)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidityError, CircuitError, SimulationError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
